//! Dense complex matrices, convex hulls, and their spectra.

pub mod eigen;
pub mod matrix;
pub mod multiplicity;
pub mod poly;

pub use eigen::{eigenvalues, eigenvector, min_gap, spectral_radius};
pub use matrix::{convex_combine, BarycentricPoint, ComplexMatrix, MatrixHull};
pub use multiplicity::{
    cluster, cluster_threshold, lex_compare, multiplicity_list, multiplicity_list_of,
    MultiplicityList,
};
pub use poly::{
    char_poly, discriminant, discriminant_is_zero, discriminant_resultant, relative_residual,
    root_discriminant, vanishing_order, CharPoly,
};
