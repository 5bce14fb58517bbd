//! File formats shared by the command-line tool and the plotting scripts.

pub mod csv;
pub mod json;

pub use self::csv::{
    collisions_json, stream_scan_csv, write_bundle_csv, write_scan_csv, StreamedScan,
    DEFAULT_SAMPLE_CAP,
};
pub use self::json::{
    components_json, eigenvalues_json, hull_json, matrix_json, parse_hull, parse_matrix,
    parse_path,
};
