//! Dense nonsymmetric eigenvalues.
//!
//! Parlett-Reinsch balancing, Householder reduction to upper Hessenberg
//! form, then single-shift complex QR with Wilkinson shifts and periodic
//! exceptional shifts. Deflation follows the Ahues-Tisseur test used by
//! LAPACK's `zlahqr`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

const ULP: f64 = f64::EPSILON;
const EXCEPTIONAL_SHIFT: f64 = 0.75;

#[inline]
fn cabs1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// All `n` eigenvalues with algebraic multiplicity, in the diagonal order of
/// the computed Schur form.
pub fn eigenvalues(a: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let n = a.n();
    let mut h = to_row_major(a);
    balance(&mut h, n);
    reduce_to_hessenberg(&mut h, n);
    hessenberg_qr(&mut h, n).ok_or_else(|| Error::NoConvergence {
        iterations: max_sweeps(n),
        matrix: Box::new(a.clone()),
    })
}

/// Spectral radius `max |λ_i|`.
pub fn spectral_radius(values: &[Complex64]) -> f64 {
    values.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Smallest pairwise distance, `+inf` for fewer than two values.
pub fn min_gap(values: &[Complex64]) -> f64 {
    let mut gap = f64::INFINITY;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            gap = gap.min((values[i] - values[j]).norm());
        }
    }
    gap
}

fn max_sweeps(n: usize) -> usize {
    30 * n.max(10) * n.max(1)
}

pub(crate) fn to_row_major(a: &ComplexMatrix) -> Vec<Complex64> {
    let n = a.n();
    let mut h = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            h.push(a[(i, j)]);
        }
    }
    h
}

/// Diagonal similarity by powers of two, so eigenvalues are unchanged bit for bit
/// in exact arithmetic and row/column norms are equilibrated.
fn balance(h: &mut [Complex64], n: usize) {
    const RADIX: f64 = 2.0;
    const RADIX_SQ: f64 = RADIX * RADIX;
    loop {
        let mut done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += cabs1(h[j * n + i]);
                    r += cabs1(h[i * n + j]);
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX_SQ;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= RADIX_SQ;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let inv = 1.0 / f;
                for j in 0..n {
                    h[i * n + j] *= inv;
                }
                for j in 0..n {
                    h[j * n + i] *= f;
                }
            }
        }
        if done {
            break;
        }
    }
}

/// In-place unitary similarity to upper Hessenberg form.
pub(crate) fn reduce_to_hessenberg(h: &mut [Complex64], n: usize) {
    if n < 3 {
        return;
    }
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..n - 2 {
        let len = n - k - 1;
        let mut alpha = 0.0;
        for i in 0..len {
            v[i] = h[(k + 1 + i) * n + k];
            alpha += v[i].norm_sqr();
        }
        let tail: f64 = (1..len).map(|i| v[i].norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let alpha = alpha.sqrt();
        let x0 = v[0];
        let phase = if x0.norm() > 0.0 {
            x0 / x0.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        v[0] += phase * alpha;
        let vnorm2: f64 = (0..len).map(|i| v[i].norm_sqr()).sum();
        let tau = 2.0 / vnorm2;

        // left: rows k+1.., all columns from k
        for j in k..n {
            let mut s = Complex64::new(0.0, 0.0);
            for i in 0..len {
                s += v[i].conj() * h[(k + 1 + i) * n + j];
            }
            s *= tau;
            for i in 0..len {
                h[(k + 1 + i) * n + j] -= v[i] * s;
            }
        }
        // right: columns k+1.., all rows
        for i in 0..n {
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..len {
                s += h[i * n + k + 1 + j] * v[j];
            }
            s *= tau;
            for j in 0..len {
                h[i * n + k + 1 + j] -= s * v[j].conj();
            }
        }
        for i in k + 2..n {
            h[i * n + k] = Complex64::new(0.0, 0.0);
        }
    }
}

/// Rotation `[[c, s], [-conj(s), c]]` mapping `(a, b)` to `(r, 0)`.
#[inline]
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    if b == Complex64::new(0.0, 0.0) {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    let an = a.norm();
    let bn = b.norm();
    if an == 0.0 {
        return (0.0, b.conj() / bn);
    }
    let r = an.hypot(bn);
    (an / r, (a / an) * b.conj() / r)
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let p = (a - d) * 0.5;
    let bc = b * c;
    let disc = (p * p + bc).sqrt();
    let plus = p + disc;
    let minus = p - disc;
    let denom = if plus.norm() >= minus.norm() { plus } else { minus };
    if denom.norm() == 0.0 {
        d
    } else {
        d - bc / denom
    }
}

fn hessenberg_qr(h: &mut [Complex64], n: usize) -> Option<Vec<Complex64>> {
    let mut eig = vec![Complex64::new(0.0, 0.0); n];
    if n == 0 {
        return Some(eig);
    }
    let small = f64::MIN_POSITIVE * (n as f64 / ULP);
    let budget = max_sweeps(n);
    let mut total = 0usize;
    let mut its = 0usize;
    let mut hi = n - 1;
    let at = |i: usize, j: usize| i * n + j;

    loop {
        if hi == 0 {
            eig[0] = h[0];
            break;
        }
        // look for a negligible subdiagonal entry in the active block
        let mut l = hi;
        while l > 0 {
            let sub = cabs1(h[at(l, l - 1)]);
            if sub <= small {
                break;
            }
            let mut tst = cabs1(h[at(l - 1, l - 1)]) + cabs1(h[at(l, l)]);
            if tst == 0.0 {
                if l >= 2 {
                    tst += h[at(l - 1, l - 2)].re.abs();
                }
                if l + 1 < n {
                    tst += h[at(l + 1, l)].re.abs();
                }
            }
            if sub <= ULP * tst {
                let ab = sub.max(cabs1(h[at(l - 1, l)]));
                let ba = sub.min(cabs1(h[at(l - 1, l)]));
                let diff = h[at(l - 1, l - 1)] - h[at(l, l)];
                let aa = cabs1(h[at(l, l)]).max(cabs1(diff));
                let bb = cabs1(h[at(l, l)]).min(cabs1(diff));
                let s = aa + ab;
                if ba * (ab / s) <= small.max(ULP * (bb * (aa / s))) {
                    break;
                }
            }
            l -= 1;
        }
        if l > 0 {
            h[at(l, l - 1)] = Complex64::new(0.0, 0.0);
        }
        if l == hi {
            eig[hi] = h[at(hi, hi)];
            hi -= 1;
            its = 0;
            continue;
        }

        total += 1;
        its += 1;
        if total > budget {
            return None;
        }
        let shift = if its % 20 == 10 {
            h[at(l, l)] + EXCEPTIONAL_SHIFT * h[at(l + 1, l)].re.abs()
        } else if its.is_multiple_of(20) {
            h[at(hi, hi)] + EXCEPTIONAL_SHIFT * h[at(hi, hi - 1)].re.abs()
        } else {
            wilkinson_shift(
                h[at(hi - 1, hi - 1)],
                h[at(hi - 1, hi)],
                h[at(hi, hi - 1)],
                h[at(hi, hi)],
            )
        };
        qr_sweep(h, n, l, hi, shift);
    }
    Some(eig)
}

/// One explicit shifted QR step `H - μI = QR`, `H <- RQ + μI` on rows/columns `l..=hi`.
fn qr_sweep(h: &mut [Complex64], n: usize, l: usize, hi: usize, shift: Complex64) {
    let at = |i: usize, j: usize| i * n + j;
    for i in l..=hi {
        h[at(i, i)] -= shift;
    }
    let mut rots = Vec::with_capacity(hi - l);
    for k in l..hi {
        let (c, s) = givens(h[at(k, k)], h[at(k + 1, k)]);
        for j in k..=hi {
            let x = h[at(k, j)];
            let y = h[at(k + 1, j)];
            h[at(k, j)] = x * c + s * y;
            h[at(k + 1, j)] = -s.conj() * x + y * c;
        }
        h[at(k + 1, k)] = Complex64::new(0.0, 0.0);
        rots.push((c, s));
    }
    for (off, &(c, s)) in rots.iter().enumerate() {
        let k = l + off;
        for i in l..=(k + 1).min(hi) {
            let x = h[at(i, k)];
            let y = h[at(i, k + 1)];
            h[at(i, k)] = x * c + y * s.conj();
            h[at(i, k + 1)] = -x * s + y * c;
        }
    }
    for i in l..=hi {
        h[at(i, i)] += shift;
    }
}

/// Unit eigenvector for an (approximate) eigenvalue by inverse iteration.
pub fn eigenvector(a: &ComplexMatrix, lambda: Complex64) -> Result<Vec<Complex64>> {
    let n = a.n();
    let scale = a.frobenius_norm().max(1.0);
    let mut shifted = a.as_inner().clone();
    // nudge off the exact eigenvalue so the factorization stays nonsingular
    let sigma = lambda + Complex64::new(scale * 1e3 * ULP, scale * 1e3 * ULP);
    for i in 0..n {
        shifted[(i, i)] -= sigma;
    }
    let lu = shifted.lu();
    let mut x = DVector::from_element(n, Complex64::new(1.0, 0.0) / (n as f64).sqrt());
    for _ in 0..3 {
        let y = lu
            .solve(&x)
            .ok_or_else(|| Error::argument("inverse iteration hit a singular factorization"))?;
        let norm = y.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::argument("inverse iteration diverged"));
        }
        x = y / Complex64::new(norm, 0.0);
    }
    Ok(x.iter().copied().collect())
}

/// Determinant by partially pivoted LU.
pub(crate) fn determinant(m: DMatrix<Complex64>) -> Complex64 {
    m.lu().determinant()
}
