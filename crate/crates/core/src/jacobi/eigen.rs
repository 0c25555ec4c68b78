//! Implicit-shift QL iteration for symmetric tridiagonal matrices.

use crate::error::{Error, Result};

/// Iteration budget per eigenvalue.
pub const MAX_SWEEPS: usize = 64;

/// Diagonalise the tridiagonal matrix with diagonal `d` and signed
/// sub-diagonal `sub` (length `d.len() - 1`).
///
/// On return `d` holds the eigenvalues (unsorted) and the columns of the
/// returned row-major matrix hold the eigenvectors.
pub(crate) fn tql(d: &mut [f64], sub: &[f64]) -> Result<Vec<Vec<f64>>> {
    let n = d.len();
    let mut z: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|k| if i == k { 1.0 } else { 0.0 }).collect())
        .collect();
    let mut e = vec![0.0; n];
    e[..n.saturating_sub(1)].copy_from_slice(sub);

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() + dd == dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_SWEEPS {
                return Err(Error::NoConvergence { row: l });
            }
            // Wilkinson-type shift from the leading 2x2 block
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for row in z.iter_mut() {
                    let f = row[i + 1];
                    row[i + 1] = s * row[i] + c * f;
                    row[i] = c * row[i] - s * f;
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(z)
}
