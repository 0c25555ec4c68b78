//! Tridiagonal interaction matrices and their spectral decompositions.
//!
//! The closed-form decomposition is built from orthonormal polynomial values;
//! the numeric one comes from an implicit QL iteration and serves as oracle.

mod eigen;

use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::polynomials::{orthonormal_eval, recurrence, FamilyParams};

pub use eigen::MAX_SWEEPS;

/// Entries below this magnitude are skipped when fixing column signs.
pub const SIGN_THRESHOLD: f64 = 1e-12;
const PROFILE_TOLERANCE: f64 = 1e-12;

/// Symmetric tridiagonal matrix with diagonal `F_i` and off-diagonal entries `-E_i`.
///
/// Only the magnitudes `E_i >= 0` are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(invalid("matrix must have at least one row"));
        }
        if offdiag.len() + 1 != diag.len() {
            return Err(Error::DimensionMismatch {
                expected: diag.len() - 1,
                found: offdiag.len(),
            });
        }
        if diag.iter().chain(&offdiag).any(|v| !v.is_finite()) {
            return Err(invalid("matrix entries must be finite"));
        }
        if offdiag.iter().any(|&e| e < 0.0) {
            return Err(invalid("off-diagonal magnitudes must be nonnegative"));
        }
        Ok(SymTridiagonal { diag, offdiag })
    }

    pub fn size(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    /// Magnitudes `E_1..E_N`; the matrix entries are their negatives.
    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    /// Entry `(i, j)` of the matrix.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.abs_diff(j) {
            0 => self.diag[i],
            1 => -self.offdiag[i.min(j)],
            _ => 0.0,
        }
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.diag.iter().chain(&self.offdiag).fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `shift * I + scale * self`, keeping the sign convention (`scale >= 0`).
    pub fn affine(&self, shift: f64, scale: f64) -> Result<Self> {
        SymTridiagonal::new(
            self.diag.iter().map(|f| shift + scale * f).collect(),
            self.offdiag.iter().map(|e| scale * e).collect(),
        )
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.size();
        (0..n).map(|i| (0..n).map(|j| self.get(i, j)).collect()).collect()
    }
}

/// Matrix family selector; the matrix has `N + 1` rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JacobiFamily {
    Constant { n: usize },
    Polynomial(FamilyParams),
}

impl JacobiFamily {
    pub fn constant(n: usize) -> Result<Self> {
        let jf = JacobiFamily::Constant { n };
        jf.validate()?;
        Ok(jf)
    }

    pub fn krawtchouk(p: f64, n: usize) -> Result<Self> {
        FamilyParams::krawtchouk(p, n).map(JacobiFamily::Polynomial)
    }

    pub fn hahn(alpha: f64, beta: f64, n: usize) -> Result<Self> {
        FamilyParams::hahn(alpha, beta, n).map(JacobiFamily::Polynomial)
    }

    pub fn dual_q_krawtchouk(cbar: f64, q: f64, n: usize) -> Result<Self> {
        FamilyParams::dual_q_krawtchouk(cbar, q, n).map(JacobiFamily::Polynomial)
    }

    pub fn order(&self) -> usize {
        match self {
            JacobiFamily::Constant { n } => *n,
            JacobiFamily::Polynomial(fp) => fp.order(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            JacobiFamily::Constant { n: 0 } => Err(invalid("order N must be positive")),
            JacobiFamily::Constant { .. } => Ok(()),
            JacobiFamily::Polynomial(fp) => fp.validate(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Analytic,
    Numeric,
}

/// `M = U D U^T`; column `j` of `eigenvectors` belongs to `eigenvalues[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Row-major `U[i][j]`.
    pub eigenvectors: Vec<Vec<f64>>,
    pub origin: Origin,
}

impl SpectralDecomposition {
    pub fn size(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Column `j` of `U`.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.eigenvectors.iter().map(|row| row[j]).collect()
    }

    /// Copy with eigenpairs in ascending eigenvalue order.
    pub fn sorted(&self) -> SpectralDecomposition {
        let mut order: Vec<usize> = (0..self.size()).collect();
        order.sort_by(|&a, &b| self.eigenvalues[a].total_cmp(&self.eigenvalues[b]));
        SpectralDecomposition {
            eigenvalues: order.iter().map(|&j| self.eigenvalues[j]).collect(),
            eigenvectors: self
                .eigenvectors
                .iter()
                .map(|row| order.iter().map(|&j| row[j]).collect())
                .collect(),
            origin: self.origin,
        }
    }

    fn check_shape(&self, n: usize) -> Result<()> {
        if self.eigenvalues.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: self.eigenvalues.len() });
        }
        if let Some(row) = self.eigenvectors.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: row.len() });
        }
        if self.eigenvectors.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: self.eigenvectors.len() });
        }
        Ok(())
    }
}

/// Make the first entry of magnitude above [`SIGN_THRESHOLD`] in each column positive.
pub fn fix_signs(u: &mut [Vec<f64>]) {
    let n = u.first().map_or(0, Vec::len);
    for j in 0..n {
        let lead = u.iter().map(|row| row[j]).find(|v| v.abs() > SIGN_THRESHOLD);
        if lead.is_some_and(|v| v < 0.0) {
            for row in u.iter_mut() {
                row[j] = -row[j];
            }
        }
    }
}

fn hahn_diagonal(alpha: f64, beta: f64, n: usize, i: usize) -> f64 {
    let nf = n as f64;
    if alpha == beta {
        return nf / 2.0;
    }
    let (s, d, fi) = (alpha + beta, alpha - beta, i as f64);
    if i == 0 {
        nf / 2.0 + d * nf / (2.0 * (s + 2.0))
    } else if i == n {
        nf / 2.0 - d * nf / (2.0 * (2.0 * nf + s))
    } else {
        nf / 2.0
            + d * (s * (nf - 2.0 * fi) - 2.0 * fi * (fi + 1.0))
                / (2.0 * (2.0 * fi + s) * (2.0 * fi + s + 2.0))
    }
}

fn hahn_offdiag(alpha: f64, beta: f64, n: usize, i: usize) -> f64 {
    let (nf, fi, s) = (n as f64, i as f64, alpha + beta);
    let r1 = if i == 1 { 1.0 } else { (fi + s) / (2.0 * fi + s - 1.0) };
    let r2 = if i == n { 1.0 } else { (fi + s + nf + 1.0) / (2.0 * fi + s + 1.0) };
    let t = 2.0 * fi + s;
    (fi * (fi + alpha) * (fi + beta) * (nf - fi + 1.0) / (t * t) * r1 * r2).sqrt()
}

/// The Jacobi matrix of the family (`M_h` for the constant case).
pub fn build_jacobi(jf: &JacobiFamily) -> Result<SymTridiagonal> {
    jf.validate()?;
    let n = jf.order();
    let (diag, offdiag): (Vec<f64>, Vec<f64>) = match *jf {
        JacobiFamily::Constant { .. } => (vec![2.0; n + 1], vec![1.0; n]),
        JacobiFamily::Polynomial(FamilyParams::Krawtchouk { p, .. }) => {
            let nf = n as f64;
            let scale = (p * (1.0 - p)).sqrt();
            (
                (0..=n).map(|i| nf * p + (1.0 - 2.0 * p) * i as f64).collect(),
                (1..=n).map(|i| scale * ((i * (n - i + 1)) as f64).sqrt()).collect(),
            )
        }
        JacobiFamily::Polynomial(FamilyParams::Hahn { alpha, beta, .. }) => (
            (0..=n).map(|i| hahn_diagonal(alpha, beta, n, i)).collect(),
            (1..=n).map(|i| hahn_offdiag(alpha, beta, n, i)).collect(),
        ),
        JacobiFamily::Polynomial(FamilyParams::DualQKrawtchouk { cbar, q, .. }) => {
            let qi = |k: i64| q.powi(k as i32);
            let nn = n as i64;
            (
                (0..=nn)
                    .map(|i| (1.0 - qi(i - nn)) + cbar * qi(-nn) * (1.0 - qi(i)))
                    .collect(),
                (1..=nn)
                    .map(|i| (cbar * qi(-nn) * (1.0 - qi(i)) * (1.0 - qi(i - 1 - nn))).sqrt())
                    .collect(),
            )
        }
    };
    SymTridiagonal::new(diag, offdiag)
}

/// Closed-form eigenvalues in family order `j = 0..=N`.
pub fn analytic_eigenvalues(jf: &JacobiFamily) -> Result<Vec<f64>> {
    jf.validate()?;
    let n = jf.order();
    Ok(match *jf {
        JacobiFamily::Constant { .. } => (0..=n)
            .map(|j| 2.0 - 2.0 * ((j + 1) as f64 * PI / (n + 2) as f64).cos())
            .collect(),
        JacobiFamily::Polynomial(FamilyParams::DualQKrawtchouk { cbar, q, .. }) => (0..=n)
            .map(|j| (1.0 - q.powi(-(j as i32))) * (1.0 - cbar * q.powi(j as i32 - n as i32)))
            .collect(),
        JacobiFamily::Polynomial(_) => (0..=n).map(|j| j as f64).collect(),
    })
}

/// `U D U^T` from the orthonormal polynomials (sine vectors for the constant case).
pub fn analytic_decomposition(jf: &JacobiFamily) -> Result<SpectralDecomposition> {
    let eigenvalues = analytic_eigenvalues(jf)?;
    let n = jf.order();
    let mut u = match jf {
        JacobiFamily::Constant { .. } => {
            let scale = (2.0 / (n + 2) as f64).sqrt();
            (0..=n)
                .map(|i| {
                    (0..=n)
                        .map(|j| scale * (((i + 1) * (j + 1)) as f64 * PI / (n + 2) as f64).sin())
                        .collect()
                })
                .collect()
        }
        JacobiFamily::Polynomial(fp) => {
            // rows pick up sign(A_i) so that the off-diagonal entries come out as -E_i
            let mut sign = 1.0;
            let mut rows = Vec::with_capacity(n + 1);
            for i in 0..=n {
                let row = (0..=n)
                    .map(|x| Ok(sign * orthonormal_eval(fp, i, &fp.point(x)?)?))
                    .collect::<Result<Vec<f64>>>()?;
                rows.push(row);
                if i < n {
                    sign *= recurrence::leading_sign(fp, i);
                }
            }
            rows
        }
    };
    fix_signs(&mut u);
    Ok(SpectralDecomposition { eigenvalues, eigenvectors: u, origin: Origin::Analytic })
}

/// Eigenpairs by implicit QL, ascending.
pub fn numeric_decomposition(m: &SymTridiagonal) -> Result<SpectralDecomposition> {
    let mut d = m.diag.clone();
    let sub: Vec<f64> = m.offdiag.iter().map(|e| -e).collect();
    let z = eigen::tql(&mut d, &sub)?;
    let mut sorted = SpectralDecomposition { eigenvalues: d, eigenvectors: z, origin: Origin::Numeric }.sorted();
    fix_signs(&mut sorted.eigenvectors);
    Ok(sorted)
}

/// `(||U U^T - I||_max, ||M U - U D||_max)`.
pub fn decomposition_residuals(m: &SymTridiagonal, d: &SpectralDecomposition) -> Result<(f64, f64)> {
    let n = m.size();
    d.check_shape(n)?;
    let u = &d.eigenvectors;
    let mut ortho = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let s: f64 = (0..n).map(|k| u[i][k] * u[j][k]).sum();
            ortho = ortho.max((s - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    let mut recon = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let lo = i.saturating_sub(1);
            let hi = (i + 1).min(n - 1);
            let mu: f64 = (lo..=hi).map(|k| m.get(i, k) * u[k][j]).sum();
            recon = recon.max((mu - u[i][j] * d.eigenvalues[j]).abs());
        }
    }
    Ok((ortho, recon))
}

/// Largest eigenvalue difference after sorting both decompositions.
pub fn eigenvalue_deviation(a: &SpectralDecomposition, b: &SpectralDecomposition) -> Result<f64> {
    if a.size() != b.size() {
        return Err(Error::DimensionMismatch { expected: a.size(), found: b.size() });
    }
    let (sa, sb) = (a.sorted(), b.sorted());
    Ok(sa
        .eigenvalues
        .iter()
        .zip(&sb.eigenvalues)
        .fold(0.0, |m, (x, y)| m.max((x - y).abs())))
}

/// Largest eigenvector entry difference after sorting and sign fixing both.
pub fn eigenvector_deviation(a: &SpectralDecomposition, b: &SpectralDecomposition) -> Result<f64> {
    a.check_shape(b.size())?;
    let (mut sa, mut sb) = (a.sorted(), b.sorted());
    fix_signs(&mut sa.eigenvectors);
    fix_signs(&mut sb.eigenvectors);
    Ok(sa
        .eigenvectors
        .iter()
        .flatten()
        .zip(sb.eigenvectors.iter().flatten())
        .fold(0.0, |m, (x, y)| m.max((x - y).abs())))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DiagonalProfile {
    ConstantDiag(f64),
    AlmostConstantHead { head: f64, value: f64 },
    AlmostConstantTail { value: f64, tail: f64 },
    General,
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= PROFILE_TOLERANCE * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn all_close(v: &[f64]) -> bool {
    v.iter().all(|&f| close(f, v[0]))
}

/// Classify the diagonal of [`build_jacobi`]. For `N = 1` a non-constant
/// diagonal is reported as [`DiagonalProfile::AlmostConstantHead`].
pub fn diagonal_profile(jf: &JacobiFamily) -> Result<DiagonalProfile> {
    let m = build_jacobi(jf)?;
    let f = m.diag();
    let last = f.len() - 1;
    Ok(if all_close(f) {
        DiagonalProfile::ConstantDiag(f[0])
    } else if all_close(&f[1..]) {
        DiagonalProfile::AlmostConstantHead { head: f[0], value: f[1] }
    } else if all_close(&f[..last]) {
        DiagonalProfile::AlmostConstantTail { value: f[0], tail: f[last] }
    } else {
        DiagonalProfile::General
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn krawtchouk_half_matrix() {
        let m = build_jacobi(&JacobiFamily::krawtchouk(0.5, 2).unwrap()).unwrap();
        assert_eq!(m.diag(), &[1.0, 1.0, 1.0]);
        for e in m.offdiag() {
            assert_abs_diff_eq!(*e, 2f64.sqrt() / 2.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn dual_q_matrix() {
        let m = build_jacobi(&JacobiFamily::dual_q_krawtchouk(-1.0, 2.0, 2).unwrap()).unwrap();
        for f in m.diag() {
            assert_abs_diff_eq!(*f, 0.75, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(m.offdiag()[0], 3f64.sqrt() / 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.offdiag()[1], (3.0f64 / 8.0).sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn constant_matrix() {
        let m = build_jacobi(&JacobiFamily::constant(3).unwrap()).unwrap();
        assert_eq!(m.diag(), &[2.0; 4]);
        assert_eq!(m.offdiag(), &[1.0; 3]);
        assert_eq!(m.get(0, 1), -1.0);
        assert!(JacobiFamily::constant(0).is_err());
    }

    #[test]
    fn malformed_matrices_rejected() {
        assert!(SymTridiagonal::new(vec![], vec![]).is_err());
        assert!(SymTridiagonal::new(vec![1.0, 2.0], vec![]).is_err());
        assert!(SymTridiagonal::new(vec![1.0, 2.0], vec![-1.0]).is_err());
        assert!(SymTridiagonal::new(vec![1.0, f64::NAN], vec![1.0]).is_err());
    }

    #[test]
    fn analytic_eigenvalue_examples() {
        let d = analytic_decomposition(&JacobiFamily::krawtchouk(0.5, 2).unwrap()).unwrap();
        assert_eq!(d.eigenvalues, vec![0.0, 1.0, 2.0]);
        let d = analytic_decomposition(&JacobiFamily::dual_q_krawtchouk(-1.0, 2.0, 2).unwrap()).unwrap();
        assert_eq!(d.eigenvalues, vec![0.0, 0.75, 1.5]);
        let d = analytic_decomposition(&JacobiFamily::constant(1).unwrap()).unwrap();
        assert_abs_diff_eq!(d.eigenvalues[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.eigenvalues[1], 3.0, epsilon = 1e-15);
        let r = 0.5f64.sqrt();
        assert_abs_diff_eq!(d.eigenvectors[0][0], r, epsilon = 1e-15);
        assert_abs_diff_eq!(d.eigenvectors[1][0], r, epsilon = 1e-15);
        assert_abs_diff_eq!(d.eigenvectors[0][1], r, epsilon = 1e-15);
        assert_abs_diff_eq!(d.eigenvectors[1][1], -r, epsilon = 1e-15);
    }

    #[test]
    fn numeric_examples() {
        let h = 2f64.sqrt() / 2.0;
        let m = SymTridiagonal::new(vec![1.0; 3], vec![h, h]).unwrap();
        let d = numeric_decomposition(&m).unwrap();
        for (got, want) in d.eigenvalues.iter().zip([0.0, 1.0, 2.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-10);
        }
        let m = SymTridiagonal::new(vec![3.5; 4], vec![0.0; 3]).unwrap();
        let d = numeric_decomposition(&m).unwrap();
        assert_eq!(d.eigenvalues, vec![3.5; 4]);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(d.eigenvectors[i][j], if i == j { 1.0 } else { 0.0 });
            }
        }
        let m = SymTridiagonal::new(vec![2.0, 2.0], vec![1.0]).unwrap();
        let d = numeric_decomposition(&m).unwrap();
        assert_abs_diff_eq!(d.eigenvalues[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(d.eigenvalues[1], 3.0, epsilon = 1e-14);
        assert_eq!(d.origin, Origin::Numeric);
    }

    #[test]
    fn residual_examples() {
        let jf = JacobiFamily::krawtchouk(0.5, 12).unwrap();
        let m = build_jacobi(&jf).unwrap();
        let num = numeric_decomposition(&m).unwrap();
        let (o, r) = decomposition_residuals(&m, &num).unwrap();
        assert!(o <= 1e-10 && r <= 1e-10);
        let ana = analytic_decomposition(&jf).unwrap();
        let (o, r) = decomposition_residuals(&m, &ana).unwrap();
        assert!(o <= 1e-9 && r <= 1e-9);
        let other = numeric_decomposition(&build_jacobi(&JacobiFamily::constant(12).unwrap()).unwrap()).unwrap();
        let (_, r) = decomposition_residuals(&m, &other).unwrap();
        assert!(r > 0.1);
        let small = numeric_decomposition(&build_jacobi(&JacobiFamily::constant(3).unwrap()).unwrap()).unwrap();
        assert!(matches!(decomposition_residuals(&m, &small), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn analytic_matches_numeric_all_families() {
        for jf in [
            JacobiFamily::krawtchouk(0.3, 9).unwrap(),
            JacobiFamily::hahn(2.0, 2.0, 9).unwrap(),
            JacobiFamily::hahn(-10.5, -10.5, 9).unwrap(),
            JacobiFamily::dual_q_krawtchouk(-1.0, 0.7, 9).unwrap(),
            JacobiFamily::dual_q_krawtchouk(-1.0, 1.6, 9).unwrap(),
            JacobiFamily::constant(9).unwrap(),
        ] {
            let m = build_jacobi(&jf).unwrap();
            let ana = analytic_decomposition(&jf).unwrap();
            let num = numeric_decomposition(&m).unwrap();
            let (o, r) = decomposition_residuals(&m, &ana).unwrap();
            assert!(o <= 1e-12 && r <= 1e-12, "{jf:?}: {o:e} {r:e}");
            assert!(eigenvalue_deviation(&ana, &num).unwrap() <= 1e-12, "{jf:?}");
            assert!(eigenvector_deviation(&ana, &num).unwrap() <= 1e-10, "{jf:?}");
        }
    }

    #[test]
    fn profile_examples() {
        assert_eq!(
            diagonal_profile(&JacobiFamily::krawtchouk(0.5, 7).unwrap()).unwrap(),
            DiagonalProfile::ConstantDiag(3.5)
        );
        match diagonal_profile(&JacobiFamily::hahn(0.4, -0.4, 3).unwrap()).unwrap() {
            DiagonalProfile::AlmostConstantHead { head, value } => {
                assert_abs_diff_eq!(head, 2.1, epsilon = 1e-14);
                assert_abs_diff_eq!(value, 1.3, epsilon = 1e-14);
            }
            other => panic!("{other:?}"),
        }
        match diagonal_profile(&JacobiFamily::hahn(-4.5, -3.5, 3).unwrap()).unwrap() {
            DiagonalProfile::AlmostConstantTail { value, tail } => {
                assert_abs_diff_eq!(value, 1.75, epsilon = 1e-14);
                assert_abs_diff_eq!(tail, 0.75, epsilon = 1e-14);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(
            diagonal_profile(&JacobiFamily::krawtchouk(0.3, 4).unwrap()).unwrap(),
            DiagonalProfile::General
        );
        assert!(matches!(
            diagonal_profile(&JacobiFamily::krawtchouk(0.3, 1).unwrap()).unwrap(),
            DiagonalProfile::AlmostConstantHead { .. }
        ));
    }
}
