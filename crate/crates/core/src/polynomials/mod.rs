//! Krawtchouk, Hahn and dual q-Krawtchouk polynomials on their finite lattices.
//!
//! Values come from the terminating (basic) hypergeometric series; the
//! three-term recurrences are kept as an independent path. Both run in
//! extended precision internally and round once to `f64`.

pub mod hypergeometric;
pub(crate) mod precise;
pub(crate) mod recurrence;

use crate::error::{invalid, Error, Result};
use hypergeometric::{evaluate_big, evaluate_to, Base, Param, Series, Target};
use precise::Big;

pub use hypergeometric::{
    pochhammer, q_pochhammer, terminating_basic_hypergeometric, terminating_hypergeometric,
};
pub use recurrence::recurrence_eval;

/// Bits kept below the natural size of a polynomial value when it cancels to zero.
const CANCELLATION_FLOOR_BITS: f64 = 200.0;
/// Absolute accuracy, relative to the natural size, for orthonormal values.
const ORTHONORMAL_BITS: f64 = 62.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilyParams {
    Krawtchouk { p: f64, n: usize },
    Hahn { alpha: f64, beta: f64, n: usize },
    DualQKrawtchouk { cbar: f64, q: f64, n: usize },
}

impl FamilyParams {
    pub fn krawtchouk(p: f64, n: usize) -> Result<Self> {
        let fp = FamilyParams::Krawtchouk { p, n };
        fp.validate()?;
        Ok(fp)
    }

    pub fn hahn(alpha: f64, beta: f64, n: usize) -> Result<Self> {
        let fp = FamilyParams::Hahn { alpha, beta, n };
        fp.validate()?;
        Ok(fp)
    }

    pub fn dual_q_krawtchouk(cbar: f64, q: f64, n: usize) -> Result<Self> {
        let fp = FamilyParams::DualQKrawtchouk { cbar, q, n };
        fp.validate()?;
        Ok(fp)
    }

    /// The order `N`; the lattice is `0..=N`.
    pub fn order(&self) -> usize {
        match *self {
            FamilyParams::Krawtchouk { n, .. }
            | FamilyParams::Hahn { n, .. }
            | FamilyParams::DualQKrawtchouk { n, .. } => n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.order();
        if n == 0 {
            return Err(invalid("order N must be positive"));
        }
        match *self {
            FamilyParams::Krawtchouk { p, .. } => {
                if !(p > 0.0 && p < 1.0) {
                    return Err(invalid(format!("Krawtchouk needs 0 < p < 1 (got {p})")));
                }
            }
            FamilyParams::Hahn { alpha, beta, .. } => {
                let nf = n as f64;
                let upper = alpha > -1.0 && beta > -1.0;
                let lower = alpha < -nf && beta < -nf;
                if !(alpha.is_finite() && beta.is_finite() && (upper || lower)) {
                    return Err(invalid(format!(
                        "Hahn needs alpha, beta > -1 or alpha, beta < -N (got {alpha}, {beta}, N = {n})"
                    )));
                }
            }
            FamilyParams::DualQKrawtchouk { cbar, q, .. } => {
                if !(cbar < 0.0 && cbar.is_finite()) {
                    return Err(invalid(format!("dual q-Krawtchouk needs cbar < 0 (got {cbar})")));
                }
                if !(q > 0.0 && q.is_finite()) || q == 1.0 {
                    return Err(invalid(format!("dual q-Krawtchouk needs q > 0, q != 1 (got {q})")));
                }
            }
        }
        Ok(())
    }

    pub fn point(&self, x: usize) -> Result<LatticePoint> {
        LatticePoint::new(self, x)
    }

    fn check_degree(&self, i: usize) -> Result<()> {
        let max = self.order();
        if i > max {
            return Err(Error::DegreeOutOfRange { degree: i, max });
        }
        Ok(())
    }

    fn check_point(&self, pt: &LatticePoint) -> Result<()> {
        let n = self.order();
        if pt.x > n {
            return Err(invalid(format!("lattice point {} outside 0..={n}", pt.x)));
        }
        let expected = lattice_lambda(self, pt.x);
        if pt.lambda != expected {
            return Err(invalid(format!(
                "lattice point {} carries lambda {:?}, expected {:?}",
                pt.x, pt.lambda, expected
            )));
        }
        Ok(())
    }

    /// The negative Hahn branch has weight and norm of sign (-1)^N; both are flipped.
    fn hahn_sign_flip(&self) -> bool {
        matches!(*self, FamilyParams::Hahn { alpha, n, .. } if alpha < -(n as f64) && n % 2 == 1)
    }
}

/// A lattice point `x`, with `lambda(x) = q^-x + cbar q^(x-N)` for the q-family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticePoint {
    pub x: usize,
    pub lambda: Option<f64>,
}

impl LatticePoint {
    pub fn new(fp: &FamilyParams, x: usize) -> Result<Self> {
        fp.validate()?;
        if x > fp.order() {
            return Err(invalid(format!("lattice point {x} outside 0..={}", fp.order())));
        }
        Ok(LatticePoint {
            x,
            lambda: lattice_lambda(fp, x),
        })
    }
}

fn lattice_lambda(fp: &FamilyParams, x: usize) -> Option<f64> {
    match *fp {
        FamilyParams::DualQKrawtchouk { cbar, q, n } => {
            Some(q.powi(-(x as i32)) + cbar * q.powi(x as i32 - n as i32))
        }
        _ => None,
    }
}

fn series(fp: &FamilyParams, i: usize, x: usize) -> Series {
    let degree = i.min(x);
    match *fp {
        FamilyParams::Krawtchouk { p, n } => Series {
            numerators: vec![Param::Value(-(x as f64)), Param::Value(-(i as f64))],
            denominators: vec![Param::Value(-(n as f64))],
            z: Param::Recip(p),
            base: Base::Ordinary,
            degree,
        },
        FamilyParams::Hahn { alpha, beta, n } => Series {
            numerators: vec![
                Param::Value(-(i as f64)),
                Param::Sum(alpha, beta, i as i64 + 1),
                Param::Value(-(x as f64)),
            ],
            denominators: vec![Param::Sum(alpha, 0.0, 1), Param::Value(-(n as f64))],
            z: Param::Value(1.0),
            base: Base::Ordinary,
            degree,
        },
        FamilyParams::DualQKrawtchouk { cbar, q, n } => Series {
            numerators: vec![
                Param::QPower { scale: 1.0, q, exp: -(i as i64) },
                Param::QPower { scale: 1.0, q, exp: -(x as i64) },
                Param::QPower { scale: cbar, q, exp: x as i64 - n as i64 },
            ],
            denominators: vec![Param::QPower { scale: 1.0, q, exp: -(n as i64) }, Param::Value(0.0)],
            z: Param::Value(q),
            base: Base::Basic(q),
            degree,
        },
    }
}

fn ratio(num: Big, den: Big) -> Big {
    num / den
}

fn factorial_big(k: usize, prec: usize) -> Big {
    (1..=k as i64).fold(precise::one(prec), |acc, m| acc * precise::int(m, prec))
}

fn pochhammer_big(a: &Big, k: usize) -> Big {
    let prec = a.precision();
    (0..k as i64).fold(precise::one(prec), |acc, m| acc * (a + precise::int(m, prec)))
}

fn q_pochhammer_big(a: &Big, q: &Big, k: usize) -> Big {
    let prec = a.precision();
    let one = precise::one(prec);
    let mut acc = one.clone();
    let mut aq = a.clone();
    for _ in 0..k {
        acc *= &one - &aq;
        aq *= q;
    }
    acc
}

fn binomial_big(n: usize, k: usize, prec: usize) -> Big {
    ratio(
        factorial_big(n, prec),
        factorial_big(k, prec) * factorial_big(n - k, prec),
    )
}

pub(crate) fn weight_big(fp: &FamilyParams, x: usize, prec: usize) -> Big {
    let w = match *fp {
        FamilyParams::Krawtchouk { p, n } => {
            let pb = precise::big(p, prec);
            let qb = precise::one(prec) - &pb;
            binomial_big(n, x, prec)
                * precise::powi(&pb, x as i64)
                * precise::powi(&qb, (n - x) as i64)
        }
        FamilyParams::Hahn { alpha, beta, n } => {
            let a1 = precise::big(alpha, prec) + precise::one(prec);
            let b1 = precise::big(beta, prec) + precise::one(prec);
            ratio(
                pochhammer_big(&a1, x) * pochhammer_big(&b1, n - x),
                factorial_big(x, prec) * factorial_big(n - x, prec),
            )
        }
        FamilyParams::DualQKrawtchouk { cbar, q, n } => {
            let (c, qb) = (precise::big(cbar, prec), precise::big(q, prec));
            let one = precise::one(prec);
            let q_n = precise::powi(&qb, -(n as i64));
            let num = q_pochhammer_big(&(&c * &q_n), &qb, x)
                * q_pochhammer_big(&q_n, &qb, x)
                * (&one - &c * precise::powi(&qb, 2 * x as i64 - n as i64));
            let den = q_pochhammer_big(&qb, &qb, x)
                * q_pochhammer_big(&(&c * &qb), &qb, x)
                * (&one - &c * &q_n);
            ratio(num, den)
                * precise::powi(&c, -(x as i64))
                * precise::powi(&qb, (x * (2 * n - x)) as i64)
        }
    };
    if fp.hahn_sign_flip() {
        -w
    } else {
        w
    }
}

pub(crate) fn norm_big(fp: &FamilyParams, i: usize, prec: usize) -> Big {
    let h = match *fp {
        FamilyParams::Krawtchouk { p, n } => {
            let pb = precise::big(p, prec);
            let qb = precise::one(prec) - &pb;
            ratio(precise::powi(&ratio(qb, pb), i as i64), binomial_big(n, i, prec))
        }
        FamilyParams::Hahn { alpha, beta, n } => {
            let s = precise::big(alpha, prec) + precise::big(beta, prec);
            let a1 = precise::big(alpha, prec) + precise::one(prec);
            let b1 = precise::big(beta, prec) + precise::one(prec);
            // (i+s+1)_(N+1) / (2i+s+1) with the vanishing factor cancelled
            let product = (0..=n)
                .filter(|&m| m != i)
                .fold(precise::one(prec), |acc, m| {
                    acc * (&s + precise::int((i + 1 + m) as i64, prec))
                });
            let nf = factorial_big(n, prec);
            ratio(factorial_big(i, prec) * factorial_big(n - i, prec), &nf * &nf)
                * product
                * ratio(pochhammer_big(&b1, i), pochhammer_big(&a1, i))
        }
        FamilyParams::DualQKrawtchouk { cbar, q, n } => {
            let (c, qb) = (precise::big(cbar, prec), precise::big(q, prec));
            let one = precise::one(prec);
            let q_n = precise::powi(&qb, -(n as i64));
            q_pochhammer_big(&ratio(one.clone(), c.clone()), &qb, n)
                * ratio(q_pochhammer_big(&qb, &qb, i), q_pochhammer_big(&q_n, &qb, i))
                * precise::powi(&(&c * &q_n), i as i64)
        }
    };
    if fp.hahn_sign_flip() {
        -h
    } else {
        h
    }
}

/// log2 of `sqrt(h_i / w(x))`, the natural magnitude of `P_i(x)`.
fn natural_log2(fp: &FamilyParams, i: usize, x: usize) -> f64 {
    let h = precise::log2_abs(&norm_big(fp, i, 64));
    let w = precise::log2_abs(&weight_big(fp, x, 64));
    0.5 * (h - w)
}

/// Values this far below the natural size are zeros of `P_i` and come back as 0.
fn flush(v: f64, floor_log2: f64) -> f64 {
    if v == 0.0 || v.abs().log2() < floor_log2 {
        0.0
    } else {
        v
    }
}

/// `P_i(x)` for the family `fp`.
pub fn family_eval(fp: &FamilyParams, i: usize, x: &LatticePoint) -> Result<f64> {
    fp.validate()?;
    fp.check_degree(i)?;
    fp.check_point(x)?;
    if i == 0 || x.x == 0 {
        return Ok(1.0);
    }
    let floor_log2 = natural_log2(fp, i, x.x) - CANCELLATION_FLOOR_BITS;
    Ok(flush(evaluate_to(&series(fp, i, x.x), Target::Relative { floor_log2 }), floor_log2))
}

/// Orthogonality weight `w(x)`, positive on valid parameters.
pub fn weight(fp: &FamilyParams, x: &LatticePoint) -> Result<f64> {
    fp.validate()?;
    fp.check_point(x)?;
    Ok(precise::to_f64(&weight_big(fp, x.x, 128)))
}

/// Squared norm `h_i`, positive on valid parameters.
pub fn norm(fp: &FamilyParams, i: usize) -> Result<f64> {
    fp.validate()?;
    fp.check_degree(i)?;
    Ok(precise::to_f64(&norm_big(fp, i, 128)))
}

/// `sqrt(w(x) / h_i) P_i(x)`.
pub fn orthonormal_eval(fp: &FamilyParams, i: usize, x: &LatticePoint) -> Result<f64> {
    fp.validate()?;
    fp.check_degree(i)?;
    fp.check_point(x)?;
    let value = if i == 0 || x.x == 0 {
        precise::one(128)
    } else {
        let log2_tol = natural_log2(fp, i, x.x) - ORTHONORMAL_BITS;
        evaluate_big(&series(fp, i, x.x), Target::Absolute { log2_tol })
    };
    let prec = value.precision().max(128);
    let value = value.with_precision(prec).value();
    let scaled = weight_big(fp, x.x, prec) * &value * &value / norm_big(fp, i, prec);
    let magnitude = precise::to_f64(&scaled).sqrt();
    Ok(if precise::is_negative(&value) { -magnitude } else { magnitude })
}
