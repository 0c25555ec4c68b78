//! Upward three-term recurrence, the cross-check path for the series.
//!
//! Every family is written as
//! `X P_i = -A_i P_(i+1) + (A_i + C_i) P_i - C_i P_(i-1)`
//! with `X = x` for Krawtchouk and Hahn and `X = (1 - q^-x)(1 - cbar q^(x-N))`
//! for the q-family.

use super::precise::{self, Big};
use super::{flush, natural_log2, FamilyParams, LatticePoint, CANCELLATION_FLOOR_BITS};
use crate::error::Result;

const START_PRECISION: usize = 64;
const MAX_PRECISION: usize = 1 << 14;
const AGREEMENT_BITS: f64 = 60.0;

/// `(A_i, C_i)` at working precision.
pub(crate) fn coefficients(fp: &FamilyParams, i: usize, prec: usize) -> (Big, Big) {
    let int = |k: i64| precise::int(k, prec);
    match *fp {
        FamilyParams::Krawtchouk { p, n } => {
            let pb = precise::big(p, prec);
            let a = &pb * int((n - i) as i64);
            let c = (int(1) - pb) * int(i as i64);
            (a, c)
        }
        FamilyParams::Hahn { alpha, beta, n } => {
            let (al, be) = (precise::big(alpha, prec), precise::big(beta, prec));
            let s = &al + &be;
            let ib = int(i as i64);
            let two_i_s = &s + int(2 * i as i64);
            // (i+s+1)/(2i+s+1) is 1 at i = 0 even when s = -1
            let r = if i == 0 {
                int(1)
            } else {
                (&s + int(i as i64 + 1)) / (&two_i_s + int(1))
            };
            let a = r * (&ib + &al + int(1)) * int((n - i) as i64) / (&two_i_s + int(2));
            let c = if i == 0 {
                precise::zero(prec)
            } else {
                // (i+s+N+1)/(2i+s+1) is 1 at i = N
                let r2 = if i == n {
                    int(1)
                } else {
                    (&s + int((i + n + 1) as i64)) / (&two_i_s + int(1))
                };
                &ib * (&ib + &be) / &two_i_s * r2
            };
            (a, c)
        }
        FamilyParams::DualQKrawtchouk { cbar, q, n } => {
            let qb = precise::big(q, prec);
            let a = int(1) - precise::powi(&qb, i as i64 - n as i64);
            let c = precise::big(cbar, prec)
                * precise::powi(&qb, -(n as i64))
                * (int(1) - precise::powi(&qb, i as i64));
            (a, c)
        }
    }
}

/// Sign of `A_i`, which carries the row signs of the orthonormal matrix.
pub(crate) fn leading_sign(fp: &FamilyParams, i: usize) -> f64 {
    let (a, _) = coefficients(fp, i, 64);
    if precise::is_negative(&a) {
        -1.0
    } else {
        1.0
    }
}

/// The recurrence variable `X` at lattice point `x`.
fn variable(fp: &FamilyParams, x: usize, prec: usize) -> Big {
    match *fp {
        FamilyParams::Krawtchouk { .. } | FamilyParams::Hahn { .. } => precise::int(x as i64, prec),
        FamilyParams::DualQKrawtchouk { cbar, q, n } => {
            let qb = precise::big(q, prec);
            let one = precise::one(prec);
            (&one - precise::powi(&qb, -(x as i64)))
                * (&one - precise::big(cbar, prec) * precise::powi(&qb, x as i64 - n as i64))
        }
    }
}

fn run(fp: &FamilyParams, i: usize, x: usize, prec: usize) -> Big {
    let xv = variable(fp, x, prec);
    let mut prev = precise::zero(prec);
    let mut cur = precise::one(prec);
    for k in 0..i {
        let (a, c) = coefficients(fp, k, prec);
        let next = ((&a + &c - &xv) * &cur - &c * &prev) / &a;
        prev = cur;
        cur = next;
    }
    cur
}

/// `P_i(x)` from the recurrence seeded with `P_0 = 1`, `P_-1 = 0`.
///
/// The working precision is doubled until two consecutive runs agree.
pub fn recurrence_eval(fp: &FamilyParams, i: usize, x: &LatticePoint) -> Result<f64> {
    fp.validate()?;
    fp.check_degree(i)?;
    fp.check_point(x)?;
    if i == 0 {
        return Ok(1.0);
    }
    let floor = natural_log2(fp, i, x.x) - CANCELLATION_FLOOR_BITS;
    let mut prec = START_PRECISION;
    let mut lo = run(fp, i, x.x, prec);
    loop {
        let hi = run(fp, i, x.x, 2 * prec);
        let diff = precise::log2_abs(&(&hi - &lo.clone().with_precision(2 * prec).value()));
        let size = precise::log2_abs(&hi).max(floor);
        if diff <= size - AGREEMENT_BITS || 2 * prec >= MAX_PRECISION {
            return Ok(flush(precise::to_f64(&hi), floor));
        }
        prec *= 2;
        lo = hi;
    }
}
