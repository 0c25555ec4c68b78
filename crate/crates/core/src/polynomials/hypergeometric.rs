//! Terminating hypergeometric and basic hypergeometric series.
//!
//! A series is described by exact parameter recipes ([`Param`]) so that it can
//! be re-generated at any working precision. [`Series::evaluate`] returns the
//! sum together with a running bound on its rounding error; [`evaluate_to`]
//! raises the precision until the bound meets the requested target.

use super::precise::{self, Big, CompensatedSum};
use crate::error::{invalid, Error, Result};

const START_PRECISION: usize = 64;
const MAX_PRECISION: usize = 1 << 16;
/// Relative accuracy demanded before rounding to `f64`.
const RELATIVE_BITS: f64 = 60.0;

/// Raising factorial `a (a+1) ... (a+k-1)`.
pub fn pochhammer(a: f64, k: usize) -> f64 {
    (0..k).map(|m| a + m as f64).product()
}

/// q-shifted factorial `(1-a)(1-aq)...(1-aq^(k-1))`.
pub fn q_pochhammer(a: f64, q: f64, k: usize) -> f64 {
    let mut acc = 1.0;
    let mut aq = a;
    for _ in 0..k {
        acc *= 1.0 - aq;
        aq *= q;
    }
    acc
}

/// Exact recipe for a series parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Param {
    /// An `f64` taken at face value.
    Value(f64),
    /// `a + b + k`.
    Sum(f64, f64, i64),
    /// `1 / a`.
    Recip(f64),
    /// `scale * q^exp`.
    QPower { scale: f64, q: f64, exp: i64 },
}

impl Param {
    pub(crate) fn eval(&self, prec: usize) -> Big {
        match *self {
            Param::Value(a) => precise::big(a, prec),
            Param::Sum(a, b, k) => {
                precise::big(a, prec) + precise::big(b, prec) + precise::int(k, prec)
            }
            Param::Recip(a) => precise::one(prec) / precise::big(a, prec),
            Param::QPower { scale, q, exp } => {
                precise::big(scale, prec) * precise::powi(&precise::big(q, prec), exp)
            }
        }
    }

    pub(crate) fn approx(&self) -> f64 {
        match *self {
            Param::Value(a) => a,
            Param::Sum(a, b, k) => a + b + k as f64,
            Param::Recip(a) => 1.0 / a,
            Param::QPower { scale, q, exp } => scale * q.powi(exp as i32),
        }
    }

    /// Rounding errors (in units of 2^-prec) committed while building the value.
    fn build_error(&self) -> f64 {
        match *self {
            Param::Value(_) => 0.0,
            Param::Sum(..) | Param::Recip(_) => 2.0,
            Param::QPower { exp, .. } => 2.0 * (64 - exp.unsigned_abs().leading_zeros()) as f64 + 2.0,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) enum Base {
    /// Ordinary series: term ratio uses `(a+k)` and `z/(k+1)`.
    Ordinary,
    /// Basic series in base `q`: term ratio uses `(1 - a q^k)` and `z/(1 - q^(k+1))`.
    Basic(f64),
}

#[derive(Debug, Clone)]
pub(crate) struct Series {
    pub numerators: Vec<Param>,
    pub denominators: Vec<Param>,
    pub z: Param,
    pub base: Base,
    /// Index of the last nonvanishing term.
    pub degree: usize,
}

/// Accuracy goal for [`evaluate_to`].
#[derive(Debug, Clone, Copy)]
pub(crate) enum Target {
    /// Relative accuracy, or absolute error below `2^floor_log2` for values
    /// that vanish (or nearly vanish) through cancellation.
    Relative { floor_log2: f64 },
    /// Absolute error below `2^log2_tol`.
    Absolute { log2_tol: f64 },
}

impl Series {
    /// Sum of the series at working precision `prec`, with an absolute error bound.
    pub(crate) fn evaluate(&self, prec: usize) -> (Big, Big) {
        let nums: Vec<Big> = self.numerators.iter().map(|p| p.eval(prec)).collect();
        let dens: Vec<Big> = self.denominators.iter().map(|p| p.eval(prec)).collect();
        let num_approx: Vec<f64> = self.numerators.iter().map(Param::approx).collect();
        let den_approx: Vec<f64> = self.denominators.iter().map(Param::approx).collect();
        let z = self.z.eval(prec);

        let mut rel = self
            .numerators
            .iter()
            .chain(&self.denominators)
            .map(Param::build_error)
            .fold(0.0, f64::max)
            + self.z.build_error();

        let mut term = precise::one(prec);
        let mut sum = CompensatedSum::new(prec);
        let mut weighted = precise::zero(64);

        match self.base {
            Base::Ordinary => {
                for k in 0..=self.degree {
                    sum.add(&term);
                    weighted += precise::abs(&term).with_precision(64).value()
                        * precise::big(rel + 2.0, 64);
                    if k == self.degree {
                        break;
                    }
                    let kb = precise::int(k as i64, prec);
                    for (a, &approx) in nums.iter().zip(&num_approx) {
                        term *= a + &kb;
                        rel += cancellation(approx.abs() + k as f64, approx + k as f64) + 1.0;
                    }
                    for (b, &approx) in dens.iter().zip(&den_approx) {
                        term /= b + &kb;
                        rel += cancellation(approx.abs() + k as f64, approx + k as f64) + 1.0;
                    }
                    term = term * &z / precise::int(k as i64 + 1, prec);
                    rel += 2.0;
                }
            }
            Base::Basic(q) => {
                let qb = precise::big(q, prec);
                let one = precise::one(prec);
                let mut qk = precise::one(prec);
                let mut qk_approx = 1.0f64;
                for k in 0..=self.degree {
                    sum.add(&term);
                    weighted += precise::abs(&term).with_precision(64).value()
                        * precise::big(rel + 2.0, 64);
                    if k == self.degree {
                        break;
                    }
                    // q^k carries k roundings; each factor 1 - a q^k amplifies them.
                    let power_err = k as f64 + 2.0;
                    for (a, &approx) in nums.iter().zip(&num_approx) {
                        let aq = approx * qk_approx;
                        term *= &one - a * &qk;
                        rel += power_err * cancellation(aq.abs(), 1.0 - aq) + 1.0;
                    }
                    for (b, &approx) in dens.iter().zip(&den_approx) {
                        let bq = approx * qk_approx;
                        term /= &one - b * &qk;
                        rel += power_err * cancellation(bq.abs(), 1.0 - bq) + 1.0;
                    }
                    qk *= &qb;
                    qk_approx *= q;
                    term = term * &z / (&one - &qk);
                    rel += (power_err + 1.0) * cancellation(qk_approx.abs(), 1.0 - qk_approx) + 2.0;
                }
            }
        }

        // safety factor 4 on the accumulated bound
        let err = weighted * precise::big(4.0, 64) * precise::powi(&precise::big(2.0, 64), -(prec as i64));
        (sum.value(), err)
    }
}

/// Condition of `x = y + z` with respect to relative perturbations of the
/// operands, `(|y| + |z|) / |x|`, passed as magnitude and result.
fn cancellation(magnitude: f64, result: f64) -> f64 {
    if result == 0.0 {
        // exact zero factors only occur past the termination index
        return 1.0;
    }
    (magnitude / result.abs()).max(1.0)
}

/// Evaluate `series` to the accuracy `target`, returning the `f64`-rounded sum.
pub(crate) fn evaluate_to(series: &Series, target: Target) -> f64 {
    precise::to_f64(&evaluate_big(series, target))
}

/// As [`evaluate_to`], keeping the sum at the working precision that met the target.
pub(crate) fn evaluate_big(series: &Series, target: Target) -> Big {
    let mut prec = START_PRECISION;
    loop {
        let (sum, err) = series.evaluate(prec);
        let log_err = precise::log2_abs(&err);
        let log_sum = precise::log2_abs(&sum);
        let (done, needed) = match target {
            Target::Relative { floor_log2 } => (
                log_err <= log_sum - RELATIVE_BITS || log_err <= floor_log2,
                log_err - log_sum.max(floor_log2) + RELATIVE_BITS,
            ),
            Target::Absolute { log2_tol } => (log_err <= log2_tol, log_err - log2_tol),
        };
        if done || prec >= MAX_PRECISION {
            return sum;
        }
        let extra = if needed.is_finite() { needed.ceil().max(0.0) as usize } else { prec };
        prec = (prec + extra + 16).max(prec * 3 / 2).min(MAX_PRECISION);
    }
}

/// Termination degree from numerators that are non-positive integers.
fn ordinary_degree(numerators: &[f64]) -> Option<usize> {
    numerators
        .iter()
        .filter(|a| a.is_finite() && **a <= 0.0 && a.fract() == 0.0)
        .map(|a| (-a) as usize)
        .min()
}

/// Sum `sum_k prod (a)_k / prod (b)_k * z^k / k!` of a terminating series.
pub fn terminating_hypergeometric(numerators: &[f64], denominators: &[f64], z: f64) -> Result<f64> {
    if numerators.iter().chain(denominators).any(|v| !v.is_finite()) || !z.is_finite() {
        return Err(invalid("series parameters must be finite"));
    }
    let degree = ordinary_degree(numerators).ok_or(Error::NonTerminating)?;
    for m in 0..degree {
        if denominators.iter().any(|&b| b == -(m as f64)) {
            return Err(Error::DenominatorPole { index: m + 1 });
        }
    }
    let series = Series {
        numerators: numerators.iter().map(|&a| Param::Value(a)).collect(),
        denominators: denominators.iter().map(|&b| Param::Value(b)).collect(),
        z: Param::Value(z),
        base: Base::Ordinary,
        degree,
    };
    Ok(evaluate_to(&series, Target::Relative { floor_log2: -1100.0 }))
}

/// If `a` equals `q^-i` for a nonnegative integer `i` (to a few ulps), return `i`.
fn q_power_index(a: f64, q: f64) -> Option<usize> {
    if !(a > 0.0) {
        return None;
    }
    let i = (-a.ln() / q.ln()).round();
    if !(0.0..=4096.0).contains(&i) {
        return None;
    }
    let exact = q.powi(-(i as i32));
    ((exact - a).abs() <= 8.0 * f64::EPSILON * a).then_some(i as usize)
}

/// Sum `sum_k prod (a;q)_k / (prod (b;q)_k (q;q)_k) * z^k` of a terminating basic series.
///
/// A numerator recognised as `q^-i` is treated as exactly that power of `q`.
pub fn terminating_basic_hypergeometric(
    numerators: &[f64],
    denominators: &[f64],
    q: f64,
    z: f64,
) -> Result<f64> {
    if !(q > 0.0) || q == 1.0 || !q.is_finite() {
        return Err(invalid(format!("basic series needs q > 0, q != 1 (got {q})")));
    }
    if numerators.iter().chain(denominators).any(|v| !v.is_finite()) || !z.is_finite() {
        return Err(invalid("series parameters must be finite"));
    }
    let indices: Vec<Option<usize>> = numerators.iter().map(|&a| q_power_index(a, q)).collect();
    let degree = indices.iter().flatten().copied().min().ok_or(Error::NonTerminating)?;
    for m in 0..degree {
        if denominators.iter().any(|&b| q_power_index(b, q) == Some(m)) {
            return Err(Error::DenominatorPole { index: m + 1 });
        }
    }
    let series = Series {
        numerators: numerators
            .iter()
            .zip(&indices)
            .map(|(&a, idx)| match idx {
                Some(i) => Param::QPower { scale: 1.0, q, exp: -(*i as i64) },
                None => Param::Value(a),
            })
            .collect(),
        denominators: denominators.iter().map(|&b| Param::Value(b)).collect(),
        z: Param::Value(z),
        base: Base::Basic(q),
        degree,
    };
    Ok(evaluate_to(&series, Target::Relative { floor_log2: -1100.0 }))
}
