//! Thin layer over `dashu-float` used by the series and recurrence paths.
//!
//! Polynomial values on the lattice are obtained from sums with heavy
//! cancellation (the q-family reaches 10^70 between the largest term and the
//! result at N = 31), so the evaluation runs at a working precision chosen from
//! an a-priori error bound and is rounded to `f64` only at the end.

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;

pub(crate) type Big = FBig<HalfEven, 2>;

/// Exact conversion of a finite `f64`, widened to `prec` bits.
pub(crate) fn big(x: f64, prec: usize) -> Big {
    Big::try_from(x)
        .expect("finite f64")
        .with_precision(prec)
        .value()
}

pub(crate) fn int(k: i64, prec: usize) -> Big {
    big(k as f64, prec)
}

pub(crate) fn one(prec: usize) -> Big {
    big(1.0, prec)
}

pub(crate) fn zero(prec: usize) -> Big {
    big(0.0, prec)
}

pub(crate) fn to_f64(x: &Big) -> f64 {
    x.to_f64().value()
}

pub(crate) fn is_zero(x: &Big) -> bool {
    x.repr().is_zero()
}

pub(crate) fn is_negative(x: &Big) -> bool {
    *x < Big::ZERO
}

pub(crate) fn abs(x: &Big) -> Big {
    if is_negative(x) {
        -x.clone()
    } else {
        x.clone()
    }
}

/// Upper estimate of log2|x| (within one unit); `-inf` for zero.
pub(crate) fn log2_abs(x: &Big) -> f64 {
    if is_zero(x) {
        return f64::NEG_INFINITY;
    }
    let repr = x.repr();
    (repr.exponent() as f64) + (repr.digits() as f64)
}

/// `x^k` by repeated squaring; `k` may be negative.
pub(crate) fn powi(x: &Big, k: i64) -> Big {
    let prec = x.precision();
    let mut base = if k < 0 { one(prec) / x } else { x.clone() };
    let mut e = k.unsigned_abs();
    let mut acc = one(prec);
    while e > 0 {
        if e & 1 == 1 {
            acc = &acc * &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    acc
}

/// Kahan-style compensated accumulator. The working precision already
/// dominates, but the compensation keeps the summation error at one rounding
/// per term independent of the number of terms.
pub(crate) struct CompensatedSum {
    sum: Big,
    carry: Big,
}

impl CompensatedSum {
    pub(crate) fn new(prec: usize) -> Self {
        CompensatedSum {
            sum: zero(prec),
            carry: zero(prec),
        }
    }

    pub(crate) fn add(&mut self, term: &Big) {
        let y = term - &self.carry;
        let t = &self.sum + &y;
        self.carry = (&t - &self.sum) - y;
        self.sum = t;
    }

    pub(crate) fn value(self) -> Big {
        self.sum - self.carry
    }
}
