//! Oscillator chains: couplings, the quadratic form, mode frequencies.

mod levels;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::jacobi::{numeric_decomposition, JacobiFamily, SymTridiagonal};

pub use levels::{
    enumerate_levels, enumerate_levels_with, enumerate_levels_with_cap, rescale_levels, single_phonon_levels,
    spacing_profile, state_energy, FockState, LevelGroup, SpacingPattern, SpacingProfile,
    DEFAULT_STATE_CAP, DEGENERACY_TOLERANCE,
};

/// Relative threshold on the smallest eigenvalue, in units of `omega^2`.
pub const PD_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum InteractionKind {
    Constant,
    Krawtchouk,
    Hahn {
        alpha: f64,
    },
    #[serde(rename = "qkrawtchouk")]
    DualQKrawtchouk {
        q: f64,
    },
    Custom {
        gamma: Vec<f64>,
    },
}

impl InteractionKind {
    pub fn name(&self) -> &'static str {
        match self {
            InteractionKind::Constant => "constant",
            InteractionKind::Krawtchouk => "krawtchouk",
            InteractionKind::Hahn { .. } => "hahn",
            InteractionKind::DualQKrawtchouk { .. } => "qkrawtchouk",
            InteractionKind::Custom { .. } => "custom",
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        match self {
            InteractionKind::Constant | InteractionKind::Krawtchouk => Ok(()),
            InteractionKind::Hahn { alpha } => {
                let ok = alpha.is_finite() && (*alpha > -1.0 || *alpha < 1.0 - n as f64);
                if ok {
                    Ok(())
                } else {
                    Err(invalid(format!("Hahn chain needs alpha > -1 or alpha < -n+1 (got {alpha})")))
                }
            }
            InteractionKind::DualQKrawtchouk { q } => {
                if *q > 0.0 && q.is_finite() && *q != 1.0 {
                    Ok(())
                } else {
                    Err(invalid(format!("q-Krawtchouk chain needs q > 0, q != 1 (got {q})")))
                }
            }
            InteractionKind::Custom { gamma } => {
                if gamma.len() + 1 != n {
                    return Err(Error::DimensionMismatch { expected: n - 1, found: gamma.len() });
                }
                if gamma.iter().any(|g| !g.is_finite() || *g < 0.0) {
                    return Err(invalid("custom couplings must be finite and nonnegative"));
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainSpec {
    pub n: usize,
    pub mass: f64,
    pub omega: f64,
    pub coupling: f64,
    pub hbar: f64,
    pub interaction: InteractionKind,
}

impl ChainSpec {
    /// Checks parameter ranges; positive definiteness is left to
    /// [`is_positive_definite`] and the operations that need it.
    pub fn new(
        n: usize,
        mass: f64,
        omega: f64,
        coupling: f64,
        hbar: f64,
        interaction: InteractionKind,
    ) -> Result<Self> {
        let spec = ChainSpec { n, mass, omega, coupling, hbar, interaction };
        spec.validate()?;
        Ok(spec)
    }

    /// Unit mass and `hbar = 1`.
    pub fn simple(n: usize, omega: f64, coupling: f64, interaction: InteractionKind) -> Result<Self> {
        ChainSpec::new(n, 1.0, omega, coupling, 1.0, interaction)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(invalid("chain needs at least one oscillator"));
        }
        for (name, v) in [("mass", self.mass), ("omega", self.omega), ("hbar", self.hbar)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(format!("{name} must be positive (got {v})")));
            }
        }
        if !(self.coupling >= 0.0 && self.coupling.is_finite()) {
            return Err(invalid(format!("coupling must be nonnegative (got {})", self.coupling)));
        }
        self.interaction.validate(self.n)
    }

    /// The Jacobi family with `N = n - 1` whose matrix the chain is built from.
    pub fn jacobi_family(&self) -> Option<JacobiFamily> {
        let order = self.n - 1;
        if order == 0 {
            return None;
        }
        match self.interaction {
            InteractionKind::Constant => JacobiFamily::constant(order).ok(),
            InteractionKind::Krawtchouk => JacobiFamily::krawtchouk(0.5, order).ok(),
            InteractionKind::Hahn { alpha } => JacobiFamily::hahn(alpha, alpha, order).ok(),
            InteractionKind::DualQKrawtchouk { q } => JacobiFamily::dual_q_krawtchouk(-1.0, q, order).ok(),
            InteractionKind::Custom { .. } => None,
        }
    }

    /// `s` in `A = s I + c M`; `None` for a custom chain.
    pub fn shift(&self) -> Option<f64> {
        let (w2, c, n) = (self.omega * self.omega, self.coupling, self.n as f64);
        match self.interaction {
            InteractionKind::Constant => Some(w2),
            InteractionKind::Krawtchouk | InteractionKind::Hahn { .. } => Some(w2 - c * (n - 1.0) / 2.0),
            InteractionKind::DualQKrawtchouk { q } => Some(w2 - c * (1.0 - q.powf(1.0 - n))),
            InteractionKind::Custom { .. } => None,
        }
    }
}

/// `gamma_r`, `r = 1..n-1`, with interaction term `-(c m / 2) gamma_r q_r q_(r+1)`.
pub fn coupling_coefficients(spec: &ChainSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let n = spec.n;
    let nf = n as f64;
    let gamma = (1..n).map(|r| {
        let rf = r as f64;
        match &spec.interaction {
            InteractionKind::Constant => Ok(2.0),
            InteractionKind::Krawtchouk => Ok((rf * (nf - rf)).sqrt()),
            InteractionKind::Hahn { alpha } => {
                let a2 = 2.0 * alpha;
                // both ratios reduce to 1 at the ends of the chain
                let left = if r == 1 { 1.0 } else { (rf + a2) / (2.0 * rf + a2 - 1.0) };
                let right = if r == n - 1 { 1.0 } else { (rf + a2 + nf) / (2.0 * rf + a2 + 1.0) };
                let radicand = rf * (nf - rf) * left * right;
                if radicand < 0.0 {
                    return Err(invalid(format!("negative Hahn radicand at r = {r}")));
                }
                Ok(radicand.sqrt())
            }
            InteractionKind::DualQKrawtchouk { q } => {
                let radicand = q.powf(rf + 1.0 - 2.0 * nf) * (1.0 - q.powf(rf)) * (1.0 - q.powf(nf - rf));
                Ok(2.0 * radicand.sqrt())
            }
            InteractionKind::Custom { gamma } => Ok(gamma[r - 1]),
        }
    });
    gamma.collect()
}

/// The matrix `A` of the potential `sum A_ij q_i q_j / 2` (per unit mass).
///
/// The diagonal is `omega^2`, except for the constant chain where it is
/// `omega^2 + 2c`; off-diagonal magnitudes are `(c/2) gamma_r`.
pub fn assemble_quadratic_form(spec: &ChainSpec) -> Result<SymTridiagonal> {
    let gamma = coupling_coefficients(spec)?;
    let w2 = spec.omega * spec.omega;
    let diag = match spec.interaction {
        InteractionKind::Constant => w2 + 2.0 * spec.coupling,
        _ => w2,
    };
    SymTridiagonal::new(
        vec![diag; spec.n],
        gamma.iter().map(|g| spec.coupling / 2.0 * g).collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum CouplingBound {
    Finite(f64),
    Unbounded,
}

impl CouplingBound {
    pub fn value(&self) -> Option<f64> {
        match self {
            CouplingBound::Finite(c) => Some(*c),
            CouplingBound::Unbounded => None,
        }
    }
}

/// Supremum of the couplings `c` that keep the quadratic form positive definite.
pub fn max_coupling(n: usize, omega: f64, interaction: &InteractionKind) -> Result<CouplingBound> {
    if n == 0 || !(omega > 0.0 && omega.is_finite()) {
        return Err(invalid("max_coupling needs n >= 1 and omega > 0"));
    }
    interaction.validate(n)?;
    let (w2, nf) = (omega * omega, n as f64);
    if let InteractionKind::Custom { .. } = interaction {
        return Err(Error::UnsupportedFamily);
    }
    if n == 1 {
        return Ok(CouplingBound::Unbounded);
    }
    Ok(match *interaction {
        InteractionKind::Constant | InteractionKind::Custom { .. } => CouplingBound::Unbounded,
        InteractionKind::Krawtchouk | InteractionKind::Hahn { .. } => CouplingBound::Finite(2.0 * w2 / (nf - 1.0)),
        // lowest mode sits at x = 0 for q > 1 and at x = n - 1 for q < 1
        InteractionKind::DualQKrawtchouk { q } if q > 1.0 => CouplingBound::Finite(w2 / (1.0 - q.powf(1.0 - nf))),
        InteractionKind::DualQKrawtchouk { q } => CouplingBound::Finite(w2 / (q.powf(1.0 - nf) - 1.0)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Path {
    ClosedForm,
    Numeric,
}

/// Mode frequencies in ascending order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeSpectrum {
    pub omegas: Vec<f64>,
    /// Zero-based family index of each entry of `omegas` (ascending rank for the numeric path).
    pub family_index: Vec<usize>,
    pub origin: Path,
}

/// `omega_j^2` in family order from the closed forms.
fn closed_form_squares(spec: &ChainSpec) -> Result<Vec<f64>> {
    let (w2, c, n) = (spec.omega * spec.omega, spec.coupling, spec.n);
    let nf = n as f64;
    Ok(match spec.interaction {
        InteractionKind::Constant => (1..=n)
            .map(|j| {
                let s = (j as f64 * std::f64::consts::PI / (2.0 * (nf + 1.0))).sin();
                w2 + 4.0 * c * s * s
            })
            .collect(),
        InteractionKind::Krawtchouk | InteractionKind::Hahn { .. } => {
            (1..=n).map(|j| w2 - c * (nf - 2.0 * j as f64 + 1.0) / 2.0).collect()
        }
        InteractionKind::DualQKrawtchouk { q } => (0..n)
            .map(|x| {
                let xf = x as f64;
                w2 + c * (q.powf(xf - nf + 1.0) - q.powf(-xf))
            })
            .collect(),
        InteractionKind::Custom { .. } => return Err(Error::ClosedFormUnavailable),
    })
}

fn numeric_squares(spec: &ChainSpec) -> Result<Vec<f64>> {
    Ok(numeric_decomposition(&assemble_quadratic_form(spec)?)?.eigenvalues)
}

/// Smallest eigenvalue of the quadratic form (closed form unless custom).
pub fn min_eigenvalue(spec: &ChainSpec) -> Result<f64> {
    spec.validate()?;
    let squares = match spec.interaction {
        InteractionKind::Custom { .. } => numeric_squares(spec)?,
        _ => closed_form_squares(spec)?,
    };
    Ok(squares.into_iter().fold(f64::INFINITY, f64::min))
}

pub fn is_positive_definite(spec: &ChainSpec) -> bool {
    min_eigenvalue(spec).is_ok_and(|m| m > PD_THRESHOLD * spec.omega * spec.omega)
}

fn ensure_positive_definite(spec: &ChainSpec) -> Result<()> {
    let min = min_eigenvalue(spec)?;
    if min > PD_THRESHOLD * spec.omega * spec.omega {
        return Ok(());
    }
    let bound = max_coupling(spec.n, spec.omega, &spec.interaction)
        .ok()
        .and_then(|b| b.value());
    Err(Error::NotPositiveDefinite { min_eigenvalue: min, bound })
}

pub fn mode_frequencies(spec: &ChainSpec, path: Path) -> Result<ModeSpectrum> {
    spec.validate()?;
    if path == Path::ClosedForm {
        if let InteractionKind::Custom { .. } = spec.interaction {
            return Err(Error::ClosedFormUnavailable);
        }
    }
    ensure_positive_definite(spec)?;
    let squares = match path {
        Path::ClosedForm => closed_form_squares(spec)?,
        Path::Numeric => numeric_squares(spec)?,
    };
    let mut order: Vec<usize> = (0..squares.len()).collect();
    order.sort_by(|&a, &b| squares[a].total_cmp(&squares[b]));
    Ok(ModeSpectrum {
        omegas: order.iter().map(|&j| squares[j].sqrt()).collect(),
        family_index: order,
        origin: path,
    })
}

/// Closed-form frequencies when available, numeric ones for custom chains.
pub fn preferred_frequencies(spec: &ChainSpec) -> Result<ModeSpectrum> {
    match spec.interaction {
        InteractionKind::Custom { .. } => mode_frequencies(spec, Path::Numeric),
        _ => mode_frequencies(spec, Path::ClosedForm),
    }
}
