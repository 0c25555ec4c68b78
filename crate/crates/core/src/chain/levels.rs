//! Fock-state energies and the shape of the single-phonon ladder.

use serde::Serialize;

use super::{preferred_frequencies, ChainSpec, ModeSpectrum};
use crate::error::{invalid, Error, Result};

pub const DEFAULT_STATE_CAP: usize = 1_000_000;
/// Levels closer than this (in units of `hbar * omega`) share a group.
pub const DEGENERACY_TOLERANCE: f64 = 1e-9;

/// Occupation numbers `k_1..k_n`, paired with the modes in ascending frequency.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct FockState {
    pub occupations: Vec<u32>,
}

impl FockState {
    pub fn new(occupations: Vec<u32>) -> Self {
        FockState { occupations }
    }

    pub fn ground(n: usize) -> Self {
        FockState { occupations: vec![0; n] }
    }

    /// One quantum in mode `j` (zero-based, ascending frequency).
    pub fn single(n: usize, j: usize) -> Self {
        let mut occupations = vec![0; n];
        occupations[j] = 1;
        FockState { occupations }
    }

    pub fn total_quanta(&self) -> u64 {
        self.occupations.iter().map(|&k| k as u64).sum()
    }
}

fn energy_from(modes: &ModeSpectrum, hbar: f64, s: &FockState) -> Result<f64> {
    if s.occupations.len() != modes.omegas.len() {
        return Err(Error::DimensionMismatch {
            expected: modes.omegas.len(),
            found: s.occupations.len(),
        });
    }
    Ok(modes
        .omegas
        .iter()
        .zip(&s.occupations)
        .map(|(w, &k)| hbar * w * (k as f64 + 0.5))
        .sum())
}

/// `sum_j hbar omega_j (k_j + 1/2)`.
pub fn state_energy(spec: &ChainSpec, s: &FockState) -> Result<f64> {
    let modes = preferred_frequencies(spec)?;
    energy_from(&modes, spec.hbar, s)
}

/// `E_0 + hbar omega_j` for every mode, ascending.
pub fn single_phonon_levels(spec: &ChainSpec) -> Result<Vec<f64>> {
    let modes = preferred_frequencies(spec)?;
    let ground = energy_from(&modes, spec.hbar, &FockState::ground(spec.n))?;
    Ok(modes.omegas.iter().map(|w| ground + spec.hbar * w).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelGroup {
    pub energy: f64,
    pub states: Vec<FockState>,
}

/// Number of occupation vectors of length `n` with at most `k` quanta, `C(n+k, k)`.
fn state_count(n: usize, k: usize) -> u128 {
    let mut acc: u128 = 1;
    for i in 1..=k as u128 {
        acc = acc.saturating_mul(n as u128 + i) / i;
    }
    acc
}

fn fill(prefix: &mut Vec<u32>, n: usize, left: u32, out: &mut Vec<FockState>) {
    if prefix.len() == n {
        out.push(FockState::new(prefix.clone()));
        return;
    }
    for k in 0..=left {
        prefix.push(k);
        fill(prefix, n, left - k, out);
        prefix.pop();
    }
}

/// All states with at most `max_total_quanta` quanta, grouped by energy.
pub fn enumerate_levels(spec: &ChainSpec, max_total_quanta: usize) -> Result<Vec<LevelGroup>> {
    enumerate_levels_with_cap(spec, max_total_quanta, DEFAULT_STATE_CAP)
}

pub fn enumerate_levels_with_cap(
    spec: &ChainSpec,
    max_total_quanta: usize,
    cap: usize,
) -> Result<Vec<LevelGroup>> {
    enumerate_levels_with(spec, max_total_quanta, cap, DEGENERACY_TOLERANCE)
}

pub fn enumerate_levels_with(
    spec: &ChainSpec,
    max_total_quanta: usize,
    cap: usize,
    tolerance: f64,
) -> Result<Vec<LevelGroup>> {
    let modes = preferred_frequencies(spec)?;
    let count = state_count(spec.n, max_total_quanta);
    if count > cap as u128 {
        return Err(Error::CombinatorialLimit { count, cap });
    }
    let left = u32::try_from(max_total_quanta).map_err(|_| invalid("too many quanta"))?;
    let mut states = Vec::with_capacity(count as usize);
    fill(&mut Vec::with_capacity(spec.n), spec.n, left, &mut states);

    let mut tagged = states
        .into_iter()
        .map(|s| Ok((energy_from(&modes, spec.hbar, &s)?, s)))
        .collect::<Result<Vec<_>>>()?;
    tagged.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));

    let window = tolerance * spec.hbar * spec.omega;
    let mut groups: Vec<LevelGroup> = Vec::new();
    for (energy, state) in tagged {
        match groups.last_mut() {
            Some(g) if energy - g.energy <= window => g.states.push(state),
            _ => groups.push(LevelGroup { energy, states: vec![state] }),
        }
    }
    for g in &mut groups {
        g.states.sort();
    }
    Ok(groups)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SpacingPattern {
    Decreasing,
    Increasing,
    MidPeak,
    MidDip,
    Other,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpacingProfile {
    pub gaps: Vec<f64>,
    pub pattern: SpacingPattern,
}

fn strictly(v: &[f64], up: bool) -> bool {
    v.windows(2).all(|w| if up { w[1] > w[0] } else { w[1] < w[0] })
}

/// `true` if `v` moves strictly one way up to an interior turn and strictly back after it.
fn turns(v: &[f64], up_first: bool) -> bool {
    (1..v.len().saturating_sub(1))
        .any(|k| strictly(&v[..=k], up_first) && strictly(&v[k..], !up_first))
}

/// Consecutive gaps of an ascending ladder and their shape.
pub fn spacing_profile(levels: &[f64]) -> Result<SpacingProfile> {
    if levels.len() < 3 {
        return Err(Error::TooFewLevels(levels.len()));
    }
    if levels.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(invalid("levels must be ascending"));
    }
    let gaps: Vec<f64> = levels.windows(2).map(|w| w[1] - w[0]).collect();
    let pattern = if strictly(&gaps, false) {
        SpacingPattern::Decreasing
    } else if strictly(&gaps, true) {
        SpacingPattern::Increasing
    } else if turns(&gaps, true) {
        SpacingPattern::MidPeak
    } else if turns(&gaps, false) {
        SpacingPattern::MidDip
    } else {
        SpacingPattern::Other
    };
    Ok(SpacingProfile { gaps, pattern })
}

/// Affine map taking `min(levels)` to `lo` and `max(levels)` to `hi`.
pub fn rescale_levels(levels: &[f64], lo: f64, hi: f64) -> Result<Vec<f64>> {
    if !(lo < hi) {
        return Err(invalid(format!("rescale needs lo < hi (got {lo}, {hi})")));
    }
    let min = levels.iter().copied().fold(f64::INFINITY, f64::min);
    let max = levels.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(max > min) {
        return Err(Error::DegenerateRange);
    }
    let scale = if hi - lo == max - min { 1.0 } else { (hi - lo) / (max - min) };
    Ok(levels
        .iter()
        .map(|&v| {
            if v == min {
                lo
            } else if v == max {
                hi
            } else {
                lo + (v - min) * scale
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::super::InteractionKind;
    use super::*;
    use approx::assert_abs_diff_eq;

    fn spec(n: usize, c: f64, kind: InteractionKind) -> ChainSpec {
        ChainSpec::simple(n, 1.0, c, kind).unwrap()
    }

    #[test]
    fn ground_and_single_energies() {
        let s = spec(4, 0.4, InteractionKind::Krawtchouk);
        let e0 = state_energy(&s, &FockState::ground(4)).unwrap();
        let expect = 0.5 * [0.4f64, 0.8, 1.2, 1.6].iter().map(|v| v.sqrt()).sum::<f64>();
        assert_abs_diff_eq!(e0, expect, epsilon = 1e-15);
        assert_abs_diff_eq!(e0, 1.94362, epsilon = 1e-5);
        let e1 = state_energy(&s, &FockState::single(4, 2)).unwrap();
        assert_abs_diff_eq!(e1 - e0, 1.2f64.sqrt(), epsilon = 1e-14);
        assert!(matches!(
            state_energy(&s, &FockState::ground(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn single_oscillator() {
        for kind in [InteractionKind::Constant, InteractionKind::Krawtchouk] {
            let levels = single_phonon_levels(&spec(1, 0.0, kind)).unwrap();
            assert_eq!(levels, vec![1.5]);
        }
    }

    #[test]
    fn krawtchouk_ladder_narrows() {
        let levels = single_phonon_levels(&spec(12, 0.18, InteractionKind::Krawtchouk)).unwrap();
        assert_eq!(levels.len(), 12);
        assert_eq!(spacing_profile(&levels).unwrap().pattern, SpacingPattern::Decreasing);
    }

    #[test]
    fn enumerate_examples() {
        let s = spec(2, 1.0, InteractionKind::Constant);
        let g = enumerate_levels(&s, 0).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].states, vec![FockState::ground(2)]);
        let g = enumerate_levels(&s, 1).unwrap();
        assert_eq!(g.len(), 3);
        let singles = single_phonon_levels(&s).unwrap();
        assert_abs_diff_eq!(g[1].energy, singles[0], epsilon = 1e-15);
        assert_abs_diff_eq!(g[2].energy, singles[1], epsilon = 1e-15);
        let g = enumerate_levels(&s, 2).unwrap();
        let e0 = g[0].energy;
        let r2 = 2f64.sqrt();
        let expect = [0.0, r2, 2.0, 2.0 * r2, 2.0 + r2, 4.0];
        assert_eq!(g.len(), 6);
        for (grp, e) in g.iter().zip(expect) {
            assert_abs_diff_eq!(grp.energy - e0, e, epsilon = 1e-14);
            assert_eq!(grp.states.len(), 1);
        }
    }

    #[test]
    fn degenerate_levels_group() {
        let s = spec(3, 0.0, InteractionKind::Krawtchouk);
        let g = enumerate_levels(&s, 1).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(
            g[1].states,
            vec![FockState::single(3, 2), FockState::single(3, 1), FockState::single(3, 0)]
        );
    }

    #[test]
    fn state_cap() {
        let s = spec(16, 0.01, InteractionKind::Krawtchouk);
        assert_eq!(state_count(16, 6), 74613);
        assert!(enumerate_levels(&s, 6).is_ok());
        assert_eq!(
            enumerate_levels_with_cap(&s, 6, 1000),
            Err(Error::CombinatorialLimit { count: 74613, cap: 1000 })
        );
    }

    #[test]
    fn spacing_patterns() {
        let p = |v: &[f64]| spacing_profile(v).unwrap().pattern;
        assert_eq!(p(&[0.0, 1.0, 3.0, 4.0]), SpacingPattern::MidPeak);
        assert_eq!(p(&[0.0, 2.0, 3.0, 5.0]), SpacingPattern::MidDip);
        assert_eq!(p(&[0.0, 1.0, 3.0, 6.0]), SpacingPattern::Increasing);
        assert_eq!(p(&[0.0, 1.0, 2.0, 3.0]), SpacingPattern::Other);
        assert_eq!(spacing_profile(&[0.0, 1.0]), Err(Error::TooFewLevels(2)));
        assert!(spacing_profile(&[0.0, 2.0, 1.0]).is_err());
    }

    #[test]
    fn constant_ladder_peaks_in_middle() {
        let levels = single_phonon_levels(&spec(12, 0.5, InteractionKind::Constant)).unwrap();
        assert_eq!(spacing_profile(&levels).unwrap().pattern, SpacingPattern::MidPeak);
    }

    #[test]
    fn rescale_examples() {
        assert_eq!(rescale_levels(&[0.0, 1.0, 2.0], 0.0, 1.0).unwrap(), vec![0.0, 0.5, 1.0]);
        let v = [0.1, 0.37, 0.52, 0.9];
        assert_eq!(rescale_levels(&v, 0.1, 0.9).unwrap(), v.to_vec());
        assert_eq!(rescale_levels(&[2.0, 2.0], 0.0, 1.0), Err(Error::DegenerateRange));
        assert!(rescale_levels(&[0.0, 1.0], 1.0, 0.0).is_err());
    }
}
