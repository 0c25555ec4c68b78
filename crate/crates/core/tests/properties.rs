use proptest::prelude::*;

use chain_spectra::chain::{
    assemble_quadratic_form, is_positive_definite, max_coupling, mode_frequencies, rescale_levels,
    state_energy, ChainSpec, FockState, InteractionKind, Path,
};
use chain_spectra::jacobi::{
    analytic_decomposition, build_jacobi, decomposition_residuals, eigenvalue_deviation, numeric_decomposition,
    JacobiFamily,
};
use chain_spectra::polynomials::{family_eval, norm, recurrence_eval, weight, FamilyParams};

fn grid_family() -> impl Strategy<Value = FamilyParams> {
    let kraw = (prop::sample::select(vec![0.3, 0.5, 0.7]), 1usize..=24)
        .prop_map(|(p, n)| FamilyParams::krawtchouk(p, n).unwrap());
    let hahn = (prop::sample::select(vec![-0.5, 0.5, 2.0]), 1usize..=24)
        .prop_map(|(a, n)| FamilyParams::hahn(a, a, n).unwrap());
    let dual = (prop::sample::select(vec![0.5, 0.9, 1.1, 2.0]), 1usize..=24)
        .prop_map(|(q, n)| FamilyParams::dual_q_krawtchouk(-1.0, q, n).unwrap());
    prop_oneof![kraw, hahn, dual]
}

/// Parameters drawn from the continuous valid ranges.
fn any_family() -> impl Strategy<Value = FamilyParams> {
    let kraw = (0.05f64..0.95, 1usize..=20).prop_map(|(p, n)| FamilyParams::krawtchouk(p, n).unwrap());
    let hahn = (-0.95f64..6.0, -0.95f64..6.0, 1usize..=20)
        .prop_map(|(a, b, n)| FamilyParams::hahn(a, b, n).unwrap());
    let hahn_neg = (1usize..=20, 0.1f64..5.0, 0.1f64..5.0)
        .prop_map(|(n, da, db)| FamilyParams::hahn(-(n as f64) - da, -(n as f64) - db, n).unwrap());
    let dual = (-3.0f64..-0.05, prop_oneof![0.4f64..0.95, 1.05f64..2.5], 1usize..=20)
        .prop_map(|(c, q, n)| FamilyParams::dual_q_krawtchouk(c, q, n).unwrap());
    prop_oneof![kraw, hahn, hahn_neg, dual]
}

fn chain_kind() -> impl Strategy<Value = InteractionKind> {
    prop_oneof![
        Just(InteractionKind::Constant),
        Just(InteractionKind::Krawtchouk),
        (-0.9f64..8.0).prop_map(|alpha| InteractionKind::Hahn { alpha }),
        prop_oneof![0.5f64..0.95, 1.05f64..2.0].prop_map(|q| InteractionKind::DualQKrawtchouk { q }),
    ]
}

/// A positive definite chain at a fraction of the coupling bound.
fn chain() -> impl Strategy<Value = ChainSpec> {
    (2usize..=32, 0.3f64..3.0, 0.05f64..0.95, chain_kind()).prop_map(|(n, omega, frac, kind)| {
        let c = match max_coupling(n, omega, &kind).unwrap().value() {
            Some(b) => frac * b,
            None => frac * 4.0,
        };
        ChainSpec::simple(n, omega, c, kind).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn orthogonality(fp in grid_family()) {
        let n = fp.order();
        let pts: Vec<_> = (0..=n).map(|x| fp.point(x).unwrap()).collect();
        let w: Vec<f64> = pts.iter().map(|p| weight(&fp, p).unwrap()).collect();
        let h: Vec<f64> = (0..=n).map(|i| norm(&fp, i).unwrap()).collect();
        let v: Vec<Vec<f64>> = (0..=n)
            .map(|i| pts.iter().map(|p| family_eval(&fp, i, p).unwrap()).collect())
            .collect();
        for i in 0..=n {
            prop_assert!(h[i] > 0.0);
            for j in 0..=n {
                let s: f64 = (0..=n).map(|x| w[x] * v[i][x] * v[j][x]).sum();
                let target = if i == j { h[i] } else { 0.0 };
                prop_assert!((s - target).abs() <= 1e-10 * (h[i] * h[j]).sqrt(), "i={} j={} {} vs {}", i, j, s, target);
            }
        }
    }

    #[test]
    fn weights_are_positive(fp in any_family()) {
        for x in 0..=fp.order() {
            prop_assert!(weight(&fp, &fp.point(x).unwrap()).unwrap() > 0.0);
        }
        for i in 0..=fp.order() {
            prop_assert!(norm(&fp, i).unwrap() > 0.0);
        }
    }

    #[test]
    fn series_and_recurrence_agree(fp in grid_family()) {
        let n = fp.order();
        for i in 0..=n {
            for x in 0..=n {
                let pt = fp.point(x).unwrap();
                let a = family_eval(&fp, i, &pt).unwrap();
                let b = recurrence_eval(&fp, i, &pt).unwrap();
                prop_assert!((a - b).abs() <= 1e-10 * a.abs(), "i={} x={}: {} vs {}", i, x, a, b);
            }
        }
    }

    #[test]
    fn analytic_decomposition_reproduces_jacobi(fp in any_family()) {
        let jf = JacobiFamily::Polynomial(fp);
        let m = build_jacobi(&jf).unwrap();
        let a = analytic_decomposition(&jf).unwrap();
        let (ortho, recon) = decomposition_residuals(&m, &a).unwrap();
        let scale = 1.0 + m.max_abs();
        prop_assert!(ortho <= 1e-9, "ortho {}", ortho);
        prop_assert!(recon <= 1e-9 * scale, "recon {}", recon);
        let num = numeric_decomposition(&m).unwrap();
        prop_assert!(eigenvalue_deviation(&a, &num).unwrap() <= 1e-8 * scale);
    }

    #[test]
    fn assembly_consistency(spec in chain()) {
        let n = spec.n;
        let jf = match spec.interaction {
            InteractionKind::Constant => JacobiFamily::constant(n - 1),
            InteractionKind::Krawtchouk => JacobiFamily::krawtchouk(0.5, n - 1),
            InteractionKind::Hahn { alpha } => JacobiFamily::hahn(alpha, alpha, n - 1),
            InteractionKind::DualQKrawtchouk { q } => JacobiFamily::dual_q_krawtchouk(-1.0, q, n - 1),
            InteractionKind::Custom { .. } => unreachable!(),
        }
        .unwrap();
        let w2 = spec.omega * spec.omega;
        let (c, nf) = (spec.coupling, n as f64);
        let shift = match spec.interaction {
            InteractionKind::Constant => w2,
            InteractionKind::DualQKrawtchouk { q } => w2 - c * (1.0 - q.powf(1.0 - nf)),
            _ => w2 - c * (nf - 1.0) / 2.0,
        };
        let a = assemble_quadratic_form(&spec).unwrap();
        let m = build_jacobi(&jf).unwrap();
        for i in 0..n {
            for j in 0..n {
                let expect = if i == j { shift + c * m.get(i, j) } else { c * m.get(i, j) };
                let got = a.get(i, j);
                prop_assert!((got - expect).abs() <= 1e-12 * expect.abs().max(w2), "({}, {}): {} vs {}", i, j, got, expect);
            }
        }
    }

    #[test]
    fn closed_form_matches_numeric(spec in chain()) {
        let closed = mode_frequencies(&spec, Path::ClosedForm).unwrap().omegas;
        let numeric = mode_frequencies(&spec, Path::Numeric).unwrap().omegas;
        for (a, b) in closed.iter().zip(&numeric) {
            prop_assert!((a - b).abs() <= 1e-9 * b, "{} vs {}", a, b);
        }
    }

    #[test]
    fn hahn_and_krawtchouk_share_spectrum(
        n in 2usize..=32,
        frac in 0.05f64..0.95,
        alpha in prop_oneof![-0.95f64..20.0, -60.0f64..-33.0],
    ) {
        let c = frac * 2.0 / (n as f64 - 1.0);
        let kraw = ChainSpec::simple(n, 1.0, c, InteractionKind::Krawtchouk).unwrap();
        let hahn = ChainSpec::simple(n, 1.0, c, InteractionKind::Hahn { alpha }).unwrap();
        for path in [Path::ClosedForm, Path::Numeric] {
            let a = mode_frequencies(&kraw, path).unwrap().omegas;
            let b = mode_frequencies(&hahn, path).unwrap().omegas;
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn frequencies_monotone_in_family_index(spec in chain()) {
        let modes = mode_frequencies(&spec, Path::ClosedForm).unwrap();
        let mut by_index = vec![0.0; spec.n];
        for (w, &j) in modes.omegas.iter().zip(&modes.family_index) {
            by_index[j] = *w;
        }
        let descending = matches!(spec.interaction, InteractionKind::DualQKrawtchouk { q } if q < 1.0);
        for pair in by_index.windows(2) {
            if descending {
                prop_assert!(pair[1] <= pair[0]);
            } else {
                prop_assert!(pair[1] >= pair[0]);
            }
        }
    }

    #[test]
    fn positive_definite_boundary(n in 2usize..=32, omega in 0.3f64..3.0, kind in chain_kind()) {
        if let Some(bound) = max_coupling(n, omega, &kind).unwrap().value() {
            let below = ChainSpec::simple(n, omega, 0.999 * bound, kind.clone()).unwrap();
            let above = ChainSpec::simple(n, omega, 1.001 * bound, kind).unwrap();
            prop_assert!(is_positive_definite(&below));
            prop_assert!(!is_positive_definite(&above));
        }
    }

    #[test]
    fn energy_is_additive(spec in chain(), seed in prop::collection::vec(0u32..5, 32), j in 0usize..32) {
        let occ: Vec<u32> = seed[..spec.n].to_vec();
        let j = j % spec.n;
        let modes = mode_frequencies(&spec, Path::ClosedForm).unwrap();
        let base = state_energy(&spec, &FockState::new(occ.clone())).unwrap();
        let mut up = occ;
        up[j] += 1;
        let raised = state_energy(&spec, &FockState::new(up)).unwrap();
        let step = spec.hbar * modes.omegas[j];
        prop_assert!((raised - base - step).abs() <= 1e-12 * base.max(1.0));
    }

    #[test]
    fn rescale_invariants(
        levels in prop::collection::vec(-50.0f64..50.0, 2..40),
        lo in -5.0f64..5.0,
        width in 0.1f64..10.0,
    ) {
        let mut levels = levels;
        levels.sort_by(f64::total_cmp);
        prop_assume!(levels[levels.len() - 1] - levels[0] > 1e-6);
        let hi = lo + width;
        let out = rescale_levels(&levels, lo, hi).unwrap();
        prop_assert_eq!(out[0], lo);
        prop_assert_eq!(out[out.len() - 1], hi);
        prop_assert!(out.windows(2).all(|w| w[1] >= w[0]));
        let ratio = width / (levels[levels.len() - 1] - levels[0]);
        for (a, b) in out.windows(2).zip(levels.windows(2)) {
            prop_assert!(((a[1] - a[0]) - ratio * (b[1] - b[0])).abs() <= 1e-9 * width);
        }
        let again = rescale_levels(&out, lo, hi).unwrap();
        for (a, b) in again.iter().zip(&out) {
            prop_assert!((a - b).abs() <= 1e-15 * b.abs().max(1.0));
        }
    }

    #[test]
    fn krawtchouk_reflection_exact(n in 2usize..=64, omega in 0.3f64..3.0, frac in 0.0f64..0.95) {
        let c = frac * 2.0 * omega * omega / (n as f64 - 1.0);
        let spec = ChainSpec::simple(n, omega, c, InteractionKind::Krawtchouk).unwrap();
        let g = chain_spectra::chain::coupling_coefficients(&spec).unwrap();
        for r in 1..n {
            prop_assert_eq!(g[r - 1], g[n - r - 1]);
        }
    }
}
