use detmodes::diagnostics::{gronwall_envelope, running_sup_abs, window_average};
use detmodes::model::{
    reaction_rhs, validate_properties, ForcingSpec, ModeTerm, Property, Verdict,
};
use detmodes::spectral::{
    eigenvalue, CosineTransform, GridField, ModeOrdering, NormEvaluator, NormOrder,
};
use detmodes::{load_checkpoint, save_checkpoint, ModelParams, SimulationState, SpectralField};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn field(modes: usize, seed: u64, amp: f64) -> SpectralField {
    SpectralField::random(modes, amp, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn params(a1: f64, a2: f64, b1: f64, b2: f64, gamma: f64) -> ModelParams {
    ModelParams {
        d1: 1.0,
        d2: 1.0,
        a1,
        a2,
        b1,
        b2,
        gamma,
        g1: ForcingSpec::constant(0.3),
        g2: ForcingSpec::mode_sum(vec![ModeTerm::new(1, 2, 0.2)], vec![], 0.0),
        c1: 1.0,
        c2: 1.0,
        natural_scale: 1.0,
        steady_state: None,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transform_round_trip(modes in 1usize..24, extra in 0usize..16, seed in any::<u64>()) {
        let f = field(modes, seed, 1.0);
        let t = CosineTransform::new(modes, (modes + extra).max(2)).unwrap();
        let back = t.to_spectral(&t.to_physical(&f).unwrap()).unwrap();
        let err = (&back - &f).coeffs().iter().fold(0.0f64, |m, x| m.max(x.abs()));
        prop_assert!(err <= 1e-12);
    }

    #[test]
    fn projections_split_exactly(modes in 2usize..16, m in 1usize..40, seed in any::<u64>()) {
        let ord = ModeOrdering::new(modes);
        let m = m.min(ord.len());
        let f = field(modes, seed, 1.0);
        let (p, q) = f.split(m, &ord).unwrap();
        prop_assert_eq!(&(&p + &q), &f);
        prop_assert_eq!(p.inner(&q), 0.0);
    }

    #[test]
    fn poincare_on_high_modes(modes in 2usize..16, m in 1usize..40, seed in any::<u64>()) {
        let ord = ModeOrdering::new(modes);
        let m = m.min(ord.len() - 1);
        let q = field(modes, seed, 1.0).project_high(m, &ord).unwrap();
        let lambda = ord.eigenvalue(m + 1).unwrap();
        prop_assert!(q.grad_norm_sq() >= lambda * q.l2_norm_sq() * (1.0 - 1e-12));
    }

    #[test]
    fn ladyzhenskaya_for_mean_free_fields(modes in 2usize..16, seed in any::<u64>(), amp in 0.01f64..10.0) {
        let mut f = field(modes, seed, amp);
        f.coeffs_mut()[[0, 0]] = 0.0;
        let l4 = NormEvaluator::new(modes).unwrap().norm(&f, NormOrder::L4).unwrap();
        prop_assert!(l4.powi(4) <= f.l2_norm_sq() * f.grad_norm_sq() * (1.0 + 1e-12));
    }

    #[test]
    fn norms_are_ordered(modes in 1usize..10, seed in any::<u64>()) {
        // on a unit-area domain, L2 ≤ L4 ≤ L8
        let f = field(modes, seed, 1.0);
        let ev = NormEvaluator::with_grid(modes, 4 * modes).unwrap();
        let l2 = ev.norm(&f, NormOrder::L2).unwrap();
        let l4 = ev.norm(&f, NormOrder::L4).unwrap();
        let l8 = ev.norm(&f, NormOrder::L8).unwrap();
        prop_assert!(l2 <= l4 * (1.0 + 1e-12) && l4 <= l8 * (1.0 + 1e-12));
    }

    #[test]
    fn telescoping_sum_is_exact(
        a1 in -2.0f64..2.0, a2 in -2.0f64..2.0, b1 in -2.0f64..2.0, b2 in -2.0f64..2.0,
        gamma in 0.0f64..3.0, seed in any::<u64>(), t in 0.0f64..10.0,
    ) {
        let p = params(a1, a2, b1, b2, gamma);
        let u = CosineTransform::new(6, 12).unwrap().to_physical(&field(6, seed, 1.0)).unwrap();
        let v = CosineTransform::new(6, 12).unwrap().to_physical(&field(6, seed ^ 1, 1.0)).unwrap();
        let r = reaction_rhs(&u, &v, &p, t).unwrap();
        let g1 = p.g1.grid_at(t, 12);
        let g2 = p.g2.grid_at(t, 12);
        let sum = r.species_sum();
        for i in 0..12 {
            for j in 0..12 {
                let (uu, vv) = (u.values()[[i, j]], v.values()[[i, j]]);
                let linear = (a1 * uu + b1 * vv + g1.values()[[i, j]])
                    + ((a2 * uu + b2 * vv) + g2.values()[[i, j]]);
                prop_assert_eq!(sum.values()[[i, j]].to_bits(), linear.to_bits());
            }
        }
    }

    #[test]
    fn twin_forcing_converges(amp in 0.0f64..1.0, rate in 0.001f64..1.0, t in 0.0f64..100.0) {
        let g = ForcingSpec::constant(0.04);
        let gt = ForcingSpec::constant_plus_decaying(0.04, vec![ModeTerm::new(0, 2, amp)], rate);
        let diff = &g.spectral_at(t, 4).unwrap() - &gt.spectral_at(t, 4).unwrap();
        prop_assert!(diff.l2_norm() <= amp * (-rate * t).exp() * (1.0 + 1e-12));
    }

    #[test]
    fn p6_is_exact(a1 in -2.0f64..2.0, a2 in -2.0f64..2.0, b1 in -2.0f64..2.0, b2 in -2.0f64..2.0) {
        let p = params(a1, a2, b1, b2, 1.0);
        let report = validate_properties(&p, (5.0, 5.0), 200);
        let expected = if a1 + a2 <= 0.0 && b1 + b2 <= 0.0 { Verdict::Holds } else { Verdict::Fails };
        prop_assert_eq!(report.verdict(Property::P6), expected);
    }

    #[test]
    fn window_average_of_constant(a in -5.0f64..5.0, window in 0.1f64..2.0) {
        let t: Vec<f64> = (0..=500).map(|i| i as f64 * 0.02).collect();
        let v = vec![a; t.len()];
        let s = window_average(&t, &v, window, 0.2).unwrap();
        prop_assert!((s.lower - a).abs() <= 1e-12 * (1.0 + a.abs()));
        prop_assert!((s.upper - a).abs() <= 1e-12 * (1.0 + a.abs()));
    }

    #[test]
    fn envelope_shape(x0 in 0.0f64..10.0, g in 0.01f64..5.0, gu in 0.0f64..3.0, window in 0.1f64..5.0, seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let times: Vec<f64> = (0..100).map(|i| i as f64 * 0.3).collect();
        let beta: Vec<f64> = times.iter().map(|_| rng.random_range(-1.0..1.0)).collect();
        let sup = running_sup_abs(&beta);
        let env = gronwall_envelope(x0, g, gu, window, &sup, &times).unwrap();
        let gp = (gu + 1.0 + 0.5 * g).exp();
        let offset = 2.0 * gp * window / g;
        // decaying part is nonincreasing, offset part nondecreasing
        for i in 1..env.len() {
            let decay = |j: usize| env[j] - offset * sup[j];
            prop_assert!(decay(i) <= decay(i - 1) * (1.0 + 1e-12) + 1e-300);
            prop_assert!(sup[i] >= sup[i - 1]);
        }
    }

    #[test]
    fn checkpoint_round_trip(modes in 1usize..12, seed in any::<u64>(), t in 0.0f64..1e6, step in any::<u64>()) {
        let state = SimulationState { t, step, u: field(modes, seed, 1.0), v: field(modes, !seed, 2.0) };
        let mut buf = Vec::new();
        save_checkpoint(&mut buf, &state, 2 * modes).unwrap();
        let (back, n_eval) = load_checkpoint(&buf[..]).unwrap();
        prop_assert_eq!(n_eval, 2 * modes);
        prop_assert_eq!(back, state);
    }
}

#[test]
fn ladyzhenskaya_fails_for_constants() {
    // the interpolation bound needs mean-free fields under Neumann conditions
    let f = SpectralField::constant(4, 2.0);
    let l4 = NormEvaluator::new(4)
        .unwrap()
        .norm(&f, NormOrder::L4)
        .unwrap();
    assert!(l4.powi(4) > f.l2_norm_sq() * f.grad_norm_sq());
}

#[test]
fn single_mode_gradient_is_exact() {
    let f = SpectralField::single_mode(8, 3, 2, 0.5).unwrap();
    assert!((f.grad_norm_sq() - eigenvalue(3, 2) * 0.25).abs() < 1e-12);
    let g = GridField::from_fn(16, |_, _| 1.0);
    assert!((g.integral() - 1.0).abs() < 1e-15);
}
