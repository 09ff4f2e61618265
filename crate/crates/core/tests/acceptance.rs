//! Acceptance gate. Each criterion prints one PASS/FAIL line; the process
//! exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::time::Instant;

use detmodes::diagnostics::{
    check_gronwall_samples, run_twin_series, DeterminingOutcome, GronwallOptions, LemmaEvaluator,
    ModeSplitSeries, TwinRecord, TwinRunner, DEFAULT_BURN_IN_FRACTION, DEFAULT_TAIL_FRACTION,
};
use detmodes::grashof::{
    compute_grashof, compute_grashof_with, minimal_t, verify_time_average_bounds, ModeStrategy,
};
use detmodes::model::{preset_brusselator, preset_gray_scott, ForcingSpec, ModeTerm};
use detmodes::spectral::{basis_value, eigenvalue, node, NormEvaluator, NormOrder};
use detmodes::{
    load_checkpoint, save_checkpoint, InitialCondition, Integrator, IntegratorConfig, ModeOrdering,
    ModelParams, SimulationState, SpectralField,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("linear exactness", c1_linear_exactness),
        (
            "homogeneous Brusselator vs adaptive reference",
            c2_ode_oracle,
        ),
        ("telescoping reaction sum", c3_telescoping),
        ("K-bound along a Gray-Scott twin run", c4_k_bound),
        ("K against dense quadrature", c5_k_quadrature),
        ("Gronwall envelope on closed-form cases", c6_gronwall),
        ("determining modes end to end", c7_theorem),
        ("time-averaged L4 bounds", c8_time_average),
        ("Grashof arithmetic", c9_grashof),
        ("determinism and checkpoint resume", c10_determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!(
                "criterion {:>2} PASS  {name}: {detail} ({secs:.2} s)",
                i + 1
            ),
            Err(detail) => {
                failed += 1;
                println!(
                    "criterion {:>2} FAIL  {name}: {detail} ({secs:.2} s)",
                    i + 1
                );
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

fn pure_diffusion(d1: f64, d2: f64) -> ModelParams {
    ModelParams {
        d1,
        d2,
        a1: 0.0,
        a2: 0.0,
        b1: 0.0,
        b2: 0.0,
        gamma: 0.0,
        g1: ForcingSpec::zero(),
        g2: ForcingSpec::zero(),
        c1: 0.0,
        c2: 1.0,
        natural_scale: 1.0,
        steady_state: None,
    }
}

fn c1_linear_exactness() -> Outcome {
    let start = Instant::now();
    let (d1, d2) = (0.01, 0.003);
    let params = pure_diffusion(d1, d2);
    let integ = Integrator::new(&params, &IntegratorConfig::new(0.01, 16)).unwrap();
    let cases = [(1, 0), (3, 5), (15, 15)];
    let mut worst = 0.0f64;
    for &(k, l) in &cases {
        let u0 = SpectralField::single_mode(16, k, l, 1.0).unwrap();
        let v0 = SpectralField::single_mode(16, l, k, 2.0).unwrap();
        let out = integ
            .run(SimulationState::new(u0, v0), 1.0, |_| Ok(()))
            .unwrap()
            .state;
        let eu = (-d1 * eigenvalue(k, l) * out.t).exp();
        let ev = 2.0 * (-d2 * eigenvalue(l, k) * out.t).exp();
        worst = worst
            .max((out.u.get(k, l) - eu).abs() / eu)
            .max((out.v.get(l, k) - ev).abs() / ev);
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        worst <= 1e-12 && secs < 1.0,
        format!("max relative error {worst:.3e}, runtime {secs:.3} s"),
    )
}

/// Dormand-Prince 5(4) with standard step control.
fn dopri5(f: impl Fn(f64, [f64; 2]) -> [f64; 2], y0: [f64; 2], t_end: f64, tol: f64) -> [f64; 2] {
    const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    const B5: [f64; 7] = [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
        0.0,
    ];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];
    let (mut t, mut y, mut h) = (0.0, y0, 1e-3f64);
    while t < t_end {
        h = h.min(t_end - t);
        let mut k = [[0.0; 2]; 7];
        for s in 0..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                for c in 0..2 {
                    ys[c] += h * A[s][j] * kj[c];
                }
            }
            k[s] = f(t + C[s] * h, ys);
        }
        let mut y5 = y;
        let mut err = 0.0f64;
        for c in 0..2 {
            let (mut s5, mut s4) = (0.0, 0.0);
            for s in 0..7 {
                s5 += B5[s] * k[s][c];
                s4 += B4[s] * k[s][c];
            }
            y5[c] += h * s5;
            let scale = tol * (1.0 + y[c].abs().max(y5[c].abs()));
            err = err.max((h * (s5 - s4)).abs() / scale);
        }
        if err <= 1.0 {
            t += h;
            y = y5;
        }
        h *= (0.9 * err.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
    }
    y
}

fn brusselator_homogeneous(dt: f64, t_end: f64, y0: [f64; 2]) -> SimulationState {
    let params = preset_brusselator(1.0, 2.0, 1.0, 1.0).unwrap();
    let integ = Integrator::new(&params, &IntegratorConfig::new(dt, 4)).unwrap();
    let init = InitialCondition::Homogeneous { u: y0[0], v: y0[1] }
        .build(4, 8)
        .unwrap();
    integ.run(init, t_end, |_| Ok(())).unwrap().state
}

fn c2_ode_oracle() -> Outcome {
    let start = Instant::now();
    let y0 = [1.5, 1.2];
    // u inhibitor, v activator: u' = B v - u v², v' = A - (B + 1) v + u v²
    let reference = dopri5(
        |_, [u, v]| [2.0 * v - u * v * v, 1.0 - 3.0 * v + u * v * v],
        y0,
        10.0,
        1e-13,
    );
    let err = |dt: f64| {
        let s = brusselator_homogeneous(dt, 10.0, y0);
        let (du, dv) = (s.u.mean() - reference[0], s.v.mean() - reference[1]);
        (du.hypot(dv)) / reference[0].hypot(reference[1])
    };
    let (e1, e2) = (err(2e-3), err(1e-3));
    let ratio = e1 / e2;
    let secs = start.elapsed().as_secs_f64();
    check(
        e2 <= 1e-6 && (3.5..=4.5).contains(&ratio) && secs < 10.0,
        format!("relative error {e2:.3e} at dt = 1e-3, {e1:.3e} at dt = 2e-3, ratio {ratio:.3}"),
    )
}

fn c3_telescoping() -> Outcome {
    let mut steps = 0usize;
    let mut exact_steps = 0usize;
    let mut naive_mismatch = 0usize;
    let mut naive_points = 0usize;
    let mut naive_bound_ok = true;
    let runs: Vec<(ModelParams, InitialCondition, f64)> = vec![
        (
            preset_gray_scott(0.04, 0.06, 2e-4, 1e-4).unwrap(),
            InitialCondition::Noise {
                background: [0.6, 0.3],
                amplitude: 0.2,
                noise_modes: 8,
                seed: 11,
            },
            0.5,
        ),
        (
            preset_brusselator(1.0, 3.0, 1e-3, 1e-3).unwrap(),
            InitialCondition::Noise {
                background: [3.0, 1.0],
                amplitude: 0.3,
                noise_modes: 8,
                seed: 12,
            },
            0.01,
        ),
    ];
    for (params, ic, dt) in runs {
        let integ = Integrator::new(&params, &IntegratorConfig::new(dt, 16)).unwrap();
        let state = ic.build(16, 32).unwrap();
        let mut check_state = |s: &SimulationState| {
            let terms = integ.grid_reaction(s).unwrap();
            let transform = integ.transform();
            let u = transform.to_physical(&s.u).unwrap();
            let v = transform.to_physical(&s.v).unwrap();
            let [g1, g2] = integ.forcing_at(s.t);
            let g1 = transform.to_physical(&g1).unwrap();
            let g2 = transform.to_physical(&g2).unwrap();
            let p = &params;
            let sum = terms.species_sum();
            let (ru, rv) = (terms.ru(), terms.rv());
            let mut exact = true;
            for i in 0..u.size() {
                for j in 0..u.size() {
                    let (uu, vv) = (u.values()[[i, j]], v.values()[[i, j]]);
                    let lin_u = p.a1 * uu + p.b1 * vv + g1.values()[[i, j]];
                    let lin_v = (p.a2 * uu + p.b2 * vv) + g2.values()[[i, j]];
                    let linear = lin_u + lin_v;
                    exact &= sum.values()[[i, j]].to_bits() == linear.to_bits();
                    let naive = ru.values()[[i, j]] + rv.values()[[i, j]];
                    naive_points += 1;
                    if naive.to_bits() != linear.to_bits() {
                        naive_mismatch += 1;
                    }
                    let tr = terms.transfer.values()[[i, j]].abs();
                    let scale = lin_u.abs() + lin_v.abs() + 2.0 * tr;
                    naive_bound_ok &= (naive - linear).abs() <= 4.0 * f64::EPSILON * scale;
                }
            }
            steps += 1;
            exact_steps += exact as usize;
        };
        check_state(&state);
        let mut s = state;
        for _ in 0..200 {
            s = integ.step(&s).unwrap().state;
            check_state(&s);
        }
    }
    check(
        exact_steps == steps && naive_bound_ok,
        format!(
            "telescoped sum bitwise equal to the linear part at {exact_steps}/{steps} steps; \
             unfactored fl(ru)+fl(rv) differs bitwise at {:.1}% of points, always within 4 ulp of the scale",
            100.0 * naive_mismatch as f64 / naive_points as f64
        ),
    )
}

fn gray_scott_twin_params(
    f: f64,
    k: f64,
    d1: f64,
    d2: f64,
    amp: f64,
) -> (ModelParams, ModelParams) {
    let params = preset_gray_scott(f, k, d1, d2).unwrap();
    let mut twin = params.with_forcing(
        ForcingSpec::constant_plus_decaying(f, vec![ModeTerm::new(0, 2, amp)], 0.01),
        ForcingSpec::zero(),
    );
    // P5 for the twin needs c1 ≥ sup g̃1
    twin.c1 = f + 2.0 * amp;
    twin.c2 = f / twin.c1;
    (params, twin)
}

fn gray_scott_initial(modes: usize) -> SimulationState {
    InitialCondition::Square {
        background: [1.0, 0.0],
        inside: [0.5, 0.25],
        center: [0.5, 0.5],
        half_width: 0.1,
        edge_width: 0.03,
    }
    .build(modes, 2 * modes)
    .unwrap()
}

fn c4_k_bound() -> Outcome {
    let (params, twin) = gray_scott_twin_params(0.04, 0.06, 2e-5, 1e-5, 1e-3);
    let cfg = IntegratorConfig {
        dt: 0.5,
        modes: 64,
        n_eval: 128,
        tol_pos: 1e-6,
        record_every: 1,
    };
    let runner = TwinRunner::new(&params, &twin, &cfg).unwrap();
    let ordering = ModeOrdering::new(64);
    let pairs = [(1, 1), (5, 5), (3, 12), (40, 40)];
    let evaluators: Vec<LemmaEvaluator> = pairs
        .iter()
        .map(|&(m, n)| LemmaEvaluator::new(&params, &ordering, 64, 128, m, n, None).unwrap())
        .collect();
    let mut series: Vec<ModeSplitSeries> = evaluators
        .iter()
        .map(|e| ModeSplitSeries::new(e.m(), e.n(), e.epsilon()))
        .collect();
    runner
        .run(&gray_scott_initial(64), 500.0, 2, |rec: &TwinRecord| {
            for (e, s) in evaluators.iter().zip(series.iter_mut()) {
                s.records.push(e.evaluate(rec)?);
            }
            Ok(())
        })
        .unwrap();
    let mut samples = 0;
    let mut violations = 0;
    let mut worst = 0.0f64;
    for (e, s) in evaluators.iter().zip(&series) {
        let ks = s.k_bound_samples(e);
        samples += ks.len();
        violations += s.k_bound_violations(e, 1e-8).len();
        worst = ks.iter().map(|k| k.lhs / k.rhs).fold(worst, f64::max);
    }
    check(
        violations == 0 && samples > 0,
        format!(
            "{violations} violations over {samples} samples for (M,N) in {pairs:?}; max lhs/rhs {worst:.3e}"
        ),
    )
}

/// Pointwise evaluation by direct summation over the basis.
fn eval_direct(f: &SpectralField, x: f64, y: f64) -> f64 {
    let mut s = 0.0;
    for k in 0..f.modes() {
        for l in 0..f.modes() {
            s += f.get(k, l) * basis_value(k, l, x, y);
        }
    }
    s
}

fn c5_k_quadrature() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let modes = 4;
    let ordering = ModeOrdering::new(8);
    let oracle_n = 24;
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let mut params = preset_gray_scott(0.04, 0.06, 1.0, 1.0).unwrap();
        params.a1 = rng.random_range(-2.0..2.0);
        params.a2 = rng.random_range(-2.0..2.0);
        params.b1 = rng.random_range(-2.0..2.0);
        params.b2 = rng.random_range(-2.0..2.0);
        params.gamma = rng.random_range(0.0..2.0);
        let m = rng.random_range(1..=6);
        let n = rng.random_range(1..=6);
        let ev = LemmaEvaluator::new(&params, &ordering, modes, 8, m, n, None).unwrap();
        let mut field = || SpectralField::random(modes, 0.5, &mut rng);
        let rec = TwinRecord {
            t: 0.0,
            step: 0,
            u: field(),
            v: field(),
            u_twin: field(),
            v_twin: field(),
            h1_l2: 0.0,
            h2_l2: 0.0,
        };
        let k = ev.compute_k(&rec).unwrap();

        let q_xi = rec.xi().project_high(m, &ordering).unwrap();
        let q_eta = rec.eta().project_high(n, &ordering).unwrap();
        let p = &params;
        let mut sum = 0.0;
        for i in 0..oracle_n {
            for j in 0..oracle_n {
                let (x, y) = (node(i, oracle_n), node(j, oracle_n));
                let qx = eval_direct(&q_xi, x, y);
                let qe = eval_direct(&q_eta, x, y);
                let v = eval_direct(&rec.v, x, y);
                let vt = eval_direct(&rec.v_twin, x, y);
                let ut = eval_direct(&rec.u_twin, x, y);
                let first = qx * (p.a1 - p.gamma * v * v) + qe * (p.b1 - p.gamma * (v + vt) * ut);
                let second = qx * (p.a2 + p.gamma * v * v) + qe * (p.b2 + p.gamma * (v + vt) * ut);
                sum -= first * qx + second * qe;
            }
        }
        let oracle = sum / (oracle_n * oracle_n) as f64;
        worst = worst.max((k - oracle).abs());
    }
    check(
        worst <= 1e-10,
        format!("max |K - oracle| = {worst:.3e} over 100 trials"),
    )
}

fn c6_gronwall() -> Outcome {
    let times: Vec<f64> = (0..=4000).map(|i| i as f64 * 0.01).collect();
    let alpha = vec![Some(1.0); times.len()];
    let x0 = 2.0;
    let mut total = 0;
    let mut applicable = true;
    for b in [0.0, 0.5] {
        let x: Vec<f64> = times.iter().map(|t| b + (x0 - b) * (-t).exp()).collect();
        let beta = vec![b; times.len()];
        let c = check_gronwall_samples(&times, &alpha, &beta, &x, 1.0, GronwallOptions::default())
            .unwrap();
        applicable &= c.is_applicable();
        total += c.violations().len();
    }
    check(
        applicable && total == 0,
        format!(
            "{total} envelope violations over {} samples (beta = 0 and 0.5)",
            2 * times.len()
        ),
    )
}

/// `d = 1`, `γ = 0`, `a1 = b2 = -1`, constant forcing `c` with
/// `c² + 2c + 4 = π²`, so `F = π²` and `Gr = 1`.
fn toy_model() -> (ModelParams, f64) {
    let c = -1.0 + (PI * PI - 3.0).sqrt();
    let mut p = pure_diffusion(1.0, 1.0);
    p.a1 = -1.0;
    p.b2 = -1.0;
    p.g1 = ForcingSpec::constant(c);
    p.c1 = c;
    p.c2 = 0.5 / c;
    (p, c)
}

fn c7_theorem() -> Outcome {
    let start = Instant::now();
    let (params, c) = toy_model();
    let report = compute_grashof(&params);
    let pair = report.minimal_MN.pair();
    if (report.Gr - 1.0).abs() > 1e-12 || pair != Some((1, 1)) {
        return Err(format!("Gr = {}, minimal (M,N) = {pair:?}", report.Gr));
    }
    let amp = 1e-3;
    let mut twin = params.with_forcing(
        ForcingSpec::mode_sum(
            vec![ModeTerm::new(0, 0, c)],
            vec![ModeTerm::new(0, 1, amp), ModeTerm::new(0, 2, amp)],
            0.01,
        ),
        ForcingSpec::zero(),
    );
    twin.c1 = c + 0.01;
    twin.c2 = 0.5 / twin.c1;
    let cfg = IntegratorConfig::new(0.05, 32);
    let runner = TwinRunner::new(&params, &twin, &cfg).unwrap();
    let ordering = ModeOrdering::new(32);
    let ev = LemmaEvaluator::new(&params, &ordering, 32, 64, 1, 1, None).unwrap();
    let init = InitialCondition::Noise {
        background: [1.0, 0.5],
        amplitude: 0.3,
        noise_modes: 6,
        seed: 7,
    }
    .build(32, 64)
    .unwrap();
    let series = run_twin_series(&runner, &ev, &init, 2000.0, 100).unwrap();
    let verdict = series.verdict(1e-6, 1e-6, DEFAULT_TAIL_FRACTION).unwrap();
    let secs = start.elapsed().as_secs_f64();
    check(
        verdict.verdict == DeterminingOutcome::DeterminingObserved
            && verdict.q_sum_tail <= 1e-6
            && secs < 120.0,
        format!(
            "Gr = {:.15}, (M,N) = (1,1), verdict {:?}, tail P-sum {:.3e}, tail Q-sum {:.3e}",
            report.Gr, verdict.verdict, verdict.p_sum_tail, verdict.q_sum_tail
        ),
    )
}

fn c8_time_average() -> Outcome {
    let params = preset_brusselator(1.0, 2.0, 1.0, 1.0).unwrap();
    // ordering large enough for a pair with λ_{M+1} + λ_{N+1} ≥ 2 λ₁ threshold
    let ordering = ModeOrdering::new(720);
    let report = compute_grashof_with(&params, &ordering, ModeStrategy::Balanced);
    let target = report.threshold_lambda;
    let rank = ordering
        .iter()
        .position(|w| w.eigenvalue() >= target)
        .ok_or_else(|| format!("no eigenvalue above {target:.3e} in the ordering"))?;
    // rank is 0-based, so λ_{M+1} = ordering[rank] for M = rank
    let m = rank.max(1);
    let t_min = minimal_t(&report, m, m, &ordering).ok_or("minimal T not applicable")?;
    let window = 2.0 * t_min;

    let integ = Integrator::new(&params, &IntegratorConfig::new(1e-3, 4)).unwrap();
    let norms = NormEvaluator::new(4).unwrap();
    let init = InitialCondition::Homogeneous { u: 1.5, v: 1.2 }
        .build(4, 8)
        .unwrap();
    let (mut times, mut u_l4, mut v_l4) = (vec![0.0], vec![1.5], vec![1.2]);
    integ
        .run(init, 500.0, |s| {
            if s.step % 10 == 0 {
                times.push(s.t);
                u_l4.push(norms.norm(&s.u, NormOrder::L4)?);
                v_l4.push(norms.norm(&s.v, NormOrder::L4)?);
            }
            Ok(())
        })
        .unwrap();
    let c = verify_time_average_bounds(
        &times,
        &u_l4,
        &v_l4,
        window,
        &report,
        DEFAULT_BURN_IN_FRACTION,
    )
    .unwrap();
    check(
        c.holds,
        format!(
            "Gr = {:.4}, (M,N) = ({m},{m}), T = {window:.4e}; lhs_u = {:.4e}, lhs_v = {:.4e}, rhs = {:.4e}, margins {:.4e} / {:.4e}",
            report.Gr, c.lhs_u, c.lhs_v, c.rhs, c.margin_u, c.margin_v
        ),
    )
}

fn c9_grashof() -> Outcome {
    let rel = |a: f64, b: f64| {
        if b == 0.0 {
            a.abs()
        } else {
            ((a - b) / b).abs()
        }
    };
    let mut zero = pure_diffusion(1.0, 1.0);
    zero.c1 = 0.0;
    let r0 = compute_grashof(&zero);
    let ok0 = r0.F == 0.0 && r0.Gr == 0.0 && r0.threshold_rhs == 0.0;

    let mut ten = pure_diffusion(1.0, 1.0);
    ten.c1 = 5.0; // F = c1 + B2 = 10
    let r1 = compute_grashof(&ten);
    let e1 = rel(r1.Gr, 1.013_211_836_423_377_7);
    let exact_reduction = r1.threshold_rhs == r1.Gr;

    let gs = preset_gray_scott(0.04, 0.06, 2e-5, 1e-5).unwrap();
    let r2 = compute_grashof(&gs);
    let e2 = [
        rel(r2.A2, 0.14),
        rel(r2.B2, 0.04),
        rel(r2.g1_star, 0.0016),
        rel(r2.F, 0.1012),
        rel(r2.Gr, 102_537_037.846_045_82),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    check(
        ok0 && e1 <= 1e-12 && e2 <= 1e-12 && exact_reduction,
        format!(
            "zero case exact: {ok0}; Gr(F=10) rel err {e1:.1e}; Gray-Scott max rel err {e2:.1e}; \
             gamma = 0 threshold equals Gr: {exact_reduction}"
        ),
    )
}

fn c10_determinism() -> Outcome {
    let params = preset_gray_scott(0.04, 0.06, 2e-4, 1e-4).unwrap();
    let cfg = IntegratorConfig::new(0.5, 16);
    let integ = Integrator::new(&params, &cfg).unwrap();
    let init = gray_scott_initial(16);
    let full = integ.run(init.clone(), 200.0, |_| Ok(())).unwrap().state;
    let again = integ.run(init.clone(), 200.0, |_| Ok(())).unwrap().state;

    let half = integ.run(init, 100.0, |_| Ok(())).unwrap().state;
    let mut bytes = Vec::new();
    save_checkpoint(&mut bytes, &half, cfg.n_eval).unwrap();
    let (restored, _) = load_checkpoint(&bytes[..]).unwrap();
    let resumed = integ.run(restored, 200.0, |_| Ok(())).unwrap().state;

    let bits = |s: &SimulationState| -> Vec<u64> {
        s.u.coeffs()
            .iter()
            .chain(s.v.coeffs().iter())
            .map(|x| x.to_bits())
            .chain([s.t.to_bits(), s.step])
            .collect()
    };

    let (twin_params, twin) = gray_scott_twin_params(0.04, 0.06, 2e-4, 1e-4, 1e-3);
    let csv = || {
        let runner = TwinRunner::new(&twin_params, &twin, &cfg).unwrap();
        let ordering = ModeOrdering::new(16);
        let ev = LemmaEvaluator::new(&twin_params, &ordering, 16, 32, 2, 2, None).unwrap();
        let series = run_twin_series(&runner, &ev, &gray_scott_initial(16), 50.0, 5).unwrap();
        let mut out = Vec::new();
        series
            .write_csv(&mut out, twin_params.min_diffusion())
            .unwrap();
        out
    };
    let same_run = bits(&full) == bits(&again);
    let same_resume = bits(&full) == bits(&resumed);
    let same_csv = csv() == csv();
    check(
        same_run && same_resume && same_csv,
        format!(
            "re-run bit-identical: {same_run}; resume bit-identical: {same_resume}; series CSV byte-identical: {same_csv}"
        ),
    )
}
