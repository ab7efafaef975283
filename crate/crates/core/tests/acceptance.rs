//! Acceptance suite. Prints one PASS/FAIL line per check and exits non-zero
//! if any check fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use su12_core::fock::{compare_with_gaussian, OracleCase, DEFAULT_CUTOFF};
use su12_core::gaussian::{estimator_stats, moments_through, photon_statistics};
use su12_core::interferometer::{
    total_photon_number, total_transform, vacuum_photon_number, InputState, InterferometerConfig, PhaseShifts,
};
use su12_core::lie::{commutator_table, group_element, verify};
use su12_core::optimizer::{
    optimal_ratio_surface, optimize_weights, scaling_curve, Axis, InputKind, Sweep, WeightSearchSpec,
};
use su12_core::sensitivity::{
    heisenberg_asymptote, phase_sensitivity, su11_sensitivity, sum_estimator_zero_phase_limit, zero_phase_limit,
    DetectorWeights, SensitivityError,
};
use su12_core::C64;

struct Check {
    criterion: u8,
    name: &'static str,
    passed: bool,
    detail: String,
}

fn check(criterion: u8, name: &'static str, passed: bool, detail: String) -> Check {
    Check { criterion, name, passed, detail }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn random_config(rng: &mut ChaCha8Rng, max_beta: f64) -> InterferometerConfig {
    let betas: [f64; 4] = std::array::from_fn(|_| rng.gen_range(0.0..=max_beta));
    let thetas: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-PI..PI));
    let phases = PhaseShifts::new(rng.gen_range(-PI..PI), rng.gen_range(-PI..PI), rng.gen_range(-PI..PI));
    InterferometerConfig::new(betas, thetas, phases)
}

fn random_input(rng: &mut ChaCha8Rng, max_abs: f64) -> InputState {
    let alpha = std::array::from_fn(|_| C64::from_polar(rng.gen_range(0.0..=max_abs), rng.gen_range(-PI..PI)));
    InputState { alpha }
}

fn group_structure() -> Vec<Check> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let a: [f64; 8] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let b: [f64; 8] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        worst = worst.max((group_element(&a) * group_element(&b)).membership_defect());
    }
    let table = commutator_table();
    let report = verify(&table);
    let brackets: Vec<_> = report.iter().filter(|c| c.name.starts_with("bracket")).collect();
    let bracket_ok = brackets.len() == 28 && brackets.iter().all(|c| c.passed);
    let ad = report.iter().find(|c| c.name.starts_with("ad K1")).expect("ad K1 check present");
    let elapsed = start.elapsed().as_secs_f64();
    vec![
        check(1, "10^4 random products are pseudo-unitary", worst <= 1e-9, format!("max |JS†JS - I| = {worst:.2e}")),
        check(
            1,
            "28 commutators match the structure table",
            bracket_ok,
            format!("{} of {} bracket checks pass", brackets.iter().filter(|c| c.passed).count(), brackets.len()),
        ),
        check(1, "ad K1 matches the tabulated matrix", ad.passed, ad.detail.clone()),
        check(1, "runtime under 10 s", elapsed < 10.0, format!("{elapsed:.3} s")),
    ]
}

fn closed_forms() -> Vec<Check> {
    let start = Instant::now();
    let cfg = InterferometerConfig::balanced(3.0, 3.0);
    let vac = InputState::vacuum();
    let closed = sum_estimator_zero_phase_limit(3.0, 3.0).unwrap();
    let asymptote = heisenberg_asymptote(3.0, 3.0);
    let n12_n14 = zero_phase_limit(1, &cfg, &vac, &DetectorWeights::new(1.0, 0.0, 1.0)).unwrap().delta_phi;
    let n12_n13 = zero_phase_limit(1, &cfg, &vac, &DetectorWeights::new(1.0, 1.0, 0.0)).unwrap().delta_phi;
    let ratio5 = sum_estimator_zero_phase_limit(5.0, 5.0).unwrap() / heisenberg_asymptote(5.0, 5.0);
    let elapsed = start.elapsed().as_secs_f64();
    vec![
        check(
            2,
            "w=(1,0,1) zero-phase limit equals the sum-estimator closed form",
            rel(n12_n14, closed) <= 1e-4,
            format!("pipeline {n12_n14:.7} vs closed form {closed:.7} (rel {:.2e})", rel(n12_n14, closed)),
        ),
        check(
            2,
            "w=(1,1,0) zero-phase limit equals the sum-estimator closed form",
            rel(n12_n13, closed) <= 1e-4,
            format!("pipeline {n12_n13:.7} vs closed form {closed:.7} (rel {:.2e})", rel(n12_n13, closed)),
        ),
        check(
            2,
            "w=(1,0,1) zero-phase limit within 20% of 2/(cosh b1 cosh b2)",
            rel(n12_n14, asymptote) <= 0.2,
            format!("{n12_n14:.7} vs {asymptote:.7} (rel {:.3})", rel(n12_n14, asymptote)),
        ),
        check(
            2,
            "closed form over asymptote at b1=b2=5 within 5% of 1",
            (ratio5 - 1.0).abs() <= 0.05,
            format!("ratio {ratio5:.5}"),
        ),
        check(2, "runtime under 1 s", elapsed < 1.0, format!("{elapsed:.4} s")),
    ]
}

fn photon_number() -> Vec<Check> {
    let mut worst = 0.0f64;
    let gains: Vec<f64> = (1..=10).map(|k| 0.5 * k as f64).collect();
    for &b1 in &gains {
        for &b2 in &gains {
            let cfg = InterferometerConfig::balanced(b1, b2);
            let n = total_photon_number(&cfg, &InputState::vacuum());
            worst = worst.max(rel(n, vacuum_photon_number(b1, b2)));
        }
    }
    vec![check(
        3,
        "vacuum N_total equals the closed form on the 10x10 gain grid",
        worst <= 1e-10,
        format!("max relative deviation {worst:.2e}"),
    )]
}

fn optimal_weights() -> Vec<Check> {
    let spec = WeightSearchSpec::default();
    let cfg = InterferometerConfig::balanced(3.0, 3.0);
    let opt = optimize_weights(1, &cfg, &InputState::vacuum(), &spec).unwrap();
    let (t, r) = (opt.ratios[0], opt.ratios[1]);
    let step = opt.final_step;
    let hit = (t - 0.0).abs() <= step && (r - 1.0).abs() <= step;
    let at_target =
        zero_phase_limit(1, &cfg, &InputState::vacuum(), &DetectorWeights::new(1.0, 0.0, 1.0)).unwrap().delta_phi;
    vec![
        check(4, "final grid step at most 0.01", step <= 0.01, format!("step {step}")),
        check(
            4,
            "vacuum b1=b2=3 optimum at (t/s, r/s) = (0, 1)",
            hit,
            format!(
                "found ({t:.5}, {r:.5}) with dphi1 {:.7}; (0, 1) gives {at_target:.7}",
                opt.report.delta_phi
            ),
        ),
    ]
}

fn heisenberg_scaling() -> Vec<Check> {
    let spec = WeightSearchSpec::default();
    let gains = Axis::new(2.5, 5.0, 11);
    let mut out = Vec::new();
    for (label, sweep) in [
        ("slope with b1=3, b2 swept in [2.5, 5]", Sweep::FixBeta1(3.0)),
        ("slope with b2=3, b1 swept in [2.5, 5]", Sweep::FixBeta2(3.0)),
    ] {
        let curve = scaling_curve(InputKind::Vacuum, sweep, &gains, &spec).unwrap();
        let slope = curve.slope_dphi1(2.5, 5.0).unwrap();
        out.push(check(5, label, (-1.1..=-0.9).contains(&slope), format!("slope {slope:.4}")));
    }
    let mut worst = 0.0f64;
    let mut all = true;
    for k in 2..=10 {
        let b = 0.5 * k as f64;
        let cfg = InterferometerConfig::balanced(b, b);
        let d = optimize_weights(1, &cfg, &InputState::vacuum(), &spec).unwrap().report.delta_phi;
        let su11 = su11_sensitivity(b).unwrap();
        all &= d < su11;
        worst = worst.max(d / su11);
    }
    out.push(check(
        5,
        "optimal dphi1 below 1/sinh b for b in [1, 5]",
        all,
        format!("largest ratio to 1/sinh b: {worst:.4}"),
    ));
    out
}

fn coherent_inputs() -> Vec<Check> {
    let spec = WeightSearchSpec::default();
    let mut out = Vec::new();

    let cfg = InterferometerConfig::balanced(3.0, 3.0);
    let port1 = InputState::coherent(1, C64::new(5.0, 0.0));
    let diverges = [DetectorWeights::new(1.0, 0.0, 0.0), DetectorWeights::new(1.0, 1.0, 1.0), DetectorWeights::new(1.0, 0.0, 1.0)]
        .iter()
        .all(|w| matches!(phase_sensitivity(1, &cfg, &port1, w), Err(SensitivityError::Divergent { .. })));
    out.push(check(6, "coherent port 1 with s != 0 diverges at zero phases", diverges, "w = (1,0,0), (1,1,1), (1,0,1)".into()));

    let corner = optimal_ratio_surface(1, 3.0, &Axis::new(5.0, 5.0, 1), &Axis::new(0.5, 0.5, 1), &spec).unwrap();
    let r_over_t = corner.values[0];
    out.push(check(
        6,
        "port 1 optimal r/t within 0.05 of 1 at b2=5, |alpha|=0.5",
        (r_over_t - 1.0).abs() <= 0.05,
        format!("r/t = {r_over_t:.5}"),
    ));

    let far = optimal_ratio_surface(1, 3.0, &Axis::new(0.5, 0.5, 1), &Axis::new(10.0, 10.0, 1), &spec).unwrap();
    out.push(check(
        6,
        "port 1 optimal r/t above 1 at b2=0.5, |alpha|=10 (shape)",
        far.values[0] > 1.0,
        format!("r/t = {:.5}", far.values[0]),
    ));

    let mut wins = 0;
    let mut wins_per_photon = 0;
    let mut worst = 0.0f64;
    let gains = [1.0, 2.0, 3.0, 4.0, 5.0];
    let amps = [0.5, 1.0, 2.0, 5.0, 10.0];
    for &b in &gains {
        for &a in &amps {
            let cfg = InterferometerConfig::balanced(b, b);
            let best = |port: usize| {
                let input = InputState::coherent(port, C64::new(a, 0.0));
                let d = optimize_weights(1, &cfg, &input, &spec.with_fixed_zero(port)).unwrap().report.delta_phi;
                (d, d * total_photon_number(&cfg, &input))
            };
            let ((p1, p1n), (p3, p3n)) = (best(1), best(3));
            wins += usize::from(p3 <= p1);
            wins_per_photon += usize::from(p3n <= p1n);
            worst = worst.max(p3 / p1);
        }
    }
    out.push(check(
        6,
        "port 3 dphi1 <= port 1 dphi1 on the 5x5 (b1=b2, |alpha|) grid",
        wins == 25,
        format!("{wins}/25 cells; largest port3/port1 ratio {worst:.4}"),
    ));
    out.push(check(
        6,
        "port 3 dphi1*N_total <= port 1 dphi1*N_total on the same grid",
        wins_per_photon == 25,
        format!("{wins_per_photon}/25 cells"),
    ));

    let port3 = InputKind::Coherent { port: 3, amplitude: 5.0 };
    let curve = scaling_curve(port3, Sweep::Diagonal, &Axis::new(5.0, 8.0, 7), &spec).unwrap();
    let slope = curve.slope_dphi1(5.0, 8.0).unwrap();
    out.push(check(
        6,
        "port 3 (|alpha|=5, b1=b2 in [5, 8]) log-log slope within 0.1 of -1",
        (slope + 1.0).abs() <= 0.1,
        format!("slope {slope:.4}"),
    ));
    out
}

fn oracle_equivalence() -> Vec<Check> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cases: Vec<OracleCase> = (0..50)
        .map(|_| {
            let cfg = random_config(&mut rng, 0.5);
            let port = rng.gen_range(1..=3);
            let input = InputState::coherent(port, C64::from_polar(rng.gen_range(0.0..=0.7), rng.gen_range(-PI..PI)));
            let weights = DetectorWeights::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            OracleCase { cfg, input, weights, phase_index: rng.gen_range(1..=3) }
        })
        .collect();
    let dev = compare_with_gaussian(&cases, DEFAULT_CUTOFF).expect("oracle stays inside the cutoff");
    let elapsed = start.elapsed().as_secs_f64();
    let mut out: Vec<Check> = dev.rows()[..4]
        .iter()
        .map(|(name, v)| {
            let label: &'static str = match *name {
                "mean" => "photon means agree to 1e-6",
                "covariance" => "photon covariances agree to 1e-6",
                "estimator_variance" => "estimator variances agree to 1e-6",
                _ => "phase derivatives agree to 1e-6",
            };
            check(7, label, *v <= 1e-6, format!("max deviation {v:.2e} over {} configs", dev.cases))
        })
        .collect();
    out.push(check(
        7,
        "vacuum <dK_i^2> = 1/4 for i = 1..4",
        dev.vacuum_k_variance <= 1e-9,
        format!("max deviation {:.2e}", dev.vacuum_k_variance),
    ));
    out.push(check(7, "runtime under 2 min", elapsed < 120.0, format!("{elapsed:.2} s")));
    out
}

fn conservation() -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let conserved = DetectorWeights::new(1.0, -1.0, -1.0);
    let mut worst_mean = 0.0f64;
    for _ in 0..1000 {
        let cfg = random_config(&mut rng, 2.0);
        let input = random_input(&mut rng, 2.0);
        let out = photon_statistics(&moments_through(&total_transform(&cfg), &input));
        let i = input.intensities();
        let before = i[0] - i[1] - i[2];
        let after = out.mean[0] - out.mean[1] - out.mean[2];
        worst_mean = worst_mean.max((after - before).abs());
    }
    let mut worst_var = 0.0f64;
    for _ in 0..100 {
        let cfg = random_config(&mut rng, 3.0);
        let ps = photon_statistics(&moments_through(&total_transform(&cfg), &InputState::vacuum()));
        worst_var = worst_var.max(estimator_stats(&ps, &conserved).variance.abs());
    }
    vec![
        check(
            8,
            "<n1-n2-n3> preserved through 10^3 random circuits",
            worst_mean <= 1e-9,
            format!("max drift {worst_mean:.2e}"),
        ),
        check(
            8,
            "vacuum variance of n1-n2-n3 vanishes",
            worst_var <= 1e-10,
            format!("max variance {worst_var:.2e}"),
        ),
    ]
}

fn main() -> ExitCode {
    let suites: [fn() -> Vec<Check>; 8] = [
        group_structure,
        closed_forms,
        photon_number,
        optimal_weights,
        heisenberg_scaling,
        coherent_inputs,
        oracle_equivalence,
        conservation,
    ];
    let mut failed = 0;
    let mut total = 0;
    for suite in suites {
        for c in suite() {
            total += 1;
            if !c.passed {
                failed += 1;
            }
            println!(
                "{} criterion {}: {}: {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.criterion,
                c.name,
                c.detail
            );
        }
    }
    println!("acceptance: {} of {total} checks passed", total - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
