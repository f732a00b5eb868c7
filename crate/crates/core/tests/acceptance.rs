//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use blockade::lindblad::{
    evolve, model_liouvillian, photon_stats, steady_state_with_report, DensityMatrix, PhotonStats,
    STEADY_STATE_RESIDUAL,
};
use blockade::linop::eig_hermitian;
use blockade::model::{
    analytic_spectrum, build_h_ddjc, resonance_detuning, Atom, FockTruncation, ModelParams,
    ResonanceLabel,
};
use blockade::sweep::{
    evaluate_point, g2_series, local_maxima, local_minima, nearest, refine_omega_minimum,
    run_detuning_sweep, run_fidelity_sweep, run_omega_sweep, write_fidelity_csv, write_sweep_csv,
    Axis, SweepKind, SweepSpec,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn trunc(n: usize) -> FockTruncation {
    FockTruncation::new(n).unwrap()
}

/// The working point on the d2 resonance.
fn working_point() -> ModelParams {
    let mut p = ModelParams::default();
    p.delta_c = resonance_detuning(&p, ResonanceLabel::D2).unwrap();
    p.delta_c_prime = p.delta_c;
    p
}

fn solve(p: &ModelParams, n: usize) -> (DensityMatrix, PhotonStats, f64) {
    let l = model_liouvillian(p, trunc(n)).unwrap();
    let (rho, report) = steady_state_with_report(&l).unwrap();
    let stats = photon_stats(&rho).unwrap();
    (rho, stats, report.raw_residual.max(report.residual))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn spectrum_match() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0001);
    let t = trunc(6);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let p = ModelParams {
            chi: rng.random_range(1.0..=30.0),
            omega_r: rng.random_range(0.0..=100.0),
            delta_0: rng.random_range(-20.0..=20.0),
            delta_c_prime: rng.random_range(-50.0..=50.0),
            ..ModelParams::zeroed()
        };
        let numeric = eig_hermitian(&build_h_ddjc(&p, t)).unwrap().values;
        let mut analytic: Vec<f64> = analytic_spectrum(&p, 6).iter().map(|e| e.energy).collect();
        analytic.sort_by(f64::total_cmp);
        for (a, b) in numeric.iter().zip(&analytic) {
            worst = worst.max((a - b).abs());
        }
    }
    outcome(
        worst <= 1e-9,
        format!("max |E_num - E_closed| = {worst:.2e} (tol 1e-9, 20 sets)"),
    )
}

fn coherent_oracle() -> Outcome {
    let mut worst_n: f64 = 0.0;
    let mut worst_g2: f64 = 0.0;
    let mut worst_p: f64 = 0.0;
    for delta_c in [-2.0, 0.0, 2.0] {
        let p = ModelParams {
            delta_c,
            delta_c_prime: delta_c,
            eta: 0.1,
            gamma: 0.5,
            ..ModelParams::zeroed()
        };
        let (rho, stats, _) = solve(&p, FockTruncation::DEFAULT_N_MAX);
        let n_bar = p.eta * p.eta / (delta_c * delta_c + 0.25);
        worst_n = worst_n.max((stats.mean_n - n_bar).abs());
        worst_g2 = worst_g2.max((stats.g2.unwrap() - 1.0).abs());
        let mut poisson = (-n_bar).exp();
        for n in 0..=FockTruncation::DEFAULT_N_MAX {
            if n > 0 {
                poisson *= n_bar / n as f64;
            }
            let pn = blockade::lindblad::photon_number_dist(&rho, n).unwrap();
            worst_p = worst_p.max((pn - poisson).abs());
        }
    }
    outcome(
        worst_n < 1e-8 && worst_g2 < 1e-6 && worst_p < 1e-8,
        format!("|<n> - n_coh| = {worst_n:.2e}, |g2 - 1| = {worst_g2:.2e}, |P_n - Poisson| = {worst_p:.2e}"),
    )
}

fn steady_state_consistency() -> Outcome {
    let p = working_point();
    let t = trunc(FockTruncation::DEFAULT_N_MAX);
    let l = model_liouvillian(&p, t).unwrap();
    let (rho, report) = steady_state_with_report(&l).unwrap();
    let m = rho.matrix();
    let trace_err = (m.trace() - 1.0).norm();
    let herm = m.hermiticity_error();
    let min_eig = report.min_eigenvalue;
    let residual = l.relative_residual(&rho);

    let start = DensityMatrix::basis_state(t, Atom::Ground, 0);
    let dt = 0.1 / l.norm();
    let late = evolve(&l, &start, 40.0, dt).unwrap();
    let distance = late.trace_distance(&rho).unwrap();
    outcome(
        residual <= STEADY_STATE_RESIDUAL
            && report.within_bound()
            && trace_err <= 1e-9
            && herm <= 1e-9
            && min_eig >= -1e-8
            && distance <= 1e-4,
        format!(
            "residual {residual:.2e}, |tr-1| {trace_err:.1e}, herm {herm:.1e}, min eig {min_eig:.1e}, \
             ||rho(40) - rho_ss||_1 = {distance:.2e}"
        ),
    )
}

struct DetuningScan {
    dips: Vec<f64>,
    outcome: Outcome,
}

fn detuning_structure() -> DetuningScan {
    let spec = SweepSpec::defaults(SweepKind::Detuning);
    let rows = run_detuning_sweep(&spec).unwrap();
    let (xs, ys) = g2_series(&rows);
    let minima = local_minima(&xs, &ys);
    let maxima = local_maxima(&xs, &ys);
    let p = ModelParams::default();
    let mut pass = true;
    let mut parts = Vec::new();
    let mut dips = Vec::new();
    let mut deepest = f64::INFINITY;
    for label in [
        ResonanceLabel::D1,
        ResonanceLabel::D3,
        ResonanceLabel::D2,
        ResonanceLabel::D4,
    ] {
        let target = resonance_detuning(&p, label).unwrap();
        match nearest(&minima, target) {
            Some(m) => {
                let off = (m.x - target).abs();
                pass &= off <= 0.2 && m.y < 1.0;
                deepest = deepest.min(m.y);
                dips.push(m.x);
                parts.push(format!("{label} {:+.3} (g2 {:.3})", m.x, m.y));
            }
            None => {
                pass = false;
                parts.push(format!("{label} missing"));
            }
        }
    }
    pass &= deepest < 0.5;
    for label in [
        ResonanceLabel::P1,
        ResonanceLabel::P3,
        ResonanceLabel::P2,
        ResonanceLabel::P4,
    ] {
        let target = resonance_detuning(&p, label).unwrap();
        match nearest(&maxima, target) {
            Some(m) => {
                pass &= (m.x - target).abs() <= 0.5 && m.y > 1.0;
                parts.push(format!("{label} {:+.3} (g2 {:.2})", m.x, m.y));
            }
            None => {
                pass = false;
                parts.push(format!("{label} missing"));
            }
        }
    }
    let all_rows_ok = rows
        .iter()
        .all(|r| r.stats.is_some() && !r.flag.is_failure());
    pass &= all_rows_ok;
    DetuningScan {
        dips,
        outcome: outcome(
            pass,
            format!("{}; deepest dip {deepest:.3}", parts.join(", ")),
        ),
    }
}

fn weak_drive(stats: &PhotonStats) -> Outcome {
    let g2 = stats.g2.unwrap();
    let est = stats.g2_weak.unwrap();
    let r = (g2 - est).abs() / g2;
    outcome(
        r < 0.05 && stats.p0 > 0.95 && 0.95 > stats.p1 && stats.p1 > stats.p2,
        format!(
            "g2 {g2:.5}, 2P2/P1^2 {est:.5}, rel diff {r:.2e}; P0 {:.4}, P1 {:.2e}, P2 {:.2e}",
            stats.p0, stats.p1, stats.p2
        ),
    )
}

fn omega_structure() -> Outcome {
    let spec = SweepSpec::defaults(SweepKind::OmegaRatio);
    let rows = run_omega_sweep(&spec).unwrap();
    let best = refine_omega_minimum(&spec, &rows, 1e-4).unwrap();
    let small = evaluate_point(&spec, 1e-3).g2().unwrap();
    let large = evaluate_point(&spec, 1e2).g2().unwrap();
    outcome(
        (1.0..=3.0).contains(&best) && (small - 1.0).abs() < 0.05 && (large - 1.0).abs() < 0.1,
        format!("argmin Omega/chi = {best:.4}, g2(1e-3) = {small:.4}, g2(1e2) = {large:.4}"),
    )
}

fn coupling_trend() -> Outcome {
    let spec = SweepSpec::defaults(SweepKind::ChiRatio);
    let strong = evaluate_point(&spec, 30.0).g2().unwrap();
    let weak = evaluate_point(&spec, 2.0).g2().unwrap();
    outcome(
        strong < weak,
        format!("g2(chi=30) = {strong:.4} < g2(chi=2) = {weak:.4}"),
    )
}

fn fidelity_trend() -> Outcome {
    let spec = SweepSpec::defaults(SweepKind::Fidelity);
    let (rows, drift) = run_fidelity_sweep(&spec).unwrap();
    let mut min_f: BTreeMap<u64, (f64, f64)> = BTreeMap::new();
    let mut f0_ok = true;
    for r in &rows {
        if r.chi_t == 0.0 {
            f0_ok &= (r.fidelity - 1.0).abs() <= 1e-14;
        }
        let e = min_f
            .entry(r.g_over_delta.to_bits())
            .or_insert((r.g_over_delta, f64::INFINITY));
        e.1 = e.1.min(r.fidelity);
    }
    // Keys are positive f64 bit patterns, so the map is ordered by g/Δ.
    let mins: Vec<(f64, f64)> = min_f.into_values().collect();
    let increasing = mins.windows(2).all(|w| w[0].1 > w[1].1);
    let text: Vec<String> = mins.iter().map(|(r, f)| format!("{r}: {f:.5}")).collect();
    outcome(
        f0_ok && increasing && mins.len() == 4 && drift <= 1e-7,
        format!(
            "min F by g/Delta {{{}}}, norm drift {drift:.1e}",
            text.join(", ")
        ),
    )
}

fn truncation_robustness(dips: &[f64]) -> Outcome {
    let p = working_point();
    let (_, s12, _) = solve(&p, 12);
    let (rho16, s16, res16) = solve(&p, 16);
    let mut worst = rel(s16.g2.unwrap(), s12.g2.unwrap());
    let weak16 = weak_drive(&s16);
    let consistent16 = res16 <= STEADY_STATE_RESIDUAL && rho16.min_eigenvalue().unwrap() >= -1e-8;
    for &x in dips {
        let q = ModelParams {
            delta_c: x,
            delta_c_prime: x,
            ..ModelParams::default()
        };
        let (_, a, _) = solve(&q, 12);
        let (_, b, _) = solve(&q, 16);
        worst = worst.max(rel(b.g2.unwrap(), a.g2.unwrap()));
    }
    outcome(
        worst < 1e-4 && weak16.pass && consistent16 && dips.len() == 4,
        format!("max relative g2 shift N=12 -> 16: {worst:.2e} (working point and four dips)"),
    )
}

fn determinism() -> Outcome {
    let mut spec = SweepSpec::defaults(SweepKind::Detuning);
    spec.axis = Axis::linear(-12.0, 12.0, 49);
    let csv = |spec: &SweepSpec| {
        let mut buf = Vec::new();
        write_sweep_csv(&run_detuning_sweep(spec).unwrap(), &mut buf).unwrap();
        buf
    };
    let first = csv(&spec);
    let second = csv(&spec);
    spec.parallel = false;
    let serial = csv(&spec);

    let mut fspec = SweepSpec::defaults(SweepKind::Fidelity);
    fspec.g_over_delta = vec![0.3, 0.2];
    fspec.axis = Axis::linear(0.0, 2.0, 21);
    let fcsv = |spec: &SweepSpec| {
        let mut buf = Vec::new();
        write_fidelity_csv(&run_fidelity_sweep(spec).unwrap().0, &mut buf).unwrap();
        buf
    };
    let f_par = fcsv(&fspec);
    fspec.parallel = false;
    let f_ser = fcsv(&fspec);
    outcome(
        first == second && first == serial && f_par == f_ser,
        format!(
            "{} + {} CSV bytes, repeat and serial runs identical",
            first.len(),
            f_par.len()
        ),
    )
}

fn main() -> ExitCode {
    let mut results: Vec<(u32, &str, Outcome, f64)> = Vec::new();
    let mut timed = |id: u32, name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let t0 = Instant::now();
        let o = f();
        results.push((id, name, o, t0.elapsed().as_secs_f64()));
        let (id, name, o, secs) = results.last().unwrap();
        println!(
            "criterion {id:>2} {} {name}: {} [{secs:.1}s]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    };

    timed(1, "spectrum match", &mut spectrum_match);
    timed(2, "coherent-state oracle", &mut coherent_oracle);
    timed(
        3,
        "steady-state self-consistency",
        &mut steady_state_consistency,
    );
    let mut dips = Vec::new();
    timed(4, "detuning structure", &mut || {
        let f = detuning_structure();
        dips = f.dips;
        f.outcome
    });
    timed(5, "weak-drive identity", &mut || {
        weak_drive(&solve(&working_point(), 12).1)
    });
    timed(6, "omega-ratio structure", &mut omega_structure);
    timed(7, "coupling-strength trend", &mut coupling_trend);
    timed(8, "fidelity trend", &mut fidelity_trend);
    timed(9, "truncation robustness", &mut || {
        truncation_robustness(&dips)
    });
    timed(10, "determinism", &mut determinism);

    let failed = results.iter().filter(|r| !r.2.pass).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
