//! Parameter sweeps over the steady state and the validity experiment, with
//! CSV output.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lindblad::{model_liouvillian, photon_stats, steady_state_with_report, PhotonStats};
use crate::linop::C64;
use crate::model::{resonance_detunings, FockTruncation, ModelParams, Resonance, ResonanceLabel};
use crate::validity::{
    coherent_initial_state, default_step, fidelity_curve, DerivKind, ValidityParams,
};

/// What the sweep axis controls.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepKind {
    /// Δ_c / κ.
    Detuning,
    /// Ω_R / χ, with Δ_c pinned to a resonance.
    OmegaRatio,
    /// χ / κ, with Δ_c pinned to a resonance.
    ChiRatio,
    /// χ t for the fidelity experiment.
    Fidelity,
}

impl SweepKind {
    pub fn name(self) -> &'static str {
        match self {
            SweepKind::Detuning => "detuning",
            SweepKind::OmegaRatio => "omega_ratio",
            SweepKind::ChiRatio => "chi_ratio",
            SweepKind::Fidelity => "fidelity",
        }
    }
}

impl fmt::Display for SweepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "detuning" => Ok(SweepKind::Detuning),
            "omega_ratio" | "omega" => Ok(SweepKind::OmegaRatio),
            "chi_ratio" | "chi" => Ok(SweepKind::ChiRatio),
            "fidelity" => Ok(SweepKind::Fidelity),
            other => Err(Error::InvalidParameter(format!(
                "unknown sweep kind '{other}'"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

impl FromStr for Spacing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "linear" | "lin" => Ok(Spacing::Linear),
            "log" => Ok(Spacing::Log),
            other => Err(Error::InvalidParameter(format!(
                "unknown spacing '{other}'"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl Axis {
    pub fn linear(start: f64, stop: f64, points: usize) -> Self {
        Self {
            start,
            stop,
            points,
            spacing: Spacing::Linear,
        }
    }

    pub fn log(start: f64, stop: f64, points: usize) -> Self {
        Self {
            start,
            stop,
            points,
            spacing: Spacing::Log,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < 2 {
            return Err(Error::InvalidParameter(format!(
                "axis needs at least 2 points, got {}",
                self.points
            )));
        }
        if !(self.start < self.stop) || !self.start.is_finite() || !self.stop.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "axis needs finite start < stop, got {} .. {}",
                self.start, self.stop
            )));
        }
        if self.spacing == Spacing::Log && !(self.start > 0.0) {
            return Err(Error::InvalidParameter("log axis needs start > 0".into()));
        }
        Ok(())
    }

    /// Grid values; the endpoints are exact.
    pub fn values(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|k| {
                if k + 1 == self.points {
                    return self.stop;
                }
                let f = k as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.start + (self.stop - self.start) * f,
                    Spacing::Log => self.start * (self.stop / self.start).powf(f),
                }
            })
            .collect()
    }
}

/// A sweep description.
///
/// At every point `Ω_R = omega_ratio · χ`; `fixed.omega_r` is overwritten.
/// Steady-state sweeps set `Δ'_c = Δ_c`, since only `Δ_c` enters the master
/// equation.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub kind: SweepKind,
    pub axis: Axis,
    pub fixed: ModelParams,
    pub omega_ratio: f64,
    /// Pins `Δ_c` to this single-photon resonance at every point.
    pub resonance_branch: Option<ResonanceLabel>,
    pub truncation: FockTruncation,
    /// Fidelity sweeps: the g/Δ values to compare.
    pub g_over_delta: Vec<f64>,
    /// Fidelity sweeps: coherent amplitude of the initial field.
    pub alpha: f64,
    pub parallel: bool,
}

impl SweepSpec {
    /// Defaults for each kind, matching the photon-blockade working point
    /// (χ = 15, Ω_R = 2χ, γ = 0.5, η = 0.1) or, for the fidelity kind,
    /// χ = 1, α = 1 and χt ∈ [0, 10].
    pub fn defaults(kind: SweepKind) -> Self {
        let truncation =
            FockTruncation::new(FockTruncation::DEFAULT_N_MAX).expect("default N is valid");
        let base = Self {
            kind,
            axis: Axis::linear(-45.0, 45.0, 901),
            fixed: ModelParams::default(),
            omega_ratio: 2.0,
            resonance_branch: None,
            truncation,
            g_over_delta: vec![0.05, 0.1, 0.2, 0.3],
            alpha: 1.0,
            parallel: true,
        };
        match kind {
            SweepKind::Detuning => base,
            SweepKind::OmegaRatio => Self {
                axis: Axis::log(0.2, 20.0, 33),
                resonance_branch: Some(ResonanceLabel::D2),
                ..base
            },
            SweepKind::ChiRatio => Self {
                axis: Axis::linear(1.0, 30.0, 59),
                resonance_branch: Some(ResonanceLabel::D2),
                ..base
            },
            SweepKind::Fidelity => Self {
                axis: Axis::linear(0.0, 10.0, 201),
                fixed: ModelParams {
                    chi: 1.0,
                    ..ModelParams::zeroed()
                },
                ..base
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.axis.validate()?;
        self.fixed.validate()?;
        if !(self.omega_ratio >= 0.0) || !self.omega_ratio.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "omega ratio must be finite and nonnegative, got {}",
                self.omega_ratio
            )));
        }
        if let Some(label) = self.resonance_branch {
            if !label.is_single_photon() {
                return Err(Error::InvalidParameter(format!(
                    "branch must be one of d1..d4, got {label}"
                )));
            }
        }
        match self.kind {
            SweepKind::Detuning => {}
            SweepKind::OmegaRatio | SweepKind::ChiRatio => {
                if self.resonance_branch.is_none() {
                    return Err(Error::InvalidParameter(format!(
                        "{} sweeps need a resonance branch",
                        self.kind
                    )));
                }
                if self.kind == SweepKind::OmegaRatio && self.fixed.chi == 0.0 {
                    return Err(Error::ZeroChi);
                }
                if self.kind == SweepKind::ChiRatio
                    && self.axis.start <= 0.0
                    && self.axis.stop >= 0.0
                {
                    return Err(Error::ZeroChi);
                }
            }
            SweepKind::Fidelity => {
                if self.axis.start < 0.0 {
                    return Err(Error::InvalidParameter(
                        "fidelity times must be nonnegative".into(),
                    ));
                }
                if self.fixed.chi <= 0.0 {
                    return Err(Error::InvalidParameter(
                        "fidelity sweeps need chi > 0".into(),
                    ));
                }
                if self.g_over_delta.is_empty() || self.g_over_delta.iter().any(|r| !(*r > 0.0)) {
                    return Err(Error::InvalidParameter(
                        "fidelity sweeps need positive g/Δ values".into(),
                    ));
                }
                if !self.alpha.is_finite() {
                    return Err(Error::InvalidParameter("alpha must be finite".into()));
                }
            }
        }
        Ok(())
    }

    /// Model parameters at one axis value of a steady-state sweep.
    pub fn point_params(&self, axis_value: f64) -> Result<ModelParams> {
        let mut p = self.fixed;
        match self.kind {
            SweepKind::Detuning => p.delta_c = axis_value,
            SweepKind::OmegaRatio => p.omega_r = axis_value * p.chi,
            SweepKind::ChiRatio => p.chi = axis_value,
            SweepKind::Fidelity => {
                return Err(Error::InvalidParameter(
                    "fidelity sweeps have no steady state".into(),
                ))
            }
        }
        if self.kind != SweepKind::OmegaRatio {
            p.omega_r = self.omega_ratio * p.chi;
        }
        if let Some(label) = self.resonance_branch {
            if self.kind != SweepKind::Detuning {
                p.delta_c = crate::model::resonance_detuning(&p, label)?;
            }
        }
        p.delta_c_prime = p.delta_c;
        Ok(p)
    }
}

/// Status of one sweep row.
#[derive(Clone, Debug, PartialEq)]
pub enum RowFlag {
    Ok,
    /// Empty cavity: `g2` and `g2_weak` are left blank.
    NoPhotons,
    /// The steady-state residual exceeded its bound.
    Residual,
    /// The solve failed; only the axis value is reported.
    Failed(Error),
}

impl RowFlag {
    /// Rows that count as solver failures for the exit status.
    pub fn is_failure(&self) -> bool {
        matches!(self, RowFlag::Residual | RowFlag::Failed(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            RowFlag::Ok => "",
            RowFlag::NoPhotons => "no_photons",
            RowFlag::Residual => "residual",
            RowFlag::Failed(Error::Singular { .. }) => "singular",
            RowFlag::Failed(Error::PositivityViolation { .. }) => "positivity",
            RowFlag::Failed(Error::ZeroChi) => "zero_chi",
            RowFlag::Failed(_) => "error",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub axis: f64,
    pub stats: Option<PhotonStats>,
    pub residual: Option<f64>,
    pub flag: RowFlag,
}

impl SweepRow {
    pub fn g2(&self) -> Option<f64> {
        self.stats.and_then(|s| s.g2)
    }

    fn failed(axis: f64, e: Error) -> Self {
        Self {
            axis,
            stats: None,
            residual: None,
            flag: RowFlag::Failed(e),
        }
    }
}

/// Steady-state observables at one axis value.
pub fn evaluate_point(spec: &SweepSpec, axis_value: f64) -> SweepRow {
    let solved = spec.point_params(axis_value).and_then(|p| {
        let l = model_liouvillian(&p, spec.truncation)?;
        let (rho, report) = steady_state_with_report(&l)?;
        Ok((photon_stats(&rho)?, report))
    });
    match solved {
        Ok((stats, report)) => {
            let flag = if !report.within_bound() {
                RowFlag::Residual
            } else if stats.g2.is_none() {
                RowFlag::NoPhotons
            } else {
                RowFlag::Ok
            };
            SweepRow {
                axis: axis_value,
                stats: Some(stats),
                residual: Some(report.raw_residual.max(report.residual)),
                flag,
            }
        }
        Err(e) => SweepRow::failed(axis_value, e),
    }
}

fn run_steady(spec: &SweepSpec, kind: SweepKind) -> Result<Vec<SweepRow>> {
    if spec.kind != kind {
        return Err(Error::InvalidParameter(format!(
            "expected a {kind} sweep, got {}",
            spec.kind
        )));
    }
    spec.validate()?;
    let xs = spec.axis.values();
    let rows = if spec.parallel {
        xs.par_iter().map(|&x| evaluate_point(spec, x)).collect()
    } else {
        xs.iter().map(|&x| evaluate_point(spec, x)).collect()
    };
    Ok(rows)
}

/// Steady state against the cavity drive detuning Δ_c.
pub fn run_detuning_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    run_steady(spec, SweepKind::Detuning)
}

/// Steady state against Ω_R / χ on a fixed resonance branch.
pub fn run_omega_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    run_steady(spec, SweepKind::OmegaRatio)
}

/// Steady state against χ / κ at fixed Ω_R / χ on a resonance branch.
pub fn run_chi_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    run_steady(spec, SweepKind::ChiRatio)
}

/// Any steady-state sweep.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    run_steady(spec, spec.kind)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FidelityRow {
    pub g_over_delta: f64,
    pub chi_t: f64,
    pub fidelity: f64,
}

/// Fidelity curves for every g/Δ in the spec, plus the largest norm drift
/// seen by either integrator.
pub fn run_fidelity_sweep(spec: &SweepSpec) -> Result<(Vec<FidelityRow>, f64)> {
    if spec.kind != SweepKind::Fidelity {
        return Err(Error::InvalidParameter(format!(
            "expected a fidelity sweep, got {}",
            spec.kind
        )));
    }
    spec.validate()?;
    let chi = spec.fixed.chi;
    let grid = spec.axis.values();
    let skip_origin = grid[0] != 0.0;
    let mut times: Vec<f64> = grid.iter().map(|x| x / chi).collect();
    if skip_origin {
        times.insert(0, 0.0);
    }
    let initial = coherent_initial_state(C64::new(spec.alpha, 0.0), spec.truncation)?;
    let n_max = spec.truncation.n_max();
    let one = |&r: &f64| -> Result<(Vec<FidelityRow>, f64)> {
        let p = ValidityParams::dispersive_recipe(chi, spec.fixed.delta_0, spec.omega_ratio, r)?;
        let dt = default_step(DerivKind::Effective, &p, n_max);
        let (f, drift) = fidelity_curve(&initial, &p, &times, dt)?;
        let f = if skip_origin { &f[1..] } else { &f[..] };
        let rows = grid
            .iter()
            .zip(f)
            .map(|(&chi_t, &fidelity)| FidelityRow {
                g_over_delta: r,
                chi_t,
                fidelity,
            })
            .collect();
        Ok((rows, drift))
    };
    let parts: Vec<Result<(Vec<FidelityRow>, f64)>> = if spec.parallel {
        spec.g_over_delta.par_iter().map(one).collect()
    } else {
        spec.g_over_delta.iter().map(one).collect()
    };
    let mut rows = Vec::with_capacity(grid.len() * spec.g_over_delta.len());
    let mut drift: f64 = 0.0;
    for part in parts {
        let (r, d) = part?;
        rows.extend(r);
        drift = drift.max(d);
    }
    Ok((rows, drift))
}

/// The eight labelled resonance detunings.
pub fn annotate_resonances(p: &ModelParams) -> Result<Vec<Resonance>> {
    resonance_detunings(p)
}

/// `{:.16e}` gives 17 significant digits, enough to round-trip any f64.
pub fn format_number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        String::new()
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_default()
}

fn csv_err(e: impl fmt::Display) -> Error {
    Error::Io(format!("cannot write CSV: {e}"))
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "axis", "p0", "p1", "p2", "mean_n", "g2", "g2_weak", "residual", "flag",
    ])
    .map_err(csv_err)?;
    for r in rows {
        let s = r.stats;
        w.write_record([
            format_number(r.axis),
            opt(s.map(|s| s.p0)),
            opt(s.map(|s| s.p1)),
            opt(s.map(|s| s.p2)),
            opt(s.map(|s| s.mean_n)),
            opt(s.and_then(|s| s.g2)),
            opt(s.and_then(|s| s.g2_weak)),
            opt(r.residual),
            r.flag.label().to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(csv_err)
}

pub fn write_fidelity_csv<W: Write>(rows: &[FidelityRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["g_over_delta", "chi_t", "fidelity"])
        .map_err(csv_err)?;
    for r in rows {
        w.write_record([
            format_number(r.g_over_delta),
            format_number(r.chi_t),
            format_number(r.fidelity),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(csv_err)
}

pub fn write_resonances_csv<W: Write>(res: &[Resonance], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["label", "transition", "delta_c"])
        .map_err(csv_err)?;
    for r in res {
        w.write_record([
            r.label.to_string(),
            r.label.transition(),
            format_number(r.delta_c),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(csv_err)
}

/// Abscissa of the vertex of the parabola through three points, falling back
/// to the middle point when they are collinear.
pub fn parabola_vertex(x: [f64; 3], y: [f64; 3]) -> f64 {
    let d1 = (y[1] - y[0]) / (x[1] - x[0]);
    let d2 = (y[2] - y[1]) / (x[2] - x[1]);
    let curvature = (d2 - d1) / (x[2] - x[0]);
    if !(curvature.abs() > 1e-12 * (d1.abs() + d2.abs())) {
        return x[1];
    }
    let v = 0.5 * (x[0] + x[1]) - d1 / (2.0 * curvature);
    v.clamp(x[0], x[2])
}

/// A local extremum on a sampled curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Extremum {
    /// Grid index of the discrete extremum.
    pub index: usize,
    /// Location refined by quadratic interpolation.
    pub x: f64,
    /// Sampled value at `index`.
    pub y: f64,
}

fn local_extrema(xs: &[f64], ys: &[f64], better: impl Fn(f64, f64) -> bool) -> Vec<Extremum> {
    (1..xs.len().saturating_sub(1))
        .filter(|&k| better(ys[k], ys[k - 1]) && !better(ys[k + 1], ys[k]))
        .filter(|&k| ys[k - 1].is_finite() && ys[k].is_finite() && ys[k + 1].is_finite())
        .map(|k| Extremum {
            index: k,
            x: parabola_vertex([xs[k - 1], xs[k], xs[k + 1]], [ys[k - 1], ys[k], ys[k + 1]]),
            y: ys[k],
        })
        .collect()
}

/// Interior local minima. Non-finite samples never count.
pub fn local_minima(xs: &[f64], ys: &[f64]) -> Vec<Extremum> {
    local_extrema(xs, ys, |a, b| a < b)
}

/// Interior local maxima.
pub fn local_maxima(xs: &[f64], ys: &[f64]) -> Vec<Extremum> {
    local_extrema(xs, ys, |a, b| a > b)
}

/// The extremum closest to `target`.
pub fn nearest(extrema: &[Extremum], target: f64) -> Option<Extremum> {
    extrema
        .iter()
        .copied()
        .min_by(|a, b| (a.x - target).abs().total_cmp(&(b.x - target).abs()))
}

/// `g2` along a steady-state sweep; rows without a value give NaN.
pub fn g2_series(rows: &[SweepRow]) -> (Vec<f64>, Vec<f64>) {
    rows.iter()
        .map(|r| (r.axis, r.g2().unwrap_or(f64::NAN)))
        .unzip()
}

/// Golden-section search for a minimum of `f` on `[a, b]`.
pub fn golden_section_min(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Minimiser of `g2` along an omega-ratio sweep: the best grid point, refined
/// by golden-section search in `ln(Ω_R/χ)` between its neighbours.
pub fn refine_omega_minimum(spec: &SweepSpec, rows: &[SweepRow], tol: f64) -> Option<f64> {
    let (xs, ys) = g2_series(rows);
    let best = (0..ys.len())
        .filter(|&k| ys[k].is_finite())
        .min_by(|&i, &j| ys[i].total_cmp(&ys[j]))?;
    let lo = xs[best.saturating_sub(1)].ln();
    let hi = xs[(best + 1).min(xs.len() - 1)].ln();
    let g2 = |u: f64| evaluate_point(spec, u.exp()).g2().unwrap_or(f64::INFINITY);
    Some(golden_section_min(g2, lo, hi, tol).exp())
}
