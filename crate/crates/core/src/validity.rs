//! Closed-system check of the dispersive approximation.
//!
//! Two pure states start from the same initial condition. `|ψ(t)>` evolves
//! under the effective Hamiltonian, which keeps the conditional cavity drive
//! `(Ω_R/2)(g/Δ) σ_z (a† + a)`. `|φ(t)>` evolves under the driven dispersive
//! JC Hamiltonian, which drops it. Their overlap `F(t) = |<ψ(t)|φ(t)>|²`
//! measures how well the dispersive model holds.
//!
//! Amplitudes are written `|ψ> = Σ_n A_n |e,n> + B_n |g,n>`.

use crate::error::{Error, Result};
use crate::linop::{ComplexVector, C64, I, ZERO};
use crate::model::{FockTruncation, ModelParams};

/// Budget for `dt * frequency_scale` in [`integrate_amps`].
pub const MAX_STEP_PHASE: f64 = 0.05;
/// Default `dt * frequency_scale`.
pub const DEFAULT_STEP_PHASE: f64 = 1e-3;
/// Minimum retained coherent-state weight.
pub const COHERENT_TAIL: f64 = 1e-10;

/// Amplitudes `A_n` (excited) and `B_n` (ground) for `n = 0..=N`.
#[derive(Clone, Debug, PartialEq)]
pub struct AmplitudeState {
    excited: Vec<C64>,
    ground: Vec<C64>,
}

impl AmplitudeState {
    pub fn new(excited: Vec<C64>, ground: Vec<C64>) -> Result<Self> {
        if excited.len() != ground.len() {
            return Err(Error::DimensionMismatch {
                expected: excited.len(),
                found: ground.len(),
            });
        }
        if excited.is_empty() {
            return Err(Error::InvalidParameter("amplitude state is empty".into()));
        }
        Ok(Self { excited, ground })
    }

    pub fn zeros(t: FockTruncation) -> Self {
        Self {
            excited: vec![ZERO; t.levels()],
            ground: vec![ZERO; t.levels()],
        }
    }

    pub fn n_max(&self) -> usize {
        self.excited.len() - 1
    }

    pub fn excited(&self) -> &[C64] {
        &self.excited
    }

    pub fn ground(&self) -> &[C64] {
        &self.ground
    }

    pub fn norm_sqr(&self) -> f64 {
        self.excited
            .iter()
            .chain(&self.ground)
            .map(|z| z.norm_sqr())
            .sum()
    }

    /// Joint-space vector in atom-first order: all `A_n`, then all `B_n`.
    pub fn to_joint(&self) -> ComplexVector {
        ComplexVector::from_vec(self.excited.iter().chain(&self.ground).copied().collect())
    }

    pub fn from_joint(v: &ComplexVector) -> Result<Self> {
        let len = v.len();
        if len < 2 || !len.is_multiple_of(2) {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: len,
            });
        }
        let s = v.as_slice();
        Self::new(s[..len / 2].to_vec(), s[len / 2..].to_vec())
    }

    fn from_flat(flat: &[C64]) -> Self {
        let h = flat.len() / 2;
        Self {
            excited: flat[..h].to_vec(),
            ground: flat[h..].to_vec(),
        }
    }

    fn to_flat(&self) -> Vec<C64> {
        self.excited.iter().chain(&self.ground).copied().collect()
    }
}

/// Model parameters plus the ratio `g/Δ` of the underlying JC coupling to the
/// atom-cavity detuning, linked through `χ = g²/Δ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ValidityParams {
    pub model: ModelParams,
    pub g_over_delta: f64,
}

impl ValidityParams {
    pub fn new(model: ModelParams, g_over_delta: f64) -> Result<Self> {
        if !(g_over_delta >= 0.0) || !g_over_delta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "g/Δ must be finite and nonnegative, got {g_over_delta}"
            )));
        }
        let p = Self {
            model,
            g_over_delta,
        };
        if g_over_delta > 0.0 {
            let (g, delta) = (p.coupling(), p.detuning());
            let chi = g * g / delta;
            debug_assert!(
                (chi - model.chi).abs() <= 1e-12 * model.chi.abs().max(1.0),
                "χ = g²/Δ violated"
            );
        }
        Ok(p)
    }

    /// Parameters with `Ω_R = omega_ratio χ`, `Δ = χ / (g/Δ)²` and
    /// `Δ'_c = Δ_0 - χ - Δ`.
    pub fn dispersive_recipe(
        chi: f64,
        delta_0: f64,
        omega_ratio: f64,
        g_over_delta: f64,
    ) -> Result<Self> {
        if chi == 0.0 {
            return Err(Error::ZeroChi);
        }
        if !(g_over_delta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "g/Δ must be positive, got {g_over_delta}"
            )));
        }
        let delta = chi / (g_over_delta * g_over_delta);
        let model = ModelParams {
            delta_c_prime: delta_0 - chi - delta,
            delta_0,
            chi,
            omega_r: omega_ratio * chi,
            ..ModelParams::zeroed()
        };
        Self::new(model, g_over_delta)
    }

    /// Atom-cavity detuning `Δ = χ / (g/Δ)²`.
    pub fn detuning(&self) -> f64 {
        self.model.chi / (self.g_over_delta * self.g_over_delta)
    }

    /// JC coupling `g = χ / (g/Δ)`.
    pub fn coupling(&self) -> f64 {
        self.model.chi / self.g_over_delta
    }
}

/// Which Hamiltonian drives the amplitudes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivKind {
    /// Effective Hamiltonian with the conditional cavity drive.
    Effective,
    /// Driven dispersive JC Hamiltonian; every photon sector is a closed
    /// 2x2 block.
    Dispersive,
}

/// Writes `d/dt` of the flat amplitude vector `[A.., B..]` into `out`.
fn deriv_into(p: &ModelParams, ladder: f64, sqrt_n: &[f64], s: &[C64], out: &mut [C64]) {
    let levels = s.len() / 2;
    let (a, b) = s.split_at(levels);
    let (da, db) = out.split_at_mut(levels);
    let half_omega = 0.5 * p.omega_r;
    for n in 0..levels {
        let nf = n as f64;
        let shift = nf * p.delta_c_prime;
        let split = 0.5 * p.delta_0 + nf * p.chi;
        let mut ha = (shift + split) * a[n] + half_omega * b[n];
        let mut hb = (shift - split) * b[n] + half_omega * a[n];
        if ladder != 0.0 {
            let mut up_a = ZERO;
            let mut up_b = ZERO;
            if n > 0 {
                up_a += sqrt_n[n] * a[n - 1];
                up_b += sqrt_n[n] * b[n - 1];
            }
            if n + 1 < levels {
                up_a += sqrt_n[n + 1] * a[n + 1];
                up_b += sqrt_n[n + 1] * b[n + 1];
            }
            ha += ladder * up_a;
            hb -= ladder * up_b;
        }
        da[n] = -I * ha;
        db[n] = -I * hb;
    }
}

fn sqrt_table(levels: usize) -> Vec<f64> {
    (0..=levels).map(|n| (n as f64).sqrt()).collect()
}

fn ladder_strength(kind: DerivKind, p: &ValidityParams) -> f64 {
    match kind {
        DerivKind::Effective => 0.5 * p.model.omega_r * p.g_over_delta,
        DerivKind::Dispersive => 0.0,
    }
}

/// Time derivative of the amplitudes under the effective Hamiltonian.
pub fn amp_derivs_eff(s: &AmplitudeState, p: &ValidityParams) -> AmplitudeState {
    derivs(DerivKind::Effective, s, p)
}

/// Time derivative of the amplitudes under the driven dispersive JC
/// Hamiltonian.
pub fn amp_derivs_ddjc(s: &AmplitudeState, p: &ModelParams) -> AmplitudeState {
    let vp = ValidityParams {
        model: *p,
        g_over_delta: 0.0,
    };
    derivs(DerivKind::Dispersive, s, &vp)
}

fn derivs(kind: DerivKind, s: &AmplitudeState, p: &ValidityParams) -> AmplitudeState {
    let flat = s.to_flat();
    let mut out = vec![ZERO; flat.len()];
    let sq = sqrt_table(s.excited.len());
    deriv_into(&p.model, ladder_strength(kind, p), &sq, &flat, &mut out);
    AmplitudeState::from_flat(&out)
}

/// Gershgorin bound on the spectral radius of the generating Hamiltonian.
pub fn frequency_scale(kind: DerivKind, p: &ValidityParams, n_max: usize) -> f64 {
    let m = &p.model;
    let ladder = ladder_strength(kind, p).abs();
    (0..=n_max)
        .map(|n| {
            let nf = n as f64;
            let split = (0.5 * m.delta_0 + nf * m.chi).abs();
            let diag = (nf * m.delta_c_prime).abs() + split;
            let up = if n < n_max { (nf + 1.0).sqrt() } else { 0.0 };
            diag + 0.5 * m.omega_r.abs() + ladder * (nf.sqrt() + up)
        })
        .fold(0.0, f64::max)
}

/// Default RK4 step for the given parameters and truncation.
pub fn default_step(kind: DerivKind, p: &ValidityParams, n_max: usize) -> f64 {
    let scale = frequency_scale(kind, p, n_max).max(1.0);
    DEFAULT_STEP_PHASE / scale
}

/// Amplitudes sampled along a fixed-step RK4 run.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<AmplitudeState>,
    /// Largest `| ‖ψ(t)‖² - ‖ψ(0)‖² |` over the samples.
    pub max_norm_drift: f64,
}

struct Rk4 {
    model: ModelParams,
    ladder: f64,
    sqrt_n: Vec<f64>,
    k: [Vec<C64>; 4],
    tmp: Vec<C64>,
}

impl Rk4 {
    fn new(kind: DerivKind, p: &ValidityParams, len: usize) -> Self {
        let zeros = vec![ZERO; len];
        Self {
            model: p.model,
            ladder: ladder_strength(kind, p),
            sqrt_n: sqrt_table(len / 2),
            k: [zeros.clone(), zeros.clone(), zeros.clone(), zeros.clone()],
            tmp: zeros,
        }
    }

    fn step(&mut self, x: &mut [C64], h: f64) {
        let n = x.len();
        let [k1, k2, k3, k4] = &mut self.k;
        let tmp = &mut self.tmp;
        deriv_into(&self.model, self.ladder, &self.sqrt_n, x, k1);
        for i in 0..n {
            tmp[i] = x[i] + 0.5 * h * k1[i];
        }
        deriv_into(&self.model, self.ladder, &self.sqrt_n, tmp, k2);
        for i in 0..n {
            tmp[i] = x[i] + 0.5 * h * k2[i];
        }
        deriv_into(&self.model, self.ladder, &self.sqrt_n, tmp, k3);
        for i in 0..n {
            tmp[i] = x[i] + h * k3[i];
        }
        deriv_into(&self.model, self.ladder, &self.sqrt_n, tmp, k4);
        for i in 0..n {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
}

fn check_step(kind: DerivKind, p: &ValidityParams, n_max: usize, dt: f64) -> Result<()> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "dt must be positive, got {dt}"
        )));
    }
    let product = dt * frequency_scale(kind, p, n_max);
    if product > MAX_STEP_PHASE {
        return Err(Error::StepTooLarge {
            dt,
            product,
            limit: MAX_STEP_PHASE,
        });
    }
    Ok(())
}

/// Integrates the amplitudes with fixed-step RK4 and records every step.
///
/// The step actually used is `t_final / ceil(t_final / dt)` so the run ends
/// exactly at `t_final`.
pub fn integrate_amps(
    kind: DerivKind,
    initial: &AmplitudeState,
    p: &ValidityParams,
    t_final: f64,
    dt: f64,
) -> Result<Trajectory> {
    if !(t_final >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "t_final must be nonnegative, got {t_final}"
        )));
    }
    check_step(kind, p, initial.n_max(), dt)?;
    let steps = (t_final / dt).ceil() as usize;
    let times: Vec<f64> = (0..=steps)
        .map(|k| {
            if steps == 0 {
                0.0
            } else {
                t_final * k as f64 / steps as f64
            }
        })
        .collect();
    integrate_amps_at(kind, initial, p, &times, dt)
}

/// Integrates with steps no longer than `max_dt` and records the state at
/// each of the increasing `sample_times` (the first must be 0).
pub fn integrate_amps_at(
    kind: DerivKind,
    initial: &AmplitudeState,
    p: &ValidityParams,
    sample_times: &[f64],
    max_dt: f64,
) -> Result<Trajectory> {
    check_step(kind, p, initial.n_max(), max_dt)?;
    if sample_times.first().is_some_and(|&t| t != 0.0) {
        return Err(Error::InvalidParameter(
            "sampling must start at t = 0".into(),
        ));
    }
    if sample_times.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::InvalidParameter(
            "sample times must be nondecreasing".into(),
        ));
    }
    let mut x = initial.to_flat();
    let norm0 = initial.norm_sqr();
    let mut rk = Rk4::new(kind, p, x.len());
    let mut states = Vec::with_capacity(sample_times.len());
    let mut max_norm_drift: f64 = 0.0;
    let mut now = 0.0;
    for &t in sample_times {
        let span = t - now;
        if span > 0.0 {
            let steps = (span / max_dt).ceil() as usize;
            let h = span / steps as f64;
            for _ in 0..steps {
                rk.step(&mut x, h);
            }
        }
        now = t;
        let s = AmplitudeState::from_flat(&x);
        max_norm_drift = max_norm_drift.max((s.norm_sqr() - norm0).abs());
        states.push(s);
    }
    Ok(Trajectory {
        times: sample_times.to_vec(),
        states,
        max_norm_drift,
    })
}

/// `|α> (|g> + |e>) / sqrt 2`, renormalised after truncation.
pub fn coherent_initial_state(alpha: C64, t: FockTruncation) -> Result<AmplitudeState> {
    let mut amps = Vec::with_capacity(t.levels());
    let mut c = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for n in 0..t.levels() {
        if n > 0 {
            c = c * alpha / (n as f64).sqrt();
        }
        amps.push(c);
    }
    let captured: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
    if captured < 1.0 - COHERENT_TAIL {
        return Err(Error::TruncationTooSmall {
            n_max: t.n_max(),
            captured,
        });
    }
    let scale = 1.0 / (2.0 * captured).sqrt();
    let amps: Vec<C64> = amps.into_iter().map(|z| z * scale).collect();
    AmplitudeState::new(amps.clone(), amps)
}

/// `F = |Σ_n A_n* a_n + B_n* b_n|²`.
pub fn fidelity(psi: &AmplitudeState, phi: &AmplitudeState) -> Result<f64> {
    if psi.n_max() != phi.n_max() {
        return Err(Error::DimensionMismatch {
            expected: psi.n_max(),
            found: phi.n_max(),
        });
    }
    let overlap: C64 = psi
        .excited
        .iter()
        .zip(&phi.excited)
        .chain(psi.ground.iter().zip(&phi.ground))
        .map(|(x, y)| x.conj() * y)
        .sum();
    Ok(overlap.norm_sqr().clamp(0.0, 1.0 + 1e-10))
}

/// Fidelity between the effective and dispersive evolutions of the same
/// initial state at each of `sample_times`, plus the worse of the two norm
/// drifts.
pub fn fidelity_curve(
    initial: &AmplitudeState,
    p: &ValidityParams,
    sample_times: &[f64],
    max_dt: f64,
) -> Result<(Vec<f64>, f64)> {
    let psi = integrate_amps_at(DerivKind::Effective, initial, p, sample_times, max_dt)?;
    let phi = integrate_amps_at(DerivKind::Dispersive, initial, p, sample_times, max_dt)?;
    let f = psi
        .states
        .iter()
        .zip(&phi.states)
        .map(|(a, b)| fidelity(a, b))
        .collect::<Result<Vec<_>>>()?;
    Ok((f, psi.max_norm_drift.max(phi.max_norm_drift)))
}
