//! Parameters, Hamiltonians and closed-form spectrum of the driven dispersive
//! Jaynes-Cummings model.
//!
//! The joint space is atom ⊗ field with the atom factor first and atomic basis
//! order `{|e>, |g>}`, so `σ_z = diag(1, -1)` and the basis index of
//! `|s, n>` is `s * (N + 1) + n`. All frequencies are in units of κ.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linop::{kron, ComplexMatrix, ComplexVector, C64};

/// Rotating-frame parameters. Frequencies in units of the cavity decay rate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    /// Cavity detuning entering the driven Hamiltonian (`Δ_c = Δ'_c - ω_L`).
    pub delta_c: f64,
    /// Cavity detuning from the atomic drive (`Δ'_c = ω_c - ω_d`).
    pub delta_c_prime: f64,
    /// Atomic detuning `Δ_0 = ω_0 + χ - ω_d`.
    pub delta_0: f64,
    /// Dispersive coupling χ.
    pub chi: f64,
    /// Transverse atomic drive Ω_R.
    pub omega_r: f64,
    /// Cavity drive η.
    pub eta: f64,
    /// Cavity decay κ; the frequency unit, always 1.
    pub kappa: f64,
    /// Atomic decay γ.
    pub gamma: f64,
}

impl Default for ModelParams {
    /// The photon-blockade working point: γ = 0.5, χ = 15, Ω_R = 2χ,
    /// Δ_0 = 0, η = 0.1.
    fn default() -> Self {
        Self {
            delta_c: 0.0,
            delta_c_prime: 0.0,
            delta_0: 0.0,
            chi: 15.0,
            omega_r: 30.0,
            eta: 0.1,
            kappa: 1.0,
            gamma: 0.5,
        }
    }
}

impl ModelParams {
    /// All parameters zero except κ = 1.
    pub fn zeroed() -> Self {
        Self {
            delta_c: 0.0,
            delta_c_prime: 0.0,
            delta_0: 0.0,
            chi: 0.0,
            omega_r: 0.0,
            eta: 0.0,
            kappa: 1.0,
            gamma: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.kappa != 1.0 {
            return Err(Error::InvalidParameter(format!(
                "kappa is the frequency unit and must be 1, got {}",
                self.kappa
            )));
        }
        for (name, value) in [
            ("eta", self.eta),
            ("omega_r", self.omega_r),
            ("gamma", self.gamma),
        ] {
            if !(value >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be nonnegative, got {value}"
                )));
            }
        }
        let all = [
            self.delta_c,
            self.delta_c_prime,
            self.delta_0,
            self.chi,
            self.omega_r,
            self.eta,
            self.gamma,
        ];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("parameters must be finite".into()));
        }
        Ok(())
    }

    fn require_chi(&self) -> Result<()> {
        if self.chi == 0.0 {
            Err(Error::ZeroChi)
        } else {
            Ok(())
        }
    }
}

/// Photon-number cutoff: the field keeps Fock states `0..=n_max`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FockTruncation {
    n_max: usize,
}

impl FockTruncation {
    pub const DEFAULT_N_MAX: usize = 12;

    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 2 {
            return Err(Error::InvalidParameter(format!(
                "Fock truncation must keep the two-photon sector (n_max >= 2), got {n_max}"
            )));
        }
        Ok(Self { n_max })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Number of field levels, `N + 1`.
    pub fn levels(&self) -> usize {
        self.n_max + 1
    }

    /// Joint dimension `2 (N + 1)`.
    pub fn dim(&self) -> usize {
        2 * self.levels()
    }

    pub fn index(&self, atom: Atom, n: usize) -> usize {
        debug_assert!(n <= self.n_max);
        atom.index() * self.levels() + n
    }
}

impl Default for FockTruncation {
    fn default() -> Self {
        Self {
            n_max: Self::DEFAULT_N_MAX,
        }
    }
}

/// Atomic basis state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Atom {
    Excited,
    Ground,
}

impl Atom {
    pub const ALL: [Atom; 2] = [Atom::Excited, Atom::Ground];

    pub fn index(self) -> usize {
        match self {
            Atom::Excited => 0,
            Atom::Ground => 1,
        }
    }
}

/// Upper (`+`) or lower (`-`) dressed branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Branch::Plus => '+',
            Branch::Minus => '-',
        }
    }
}

/// Operators on the joint atom ⊗ field space.
#[derive(Clone, Debug)]
pub struct Operators {
    pub a: ComplexMatrix,
    pub a_dag: ComplexMatrix,
    pub num: ComplexMatrix,
    pub sigma_z: ComplexMatrix,
    pub sigma_x: ComplexMatrix,
    pub sigma_minus: ComplexMatrix,
    pub identity: ComplexMatrix,
}

impl Operators {
    pub fn new(t: FockTruncation) -> Self {
        let field_a = annihilation(t.levels());
        let field_n =
            ComplexMatrix::from_diag(&(0..t.levels()).map(|n| n as f64).collect::<Vec<_>>());
        let i_atom = ComplexMatrix::identity(2);
        let i_field = ComplexMatrix::identity(t.levels());
        let sz = ComplexMatrix::from_diag(&[1.0, -1.0]);
        let sx = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        // σ_- = |g><e|: row g (1), column e (0).
        let sm = ComplexMatrix::from_real_rows(&[&[0.0, 0.0], &[1.0, 0.0]]);
        let a = kron(&i_atom, &field_a);
        Self {
            a_dag: a.adjoint(),
            a,
            num: kron(&i_atom, &field_n),
            sigma_z: kron(&sz, &i_field),
            sigma_x: kron(&sx, &i_field),
            sigma_minus: kron(&sm, &i_field),
            identity: ComplexMatrix::identity(t.dim()),
        }
    }
}

/// Truncated annihilation operator on `levels` Fock states.
pub fn annihilation(levels: usize) -> ComplexMatrix {
    let mut a = ComplexMatrix::zeros(levels, levels);
    for n in 1..levels {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    a
}

fn weighted_sum(terms: &[(f64, &ComplexMatrix)], dim: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(dim, dim);
    for &(w, m) in terms {
        if w != 0.0 {
            out = &out + &m.scale_real(w);
        }
    }
    out
}

/// Common part `Δ a†a + (Δ_0/2) σ_z + χ a†a σ_z + (Ω_R/2) σ_x`.
fn dispersive_part(p: &ModelParams, cavity_detuning: f64, ops: &Operators) -> ComplexMatrix {
    let num_sz = &ops.num * &ops.sigma_z;
    weighted_sum(
        &[
            (cavity_detuning, &ops.num),
            (0.5 * p.delta_0, &ops.sigma_z),
            (p.chi, &num_sz),
            (0.5 * p.omega_r, &ops.sigma_x),
        ],
        ops.identity.rows(),
    )
}

/// Driven dispersive JC Hamiltonian without cavity drive, using `Δ'_c`.
pub fn build_h_ddjc(p: &ModelParams, t: FockTruncation) -> ComplexMatrix {
    let ops = Operators::new(t);
    dispersive_part(p, p.delta_c_prime, &ops)
}

/// Full steady-state Hamiltonian with cavity drive η, using `Δ_c`.
pub fn build_h_full(p: &ModelParams, t: FockTruncation) -> ComplexMatrix {
    let ops = Operators::new(t);
    let h = dispersive_part(p, p.delta_c, &ops);
    let quad = &ops.a + &ops.a_dag;
    &h + &quad.scale_real(p.eta)
}

/// Effective Hamiltonian of the driven JC model in the large-detuning regime:
/// the dispersive Hamiltonian plus the conditional cavity drive
/// `(Ω_R/2)(g/Δ) σ_z (a† + a)`.
pub fn build_h_eff(p: &ModelParams, t: FockTruncation, g_over_delta: f64) -> ComplexMatrix {
    let ops = Operators::new(t);
    let h = dispersive_part(p, p.delta_c_prime, &ops);
    let quad = &ops.a + &ops.a_dag;
    let conditional = &ops.sigma_z * &quad;
    &h + &conditional.scale_real(0.5 * p.omega_r * g_over_delta)
}

/// One analytic eigenvalue of the driven dispersive JC Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenPair {
    pub m: usize,
    pub branch: Branch,
    pub energy: f64,
    /// Mixing angle with `2θ_m = atan2(Ω_R, Δ_0 + 2mχ)`.
    pub theta_m: f64,
}

/// Mixing angle θ_m of the photon-number-dependent atomic states.
pub fn mixing_angle(p: &ModelParams, m: usize) -> f64 {
    0.5 * p.omega_r.atan2(p.delta_0 + 2.0 * m as f64 * p.chi)
}

/// `E_{m,±} = m Δ'_c ± ½ sqrt((Δ_0 + 2mχ)² + Ω_R²)`.
pub fn eigen_energy(p: &ModelParams, m: usize, branch: Branch) -> f64 {
    let x = p.delta_0 + 2.0 * m as f64 * p.chi;
    m as f64 * p.delta_c_prime + branch.sign() * 0.5 * x.hypot(p.omega_r)
}

/// Closed-form eigenvalues for `m = 0..=m_max`, `+` before `-` within each m.
pub fn analytic_spectrum(p: &ModelParams, m_max: usize) -> Vec<EigenPair> {
    (0..=m_max)
        .flat_map(|m| {
            let theta_m = mixing_angle(p, m);
            [Branch::Plus, Branch::Minus].map(|branch| EigenPair {
                m,
                branch,
                energy: eigen_energy(p, m, branch),
                theta_m,
            })
        })
        .collect()
}

/// Dressed eigenstates `|m>|+(m)>` and `|m>|-(m)>` embedded in the joint
/// space, where `|+(m)> = cos θ |e> + sin θ |g>` and
/// `|-(m)> = -sin θ |e> + cos θ |g>`.
pub fn dressed_states(
    p: &ModelParams,
    m: usize,
    t: FockTruncation,
) -> Result<(ComplexVector, ComplexVector)> {
    if m > t.n_max() {
        return Err(Error::InvalidParameter(format!(
            "photon number {m} exceeds truncation {}",
            t.n_max()
        )));
    }
    let (s, c) = mixing_angle(p, m).sin_cos();
    let e = t.index(Atom::Excited, m);
    let g = t.index(Atom::Ground, m);
    let mut plus = ComplexVector::zeros(t.dim());
    let mut minus = ComplexVector::zeros(t.dim());
    plus[e] = C64::new(c, 0.0);
    plus[g] = C64::new(s, 0.0);
    minus[e] = C64::new(-s, 0.0);
    minus[g] = C64::new(c, 0.0);
    Ok((plus, minus))
}

/// Label of a resonance detuning.
///
/// `d1..d4` are the single-photon conditions and `p1..p4` the two-photon
/// ones, both ordered (0,-)→(k,+), (0,-)→(k,-), (0,+)→(k,+), (0,+)→(k,-).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ResonanceLabel {
    D1,
    D2,
    D3,
    D4,
    P1,
    P2,
    P3,
    P4,
}

impl ResonanceLabel {
    pub const ALL: [ResonanceLabel; 8] = [
        ResonanceLabel::D1,
        ResonanceLabel::D2,
        ResonanceLabel::D3,
        ResonanceLabel::D4,
        ResonanceLabel::P1,
        ResonanceLabel::P2,
        ResonanceLabel::P3,
        ResonanceLabel::P4,
    ];

    /// Photons absorbed in the transition.
    pub fn photons(self) -> usize {
        match self {
            Self::D1 | Self::D2 | Self::D3 | Self::D4 => 1,
            _ => 2,
        }
    }

    /// Initial zero-photon branch and final k-photon branch.
    pub fn branches(self) -> (Branch, Branch) {
        use Branch::{Minus, Plus};
        match self {
            Self::D1 | Self::P1 => (Minus, Plus),
            Self::D2 | Self::P2 => (Minus, Minus),
            Self::D3 | Self::P3 => (Plus, Plus),
            Self::D4 | Self::P4 => (Plus, Minus),
        }
    }

    pub fn is_single_photon(self) -> bool {
        self.photons() == 1
    }

    pub fn transition(self) -> String {
        let (from, to) = self.branches();
        format!(
            "|ε_{{0,{}}}⟩→|ε_{{{},{}}}⟩",
            from.symbol(),
            self.photons(),
            to.symbol()
        )
    }
}

impl fmt::Display for ResonanceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::D1 => "d1",
            Self::D2 => "d2",
            Self::D3 => "d3",
            Self::D4 => "d4",
            Self::P1 => "p1",
            Self::P2 => "p2",
            Self::P3 => "p3",
            Self::P4 => "p4",
        };
        f.write_str(s)
    }
}

impl FromStr for ResonanceLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Self::ALL
            .into_iter()
            .find(|l| l.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown resonance label '{s}'")))
    }
}

/// A labelled resonance detuning.
#[derive(Clone, Debug, PartialEq)]
pub struct Resonance {
    pub label: ResonanceLabel,
    pub delta_c: f64,
}

/// Cavity-drive detuning at which the `k`-photon transition
/// `|ε_{0,from}> → |ε_{k,to}>` is resonant:
/// `Δ_c = [-to·sqrt((Δ_0 + 2kχ)² + Ω²) + from·sqrt(Δ_0² + Ω²)] / (2k)`.
pub fn resonance_detuning(p: &ModelParams, label: ResonanceLabel) -> Result<f64> {
    p.require_chi()?;
    let k = label.photons() as f64;
    let (from, to) = label.branches();
    let upper = (p.delta_0 + 2.0 * k * p.chi).hypot(p.omega_r);
    let lower = p.delta_0.hypot(p.omega_r);
    Ok((-to.sign() * upper + from.sign() * lower) / (2.0 * k))
}

/// All eight resonance detunings, d1..d4 then p1..p4.
pub fn resonance_detunings(p: &ModelParams) -> Result<Vec<Resonance>> {
    ResonanceLabel::ALL
        .into_iter()
        .map(|label| {
            Ok(Resonance {
                label,
                delta_c: resonance_detuning(p, label)?,
            })
        })
        .collect()
}

/// Mean of an operator in a pure state, `<v|op|v>`.
pub fn expectation(op: &ComplexMatrix, v: &ComplexVector) -> C64 {
    v.dot(&op.matvec(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linop::eig_hermitian;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, SQRT_2};

    fn sample_params() -> ModelParams {
        ModelParams {
            chi: 15.0,
            omega_r: 30.0,
            ..ModelParams::zeroed()
        }
    }

    fn n2() -> FockTruncation {
        FockTruncation::new(2).unwrap()
    }

    #[test]
    fn truncation_bounds() {
        assert!(FockTruncation::new(1).is_err());
        let t = FockTruncation::new(2).unwrap();
        assert_eq!(t.dim(), 6);
        assert_eq!(t.index(Atom::Ground, 0), 3);
        assert_eq!(FockTruncation::default().dim(), 26);
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::default().validate().is_ok());
        let bad = ModelParams {
            kappa: 2.0,
            ..ModelParams::default()
        };
        assert!(bad.validate().is_err());
        let bad = ModelParams {
            eta: -0.1,
            ..ModelParams::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn decoupled_ladder() {
        let p = ModelParams {
            delta_c_prime: 1.0,
            ..ModelParams::zeroed()
        };
        let h = build_h_ddjc(&p, n2());
        let expected = ComplexMatrix::from_diag(&[0.0, 1.0, 2.0, 0.0, 1.0, 2.0]);
        assert_eq!(h, expected);
    }

    #[test]
    fn ddjc_spectrum_at_sample_point() {
        let h = build_h_ddjc(&sample_params(), n2());
        let e = eig_hermitian(&h).unwrap();
        let s5 = 5f64.sqrt();
        let expected = [
            -15.0 * s5,
            -15.0 * SQRT_2,
            -15.0,
            15.0,
            15.0 * SQRT_2,
            15.0 * s5,
        ];
        for (got, want) in e.values.iter().zip(expected) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-10);
        }
    }

    #[test]
    fn ddjc_equals_undriven_full() {
        let p = ModelParams {
            delta_c: -3.0,
            delta_c_prime: 2.5,
            delta_0: 1.0,
            chi: 4.0,
            omega_r: 7.0,
            eta: 0.0,
            ..ModelParams::zeroed()
        };
        let full = build_h_full(
            &ModelParams {
                delta_c: p.delta_c_prime,
                ..p
            },
            n2(),
        );
        assert_eq!(build_h_ddjc(&p, n2()), full);
    }

    #[test]
    fn full_hamiltonian_is_exactly_hermitian() {
        let h = build_h_full(&ModelParams::default(), FockTruncation::default());
        assert_eq!(h.hermiticity_error(), 0.0);
    }

    #[test]
    fn displaced_oscillator_spectrum() {
        // H = Δ_c (a†a) + η (a + a†) = Δ_c (b†b) - η²/Δ_c with b = a + η/Δ_c.
        let (dc, eta) = (1.0, 0.05);
        let p = ModelParams {
            delta_c: dc,
            eta,
            ..ModelParams::zeroed()
        };
        let t = FockTruncation::new(20).unwrap();
        let e = eig_hermitian(&build_h_full(&p, t)).unwrap();
        // Atom decoupled with zero energy: every level is doubly degenerate.
        for m in 0..4 {
            let want = dc * m as f64 - eta * eta / dc;
            assert_abs_diff_eq!(e.values[2 * m], want, epsilon = 1e-10);
            assert_abs_diff_eq!(e.values[2 * m + 1], want, epsilon = 1e-10);
        }
    }

    #[test]
    fn h_eff_reduces_without_conditional_drive() {
        let p = ModelParams {
            delta_c_prime: -40.0,
            delta_0: 0.5,
            chi: 1.0,
            omega_r: 2.0,
            ..ModelParams::zeroed()
        };
        let t = FockTruncation::new(5).unwrap();
        assert_eq!(build_h_eff(&p, t, 0.0), build_h_ddjc(&p, t));
    }

    #[test]
    fn h_eff_matrix_elements() {
        let p = ModelParams {
            delta_c_prime: -7.0,
            delta_0: 0.3,
            chi: 1.5,
            omega_r: 3.0,
            ..ModelParams::zeroed()
        };
        let r = 0.2;
        let t = FockTruncation::new(6).unwrap();
        let h = build_h_eff(&p, t, r);
        for n in 0..t.n_max() {
            let amp = 0.5 * p.omega_r * r * ((n + 1) as f64).sqrt();
            let (e0, e1) = (t.index(Atom::Excited, n), t.index(Atom::Excited, n + 1));
            let (g0, g1) = (t.index(Atom::Ground, n), t.index(Atom::Ground, n + 1));
            assert_abs_diff_eq!(h[(e0, e1)].re, amp, epsilon = 1e-14);
            assert_abs_diff_eq!(h[(g0, g1)].re, -amp, epsilon = 1e-14);
        }
        for n in 0..=t.n_max() {
            let k = t.index(Atom::Excited, n);
            let nf = n as f64;
            let want = nf * p.delta_c_prime + p.delta_0 / 2.0 + nf * p.chi;
            assert_abs_diff_eq!(h[(k, k)].re, want, epsilon = 1e-13);
        }
    }

    #[test]
    fn spectrum_zero_photon_resonant_atom() {
        let p = sample_params();
        let s = analytic_spectrum(&p, 2);
        assert_eq!(s.len(), 6);
        assert_eq!(s[0].energy, 15.0);
        assert_eq!(s[1].energy, -15.0);
        assert_abs_diff_eq!(s[0].theta_m, FRAC_PI_4, epsilon = 1e-15);
        assert_abs_diff_eq!(s[2].energy, 15.0 * SQRT_2, epsilon = 1e-12);
        assert_abs_diff_eq!(s[3].energy, -21.213203435596427, epsilon = 1e-12);
    }

    #[test]
    fn spectrum_without_atomic_drive() {
        let p = ModelParams {
            delta_c_prime: 0.7,
            delta_0: 2.0,
            chi: 3.0,
            ..ModelParams::zeroed()
        };
        for pair in analytic_spectrum(&p, 4) {
            let x = p.delta_0 + 2.0 * pair.m as f64 * p.chi;
            let want = pair.m as f64 * p.delta_c_prime + pair.branch.sign() * x / 2.0;
            assert_abs_diff_eq!(pair.energy, want, epsilon = 1e-13);
            assert_eq!(pair.theta_m, 0.0);
        }
    }

    #[test]
    fn spectrum_is_harmonic_in_limits() {
        let chi = 1.0;
        let weak = ModelParams {
            chi,
            delta_0: 0.5,
            omega_r: 1e-3 * chi,
            ..ModelParams::zeroed()
        };
        let strong = ModelParams {
            omega_r: 1e3 * chi,
            ..weak
        };
        for p in [weak, strong] {
            let e: Vec<f64> = (0..3).map(|m| eigen_energy(&p, m, Branch::Plus)).collect();
            let curvature = ((e[2] - e[1]) - (e[1] - e[0])).abs();
            assert!(curvature < 1e-2 * chi, "curvature {curvature}");
        }
    }

    #[test]
    fn dressed_states_limits() {
        let t = FockTruncation::new(3).unwrap();
        let p = ModelParams {
            delta_0: 1.0,
            chi: 2.0,
            ..ModelParams::zeroed()
        };
        let (plus, minus) = dressed_states(&p, 1, t).unwrap();
        assert_eq!(
            plus,
            ComplexVector::basis(t.dim(), t.index(Atom::Excited, 1))
        );
        assert_eq!(
            minus,
            ComplexVector::basis(t.dim(), t.index(Atom::Ground, 1))
        );

        let p = ModelParams {
            omega_r: 3.0,
            chi: 2.0,
            ..ModelParams::zeroed()
        };
        let (plus, minus) = dressed_states(&p, 0, t).unwrap();
        let (e, g) = (t.index(Atom::Excited, 0), t.index(Atom::Ground, 0));
        assert_abs_diff_eq!(plus[e].re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(plus[g].re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(minus[e].re, -FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(minus[g].re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(plus.dot(&minus).norm(), 0.0, epsilon = 1e-15);

        assert!(dressed_states(&p, 4, t).is_err());
    }

    #[test]
    fn resonance_table_at_working_point() {
        let p = sample_params();
        let d = |l| resonance_detuning(&p, l).unwrap();
        let r = 15.0 * (SQRT_2 - 1.0);
        assert_abs_diff_eq!(d(ResonanceLabel::D3), -r, epsilon = 1e-12);
        assert_abs_diff_eq!(d(ResonanceLabel::D2), r, epsilon = 1e-12);
        assert_abs_diff_eq!(
            d(ResonanceLabel::D1),
            -15.0 * (SQRT_2 + 1.0),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            d(ResonanceLabel::D4),
            15.0 * (SQRT_2 + 1.0),
            epsilon = 1e-12
        );
        let s = 4500f64.sqrt();
        assert_abs_diff_eq!(d(ResonanceLabel::P3), (30.0 - s) / 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d(ResonanceLabel::P4), (30.0 + s) / 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d(ResonanceLabel::P3), -9.2705, epsilon = 1e-4);
    }

    #[test]
    fn resonances_are_energy_differences() {
        let p = ModelParams {
            delta_0: 1.3,
            chi: 4.0,
            omega_r: 6.5,
            ..ModelParams::zeroed()
        };
        for label in ResonanceLabel::ALL {
            let (from, to) = label.branches();
            let k = label.photons();
            let want = (eigen_energy(&p, 0, from) - eigen_energy(&p, k, to)) / k as f64;
            assert_abs_diff_eq!(
                resonance_detuning(&p, label).unwrap(),
                want,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn resonances_need_chi() {
        let p = ModelParams::zeroed();
        assert_eq!(resonance_detunings(&p).unwrap_err(), Error::ZeroChi);
    }

    #[test]
    fn label_round_trip() {
        for l in ResonanceLabel::ALL {
            assert_eq!(l.to_string().parse::<ResonanceLabel>().unwrap(), l);
        }
        assert!("d5".parse::<ResonanceLabel>().is_err());
        assert_eq!(ResonanceLabel::D3.transition(), "|ε_{0,+}⟩→|ε_{1,+}⟩");
    }
}
