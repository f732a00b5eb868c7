//! Lindblad master equation: Liouvillian construction, steady state, RK4
//! time evolution, and cavity photon statistics.
//!
//! Density matrices are vectorised by stacking columns, so element `(i, j)`
//! of a `D x D` matrix lands at index `j * D + i`. With that convention
//! `vec(A X B) = (Bᵀ ⊗ A) vec(X)` and
//!
//! ```text
//! L = -i (I ⊗ H - Hᵀ ⊗ I)
//!     + Σ_k (r_k / 2) (2 C̄_k ⊗ C_k - I ⊗ C_k†C_k - (C_k†C_k)ᵀ ⊗ I)
//! ```

use crate::error::{Error, Result};
use crate::linop::{eig_hermitian, solve_linear, ComplexMatrix, ComplexVector, C64, I, ONE, ZERO};
use crate::model::{build_h_full, Atom, FockTruncation, ModelParams, Operators};

/// Largest Liouvillian dimension `D²` handled by the dense solver.
pub const MAX_LIOUVILLIAN_DIM: usize = 4096;
/// Steady-state residual bound relative to `‖L‖₁`.
pub const STEADY_STATE_RESIDUAL: f64 = 1e-8;
/// Eigenvalues below this make [`steady_state`] fail.
pub const POSITIVITY_FAILURE: f64 = -1e-6;
/// RK4 stability heuristic: `dt ‖L‖₁` must not exceed this.
pub const EVOLVE_STEP_LIMIT: f64 = 0.1;
/// `⟨a†a⟩` (or `P_1`) below this is treated as an empty cavity.
pub const MIN_PHOTONS: f64 = 1e-12;

/// Validation tolerances of [`DensityMatrix::new`].
pub mod state_tol {
    pub const HERMITIAN: f64 = 1e-9;
    pub const TRACE: f64 = 1e-9;
    pub const POSITIVITY: f64 = -1e-8;
}

/// A damping channel `rate * D[op]`.
#[derive(Clone, Debug)]
pub struct CollapseOp {
    pub rate: f64,
    pub op: ComplexMatrix,
}

impl CollapseOp {
    pub fn new(rate: f64, op: ComplexMatrix) -> Self {
        Self { rate, op }
    }
}

/// Trace-one, Hermitian, positive semidefinite state.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidState("density matrix must be square".into()));
        }
        let herm = matrix.hermiticity_error();
        if herm > state_tol::HERMITIAN {
            return Err(Error::InvalidState(format!("not Hermitian ({herm:e})")));
        }
        let tr = matrix.trace();
        if (tr - ONE).norm() > state_tol::TRACE {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = min_eigenvalue(&matrix)?;
        if min < state_tol::POSITIVITY {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { matrix })
    }

    /// Wraps a matrix without checks; for trusted numerical output.
    pub fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    /// `|v><v| / <v|v>`.
    pub fn pure(v: &ComplexVector) -> Self {
        let norm2 = v.dot(v).re;
        let n = v.len();
        let m = ComplexMatrix::from_fn(n, n, |i, j| v[i] * v[j].conj() / norm2);
        Self { matrix: m }
    }

    /// Projector onto the basis state `|atom, n>`.
    pub fn basis_state(t: FockTruncation, atom: Atom, n: usize) -> Self {
        Self::pure(&ComplexVector::basis(t.dim(), t.index(atom, n)))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Column-stacked vectorisation.
    pub fn to_vec(&self) -> ComplexVector {
        vectorize(&self.matrix)
    }

    /// `Tr(op ρ)`.
    pub fn expect(&self, op: &ComplexMatrix) -> C64 {
        op.trace_product(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        min_eigenvalue(&self.matrix)
    }

    /// Trace norm `‖ρ - σ‖₁ = Σ |λ_k(ρ - σ)|`.
    pub fn trace_distance(&self, other: &Self) -> Result<f64> {
        let diff = &self.matrix - &other.matrix;
        let herm = ComplexMatrix::from_fn(diff.rows(), diff.cols(), |i, j| {
            0.5 * (diff[(i, j)] + diff[(j, i)].conj())
        });
        Ok(eig_hermitian(&herm)?.values.iter().map(|l| l.abs()).sum())
    }

    /// Fock truncation implied by the joint dimension `2 (N + 1)`.
    pub fn truncation(&self) -> Result<FockTruncation> {
        let d = self.dim();
        if !d.is_multiple_of(2) || d < 6 {
            return Err(Error::DimensionMismatch {
                expected: 6,
                found: d,
            });
        }
        FockTruncation::new(d / 2 - 1)
    }
}

fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    let herm = ComplexMatrix::from_fn(m.rows(), m.cols(), |i, j| {
        0.5 * (m[(i, j)] + m[(j, i)].conj())
    });
    Ok(eig_hermitian(&herm)?.values.first().copied().unwrap_or(0.0))
}

/// Column-stacked `vec(m)`.
pub fn vectorize(m: &ComplexMatrix) -> ComplexVector {
    let (r, c) = (m.rows(), m.cols());
    let mut out = Vec::with_capacity(r * c);
    for j in 0..c {
        for i in 0..r {
            out.push(m[(i, j)]);
        }
    }
    ComplexVector::from_vec(out)
}

/// Inverse of [`vectorize`] for a `dim x dim` matrix.
pub fn unvectorize(v: &ComplexVector, dim: usize) -> ComplexMatrix {
    assert_eq!(v.len(), dim * dim);
    ComplexMatrix::from_fn(dim, dim, |i, j| v[j * dim + i])
}

/// Liouvillian superoperator acting on column-stacked density matrices.
#[derive(Clone, Debug)]
pub struct Liouvillian {
    hilbert_dim: usize,
    matrix: ComplexMatrix,
}

impl Liouvillian {
    /// Hilbert-space dimension `D`.
    pub fn hilbert_dim(&self) -> usize {
        self.hilbert_dim
    }

    /// Superoperator dimension `D²`.
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn norm(&self) -> f64 {
        self.matrix.norm_one()
    }

    /// `L[ρ]` as a matrix.
    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        unvectorize(&self.matrix.matvec(&vectorize(rho)), self.hilbert_dim)
    }

    /// `‖L vec(ρ)‖₂ / ‖L‖₁`.
    pub fn relative_residual(&self, rho: &DensityMatrix) -> f64 {
        self.matrix.matvec(&rho.to_vec()).norm() / self.norm()
    }
}

/// Builds `L` for Hamiltonian `h` and the given damping channels.
pub fn build_liouvillian(h: &ComplexMatrix, collapse_ops: &[CollapseOp]) -> Result<Liouvillian> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch {
            expected: h.rows(),
            found: h.cols(),
        });
    }
    let d = h.rows();
    for c in collapse_ops {
        if c.op.rows() != d || c.op.cols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: c.op.rows(),
            });
        }
        if !(c.rate >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "collapse rate must be nonnegative, got {}",
                c.rate
            )));
        }
    }
    let id = ComplexMatrix::identity(d);
    let mut l = ComplexMatrix::zeros(d * d, d * d);
    add_kron(&mut l, -I, &id, h);
    add_kron(&mut l, I, &h.transpose(), &id);
    for c in collapse_ops {
        if c.rate == 0.0 {
            continue;
        }
        let cdc = &c.op.adjoint() * &c.op;
        let r = C64::new(0.5 * c.rate, 0.0);
        add_kron(&mut l, 2.0 * r, &c.op.conj(), &c.op);
        add_kron(&mut l, -r, &id, &cdc);
        add_kron(&mut l, -r, &cdc.transpose(), &id);
    }
    Ok(Liouvillian {
        hilbert_dim: d,
        matrix: l,
    })
}

/// `out += s (a ⊗ b)` touching only nonzero products.
fn add_kron(out: &mut ComplexMatrix, s: C64, a: &ComplexMatrix, b: &ComplexMatrix) {
    let nonzeros = |m: &ComplexMatrix| {
        let mut v = Vec::new();
        for i in 0..m.rows() {
            for (j, &z) in m.row(i).iter().enumerate() {
                if z != ZERO {
                    v.push((i, j, z));
                }
            }
        }
        v
    };
    let (nb_r, nb_c) = (b.rows(), b.cols());
    let b_nz = nonzeros(b);
    for (ai, aj, az) in nonzeros(a) {
        let sa = s * az;
        for &(bi, bj, bz) in &b_nz {
            out[(ai * nb_r + bi, aj * nb_c + bj)] += sa * bz;
        }
    }
}

/// Liouvillian of the cavity-driven model: `H_I` with cavity decay κ on `a`
/// and atomic decay γ on `σ_-`.
pub fn model_liouvillian(p: &ModelParams, t: FockTruncation) -> Result<Liouvillian> {
    p.validate()?;
    let ops = Operators::new(t);
    let h = build_h_full(p, t);
    build_liouvillian(
        &h,
        &[
            CollapseOp::new(p.kappa, ops.a),
            CollapseOp::new(p.gamma, ops.sigma_minus),
        ],
    )
}

/// Diagnostics from a steady-state solve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveReport {
    /// `‖L x‖₂ / ‖L‖₁` for the raw linear-solve output `x`.
    pub raw_residual: f64,
    /// Same quantity after Hermitisation and trace renormalisation.
    pub residual: f64,
    pub min_eigenvalue: f64,
}

impl SolveReport {
    pub fn within_bound(&self) -> bool {
        self.raw_residual <= STEADY_STATE_RESIDUAL && self.residual <= STEADY_STATE_RESIDUAL
    }
}

/// Steady state `L ρ = 0`, `Tr ρ = 1`.
pub fn steady_state(l: &Liouvillian) -> Result<DensityMatrix> {
    steady_state_with_report(l).map(|(rho, _)| rho)
}

/// Steady state plus solver diagnostics.
///
/// The row of `L` belonging to element `(0, 0)` is replaced by the trace
/// functional with right-hand side 1. Rows of diagonal elements sum to zero
/// (trace preservation), so dropping one of them keeps the remaining rows
/// independent whenever the steady state is unique.
pub fn steady_state_with_report(l: &Liouvillian) -> Result<(DensityMatrix, SolveReport)> {
    let d = l.hilbert_dim;
    let n = l.dim();
    if n > MAX_LIOUVILLIAN_DIM {
        return Err(Error::TooLarge {
            dim: n,
            limit: MAX_LIOUVILLIAN_DIM,
        });
    }
    let norm = l.norm();
    let perm = SolveOrdering::new(d);
    let mut augmented = ComplexMatrix::zeros(n, n);
    // Rows and columns are permuted into field-major order so that the
    // elimination stays banded; the trace row goes last.
    for (new_r, &old_r) in perm.rows.iter().enumerate() {
        if old_r == 0 {
            for k in 0..d {
                augmented[(new_r, perm.col_position[k * d + k])] = ONE;
            }
            continue;
        }
        for (old_c, &z) in l.matrix.row(old_r).iter().enumerate() {
            if z != ZERO {
                augmented[(new_r, perm.col_position[old_c])] = z;
            }
        }
    }
    let mut rhs = ComplexVector::zeros(n);
    rhs[n - 1] = ONE;
    let solved = solve_linear(&augmented, &rhs)?;
    let mut raw = ComplexVector::zeros(n);
    for old in 0..n {
        raw[old] = solved[perm.col_position[old]];
    }
    let raw_residual = l.matrix.matvec(&raw).norm() / norm;

    let m = unvectorize(&raw, d);
    let herm = ComplexMatrix::from_fn(d, d, |i, j| 0.5 * (m[(i, j)] + m[(j, i)].conj()));
    let tr = herm.trace().re;
    let rho = DensityMatrix::from_matrix_unchecked(herm.scale_real(1.0 / tr));
    let min = rho.min_eigenvalue()?;
    if min < POSITIVITY_FAILURE {
        return Err(Error::PositivityViolation {
            min_eigenvalue: min,
        });
    }
    let report = SolveReport {
        raw_residual,
        residual: l.relative_residual(&rho),
        min_eigenvalue: min,
    };
    Ok((rho, report))
}

/// Field-major reordering of the vectorised basis used by the steady-state
/// solve. Hilbert index `s (N+1) + n` maps to `2n + s`, which keeps every
/// Hamiltonian and jump coupling within a narrow band.
struct SolveOrdering {
    /// Original row index for each position of the permuted system.
    rows: Vec<usize>,
    /// Position of each original column in the permuted system.
    col_position: Vec<usize>,
}

impl SolveOrdering {
    fn new(d: usize) -> Self {
        let levels = d / 2;
        let field_major = |k: usize| {
            if d.is_multiple_of(2) && levels > 0 {
                2 * (k % levels) + k / levels
            } else {
                k
            }
        };
        let n = d * d;
        let mut col_position = vec![0; n];
        for j in 0..d {
            for i in 0..d {
                col_position[j * d + i] = field_major(j) * d + field_major(i);
            }
        }
        // Same permutation on rows, except the trace row (old index 0) moves
        // to the end.
        let mut rows = vec![0; n];
        for (old, &new) in col_position.iter().enumerate() {
            rows[new] = old;
        }
        let trace_pos = col_position[0];
        rows.remove(trace_pos);
        rows.push(0);
        Self { rows, col_position }
    }
}

/// Compressed sparse rows of a dense matrix, for repeated products.
struct SparseRows {
    starts: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl SparseRows {
    fn from_dense(m: &ComplexMatrix) -> Self {
        let mut starts = Vec::with_capacity(m.rows() + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        starts.push(0);
        for i in 0..m.rows() {
            for (j, &z) in m.row(i).iter().enumerate() {
                if z != ZERO {
                    cols.push(j);
                    vals.push(z);
                }
            }
            starts.push(cols.len());
        }
        Self { starts, cols, vals }
    }

    fn mul_into(&self, x: &[C64], out: &mut [C64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let (a, b) = (self.starts[i], self.starts[i + 1]);
            *o = self.cols[a..b]
                .iter()
                .zip(&self.vals[a..b])
                .map(|(&j, v)| v * x[j])
                .sum();
        }
    }
}

/// Fixed-step RK4 integration of `vec(ρ)' = L vec(ρ)` up to `t_final`.
///
/// The step actually used is `t_final / ceil(t_final / dt)`.
pub fn evolve(
    l: &Liouvillian,
    rho0: &DensityMatrix,
    t_final: f64,
    dt: f64,
) -> Result<DensityMatrix> {
    if rho0.dim() != l.hilbert_dim {
        return Err(Error::DimensionMismatch {
            expected: l.hilbert_dim,
            found: rho0.dim(),
        });
    }
    if !(dt > 0.0) || !(t_final >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need dt > 0 and t_final >= 0, got dt = {dt}, t_final = {t_final}"
        )));
    }
    let product = dt * l.norm();
    if product > EVOLVE_STEP_LIMIT {
        return Err(Error::StepTooLarge {
            dt,
            product,
            limit: EVOLVE_STEP_LIMIT,
        });
    }
    if t_final == 0.0 {
        return Ok(rho0.clone());
    }
    let steps = (t_final / dt).ceil() as usize;
    let h = t_final / steps as f64;
    let op = SparseRows::from_dense(&l.matrix);
    let n = l.dim();
    let mut x = rho0.to_vec().into_vec();
    let mut k1 = vec![ZERO; n];
    let mut k2 = vec![ZERO; n];
    let mut k3 = vec![ZERO; n];
    let mut k4 = vec![ZERO; n];
    let mut tmp = vec![ZERO; n];
    for _ in 0..steps {
        op.mul_into(&x, &mut k1);
        for i in 0..n {
            tmp[i] = x[i] + 0.5 * h * k1[i];
        }
        op.mul_into(&tmp, &mut k2);
        for i in 0..n {
            tmp[i] = x[i] + 0.5 * h * k2[i];
        }
        op.mul_into(&tmp, &mut k3);
        for i in 0..n {
            tmp[i] = x[i] + h * k3[i];
        }
        op.mul_into(&tmp, &mut k4);
        for i in 0..n {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    Ok(DensityMatrix::from_matrix_unchecked(unvectorize(
        &ComplexVector::from_vec(x),
        l.hilbert_dim,
    )))
}

/// `P_n = Σ_s <s,n|ρ|s,n>`, clamped to `[0, 1]`.
pub fn photon_number_dist(rho: &DensityMatrix, n: usize) -> Result<f64> {
    let t = rho.truncation()?;
    if n > t.n_max() {
        return Err(Error::InvalidParameter(format!(
            "photon number {n} exceeds truncation {}",
            t.n_max()
        )));
    }
    let m = rho.matrix();
    let p: f64 = Atom::ALL
        .iter()
        .map(|&s| {
            let k = t.index(s, n);
            m[(k, k)].re
        })
        .sum();
    Ok(p.clamp(0.0, 1.0))
}

/// Mean photon number `Tr(a†a ρ)`.
pub fn mean_photon_number(rho: &DensityMatrix) -> Result<f64> {
    let ops = Operators::new(rho.truncation()?);
    Ok(rho.expect(&ops.num).re)
}

/// Equal-time second-order correlation `Tr(a†² a² ρ) / Tr(a†a ρ)²`.
pub fn g2_zero(rho: &DensityMatrix) -> Result<f64> {
    let ops = Operators::new(rho.truncation()?);
    let mean_n = rho.expect(&ops.num).re;
    if mean_n <= MIN_PHOTONS {
        return Err(Error::NoPhotons { mean_n });
    }
    let a2 = &ops.a * &ops.a;
    let ad2a2 = &a2.adjoint() * &a2;
    let num = rho.expect(&ad2a2).re;
    Ok((num / (mean_n * mean_n)).max(0.0))
}

/// Weak-drive estimate `2 P_2 / P_1²`.
pub fn g2_weak_drive_estimate(rho: &DensityMatrix) -> Result<f64> {
    let p1 = photon_number_dist(rho, 1)?;
    let p2 = photon_number_dist(rho, 2)?;
    g2_from_populations(p1, p2)
}

fn g2_from_populations(p1: f64, p2: f64) -> Result<f64> {
    if p1 <= MIN_PHOTONS {
        return Err(Error::NoPhotons { mean_n: p1 });
    }
    Ok(2.0 * p2 / (p1 * p1))
}

/// Cavity statistics of one state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhotonStats {
    pub p0: f64,
    pub p1: f64,
    pub p2: f64,
    pub mean_n: f64,
    /// `None` when the cavity is empty.
    pub g2: Option<f64>,
    pub g2_weak: Option<f64>,
}

pub fn photon_stats(rho: &DensityMatrix) -> Result<PhotonStats> {
    let p = |n| photon_number_dist(rho, n);
    Ok(PhotonStats {
        p0: p(0)?,
        p1: p(1)?,
        p2: p(2)?,
        mean_n: mean_photon_number(rho)?,
        g2: g2_zero(rho).ok(),
        g2_weak: g2_weak_drive_estimate(rho).ok(),
    })
}
