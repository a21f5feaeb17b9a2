//! Relative entropy of coherence, cohering power, coherence rate and `D_max`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::magic::SearchResult;
use crate::search::{is_monomial, restart_rng, sphere_search, SearchConfig};
use crate::sensitivity::{verify_k_local, UNITARY_TOL};
use crate::random::random_density;
use crate::tensor::{
    hermitian_eigh, operator_norm, projector, validate_state, von_neumann_entropy, xlog2x,
    Operator, C64,
};

/// Positivity and trace tolerance for [`DensityOperator`].
pub const STATE_TOL: f64 = 1e-10;

/// Diagonal entries at or below this make `log Δ(ρ)` undefined.
pub const SINGULAR_DIAGONAL: f64 = 1e-12;

/// A verified density operator.
#[derive(Clone, Debug)]
pub struct DensityOperator {
    op: Operator,
}

impl DensityOperator {
    pub fn new(op: Operator) -> Result<Self> {
        validate_state(&op, STATE_TOL)?;
        Ok(Self { op })
    }

    pub fn from_pure(d: usize, n: usize, psi: &[C64]) -> Result<Self> {
        Self::new(projector(d, n, psi)?)
    }

    pub fn maximally_mixed(d: usize, n: usize) -> Result<Self> {
        let id = Operator::identity(d, n)?;
        let dim = id.dim() as f64;
        Ok(Self { op: id.scale_re(1.0 / dim) })
    }

    pub fn operator(&self) -> &Operator {
        &self.op
    }

    /// Completely dephased state `Δ(ρ)`.
    pub fn dephased(&self) -> DensityOperator {
        let m = self.op.matrix();
        let diag = DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| if i == j { m[(i, i)] } else { C64::new(0.0, 0.0) });
        DensityOperator { op: Operator::new(self.op.d(), self.op.n(), diag).expect("same shape") }
    }

    /// `(1 − ε)ρ + ε I/d^n`.
    pub fn mixed_with_identity(&self, eps: f64) -> Result<DensityOperator> {
        let mixed = DensityOperator::maximally_mixed(self.op.d(), self.op.n())?;
        DensityOperator::new(&self.op.scale_re(1.0 - eps) + &mixed.op.scale_re(eps))
    }
}

fn diagonal_entropy(m: &DMatrix<C64>) -> f64 {
    (0..m.nrows()).map(|i| -xlog2x(m[(i, i)].re)).sum()
}

/// `C_r(ρ) = S(Δ(ρ)) − S(ρ)` in bits.
pub fn rel_entropy_coherence(rho: &DensityOperator) -> f64 {
    (diagonal_entropy(rho.op.matrix()) - von_neumann_entropy(&rho.op)).max(0.0)
}

fn coherence_of(op: &Operator) -> f64 {
    (diagonal_entropy(op.matrix()) - von_neumann_entropy(op)).max(0.0)
}

/// `C_r(UρU†) − C_r(ρ)`.
pub fn coherence_change(u: &Operator, rho: &DensityOperator) -> Result<f64> {
    u.same_shape(&rho.op)?;
    Ok(coherence_of(&rho.op.conjugate_by(u)) - coherence_of(&rho.op))
}

/// Lower bound on the cohering power `sup_ρ |C_r(UρU†) − C_r(ρ)|`.
///
/// Pure states are searched by gradient ascent (for pure `ψ`, `C_r = H(|ψ|²)`,
/// so the objective is the entropy gain of `U` on the amplitude sphere),
/// started from every computational basis state and `config.restarts` random
/// states; `config.mixed_samples` Hilbert–Schmidt mixed states are evaluated
/// directly.
pub fn cohering_power_search(u: &Operator, config: &SearchConfig) -> Result<SearchResult> {
    u.require_unitary(UNITARY_TOL)?;
    let (d, n) = (u.d(), u.n());
    let dim = u.dim();
    if is_monomial(u.matrix(), 1e-12) {
        // Rephased permutations of the incoherent basis commute with dephasing.
        return Ok(SearchResult {
            value: 0.0,
            witness: DensityOperator::maximally_mixed(d, n)?.op,
            restarts_used: 0,
            converged: true,
            exact: true,
        });
    }
    let basis: Vec<usize> = (0..dim).collect();
    let pure = sphere_search(u.matrix(), &basis, config);
    let psi: Vec<C64> = pure.point.iter().copied().collect();
    let mut witness = DensityOperator::from_pure(d, n, &psi)?;
    let mut value = coherence_change(u, &witness)?.abs();
    let mixed: Vec<(f64, Operator)> = (0..config.mixed_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = restart_rng(config.seed ^ 0x6d69786564, i as u64);
            let rho = random_density(d, n, &mut rng).expect("shape already validated");
            let gain = (coherence_of(&rho.conjugate_by(u)) - coherence_of(&rho)).abs();
            (gain, rho)
        })
        .collect();
    if let Some((gain, rho)) = mixed.into_iter().max_by(|a, b| a.0.total_cmp(&b.0)) {
        if gain > value {
            value = gain;
            witness = DensityOperator::new(rho)?;
        }
    }
    Ok(SearchResult {
        value,
        witness: witness.op,
        restarts_used: pure.starts,
        converged: pure.converged,
        exact: false,
    })
}

/// `R_C(H, ρ) = d/dt C_r(e^{−itH} ρ e^{itH})` at `t = 0`, which equals
/// `i Tr([ρ, log₂ Δ(ρ)] H)`.
pub fn coherence_rate(h: &Operator, rho: &DensityOperator) -> Result<f64> {
    h.same_shape(&rho.op)?;
    h.require_hermitian(1e-9)?;
    let m = rho.op.matrix();
    let mut log_diag = DMatrix::zeros(m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        let p = m[(i, i)].re;
        if p <= SINGULAR_DIAGONAL {
            return Err(Error::SingularState { index: i, value: p });
        }
        log_diag[(i, i)] = C64::new(p.log2(), 0.0);
    }
    let comm = m * &log_diag - &log_diag * m;
    Ok(((comm * h.matrix()).trace() * C64::new(0.0, 1.0)).re)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DmaxResult {
    /// `log₂ min{λ : ρ ≤ λσ}`; `+∞` when the support condition fails.
    pub value: f64,
    pub support_violation: bool,
}

/// Max-relative entropy `D_max(ρ‖σ)` in bits.
pub fn d_max(rho: &DensityOperator, sigma: &DensityOperator) -> Result<DmaxResult> {
    rho.op.same_shape(&sigma.op)?;
    let (vals, vecs) = hermitian_eigh(sigma.op.matrix());
    let cutoff = 1e-12 * vals.iter().copied().fold(0.0, f64::max).max(1.0);
    let kept: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > cutoff).collect();
    let v = DMatrix::from_fn(vecs.nrows(), kept.len(), |r, c| vecs[(r, kept[c])]);
    let inside = v.adjoint() * rho.op.matrix() * &v;
    let leaked = 1.0 - inside.trace().re;
    if leaked > 1e-9 {
        return Ok(DmaxResult { value: f64::INFINITY, support_violation: true });
    }
    let scale = DMatrix::from_diagonal(&DVector::from_iterator(
        kept.len(),
        kept.iter().map(|&i| C64::new(1.0 / vals[i].sqrt(), 0.0)),
    ));
    let sandwiched = &scale * inside * &scale;
    let (evals, _) = hermitian_eigh(&sandwiched);
    let top = evals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(DmaxResult { value: top.log2(), support_violation: false })
}

#[derive(Clone, Debug, Serialize)]
pub struct CoherenceRateReport {
    pub rate: f64,
    pub bound: f64,
    pub satisfied: bool,
}

/// Checks `|R_C| ≤ 4‖H‖∞ D_max(ρ‖Δ(ρ))`.
pub fn coherence_rate_bound_check(h: &Operator, rho: &DensityOperator) -> Result<CoherenceRateReport> {
    let rate = coherence_rate(h, rho)?;
    let dmax = d_max(rho, &rho.dephased())?;
    let bound = 4.0 * operator_norm(h) * dmax.value;
    Ok(CoherenceRateReport { rate, bound, satisfied: rate.abs() <= bound + 1e-9 })
}

/// Checks `|R_C| ≤ 4‖H‖∞ k log₂ d` for `H` supported on `k` qudits.
pub fn coherence_rate_local_bound_check(h: &Operator, rho: &DensityOperator, k: usize) -> Result<CoherenceRateReport> {
    verify_k_local(h, k)?;
    let rate = coherence_rate(h, rho)?;
    let bound = 4.0 * operator_norm(h) * k as f64 * (h.d() as f64).log2();
    Ok(CoherenceRateReport { rate, bound, satisfied: rate.abs() <= bound + 1e-9 })
}
