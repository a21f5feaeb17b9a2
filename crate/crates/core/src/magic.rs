//! Magic entropy, magic power and the magic rate.

use nalgebra::DVector;
use serde::Serialize;

use crate::error::Result;
use crate::search::{is_monomial, sphere_search, SearchConfig};
use crate::sensitivity::{spectral_rates, transition_matrix, verify_k_local, UNITARY_TOL};
use crate::spectrum::{fourier_entropy, pauli_spectrum, spectrum_unchecked};
use crate::tensor::{from_pauli_coefficients, label_weights, operator_norm, pauli_op, Operator, PauliIndex, C64};

/// Outcome of a nonconvex maximization; `value` is a certified lower bound on
/// the true supremum.
#[derive(Clone, Debug, Serialize)]
pub struct SearchResult {
    pub value: f64,
    /// Operator (magic power) or density operator (cohering power) attaining `value`.
    #[serde(skip)]
    pub witness: Operator,
    /// Ascent starts tried (basis-vector starts plus random restarts).
    pub restarts_used: usize,
    pub converged: bool,
    /// True when `value` is known to equal the supremum.
    pub exact: bool,
}

/// `M[U] = max_P H[U P U†]` over the `n(d²−1)` weight-1 Paulis.
pub fn magic_entropy(u: &Operator) -> Result<f64> {
    u.require_unitary(UNITARY_TOL)?;
    let (d, n) = (u.d(), u.n());
    let mut best: f64 = 0.0;
    for site in 0..n {
        for s in 0..d {
            for t in 0..d {
                if (s, t) == (0, 0) {
                    continue;
                }
                let p = pauli_op(&PauliIndex::single(d, n, site, s, t))?;
                best = best.max(fourier_entropy(&pauli_spectrum(&p.conjugate_by(u))?));
            }
        }
    }
    Ok(best)
}

/// `H[UOU†] − H[O]` for a nonzero `O` (rescaled to unit norm).
pub fn magic_change(u: &Operator, o: &Operator) -> Result<f64> {
    let o = o.normalized()?;
    Ok(fourier_entropy(&spectrum_unchecked(&o.conjugate_by(u))) - fourier_entropy(&spectrum_unchecked(&o)))
}

/// Lower bound on `𝓜[U] = sup_O |H[UOU†] − H[O]|` by gradient ascent over
/// the Pauli-coefficient sphere, started from every Pauli operator and from
/// `config.restarts` random operators.
pub fn magic_power_search(u: &Operator, config: &SearchConfig) -> Result<SearchResult> {
    let t = transition_matrix(u)?;
    let (d, n) = (u.d(), u.n());
    if is_monomial(&t.mat, 1e-9) {
        // Clifford: the transition matrix permutes Paulis, so no entropy changes.
        return Ok(SearchResult {
            value: 0.0,
            witness: pauli_op(&PauliIndex::identity(d, n))?,
            restarts_used: 0,
            converged: true,
            exact: true,
        });
    }
    let starts: Vec<usize> = (1..t.mat.nrows()).collect();
    let best = sphere_search(&t.mat, &starts, config);
    let witness = coefficients_to_operator(d, n, &best.point)?;
    let value = magic_change(u, &witness)?.abs();
    Ok(SearchResult {
        value,
        witness,
        restarts_used: best.starts,
        converged: best.converged,
        exact: false,
    })
}

fn coefficients_to_operator(d: usize, n: usize, c: &DVector<C64>) -> Result<Operator> {
    let coeffs: Vec<C64> = c.iter().copied().collect();
    from_pauli_coefficients(d, n, &coeffs)
}

/// Removes the identity component and renormalizes.
pub fn traceless_part(o: &Operator) -> Result<Operator> {
    let shift = o.trace() / o.dim() as f64;
    let id = Operator::identity(o.d(), o.n())?;
    (o - &id.scale(shift)).normalized()
}

/// `R_M(H, O) = d/dt H[U_t O U_t†]` at `t = 0` with `U_t = exp(−itH)`, i.e.
/// `−Σ_a P'_a log₂ P_a` with `0 log 0 = 0` (the `Σ P'_a` term vanishes).
pub fn magic_rate(h: &Operator, o: &Operator) -> Result<f64> {
    let rates = spectral_rates(h, o)?;
    let probs = spectrum_unchecked(o);
    Ok(rates
        .iter()
        .zip(probs.probs())
        .filter(|(_, &p)| p > 0.0)
        .map(|(r, p)| -r * p.log2())
        .sum())
}

#[derive(Clone, Debug, Serialize)]
pub struct MagicRateReport {
    pub rate: f64,
    pub bound: f64,
    /// `|rate| / bound`, for logging how loose the bound is.
    pub ratio: f64,
    pub satisfied: bool,
}

/// Checks `|R_M| ≤ 8 d^k ‖H‖∞ log₂(e)/e` for `H` supported on `k` qudits.
pub fn magic_rate_bound_check(h: &Operator, o: &Operator, k: usize) -> Result<MagicRateReport> {
    verify_k_local(h, k)?;
    let rate = magic_rate(h, o)?;
    let e = std::f64::consts::E;
    let bound = 8.0 * (h.d() as f64).powi(k as i32) * operator_norm(h) * e.log2() / e;
    let ratio = if bound > 0.0 { rate.abs() / bound } else { 0.0 };
    Ok(MagicRateReport { rate, bound, ratio, satisfied: rate.abs() <= bound + 1e-9 })
}

/// Number of weight-1 labels, `n(d²−1)`.
pub fn weight_one_count(d: usize, n: usize) -> usize {
    label_weights(d, n).into_iter().filter(|&w| w == 1).count()
}
