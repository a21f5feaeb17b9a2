//! Heisenberg transition matrices and circuit sensitivity.
//!
//! For `O = Σ_a c_a P_a` with `‖O‖₂ = 1` the coefficient vector `c` is a unit
//! vector, and conjugation acts on it linearly: the coefficients of `UOU†` are
//! `Tc`, with `T[b,a] = <P_b, U P_a U†>`. The influence is the quadratic form
//! `I[O] = c† W c` with `W = diag(|a|)`, hence
//!
//! ```text
//! I[UOU†] − I[O] = c† (T† W T − W) c = c† M c.
//! ```
//!
//! The supremum of `|c† M c|` over unit `c` is the spectral norm of the
//! Hermitian matrix `M`, attained at an eigenvector of its largest-magnitude
//! eigenvalue. The identity label is fixed by `T` and has weight 0, so `M`
//! annihilates it and restricting to traceless operators changes nothing.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::eigen::{quadratic_form, top_abs_eigen};
use crate::error::{Error, Result};
use crate::spectrum::{influence_total, pauli_spectrum, NORM_TOL};
use crate::tensor::{
    label_weights, operator_norm, pauli_coefficients, pauli_op, support_residual, Operator, PauliIndex,
    SubsetMask, C64,
};

/// Tolerance on `‖U†U − I‖` accepted by the sensitivity routines.
pub const UNITARY_TOL: f64 = 1e-8;

/// Default coefficient threshold for [`is_stable`].
pub const STABLE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Pauli,
    Gamma,
}

/// `T[b,a] = <B_b, U B_a U†>` in an orthonormal operator basis.
#[derive(Clone, Debug)]
pub struct TransitionMatrix {
    pub d: usize,
    pub n: usize,
    pub basis: Basis,
    pub mat: DMatrix<C64>,
}

impl TransitionMatrix {
    /// `‖T†T − I‖` as the largest entry deviation.
    pub fn unitarity_deviation(&self) -> f64 {
        let prod = self.mat.adjoint() * &self.mat;
        let mut worst: f64 = 0.0;
        for j in 0..prod.ncols() {
            for i in 0..prod.nrows() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((prod[(i, j)] - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }
}

/// Transition matrix of `U` in the generalized Pauli basis.
pub fn transition_matrix(u: &Operator) -> Result<TransitionMatrix> {
    u.require_unitary(UNITARY_TOL)?;
    let (d, n) = (u.d(), u.n());
    let count = (d * d).pow(n as u32);
    let columns: Vec<Vec<C64>> = (0..count)
        .into_par_iter()
        .map(|label| {
            let p = pauli_op(&PauliIndex::from_label(label, d, n)).expect("shape already validated");
            pauli_coefficients(&p.conjugate_by(u))
        })
        .collect();
    let mat = DMatrix::from_fn(count, count, |b, a| columns[a][b]);
    Ok(TransitionMatrix { d, n, basis: Basis::Pauli, mat })
}

#[derive(Clone, Debug, Serialize)]
pub struct SensitivityReport {
    /// Largest `|c† M c|` over unit coefficient vectors.
    pub value: f64,
    /// Coefficient vector attaining `value`, in basis-label order.
    #[serde(skip)]
    pub witness: Vec<C64>,
    pub iterations: usize,
    pub degenerate: bool,
}

/// `M = T† W T − W`.
pub fn sensitivity_form(t: &DMatrix<C64>, weights: &[usize]) -> DMatrix<C64> {
    let w = DMatrix::from_diagonal(&DVector::from_iterator(
        weights.len(),
        weights.iter().map(|&k| C64::new(k as f64, 0.0)),
    ));
    let mut m = t.adjoint() * &w * t - w;
    // Symmetrize away rounding so the Hermitian solver sees an exact input.
    let mh = m.adjoint();
    m = (&m + mh) * C64::new(0.5, 0.0);
    m
}

pub(crate) fn report_from_form(m: &DMatrix<C64>) -> Result<SensitivityReport> {
    let top = top_abs_eigen(m)?;
    Ok(SensitivityReport {
        value: top.value,
        witness: top.vector.iter().copied().collect(),
        iterations: top.iterations,
        degenerate: top.degenerate,
    })
}

/// `CiS[U] = max_{‖O‖₂=1} |I[UOU†] − I[O]|`, computed exactly as the spectral
/// norm of the sensitivity form.
pub fn circuit_sensitivity(u: &Operator) -> Result<SensitivityReport> {
    let t = transition_matrix(u)?;
    let m = sensitivity_form(&t.mat, &label_weights(u.d(), u.n()));
    report_from_form(&m)
}

/// Evaluates `c† M c` for the sensitivity form of `U` (used to audit witnesses).
pub fn sensitivity_quadratic(u: &Operator, coeffs: &[C64]) -> Result<f64> {
    let t = transition_matrix(u)?;
    let m = sensitivity_form(&t.mat, &label_weights(u.d(), u.n()));
    Ok(quadratic_form(&m, &DVector::from_column_slice(coeffs)).re)
}

/// `d/dt I[U_t O U_t†]` at `t = 0` with `U_t = exp(−itH)`.
///
/// `dO/dt = i[O, H]`, so each spectral weight moves at rate
/// `2 Re(conj(c_a) <P_a, i[O,H]>)`.
pub fn influence_rate(h: &Operator, o: &Operator) -> Result<f64> {
    let weights = label_weights(o.d(), o.n());
    Ok(spectral_rates(h, o)?
        .iter()
        .zip(weights)
        .map(|(r, w)| r * w as f64)
        .sum())
}

/// Time derivatives of `P_O[a]` under `exp(−itH)` at `t = 0`.
pub(crate) fn spectral_rates(h: &Operator, o: &Operator) -> Result<Vec<f64>> {
    h.same_shape(o)?;
    h.require_hermitian(1e-9)?;
    let norm = o.l2_norm();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::Normalization { norm });
    }
    let c = pauli_coefficients(o);
    let dot = o.commutator(h).scale(C64::new(0.0, 1.0));
    let dc = pauli_coefficients(&dot);
    Ok(c.iter()
        .zip(&dc)
        .map(|(ca, da)| 2.0 * (ca.conj() * da).re / (norm * norm))
        .collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct RateBoundReport {
    pub rate: f64,
    pub bound: f64,
    pub satisfied: bool,
}

/// Finds a set of at most `k` qudits carrying `H`, checked by reconstruction
/// from the marginal within `1e-9` operator norm.
pub fn verify_k_local(h: &Operator, k: usize) -> Result<SubsetMask> {
    let n = h.n();
    let mut best = f64::INFINITY;
    for bits in 0u64..(1 << n) {
        if bits.count_ones() as usize != k.min(n) {
            continue;
        }
        let mask = SubsetMask::new(bits, n);
        let residual = support_residual(h, mask)?;
        if residual <= 1e-9 {
            return Ok(mask);
        }
        best = best.min(residual);
    }
    Err(Error::Support { residual: best })
}

/// Checks `|R_I(H, O)| ≤ 4k‖H‖∞` for `H` supported on `k` qudits.
pub fn influence_rate_bound_check(h: &Operator, o: &Operator, k: usize) -> Result<RateBoundReport> {
    verify_k_local(h, k)?;
    let rate = influence_rate(h, o)?;
    let bound = 4.0 * k as f64 * operator_norm(h);
    Ok(RateBoundReport { rate, bound, satisfied: rate.abs() <= bound + 1e-9 })
}

/// True when `U` maps every weight-1 Pauli to a combination of weight-1 Paulis,
/// in both directions.
pub fn is_stable(u: &Operator, tol: f64) -> Result<bool> {
    let t = transition_matrix(u)?;
    Ok(weight_one_preserved(&t.mat, &label_weights(u.d(), u.n()), tol))
}

/// Column `a` of `T` holds the image of `B_a` under `U·U†`; row `a`, conjugated,
/// holds its image under `U†·U`.
pub(crate) fn weight_one_preserved(t: &DMatrix<C64>, weights: &[usize], tol: f64) -> bool {
    let ones: Vec<usize> = (0..weights.len()).filter(|&l| weights[l] == 1).collect();
    ones.iter().all(|&a| {
        (0..weights.len())
            .filter(|&b| weights[b] != 1)
            .all(|b| t[(b, a)].norm() <= tol && t[(a, b)].norm() <= tol)
    })
}

/// `I[UOU†] − I[O]` evaluated directly from the two spectra.
pub fn influence_change(u: &Operator, o: &Operator) -> Result<f64> {
    let before = influence_total(&pauli_spectrum(o)?);
    let after = influence_total(&pauli_spectrum(&o.conjugate_by(u))?);
    Ok(after - before)
}
