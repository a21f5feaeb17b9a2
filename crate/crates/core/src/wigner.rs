//! Discrete Wigner functions of qubit operators over the phase space
//! `(Z₂×Z₂)^n`, the symplectic Fourier transform and Wigner convolution.
//!
//! Coefficients here are taken in the Hermitian Pauli basis
//! `σ_b = ⊗ i^{s t} X^s Z^t` (so the local basis is `I, X, Z, Y`), indexed by
//! the same labels as [`crate::tensor::PauliIndex`].

use crate::error::{Error, Result};
use crate::tensor::{
    c, from_pauli_coefficients, label_site, pauli_coefficients, pauli_op, Operator, PauliIndex, C64,
};

#[derive(Clone, Debug)]
pub struct WignerFunction {
    pub n: usize,
    /// `f_O(a)` for every phase point label `a`.
    pub values: Vec<C64>,
}

fn require_qubits(o: &Operator, what: &'static str) -> Result<()> {
    if o.d() != 2 {
        return Err(Error::QubitsOnly { d: o.d(), what });
    }
    Ok(())
}

/// `i^{Σ s_i t_i}` for `label`, the phase relating `σ_b` to `X^s Z^t`.
pub(crate) fn y_phase(label: usize, n: usize) -> C64 {
    let ys = (0..n).filter(|&i| label_site(label, 2, i) == (1, 1)).count();
    [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)][ys % 4]
}

/// `(−1)^{⟨a,b⟩_s}` for single-site labels in `0..4`.
fn local_sign(a: usize, b: usize) -> f64 {
    let (sa, ta) = (a & 1, a >> 1);
    let (sb, tb) = (b & 1, b >> 1);
    if (sa * tb + ta * sb) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `(−1)^{⟨a,b⟩_s}` for full labels.
pub fn symplectic_sign(a: usize, b: usize, n: usize) -> f64 {
    (0..n)
        .map(|i| local_sign((a >> (2 * i)) & 3, (b >> (2 * i)) & 3))
        .product()
}

/// In place `v(a) ← Σ_b (−1)^{⟨a,b⟩_s} v(b)`, one site at a time.
fn symplectic_kernel(v: &mut [C64], n: usize) {
    for site in 0..n {
        let stride = 1usize << (2 * site);
        let block = stride * 4;
        for base in (0..v.len()).step_by(block) {
            for off in 0..stride {
                let idx = |k: usize| base + off + k * stride;
                let x = [v[idx(0)], v[idx(1)], v[idx(2)], v[idx(3)]];
                for a in 0..4 {
                    v[idx(a)] = (0..4).map(|b| x[b] * local_sign(a, b)).sum();
                }
            }
        }
    }
}

/// The Hermitian Pauli operator `σ_b` on `n` qubits.
pub fn hermitian_pauli(label: usize, n: usize) -> Result<Operator> {
    Ok(pauli_op(&PauliIndex::from_label(label, 2, n))?.scale(y_phase(label, n)))
}

/// `O_b = <σ_b, O>` for every label.
pub fn hermitian_coefficients(o: &Operator) -> Result<Vec<C64>> {
    require_qubits(o, "Hermitian Pauli coefficients")?;
    let n = o.n();
    Ok(pauli_coefficients(o)
        .into_iter()
        .enumerate()
        .map(|(label, z)| z * y_phase(label, n).conj())
        .collect())
}

/// `Σ_b O_b σ_b`.
pub fn from_hermitian_coefficients(n: usize, coeffs: &[C64]) -> Result<Operator> {
    let raw: Vec<C64> = coeffs
        .iter()
        .enumerate()
        .map(|(label, &z)| z * y_phase(label, n))
        .collect();
    from_pauli_coefficients(2, n, &raw)
}

/// `f_O(a) = Σ_b O_b (−1)^{⟨a,b⟩_s}`.
pub fn wigner_function(o: &Operator) -> Result<WignerFunction> {
    let mut values = hermitian_coefficients(o)?;
    symplectic_kernel(&mut values, o.n());
    Ok(WignerFunction { n: o.n(), values })
}

/// `f̂(b) = E_a f(a) (−1)^{⟨a,b⟩_s}`, which recovers the Hermitian Pauli
/// coefficients of the source operator.
pub fn symplectic_ft(w: &WignerFunction) -> Vec<C64> {
    let mut v = w.values.clone();
    symplectic_kernel(&mut v, w.n);
    let scale = 1.0 / v.len() as f64;
    v.iter_mut().for_each(|z| *z *= scale);
    v
}

/// Inverse of [`symplectic_ft`]: the Wigner function with the given
/// Hermitian Pauli coefficients.
pub fn inverse_symplectic_ft(n: usize, coeffs: &[C64]) -> Result<WignerFunction> {
    if coeffs.len() != 1 << (2 * n) {
        return Err(Error::Argument(format!(
            "expected {} coefficients for n={n}, got {}",
            1usize << (2 * n),
            coeffs.len()
        )));
    }
    let mut values = coeffs.to_vec();
    symplectic_kernel(&mut values, n);
    Ok(WignerFunction { n, values })
}

/// Operator with Wigner function `f` (inverse of [`wigner_function`]).
pub fn operator_from_wigner(w: &WignerFunction) -> Result<Operator> {
    from_hermitian_coefficients(w.n, &symplectic_ft(w))
}

/// The operator `O1 * O2` whose Wigner function is `f_{O1} · f_{O2}`.
pub fn convolve(o1: &Operator, o2: &Operator) -> Result<Operator> {
    require_qubits(o1, "Wigner convolution")?;
    o1.same_shape(o2)?;
    let f1 = wigner_function(o1)?;
    let f2 = wigner_function(o2)?;
    let values = f1.values.iter().zip(&f2.values).map(|(a, b)| a * b).collect();
    operator_from_wigner(&WignerFunction { n: o1.n(), values })
}
