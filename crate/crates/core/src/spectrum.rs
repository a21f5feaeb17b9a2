//! Pauli spectral distribution of an operator, influences, quantum Fourier
//! entropies and the Boolean-function embedding.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tensor::{depolarize, label_site, label_weights, pauli_coefficients, xlog2x, Operator, C64};

/// Inputs whose l2 norm is further than this from 1 are rejected.
pub const NORM_TOL: f64 = 1e-6;

/// Probability distribution `P_O[a] = |<P_a, O>|²` over Pauli labels.
#[derive(Clone, Debug)]
pub struct PauliSpectrum {
    d: usize,
    n: usize,
    coeffs: Vec<C64>,
    probs: Vec<f64>,
}

impl PauliSpectrum {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Pauli coefficients `<P_a, O>` in mixed-radix label order.
    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Builds a spectrum from raw probabilities (renormalized to sum 1).
    pub fn from_probs(d: usize, n: usize, probs: Vec<f64>) -> Result<Self> {
        let count = (d * d).pow(n as u32);
        if probs.len() != count {
            return Err(Error::Argument(format!("expected {count} probabilities, got {}", probs.len())));
        }
        if probs.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::Argument("probabilities must be finite and nonnegative".into()));
        }
        let total: f64 = probs.iter().sum();
        if total <= 0.0 {
            return Err(Error::Normalization { norm: 0.0 });
        }
        let probs: Vec<f64> = probs.into_iter().map(|p| p / total).collect();
        let coeffs = probs.iter().map(|p| C64::new(p.sqrt(), 0.0)).collect();
        Ok(Self { d, n, coeffs, probs })
    }
}

/// Characteristic distribution of a unit-l2-norm operator.
pub fn pauli_spectrum(o: &Operator) -> Result<PauliSpectrum> {
    let norm = o.l2_norm();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::Normalization { norm });
    }
    Ok(spectrum_unchecked(o))
}

pub(crate) fn spectrum_unchecked(o: &Operator) -> PauliSpectrum {
    let coeffs = pauli_coefficients(o);
    let mut probs: Vec<f64> = coeffs.iter().map(|z| z.norm_sqr()).collect();
    let total: f64 = probs.iter().sum();
    if total > 0.0 {
        probs.iter_mut().for_each(|p| *p /= total);
    }
    PauliSpectrum { d: o.d(), n: o.n(), coeffs, probs }
}

/// `I_j[O] = Σ_{a: a_j ≠ (0,0)} P_O[a]`.
pub fn influence_local(s: &PauliSpectrum, j: usize) -> Result<f64> {
    if j >= s.n {
        return Err(Error::Argument(format!("qudit {j} out of range for n={}", s.n)));
    }
    Ok(s.probs
        .iter()
        .enumerate()
        .filter(|&(label, _)| label_site(label, s.d, j) != (0, 0))
        .map(|(_, p)| p)
        .sum())
}

/// `I[O] = Σ_a |a| P_O[a]`.
pub fn influence_total(s: &PauliSpectrum) -> f64 {
    label_weights(s.d, s.n)
        .into_iter()
        .zip(&s.probs)
        .map(|(w, p)| w as f64 * p)
        .sum()
}

/// `W_k[O] = Σ_{|a| = k} P_O[a]` for `k = 0..=n`.
#[derive(Clone, Debug, Serialize)]
pub struct WeightDistribution {
    pub w: Vec<f64>,
}

pub fn weight_distribution(s: &PauliSpectrum) -> WeightDistribution {
    let mut w = vec![0.0; s.n + 1];
    for (weight, p) in label_weights(s.d, s.n).into_iter().zip(&s.probs) {
        w[weight] += p;
    }
    WeightDistribution { w }
}

/// Shannon entropy (bits) of the spectrum.
pub fn fourier_entropy(s: &PauliSpectrum) -> f64 {
    shannon(&s.probs)
}

pub(crate) fn shannon(p: &[f64]) -> f64 {
    p.iter().map(|&x| -xlog2x(x)).sum()
}

/// `min_a log₂(1/P_O[a])` over the support.
pub fn fourier_min_entropy(s: &PauliSpectrum) -> f64 {
    let max = s.probs.iter().copied().fold(0.0, f64::max);
    -max.log2()
}

/// Rényi entropy `log₂(Σ P^α)/(1 − α)`.
pub fn fourier_renyi_entropy(s: &PauliSpectrum, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) || alpha == 1.0 || !alpha.is_finite() {
        return Err(Error::Argument(format!("Renyi order must be positive, finite and != 1, got {alpha}")));
    }
    let sum: f64 = s.probs.iter().filter(|&&p| p > 0.0).map(|p| p.powf(alpha)).sum();
    Ok(sum.log2() / (1.0 - alpha))
}

/// Binary entropy `h(p)` in bits.
pub fn binary_entropy(p: f64) -> f64 {
    -xlog2x(p) - xlog2x(1.0 - p)
}

#[derive(Clone, Debug, Serialize)]
pub struct QfeiReport {
    pub entropy: f64,
    pub influence: f64,
    pub bound: f64,
    pub satisfied: bool,
}

/// Weak Fourier entropy–influence check with constant 2:
/// `H[O] ≤ 2(log n + log d) I[O] + h(P_O[0])`.
pub fn qfei_gap(o: &Operator) -> Result<QfeiReport> {
    let s = pauli_spectrum(o)?;
    let entropy = fourier_entropy(&s);
    let influence = influence_total(&s);
    let scale = 2.0 * ((s.n as f64).log2() + (s.d as f64).log2());
    let bound = scale * influence + binary_entropy(s.probs[0]);
    Ok(QfeiReport { entropy, influence, bound, satisfied: entropy <= bound + 1e-9 })
}

/// Central difference of `‖D_γ^{(j)}[O]‖₂²` at `γ = 0` and its predicted value
/// `−2 I_j[O]`.
pub fn depolarizing_sensitivity_check(o: &Operator, j: usize, eps: f64) -> Result<(f64, f64)> {
    if !(eps > 0.0 && eps <= 1e-3) {
        return Err(Error::Argument(format!("step must lie in (0, 1e-3], got {eps}")));
    }
    let s = pauli_spectrum(o)?;
    let plus = depolarize(o, j, eps)?.l2_norm().powi(2);
    let minus = depolarize(o, j, -eps)?.l2_norm().powi(2);
    Ok(((plus - minus) / (2.0 * eps), -2.0 * influence_local(&s, j)?))
}

/// Boolean function `{−1,1}^n → {−1,1}` as a truth table. Entry `i` holds
/// `f(x)` with `x_k = (−1)^{b_k}`, where `b_k` is the `k`-th most significant
/// bit of `i` (lexicographic order, variable 0 first).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BooleanFunction {
    n: usize,
    table: Vec<i8>,
}

impl BooleanFunction {
    pub fn new(n: usize, table: Vec<i8>) -> Result<Self> {
        if n > 12 {
            return Err(Error::Argument(format!("at most 12 variables supported, got {n}")));
        }
        if table.len() != 1 << n {
            return Err(Error::Argument(format!("truth table must have {} entries, got {}", 1 << n, table.len())));
        }
        if table.iter().any(|&v| v != 1 && v != -1) {
            return Err(Error::Argument("truth table values must be +1 or -1".into()));
        }
        Ok(Self { n, table })
    }

    pub fn from_fn(n: usize, f: impl Fn(&[i8]) -> i8) -> Result<Self> {
        let table = (0..1usize << n)
            .map(|i| {
                let x: Vec<i8> = (0..n).map(|k| if (i >> (n - 1 - k)) & 1 == 1 { -1 } else { 1 }).collect();
                f(&x)
            })
            .collect();
        Self::new(n, table)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn table(&self) -> &[i8] {
        &self.table
    }

    /// Fourier coefficients `f̂(S) = E_x f(x) Π_{k∈S} x_k`, indexed with the
    /// same bit layout as the truth table.
    pub fn fourier(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.table.iter().map(|&x| x as f64).collect();
        walsh_hadamard(&mut v);
        let scale = 1.0 / v.len() as f64;
        v.iter_mut().for_each(|x| *x *= scale);
        v
    }
}

/// In-place unnormalized Walsh–Hadamard transform; length must be a power of 2.
pub fn walsh_hadamard(v: &mut [f64]) {
    assert!(v.len().is_power_of_two(), "length must be a power of two");
    let mut h = 1;
    while h < v.len() {
        for block in (0..v.len()).step_by(2 * h) {
            for i in block..block + h {
                let (a, b) = (v[i], v[i + h]);
                v[i] = a + b;
                v[i + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// `O_f = Σ_S f̂(S) X^S`, a Hermitian involution whose Pauli spectrum is `f̂²`.
pub fn boolean_embed(f: &BooleanFunction) -> Result<Operator> {
    let fhat = f.fourier();
    let dim = fhat.len();
    let mat = nalgebra::DMatrix::from_fn(dim, dim, |r, c| C64::new(fhat[r ^ c], 0.0));
    Operator::new(2, f.n, mat)
}

/// `I[f] = Σ_S f̂(S)² |S|`.
pub fn boolean_influence(f: &BooleanFunction) -> f64 {
    f.fourier()
        .iter()
        .enumerate()
        .map(|(s, c)| c * c * s.count_ones() as f64)
        .sum()
}

/// `H[f] = Σ_S f̂(S)² log₂(1/f̂(S)²)`.
pub fn boolean_entropy(f: &BooleanFunction) -> f64 {
    let p: Vec<f64> = f.fourier().iter().map(|c| c * c).collect();
    shannon(&p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{fourier, phase_t, shift};
    use crate::random::{random_operator, random_unitary};
    use crate::tensor::{embed, pauli_op, PauliIndex};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn xx() -> Operator {
        let x = shift(2);
        x.kron(&x).unwrap()
    }

    #[test]
    fn single_pauli_spectrum() {
        let s = pauli_spectrum(&shift(2)).unwrap();
        let label = PauliIndex::new(2, &[(1, 0)]).label();
        assert!((s.probs()[label] - 1.0).abs() < 1e-12);
        assert!(fourier_entropy(&s).abs() < 1e-12);
        assert!(fourier_min_entropy(&s).abs() < 1e-12);
    }

    #[test]
    fn hadamard_spectrum_is_uniform_on_x_and_z() {
        let s = pauli_spectrum(&fourier(2)).unwrap();
        assert!((s.probs()[PauliIndex::new(2, &[(1, 0)]).label()] - 0.5).abs() < 1e-12);
        assert!((s.probs()[PauliIndex::new(2, &[(0, 1)]).label()] - 0.5).abs() < 1e-12);
        assert!((fourier_entropy(&s) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_unnormalized_input() {
        let two_x = shift(2).scale_re(2.0);
        assert!(matches!(pauli_spectrum(&two_x), Err(Error::Normalization { norm }) if (norm - 2.0).abs() < 1e-12));
    }

    #[test]
    fn local_influences() {
        let x1 = embed(&shift(2), &[0], 2).unwrap();
        let s = pauli_spectrum(&x1).unwrap();
        assert!((influence_local(&s, 0).unwrap() - 1.0).abs() < 1e-12);
        assert!(influence_local(&s, 1).unwrap().abs() < 1e-12);
        assert!(influence_local(&s, 2).is_err());
        let w = weight_distribution(&s).w;
        assert!(w[0].abs() < 1e-12 && (w[1] - 1.0).abs() < 1e-12 && w[2].abs() < 1e-12);

        let s = pauli_spectrum(&xx()).unwrap();
        assert!((influence_local(&s, 0).unwrap() - 1.0).abs() < 1e-12);
        assert!((influence_local(&s, 1).unwrap() - 1.0).abs() < 1e-12);
        assert!((influence_total(&s) - 2.0).abs() < 1e-12);

        let h1 = embed(&fourier(2), &[0], 2).unwrap();
        let s = pauli_spectrum(&h1).unwrap();
        assert!((influence_local(&s, 0).unwrap() - 1.0).abs() < 1e-12);
        assert!(influence_local(&s, 1).unwrap().abs() < 1e-12);
    }

    #[test]
    fn pauli_influence_is_its_weight() {
        let a = PauliIndex::new(3, &[(1, 2), (0, 0), (0, 1)]);
        let s = pauli_spectrum(&pauli_op(&a).unwrap()).unwrap();
        assert!((influence_total(&s) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn bell_projector_weight_distribution() {
        let s = 1.0 / 2f64.sqrt();
        let psi = [C64::new(s, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(s, 0.0)];
        let o = crate::tensor::projector(2, 2, &psi).unwrap().scale_re(2.0);
        let w = weight_distribution(&pauli_spectrum(&o).unwrap()).w;
        assert!((w[0] - 0.25).abs() < 1e-12 && w[1].abs() < 1e-12 && (w[2] - 0.75).abs() < 1e-12);
    }

    #[test]
    fn renyi_limit_approaches_shannon() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let s = pauli_spectrum(&random_operator(2, 2, &mut rng).unwrap()).unwrap();
        let h = fourier_entropy(&s);
        for alpha in [1.0 - 1e-5, 1.0 + 1e-5] {
            assert!((fourier_renyi_entropy(&s, alpha).unwrap() - h).abs() < 1e-4);
        }
        assert!(fourier_renyi_entropy(&s, 0.0).is_err());
        assert!(fourier_renyi_entropy(&s, 1.0).is_err());
    }

    #[test]
    fn qfei_on_rotated_x() {
        let r = qfei_gap(&shift(2).conjugate_by(&phase_t())).unwrap();
        assert!((r.entropy - 1.0).abs() < 1e-12);
        assert!((r.influence - 1.0).abs() < 1e-12);
        assert!((r.bound - 2.0).abs() < 1e-12);
        assert!(r.satisfied);
        let p = qfei_gap(&xx()).unwrap();
        assert!(p.entropy.abs() < 1e-12 && p.satisfied);
    }

    #[test]
    fn depolarizing_derivative() {
        let z = embed(&crate::gates::clock(2), &[0], 1).unwrap();
        let (lhs, rhs) = depolarizing_sensitivity_check(&z, 0, 1e-4).unwrap();
        assert!((rhs + 2.0).abs() < 1e-12);
        assert!((lhs - rhs).abs() < 1e-7);
        let id = Operator::identity(2, 2).unwrap();
        let (lhs, rhs) = depolarizing_sensitivity_check(&id, 1, 1e-4).unwrap();
        assert!(lhs.abs() < 1e-9 && rhs.abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let eps = 1e-3;
        for _ in 0..10 {
            let o = random_operator(3, 2, &mut rng).unwrap();
            let (lhs, rhs) = depolarizing_sensitivity_check(&o, 1, eps).unwrap();
            assert!((lhs - rhs).abs() <= 10.0 * eps * eps);
        }
    }

    fn majority3() -> BooleanFunction {
        BooleanFunction::from_fn(3, |x| if x.iter().map(|&v| v as i32).sum::<i32>() > 0 { 1 } else { -1 }).unwrap()
    }

    #[test]
    fn boolean_examples() {
        let one = BooleanFunction::new(2, vec![1; 4]).unwrap();
        assert!(boolean_embed(&one).unwrap().max_abs_diff(&Operator::identity(2, 2).unwrap()) < 1e-15);

        let parity = BooleanFunction::from_fn(2, |x| x[0] * x[1]).unwrap();
        let o = boolean_embed(&parity).unwrap();
        assert!(o.max_abs_diff(&xx()) < 1e-15);
        assert!((boolean_influence(&parity) - 2.0).abs() < 1e-12);
        assert!(boolean_entropy(&parity).abs() < 1e-12);

        let dictator = BooleanFunction::from_fn(3, |x| x[0]).unwrap();
        assert!((boolean_influence(&dictator) - 1.0).abs() < 1e-12);
        assert!(boolean_entropy(&dictator).abs() < 1e-12);

        let maj = majority3();
        assert!((boolean_influence(&maj) - 1.5).abs() < 1e-12);
        assert!((boolean_entropy(&maj) - 2.0).abs() < 1e-12);
        let s = pauli_spectrum(&boolean_embed(&maj).unwrap()).unwrap();
        assert!((influence_total(&s) - 1.5).abs() < 1e-12);
        assert!((fourier_entropy(&s) - 2.0).abs() < 1e-12);

        assert!(BooleanFunction::new(2, vec![1, 0, 1, 1]).is_err());
        assert!(BooleanFunction::new(2, vec![1, 1]).is_err());
    }

    #[test]
    fn fast_transform_matches_direct_sum() {
        let maj = majority3();
        let fast = maj.fourier();
        for (s, &coef) in fast.iter().enumerate() {
            let direct: f64 = maj
                .table()
                .iter()
                .enumerate()
                .map(|(i, &v)| v as f64 * if (i & s).count_ones() % 2 == 1 { -1.0 } else { 1.0 })
                .sum::<f64>()
                / 8.0;
            assert!((direct - coef).abs() < 1e-15);
        }
    }

    #[test]
    fn embedding_is_hermitian_involution_for_all_two_bit_functions() {
        for bits in 0..16u32 {
            let table = (0..4).map(|i| if bits >> i & 1 == 1 { -1 } else { 1 }).collect();
            let f = BooleanFunction::new(2, table).unwrap();
            let o = boolean_embed(&f).unwrap();
            assert!(o.is_hermitian(1e-14));
            assert!((&o * &o).max_abs_diff(&Operator::identity(2, 2).unwrap()) < 1e-14);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn embedding_preserves_entropy_and_influence(n in 1usize..=4, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let table = (0..1usize << n).map(|_| if rand::Rng::random::<bool>(&mut rng) { 1 } else { -1 }).collect();
            let f = BooleanFunction::new(n, table).unwrap();
            let s = pauli_spectrum(&boolean_embed(&f).unwrap()).unwrap();
            prop_assert!((fourier_entropy(&s) - boolean_entropy(&f)).abs() < 1e-10);
            prop_assert!((influence_total(&s) - boolean_influence(&f)).abs() < 1e-10);
        }

        #[test]
        fn spectrum_invariants(d in 2usize..=3, n in 1usize..=3, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let o = random_operator(d, n, &mut rng).unwrap();
            let s = pauli_spectrum(&o).unwrap();
            let total: f64 = s.probs().iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-9);
            for (p, c) in s.probs().iter().zip(s.coeffs()) {
                prop_assert!((p - c.norm_sqr()).abs() < 1e-12);
            }
            let by_site: f64 = (0..n).map(|j| influence_local(&s, j).unwrap()).sum();
            prop_assert!((by_site - influence_total(&s)).abs() < 1e-12);
            let direct: f64 = (0..s.probs().len())
                .map(|l| PauliIndex::from_label(l, d, n).weight() as f64 * s.probs()[l])
                .sum();
            prop_assert!((direct - influence_total(&s)).abs() < 1e-12);
            let w = weight_distribution(&s).w;
            prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            let mean: f64 = w.iter().enumerate().map(|(k, x)| k as f64 * x).sum();
            prop_assert!((mean - influence_total(&s)).abs() < 1e-12);
            let h = fourier_entropy(&s);
            let hmin = fourier_min_entropy(&s);
            prop_assert!(hmin <= h + 1e-12);
            prop_assert!(h <= 2.0 * n as f64 * (d as f64).log2() + 1e-12);
            let u = random_unitary(d, n, &mut rng).unwrap();
            let rotated = pauli_spectrum(&o.conjugate_by(&u)).unwrap();
            prop_assert!((rotated.probs()[0] - s.probs()[0]).abs() < 1e-10);
            prop_assert!(qfei_gap(&o).unwrap().satisfied);
        }
    }
}
