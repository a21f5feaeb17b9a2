//! Majorana (Clifford-algebra) basis, Gaussian spectra and matchgate
//! sensitivity for qubit registers.
//!
//! Generators come from the Jordan–Wigner construction, 0-based:
//! `γ_{2k} = Z^{⊗k} ⊗ X ⊗ I`, `γ_{2k+1} = Z^{⊗k} ⊗ Y ⊗ I`. Subsets of `[2n]`
//! are bitmasks (bit `i` selects `γ_i`) and `γ^S` is the product in ascending
//! index order. Every monomial is a phase times a Pauli string, so the gamma
//! basis is a rephased permutation of the Pauli basis and all Gaussian
//! quantities are read off the Pauli coefficients.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sensitivity::{
    report_from_form, sensitivity_form, transition_matrix, weight_one_preserved, Basis, SensitivityReport,
    TransitionMatrix,
};
use crate::spectrum::NORM_TOL;
use crate::tensor::{checked_dim, from_pauli_coefficients, pauli_coefficients, pauli_op, Operator, PauliIndex, C64};

fn require_qubits(d: usize, what: &'static str) -> Result<()> {
    if d != 2 {
        return Err(Error::QubitsOnly { d, what });
    }
    Ok(())
}

/// A Pauli string `i^phase · X^x Z^z` over qubits, with bit `q` of `x`, `z`
/// addressing qubit `q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct PauliWord {
    phase: u8,
    x: u64,
    z: u64,
}

impl PauliWord {
    fn mul(self, rhs: PauliWord) -> PauliWord {
        // Z^{z1} X^{x2} = (−1)^{z1·x2} X^{x2} Z^{z1}
        let sign = (self.z & rhs.x).count_ones() % 2;
        PauliWord {
            phase: (self.phase + rhs.phase + 2 * sign as u8) % 4,
            x: self.x ^ rhs.x,
            z: self.z ^ rhs.z,
        }
    }

    fn label(self, n: usize) -> usize {
        (0..n)
            .map(|q| ((self.x >> q & 1) + 2 * (self.z >> q & 1)) as usize * 4usize.pow(q as u32))
            .sum()
    }

    fn phase(self) -> C64 {
        [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, -1.0)][self.phase as usize]
    }
}

fn generator_word(i: usize) -> PauliWord {
    let k = i / 2;
    let z_string = (1u64 << k) - 1;
    if i.is_multiple_of(2) {
        PauliWord { phase: 0, x: 1 << k, z: z_string }
    } else {
        // Y = i X Z
        PauliWord { phase: 1, x: 1 << k, z: z_string | 1 << k }
    }
}

/// The `2n` Majorana generators together with the Pauli label and phase of
/// every monomial `γ^S`.
#[derive(Clone, Debug)]
pub struct GammaBasis {
    n: usize,
    gammas: Vec<Operator>,
    labels: Vec<usize>,
    phases: Vec<C64>,
}

impl GammaBasis {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gammas(&self) -> &[Operator] {
        &self.gammas
    }

    /// Number of monomials, `4^n`.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Pauli label `l(S)` and phase `φ_S` with `γ^S = φ_S P_{l(S)}`.
    pub fn monomial_pauli(&self, subset: usize) -> (usize, C64) {
        (self.labels[subset], self.phases[subset])
    }
}

pub fn gamma_basis(n: usize) -> Result<GammaBasis> {
    if n == 0 {
        return Err(Error::Argument("gamma basis needs at least one qubit".into()));
    }
    checked_dim(2, n)?;
    let words: Vec<PauliWord> = (0..2 * n).map(generator_word).collect();
    let gammas: Vec<Operator> = words
        .iter()
        .map(|w| Ok(pauli_op(&PauliIndex::from_label(w.label(n), 2, n))?.scale(w.phase())))
        .collect::<Result<_>>()?;
    for (i, gi) in gammas.iter().enumerate() {
        for (j, gj) in gammas.iter().enumerate().skip(i) {
            let anti = &(gi * gj) + &(gj * gi);
            let target = if i == j { 2.0 } else { 0.0 };
            let id = Operator::identity(2, n)?.scale_re(target);
            if anti.max_abs_diff(&id) > 1e-10 {
                return Err(Error::Argument(format!("generators {i} and {j} violate anticommutation")));
            }
        }
    }
    let count = 1usize << (2 * n);
    let mut mono = vec![PauliWord { phase: 0, x: 0, z: 0 }; count];
    for s in 1..count {
        let top = 63 - (s as u64).leading_zeros() as usize;
        mono[s] = mono[s & !(1 << top)].mul(words[top]);
    }
    Ok(GammaBasis {
        n,
        gammas,
        labels: mono.iter().map(|w| w.label(n)).collect(),
        phases: mono.iter().map(|w| w.phase()).collect(),
    })
}

/// `γ^S = Π_{i∈S} γ_i` in ascending order.
pub fn gamma_monomial(b: &GammaBasis, subset: usize) -> Result<Operator> {
    if subset >= b.len() {
        return Err(Error::Argument(format!("subset {subset:#b} exceeds 2n = {} generators", 2 * b.n)));
    }
    let (label, phase) = b.monomial_pauli(subset);
    Ok(pauli_op(&PauliIndex::from_label(label, 2, b.n))?.scale(phase))
}

/// `P^G_O[S] = |<γ^S, O>|²` over subsets of `[2n]`.
#[derive(Clone, Debug, Serialize)]
pub struct GaussianSpectrum {
    pub n: usize,
    #[serde(skip)]
    pub coeffs: Vec<C64>,
    pub probs: Vec<f64>,
}

fn gamma_coefficients(b: &GammaBasis, pauli: &[C64]) -> Vec<C64> {
    (0..b.len()).map(|s| b.phases[s].conj() * pauli[b.labels[s]]).collect()
}

pub fn gaussian_spectrum(o: &Operator) -> Result<GaussianSpectrum> {
    require_qubits(o.d(), "Gaussian spectrum")?;
    let norm = o.l2_norm();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::Normalization { norm });
    }
    let b = gamma_basis(o.n())?;
    let coeffs = gamma_coefficients(&b, &pauli_coefficients(o));
    let total: f64 = coeffs.iter().map(|z| z.norm_sqr()).sum();
    let probs = coeffs.iter().map(|z| z.norm_sqr() / total).collect();
    Ok(GaussianSpectrum { n: o.n(), coeffs, probs })
}

/// `I^G[O] = Σ_S |S| P^G_O[S]`.
pub fn gaussian_influence(gs: &GaussianSpectrum) -> f64 {
    gs.probs
        .iter()
        .enumerate()
        .map(|(s, p)| s.count_ones() as f64 * p)
        .sum()
}

/// Noise semigroup `P_t(γ^S) = e^{−t|S|} γ^S`.
pub fn carlen_lieb_apply(o: &Operator, t: f64) -> Result<Operator> {
    require_qubits(o.d(), "Carlen-Lieb semigroup")?;
    if !(t >= 0.0) {
        return Err(Error::Argument(format!("semigroup time must be nonnegative, got {t}")));
    }
    let b = gamma_basis(o.n())?;
    let g = gamma_coefficients(&b, &pauli_coefficients(o));
    let mut pauli = vec![C64::new(0.0, 0.0); b.len()];
    for (s, cs) in g.iter().enumerate() {
        pauli[b.labels[s]] += b.phases[s] * cs * (-t * s.count_ones() as f64).exp();
    }
    from_pauli_coefficients(2, o.n(), &pauli)
}

/// `T^G[S',S] = <γ^{S'}, U γ^S U†>`, obtained by rephasing and permuting the
/// Pauli transition matrix.
pub fn gaussian_transition_matrix(u: &Operator) -> Result<TransitionMatrix> {
    require_qubits(u.d(), "Gaussian transition matrix")?;
    let t = transition_matrix(u)?;
    let b = gamma_basis(u.n())?;
    let count = b.len();
    let mat = DMatrix::from_fn(count, count, |sp, s| {
        b.phases[sp].conj() * b.phases[s] * t.mat[(b.labels[sp], b.labels[s])]
    });
    Ok(TransitionMatrix { d: 2, n: u.n(), basis: Basis::Gamma, mat })
}

fn subset_weights(n: usize) -> Vec<usize> {
    (0..1usize << (2 * n)).map(|s| s.count_ones() as usize).collect()
}

/// `CiS^G[U]`: spectral norm of `(T^G)† W^G T^G − W^G` with `W^G = diag(|S|)`.
pub fn gaussian_circuit_sensitivity(u: &Operator) -> Result<SensitivityReport> {
    let t = gaussian_transition_matrix(u)?;
    report_from_form(&sensitivity_form(&t.mat, &subset_weights(u.n())))
}

/// True when `U γ_i U†` and `U† γ_i U` stay in the span of the generators.
pub fn is_matchgate(u: &Operator, tol: f64) -> Result<bool> {
    let t = gaussian_transition_matrix(u)?;
    Ok(weight_one_preserved(&t.mat, &subset_weights(u.n()), tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{clock, fourier, gzx, pauli_y, phase_t, shift, swap};
    use crate::random::{random_operator, random_unitary};
    use crate::tensor::{embed, expm_hermitian, hs_inner};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn quadratic_hamiltonian<R: Rng>(n: usize, rng: &mut R) -> Operator {
        let b = gamma_basis(n).unwrap();
        let mut h = Operator::zeros(2, n).unwrap();
        for j in 0..2 * n {
            for k in j + 1..2 * n {
                let coef: f64 = rng.random_range(-1.0..1.0);
                let term = (&b.gammas()[j] * &b.gammas()[k]).scale(C64::new(0.0, coef));
                h = &h + &term;
            }
        }
        h
    }

    #[test]
    fn generators_for_small_registers() {
        let b1 = gamma_basis(1).unwrap();
        assert!(b1.gammas()[0].max_abs_diff(&shift(2)) < 1e-15);
        assert!(b1.gammas()[1].max_abs_diff(&pauli_y()) < 1e-15);
        let b2 = gamma_basis(2).unwrap();
        let zx = clock(2).kron(&shift(2)).unwrap();
        assert!(b2.gammas()[2].max_abs_diff(&zx) < 1e-15);
        for n in 1..=4 {
            assert_eq!(gamma_basis(n).unwrap().gammas().len(), 2 * n);
        }
    }

    #[test]
    fn monomials_match_explicit_products() {
        let b1 = gamma_basis(1).unwrap();
        assert!(gamma_monomial(&b1, 0).unwrap().max_abs_diff(&Operator::identity(2, 1).unwrap()) < 1e-15);
        let iz = clock(2).scale(C64::new(0.0, 1.0));
        assert!(gamma_monomial(&b1, 0b11).unwrap().max_abs_diff(&iz) < 1e-15);
        for n in 1..=3 {
            let b = gamma_basis(n).unwrap();
            for s in 0..b.len() {
                let mut prod = Operator::identity(2, n).unwrap();
                for i in 0..2 * n {
                    if s >> i & 1 == 1 {
                        prod = &prod * &b.gammas()[i];
                    }
                }
                let m = gamma_monomial(&b, s).unwrap();
                assert!(m.max_abs_diff(&prod) < 1e-14);
                assert!((m.l2_norm() - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn gaussian_influence_examples() {
        let b = gamma_basis(2).unwrap();
        let g0 = &b.gammas()[0];
        assert!((gaussian_influence(&gaussian_spectrum(g0).unwrap()) - 1.0).abs() < 1e-12);
        let pair = (g0 * &b.gammas()[1]).scale(C64::new(0.0, 1.0));
        assert!((gaussian_influence(&gaussian_spectrum(&pair).unwrap()) - 2.0).abs() < 1e-12);
        let x1 = embed(&shift(2), &[0], 2).unwrap();
        assert!((gaussian_influence(&gaussian_spectrum(&x1).unwrap()) - 1.0).abs() < 1e-12);
        let z1 = embed(&clock(2), &[0], 2).unwrap();
        assert!((gaussian_influence(&gaussian_spectrum(&z1).unwrap()) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn spectrum_sums_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        for n in 1..=3 {
            let o = random_operator(2, n, &mut rng).unwrap();
            let gs = gaussian_spectrum(&o).unwrap();
            assert!((gs.probs.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            let b = gamma_basis(n).unwrap();
            for s in [0, 1, b.len() - 1] {
                let direct = hs_inner(&gamma_monomial(&b, s).unwrap(), &o).unwrap();
                assert!((direct - gs.coeffs[s]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn semigroup_examples_and_derivative() {
        let id = Operator::identity(2, 2).unwrap();
        assert!(carlen_lieb_apply(&id, 0.7).unwrap().max_abs_diff(&id) < 1e-14);
        let b = gamma_basis(2).unwrap();
        let g0 = &b.gammas()[0];
        let damped = carlen_lieb_apply(g0, 0.3).unwrap();
        assert!(damped.max_abs_diff(&g0.scale_re((-0.3f64).exp())) < 1e-14);
        assert!(carlen_lieb_apply(g0, -1.0).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let o = random_operator(2, 3, &mut rng).unwrap();
        let h = 1e-5;
        let norm2 = |t: f64| carlen_lieb_apply(&o, t).unwrap().l2_norm().powi(2);
        // One-sided at t = 0 since the semigroup is only defined for t ≥ 0;
        // second order from three points.
        let fd = (-3.0 * norm2(0.0) + 4.0 * norm2(h) - norm2(2.0 * h)) / (2.0 * h);
        let ig = gaussian_influence(&gaussian_spectrum(&o).unwrap());
        assert!((fd + 2.0 * ig).abs() < 1e-6);
    }

    #[test]
    fn named_gaussian_sensitivities() {
        assert!(gaussian_circuit_sensitivity(&Operator::identity(2, 2).unwrap()).unwrap().value < 1e-12);
        assert!(gaussian_circuit_sensitivity(&gzx()).unwrap().value < 1e-9);
        assert!(is_matchgate(&gzx(), 1e-8).unwrap());
        let swap_value = gaussian_circuit_sensitivity(&swap(2)).unwrap().value;
        assert!((swap_value - SWAP_GAUSSIAN_SENSITIVITY).abs() < 1e-9, "{swap_value}");
        assert!(!is_matchgate(&swap(2), 1e-8).unwrap());
        let h1 = embed(&fourier(2), &[0], 2).unwrap();
        assert!(!is_matchgate(&h1, 1e-8).unwrap());
        assert!(gaussian_circuit_sensitivity(&h1).unwrap().value > 0.5);
    }

    /// Regression constant: the eigen-solver value for SWAP on two qubits.
    const SWAP_GAUSSIAN_SENSITIVITY: f64 = 2.0;

    #[test]
    fn diagonal_phase_gates_are_matchgates() {
        // exp(−iθZ_k) is generated by the quadratic term −iγ_{2k}γ_{2k+1} = Z_k.
        let t1 = embed(&phase_t(), &[0], 2).unwrap();
        assert!(is_matchgate(&t1, 1e-8).unwrap());
        assert!(gaussian_circuit_sensitivity(&t1).unwrap().value < 1e-9);
    }

    #[test]
    fn quadratic_evolutions_are_matchgates() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let b = gamma_basis(1).unwrap();
        let pair = (&b.gammas()[0] * &b.gammas()[1]).scale(C64::new(0.0, 1.0));
        assert!(is_matchgate(&expm_hermitian(&pair, 0.4).unwrap(), 1e-8).unwrap());
        for n in 1..=3 {
            let h = quadratic_hamiltonian(n, &mut rng);
            let u = expm_hermitian(&h, 1.0).unwrap();
            assert!(gaussian_circuit_sensitivity(&u).unwrap().value < 1e-6);
            assert!(is_matchgate(&u, 1e-8).unwrap());
            let t = gaussian_transition_matrix(&u).unwrap();
            assert!(t.unitarity_deviation() < 1e-8);
        }
    }

    #[test]
    fn left_invariance_and_subadditivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..4 {
            let u = random_unitary(2, 2, &mut rng).unwrap();
            let v = random_unitary(2, 2, &mut rng).unwrap();
            let m1 = expm_hermitian(&quadratic_hamiltonian(2, &mut rng), 1.0).unwrap();
            let m2 = expm_hermitian(&quadratic_hamiltonian(2, &mut rng), 1.0).unwrap();
            let cu = gaussian_circuit_sensitivity(&u).unwrap().value;
            let cv = gaussian_circuit_sensitivity(&v).unwrap().value;
            let sandwiched = &(&m1 * &u) * &m2;
            assert!((gaussian_circuit_sensitivity(&sandwiched).unwrap().value - cu).abs() < 1e-7);
            assert!(gaussian_circuit_sensitivity(&(&u * &v)).unwrap().value <= cu + cv + 1e-7);
        }
    }

    #[test]
    fn qutrits_are_rejected() {
        let x = shift(3);
        assert!(matches!(gaussian_spectrum(&x), Err(Error::QubitsOnly { .. })));
        assert!(matches!(is_matchgate(&x, 1e-8), Err(Error::QubitsOnly { .. })));
    }
}
