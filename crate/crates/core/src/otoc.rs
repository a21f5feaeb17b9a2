//! Out-of-time-ordered correlators and their averaged closed forms in terms
//! of influences and Krawtchouk-weighted Pauli spectra.
//!
//! The scrambled operator `O = O_D(t)` lives on `n` qudits with the region
//! `D` taken to be the trailing `k` qudits, so averages over `O_A` run over
//! Paulis supported on the leading `n − k` sites. Every averaged identity has
//! a direct-enumeration companion with the suffix `_oracle`.
//!
//! Correlators are evaluated in the form `⟨O† P O P†⟩`, which coincides with
//! `⟨O P O P⟩` for Hermitian arguments and keeps the closed forms valid for
//! qudit Paulis and non-Hermitian `O`.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectrum::{influence_local, pauli_spectrum, spectrum_unchecked, NORM_TOL};
use crate::tensor::{label_site, pauli_op, Operator, PauliIndex, C64};
use crate::wigner::{convolve, hermitian_coefficients, hermitian_pauli};

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CorrelatorReport {
    /// Direct average.
    pub lhs: f64,
    /// Closed form.
    pub rhs: f64,
    pub abs_err: f64,
}

impl CorrelatorReport {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        Self { lhs, rhs, abs_err: (lhs - rhs).abs() }
    }
}

fn require_unit(o: &Operator) -> Result<()> {
    let norm = o.l2_norm();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::Normalization { norm });
    }
    Ok(())
}

fn require_qubits(o: &Operator, what: &'static str) -> Result<()> {
    if o.d() != 2 {
        return Err(Error::QubitsOnly { d: o.d(), what });
    }
    Ok(())
}

/// `Re Tr(A)/dim`.
fn mean_trace(a: &DMatrix<C64>) -> f64 {
    a.trace().re / a.nrows() as f64
}

/// `C(t) = ½‖[O_D(t), O_A]‖₂²` with `O_D(t) = U_t O_D U_t†`.
pub fn otoc(u_t: &Operator, o_d: &Operator, o_a: &Operator) -> Result<f64> {
    u_t.same_shape(o_d)?;
    u_t.same_shape(o_a)?;
    u_t.require_unitary(1e-8)?;
    require_unit(o_d)?;
    require_unit(o_a)?;
    let evolved = o_d.conjugate_by(u_t);
    let norm = evolved.commutator(o_a).l2_norm();
    Ok(0.5 * norm * norm)
}

/// `E_{j<n} E_{P≠I on j} Re⟨O† P O P†⟩` by enumerating all `(n−1)(d²−1)`
/// single-site Paulis away from the last qudit.
pub fn avg_otoc_weight1_oracle(o: &Operator) -> Result<f64> {
    let (d, n) = (o.d(), o.n());
    if n < 2 {
        return Err(Error::Argument("the weight-1 OTOC average needs n >= 2".into()));
    }
    let od = o.adjoint();
    let mut total = 0.0;
    let mut count = 0usize;
    for site in 0..n - 1 {
        for s in 0..d {
            for t in 0..d {
                if (s, t) == (0, 0) {
                    continue;
                }
                let p = pauli_op(&PauliIndex::single(d, n, site, s, t))?;
                let prod = od.matrix() * p.matrix() * o.matrix() * p.matrix().adjoint();
                total += mean_trace(&prod);
                count += 1;
            }
        }
    }
    Ok(total / count as f64)
}

/// Weight-1 OTOC average against `1 − d²/(d²−1) · (1/(n−1)) Σ_{j<n} I_j[O]`.
pub fn avg_otoc_weight1(o: &Operator) -> Result<CorrelatorReport> {
    let (d, n) = (o.d(), o.n());
    if n < 2 {
        return Err(Error::Argument("the weight-1 OTOC average needs n >= 2".into()));
    }
    let spec = pauli_spectrum(o)?;
    let mut sum = 0.0;
    for j in 0..n - 1 {
        sum += influence_local(&spec, j)?;
    }
    let d2 = (d * d) as f64;
    let rhs = 1.0 - d2 / (d2 - 1.0) * sum / (n - 1) as f64;
    Ok(CorrelatorReport::new(avg_otoc_weight1_oracle(o)?, rhs))
}

/// Difference between the average influence over the first `n − 1` sites and
/// `I[O]/n`, returned with the bound `I[O]/n` it never exceeds.
pub fn influence_average_gap(o: &Operator) -> Result<(f64, f64)> {
    let n = o.n();
    if n < 2 {
        return Err(Error::Argument("the influence average gap needs n >= 2".into()));
    }
    let spec = pauli_spectrum(o)?;
    let locals = (0..n).map(|j| influence_local(&spec, j)).collect::<Result<Vec<f64>>>()?;
    let total: f64 = locals.iter().sum();
    let head: f64 = locals[..n - 1].iter().sum::<f64>() / (n - 1) as f64;
    Ok(((head - total / n as f64).abs(), total / n as f64))
}

fn binomial(n: u64, k: u64) -> i128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: i128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as i128 / (i + 1) as i128;
    }
    acc
}

fn check_krawtchouk(m: u64, x: u64, n: u64, q: u64) -> Result<()> {
    if m > n || x > n || q < 2 {
        return Err(Error::Argument(format!(
            "Krawtchouk arguments need m <= n, x <= n, q >= 2 (got m={m}, x={x}, n={n}, q={q})"
        )));
    }
    Ok(())
}

/// `K_m(x; n, q) = Σ_j (−1)^j (q−1)^{m−j} C(x, j) C(n−x, m−j)`, summed in
/// exact integer arithmetic.
pub fn krawtchouk(m: u64, x: u64, n: u64, q: u64) -> Result<f64> {
    check_krawtchouk(m, x, n, q)?;
    let q1 = (q - 1) as i128;
    let sum: i128 = (0..=m)
        .map(|j| {
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * q1.pow((m - j) as u32) * binomial(x, j) * binomial(n - x, m - j)
        })
        .sum();
    Ok(sum as f64)
}

/// The equivalent form `Σ_j (−q)^j (q−1)^{m−j} C(n−j, m−j) C(x, j)`.
pub fn krawtchouk_alt(m: u64, x: u64, n: u64, q: u64) -> Result<f64> {
    check_krawtchouk(m, x, n, q)?;
    let q1 = (q - 1) as i128;
    let sum: i128 = (0..=m)
        .map(|j| {
            (-(q as i128)).pow(j as u32) * q1.pow((m - j) as u32) * binomial(n - j, m - j) * binomial(x, j)
        })
        .sum();
    Ok(sum as f64)
}

fn check_region(o: &Operator, k: usize, m: usize) -> Result<usize> {
    let n = o.n();
    if k > n || m > n - k {
        return Err(Error::Argument(format!(
            "need k <= n and m <= n - k (got n={n}, k={k}, m={m})"
        )));
    }
    Ok(n - k)
}

/// Number of leading sites (`< outside`) on which `label` acts.
fn weight_below(label: usize, n: usize, outside: usize) -> usize {
    (0..outside.min(n)).filter(|&i| label_site(label, 2, i) != (0, 0)).count()
}

/// `K_m(x; N, 4) / (3^m C(N, m))`: the mean of `(−1/3)^{|supp ∩ A|}` over
/// size-`m` subsets `A ⊆ [N]`, for a Pauli meeting `[N]` in `x` sites.
fn krawtchouk_weight(m: usize, x: usize, big_n: usize) -> Result<f64> {
    let k = krawtchouk(m as u64, x as u64, big_n as u64, 4)?;
    Ok(k / (3f64.powi(m as i32) * binomial(big_n as u64, m as u64) as f64))
}

/// All size-`m` subsets of `0..big_n` as sorted index lists.
fn subsets(big_n: usize, m: usize) -> Vec<Vec<usize>> {
    (0u64..1 << big_n)
        .filter(|b| b.count_ones() as usize == m)
        .map(|b| (0..big_n).filter(|&i| b >> i & 1 == 1).collect())
        .collect()
}

/// All Hermitian Pauli labels acting as `X`, `Y` or `Z` on every site of
/// `sites` and trivially elsewhere.
fn full_support_labels(sites: &[usize]) -> Vec<usize> {
    let mut labels = vec![0usize];
    for &site in sites {
        labels = labels
            .into_iter()
            .flat_map(|l| (1..4).map(move |local| l | local << (2 * site)))
            .collect();
    }
    labels
}

/// Averages `g(O, σ)` over size-`m` subsets of the leading `N` qubits and
/// the `3^m` Paulis supported exactly on each subset.
fn enumerate_weight_m<F>(o: &Operator, big_n: usize, m: usize, g: F) -> Result<f64>
where
    F: Fn(&DMatrix<C64>) -> f64 + Sync,
{
    let n = o.n();
    let per_subset = subsets(big_n, m)
        .par_iter()
        .map(|sites| {
            let labels = full_support_labels(sites);
            let mut acc = 0.0;
            for &l in &labels {
                acc += g(hermitian_pauli(l, n)?.matrix());
            }
            Ok(acc / labels.len() as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(per_subset.iter().sum::<f64>() / per_subset.len() as f64)
}

/// `E_A E_{O_A} Re⟨O† O_A O O_A⟩` over size-`m` regions `A` in the leading
/// `n − k` qubits and all `3^m` Paulis of full support on `A`.
pub fn avg_4pt_weight_m_oracle(o: &Operator, k: usize, m: usize) -> Result<f64> {
    require_qubits(o, "weight-m OTOC averages")?;
    let big_n = check_region(o, k, m)?;
    let od = o.adjoint();
    enumerate_weight_m(o, big_n, m, |p| mean_trace(&(od.matrix() * p * o.matrix() * p)))
}

/// Weight-`m` 4-point average against
/// `(1/C(N,m)) Σ_j (−4/3)^j C(N−j, m−j) I^{(j)}_{[N]}[O]` with `N = n − k` and
/// `I^{(j)}_{[N]} = Σ_{|S|=j, S⊆[N]} Σ_{S ⊆ supp(a)} P_O[a]`.
pub fn avg_4pt_weight_m(o: &Operator, k: usize, m: usize) -> Result<CorrelatorReport> {
    require_qubits(o, "weight-m OTOC averages")?;
    let big_n = check_region(o, k, m)?;
    let n = o.n();
    let spec = pauli_spectrum(o)?;
    let mut level = vec![0.0; m + 1];
    for (label, p) in spec.probs().iter().enumerate() {
        let x = weight_below(label, n, big_n) as u64;
        for (j, lv) in level.iter_mut().enumerate() {
            *lv += binomial(x, j as u64) as f64 * p;
        }
    }
    let norm = binomial(big_n as u64, m as u64) as f64;
    let rhs = (0..=m)
        .map(|j| {
            (-4.0f64 / 3.0).powi(j as i32) * binomial((big_n - j) as u64, (m - j) as u64) as f64 * level[j]
        })
        .sum::<f64>()
        / norm;
    Ok(CorrelatorReport::new(avg_4pt_weight_m_oracle(o, k, m)?, rhs))
}

/// `E_A E_{O_A} Re⟨(O O_A)⁴⟩` by direct enumeration, with the same ranges as
/// [`avg_4pt_weight_m_oracle`].
pub fn avg_8pt_oracle(o: &Operator, k: usize, m: usize) -> Result<f64> {
    require_qubits(o, "8-point OTOC averages")?;
    let big_n = check_region(o, k, m)?;
    enumerate_weight_m(o, big_n, m, |p| {
        let op = o.matrix() * p;
        let sq = &op * &op;
        mean_trace(&(&sq * &sq))
    })
}

/// `τ[a][b][c] = Tr(σ_a σ_b σ_c σ_{a⊕b⊕c})/2` for single-qubit labels.
fn local_four_traces() -> Result<Vec<C64>> {
    let sigma = (0..4).map(|l| hermitian_pauli(l, 1)).collect::<Result<Vec<_>>>()?;
    let mut out = Vec::with_capacity(64);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                let prod = sigma[a].matrix() * sigma[b].matrix() * sigma[c].matrix() * sigma[a ^ b ^ c].matrix();
                out.push(prod.trace() / 2.0);
            }
        }
    }
    Ok(out)
}

/// Twisted convolution spectrum
/// `Γ(e) = Σ_{a,b} O_a O_b O_{a⊕e} O_{b⊕e} ⟨σ_a σ_b σ_{a⊕e} σ_{b⊕e}⟩`
/// over Hermitian Pauli coefficients `O_a`. Cost grows as `64^n`.
fn twisted_spectrum(o: &Operator) -> Result<Vec<C64>> {
    let n = o.n();
    let coeffs = hermitian_coefficients(o)?;
    let tau = local_four_traces()?;
    let count = coeffs.len();
    let support: Vec<usize> = (0..count).filter(|&a| coeffs[a].norm() > 0.0).collect();
    let phase = |a: usize, b: usize, e: usize| -> C64 {
        let mut z = C64::new(1.0, 0.0);
        for site in 0..n {
            let la = (a >> (2 * site)) & 3;
            let lb = (b >> (2 * site)) & 3;
            let lc = ((a ^ e) >> (2 * site)) & 3;
            z *= tau[la * 16 + lb * 4 + lc];
        }
        z
    };
    Ok((0..count)
        .into_par_iter()
        .map(|e| {
            let mut acc = C64::new(0.0, 0.0);
            for &a in &support {
                let ae = coeffs[a] * coeffs[a ^ e];
                if ae.norm() == 0.0 {
                    continue;
                }
                for &b in &support {
                    let be = coeffs[b] * coeffs[b ^ e];
                    if be.norm() != 0.0 {
                        acc += ae * be * phase(a, b, e);
                    }
                }
            }
            acc
        })
        .collect())
}

/// Weight-`m` 8-point average against
/// `Σ_e K_m(|e ∩ [N]|; N, 4)/(3^m C(N,m)) · Γ(e)` with `Γ` the twisted
/// convolution spectrum of `O`. When the Paulis in the support of `O`
/// commute, `Γ(e) = |ĥ(e)|²` for `h = O * O` and this is
/// [`avg_8pt_convolution_form`].
pub fn avg_8pt(o: &Operator, k: usize, m: usize) -> Result<CorrelatorReport> {
    require_qubits(o, "8-point OTOC averages")?;
    let big_n = check_region(o, k, m)?;
    require_unit(o)?;
    let n = o.n();
    let gamma = twisted_spectrum(o)?;
    let mut rhs = 0.0;
    for (e, g) in gamma.iter().enumerate() {
        rhs += krawtchouk_weight(m, weight_below(e, n, big_n), big_n)? * g.re;
    }
    Ok(CorrelatorReport::new(avg_8pt_oracle(o, k, m)?, rhs))
}

/// The convolution form `‖O*O‖₂² · Σ_e K_m(|e ∩ [N]|; N, 4)/(3^m C(N,m)) ·
/// P_{(O*O)/‖O*O‖₂}[e]`. It agrees with the oracle when the Paulis in the
/// support of `O` pairwise commute (for instance diagonal `O`) and not in
/// general: `O = (X+Z)/√2` at `m = 0` gives `⟨O⁴⟩ = 1` against `2`.
pub fn avg_8pt_convolution_form(o: &Operator, k: usize, m: usize) -> Result<CorrelatorReport> {
    require_qubits(o, "8-point OTOC averages")?;
    let big_n = check_region(o, k, m)?;
    require_unit(o)?;
    let n = o.n();
    let h = convolve(o, o)?;
    let norm = h.l2_norm();
    let mut rhs = 0.0;
    if norm > 0.0 {
        let spec = spectrum_unchecked(&h);
        for (e, p) in spec.probs().iter().enumerate() {
            rhs += krawtchouk_weight(m, weight_below(e, n, big_n), big_n)? * p;
        }
        rhs *= norm * norm;
    }
    Ok(CorrelatorReport::new(avg_8pt_oracle(o, k, m)?, rhs))
}
