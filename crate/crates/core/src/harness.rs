//! Piecewise-constant 2-local Hamiltonian paths, their compiled unitaries and
//! costs, and certificates checking the cost against the sensitivity, magic
//! and coherence lower bounds.

use std::f64::consts::E;

use log::warn;
use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::coherence::cohering_power_search;
use crate::error::{Error, Result};
use crate::gaussian::{gaussian_circuit_sensitivity, is_matchgate};
use crate::magic::{magic_entropy, magic_power_search};
use crate::random::random_traceless_hermitian;
use crate::search::{is_monomial, SearchConfig};
use crate::sensitivity::{circuit_sensitivity, is_stable, transition_matrix, STABLE_TOL, UNITARY_TOL};
use crate::tensor::{
    checked_dim, embed, expm_hermitian, operator_norm, partial_trace, support_residual, Operator, SubsetMask,
    DEFAULT_TOL,
};

/// Tolerance on `‖h‖∞ = 1`, tracelessness and declared support.
pub const TERM_TOL: f64 = 1e-9;
/// Slack in `path_cost ≥ bound`.
pub const BOUND_SLACK: f64 = 1e-7;

/// How terms with `‖h‖∞ ≠ 1` are ingested.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Normalization {
    /// Reject the path.
    Strict,
    /// Move the scale into `r` and log a warning.
    #[default]
    Rescale,
}

/// `r · h` with `h` a traceless Hermitian operator on `support`.
#[derive(Clone, Debug)]
pub struct Term {
    pub support: Vec<usize>,
    /// Acts on `support.len()` qudits, in the order listed in `support`.
    pub h: Operator,
    pub r: f64,
}

#[derive(Clone, Debug)]
pub struct Segment {
    pub duration: f64,
    pub terms: Vec<Term>,
}

#[derive(Clone, Debug)]
pub struct CircuitPath {
    d: usize,
    n: usize,
    segments: Vec<Segment>,
}

impl Term {
    /// Builds a term from `h` given either on the support (`h.n() ==
    /// support.len()`) or on all `n` qudits, in which case the support is
    /// verified by reconstruction and `h` is reduced to it.
    pub fn new(d: usize, n: usize, support: Vec<usize>, h: Operator, r: f64, mode: Normalization) -> Result<Term> {
        if support.is_empty() || support.len() > 2 {
            return Err(Error::Argument(format!("term support {support:?} must name one or two qudits")));
        }
        if support.iter().any(|&q| q >= n) || (support.len() == 2 && support[0] == support[1]) {
            return Err(Error::Argument(format!("invalid term support {support:?} for n={n}")));
        }
        if !r.is_finite() {
            return Err(Error::Argument(format!("term coefficient {r} is not finite")));
        }
        if h.d() != d {
            return Err(Error::Shape { expected_d: d, expected_n: support.len(), found_d: h.d(), found_n: h.n() });
        }
        let (support, local) = if h.n() == support.len() {
            (support, h)
        } else if h.n() == n {
            let mask = SubsetMask::from_indices(&support, n);
            let residual = support_residual(&h, mask)?;
            if residual > TERM_TOL {
                return Err(Error::Support { residual });
            }
            let traced = n - support.len();
            let local = partial_trace(&h, mask)?.scale_re(1.0 / (d as f64).powi(traced as i32));
            (mask.indices(), local)
        } else {
            return Err(Error::Shape { expected_d: d, expected_n: support.len(), found_d: h.d(), found_n: h.n() });
        };
        local.require_hermitian(TERM_TOL)?;
        let tr = local.trace().norm() / local.dim() as f64;
        if tr > TERM_TOL {
            return Err(Error::Argument(format!("term Hamiltonian has trace/dim {tr:.3e}, expected 0")));
        }
        let norm = operator_norm(&local);
        let (h, r) = if (norm - 1.0).abs() <= TERM_TOL {
            (local, r)
        } else if norm == 0.0 {
            return Err(Error::Argument("term Hamiltonian is zero".into()));
        } else if mode == Normalization::Strict {
            return Err(Error::Argument(format!("term Hamiltonian has operator norm {norm}, expected 1")));
        } else {
            warn!("rescaling term on {support:?}: operator norm {norm} moved into r");
            (local.scale_re(1.0 / norm), r * norm)
        };
        Ok(Term { support, h, r })
    }

    /// `h` embedded into all `n` qudits.
    pub fn embedded(&self, n: usize) -> Result<Operator> {
        embed(&self.h, &self.support, n)
    }
}

impl CircuitPath {
    pub fn new(d: usize, n: usize, segments: Vec<Segment>) -> Result<CircuitPath> {
        if d < 2 || n == 0 {
            return Err(Error::Argument(format!("invalid path shape d={d}, n={n}")));
        }
        checked_dim(d, n)?;
        for seg in &segments {
            if !(seg.duration.is_finite() && seg.duration > 0.0) {
                return Err(Error::Argument(format!("segment duration {} must be positive", seg.duration)));
            }
            for term in &seg.terms {
                if term.h.d() != d || term.h.n() != term.support.len() || term.support.iter().any(|&q| q >= n) {
                    return Err(Error::Argument(format!("term on {:?} does not fit the path", term.support)));
                }
            }
        }
        Ok(CircuitPath { d, n, segments })
    }

    pub fn identity(d: usize, n: usize) -> Result<CircuitPath> {
        CircuitPath::new(d, n, Vec::new())
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// `Σ Δs`.
    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// The same path with every duration divided by `Σ Δs` and every `r`
    /// multiplied by it, so the unitary and the cost are unchanged.
    pub fn rescaled_to_unit_duration(&self) -> CircuitPath {
        let total = self.total_duration();
        if total == 0.0 {
            return self.clone();
        }
        let segments = self
            .segments
            .iter()
            .map(|s| Segment {
                duration: s.duration / total,
                terms: s.terms.iter().map(|t| Term { r: t.r * total, ..t.clone() }).collect(),
            })
            .collect();
        CircuitPath { d: self.d, n: self.n, segments }
    }

    /// Splits every segment into `parts` equal pieces.
    pub fn subdivided(&self, parts: usize) -> CircuitPath {
        let parts = parts.max(1);
        let segments = self
            .segments
            .iter()
            .flat_map(|s| {
                (0..parts).map(move |_| Segment { duration: s.duration / parts as f64, terms: s.terms.clone() })
            })
            .collect();
        CircuitPath { d: self.d, n: self.n, segments }
    }

    /// `Σ_j r_j h_j` of one segment, embedded.
    pub fn segment_hamiltonian(&self, index: usize) -> Result<Operator> {
        let mut h = Operator::zeros(self.d, self.n)?;
        for term in &self.segments[index].terms {
            h = &h + &term.embedded(self.n)?.scale_re(term.r);
        }
        Ok(h)
    }
}

/// `Π_segments exp(−iΔs Σ_j r_j h_j)` with the latest segment leftmost; each
/// segment is applied as `substeps` equal steps.
pub fn compile_unitary(path: &CircuitPath, substeps: usize) -> Result<Operator> {
    if substeps == 0 {
        return Err(Error::Argument("substeps must be at least 1".into()));
    }
    let mut u = Operator::identity(path.d, path.n)?;
    for (i, seg) in path.segments.iter().enumerate() {
        let h = path.segment_hamiltonian(i)?;
        let step = expm_hermitian(&h, seg.duration / substeps as f64)?;
        for _ in 0..substeps {
            u = &step * &u;
        }
    }
    Ok(u)
}

/// `Σ_segments Δs · Σ_j |r_j|`, an upper bound on the cost of the compiled
/// unitary.
pub fn path_cost(path: &CircuitPath) -> f64 {
    path.segments
        .iter()
        .map(|s| s.duration * s.terms.iter().map(|t| t.r.abs()).sum::<f64>())
        .sum()
}

/// SHA-256 of `(d, n)` and the real and imaginary parts of every entry,
/// rounded to multiples of `1e−12`, in row-major order.
pub fn unitary_hash(u: &Operator) -> String {
    let mut hasher = Sha256::new();
    hasher.update((u.d() as u64).to_le_bytes());
    hasher.update((u.n() as u64).to_le_bytes());
    let m = u.matrix();
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let z = m[(r, c)];
            for x in [z.re, z.im] {
                hasher.update(((x * 1e12).round() as i64).to_le_bytes());
            }
        }
    }
    hex::encode(hasher.finalize())
}

#[derive(Clone, Debug)]
pub struct CertificateConfig {
    pub search: SearchConfig,
    pub substeps: usize,
}

impl Default for CertificateConfig {
    fn default() -> Self {
        Self { search: SearchConfig::default(), substeps: 1 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CertificateReport {
    pub path_cost: f64,
    /// `CiS[U]/8`.
    pub cis_bound: f64,
    /// `e/(8 d² log₂ e) · 𝓜[U]`, with `𝓜` a search lower bound.
    pub magic_bound: f64,
    /// `C_r(U)/(8 log₂ d)`, with the cohering power a search lower bound.
    pub coherence_bound: f64,
    pub compiled_unitary_hash: String,
    pub all_bounds_hold: bool,
    pub cis: f64,
    pub magic_power_lower: f64,
    pub cohering_power_lower: f64,
}

impl CertificateReport {
    pub fn max_bound(&self) -> f64 {
        self.cis_bound.max(self.magic_bound).max(self.coherence_bound)
    }

    /// Recomputes `all_bounds_hold` from the stored numbers.
    pub fn bounds_hold(&self) -> bool {
        [self.cis_bound, self.magic_bound, self.coherence_bound]
            .iter()
            .all(|&b| self.path_cost >= b - BOUND_SLACK)
    }

    /// True when the stored flag matches the stored numbers and every bound
    /// holds.
    pub fn is_consistent_and_sound(&self) -> bool {
        let finite = [self.path_cost, self.cis_bound, self.magic_bound, self.coherence_bound]
            .iter()
            .all(|x| x.is_finite());
        finite && self.all_bounds_hold == self.bounds_hold() && self.all_bounds_hold
    }
}

/// Lower-bound constants applied to the three functionals of `U`.
pub fn cis_bound(cis: f64) -> f64 {
    cis / 8.0
}

pub fn magic_bound(d: usize, magic_power: f64) -> f64 {
    E / (8.0 * (d * d) as f64 * E.log2()) * magic_power
}

pub fn coherence_bound(d: usize, cohering_power: f64) -> f64 {
    cohering_power / (8.0 * (d as f64).log2())
}

/// Compiles the path and checks its cost against the sensitivity, magic and
/// coherence lower bounds of the resulting unitary.
pub fn complexity_certificate(path: &CircuitPath, config: &CertificateConfig) -> Result<CertificateReport> {
    let u = compile_unitary(path, config.substeps)?;
    let (cis, (magic, coherence)) = rayon::join(
        || circuit_sensitivity(&u),
        || rayon::join(|| magic_power_search(&u, &config.search), || cohering_power_search(&u, &config.search)),
    );
    let (cis, magic, coherence) = (cis?.value, magic?.value, coherence?.value);
    let d = path.d;
    let mut report = CertificateReport {
        path_cost: path_cost(path),
        cis_bound: cis_bound(cis),
        magic_bound: magic_bound(d, magic),
        coherence_bound: coherence_bound(d, coherence),
        compiled_unitary_hash: unitary_hash(&u),
        all_bounds_hold: false,
        cis,
        magic_power_lower: magic,
        cohering_power_lower: coherence,
    };
    report.all_bounds_hold = report.bounds_hold();
    Ok(report)
}

/// A path of `segments` segments, each with `terms` random 2-local traceless
/// Hermitian terms of unit operator norm on random qudit pairs, random
/// `r ∈ [−r_max, r_max]`, and durations summing to 1.
pub fn random_two_local_path<R: Rng + ?Sized>(
    d: usize,
    n: usize,
    segments: usize,
    terms: usize,
    r_max: f64,
    rng: &mut R,
) -> Result<CircuitPath> {
    if n < 2 {
        return Err(Error::Argument("random 2-local paths need n >= 2".into()));
    }
    let weights: Vec<f64> = (0..segments).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut out = Vec::with_capacity(segments);
    for w in weights {
        let mut ts = Vec::with_capacity(terms);
        for _ in 0..terms {
            let a = rng.random_range(0..n);
            let mut b = rng.random_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            let h = random_traceless_hermitian(d, 2, rng)?;
            let r = rng.random_range(-r_max..=r_max);
            ts.push(Term::new(d, n, vec![a, b], h, r, Normalization::Strict)?);
        }
        out.push(Segment { duration: w / total, terms: ts });
    }
    CircuitPath::new(d, n, out)
}

/// One-stop gate taxonomy.
#[derive(Clone, Debug, Serialize)]
pub struct GateClass {
    /// Maps every Pauli to a rephased Pauli.
    pub clifford: bool,
    /// `CiS[U] = 0`.
    pub stable: bool,
    /// `CiS^G[U] = 0`; absent for qudits.
    pub gaussian_stable: Option<bool>,
    pub magic_entropy: f64,
    pub cis: f64,
    pub cis_gaussian: Option<f64>,
}

pub fn classify_gate(u: &Operator) -> Result<GateClass> {
    classify_gate_with_tol(u, STABLE_TOL)
}

/// [`classify_gate`] with `tol` as the threshold on off-pattern
/// transition-matrix entries.
pub fn classify_gate_with_tol(u: &Operator, tol: f64) -> Result<GateClass> {
    u.require_unitary(UNITARY_TOL)?;
    let t = transition_matrix(u)?;
    let clifford = is_monomial(&t.mat, tol.max(DEFAULT_TOL));
    let stable = is_stable(u, tol)?;
    let cis = circuit_sensitivity(u)?.value;
    let (gaussian_stable, cis_gaussian) = if u.d() == 2 {
        (Some(is_matchgate(u, tol)?), Some(gaussian_circuit_sensitivity(u)?.value))
    } else {
        (None, None)
    };
    Ok(GateClass { clifford, stable, gaussian_stable, magic_entropy: magic_entropy(u)?, cis, cis_gaussian })
}
