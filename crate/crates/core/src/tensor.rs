//! Dense operators on `(C^d)^{⊗n}` and the generalized Pauli basis.
//!
//! Qudit 0 is the leftmost tensor factor, so the computational basis index of
//! `|j_0 j_1 ... j_{n-1}>` is `Σ_i j_i d^{n-1-i}`. Pauli labels are stored as a
//! single integer in little-endian mixed radix over `(s_0, t_0, s_1, t_1, ...)`,
//! i.e. `label = Σ_i (s_i + d t_i) (d²)^i`.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::sync::atomic::{AtomicUsize, Ordering};

use nalgebra::{DMatrix, SymmetricEigen};
pub use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Default tolerance for unitarity / Hermiticity predicates (max abs entry).
pub const DEFAULT_TOL: f64 = 1e-9;

const DEFAULT_DIMENSION_CAP: usize = 4096;

static DIMENSION_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_DIMENSION_CAP);

/// Largest Hilbert-space dimension `d^n` any constructor will accept.
pub fn dimension_cap() -> usize {
    DIMENSION_CAP.load(Ordering::Relaxed)
}

pub fn set_dimension_cap(cap: usize) {
    DIMENSION_CAP.store(cap.max(1), Ordering::Relaxed);
}

/// Returns `d^n`, enforcing the global cap.
pub fn checked_dim(d: usize, n: usize) -> Result<usize> {
    if d < 2 {
        return Err(Error::Argument(format!("local dimension must be >= 2, got {d}")));
    }
    let cap = dimension_cap();
    let mut dim: usize = 1;
    for _ in 0..n {
        dim = match dim.checked_mul(d) {
            Some(v) if v <= cap => v,
            _ => {
                return Err(Error::DimensionCap {
                    dim: d.saturating_pow(n as u32),
                    cap,
                })
            }
        };
    }
    Ok(dim)
}

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub(crate) fn omega(d: usize, k: usize) -> C64 {
    let theta = 2.0 * PI * (k % d) as f64 / d as f64;
    C64::new(theta.cos(), theta.sin())
}

/// A dense operator on `n` qudits of local dimension `d`.
#[derive(Clone, PartialEq)]
pub struct Operator {
    d: usize,
    n: usize,
    mat: DMatrix<C64>,
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Operator(d={}, n={}) {}", self.d, self.n, self.mat)
    }
}

impl Operator {
    pub fn new(d: usize, n: usize, mat: DMatrix<C64>) -> Result<Self> {
        let dim = checked_dim(d, n)?;
        if mat.nrows() != dim || mat.ncols() != dim {
            return Err(Error::Argument(format!(
                "matrix is {}x{}, expected {dim}x{dim} for d={d}, n={n}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        if mat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Argument("matrix has non-finite entries".into()));
        }
        Ok(Self { d, n, mat })
    }

    /// Builds from a row-major table of entries.
    pub fn from_rows(d: usize, n: usize, rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Argument("matrix rows must all have the same length as the row count".into()));
        }
        let mat = DMatrix::from_fn(dim, dim, |i, j| rows[i][j]);
        Self::new(d, n, mat)
    }

    pub fn identity(d: usize, n: usize) -> Result<Self> {
        let dim = checked_dim(d, n)?;
        Ok(Self { d, n, mat: DMatrix::identity(dim, dim) })
    }

    pub fn zeros(d: usize, n: usize) -> Result<Self> {
        let dim = checked_dim(d, n)?;
        Ok(Self { d, n, mat: DMatrix::zeros(dim, dim) })
    }

    pub(crate) fn from_parts(d: usize, n: usize, mat: DMatrix<C64>) -> Self {
        debug_assert_eq!(mat.nrows(), d.pow(n as u32));
        Self { d, n, mat }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.mat[(row, col)]
    }

    pub fn same_shape(&self, other: &Operator) -> Result<()> {
        if self.d != other.d || self.n != other.n {
            return Err(Error::Shape {
                expected_d: self.d,
                expected_n: self.n,
                found_d: other.d,
                found_n: other.n,
            });
        }
        Ok(())
    }

    pub fn adjoint(&self) -> Operator {
        Operator::from_parts(self.d, self.n, self.mat.adjoint())
    }

    pub fn scale(&self, z: C64) -> Operator {
        Operator::from_parts(self.d, self.n, &self.mat * z)
    }

    pub fn scale_re(&self, x: f64) -> Operator {
        self.scale(C64::new(x, 0.0))
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    /// `A ⊗ B`, with `self` on the leading qudits.
    pub fn kron(&self, other: &Operator) -> Result<Operator> {
        if self.d != other.d {
            return Err(Error::Argument(format!(
                "cannot tensor local dimensions {} and {}",
                self.d, other.d
            )));
        }
        checked_dim(self.d, self.n + other.n)?;
        Ok(Operator::from_parts(self.d, self.n + other.n, self.mat.kronecker(&other.mat)))
    }

    /// `U · self · U†`.
    pub fn conjugate_by(&self, u: &Operator) -> Operator {
        assert_eq!((self.d, self.n), (u.d, u.n), "conjugation shape mismatch");
        Operator::from_parts(self.d, self.n, &u.mat * &self.mat * u.mat.adjoint())
    }

    /// `self · other − other · self`.
    pub fn commutator(&self, other: &Operator) -> Operator {
        assert_eq!((self.d, self.n), (other.d, other.n), "commutator shape mismatch");
        Operator::from_parts(self.d, self.n, &self.mat * &other.mat - &other.mat * &self.mat)
    }

    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        self.mat
            .iter()
            .zip(other.mat.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn unitarity_deviation(&self) -> f64 {
        let prod = self.mat.adjoint() * &self.mat;
        let dim = self.dim();
        let mut worst: f64 = 0.0;
        for j in 0..dim {
            for i in 0..dim {
                let target = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
                worst = worst.max((prod[(i, j)] - target).norm());
            }
        }
        worst
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        let dim = self.dim();
        let mut worst: f64 = 0.0;
        for j in 0..dim {
            for i in 0..=j {
                worst = worst.max((self.mat[(i, j)] - self.mat[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    pub fn require_unitary(&self, tol: f64) -> Result<()> {
        let deviation = self.unitarity_deviation();
        if deviation > tol {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(())
    }

    pub fn require_hermitian(&self, tol: f64) -> Result<()> {
        let deviation = self.hermiticity_deviation();
        if deviation > tol {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(())
    }

    /// Normalized Hilbert–Schmidt norm `sqrt(Tr(A†A)/d^n)`.
    pub fn l2_norm(&self) -> f64 {
        (self.mat.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.dim() as f64).sqrt()
    }

    /// Rescales to unit l2 norm.
    pub fn normalized(&self) -> Result<Operator> {
        let norm = self.l2_norm();
        if norm <= f64::EPSILON {
            return Err(Error::Normalization { norm });
        }
        Ok(self.scale_re(1.0 / norm))
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let h = (&self.mat + self.mat.adjoint()) * C64::new(0.5, 0.0);
        let mut vals: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
        vals.sort_by(|a, b| a.total_cmp(b));
        vals
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!((self.d, self.n), (rhs.d, rhs.n), "operator shape mismatch");
        Operator::from_parts(self.d, self.n, &self.mat + &rhs.mat)
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!((self.d, self.n), (rhs.d, rhs.n), "operator shape mismatch");
        Operator::from_parts(self.d, self.n, &self.mat - &rhs.mat)
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!((self.d, self.n), (rhs.d, rhs.n), "operator shape mismatch");
        Operator::from_parts(self.d, self.n, &self.mat * &rhs.mat)
    }
}

/// Label of a generalized Pauli string `⊗_i X^{s_i} Z^{t_i}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliIndex {
    d: usize,
    pairs: Vec<(usize, usize)>,
}

impl PauliIndex {
    /// Components are reduced mod `d`.
    pub fn new(d: usize, pairs: &[(usize, usize)]) -> Self {
        assert!(d >= 2, "local dimension must be >= 2");
        Self {
            d,
            pairs: pairs.iter().map(|&(s, t)| (s % d, t % d)).collect(),
        }
    }

    pub fn identity(d: usize, n: usize) -> Self {
        Self { d, pairs: vec![(0, 0); n] }
    }

    /// Weight-one label acting as `X^s Z^t` on `site`.
    pub fn single(d: usize, n: usize, site: usize, s: usize, t: usize) -> Self {
        let mut pairs = vec![(0, 0); n];
        pairs[site] = (s % d, t % d);
        Self { d, pairs }
    }

    pub fn from_label(label: usize, d: usize, n: usize) -> Self {
        let mut rest = label;
        let pairs = (0..n)
            .map(|_| {
                let s = rest % d;
                rest /= d;
                let t = rest % d;
                rest /= d;
                (s, t)
            })
            .collect();
        Self { d, pairs }
    }

    pub fn label(&self) -> usize {
        let d2 = self.d * self.d;
        self.pairs
            .iter()
            .rev()
            .fold(0, |acc, &(s, t)| acc * d2 + s + self.d * t)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Number of sites carrying a non-identity factor.
    pub fn weight(&self) -> usize {
        self.pairs.iter().filter(|&&p| p != (0, 0)).count()
    }

    pub fn support(&self) -> SubsetMask {
        let bits = self
            .pairs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != (0, 0))
            .fold(0u64, |m, (i, _)| m | (1 << i));
        SubsetMask::new(bits, self.n())
    }

    /// Componentwise sum mod `d`.
    pub fn add(&self, other: &PauliIndex) -> PauliIndex {
        assert_eq!((self.d, self.n()), (other.d, other.n()));
        let pairs = self
            .pairs
            .iter()
            .zip(&other.pairs)
            .map(|(&(s1, t1), &(s2, t2))| ((s1 + s2) % self.d, (t1 + t2) % self.d))
            .collect();
        PauliIndex { d: self.d, pairs }
    }
}

/// Weight of every label `0..d^{2n}` in mixed-radix order.
pub fn label_weights(d: usize, n: usize) -> Vec<usize> {
    let d2 = d * d;
    let count = d2.pow(n as u32);
    (0..count)
        .map(|mut label| {
            let mut w = 0;
            for _ in 0..n {
                if label % d2 != 0 {
                    w += 1;
                }
                label /= d2;
            }
            w
        })
        .collect()
}

/// Local `(s, t)` pair of `label` at `site`.
pub fn label_site(label: usize, d: usize, site: usize) -> (usize, usize) {
    let local = (label / (d * d).pow(site as u32)) % (d * d);
    (local % d, local / d)
}

/// A subset of qudits encoded as a bitmask; bit `i` selects qudit `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SubsetMask {
    bits: u64,
    n: usize,
}

impl SubsetMask {
    pub fn new(bits: u64, n: usize) -> Self {
        assert!(n <= 64, "subset masks support at most 64 qudits");
        let valid = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        assert_eq!(bits & !valid, 0, "mask has bits beyond qudit {}", n.saturating_sub(1));
        Self { bits, n }
    }

    pub fn from_indices(indices: &[usize], n: usize) -> Self {
        let bits = indices.iter().fold(0u64, |m, &i| {
            assert!(i < n, "qudit index {i} out of range for n={n}");
            m | (1 << i)
        });
        Self { bits, n }
    }

    pub fn full(n: usize) -> Self {
        Self::new(if n == 64 { u64::MAX } else { (1u64 << n) - 1 }, n)
    }

    pub fn empty(n: usize) -> Self {
        Self { bits: 0, n }
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.n && self.bits & (1 << i) != 0
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn complement(&self) -> SubsetMask {
        SubsetMask::new(!self.bits & SubsetMask::full(self.n).bits, self.n)
    }

    pub fn indices(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.contains(i)).collect()
    }
}

/// `⊗_i X^{s_i} Z^{t_i}` with `X|j> = |j+1 mod d>` and `Z|j> = e^{2πij/d}|j>`.
pub fn pauli_op(a: &PauliIndex) -> Result<Operator> {
    let (d, n) = (a.d, a.n());
    let dim = checked_dim(d, n)?;
    let mut mat = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        let (row, phase) = pauli_action(a.pairs(), d, n, col);
        mat[(row, col)] = omega(d, phase);
    }
    Ok(Operator::from_parts(d, n, mat))
}

/// For basis column `col`, returns the row hit by `P_a` and the exponent of ω.
fn pauli_action(pairs: &[(usize, usize)], d: usize, n: usize, col: usize) -> (usize, usize) {
    let mut row = 0;
    let mut phase = 0;
    let mut rest = col;
    let mut place = 1;
    for site in (0..n).rev() {
        let j = rest % d;
        rest /= d;
        let (s, t) = pairs[site];
        row += ((j + s) % d) * place;
        phase += t * j;
        place *= d;
    }
    (row, phase % d)
}

/// Per-site digits of every computational basis index, qudit 0 first.
fn basis_digits(d: usize, n: usize) -> Vec<Vec<usize>> {
    let dim = d.pow(n as u32);
    (0..dim)
        .map(|mut idx| {
            let mut digits = vec![0; n];
            for site in (0..n).rev() {
                digits[site] = idx % d;
                idx /= d;
            }
            digits
        })
        .collect()
}

/// Coefficients `c_a = <P_a, O> = Tr(P_a† O)/d^n` for every label `a`, so that
/// `O = Σ_a c_a P_a`.
pub fn pauli_coefficients(op: &Operator) -> Vec<C64> {
    let (d, n) = (op.d, op.n);
    let dim = op.dim();
    let digits = basis_digits(d, n);
    let roots: Vec<C64> = (0..d).map(|k| omega(d, k).conj()).collect();
    let count = (d * d).pow(n as u32);
    let inv_dim = 1.0 / dim as f64;
    let mut out = Vec::with_capacity(count);
    for label in 0..count {
        let a = PauliIndex::from_label(label, d, n);
        let mut acc = C64::new(0.0, 0.0);
        for (col, dig) in digits.iter().enumerate() {
            let mut row = 0;
            let mut phase = 0;
            for (site, &j) in dig.iter().enumerate() {
                let (s, t) = a.pairs[site];
                row = row * d + (j + s) % d;
                phase += t * j;
            }
            acc += roots[phase % d] * op.mat[(row, col)];
        }
        out.push(acc * inv_dim);
    }
    out
}

/// Inverse of [`pauli_coefficients`]: `Σ_a c_a P_a`.
pub fn from_pauli_coefficients(d: usize, n: usize, coeffs: &[C64]) -> Result<Operator> {
    let dim = checked_dim(d, n)?;
    let count = (d * d).pow(n as u32);
    if coeffs.len() != count {
        return Err(Error::Argument(format!(
            "expected {count} Pauli coefficients, got {}",
            coeffs.len()
        )));
    }
    let mut mat = DMatrix::zeros(dim, dim);
    for (label, &cf) in coeffs.iter().enumerate() {
        if cf == C64::new(0.0, 0.0) {
            continue;
        }
        let a = PauliIndex::from_label(label, d, n);
        for col in 0..dim {
            let (row, phase) = pauli_action(a.pairs(), d, n, col);
            mat[(row, col)] += cf * omega(d, phase);
        }
    }
    Ok(Operator::from_parts(d, n, mat))
}

/// Normalized Hilbert–Schmidt inner product `Tr(A† B)/d^n`.
pub fn hs_inner(a: &Operator, b: &Operator) -> Result<C64> {
    a.same_shape(b)?;
    let sum: C64 = a.mat.iter().zip(b.mat.iter()).map(|(x, y)| x.conj() * y).sum();
    Ok(sum / a.dim() as f64)
}

/// Normalized Schatten norm `(Tr|A|^p / d^n)^{1/p}`; `p = ∞` gives the operator norm.
pub fn lp_norm(a: &Operator, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::Argument(format!("l_p norm requires p >= 1, got {p}")));
    }
    let sv = a.mat.clone().singular_values();
    if p.is_infinite() {
        return Ok(sv.iter().copied().fold(0.0, f64::max));
    }
    let total: f64 = sv.iter().map(|s| s.powf(p)).sum();
    Ok((total / a.dim() as f64).powf(1.0 / p))
}

/// Operator norm (largest singular value).
pub fn operator_norm(a: &Operator) -> f64 {
    a.mat.clone().singular_values().iter().copied().fold(0.0, f64::max)
}

/// Index offsets contributed by the digits of `sites` (in the given order).
fn site_offsets(d: usize, n: usize, sites: &[usize]) -> Vec<usize> {
    let k = sites.len();
    let count = d.pow(k as u32);
    (0..count)
        .map(|mut idx| {
            let mut off = 0;
            for pos in (0..k).rev() {
                let digit = idx % d;
                idx /= d;
                off += digit * d.pow((n - 1 - sites[pos]) as u32);
            }
            off
        })
        .collect()
}

/// Unnormalized partial trace over the complement of `keep`.
pub fn partial_trace(a: &Operator, keep: SubsetMask) -> Result<Operator> {
    if keep.n() != a.n {
        return Err(Error::Argument(format!(
            "subset mask over {} qudits applied to a {}-qudit operator",
            keep.n(),
            a.n
        )));
    }
    let kept = keep.indices();
    let traced = keep.complement().indices();
    let kept_off = site_offsets(a.d, a.n, &kept);
    let traced_off = site_offsets(a.d, a.n, &traced);
    let out_dim = kept_off.len();
    let mut mat = DMatrix::zeros(out_dim, out_dim);
    for (r, &ro) in kept_off.iter().enumerate() {
        for (cidx, &co) in kept_off.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for &t in &traced_off {
                acc += a.mat[(ro + t, co + t)];
            }
            mat[(r, cidx)] = acc;
        }
    }
    Ok(Operator::from_parts(a.d, kept.len(), mat))
}

/// Places `local` (acting on `support.len()` qudits, in that order) into an
/// `n`-qudit operator, tensored with the identity elsewhere.
pub fn embed(local: &Operator, support: &[usize], n: usize) -> Result<Operator> {
    if local.n != support.len() {
        return Err(Error::Argument(format!(
            "local operator acts on {} qudits but {} support sites were given",
            local.n,
            support.len()
        )));
    }
    let mut seen = 0u64;
    for &q in support {
        if q >= n || seen & (1 << q) != 0 {
            return Err(Error::Argument(format!("invalid support {support:?} for n={n}")));
        }
        seen |= 1 << q;
    }
    let d = local.d;
    let dim = checked_dim(d, n)?;
    let rest: Vec<usize> = (0..n).filter(|q| seen & (1 << q) == 0).collect();
    let sup_off = site_offsets(d, n, support);
    let rest_off = site_offsets(d, n, &rest);
    let mut mat = DMatrix::zeros(dim, dim);
    for &t in &rest_off {
        for (r, &ro) in sup_off.iter().enumerate() {
            for (cidx, &co) in sup_off.iter().enumerate() {
                mat[(ro + t, co + t)] = local.mat[(r, cidx)];
            }
        }
    }
    Ok(Operator::from_parts(d, n, mat))
}

/// Reconstructs `A` from its marginal on `support`: `Tr_{S^c}(A)/d^{|S^c|} ⊗ I`.
pub fn reconstruct_on(a: &Operator, support: SubsetMask) -> Result<Operator> {
    let marginal = partial_trace(a, support)?;
    let traced = a.n - support.len();
    let local = marginal.scale_re(1.0 / (a.d as f64).powi(traced as i32));
    embed(&local, &support.indices(), a.n)
}

/// Operator-norm residual of `A − reconstruct_on(A, support)`.
pub fn support_residual(a: &Operator, support: SubsetMask) -> Result<f64> {
    let rec = reconstruct_on(a, support)?;
    Ok(operator_norm(&(a - &rec)))
}

/// Smallest set of qudits on which `A` acts nontrivially (qudit `j` is
/// dropped when `A` equals its reconstruction without `j` within `tol`).
pub fn operator_support(a: &Operator, tol: f64) -> Result<SubsetMask> {
    let mut support = SubsetMask::full(a.n);
    for j in 0..a.n {
        let candidate = SubsetMask::new(support.bits() & !(1 << j), a.n);
        if support_residual(a, candidate)? <= tol {
            support = candidate;
        }
    }
    Ok(support)
}

/// Single-qudit depolarizing channel `(1−γ)O + γ Tr_j(O) ⊗ I/d` on qudit `j`.
pub fn depolarize(o: &Operator, j: usize, gamma: f64) -> Result<Operator> {
    if j >= o.n {
        return Err(Error::Argument(format!("qudit {j} out of range for n={}", o.n)));
    }
    let keep = SubsetMask::full(o.n).complement_of(j);
    let averaged = reconstruct_on(o, keep)?;
    Ok(&o.scale_re(1.0 - gamma) + &averaged.scale_re(gamma))
}

impl SubsetMask {
    fn complement_of(self, j: usize) -> SubsetMask {
        SubsetMask::new(self.bits & !(1 << j), self.n)
    }
}

/// Hermitian eigendecomposition `(eigenvalues, eigenvectors)`.
pub fn hermitian_eigh(a: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let h = (a + a.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

/// Applies `f` to the spectrum of a Hermitian matrix.
pub fn hermitian_function(a: &DMatrix<C64>, f: impl Fn(f64) -> C64) -> DMatrix<C64> {
    let (vals, vecs) = hermitian_eigh(a);
    let mut scaled = vecs.clone();
    for (j, &v) in vals.iter().enumerate() {
        let fv = f(v);
        for i in 0..scaled.nrows() {
            scaled[(i, j)] *= fv;
        }
    }
    scaled * vecs.adjoint()
}

/// `exp(−i t H)` for Hermitian `H`.
pub fn expm_hermitian(h: &Operator, t: f64) -> Result<Operator> {
    h.require_hermitian(1e-8)?;
    let mat = hermitian_function(&h.mat, |lambda| {
        let phase = -t * lambda;
        C64::new(phase.cos(), phase.sin())
    });
    Ok(Operator::from_parts(h.d, h.n, mat))
}

pub(crate) fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &Operator) -> f64 {
    rho.hermitian_eigenvalues().into_iter().map(|l| -xlog2x(l)).sum()
}

/// Checks that `rho` is a density operator within `tol`.
pub fn validate_state(rho: &Operator, tol: f64) -> Result<()> {
    let herm = rho.hermiticity_deviation();
    if herm > tol {
        return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:.3e})")));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
        return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
    }
    let min_eig = rho.hermitian_eigenvalues().first().copied().unwrap_or(0.0);
    if min_eig < -tol {
        return Err(Error::InvalidState(format!("negative eigenvalue {min_eig:.3e}")));
    }
    Ok(())
}

/// `(1/2^n) Σ_{A⊆[n]} −log₂ Tr(ρ_A²)`.
pub fn avg_renyi2_entanglement(rho: &Operator) -> Result<f64> {
    validate_state(rho, 1e-9)?;
    let n = rho.n;
    let subsets = 1u64 << n;
    let mut total = 0.0;
    for bits in 0..subsets {
        let marginal = partial_trace(rho, SubsetMask::new(bits, n))?;
        let purity: f64 = marginal.mat.iter().map(|z| z.norm_sqr()).sum();
        total += -purity.log2();
    }
    Ok(total / subsets as f64)
}

/// Projector `|ψ><ψ|` onto a (normalized) state vector.
pub fn projector(d: usize, n: usize, psi: &[C64]) -> Result<Operator> {
    let dim = checked_dim(d, n)?;
    if psi.len() != dim {
        return Err(Error::Argument(format!("state has length {}, expected {dim}", psi.len())));
    }
    let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm <= f64::EPSILON {
        return Err(Error::Argument("zero state vector".into()));
    }
    let mat = DMatrix::from_fn(dim, dim, |i, j| psi[i] * psi[j].conj() / (norm * norm));
    Ok(Operator::from_parts(d, n, mat))
}
