//! Random operators, unitaries and states for tests, searches and audits.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::tensor::{checked_dim, embed, Operator, C64};

fn gaussian_entry<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

fn ginibre<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<C64> {
    DMatrix::from_fn(dim, dim, |_, _| gaussian_entry(rng))
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, n: usize, rng: &mut R) -> Result<Operator> {
    let dim = checked_dim(d, n)?;
    let qr = ginibre(dim, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let diag = r[(j, j)];
        let phase = if diag.norm() > 0.0 { diag / diag.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    Operator::new(d, n, q)
}

/// Random operator with i.i.d. complex Gaussian entries, rescaled to unit l2 norm.
pub fn random_operator<R: Rng + ?Sized>(d: usize, n: usize, rng: &mut R) -> Result<Operator> {
    let dim = checked_dim(d, n)?;
    Operator::new(d, n, ginibre(dim, rng))?.normalized()
}

/// Random Hermitian operator with unit l2 norm.
pub fn random_hermitian<R: Rng + ?Sized>(d: usize, n: usize, rng: &mut R) -> Result<Operator> {
    let g = random_operator(d, n, rng)?;
    (&g + &g.adjoint()).normalized()
}

/// Random traceless Hermitian operator with unit operator norm.
pub fn random_traceless_hermitian<R: Rng + ?Sized>(d: usize, n: usize, rng: &mut R) -> Result<Operator> {
    let h = random_hermitian(d, n, rng)?;
    let shift = h.trace() / h.dim() as f64;
    let id = Operator::identity(d, n)?;
    let traceless = &h - &id.scale(shift);
    let norm = crate::tensor::operator_norm(&traceless);
    Ok(traceless.scale_re(1.0 / norm))
}

/// Haar-random pure state vector.
pub fn random_pure_state<R: Rng + ?Sized>(d: usize, n: usize, rng: &mut R) -> Result<Vec<C64>> {
    let dim = checked_dim(d, n)?;
    let mut psi: Vec<C64> = (0..dim).map(|_| gaussian_entry(rng)).collect();
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in psi.iter_mut() {
        *z /= norm;
    }
    Ok(psi)
}

/// Hilbert–Schmidt random density operator `GG†/Tr(GG†)`.
pub fn random_density<R: Rng + ?Sized>(d: usize, n: usize, rng: &mut R) -> Result<Operator> {
    let dim = checked_dim(d, n)?;
    let g = ginibre(dim, rng);
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    Operator::new(d, n, rho / tr)
}

/// Tensor product of independent Haar-random single-qudit unitaries.
pub fn random_local_unitary<R: Rng + ?Sized>(d: usize, n: usize, rng: &mut R) -> Result<Operator> {
    let mut u = random_unitary(d, 1, rng)?;
    for _ in 1..n {
        u = u.kron(&random_unitary(d, 1, rng)?)?;
    }
    Ok(u)
}

/// Random two-qudit unitary placed on `support` inside `n` qudits.
pub fn random_two_qudit_gate<R: Rng + ?Sized>(
    d: usize,
    n: usize,
    support: [usize; 2],
    rng: &mut R,
) -> Result<Operator> {
    embed(&random_unitary(d, 2, rng)?, &support, n)
}
