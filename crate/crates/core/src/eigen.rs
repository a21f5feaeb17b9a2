//! Largest-magnitude eigenpair of a Hermitian matrix.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::tensor::{hermitian_eigh, C64};

/// Dense eigendecomposition is used up to this dimension; larger problems use
/// power iteration.
pub const DENSE_EIGEN_LIMIT: usize = 1024;

const POWER_MAX_ITERS: usize = 20_000;
const POWER_TOL: f64 = 1e-13;
const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct TopEigen {
    /// `max |λ|`.
    pub value: f64,
    /// The signed eigenvalue attaining it.
    pub eigenvalue: f64,
    pub vector: DVector<C64>,
    pub iterations: usize,
    /// True when another eigenvalue has the same magnitude.
    pub degenerate: bool,
}

pub fn top_abs_eigen(m: &DMatrix<C64>) -> Result<TopEigen> {
    if m.nrows() <= DENSE_EIGEN_LIMIT {
        Ok(dense_top(m))
    } else {
        power_top(m)
    }
}

fn dense_top(m: &DMatrix<C64>) -> TopEigen {
    let (vals, vecs) = hermitian_eigh(m);
    let best = (0..vals.len())
        .max_by(|&i, &j| vals[i].abs().total_cmp(&vals[j].abs()))
        .expect("empty matrix");
    let value = vals[best].abs();
    let ties = vals.iter().filter(|v| (v.abs() - value).abs() <= DEGENERACY_TOL * value.max(1.0)).count();
    TopEigen {
        value,
        eigenvalue: vals[best],
        vector: vecs.column(best).into_owned(),
        iterations: 1,
        degenerate: ties > 1,
    }
}

/// Power iteration on `M²`, which separates `±λ` only through the final
/// projection step: from a converged `v` in the top eigenspace of `M²`,
/// `Mv ± |λ|v` is an eigenvector of `M` for one of the two signs.
pub fn power_top(m: &DMatrix<C64>) -> Result<TopEigen> {
    let dim = m.nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut v = DVector::from_fn(dim, |_, _| {
        C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
    });
    v /= C64::new(v.norm(), 0.0);
    let mut lambda2 = 0.0;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < POWER_MAX_ITERS {
        iterations += 1;
        let w = m * (m * &v);
        let norm = w.norm();
        if norm == 0.0 {
            return Ok(TopEigen {
                value: 0.0,
                eigenvalue: 0.0,
                vector: v,
                iterations,
                degenerate: true,
            });
        }
        let next = w / C64::new(norm, 0.0);
        let delta = (norm - lambda2).abs();
        lambda2 = norm;
        v = next;
        if delta <= POWER_TOL * lambda2.max(1.0) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Convergence(format!(
            "power iteration did not settle after {POWER_MAX_ITERS} steps"
        )));
    }
    let s = lambda2.sqrt();
    let mv = m * &v;
    let plus = &mv + &v * C64::new(s, 0.0);
    let minus = &mv - &v * C64::new(s, 0.0);
    let (pn, mn) = (plus.norm(), minus.norm());
    let degenerate = pn.min(mn) > 1e-6 * s.max(1.0);
    let (mut vector, eigenvalue) = if pn >= mn { (plus, s) } else { (minus, -s) };
    vector /= C64::new(vector.norm(), 0.0);
    Ok(TopEigen { value: s, eigenvalue, vector, iterations, degenerate })
}

/// `v† M v`.
pub fn quadratic_form(m: &DMatrix<C64>, v: &DVector<C64>) -> C64 {
    v.dotc(&(m * v))
}
