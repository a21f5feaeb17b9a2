//! Riemannian gradient ascent of entropy differences on the unit sphere.
//!
//! Both magic power and pure-state cohering power maximize
//! `±(H(|Ac|²) − H(|c|²))` over unit vectors `c`, where `A` is unitary (the
//! Pauli transition matrix, or `U` itself) and `H` is the Shannon entropy in
//! bits.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::tensor::{xlog2x, C64};

#[derive(Clone, Debug)]
pub struct SearchConfig {
    /// Random restarts in addition to the basis-vector starts.
    pub restarts: usize,
    /// Ascent steps per start.
    pub max_steps: usize,
    pub seed: u64,
    /// Hilbert–Schmidt mixed-state samples (cohering power only).
    pub mixed_samples: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { restarts: 64, max_steps: 2000, seed: 0, mixed_samples: 256 }
    }
}

/// Ascent stops once the objective gains less than this over `STALL_WINDOW` steps.
const STALL_TOL: f64 = 1e-10;
const STALL_WINDOW: usize = 50;

pub(crate) fn entropy_of(v: &DVector<C64>) -> f64 {
    v.iter().map(|z| -xlog2x(z.norm_sqr())).sum()
}

/// `H(|Ac|²) − H(|c|²)` for a unit vector `c`.
pub(crate) fn entropy_gain(a: &DMatrix<C64>, c: &DVector<C64>) -> f64 {
    entropy_of(&(a * c)) - entropy_of(c)
}

/// `∂H(|y|²)/∂ȳ` without the `−y/ln 2` term, which drops out after projection
/// because `A` is unitary.
fn entropy_grad(y: &DVector<C64>) -> DVector<C64> {
    y.map(|z| {
        let p = z.norm_sqr();
        if p > 0.0 {
            z * (-p.log2())
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

#[derive(Clone, Debug)]
pub(crate) struct Ascent {
    pub value: f64,
    pub point: DVector<C64>,
    pub converged: bool,
}

/// Maximizes `sign · (H(|Ac|²) − H(|c|²))` from `start`.
pub(crate) fn ascend(a: &DMatrix<C64>, start: DVector<C64>, sign: f64, max_steps: usize) -> Ascent {
    let ah = a.adjoint();
    let f = |c: &DVector<C64>| sign * entropy_gain(a, c);
    let mut c = &start / C64::new(start.norm(), 0.0);
    let mut value = f(&c);
    let mut history = vec![value];
    let mut eta: f64 = 0.25;
    let mut converged = false;
    for _ in 0..max_steps {
        let y = a * &c;
        let g = (&ah * entropy_grad(&y) - entropy_grad(&c)) * C64::new(2.0 * sign, 0.0);
        let radial = c.dotc(&g).re;
        let tangent = &g - &c * C64::new(radial, 0.0);
        let slope = tangent.norm_squared();
        if slope < 1e-24 {
            converged = true;
            break;
        }
        eta = (eta * 2.0).min(4.0);
        let mut accepted = false;
        while eta > 1e-14 {
            let trial = &c + &tangent * C64::new(eta, 0.0);
            let trial = &trial / C64::new(trial.norm(), 0.0);
            let tv = f(&trial);
            if tv >= value + 1e-4 * eta * slope {
                c = trial;
                value = tv;
                accepted = true;
                break;
            }
            eta *= 0.5;
        }
        if !accepted {
            converged = true;
            break;
        }
        history.push(value);
        if history.len() > STALL_WINDOW && value - history[history.len() - 1 - STALL_WINDOW] < STALL_TOL {
            converged = true;
            break;
        }
    }
    Ascent { value, point: c, converged }
}

fn random_start(dim: usize, rng: &mut ChaCha8Rng) -> DVector<C64> {
    DVector::from_fn(dim, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// Seeds restart `index` on its own ChaCha stream so results do not depend on
/// the thread schedule.
pub(crate) fn restart_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Clone, Debug)]
pub(crate) struct SphereBest {
    /// Point attaining the best `|H(|Ac|²) − H(|c|²)|` found.
    pub point: DVector<C64>,
    pub converged: bool,
    pub starts: usize,
}

/// Ascends in both signs from every basis vector in `basis_starts` and from
/// `config.restarts` random starts.
pub(crate) fn sphere_search(a: &DMatrix<C64>, basis_starts: &[usize], config: &SearchConfig) -> SphereBest {
    let dim = a.nrows();
    let mut starts: Vec<DVector<C64>> = basis_starts
        .iter()
        .map(|&i| {
            let mut v = DVector::zeros(dim);
            v[i] = C64::new(1.0, 0.0);
            v
        })
        .collect();
    for r in 0..config.restarts {
        starts.push(random_start(dim, &mut restart_rng(config.seed, r as u64)));
    }
    let results: Vec<Ascent> = starts
        .par_iter()
        .flat_map_iter(|s| {
            [1.0, -1.0]
                .into_iter()
                .map(move |sign| ascend(a, s.clone(), sign, config.max_steps))
        })
        .collect();
    let best = results
        .iter()
        .max_by(|x, y| x.value.total_cmp(&y.value))
        .expect("at least one start");
    SphereBest {
        point: best.point.clone(),
        converged: results.iter().all(|r| r.converged),
        starts: starts.len(),
    }
}

/// True when every column of `a` has a single entry of unit modulus, so `a`
/// maps basis vectors to rephased basis vectors and every entropy gain is 0.
pub(crate) fn is_monomial(a: &DMatrix<C64>, tol: f64) -> bool {
    a.column_iter().all(|col| {
        let big = col.iter().filter(|z| z.norm() > tol).count();
        big == 1 && col.iter().all(|z| z.norm() <= tol || (z.norm() - 1.0).abs() <= tol)
    })
}
