use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::group::FiniteAbelianGroup;
use crate::linalg::{from_real, frobenius, guard_dense, identity};
use crate::measures::ProbabilityMeasure;
use crate::{Error, Result, Mat};

const CHAIN_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DilationResiduals {
    /// `||QJ - I||_F`.
    pub qj: f64,
    /// `||QEJ - P^2||_F`.
    pub qej: f64,
    /// `||E^2 - E||_F`.
    pub idempotence: f64,
    /// `max |E 1 - 1|`.
    pub constants: f64,
    /// Smallest entry of `E`.
    pub min_entry: f64,
    /// `max_x |sum_y m(x, y) - pi_x|`, so `J` is an `L^p(pi) -> L^p(m)` isometry for every `p`.
    pub isometry: f64,
}

impl DilationResiduals {
    pub fn max_residual(&self) -> f64 {
        self.qj.max(self.qej).max(self.idempotence).max(self.constants).max(self.isometry)
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.max_residual() <= tol && self.min_entry >= 0.0
    }
}

/// Path-space factorization `P^2 = Q E J`, `QJ = I` over `Omega = supp m`,
/// `m(x, y) = pi_x P(x, y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DilationTriple {
    pub j: Mat,
    pub e: Mat,
    pub q: Mat,
    pub base_measure: Vec<f64>,
    /// Weights `m(x, y)` in the order of `support`.
    pub path_measure: Vec<f64>,
    pub support: Vec<(usize, usize)>,
    pub residuals: DilationResiduals,
}

fn validate_chain(p: &DMatrix<f64>, pi: &[f64]) -> Result<()> {
    let n = p.nrows();
    if p.ncols() != n || pi.len() != n || n == 0 {
        return Err(Error::Structural(format!("chain is {}x{} with {} stationary weights", p.nrows(), p.ncols(), pi.len())));
    }
    if let Some(((x, y), v)) = (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).map(|(x, y)| ((x, y), p[(x, y)])).find(|(_, v)| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::Precondition(format!("P({x},{y}) = {v} is not a nonnegative number")));
    }
    for x in 0..n {
        let s: f64 = p.row(x).sum();
        if (s - 1.0).abs() > CHAIN_TOL {
            return Err(Error::Precondition(format!("row {x} of P sums to {s}")));
        }
    }
    if let Some((x, w)) = pi.iter().enumerate().find(|(_, w)| !(w.is_finite() && **w > 0.0)) {
        return Err(Error::Precondition(format!("stationary weight pi_{x} = {w} is not positive")));
    }
    let total: f64 = pi.iter().sum();
    if (total - 1.0).abs() > CHAIN_TOL {
        return Err(Error::Precondition(format!("stationary weights sum to {total}")));
    }
    for x in 0..n {
        for y in x + 1..n {
            let d = (pi[x] * p[(x, y)] - pi[y] * p[(y, x)]).abs();
            if d > CHAIN_TOL {
                return Err(Error::Precondition(format!("detailed balance fails at ({x},{y}) by {d:.3e}")));
            }
        }
    }
    Ok(())
}

/// Rota dilation of a reversible row-stochastic `P` with stationary law `pi`.
///
/// `J f(x, y) = f(x)`, `(E g)(x, y) = sum_x' m(x', y) g(x', y) / pi_y`,
/// `Q g(x) = sum_y P(x, y) g(x, y)`; the dilated operator is `P^2`.
pub fn rota_dilation(p: &DMatrix<f64>, pi: &[f64]) -> Result<DilationTriple> {
    validate_chain(p, pi)?;
    let n = p.nrows();
    let support: Vec<(usize, usize)> = (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).filter(|&(x, y)| p[(x, y)] > 0.0).collect();
    let path_measure: Vec<f64> = support.iter().map(|&(x, y)| pi[x] * p[(x, y)]).collect();
    let k = support.len();
    guard_dense("path space", k as u128)?;
    let j = DMatrix::from_fn(k, n, |w, x| if support[w].0 == x { 1.0 } else { 0.0 });
    let e = DMatrix::from_fn(k, k, |w, v| {
        let ((_, y), (_, y2)) = (support[w], support[v]);
        if y == y2 {
            path_measure[v] / pi[y]
        } else {
            0.0
        }
    });
    let q = DMatrix::from_fn(n, k, |x, w| if support[w].0 == x { p[(x, support[w].1)] } else { 0.0 });
    let (j, e, q) = (from_real(&j), from_real(&e), from_real(&q));
    let pc = from_real(p);
    let mut row_mass = vec![0.0; n];
    for (&(x, _), &w) in support.iter().zip(&path_measure) {
        row_mass[x] += w;
    }
    let residuals = DilationResiduals {
        qj: frobenius(&(&q * &j - identity(n))),
        qej: frobenius(&(&q * &e * &j - &pc * &pc)),
        idempotence: frobenius(&(&e * &e - &e)),
        constants: (0..k).map(|w| (e.row(w).iter().map(|z| z.re).sum::<f64>() - 1.0).abs()).fold(0.0, f64::max),
        min_entry: e.iter().map(|z| z.re).fold(f64::INFINITY, f64::min),
        isometry: row_mass.iter().zip(pi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max),
    };
    Ok(DilationTriple { j, e, q, base_measure: pi.to_vec(), path_measure, support, residuals })
}

/// Reversible chain from a random symmetric conductance matrix on `n` states;
/// off-diagonal conductances vanish with probability `sparsity`.
pub fn random_reversible_chain(rng: &mut impl Rng, n: usize, sparsity: f64) -> Result<(DMatrix<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(Error::validation("states", "must be >= 1"));
    }
    let mut c = DMatrix::<f64>::zeros(n, n);
    for x in 0..n {
        c[(x, x)] = rng.random::<f64>() + 0.05;
        for y in x + 1..n {
            let v = if rng.random::<f64>() < sparsity { 0.0 } else { rng.random::<f64>() };
            c[(x, y)] = v;
            c[(y, x)] = v;
        }
    }
    let row: Vec<f64> = (0..n).map(|x| c.row(x).sum()).collect();
    let total: f64 = row.iter().sum();
    let pi: Vec<f64> = row.iter().map(|r| r / total).collect();
    let p = DMatrix::from_fn(n, n, |x, y| c[(x, y)] / row[x]);
    Ok((p, pi))
}

/// `P(x, y) = eta({x - y})` with the uniform law, reversible for symmetric `eta`.
pub fn chain_of_measure(eta: &ProbabilityMeasure, g: &FiniteAbelianGroup) -> Result<(DMatrix<f64>, Vec<f64>)> {
    if !eta.is_symmetric() {
        return Err(Error::Precondition("the measure must be symmetric".into()));
    }
    if eta.measure().group() != Some(g) {
        return Err(Error::Structural(format!("measure is not carried by {g}")));
    }
    let w = eta.measure().dense_weights()?;
    let n = g.order();
    let p = DMatrix::from_fn(n, n, |x, y| w[g.difference_index(x, y)].re);
    Ok((p, vec![1.0 / n as f64; n]))
}
