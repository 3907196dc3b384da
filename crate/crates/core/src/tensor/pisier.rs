use serde::{Deserialize, Serialize};

use super::rota::{chain_of_measure, rota_dilation};
use crate::group::FiniteAbelianGroup;
use crate::linalg::{frobenius, guard_dense, identity, kron, kron_all, max_abs, MAX_DENSE_ENTRIES};
use crate::measures::ProbabilityMeasure;
use crate::norms::{compare, matrix_norm, CheckStatus, Certificate, Exponent, NormEstimate, NormOptions, NormTag};
use crate::operators::convolution_operator;
use crate::{Error, Result, Mat};

const IDEMPOTENCE_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PisierReport {
    pub legs: usize,
    pub value: f64,
    pub certificate: Certificate,
    pub dim: usize,
}

impl PisierReport {
    pub fn estimate(&self) -> NormEstimate {
        NormEstimate { value: self.value, certificate: self.certificate }
    }
}

fn leg_guard(base: usize, legs: usize, m: usize) -> Result<usize> {
    let required = (base as u128).saturating_pow(legs as u32).saturating_mul(m as u128);
    if required > MAX_DENSE_ENTRIES {
        return Err(Error::Guard { what: "tensor leg vector".into(), required, limit: MAX_DENSE_ENTRIES });
    }
    guard_dense("tensor leg operator", required)?;
    Ok(required as usize)
}

/// `sum_k kron(B_1, ..., B_n)` with `B_k = diff` and `B_j = same` for `j != k`.
fn one_off_sum(same: &Mat, diff: &Mat, legs: usize) -> Mat {
    let d = same.nrows().pow(legs as u32);
    let mut out = Mat::zeros(d, d);
    for k in 0..legs {
        let factors: Vec<&Mat> = (0..legs).map(|j| if j == k { diff } else { same }).collect();
        out += kron_all(&factors);
    }
    out
}

fn product_weights(w: &[f64], legs: usize) -> Vec<f64> {
    (0..legs).fold(vec![1.0], |acc, _| acc.iter().flat_map(|a| w.iter().map(move |b| a * b)).collect())
}

/// `||sum_k (I - P_k) prod_{j != k} P_j||` on `L^p(Omega^n, w^n; l^q_m)` with
/// `P_j` equal to `E` in leg `j` and the identity elsewhere.
pub fn pisier_expression_norm(e: &Mat, weights: &[f64], legs: usize, p: Exponent, q: Exponent, m: usize) -> Result<PisierReport> {
    if legs == 0 || m == 0 {
        return Err(Error::validation("legs", "leg count and m must be >= 1"));
    }
    let k = e.nrows();
    if e.ncols() != k || weights.len() != k {
        return Err(Error::Structural(format!("E is {}x{} with {} weights", e.nrows(), e.ncols(), weights.len())));
    }
    let defect = max_abs(&(e * e - e));
    if defect > IDEMPOTENCE_TOL {
        return Err(Error::Precondition(format!("E is not idempotent (defect {defect:.3e})")));
    }
    let dim = leg_guard(k, legs, m)?;
    let scalar = one_off_sum(e, &(identity(k) - e), legs);
    let tag = NormTag::Weighted { p, weights: product_weights(weights, legs), q, inner: m };
    tag.validate()?;
    let est = matrix_norm(&kron(&scalar, &identity(m)), &tag, &NormOptions::default())?;
    Ok(PisierReport { legs, value: est.value, certificate: est.certificate, dim })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainRow {
    pub n: usize,
    /// `n ||(T^n - T^{n-1}) (x) I_X||` on `L^p(G; X)`, `T = C_{eta * eta}`.
    pub lhs: f64,
    /// `||sum_j T^{(x)(n-j)} (x) (I - T) (x) T^{(x)(j-1)} (x) I_X||` on `L^p(G^n; X)`.
    pub mid: f64,
    /// Commuting-projection expression on `L^p(Omega^n, m^n; X)`.
    pub rhs: f64,
    pub lhs_certificate: Certificate,
    pub mid_certificate: Certificate,
    pub rhs_certificate: Certificate,
    pub status: CheckStatus,
    pub slack: f64,
    /// `||mid - Q^n (expression) J^n||_F` on the scalar legs.
    pub factorization_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubordinationTable {
    pub group: FiniteAbelianGroup,
    pub p: Exponent,
    pub q: Exponent,
    pub m: usize,
    pub path_space_size: usize,
    pub rows: Vec<ChainRow>,
}

fn combine(a: CheckStatus, b: CheckStatus) -> CheckStatus {
    use CheckStatus::*;
    match (a, b) {
        (Fails, _) | (_, Fails) => Fails,
        (Holds, Holds) => Holds,
        _ => Review,
    }
}

/// For `nu = eta * eta` with symmetric `eta`, tabulates
/// `lhs <= mid <= rhs` for `n = 1..=nmax` on `X = l^q_m`.
pub fn subordination_chain_check(eta: &ProbabilityMeasure, g: &FiniteAbelianGroup, p: Exponent, q: Exponent, m: usize, nmax: usize) -> Result<SubordinationTable> {
    if nmax == 0 {
        return Err(Error::validation("nmax", "horizon must be >= 1"));
    }
    let (chain, pi) = chain_of_measure(eta, g)?;
    let order = g.order();
    let omega = chain.iter().filter(|&&x| x > 0.0).count();
    // Fail fast on the largest leg count before any work.
    leg_guard(omega.max(order), nmax, m)?;
    let triple = rota_dilation(&chain, &pi)?;
    let nu = eta.square()?;
    let t = convolution_operator(nu.measure(), g, &NormTag::l2(order))?.matrix().clone();
    let im = identity(m);
    let base_tag = NormTag::Mixed { p, outer: order, q, inner: m };
    let opts = NormOptions::default();
    let complement = identity(order) - &t;
    let e_complement = identity(omega) - &triple.e;
    let mut prev = identity(order);
    let mut rows = Vec::with_capacity(nmax);
    for n in 1..=nmax {
        let cur = &prev * &t;
        let diff = matrix_norm(&kron(&(&cur - &prev), &im), &base_tag, &opts)?;
        let lhs = NormEstimate { value: n as f64 * diff.value, certificate: diff.certificate };
        prev = cur;

        let mid_scalar = one_off_sum(&t, &complement, n);
        let mid_tag = NormTag::Mixed { p, outer: order.pow(n as u32), q, inner: m };
        let mid = matrix_norm(&kron(&mid_scalar, &im), &mid_tag, &opts)?;

        let expr = one_off_sum(&triple.e, &e_complement, n);
        let rhs = pisier_expression_norm(&triple.e, &triple.path_measure, n, p, q, m)?.estimate();

        let qn = kron_all(&vec![&triple.q; n]);
        let jn = kron_all(&vec![&triple.j; n]);
        let factorization_residual = frobenius(&(&mid_scalar - qn * expr * jn));

        let status = combine(combine(compare(lhs, mid, 1e-9), compare(mid, rhs, 1e-9)), compare(lhs, rhs, 1e-9));
        rows.push(ChainRow {
            n,
            lhs: lhs.value,
            mid: mid.value,
            rhs: rhs.value,
            lhs_certificate: lhs.certificate,
            mid_certificate: mid.certificate,
            rhs_certificate: rhs.certificate,
            status,
            slack: rhs.value - lhs.value,
            factorization_residual,
        });
    }
    Ok(SubordinationTable { group: g.clone(), p, q, m, path_space_size: omega, rows })
}
