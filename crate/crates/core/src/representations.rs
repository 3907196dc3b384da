//! Bounded representations of `Z_N` (and products) and of `Z` by invertible
//! matrices, average operators and transference.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::group::{FiniteAbelianGroup, GroupElement};
use crate::linalg::{identity, max_abs, power, try_inverse, unit_root};
use crate::measures::{Carrier, Measure, Point, ProbabilityMeasure};
use crate::norms::{compare, matrix_norm, CheckStatus, Certificate, Exponent, NormEstimate, NormOptions, NormTag};
use crate::operators::{convolution_operator, operator_norm, LinearOperator};
use crate::{Error, Result, C64, Mat};

/// Tolerance for `U^N = I` and commutation of generators.
pub const REP_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
enum Kind {
    /// One generator per cyclic factor; `pi(t) = prod_j U_j^{t_j}`.
    Finite { group: FiniteAbelianGroup, generators: Vec<Mat>, elements: Vec<Mat> },
    /// `U = V D V^{-1}` with `D` unimodular diagonal.
    Integers { generator: Mat, inverse: Mat, v: Mat, v_inv: Mat, d: Vec<C64> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Representation {
    kind: Kind,
    space: NormTag,
    norm_bound: NormEstimate,
}

impl Representation {
    /// Representation of `Z_n` generated by `u`.
    pub fn cyclic(n: usize, u: Mat, space: NormTag) -> Result<Self> {
        Self::finite(FiniteAbelianGroup::cyclic(n)?, vec![u], space)
    }

    /// Representation of `Z_{N1} x ... x Z_{Nd}` by commuting generators with `U_j^{N_j} = I`.
    pub fn finite(group: FiniteAbelianGroup, generators: Vec<Mat>, space: NormTag) -> Result<Self> {
        space.validate()?;
        if generators.len() != group.rank() {
            return Err(Error::Structural(format!("{} generators for a group of rank {}", generators.len(), group.rank())));
        }
        let dim = space.dim();
        for (u, &n) in generators.iter().zip(group.factors()) {
            if u.nrows() != dim || u.ncols() != dim {
                return Err(Error::Structural(format!("generator is {}x{} on a space of dimension {dim}", u.nrows(), u.ncols())));
            }
            let dev = max_abs(&(power(u, n) - identity(dim)));
            if dev > REP_TOL {
                return Err(Error::Precondition(format!("U^{n} differs from the identity by {dev:.3e}")));
            }
        }
        for i in 0..generators.len() {
            for j in i + 1..generators.len() {
                let dev = max_abs(&(&generators[i] * &generators[j] - &generators[j] * &generators[i]));
                if dev > REP_TOL {
                    return Err(Error::Precondition(format!("generators {i} and {j} do not commute (defect {dev:.3e})")));
                }
            }
        }
        let elements: Vec<Mat> = group
            .elements()
            .map(|t| {
                t.0.iter().zip(&generators).fold(identity(dim), |acc, (&k, u)| acc * power(u, k))
            })
            .collect();
        let opts = NormOptions::default();
        let mut bound = NormEstimate::exact(0.0);
        for m in &elements {
            let e = matrix_norm(m, &space, &opts)?;
            bound = NormEstimate { value: bound.value.max(e.value), certificate: bound.certificate.weakest(e.certificate) };
        }
        Ok(Representation { kind: Kind::Finite { group, generators, elements }, space, norm_bound: bound })
    }

    /// Representation of `Z` generated by `U = V diag(d) V^{-1}` with `|d_k| = 1`.
    /// The recorded bound is `||V|| ||V^{-1}||`.
    pub fn integers(v: Mat, d: Vec<C64>, space: NormTag) -> Result<Self> {
        space.validate()?;
        let dim = space.dim();
        if v.nrows() != dim || v.ncols() != dim || d.len() != dim {
            return Err(Error::Structural("diagonalization does not match the space dimension".into()));
        }
        if let Some(bad) = d.iter().find(|z| (z.norm() - 1.0).abs() > REP_TOL) {
            return Err(Error::Precondition(format!("diagonal entry {bad} is not unimodular")));
        }
        let v_inv = try_inverse(&v).ok_or_else(|| Error::Precondition("V is singular".into()))?;
        let dm = Mat::from_diagonal(&nalgebra::DVector::from_vec(d.clone()));
        let dinv = Mat::from_diagonal(&nalgebra::DVector::from_vec(d.iter().map(|z| z.inv()).collect()));
        let generator = &v * &dm * &v_inv;
        let inverse = &v * dinv * &v_inv;
        let opts = NormOptions::default();
        let a = matrix_norm(&v, &space, &opts)?;
        let b = matrix_norm(&v_inv, &space, &opts)?;
        // Upper bound on sup_k ||U^k||; exact as a bound only when both factors are exact norms.
        let certificate = if a.certificate.is_exact() && b.certificate.is_exact() { Certificate::ExactFinite } else { Certificate::MeshLowerBound };
        let norm_bound = NormEstimate { value: a.value * b.value, certificate };
        Ok(Representation { kind: Kind::Integers { generator, inverse, v, v_inv, d }, space, norm_bound })
    }

    pub fn space(&self) -> &NormTag {
        &self.space
    }

    /// `sup_t ||pi(t)||` (finite groups) or `||V|| ||V^{-1}||` (integers).
    pub fn norm_bound(&self) -> NormEstimate {
        self.norm_bound
    }

    pub fn group(&self) -> Option<&FiniteAbelianGroup> {
        match &self.kind {
            Kind::Finite { group, .. } => Some(group),
            Kind::Integers { .. } => None,
        }
    }

    pub fn carrier(&self) -> Carrier {
        match &self.kind {
            Kind::Finite { group, .. } => Carrier::Group(group.clone()),
            Kind::Integers { .. } => Carrier::Integers,
        }
    }

    pub fn generators(&self) -> Vec<Mat> {
        match &self.kind {
            Kind::Finite { generators, .. } => generators.clone(),
            Kind::Integers { generator, .. } => vec![generator.clone()],
        }
    }

    /// `pi(t)`.
    pub fn at(&self, t: &Point) -> Result<Mat> {
        match (&self.kind, t) {
            (Kind::Finite { group, elements, .. }, Point::Element(e)) => Ok(elements[group.index_of(e)?].clone()),
            (Kind::Integers { v, v_inv, d, .. }, Point::Integer(k)) => {
                let dk: Vec<C64> = d.iter().map(|z| z.powi(*k as i32)).collect();
                Ok(v * Mat::from_diagonal(&nalgebra::DVector::from_vec(dk)) * v_inv)
            }
            (Kind::Integers { generator, inverse, .. }, Point::Element(_)) => {
                let _ = (generator, inverse);
                Err(Error::Structural("group element given to a representation of the integers".into()))
            }
            (Kind::Finite { .. }, Point::Integer(_)) => {
                Err(Error::Structural("integer given to a representation of a finite group".into()))
            }
        }
    }

    pub fn at_element(&self, t: &GroupElement) -> Result<Mat> {
        self.at(&Point::Element(t.clone()))
    }
}

/// `S(pi, nu) = sum_t nu({t}) pi(t)` on the representation space.
pub fn average_operator(pi: &Representation, nu: &Measure) -> Result<LinearOperator> {
    if nu.carrier() != &pi.carrier() {
        return Err(Error::Structural(format!(
            "measure carrier {:?} does not match the representation carrier {:?}",
            nu.carrier(),
            pi.carrier()
        )));
    }
    let n = pi.space.dim();
    let mut s = Mat::zeros(n, n);
    for (t, w) in nu.atoms() {
        s += pi.at(t)? * *w;
    }
    LinearOperator::new(s, pi.space.clone())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferenceRecord {
    /// `||S(pi, nu)||` on the representation space.
    pub lhs: f64,
    /// `||pi||^2 ||C^X_{nu,p}||`.
    pub rhs: f64,
    pub conv_norm: f64,
    pub pi_norm: f64,
    pub holds: bool,
    pub status: CheckStatus,
    pub slack: f64,
    pub lhs_certificate: Certificate,
    pub rhs_certificate: Certificate,
}

/// `||S(pi, nu)|| <= ||pi||^2 ||C_{nu,p} (x) I_X||` for a finite-group
/// representation on `X` (the whole group is the Følner set, so the
/// transference constant is exactly `||pi||^2`).
pub fn transference_check(pi: &Representation, nu: &Measure, p: Exponent) -> Result<TransferenceRecord> {
    let group = pi
        .group()
        .ok_or_else(|| Error::Precondition("transference is checked for finite-group representations only".into()))?
        .clone();
    let s = average_operator(pi, nu)?;
    let lhs = operator_norm(&s)?;
    let x = pi.space();
    let tag = match x {
        NormTag::Lp { p: q, dim } => NormTag::Mixed { p, outer: group.order(), q: *q, inner: *dim },
        _ => return Err(Error::Precondition("the representation space must be a plain l^q space".into())),
    };
    let conv = operator_norm(&convolution_operator(nu, &group, &tag)?)?;
    let pn = pi.norm_bound();
    let rhs = NormEstimate {
        value: pn.value * pn.value * conv.value,
        // ||pi|| is attained by a group element, so a lower bound on it only makes rhs smaller.
        certificate: conv.certificate.weakest(pn.certificate),
    };
    let status = compare(lhs, rhs, 1e-9);
    Ok(TransferenceRecord {
        lhs: lhs.value,
        rhs: rhs.value,
        conv_norm: conv.value,
        pi_norm: pn.value,
        holds: lhs.value <= rhs.value + 1e-9,
        status,
        slack: rhs.value - lhs.value,
        lhs_certificate: lhs.certificate,
        rhs_certificate: rhs.certificate,
    })
}

/// One randomized transference trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub seed: u64,
    pub group: FiniteAbelianGroup,
    pub dim: usize,
    pub p: Exponent,
    pub lhs: f64,
    pub rhs: f64,
    pub pi_norm: f64,
    pub holds: bool,
    pub status: CheckStatus,
}

/// Per-trial seed derived from a master seed.
pub fn trial_seed(master: u64, index: usize) -> u64 {
    master ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Random representation `U = V D V^{-1}` of `Z_n` on `l^q_dim` with
/// `V = I + 0.5 G / sqrt(dim)` (Gaussian-free uniform entries) and `D` made of
/// `n`-th roots of unity, together with a random probability measure.
pub fn random_instance(rng: &mut impl Rng, n: usize, dim: usize, q: Exponent) -> Result<(Representation, ProbabilityMeasure)> {
    let g = FiniteAbelianGroup::cyclic(n)?;
    let scale = 0.5 / (dim as f64).sqrt();
    let v = Mat::from_fn(dim, dim, |i, j| {
        let e = C64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0) * scale;
        if i == j {
            e + 1.0
        } else {
            e
        }
    });
    let v_inv = try_inverse(&v).ok_or_else(|| Error::Numerical("random V was singular".into()))?;
    let d: Vec<C64> = (0..dim).map(|_| unit_root(rng.random_range(0..n as u64), n as u64)).collect();
    let u = &v * Mat::from_diagonal(&nalgebra::DVector::from_vec(d)) * v_inv;
    let space = NormTag::Lp { p: q, dim };
    let weights: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let nu = ProbabilityMeasure::from_group_weights(&g, &weights)?;
    Ok((Representation::cyclic(n, u, space)?, nu))
}

/// Randomized transference corpus on `Z_n`, dimensions `1..=max_dim`, run in parallel.
pub fn transference_trials(master_seed: u64, trials: usize, n: usize, max_dim: usize, p: Exponent) -> Result<Vec<TrialRecord>> {
    if max_dim == 0 {
        return Err(Error::validation("max_dim", "must be >= 1"));
    }
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let seed = trial_seed(master_seed, i);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let dim = rng.random_range(1..=max_dim);
            let (pi, nu) = random_instance(&mut rng, n, dim, p)?;
            let r = transference_check(&pi, nu.measure(), p)?;
            Ok(TrialRecord {
                seed,
                group: pi.group().cloned().expect("finite"),
                dim,
                p,
                lhs: r.lhs,
                rhs: r.rhs,
                pi_norm: r.pi_norm,
                holds: r.holds,
                status: r.status,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowersRow {
    pub n: usize,
    /// `n ||S^n - S^{n-1}||`.
    pub subordinated: f64,
    /// `||pi||^2 n ||C^n - C^{n-1}||` for the convolution extension.
    pub convolution_scaled: f64,
}

/// Ritt profile of `S(pi, nu)` next to the scaled profile of the convolution operator.
pub fn powers_profile(pi: &Representation, nu: &Measure, nmax: usize) -> Result<Vec<PowersRow>> {
    if nmax == 0 {
        return Err(Error::validation("nmax", "horizon must be >= 1"));
    }
    let s = average_operator(pi, nu)?;
    let conv = match (pi.group(), pi.space()) {
        (Some(g), NormTag::Lp { p, dim }) => Some(convolution_operator(nu, g, &NormTag::Mixed { p: *p, outer: g.order(), q: *p, inner: *dim })?),
        _ => None,
    };
    let pn = pi.norm_bound().value;
    let n = s.dim();
    let mut prev = identity(n);
    let opts = NormOptions::default();
    let mut rows = Vec::with_capacity(nmax);
    let mut cprev = conv.as_ref().map(|c| identity(c.dim()));
    for k in 1..=nmax {
        let cur = &prev * s.matrix();
        let d = matrix_norm(&(&cur - &prev), s.space(), &opts)?.value;
        let scaled = match (&conv, cprev.as_mut()) {
            (Some(c), Some(cp)) => match c.normal_spectrum() {
                Some(ev) => {
                    *cp = &*cp * c.matrix();
                    ev.iter().map(|z| (z.powu(k as u32) - z.powu(k as u32 - 1)).norm()).fold(0.0, f64::max)
                }
                None => {
                    let cn = &*cp * c.matrix();
                    let v = matrix_norm(&(&cn - &*cp), c.space(), &opts)?.value;
                    *cp = cn;
                    v
                }
            },
            _ => f64::NAN,
        };
        rows.push(PowersRow { n: k, subordinated: k as f64 * d, convolution_scaled: pn * pn * k as f64 * scaled });
        prev = cur;
    }
    Ok(rows)
}
