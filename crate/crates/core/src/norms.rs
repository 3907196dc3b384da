//! Normed spaces the operators act on and induced operator norms.
//!
//! Exact norms are available for `l^2` (largest singular value), `l^1`
//! (column sums) and `l^inf` (row sums). Every other mixed `l^p(l^q)` norm is
//! estimated from below by alternating maximization (the generalized power
//! method): `x -> A x -> norming functional -> A* -> norming vector`, which is
//! monotone in `||A x||` and restarted from random seeds.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::linalg::{max_column_sum, max_row_sum, spectral_norm};
use crate::{Error, Result, C64, Mat};

/// A Lebesgue exponent in `[1, inf]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Exponent(f64);

impl Exponent {
    pub const ONE: Exponent = Exponent(1.0);
    pub const TWO: Exponent = Exponent(2.0);
    pub const INFINITY: Exponent = Exponent(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::validation("p", format!("exponent {p} is outside [1, inf]")));
        }
        Ok(Exponent(p))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn conjugate(self) -> Exponent {
        if self.0 == 1.0 {
            Exponent::INFINITY
        } else if self.0.is_infinite() {
            Exponent::ONE
        } else {
            Exponent(self.0 / (self.0 - 1.0))
        }
    }

    pub fn is_two(self) -> bool {
        self.0 == 2.0
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        let p = match Raw::deserialize(d)? {
            Raw::Num(p) => p,
            Raw::Text(s) if matches!(s.as_str(), "inf" | "infinity" | "Inf") => f64::INFINITY,
            Raw::Text(s) => return Err(serde::de::Error::custom(format!("bad exponent `{s}`"))),
        };
        Exponent::new(p).map_err(serde::de::Error::custom)
    }
}

/// How much a reported number can be trusted.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Certificate {
    /// Exact up to floating-point rounding.
    ExactFinite,
    /// Computed on a grid; the true value is within `eps`.
    GridWithEps { eps: f64 },
    /// Attained by an explicit test vector or mesh point; the true value may be larger.
    MeshLowerBound,
}

impl Certificate {
    pub fn label(&self) -> &'static str {
        match self {
            Certificate::ExactFinite => "exact-finite",
            Certificate::GridWithEps { .. } => "grid-with-eps",
            Certificate::MeshLowerBound => "mesh-lower-bound",
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Certificate::ExactFinite)
    }

    /// Weakest of two certificates.
    pub fn weakest(self, other: Certificate) -> Certificate {
        use Certificate::*;
        match (self, other) {
            (MeshLowerBound, _) | (_, MeshLowerBound) => MeshLowerBound,
            (GridWithEps { eps: a }, GridWithEps { eps: b }) => GridWithEps { eps: a.max(b) },
            (g @ GridWithEps { .. }, ExactFinite) | (ExactFinite, g @ GridWithEps { .. }) => g,
            (ExactFinite, ExactFinite) => ExactFinite,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    pub certificate: Certificate,
}

/// Outcome of comparing two estimated norms `lhs <= rhs`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    /// Both sides certified and the inequality holds.
    Holds,
    /// A certified violation: `lhs` is attained and exceeds a certified `rhs`.
    Fails,
    /// Inconclusive because at least one side is only a lower bound.
    Review,
}

impl CheckStatus {
    pub fn label(self) -> &'static str {
        match self {
            CheckStatus::Holds => "holds",
            CheckStatus::Fails => "fails",
            CheckStatus::Review => "review",
        }
    }
}

/// Compares `lhs <= rhs + tol`, widening `tol` by grid radii.
///
/// A violation is reported as `Fails` only when `rhs` is certified; any
/// comparison involving a lower bound on the right is left for review.
pub fn compare(lhs: NormEstimate, rhs: NormEstimate, tol: f64) -> CheckStatus {
    let eps = |c: Certificate| match c {
        Certificate::GridWithEps { eps } => eps,
        _ => 0.0,
    };
    let slack = tol + eps(lhs.certificate) + eps(rhs.certificate);
    let ok = lhs.value <= rhs.value + slack;
    let rhs_certified = !matches!(rhs.certificate, Certificate::MeshLowerBound);
    let lhs_certified = !matches!(lhs.certificate, Certificate::MeshLowerBound);
    match (ok, lhs_certified && rhs_certified, rhs_certified) {
        (true, true, _) => CheckStatus::Holds,
        (false, _, true) => CheckStatus::Fails,
        _ => CheckStatus::Review,
    }
}

impl NormEstimate {
    pub fn exact(value: f64) -> Self {
        NormEstimate { value, certificate: Certificate::ExactFinite }
    }

    pub fn lower(value: f64) -> Self {
        NormEstimate { value, certificate: Certificate::MeshLowerBound }
    }
}

/// The finite-dimensional normed space an operator acts on.
///
/// Vectors of a mixed space are laid out block-wise: coordinate
/// `outer_index * inner + inner_index`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NormTag {
    Lp { p: Exponent, dim: usize },
    Mixed { p: Exponent, outer: usize, q: Exponent, inner: usize },
    /// `L^p(w; l^q_inner)` over a finite measure space with positive weights `w`.
    Weighted { p: Exponent, weights: Vec<f64>, q: Exponent, inner: usize },
}

impl NormTag {
    pub fn lp(p: f64, dim: usize) -> Result<Self> {
        let tag = NormTag::Lp { p: Exponent::new(p)?, dim };
        tag.validate()?;
        Ok(tag)
    }

    pub fn l2(dim: usize) -> Self {
        NormTag::Lp { p: Exponent::TWO, dim }
    }

    pub fn mixed(p: f64, outer: usize, q: f64, inner: usize) -> Result<Self> {
        let tag = NormTag::Mixed { p: Exponent::new(p)?, outer, q: Exponent::new(q)?, inner };
        tag.validate()?;
        Ok(tag)
    }

    pub fn weighted(p: f64, weights: Vec<f64>, q: f64, inner: usize) -> Result<Self> {
        let tag = NormTag::Weighted { p: Exponent::new(p)?, weights, q: Exponent::new(q)?, inner };
        tag.validate()?;
        Ok(tag)
    }

    pub fn validate(&self) -> Result<()> {
        let (outer, inner) = (self.outer(), self.inner());
        if outer == 0 || inner == 0 {
            return Err(Error::validation("space", "dimensions must be >= 1"));
        }
        if let NormTag::Weighted { weights, .. } = self {
            if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
                return Err(Error::validation("space.weights", format!("weight {w} is not positive")));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.outer() * self.inner()
    }

    pub fn outer(&self) -> usize {
        match self {
            NormTag::Lp { dim, .. } => *dim,
            NormTag::Mixed { outer, .. } => *outer,
            NormTag::Weighted { weights, .. } => weights.len(),
        }
    }

    pub fn inner(&self) -> usize {
        match self {
            NormTag::Lp { .. } => 1,
            NormTag::Mixed { inner, .. } | NormTag::Weighted { inner, .. } => *inner,
        }
    }

    pub fn p(&self) -> Exponent {
        match self {
            NormTag::Lp { p, .. } | NormTag::Mixed { p, .. } | NormTag::Weighted { p, .. } => *p,
        }
    }

    pub fn q(&self) -> Exponent {
        match self {
            NormTag::Lp { p, .. } => *p,
            NormTag::Mixed { q, .. } | NormTag::Weighted { q, .. } => *q,
        }
    }

    pub fn weights(&self) -> Option<&[f64]> {
        match self {
            NormTag::Weighted { weights, .. } => Some(weights),
            _ => None,
        }
    }

    /// Same space with an extra `l^q_m` factor on the inside.
    pub fn with_inner(&self, q: Exponent, m: usize) -> Result<NormTag> {
        if self.inner() != 1 {
            return Err(Error::Structural("space already carries an inner factor".into()));
        }
        Ok(match self {
            NormTag::Lp { p, dim } => NormTag::Mixed { p: *p, outer: *dim, q, inner: m },
            NormTag::Weighted { p, weights, .. } => NormTag::Weighted { p: *p, weights: weights.clone(), q, inner: m },
            NormTag::Mixed { p, outer, .. } => NormTag::Mixed { p: *p, outer: *outer, q, inner: m },
        })
    }

    /// True when the norm is the plain Euclidean norm on `C^dim`.
    pub fn is_euclidean(&self) -> bool {
        let shape = self.shape();
        shape.p.is_two() && shape.q.is_two() && self.weights().is_none()
    }

    fn shape(&self) -> MixedShape {
        MixedShape::new(self.p(), self.q(), self.outer(), self.inner())
    }

    /// Norm of a vector in this space.
    pub fn norm(&self, x: &[C64]) -> f64 {
        match self.weights() {
            None => self.shape().norm(x),
            Some(w) => {
                let scaled = scale_blocks(x, w, self.p(), self.inner(), false);
                self.shape().norm(&scaled)
            }
        }
    }
}

/// Unweighted `l^p_outer(l^q_inner)` with degenerate factors folded away.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MixedShape {
    pub p: Exponent,
    pub q: Exponent,
    pub outer: usize,
    pub inner: usize,
}

impl MixedShape {
    pub fn new(p: Exponent, q: Exponent, outer: usize, inner: usize) -> Self {
        // A single inner coordinate makes q irrelevant, a single block makes p irrelevant.
        let (p, q) = if inner == 1 {
            (p, p)
        } else if outer == 1 {
            (q, q)
        } else {
            (p, q)
        };
        MixedShape { p, q, outer, inner }
    }

    pub fn dim(&self) -> usize {
        self.outer * self.inner
    }

    pub fn dual(&self) -> MixedShape {
        MixedShape { p: self.p.conjugate(), q: self.q.conjugate(), outer: self.outer, inner: self.inner }
    }

    pub fn norm(&self, x: &[C64]) -> f64 {
        let blocks: Vec<f64> = x.chunks(self.inner).map(|b| lp_norm(b.iter().map(|z| z.norm()), self.q)).collect();
        lp_norm(blocks.into_iter(), self.p)
    }

    /// Unit vector `z` of the dual space with `<y, z> = ||y||`.
    pub fn norming(&self, y: &[C64]) -> Vec<C64> {
        let blocks: Vec<f64> = y.chunks(self.inner).map(|b| lp_norm(b.iter().map(|z| z.norm()), self.q)).collect();
        let total = lp_norm(blocks.iter().copied(), self.p);
        let mut out = vec![C64::new(0.0, 0.0); y.len()];
        if total == 0.0 {
            return out;
        }
        let weights = dual_weights(&blocks, total, self.p);
        for ((chunk, dst), c) in y.chunks(self.inner).zip(out.chunks_mut(self.inner)).zip(weights) {
            if c == 0.0 {
                continue;
            }
            let local = dual_weights_complex(chunk, self.q);
            for (d, v) in dst.iter_mut().zip(local) {
                *d = v * c;
            }
        }
        out
    }
}

fn lp_norm(values: impl Iterator<Item = f64>, p: Exponent) -> f64 {
    let p = p.value();
    if p.is_infinite() {
        values.fold(0.0, f64::max)
    } else if p == 1.0 {
        values.sum()
    } else if p == 2.0 {
        values.map(|v| v * v).sum::<f64>().sqrt()
    } else {
        let v: Vec<f64> = values.collect();
        let m = v.iter().copied().fold(0.0, f64::max);
        if m == 0.0 {
            return 0.0;
        }
        m * v.iter().map(|x| (x / m).powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// Nonnegative `c` with `||c||_{p'} = 1` and `sum a_s c_s = ||a||_p`.
fn dual_weights(a: &[f64], total: f64, p: Exponent) -> Vec<f64> {
    let p = p.value();
    if p.is_infinite() {
        let (best, _) = a.iter().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        let mut c = vec![0.0; a.len()];
        c[best] = 1.0;
        c
    } else if p == 1.0 {
        a.iter().map(|&v| if v > 0.0 { 1.0 } else { 0.0 }).collect()
    } else {
        a.iter().map(|&v| (v / total).powf(p - 1.0)).collect()
    }
}

fn dual_weights_complex(v: &[C64], q: Exponent) -> Vec<C64> {
    let mods: Vec<f64> = v.iter().map(|z| z.norm()).collect();
    let total = lp_norm(mods.iter().copied(), q);
    if total == 0.0 {
        return vec![C64::new(0.0, 0.0); v.len()];
    }
    let c = dual_weights(&mods, total, q);
    v.iter()
        .zip(c)
        .zip(&mods)
        .map(|((z, c), &m)| if m > 0.0 && c > 0.0 { z / m * c } else { C64::new(0.0, 0.0) })
        .collect()
}

/// Multiplies block `s` by `w_s^{1/p}` (or divides when `inverse`).
fn scale_blocks(x: &[C64], w: &[f64], p: Exponent, inner: usize, inverse: bool) -> Vec<C64> {
    if p.value().is_infinite() {
        return x.to_vec();
    }
    let mut out = x.to_vec();
    for (block, &ws) in out.chunks_mut(inner).zip(w) {
        let mut f = ws.powf(1.0 / p.value());
        if inverse {
            f = 1.0 / f;
        }
        for z in block {
            *z *= f;
        }
    }
    out
}

/// Conjugates `m` by the isometry `L^p(w; X) -> l^p(X)`.
pub(crate) fn unweighted_matrix(m: &Mat, tag: &NormTag) -> Mat {
    match tag.weights() {
        None => m.clone(),
        Some(w) => {
            let p = tag.p().value();
            if p.is_infinite() {
                return m.clone();
            }
            let inner = tag.inner();
            let f = |i: usize| w[i / inner].powf(1.0 / p);
            Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * (f(i) / f(j)))
        }
    }
}

/// A linear map that can be applied together with its adjoint.
pub trait LinearMap: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[C64]) -> Vec<C64>;
    fn apply_adjoint(&self, y: &[C64]) -> Vec<C64>;
}

impl LinearMap for Mat {
    fn dim(&self) -> usize {
        self.ncols()
    }

    fn apply(&self, x: &[C64]) -> Vec<C64> {
        let n = self.nrows();
        let mut out = vec![C64::new(0.0, 0.0); n];
        for (j, &xj) in x.iter().enumerate() {
            if xj == C64::new(0.0, 0.0) {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.column(j).iter()) {
                *o += a * xj;
            }
        }
        out
    }

    fn apply_adjoint(&self, y: &[C64]) -> Vec<C64> {
        (0..self.ncols()).map(|j| self.column(j).iter().zip(y).map(|(a, b)| a.conj() * b).sum()).collect()
    }
}

/// Parameters of the randomized lower-bound search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormOptions {
    pub restarts: usize,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for NormOptions {
    fn default() -> Self {
        NormOptions { restarts: 32, max_iter: 200, seed: 0x5eed_0001 }
    }
}

#[derive(Clone, Debug)]
pub struct AltMaxResult {
    pub value: f64,
    pub argmax: Vec<C64>,
}

fn one_run(map: &dyn LinearMap, shape: MixedShape, start: Vec<C64>, max_iter: usize) -> AltMaxResult {
    let dual = shape.dual();
    let n0 = shape.norm(&start);
    if n0 == 0.0 {
        return AltMaxResult { value: 0.0, argmax: start };
    }
    let mut x: Vec<C64> = start.iter().map(|z| z / n0).collect();
    let mut best = AltMaxResult { value: 0.0, argmax: x.clone() };
    for _ in 0..max_iter {
        let y = map.apply(&x);
        let ny = shape.norm(&y);
        if ny > best.value {
            best = AltMaxResult { value: ny, argmax: x.clone() };
        }
        if ny == 0.0 {
            break;
        }
        let z = shape.norming(&y);
        let w = map.apply_adjoint(&z);
        let nw = dual.norm(&w);
        if nw <= ny * (1.0 + 1e-13) {
            break;
        }
        let next = dual.norming(&w);
        let nn = shape.norm(&next);
        if nn == 0.0 {
            break;
        }
        x = next.iter().map(|z| z / nn).collect();
    }
    best
}

/// Lower bound on `||map||` over `shape` by alternating maximization.
///
/// Runs every warm start plus `opts.restarts` random starts (per-restart seeds
/// derived from `opts.seed`) and returns the best value with its maximizer.
pub fn alternating_max(map: &dyn LinearMap, shape: MixedShape, opts: &NormOptions, warm: &[Vec<C64>]) -> AltMaxResult {
    let n = shape.dim();
    let mut starts: Vec<Vec<C64>> = warm.iter().filter(|w| w.len() == n).cloned().collect();
    starts.push(vec![C64::new(1.0, 0.0); n]);
    for r in 0..opts.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(r as u64 + 1)));
        let mut v: Vec<C64> = (0..n).map(|_| C64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0)).collect();
        // Sparse starts reach the vertices that l^1-type norms favour.
        if r % 4 == 3 {
            let keep = rng.random_range(0..n);
            for (i, z) in v.iter_mut().enumerate() {
                if i != keep && rng.random::<f64>() < 0.8 {
                    *z = C64::new(0.0, 0.0);
                }
            }
        }
        starts.push(v);
    }
    let results: Vec<AltMaxResult> = starts.into_par_iter().map(|s| one_run(map, shape, s, opts.max_iter)).collect();
    results
        .into_iter()
        .reduce(|a, b| if b.value > a.value { b } else { a })
        .unwrap_or(AltMaxResult { value: 0.0, argmax: vec![C64::new(0.0, 0.0); n] })
}

/// Induced norm of a square matrix on the space `tag`.
pub fn matrix_norm(m: &Mat, tag: &NormTag, opts: &NormOptions) -> Result<NormEstimate> {
    if m.nrows() != tag.dim() || m.ncols() != tag.dim() {
        return Err(Error::Structural(format!(
            "matrix is {}x{} but the space has dimension {}",
            m.nrows(),
            m.ncols(),
            tag.dim()
        )));
    }
    let a = unweighted_matrix(m, tag);
    let shape = tag.shape();
    let exact = |value| Ok(NormEstimate { value, certificate: Certificate::ExactFinite });
    if shape.p == shape.q {
        let p = shape.p.value();
        if p == 2.0 {
            return exact(spectral_norm(&a));
        }
        if p == 1.0 {
            return exact(max_column_sum(&a));
        }
        if p.is_infinite() {
            return exact(max_row_sum(&a));
        }
    }
    let r = alternating_max(&a, shape, opts, &[]);
    Ok(NormEstimate { value: r.value, certificate: Certificate::MeshLowerBound })
}
