use serde::{Deserialize, Serialize};

use crate::linalg::{identity, kron, MAX_DENSE_ENTRIES};
use crate::norms::{alternating_max, matrix_norm, Certificate, Exponent, LinearMap, MixedShape, NormOptions, NormTag};
use crate::operators::LinearOperator;
use crate::{Error, Result, C64, Mat};

/// One row of a sweep: `index` is `n` (regular norm) or `m` (K-convexity).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub index: usize,
    pub value: f64,
    pub certificate: Certificate,
    pub seed: u64,
}

impl ProbeRow {
    pub const CSV_HEADER: &'static str = "index,value,certificate,seed";

    pub fn csv_row(&self) -> String {
        format!("{},{},{},{}", self.index, crate::operators::fmt_f64(self.value), self.certificate.label(), self.seed)
    }
}

/// `A (x) I_n` applied without forming the Kronecker product.
struct KronIdentity<'a> {
    a: &'a Mat,
    n: usize,
}

impl LinearMap for KronIdentity<'_> {
    fn dim(&self) -> usize {
        self.a.ncols() * self.n
    }

    fn apply(&self, x: &[C64]) -> Vec<C64> {
        let (rows, n) = (self.a.nrows(), self.n);
        let mut out = vec![C64::new(0.0, 0.0); rows * n];
        for j in 0..self.a.ncols() {
            for i in 0..rows {
                let a = self.a[(i, j)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..n {
                    out[i * n + k] += a * x[j * n + k];
                }
            }
        }
        out
    }

    fn apply_adjoint(&self, y: &[C64]) -> Vec<C64> {
        let (cols, n) = (self.a.ncols(), self.n);
        let mut out = vec![C64::new(0.0, 0.0); cols * n];
        for j in 0..cols {
            for i in 0..self.a.nrows() {
                let a = self.a[(i, j)].conj();
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..n {
                    out[j * n + k] += a * y[i * n + k];
                }
            }
        }
        out
    }
}

fn vector_guard(what: &str, required: u128) -> Result<()> {
    if required > MAX_DENSE_ENTRIES {
        return Err(Error::Guard { what: what.into(), required, limit: MAX_DENSE_ENTRIES });
    }
    Ok(())
}

/// Nondecreasing lower bounds on `||T (x) I_{l^inf_n}||` on `l^p(l^inf_n)`, `n = 1..=nmax`.
pub fn regular_norm_lower(t: &LinearOperator, nmax: usize, opts: &NormOptions) -> Result<Vec<ProbeRow>> {
    let (p, d) = match t.space() {
        NormTag::Lp { p, dim } => (*p, *dim),
        _ => return Err(Error::Precondition("regular norm probes act on plain l^p spaces".into())),
    };
    if nmax == 0 {
        return Err(Error::validation("nmax", "horizon must be >= 1"));
    }
    vector_guard("regular norm vector", (d as u128).saturating_mul(nmax as u128))?;
    let mut rows = Vec::with_capacity(nmax);
    let mut best = 0.0f64;
    let mut certificate = Certificate::ExactFinite;
    let mut prev: Vec<C64> = Vec::new();
    for n in 1..=nmax {
        let shape = MixedShape::new(p, Exponent::INFINITY, d, n);
        let (value, argmax, cert) = if shape.p == shape.q {
            let tag = NormTag::Mixed { p, outer: d, q: Exponent::INFINITY, inner: n };
            crate::linalg::guard_dense("regular norm operator", (d * n) as u128)?;
            let mat = if n == 1 { t.matrix().clone() } else { kron(t.matrix(), &identity(n)) };
            let est = matrix_norm(&mat, &tag, opts)?;
            let witness = alternating_max(&mat, shape, &NormOptions { restarts: 0, ..*opts }, &[]).argmax;
            (est.value, witness, est.certificate)
        } else {
            let warm: Vec<C64> = if prev.is_empty() {
                Vec::new()
            } else {
                // Previous maximizer in the first n - 1 slots of every block.
                (0..d * n).map(|k| if k % n < n - 1 { prev[(k / n) * (n - 1) + k % n] } else { C64::new(0.0, 0.0) }).collect()
            };
            let map = KronIdentity { a: t.matrix(), n };
            let r = alternating_max(&map, shape, opts, &[warm]);
            (r.value, r.argmax, Certificate::MeshLowerBound)
        };
        if value >= best {
            best = value;
            prev = argmax;
        } else {
            // Keep the running maximizer, padded to the new width.
            prev = (0..d * n).map(|k| if k % n < n - 1 { prev[(k / n) * (n - 1) + k % n] } else { C64::new(0.0, 0.0) }).collect();
        }
        certificate = certificate.weakest(cert);
        rows.push(ProbeRow { index: n, value: best, certificate, seed: opts.seed });
    }
    Ok(rows)
}

/// Rademacher projection `f -> sum_i eps_i <f, eps_i>` on `L^2({-1,1}^N; l^q_m)`.
struct Rademacher {
    vars: usize,
    m: usize,
}

impl Rademacher {
    fn sign(omega: usize, i: usize) -> f64 {
        if (omega >> i) & 1 == 1 {
            -1.0
        } else {
            1.0
        }
    }
}

impl LinearMap for Rademacher {
    fn dim(&self) -> usize {
        (1 << self.vars) * self.m
    }

    fn apply(&self, x: &[C64]) -> Vec<C64> {
        let points = 1usize << self.vars;
        let m = self.m;
        let scale = 1.0 / points as f64;
        let mut coeff = vec![C64::new(0.0, 0.0); self.vars * m];
        for omega in 0..points {
            for i in 0..self.vars {
                let s = Self::sign(omega, i) * scale;
                for k in 0..m {
                    coeff[i * m + k] += x[omega * m + k] * s;
                }
            }
        }
        let mut out = vec![C64::new(0.0, 0.0); points * m];
        for omega in 0..points {
            for i in 0..self.vars {
                let s = Self::sign(omega, i);
                for k in 0..m {
                    out[omega * m + k] += coeff[i * m + k] * s;
                }
            }
        }
        out
    }

    fn apply_adjoint(&self, y: &[C64]) -> Vec<C64> {
        self.apply(y)
    }
}

pub const MAX_RADEMACHER_VARS: usize = 12;

/// Lower bound on the K-convexity constant of `l^q_m` from `N` Rademacher variables.
pub fn kconvexity_lower(q: Exponent, m: usize, vars: usize, opts: &NormOptions) -> Result<ProbeRow> {
    kconvexity_with_warm(q, m, vars, opts, &[]).map(|(row, _)| row)
}

fn kconvexity_with_warm(q: Exponent, m: usize, vars: usize, opts: &NormOptions, warm: &[Vec<C64>]) -> Result<(ProbeRow, Vec<C64>)> {
    if vars == 0 || m == 0 {
        return Err(Error::validation("kconvexity", "N and m must be >= 1"));
    }
    if vars > MAX_RADEMACHER_VARS {
        return Err(Error::Guard { what: "Rademacher variables".into(), required: vars as u128, limit: MAX_RADEMACHER_VARS as u128 });
    }
    let len = (1usize << vars) * m;
    vector_guard("Rademacher vector", len as u128)?;
    if q.is_two() || m == 1 {
        return Ok((ProbeRow { index: m, value: 1.0, certificate: Certificate::ExactFinite, seed: opts.seed }, Vec::new()));
    }
    // f(omega) = e_{omega mod m}: the classical l^1 witness.
    let spread: Vec<C64> = (0..len).map(|k| if (k / m) % m == k % m { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }).collect();
    let mut starts = warm.to_vec();
    starts.push(spread);
    let shape = MixedShape::new(Exponent::TWO, q, 1 << vars, m);
    let r = alternating_max(&Rademacher { vars, m }, shape, opts, &starts);
    Ok((ProbeRow { index: m, value: r.value, certificate: Certificate::MeshLowerBound, seed: opts.seed }, r.argmax))
}

/// K-convexity lower bounds for `m` in `ms` (increasing), nondecreasing by
/// warm-starting from the previous maximizer padded with a zero coordinate.
pub fn kconvexity_sweep(q: Exponent, ms: &[usize], vars: usize, opts: &NormOptions) -> Result<Vec<ProbeRow>> {
    if ms.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::validation("ms", "must be strictly increasing"));
    }
    let mut rows: Vec<ProbeRow> = Vec::with_capacity(ms.len());
    let mut prev: Option<(usize, Vec<C64>)> = None;
    let mut best = 0.0f64;
    for &m in ms {
        let warm: Vec<Vec<C64>> = match &prev {
            Some((pm, x)) if !x.is_empty() => {
                vec![(0..(1usize << vars) * m).map(|k| if k % m < *pm { x[(k / m) * pm + k % m] } else { C64::new(0.0, 0.0) }).collect()]
            }
            _ => Vec::new(),
        };
        let (mut row, x) = kconvexity_with_warm(q, m, vars, opts, &warm)?;
        if row.value >= best {
            best = row.value;
            prev = Some((m, x));
        } else {
            row.value = best;
            if let Some((pm, px)) = prev.take() {
                let padded = if px.is_empty() { px } else { (0..(1usize << vars) * m).map(|k| if k % m < pm { px[(k / m) * pm + k % m] } else { C64::new(0.0, 0.0) }).collect() };
                prev = Some((m, padded));
            }
        }
        rows.push(row);
    }
    Ok(rows)
}
