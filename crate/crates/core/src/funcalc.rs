//! Polynomial functional calculus and `H^infinity(B_gamma)` ratio estimates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::identity;
use crate::norms::{Certificate, NormEstimate, NormOptions};
use crate::operators::{operator_norm_with, spectrum, LinearOperator};
use crate::stolz::{classify, point_angle, PointClass, StolzDomain};
use crate::{Error, Result, C64};

/// Complex polynomial `a_0 + a_1 z + ... + a_d z^d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<C64>", into = "Vec<C64>")]
pub struct Polynomial {
    coefficients: Vec<C64>,
}

impl From<Vec<C64>> for Polynomial {
    fn from(c: Vec<C64>) -> Self {
        Polynomial::new(c)
    }
}

impl From<Polynomial> for Vec<C64> {
    fn from(p: Polynomial) -> Self {
        p.coefficients
    }
}

impl Polynomial {
    /// Trailing zero coefficients are dropped.
    pub fn new(mut coefficients: Vec<C64>) -> Self {
        while coefficients.last().is_some_and(|c| *c == C64::new(0.0, 0.0)) {
            coefficients.pop();
        }
        Polynomial { coefficients }
    }

    pub fn from_real(coefficients: &[f64]) -> Self {
        Self::new(coefficients.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn constant(c: C64) -> Self {
        Self::new(vec![c])
    }

    /// `z^n`.
    pub fn monomial(n: usize) -> Self {
        let mut c = vec![C64::new(0.0, 0.0); n + 1];
        c[n] = C64::new(1.0, 0.0);
        Self::new(c)
    }

    /// `phi_n(z) = n (z^n - z^{n-1})`, `n >= 1`.
    pub fn phi(n: usize) -> Self {
        assert!(n >= 1, "phi_n needs n >= 1");
        let mut c = vec![C64::new(0.0, 0.0); n + 1];
        c[n] = C64::new(n as f64, 0.0);
        c[n - 1] = C64::new(-(n as f64), 0.0);
        Self::new(c)
    }

    /// Cesaro mean `(1 + z + ... + z^{n-1}) / n`, `n >= 1`.
    pub fn cesaro(n: usize) -> Self {
        assert!(n >= 1, "Cesaro means need n >= 1");
        Self::new(vec![C64::new(1.0 / n as f64, 0.0); n])
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.coefficients
    }

    /// Degree, with `0` for constants and the zero polynomial.
    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coefficients.iter().rev().fold(C64::new(0.0, 0.0), |acc, &a| acc * z + a)
    }

    /// `sum_k k |a_k|`, a Lipschitz constant of the polynomial on the closed unit disc.
    pub fn disc_lipschitz(&self) -> f64 {
        self.coefficients.iter().enumerate().map(|(k, a)| k as f64 * a.norm()).sum()
    }
}

/// `phi(T)` by Horner's rule.
pub fn eval_poly_operator(phi: &Polynomial, t: &LinearOperator) -> LinearOperator {
    let n = t.dim();
    let id = identity(n);
    let mut acc = id.clone() * C64::new(0.0, 0.0);
    for &a in phi.coefficients().iter().rev() {
        acc = &acc * t.matrix() + &id * a;
    }
    t.map_with(acc, |z| phi.eval(z))
}

/// `sup |phi|` over `B_gamma` with an explicit enclosure.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StolzSup {
    /// Best boundary value found; a lower bound for the sup.
    pub value: f64,
    /// Mesh value plus the Lipschitz allowance between mesh points.
    pub upper_bound: f64,
    pub argument: C64,
    pub certificate: Certificate,
}

impl StolzSup {
    pub fn estimate(&self) -> NormEstimate {
        NormEstimate { value: self.value, certificate: self.certificate }
    }
}

/// Max of `|phi|` over the boundary of `B_gamma` (maximum modulus principle),
/// refining the mesh by 4 until successive values differ by less than `1e-8`
/// or `max_refinements` is reached.
pub fn sup_on_stolz(phi: &Polynomial, gamma: f64, max_refinements: usize) -> Result<StolzSup> {
    let dom = StolzDomain::new(gamma)?;
    let f = |z: C64| phi.eval(z).norm();
    let mut level = 0;
    let (mut value, mut arg) = dom.boundary_sup(&f, 0);
    while level < max_refinements {
        level += 1;
        let (v, a) = dom.boundary_sup(&f, level);
        let done = (v - value).abs() < 1e-8;
        if v > value {
            value = v;
            arg = a;
        }
        if done {
            break;
        }
    }
    let spacing = mesh_spacing(gamma, level);
    let upper_bound = value + phi.disc_lipschitz() * spacing / 2.0;
    Ok(StolzSup { value, upper_bound, argument: arg, certificate: Certificate::MeshLowerBound })
}

/// Largest gap between consecutive boundary mesh points at a refinement level.
fn mesh_spacing(gamma: f64, level: usize) -> f64 {
    let (s, c) = gamma.sin_cos();
    let f = 4f64.powi(level as i32);
    let arc = s * (std::f64::consts::PI + 2.0 * gamma) / (512.0 * f);
    let seg = c / (128.0 * f);
    arc.max(seg)
}

/// Polynomial family tested by [`hinf_ratio`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FamilySpec {
    /// Monomials `z^n`, `0 <= n <= monomials`.
    pub monomials: usize,
    /// `phi_n`, `1 <= n <= phi`.
    pub phi: usize,
    /// Cesaro means of length `1 ..= cesaro`.
    pub cesaro: usize,
    /// Random polynomials with coefficients uniform on the unit disc.
    pub random_draws: usize,
    pub max_degree: usize,
    /// Refinement levels for the boundary sup.
    pub refinements: usize,
}

impl Default for FamilySpec {
    fn default() -> Self {
        FamilySpec { monomials: 32, phi: 32, cesaro: 16, random_draws: 256, max_degree: 32, refinements: 2 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyMember {
    pub label: String,
    pub polynomial: Polynomial,
}

impl FamilySpec {
    pub fn members(&self, seed: u64) -> Vec<FamilyMember> {
        let mut out = Vec::new();
        for n in 0..=self.monomials {
            out.push(FamilyMember { label: format!("z^{n}"), polynomial: Polynomial::monomial(n) });
        }
        for n in 1..=self.phi {
            out.push(FamilyMember { label: format!("phi_{n}"), polynomial: Polynomial::phi(n) });
        }
        for n in 1..=self.cesaro {
            out.push(FamilyMember { label: format!("cesaro_{n}"), polynomial: Polynomial::cesaro(n) });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in 0..self.random_draws {
            let d = rng.random_range(1..=self.max_degree.max(1));
            let coeffs = (0..=d)
                .map(|_| C64::from_polar(rng.random::<f64>().sqrt(), rng.random::<f64>() * std::f64::consts::TAU))
                .collect();
            out.push(FamilyMember { label: format!("random_{i}"), polynomial: Polynomial::new(coeffs) });
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalculusReport {
    pub gamma: f64,
    /// Best observed `||phi(T)|| / sup_{B_gamma} |phi|` (mesh sup in the denominator).
    pub ratio: f64,
    /// `||phi(T)||` over the Lipschitz upper bound of the sup: a certified lower
    /// bound for the calculus constant when the operator norm is exact.
    pub certified_lower_bound: f64,
    pub witness: Polynomial,
    pub witness_label: String,
    pub family_size: usize,
    pub seed: u64,
    /// Best ratio among monomials alone (recovers the power bound).
    pub monomial_ratio: f64,
    pub norm_certificate: Certificate,
}

/// Lower bound for the `H^infinity(B_gamma)` calculus constant of `T` over a
/// finite polynomial family. Never an upper bound.
pub fn hinf_ratio(t: &LinearOperator, gamma: f64, family: &FamilySpec, seed: u64) -> Result<CalculusReport> {
    ratio_over_family(Some(t), &spectrum(t)?, gamma, family, seed)
}

/// [`hinf_ratio`] for a normal operator known only through its eigenvalues.
pub fn hinf_ratio_from_spectrum(eigenvalues: &[C64], gamma: f64, family: &FamilySpec, seed: u64) -> Result<CalculusReport> {
    ratio_over_family(None, eigenvalues, gamma, family, seed)
}

fn ratio_over_family(t: Option<&LinearOperator>, eigenvalues: &[C64], gamma: f64, family: &FamilySpec, seed: u64) -> Result<CalculusReport> {
    StolzDomain::new(gamma)?;
    for &lambda in eigenvalues {
        let inside = classify(lambda) == PointClass::One || point_angle(lambda).is_some_and(|a| a <= gamma + 1e-9);
        if !inside {
            return Err(Error::Precondition(format!(
                "eigenvalue {lambda} lies outside the closed Stolz domain of angle {gamma:.6}"
            )));
        }
    }
    let members = family.members(seed);
    let opts = NormOptions { restarts: 8, max_iter: 100, seed };
    let evaluated: Vec<Result<(f64, f64, bool, Certificate)>> = members
        .par_iter()
        .map(|m| {
            let sup = sup_on_stolz(&m.polynomial, gamma, family.refinements)?;
            let norm = match t {
                Some(t) if t.normal_spectrum().is_none() => operator_norm_with(&eval_poly_operator(&m.polynomial, t), &opts)?,
                _ => NormEstimate::exact(eigenvalues.iter().map(|&z| m.polynomial.eval(z).norm()).fold(0.0, f64::max)),
            };
            if sup.value <= 0.0 {
                return Ok((0.0, 0.0, m.label.starts_with("z^"), norm.certificate));
            }
            Ok((norm.value / sup.value, norm.value / sup.upper_bound, m.label.starts_with("z^"), norm.certificate))
        })
        .collect();
    let mut best = (f64::NEG_INFINITY, 0usize);
    let mut certified = 0.0f64;
    let mut monomial = 0.0f64;
    let mut cert = Certificate::ExactFinite;
    for (i, r) in evaluated.into_iter().enumerate() {
        let (ratio, lower, is_mono, c) = r?;
        cert = cert.weakest(c);
        if ratio > best.0 {
            best = (ratio, i);
        }
        if c.is_exact() {
            certified = certified.max(lower);
        }
        if is_mono {
            monomial = monomial.max(ratio);
        }
    }
    let w = &members[best.1];
    Ok(CalculusReport {
        gamma,
        ratio: best.0,
        certified_lower_bound: certified,
        witness: w.polynomial.clone(),
        witness_label: w.label.clone(),
        family_size: members.len(),
        seed,
        monomial_ratio: monomial,
        norm_certificate: cert,
    })
}
