//! Operators on tagged finite-dimensional spaces: convolution operators,
//! spectra, norms, Ritt, resolvent and sectorial constants.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::group::FiniteAbelianGroup;
use crate::linalg::{eigenvalues, guard_dense, identity, kron, power, spectral_norm};
use crate::measures::{Carrier, Measure};
use crate::norms::{compare, matrix_norm, CheckStatus, Certificate, NormEstimate, NormOptions, NormTag};
use crate::stolz::{classify, minimal_angle_of_points, PointClass};
use crate::{Error, Result, C64, Mat};

/// Extra structure known about an operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Structure {
    General,
    /// Unitarily diagonalizable by a Fourier basis; eigenvalues listed with multiplicity.
    Circulant { eigenvalues: Vec<C64> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearOperator {
    matrix: Mat,
    space: NormTag,
    structure: Structure,
}

impl LinearOperator {
    pub fn new(matrix: Mat, space: NormTag) -> Result<Self> {
        space.validate()?;
        if !matrix.is_square() {
            return Err(Error::Structural(format!("operator matrix is {}x{}", matrix.nrows(), matrix.ncols())));
        }
        if matrix.nrows() != space.dim() {
            return Err(Error::Structural(format!(
                "matrix dimension {} does not match the space dimension {}",
                matrix.nrows(),
                space.dim()
            )));
        }
        if let Some(bad) = matrix.iter().find(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::validation("matrix", format!("entry {bad} is not finite")));
        }
        Ok(LinearOperator { matrix, space, structure: Structure::General })
    }

    /// Real matrix given row by row on `l^2`.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Structural("rows do not form a square matrix".into()));
        }
        Self::new(Mat::from_fn(n, n, |i, j| C64::new(rows[i][j], 0.0)), NormTag::l2(n))
    }

    pub(crate) fn circulant(matrix: Mat, space: NormTag, eigenvalues: Vec<C64>) -> Self {
        debug_assert_eq!(eigenvalues.len(), matrix.nrows());
        LinearOperator { matrix, space, structure: Structure::Circulant { eigenvalues } }
    }

    pub fn identity(space: NormTag) -> Self {
        let n = space.dim();
        Self::circulant(identity(n), space, vec![C64::new(1.0, 0.0); n])
    }

    pub fn zero(space: NormTag) -> Self {
        let n = space.dim();
        Self::circulant(Mat::zeros(n, n), space, vec![C64::new(0.0, 0.0); n])
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    pub fn space(&self) -> &NormTag {
        &self.space
    }

    pub fn structure(&self) -> &Structure {
        &self.structure
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Eigenvalues of a circulant operator, if known.
    pub fn circulant_eigenvalues(&self) -> Option<&[C64]> {
        match &self.structure {
            Structure::Circulant { eigenvalues } => Some(eigenvalues),
            Structure::General => None,
        }
    }

    /// Eigenvalues that determine every norm exactly: circulant on a Euclidean space.
    pub fn normal_spectrum(&self) -> Option<&[C64]> {
        if self.space.is_euclidean() {
            self.circulant_eigenvalues()
        } else {
            None
        }
    }

    /// Same matrix viewed on another space of the same dimension.
    pub fn on_space(&self, space: NormTag) -> Result<Self> {
        let mut op = Self::new(self.matrix.clone(), space)?;
        op.structure = self.structure.clone();
        Ok(op)
    }

    /// Entrywise function of the matrix that acts on eigenvalues by `f`.
    pub(crate) fn map_with(&self, matrix: Mat, f: impl Fn(C64) -> C64) -> Self {
        let structure = match &self.structure {
            Structure::Circulant { eigenvalues } => Structure::Circulant { eigenvalues: eigenvalues.iter().map(|&z| f(z)).collect() },
            Structure::General => Structure::General,
        };
        LinearOperator { matrix, space: self.space.clone(), structure }
    }

    /// `I - T`.
    pub fn complement(&self) -> Self {
        let m = identity(self.dim()) - &self.matrix;
        self.map_with(m, |z| 1.0 - z)
    }

    pub fn norm(&self) -> Result<NormEstimate> {
        operator_norm(self)
    }
}

/// Convolution by `nu` on `l^p(G)`, or block-convolution `C (x) I_m` on `l^p(G; l^q_m)`.
///
/// Entries are `nu({s - t})` with `s, t` in group index order.
pub fn convolution_operator(nu: &Measure, group: &FiniteAbelianGroup, tag: &NormTag) -> Result<LinearOperator> {
    tag.validate()?;
    match nu.carrier() {
        Carrier::Group(g) if g == group => {}
        other => {
            return Err(Error::Structural(format!("measure carrier {other:?} is not the group {group}")));
        }
    }
    let n = group.order();
    if tag.outer() != n {
        return Err(Error::Structural(format!(
            "space has {} outer coordinates but the group has order {n}",
            tag.outer()
        )));
    }
    guard_dense("convolution operator", tag.dim() as u128)?;
    let w = nu.dense_weights()?;
    let c = Mat::from_fn(n, n, |s, t| w[group.difference_index(s, t)]);
    let symbol = nu.fourier_symbol(None)?.values;
    let m = tag.inner();
    let matrix = if m == 1 { c } else { kron(&c, &identity(m)) };
    let eigenvalues = symbol.iter().flat_map(|&z| std::iter::repeat_n(z, m)).collect();
    Ok(LinearOperator::circulant(matrix, tag.clone(), eigenvalues))
}

/// Eigenvalues: from the symbol for convolution operators, otherwise by a Schur decomposition.
pub fn spectrum(t: &LinearOperator) -> Result<Vec<C64>> {
    match t.circulant_eigenvalues() {
        Some(ev) => Ok(ev.to_vec()),
        None => eigenvalues(t.matrix()),
    }
}

/// Induced norm on the operator's space.
pub fn operator_norm(t: &LinearOperator) -> Result<NormEstimate> {
    operator_norm_with(t, &NormOptions::default())
}

pub fn operator_norm_with(t: &LinearOperator, opts: &NormOptions) -> Result<NormEstimate> {
    if let Some(ev) = t.normal_spectrum() {
        return Ok(NormEstimate::exact(ev.iter().map(|z| z.norm()).fold(0.0, f64::max)));
    }
    matrix_norm(t.matrix(), t.space(), opts)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// Ritt constant finite over all `n`, certified.
    RittCertified,
    /// Bounded over the horizon, no certificate for the tail.
    RittNumerical,
    /// Spectral witness on the unit circle away from 1, with observed growth.
    NotRitt,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::RittCertified => "ritt-certified",
            Verdict::RittNumerical => "ritt-numerical",
            Verdict::NotRitt => "not-ritt",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub n: usize,
    /// `n ||T^n - T^{n-1}||`.
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RittReport {
    /// `sup_{n >= 0} ||T^n||` (over the horizon unless `tail_certified`).
    pub c0: f64,
    /// `sup_{n >= 1} n ||T^n - T^{n-1}||` (over the horizon unless `tail_certified`).
    pub c1: f64,
    pub nmax: usize,
    pub resolvent_k: Option<f64>,
    pub gamma_star: Option<f64>,
    pub verdict: Verdict,
    pub tail_certified: bool,
    pub c1_certificate: Certificate,
    /// Eigenvalue on the unit circle other than 1, if any.
    pub witness: Option<C64>,
    pub profile: Vec<ProfilePoint>,
    pub notes: Vec<String>,
}

/// Flat form of a [`RittReport`] for CSV and JSON lines.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RittRecord {
    pub c0: f64,
    pub c1: f64,
    pub nmax: usize,
    pub resolvent_k: Option<f64>,
    pub gamma_star: Option<f64>,
    pub verdict: Verdict,
    pub tail_certified: bool,
}

impl RittRecord {
    pub const CSV_HEADER: &'static str = "c0,c1,nmax,resolvent_k,gamma_star,verdict,tail_certified";

    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map_or(String::new(), fmt_f64);
        format!(
            "{},{},{},{},{},{},{}",
            fmt_f64(self.c0),
            fmt_f64(self.c1),
            self.nmax,
            opt(self.resolvent_k),
            opt(self.gamma_star),
            self.verdict.label(),
            self.tail_certified
        )
    }

    pub fn json_line(&self) -> String {
        serde_json::to_string(self).expect("flat record serializes")
    }
}

/// Shortest round-trip decimal form (`inf` for infinities).
pub(crate) fn fmt_f64(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:?}")
    }
}

impl RittReport {
    pub fn record(&self) -> RittRecord {
        RittRecord {
            c0: self.c0,
            c1: self.c1,
            nmax: self.nmax,
            resolvent_k: self.resolvent_k,
            gamma_star: self.gamma_star,
            verdict: self.verdict,
            tail_certified: self.tail_certified,
        }
    }
}

/// `sup_{n >= 1} n r^{n-1} d`, attained near `n* = -1/ln r`; `None` if unbounded.
pub fn eigen_ritt_sup(lambda: C64) -> Option<f64> {
    let d = (lambda - 1.0).norm();
    match classify(lambda) {
        PointClass::One => Some(0.0),
        PointClass::Unimodular => None,
        PointClass::Inside => {
            let r = lambda.norm();
            if r == 0.0 {
                return Some(d);
            }
            let f = |n: f64| n * r.powf(n - 1.0) * d;
            let star = -1.0 / r.ln();
            let lo = star.floor().max(1.0);
            Some(f(1.0).max(f(lo)).max(f(lo + 1.0)))
        }
    }
}

fn spectral_witness(ev: &[C64]) -> Option<C64> {
    ev.iter().copied().find(|z| z.norm() >= 1.0 - 1e-9 && (z - 1.0).norm() > 1e-9)
}

/// Ritt data of a normal operator from its eigenvalues (with multiplicity):
/// exact `c0`, `c1` when no eigenvalue other than `1` is unimodular. The
/// resolvent constant is left empty.
pub fn ritt_from_spectrum(nev: &[C64], nmax: usize) -> Result<RittReport> {
    if nmax == 0 {
        return Err(Error::validation("nmax", "horizon must be >= 1"));
    }
    if nev.is_empty() {
        return Err(Error::validation("spectrum", "no eigenvalues given"));
    }
    let angle = minimal_angle_of_points(nev, |i| format!("{}", nev[i]));
    let witness = spectral_witness(nev);
    let mut notes = Vec::new();
    let resolvent_k = None;
    let profile: Vec<ProfilePoint> = (1..=nmax)
        .map(|n| ProfilePoint {
            n,
            value: nev
                .iter()
                .map(|z| n as f64 * z.norm().powi(n as i32 - 1) * (z - 1.0).norm())
                .fold(0.0, f64::max),
        })
        .collect();
    let per: Vec<Option<f64>> = nev.iter().map(|&z| eigen_ritt_sup(z)).collect();
    let radius = nev.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if per.iter().all(Option::is_some) {
        let c1 = per.iter().map(|v| v.unwrap()).fold(0.0, f64::max);
        return Ok(RittReport {
            c0: 1.0f64.max(radius),
            c1,
            nmax,
            resolvent_k,
            gamma_star: angle.gamma_star,
            verdict: Verdict::RittCertified,
            tail_certified: true,
            c1_certificate: Certificate::ExactFinite,
            witness,
            profile,
            notes,
        });
    }
    let c1 = profile.iter().map(|p| p.value).fold(0.0, f64::max);
    let c0 = (0..=nmax).map(|n| radius.powi(n as i32)).fold(0.0, f64::max);
    notes.push(format!("eigenvalue {} on the unit circle: n||T^n - T^(n-1)|| is unbounded", witness.unwrap_or(C64::new(radius, 0.0))));
    Ok(RittReport {
        c0,
        c1,
        nmax,
        resolvent_k,
        gamma_star: angle.gamma_star,
        verdict: Verdict::NotRitt,
        tail_certified: false,
        c1_certificate: Certificate::ExactFinite,
        witness,
        profile,
        notes,
    })
}

/// Power bound, Ritt constant, resolvent constant and minimal Stolz angle.
///
/// Circulant operators on Euclidean spaces get the exact supremum over all
/// `n`; everything else is truncated at `nmax` and `tail_certified` is false.
pub fn ritt_constants(t: &LinearOperator, nmax: usize) -> Result<RittReport> {
    if nmax == 0 {
        return Err(Error::validation("nmax", "horizon must be >= 1"));
    }
    let ev = spectrum(t)?;
    let angle = minimal_angle_of_points(&ev, |i| format!("{}", ev[i]));
    let witness = spectral_witness(&ev);
    let mut notes = Vec::new();
    let resolvent_k = if ev.iter().all(|z| z.norm() <= 1.0 + 1e-9) {
        match resolvent_constant(t, &ContourSpec::default()) {
            Ok(r) => {
                notes.push(r.note.clone());
                Some(r.k)
            }
            Err(e) => {
                notes.push(format!("resolvent constant unavailable: {e}"));
                None
            }
        }
    } else {
        notes.push("spectrum leaves the closed unit disc; resolvent constant not computed".into());
        None
    };

    if let Some(nev) = t.normal_spectrum() {
        let mut r = ritt_from_spectrum(nev, nmax)?;
        r.resolvent_k = resolvent_k;
        notes.append(&mut r.notes);
        r.notes = notes;
        return Ok(r);
    }

    let opts = NormOptions::default();
    let n = t.dim();
    let mut prev = identity(n);
    let mut c0 = 1.0f64;
    let mut cert = Certificate::ExactFinite;
    let mut profile = Vec::with_capacity(nmax);
    for k in 1..=nmax {
        let cur = &prev * t.matrix();
        let pk = matrix_norm(&cur, t.space(), &opts)?;
        let dk = matrix_norm(&(&cur - &prev), t.space(), &opts)?;
        cert = cert.weakest(pk.certificate).weakest(dk.certificate);
        c0 = c0.max(pk.value);
        profile.push(ProfilePoint { n: k, value: k as f64 * dk.value });
        prev = cur;
    }
    let c1 = profile.iter().map(|p| p.value).fold(0.0, f64::max);
    let last = profile[nmax - 1].value;
    let half = profile[(nmax / 2).max(1) - 1].value;
    let growing = nmax >= 2 && last >= 1.5 * half && last > 0.0;
    let verdict = if witness.is_some() && growing { Verdict::NotRitt } else { Verdict::RittNumerical };
    if witness.is_some() && !growing {
        notes.push("unimodular eigenvalue present but no growth over the horizon".into());
    }
    Ok(RittReport {
        c0,
        c1,
        nmax,
        resolvent_k,
        gamma_star: angle.gamma_star,
        verdict,
        tail_certified: false,
        c1_certificate: cert.weakest(Certificate::MeshLowerBound),
        witness,
        profile,
        notes,
    })
}

/// Sampling of `|z| in (1, 1 + max_gap]` for the resolvent constant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec {
    pub radii: usize,
    pub angles: usize,
    pub min_gap: f64,
    pub max_gap: f64,
}

impl Default for ContourSpec {
    fn default() -> Self {
        ContourSpec { radii: 24, angles: 512, min_gap: 1e-6, max_gap: 3.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolventReport {
    pub k: f64,
    pub argmax: C64,
    pub samples: usize,
    pub skipped: usize,
    pub certificate: Certificate,
    pub note: String,
}

/// Condition number above which a resolvent sample is treated as on the spectrum.
const SAMPLE_CONDITION_CAP: f64 = 1e12;

/// `|scale(z)| ||(z - T)^{-1}||` at each sample, skipping near-singular ones.
fn resolvent_samples(t: &LinearOperator, zs: &[C64], scale: impl Fn(C64) -> f64 + Sync) -> Result<(f64, C64, usize)> {
    let n = t.dim();
    let normal = t.normal_spectrum();
    let opts = NormOptions { restarts: 4, max_iter: 60, ..NormOptions::default() };
    let values: Vec<Option<f64>> = zs
        .par_iter()
        .map(|&z| {
            if let Some(ev) = normal {
                let d = ev.iter().map(|l| (z - l).norm()).fold(f64::INFINITY, f64::min);
                return if d > 0.0 { Some(scale(z) / d) } else { None };
            }
            let a = identity(n) * z - t.matrix();
            if t.space().is_euclidean() {
                let svd = nalgebra::SVD::new(a, false, false);
                let smax = svd.singular_values.iter().fold(0.0f64, |m, &v| m.max(v));
                let smin = svd.singular_values.iter().fold(f64::INFINITY, |m, &v| m.min(v));
                if smin <= 0.0 || smax / smin > SAMPLE_CONDITION_CAP {
                    return None;
                }
                return Some(scale(z) / smin);
            }
            let inv = a.try_inverse()?;
            let v = matrix_norm(&inv, t.space(), &opts).ok()?.value;
            if !v.is_finite() || v * spectral_norm(&(identity(n) * z - t.matrix())) > SAMPLE_CONDITION_CAP {
                return None;
            }
            Some(scale(z) * v)
        })
        .collect();
    let mut best = (f64::NEG_INFINITY, C64::new(0.0, 0.0));
    let mut skipped = 0;
    for (z, v) in zs.iter().zip(values) {
        match v {
            Some(v) if v > best.0 => best = (v, *z),
            Some(_) => {}
            None => skipped += 1,
        }
    }
    if best.0 == f64::NEG_INFINITY {
        return Err(Error::Numerical("every resolvent sample was singular".into()));
    }
    Ok((best.0, best.1, skipped))
}

/// Lower bound for `sup_{|z| > 1} |z - 1| ||(z - T)^{-1}||`, sampled on
/// log-spaced radii `1 + g`, `g in [min_gap, max_gap]`.
pub fn resolvent_constant(t: &LinearOperator, contour: &ContourSpec) -> Result<ResolventReport> {
    if contour.radii == 0 || contour.angles == 0 || !(contour.min_gap > 0.0 && contour.max_gap >= contour.min_gap) {
        return Err(Error::validation("contour", "needs radii, angles >= 1 and 0 < min_gap <= max_gap"));
    }
    let ev = spectrum(t)?;
    if let Some(bad) = ev.iter().find(|z| z.norm() > 1.0 + 1e-9) {
        return Err(Error::Precondition(format!("eigenvalue {bad} lies outside the closed unit disc")));
    }
    let zs: Vec<C64> = (0..contour.radii)
        .flat_map(|i| {
            let frac = if contour.radii == 1 { 0.0 } else { i as f64 / (contour.radii - 1) as f64 };
            let g = contour.min_gap * (contour.max_gap / contour.min_gap).powf(frac);
            (0..contour.angles).map(move |j| C64::from_polar(1.0 + g, 2.0 * PI * j as f64 / contour.angles as f64))
        })
        .collect();
    let (k, argmax, skipped) = resolvent_samples(t, &zs, |z| (z - 1.0).norm())?;
    Ok(ResolventReport {
        k,
        argmax,
        samples: zs.len(),
        skipped,
        certificate: Certificate::MeshLowerBound,
        note: format!(
            "resolvent sampled on |z| - 1 in [{:e}, {}] ({} radii x {} angles); no certificate for |z| > {}",
            contour.min_gap,
            contour.max_gap,
            contour.radii,
            contour.angles,
            1.0 + contour.max_gap
        ),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorialReport {
    pub alpha: f64,
    pub k: f64,
    /// Smallest sector angle containing the spectrum.
    pub threshold_angle: f64,
    pub samples: usize,
    pub skipped: usize,
    pub certificate: Certificate,
}

/// Lower bound for `sup |lambda| ||(lambda - A)^{-1}||` over `lambda` outside
/// the closed sector of angle `alpha` (moduli `1e-3 .. 1e3`, 256 angles).
pub fn sectorial_constant(a: &LinearOperator, alpha: f64) -> Result<SectorialReport> {
    if !(alpha > 0.0 && alpha < PI) {
        return Err(Error::Config(format!("sector angle {alpha} is outside (0, pi)")));
    }
    let ev = spectrum(a)?;
    let tol = 1e-12;
    let mut threshold = 0.0f64;
    for &z in &ev {
        if z.norm() <= tol {
            continue;
        }
        let arg = z.arg().abs();
        if arg > alpha + 1e-12 {
            return Err(Error::Precondition(format!(
                "eigenvalue {z} has argument {arg:.6} outside the sector of angle {alpha:.6}"
            )));
        }
        threshold = threshold.max(arg);
    }
    let moduli = 64;
    let angles = 256;
    let zs: Vec<C64> = (0..moduli)
        .flat_map(|i| {
            let rho = 1e-3 * 1e6f64.powf(i as f64 / (moduli - 1) as f64);
            (0..angles).map(move |j| C64::from_polar(rho, alpha + (2.0 * PI - 2.0 * alpha) * (j as f64 + 0.5) / angles as f64))
        })
        .collect();
    let (k, _, skipped) = resolvent_samples(a, &zs, |z| z.norm())?;
    Ok(SectorialReport { alpha, k, threshold_angle: threshold, samples: zs.len(), skipped, certificate: Certificate::MeshLowerBound })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SquareCheckRow {
    pub n: usize,
    /// `n ||T^{2(n-1)} (T - I)||`.
    pub lhs: f64,
    /// `||(I + T)^{-1}|| n ||T^{2n} - T^{2n-2}||`.
    pub rhs: f64,
    pub status: CheckStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SquareCheck {
    /// `max_{m <= 2 nmax} m ||T^m - T^{m-1}||`.
    pub c1_t: f64,
    /// `max_{n <= nmax} n ||T^{2n} - T^{2n-2}||`.
    pub c1_t2: f64,
    pub inv_norm: f64,
    pub norm_t: f64,
    /// `2 max(1, ||T||) ||(I + T)^{-1}|| c1(T^2)`, an upper bound for `c1(T)`.
    pub derived_bound: f64,
    pub inequality_holds: bool,
    pub bound_holds: bool,
    pub certificate: Certificate,
    pub rows: Vec<SquareCheckRow>,
}

/// Ritt constant of `T` from that of `T^2` through `(I + T)^{-1}`.
pub fn ritt_from_square_check(t: &LinearOperator, nmax: usize) -> Result<SquareCheck> {
    if nmax == 0 {
        return Err(Error::validation("nmax", "horizon must be >= 1"));
    }
    let n = t.dim();
    let ipt = identity(n) + t.matrix();
    let singular = match t.circulant_eigenvalues() {
        Some(ev) => ev.iter().any(|z| (z + 1.0).norm() <= 1e-12),
        None => crate::linalg::min_singular_value(&ipt) <= 1e-12 * spectral_norm(&ipt).max(1.0),
    };
    let inv = if singular { None } else { ipt.try_inverse() };
    let Some(inv) = inv else {
        return Err(Error::Precondition("-1 is an eigenvalue of T, so I + T is not invertible".into()));
    };
    let opts = NormOptions::default();
    let (inv_norm, norm_t, mut cert) = match t.normal_spectrum() {
        Some(ev) => (
            ev.iter().map(|z| 1.0 / (z + 1.0).norm()).fold(0.0, f64::max),
            ev.iter().map(|z| z.norm()).fold(0.0, f64::max),
            Certificate::ExactFinite,
        ),
        None => {
            let a = matrix_norm(&inv, t.space(), &opts)?;
            let b = matrix_norm(t.matrix(), t.space(), &opts)?;
            (a.value, b.value, a.certificate.weakest(b.certificate))
        }
    };
    let inv_cert = cert;
    let mut rows = Vec::with_capacity(nmax);
    let mut c1_t = 0.0f64;
    let mut c1_t2 = 0.0f64;
    if let Some(ev) = t.normal_spectrum() {
        let f = |g: &dyn Fn(C64) -> C64| ev.iter().map(|&z| g(z).norm()).fold(0.0, f64::max);
        for k in 1..=nmax {
            let kf = k as f64;
            let lhs = kf * f(&|z| z.powu(2 * k as u32 - 2) * (z - 1.0));
            let d2 = kf * f(&|z| z.powu(2 * k as u32) - z.powu(2 * k as u32 - 2));
            let rhs = inv_norm * d2;
            c1_t2 = c1_t2.max(d2);
            for m in [2 * k - 1, 2 * k] {
                c1_t = c1_t.max(m as f64 * f(&|z| z.powu(m as u32) - z.powu(m as u32 - 1)));
            }
            rows.push(SquareCheckRow { n: k, lhs, rhs, status: compare(NormEstimate::exact(lhs), NormEstimate::exact(rhs), 1e-9 * rhs.max(1.0)) });
        }
    } else {
        guard_dense("power sequence", n as u128)?;
        let id = identity(n);
        let tm = t.matrix();
        let mut p_prev = id; // T^{2k-2}
        for k in 1..=nmax {
            let p_mid = &p_prev * tm; // T^{2k-1}
            let p_next = &p_mid * tm; // T^{2k}
            let l = matrix_norm(&(&p_mid - &p_prev), t.space(), &opts)?;
            let d = matrix_norm(&(&p_next - &p_prev), t.space(), &opts)?;
            let e = matrix_norm(&(&p_next - &p_mid), t.space(), &opts)?;
            cert = cert.weakest(l.certificate).weakest(d.certificate).weakest(e.certificate);
            let kf = k as f64;
            let lhs = NormEstimate { value: kf * l.value, certificate: l.certificate };
            let rhs = NormEstimate { value: inv_norm * kf * d.value, certificate: d.certificate.weakest(inv_cert) };
            c1_t2 = c1_t2.max(kf * d.value);
            c1_t = c1_t.max((2 * k - 1) as f64 * l.value).max(2.0 * kf * e.value);
            rows.push(SquareCheckRow { n: k, lhs: lhs.value, rhs: rhs.value, status: compare(lhs, rhs, 1e-9 * rhs.value.max(1.0)) });
            p_prev = p_next;
        }
    }
    let derived_bound = 2.0 * norm_t.max(1.0) * inv_norm * c1_t2;
    let inequality_holds = rows.iter().all(|r| r.status != CheckStatus::Fails);
    let bound_holds = c1_t <= derived_bound * (1.0 + 1e-9) + 1e-12;
    Ok(SquareCheck { c1_t, c1_t2, inv_norm, norm_t, derived_bound, inequality_holds, bound_holds, certificate: cert, rows })
}

/// `T^n` on the operator's space.
pub fn operator_power(t: &LinearOperator, n: usize) -> LinearOperator {
    let m = power(t.matrix(), n);
    t.map_with(m, |z| z.powu(n as u32))
}
