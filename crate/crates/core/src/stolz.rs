//! Stolz domains `B_gamma`, sectors, bounded angular ratio and minimal Stolz angles.
//!
//! `B_gamma` is the interior of the convex hull of `1` and the disc
//! `{|z| < sin gamma}`. Membership tests use the closure. Its boundary has
//! three pieces: the segments `z = 1 - s e^{-/+ i gamma}`, `s in [0, cos gamma]`,
//! which touch the circle at `sin gamma e^{+/- i(pi/2 - gamma)}`, and the arc
//! `sin gamma e^{i theta}`, `theta in [pi/2 - gamma, 3 pi/2 + gamma]`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::measures::Symbol;
use crate::norms::{Certificate, NormEstimate};
use crate::{Error, Result, C64};

/// `|1 - z| <= POINT_ONE_TOL` counts as the point `1`.
pub const POINT_ONE_TOL: f64 = 1e-12;
/// `1 - |z| <= BOUNDARY_TOL` (with `z != 1`) counts as touching the unit circle.
pub const BOUNDARY_TOL: f64 = 1e-12;
/// Largest admissible modulus of a probability symbol.
pub const MODULUS_TOL: f64 = 1e-9;
/// Witness locations kept in a [`BarReport`].
pub const MAX_WITNESSES: usize = 8;

const ARC_POINTS: usize = 513;
const SEGMENT_POINTS: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StolzDomain {
    gamma: f64,
}

impl StolzDomain {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma < FRAC_PI_2) {
            return Err(Error::Config(format!("Stolz angle {gamma} is outside (0, pi/2)")));
        }
        Ok(StolzDomain { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn contains(&self, z: C64) -> bool {
        contains_closure(self.gamma, z)
    }

    /// Upper tangent point `sin gamma e^{i(pi/2 - gamma)}`.
    pub fn tangent_point(&self) -> C64 {
        C64::from_polar(self.gamma.sin(), FRAC_PI_2 - self.gamma)
    }

    /// Closed boundary polyline with `points` vertices, counter-clockwise from `1`.
    pub fn boundary_polyline(&self, points: usize) -> Vec<C64> {
        let points = points.max(8);
        let (s, c) = self.gamma.sin_cos();
        let arc_len = s * (PI + 2.0 * self.gamma);
        let total = 2.0 * c + arc_len;
        (0..points)
            .map(|k| {
                let t = total * k as f64 / points as f64;
                if t <= c {
                    1.0 - t * C64::from_polar(1.0, -self.gamma)
                } else if t <= c + arc_len {
                    C64::from_polar(s, FRAC_PI_2 - self.gamma + (t - c) / s)
                } else {
                    1.0 - (total - t) * C64::from_polar(1.0, self.gamma)
                }
            })
            .collect()
    }

    /// Boundary pieces for sup computations, each as a parameterized curve.
    fn pieces(&self, refine: usize) -> Vec<Piece> {
        let (s, c) = self.gamma.sin_cos();
        let g = self.gamma;
        let factor = 4usize.pow(refine as u32);
        let seg = SEGMENT_POINTS * factor;
        let arc = (ARC_POINTS - 1) * factor + 1;
        let segment_params = segment_mesh(c, seg);
        vec![
            Piece { kind: PieceKind::Segment { dir: C64::from_polar(1.0, -g) }, params: segment_params.clone() },
            Piece { kind: PieceKind::Segment { dir: C64::from_polar(1.0, g) }, params: segment_params },
            Piece {
                kind: PieceKind::Arc { radius: s },
                params: (0..arc).map(|k| FRAC_PI_2 - g + (PI + 2.0 * g) * k as f64 / (arc - 1) as f64).collect(),
            },
        ]
    }

    /// Sup of `f` over the boundary mesh, polished by golden-section search
    /// around the best local maxima of each piece. Returns `(value, argument)`.
    pub fn boundary_sup(&self, f: &(dyn Fn(C64) -> f64 + Sync), refine: usize) -> (f64, C64) {
        let mut best = (f64::NEG_INFINITY, C64::new(1.0, 0.0));
        for piece in self.pieces(refine) {
            let values: Vec<f64> = piece.params.iter().map(|&t| f(piece.point(t))).collect();
            let n = values.len();
            let mut peaks: Vec<usize> = (0..n)
                .filter(|&i| (i == 0 || values[i] >= values[i - 1]) && (i + 1 == n || values[i] >= values[i + 1]))
                .collect();
            peaks.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
            peaks.truncate(8);
            for i in peaks {
                if values[i] > best.0 {
                    best = (values[i], piece.point(piece.params[i]));
                }
                let lo = piece.params[i.saturating_sub(1)];
                let hi = piece.params[(i + 1).min(n - 1)];
                if hi > lo {
                    let (t, v) = golden_max(&|t| f(piece.point(t)), lo, hi);
                    if v > best.0 {
                        best = (v, piece.point(t));
                    }
                }
            }
        }
        best
    }
}

#[derive(Clone, Copy, Debug)]
enum PieceKind {
    Segment { dir: C64 },
    Arc { radius: f64 },
}

#[derive(Clone, Debug)]
struct Piece {
    kind: PieceKind,
    params: Vec<f64>,
}

impl Piece {
    fn point(&self, t: f64) -> C64 {
        match self.kind {
            PieceKind::Segment { dir } => 1.0 - t * dir,
            PieceKind::Arc { radius } => C64::from_polar(radius, t),
        }
    }
}

/// Parameters in `[0, len]`: half log-spaced from `1e-8 len`, half uniform.
fn segment_mesh(len: f64, points: usize) -> Vec<f64> {
    let half = points / 2;
    let mut v: Vec<f64> = (0..half)
        .map(|k| len * 10f64.powf(-8.0 + 8.0 * k as f64 / half as f64))
        .chain((0..=points - half).map(|k| len * k as f64 / (points - half) as f64))
        .collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Golden-section search for a maximum of `f` on `[a, b]`.
fn golden_max(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// The closed sector `{lambda : |Arg lambda| <= omega} ∪ {0}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sector {
    omega: f64,
}

impl Sector {
    pub fn new(omega: f64) -> Result<Self> {
        if !(omega > 0.0 && omega < PI) {
            return Err(Error::Config(format!("sector angle {omega} is outside (0, pi)")));
        }
        Ok(Sector { omega })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn contains(&self, lambda: C64) -> bool {
        lambda == C64::new(0.0, 0.0) || lambda.arg().abs() <= self.omega
    }
}

pub fn sector_contains(omega: f64, lambda: C64) -> Result<bool> {
    Ok(Sector::new(omega)?.contains(lambda))
}

fn contains_closure(gamma: f64, z: C64) -> bool {
    let w = 1.0 - z;
    if w.norm() == 0.0 {
        return true;
    }
    let (s, c) = gamma.sin_cos();
    z.norm() <= s || (w.arg().abs() <= gamma && w.norm() <= c)
}

/// Membership in the closure of `B_gamma`.
pub fn stolz_contains(gamma: f64, z: C64) -> Result<bool> {
    Ok(StolzDomain::new(gamma)?.contains(z))
}

/// `sup |1 - z| / (1 - |z|)` over a boundary and interior mesh of `B_gamma`.
///
/// `samples` sets the arc resolution of the starting mesh; the mesh is refined
/// by 4 until successive estimates differ by less than `1e-6`.
pub fn stolz_ratio_constant(gamma: f64, samples: usize) -> Result<NormEstimate> {
    let dom = StolzDomain::new(gamma)?;
    let ratio = |z: C64| {
        let d = 1.0 - z.norm();
        if d <= 0.0 {
            0.0
        } else {
            (1.0 - z).norm() / d
        }
    };
    let mut samples = samples.max(16);
    let mut prev = ratio_on_mesh(&dom, samples, &ratio);
    for _ in 0..4 {
        samples *= 4;
        let next = ratio_on_mesh(&dom, samples, &ratio).max(prev);
        if (next - prev).abs() < 1e-6 {
            prev = next;
            break;
        }
        prev = next;
    }
    Ok(NormEstimate { value: prev, certificate: Certificate::MeshLowerBound })
}

fn ratio_on_mesh(dom: &StolzDomain, samples: usize, ratio: &(dyn Fn(C64) -> f64 + Sync)) -> f64 {
    let boundary = dom.boundary_sup(ratio, 0).0;
    // Interior: points on chords from 1 to boundary vertices.
    let poly = dom.boundary_polyline(samples);
    let radial = (samples / 8).max(8);
    let interior = poly
        .iter()
        .flat_map(|&b| (1..radial).map(move |k| 1.0 - (k as f64 / radial as f64) * (1.0 - b)))
        .map(ratio)
        .fold(0.0, f64::max);
    boundary.max(interior).max(poly.iter().map(|&z| ratio(z)).fold(0.0, f64::max))
}

/// `sup |phi_n|` over a boundary mesh of `B_gamma`, `phi_n(z) = n (z^n - z^{n-1})`.
pub fn phi_n_sup(n: usize, gamma: f64) -> Result<NormEstimate> {
    if n == 0 {
        return Err(Error::Config("phi_n needs n >= 1".into()));
    }
    let dom = StolzDomain::new(gamma)?;
    let nf = n as f64;
    let f = move |z: C64| nf * z.norm().powi(n as i32 - 1) * (z - 1.0).norm();
    Ok(NormEstimate { value: dom.boundary_sup(&f, 0).0, certificate: Certificate::MeshLowerBound })
}

/// How a symbol value sits relative to the Stolz family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum PointClass {
    One,
    Unimodular,
    Inside,
}

pub(crate) fn classify(z: C64) -> PointClass {
    if (1.0 - z).norm() <= POINT_ONE_TOL {
        PointClass::One
    } else if 1.0 - z.norm() <= BOUNDARY_TOL {
        PointClass::Unimodular
    } else {
        PointClass::Inside
    }
}

fn check_modulus(symbol: &Symbol) -> Result<()> {
    if let Some((i, v)) = symbol.values.iter().enumerate().find(|(_, v)| v.norm() > 1.0 + MODULUS_TOL) {
        return Err(Error::InvalidSymbol(format!(
            "|value| = {:.12} > 1 at {}; not the symbol of a probability measure",
            v.norm(),
            symbol.location(i)
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BarReport {
    /// `sup |1 - v| / (1 - |v|)`; `None` when the ratio is unbounded.
    pub constant: Option<f64>,
    pub holds: bool,
    /// Up to `MAX_WITNESSES` locations attaining the sup (or touching the unit circle when it fails).
    pub witnesses: Vec<String>,
    /// True for finite duals; grid symbols are exact only at grid points.
    pub certified: bool,
    pub certificate: Certificate,
}

/// Smallest `K` with `|1 - v| <= K (1 - |v|)` over all symbol values `v != 1`.
pub fn bar_constant(symbol: &Symbol) -> Result<BarReport> {
    check_modulus(symbol)?;
    let certificate = symbol.certificate();
    let certified = certificate.is_exact();
    let mut failures = Vec::new();
    let mut ratios = Vec::new();
    for (i, &v) in symbol.values.iter().enumerate() {
        match classify(v) {
            PointClass::One => {}
            PointClass::Unimodular => failures.push(symbol.location(i)),
            PointClass::Inside => ratios.push((i, (1.0 - v).norm() / (1.0 - v.norm()))),
        }
    }
    if !failures.is_empty() {
        failures.truncate(MAX_WITNESSES);
        return Ok(BarReport { constant: None, holds: false, witnesses: failures, certified, certificate });
    }
    if ratios.is_empty() {
        return Ok(BarReport { constant: Some(1.0), holds: true, witnesses: vec![symbol.location(0)], certified, certificate });
    }
    let k = ratios.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    let witnesses = ratios.iter().filter(|r| r.1 >= k * (1.0 - 1e-12)).take(MAX_WITNESSES).map(|r| symbol.location(r.0)).collect();
    Ok(BarReport { constant: Some(k), holds: true, witnesses, certified, certificate })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleReport {
    /// Smallest `gamma` with every value in `closure(B_gamma)`; `None` when no angle works.
    pub gamma_star: Option<f64>,
    /// Location of the value that fixes `gamma_star` (or breaks it).
    pub witness: Option<String>,
    pub certificate: Certificate,
}

/// Minimal angle of a single point: the smaller of the disc angle `asin|z|`
/// and the cone angle `|Arg(1 - z)|` when the cone piece reaches `z`.
/// `None` when the point lies in no closed Stolz domain.
pub fn point_angle(z: C64) -> Option<f64> {
    match classify(z) {
        PointClass::One => return Some(0.0),
        PointClass::Unimodular => return None,
        PointClass::Inside => {}
    }
    if z.norm() > 1.0 {
        return None;
    }
    let w = 1.0 - z;
    let disc = z.norm().asin();
    let alpha = w.arg().abs();
    Some(if w.norm() <= alpha.cos() { disc.min(alpha) } else { disc })
}

/// Max of the per-point minimal angles over a list of values.
pub fn minimal_angle_of_points(values: &[C64], location: impl Fn(usize) -> String) -> AngleReport {
    let mut best: Option<(f64, usize)> = None;
    for (i, &v) in values.iter().enumerate() {
        match point_angle(v) {
            None => return AngleReport { gamma_star: None, witness: Some(location(i)), certificate: Certificate::ExactFinite },
            Some(a) => {
                if best.is_none_or(|b| a > b.0) {
                    best = Some((a, i));
                }
            }
        }
    }
    AngleReport {
        gamma_star: Some(best.map_or(0.0, |b| b.0)),
        witness: best.map(|b| location(b.1)),
        certificate: Certificate::ExactFinite,
    }
}

pub fn minimal_stolz_angle(symbol: &Symbol) -> Result<AngleReport> {
    check_modulus(symbol)?;
    let mut r = minimal_angle_of_points(&symbol.values, |i| symbol.location(i));
    r.certificate = symbol.certificate();
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteAbelianGroup;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_4;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn finite(values: Vec<C64>) -> Symbol {
        let g = FiniteAbelianGroup::cyclic(values.len()).unwrap();
        Symbol::finite(&g, values).unwrap()
    }

    /// Closed-form minimal angle: the disc clause needs `arcsin |z|`, the cone
    /// clause `|Arg(1 - z)|` provided `|1 - z| <= cos` of that angle.
    fn closed_form_angle(z: C64) -> f64 {
        let disc = z.norm().asin();
        let w = 1.0 - z;
        let a = w.arg().abs();
        if a < FRAC_PI_2 && w.norm() <= a.cos() {
            disc.min(a)
        } else {
            disc
        }
    }

    #[test]
    fn membership_examples() {
        let g = PI / 6.0;
        assert!(stolz_contains(g, c(0.3, 0.0)).unwrap());
        assert!(!stolz_contains(g, c(0.0, 0.9)).unwrap());
        assert!(stolz_contains(g, c(1.0, 0.0)).unwrap());
        assert!(stolz_contains(0.0, c(0.5, 0.0)).is_err());
        assert!(stolz_contains(FRAC_PI_2, c(0.5, 0.0)).is_err());
    }

    #[test]
    fn sector_examples() {
        assert!(sector_contains(FRAC_PI_4, c(1.0, 0.0)).unwrap());
        assert!(!sector_contains(FRAC_PI_4, c(0.0, 1.0)).unwrap());
        assert!(sector_contains(FRAC_PI_2, c(1.0, 1.0)).unwrap());
        assert!(sector_contains(0.1, c(0.0, 0.0)).unwrap());
    }

    #[test]
    fn membership_matches_hull_sampling() {
        // Convex combinations of 1 and disc points fill the hull; a point is
        // outside iff no sampled combination lands within the sampling radius.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for gamma in [PI / 12.0, PI / 6.0, FRAC_PI_4, PI / 3.0] {
            let s = gamma.sin();
            for _ in 0..2000 {
                let t: f64 = rng.random();
                let w = C64::from_polar(s * rng.random::<f64>().sqrt(), rng.random::<f64>() * 2.0 * PI);
                let z = (1.0 - t) + t * w;
                assert!(stolz_contains(gamma, z).unwrap(), "hull point {z} rejected at gamma={gamma}");
            }
        }
    }

    #[test]
    fn ratio_constant_matches_closed_form() {
        for gamma in [PI / 12.0, PI / 6.0, FRAC_PI_4, PI / 3.0] {
            let s = gamma.sin();
            let r = stolz_ratio_constant(gamma, 512).unwrap();
            assert_eq!(r.certificate, Certificate::MeshLowerBound);
            assert!((r.value - (1.0 + s) / (1.0 - s)).abs() < 1e-9, "gamma={gamma} {}", r.value);
        }
        let a = stolz_ratio_constant(PI / 6.0, 256).unwrap().value;
        let b = stolz_ratio_constant(PI / 3.0, 256).unwrap().value;
        assert!(1.0 <= a && a <= b);
    }

    #[test]
    fn bar_examples() {
        let coin = finite(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let r = bar_constant(&coin).unwrap();
        assert_eq!(r.constant, Some(1.0));
        assert!(r.certified && r.holds);
        assert_eq!(bar_constant(&finite(vec![c(1.0, 0.0); 3])).unwrap().constant, Some(1.0));
        let shift = finite(vec![c(1.0, 0.0), c(-1.0, 0.0)]);
        let r = bar_constant(&shift).unwrap();
        assert!(!r.holds && r.constant.is_none());
        assert_eq!(r.witnesses, vec!["[1]".to_string()]);
        assert!(matches!(bar_constant(&finite(vec![c(1.1, 0.0)])), Err(Error::InvalidSymbol(_))));
    }

    #[test]
    fn minimal_angle_examples() {
        let a = minimal_stolz_angle(&finite(vec![c(1.0, 0.0), c(0.5, 0.0)])).unwrap();
        assert!(a.gamma_star.unwrap() < 1e-9);
        let b = minimal_stolz_angle(&finite(vec![c(0.0, 0.5)])).unwrap();
        assert!((b.gamma_star.unwrap() - PI / 6.0).abs() < 1e-9);
        let f = minimal_stolz_angle(&finite(vec![c(1.0, 0.0), c(-1.0, 0.0)])).unwrap();
        assert_eq!(f.gamma_star, None);
        assert_eq!(f.witness.as_deref(), Some("[1]"));
    }

    #[test]
    fn bisection_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2000 {
            let z = C64::from_polar(rng.random::<f64>() * 0.999, rng.random::<f64>() * 2.0 * PI);
            let a = point_angle(z).unwrap();
            assert!((a - closed_form_angle(z)).abs() < 1e-9, "{z}: {a} vs {}", closed_form_angle(z));
        }
    }

    #[test]
    fn phi_one_sup() {
        for gamma in [PI / 6.0, FRAC_PI_4, PI / 3.0] {
            let v = phi_n_sup(1, gamma).unwrap().value;
            assert!((v - (1.0 + gamma.sin())).abs() < 1e-12);
        }
    }

    #[test]
    fn phi_n_bounded_by_ratio_constant() {
        let cg = stolz_ratio_constant(FRAC_PI_4, 512).unwrap().value;
        for n in [1usize, 2, 3, 10, 100, 1000, 10_000] {
            let v = phi_n_sup(n, FRAC_PI_4).unwrap().value;
            let bound = cg * (1.0 - 1.0 / n as f64).powi(n as i32 - 1);
            assert!(v <= bound + 1e-6, "n={n} {v} > {bound}");
            assert!(v <= cg);
        }
        // The segment maximum 1/(e cos gamma) is resolved at large n.
        let v = phi_n_sup(10_000, FRAC_PI_4).unwrap().value;
        assert!(v > 0.99 / (std::f64::consts::E * FRAC_PI_4.cos()));
    }

    #[test]
    fn polyline_lies_on_boundary() {
        let d = StolzDomain::new(PI / 5.0).unwrap();
        let poly = d.boundary_polyline(512);
        assert_eq!(poly.len(), 512);
        for z in poly {
            // 0 is interior and the domain is convex: pull slightly inward, push slightly outward.
            assert!(d.contains(z * (1.0 - 1e-9)));
            assert!(!d.contains(z * (1.0 + 1e-6)) || (z - 1.0).norm() < 1e-12);
            assert!(!StolzDomain::new(PI / 5.0 - 1e-3).unwrap().contains(z) || (z - 1.0).norm() < 1e-2);
        }
        let t = d.tangent_point();
        assert!((t.norm() - (PI / 5.0).sin()).abs() < 1e-15);
    }

    use proptest::prelude::*;

    proptest! {
        #[test]
        fn bar_finite_iff_angle_below_right(vals in prop::collection::vec((0.0f64..=1.0, 0.0f64..6.3), 1..10)) {
            let values: Vec<C64> = vals.iter().map(|&(r, t)| C64::from_polar(r, t)).collect();
            let sym = finite(values);
            let bar = bar_constant(&sym).unwrap();
            let ang = minimal_stolz_angle(&sym).unwrap();
            prop_assert_eq!(bar.holds, ang.gamma_star.is_some_and(|g| g < FRAC_PI_2));
        }

        #[test]
        fn unit_interval_symbols_have_ratio_one(vals in prop::collection::vec(0.0f64..=1.0, 1..10)) {
            let sym = finite(vals.iter().map(|&x| C64::new(x, 0.0)).collect());
            prop_assert!(bar_constant(&sym).unwrap().constant.unwrap() <= 1.0 + 1e-9);
        }

        #[test]
        fn point_angle_is_minimal(r in 0.0f64..0.999, t in 0.0f64..6.3) {
            let z = C64::from_polar(r, t);
            let a = point_angle(z).unwrap();
            prop_assert!(contains_closure(a + 1e-12, z));
            if a > 1e-9 {
                prop_assert!(!contains_closure(a - 1e-9, z));
            }
        }
    }
}
