//! Finitely supported measures on a finite abelian group or on the integers.
//!
//! Signed and complex measures are first-class: polynomial push-forwards leave
//! the probability simplex. [`ProbabilityMeasure`] is a checked refinement.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::funcalc::Polynomial;
use crate::group::{FiniteAbelianGroup, GroupElement};
use crate::linalg::unit_root;
use crate::norms::Certificate;
use crate::{Error, Result, C64};

/// Tolerance for `sum of weights = 1`.
pub const MASS_TOL: f64 = 1e-12;
/// Mass drift above which a renormalized probability measure is flagged.
pub const DRIFT_FLAG: f64 = 1e-9;
pub const MIN_GRID: usize = 64;
pub const DEFAULT_GRID: usize = 4096;
pub const MAX_GRID: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Carrier {
    Group(FiniteAbelianGroup),
    Integers,
}

impl Carrier {
    fn check_point(&self, point: &Point) -> Result<Point> {
        match (self, point) {
            (Carrier::Group(g), Point::Element(e)) => {
                if g.contains(e) {
                    Ok(point.clone())
                } else {
                    Err(Error::Structural(format!("{:?} is not an element of {g}", e.0)))
                }
            }
            (Carrier::Integers, Point::Integer(_)) => Ok(point.clone()),
            (c, p) => Err(Error::Structural(format!("point {p:?} does not live on carrier {c:?}"))),
        }
    }

    fn add(&self, a: &Point, b: &Point) -> Result<Point> {
        match (self, a, b) {
            (Carrier::Group(g), Point::Element(x), Point::Element(y)) => Ok(Point::Element(g.add(x, y)?)),
            (Carrier::Integers, Point::Integer(x), Point::Integer(y)) => Ok(Point::Integer(x + y)),
            _ => Err(Error::Structural("points on different carriers".into())),
        }
    }

    fn neg(&self, a: &Point) -> Result<Point> {
        match (self, a) {
            (Carrier::Group(g), Point::Element(x)) => Ok(Point::Element(g.neg(x)?)),
            (Carrier::Integers, Point::Integer(x)) => Ok(Point::Integer(-x)),
            _ => Err(Error::Structural("point does not live on this carrier".into())),
        }
    }

    pub fn zero(&self) -> Point {
        match self {
            Carrier::Group(g) => Point::Element(g.zero()),
            Carrier::Integers => Point::Integer(0),
        }
    }
}

/// A support point: a group element or an integer.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Point {
    Element(GroupElement),
    Integer(i64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Measure {
    carrier: Carrier,
    atoms: BTreeMap<Point, C64>,
}

impl Measure {
    /// Merges repeated points and drops exact zeros.
    pub fn new(carrier: Carrier, atoms: impl IntoIterator<Item = (Point, C64)>) -> Result<Self> {
        let mut map: BTreeMap<Point, C64> = BTreeMap::new();
        for (p, w) in atoms {
            if !(w.re.is_finite() && w.im.is_finite()) {
                return Err(Error::validation("measure.atoms", format!("weight {w} is not finite")));
            }
            let p = carrier.check_point(&p)?;
            *map.entry(p).or_insert(C64::new(0.0, 0.0)) += w;
        }
        map.retain(|_, w| w.norm() != 0.0);
        Ok(Measure { carrier, atoms: map })
    }

    pub fn zero(carrier: Carrier) -> Self {
        Measure { carrier, atoms: BTreeMap::new() }
    }

    pub fn dirac(carrier: Carrier, point: Point) -> Result<Self> {
        Self::new(carrier, [(point, C64::new(1.0, 0.0))])
    }

    /// Weights listed in group index order (see [`FiniteAbelianGroup::element_at`]).
    pub fn on_group(group: &FiniteAbelianGroup, weights: &[C64]) -> Result<Self> {
        if weights.len() != group.order() {
            return Err(Error::Structural(format!(
                "{} weights for a group of order {}",
                weights.len(),
                group.order()
            )));
        }
        Self::new(
            Carrier::Group(group.clone()),
            weights.iter().enumerate().map(|(i, &w)| (Point::Element(group.element_at(i)), w)),
        )
    }

    pub fn on_integers(atoms: &[(i64, f64)]) -> Result<Self> {
        Self::new(Carrier::Integers, atoms.iter().map(|&(k, w)| (Point::Integer(k), C64::new(w, 0.0))))
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn group(&self) -> Option<&FiniteAbelianGroup> {
        match &self.carrier {
            Carrier::Group(g) => Some(g),
            Carrier::Integers => None,
        }
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&Point, &C64)> {
        self.atoms.iter()
    }

    pub fn weight(&self, p: &Point) -> C64 {
        self.atoms.get(p).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn support_len(&self) -> usize {
        self.atoms.len()
    }

    /// Dense weights in group index order.
    pub fn dense_weights(&self) -> Result<Vec<C64>> {
        let g = self.group().ok_or_else(|| Error::Structural("integer measures have no dense weight vector".into()))?;
        let mut w = vec![C64::new(0.0, 0.0); g.order()];
        for (p, &v) in &self.atoms {
            if let Point::Element(e) = p {
                w[g.index_of(e)?] += v;
            }
        }
        Ok(w)
    }

    pub fn total_variation(&self) -> f64 {
        self.atoms.values().map(|w| w.norm()).sum()
    }

    pub fn total_mass(&self) -> C64 {
        self.atoms.values().sum()
    }

    fn same_carrier(&self, other: &Measure) -> Result<()> {
        if self.carrier != other.carrier {
            return Err(Error::Structural(format!(
                "carrier mismatch: {:?} vs {:?}",
                self.carrier, other.carrier
            )));
        }
        Ok(())
    }

    pub fn convolve(&self, other: &Measure) -> Result<Measure> {
        self.same_carrier(other)?;
        let mut atoms = Vec::with_capacity(self.atoms.len() * other.atoms.len());
        for (a, wa) in &self.atoms {
            for (b, wb) in &other.atoms {
                atoms.push((self.carrier.add(a, b)?, wa * wb));
            }
        }
        Measure::new(self.carrier.clone(), atoms)
    }

    /// `nu o (-1)`: the image under `t -> -t`.
    pub fn reflect(&self) -> Measure {
        let atoms = self.atoms.iter().map(|(p, &w)| (self.carrier.neg(p).expect("carrier checked"), w));
        Measure::new(self.carrier.clone(), atoms).expect("reflection preserves the carrier")
    }

    pub fn add(&self, other: &Measure) -> Result<Measure> {
        self.same_carrier(other)?;
        Measure::new(self.carrier.clone(), self.atoms.iter().chain(other.atoms.iter()).map(|(p, w)| (p.clone(), *w)))
    }

    pub fn scale(&self, c: C64) -> Measure {
        Measure::new(self.carrier.clone(), self.atoms.iter().map(|(p, w)| (p.clone(), w * c))).expect("same carrier")
    }

    /// Drops atoms with `|w| <= eps`.
    pub fn pruned(&self, eps: f64) -> Measure {
        let mut m = self.clone();
        m.atoms.retain(|_, w| w.norm() > eps);
        m
    }

    /// `max |nu({t}) - nu({-t})|`.
    pub fn asymmetry(&self) -> f64 {
        let r = self.reflect();
        self.atoms
            .keys()
            .chain(r.atoms.keys())
            .map(|p| (self.weight(p) - r.weight(p)).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_symmetric(&self) -> bool {
        self.asymmetry() <= MASS_TOL
    }

    /// Sum of `|k| |c_k|`: a Lipschitz constant (per radian) of the torus symbol.
    pub fn torus_lipschitz(&self) -> Option<f64> {
        match self.carrier {
            Carrier::Integers => Some(
                self.atoms
                    .iter()
                    .map(|(p, w)| match p {
                        Point::Integer(k) => k.unsigned_abs() as f64 * w.norm(),
                        Point::Element(_) => 0.0,
                    })
                    .sum(),
            ),
            Carrier::Group(_) => None,
        }
    }

    /// `sum_k c_k e^{i k theta}` at an arbitrary angle (integer carrier only).
    pub fn torus_value(&self, theta: f64) -> C64 {
        self.atoms
            .iter()
            .map(|(p, w)| match p {
                Point::Integer(k) => w * C64::from_polar(1.0, *k as f64 * theta),
                Point::Element(_) => C64::new(0.0, 0.0),
            })
            .sum()
    }

    /// Fourier symbol. Finite carriers enumerate the whole dual; the integer
    /// carrier is sampled at `theta_j = 2 pi j / M` (default `M = 4096`, `M >= 64`).
    pub fn fourier_symbol(&self, resolution: Option<usize>) -> Result<Symbol> {
        match &self.carrier {
            Carrier::Group(g) => {
                let weights = self.dense_weights()?;
                let values = (0..g.order())
                    .map(|xi| {
                        let xi = g.element_at(xi);
                        weights
                            .iter()
                            .enumerate()
                            .filter(|(_, w)| w.norm() != 0.0)
                            .map(|(t, w)| w * g.character_unchecked(&xi.0, &g.element_at(t).0))
                            .sum()
                    })
                    .collect();
                Ok(Symbol { domain: SymbolDomain::FiniteDual(g.clone()), values: self.realify(values) })
            }
            Carrier::Integers => {
                let m = resolution.unwrap_or(DEFAULT_GRID);
                if m < MIN_GRID {
                    return Err(Error::Config(format!("torus grid size {m} is below the minimum {MIN_GRID}")));
                }
                if m > MAX_GRID {
                    return Err(Error::Config(format!("torus grid size {m} exceeds the cap {MAX_GRID}")));
                }
                let values = (0..m)
                    .map(|j| {
                        self.atoms
                            .iter()
                            .map(|(p, w)| match p {
                                Point::Integer(k) => {
                                    let r = (*k as i128 * j as i128).rem_euclid(m as i128) as u64;
                                    w * unit_root(r, m as u64)
                                }
                                Point::Element(_) => C64::new(0.0, 0.0),
                            })
                            .sum()
                    })
                    .collect();
                let lipschitz_bound = self.torus_lipschitz().unwrap_or(0.0);
                Ok(Symbol { domain: SymbolDomain::TorusGrid { points: m, lipschitz_bound }, values: self.realify(values) })
            }
        }
    }

    /// Exactly symmetric real measures have real symbols; drops rounding residue.
    fn realify(&self, mut values: Vec<C64>) -> Vec<C64> {
        if self.atoms.values().all(|w| w.im == 0.0) && self.asymmetry() == 0.0 {
            values.iter_mut().for_each(|z| z.im = 0.0);
        }
        values
    }

    /// Certified extremum of `f(nu_hat(theta))` over the whole circle, for a
    /// 1-Lipschitz `f: C -> R` (e.g. modulus, real part).
    ///
    /// Starts from the default grid and refines cells by 4 wherever the
    /// Lipschitz bound still allows a better value, until the bracket is
    /// narrower than `tol` or the resolution reaches `2^20`.
    pub fn certified_torus_extremum(&self, f: impl Fn(C64) -> f64, maximize: bool, tol: f64) -> Result<CertifiedRange> {
        let lip = self.torus_lipschitz().ok_or_else(|| Error::Structural("torus extrema need an integer carrier".into()))?;
        let sign = if maximize { 1.0 } else { -1.0 };
        let g = |theta: f64| sign * f(self.torus_value(theta));
        let mut half = std::f64::consts::PI / DEFAULT_GRID as f64;
        let mut cells: Vec<(f64, f64)> = (0..DEFAULT_GRID)
            .map(|j| {
                let c = std::f64::consts::TAU * j as f64 / DEFAULT_GRID as f64;
                (c, g(c))
            })
            .collect();
        let mut resolution = DEFAULT_GRID;
        loop {
            let best = cells.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
            let argbest = cells.iter().find(|c| c.1 == best).map(|c| c.0).unwrap_or(0.0);
            let upper = cells.iter().map(|c| c.1 + lip * half).fold(f64::NEG_INFINITY, f64::max);
            if upper - best <= tol || resolution >= MAX_GRID {
                let (lo, hi) = if maximize { (best, upper) } else { (-upper, -best) };
                return Ok(CertifiedRange { lower: lo, upper: hi, argument: argbest, resolution });
            }
            let keep: Vec<f64> = cells.iter().filter(|c| c.1 + lip * half > best).map(|c| c.0).collect();
            let sub = half / 2.0;
            let mut next = Vec::with_capacity(keep.len() * 4);
            for c in keep {
                for k in 0..4 {
                    let cc = c - half + sub * (2 * k + 1) as f64;
                    next.push((cc, g(cc)));
                }
            }
            half = half / 4.0;
            resolution *= 4;
            // Keep the incumbent so the best value never regresses.
            next.push((argbest, best));
            cells = next;
        }
    }
}

/// Two-sided enclosure of a sup or inf over the circle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifiedRange {
    pub lower: f64,
    pub upper: f64,
    /// Angle where the extremal sample was seen.
    pub argument: f64,
    /// Effective grid resolution `2 pi / (cell width)` at termination.
    pub resolution: usize,
}

/// A probability measure: nonnegative real weights with total mass one.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityMeasure {
    measure: Measure,
    renormalized: bool,
}

impl ProbabilityMeasure {
    /// Checks the probability conditions; a mass drift beyond `1e-12` is
    /// corrected by renormalization and flagged when it exceeds `1e-9`.
    pub fn new(measure: Measure) -> Result<Self> {
        for (p, w) in measure.atoms() {
            if w.im != 0.0 || w.re < 0.0 {
                return Err(Error::validation("measure.atoms", format!("weight {w} at {p:?} is not a nonnegative real")));
            }
        }
        let mass = measure.total_mass().re;
        if mass <= 0.0 {
            return Err(Error::validation("measure.atoms", "total mass is zero"));
        }
        let drift = (mass - 1.0).abs();
        if drift <= MASS_TOL {
            return Ok(ProbabilityMeasure { measure, renormalized: false });
        }
        let measure = measure.scale(C64::new(1.0 / mass, 0.0));
        Ok(ProbabilityMeasure { measure, renormalized: drift > DRIFT_FLAG })
    }

    pub fn from_group_weights(group: &FiniteAbelianGroup, weights: &[f64]) -> Result<Self> {
        let w: Vec<C64> = weights.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::new(Measure::on_group(group, &w)?)
    }

    pub fn on_integers(atoms: &[(i64, f64)]) -> Result<Self> {
        Self::new(Measure::on_integers(atoms)?)
    }

    pub fn dirac(carrier: Carrier, point: Point) -> Result<Self> {
        Self::new(Measure::dirac(carrier, point)?)
    }

    pub fn uniform(group: &FiniteAbelianGroup) -> Result<Self> {
        Self::from_group_weights(group, &vec![1.0; group.order()])
    }

    /// `delta_t` on a group, `t` given by reduced coordinates.
    pub fn dirac_at(group: &FiniteAbelianGroup, coords: &[i64]) -> Result<Self> {
        Self::dirac(Carrier::Group(group.clone()), Point::Element(group.element(coords)?))
    }

    pub fn measure(&self) -> &Measure {
        &self.measure
    }

    pub fn into_measure(self) -> Measure {
        self.measure
    }

    /// Whether construction had to renormalize a mass drift above `1e-9`.
    pub fn was_renormalized(&self) -> bool {
        self.renormalized
    }

    pub fn convolve(&self, other: &ProbabilityMeasure) -> Result<ProbabilityMeasure> {
        ProbabilityMeasure::new(self.measure.convolve(&other.measure)?)
    }

    pub fn is_symmetric(&self) -> bool {
        self.measure.is_symmetric()
    }

    /// `(nu + nu o (-1)) / 2`.
    pub fn symmetrize(&self) -> ProbabilityMeasure {
        let m = self.measure.add(&self.measure.reflect()).expect("same carrier").scale(C64::new(0.5, 0.0));
        ProbabilityMeasure::new(m).expect("average of probability measures")
    }

    /// `eta * eta` for a symmetric `eta`.
    pub fn square(&self) -> Result<ProbabilityMeasure> {
        let asym = self.measure.asymmetry();
        if asym > MASS_TOL {
            return Err(Error::Precondition(format!(
                "square structure needs a symmetric measure; max |eta(t) - eta(-t)| = {asym:.3e}"
            )));
        }
        self.convolve(self)
    }

    pub fn fourier_symbol(&self, resolution: Option<usize>) -> Result<Symbol> {
        self.measure.fourier_symbol(resolution)
    }
}

impl AsRef<Measure> for ProbabilityMeasure {
    fn as_ref(&self) -> &Measure {
        &self.measure
    }
}

/// `nu_phi = sum_j a_j nu^{*j}` with `nu^{*0} = delta_0`.
pub fn polynomial_push(phi: &Polynomial, nu: &Measure) -> Result<Measure> {
    let carrier = nu.carrier().clone();
    let unit = Measure::dirac(carrier.clone(), carrier.zero())?;
    let coeffs = phi.coefficients();
    if coeffs.is_empty() {
        return Ok(Measure::zero(carrier));
    }
    // Horner in the convolution algebra.
    let mut acc = unit.scale(coeffs[coeffs.len() - 1]);
    for &a in coeffs.iter().rev().skip(1) {
        acc = acc.convolve(nu)?.add(&unit.scale(a))?;
    }
    let scale: f64 = coeffs.iter().map(|a| a.norm()).sum::<f64>() * nu.total_variation().max(1.0).powi(phi.degree() as i32);
    Ok(acc.pruned(1e-15 * scale))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "spec", rename_all = "kebab-case")]
pub enum SymbolDomain {
    /// Values indexed by the dual group, in group index order.
    FiniteDual(FiniteAbelianGroup),
    /// Values at `theta_j = 2 pi j / points`.
    TorusGrid { points: usize, lipschitz_bound: f64 },
}

/// Fourier transform values of a measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Symbol {
    pub domain: SymbolDomain,
    pub values: Vec<C64>,
}

impl Symbol {
    /// Symbol given directly by its values on a finite dual.
    pub fn finite(group: &FiniteAbelianGroup, values: Vec<C64>) -> Result<Symbol> {
        if values.len() != group.order() {
            return Err(Error::Structural("symbol length does not match the dual group".into()));
        }
        Ok(Symbol { domain: SymbolDomain::FiniteDual(group.clone()), values })
    }

    /// Error radius of grid values against the continuum: `L pi / M`.
    pub fn epsilon(&self) -> f64 {
        match self.domain {
            SymbolDomain::FiniteDual(_) => 0.0,
            SymbolDomain::TorusGrid { points, lipschitz_bound } => lipschitz_bound * std::f64::consts::PI / points as f64,
        }
    }

    pub fn certificate(&self) -> Certificate {
        match self.domain {
            SymbolDomain::FiniteDual(_) => Certificate::ExactFinite,
            SymbolDomain::TorusGrid { .. } => Certificate::GridWithEps { eps: self.epsilon() },
        }
    }

    /// Human-readable location of sample `i` (dual coordinates or grid angle).
    pub fn location(&self, i: usize) -> String {
        match &self.domain {
            SymbolDomain::FiniteDual(g) => format!("{:?}", g.element_at(i).0),
            SymbolDomain::TorusGrid { points, .. } => format!("theta={:.12}", std::f64::consts::TAU * i as f64 / *points as f64),
        }
    }

    pub fn max_modulus(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.values.iter().all(|z| z.im.abs() <= tol)
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Symbol {
        Symbol { domain: self.domain.clone(), values: self.values.iter().map(|&z| f(z)).collect() }
    }
}
