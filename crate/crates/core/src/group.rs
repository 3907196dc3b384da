//! Finite abelian groups `Z_{N1} x ... x Z_{Nd}` and their characters.
//!
//! The dual of a finite product of cyclic groups is identified with the group
//! itself: `xi = (xi_1, ..., xi_d)` acts by
//! `chi_xi(t) = exp(2 pi i sum_j t_j xi_j / N_j)` (positive-sign convention).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::linalg::unit_root;
use crate::{Error, Result, C64};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct FiniteAbelianGroup {
    factors: Vec<usize>,
}

/// Reduced coordinates of a group element.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GroupElement(pub Vec<usize>);

/// Reduced coordinates of a character.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DualIndex(pub Vec<usize>);

impl TryFrom<Vec<usize>> for FiniteAbelianGroup {
    type Error = Error;
    fn try_from(factors: Vec<usize>) -> Result<Self> {
        Self::new(factors)
    }
}

impl From<FiniteAbelianGroup> for Vec<usize> {
    fn from(g: FiniteAbelianGroup) -> Self {
        g.factors
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|n| format!("Z_{n}")).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

impl FiniteAbelianGroup {
    pub fn new(factors: Vec<usize>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::validation("group", "at least one cyclic factor is required"));
        }
        if let Some(bad) = factors.iter().find(|&&n| n == 0) {
            return Err(Error::validation("group", format!("cyclic order {bad} must be >= 1")));
        }
        factors
            .iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n))
            .ok_or_else(|| Error::validation("group", "group order overflows usize"))?;
        Ok(FiniteAbelianGroup { factors })
    }

    pub fn cyclic(n: usize) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> usize {
        self.factors.iter().product()
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement(vec![0; self.rank()])
    }

    /// Builds an element from arbitrary integer coordinates, reducing modulo each factor.
    pub fn element(&self, coords: &[i64]) -> Result<GroupElement> {
        self.check_len(coords.len())?;
        Ok(GroupElement(
            coords.iter().zip(&self.factors).map(|(&k, &n)| k.rem_euclid(n as i64) as usize).collect(),
        ))
    }

    pub fn dual(&self, coords: &[i64]) -> Result<DualIndex> {
        Ok(DualIndex(self.element(coords)?.0))
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.rank() {
            return Err(Error::Structural(format!(
                "element with {len} coordinates does not belong to {self} (rank {})",
                self.rank()
            )));
        }
        Ok(())
    }

    fn check(&self, g: &[usize]) -> Result<()> {
        self.check_len(g.len())?;
        if let Some((k, n)) = g.iter().zip(&self.factors).find(|(k, n)| **k >= **n) {
            return Err(Error::Structural(format!("coordinate {k} is not reduced modulo {n}")));
        }
        Ok(())
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.check(&g.0).is_ok()
    }

    pub fn add(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.check(&g.0)?;
        self.check(&h.0)?;
        Ok(GroupElement(
            g.0.iter().zip(&h.0).zip(&self.factors).map(|((a, b), n)| (a + b) % n).collect(),
        ))
    }

    pub fn neg(&self, g: &GroupElement) -> Result<GroupElement> {
        self.check(&g.0)?;
        Ok(GroupElement(g.0.iter().zip(&self.factors).map(|(a, n)| (n - a) % n).collect()))
    }

    pub fn sub(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.add(g, &self.neg(h)?)
    }

    /// Mixed-radix index, last factor varying fastest.
    pub fn index_of(&self, g: &GroupElement) -> Result<usize> {
        self.check(&g.0)?;
        Ok(g.0.iter().zip(&self.factors).fold(0, |acc, (k, n)| acc * n + k))
    }

    pub fn element_at(&self, mut index: usize) -> GroupElement {
        let mut coords = vec![0; self.rank()];
        for (slot, n) in coords.iter_mut().zip(&self.factors).rev() {
            *slot = index % n;
            index /= n;
        }
        GroupElement(coords)
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order()).map(move |i| self.element_at(i))
    }

    /// Index of `g - h`, the kernel entry of a convolution matrix.
    pub(crate) fn difference_index(&self, gi: usize, hi: usize) -> usize {
        let g = self.element_at(gi);
        let h = self.element_at(hi);
        let d: Vec<usize> = g.0.iter().zip(&h.0).zip(&self.factors).map(|((a, b), n)| (a + n - b) % n).collect();
        d.iter().zip(&self.factors).fold(0, |acc, (k, n)| acc * n + k)
    }

    /// Direct product `self^legs`.
    pub fn power(&self, legs: usize) -> Result<FiniteAbelianGroup> {
        let mut factors = Vec::with_capacity(self.rank() * legs);
        for _ in 0..legs {
            factors.extend_from_slice(&self.factors);
        }
        Self::new(factors)
    }

    /// `exp(2 pi i sum_j t_j xi_j / N_j)`.
    pub fn character(&self, xi: &DualIndex, t: &GroupElement) -> Result<C64> {
        self.check(&xi.0)?;
        self.check(&t.0)?;
        Ok(self.character_unchecked(&xi.0, &t.0))
    }

    pub(crate) fn character_unchecked(&self, xi: &[usize], t: &[usize]) -> C64 {
        // Common denominator L = lcm(N_j) keeps the phase an exact fraction.
        let l = self.factors.iter().fold(1u64, |acc, &n| lcm(acc, n as u64));
        let num = xi.iter().zip(t).zip(&self.factors).fold(0u64, |acc, ((&x, &k), &n)| {
            let term = ((x as u64 * k as u64) % n as u64) * (l / n as u64);
            (acc + term) % l
        });
        unit_root(num, l)
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}
