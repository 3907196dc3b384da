use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::group::FiniteAbelianGroup;
use crate::linalg::{guard_dense, identity, kron, kron_all, MAX_DENSE_ENTRIES};
use crate::measures::{Carrier, Measure, ProbabilityMeasure};
use crate::norms::{compare, matrix_norm, CheckStatus, Certificate, Exponent, NormOptions, NormTag};
use crate::operators::convolution_operator;
use crate::{Error, Result, C64, Mat};

/// `family[j][i]` is the measure acting on leg `i` in term `j`.
pub type MeasureFamily = Vec<Vec<Measure>>;

const IDENTITY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterchangeReport {
    pub legs: usize,
    pub terms: usize,
    pub max_deviation: f64,
    pub holds: bool,
}

fn legs_of(family: &MeasureFamily, g: &FiniteAbelianGroup) -> Result<usize> {
    let n = family.first().map(Vec::len).unwrap_or(0);
    if n == 0 {
        return Err(Error::validation("measures", "family needs at least one term with at least one leg"));
    }
    for term in family {
        if term.len() != n {
            return Err(Error::validation("measures", "every term needs the same number of legs"));
        }
        for nu in term {
            match nu.carrier() {
                Carrier::Group(h) if h == g => {}
                other => return Err(Error::Structural(format!("measure carrier {other:?} is not the group {g}"))),
            }
        }
    }
    Ok(n)
}

fn vector_guard(order: usize, legs: usize, m: usize) -> Result<usize> {
    let required = (order as u128).saturating_pow(legs as u32).saturating_mul(m as u128);
    if required > MAX_DENSE_ENTRIES {
        return Err(Error::Guard { what: "tensor leg vector".into(), required, limit: MAX_DENSE_ENTRIES });
    }
    Ok(required as usize)
}

/// Convolution along leg `leg` of an `order^legs x m` array (leg 0 outermost).
fn convolve_leg(g: &FiniteAbelianGroup, w: &[C64], x: &[C64], leg: usize, legs: usize, m: usize) -> Vec<C64> {
    let order = g.order();
    let stride = order.pow((legs - 1 - leg) as u32) * m;
    let block = stride * order;
    let mut out = vec![C64::new(0.0, 0.0); x.len()];
    for base in (0..x.len()).step_by(block) {
        for s in 0..order {
            for t in 0..order {
                let c = w[g.difference_index(s, t)];
                if c == C64::new(0.0, 0.0) {
                    continue;
                }
                let (dst, src) = (base + s * stride, base + t * stride);
                for r in 0..stride {
                    out[dst + r] += c * x[src + r];
                }
            }
        }
    }
    out
}

/// Pointwise check of
/// `[sum_j (S_{nj} ... S_{1j} (x) I_X) f](s_1 + ... + s_n) = [sum_j (S_{nj} (x) ... (x) S_{1j} (x) I_X) F](s_1, ..., s_n)`
/// with `F(s_1, ..., s_n) = f(s_1 + ... + s_n)`; `f` has `|G| * m` entries, group-index major.
pub fn interchange_identity_check(family: &MeasureFamily, g: &FiniteAbelianGroup, f: &[C64], m: usize) -> Result<InterchangeReport> {
    let legs = legs_of(family, g)?;
    let order = g.order();
    if m == 0 || f.len() != order * m {
        return Err(Error::validation("f", format!("expected {} values", order * m)));
    }
    let len = vector_guard(order, legs, m)?;
    let add: Vec<Vec<usize>> = (0..order)
        .map(|a| (0..order).map(|b| g.index_of(&g.add(&g.element_at(a), &g.element_at(b)).expect("valid")).expect("valid")).collect())
        .collect();
    let sum_index = |mut k: usize| {
        let mut s = 0;
        for _ in 0..legs {
            s = add[s][k % order];
            k /= order;
        }
        s
    };
    let mut lhs = vec![C64::new(0.0, 0.0); order * m];
    let mut rhs = vec![C64::new(0.0, 0.0); len];
    let lifted: Vec<C64> = (0..len).map(|k| f[sum_index(k / m) * m + k % m]).collect();
    for term in family {
        let mut a = f.to_vec();
        let mut b = lifted.clone();
        for (leg, nu) in term.iter().enumerate() {
            let w = nu.dense_weights()?;
            a = convolve_leg(g, &w, &a, 0, 1, m);
            b = convolve_leg(g, &w, &b, leg, legs, m);
        }
        lhs.iter_mut().zip(a).for_each(|(x, y)| *x += y);
        rhs.iter_mut().zip(b).for_each(|(x, y)| *x += y);
    }
    let max_deviation = (0..len).map(|k| (rhs[k] - lhs[sum_index(k / m) * m + k % m]).norm()).fold(0.0, f64::max);
    Ok(InterchangeReport { legs, terms: family.len(), max_deviation, holds: max_deviation <= IDENTITY_TOL })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaRecord {
    /// `||sum_j S_{nj} ... S_{1j} (x) I_X||` on `L^p(G; X)`.
    pub lhs: f64,
    /// `||sum_j S_{nj} (x) ... (x) S_{1j} (x) I_X||` on `L^p(G^n; X)`.
    pub rhs: f64,
    pub lhs_certificate: Certificate,
    pub rhs_certificate: Certificate,
    pub holds: bool,
    pub status: CheckStatus,
}

/// Product-versus-tensor norm inequality for a measure family on `L^p(G; l^q_m)`.
pub fn lemma_lem_check(family: &MeasureFamily, g: &FiniteAbelianGroup, p: Exponent, q: Exponent, m: usize) -> Result<LemmaRecord> {
    let legs = legs_of(family, g)?;
    let order = g.order();
    let big = vector_guard(order, legs, m)?;
    guard_dense("tensor leg operator", big as u128)?;
    let scalar = NormTag::l2(order);
    let mut product_sum = Mat::zeros(order, order);
    let mut tensor_sum = Mat::zeros(big / m, big / m);
    for term in family {
        let mats: Vec<Mat> = term.iter().map(|nu| Ok(convolution_operator(nu, g, &scalar)?.matrix().clone())).collect::<Result<_>>()?;
        product_sum += mats.iter().fold(identity(order), |acc, c| c * acc);
        tensor_sum += kron_all(&mats.iter().collect::<Vec<_>>());
    }
    let im = identity(m);
    let opts = NormOptions::default();
    let lhs = matrix_norm(&kron(&product_sum, &im), &NormTag::Mixed { p, outer: order, q, inner: m }, &opts)?;
    let rhs = matrix_norm(&kron(&tensor_sum, &im), &NormTag::Mixed { p, outer: big / m, q, inner: m }, &opts)?;
    Ok(LemmaRecord {
        lhs: lhs.value,
        rhs: rhs.value,
        lhs_certificate: lhs.certificate,
        rhs_certificate: rhs.certificate,
        holds: lhs.value <= rhs.value + 1e-9,
        status: compare(lhs, rhs, 1e-9),
    })
}

/// Random family of probability measures, `terms x legs`.
pub fn random_family(rng: &mut impl Rng, g: &FiniteAbelianGroup, legs: usize, terms: usize) -> Result<MeasureFamily> {
    (0..terms)
        .map(|_| {
            (0..legs)
                .map(|_| {
                    let w: Vec<f64> = (0..g.order()).map(|_| rng.random::<f64>()).collect();
                    Ok(ProbabilityMeasure::from_group_weights(g, &w)?.into_measure())
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_f(rng: &mut impl Rng, len: usize) -> Vec<C64> {
        (0..len).map(|_| C64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0)).collect()
    }

    #[test]
    fn dirac_family_is_identity() {
        let g = FiniteAbelianGroup::cyclic(3).unwrap();
        let d0 = ProbabilityMeasure::dirac_at(&g, &[0]).unwrap().into_measure();
        let fam = vec![vec![d0.clone(), d0.clone()]];
        let f = vec![C64::new(1.0, 0.0), C64::new(-2.0, 0.5), C64::new(0.0, 3.0)];
        let r = interchange_identity_check(&fam, &g, &f, 1).unwrap();
        assert!(r.holds && r.max_deviation == 0.0);
        let lem = lemma_lem_check(&fam, &g, Exponent::TWO, Exponent::TWO, 1).unwrap();
        assert!((lem.lhs - 1.0).abs() < 1e-14 && (lem.rhs - 1.0).abs() < 1e-14);
        assert_eq!(lem.status, CheckStatus::Holds);
    }

    #[test]
    fn random_identity_corpus() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (order, legs, m) in [(3, 2, 1), (2, 3, 1), (3, 3, 2), (2, 2, 2)] {
            let g = FiniteAbelianGroup::cyclic(order).unwrap();
            for terms in 1..=3 {
                let fam = random_family(&mut rng, &g, legs, terms).unwrap();
                let f = random_f(&mut rng, order * m);
                let r = interchange_identity_check(&fam, &g, &f, m).unwrap();
                assert!(r.holds, "{r:?}");
            }
        }
    }

    #[test]
    fn identity_detects_a_wrong_lift() {
        // Mixing carriers is rejected before any arithmetic.
        let g = FiniteAbelianGroup::cyclic(3).unwrap();
        let h = FiniteAbelianGroup::cyclic(2).unwrap();
        let fam = vec![vec![ProbabilityMeasure::uniform(&h).unwrap().into_measure()]];
        assert!(interchange_identity_check(&fam, &g, &[C64::new(1.0, 0.0); 3], 1).is_err());
    }

    #[test]
    fn lemma_holds_at_two() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = FiniteAbelianGroup::cyclic(3).unwrap();
        for _ in 0..10 {
            let fam = random_family(&mut rng, &g, 2, 2).unwrap();
            let r = lemma_lem_check(&fam, &g, Exponent::TWO, Exponent::TWO, 2).unwrap();
            assert!(r.holds && r.status == CheckStatus::Holds, "{r:?}");
        }
    }

    #[test]
    fn dirac_families_are_permutations() {
        // delta_1 on both legs of Z_3: product is a shift by 2 (norm 1), tensor is a permutation (norm 1).
        let g = FiniteAbelianGroup::cyclic(3).unwrap();
        let d = |k| ProbabilityMeasure::dirac_at(&g, &[k]).unwrap().into_measure();
        let one = lemma_lem_check(&vec![vec![d(1), d(1)]], &g, Exponent::TWO, Exponent::TWO, 1).unwrap();
        assert!((one.lhs - 1.0).abs() < 1e-12 && (one.rhs - 1.0).abs() < 1e-12);
        // Two terms with equal products but different tensors: lhs = 2, rhs = ||P + P'|| < 2.
        let two = lemma_lem_check(&vec![vec![d(1), d(2)], vec![d(0), d(0)]], &g, Exponent::TWO, Exponent::TWO, 1).unwrap();
        assert!((two.lhs - 2.0).abs() < 1e-12 && (two.rhs - 2.0).abs() < 1e-12);
        let three = lemma_lem_check(&vec![vec![d(1), d(2)], vec![d(2), d(1)]], &g, Exponent::TWO, Exponent::TWO, 1).unwrap();
        assert!((three.lhs - 2.0).abs() < 1e-12 && three.rhs <= 2.0 + 1e-12 && three.holds);
    }
}
