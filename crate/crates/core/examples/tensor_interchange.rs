//! Products of convolutions against their tensor products on `G^n`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rittkit::tensor::random_family;
use rittkit::{interchange_identity_check, lemma_lem_check, tensor_extend, convolution_operator, operator_norm, Exponent, FiniteAbelianGroup, NormTag, ProbabilityMeasure, C64};

fn main() -> rittkit::Result<()> {
    let g = FiniteAbelianGroup::cyclic(3)?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let family = random_family(&mut rng, &g, 3, 2)?;
    let f: Vec<C64> = (0..6).map(|k| C64::new(k as f64, 1.0 - k as f64)).collect();
    let id = interchange_identity_check(&family, &g, &f, 2)?;
    println!("interchange identity: {} legs, {} terms, max deviation {:.2e}", id.legs, id.terms, id.max_deviation);
    for (p, q) in [(2.0, 2.0), (3.0, 1.0)] {
        let r = lemma_lem_check(&family, &g, Exponent::new(p)?, Exponent::new(q)?, 2)?;
        println!("p = {p}, q = {q}: product {:.6} vs tensor {:.6} ({:?})", r.lhs, r.rhs, r.status);
    }
    let nu = ProbabilityMeasure::from_group_weights(&g, &[0.2, 0.5, 0.3])?;
    let c = convolution_operator(nu.measure(), &g, &NormTag::lp(3.0, 3)?)?;
    let ext = tensor_extend(&c, Exponent::ONE, 4)?;
    println!("||C|| on l^3 = {:.6}; ||C (x) I|| on l^3(l^1_4) >= {:.6}", operator_norm(&c)?.value, operator_norm(&ext)?.value);
    Ok(())
}
