//! Polynomial functional calculus ratios `||phi(T)|| / sup_{B_gamma} |phi|`.

use std::f64::consts::PI;

use rittkit::{hinf_ratio, sup_on_stolz, FamilySpec, LinearOperator, Polynomial};

fn main() -> rittkit::Result<()> {
    let phi = Polynomial::phi(10);
    let sup = sup_on_stolz(&phi, PI / 4.0, 2)?;
    println!("sup of |phi_10| on B_(pi/4): {:.9} (upper bound {:.9})", sup.value, sup.upper_bound);

    let t = LinearOperator::from_real_rows(&[&[0.5, 1.0], &[0.0, 0.5]])?;
    let family = FamilySpec { random_draws: 64, ..FamilySpec::default() };
    for gamma in [PI / 6.0, PI / 4.0, PI / 3.0] {
        let r = hinf_ratio(&t, gamma, &family, 42)?;
        println!(
            "gamma {gamma:.4}: best ratio {:.6} from {} ({} polynomials), certified >= {:.6}",
            r.ratio, r.witness_label, r.family_size, r.certified_lower_bound
        );
    }
    Ok(())
}
