//! Regular-norm and K-convexity growth probes.

use rittkit::tensor::kconvexity_sweep;
use rittkit::{regular_norm_lower, LinearOperator, NormOptions, NormTag, Exponent};

fn main() -> rittkit::Result<()> {
    let rotation = LinearOperator::from_real_rows(&[&[0.5, -0.5], &[0.5, 0.5]])?.on_space(NormTag::lp(3.0, 2)?)?;
    let opts = NormOptions { seed: 9, ..NormOptions::default() };
    println!("||T (x) I_(l^inf_n)|| on l^3, lower bounds:");
    for row in regular_norm_lower(&rotation, 5, &opts)? {
        println!("  n {}: {:.6} ({})", row.index, row.value, row.certificate.label());
    }
    println!("Rademacher projection on L^2(l^1_m), N = 4:");
    for row in kconvexity_sweep(Exponent::ONE, &[1, 2, 4, 8], 4, &opts)? {
        println!("  m {}: {:.6} ({})", row.index, row.value, row.certificate.label());
    }
    Ok(())
}
