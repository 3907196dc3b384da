//! Average operators of a representation of `Z_8` against the convolution bound.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rittkit::representations::random_instance;
use rittkit::{powers_profile, transference_check, transference_trials, Exponent};

fn main() -> rittkit::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (pi, nu) = random_instance(&mut rng, 8, 3, Exponent::TWO)?;
    let r = transference_check(&pi, nu.measure(), Exponent::TWO)?;
    println!("||S(pi, nu)|| = {:.6} <= ||pi||^2 ||C_nu|| = {:.6} ({:?})", r.lhs, r.rhs, r.status);
    for row in powers_profile(&pi, nu.measure(), 6)? {
        println!("  n {}: n||S^n - S^(n-1)|| = {:.6} <= {:.6}", row.n, row.subordinated, row.convolution_scaled);
    }
    let trials = transference_trials(2024, 50, 8, 6, Exponent::TWO)?;
    let worst = trials.iter().map(|t| t.rhs - t.lhs).fold(f64::INFINITY, f64::min);
    println!("50 trials, all hold: {}, minimum slack {worst:.3e}", trials.iter().all(|t| t.holds));
    Ok(())
}
