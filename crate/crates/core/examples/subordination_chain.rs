//! The chain `n||(T^n - T^(n-1)) (x) I|| <= mid <= rhs` for `T = C_(eta * eta)`.

use rittkit::{subordination_chain_check, Exponent, FiniteAbelianGroup, ProbabilityMeasure};

fn main() -> rittkit::Result<()> {
    let g = FiniteAbelianGroup::cyclic(3)?;
    let eta = ProbabilityMeasure::from_group_weights(&g, &[0.5, 0.25, 0.25])?;
    for (q, m, nmax) in [(2.0, 1, 3), (1.0, 2, 2)] {
        let table = subordination_chain_check(&eta, &g, Exponent::TWO, Exponent::new(q)?, m, nmax)?;
        println!("X = l^{q}_{m}, path space {} points", table.path_space_size);
        for r in &table.rows {
            println!(
                "  n {}: {:.6} <= {:.6} <= {:.6} ({:?}, residual {:.1e})",
                r.n, r.lhs, r.mid, r.rhs, r.status, r.factorization_residual
            );
        }
    }
    Ok(())
}
