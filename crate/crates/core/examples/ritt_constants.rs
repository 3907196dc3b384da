//! Power bounds, Ritt constants, resolvent and sectorial constants for
//! convolution operators and a non-normal matrix.

use rittkit::operators::{sectorial_constant, ContourSpec};
use rittkit::{convolution_operator, resolvent_constant, ritt_constants, ritt_from_square_check, FiniteAbelianGroup, LinearOperator, NormTag, ProbabilityMeasure};

fn main() -> rittkit::Result<()> {
    let g = FiniteAbelianGroup::cyclic(16)?;
    let mut w = vec![0.0; 16];
    (w[0], w[1], w[15]) = (0.5, 0.25, 0.25);
    let lazy = ProbabilityMeasure::from_group_weights(&g, &w)?;
    let t = convolution_operator(lazy.measure(), &g, &NormTag::l2(16))?;
    let r = ritt_constants(&t, 256)?;
    println!("lazy walk on Z_16: c0 {:.6}, c1 {:.6}, {} (tail certified {})", r.c0, r.c1, r.verdict.label(), r.tail_certified);

    let shift = ProbabilityMeasure::dirac_at(&g, &[1])?;
    let s = ritt_constants(&convolution_operator(shift.measure(), &g, &NormTag::l2(16))?, 64)?;
    println!("shift on Z_16: {} with witness {:?}", s.verdict.label(), s.witness);

    let jordan = LinearOperator::from_real_rows(&[&[0.5, 1.0], &[0.0, 0.5]])?;
    let j = ritt_constants(&jordan, 128)?;
    println!("Jordan block: c0 {:.6}, c1 {:.6}, {}", j.c0, j.c1, j.verdict.label());
    let k = resolvent_constant(&jordan, &ContourSpec::default())?;
    println!("  resolvent K >= {:.6} at z = {:.4}", k.k, k.argmax);
    let a = sectorial_constant(&jordan.complement(), 1.2)?;
    println!("  I - T sectorial: angle {:.4}, K >= {:.6}", a.threshold_angle, a.k);
    let sq = ritt_from_square_check(&jordan, 32)?;
    println!("  c1(T) = {:.6} <= bound from T^2: {:.6}", sq.c1_t, sq.derived_bound);
    Ok(())
}
