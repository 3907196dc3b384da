//! Fourier symbols, BAR constants and minimal Stolz angles for a few measures on `Z_N`.

use rittkit::{bar_constant, minimal_stolz_angle, FiniteAbelianGroup, ProbabilityMeasure};

fn main() -> rittkit::Result<()> {
    let g = FiniteAbelianGroup::cyclic(8)?;
    let cases = [
        ("coin on Z_8 (lazy step)", vec![0.5, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
        ("symmetric walk", vec![0.5, 0.25, 0.0, 0.0, 0.0, 0.0, 0.0, 0.25]),
        ("non-lazy walk", vec![0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5]),
        ("shift", vec![0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
    ];
    for (name, w) in cases {
        let nu = ProbabilityMeasure::from_group_weights(&g, &w)?;
        let symbol = nu.fourier_symbol(None)?;
        let bar = bar_constant(&symbol)?;
        let angle = minimal_stolz_angle(&symbol)?;
        println!("{name}");
        println!("  symbol     {:?}", symbol.values.iter().map(|z| format!("{:.4}{:+.4}i", z.re, z.im)).collect::<Vec<_>>());
        println!("  BAR K      {:?} (witnesses {:?})", bar.constant, bar.witnesses);
        println!("  gamma*     {:?} ({})", angle.gamma_star, angle.certificate.label());
    }
    Ok(())
}
