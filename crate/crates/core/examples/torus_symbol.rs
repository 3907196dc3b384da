//! Symbol of a measure on the integers on a torus grid, with Lipschitz
//! error radius and a certified sup of `|nu_hat|` away from the grid.

use rittkit::{bar_constant, minimal_stolz_angle, ProbabilityMeasure};

fn main() -> rittkit::Result<()> {
    let nu = ProbabilityMeasure::on_integers(&[(-2, 0.1), (0, 0.6), (1, 0.3)])?;
    let symbol = nu.fourier_symbol(Some(1024))?;
    println!("grid points {}, error radius {:.3e}", symbol.values.len(), symbol.epsilon());
    let bar = bar_constant(&symbol)?;
    println!("BAR K on the grid {:?} ({})", bar.constant, bar.certificate.label());
    println!("gamma* on the grid {:?}", minimal_stolz_angle(&symbol)?.gamma_star);
    let re = nu.measure().certified_torus_extremum(|z| z.re, false, 1e-6)?;
    println!("min Re nu_hat in [{:.9}, {:.9}]", re.lower, re.upper);
    Ok(())
}
