//! Rota dilation `P^2 = Q E J` of a reversible chain and the
//! commuting-projection expression built from `E`.

use nalgebra::DMatrix;
use rittkit::{pisier_expression_norm, rota_dilation, Exponent};

fn main() -> rittkit::Result<()> {
    let p = DMatrix::from_row_slice(3, 3, &[0.5, 0.5, 0.0, 0.25, 0.5, 0.25, 0.0, 0.5, 0.5]);
    let pi = [0.25, 0.5, 0.25];
    let d = rota_dilation(&p, &pi)?;
    println!("path space: {} points {:?}", d.support.len(), d.support);
    let r = d.residuals;
    println!("||QJ - I|| {:.1e}, ||QEJ - P^2|| {:.1e}, ||E^2 - E|| {:.1e}, min E {:.3}", r.qj, r.qej, r.idempotence, r.min_entry);
    for legs in 1..=3 {
        let two = pisier_expression_norm(&d.e, &d.path_measure, legs, Exponent::TWO, Exponent::TWO, 1)?;
        let mixed = pisier_expression_norm(&d.e, &d.path_measure, legs, Exponent::TWO, Exponent::ONE, 2)?;
        println!("legs {legs}: L^2 value {:.6}; L^2(l^1_2) value >= {:.6}", two.value, mixed.value);
    }
    Ok(())
}
