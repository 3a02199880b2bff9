//! How fast `lambda_3^a` leaves its value at the square centre, where three
//! nodal lines meet.

use abspec::analysis::rate_fit;
use abspec::geometry::{build_domain, DomainSpec, Point};
use abspec::spectral::Discretization;

fn main() -> abspec::Result<()> {
    let sq = build_domain(&DomainSpec::UnitSquare)?;
    let fit = rate_fit(&sq, Point::new(0.5, 0.5), 3, Point::new(1.0, 0.0), &[0.08, 0.06, 0.04, 0.03], &Discretization::with_h(0.04))?;
    for (r, g) in fit.radii.iter().zip(&fit.gaps) {
        println!("|a - b| = {r:.2}  gap {g:.3e}");
    }
    println!("k = {:?}, p = {:.3} in [{:.3}, {:.3}], bound {:?}", fit.k, fit.p, fit.p_lo, fit.p_hi, fit.bound);
    Ok(())
}
