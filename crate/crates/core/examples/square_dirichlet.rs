//! Dirichlet eigenvalues of the unit square against `pi^2 (m^2 + n^2)`.

use abspec::geometry::{build_domain, DomainSpec};
use abspec::spectral::{dirichlet_spectrum, Discretization};
use std::f64::consts::PI;

fn main() -> abspec::Result<()> {
    let sq = build_domain(&DomainSpec::UnitSquare)?;
    let spec = dirichlet_spectrum(&sq, &Discretization::with_h(0.05), 6)?;
    let exact = [2.0, 5.0, 5.0, 8.0, 10.0, 10.0];
    for (j, (p, e)) in spec.pairs.iter().zip(exact).enumerate() {
        let e = e * PI * PI;
        println!("lambda_{} = {:.6}  exact {:.6}  rel err {:.1e}  cluster {}", j + 1, p.value, e, (p.value - e).abs() / e, p.cluster);
    }
    Ok(())
}
