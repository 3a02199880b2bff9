//! As the pole approaches the boundary the magnetic eigenvalues tend to
//! the Dirichlet ones.

use abspec::analysis::boundary_convergence;
use abspec::geometry::{build_domain, DomainSpec, Point};
use abspec::spectral::Discretization;

fn main() -> abspec::Result<()> {
    let sq = build_domain(&DomainSpec::UnitSquare)?;
    let disc = Discretization::with_h(0.05);
    for j in 1..=4 {
        let r = boundary_convergence(&sq, j, Point::new(0.5, 0.0), &[0.2, 0.1, 0.05, 0.02], &disc)?;
        let gaps: Vec<String> = r.gaps.iter().map(|g| format!("{g:.4}")).collect();
        println!("j={j}  gaps at d = {:?}: [{}]  {}", r.distances, gaps.join(", "), if r.passes { "PASS" } else { "FAIL" });
    }
    Ok(())
}
