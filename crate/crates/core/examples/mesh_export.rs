//! Graded mesh around a pole with its branch cut, written in the text format.

use abspec::geometry::{build_domain, DomainSpec, Pole};
use abspec::meshing::write_mesh;
use abspec::spectral::{Discretization, Problem};

fn main() -> abspec::Result<()> {
    let sq = build_domain(&DomainSpec::UnitSquare)?;
    let pr = Problem::new(&sq, Pole::new(0.3, 0.6), &Discretization::with_h(0.1))?;
    eprintln!(
        "{} vertices, {} cut vertices doubled, min angle {:.1}",
        pr.mesh.num_vertices(),
        pr.cut_mesh.num_duplicated(),
        pr.mesh.min_angle()
    );
    write_mesh(&pr.mesh, &mut std::io::stdout().lock())
}
