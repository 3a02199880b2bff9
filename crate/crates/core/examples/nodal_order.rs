//! Number of nodal lines ending at the pole: one at the disk centre, three
//! at the square centre for the third and fourth eigenfunctions, and three
//! at a special point on the axis of the pi/4 sector.

use abspec::analysis::{locate_order_pole, nodal_order, ray_geometry, NodalReport};
use abspec::geometry::{build_domain, DomainSpec, Point, Pole};
use abspec::spectral::Discretization;
use std::f64::consts::PI;

fn show(label: &str, r: &NodalReport) {
    let rays: Vec<String> = r.rays.iter().map(|t| format!("{t:.3}")).collect();
    let dev = ray_geometry(r).map_or("-".into(), |d| format!("{d:.3}"));
    println!("{label}: k={} rays=[{}] gap deviation {dev} fit residual {:.1e}", r.k, rays.join(", "), r.residual);
}

fn main() -> abspec::Result<()> {
    let disc = Discretization::with_h(0.04);
    let disk = build_domain(&DomainSpec::UnitDisk)?;
    show("disk centre, j=1", &nodal_order(&disk, Pole::new(0.0, 0.0), 1, 0.05, &disc)?);
    let sq = build_domain(&DomainSpec::UnitSquare)?;
    for j in [3, 4] {
        show(&format!("square centre, j={j}"), &nodal_order(&sq, Pole::new(0.5, 0.5), j, 0.05, &disc)?);
    }
    let sector = build_domain(&DomainSpec::Sector { aperture: PI / 4.0, radius: 1.0 })?;
    let (a, r) = locate_order_pole(&sector, 3, 3, Point::new(0.55, 0.0), Point::new(0.7, 0.0), 0.05, &disc)?;
    show(&format!("sector, a = ({:.4}, 0), j=3", a.x), &r);
    Ok(())
}
