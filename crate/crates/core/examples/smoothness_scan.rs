//! Kinks of `a -> lambda_j^a` along the symmetry axis of the pi/4 sector
//! occur only where the eigenvalue stops being simple.

use abspec::analysis::{smoothness_scan, sweep};
use abspec::geometry::{build_domain, DomainSpec, Pole};
use abspec::spectral::Discretization;
use std::f64::consts::PI;

fn main() -> abspec::Result<()> {
    let sector = build_domain(&DomainSpec::Sector { aperture: PI / 4.0, radius: 1.0 })?;
    let poles: Vec<Pole> = (1..200).map(|m| Pole::new(m as f64 / 200.0, 0.0)).collect();
    let table = sweep(&sector, &poles, &Discretization::with_h(0.04), 3)?;
    for j in [1, 2] {
        let r = smoothness_scan(&table, j)?;
        let at: Vec<f64> = r.kinks.iter().map(|&i| table.rows[i].pole.x).collect();
        println!("j={j}: kinks at {at:?}, crossings at rows {:?}, unexplained {:?}", r.crossings, r.flagged);
    }
    Ok(())
}
