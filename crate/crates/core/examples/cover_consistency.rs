//! The spectrum on the double cover is the union of the Dirichlet spectrum
//! (sheet-symmetric eigenfunctions) and the magnetic one (antisymmetric).

use abspec::geometry::{build_domain, DomainSpec, Pole};
use abspec::spectral::{Discretization, Problem};

fn main() -> abspec::Result<()> {
    let sq = build_domain(&DomainSpec::UnitSquare)?;
    let pr = Problem::new(&sq, Pole::new(0.3, 0.6), &Discretization::with_h(0.06))?;
    let cover = pr.cover(10)?;
    let mut merged: Vec<(f64, &str)> = pr.dirichlet(10)?.values().into_iter().map(|v| (v, "dirichlet")).collect();
    merged.extend(pr.magnetic(10)?.values().into_iter().map(|v| (v, "magnetic")));
    merged.sort_by(|a, b| a.0.total_cmp(&b.0));
    for i in 0..10 {
        println!(
            "{:2}  cover {:.8} {:13}  merged {:.8} {:9}  rel diff {:.1e}",
            i + 1,
            cover.values[i],
            cover.tags[i].as_str(),
            merged[i].0,
            merged[i].1,
            (cover.values[i] - merged[i].0).abs() / merged[i].0
        );
    }
    Ok(())
}
