//! First magnetic eigenvalue over the lattice `(m/N, n/N)` inside the
//! square, printed as a coarse text map.

use abspec::analysis::sweep;
use abspec::geometry::{build_domain, pole_grid, DomainSpec};
use abspec::spectral::Discretization;

fn main() -> abspec::Result<()> {
    let n = 10;
    let sq = build_domain(&DomainSpec::UnitSquare)?;
    let poles = pole_grid(&sq, n)?;
    let table = sweep(&sq, &poles, &Discretization::with_h(0.08), 2)?;
    let lam = table.column(1);
    for row in (1..n).rev() {
        let line: Vec<String> = (1..n)
            .map(|col| {
                let i = table.rows.iter().position(|r| {
                    (r.pole.x * n as f64).round() as usize == col && (r.pole.y * n as f64).round() as usize == row
                });
                i.map_or("   -  ".into(), |i| format!("{:6.2}", lam[i]))
            })
            .collect();
        println!("{}", line.join(" "));
    }
    let (i, best) = lam.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
    println!("max lambda_1 = {best:.4} at {:?}", table.rows[i].pole);
    Ok(())
}
