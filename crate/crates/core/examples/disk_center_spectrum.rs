//! Magnetic eigenvalues with the pole at the centre of the unit disk.
//!
//! With circulation 1/2 the eigenfunctions are `J_{n+1/2}(sqrt(lambda) r)`
//! times angular factors, so the spectrum is given by zeros of spherical
//! Bessel functions: `pi^2` for `n = 0`, the root of `tan x = x` squared
//! for `n = 1`, and so on, each twice.

use abspec::geometry::{build_domain, DomainSpec, Pole};
use abspec::spectral::{magnetic_spectrum, Discretization};
use std::f64::consts::PI;
use std::time::Instant;

fn tan_root() -> f64 {
    // tan x = x on (pi, 3pi/2), i.e. sin x - x cos x = 0.
    let f = |x: f64| x.sin() - x * x.cos();
    let (mut lo, mut hi) = (PI, 1.5 * PI);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if f(lo) * f(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn main() -> abspec::Result<()> {
    let disk = build_domain(&DomainSpec::UnitDisk)?;
    let t = Instant::now();
    let spec = magnetic_spectrum(&disk, Pole::new(0.0, 0.0), &Discretization::with_h(0.05), 6)?;
    let x = tan_root();
    println!("{} unknowns, {:.2?}", spec.dofs.num_free, t.elapsed());
    for (j, p) in spec.pairs.iter().enumerate() {
        println!("lambda_{} = {:.6}  (residual {:.1e}, cluster {})", j + 1, p.value, p.residual, p.cluster);
    }
    println!("pi^2 = {:.6}, x1^2 = {:.6} with tan x1 = x1", PI * PI, x * x);
    Ok(())
}
