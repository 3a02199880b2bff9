//! Closed-form oracles shared by the integration tests. None of them use
//! the library.

#![allow(dead_code)]

use std::f64::consts::PI;

/// Bisection on a sign change of `f` in `[lo, hi]`.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    assert!(flo * f(hi) < 0.0, "no sign change on [{lo}, {hi}]");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `J_n(x)` from its power series; fine for `x < 20`.
pub fn bessel_j(n: u32, x: f64) -> f64 {
    let mut term = (x / 2.0).powi(n as i32) / (1..=n).map(f64::from).product::<f64>();
    let mut sum = term;
    for k in 1..80 {
        term *= -(x * x / 4.0) / (k as f64 * (k + n) as f64);
        sum += term;
    }
    sum
}

/// First positive zero of `J_n` inside `[lo, hi]`.
pub fn bessel_zero(n: u32, lo: f64, hi: f64) -> f64 {
    bisect(|x| bessel_j(n, x), lo, hi)
}

/// First positive root of `tan x = x`, the first zero of `J_{3/2}`.
pub fn tan_root() -> f64 {
    bisect(|x| x.sin() - x * x.cos(), PI, 1.5 * PI)
}

/// Dirichlet eigenvalues `pi^2 (p^2 + q^2)` of the unit square, ascending.
pub fn square_dirichlet(count: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (1..20).flat_map(|p| (1..20).map(move |q| PI * PI * (p * p + q * q) as f64)).collect();
    v.sort_by(f64::total_cmp);
    v.truncate(count);
    v
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
