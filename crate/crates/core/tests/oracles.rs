mod common;

use common::*;
use std::f64::consts::PI;

// Reference digits frozen from tables of Bessel zeros.
#[test]
fn bessel_zeros() {
    assert!((bessel_zero(0, 2.0, 3.0) - 2.404825557695773).abs() < 1e-12);
    assert!((bessel_zero(4, 7.0, 8.0) - 7.588342434503805).abs() < 1e-10);
    assert!((bessel_zero(1, 3.0, 4.5) - 3.831705970207512).abs() < 1e-12);
}

#[test]
fn half_integer_zeros() {
    assert!((tan_root() - 4.493409457909064).abs() < 1e-12);
    assert!((tan_root().powi(2) - 20.19072856).abs() < 1e-7);
    // J_{1/2}(x) is proportional to sin x / sqrt x.
    assert!((bisect(|x| x.sin(), 3.0, 3.3) - PI).abs() < 1e-14);
}

#[test]
fn square_table() {
    let v = square_dirichlet(4);
    let pi2 = PI * PI;
    assert_eq!(v, vec![2.0 * pi2, 5.0 * pi2, 5.0 * pi2, 8.0 * pi2]);
}
