use abspec::analysis::*;
use abspec::geometry::{build_domain, pole_grid, DomainSpec, Point, Pole};
use abspec::spectral::Discretization;
use std::f64::consts::PI;

fn square() -> abspec::geometry::Domain {
    build_domain(&DomainSpec::UnitSquare).unwrap()
}

#[test]
fn sweep_counts() {
    let sq = square();
    let t = sweep(&sq, &pole_grid(&sq, 4).unwrap(), &Discretization::with_h(0.1), 4).unwrap();
    assert_eq!(t.rows.len(), 9);
    assert!(t.rows.iter().all(|r| r.values.len() == 4));
}

#[test]
fn boundary_limit_is_monotone_for_first_four() {
    let sq = square();
    let disc = Discretization::with_h(0.06);
    for j in 1..=4 {
        let r = boundary_convergence(&sq, j, Point::new(0.5, 0.0), &[0.2, 0.1, 0.05, 0.02], &disc).unwrap();
        assert!(r.gaps.windows(2).all(|w| w[1] < w[0]), "j={j} {:?}", r.gaps);
        assert!(r.passes);
    }
    let r = boundary_convergence(&sq, 1, Point::new(0.5, 0.0), &[0.2, 0.1], &disc).unwrap();
    assert!(r.magnetic[0] > 2.0 * PI * PI);
}

#[test]
fn nodal_order_is_stable_under_radius_halving() {
    let sq = square();
    let disc = Discretization::with_h(0.05);
    for (pole, j) in [(Pole::new(0.5, 0.5), 3), (Pole::new(0.5, 0.5), 1), (Pole::new(0.3, 0.6), 2)] {
        let a = nodal_order(&sq, pole, j, 0.05, &disc).unwrap();
        let b = nodal_order(&sq, pole, j, 0.025, &disc).unwrap();
        assert_eq!(a.k, b.k);
        assert_eq!(a.k % 2, 1);
    }
}

#[test]
fn square_centre_has_three_equal_sectors() {
    let rep = nodal_order(&square(), Pole::new(0.5, 0.5), 3, 0.05, &Discretization::with_h(0.05)).unwrap();
    assert_eq!(rep.k, 3);
    assert!(ray_geometry(&rep).unwrap() < 0.15);
}

#[test]
fn sector_special_point_has_order_three() {
    let sector = build_domain(&DomainSpec::Sector { aperture: PI / 4.0, radius: 1.0 }).unwrap();
    let disc = Discretization::with_h(0.04);
    let (a, rep) = locate_order_pole(&sector, 3, 3, Point::new(0.55, 0.0), Point::new(0.7, 0.0), 0.05, &disc).unwrap();
    assert!((a.x - 0.63).abs() < 0.01, "{a:?}");
    assert_eq!(rep.k, 3);
}

#[test]
fn disk_centre_rate_has_no_bound() {
    let disk = build_domain(&DomainSpec::UnitDisk).unwrap();
    let fit = rate_fit(&disk, Point::new(0.0, 0.0), 1, Point::new(1.0, 0.0), &[0.2, 0.15, 0.1, 0.05], &Discretization::with_h(0.06))
        .unwrap();
    assert_eq!(fit.k, Some(1));
    assert!(fit.bound.is_none() && fit.passes.is_none());
    assert!(fit.p.is_finite());
}

#[test]
fn sector_axis_kinks_sit_on_crossings() {
    let sector = build_domain(&DomainSpec::Sector { aperture: PI / 4.0, radius: 1.0 }).unwrap();
    let poles: Vec<Pole> = (1..100).map(|m| Pole::new(m as f64 / 100.0, 0.0)).collect();
    let t = sweep(&sector, &poles, &Discretization::with_h(0.05), 3).unwrap();
    let one = smoothness_scan(&t, 1).unwrap();
    assert_eq!(one.kinks.len(), 1);
    assert!(one.passes());
    let two = smoothness_scan(&t, 2).unwrap();
    assert_eq!(two.kinks.len(), 3);
    assert!(two.passes());
}
