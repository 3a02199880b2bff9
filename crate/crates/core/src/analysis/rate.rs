use serde::{Deserialize, Serialize};

use super::nodal::{nodal_order_in, NodalOptions};
use crate::error::{Error, Result};
use crate::geometry::{Domain, Point, Pole};
use crate::spectral::{Discretization, Problem};

/// Allowed shortfall of the fitted exponent below `(k+1)/2`.
pub const RATE_TOLERANCE: f64 = 0.3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub b: Point,
    pub j: usize,
    pub direction: Point,
    /// Strictly decreasing.
    pub radii: Vec<f64>,
    pub gaps: Vec<f64>,
    /// Whether each radius cleared the noise floor and entered the fit.
    pub used: Vec<bool>,
    pub p: f64,
    /// Two standard errors either side of `p`.
    pub p_lo: f64,
    pub p_hi: f64,
    pub k: Option<usize>,
    /// `(k+1)/2` when `k >= 3`.
    pub bound: Option<f64>,
    pub passes: Option<bool>,
}

/// Least-squares slope of `log gap` against `log radius`, with its standard error.
pub fn fit_power_law(radii: &[f64], gaps: &[f64]) -> Result<(f64, f64)> {
    let n = radii.len();
    if n < 2 || gaps.len() != n {
        return Err(Error::Precondition("power law fit needs matching samples".into()));
    }
    let x: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let y: Vec<f64> = gaps.iter().map(|g| g.ln()).collect();
    if x.iter().chain(&y).any(|v| !v.is_finite()) {
        return Err(Error::Precondition("power law fit needs positive samples".into()));
    }
    let nf = n as f64;
    let (mx, my) = (x.iter().sum::<f64>() / nf, y.iter().sum::<f64>() / nf);
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx <= 0.0 {
        return Err(Error::Precondition("power law fit needs distinct radii".into()));
    }
    let p = sxy / sxx;
    let ssr: f64 = x.iter().zip(&y).map(|(a, b)| (b - my - p * (a - mx)).powi(2)).sum();
    let se = if n > 2 { (ssr / (nf - 2.0) / sxx).sqrt() } else { 0.0 };
    Ok((p, se))
}

/// Fit from a caller supplied `radius -> (gap, noise floor)` map. Radii whose
/// gap does not exceed the floor are dropped.
pub fn rate_fit_with(
    b: Point,
    j: usize,
    direction: Point,
    radii: &[f64],
    k: Option<usize>,
    mut eval: impl FnMut(f64) -> Result<(f64, f64)>,
) -> Result<RateFit> {
    let mut rs = radii.to_vec();
    rs.sort_by(|a, b| b.total_cmp(a));
    if rs.windows(2).any(|w| w[0] == w[1]) || rs.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::Precondition("radii must be positive and distinct".into()));
    }
    if rs.len() < 3 {
        return Err(Error::Precondition(format!("rate fit needs at least 3 radii, got {}", rs.len())));
    }
    let mut gaps = Vec::with_capacity(rs.len());
    let mut used = Vec::with_capacity(rs.len());
    for &r in &rs {
        let (g, floor) = eval(r)?;
        gaps.push(g.abs());
        used.push(g.abs() > floor);
    }
    let (xr, xg): (Vec<f64>, Vec<f64>) =
        rs.iter().zip(&gaps).zip(&used).filter(|(_, u)| **u).map(|((r, g), _)| (*r, *g)).unzip();
    if xr.len() < 3 {
        return Err(Error::Precondition(format!(
            "only {} radii clear the noise floor, at least 3 are needed",
            xr.len()
        )));
    }
    let (p, se) = fit_power_law(&xr, &xg)?;
    let bound = k.filter(|&k| k >= 3).map(|k| (k as f64 + 1.0) / 2.0);
    Ok(RateFit {
        b,
        j,
        direction,
        radii: rs,
        gaps,
        used,
        p,
        p_lo: p - 2.0 * se,
        p_hi: p + 2.0 * se,
        k,
        bound,
        passes: bound.map(|q| p >= q - RATE_TOLERANCE),
    })
}

fn smoothstep(s: f64) -> f64 {
    let s = s.clamp(0.0, 1.0);
    s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
}

/// Vanishing rate of `|lambda_j^a - lambda_j^b|` for `a = b + t dir`.
///
/// Every pole position is obtained by smoothly dragging the mesh at `b`, so
/// all gaps are measured on one mesh topology and the discretization error
/// largely cancels.
pub fn rate_fit(
    domain: &Domain,
    b: Point,
    j: usize,
    direction: Point,
    radii: &[f64],
    disc: &Discretization,
) -> Result<RateFit> {
    let dist = domain.distance_to_boundary(b);
    if radii.iter().any(|&r| r > dist / 2.0) {
        return Err(Error::Precondition(format!("radii must stay within {}", dist / 2.0)));
    }
    if radii.len() < 3 {
        return Err(Error::Precondition(format!("rate fit needs at least 3 radii, got {}", radii.len())));
    }
    let dir = direction.unit();
    if !dir.x.is_finite() || !dir.y.is_finite() {
        return Err(Error::Precondition("direction must be nonzero".into()));
    }
    let problem = Problem::new(domain, Pole { position: b }, disc)?;
    let base = problem.magnetic(j + 2)?;
    let grading = disc.grading_radius.unwrap_or(0.2f64.min(dist));
    let probe = 0.25 * dist.min(grading);
    let k = nodal_order_in(&problem, &base, j, probe, &NodalOptions::default())?.k;
    let (l0, res0) = (base.pairs[j - 1].value, base.pairs[j - 1].residual);
    let (inner, outer) = (0.25 * dist, 0.9 * dist);
    rate_fit_with(b, j, dir, radii, Some(k), |t| {
        let cm = problem.cut_mesh.transported(|x| {
            let w = 1.0 - smoothstep((x.dist(b) - inner) / (outer - inner));
            x + dir * (t * w)
        });
        let pair = &problem.magnetic_on(&cm, j)?.pairs[j - 1];
        let floor = 10.0 * pair.residual.max(res0) * pair.value.max(l0);
        Ok((pair.value - l0, floor))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_domain, DomainSpec};

    #[test]
    fn exact_power_laws() {
        let radii = [0.08, 0.06, 0.04, 0.03];
        for q in [1.0, 2.0, 3.0] {
            let f = rate_fit_with(Point::new(0.0, 0.0), 1, Point::new(1.0, 0.0), &radii, None, |r| Ok((r.powf(q), 0.0)))
                .unwrap();
            assert!((f.p - q).abs() < 1e-12);
            assert!(f.bound.is_none() && f.passes.is_none());
        }
    }

    #[test]
    fn noisy_radii_dropped() {
        let f = rate_fit_with(Point::new(0.0, 0.0), 3, Point::new(1.0, 0.0), &[0.1, 0.05, 0.02, 0.01], Some(3), |r| {
            Ok((r * r, 2e-4))
        })
        .unwrap();
        assert_eq!(f.used, vec![true, true, true, false]);
        assert_eq!(f.bound, Some(2.0));
        assert_eq!(f.passes, Some(true));
    }

    #[test]
    fn too_few_radii() {
        let r = rate_fit_with(Point::new(0.0, 0.0), 1, Point::new(1.0, 0.0), &[0.1, 0.05], None, |r| Ok((r, 0.0)));
        assert!(r.is_err());
        let sq = build_domain(&DomainSpec::UnitSquare).unwrap();
        let disc = Discretization::with_h(0.2);
        assert!(rate_fit(&sq, Point::new(0.5, 0.5), 1, Point::new(1.0, 0.0), &[0.08, 0.06], &disc).is_err());
        assert!(rate_fit(&sq, Point::new(0.5, 0.5), 1, Point::new(1.0, 0.0), &[0.4, 0.06, 0.03], &disc).is_err());
    }

    #[test]
    fn fit_error_band() {
        let (p, se) = fit_power_law(&[1.0, 2.0, 4.0], &[1.0, 4.0, 15.0]).unwrap();
        assert!((p - 1.953).abs() < 1e-3);
        assert!(se > 0.0);
    }
}
