use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Domain, Piece, Point, Pole};
use crate::spectral::{Discretization, Problem};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryReport {
    pub b: Point,
    pub j: usize,
    /// Sorted from farthest to closest.
    pub distances: Vec<f64>,
    pub magnetic: Vec<f64>,
    /// Dirichlet `lambda_j` on the same mesh as each magnetic value.
    pub dirichlet: Vec<f64>,
    pub gaps: Vec<f64>,
    pub passes: bool,
}

/// Unit inward normal at a smooth boundary point. Corners have none.
pub fn inward_normal(domain: &Domain, b: Point) -> Result<Point> {
    let (i, s) = domain
        .locate_on_boundary(b)
        .ok_or_else(|| Error::Precondition(format!("({}, {}) is not on the boundary", b.x, b.y)))?;
    if s <= 1e-9 || s >= 1.0 - 1e-9 {
        return Err(Error::Precondition("boundary point is a vertex of the boundary".into()));
    }
    Ok(match domain.pieces[i] {
        Piece::Line { a, b: e } => {
            let d = (e - a).unit();
            Point::new(-d.y, d.x)
        }
        Piece::Arc { center, .. } => (center - b).unit(),
    })
}

/// Gap `|lambda_j^a - lambda_j|` along the inward normal at `b`.
/// PASS when the last three gaps strictly decrease and the closest gap is
/// below a fifth of the farthest.
pub fn boundary_convergence(
    domain: &Domain,
    j: usize,
    b: Point,
    distances: &[f64],
    disc: &Discretization,
) -> Result<BoundaryReport> {
    if distances.len() < 2 {
        return Err(Error::Precondition("boundary convergence needs at least two distances".into()));
    }
    if j == 0 {
        return Err(Error::Precondition("eigenvalue index is 1-based".into()));
    }
    let nu = inward_normal(domain, b)?;
    let mut ds = distances.to_vec();
    ds.sort_by(|a, b| b.total_cmp(a));
    if ds.windows(2).any(|w| w[0] == w[1]) || ds[ds.len() - 1] <= 0.0 {
        return Err(Error::Precondition("distances must be positive and distinct".into()));
    }
    let mut magnetic = Vec::new();
    let mut dirichlet = Vec::new();
    for &d in &ds {
        let a = b + nu * d;
        if !domain.is_interior(a) {
            return Err(Error::Precondition(format!("pole at distance {d} leaves the domain")));
        }
        let pr = Problem::new(domain, Pole { position: a }, disc)?;
        magnetic.push(pr.magnetic(j)?.values()[j - 1]);
        dirichlet.push(pr.dirichlet(j)?.values()[j - 1]);
    }
    let gaps: Vec<f64> = magnetic.iter().zip(&dirichlet).map(|(m, d)| (m - d).abs()).collect();
    let n = gaps.len();
    let tail = &gaps[n.saturating_sub(3)..];
    let passes = tail.windows(2).all(|w| w[1] < w[0]) && gaps[n - 1] < gaps[0] / 5.0;
    Ok(BoundaryReport { b, j, distances: ds, magnetic, dirichlet, gaps, passes })
}
