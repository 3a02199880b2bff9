use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Domain, Point, Pole};
use crate::spectral::{Discretization, Problem};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub pole: Point,
    pub values: Vec<f64>,
    pub residuals: Vec<f64>,
    pub clusters: Vec<usize>,
    /// Reduced system size.
    pub dofs: usize,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub domain: String,
    pub h: f64,
    pub order: u8,
    pub m: usize,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// `lambda_j` (1-based) along the rows; failed rows give NaN.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r.values.get(j - 1).copied().unwrap_or(f64::NAN)).collect()
    }
}

/// Magnetic eigenvalues at one pole; a failure is recorded in the row.
pub fn sweep_row(domain: &Domain, pole: Pole, disc: &Discretization, m: usize) -> SweepRow {
    match Problem::new(domain, pole, disc).and_then(|pr| pr.magnetic(m)) {
        Ok(s) => SweepRow {
            pole: pole.position,
            values: s.values(),
            residuals: s.residuals(),
            clusters: s.clusters(),
            dofs: s.dofs.num_free,
            error: None,
        },
        Err(e) => SweepRow {
            pole: pole.position,
            values: Vec::new(),
            residuals: Vec::new(),
            clusters: Vec::new(),
            dofs: 0,
            error: Some(e.to_string()),
        },
    }
}

/// Magnetic eigenvalues for every pole. Rows come back in input order;
/// a failing pole is recorded and the sweep continues.
pub fn sweep(domain: &Domain, poles: &[Pole], disc: &Discretization, m: usize) -> Result<SweepTable> {
    if poles.is_empty() {
        return Err(Error::Precondition("empty pole list".into()));
    }
    for (i, p) in poles.iter().enumerate() {
        if !domain.is_interior(p.position) {
            return Err(Error::Precondition(format!(
                "pole ({}, {}) is not interior",
                p.position.x, p.position.y
            )));
        }
        if poles[..i].iter().any(|q| q.position == p.position) {
            return Err(Error::Precondition("duplicate pole in sweep".into()));
        }
    }
    let rows = poles.par_iter().map(|p| sweep_row(domain, *p, disc, m)).collect();
    Ok(SweepTable { domain: domain.spec.id(), h: disc.h, order: disc.order.degree(), m, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_domain, pole_grid, DomainSpec};

    #[test]
    fn square_grid_shape_and_symmetry() {
        let d = build_domain(&DomainSpec::UnitSquare).unwrap();
        let poles = pole_grid(&d, 4).unwrap();
        let t = sweep(&d, &poles, &Discretization::with_h(0.08), 4).unwrap();
        assert_eq!(t.rows.len(), 9);
        assert!(t.rows.iter().all(|r| r.values.len() == 4 && r.error.is_none()));
        let find = |x: f64, y: f64| t.rows.iter().find(|r| r.pole == Point::new(x, y)).unwrap();
        let (a, b) = (find(0.25, 0.25), find(0.75, 0.25));
        for j in 0..4 {
            assert!((a.values[j] - b.values[j]).abs() / a.values[j] < 1e-3);
        }
    }

    #[test]
    fn rejects_bad_pole_lists() {
        let d = build_domain(&DomainSpec::UnitSquare).unwrap();
        let disc = Discretization::with_h(0.2);
        assert!(sweep(&d, &[], &disc, 2).is_err());
        assert!(sweep(&d, &[Pole::new(1.5, 0.5)], &disc, 2).is_err());
        assert!(sweep(&d, &[Pole::new(0.5, 0.5), Pole::new(0.5, 0.5)], &disc, 2).is_err());
    }
}
