use serde::{Deserialize, Serialize};

use crate::assembly::Order;
use crate::error::{Error, Result};
use crate::geometry::{pole_grid, Domain, DomainSpec, Point, Pole};
use crate::spectral::Discretization;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub domain: DomainSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pole: Option<[f64; 2]>,
    #[serde(default)]
    pub mesh: MeshConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analyze: Option<AnalyzeConfig>,
    #[serde(default)]
    pub run: RunConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MeshConfig {
    pub h: f64,
    pub order: u8,
    pub grading_exponent: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grading_radius: Option<f64>,
    pub mirror: bool,
}

impl Default for MeshConfig {
    fn default() -> Self {
        Self { h: 0.05, order: 2, grading_exponent: 0.5, grading_radius: None, mirror: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    /// Number of eigenvalues.
    pub m: usize,
    pub tol: f64,
    pub cluster_gap: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { m: 6, tol: 1e-9, cluster_gap: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathConfig {
    pub from: [f64; 2],
    pub to: [f64; 2],
    /// Poles at `from + (i/n)(to - from)` for `0 < i < n`.
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathConfig>,
    #[serde(default = "first")]
    pub j: Vec<usize>,
}

fn first() -> Vec<usize> {
    vec![1]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Boundary,
    Nodal,
    Rate,
    Smoothness,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeConfig {
    pub mode: Mode,
    pub j: usize,
    /// Probe radius for `nodal`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    /// Boundary point for `boundary`, base point for `rate` (defaults to the pole).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distances: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(default)]
    pub svg: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
    /// Largest number of unknowns in one solve.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Config> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn pole(&self) -> Option<Pole> {
        self.pole.map(|[x, y]| Pole::new(x, y))
    }

    pub fn discretization(&self) -> Result<Discretization> {
        let mut d = Discretization::with_h(self.mesh.h);
        d.order = Order::from_degree(self.mesh.order)?;
        d.grading_exponent = self.mesh.grading_exponent;
        d.grading_radius = self.mesh.grading_radius;
        d.mirror = self.mesh.mirror;
        d.solver.tol = self.solver.tol;
        d.solver.cluster_gap = self.solver.cluster_gap;
        if let Some(b) = self.run.budget {
            // P2 carries roughly four unknowns per vertex.
            let per_vertex = match d.order {
                Order::P1 => 1,
                Order::P2 => 4,
            };
            d.max_vertices = (b / per_vertex).max(3);
        }
        Ok(d)
    }

    pub fn sweep_poles(&self, domain: &Domain) -> Result<(Vec<Pole>, Vec<usize>)> {
        let s = self.sweep.as_ref().ok_or_else(|| Error::Parse("missing [sweep] section".into()))?;
        if s.j.is_empty() || s.j.contains(&0) {
            return Err(Error::Parse("sweep.j must list 1-based indices".into()));
        }
        let poles = match (s.grid, &s.path) {
            (Some(n), None) => pole_grid(domain, n)?,
            (None, Some(p)) => {
                if p.n < 2 {
                    return Err(Error::Parse("sweep.path.n must be at least 2".into()));
                }
                let (a, b) = (Point::new(p.from[0], p.from[1]), Point::new(p.to[0], p.to[1]));
                (1..p.n)
                    .map(|i| a.lerp(b, i as f64 / p.n as f64))
                    .filter(|q| domain.is_interior(*q))
                    .map(|q| Pole { position: q })
                    .collect()
            }
            _ => return Err(Error::Parse("[sweep] needs exactly one of `grid` or `path`".into())),
        };
        Ok((poles, s.j.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_config_round_trips() {
        let text = r#"
            pole = [0.5, 0.5]
            [domain]
            kind = "sector"
            aperture = 0.785
            [mesh]
            h = 0.03
            [sweep]
            path = { from = [0.0, 0.0], to = [1.0, 0.0], n = 200 }
            j = [1, 2]
            [analyze]
            mode = "nodal"
            j = 3
            r = 0.05
        "#;
        let c = Config::from_toml(text).unwrap();
        assert_eq!(c.domain, DomainSpec::Sector { aperture: 0.785, radius: 1.0 });
        assert_eq!(c.mesh.order, 2);
        assert_eq!(c.analyze.as_ref().unwrap().mode, Mode::Nodal);
        assert_eq!(Config::from_toml(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn missing_kind_names_the_field() {
        let e = Config::from_toml("[domain]\nradius = 1.0\n").unwrap_err().to_string();
        assert!(e.contains("kind"), "{e}");
        let e = Config::from_toml("[domain]\nkind = \"unit-square\"\n[mesh]\nhh = 0.1\n").unwrap_err().to_string();
        assert!(e.contains("hh"), "{e}");
    }
}
