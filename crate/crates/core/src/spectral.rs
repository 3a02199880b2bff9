//! Dirichlet, magnetic and double-cover spectra, and the sheet-swap
//! classification that splits the cover spectrum into the other two.

use faer::{Mat, Side};
use serde::{Deserialize, Serialize};

use crate::assembly::{assemble, DofMap, FeField, FeMesh, Order};
use crate::eigensolve::{smallest_eigenpairs, EigenPair, SolverOptions};
use crate::error::{Error, Result};
use crate::geometry::{branch_cut, Axis, Cut, Domain, Pole};
use crate::meshing::{
    double_cover, insert_cut, triangulate_with, CoverMesh, CutMesh, Mesh, MeshRequest, PoleGrading,
    DEFAULT_MAX_VERTICES,
};
use crate::sparse::SparseSym;

/// Mesh and solver parameters shared by all pipelines.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub h: f64,
    pub order: Order,
    pub grading_exponent: f64,
    /// Defaults to `min(0.2, dist(pole, boundary))`.
    pub grading_radius: Option<f64>,
    /// Mesh half the domain and reflect when pole and cut lie on a symmetry axis.
    pub mirror: bool,
    pub max_vertices: usize,
    pub solver: SolverOptions,
}

impl Default for Discretization {
    fn default() -> Self {
        Self {
            h: 0.05,
            order: Order::P2,
            grading_exponent: 0.5,
            grading_radius: None,
            mirror: true,
            max_vertices: DEFAULT_MAX_VERTICES,
            solver: SolverOptions::default(),
        }
    }
}

impl Discretization {
    pub fn with_h(h: f64) -> Self {
        Self { h, ..Self::default() }
    }

    fn grading(&self, domain: &Domain, pole: &Pole) -> PoleGrading {
        let mut g = PoleGrading::standard(domain, pole.position);
        g.exponent = self.grading_exponent;
        if let Some(r) = self.grading_radius {
            g.radius = r;
        }
        g
    }
}

/// Solved eigenpairs with the DOF layout needed to evaluate them.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub pairs: Vec<EigenPair>,
    pub dofs: DofMap,
    pub points: Vec<crate::geometry::Point>,
}

impl Spectrum {
    pub fn values(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.value).collect()
    }

    pub fn residuals(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.residual).collect()
    }

    pub fn clusters(&self) -> Vec<usize> {
        self.pairs.iter().map(|p| p.cluster).collect()
    }

    /// Eigenfunction `j` (1-based) as a finite element field.
    pub fn field(&self, j: usize) -> FeField {
        let full = self.dofs.expand(&self.pairs[j - 1].vector);
        FeField::new(self.dofs.clone(), full, self.points.clone())
    }

    /// Whether eigenvalue `j` (1-based) is alone in its cluster. The last
    /// computed value is only known to be simple from below.
    pub fn is_simple(&self, j: usize) -> bool {
        let c = self.pairs[j - 1].cluster;
        self.pairs.iter().filter(|p| p.cluster == c).count() == 1
    }
}

/// Symmetry of a cover eigenfunction under the sheet swap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tag {
    Symmetric,
    Antisymmetric,
    Mixed,
}

impl Tag {
    pub fn as_str(self) -> &'static str {
        match self {
            Tag::Symmetric => "symmetric",
            Tag::Antisymmetric => "antisymmetric",
            Tag::Mixed => "mixed",
        }
    }

    fn from_correlation(s: f64) -> Tag {
        if s > 0.9 {
            Tag::Symmetric
        } else if s < -0.9 {
            Tag::Antisymmetric
        } else {
            Tag::Mixed
        }
    }
}

#[derive(Debug, Clone)]
pub struct CoverSpectrum {
    pub values: Vec<f64>,
    pub tags: Vec<Tag>,
    /// Correlation with the swapped eigenfunction (per-cluster projection
    /// eigenvalue for degenerate groups).
    pub correlations: Vec<f64>,
    pub residuals: Vec<f64>,
    pub cover: CoverMesh,
}

fn solve(mesh: &impl FeMesh, disc: &Discretization, m: usize) -> Result<(Spectrum, SparseSym)> {
    let sys = assemble(mesh, disc.order)?;
    let (k, mm) = sys.reduced()?;
    let pairs = smallest_eigenpairs(&k, &mm, m, &disc.solver)?;
    Ok((Spectrum { pairs, dofs: sys.dofs, points: mesh.points().to_vec() }, mm))
}

/// A pole with its cut(s) and the mesh that resolves them.
#[derive(Debug, Clone)]
pub struct Problem {
    pub domain: Domain,
    pub pole: Pole,
    pub cuts: Vec<Cut>,
    pub mesh: Mesh,
    pub cut_mesh: CutMesh,
    pub disc: Discretization,
}

fn mirror_axis(domain: &Domain, pole: &Pole, cuts: &[Cut]) -> Option<Axis> {
    domain
        .symmetry_axes()
        .iter()
        .find(|ax| ax.contains(pole.position) && cuts.iter().all(|c| c.points.iter().all(|p| ax.contains(*p))))
        .copied()
}

impl Problem {
    /// Uses the default branch cut.
    pub fn new(domain: &Domain, pole: Pole, disc: &Discretization) -> Result<Problem> {
        let cut = branch_cut(domain, &pole)?;
        Problem::with_cuts(domain, pole, vec![cut], disc)
    }

    /// Meshes with every cut resolved; the first one is active.
    pub fn with_cuts(domain: &Domain, pole: Pole, cuts: Vec<Cut>, disc: &Discretization) -> Result<Problem> {
        if cuts.is_empty() {
            return Err(Error::Precondition("at least one cut is needed".into()));
        }
        let mut req = MeshRequest::new(disc.h);
        req.grading = Some(disc.grading(domain, &pole));
        req.cuts = cuts.clone();
        req.max_vertices = disc.max_vertices;
        if disc.mirror {
            req.mirror = mirror_axis(domain, &pole, &cuts);
        }
        let mesh = triangulate_with(domain, &req)?;
        let cut_mesh = insert_cut(&mesh, &cuts[0])?;
        Ok(Problem { domain: domain.clone(), pole, cuts, mesh, cut_mesh, disc: disc.clone() })
    }

    /// Slit mesh for cut `i`.
    pub fn cut_mesh_for(&self, i: usize) -> Result<CutMesh> {
        let cut = self.cuts.get(i).ok_or_else(|| Error::Precondition(format!("no cut {i}")))?;
        insert_cut(&self.mesh, cut)
    }

    /// Dirichlet Laplacian on the same mesh (the pole is an ordinary vertex).
    pub fn dirichlet(&self, m: usize) -> Result<Spectrum> {
        Ok(solve(&self.mesh, &self.disc, m)?.0)
    }

    pub fn magnetic(&self, m: usize) -> Result<Spectrum> {
        self.magnetic_on(&self.cut_mesh, m)
    }

    pub fn magnetic_on(&self, cm: &CutMesh, m: usize) -> Result<Spectrum> {
        Ok(solve(cm, &self.disc, m)?.0)
    }

    pub fn cover(&self, m: usize) -> Result<CoverSpectrum> {
        let cover = double_cover(&self.cut_mesh);
        let (spec, mm) = solve(&cover, &self.disc, m)?;
        let perm = reduced_permutation(&spec.dofs, &cover.deck)?;
        let mut tags = Vec::with_capacity(m);
        let mut corr = Vec::with_capacity(m);
        let mut start = 0;
        while start < spec.pairs.len() {
            let c = spec.pairs[start].cluster;
            let end = start + spec.pairs[start..].iter().take_while(|p| p.cluster == c).count();
            let vecs: Vec<&[f64]> = spec.pairs[start..end].iter().map(|p| p.vector.as_slice()).collect();
            for s in cluster_correlations(&vecs, &mm, &perm)? {
                corr.push(s);
                tags.push(Tag::from_correlation(s));
            }
            start = end;
        }
        Ok(CoverSpectrum { values: spec.values(), tags, correlations: corr, residuals: spec.residuals(), cover })
    }
}

/// Sheet swap acting on reduced unknowns.
fn reduced_permutation(dofs: &DofMap, deck: &[usize]) -> Result<Vec<usize>> {
    let full = dofs.permutation(deck);
    let mut out = vec![usize::MAX; dofs.num_free];
    for (i, r) in dofs.reduced.iter().enumerate() {
        if let Some((ri, _)) = r {
            match dofs.reduced[full[i]] {
                Some((rj, _)) => out[*ri] = rj,
                None => return Err(Error::Precondition("sheet swap does not preserve boundary".into())),
            }
        }
    }
    Ok(out)
}

/// Eigenvalues of `U^T M (U o sigma)`, descending. For a single vector
/// this is the correlation `<u, u o sigma>_M`.
fn cluster_correlations(vecs: &[&[f64]], m: &SparseSym, perm: &[usize]) -> Result<Vec<f64>> {
    let c = vecs.len();
    let swapped: Vec<Vec<f64>> = vecs
        .iter()
        .map(|u| {
            let mut v = vec![0.0; u.len()];
            for (i, &p) in perm.iter().enumerate() {
                v[p] = u[i];
            }
            m.mul_vec(&v)
        })
        .collect();
    let s = Mat::<f64>::from_fn(c, c, |a, b| {
        let ab: f64 = vecs[a].iter().zip(&swapped[b]).map(|(x, y)| x * y).sum();
        let ba: f64 = vecs[b].iter().zip(&swapped[a]).map(|(x, y)| x * y).sum();
        0.5 * (ab + ba)
    });
    let ev = s
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Factorization(format!("{e:?}")))?;
    Ok(ev.into_iter().rev().collect())
}

/// Symmetry class of a single unit `M`-norm cover vector.
pub fn classify(u: &[f64], m: &SparseSym, perm: &[usize]) -> Result<Tag> {
    let s = cluster_correlations(&[u], m, perm)?[0];
    match Tag::from_correlation(s) {
        Tag::Mixed => Err(Error::Ambiguous(s)),
        t => Ok(t),
    }
}

/// Dirichlet eigenvalues on a mesh without a pole.
pub fn dirichlet_spectrum(domain: &Domain, disc: &Discretization, m: usize) -> Result<Spectrum> {
    let mut req = MeshRequest::new(disc.h);
    req.max_vertices = disc.max_vertices;
    let mesh = triangulate_with(domain, &req)?;
    Ok(solve(&mesh, disc, m)?.0)
}

pub fn magnetic_spectrum(domain: &Domain, pole: Pole, disc: &Discretization, m: usize) -> Result<Spectrum> {
    Problem::new(domain, pole, disc)?.magnetic(m)
}

pub fn cover_spectrum(domain: &Domain, pole: Pole, disc: &Discretization, m: usize) -> Result<CoverSpectrum> {
    Problem::new(domain, pole, disc)?.cover(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_domain, DomainSpec, Point};
    use std::f64::consts::PI;

    fn square() -> Domain {
        build_domain(&DomainSpec::UnitSquare).unwrap()
    }

    #[test]
    fn square_dirichlet_p2() {
        let s = dirichlet_spectrum(&square(), &Discretization::with_h(0.05), 4).unwrap();
        let v = s.values();
        let want = [2.0, 5.0, 5.0, 8.0].map(|c| c * PI * PI);
        for (a, b) in v.iter().zip(want) {
            assert!((a - b).abs() / b < 1e-3, "{a} vs {b}");
        }
        assert_eq!(s.clusters()[1], s.clusters()[2]);
    }

    #[test]
    fn rotation_leaves_the_spectrum_unchanged() {
        let disc = Discretization::with_h(0.1);
        let d = square();
        let p = Problem::new(&d, Pole::new(0.3, 0.6), &disc).unwrap();
        let a = p.magnetic(2).unwrap().values();
        let rot = |q: Point| Point::new(1.0 - q.y, q.x);
        let cm = p.cut_mesh.transported(rot);
        let b = p.magnetic_on(&cm, 2).unwrap().values();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() / x < 1e-10);
        }
    }

    #[test]
    fn diamagnetic_excess_and_cover_merge() {
        let disc = Discretization::with_h(0.1);
        let p = Problem::new(&square(), Pole::new(0.3, 0.6), &disc).unwrap();
        let dir = p.dirichlet(6).unwrap().values();
        let mag = p.magnetic(6).unwrap().values();
        assert!(mag[0] > dir[0]);
        let cov = p.cover(8).unwrap();
        let mut merged: Vec<f64> = dir.iter().chain(&mag).copied().collect();
        merged.sort_by(f64::total_cmp);
        for (a, b) in cov.values.iter().zip(&merged) {
            assert!((a - b).abs() / b < 1e-8, "{a} vs {b}");
        }
        assert!(cov.tags.iter().all(|t| *t != Tag::Mixed));
    }

    #[test]
    fn classify_exact_cases() {
        // Two sheets of one unknown each, swapped by the permutation.
        let m = SparseSym::from_triplets(2, &[(0, 0, 0.5), (1, 1, 0.5)]);
        let perm = [1, 0];
        assert_eq!(classify(&[1.0, 1.0], &m, &perm).unwrap(), Tag::Symmetric);
        assert_eq!(classify(&[1.0, -1.0], &m, &perm).unwrap(), Tag::Antisymmetric);
        assert!(matches!(classify(&[2f64.sqrt(), 0.0], &m, &perm), Err(Error::Ambiguous(_))));
    }
}
