//! Pole-graded triangulations with resolved branch cuts, the slit
//! [`CutMesh`] and the two-sheet [`CoverMesh`].

mod cdt;
mod cover;
mod cut;
mod io;

use std::collections::HashMap;

pub use cover::{double_cover, CoverMesh};
pub use cut::{insert_cut, CutMesh};
pub use io::{read_mesh, write_mesh};

use crate::error::{Error, Result};
use crate::geometry::{Axis, Cut, Domain, Piece, Point};
use cdt::{Cdt, RefineParams, Seg, SegGeom, SegKind};

/// Default cap on mesh vertices.
pub const DEFAULT_MAX_VERTICES: usize = 200_000;

/// Local refinement towards a pole: target size `h * min(1, r / radius)^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleGrading {
    pub pole: Point,
    pub exponent: f64,
    /// Grading radius `R0`.
    pub radius: f64,
}

impl PoleGrading {
    /// Exponent 1/2 with radius `min(0.2, dist(pole, boundary))`.
    pub fn standard(domain: &Domain, pole: Point) -> Self {
        Self { pole, exponent: 0.5, radius: 0.2f64.min(domain.distance_to_boundary(pole)) }
    }

    pub fn size(&self, h: f64, x: Point) -> f64 {
        let r = x.dist(self.pole) / self.radius;
        h * r.min(1.0).powf(self.exponent)
    }
}

/// Everything the mesher needs beyond the domain.
#[derive(Debug, Clone)]
pub struct MeshRequest {
    pub h: f64,
    pub grading: Option<PoleGrading>,
    /// Cuts to resolve as chains of mesh edges.
    pub cuts: Vec<Cut>,
    /// Mesh half of the domain and reflect it across this axis.
    pub mirror: Option<Axis>,
    pub max_vertices: usize,
}

impl MeshRequest {
    pub fn new(h: f64) -> Self {
        Self { h, grading: None, cuts: Vec::new(), mirror: None, max_vertices: DEFAULT_MAX_VERTICES }
    }
}

/// Conforming triangulation with counter-clockwise triangles.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    /// Vertex lies on the domain boundary.
    pub boundary: Vec<bool>,
    pub pole: Option<usize>,
    /// Distance from each vertex to the pole (empty without a pole).
    pub pole_distance: Vec<f64>,
}

/// Triangulates `domain` with target edge length `h`, optionally graded
/// towards a pole. The pole (if any) becomes a mesh vertex.
pub fn triangulate(domain: &Domain, h: f64, grading: Option<&PoleGrading>) -> Result<Mesh> {
    let mut req = MeshRequest::new(h);
    req.grading = grading.copied();
    triangulate_with(domain, &req)
}

struct Pslg {
    pts: Vec<Point>,
    corner: Vec<bool>,
    segs: Vec<(usize, usize, Seg)>,
    tol: f64,
}

impl Pslg {
    fn vertex(&mut self, p: Point, corner: bool) -> usize {
        if let Some(i) = self.pts.iter().position(|q| q.dist(p) <= self.tol) {
            self.corner[i] |= corner;
            return i;
        }
        self.pts.push(p);
        self.corner.push(corner);
        self.pts.len() - 1
    }

    /// Adds a piece split into `n` equal parts.
    fn piece(&mut self, pc: &Piece, kind: SegKind, h: f64) {
        let geom = match *pc {
            Piece::Line { .. } => SegGeom::Straight,
            Piece::Arc { center, radius, .. } => SegGeom::Arc { center, radius },
        };
        let mut n = (pc.length() / h).ceil().max(1.0) as usize;
        if let Piece::Arc { from, to, .. } = *pc {
            n = n.max(((to - from) / (std::f64::consts::PI / 8.0)).ceil() as usize);
        }
        let mut prev = self.vertex(pc.start(), true);
        for k in 1..=n {
            let p = pc.at(k as f64 / n as f64);
            let cur = self.vertex(p, k == n);
            if cur != prev {
                self.segs.push((prev, cur, Seg { kind, geom }));
            }
            prev = cur;
        }
    }
}

fn split_pieces_at(pieces: &mut Vec<Piece>, q: Point, tol: f64) -> Result<()> {
    for i in 0..pieces.len() {
        let (c, s) = pieces[i].closest(q);
        if c.dist(q) <= tol {
            if pieces[i].start().dist(q) <= tol || pieces[i].end().dist(q) <= tol {
                return Ok(());
            }
            let (a, b) = pieces[i].split(s);
            pieces[i] = a;
            pieces.insert(i + 1, b);
            return Ok(());
        }
    }
    Err(Error::Mesh(format!("point ({}, {}) is not on the boundary", q.x, q.y)))
}

/// Full mesher entry point.
pub fn triangulate_with(domain: &Domain, req: &MeshRequest) -> Result<Mesh> {
    if !(req.h > 0.0) || !req.h.is_finite() {
        return Err(Error::Precondition(format!("target edge length must be positive, got {}", req.h)));
    }
    if let Some(g) = &req.grading {
        if !(g.exponent > 0.0 && g.exponent <= 1.0) {
            return Err(Error::Precondition(format!("grading exponent must lie in (0, 1], got {}", g.exponent)));
        }
        if !(g.radius > 0.0) {
            return Err(Error::Precondition("grading radius must be positive".into()));
        }
        if !domain.is_interior(g.pole) {
            return Err(Error::Precondition("graded pole must be interior".into()));
        }
    }
    let tol = 1e-10 * domain.scale.max(1.0);
    let mut pieces = domain.pieces.clone();
    for c in &req.cuts {
        c.validate(domain)?;
        split_pieces_at(&mut pieces, c.end(), tol)?;
    }

    let mut pslg = Pslg { pts: Vec::new(), corner: Vec::new(), segs: Vec::new(), tol };
    let mut mirror_origin = None;
    if let Some(ax) = &req.mirror {
        let origin = req.grading.map(|g| g.pole).unwrap_or(ax.point);
        if !ax.contains(origin) || !domain.is_interior(origin) {
            return Err(Error::Precondition("mirror axis must pass through an interior pole".into()));
        }
        let qp = domain.ray_exit(origin, ax.dir).ok_or_else(|| Error::Mesh("axis misses boundary".into()))?;
        let qm = domain.ray_exit(origin, -ax.dir).ok_or_else(|| Error::Mesh("axis misses boundary".into()))?;
        split_pieces_at(&mut pieces, qp, tol)?;
        split_pieces_at(&mut pieces, qm, tol)?;
        let n = ax.normal();
        pieces.retain(|pc| (pc.at(0.5) - ax.point).dot(n) <= tol);
        for c in &req.cuts {
            if !c.points.iter().all(|p| ax.contains(*p)) {
                return Err(Error::Precondition("mirrored meshes only support cuts on the axis".into()));
            }
        }
        mirror_origin = Some((qm, origin, qp));
    }

    for pc in &pieces {
        pslg.piece(pc, SegKind::Boundary, req.h);
    }
    if let Some((qm, origin, qp)) = mirror_origin {
        pslg.piece(&Piece::Line { a: qm, b: origin }, SegKind::Mirror, req.h);
        pslg.piece(&Piece::Line { a: origin, b: qp }, SegKind::Mirror, req.h);
    }
    if let Some(g) = &req.grading {
        pslg.vertex(g.pole, true);
    }
    if req.mirror.is_none() {
        for c in &req.cuts {
            for w in c.points.windows(2) {
                pslg.piece(&Piece::Line { a: w[0], b: w[1] }, SegKind::Cut, req.h);
            }
        }
    }

    let (lo, hi) = domain.bounding_box();
    let mut cdt = Cdt::new(lo, hi, req.max_vertices);
    let mut ids = Vec::with_capacity(pslg.pts.len());
    for &p in &pslg.pts {
        ids.push(cdt.insert(p)?);
    }
    for (i, &c) in pslg.corner.iter().enumerate() {
        cdt.input[ids[i]] = c;
    }
    for &(a, b, seg) in &pslg.segs {
        cdt.add_segment(ids[a], ids[b], seg)?;
    }
    cdt.classify();
    let h = req.h;
    let grading = req.grading;
    let size = move |x: Point| match &grading {
        Some(g) => g.size(h, x),
        None => h,
    };
    cdt.refine(&RefineParams {
        size: &size,
        max_ratio: 2f64.sqrt(),
        min_edge: 1e-4 * h,
    })?;

    let boundary_old = cdt.seg_vertices(SegKind::Boundary);
    let mirror_old = cdt.seg_vertices(SegKind::Mirror);
    let (pts, tris, map) = cdt.extract();
    let mut boundary = vec![false; pts.len()];
    let mut on_mirror = vec![false; pts.len()];
    for (old, &new) in map.iter().enumerate() {
        if new != cdt::NONE {
            boundary[new] = boundary_old[old];
            on_mirror[new] = mirror_old[old];
        }
    }

    let (pts, tris, boundary) = match &req.mirror {
        None => (pts, tris, boundary),
        Some(ax) => reflect(ax, pts, tris, boundary, &on_mirror),
    };
    if pts.len() > req.max_vertices {
        return Err(Error::BudgetExceeded { vertices: pts.len(), cap: req.max_vertices });
    }
    let mut mesh = Mesh { vertices: pts, triangles: tris, boundary, pole: None, pole_distance: Vec::new() };
    if let Some(g) = &req.grading {
        mesh.attach_pole(g.pole)?;
    }
    mesh.check()?;
    Ok(mesh)
}

fn reflect(
    ax: &Axis,
    pts: Vec<Point>,
    tris: Vec<[usize; 3]>,
    boundary: Vec<bool>,
    on_mirror: &[bool],
) -> (Vec<Point>, Vec<[usize; 3]>, Vec<bool>) {
    let n = pts.len();
    let mut image = vec![0usize; n];
    let mut out_pts = pts.clone();
    let mut out_b = boundary.clone();
    for i in 0..n {
        if on_mirror[i] {
            image[i] = i;
        } else {
            image[i] = out_pts.len();
            out_pts.push(ax.reflect(pts[i]));
            out_b.push(boundary[i]);
        }
    }
    let mut out_t = tris.clone();
    for t in &tris {
        out_t.push([image[t[0]], image[t[2]], image[t[1]]]);
    }
    (out_pts, out_t, out_b)
}

impl Mesh {
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// Sorted list of undirected edges.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        edge_list(&self.triangles)
    }

    pub fn area(&self) -> f64 {
        self.triangles.iter().map(|t| tri_area(&self.vertices, t)).sum()
    }

    /// Makes the vertex at `p` the pole and fills the distance cache.
    pub fn attach_pole(&mut self, p: Point) -> Result<()> {
        let idx = self
            .vertices
            .iter()
            .position(|q| q.dist(p) <= 1e-12)
            .ok_or_else(|| Error::Mesh("pole is not a mesh vertex".into()))?;
        self.pole = Some(idx);
        self.pole_distance = self.vertices.iter().map(|q| q.dist(p)).collect();
        Ok(())
    }

    /// Smallest interior angle over all triangles, in degrees.
    pub fn min_angle(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| tri_min_angle(&self.vertices, t))
            .fold(f64::INFINITY, f64::min)
    }

    /// Validates orientation, conformity and the Euler relation.
    pub fn check(&self) -> Result<()> {
        for (i, t) in self.triangles.iter().enumerate() {
            if !(tri_area(&self.vertices, t) > 0.0) {
                return Err(Error::Mesh(format!("triangle {i} has non-positive area")));
            }
        }
        let mut count: HashMap<(usize, usize), usize> = HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                *count.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        if count.values().any(|&c| c > 2) {
            return Err(Error::Mesh("edge shared by more than two triangles".into()));
        }
        let (v, e, f) = (self.vertices.len() as i64, count.len() as i64, self.triangles.len() as i64);
        if v - e + f + 1 != 2 {
            return Err(Error::Mesh(format!("Euler relation fails: V={v} E={e} T={f}")));
        }
        Ok(())
    }

    /// Vertex adjacency lists, sorted.
    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for (a, b) in self.edges() {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// Red refinement: every triangle split into four. New boundary
    /// vertices stay on the straight boundary edges.
    pub fn refine_uniform(&self) -> Mesh {
        let single = single_edges(&self.triangles);
        let mut vertices = self.vertices.clone();
        let mut boundary = self.boundary.clone();
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut tris = Vec::with_capacity(self.triangles.len() * 4);
        for t in &self.triangles {
            let mut m = [0usize; 3];
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                m[k] = *mid.entry(key).or_insert_with(|| {
                    vertices.push(self.vertices[a].lerp(self.vertices[b], 0.5));
                    boundary.push(single.contains_key(&key) && self.boundary[a] && self.boundary[b]);
                    vertices.len() - 1
                });
            }
            tris.push([t[0], m[0], m[2]]);
            tris.push([m[0], t[1], m[1]]);
            tris.push([m[2], m[1], t[2]]);
            tris.push([m[0], m[1], m[2]]);
        }
        let mut out = Mesh { vertices, triangles: tris, boundary, pole: None, pole_distance: Vec::new() };
        if let Some(p) = self.pole {
            out.attach_pole(self.vertices[p]).expect("pole survives refinement");
        }
        out
    }

    /// Moves every vertex by `f`, keeping the topology.
    pub fn transported(&self, f: impl Fn(Point) -> Point) -> Mesh {
        let vertices: Vec<Point> = self.vertices.iter().map(|&p| f(p)).collect();
        let pole_distance = match self.pole {
            Some(p) => vertices.iter().map(|q| q.dist(vertices[p])).collect(),
            None => Vec::new(),
        };
        Mesh { vertices, pole_distance, ..self.clone() }
    }
}

pub(crate) fn tri_area(pts: &[Point], t: &[usize; 3]) -> f64 {
    0.5 * (pts[t[1]] - pts[t[0]]).cross(pts[t[2]] - pts[t[0]])
}

pub(crate) fn tri_min_angle(pts: &[Point], t: &[usize; 3]) -> f64 {
    (0..3)
        .map(|i| {
            let (a, b, c) = (pts[t[i]], pts[t[(i + 1) % 3]], pts[t[(i + 2) % 3]]);
            let (u, v) = (b - a, c - a);
            u.cross(v).abs().atan2(u.dot(v)).to_degrees()
        })
        .fold(f64::INFINITY, f64::min)
}

pub(crate) fn edge_list(tris: &[[usize; 3]]) -> Vec<(usize, usize)> {
    let mut e: Vec<(usize, usize)> = tris
        .iter()
        .flat_map(|t| (0..3).map(move |k| (t[k].min(t[(k + 1) % 3]), t[k].max(t[(k + 1) % 3]))))
        .collect();
    e.sort_unstable();
    e.dedup();
    e
}

/// Edges belonging to exactly one triangle, with that triangle.
pub(crate) fn single_edges(tris: &[[usize; 3]]) -> HashMap<(usize, usize), usize> {
    let mut count: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
    for (ti, t) in tris.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            let e = count.entry((a.min(b), a.max(b))).or_insert((0, ti));
            e.0 += 1;
        }
    }
    count.into_iter().filter(|(_, (c, _))| *c == 1).map(|(k, (_, t))| (k, t)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{branch_cut, build_domain, DomainSpec, Pole};

    fn square() -> Domain {
        build_domain(&DomainSpec::UnitSquare).unwrap()
    }

    #[test]
    fn coarse_square_sanity() {
        let m = triangulate(&square(), 0.5, None).unwrap();
        assert!(m.triangles.len() >= 8);
        let (v, e, t) = (m.vertices.len() as i64, m.edges().len() as i64, m.triangles.len() as i64);
        assert_eq!(v - e + t + 1, 2);
        assert!((m.area() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_degenerate_h() {
        assert!(matches!(triangulate(&square(), 0.0, None), Err(Error::Precondition(_))));
        assert!(triangulate(&square(), f64::NAN, None).is_err());
    }

    #[test]
    fn budget_cap_is_enforced() {
        let mut req = MeshRequest::new(0.01);
        req.max_vertices = 500;
        assert!(matches!(triangulate_with(&square(), &req), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn disk_grading_reaches_small_edges_near_pole() {
        let disk = build_domain(&DomainSpec::UnitDisk).unwrap();
        let g = PoleGrading::standard(&disk, Point::new(0.0, 0.0));
        let m = triangulate(&disk, 0.05, Some(&g)).unwrap();
        let p = m.pole.unwrap();
        let shortest = m
            .edges()
            .into_iter()
            .filter(|&(a, b)| a == p || b == p)
            .map(|(a, b)| m.vertices[a].dist(m.vertices[b]))
            .fold(f64::INFINITY, f64::min);
        assert!(shortest < 0.05 * 0.05f64.sqrt(), "shortest pole edge {shortest}");
        assert!(m.min_angle() >= 20.0, "min angle {}", m.min_angle());
    }

    #[test]
    fn quality_and_area_on_square_with_cut() {
        let d = square();
        let pole = Pole::new(0.3, 0.4);
        let cut = branch_cut(&d, &pole).unwrap();
        let mut req = MeshRequest::new(0.08);
        req.grading = Some(PoleGrading::standard(&d, pole.position));
        req.cuts = vec![cut];
        let m = triangulate_with(&d, &req).unwrap();
        assert!((m.area() - 1.0).abs() < 1e-12);
        assert!(m.min_angle() >= 20.0, "min angle {}", m.min_angle());
    }

    #[test]
    fn mirrored_mesh_is_symmetric() {
        let d = square();
        let pole = Pole::new(0.5, 0.5);
        let cut = branch_cut(&d, &pole).unwrap();
        let ax = d.symmetry_axes()[1];
        let mut req = MeshRequest::new(0.1);
        req.grading = Some(PoleGrading::standard(&d, pole.position));
        req.cuts = vec![cut];
        req.mirror = Some(ax);
        let m = triangulate_with(&d, &req).unwrap();
        assert!((m.area() - 1.0).abs() < 1e-12);
        for p in &m.vertices {
            let q = ax.reflect(*p);
            assert!(m.vertices.iter().any(|r| r.dist(q) < 1e-12));
        }
    }

    #[test]
    fn refinement_never_reduces_dofs() {
        let d = square();
        let a = triangulate(&d, 0.2, None).unwrap();
        let b = triangulate(&d, 0.1, None).unwrap();
        assert!(b.vertices.len() >= a.vertices.len());
        let r = a.refine_uniform();
        r.check().unwrap();
        assert_eq!(r.triangles.len(), 4 * a.triangles.len());
        assert!((r.area() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn deterministic_output() {
        let d = build_domain(&DomainSpec::UnitDisk).unwrap();
        let g = PoleGrading::standard(&d, Point::new(0.2, 0.1));
        let a = triangulate(&d, 0.1, Some(&g)).unwrap();
        let b = triangulate(&d, 0.1, Some(&g)).unwrap();
        assert_eq!(a, b);
    }
}
