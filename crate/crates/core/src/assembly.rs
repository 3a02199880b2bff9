//! Lagrange P1/P2 stiffness and mass matrices, and the reduction that
//! eliminates Dirichlet unknowns and folds duplicated cut nodes onto their
//! masters with sign -1.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::meshing::{single_edges, CoverMesh, CutMesh, Mesh};
use crate::sparse::SparseSym;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Order {
    P1,
    P2,
}

impl Order {
    pub fn from_degree(d: u8) -> Result<Order> {
        match d {
            1 => Ok(Order::P1),
            2 => Ok(Order::P2),
            _ => Err(Error::Precondition(format!("element order must be 1 or 2, got {d}"))),
        }
    }

    pub fn degree(self) -> u8 {
        match self {
            Order::P1 => 1,
            Order::P2 => 2,
        }
    }

    pub fn local_dofs(self) -> usize {
        match self {
            Order::P1 => 3,
            Order::P2 => 6,
        }
    }
}

/// What the assembler needs from a triangulation.
pub trait FeMesh {
    fn points(&self) -> &[Point];
    fn elements(&self) -> &[[usize; 3]];
    fn boundary(&self) -> &[bool];
    /// Interior vertices held at zero.
    fn pinned(&self) -> Vec<usize> {
        Vec::new()
    }
    /// Original of every vertex; copies carry the value of their original
    /// with the opposite sign.
    fn identification(&self) -> Option<Vec<usize>> {
        None
    }
}

impl FeMesh for Mesh {
    fn points(&self) -> &[Point] {
        &self.vertices
    }
    fn elements(&self) -> &[[usize; 3]] {
        &self.triangles
    }
    fn boundary(&self) -> &[bool] {
        &self.boundary
    }
}

impl FeMesh for CutMesh {
    fn points(&self) -> &[Point] {
        &self.vertices
    }
    fn elements(&self) -> &[[usize; 3]] {
        &self.triangles
    }
    fn boundary(&self) -> &[bool] {
        &self.boundary
    }
    fn pinned(&self) -> Vec<usize> {
        vec![self.pole]
    }
    fn identification(&self) -> Option<Vec<usize>> {
        Some(self.base_vertex())
    }
}

impl FeMesh for CoverMesh {
    fn points(&self) -> &[Point] {
        &self.vertices
    }
    fn elements(&self) -> &[[usize; 3]] {
        &self.triangles
    }
    fn boundary(&self) -> &[bool] {
        &self.boundary
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DofKind {
    Free,
    Dirichlet,
    Slave { master: usize, sign: f64 },
}

/// Global numbering: vertex DOFs first, then (P2) one DOF per edge in
/// sorted edge order.
#[derive(Debug, Clone)]
pub struct DofMap {
    pub order: Order,
    pub num_vertices: usize,
    pub edges: Vec<(usize, usize)>,
    pub coords: Vec<Point>,
    pub kinds: Vec<DofKind>,
    /// Element DOFs, `order.local_dofs()` per element.
    pub elem: Vec<usize>,
    pub triangles: Vec<[usize; 3]>,
    /// Position in the reduced system with sign, for non-Dirichlet DOFs.
    pub reduced: Vec<Option<(usize, f64)>>,
    pub num_free: usize,
}

impl DofMap {
    pub fn new(mesh: &impl FeMesh, order: Order) -> Result<DofMap> {
        let pts = mesh.points();
        let tris = mesh.elements();
        let bnd = mesh.boundary();
        let nv = pts.len();
        let ident = mesh.identification().unwrap_or_else(|| (0..nv).collect());
        let mut kinds = vec![DofKind::Free; nv];
        for v in 0..nv {
            if bnd[v] {
                kinds[v] = DofKind::Dirichlet;
            } else if ident[v] != v {
                kinds[v] = DofKind::Slave { master: ident[v], sign: -1.0 };
            }
        }
        for v in mesh.pinned() {
            kinds[v] = DofKind::Dirichlet;
        }
        let mut coords = pts.to_vec();
        let mut edges = Vec::new();
        let mut elem = Vec::with_capacity(tris.len() * order.local_dofs());
        match order {
            Order::P1 => {
                for t in tris {
                    elem.extend_from_slice(t);
                }
            }
            Order::P2 => {
                edges = crate::meshing::edge_list(tris);
                let index: HashMap<(usize, usize), usize> =
                    edges.iter().enumerate().map(|(i, &e)| (e, nv + i)).collect();
                let single = single_edges(tris);
                for &(a, b) in &edges {
                    coords.push(pts[a].lerp(pts[b], 0.5));
                    let kind = if single.contains_key(&(a, b)) && bnd[a] && bnd[b] {
                        DofKind::Dirichlet
                    } else {
                        let (ia, ib) = (ident[a], ident[b]);
                        let key = (ia.min(ib), ia.max(ib));
                        match index.get(&key) {
                            Some(&m) if key != (a, b) => DofKind::Slave { master: m, sign: -1.0 },
                            _ => DofKind::Free,
                        }
                    };
                    kinds.push(kind);
                }
                for t in tris {
                    elem.extend_from_slice(t);
                    for k in 0..3 {
                        let (a, b) = (t[k], t[(k + 1) % 3]);
                        elem.push(index[&(a.min(b), a.max(b))]);
                    }
                }
            }
        }
        let mut reduced = vec![None; kinds.len()];
        let mut num_free = 0;
        for (i, k) in kinds.iter().enumerate() {
            if *k == DofKind::Free {
                reduced[i] = Some((num_free, 1.0));
                num_free += 1;
            }
        }
        for (i, k) in kinds.iter().enumerate() {
            if let DofKind::Slave { master, sign } = *k {
                reduced[i] = match kinds[master] {
                    DofKind::Free => reduced[master].map(|(r, s)| (r, s * sign)),
                    DofKind::Dirichlet => None,
                    DofKind::Slave { .. } => {
                        return Err(Error::Precondition("chained node identification".into()))
                    }
                };
            }
        }
        Ok(DofMap {
            order,
            num_vertices: nv,
            edges,
            coords,
            kinds,
            elem,
            triangles: tris.to_vec(),
            reduced,
            num_free,
        })
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn element(&self, t: usize) -> &[usize] {
        let n = self.order.local_dofs();
        &self.elem[t * n..(t + 1) * n]
    }

    /// Full DOF vector from a reduced one.
    pub fn expand(&self, x: &[f64]) -> Vec<f64> {
        self.reduced.iter().map(|r| r.map_or(0.0, |(i, s)| s * x[i])).collect()
    }

    /// Lifts a vertex permutation to a DOF permutation.
    pub fn permutation(&self, vperm: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = vperm.to_vec();
        if self.order == Order::P2 {
            let nv = self.num_vertices;
            let index: HashMap<(usize, usize), usize> =
                self.edges.iter().enumerate().map(|(i, &e)| (e, nv + i)).collect();
            for &(a, b) in &self.edges {
                let (pa, pb) = (vperm[a], vperm[b]);
                out.push(index[&(pa.min(pb), pa.max(pb))]);
            }
        }
        out
    }

    /// `P^T A P` where `P` maps reduced unknowns to all DOFs.
    pub fn reduce(&self, a: &SparseSym) -> Result<SparseSym> {
        if self.num_free == 0 {
            return Err(Error::EmptySystem);
        }
        let mut t = Vec::with_capacity(a.nnz());
        for (i, j, v) in a.iter() {
            if let (Some((ri, si)), Some((rj, sj))) = (self.reduced[i], self.reduced[j]) {
                let w = si * sj * v;
                if i != j && ri == rj {
                    t.push((ri, rj, 2.0 * w));
                } else {
                    t.push((ri, rj, w));
                }
            }
        }
        Ok(SparseSym::from_triplets(self.num_free, &t))
    }
}

/// Quadrature rules on the reference triangle: barycentric points and
/// weights summing to one.
fn rule(exact_degree: u8) -> &'static [([f64; 3], f64)] {
    const THREE: [([f64; 3], f64); 3] = [
        ([2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0], 1.0 / 3.0),
        ([1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0], 1.0 / 3.0),
        ([1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0], 1.0 / 3.0),
    ];
    const A: f64 = 0.445_948_490_915_965;
    const B: f64 = 0.091_576_213_509_771;
    const WA: f64 = 0.223_381_589_678_011;
    const WB: f64 = 0.109_951_743_655_322;
    const SIX: [([f64; 3], f64); 6] = [
        ([1.0 - 2.0 * A, A, A], WA),
        ([A, 1.0 - 2.0 * A, A], WA),
        ([A, A, 1.0 - 2.0 * A], WA),
        ([1.0 - 2.0 * B, B, B], WB),
        ([B, 1.0 - 2.0 * B, B], WB),
        ([B, B, 1.0 - 2.0 * B], WB),
    ];
    if exact_degree <= 2 {
        &THREE
    } else {
        &SIX
    }
}

/// Basis values and gradients at barycentric point `l`.
fn basis(order: Order, l: [f64; 3], g: [Point; 3], val: &mut [f64], grad: &mut [Point]) {
    match order {
        Order::P1 => {
            val[..3].copy_from_slice(&l);
            grad[..3].copy_from_slice(&g);
        }
        Order::P2 => {
            for i in 0..3 {
                val[i] = l[i] * (2.0 * l[i] - 1.0);
                grad[i] = g[i] * (4.0 * l[i] - 1.0);
                let j = (i + 1) % 3;
                val[3 + i] = 4.0 * l[i] * l[j];
                grad[3 + i] = (g[i] * l[j] + g[j] * l[i]) * 4.0;
            }
        }
    }
}

fn bary_gradients(p: [Point; 3]) -> (f64, [Point; 3]) {
    let det = (p[1] - p[0]).cross(p[2] - p[0]);
    let g = std::array::from_fn(|i| {
        let (a, b) = (p[(i + 1) % 3], p[(i + 2) % 3]);
        Point::new(a.y - b.y, b.x - a.x) * (1.0 / det)
    });
    (det, g)
}

/// Local stiffness and mass matrices, row-major.
pub fn element_matrices(order: Order, p: [Point; 3]) -> Option<(Vec<f64>, Vec<f64>)> {
    let (det, g) = bary_gradients(p);
    if !(det > 0.0) {
        return None;
    }
    let area = 0.5 * det;
    let n = order.local_dofs();
    let mut k = vec![0.0; n * n];
    let mut m = vec![0.0; n * n];
    let mut val = [0.0; 6];
    let mut grad = [Point::new(0.0, 0.0); 6];
    for &(l, w) in rule(2 * (order.degree() - 1)) {
        basis(order, l, g, &mut val, &mut grad);
        for a in 0..n {
            for b in 0..n {
                k[a * n + b] += w * area * grad[a].dot(grad[b]);
            }
        }
    }
    for &(l, w) in rule(2 * order.degree()) {
        basis(order, l, g, &mut val, &mut grad);
        for a in 0..n {
            for b in 0..n {
                m[a * n + b] += w * area * val[a] * val[b];
            }
        }
    }
    Some((k, m))
}

/// Assembled, unreduced stiffness and mass matrices with their DOF map.
#[derive(Debug, Clone)]
pub struct System {
    pub k: SparseSym,
    pub m: SparseSym,
    pub dofs: DofMap,
}

impl System {
    /// Reduced `(K, M)` on the free unknowns.
    pub fn reduced(&self) -> Result<(SparseSym, SparseSym)> {
        let k = self.dofs.reduce(&self.k)?;
        let m = self.dofs.reduce(&self.m)?;
        if m.diag().iter().any(|d| !(*d > 0.0)) {
            return Err(Error::Precondition("reduced mass matrix is singular".into()));
        }
        Ok((k, m))
    }
}

/// Element matrices are computed in parallel and summed in element order,
/// so the result does not depend on the thread count.
pub fn assemble(mesh: &impl FeMesh, order: Order) -> Result<System> {
    let dofs = DofMap::new(mesh, order)?;
    let pts = mesh.points();
    let tris = mesh.elements();
    let local: Vec<Option<(Vec<f64>, Vec<f64>)>> = tris
        .par_iter()
        .map(|t| element_matrices(order, [pts[t[0]], pts[t[1]], pts[t[2]]]))
        .collect();
    let n = order.local_dofs();
    let mut tk = Vec::with_capacity(tris.len() * n * (n + 1) / 2);
    let mut tm = Vec::with_capacity(tk.capacity());
    for (ti, loc) in local.iter().enumerate() {
        let (ke, me) = loc.as_ref().ok_or(Error::InvertedElement(ti))?;
        let d = dofs.element(ti);
        for a in 0..n {
            for b in 0..=a {
                tk.push((d[a], d[b], ke[a * n + b]));
                tm.push((d[a], d[b], me[a * n + b]));
            }
        }
    }
    let nd = dofs.len();
    Ok(System { k: SparseSym::from_triplets(nd, &tk), m: SparseSym::from_triplets(nd, &tm), dofs })
}

/// Bucket grid for locating the element containing a point.
#[derive(Debug, Clone)]
pub struct Locator {
    lo: Point,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<usize>>,
}

impl Locator {
    pub fn new(pts: &[Point], tris: &[[usize; 3]]) -> Locator {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in pts {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let span = (hi.x - lo.x).max(hi.y - lo.y).max(1e-300);
        let per_side = ((tris.len() as f64).sqrt().ceil() as usize).clamp(1, 1024);
        let cell = span / per_side as f64;
        let nx = (((hi.x - lo.x) / cell).floor() as usize + 1).min(per_side + 1);
        let ny = (((hi.y - lo.y) / cell).floor() as usize + 1).min(per_side + 1);
        let mut loc = Locator { lo, cell, nx, ny, buckets: vec![Vec::new(); nx * ny] };
        for (ti, t) in tris.iter().enumerate() {
            let (mut a, mut b) = (pts[t[0]], pts[t[0]]);
            for &v in &t[1..] {
                a = Point::new(a.x.min(pts[v].x), a.y.min(pts[v].y));
                b = Point::new(b.x.max(pts[v].x), b.y.max(pts[v].y));
            }
            let (i0, j0) = loc.cell_of(a);
            let (i1, j1) = loc.cell_of(b);
            for j in j0..=j1 {
                for i in i0..=i1 {
                    loc.buckets[j * nx + i].push(ti);
                }
            }
        }
        loc
    }

    fn cell_of(&self, p: Point) -> (usize, usize) {
        let i = ((p.x - self.lo.x) / self.cell).floor().clamp(0.0, (self.nx - 1) as f64) as usize;
        let j = ((p.y - self.lo.y) / self.cell).floor().clamp(0.0, (self.ny - 1) as f64) as usize;
        (i, j)
    }

    /// Element containing `p` and its barycentric coordinates.
    pub fn locate(&self, pts: &[Point], tris: &[[usize; 3]], p: Point) -> Option<(usize, [f64; 3])> {
        let (i, j) = self.cell_of(p);
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        for &ti in &self.buckets[j * self.nx + i] {
            let t = tris[ti];
            let (a, b, c) = (pts[t[0]], pts[t[1]], pts[t[2]]);
            let det = (b - a).cross(c - a);
            let l1 = (p - a).cross(c - a) / det;
            let l2 = (b - a).cross(p - a) / det;
            let l = [1.0 - l1 - l2, l1, l2];
            let worst = l.iter().copied().fold(f64::INFINITY, f64::min);
            if worst >= 0.0 {
                return Some((ti, l));
            }
            if best.as_ref().map_or(true, |bb| worst > bb.2) {
                best = Some((ti, l, worst));
            }
        }
        best.filter(|b| b.2 > -1e-9).map(|b| (b.0, b.1))
    }
}

/// A finite element function given by its full DOF vector.
#[derive(Debug, Clone)]
pub struct FeField {
    pub dofs: DofMap,
    pub values: Vec<f64>,
    pub points: Vec<Point>,
    locator: Locator,
}

impl FeField {
    pub fn new(dofs: DofMap, values: Vec<f64>, points: Vec<Point>) -> FeField {
        let locator = Locator::new(&points, &dofs.triangles);
        FeField { dofs, values, points, locator }
    }

    pub fn eval(&self, p: Point) -> Option<f64> {
        let (t, l) = self.locator.locate(&self.points, &self.dofs.triangles, p)?;
        let mut val = [0.0; 6];
        let mut grad = [Point::new(0.0, 0.0); 6];
        let g = [Point::new(0.0, 0.0); 3];
        basis(self.dofs.order, l, g, &mut val, &mut grad);
        let d = self.dofs.element(t);
        Some(d.iter().zip(&val).map(|(&i, v)| v * self.values[i]).sum())
    }

    /// Value at each vertex (P2 edge values ignored).
    pub fn vertex_values(&self) -> &[f64] {
        &self.values[..self.dofs.num_vertices]
    }
}
