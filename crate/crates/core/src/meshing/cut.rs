use crate::error::{Error, Result};
use crate::geometry::{Cut, Point, Side};

use super::Mesh;

/// A mesh slit along a branch cut. Interior cut vertices are duplicated;
/// triangles on the left of the cut (walking from the pole outwards) use
/// the copies. The pole and the boundary end of the cut stay single.
#[derive(Debug, Clone)]
pub struct CutMesh {
    pub base: Mesh,
    pub cut: Cut,
    /// Base vertex indices along the cut, pole first, boundary end last.
    pub path: Vec<usize>,
    /// Base vertices followed by one copy per interior cut vertex.
    pub vertices: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    /// Side of the cut for triangles touching a non-pole cut vertex.
    pub side: Vec<Option<Side>>,
    pub boundary: Vec<bool>,
    pub pole: usize,
}

impl CutMesh {
    /// Number of duplicated cut vertices.
    pub fn num_duplicated(&self) -> usize {
        self.path.len().saturating_sub(2)
    }

    /// Base vertex each cut-mesh vertex was copied from.
    pub fn base_vertex(&self) -> Vec<usize> {
        let nb = self.base.vertices.len();
        let mut out: Vec<usize> = (0..nb).collect();
        out.extend(self.path[1..self.path.len() - 1].iter().copied());
        out
    }

    /// (right copy, left copy) for each duplicated vertex.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let nb = self.base.vertices.len();
        self.path[1..self.path.len() - 1]
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, nb + i))
            .collect()
    }

    /// Moves the vertices of base and cut mesh alike.
    pub fn transported(&self, f: impl Fn(Point) -> Point) -> CutMesh {
        let base = self.base.transported(&f);
        let vertices = self.vertices.iter().map(|&p| f(p)).collect();
        let cut = Cut { points: self.path.iter().map(|&v| base.vertices[v]).collect(), rule: self.cut.rule };
        CutMesh { base, cut, vertices, ..self.clone() }
    }

    /// Number of times a loop around the pole passes between triangles
    /// that no longer share an edge. Equals one for a proper slit.
    pub fn pole_crossings(&self) -> usize {
        let p = self.pole;
        let mut crossings = 0;
        let around: Vec<usize> = (0..self.triangles.len()).filter(|&t| self.base.triangles[t].contains(&p)).collect();
        for (i, &t) in around.iter().enumerate() {
            for &u in &around[i + 1..] {
                let shared_base = self.base.triangles[t].iter().filter(|v| self.base.triangles[u].contains(v)).count();
                if shared_base != 2 {
                    continue;
                }
                let shared = self.triangles[t].iter().filter(|v| self.triangles[u].contains(v)).count();
                if shared != 2 {
                    crossings += 1;
                }
            }
        }
        crossings
    }
}

/// Slits `mesh` along `cut`. The cut must already be a chain of mesh edges.
pub fn insert_cut(mesh: &Mesh, cut: &Cut) -> Result<CutMesh> {
    let pole = mesh
        .pole
        .ok_or_else(|| Error::Precondition("mesh has no pole vertex".into()))?;
    if mesh.vertices[pole].dist(cut.pole()) > 1e-12 {
        return Err(Error::Precondition("cut does not start at the mesh pole".into()));
    }
    let path = trace(mesh, cut)?;
    let nb = mesh.vertices.len();
    let pos: Vec<Option<usize>> = {
        let mut pos = vec![None; nb];
        for (i, &v) in path.iter().enumerate().skip(1) {
            pos[v] = Some(i);
        }
        pos
    };
    let pts = &mesh.vertices;
    let mut side = vec![None; mesh.triangles.len()];
    let mut triangles = mesh.triangles.clone();
    for (ti, t) in mesh.triangles.iter().enumerate() {
        let g = (pts[t[0]] + pts[t[1]] + pts[t[2]]) * (1.0 / 3.0);
        let mut s: Option<Side> = None;
        for &v in t {
            let Some(i) = pos[v] else { continue };
            let here = side_at(pts, &path, i, g);
            if let Some(prev) = s {
                if prev != here {
                    return Err(Error::Mesh(format!("triangle {ti} straddles the cut")));
                }
            }
            s = Some(here);
        }
        side[ti] = s;
        if s == Some(Side::Left) {
            for k in 0..3 {
                if let Some(i) = pos[t[k]] {
                    if i < path.len() - 1 {
                        triangles[ti][k] = nb + i - 1;
                    }
                }
            }
        }
    }
    let mut vertices = mesh.vertices.clone();
    let mut boundary = mesh.boundary.clone();
    for &v in &path[1..path.len() - 1] {
        vertices.push(mesh.vertices[v]);
        boundary.push(false);
    }
    Ok(CutMesh { base: mesh.clone(), cut: cut.clone(), path, vertices, triangles, side, boundary, pole })
}

/// Side of centroid `g` relative to the cut at path index `i`.
fn side_at(pts: &[Point], path: &[usize], i: usize, g: Point) -> Side {
    let v = pts[path[i]];
    let back = pts[path[i - 1]] - v;
    if i + 1 == path.len() {
        return if (-back).cross(g - v) > 0.0 { Side::Left } else { Side::Right };
    }
    let fwd = pts[path[i + 1]] - v;
    // Angles measured counter-clockwise from the forward direction.
    let to_g = (g - v).angle() - fwd.angle();
    let to_back = back.angle() - fwd.angle();
    if to_g.rem_euclid(std::f64::consts::TAU) < to_back.rem_euclid(std::f64::consts::TAU) {
        Side::Left
    } else {
        Side::Right
    }
}

/// Follows mesh edges along the cut polyline from the pole to the boundary.
fn trace(mesh: &Mesh, cut: &Cut) -> Result<Vec<usize>> {
    let adj = mesh.neighbors();
    let tol = 1e-9 * cut.length().max(1.0);
    let pole = mesh.pole.unwrap();
    let mut path = vec![pole];
    let mut seg = 0;
    let pts = &cut.points;
    let mut cur = pole;
    loop {
        let here = mesh.vertices[cur];
        while seg + 1 < pts.len() && here.dist(pts[seg + 1]) <= tol {
            seg += 1;
        }
        if seg + 1 == pts.len() {
            if !mesh.boundary[cur] {
                return Err(Error::CutNotAligned("cut end is not a boundary vertex".into()));
            }
            return Ok(path);
        }
        let (a, b) = (pts[seg], pts[seg + 1]);
        let d = b - a;
        let len2 = d.dot(d);
        let t_here = (here - a).dot(d) / len2;
        let mut best: Option<(f64, usize)> = None;
        for &w in &adj[cur] {
            let q = mesh.vertices[w];
            let t = (q - a).dot(d) / len2;
            let off = (q - a).cross(d).abs() / len2.sqrt();
            if off <= tol && t > t_here + 1e-14 && t <= 1.0 + tol {
                if best.map_or(true, |(bt, _)| t < bt) {
                    best = Some((t, w));
                }
            }
        }
        match best {
            Some((_, w)) => {
                path.push(w);
                cur = w;
            }
            None => {
                return Err(Error::CutNotAligned(format!(
                    "no mesh edge continues the cut from ({:.6}, {:.6})",
                    here.x, here.y
                )))
            }
        }
        if path.len() > mesh.vertices.len() {
            return Err(Error::CutNotAligned("cut tracing does not terminate".into()));
        }
    }
}
