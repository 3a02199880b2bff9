//! Constrained Delaunay triangulation with Ruppert-style refinement driven
//! by a size field.
//!
//! Triangles store their vertices counter-clockwise; edge `i` is the edge
//! opposite vertex `i` and `n[i]` is the neighbour across it. Three
//! "super" vertices enclose everything and are stripped on extraction.

use std::collections::{HashMap, VecDeque};

use robust::{incircle, orient2d, Coord};

use crate::error::{Error, Result};
use crate::geometry::Point;

pub(crate) const NONE: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum SegKind {
    /// Domain boundary: Dirichlet, blocks interior flood fill.
    Boundary,
    /// Symmetry line of a half-domain: blocks flood fill but is not Dirichlet.
    Mirror,
    /// Interior constraint (branch cut).
    Cut,
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum SegGeom {
    Straight,
    Arc { center: Point, radius: f64 },
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Seg {
    pub kind: SegKind,
    pub geom: SegGeom,
}

#[derive(Debug, Clone, Copy)]
struct Tri {
    v: [usize; 3],
    n: [usize; 3],
    alive: bool,
    interior: bool,
}

fn coord(p: Point) -> Coord<f64> {
    Coord { x: p.x, y: p.y }
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    orient2d(coord(a), coord(b), coord(c))
}

fn key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

pub(crate) struct RefineParams<'a> {
    /// Target edge length at a point.
    pub size: &'a dyn Fn(Point) -> f64,
    /// Circumradius-to-shortest-edge bound (sqrt 2 gives about 20.7 degrees).
    pub max_ratio: f64,
    /// Edges shorter than this are never split.
    pub min_edge: f64,
}

enum Walk {
    Inside(usize),
    Blocked(usize, usize),
}

pub(crate) struct Cdt {
    pub pts: Vec<Point>,
    tris: Vec<Tri>,
    free: Vec<usize>,
    vtri: Vec<usize>,
    segs: HashMap<(usize, usize), Seg>,
    pub input: Vec<bool>,
    hint: usize,
    stamp: Vec<u32>,
    epoch: u32,
    max_vertices: usize,
}

impl Cdt {
    /// Empty triangulation whose super triangle encloses the box `[lo, hi]`.
    pub fn new(lo: Point, hi: Point, max_vertices: usize) -> Self {
        let c = (lo + hi) * 0.5;
        let r = (hi - lo).norm().max(1e-3) * 20.0;
        let pts = vec![
            c + Point::new(-r, -r),
            c + Point::new(r * 1.5, -r * 0.8),
            c + Point::new(-r * 0.3, r * 1.7),
        ];
        let mut cdt = Cdt {
            pts,
            tris: Vec::new(),
            free: Vec::new(),
            vtri: vec![0; 3],
            segs: HashMap::new(),
            input: vec![true; 3],
            hint: 0,
            stamp: Vec::new(),
            epoch: 0,
            max_vertices: max_vertices + 3,
        };
        cdt.tris.push(Tri { v: [0, 1, 2], n: [NONE; 3], alive: true, interior: false });
        cdt.stamp.push(0);
        cdt
    }

    fn next_epoch(&mut self) -> u32 {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        self.epoch
    }

    fn in_circle(&self, t: usize, p: Point) -> bool {
        let v = self.tris[t].v;
        incircle(coord(self.pts[v[0]]), coord(self.pts[v[1]]), coord(self.pts[v[2]]), coord(p)) > 0.0
    }

    fn new_tri(&mut self, tri: Tri) -> usize {
        if let Some(t) = self.free.pop() {
            self.tris[t] = tri;
            t
        } else {
            self.tris.push(tri);
            self.stamp.push(0);
            self.tris.len() - 1
        }
    }

    /// Visibility walk to a triangle containing `p` (possibly on its edge).
    fn locate(&self, p: Point, start: usize) -> Result<usize> {
        let mut t = if self.tris.get(start).map_or(false, |t| t.alive) { start } else { self.any_alive() };
        let mut rot = 0usize;
        for _ in 0..4 * self.tris.len() + 16 {
            let tri = &self.tris[t];
            let mut moved = false;
            for k in 0..3 {
                let i = (k + rot) % 3;
                let a = self.pts[tri.v[(i + 1) % 3]];
                let b = self.pts[tri.v[(i + 2) % 3]];
                if orient(a, b, p) < 0.0 {
                    if tri.n[i] == NONE {
                        return Err(Error::Mesh("point outside the super triangle".into()));
                    }
                    t = tri.n[i];
                    moved = true;
                    break;
                }
            }
            if !moved {
                return Ok(t);
            }
            rot = rot.wrapping_add(1);
        }
        Err(Error::Mesh("point location did not terminate".into()))
    }

    fn any_alive(&self) -> usize {
        self.tris.iter().position(|t| t.alive).expect("triangulation is never empty")
    }

    /// Straight walk from the centroid of `t` towards `p`, stopping at constraints.
    fn walk_to(&self, t: usize, p: Point) -> Walk {
        let v = self.tris[t].v;
        let q = (self.pts[v[0]] + self.pts[v[1]] + self.pts[v[2]]) * (1.0 / 3.0);
        let mut cur = t;
        let mut prev = NONE;
        for _ in 0..self.tris.len() + 8 {
            let tri = self.tris[cur];
            let mut exit = None;
            for i in 0..3 {
                if tri.n[i] == prev && prev != NONE {
                    continue;
                }
                let (ia, ib) = (tri.v[(i + 1) % 3], tri.v[(i + 2) % 3]);
                let (a, b) = (self.pts[ia], self.pts[ib]);
                if orient(a, b, p) < 0.0 {
                    let s1 = orient(q, p, a);
                    let s2 = orient(q, p, b);
                    if s1 <= 0.0 && s2 >= 0.0 || exit.is_none() {
                        exit = Some(i);
                        if s1 <= 0.0 && s2 >= 0.0 {
                            break;
                        }
                    }
                }
            }
            match exit {
                None => return Walk::Inside(cur),
                Some(i) => {
                    let (ia, ib) = (tri.v[(i + 1) % 3], tri.v[(i + 2) % 3]);
                    if self.segs.contains_key(&key(ia, ib)) || tri.n[i] == NONE {
                        return Walk::Blocked(ia, ib);
                    }
                    prev = cur;
                    cur = tri.n[i];
                }
            }
        }
        Walk::Inside(cur)
    }

    /// Bowyer-Watson cavity of `p` seeded at triangle `t`, not crossing constraints.
    fn cavity(&mut self, p: Point, t: usize) -> Vec<usize> {
        let ep = self.next_epoch();
        let mut out = vec![t];
        self.stamp[t] = ep;
        let mut i = 0;
        while i < out.len() {
            let c = out[i];
            i += 1;
            for k in 0..3 {
                let nb = self.tris[c].n[k];
                if nb == NONE || self.stamp[nb] == ep {
                    continue;
                }
                let (a, b) = (self.tris[c].v[(k + 1) % 3], self.tris[c].v[(k + 2) % 3]);
                if self.segs.contains_key(&key(a, b)) {
                    continue;
                }
                if self.in_circle(nb, p) {
                    self.stamp[nb] = ep;
                    out.push(nb);
                }
            }
        }
        out
    }

    fn is_boundary_seg(&self, a: usize, b: usize) -> bool {
        matches!(
            self.segs.get(&key(a, b)),
            Some(Seg { kind: SegKind::Boundary | SegKind::Mirror, .. })
        )
    }

    /// Replaces the cavity by a fan around the new vertex `p`.
    fn fill_cavity(&mut self, p: Point, cav: &[usize]) -> Result<(usize, Vec<usize>)> {
        if self.pts.len() >= self.max_vertices {
            return Err(Error::BudgetExceeded { vertices: self.pts.len() - 2, cap: self.max_vertices - 3 });
        }
        let ep = self.stamp[cav[0]];
        let mut rim = Vec::new();
        for &c in cav {
            let tri = self.tris[c];
            for k in 0..3 {
                let nb = tri.n[k];
                if nb != NONE && self.stamp[nb] == ep {
                    continue;
                }
                let (a, b) = (tri.v[(k + 1) % 3], tri.v[(k + 2) % 3]);
                if orient(self.pts[a], self.pts[b], p) <= 0.0 {
                    return Err(Error::Mesh("degenerate cavity".into()));
                }
                rim.push((a, b, nb, c));
            }
        }
        let pid = self.pts.len();
        self.pts.push(p);
        self.vtri.push(NONE);
        self.input.push(false);
        for &c in cav {
            self.tris[c].alive = false;
            self.free.push(c);
        }
        let mut made = Vec::with_capacity(rim.len());
        let mut by_a: HashMap<usize, usize> = HashMap::with_capacity(rim.len());
        let mut by_b: HashMap<usize, usize> = HashMap::with_capacity(rim.len());
        for &(a, b, nb, _) in &rim {
            let interior = if nb == NONE {
                false
            } else if self.is_boundary_seg(a, b) {
                !self.tris[nb].interior
            } else {
                self.tris[nb].interior
            };
            let t = self.new_tri(Tri { v: [a, b, pid], n: [NONE, NONE, nb], alive: true, interior });
            if nb != NONE {
                let nt = &mut self.tris[nb];
                for k in 0..3 {
                    if nt.v[(k + 1) % 3] == b && nt.v[(k + 2) % 3] == a {
                        nt.n[k] = t;
                    }
                }
            }
            by_a.insert(a, t);
            by_b.insert(b, t);
            made.push(t);
        }
        for &t in &made {
            let [a, b, _] = self.tris[t].v;
            let opp_a = *by_a.get(&b).ok_or_else(|| Error::Mesh("open cavity".into()))?;
            let opp_b = *by_b.get(&a).ok_or_else(|| Error::Mesh("open cavity".into()))?;
            self.tris[t].n[0] = opp_a;
            self.tris[t].n[1] = opp_b;
            for v in self.tris[t].v {
                self.vtri[v] = t;
            }
        }
        self.hint = made[0];
        Ok((pid, made))
    }

    /// Inserts a point anywhere inside the super triangle.
    pub fn insert(&mut self, p: Point) -> Result<usize> {
        let t = self.locate(p, self.hint)?;
        for &v in &self.tris[t].v {
            if self.pts[v] == p {
                return Ok(v);
            }
        }
        let cav = self.cavity(p, t);
        Ok(self.fill_cavity(p, &cav)?.0)
    }

    fn tris_around(&self, a: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let start = self.vtri[a];
        if start == NONE || !self.tris[start].alive {
            return out;
        }
        let mut stack = vec![start];
        while let Some(t) = stack.pop() {
            if out.contains(&t) {
                continue;
            }
            out.push(t);
            for k in 0..3 {
                let nb = self.tris[t].n[k];
                if nb != NONE && self.tris[nb].v.contains(&a) && !out.contains(&nb) {
                    stack.push(nb);
                }
            }
        }
        out
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.tris_around(a).iter().any(|&t| self.tris[t].v.contains(&b))
    }

    /// Triangles on both sides of edge `(a, b)` with the apex vertex.
    fn edge_apexes(&self, a: usize, b: usize) -> Vec<(usize, usize)> {
        self.tris_around(a)
            .into_iter()
            .filter(|&t| self.tris[t].v.contains(&b))
            .map(|t| {
                let apex = *self.tris[t].v.iter().find(|&&v| v != a && v != b).unwrap();
                (t, apex)
            })
            .collect()
    }

    fn split_point(&self, a: usize, b: usize, geom: SegGeom, shells: bool) -> Point {
        let (pa, pb) = (self.pts[a], self.pts[b]);
        match geom {
            SegGeom::Arc { center, radius } => {
                let m = (pa - center) + (pb - center);
                center + m.unit() * radius
            }
            SegGeom::Straight => {
                let (ia, ib) = (self.input[a], self.input[b]);
                if shells && ia != ib {
                    // Concentric shells around input vertices keep small
                    // input angles from cascading.
                    let (from, to) = if ia { (pa, pb) } else { (pb, pa) };
                    let d = from.dist(to);
                    let l = (d / 2.0).log2().round().exp2();
                    from.lerp(to, l / d)
                } else {
                    pa.lerp(pb, 0.5)
                }
            }
        }
    }

    /// Splits a constrained edge, returning the new vertex and fan.
    fn split_segment(&mut self, a: usize, b: usize, shells: bool) -> Result<(usize, Vec<usize>)> {
        let seg = self.segs.remove(&key(a, b)).ok_or_else(|| Error::Mesh("not a segment".into()))?;
        let m = self.split_point(a, b, seg.geom, shells);
        let start = self.vtri[a];
        let t = self.locate(m, start)?;
        let cav = self.cavity(m, t);
        let (mid, made) = self.fill_cavity(m, &cav)?;
        for (u, w) in [(a, mid), (mid, b)] {
            if !self.has_edge(u, w) {
                return Err(Error::Mesh("segment split lost an edge".into()));
            }
            self.segs.insert(key(u, w), seg);
        }
        Ok((mid, made))
    }

    /// Inserts a constraint between two existing vertices, splitting it until
    /// every piece is an edge of the triangulation.
    pub fn add_segment(&mut self, a: usize, b: usize, seg: Seg) -> Result<()> {
        let mut stack = vec![(a, b)];
        let mut guard = 0usize;
        while let Some((u, w)) = stack.pop() {
            guard += 1;
            if guard > 1_000_000 {
                return Err(Error::Mesh("segment recovery did not terminate".into()));
            }
            if self.has_edge(u, w) {
                self.segs.insert(key(u, w), seg);
                continue;
            }
            let m = self.split_point(u, w, seg.geom, false);
            let mid = self.insert(m)?;
            if mid == u || mid == w {
                return Err(Error::Mesh("segment too short to recover".into()));
            }
            stack.push((mid, w));
            stack.push((u, mid));
        }
        Ok(())
    }

    /// Marks triangles reachable from the super vertices without crossing
    /// boundary constraints as exterior, everything else as interior.
    pub fn classify(&mut self) {
        for t in self.tris.iter_mut() {
            t.interior = true;
        }
        let ep = self.next_epoch();
        let mut stack: Vec<usize> = (0..self.tris.len())
            .filter(|&t| self.tris[t].alive && self.tris[t].v.iter().any(|&v| v < 3))
            .collect();
        for &t in &stack {
            self.stamp[t] = ep;
        }
        while let Some(t) = stack.pop() {
            self.tris[t].interior = false;
            for k in 0..3 {
                let nb = self.tris[t].n[k];
                if nb == NONE || self.stamp[nb] == ep {
                    continue;
                }
                let (a, b) = (self.tris[t].v[(k + 1) % 3], self.tris[t].v[(k + 2) % 3]);
                if self.is_boundary_seg(a, b) {
                    continue;
                }
                self.stamp[nb] = ep;
                stack.push(nb);
            }
        }
    }

    fn encroached(&self, a: usize, b: usize, p: Point) -> bool {
        (self.pts[a] - p).dot(self.pts[b] - p) < 0.0
    }

    /// Segments on the edges of `tris` encroached by the opposite apex.
    fn encroached_in(&self, tris: &[usize], out: &mut Vec<(usize, usize)>) {
        for &t in tris {
            let tri = self.tris[t];
            if !tri.alive {
                continue;
            }
            for k in 0..3 {
                let (a, b) = (tri.v[(k + 1) % 3], tri.v[(k + 2) % 3]);
                if let Some(seg) = self.segs.get(&key(a, b)) {
                    let counts = tri.interior || seg.kind == SegKind::Cut;
                    if counts && self.encroached(a, b, self.pts[tri.v[k]]) {
                        out.push(key(a, b));
                    }
                }
            }
        }
    }

    fn tri_metrics(&self, t: usize) -> (f64, f64, usize, Point) {
        let v = self.tris[t].v;
        let p = [self.pts[v[0]], self.pts[v[1]], self.pts[v[2]]];
        let l = [p[1].dist(p[2]), p[2].dist(p[0]), p[0].dist(p[1])];
        let area = 0.5 * (p[1] - p[0]).cross(p[2] - p[0]);
        let r = l[0] * l[1] * l[2] / (4.0 * area);
        // smallest angle sits opposite the shortest edge
        let (imin, lmin) = l
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &x)| if x < acc.1 { (i, x) } else { acc });
        let centroid = (p[0] + p[1] + p[2]) * (1.0 / 3.0);
        (r, lmin, imin, centroid)
    }

    fn circumcenter(&self, t: usize) -> Point {
        let v = self.tris[t].v;
        let (a, b, c) = (self.pts[v[0]], self.pts[v[1]], self.pts[v[2]]);
        let (bx, by) = (b.x - a.x, b.y - a.y);
        let (cx, cy) = (c.x - a.x, c.y - a.y);
        let d = 2.0 * (bx * cy - by * cx);
        let (b2, c2) = (bx * bx + by * by, cx * cx + cy * cy);
        Point::new(a.x + (cy * b2 - by * c2) / d, a.y + (bx * c2 - cx * b2) / d)
    }

    fn is_bad(&self, t: usize, params: &RefineParams) -> bool {
        let (r, lmin, imin, centroid) = self.tri_metrics(t);
        if !(r.is_finite()) {
            return false;
        }
        let big = r > (params.size)(centroid) / 3f64.sqrt() && r > params.min_edge;
        if big {
            return true;
        }
        if r / lmin <= params.max_ratio || lmin < params.min_edge {
            return false;
        }
        // Angles enclosed by two constraints are input angles; leave them.
        let v = self.tris[t].v;
        let apex_edges = [
            key(v[imin], v[(imin + 1) % 3]),
            key(v[imin], v[(imin + 2) % 3]),
        ];
        !apex_edges.iter().all(|e| self.segs.contains_key(e))
    }

    /// Refines interior triangles until quality and size criteria hold.
    pub fn refine(&mut self, params: &RefineParams) -> Result<()> {
        let mut queue: VecDeque<(usize, [usize; 3])> = VecDeque::new();
        // (a, b, forced): forced entries were encroached by a rejected
        // circumcentre and are split without re-checking.
        let mut segq: Vec<(usize, usize, bool)> = Vec::new();
        let all: Vec<usize> = (0..self.tris.len()).filter(|&t| self.tris[t].alive).collect();
        let mut found = Vec::new();
        self.encroached_in(&all, &mut found);
        found.sort_unstable();
        found.dedup();
        segq.extend(found.into_iter().rev().map(|(a, b)| (a, b, false)));
        for &t in &all {
            if self.tris[t].interior {
                queue.push_back((t, self.tris[t].v));
            }
        }
        let push_all = |q: &mut VecDeque<(usize, [usize; 3])>, cdt: &Cdt, ts: &[usize]| {
            for &t in ts {
                if cdt.tris[t].alive && cdt.tris[t].interior {
                    q.push_back((t, cdt.tris[t].v));
                }
            }
        };
        loop {
            if let Some((a, b, forced)) = segq.pop() {
                if !self.segs.contains_key(&(a, b)) {
                    continue;
                }
                let still = forced
                    || self.edge_apexes(a, b).iter().any(|&(t, apex)| {
                        (self.tris[t].interior || self.segs[&(a, b)].kind == SegKind::Cut)
                            && self.encroached(a, b, self.pts[apex])
                    });
                if !still || self.pts[a].dist(self.pts[b]) < 2.0 * params.min_edge {
                    continue;
                }
                let (_, made) = self.split_segment(a, b, true)?;
                let mut found = Vec::new();
                self.encroached_in(&made, &mut found);
                segq.extend(found.into_iter().map(|(a, b)| (a, b, false)));
                push_all(&mut queue, self, &made);
                continue;
            }
            let Some((t, v)) = queue.pop_front() else { break };
            if !self.tris[t].alive || self.tris[t].v != v || !self.tris[t].interior {
                continue;
            }
            if !self.is_bad(t, params) {
                continue;
            }
            let c = self.circumcenter(t);
            match self.walk_to(t, c) {
                Walk::Blocked(a, b) => {
                    if self.segs.contains_key(&key(a, b)) && self.pts[a].dist(self.pts[b]) >= 2.0 * params.min_edge {
                        let (a, b) = key(a, b);
                        segq.push((a, b, true));
                        queue.push_back((t, v));
                    }
                }
                Walk::Inside(tc) => {
                    if !self.tris[tc].interior {
                        continue;
                    }
                    if self.tris[tc].v.iter().any(|&w| self.pts[w] == c) {
                        continue;
                    }
                    let cav = self.cavity(c, tc);
                    let mut enc = Vec::new();
                    let ep = self.stamp[tc];
                    for &ct in &cav {
                        let tri = self.tris[ct];
                        for k in 0..3 {
                            let nb = tri.n[k];
                            if nb != NONE && self.stamp[nb] == ep {
                                continue;
                            }
                            let (a, b) = (tri.v[(k + 1) % 3], tri.v[(k + 2) % 3]);
                            if self.segs.contains_key(&key(a, b)) && self.encroached(a, b, c) {
                                enc.push(key(a, b));
                            }
                        }
                    }
                    if !enc.is_empty() {
                        let mut any = false;
                        for (a, b) in enc {
                            if self.pts[a].dist(self.pts[b]) >= 2.0 * params.min_edge {
                                segq.push((a, b, true));
                                any = true;
                            }
                        }
                        if any {
                            queue.push_back((t, v));
                        }
                        continue;
                    }
                    match self.fill_cavity(c, &cav) {
                        Ok((_, made)) => push_all(&mut queue, self, &made),
                        Err(Error::Mesh(_)) => continue,
                        Err(e) => return Err(e),
                    }
                }
            }
        }
        Ok(())
    }

    /// Interior triangles and used vertices, super vertices removed.
    /// Returns (points, triangles, old-to-new vertex map).
    pub fn extract(&self) -> (Vec<Point>, Vec<[usize; 3]>, Vec<usize>) {
        let mut map = vec![NONE; self.pts.len()];
        let mut tris = Vec::new();
        for t in &self.tris {
            if t.alive && t.interior {
                for &v in &t.v {
                    map[v] = 0;
                }
                tris.push(t.v);
            }
        }
        let mut pts = Vec::new();
        for (i, m) in map.iter_mut().enumerate() {
            if *m == 0 {
                *m = pts.len();
                pts.push(self.pts[i]);
            }
        }
        let tris = tris.into_iter().map(|v| [map[v[0]], map[v[1]], map[v[2]]]).collect();
        (pts, tris, map)
    }

    /// Endpoints of segments of a given kind (in original numbering).
    pub fn seg_vertices(&self, kind: SegKind) -> Vec<bool> {
        let mut out = vec![false; self.pts.len()];
        for (&(a, b), s) in &self.segs {
            if s.kind == kind {
                out[a] = true;
                out[b] = true;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_cdt() -> Cdt {
        let mut cdt = Cdt::new(Point::new(0.0, 0.0), Point::new(1.0, 1.0), 100_000);
        let c = [
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ];
        let ids: Vec<usize> = c.iter().map(|&p| cdt.insert(p).unwrap()).collect();
        for i in 0..4 {
            cdt.add_segment(ids[i], ids[(i + 1) % 4], Seg { kind: SegKind::Boundary, geom: SegGeom::Straight })
                .unwrap();
        }
        cdt.classify();
        cdt
    }

    #[test]
    fn two_triangles_for_bare_square() {
        let cdt = square_cdt();
        let (pts, tris, _) = cdt.extract();
        assert_eq!(pts.len(), 4);
        assert_eq!(tris.len(), 2);
    }

    #[test]
    fn refinement_meets_size_and_angle() {
        let mut cdt = square_cdt();
        let size = |_: Point| 0.1;
        cdt.refine(&RefineParams { size: &size, max_ratio: 2f64.sqrt(), min_edge: 1e-6 })
            .unwrap();
        let (pts, tris, _) = cdt.extract();
        let area: f64 = tris
            .iter()
            .map(|t| 0.5 * (pts[t[1]] - pts[t[0]]).cross(pts[t[2]] - pts[t[0]]))
            .sum();
        assert!((area - 1.0).abs() < 1e-12);
        for t in &tris {
            let p = [pts[t[0]], pts[t[1]], pts[t[2]]];
            for i in 0..3 {
                let (a, b, c) = (p[i], p[(i + 1) % 3], p[(i + 2) % 3]);
                let ang = ((b - a).dot(c - a) / ((b - a).norm() * (c - a).norm())).acos();
                assert!(ang.to_degrees() > 20.0, "angle {}", ang.to_degrees());
                assert!(a.dist(b) < 0.1 * 1.2);
            }
        }
    }
}
