use crate::geometry::{Point, Side};

use super::CutMesh;

/// Two copies of the slit mesh glued crosswise along the cut, sharing the
/// pole. `deck` is the sheet swap.
#[derive(Debug, Clone)]
pub struct CoverMesh {
    pub vertices: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary: Vec<bool>,
    pub deck: Vec<usize>,
    pub sheet: Vec<u8>,
    /// Base-mesh vertex under each cover vertex.
    pub base_vertex: Vec<usize>,
    pub pole: usize,
}

/// Builds the double cover branched at the pole of `cm`.
pub fn double_cover(cm: &CutMesh) -> CoverMesh {
    let base = &cm.base;
    let nb = base.vertices.len();
    let pole = cm.pole;
    // Cover index of base vertex v on sheet s.
    let mut index = vec![[0usize; 2]; nb];
    let mut vertices = Vec::with_capacity(2 * nb - 1);
    let mut boundary = Vec::with_capacity(2 * nb - 1);
    let mut sheet = Vec::with_capacity(2 * nb - 1);
    let mut base_vertex = Vec::with_capacity(2 * nb - 1);
    for s in 0..2u8 {
        for v in 0..nb {
            if s == 1 && v == pole {
                index[v][1] = index[v][0];
                continue;
            }
            index[v][s as usize] = vertices.len();
            vertices.push(base.vertices[v]);
            boundary.push(base.boundary[v]);
            sheet.push(s);
            base_vertex.push(v);
        }
    }
    let on_cut: Vec<bool> = {
        let mut c = vec![false; nb];
        for &v in &cm.path[1..] {
            c[v] = true;
        }
        c
    };
    let mut triangles = Vec::with_capacity(2 * base.triangles.len());
    for s in 0..2usize {
        for (ti, t) in base.triangles.iter().enumerate() {
            let left = cm.side[ti] == Some(Side::Left);
            triangles.push(t.map(|v| {
                let sh = if left && on_cut[v] { 1 - s } else { s };
                index[v][sh]
            }));
        }
    }
    let deck = (0..vertices.len())
        .map(|i| {
            let v = base_vertex[i];
            index[v][1 - sheet[i] as usize]
        })
        .collect();
    CoverMesh { vertices, triangles, boundary, deck, sheet, base_vertex, pole: index[pole][0] }
}

impl CoverMesh {
    /// Number of triangles met walking once around the pole on the cover.
    pub fn pole_loop_length(&self) -> usize {
        let around: Vec<usize> = (0..self.triangles.len()).filter(|&t| self.triangles[t].contains(&self.pole)).collect();
        let Some(&start) = around.first() else { return 0 };
        let shares = |a: usize, b: usize| {
            self.triangles[a].iter().filter(|v| self.triangles[b].contains(v)).count() == 2
        };
        let mut prev = usize::MAX;
        let mut cur = start;
        let mut steps = 0;
        loop {
            let next = around.iter().copied().find(|&u| u != cur && u != prev && shares(cur, u));
            let Some(next) = next else { return steps + 1 };
            steps += 1;
            if next == start {
                return steps;
            }
            prev = cur;
            cur = next;
            if steps > around.len() {
                return steps;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{branch_cut, build_domain, DomainSpec, Pole};
    use crate::meshing::{insert_cut, triangulate_with, MeshRequest, PoleGrading};
    use crate::meshing::Mesh;

    fn cover(x: f64, y: f64) -> (CutMesh, CoverMesh) {
        let d = build_domain(&DomainSpec::UnitSquare).unwrap();
        let pole = Pole::new(x, y);
        let cut = branch_cut(&d, &pole).unwrap();
        let mut req = MeshRequest::new(0.1);
        req.grading = Some(PoleGrading::standard(&d, pole.position));
        req.cuts = vec![cut.clone()];
        let m = triangulate_with(&d, &req).unwrap();
        let cm = insert_cut(&m, &cut).unwrap();
        let cv = double_cover(&cm);
        (cm, cv)
    }

    #[test]
    fn vertex_count_and_deck() {
        let (cm, cv) = cover(0.3, 0.6);
        let c = cm.num_duplicated();
        assert_eq!(cv.vertices.len(), 2 * cm.vertices.len() - 2 * c - 1);
        for i in 0..cv.vertices.len() {
            assert_eq!(cv.deck[cv.deck[i]], i);
            assert_eq!(cv.deck[i] == i, i == cv.pole);
        }
    }

    #[test]
    fn cover_is_a_conforming_mesh() {
        let (_, cv) = cover(0.5, 0.5);
        let m = Mesh {
            vertices: cv.vertices.clone(),
            triangles: cv.triangles.clone(),
            boundary: cv.boundary.clone(),
            pole: None,
            pole_distance: Vec::new(),
        };
        // Orientation and manifoldness hold; the Euler count differs for a
        // branched cover so only the per-edge check applies.
        assert!(cv.triangles.iter().all(|t| crate::meshing::tri_area(&cv.vertices, t) > 0.0));
        let mut count = std::collections::HashMap::new();
        for t in &m.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                *count.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        assert!(count.values().all(|&c| c <= 2));
    }

    #[test]
    fn deck_preserves_edges() {
        let (_, cv) = cover(0.3, 0.6);
        let edges: std::collections::HashSet<(usize, usize)> =
            crate::meshing::edge_list(&cv.triangles).into_iter().collect();
        for &(a, b) in &edges {
            let (sa, sb) = (cv.deck[a], cv.deck[b]);
            assert!(edges.contains(&(sa.min(sb), sa.max(sb))));
            assert_eq!(cv.vertices[a].dist(cv.vertices[b]), cv.vertices[sa].dist(cv.vertices[sb]));
        }
    }

    #[test]
    fn loop_around_pole_closes_after_two_turns() {
        let (cm, cv) = cover(0.3, 0.6);
        let p = cm.pole;
        let base_ring = cm.base.triangles.iter().filter(|t| t.contains(&p)).count();
        assert_eq!(cv.pole_loop_length(), 2 * base_ring);
    }
}
