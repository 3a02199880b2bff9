//! Computational domains, pole grids and branch cuts.
//!
//! Every domain is stored as a closed counter-clockwise loop of boundary
//! [`Piece`]s (straight segments and circular arcs). The mesher, the pole
//! grid and the cut construction all work from that loop.

use std::f64::consts::{PI, TAU};
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Geometric tolerance used for "on the boundary" and tie decisions.
pub const GEOM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    /// Polar angle in `(-pi, pi]`.
    pub fn angle(self) -> f64 {
        let a = self.y.atan2(self.x);
        if a <= -PI {
            a + TAU
        } else {
            a
        }
    }

    pub fn unit(self) -> Point {
        let n = self.norm();
        Point::new(self.x / n, self.y / n)
    }

    pub fn from_polar(r: f64, theta: f64) -> Point {
        Point::new(r * theta.cos(), r * theta.sin())
    }

    pub fn lerp(self, o: Point, t: f64) -> Point {
        self + (o - self) * t
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// One boundary piece, oriented counter-clockwise around the domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Piece {
    Line { a: Point, b: Point },
    /// Arc of the circle `center + radius * e^{i t}` for `t` from `from` to `to` (`to > from`).
    Arc { center: Point, radius: f64, from: f64, to: f64 },
}

impl Piece {
    pub fn start(&self) -> Point {
        self.at(0.0)
    }

    pub fn end(&self) -> Point {
        self.at(1.0)
    }

    /// Point at normalized parameter `s` in `[0, 1]`.
    pub fn at(&self, s: f64) -> Point {
        match *self {
            Piece::Line { a, b } => a.lerp(b, s),
            Piece::Arc { center, radius, from, to } => {
                center + Point::from_polar(radius, from + s * (to - from))
            }
        }
    }

    pub fn length(&self) -> f64 {
        match *self {
            Piece::Line { a, b } => a.dist(b),
            Piece::Arc { radius, from, to, .. } => radius * (to - from),
        }
    }

    /// Closest point on the piece and its parameter.
    pub fn closest(&self, p: Point) -> (Point, f64) {
        match *self {
            Piece::Line { a, b } => {
                let d = b - a;
                let s = ((p - a).dot(d) / d.dot(d)).clamp(0.0, 1.0);
                (a.lerp(b, s), s)
            }
            Piece::Arc { center, radius, from, to } => {
                let v = p - center;
                let mut best = (self.start(), 0.0);
                let mut best_d = p.dist(best.0);
                let e = self.end();
                if p.dist(e) < best_d {
                    best = (e, 1.0);
                    best_d = p.dist(e);
                }
                if v.norm() > 0.0 {
                    let mut t = v.y.atan2(v.x);
                    while t < from {
                        t += TAU;
                    }
                    if t <= to {
                        let q = center + Point::from_polar(radius, t);
                        if p.dist(q) < best_d {
                            best = (q, (t - from) / (to - from));
                        }
                    }
                }
                best
            }
        }
    }

    /// Parameter of the first crossing of the ray `origin + t dir`, `t > 0`.
    fn ray_hit(&self, origin: Point, dir: Point) -> Option<(f64, Point)> {
        match *self {
            Piece::Line { a, b } => {
                let e = b - a;
                let den = dir.cross(e);
                if den.abs() < 1e-300 {
                    return None;
                }
                let w = a - origin;
                let t = w.cross(e) / den;
                let s = w.cross(dir) / den;
                if t > GEOM_TOL && (-GEOM_TOL..=1.0 + GEOM_TOL).contains(&s) {
                    Some((t, a.lerp(b, s.clamp(0.0, 1.0))))
                } else {
                    None
                }
            }
            Piece::Arc { center, radius, from, to } => {
                let f = origin - center;
                let bq = f.dot(dir);
                let c = f.dot(f) - radius * radius;
                let disc = bq * bq - c;
                if disc < 0.0 {
                    return None;
                }
                let sq = disc.sqrt();
                let mut best: Option<(f64, Point)> = None;
                for t in [-bq - sq, -bq + sq] {
                    if t <= GEOM_TOL {
                        continue;
                    }
                    let q = origin + dir * t;
                    let v = q - center;
                    let mut th = v.y.atan2(v.x);
                    while th < from - 1e-12 {
                        th += TAU;
                    }
                    if th <= to + 1e-12 && best.map_or(true, |(bt, _)| t < bt) {
                        best = Some((t, q));
                    }
                }
                best
            }
        }
    }

    /// Splits the piece at parameter `s`.
    pub fn split(&self, s: f64) -> (Piece, Piece) {
        match *self {
            Piece::Line { a, b } => {
                let m = a.lerp(b, s);
                (Piece::Line { a, b: m }, Piece::Line { a: m, b })
            }
            Piece::Arc { center, radius, from, to } => {
                let t = from + s * (to - from);
                (
                    Piece::Arc { center, radius, from, to: t },
                    Piece::Arc { center, radius, from: t, to },
                )
            }
        }
    }
}

/// Domain descriptor, as read from a configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DomainSpec {
    UnitSquare,
    UnitDisk,
    Sector { aperture: f64, #[serde(default = "one")] radius: f64 },
    Polygon { vertices: Vec<[f64; 2]> },
}

fn one() -> f64 {
    1.0
}

impl DomainSpec {
    /// Short identifier used in file names and CSV metadata.
    pub fn id(&self) -> String {
        match self {
            DomainSpec::UnitSquare => "unit-square".into(),
            DomainSpec::UnitDisk => "unit-disk".into(),
            DomainSpec::Sector { aperture, radius } => format!("sector-{aperture}-{radius}"),
            DomainSpec::Polygon { vertices } => format!("polygon-{}", vertices.len()),
        }
    }
}

/// A line of mirror symmetry of a domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub point: Point,
    /// Unit direction along the axis.
    pub dir: Point,
}

impl Axis {
    pub fn contains(&self, p: Point) -> bool {
        (p - self.point).cross(self.dir).abs() <= 1e-12
    }

    pub fn normal(&self) -> Point {
        Point::new(-self.dir.y, self.dir.x)
    }

    pub fn reflect(&self, p: Point) -> Point {
        let n = self.normal();
        let d = (p - self.point).dot(n);
        p - n * (2.0 * d)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    pub spec: DomainSpec,
    pub pieces: Vec<Piece>,
    /// Characteristic length (diameter of the bounding box).
    pub scale: f64,
    axes: Vec<Axis>,
}

/// Builds and validates a domain from its descriptor.
pub fn build_domain(spec: &DomainSpec) -> Result<Domain> {
    let (pieces, axes) = match spec {
        DomainSpec::UnitSquare => {
            let c = [
                Point::new(0.0, 0.0),
                Point::new(1.0, 0.0),
                Point::new(1.0, 1.0),
                Point::new(0.0, 1.0),
            ];
            let h = Point::new(0.5, 0.5);
            let s = std::f64::consts::FRAC_1_SQRT_2;
            let axes = vec![
                Axis { point: h, dir: Point::new(1.0, 0.0) },
                Axis { point: h, dir: Point::new(0.0, 1.0) },
                Axis { point: h, dir: Point::new(s, s) },
                Axis { point: h, dir: Point::new(-s, s) },
            ];
            (polygon_pieces(&c), axes)
        }
        DomainSpec::UnitDisk => {
            let o = Point::new(0.0, 0.0);
            let axes = vec![
                Axis { point: o, dir: Point::new(1.0, 0.0) },
                Axis { point: o, dir: Point::new(0.0, 1.0) },
            ];
            (vec![Piece::Arc { center: o, radius: 1.0, from: -PI, to: PI }], axes)
        }
        DomainSpec::Sector { aperture, radius } => {
            if !(*aperture > 0.0 && *aperture < TAU) {
                return Err(Error::InvalidDomain(format!(
                    "sector aperture must lie in (0, 2pi), got {aperture}"
                )));
            }
            if !(*radius > 0.0) {
                return Err(Error::InvalidDomain(format!("sector radius must be positive, got {radius}")));
            }
            let o = Point::new(0.0, 0.0);
            let half = aperture / 2.0;
            let p0 = Point::from_polar(*radius, -half);
            let p1 = Point::from_polar(*radius, half);
            let pieces = vec![
                Piece::Line { a: o, b: p0 },
                Piece::Arc { center: o, radius: *radius, from: -half, to: half },
                Piece::Line { a: p1, b: o },
            ];
            (pieces, vec![Axis { point: o, dir: Point::new(1.0, 0.0) }])
        }
        DomainSpec::Polygon { vertices } => {
            let pts: Vec<Point> = vertices.iter().map(|v| Point::new(v[0], v[1])).collect();
            validate_polygon(&pts)?;
            (polygon_pieces(&pts), Vec::new())
        }
    };
    let (lo, hi) = bounding_box(&pieces);
    Ok(Domain { spec: spec.clone(), pieces, scale: (hi - lo).norm(), axes })
}

fn polygon_pieces(pts: &[Point]) -> Vec<Piece> {
    (0..pts.len())
        .map(|i| Piece::Line { a: pts[i], b: pts[(i + 1) % pts.len()] })
        .collect()
}

fn validate_polygon(pts: &[Point]) -> Result<()> {
    if pts.len() < 3 {
        return Err(Error::InvalidDomain("polygon needs at least 3 vertices".into()));
    }
    let n = pts.len();
    let area: f64 = (0..n).map(|i| pts[i].cross(pts[(i + 1) % n])).sum::<f64>() / 2.0;
    if !(area > 0.0) {
        return Err(Error::InvalidDomain(
            "polygon vertices must be counter-clockwise with positive area".into(),
        ));
    }
    for i in 0..n {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        if a.dist(b) == 0.0 {
            return Err(Error::InvalidDomain(format!("repeated polygon vertex {i}")));
        }
        for j in i + 1..n {
            if j == i || (j + 1) % n == i || (i + 1) % n == j {
                continue;
            }
            let (c, d) = (pts[j], pts[(j + 1) % n]);
            if segments_intersect(a, b, c, d) {
                return Err(Error::InvalidDomain(format!(
                    "polygon is self-intersecting (edges {i} and {j})"
                )));
            }
        }
    }
    Ok(())
}

fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let o = |p: Point, q: Point, r: Point| (q - p).cross(r - p);
    let (d1, d2, d3, d4) = (o(c, d, a), o(c, d, b), o(a, b, c), o(a, b, d));
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |p: Point, q: Point, r: Point| {
        o(p, q, r) == 0.0
            && r.x >= p.x.min(q.x)
            && r.x <= p.x.max(q.x)
            && r.y >= p.y.min(q.y)
            && r.y <= p.y.max(q.y)
    };
    on(c, d, a) || on(c, d, b) || on(a, b, c) || on(a, b, d)
}

fn bounding_box(pieces: &[Piece]) -> (Point, Point) {
    let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in pieces {
        for k in 0..=64 {
            let q = p.at(k as f64 / 64.0);
            lo = Point::new(lo.x.min(q.x), lo.y.min(q.y));
            hi = Point::new(hi.x.max(q.x), hi.y.max(q.y));
        }
        if let Piece::Arc { center, radius, from, to } = *p {
            for k in -4..=4 {
                let t = k as f64 * PI / 2.0;
                if t >= from && t <= to {
                    let q = center + Point::from_polar(radius, t);
                    lo = Point::new(lo.x.min(q.x), lo.y.min(q.y));
                    hi = Point::new(hi.x.max(q.x), hi.y.max(q.y));
                }
            }
        }
    }
    (lo, hi)
}

impl Domain {
    pub fn area(&self) -> f64 {
        match &self.spec {
            DomainSpec::UnitSquare => 1.0,
            DomainSpec::UnitDisk => PI,
            DomainSpec::Sector { aperture, radius } => aperture * radius * radius / 2.0,
            DomainSpec::Polygon { vertices } => {
                let n = vertices.len();
                (0..n)
                    .map(|i| {
                        let (a, b) = (vertices[i], vertices[(i + 1) % n]);
                        a[0] * b[1] - a[1] * b[0]
                    })
                    .sum::<f64>()
                    / 2.0
            }
        }
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        bounding_box(&self.pieces)
    }

    pub fn symmetry_axes(&self) -> &[Axis] {
        &self.axes
    }

    /// Winding-number containment test on the exact boundary.
    pub fn contains(&self, p: Point) -> bool {
        match &self.spec {
            DomainSpec::UnitSquare => p.x > 0.0 && p.x < 1.0 && p.y > 0.0 && p.y < 1.0,
            DomainSpec::UnitDisk => p.norm() < 1.0,
            DomainSpec::Sector { aperture, radius } => {
                let r = p.norm();
                r > 0.0 && r < *radius && p.angle().abs() < aperture / 2.0
            }
            DomainSpec::Polygon { vertices } => {
                let mut inside = false;
                let n = vertices.len();
                for i in 0..n {
                    let (a, b) = (vertices[i], vertices[(i + 1) % n]);
                    if (a[1] > p.y) != (b[1] > p.y) {
                        let x = a[0] + (p.y - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
                        if p.x < x {
                            inside = !inside;
                        }
                    }
                }
                inside && self.distance_to_boundary(p) > 0.0
            }
        }
    }

    pub fn distance_to_boundary(&self, p: Point) -> f64 {
        self.pieces
            .iter()
            .map(|pc| pc.closest(p).0.dist(p))
            .fold(f64::INFINITY, f64::min)
    }

    /// Strictly interior with a positive distance to the boundary.
    pub fn is_interior(&self, p: Point) -> bool {
        self.contains(p) && self.distance_to_boundary(p) > GEOM_TOL
    }

    /// First boundary point hit by the ray from `p` in direction `dir`.
    pub fn ray_exit(&self, p: Point, dir: Point) -> Option<Point> {
        let dir = dir.unit();
        self.pieces
            .iter()
            .filter_map(|pc| pc.ray_hit(p, dir))
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .map(|(_, q)| q)
    }

    /// Index of the piece a boundary point lies on, with its parameter.
    pub fn locate_on_boundary(&self, q: Point) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for (i, pc) in self.pieces.iter().enumerate() {
            let (c, s) = pc.closest(q);
            let d = c.dist(q);
            if best.map_or(true, |b| d < b.2) {
                best = Some((i, s, d));
            }
        }
        best.filter(|b| b.2 <= 1e-9 * self.scale.max(1.0)).map(|b| (b.0, b.1))
    }
}

/// A pole of the Aharonov-Bohm potential. The circulation is fixed at 1/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pole {
    pub position: Point,
}

impl Pole {
    /// Flux divided by 2 pi.
    pub const CIRCULATION: f64 = 0.5;

    pub fn new(x: f64, y: f64) -> Self {
        Self { position: Point::new(x, y) }
    }
}

/// Lattice poles `(m/N, n/N)` strictly inside the domain, in lexicographic order.
pub fn pole_grid(domain: &Domain, n: usize) -> Result<Vec<Pole>> {
    if n < 2 {
        return Err(Error::Precondition(format!("pole grid needs N >= 2, got {n}")));
    }
    let (lo, hi) = domain.bounding_box();
    let nf = n as f64;
    let (m0, m1) = ((lo.x * nf).floor() as i64, (hi.x * nf).ceil() as i64);
    let (k0, k1) = ((lo.y * nf).floor() as i64, (hi.y * nf).ceil() as i64);
    let mut out = Vec::new();
    for m in m0..=m1 {
        for k in k0..=k1 {
            let p = Point::new(m as f64 / nf, k as f64 / nf);
            if domain.is_interior(p) {
                out.push(Pole { position: p });
            }
        }
    }
    if out.is_empty() {
        return Err(Error::Precondition(format!(
            "pole grid with N = {n} has no interior point"
        )));
    }
    Ok(out)
}

/// Which side of a cut a label refers to, walking from the pole to the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

/// How the cut direction was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AnchorRule {
    NearestBoundary,
    SymmetryAxis,
    /// Direction supplied by the caller.
    Explicit,
}

/// Branch cut: a polyline from the pole to the boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct Cut {
    pub points: Vec<Point>,
    pub rule: AnchorRule,
}

impl Cut {
    pub fn pole(&self) -> Point {
        self.points[0]
    }

    pub fn end(&self) -> Point {
        *self.points.last().unwrap()
    }

    pub fn length(&self) -> f64 {
        self.points.windows(2).map(|w| w[0].dist(w[1])).sum()
    }

    /// Straight cut from `pole` along `dir` to the first boundary crossing.
    pub fn along(domain: &Domain, pole: &Pole, dir: Point) -> Result<Cut> {
        require_interior(domain, pole)?;
        let end = domain
            .ray_exit(pole.position, dir)
            .ok_or_else(|| Error::Precondition("cut direction does not reach the boundary".into()))?;
        let cut = Cut { points: vec![pole.position, end], rule: AnchorRule::Explicit };
        cut.validate(domain)?;
        Ok(cut)
    }

    /// Checks the polyline invariants against the domain.
    pub fn validate(&self, domain: &Domain) -> Result<()> {
        if self.points.len() < 2 {
            return Err(Error::InvalidCut("cut needs at least two points".into()));
        }
        if !domain.is_interior(self.pole()) {
            return Err(Error::InvalidCut("cut must start at an interior pole".into()));
        }
        if domain.locate_on_boundary(self.end()).is_none() {
            return Err(Error::InvalidCut("cut must end on the boundary".into()));
        }
        for p in &self.points[1..self.points.len() - 1] {
            if !domain.is_interior(*p) {
                return Err(Error::InvalidCut("interior cut vertices must lie inside".into()));
            }
        }
        let n = self.points.len();
        for i in 0..n - 1 {
            for j in i + 2..n - 1 {
                if segments_intersect(self.points[i], self.points[i + 1], self.points[j], self.points[j + 1]) {
                    return Err(Error::InvalidCut("cut polyline self-intersects".into()));
                }
            }
        }
        Ok(())
    }
}

fn require_interior(domain: &Domain, pole: &Pole) -> Result<()> {
    if domain.is_interior(pole.position) {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "pole ({}, {}) is not strictly inside the domain",
            pole.position.x, pole.position.y
        )))
    }
}

/// Picks the candidate with the smallest distance, ties broken by the
/// smallest polar angle of the outward direction in `(-pi, pi]`.
fn pick(cands: &[(Point, Point)], pole: Point) -> Option<Point> {
    let mut best: Option<(f64, f64, Point)> = None;
    for &(q, dir) in cands {
        let d = q.dist(pole);
        let a = dir.angle();
        let better = match best {
            None => true,
            Some((bd, ba, _)) => d < bd - 1e-12 || (d <= bd + 1e-12 && a < ba - 1e-12),
        };
        if better {
            best = Some((d, a, q));
        }
    }
    best.map(|b| b.2)
}

/// Straight cut to the nearest boundary point. Poles on a symmetry axis
/// are cut along that axis.
pub fn branch_cut(domain: &Domain, pole: &Pole) -> Result<Cut> {
    require_interior(domain, pole)?;
    let a = pole.position;

    let mut axis_cands = Vec::new();
    for ax in domain.symmetry_axes() {
        if ax.contains(a) {
            for dir in [ax.dir, -ax.dir] {
                if let Some(q) = domain.ray_exit(a, dir) {
                    axis_cands.push((q, dir));
                }
            }
        }
    }
    let (end, rule) = if let Some(q) = pick(&axis_cands, a) {
        (q, AnchorRule::SymmetryAxis)
    } else {
        let mut cands = Vec::new();
        for pc in &domain.pieces {
            let (q, _) = pc.closest(a);
            cands.push((q, q - a));
        }
        let dmin = cands.iter().map(|c| c.0.dist(a)).fold(f64::INFINITY, f64::min);
        // A perfectly circular boundary centred at the pole has no unique
        // nearest point; the canonical axes handled above cover the disk.
        let near: Vec<_> = cands.into_iter().filter(|c| c.0.dist(a) <= dmin + 1e-12).collect();
        (pick(&near, a).expect("boundary has at least one piece"), AnchorRule::NearestBoundary)
    };
    let cut = Cut { points: vec![a, end], rule };
    cut.validate(domain)?;
    Ok(cut)
}
