//! Plain-text mesh format: a `V E T` header, `V` lines `id x y flags`,
//! then `T` lines `id v1 v2 v3`. Flags: 1 boundary, 2 pole.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::geometry::Point;

use super::Mesh;

pub fn write_mesh(mesh: &Mesh, out: &mut impl Write) -> Result<()> {
    writeln!(out, "{} {} {}", mesh.vertices.len(), mesh.edges().len(), mesh.triangles.len())?;
    for (i, p) in mesh.vertices.iter().enumerate() {
        let mut flags = 0;
        if mesh.boundary[i] {
            flags |= 1;
        }
        if mesh.pole == Some(i) {
            flags |= 2;
        }
        writeln!(out, "{i} {:?} {:?} {flags}", p.x, p.y)?;
    }
    for (i, t) in mesh.triangles.iter().enumerate() {
        writeln!(out, "{i} {} {} {}", t[0], t[1], t[2])?;
    }
    Ok(())
}

fn parse<T: std::str::FromStr>(tok: Option<&str>, line: usize) -> Result<T> {
    tok.and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::Parse(format!("mesh line {line}: malformed field")))
}

pub fn read_mesh(input: impl BufRead) -> Result<Mesh> {
    let mut lines = input.lines().enumerate().filter(|(_, l)| match l {
        Ok(s) => !s.trim().is_empty() && !s.starts_with('#'),
        Err(_) => true,
    });
    let mut next = || -> Result<(usize, String)> {
        let (n, l) = lines.next().ok_or_else(|| Error::Parse("mesh file truncated".into()))?;
        Ok((n + 1, l?))
    };
    let (n, head) = next()?;
    let mut it = head.split_whitespace();
    let nv: usize = parse(it.next(), n)?;
    let ne: usize = parse(it.next(), n)?;
    let nt: usize = parse(it.next(), n)?;
    let mut vertices = Vec::with_capacity(nv);
    let mut boundary = Vec::with_capacity(nv);
    let mut pole = None;
    for i in 0..nv {
        let (n, l) = next()?;
        let mut it = l.split_whitespace();
        let id: usize = parse(it.next(), n)?;
        if id != i {
            return Err(Error::Parse(format!("mesh line {n}: expected vertex {i}")));
        }
        let x: f64 = parse(it.next(), n)?;
        let y: f64 = parse(it.next(), n)?;
        let flags: u32 = parse(it.next(), n)?;
        vertices.push(Point::new(x, y));
        boundary.push(flags & 1 != 0);
        if flags & 2 != 0 {
            pole = Some(i);
        }
    }
    let mut triangles = Vec::with_capacity(nt);
    for i in 0..nt {
        let (n, l) = next()?;
        let mut it = l.split_whitespace();
        let id: usize = parse(it.next(), n)?;
        if id != i {
            return Err(Error::Parse(format!("mesh line {n}: expected triangle {i}")));
        }
        let mut t = [0usize; 3];
        for v in &mut t {
            *v = parse(it.next(), n)?;
            if *v >= nv {
                return Err(Error::Parse(format!("mesh line {n}: vertex index out of range")));
            }
        }
        triangles.push(t);
    }
    let mut mesh = Mesh { vertices, triangles, boundary, pole: None, pole_distance: Vec::new() };
    if mesh.edges().len() != ne {
        return Err(Error::Parse(format!("edge count {ne} does not match triangles")));
    }
    if let Some(p) = pole {
        mesh.attach_pole(mesh.vertices[p])?;
    }
    Ok(mesh)
}
