use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Domain, Point, Pole};
use crate::spectral::{Discretization, Problem, Spectrum};

/// Largest odd mode kept in the circle fit.
const MAX_MODE: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodalOptions {
    pub samples: usize,
    /// Largest zero order accepted.
    pub cap: usize,
    /// Samples below `noise * max |u|` are ignored when counting sign changes.
    pub noise: f64,
}

impl Default for NodalOptions {
    fn default() -> Self {
        Self { samples: 256, cap: 9, noise: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodalReport {
    pub pole: Point,
    pub j: usize,
    pub r: f64,
    /// Number of nodal lines ending at the pole.
    pub k: usize,
    pub ck: f64,
    pub dk: f64,
    /// Angles of the nodal rays in `[0, 2pi)`, ascending.
    pub rays: Vec<f64>,
    /// RMS misfit of the odd half-integer Fourier series, relative to RMS of the samples.
    pub residual: f64,
    /// Energy share of each odd mode `q = 1, 3, ..., 9`.
    pub energy: Vec<f64>,
}

/// Coefficients `(a_q, b_q)` of `sum a_q cos(q t/2) + b_q sin(q t/2)` over odd `q`.
struct HalfSeries {
    coef: Vec<(f64, f64)>,
}

impl HalfSeries {
    fn fit(theta: &[f64], u: &[f64]) -> HalfSeries {
        let n = u.len() as f64;
        let coef = (0..=(MAX_MODE / 2))
            .map(|i| {
                let q = (2 * i + 1) as f64;
                let (mut a, mut b) = (0.0, 0.0);
                for (t, v) in theta.iter().zip(u) {
                    a += v * (q * t / 2.0).cos();
                    b += v * (q * t / 2.0).sin();
                }
                (2.0 * a / n, 2.0 * b / n)
            })
            .collect();
        HalfSeries { coef }
    }

    fn eval(&self, t: f64) -> f64 {
        self.coef
            .iter()
            .enumerate()
            .map(|(i, (a, b))| {
                let q = (2 * i + 1) as f64;
                a * (q * t / 2.0).cos() + b * (q * t / 2.0).sin()
            })
            .sum()
    }

    fn mode(&self, q: usize) -> (f64, f64) {
        self.coef.get(q / 2).copied().unwrap_or((0.0, 0.0))
    }

    fn energy(&self) -> Vec<f64> {
        let e: Vec<f64> = self.coef.iter().map(|(a, b)| a * a + b * b).collect();
        let tot: f64 = e.iter().sum();
        e.iter().map(|x| if tot > 0.0 { x / tot } else { 0.0 }).collect()
    }
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Option<f64> {
    let (mut flo, fhi) = (f(lo), f(hi));
    if flo * fhi > 0.0 {
        return None;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Nodal analysis from samples `u_i = u(theta0 + (i + 1/2) 2pi/N)` on a circle
/// of radius `r`, with `u` continuous on `(theta0, theta0 + 2pi)` and changing
/// sign across `theta0`.
pub fn nodal_from_samples(
    pole: Point,
    j: usize,
    r: f64,
    theta0: f64,
    u: &[f64],
    opts: &NodalOptions,
) -> Result<NodalReport> {
    let n = u.len();
    if n < 2 * MAX_MODE + 2 {
        return Err(Error::Precondition(format!("{n} samples are too few for the circle fit")));
    }
    let step = 2.0 * PI / n as f64;
    let theta: Vec<f64> = (0..n).map(|i| theta0 + (i as f64 + 0.5) * step).collect();
    let peak = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = opts.noise * peak;
    if !(peak > 0.0) || !peak.is_finite() {
        return Err(Error::Precondition("eigenfunction vanishes on the probe circle".into()));
    }
    let series = HalfSeries::fit(&theta, u);

    // Significant samples, with the first repeated after the wrap with its sign flipped.
    let sig: Vec<(f64, f64)> = theta.iter().zip(u).filter(|(_, v)| v.abs() > floor).map(|(t, v)| (*t, *v)).collect();
    let mut brackets = Vec::new();
    for w in sig.windows(2) {
        if w[0].1 * w[1].1 < 0.0 {
            brackets.push((w[0], w[1]));
        }
    }
    let (first, last) = (sig[0], sig[sig.len() - 1]);
    let wrapped = (first.0 + 2.0 * PI, -first.1);
    if last.1 * wrapped.1 < 0.0 {
        brackets.push((last, wrapped));
    }
    let k = brackets.len();
    if k % 2 == 0 {
        return Err(Error::Precondition(format!("even zero count {k} on the probe circle")));
    }
    if k > opts.cap {
        return Err(Error::Precondition(format!("zero order {k} exceeds the cap {}", opts.cap)));
    }

    let mut rays: Vec<f64> = brackets
        .iter()
        .map(|&((t0, v0), (t1, v1))| {
            bisect(|t| series.eval(t), t0, t1).unwrap_or(t0 + (t1 - t0) * v0 / (v0 - v1))
        })
        .map(|t| t.rem_euclid(2.0 * PI))
        .collect();
    rays.sort_by(f64::total_cmp);

    let (a, b) = series.mode(k);
    let scale = k as f64 / r.powf(k as f64 / 2.0);
    let (num, den) = theta.iter().zip(u).fold((0.0, 0.0), |(nm, dn), (t, v)| {
        let e = v - series.eval(*t);
        (nm + e * e, dn + v * v)
    });
    Ok(NodalReport {
        pole,
        j,
        r,
        k,
        ck: a * scale,
        dk: b * scale,
        rays,
        residual: (num / den).sqrt(),
        energy: series.energy(),
    })
}

fn probe(spec: &Spectrum, j: usize, pole: Point, r: f64, theta0: f64, n: usize) -> Result<Vec<f64>> {
    let field = spec.field(j);
    let step = 2.0 * PI / n as f64;
    (0..n)
        .map(|i| {
            let p = pole + Point::from_polar(r, theta0 + (i as f64 + 0.5) * step);
            field.eval(p).ok_or_else(|| Error::Precondition("probe circle leaves the mesh".into()))
        })
        .collect()
}

fn check_radius(problem: &Problem, r: f64) -> Result<()> {
    let a = problem.pole.position;
    let dist = problem.domain.distance_to_boundary(a);
    let grading = problem.disc.grading_radius.unwrap_or(0.2f64.min(dist));
    if !(r > 0.0) || r >= dist / 2.0 || r >= grading {
        return Err(Error::Precondition(format!(
            "probe radius {r} must be below half the boundary distance {dist} and the grading radius {grading}"
        )));
    }
    Ok(())
}

/// Nodal report for eigenfunction `j` of an already solved problem. A
/// degenerate cluster is accepted only if every member has the same order.
pub fn nodal_order_in(problem: &Problem, spec: &Spectrum, j: usize, r: f64, opts: &NodalOptions) -> Result<NodalReport> {
    check_radius(problem, r)?;
    if j == 0 || j > spec.pairs.len() {
        return Err(Error::Precondition(format!("eigenvalue {j} was not computed")));
    }
    let a = problem.pole.position;
    let theta0 = (problem.cuts[0].points[1] - a).angle();
    let report_for = |i: usize| -> Result<NodalReport> {
        let u = probe(spec, i, a, r, theta0, opts.samples)?;
        nodal_from_samples(a, i, r, theta0, &u, opts)
    };
    let report = report_for(j)?;
    let c = spec.pairs[j - 1].cluster;
    let members: Vec<usize> = (1..=spec.pairs.len()).filter(|&i| spec.pairs[i - 1].cluster == c).collect();
    if members.last() == Some(&spec.pairs.len()) && members.len() > 1 {
        return Err(Error::Precondition(format!("cluster of eigenvalue {j} may extend past the computed range")));
    }
    for &i in members.iter().filter(|&&i| i != j) {
        let k = report_for(i).map(|r| r.k).ok();
        if k != Some(report.k) {
            return Err(Error::Precondition(format!(
                "eigenvalue {j} is not simple and its cluster has mixed nodal orders"
            )));
        }
    }
    Ok(report)
}

/// Number of nodal lines of eigenfunction `j` ending at the pole.
pub fn nodal_order(domain: &Domain, pole: Pole, j: usize, r: f64, disc: &Discretization) -> Result<NodalReport> {
    let problem = Problem::new(domain, pole, disc)?;
    check_radius(&problem, r)?;
    let spec = problem.magnetic(j + 2)?;
    nodal_order_in(&problem, &spec, j, r, &NodalOptions::default())
}

/// Largest deviation of consecutive ray gaps from `2pi/k`.
pub fn ray_geometry(report: &NodalReport) -> Result<f64> {
    let k = report.rays.len();
    if report.k < 3 || k != report.k {
        return Err(Error::Precondition(format!("equal sectors need k >= 3, got {}", report.k)));
    }
    let ideal = 2.0 * PI / k as f64;
    Ok((0..k)
        .map(|i| {
            let gap = if i + 1 < k { report.rays[i + 1] - report.rays[i] } else { report.rays[0] + 2.0 * PI - report.rays[k - 1] };
            (gap - ideal).abs()
        })
        .fold(0.0, f64::max))
}

/// Locates the pole on the segment `from -> to` where eigenfunction `j`
/// concentrates on mode `k` of the probe circle, by a coarse scan followed by
/// golden-section search.
pub fn locate_order_pole(
    domain: &Domain,
    j: usize,
    k: usize,
    from: Point,
    to: Point,
    r: f64,
    disc: &Discretization,
) -> Result<(Point, NodalReport)> {
    let opts = NodalOptions { cap: usize::MAX, ..NodalOptions::default() };
    let share = |t: f64| -> Result<f64> {
        let a = from.lerp(to, t);
        let problem = Problem::new(domain, Pole { position: a }, disc)?;
        check_radius(&problem, r)?;
        let spec = problem.magnetic(j)?;
        let theta0 = (problem.cuts[0].points[1] - a).angle();
        let u = probe(&spec, j, a, r, theta0, opts.samples)?;
        let series = HalfSeries::fit(&(0..u.len()).map(|i| theta0 + (i as f64 + 0.5) * 2.0 * PI / u.len() as f64).collect::<Vec<_>>(), &u);
        Ok(series.energy().get(k / 2).copied().unwrap_or(0.0))
    };
    let n = 8;
    let mut best = (0, f64::NEG_INFINITY);
    for i in 0..=n {
        let s = share(i as f64 / n as f64)?;
        if s > best.1 {
            best = (i, s);
        }
    }
    let h = 1.0 / n as f64;
    let (mut lo, mut hi) = ((best.0 as f64 * h - h).max(0.0), (best.0 as f64 * h + h).min(1.0));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut x1, mut x2) = (hi - g * (hi - lo), lo + g * (hi - lo));
    let (mut f1, mut f2) = (share(x1)?, share(x2)?);
    while (hi - lo) * from.dist(to) > 1e-5 {
        if f1 > f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = share(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = share(x2)?;
        }
    }
    let a = from.lerp(to, 0.5 * (lo + hi));
    let report = nodal_order(domain, Pole { position: a }, j, r, disc)?;
    Ok((a, report))
}
