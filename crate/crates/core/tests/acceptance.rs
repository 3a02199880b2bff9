//! Acceptance criteria AC1 to AC10, one PASS/FAIL line each.

mod common;

use abspec::analysis::{boundary_convergence, locate_order_pole, nodal_order, rate_fit, rate_fit_with, ray_geometry, smoothness_scan, sweep};
use abspec::assembly::{assemble, Order};
use abspec::geometry::{build_domain, pole_grid, AnchorRule, Cut, Domain, DomainSpec, Point, Pole};
use abspec::spectral::{Discretization, Problem};
use common::*;
use std::f64::consts::PI;
use std::time::Instant;

type Check = Result<String, String>;

fn square() -> Domain {
    build_domain(&DomainSpec::UnitSquare).unwrap()
}

fn sector() -> Domain {
    build_domain(&DomainSpec::Sector { aperture: PI / 4.0, radius: 1.0 }).unwrap()
}

fn ok_if(cond: bool, msg: String) -> Check {
    if cond {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn ac1() -> Check {
    let disk = build_domain(&DomainSpec::UnitDisk).map_err(|e| e.to_string())?;
    let t = Instant::now();
    let pr = Problem::new(&disk, Pole::new(0.0, 0.0), &Discretization::with_h(0.03)).map_err(|e| e.to_string())?;
    let spec = pr.magnetic(4).map_err(|e| e.to_string())?;
    let secs = t.elapsed().as_secs_f64();
    let v = spec.values();
    let x2 = tan_root().powi(2);
    let dofs = spec.dofs.num_free;
    let msg = format!(
        "lambda_1..4 = {:.4} {:.4} {:.4} {:.4}; pi^2 = {:.4}, tan-root^2 = {:.4}; {dofs} unknowns, {secs:.1} s",
        v[0], v[1], v[2], v[3], PI * PI, x2
    );
    ok_if(
        rel(v[0], PI * PI) < 0.01 && rel(v[1], x2) < 0.01 && rel(v[2], x2) < 0.01 && dofs <= 50_000 && secs < 60.0,
        msg,
    )
}

fn ac2() -> Check {
    let pr = abspec::spectral::dirichlet_spectrum(&square(), &Discretization::with_h(0.05), 4).map_err(|e| e.to_string())?;
    let v = pr.values();
    let exact = square_dirichlet(4);
    let worst = v.iter().zip(&exact).map(|(a, b)| rel(*a, *b)).fold(0.0, f64::max);
    let c = pr.clusters();
    ok_if(
        worst < 0.005 && c[1] == c[2] && c[0] != c[1] && c[3] != c[2],
        format!("worst rel err {worst:.1e}, clusters {c:?}"),
    )
}

fn ac3() -> Check {
    let disk = build_domain(&DomainSpec::UnitDisk).unwrap();
    let cases = [(disk, Pole::new(0.0, 0.0)), (square(), Pole::new(0.3, 0.6)), (sector(), Pole::new(0.5, 0.1))];
    let mut worst = 0.0f64;
    for (d, pole) in &cases {
        let pr = Problem::new(d, *pole, &Discretization::with_h(0.06)).map_err(|e| e.to_string())?;
        let cover = pr.cover(10).map_err(|e| e.to_string())?;
        let mut merged = pr.dirichlet(10).map_err(|e| e.to_string())?.values();
        merged.extend(pr.magnetic(10).map_err(|e| e.to_string())?.values());
        merged.sort_by(f64::total_cmp);
        for i in 0..10 {
            worst = worst.max(rel(cover.values[i], merged[i]));
        }
    }
    ok_if(worst < 1e-6, format!("worst rel diff {worst:.1e} over 3 domain/pole pairs"))
}

fn ac4() -> Check {
    let mut worst = 0.0f64;
    for (pole, a, b) in [
        (Point::new(0.35, 0.6), vec![Point::new(0.0, 0.6)], vec![Point::new(0.6, 0.8), Point::new(0.6, 1.0)]),
        (Point::new(0.7, 0.25), vec![Point::new(0.7, 0.0)], vec![Point::new(1.0, 0.25)]),
    ] {
        let cut = |rest: Vec<Point>| {
            let mut points = vec![pole];
            points.extend(rest);
            Cut { points, rule: AnchorRule::Explicit }
        };
        let pr = Problem::with_cuts(&square(), Pole { position: pole }, vec![cut(a), cut(b)], &Discretization::with_h(0.05))
            .map_err(|e| e.to_string())?;
        let x = pr.magnetic(6).map_err(|e| e.to_string())?.values();
        let y = pr.magnetic_on(&pr.cut_mesh_for(1).map_err(|e| e.to_string())?, 6).map_err(|e| e.to_string())?.values();
        for (p, q) in x.iter().zip(&y) {
            worst = worst.max(rel(*p, *q));
        }
    }
    ok_if(worst < 1e-6, format!("worst rel diff {worst:.1e} between two cuts, 2 poles"))
}

fn ac5() -> Check {
    let mut lines = Vec::new();
    let mut good = true;
    for j in 1..=4 {
        let r = boundary_convergence(&square(), j, Point::new(0.5, 0.0), &[0.2, 0.1, 0.05, 0.02], &Discretization::with_h(0.05))
            .map_err(|e| e.to_string())?;
        let dec = r.gaps.windows(2).all(|w| w[1] < w[0]);
        let ratio = r.gaps[3] / r.gaps[0];
        good &= dec && ratio < 0.2;
        lines.push(format!("j={j} final/initial {ratio:.1e}"));
    }
    ok_if(good, lines.join(", "))
}

fn ac6() -> Check {
    let sq = square();
    let disc = Discretization::with_h(0.08);
    let mut min_margin = f64::INFINITY;
    let mut good = true;
    for pole in pole_grid(&sq, 10).unwrap() {
        let pr = Problem::new(&sq, pole, &disc).map_err(|e| e.to_string())?;
        let a = pr.magnetic(1).map_err(|e| e.to_string())?.pairs.remove(0);
        let d = pr.dirichlet(1).map_err(|e| e.to_string())?.pairs.remove(0);
        let margin = a.value - d.value;
        let noise = a.residual * a.value + d.residual * d.value;
        good &= margin > 10.0 * noise;
        min_margin = min_margin.min(margin);
    }
    ok_if(good, format!("81 poles, smallest excess {min_margin:.3}"))
}

fn ac7() -> Check {
    let disc = Discretization::with_h(0.03);
    let mut parts = Vec::new();
    let mut good = true;
    for j in [3, 4] {
        let r = nodal_order(&square(), Pole::new(0.5, 0.5), j, 0.05, &disc).map_err(|e| e.to_string())?;
        let dev = ray_geometry(&r).unwrap_or(f64::INFINITY);
        good &= r.k == 3 && dev < 0.15;
        parts.push(format!("square j={j} k={} dev {dev:.3}", r.k));
    }
    let (a, r) = locate_order_pole(&sector(), 3, 3, Point::new(0.55, 0.0), Point::new(0.7, 0.0), 0.05, &disc)
        .map_err(|e| e.to_string())?;
    let dev = ray_geometry(&r).unwrap_or(f64::INFINITY);
    good &= r.k == 3 && dev < 0.15 && (a.x - 0.63).abs() < 0.01;
    parts.push(format!("sector a=({:.4},0) k={} dev {dev:.3}", a.x, r.k));
    let disk = build_domain(&DomainSpec::UnitDisk).unwrap();
    let r = nodal_order(&disk, Pole::new(0.0, 0.0), 1, 0.05, &disc).map_err(|e| e.to_string())?;
    good &= r.k == 1;
    parts.push(format!("disk j=1 k={}", r.k));
    ok_if(good, parts.join("; "))
}

fn ac8() -> Check {
    let fit = rate_fit(&square(), Point::new(0.5, 0.5), 3, Point::new(1.0, 0.0), &[0.08, 0.06, 0.04, 0.03], &Discretization::with_h(0.04))
        .map_err(|e| e.to_string())?;
    let mut good = fit.k == Some(3) && fit.p >= 2.0 - 0.3;
    let mut synth = Vec::new();
    for q in [1.0, 2.0, 3.0] {
        let f = rate_fit_with(Point::new(0.0, 0.0), 1, Point::new(1.0, 0.0), &[0.08, 0.06, 0.04, 0.03], None, |r| {
            Ok((3.7 * r.powf(q), 0.0))
        })
        .map_err(|e| e.to_string())?;
        good &= (f.p - q).abs() <= 0.01 * q;
        synth.push(format!("{:.4}", f.p));
    }
    ok_if(good, format!("p = {:.3} (k = {:?}), synthetic {}", fit.p, fit.k, synth.join("/")))
}

fn ac9() -> Check {
    let poles: Vec<Pole> = (1..200).map(|m| Pole::new(m as f64 / 200.0, 0.0)).collect();
    let t = sweep(&sector(), &poles, &Discretization::with_h(0.04), 3).map_err(|e| e.to_string())?;
    let one = smoothness_scan(&t, 1).map_err(|e| e.to_string())?;
    let two = smoothness_scan(&t, 2).map_err(|e| e.to_string())?;
    let good = one.kinks.len().abs_diff(1) <= 1 && two.kinks.len().abs_diff(3) <= 1 && one.passes() && two.passes();
    let at = |r: &abspec::analysis::SmoothnessReport| r.kinks.iter().map(|&i| format!("{:.3}", t.rows[i].pole.x)).collect::<Vec<_>>().join(" ");
    ok_if(
        good,
        format!(
            "lambda_1 kinks at [{}], lambda_2 kinks at [{}], unexplained {}",
            at(&one),
            at(&two),
            one.flagged.len() + two.flagged.len()
        ),
    )
}

fn ac10() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = dir.path();
    std::fs::write(
        d.join("c.toml"),
        "pole = [0.3, 0.6]\n[domain]\nkind = \"unit-square\"\n[mesh]\nh = 0.08\n[sweep]\ngrid = 5\nj = [1, 2]\n",
    )
    .unwrap();
    let p = |s: &str| d.join(s).to_string_lossy().into_owned();
    let run = |args: &[String]| abspec::cli::run(std::iter::once("abspec".to_string()).chain(args.iter().cloned()));
    let mut same = true;
    for cmd in ["spectrum", "sweep"] {
        let first = run(&[cmd.into(), "--config".into(), p("c.toml"), "--out".into(), p("a"), "--jobs".into(), "4".into()]);
        let again = run(&[cmd.into(), "--config".into(), p("a/manifest.jsonl"), "--out".into(), p(&format!("b{cmd}")), "--jobs".into(), "1".into()]);
        if first != 0 || again != 0 {
            return Err(format!("{cmd} exited with {first}/{again}"));
        }
        let names: Vec<&str> = if cmd == "spectrum" { vec!["dirichlet.csv", "magnetic.csv", "cover.csv"] } else { vec!["sweep.csv"] };
        for n in names {
            same &= std::fs::read(d.join("a").join(n)).ok() == std::fs::read(d.join(format!("b{cmd}")).join(n)).ok();
        }
    }
    let pr = Problem::new(&square(), Pole::new(0.3, 0.6), &Discretization::with_h(0.05)).map_err(|e| e.to_string())?;
    let sys: Vec<_> = [1, 2, 8]
        .iter()
        .map(|&n| rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap().install(|| assemble(&pr.cut_mesh, Order::P2).unwrap()))
        .collect();
    let bits = sys.windows(2).all(|w| w[0].k == w[1].k && w[0].m == w[1].m);
    ok_if(same && bits, format!("manifest re-runs identical: {same}; assembly identical on 1/2/8 threads: {bits}"))
}

fn main() {
    let checks: [(&str, fn() -> Check); 10] =
        [("AC1", ac1), ("AC2", ac2), ("AC3", ac3), ("AC4", ac4), ("AC5", ac5), ("AC6", ac6), ("AC7", ac7), ("AC8", ac8), ("AC9", ac9), ("AC10", ac10)];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, f) in checks {
        if !filter.is_empty() && !filter.iter().any(|x| x == name) {
            continue;
        }
        let t = Instant::now();
        match f() {
            Ok(msg) => println!("{name} PASS  {msg}  [{:.1} s]", t.elapsed().as_secs_f64()),
            Err(msg) => {
                failed += 1;
                println!("{name} FAIL  {msg}  [{:.1} s]", t.elapsed().as_secs_f64());
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
