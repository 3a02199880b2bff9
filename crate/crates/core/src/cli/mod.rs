//! The `abspec` command line: configuration, run manifests, result cache
//! and CSV/SVG emission.

mod config;
mod output;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use config::{AnalyzeConfig, Config, MeshConfig, Mode, PathConfig, RunConfig, SolverConfig, SweepConfig};
pub use output::{fmt_g, heatmap, mesh_svg, Csv};

use crate::analysis::{
    boundary_convergence, nodal_order, rate_fit, ray_geometry, smoothness_scan, sweep_row, SweepRow, SweepTable,
};
use crate::error::{Error, Result};
use crate::geometry::{build_domain, Domain, Point, Pole};
use crate::meshing::{triangulate_with, write_mesh, MeshRequest};
use crate::spectral::{dirichlet_spectrum, Discretization, Problem, Spectrum};

/// Largest tolerated deviation of nodal ray gaps from `2pi/k`, in radians.
pub const RAY_TOLERANCE: f64 = 0.15;

#[derive(Debug, Parser)]
#[command(name = "abspec", version, about = "Aharonov-Bohm eigenvalues with half-integer circulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML configuration, or a manifest (`.json`/`.jsonl`) to re-run.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Also write SVG figures.
    #[arg(long, global = true)]
    pub svg: bool,
    /// Worker threads.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Largest number of unknowns in one solve.
    #[arg(long, global = true)]
    pub budget: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Dirichlet, magnetic and double-cover eigenvalues at one pole.
    Spectrum,
    /// Magnetic eigenvalues over a pole grid or path.
    Sweep,
    /// Boundary limit, nodal order, vanishing rate or smoothness scan.
    Analyze,
    /// Export the mesh.
    Mesh,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Sweep => "sweep",
            Command::Analyze => "analyze",
            Command::Mesh => "mesh",
        }
    }
}

/// One line of `manifest.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: Command,
    pub config: Config,
    pub mesh: MeshConfig,
    pub version: String,
    pub wall_time_s: f64,
    pub outputs: Vec<String>,
    pub input_hash: String,
}

#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub outputs: Vec<PathBuf>,
    pub summary: Vec<String>,
}

fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Reads a TOML configuration or the config snapshot of the last manifest in a file.
pub fn load_config(path: &Path) -> Result<Config> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    if text.trim_start().starts_with('{') {
        let line = text.lines().rev().find(|l| !l.trim().is_empty()).unwrap_or("");
        let m: RunManifest =
            serde_json::from_str(line).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        return Ok(m.config);
    }
    Config::from_toml(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        e => e,
    })
}

struct Ctx<'a> {
    cfg: &'a Config,
    domain: Domain,
    disc: Discretization,
    out: PathBuf,
    outcome: Outcome,
}

impl Ctx<'_> {
    fn write(&mut self, name: &str, text: &str) -> Result<()> {
        let path = self.out.join(name);
        fs::write(&path, text)?;
        self.outcome.outputs.push(path);
        Ok(())
    }

    fn say(&mut self, line: String) {
        self.outcome.summary.push(line);
    }

    fn pole(&self) -> Result<Pole> {
        self.cfg.pole().ok_or_else(|| Error::Parse("missing `pole`".into()))
    }

    fn analyze(&self) -> Result<&AnalyzeConfig> {
        self.cfg.analyze.as_ref().ok_or_else(|| Error::Parse("missing [analyze] section".into()))
    }

    /// Magnetic eigenvalues at each pole, through the on-disk cache.
    fn rows(&self, poles: &[Pole], m: usize) -> Result<Vec<SweepRow>> {
        let dir = self.out.join("cache");
        fs::create_dir_all(&dir)?;
        let c = self.cfg;
        poles
            .par_iter()
            .map(|p| {
                let key = serde_json::to_string(&(
                    &c.domain,
                    p.position,
                    c.mesh.h,
                    c.mesh.order,
                    m,
                    c.mesh.grading_exponent,
                    c.mesh.grading_radius,
                    c.mesh.mirror,
                    c.solver.tol,
                    c.solver.cluster_gap,
                    self.disc.max_vertices,
                ))
                .expect("cache key serializes");
                let file = dir.join(format!("{}.json", hex_digest(key.as_bytes())));
                if let Ok(text) = fs::read_to_string(&file) {
                    if let Ok(row) = serde_json::from_str::<SweepRow>(&text) {
                        return Ok(row);
                    }
                }
                let row = sweep_row(&self.domain, *p, &self.disc, m);
                let tmp = file.with_extension(format!("tmp{}", std::process::id()));
                fs::write(&tmp, serde_json::to_string(&row).expect("row serializes"))?;
                fs::rename(&tmp, &file)?;
                Ok(row)
            })
            .collect()
    }

    fn table(&self, poles: &[Pole], m: usize) -> Result<SweepTable> {
        Ok(SweepTable {
            domain: self.cfg.domain.id(),
            h: self.disc.h,
            order: self.disc.order.degree(),
            m,
            rows: self.rows(poles, m)?,
        })
    }
}

fn spectrum_csv(schema: &str, pole: Option<Point>, spec: &Spectrum, tag: &str) -> String {
    let mut csv = Csv::new(schema, "a1,a2,j,lambda,residual,tag");
    let (a1, a2) = pole.map_or((String::new(), String::new()), |p| (fmt_g(p.x), fmt_g(p.y)));
    for (i, pair) in spec.pairs.iter().enumerate() {
        csv.row(&[a1.clone(), a2.clone(), (i + 1).to_string(), fmt_g(pair.value), fmt_g(pair.residual), tag.into()]);
    }
    csv.into_string()
}

fn cmd_spectrum(ctx: &mut Ctx) -> Result<()> {
    let m = ctx.cfg.solver.m;
    let Some(pole) = ctx.cfg.pole() else {
        let d = dirichlet_spectrum(&ctx.domain, &ctx.disc, m)?;
        ctx.write("dirichlet.csv", &spectrum_csv("abspec-dirichlet/1", None, &d, "symmetric"))?;
        ctx.say(format!("dirichlet lambda_1 = {}", fmt_g(d.pairs[0].value)));
        return Ok(());
    };
    let pr = Problem::new(&ctx.domain, pole, &ctx.disc)?;
    let a = Some(pole.position);
    let d = pr.dirichlet(m)?;
    let mag = pr.magnetic(m)?;
    let cov = pr.cover(m)?;
    ctx.write("dirichlet.csv", &spectrum_csv("abspec-dirichlet/1", a, &d, "symmetric"))?;
    ctx.write("magnetic.csv", &spectrum_csv("abspec-magnetic/1", a, &mag, "antisymmetric"))?;
    let mut csv = Csv::new("abspec-cover/1", "a1,a2,j,lambda,residual,tag");
    for i in 0..cov.values.len() {
        csv.row(&[
            fmt_g(pole.position.x),
            fmt_g(pole.position.y),
            (i + 1).to_string(),
            fmt_g(cov.values[i]),
            fmt_g(cov.residuals[i]),
            cov.tags[i].as_str().into(),
        ]);
    }
    ctx.write("cover.csv", &csv.into_string())?;
    ctx.say(format!(
        "dirichlet lambda_1 = {}, magnetic lambda_1 = {}, {} unknowns",
        fmt_g(d.pairs[0].value),
        fmt_g(mag.pairs[0].value),
        mag.dofs.num_free
    ));
    Ok(())
}

fn cmd_sweep(ctx: &mut Ctx) -> Result<()> {
    let (poles, js) = ctx.cfg.sweep_poles(&ctx.domain)?;
    if poles.is_empty() {
        return Err(Error::Precondition("sweep has no interior pole".into()));
    }
    let m = *js.iter().max().unwrap();
    let table = ctx.table(&poles, m)?;
    let mut csv = Csv::new("abspec-sweep/1", "a1,a2,j,lambda,residual,tag");
    for row in &table.rows {
        for &j in &js {
            let (v, r, tag) = match &row.error {
                Some(_) => (f64::NAN, f64::NAN, "error"),
                None => {
                    let c = row.clusters[j - 1];
                    let simple = row.clusters.iter().filter(|&&x| x == c).count() == 1;
                    (row.values[j - 1], row.residuals[j - 1], if simple { "simple" } else { "multiple" })
                }
            };
            csv.row(&[fmt_g(row.pole.x), fmt_g(row.pole.y), j.to_string(), fmt_g(v), fmt_g(r), tag.into()]);
        }
    }
    ctx.write("sweep.csv", &csv.into_string())?;
    let failed = table.rows.iter().filter(|r| r.error.is_some()).count();
    ctx.say(format!("{} poles, {} failed", table.rows.len(), failed));
    let cell = match ctx.cfg.sweep.as_ref().and_then(|s| s.grid) {
        Some(n) => 1.0 / n as f64,
        None => if poles.len() > 1 { poles[0].position.dist(poles[1].position) } else { 0.05 },
    };
    let centers: Vec<Point> = table.rows.iter().map(|r| r.pole).collect();
    for &j in &js {
        let col = table.column(j);
        if let Some((i, v)) = col.iter().enumerate().filter(|(_, v)| v.is_finite()).max_by(|a, b| a.1.total_cmp(b.1)) {
            ctx.say(format!("lambda_{j}: max {} at ({}, {})", fmt_g(*v), fmt_g(centers[i].x), fmt_g(centers[i].y)));
        }
        if ctx.cfg.run.svg {
            let svg = heatmap(&ctx.domain, &centers, &col, cell, &format!("lambda_{j}"));
            ctx.write(&format!("sweep_j{j}.svg"), &svg)?;
        }
    }
    Ok(())
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn cmd_analyze(ctx: &mut Ctx) -> Result<()> {
    let an = ctx.analyze()?.clone();
    let j = an.j;
    match an.mode {
        Mode::Nodal => {
            let pole = ctx.pole()?;
            let r = an.r.unwrap_or(0.05);
            let rep = nodal_order(&ctx.domain, pole, j, r, &ctx.disc)?;
            let mut csv = Csv::new("abspec-nodal/1", "a1,a2,j,k,ck,dk,res");
            csv.row(&[
                fmt_g(rep.pole.x),
                fmt_g(rep.pole.y),
                j.to_string(),
                rep.k.to_string(),
                fmt_g(rep.ck),
                fmt_g(rep.dk),
                fmt_g(rep.residual),
            ]);
            ctx.write("nodal.csv", &csv.into_string())?;
            let dev = ray_geometry(&rep).ok();
            let ok = rep.k % 2 == 1 && dev.map_or(true, |d| d < RAY_TOLERANCE);
            let rays: Vec<String> = rep.rays.iter().map(|t| format!("{t:.4}")).collect();
            ctx.say(format!("nodal j={j} k={} {}", rep.k, verdict(ok)));
            ctx.say(format!("rays [{}]{}", rays.join(", "), dev.map_or(String::new(), |d| format!(", gap deviation {d:.4} rad"))));
        }
        Mode::Boundary => {
            let b = an.b.ok_or_else(|| Error::Parse("analyze.b is required for mode = \"boundary\"".into()))?;
            let ds = an.distances.ok_or_else(|| Error::Parse("analyze.distances is required".into()))?;
            let rep = boundary_convergence(&ctx.domain, j, Point::new(b[0], b[1]), &ds, &ctx.disc)?;
            let mut csv = Csv::new("abspec-boundary/1", "b1,b2,j,d,lambda_a,lambda,gap");
            for i in 0..rep.distances.len() {
                csv.row(&[
                    fmt_g(b[0]),
                    fmt_g(b[1]),
                    j.to_string(),
                    fmt_g(rep.distances[i]),
                    fmt_g(rep.magnetic[i]),
                    fmt_g(rep.dirichlet[i]),
                    fmt_g(rep.gaps[i]),
                ]);
            }
            ctx.write("boundary.csv", &csv.into_string())?;
            ctx.say(format!("boundary j={j} monotone {}", verdict(rep.passes)));
        }
        Mode::Rate => {
            let b = match an.b {
                Some(b) => Point::new(b[0], b[1]),
                None => ctx.pole()?.position,
            };
            let dir = an.direction.unwrap_or([1.0, 0.0]);
            let radii = an.radii.ok_or_else(|| Error::Parse("analyze.radii is required for mode = \"rate\"".into()))?;
            let fit = rate_fit(&ctx.domain, b, j, Point::new(dir[0], dir[1]), &radii, &ctx.disc)?;
            let mut csv = Csv::new("abspec-rate/1", "b1,b2,j,k,p,p_lo,p_hi");
            csv.row(&[
                fmt_g(b.x),
                fmt_g(b.y),
                j.to_string(),
                fit.k.map_or(String::new(), |k| k.to_string()),
                fmt_g(fit.p),
                fmt_g(fit.p_lo),
                fmt_g(fit.p_hi),
            ]);
            ctx.write("rate.csv", &csv.into_string())?;
            let v = match fit.passes {
                Some(ok) => format!("bound {} {}", fmt_g(fit.bound.unwrap()), verdict(ok)),
                None => "no bound for k = 1".into(),
            };
            ctx.say(format!("rate j={j} p={:.3} [{:.3}, {:.3}] {v}", fit.p, fit.p_lo, fit.p_hi));
        }
        Mode::Smoothness => {
            let (poles, _) = ctx.cfg.sweep_poles(&ctx.domain)?;
            let table = ctx.table(&poles, j + 1)?;
            let rep = smoothness_scan(&table, j)?;
            let mut csv = Csv::new("abspec-smoothness/1", "a1,a2,j,lambda,second,kink,crossing");
            let col = table.column(j);
            for (i, row) in table.rows.iter().enumerate() {
                csv.row(&[
                    fmt_g(row.pole.x),
                    fmt_g(row.pole.y),
                    j.to_string(),
                    fmt_g(col[i]),
                    fmt_g(rep.second[i]),
                    (rep.kinks.contains(&i) as u8).to_string(),
                    (rep.crossings.contains(&i) as u8).to_string(),
                ]);
            }
            ctx.write("smoothness.csv", &csv.into_string())?;
            ctx.say(format!(
                "smoothness j={j} kinks={} crossings={} flagged={} {}",
                rep.kinks.len(),
                rep.crossings.len(),
                rep.flagged.len(),
                verdict(rep.passes())
            ));
        }
    }
    Ok(())
}

fn cmd_mesh(ctx: &mut Ctx) -> Result<()> {
    let mesh = match ctx.cfg.pole() {
        Some(p) => Problem::new(&ctx.domain, p, &ctx.disc)?.mesh,
        None => {
            let mut req = MeshRequest::new(ctx.disc.h);
            req.max_vertices = ctx.disc.max_vertices;
            triangulate_with(&ctx.domain, &req)?
        }
    };
    let mut buf = Vec::new();
    write_mesh(&mesh, &mut buf)?;
    ctx.write("mesh.txt", &String::from_utf8(buf).expect("mesh text is ascii"))?;
    if ctx.cfg.run.svg {
        let svg = mesh_svg(&ctx.domain, &mesh.vertices, &mesh.edges());
        ctx.write("mesh.svg", &svg)?;
    }
    ctx.say(format!(
        "{} vertices, {} triangles, min angle {:.1} deg",
        mesh.num_vertices(),
        mesh.triangles.len(),
        mesh.min_angle()
    ));
    Ok(())
}

/// Runs one command and appends its manifest to `out/manifest.jsonl`.
pub fn execute(command: Command, cfg: &Config, out: &Path) -> Result<Outcome> {
    let start = Instant::now();
    fs::create_dir_all(out)?;
    let domain = build_domain(&cfg.domain)?;
    let disc = cfg.discretization()?;
    let mut ctx = Ctx { cfg, domain, disc, out: out.to_path_buf(), outcome: Outcome::default() };
    let work = |ctx: &mut Ctx| match command {
        Command::Spectrum => cmd_spectrum(ctx),
        Command::Sweep => cmd_sweep(ctx),
        Command::Analyze => cmd_analyze(ctx),
        Command::Mesh => cmd_mesh(ctx),
    };
    match cfg.run.jobs {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?
            .install(|| work(&mut ctx))?,
        None => work(&mut ctx)?,
    }

    let mut hashed = cfg.clone();
    hashed.run = RunConfig::default();
    let input = serde_json::to_string(&(command, &hashed)).expect("config serializes");
    let manifest = RunManifest {
        command,
        config: cfg.clone(),
        mesh: cfg.mesh.clone(),
        version: env!("CARGO_PKG_VERSION").into(),
        wall_time_s: start.elapsed().as_secs_f64(),
        outputs: ctx
            .outcome
            .outputs
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
            .collect(),
        input_hash: hex_digest(input.as_bytes()),
    };
    let path = out.join("manifest.jsonl");
    let mut f = fs::OpenOptions::new().create(true).append(true).open(&path)?;
    writeln!(f, "{}", serde_json::to_string(&manifest).expect("manifest serializes"))?;
    Ok(ctx.outcome)
}

/// Entry point for the binary; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let Some(path) = cli.config.as_deref() else {
        eprintln!("error: --config PATH is required");
        return 1;
    };
    let result = load_config(path).and_then(|mut cfg| {
        if let Some(o) = &cli.out {
            cfg.run.out = Some(o.to_string_lossy().into_owned());
        }
        cfg.run.svg |= cli.svg;
        cfg.run.jobs = cli.jobs.or(cfg.run.jobs);
        cfg.run.budget = cli.budget.or(cfg.run.budget);
        let out = PathBuf::from(cfg.run.out.clone().unwrap_or_else(|| "out".into()));
        execute(cli.command, &cfg, &out)
    });
    match result {
        Ok(outcome) => {
            for line in &outcome.summary {
                println!("{line}");
            }
            for p in &outcome.outputs {
                println!("wrote {}", p.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
