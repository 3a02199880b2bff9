use abspec::cli::run;
use std::fs;
use std::path::Path;

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn go(args: &[&str]) -> i32 {
    run(std::iter::once("abspec").chain(args.iter().copied()))
}

fn first_value(csv: &Path) -> f64 {
    let text = fs::read_to_string(csv).unwrap();
    let row = text.lines().nth(2).unwrap();
    row.split(',').nth(3).unwrap().parse().unwrap()
}

#[test]
fn spectrum_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let disk = write(d, "disk.toml", "pole = [0.0, 0.0]\n[domain]\nkind = \"unit-disk\"\n[mesh]\nh = 0.06\n");
    let out = d.join("disk");
    assert_eq!(go(&["spectrum", "--config", &disk, "--out", out.to_str().unwrap()]), 0);
    assert!((first_value(&out.join("magnetic.csv")) - 9.8696).abs() < 0.1);
    let cover = fs::read_to_string(out.join("cover.csv")).unwrap();
    assert!(cover.starts_with("# schema: abspec-cover/1\na1,a2,j,lambda,residual,tag\n"));

    let sq = write(d, "sq.toml", "[domain]\nkind = \"unit-square\"\n");
    let out = d.join("sq");
    assert_eq!(go(&["spectrum", "--config", &sq, "--out", out.to_str().unwrap()]), 0);
    assert!((first_value(&out.join("dirichlet.csv")) - 19.7392).abs() < 0.01);
    assert!(!out.join("magnetic.csv").exists());
}

#[test]
fn usage_and_parse_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.toml", "[domain]\nradius = 1.0\n");
    assert_eq!(go(&["spectrum", "--config", &bad]), 1);
    let err = abspec::cli::load_config(Path::new(&bad)).unwrap_err().to_string();
    assert!(err.contains("kind"), "{err}");
    assert_eq!(go(&["frobnicate"]), 1);
    assert_eq!(go(&["spectrum"]), 1);
    let outside = write(dir.path(), "o.toml", "pole = [2.0, 0.5]\n[domain]\nkind = \"unit-square\"\n");
    assert_eq!(go(&["spectrum", "--config", &outside, "--out", dir.path().join("o").to_str().unwrap()]), 3);
}

#[test]
fn budget_is_a_precondition() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "pole = [0.5, 0.5]\n[domain]\nkind = \"unit-square\"\n[mesh]\nh = 0.02\n");
    let out = dir.path().join("o");
    assert_eq!(go(&["spectrum", "--config", &cfg, "--out", out.to_str().unwrap(), "--budget", "2000"]), 3);
}

#[test]
fn sweep_rows_heatmaps_and_rerun() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let cfg = write(
        d,
        "sector.toml",
        "[domain]\nkind = \"sector\"\naperture = 0.7853981633974483\n[mesh]\nh = 0.08\n[sweep]\ngrid = 20\nj = [1, 2, 3, 4]\n",
    );
    let a = d.join("a");
    assert_eq!(go(&["sweep", "--config", &cfg, "--out", a.to_str().unwrap(), "--svg", "--jobs", "3"]), 0);
    let text = fs::read_to_string(a.join("sweep.csv")).unwrap();
    let sector = abspec::geometry::build_domain(&abspec::geometry::DomainSpec::Sector {
        aperture: std::f64::consts::PI / 4.0,
        radius: 1.0,
    })
    .unwrap();
    let poles = abspec::geometry::pole_grid(&sector, 20).unwrap().len();
    assert_eq!(text.lines().count() - 2, poles * 4);
    let svg = fs::read_to_string(a.join("sweep_j1.svg")).unwrap();
    assert!(svg.contains("stroke-width=\"4\""));

    let b = d.join("b");
    let manifest = a.join("manifest.jsonl");
    assert_eq!(go(&["sweep", "--config", manifest.to_str().unwrap(), "--out", b.to_str().unwrap(), "--jobs", "1"]), 0);
    assert_eq!(fs::read(a.join("sweep.csv")).unwrap(), fs::read(b.join("sweep.csv")).unwrap());
}

#[test]
fn square_landscape_peaks_in_the_centre() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "sq.toml", "[domain]\nkind = \"unit-square\"\n[mesh]\nh = 0.1\n[sweep]\ngrid = 10\nj = [1]\n");
    let out = dir.path().join("o");
    assert_eq!(go(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap()]), 0);
    let text = fs::read_to_string(out.join("sweep.csv")).unwrap();
    let best = text
        .lines()
        .skip(2)
        .map(|l| l.split(',').map(|f| f.parse::<f64>().unwrap_or(f64::NAN)).collect::<Vec<_>>())
        .max_by(|a, b| a[3].total_cmp(&b[3]))
        .unwrap();
    assert_eq!((best[0], best[1]), (0.5, 0.5));
}

#[test]
fn analyze_modes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let base = "pole = [0.5, 0.5]\n[domain]\nkind = \"unit-square\"\n[mesh]\nh = 0.06\n";
    let nodal = write(d, "n.toml", &format!("{base}[analyze]\nmode = \"nodal\"\nj = 3\nr = 0.05\n"));
    let out = d.join("n");
    assert_eq!(go(&["analyze", "--config", &nodal, "--out", out.to_str().unwrap()]), 0);
    let row = fs::read_to_string(out.join("nodal.csv")).unwrap();
    assert!(row.lines().nth(1).unwrap() == "a1,a2,j,k,ck,dk,res");
    assert!(row.lines().nth(2).unwrap().starts_with("0.5,0.5,3,3,"));

    let bnd = write(
        d,
        "b.toml",
        &format!("{base}[analyze]\nmode = \"boundary\"\nj = 1\nb = [0.5, 0.0]\ndistances = [0.2, 0.1, 0.05, 0.02]\n"),
    );
    assert_eq!(go(&["analyze", "--config", &bnd, "--out", d.join("b").to_str().unwrap()]), 0);

    let rate = write(d, "r.toml", &format!("{base}[analyze]\nmode = \"rate\"\nj = 3\nradii = [0.08, 0.06]\n"));
    assert_eq!(go(&["analyze", "--config", &rate, "--out", d.join("r").to_str().unwrap()]), 3);
}

#[test]
fn mesh_export_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "m.toml", "pole = [0.3, 0.6]\n[domain]\nkind = \"unit-square\"\n[mesh]\nh = 0.1\n");
    let out = dir.path().join("o");
    assert_eq!(go(&["mesh", "--config", &cfg, "--out", out.to_str().unwrap(), "--svg"]), 0);
    let text = fs::read(out.join("mesh.txt")).unwrap();
    let mesh = abspec::meshing::read_mesh(text.as_slice()).unwrap();
    let mut again = Vec::new();
    abspec::meshing::write_mesh(&mesh, &mut again).unwrap();
    assert_eq!(text, again);
    assert!(mesh.pole.is_some());
    assert!(out.join("mesh.svg").exists());
}
