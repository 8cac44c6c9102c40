use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn ado(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ado"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("ADO_OUTPUT_DIR")
        .output()
        .unwrap()
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn quad_lq4_has_twelve_directions() {
    let dir = tempfile::tempdir().unwrap();
    let o = ado(&["quad", "--scheme", "lqn", "--order", "4"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let t = rows(&dir.path().join("directions.csv"));
    assert_eq!(t[0], ["i", "mu", "eta", "xi", "w"]);
    assert_eq!(t.len(), 13);
    let m = rows(&dir.path().join("moments.csv"));
    assert_eq!(m[0], ["a", "b", "c", "error"]);
    for r in &m[1..] {
        let degree: u32 = r[..3].iter().map(|v| v.parse::<u32>().unwrap()).sum();
        if degree <= 4 {
            assert!(r[3].parse::<f64>().unwrap() < 1e-12, "{r:?}");
        }
    }
}

#[test]
fn fig7_benchmark_gives_four_region_fluxes() {
    let dir = tempfile::tempdir().unwrap();
    let o = ado(
        &["benchmark", "fig7", "--sigma-s", "0.9", "--quad", "pntn:8", "--mesh", "2x2"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let t = rows(&dir.path().join("flux.csv"));
    assert_eq!(t[0], ["region", "x_min", "x_max", "y_min", "y_max", "flux"]);
    assert_eq!(t.len(), 5);
    let f: Vec<f64> = t[1..].iter().map(|r| r[5].parse().unwrap()).collect();
    assert!(f[0] > f[1] && f[1] > f[3]);
    assert!((f[1] - f[2]).abs() < 1e-12);
    let m = std::fs::read_to_string(dir.path().join("manifest.toml")).unwrap();
    assert!(m.contains("wall_time_s") && m.contains("system_residual"));
}

#[test]
fn empty_source_vacuum_gives_zero_flux() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        &dir,
        "c.toml",
        r#"
mode = "solve2d"
[nodal]
size = [1.0, 1.0]
mesh = [2, 3]
quadrature = "lqn:4"
materials = [{ sigma_t = 1.0, sigma_s = 0.5 }]
"#,
    );
    let out = dir.path().join("out");
    let o = ado(&["run", &cfg], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let t = rows(&out.join("flux.csv"));
    assert_eq!(t.len(), 7);
    assert!(t[1..].iter().all(|r| r[5].parse::<f64>().unwrap() == 0.0));
}

#[test]
fn schema_violation_exits_2_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        &dir,
        "c.toml",
        "mode = \"solve1d\"\n[slab]\ntau_b = 1.0\nalbedo = 0.5\norder = 4\nthickness = 2.0\n",
    );
    let out = dir.path().join("out");
    let o = ado(&["run", &cfg], &out);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error[schema]"));
    assert!(!out.exists());

    let cfg = write(&dir, "d.toml", "mode = \"solve1d\"\n[slab]\ntau_b = 1.0\nalbedo = 1.5\norder = 4\n");
    assert_eq!(ado(&["run", &cfg], &out).status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn numerical_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        &dir,
        "c.toml",
        r#"
mode = "solve1d"
[slab]
tau_b = 1.0
albedo = 1.0
order = 2
phase = { g = 0.4, order = 4 }
incident_left = { constant = 1.0 }
"#,
    );
    let out = dir.path().join("out");
    let o = ado(&["run", &cfg], &out);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error[numerical]"));
    assert!(!out.exists());
}

#[test]
fn missing_input_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let o = ado(&["run", "/nonexistent/config.toml"], dir.path());
    assert_eq!(o.status.code(), Some(4));
    let o = ado(&["converge", "--input", "/nonexistent/s.csv"], dir.path());
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn unknown_plot_kind_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = ado(&["quad", "--scheme", "lqn", "--order", "4", "--plot", "heatmap"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = ado(&["quad", "--scheme", "lqn", "--order", "4", "--plot", "flux-map"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn manifest_reproduces_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        &dir,
        "c.toml",
        r#"
mode = "solve1d"
output = { plots = ["density-vs-tau"] }
[slab]
tau_b = 1.5
albedo = 0.9
order = 8
phase = { g = 0.6, order = 6 }
left = { specular = 0.1, diffuse = 0.2 }
incident_left = { cosine_power = { amplitude = 1.0, power = 1 } }
source = { polynomial = { plus = [0.5, 0.1], minus = [0.5, -0.1] } }
samples = 7
"#,
    );
    let first = dir.path().join("first");
    assert!(ado(&["run", &cfg], &first).status.success());
    let manifest = first.join("manifest.toml");
    let second = dir.path().join("second");
    let o = ado(&["run", manifest.to_str().unwrap()], &second);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["intensity.csv", "density.csv", "plot-density-vs-tau.csv"] {
        assert_eq!(
            std::fs::read(first.join(name)).unwrap(),
            std::fs::read(second.join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn benchmark_manifest_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a");
    let o = ado(&["benchmark", "fig7", "--sigma-s", "0.3", "--mesh", "4x4", "--plot", "flux-map"], &first);
    assert!(o.status.success());
    let second = dir.path().join("b");
    assert!(ado(&["run", first.join("manifest.toml").to_str().unwrap()], &second).status.success());
    for name in ["flux.csv", "plot-flux-map.csv"] {
        assert_eq!(std::fs::read(first.join(name)).unwrap(), std::fs::read(second.join(name)).unwrap());
    }
    assert_eq!(rows(&second.join("plot-flux-map.csv")).len(), 17);
}

#[test]
fn environment_overrides_configured_directory() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("env-out");
    let o = Command::new(env!("CARGO_BIN_EXE_ado"))
        .args(["quad", "--scheme", "pntnsn", "--order", "4"])
        .env("ADO_OUTPUT_DIR", &target)
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(rows(&target.join("directions.csv")).len(), 13);
}

#[test]
fn converge_reports_every_triple() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(&dir, "s.csv", "h,value\n0.4,1.16\n0.2,1.04\n0.1,1.01\n0.05,1.0025\n");
    let out = dir.path().join("out");
    let o = ado(&["converge", "--input", &input, "--plot", "convergence-curve"], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let t = rows(&out.join("orders.csv"));
    assert_eq!(t[0], ["triple", "p", "phi_ref"]);
    assert_eq!(t.len(), 3);
    for r in &t[1..] {
        assert!((r[1].parse::<f64>().unwrap() - 2.0).abs() < 1e-9);
        assert!((r[2].parse::<f64>().unwrap() - 1.0).abs() < 1e-9);
    }
    assert_eq!(rows(&out.join("plot-convergence-curve.csv"))[0], ["h", "value", "p"]);
}

#[test]
fn oracle_uses_the_solver_configuration() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        &dir,
        "c.toml",
        r#"
mode = "solve2d"
[nodal]
x_grid = [0.0, 0.5, 1.0]
y_grid = [0.0, 0.5, 1.0]
quadrature = "lqn:4"
materials = [{ sigma_t = 1.0, sigma_s = 0.5 }]
region_source = [1.0, 0.0, 0.0, 0.0]
"#,
    );
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(ado(&["solve2d", &cfg], &a).status.success());
    let o = ado(&["oracle", &cfg, "--resolution", "64"], &b);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (fa, fb) = (rows(&a.join("flux.csv")), rows(&b.join("flux.csv")));
    assert_eq!(fa[0], fb[0]);
    assert_eq!(fa.len(), fb.len());
    let (x, y): (f64, f64) = (fa[1][5].parse().unwrap(), fb[1][5].parse().unwrap());
    assert!((x - y).abs() < 0.15 * y, "{x} vs {y}");
}

#[test]
fn phase_table_from_flags() {
    let dir = tempfile::tempdir().unwrap();
    let o = ado(&["phase", "--coefficients", "1,0.9,0.2", "--points", "5"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let t = rows(&dir.path().join("phase.csv"));
    assert_eq!(t.len(), 6);
    assert_eq!(t[1][2].parse::<f64>().unwrap(), 2.1);
    assert_eq!(t[1][3], "");
}

#[test]
fn shipped_configs_run() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let dir = tempfile::tempdir().unwrap();
    for name in ["slab.toml", "square.toml"] {
        let cfg = root.join(name);
        let o = ado(&["run", cfg.to_str().unwrap()], &dir.path().join(name));
        assert!(o.status.success(), "{name}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = ado(&["oracle", root.join("square.toml").to_str().unwrap()], &dir.path().join("dd"));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let series = root.join("series.csv");
    let o = ado(&["converge", "--input", series.to_str().unwrap()], &dir.path().join("c"));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}
