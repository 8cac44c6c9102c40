//! Dispatch from a validated configuration to tables and diagnostics.

use ado_core::benchmark::fig7;
use ado_core::convergence::{analyze, order_of_triple};
use ado_core::nodal::{assemble_and_solve, Average};
use ado_core::oracle::{dd2d, slab_reference};
use ado_core::quadrature::even_moment_audit;
use ado_core::scattering::hg_exact;
use ado_core::slab::solve;
use ado_core::{NodalProblem, RefinementSeries};
use log::{info, warn};
use toml::Value;

use crate::config::{parse_quadrature, Mode, PlotKind, RunConfig};
use crate::error::CliError;
use crate::output::{num, opt, Table};

#[derive(Debug, Default)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub diagnostics: toml::Table,
}

impl Outcome {
    fn diag(&mut self, key: &str, v: impl Into<Value>) {
        self.diagnostics.insert(key.into(), v.into());
    }
}

/// Builds every problem object first, so schema errors surface before any
/// numerics, then solves.
pub fn execute(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mode = cfg.check_shape()?;
    let job = Job::prepare(cfg, mode)?;
    let mut out = Outcome::default();
    job.run(cfg, &mut out)?;
    Ok(out)
}

enum Job {
    Slab(ado_core::SlabProblem, Vec<f64>, Option<ado_core::OracleConfig>),
    Nodal(NodalProblem, Option<ado_core::OracleConfig>),
    Quad(ado_core::SphereQuadrature),
    Converge(RefinementSeries),
    Phase(ado_core::PhaseFunction, Option<f64>, usize),
}

impl Job {
    fn prepare(cfg: &RunConfig, mode: Mode) -> Result<Self, CliError> {
        let oracle = || cfg.oracle.unwrap_or_default().build();
        Ok(match mode {
            Mode::Solve1d | Mode::Oracle1d => {
                let s = cfg.slab.as_ref().expect("shape checked");
                let o = if mode == Mode::Oracle1d { Some(oracle()?) } else { None };
                Job::Slab(s.build()?, s.depths(), o)
            }
            Mode::Solve2d | Mode::Oracle2d => {
                let p = cfg.nodal.as_ref().expect("shape checked").build()?;
                let o = if mode == Mode::Oracle2d { Some(oracle()?) } else { None };
                Job::Nodal(p, o)
            }
            Mode::Benchmark => {
                let b = cfg.benchmark.as_ref().expect("shape checked");
                if b.name != "fig7" {
                    return Err(CliError::schema(format!(
                        "unknown benchmark `{}` (available: fig7)",
                        b.name
                    )));
                }
                let quad = parse_quadrature(&b.quadrature)?;
                let p = fig7(b.sigma_s, quad, b.mesh[0], b.mesh[1])
                    .map_err(|e| CliError::schema(format!("benchmark: {e}")))?;
                Job::Nodal(p, None)
            }
            Mode::Quad => Job::Quad(cfg.quad.as_ref().expect("shape checked").build()?),
            Mode::Converge => {
                let c = cfg.converge.as_ref().expect("shape checked");
                let s = RefinementSeries::new(c.h.clone(), c.values.clone())
                    .map_err(|e| CliError::schema(format!("converge: {e}")))?;
                Job::Converge(s)
            }
            Mode::Phase => {
                let t = cfg.phase.as_ref().expect("shape checked");
                if t.points < 2 {
                    return Err(CliError::schema("phase: `points` must be at least 2"));
                }
                Job::Phase(t.law.build()?, t.law.g, t.points)
            }
        })
    }

    fn run(self, cfg: &RunConfig, out: &mut Outcome) -> Result<(), CliError> {
        let plots = &cfg.output.plots;
        match self {
            Job::Slab(p, depths, None) => {
                let s = solve(&p)?;
                out.diag("boundary_residual", s.boundary_residual());
                out.diag("condition", s.condition());
                out.diag("eigen_residual", s.basis().eigen_residual());
                out.diag("dimension", s.basis().dimension() as i64);
                let mut rows = Vec::with_capacity(depths.len());
                for &t in &depths {
                    let (ip, im) = s.intensities(t)?;
                    rows.push((t, ip, im, s.density(t)?));
                }
                slab_tables(out, p.quad.nodes(), &rows, plots);
            }
            Job::Slab(p, depths, Some(o)) => {
                let r = slab_reference(&p, &o)?;
                out.diag("iterations", r.iterations as i64);
                out.diag("resolution", o.resolution as i64);
                let n = p.quad.order();
                let mut rows = Vec::with_capacity(depths.len());
                for &t in &depths {
                    let ip = (0..n).map(|k| r.intensity_at(t, k, true)).collect::<Result<_, _>>()?;
                    let im = (0..n).map(|k| r.intensity_at(t, k, false)).collect::<Result<_, _>>()?;
                    rows.push((t, ip, im, r.density_at(t)?));
                }
                slab_tables(out, p.quad.nodes(), &rows, plots);
            }
            Job::Nodal(p, None) => {
                let s = assemble_and_solve(&p)?;
                let flux = s.scalar_fluxes()?;
                let balance = (0..p.regions()).map(|r| s.balance_residual(r)).fold(0.0, f64::max);
                out.diag("system_residual", s.system_residual());
                out.diag("system_size", s.system_size() as i64);
                out.diag("nonzeros", s.nonzeros() as i64);
                out.diag("balance_residual", balance);
                out.diag("ode_residual", s.ode_residual());
                flux_tables(out, &p, &flux, plots);
                if cfg.output.intensities {
                    let mut t = Table::new(
                        "intensities.csv",
                        &["region", "direction", "mu", "eta", "xi", "y_averaged", "x_averaged"],
                    );
                    for r in 0..p.regions() {
                        for (d, dir) in p.quad.directions().iter().enumerate() {
                            t.push(vec![
                                r.to_string(),
                                d.to_string(),
                                num(dir.mu),
                                num(dir.eta),
                                num(dir.xi),
                                num(s.region_average(r, Average::YAveraged, d)),
                                num(s.region_average(r, Average::XAveraged, d)),
                            ]);
                        }
                    }
                    out.tables.push(t);
                }
            }
            Job::Nodal(p, Some(o)) => {
                let d = dd2d(&p, &o)?;
                out.diag("iterations", d.iterations as i64);
                out.diag("cells_x", d.nx as i64);
                out.diag("cells_y", d.ny as i64);
                out.diag("negative_cells", d.negative_cells as i64);
                if d.negative_cells > 0 {
                    warn!("{} cells with negative flux in the reference solve", d.negative_cells);
                }
                flux_tables(out, &p, &d.region_flux, plots);
            }
            Job::Quad(q) => {
                let mut t = Table::new("directions.csv", &["i", "mu", "eta", "xi", "w"]);
                for (i, d) in q.directions().iter().enumerate() {
                    t.push(vec![i.to_string(), num(d.mu), num(d.eta), num(d.xi), num(d.weight)]);
                }
                out.tables.push(t);
                let mut m = Table::new("moments.csv", &["a", "b", "c", "error"]);
                let mut worst = 0.0f64;
                for (a, b, c) in even_moment_audit(q.order()) {
                    let e = q.moment_error(a, b, c);
                    worst = worst.max(e);
                    m.push(vec![a.to_string(), b.to_string(), c.to_string(), num(e)]);
                }
                out.tables.push(m);
                out.diag("directions", q.len() as i64);
                out.diag("total_weight", q.total_weight());
                out.diag("max_moment_error", worst);
            }
            Job::Converge(s) => {
                let mut t = Table::new("orders.csv", &["triple", "p", "phi_ref"]);
                let mut failures = Vec::new();
                for rep in analyze(&s) {
                    if let Err(e) = &rep.order {
                        warn!("triple {}: {e}", rep.start);
                        failures.push(Value::from(format!("triple {}: {e}", rep.start)));
                    }
                    t.push(vec![
                        rep.start.to_string(),
                        opt(rep.order.ok()),
                        opt(rep.reference.ok()),
                    ]);
                }
                out.diag("triples", s.triples() as i64);
                out.diag("ratio", s.ratio());
                out.diag("failures", failures);
                out.tables.push(t);
                if plots.contains(&PlotKind::ConvergenceCurve) {
                    let mut c = Table::new("plot-convergence-curve.csv", &["h", "value", "p"]);
                    for i in 0..s.len() {
                        let p = if i >= 2 { order_of_triple(&s, i - 2).ok() } else { None };
                        c.push(vec![num(s.h()[i]), num(s.values()[i]), opt(p)]);
                    }
                    out.tables.push(c);
                }
            }
            Job::Phase(law, g, points) => {
                let mut t = Table::new("phase.csv", &["theta_deg", "cos_theta", "p", "p_exact"]);
                for i in 0..points {
                    let theta = 180.0 * i as f64 / (points - 1) as f64;
                    let c = theta.to_radians().cos();
                    let exact = g.map(|g| hg_exact(c, g)).transpose()?;
                    t.push(vec![num(theta), num(c), num(law.eval(c)), opt(exact)]);
                }
                out.diag("order", law.order() as i64);
                out.tables.push(t);
            }
        }
        info!("{} tables ready", out.tables.len());
        Ok(())
    }
}

type SlabRow = (f64, Vec<f64>, Vec<f64>, f64);

fn slab_tables(out: &mut Outcome, mu: &[f64], rows: &[SlabRow], plots: &[PlotKind]) {
    let n = mu.len();
    let mut it = Table::new("intensity.csv", &["tau", "direction", "mu", "intensity"]);
    let mut dt = Table::new("density.csv", &["tau", "density"]);
    for (t, ip, im, rho) in rows {
        for k in 0..n {
            it.push(vec![num(*t), k.to_string(), num(mu[k]), num(ip[k])]);
        }
        for k in 0..n {
            it.push(vec![num(*t), (n + k).to_string(), num(-mu[k]), num(im[k])]);
        }
        dt.push(vec![num(*t), num(*rho)]);
    }
    out.tables.push(it);
    if plots.contains(&PlotKind::DensityVsTau) {
        let mut p = dt.clone();
        p.name = "plot-density-vs-tau.csv".into();
        out.tables.push(dt);
        out.tables.push(p);
    } else {
        out.tables.push(dt);
    }
}

fn flux_tables(out: &mut Outcome, p: &NodalProblem, flux: &[f64], plots: &[PlotKind]) {
    let mut t = Table::new("flux.csv", &["region", "x_min", "x_max", "y_min", "y_max", "flux"]);
    let mut m = Table::new("plot-flux-map.csv", &["region", "x", "y", "flux"]);
    for (r, f) in flux.iter().enumerate() {
        let (x, y) = p.region_extent(r);
        t.push(vec![r.to_string(), num(x[0]), num(x[1]), num(y[0]), num(y[1]), num(*f)]);
        m.push(vec![
            r.to_string(),
            num(0.5 * (x[0] + x[1])),
            num(0.5 * (y[0] + y[1])),
            num(*f),
        ]);
    }
    out.tables.push(t);
    if plots.contains(&PlotKind::FluxMap) {
        out.tables.push(m);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(text: &str) -> Result<Outcome, CliError> {
        execute(&RunConfig::parse(text).unwrap())
    }

    #[test]
    fn absorber_density_is_monotone() {
        let o = run(r#"
mode = "solve1d"
output = { plots = ["density-vs-tau"] }
[slab]
tau_b = 2.0
albedo = 0.0
order = 8
incident_left = { constant = 1.0 }
"#)
        .unwrap();
        let plot = o.tables.iter().find(|t| t.name == "plot-density-vs-tau.csv").unwrap();
        assert_eq!(plot.header.len(), 2);
        let rho: Vec<f64> = plot.rows.iter().map(|r| r[1].parse().unwrap()).collect();
        assert!(rho.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn benchmark_flux_map_has_a_row_per_region() {
        let o = run(r#"
mode = "benchmark"
output = { plots = ["flux-map"] }
benchmark = { name = "fig7", sigma_s = 0.5, quadrature = "lqn:4", mesh = [4, 2] }
"#)
        .unwrap();
        let map = o.tables.iter().find(|t| t.name == "plot-flux-map.csv").unwrap();
        assert_eq!(map.rows.len(), 8);
        assert!(o.diagnostics["balance_residual"].as_float().unwrap() < 1e-10);
    }

    #[test]
    fn convergence_curve_carries_orders() {
        let o = run(r#"
mode = "converge"
output = { plots = ["convergence-curve"] }
converge = { h = [0.4, 0.2, 0.1, 0.05], values = [1.16, 1.04, 1.01, 1.0025] }
"#)
        .unwrap();
        let curve = o.tables.iter().find(|t| t.name == "plot-convergence-curve.csv").unwrap();
        assert_eq!(curve.rows[0][2], "");
        let p: f64 = curve.rows[3][2].parse().unwrap();
        assert!((p - 2.0).abs() < 1e-9);
        assert_eq!(o.tables[0].rows.len(), 2);
    }

    #[test]
    fn stalled_series_leaves_empty_cells() {
        let o = run(r#"
mode = "converge"
converge = { h = [0.4, 0.2, 0.1], values = [1.0, 1.0, 1.0] }
"#)
        .unwrap();
        assert_eq!(o.tables[0].rows[0][1], "");
        assert_eq!(o.diagnostics["failures"].as_array().unwrap().len(), 1);
    }

    #[test]
    fn oracle_mirrors_the_solver_schema() {
        let base = r#"
[slab]
tau_b = 1.0
albedo = 0.5
order = 4
incident_left = { constant = 1.0 }
samples = 3
[oracle]
resolution = 2000
tolerance = 1e-12
max_iterations = 10000
"#;
        let a = run(&format!("mode = \"solve1d\"\n{base}")).unwrap();
        let b = run(&format!("mode = \"oracle1d\"\n{base}")).unwrap();
        for (x, y) in a.tables.iter().zip(&b.tables) {
            assert_eq!(x.header, y.header);
            assert_eq!(x.rows.len(), y.rows.len());
        }
        let (da, db): (f64, f64) = (a.tables[1].rows[1][1].parse().unwrap(), b.tables[1].rows[1][1].parse().unwrap());
        assert!((da - db).abs() < 1e-4 * db);
    }

    #[test]
    fn hg_phase_table_tracks_the_closed_form() {
        let o = run("mode = \"phase\"\nphase = { g = 0.3, order = 40, points = 7 }\n").unwrap();
        for row in &o.tables[0].rows {
            let (p, e): (f64, f64) = (row[2].parse().unwrap(), row[3].parse().unwrap());
            assert!((p - e).abs() < 1e-12 * e.max(1.0));
        }
    }
}
