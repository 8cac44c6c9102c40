//! TOML run configuration. Every table rejects unknown keys.

use std::path::Path;
use std::str::FromStr;

use ado_core::nodal::{Boundaries, EdgeCondition, LinearSolver, Material, PhaseForm};
use ado_core::slab::{BoundaryData, Reflection, SlabSource};
use ado_core::{
    half_range_gauss, NodalProblem, OracleConfig, PhaseFunction, Scheme, SlabProblem,
    SphereQuadrature,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Solve1d,
    Solve2d,
    Oracle1d,
    Oracle2d,
    Quad,
    Converge,
    Benchmark,
    Phase,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum PlotKind {
    DensityVsTau,
    FluxMap,
    ConvergenceCurve,
}

impl PlotKind {
    pub fn name(self) -> &'static str {
        match self {
            PlotKind::DensityVsTau => "density-vs-tau",
            PlotKind::FluxMap => "flux-map",
            PlotKind::ConvergenceCurve => "convergence-curve",
        }
    }

    fn fits(self, mode: Mode) -> bool {
        match self {
            PlotKind::DensityVsTau => matches!(mode, Mode::Solve1d | Mode::Oracle1d),
            PlotKind::FluxMap => matches!(mode, Mode::Solve2d | Mode::Oracle2d | Mode::Benchmark),
            PlotKind::ConvergenceCurve => mode == Mode::Converge,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Verbosity {
    Error,
    #[default]
    Warn,
    Info,
    Debug,
    Trace,
}

impl Verbosity {
    pub fn level(self) -> log::LevelFilter {
        match self {
            Verbosity::Error => log::LevelFilter::Error,
            Verbosity::Warn => log::LevelFilter::Warn,
            Verbosity::Info => log::LevelFilter::Info,
            Verbosity::Debug => log::LevelFilter::Debug,
            Verbosity::Trace => log::LevelFilter::Trace,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Option<Mode>,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slab: Option<SlabConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodal: Option<NodalConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSettings>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad: Option<QuadConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub converge: Option<ConvergeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub benchmark: Option<BenchmarkConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase: Option<PhaseTableConfig>,
    /// Run record written into manifests; ignored on input.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub run: Option<toml::Table>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub dir: String,
    #[serde(default)]
    pub plots: Vec<PlotKind>,
    /// Per-direction region averages for 2D runs.
    #[serde(default)]
    pub intensities: bool,
    #[serde(default)]
    pub verbosity: Verbosity,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            plots: Vec::new(),
            intensities: false,
            verbosity: Verbosity::default(),
        }
    }
}

fn default_dir() -> String {
    ".".into()
}

/// Phase function given either by asymmetry factor or by coefficients.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    /// Truncation order for `g`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<f64>>,
}

impl PhaseConfig {
    pub fn build(&self) -> Result<PhaseFunction, CliError> {
        let law = match (self.g, &self.coefficients, self.order) {
            (None, None, None) => Ok(PhaseFunction::isotropic()),
            (Some(g), None, Some(l)) => PhaseFunction::henyey_greenstein(g, l),
            (Some(_), None, None) => {
                return Err(CliError::schema("phase: `g` needs a truncation `order`"))
            }
            (None, Some(c), None) => PhaseFunction::from_coefficients(c.clone()),
            _ => {
                return Err(CliError::schema(
                    "phase: give either `g` with `order` or `coefficients`",
                ))
            }
        };
        law.map_err(|e| CliError::schema(format!("phase: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum IncidentConfig {
    #[default]
    Zero,
    Constant(f64),
    CosinePower { amplitude: f64, power: i32 },
    Tabulated(Vec<f64>),
}

impl From<&IncidentConfig> for BoundaryData {
    fn from(c: &IncidentConfig) -> Self {
        match c {
            IncidentConfig::Zero => BoundaryData::Zero,
            IncidentConfig::Constant(v) => BoundaryData::Constant(*v),
            IncidentConfig::CosinePower { amplitude, power } => BoundaryData::CosinePower {
                amplitude: *amplitude,
                power: *power,
            },
            IncidentConfig::Tabulated(v) => BoundaryData::Tabulated(v.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceConfig {
    #[default]
    None,
    Constant(f64),
    /// Coefficients of `1, s, s², …` with `s = τ − τ_a`.
    Polynomial { plus: Vec<f64>, minus: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReflectionConfig {
    #[serde(default)]
    pub specular: f64,
    #[serde(default)]
    pub diffuse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlabConfig {
    #[serde(default)]
    pub tau_a: f64,
    pub tau_b: f64,
    pub albedo: f64,
    /// Half-range Gauss order `N`.
    pub order: usize,
    #[serde(default)]
    pub phase: PhaseConfig,
    #[serde(default)]
    pub left: ReflectionConfig,
    #[serde(default)]
    pub right: ReflectionConfig,
    #[serde(default)]
    pub incident_left: IncidentConfig,
    #[serde(default)]
    pub incident_right: IncidentConfig,
    #[serde(default)]
    pub source: SourceConfig,
    /// Equispaced output depths including both faces.
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    11
}

impl SlabConfig {
    pub fn build(&self) -> Result<SlabProblem, CliError> {
        let quad = half_range_gauss(self.order).map_err(|e| CliError::schema(format!("slab: {e}")))?;
        let source = match &self.source {
            SourceConfig::None => SlabSource::None,
            SourceConfig::Constant(q) => SlabSource::constant(*q),
            SourceConfig::Polynomial { plus, minus } => SlabSource::Polynomial {
                plus: plus.clone(),
                minus: minus.clone(),
            },
        };
        let refl = |r: &ReflectionConfig| Reflection {
            specular: r.specular,
            diffuse: r.diffuse,
        };
        let p = SlabProblem::new(self.tau_a, self.tau_b, self.albedo, quad)
            .with_phase(self.phase.build()?)
            .with_incident((&self.incident_left).into(), (&self.incident_right).into())
            .with_reflection(refl(&self.left), refl(&self.right))
            .with_source(source);
        p.validate().map_err(|e| CliError::schema(format!("slab: {e}")))?;
        for data in [&p.f1, &p.f2] {
            data.values(&p.quad)
                .map_err(|e| CliError::schema(format!("slab: {e}")))?;
        }
        if self.samples < 2 {
            return Err(CliError::schema("slab: `samples` must be at least 2"));
        }
        Ok(p)
    }

    pub fn depths(&self) -> Vec<f64> {
        let n = self.samples - 1;
        (0..=n)
            .map(|i| {
                if i == n {
                    self.tau_b
                } else {
                    self.tau_a + (self.tau_b - self.tau_a) * i as f64 / n as f64
                }
            })
            .collect()
    }
}

/// `scheme:order`, e.g. `pntn:8`.
pub fn parse_quadrature(spec: &str) -> Result<SphereQuadrature, CliError> {
    let (scheme, order) = spec
        .split_once(':')
        .ok_or_else(|| CliError::schema(format!("quadrature `{spec}` is not of the form scheme:order")))?;
    let scheme = Scheme::from_str(scheme.trim()).map_err(CliError::schema)?;
    let order: usize = order
        .trim()
        .parse()
        .map_err(|_| CliError::schema(format!("quadrature order `{order}` is not an integer")))?;
    scheme
        .build(order)
        .map_err(|e| CliError::schema(format!("quadrature: {e}")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialConfig {
    pub sigma_t: f64,
    pub sigma_s: f64,
    #[serde(default)]
    pub phase: PhaseConfig,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum EdgeConfig {
    #[default]
    Vacuum,
    Uniform(f64),
    PerDirection(Vec<f64>),
}

impl From<&EdgeConfig> for EdgeCondition {
    fn from(c: &EdgeConfig) -> Self {
        match c {
            EdgeConfig::Vacuum => EdgeCondition::Vacuum,
            EdgeConfig::Uniform(v) => EdgeCondition::Uniform(*v),
            EdgeConfig::PerDirection(v) => EdgeCondition::PerDirection(v.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgesConfig {
    #[serde(default)]
    pub left: EdgeConfig,
    #[serde(default)]
    pub right: EdgeConfig,
    #[serde(default)]
    pub bottom: EdgeConfig,
    #[serde(default)]
    pub top: EdgeConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseFormConfig {
    #[default]
    Exact,
    Expanded,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SolverConfig {
    #[default]
    Direct,
    Gmres {
        tolerance: f64,
        restart: usize,
        max_iterations: usize,
    },
}

/// 2D problem. The mesh is either explicit grid lines or a uniform
/// `mesh = [H, K]` split of `size = [a, b]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodalConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mesh: Option<[usize; 2]>,
    pub quadrature: String,
    pub materials: Vec<MaterialConfig>,
    /// Material index per region, `r = k·H + h`. Defaults to material 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region_material: Option<Vec<usize>>,
    /// Source per region. Defaults to zero.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region_source: Option<Vec<f64>>,
    #[serde(default)]
    pub edges: EdgesConfig,
    #[serde(default)]
    pub phase_form: PhaseFormConfig,
    #[serde(default)]
    pub solver: SolverConfig,
}

impl NodalConfig {
    fn grids(&self) -> Result<(Vec<f64>, Vec<f64>), CliError> {
        match (&self.x_grid, &self.y_grid, self.size, self.mesh) {
            (Some(x), Some(y), None, None) => Ok((x.clone(), y.clone())),
            (None, None, Some([a, b]), Some([h, k])) => {
                if h == 0 || k == 0 {
                    return Err(CliError::schema("nodal: mesh counts must be positive"));
                }
                let line = |len: f64, n: usize| -> Vec<f64> {
                    (0..=n).map(|i| len * i as f64 / n as f64).collect()
                };
                Ok((line(a, h), line(b, k)))
            }
            _ => Err(CliError::schema(
                "nodal: give either `x_grid` and `y_grid` or `size` and `mesh`",
            )),
        }
    }

    pub fn build(&self) -> Result<NodalProblem, CliError> {
        let (x, y) = self.grids()?;
        let quad = parse_quadrature(&self.quadrature)?;
        let materials = self
            .materials
            .iter()
            .map(|m| {
                Ok(Material {
                    sigma_t: m.sigma_t,
                    sigma_s: m.sigma_s,
                    phase: m.phase.build()?,
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        if materials.is_empty() {
            return Err(CliError::schema("nodal: at least one material is required"));
        }
        let mut p = NodalProblem::homogeneous(x, y, materials[0].clone(), quad);
        p.materials = materials;
        if let Some(m) = &self.region_material {
            p.region_material = m.clone();
        }
        if let Some(s) = &self.region_source {
            p.region_source = s.clone();
        }
        p.boundaries = Boundaries {
            left: (&self.edges.left).into(),
            right: (&self.edges.right).into(),
            bottom: (&self.edges.bottom).into(),
            top: (&self.edges.top).into(),
        };
        p.phase_form = match self.phase_form {
            PhaseFormConfig::Exact => PhaseForm::Exact,
            PhaseFormConfig::Expanded => PhaseForm::Expanded,
        };
        p.solver = match self.solver {
            SolverConfig::Direct => LinearSolver::Direct,
            SolverConfig::Gmres {
                tolerance,
                restart,
                max_iterations,
            } => LinearSolver::Gmres {
                tolerance,
                restart,
                max_iterations,
            },
        };
        p.validate().map_err(|e| CliError::schema(format!("nodal: {e}")))?;
        Ok(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSettings {
    pub resolution: usize,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for OracleSettings {
    fn default() -> Self {
        let d = OracleConfig::default();
        Self {
            resolution: d.resolution,
            tolerance: d.tolerance,
            max_iterations: d.max_iterations,
        }
    }
}

impl OracleSettings {
    pub fn build(&self) -> Result<OracleConfig, CliError> {
        OracleConfig::new(self.resolution, self.tolerance, self.max_iterations)
            .map_err(|e| CliError::schema(format!("oracle: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadConfig {
    pub scheme: String,
    pub order: usize,
}

impl QuadConfig {
    pub fn build(&self) -> Result<SphereQuadrature, CliError> {
        parse_quadrature(&format!("{}:{}", self.scheme, self.order))
    }
}

/// Mesh sizes and values, coarsest first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergeConfig {
    pub h: Vec<f64>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkConfig {
    pub name: String,
    pub sigma_s: f64,
    pub quadrature: String,
    pub mesh: [usize; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseTableConfig {
    #[serde(flatten)]
    pub law: PhaseConfig,
    #[serde(default = "default_angles")]
    pub points: usize,
}

fn default_angles() -> usize {
    181
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::schema(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configuration serializes")
    }

    pub fn mode(&self) -> Result<Mode, CliError> {
        self.mode.ok_or_else(|| CliError::schema("`mode` is missing"))
    }

    /// Checks that the section the mode needs is present and that plot
    /// kinds fit the mode.
    pub fn check_shape(&self) -> Result<Mode, CliError> {
        let mode = self.mode()?;
        let need = |present: bool, section: &str| {
            if present {
                Ok(())
            } else {
                Err(CliError::schema(format!("mode `{}` needs a [{section}] table", mode_name(mode))))
            }
        };
        match mode {
            Mode::Solve1d | Mode::Oracle1d => need(self.slab.is_some(), "slab")?,
            Mode::Solve2d | Mode::Oracle2d => need(self.nodal.is_some(), "nodal")?,
            Mode::Quad => need(self.quad.is_some(), "quad")?,
            Mode::Converge => need(self.converge.is_some(), "converge")?,
            Mode::Benchmark => need(self.benchmark.is_some(), "benchmark")?,
            Mode::Phase => need(self.phase.is_some(), "phase")?,
        }
        for kind in &self.output.plots {
            if !kind.fits(mode) {
                return Err(CliError::schema(format!(
                    "plot kind `{}` is not available for mode `{}`",
                    kind.name(),
                    mode_name(mode)
                )));
            }
        }
        Ok(mode)
    }
}

pub fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Solve1d => "solve1d",
        Mode::Solve2d => "solve2d",
        Mode::Oracle1d => "oracle1d",
        Mode::Oracle2d => "oracle2d",
        Mode::Quad => "quad",
        Mode::Converge => "converge",
        Mode::Benchmark => "benchmark",
        Mode::Phase => "phase",
    }
}
