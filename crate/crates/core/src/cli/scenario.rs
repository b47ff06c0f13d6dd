//! Scenario files: one TOML document describing constants, per-axis
//! potentials, the action and the motion.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::CliError;
use crate::dynamics::{Integrator, MotionConfig, TurningPolicy};
use crate::reduced_action::{assemble_separable, Orientation, ReducedAction1D, SeparableAction3D};
use crate::schrodinger1d::{
    solve_pair_with, EnergySplit, PhysicalConstants, Potential1D, PotentialKind, SolutionPair, SolveOptions,
};
use crate::tensor_reduction::{FitOptions, TensorCoefficients};
use crate::{Axis, Interval, Point3};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    constants: ConstantsCfg,
    #[serde(default)]
    numerics: NumericsCfg,
    axes: AxesCfg,
    action: ActionCfg,
    motion: Option<MotionCfg>,
    #[serde(default)]
    fit: FitCfg,
    #[serde(default)]
    output: OutputCfg,
    sweep: Option<SweepCfg>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstantsCfg {
    hbar: f64,
    mass: f64,
}

impl Default for ConstantsCfg {
    fn default() -> Self {
        ConstantsCfg { hbar: 1.0, mass: 1.0 }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NumericsCfg {
    step: f64,
    #[serde(default)]
    force_numerov: bool,
    /// stencil step for current and Schrodinger residuals
    stencil_step: f64,
    samples: usize,
}

impl Default for NumericsCfg {
    fn default() -> Self {
        NumericsCfg {
            step: 1e-3,
            force_numerov: false,
            stencil_step: 1e-3,
            samples: 200,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AxesCfg {
    x: AxisCfg,
    y: AxisCfg,
    z: AxisCfg,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AxisCfg {
    potential: PotentialCfg,
    energy: f64,
    domain: [f64; 2],
    anchor: Option<f64>,
    #[serde(default)]
    swap_basis: bool,
    #[serde(default = "positive")]
    orientation: Orientation,
}

fn positive() -> Orientation {
    Orientation::Positive
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum PotentialCfg {
    Zero,
    Constant { value: f64 },
    Harmonic { omega: f64 },
    Piecewise { points: Vec<[f64; 2]> },
    Tabulated { grid: Vec<f64>, values: Vec<f64> },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ActionCfg {
    gammas: Option<[f64; 6]>,
    tensor: Option<TensorCfg>,
    #[serde(default)]
    lambda0: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TensorCfg {
    a: [f64; 8],
    b: [f64; 8],
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum PolicyCfg {
    All(TurningPolicy),
    PerAxis([TurningPolicy; 3]),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MotionCfg {
    start: [f64; 3],
    t_max: f64,
    step: f64,
    #[serde(default = "rk4")]
    integrator: Integrator,
    tp_policy: Option<PolicyCfg>,
    tp_epsilon: Option<f64>,
    min_step: Option<f64>,
    rk45_tol: Option<f64>,
}

fn rk4() -> Integrator {
    Integrator::Rk4
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FitCfg {
    restarts: usize,
    threshold: f64,
    max_iter: usize,
    range: f64,
}

impl Default for FitCfg {
    fn default() -> Self {
        let d = FitOptions::default();
        FitCfg {
            restarts: d.restarts,
            threshold: d.threshold,
            max_iter: d.max_iter,
            range: d.range,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputCfg {
    dir: PathBuf,
    #[serde(default = "csv")]
    format: Format,
}

impl Default for OutputCfg {
    fn default() -> Self {
        OutputCfg {
            dir: PathBuf::from("."),
            format: Format::Csv,
        }
    }
}

fn csv() -> Format {
    Format::Csv
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepCfg {
    count: usize,
    gamma_range: f64,
}

#[derive(Clone, Debug)]
pub enum ActionForm {
    Gammas([f64; 6]),
    Tensor(TensorCoefficients),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepSpec {
    pub count: usize,
    pub gamma_range: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Numerics {
    pub stencil_step: f64,
    pub samples: usize,
}

/// A validated scenario.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub seed: u64,
    pub constants: PhysicalConstants,
    pub potentials: [Potential1D; 3],
    pub energies: EnergySplit,
    pub pairs: [SolutionPair; 3],
    pub orientations: [Orientation; 3],
    pub action: ActionForm,
    pub lambda0: f64,
    pub motion: Option<(Point3, MotionConfig)>,
    pub fit: FitOptions,
    pub numerics: Numerics,
    pub out_dir: PathBuf,
    pub format: Format,
    pub sweep: Option<SweepSpec>,
}

fn field(name: impl Into<String>, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{}: {msg}", name.into()))
}

fn positive_field(name: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(field(name, format!("must be positive and finite, got {v}")))
    }
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Scenario, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Scenario::from_toml(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn from_toml(text: &str) -> Result<Scenario, CliError> {
        let file: ScenarioFile = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        build(file)
    }

    /// The separable action for explicit gammas with this scenario's pairs.
    pub fn separable_action(&self, gammas: [f64; 6], lambda0: f64) -> crate::Result<SeparableAction3D> {
        let mk = |i: usize| {
            ReducedAction1D::new(self.pairs[i].clone(), gammas[2 * i], gammas[2 * i + 1], self.orientations[i])
        };
        assemble_separable(mk(0)?, mk(1)?, mk(2)?, lambda0)
    }
}

fn potential(cfg: PotentialCfg, axis: Axis) -> crate::Result<Potential1D> {
    let kind = match cfg {
        PotentialCfg::Zero => PotentialKind::Zero,
        PotentialCfg::Constant { value } => PotentialKind::Constant(value),
        PotentialCfg::Harmonic { omega } => PotentialKind::Harmonic(omega),
        PotentialCfg::Piecewise { points } => {
            PotentialKind::PiecewiseLinear(points.into_iter().map(|[x, v]| (x, v)).collect())
        }
        PotentialCfg::Tabulated { grid, values } => PotentialKind::Tabulated { grid, values },
    };
    Potential1D::new(kind, axis)
}

fn build(file: ScenarioFile) -> Result<Scenario, CliError> {
    let constants = PhysicalConstants::new(file.constants.hbar, file.constants.mass)
        .map_err(|e| field("constants", e))?;
    let solve = SolveOptions {
        step: positive_field("numerics.step", file.numerics.step)?,
        force_numerov: file.numerics.force_numerov,
    };
    let numerics = Numerics {
        stencil_step: positive_field("numerics.stencil_step", file.numerics.stencil_step)?,
        samples: file.numerics.samples.max(2),
    };

    let axes = [file.axes.x, file.axes.y, file.axes.z];
    let mut potentials = Vec::with_capacity(3);
    let mut pairs = Vec::with_capacity(3);
    let mut energies = [0.0; 3];
    let mut orientations = [Orientation::Positive; 3];
    for (i, cfg) in axes.into_iter().enumerate() {
        let axis = Axis::ALL[i];
        let name = format!("axes.{axis}");
        let v = potential(cfg.potential, axis).map_err(|e| field(format!("{name}.potential"), e))?;
        let domain =
            Interval::new(cfg.domain[0], cfg.domain[1]).map_err(|e| field(format!("{name}.domain"), e))?;
        let anchor = cfg.anchor.unwrap_or_else(|| domain.midpoint());
        let pair = solve_pair_with(&v, cfg.energy, domain, anchor, constants, &solve)
            .map_err(|e| field(&name, e))?;
        energies[i] = cfg.energy;
        orientations[i] = cfg.orientation;
        pairs.push(if cfg.swap_basis { pair.swapped() } else { pair });
        potentials.push(v);
    }
    let potentials: [Potential1D; 3] = potentials.try_into().expect("three axes");
    let pairs: [SolutionPair; 3] = pairs.try_into().expect("three axes");

    let action = match (file.action.gammas, file.action.tensor) {
        (Some(g), None) => {
            for (i, axis) in Axis::ALL.iter().enumerate() {
                let (n, d) = (g[2 * i], g[2 * i + 1]);
                if !(n.is_finite() && d.is_finite()) {
                    return Err(field("action.gammas", format!("non-finite value on axis {axis}")));
                }
                if (1.0 - n * d).abs() < 1e-12 {
                    return Err(field(
                        "action.gammas",
                        format!(
                            "degenerate pair on axis {axis}: gamma[{}] * gamma[{}] = {n} * {d} = 1",
                            2 * i + 1,
                            2 * i + 2
                        ),
                    ));
                }
            }
            ActionForm::Gammas(g)
        }
        (None, Some(t)) => {
            let c = TensorCoefficients { a: t.a, b: t.b };
            if c.to_flat().iter().any(|v| !v.is_finite()) {
                return Err(field("action.tensor", "non-finite coefficient"));
            }
            c.gauge_index().map_err(|e| field("action.tensor", e))?;
            ActionForm::Tensor(c)
        }
        (Some(_), Some(_)) => return Err(field("action", "give either gammas or tensor, not both")),
        (None, None) => return Err(field("action", "one of gammas or tensor is required")),
    };
    if !file.action.lambda0.is_finite() {
        return Err(field("action.lambda0", "must be finite"));
    }

    let motion = match file.motion {
        None => None,
        Some(m) => {
            let d = MotionConfig::default();
            let cfg = MotionConfig {
                tp_epsilon: m.tp_epsilon,
                tp_policy: match m.tp_policy {
                    None => d.tp_policy,
                    Some(PolicyCfg::All(p)) => [p; 3],
                    Some(PolicyCfg::PerAxis(p)) => p,
                },
                step: m.step,
                t_max: m.t_max,
                integrator: m.integrator,
                min_step: m.min_step.unwrap_or(d.min_step),
                rk45_tol: m.rk45_tol.unwrap_or(d.rk45_tol),
            };
            cfg.validate().map_err(|e| field("motion", e))?;
            for (i, axis) in Axis::ALL.iter().enumerate() {
                if !pairs[i].domain().contains(m.start[i]) {
                    return Err(field("motion.start", format!("outside the domain of axis {axis}")));
                }
            }
            Some((m.start, cfg))
        }
    };

    let fit = FitOptions {
        restarts: file.fit.restarts.max(1),
        seed: file.seed,
        threshold: positive_field("fit.threshold", file.fit.threshold)?,
        max_iter: file.fit.max_iter,
        range: positive_field("fit.range", file.fit.range)?,
    };

    let sweep = match file.sweep {
        None => None,
        Some(s) => Some(SweepSpec {
            count: s.count,
            gamma_range: positive_field("sweep.gamma_range", s.gamma_range)?,
        }),
    };

    Ok(Scenario {
        seed: file.seed,
        constants,
        potentials,
        energies: EnergySplit::new(energies[0], energies[1], energies[2]),
        pairs,
        orientations,
        action,
        lambda0: file.action.lambda0,
        motion,
        fit,
        numerics,
        out_dir: file.output.dir,
        format: file.output.format,
        sweep,
    })
}
