use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::scenario::{ActionForm, Format, Scenario};
use super::CliError;
use crate::amplitude::Amplitude3D;
use crate::dynamics::{integrate, metric_g, total_energy_check, Dwell, Trajectory};
use crate::reduced_action::SeparableAction3D;
use crate::schrodinger1d::wronskian;
use crate::tensor_reduction::{fit_gammas, FitReport, FitVerdict};
use crate::{Axis, Point3};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    /// value must stay below the tolerance
    Upper,
    /// value must stay above the tolerance
    Lower,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub bound: Bound,
    pub passed: bool,
}

impl CheckResult {
    fn upper(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        CheckResult {
            name: name.into(),
            value,
            tolerance,
            bound: Bound::Upper,
            passed: value < tolerance,
        }
    }

    fn lower(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        CheckResult {
            name: name.into(),
            value,
            tolerance,
            bound: Bound::Lower,
            passed: value > tolerance,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<CheckResult>,
    pub separability: Option<FitReport>,
    pub passed: bool,
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, CliError> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), CliError> {
    let mut w = create(dir, name)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(std::io::Error::other)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// The separable action a scenario describes, fitting the tensor form first
/// when needed. `Ok(Err(report))` means the tensor is not separable.
fn resolve_action(sc: &Scenario) -> Result<(SeparableAction3D, Option<FitReport>), CliError> {
    match &sc.action {
        ActionForm::Gammas(g) => Ok((sc.separable_action(*g, sc.lambda0)?, None)),
        ActionForm::Tensor(t) => {
            let report = fit_gammas(t, &sc.fit)?;
            match report.verdict {
                FitVerdict::Separable { gammas, phase } => {
                    log::info!("tensor reduced to gammas {gammas:?}, residual {:.3e}", report.residual);
                    Ok((sc.separable_action(gammas, sc.lambda0 + phase)?, Some(report)))
                }
                FitVerdict::NotSeparable => Err(CliError::Check(format!(
                    "tensor is not separable (best residual {:.3e})",
                    report.residual
                ))),
            }
        }
    }
}

/// Per-axis sample grid, kept clear of the domain edges for stencils.
fn samples(sc: &Scenario, axis: usize) -> Vec<f64> {
    let d = sc.pairs[axis].domain();
    let margin = (8.0 * sc.numerics.stencil_step).max(1e-3 * d.width());
    d.interior(sc.numerics.samples, margin)
}

fn anchors(sc: &Scenario) -> Point3 {
    std::array::from_fn(|i| sc.pairs[i].anchor())
}

fn with(p: Point3, axis: usize, x: f64) -> Point3 {
    let mut q = p;
    q[axis] = x;
    q
}

pub fn run_verify(sc: &Scenario) -> Result<VerificationReport, CliError> {
    let mut checks = Vec::new();
    let mut separability = None;

    for (i, pair) in sc.pairs.iter().enumerate() {
        let w0 = pair.wronskian_at_anchor();
        let mut worst: f64 = 0.0;
        for x in samples(sc, i) {
            worst = worst.max(((wronskian(pair, x)? - w0) / w0).abs());
        }
        checks.push(CheckResult::upper(format!("wronskian_{}", Axis::ALL[i]), worst, 1e-8));
    }

    let action = match &sc.action {
        ActionForm::Tensor(t) => {
            let report = fit_gammas(t, &sc.fit)?;
            checks.push(CheckResult::upper("separability", report.residual, sc.fit.threshold));
            let action = match report.verdict {
                FitVerdict::Separable { gammas, phase } => Some(sc.separable_action(gammas, sc.lambda0 + phase)?),
                FitVerdict::NotSeparable => None,
            };
            separability = Some(report);
            action
        }
        ActionForm::Gammas(g) => Some(sc.separable_action(*g, sc.lambda0)?),
    };

    if let Some(action) = action {
        let base = anchors(sc);
        let energies = sc.energies.as_array();
        let amp = Amplitude3D::new(action.clone(), 1.0)?;
        let h = sc.numerics.stencil_step;
        let mut min_p = f64::INFINITY;
        for i in 0..3 {
            let a = action.axis(Axis::ALL[i]);
            let (mut qshje, mut current): (f64, f64) = (0.0, 0.0);
            for x in samples(sc, i) {
                let t = a.qshje_terms(x, &sc.potentials[i], energies[i])?;
                qshje = qshje.max(t.residual().abs() / t.scale().max(f64::MIN_POSITIVE));
                current = current.max(amp.current_residual(Axis::ALL[i], with(base, i, x), h)?);
                min_p = min_p.min(a.momentum(x)?.abs());
            }
            checks.push(CheckResult::upper(format!("qshje_{}", Axis::ALL[i]), qshje, 1e-6));
            checks.push(CheckResult::upper(format!("current_{}", Axis::ALL[i]), current, 1e-6));
        }
        checks.push(CheckResult::lower("momentum_nonzero", min_p, 1e-12));

        // energy partition at seeded random points of the box
        let mut rng = ChaCha8Rng::seed_from_u64(sc.seed);
        let mut worst: f64 = 0.0;
        let scale = 1.0 + sc.energies.total().abs();
        for _ in 0..sc.numerics.samples {
            let mut acc = -sc.energies.total();
            for i in 0..3 {
                let d = sc.pairs[i].domain();
                let x = rng.gen_range(d.lo..=d.hi);
                let a = action.axis(Axis::ALL[i]);
                let p = a.momentum(x)?;
                acc += p * p * metric_g(a, x)? / (2.0 * sc.constants.mass) + sc.potentials[i].value(x);
            }
            worst = worst.max(acc.abs() / scale);
        }
        checks.push(CheckResult::upper("energy_partition", worst, 1e-5));
    }

    let passed = checks.iter().all(|c| c.passed);
    Ok(VerificationReport {
        checks,
        separability,
        passed,
    })
}

pub fn write_verify(report: &VerificationReport, dir: &Path, format: Format) -> Result<(), CliError> {
    match format {
        Format::Json => write_json(dir, "verify_report.json", report),
        Format::Csv => {
            let mut w = create(dir, "verify_report.csv")?;
            writeln!(w, "name,value,tolerance,bound,passed")?;
            for c in &report.checks {
                let bound = if c.bound == Bound::Upper { "upper" } else { "lower" };
                writeln!(w, "{},{},{},{},{}", c.name, num(c.value), num(c.tolerance), bound, c.passed)?;
            }
            if let Some(g) = report.separability.as_ref().and_then(FitReport::gammas) {
                for (k, v) in g.iter().enumerate() {
                    writeln!(w, "gamma_{},{},,,", k + 1, num(*v))?;
                }
            }
            writeln!(w, "overall,,,,{}", report.passed)?;
            w.flush()?;
            Ok(())
        }
    }
}

#[derive(Clone, Debug, Serialize)]
struct DwellRecord {
    axis: String,
    enter: f64,
    exit: f64,
    duration: f64,
    end: String,
}

impl From<&Dwell> for DwellRecord {
    fn from(d: &Dwell) -> Self {
        DwellRecord {
            axis: d.axis.to_string(),
            enter: d.enter,
            exit: d.exit,
            duration: d.duration(),
            end: format!("{:?}", d.end).to_lowercase(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TrajectorySummary {
    pub states: usize,
    pub t_final: f64,
    pub final_position: Point3,
    pub tp_epsilon: f64,
    pub events: BTreeMap<String, usize>,
    dwells: Vec<DwellRecord>,
    pub max_energy_residual: f64,
    pub sign_law_violations: usize,
}

pub fn summarize(sc: &Scenario, tr: &Trajectory) -> TrajectorySummary {
    let mut events = BTreeMap::new();
    for e in &tr.events {
        *events.entry(e.kind.label().to_string()).or_insert(0) += 1;
    }
    let energies = sc.energies.as_array();
    let mut max_energy: f64 = 0.0;
    let mut violations = 0;
    for s in &tr.states {
        max_energy = max_energy.max(total_energy_check(s, &sc.potentials, &sc.energies, sc.constants).abs());
        for i in 0..3 {
            let f = energies[i] - sc.potentials[i].value(s.pos[i]);
            if f.abs() > tr.tp_epsilon && s.velocities[i].signum() * s.momenta[i].signum() != f.signum() {
                violations += 1;
            }
        }
    }
    let last = tr.last();
    TrajectorySummary {
        states: tr.states.len(),
        t_final: last.t,
        final_position: last.pos,
        tp_epsilon: tr.tp_epsilon,
        events,
        dwells: tr.dwells.iter().map(DwellRecord::from).collect(),
        max_energy_residual: max_energy,
        sign_law_violations: violations,
    }
}

pub fn run_trajectory(sc: &Scenario) -> Result<(Trajectory, TrajectorySummary), CliError> {
    let (start, cfg) = sc
        .motion
        .ok_or_else(|| CliError::Config("motion: section required for trajectories".into()))?;
    let (action, _) = resolve_action(sc)?;
    let tr = integrate(&action, &sc.energies, &sc.potentials, start, &cfg)?;
    log::info!("trajectory: {} states, {} events", tr.states.len(), tr.events.len());
    let summary = summarize(sc, &tr);
    Ok((tr, summary))
}

pub fn write_trajectory(tr: &Trajectory, summary: &TrajectorySummary, dir: &Path) -> Result<(), CliError> {
    let mut w = create(dir, "trajectory.csv")?;
    writeln!(w, "t,x,y,z,px,py,pz,vx,vy,vz,gx,gy,gz,region_x,region_y,region_z")?;
    for s in &tr.states {
        let mut row = vec![num(s.t)];
        for v in [s.pos, s.momenta, s.velocities, s.metric] {
            row.extend(v.iter().map(|x| num(*x)));
        }
        row.extend(s.region.iter().map(|r| r.label().to_string()));
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()?;

    let mut w = create(dir, "events.csv")?;
    writeln!(w, "t,axis,kind")?;
    for e in &tr.events {
        writeln!(w, "{},{},{}", num(e.t), e.axis, e.kind.label())?;
    }
    w.flush()?;

    for (i, axis) in Axis::ALL.iter().enumerate() {
        let mut tx = create(dir, &format!("t_{axis}.dat"))?;
        let mut phase = create(dir, &format!("phase_{axis}.dat"))?;
        writeln!(tx, "# t {axis}")?;
        writeln!(phase, "# {axis} p{axis}")?;
        for s in &tr.states {
            writeln!(tx, "{} {}", num(s.t), num(s.pos[i]))?;
            writeln!(phase, "{} {}", num(s.pos[i]), num(s.momenta[i]))?;
        }
        tx.flush()?;
        phase.flush()?;
    }

    write_json(dir, "summary.json", summary)
}

pub fn run_reduce(sc: &Scenario) -> Result<FitReport, CliError> {
    match &sc.action {
        ActionForm::Tensor(t) => Ok(fit_gammas(t, &sc.fit)?),
        ActionForm::Gammas(_) => Err(CliError::Config("action.tensor: reduce needs the tensor form".into())),
    }
}

pub fn write_reduce(report: &FitReport, dir: &Path, format: Format) -> Result<(), CliError> {
    match format {
        Format::Json => write_json(dir, "reduce.json", report),
        Format::Csv => {
            let mut w = create(dir, "reduce.csv")?;
            writeln!(w, "key,value")?;
            match report.verdict {
                FitVerdict::Separable { gammas, phase } => {
                    writeln!(w, "verdict,separable")?;
                    for (k, g) in gammas.iter().enumerate() {
                        writeln!(w, "gamma_{},{}", k + 1, num(*g))?;
                    }
                    writeln!(w, "phase,{}", num(phase))?;
                }
                FitVerdict::NotSeparable => writeln!(w, "verdict,not_separable")?,
            }
            writeln!(w, "residual,{}", num(report.residual))?;
            writeln!(w, "best_start,{}", report.best_start)?;
            writeln!(w, "starts,{}", report.starts)?;
            writeln!(w, "accepted_starts,{}", report.accepted_starts)?;
            writeln!(w, "iterations,{}", report.iterations)?;
            w.flush()?;
            Ok(())
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub index: usize,
    pub gammas: [f64; 6],
    pub t_final: f64,
    pub final_position: Point3,
    pub reflections: usize,
    pub crossings: usize,
    pub left_domain: bool,
    pub max_energy_residual: f64,
}

/// Trajectories for seeded random gammas, one ChaCha stream per item.
pub fn run_sweep(sc: &Scenario) -> Result<Vec<SweepRow>, CliError> {
    let spec = sc
        .sweep
        .ok_or_else(|| CliError::Config("sweep: section required for sweeps".into()))?;
    let (start, cfg) = sc
        .motion
        .ok_or_else(|| CliError::Config("motion: section required for sweeps".into()))?;
    let rows: Vec<Result<SweepRow, CliError>> = (0..spec.count)
        .into_par_iter()
        .map(|index| {
            let mut rng = ChaCha8Rng::seed_from_u64(sc.seed);
            rng.set_stream(index as u64);
            let r = spec.gamma_range;
            let mut g = [0.0; 6];
            loop {
                g.iter_mut().for_each(|v| *v = rng.gen_range(-r..=r));
                if (0..3).all(|i| (1.0 - g[2 * i] * g[2 * i + 1]).abs() > 1e-3) {
                    break;
                }
            }
            let action = sc.separable_action(g, sc.lambda0)?;
            let tr = integrate(&action, &sc.energies, &sc.potentials, start, &cfg)?;
            let s = summarize(sc, &tr);
            Ok(SweepRow {
                index,
                gammas: g,
                t_final: s.t_final,
                final_position: s.final_position,
                reflections: s.events.get("reflection").copied().unwrap_or(0),
                crossings: s.events.get("turning_point_crossing").copied().unwrap_or(0),
                left_domain: tr.left_domain(),
                max_energy_residual: s.max_energy_residual,
            })
        })
        .collect();
    rows.into_iter().collect()
}

pub fn write_sweep(rows: &[SweepRow], dir: &Path, format: Format) -> Result<(), CliError> {
    match format {
        Format::Json => write_json(dir, "sweep.json", &rows),
        Format::Csv => {
            let mut w = create(dir, "sweep.csv")?;
            writeln!(
                w,
                "index,g1,g2,g3,g4,g5,g6,t_final,x,y,z,reflections,crossings,left_domain,max_energy_residual"
            )?;
            for r in rows {
                let mut cells = vec![r.index.to_string()];
                cells.extend(r.gammas.iter().map(|g| num(*g)));
                cells.push(num(r.t_final));
                cells.extend(r.final_position.iter().map(|x| num(*x)));
                cells.push(r.reflections.to_string());
                cells.push(r.crossings.to_string());
                cells.push(r.left_domain.to_string());
                cells.push(num(r.max_energy_residual));
                writeln!(w, "{}", cells.join(","))?;
            }
            w.flush()?;
            Ok(())
        }
    }
}
