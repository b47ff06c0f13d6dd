//! Quantum law of motion and trajectories.
//!
//! Each axis moves with `dx/dt = 2 (E - V(x)) / P(x)` where `P = dS0/dx` is
//! the quantum momentum. Since `P` never vanishes, the velocity is zero only
//! at classical turning points, which the exact flow approaches
//! asymptotically. Turning points are handled as events once `|E - V|`
//! drops below `tp_epsilon`.

use serde::{Deserialize, Serialize};

use crate::reduced_action::{ReducedAction1D, SeparableAction3D};
use crate::schrodinger1d::{EnergySplit, PhysicalConstants, Potential1D};
use crate::stencil;
use crate::{Axis, Error, Point3, Result};

/// `g = 1 + (hbar^2 / 2) P^-2 {S0; x}`, which equals `2m (E - V) / P^2`.
pub fn metric_g(action: &ReducedAction1D, x: f64) -> Result<f64> {
    let p = action.momentum(x)?;
    let hbar = action.hbar();
    Ok(1.0 + 0.5 * hbar * hbar * action.schwarzian(x)? / (p * p))
}

/// `2 (E - V(x)) / P(x)`
pub fn velocity(action: &ReducedAction1D, e_axis: f64, potential: &Potential1D, x: f64) -> Result<f64> {
    Ok(2.0 * (e_axis - potential.value(x)) / action.momentum(x)?)
}

/// The alternative candidate `(P g + (P^2 / 2) dg/dP) / m`, with `dg/dP`
/// taken through `x` and `dg/dx` from a five-point stencil of step `h`.
/// Not used by the integrator.
pub fn velocity_alt(action: &ReducedAction1D, x: f64, h: f64) -> Result<f64> {
    let d = action.pair().domain();
    if !(d.contains(x - 2.0 * h) && d.contains(x + 2.0 * h)) {
        return Err(Error::StencilOutOfDomain { x });
    }
    let [p, dp, _] = action.momentum_derivatives(x)?;
    let g = metric_g(action, x)?;
    let dg = stencil::try_d1(|t| metric_g(action, t), x, h)?;
    // a metric flat to rounding has no dg/dP term
    let dg_dp = if dg.abs() < 1e-10 || dp == 0.0 { 0.0 } else { dg / dp };
    Ok((p * g + 0.5 * p * p * dg_dp) / action.constants().mass)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TurningPolicy {
    Reflect,
    Transmit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Integrator {
    Rk4,
    Rk45,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MotionConfig {
    /// `None` means `1e-6 |E|` with `E` the total energy
    pub tp_epsilon: Option<f64>,
    pub tp_policy: [TurningPolicy; 3],
    pub step: f64,
    pub t_max: f64,
    pub integrator: Integrator,
    pub min_step: f64,
    /// local error tolerance of the adaptive integrator
    pub rk45_tol: f64,
}

impl Default for MotionConfig {
    fn default() -> Self {
        MotionConfig {
            tp_epsilon: None,
            tp_policy: [TurningPolicy::Reflect; 3],
            step: 1e-3,
            t_max: 10.0,
            integrator: Integrator::Rk4,
            min_step: 1e-12,
            rk45_tol: 1e-10,
        }
    }
}

impl MotionConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidMotion(msg));
        if !(self.step > 0.0 && self.step.is_finite()) {
            return bad(format!("step must be positive, got {}", self.step));
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return bad(format!("t_max must be positive, got {}", self.t_max));
        }
        if let Some(eps) = self.tp_epsilon {
            if !(eps > 0.0 && eps.is_finite()) {
                return bad(format!("tp_epsilon must be positive, got {eps}"));
            }
        }
        if !(self.min_step > 0.0 && self.min_step < self.step) {
            return bad(format!("min_step must lie in (0, step), got {}", self.min_step));
        }
        if !(self.rk45_tol > 0.0) {
            return bad(format!("rk45_tol must be positive, got {}", self.rk45_tol));
        }
        Ok(())
    }

    pub fn epsilon_for(&self, total_energy: f64) -> Result<f64> {
        match self.tp_epsilon {
            Some(e) => Ok(e),
            None if total_energy != 0.0 => Ok(1e-6 * total_energy.abs()),
            None => Err(Error::InvalidMotion(
                "tp_epsilon must be set explicitly when the total energy is zero".into(),
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    Allowed,
    Forbidden,
    TurningPoint,
}

impl Region {
    pub fn classify(e_minus_v: f64, eps: f64) -> Region {
        if e_minus_v.abs() <= eps {
            Region::TurningPoint
        } else if e_minus_v > 0.0 {
            Region::Allowed
        } else {
            Region::Forbidden
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Region::Allowed => "allowed",
            Region::Forbidden => "forbidden",
            Region::TurningPoint => "turning_point",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectoryState {
    pub t: f64,
    pub pos: Point3,
    pub momenta: [f64; 3],
    pub velocities: [f64; 3],
    pub metric: [f64; 3],
    pub region: [Region; 3],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventKind {
    /// momentum orientation flipped and the axis crossed `E = V`
    TurningPointCrossing,
    /// momentum orientation flipped, motion returned into the allowed region
    Reflection,
    /// the trajectory reached the edge of the domain; integration stops
    DomainExit,
}

impl EventKind {
    pub fn label(self) -> &'static str {
        match self {
            EventKind::TurningPointCrossing => "turning_point_crossing",
            EventKind::Reflection => "reflection",
            EventKind::DomainExit => "domain_exit",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Event {
    pub t: f64,
    pub axis: Axis,
    pub kind: EventKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DwellEnd {
    /// crossed back into an allowed region
    Returned,
    LeftDomain,
    /// still inside when `t_max` was reached
    TimeLimit,
}

/// One stay of an axis inside a classically forbidden region.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dwell {
    pub axis: Axis,
    pub enter: f64,
    pub exit: f64,
    pub end: DwellEnd,
}

impl Dwell {
    pub fn duration(&self) -> f64 {
        self.exit - self.enter
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub states: Vec<TrajectoryState>,
    pub events: Vec<Event>,
    pub dwells: Vec<Dwell>,
    pub tp_epsilon: f64,
}

impl Trajectory {
    pub fn last(&self) -> &TrajectoryState {
        self.states.last().expect("a trajectory holds at least its start state")
    }

    pub fn left_domain(&self) -> bool {
        self.events.iter().any(|e| e.kind == EventKind::DomainExit)
    }

    pub fn count(&self, kind: EventKind) -> usize {
        self.events.iter().filter(|e| e.kind == kind).count()
    }
}

/// `sum_i P_i^2 g_ii / 2m + V(pos) - E`.
pub fn total_energy_check(
    state: &TrajectoryState,
    potentials: &[Potential1D; 3],
    energies: &EnergySplit,
    constants: PhysicalConstants,
) -> f64 {
    let mut acc = -energies.total();
    for i in 0..3 {
        let p = state.momenta[i];
        acc += p * p * state.metric[i] / (2.0 * constants.mass) + potentials[i].value(state.pos[i]);
    }
    acc
}

struct Motion<'a> {
    actions: [ReducedAction1D; 3],
    energies: [f64; 3],
    potentials: &'a [Potential1D; 3],
    eps: f64,
}

fn axpy(pos: Point3, k: [f64; 3], s: f64) -> Point3 {
    [pos[0] + s * k[0], pos[1] + s * k[1], pos[2] + s * k[2]]
}

// Dormand-Prince 5(4) tableau
const DP_C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

impl Motion<'_> {
    fn e_minus_v(&self, i: usize, x: f64) -> f64 {
        self.energies[i] - self.potentials[i].value(x)
    }

    fn rhs(&self, pos: Point3) -> Result<[f64; 3]> {
        let mut v = [0.0; 3];
        for i in 0..3 {
            v[i] = 2.0 * self.e_minus_v(i, pos[i]) / self.actions[i].momentum(pos[i])?;
        }
        Ok(v)
    }

    fn inside(&self, pos: Point3) -> Result<Point3> {
        for (a, &x) in self.actions.iter().zip(&pos) {
            a.pair().check_domain(x)?;
        }
        Ok(pos)
    }

    fn rk4(&self, pos: Point3, dt: f64) -> Result<Point3> {
        let k1 = self.rhs(pos)?;
        let k2 = self.rhs(axpy(pos, k1, 0.5 * dt))?;
        let k3 = self.rhs(axpy(pos, k2, 0.5 * dt))?;
        let k4 = self.rhs(axpy(pos, k3, dt))?;
        self.inside(std::array::from_fn(|i| {
            pos[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        }))
    }

    /// Fifth-order solution and the norm of the embedded error estimate.
    fn dp5(&self, pos: Point3, dt: f64) -> Result<(Point3, f64)> {
        let mut k = [[0.0; 3]; 7];
        for s in 0..7 {
            let mut p = pos;
            for (j, a) in DP_A[s].iter().enumerate().take(s) {
                p = axpy(p, k[j], dt * a);
            }
            debug_assert!(DP_C[s] >= 0.0);
            k[s] = self.rhs(p)?;
        }
        let mut y5 = pos;
        let mut err: f64 = 0.0;
        for i in 0..3 {
            let mut e = 0.0;
            for s in 0..7 {
                y5[i] += dt * DP_B5[s] * k[s][i];
                e += dt * (DP_B5[s] - DP_B4[s]) * k[s][i];
            }
            err = err.max(e.abs());
        }
        Ok((self.inside(y5)?, err))
    }

    fn advance(&self, integrator: Integrator, pos: Point3, dt: f64) -> Result<Point3> {
        match integrator {
            Integrator::Rk4 => self.rk4(pos, dt),
            Integrator::Rk45 => self.dp5(pos, dt).map(|r| r.0),
        }
    }

    fn state(&self, t: f64, pos: Point3) -> Result<TrajectoryState> {
        let mut s = TrajectoryState {
            t,
            pos,
            momenta: [0.0; 3],
            velocities: [0.0; 3],
            metric: [0.0; 3],
            region: [Region::Allowed; 3],
        };
        for i in 0..3 {
            let a = &self.actions[i];
            let f = self.e_minus_v(i, pos[i]);
            s.momenta[i] = a.momentum(pos[i])?;
            s.velocities[i] = 2.0 * f / s.momenta[i];
            s.metric[i] = metric_g(a, pos[i])?;
            s.region[i] = Region::classify(f, self.eps);
        }
        Ok(s)
    }

    /// Axes entering the turning-point band between `from` and `to`, and
    /// whether every one of them landed inside it.
    fn entering(&self, from: Point3, to: Point3) -> (Vec<usize>, bool) {
        let mut axes = Vec::new();
        let mut landed = true;
        for i in 0..3 {
            let f0 = self.e_minus_v(i, from[i]);
            let f1 = self.e_minus_v(i, to[i]);
            if f0.abs() <= self.eps {
                continue;
            }
            if f1.abs() <= self.eps {
                axes.push(i);
            } else if f0.signum() != f1.signum() {
                axes.push(i);
                landed = false;
            }
        }
        (axes, landed)
    }

    /// Mirror `x` across the nearby root of `E - V` on axis `i`.
    fn mirror(&self, i: usize, x: f64) -> Result<f64> {
        let h = 1e-6 * (1.0 + x.abs());
        let dv = stencil::d1(|t| self.potentials[i].value(t), x, h);
        if dv == 0.0 {
            return Err(Error::InvalidMotion(format!(
                "flat potential at the turning point on axis {}",
                Axis::ALL[i]
            )));
        }
        let root = x + self.e_minus_v(i, x) / dv;
        Ok(2.0 * root - x)
    }

    /// Axis that leaves its domain first when moving with the current velocity.
    fn exiting_axis(&self, pos: Point3) -> Axis {
        let mut best = (f64::INFINITY, 0);
        for i in 0..3 {
            let d = self.actions[i].pair().domain();
            let v = self.actions[i]
                .momentum(pos[i])
                .map(|p| 2.0 * self.e_minus_v(i, pos[i]) / p)
                .unwrap_or(0.0);
            let room = if v > 0.0 { d.hi - pos[i] } else { pos[i] - d.lo };
            let time = if v == 0.0 { f64::INFINITY } else { room / v.abs() };
            if time < best.0 {
                best = (time, i);
            }
        }
        Axis::ALL[best.1]
    }
}

fn out_of_domain(e: &Error) -> bool {
    matches!(e, Error::OutOfDomain { .. })
}

/// Integrate the quantum law of motion from `start`.
///
/// Approaching `E = V` from the allowed side, `Reflect` flips the axis
/// momentum so the motion returns, and `Transmit` flips it and places the
/// axis at the mirror point across `E = V`, continuing into the forbidden
/// region. Approaching from the forbidden side always crosses back into the
/// allowed region. Reaching the edge of the domain ends the trajectory with a
/// `DomainExit` event.
pub fn integrate(
    action3d: &SeparableAction3D,
    energies: &EnergySplit,
    potentials: &[Potential1D; 3],
    start: Point3,
    cfg: &MotionConfig,
) -> Result<Trajectory> {
    cfg.validate()?;
    let eps = cfg.epsilon_for(energies.total())?;
    let mut m = Motion {
        actions: action3d.axes().clone(),
        energies: energies.as_array(),
        potentials,
        eps,
    };
    for i in 0..3 {
        if !m.actions[i].pair().domain().contains(start[i]) {
            return Err(Error::LeftDomain { t: 0.0, axis: Axis::ALL[i] });
        }
        if m.e_minus_v(i, start[i]) == 0.0 {
            return Err(Error::InvalidMotion(format!(
                "start lies on a turning point of axis {}",
                Axis::ALL[i]
            )));
        }
    }

    let mut t = 0.0;
    let mut pos = start;
    let mut states = vec![m.state(t, pos)?];
    let mut events = Vec::new();
    let mut dwells = Vec::new();
    let mut forbidden_since: [Option<f64>; 3] =
        std::array::from_fn(|i| (m.e_minus_v(i, start[i]) < -eps).then_some(0.0));
    let mut h = cfg.step;
    let t_end_tol = 1e-12 * cfg.t_max;

    'outer: while cfg.t_max - t > t_end_tol {
        let mut dt = match cfg.integrator {
            Integrator::Rk4 => cfg.step,
            Integrator::Rk45 => h,
        }
        .min(cfg.t_max - t);

        // find a step that stays inside the domain (and meets the tolerance)
        let next = loop {
            let attempt = match cfg.integrator {
                Integrator::Rk4 => m.rk4(pos, dt).map(|p| (p, 0.0)),
                Integrator::Rk45 => m.dp5(pos, dt),
            };
            match attempt {
                Ok((p, err)) if cfg.integrator == Integrator::Rk45 => {
                    let scale = cfg.rk45_tol * (1.0 + p.iter().fold(0.0f64, |a, x| a.max(x.abs())));
                    if err <= scale {
                        let grow = if err == 0.0 { 5.0 } else { (0.9 * (scale / err).powf(0.2)).clamp(0.2, 5.0) };
                        h = (dt * grow).min(cfg.step);
                        break p;
                    }
                    dt *= (0.9 * (scale / err).powf(0.25)).clamp(0.1, 0.5);
                }
                Ok((p, _)) => break p,
                Err(e) if out_of_domain(&e) => dt *= 0.5,
                Err(e) => return Err(e),
            }
            if dt < cfg.min_step {
                let axis = m.exiting_axis(pos);
                events.push(Event { t, axis, kind: EventKind::DomainExit });
                break 'outer;
            }
        };

        let (axes, landed) = m.entering(pos, next);
        if axes.is_empty() {
            t += dt;
            pos = next;
            states.push(m.state(t, pos)?);
            continue;
        }

        // shrink the step until the entering axes land inside the band
        let (mut lo, mut hi) = (0.0, dt);
        let mut at_hi = next;
        let mut ok = landed;
        while !ok {
            let mid = 0.5 * (lo + hi);
            let p = m.advance(cfg.integrator, pos, mid)?;
            let (ax, l) = m.entering(pos, p);
            if ax.is_empty() {
                lo = mid;
            } else {
                hi = mid;
                at_hi = p;
                ok = l;
            }
            if !ok && hi - lo < cfg.min_step {
                return Err(Error::StepUnderflow { t: t + hi });
            }
        }
        let (axes, _) = m.entering(pos, at_hi);
        let before = pos;
        t += hi;
        pos = at_hi;

        for &i in &axes {
            let axis = Axis::ALL[i];
            let from_allowed = m.e_minus_v(i, before[i]) > 0.0;
            m.actions[i] = m.actions[i].flipped();
            if from_allowed && cfg.tp_policy[i] == TurningPolicy::Reflect {
                events.push(Event { t, axis, kind: EventKind::Reflection });
                continue;
            }
            let x = m.mirror(i, pos[i])?;
            events.push(Event { t, axis, kind: EventKind::TurningPointCrossing });
            if from_allowed {
                forbidden_since[i] = Some(t);
            } else if let Some(enter) = forbidden_since[i].take() {
                dwells.push(Dwell { axis, enter, exit: t, end: DwellEnd::Returned });
            }
            if !m.actions[i].pair().domain().contains(x) {
                events.push(Event { t, axis, kind: EventKind::DomainExit });
                states.push(m.state(t, pos)?);
                break 'outer;
            }
            pos[i] = x;
        }
        log::debug!("event at t = {t}: axes {axes:?}");
        states.push(m.state(t, pos)?);
    }

    let t_final = states.last().map(|s| s.t).unwrap_or(0.0);
    let left = events.last().is_some_and(|e| e.kind == EventKind::DomainExit);
    for (i, since) in forbidden_since.iter().enumerate() {
        if let Some(enter) = *since {
            dwells.push(Dwell {
                axis: Axis::ALL[i],
                enter,
                exit: t_final,
                end: if left { DwellEnd::LeftDomain } else { DwellEnd::TimeLimit },
            });
        }
    }
    Ok(Trajectory {
        states,
        events,
        dwells,
        tp_epsilon: eps,
    })
}
