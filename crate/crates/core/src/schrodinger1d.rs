//! Independent real solutions of the stationary 1D Schrödinger equation
//!
//! ```text
//! -(hbar^2 / 2m) X'' + V(x) X = E X
//! ```
//!
//! Every [`SolutionPair`] starts from the canonical basis at its anchor,
//! `X1(a) = 1, X1'(a) = 0` and `X2(a) = 0, X2'(a) = 1`, so the Wronskian is 1
//! unless the pair has been recombined. Constant potentials use closed forms;
//! everything else goes through a fixed-step Numerov integration with quintic
//! Hermite dense output.

use std::sync::Arc;

use crate::{Axis, Error, Interval, Jet, Result};

/// `hbar` and the particle mass. Natural units by default.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub mass: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        PhysicalConstants {
            hbar: 1.0,
            mass: 1.0,
        }
    }
}

impl PhysicalConstants {
    pub fn new(hbar: f64, mass: f64) -> Result<Self> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::InvalidConstants(format!("hbar must be > 0, got {hbar}")));
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidConstants(format!("mass must be > 0, got {mass}")));
        }
        Ok(PhysicalConstants { hbar, mass })
    }

    /// `2m / hbar^2`, the factor turning `V - E` into the ODE coefficient.
    pub fn ode_factor(&self) -> f64 {
        2.0 * self.mass / (self.hbar * self.hbar)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PotentialKind {
    Zero,
    Constant(f64),
    /// `V = omega^2 x^2 / 2`; `omega` is the angular frequency of a unit mass.
    Harmonic(f64),
    /// Linear interpolation through `(x, V)` breakpoints, constant outside.
    PiecewiseLinear(Vec<(f64, f64)>),
    /// Sampled values, linearly interpolated, constant outside the grid.
    Tabulated { grid: Vec<f64>, values: Vec<f64> },
}

/// A potential acting along one cartesian axis.
#[derive(Clone, Debug, PartialEq)]
pub struct Potential1D {
    kind: PotentialKind,
    axis: Axis,
}

impl Potential1D {
    pub fn new(kind: PotentialKind, axis: Axis) -> Result<Self> {
        let check_finite = |v: f64, what: &str| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidPotential(format!("{what} is not finite")))
            }
        };
        match &kind {
            PotentialKind::Zero => {}
            PotentialKind::Constant(v) => check_finite(*v, "constant value")?,
            PotentialKind::Harmonic(w) => check_finite(*w, "harmonic frequency")?,
            PotentialKind::PiecewiseLinear(points) => {
                if points.is_empty() {
                    return Err(Error::InvalidPotential("no breakpoints".into()));
                }
                for (x, v) in points {
                    check_finite(*x, "breakpoint")?;
                    check_finite(*v, "breakpoint value")?;
                }
                if points.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(Error::InvalidPotential(
                        "breakpoints must be strictly increasing".into(),
                    ));
                }
            }
            PotentialKind::Tabulated { grid, values } => {
                if grid.len() < 2 || grid.len() != values.len() {
                    return Err(Error::InvalidPotential(format!(
                        "tabulated potential needs matching grid/values of length >= 2 (got {} and {})",
                        grid.len(),
                        values.len()
                    )));
                }
                for (x, v) in grid.iter().zip(values) {
                    check_finite(*x, "grid point")?;
                    check_finite(*v, "tabulated value")?;
                }
                if grid.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::InvalidPotential(
                        "tabulated grid must be strictly increasing".into(),
                    ));
                }
            }
        }
        Ok(Potential1D { kind, axis })
    }

    pub fn zero(axis: Axis) -> Self {
        Potential1D {
            kind: PotentialKind::Zero,
            axis,
        }
    }

    pub fn constant(v0: f64, axis: Axis) -> Result<Self> {
        Self::new(PotentialKind::Constant(v0), axis)
    }

    pub fn harmonic(omega: f64, axis: Axis) -> Result<Self> {
        Self::new(PotentialKind::Harmonic(omega), axis)
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn with_axis(mut self, axis: Axis) -> Self {
        self.axis = axis;
        self
    }

    pub fn value(&self, x: f64) -> f64 {
        match &self.kind {
            PotentialKind::Zero => 0.0,
            PotentialKind::Constant(v) => *v,
            PotentialKind::Harmonic(w) => 0.5 * w * w * x * x,
            PotentialKind::PiecewiseLinear(points) => {
                interp_linear(points.len(), |i| points[i].0, |i| points[i].1, x)
            }
            PotentialKind::Tabulated { grid, values } => {
                interp_linear(grid.len(), |i| grid[i], |i| values[i], x)
            }
        }
    }

    /// Constant value if the potential is flat everywhere.
    fn flat_value(&self) -> Option<f64> {
        match &self.kind {
            PotentialKind::Zero => Some(0.0),
            PotentialKind::Constant(v) => Some(*v),
            _ => None,
        }
    }
}

fn interp_linear(n: usize, xs: impl Fn(usize) -> f64, vs: impl Fn(usize) -> f64, x: f64) -> f64 {
    if n == 1 || x <= xs(0) {
        return vs(0);
    }
    if x >= xs(n - 1) {
        return vs(n - 1);
    }
    // first index with xs(i) > x
    let (mut lo, mut hi) = (0usize, n - 1);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if xs(mid) <= x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = (x - xs(lo)) / (xs(hi) - xs(lo));
    vs(lo) + t * (vs(hi) - vs(lo))
}

/// Per-axis energies of a separable problem. `total` is always `ex + ey + ez`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergySplit {
    ex: f64,
    ey: f64,
    ez: f64,
    total: f64,
}

impl EnergySplit {
    pub fn new(ex: f64, ey: f64, ez: f64) -> Self {
        EnergySplit {
            ex,
            ey,
            ez,
            total: ex + ey + ez,
        }
    }

    pub fn axis(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.ex,
            Axis::Y => self.ey,
            Axis::Z => self.ez,
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.ex, self.ey, self.ez]
    }

    pub fn total(&self) -> f64 {
        self.total
    }
}

/// Options for [`solve_pair_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    /// Numerov grid step.
    pub step: f64,
    /// Skip the closed-form catalog even when one applies.
    pub force_numerov: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            step: 1e-3,
            force_numerov: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum ClosedForm {
    /// `cos(k t)`, `sin(k t) / k`
    Oscillatory { k: f64 },
    /// `1`, `t`
    Linear,
    /// `cosh(kappa t)`, `sinh(kappa t) / kappa`
    Exponential { kappa: f64 },
}

impl ClosedForm {
    fn eval(self, t: f64) -> [Jet; 2] {
        match self {
            ClosedForm::Oscillatory { k } => {
                let (s, c) = (k * t).sin_cos();
                [
                    Jet::new(c, -k * s, -k * k * c),
                    Jet::new(s / k, c, -k * s),
                ]
            }
            ClosedForm::Linear => [Jet::new(1.0, 0.0, 0.0), Jet::new(t, 1.0, 0.0)],
            ClosedForm::Exponential { kappa } => {
                let (s, c) = ((kappa * t).sinh(), (kappa * t).cosh());
                [
                    Jet::new(c, kappa * s, kappa * kappa * c),
                    Jet::new(s / kappa, c, kappa * s),
                ]
            }
        }
    }
}

/// Uniform-grid Numerov solution of the canonical basis with dense output.
#[derive(Debug)]
struct NumerovTable {
    x0: f64,
    h: f64,
    y: [Vec<f64>; 2],
    dy: [Vec<f64>; 2],
    d2y: [Vec<f64>; 2],
}

impl NumerovTable {
    fn len(&self) -> usize {
        self.y[0].len()
    }

    fn eval(&self, x: f64) -> [Jet; 2] {
        let n = self.len();
        // nodes 0 and n-1 only serve the derivative formula
        let s = (x - self.x0) / self.h;
        let i = (s.floor() as isize).clamp(1, n as isize - 3) as usize;
        let t = s - i as f64;
        let h = self.h;
        let jet = |k: usize| {
            quintic_hermite(
                t,
                h,
                [self.y[k][i], self.dy[k][i], self.d2y[k][i]],
                [self.y[k][i + 1], self.dy[k][i + 1], self.d2y[k][i + 1]],
            )
        };
        [jet(0), jet(1)]
    }
}

/// Quintic Hermite interpolation on `[x_i, x_i + h]` at `x_i + t h`.
fn quintic_hermite(t: f64, h: f64, left: [f64; 3], right: [f64; 3]) -> Jet {
    let t2 = t * t;
    let t3 = t2 * t;
    let t4 = t3 * t;
    let t5 = t4 * t;
    // basis functions and their t-derivatives
    let h0 = [
        1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5,
        -30.0 * t2 + 60.0 * t3 - 30.0 * t4,
        -60.0 * t + 180.0 * t2 - 120.0 * t3,
    ];
    let h1 = [
        t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5,
        1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4,
        -36.0 * t + 96.0 * t2 - 60.0 * t3,
    ];
    let h2 = [
        0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5,
        t - 4.5 * t2 + 6.0 * t3 - 2.5 * t4,
        1.0 - 9.0 * t + 18.0 * t2 - 10.0 * t3,
    ];
    let h3 = [
        10.0 * t3 - 15.0 * t4 + 6.0 * t5,
        30.0 * t2 - 60.0 * t3 + 30.0 * t4,
        60.0 * t - 180.0 * t2 + 120.0 * t3,
    ];
    let h4 = [
        -4.0 * t3 + 7.0 * t4 - 3.0 * t5,
        -12.0 * t2 + 28.0 * t3 - 15.0 * t4,
        -24.0 * t + 84.0 * t2 - 60.0 * t3,
    ];
    let h5 = [
        0.5 * t3 - t4 + 0.5 * t5,
        1.5 * t2 - 4.0 * t3 + 2.5 * t4,
        3.0 * t - 12.0 * t2 + 10.0 * t3,
    ];
    let c = [
        left[0],
        h * left[1],
        h * h * left[2],
        right[0],
        h * right[1],
        h * h * right[2],
    ];
    let basis = [h0, h1, h2, h3, h4, h5];
    let mut out = [0.0; 3];
    for (b, ci) in basis.iter().zip(c) {
        for d in 0..3 {
            out[d] += ci * b[d];
        }
    }
    Jet::new(out[0], out[1] / h, out[2] / (h * h))
}

#[derive(Clone, Debug)]
enum Basis {
    Closed(ClosedForm),
    Numerov(Arc<NumerovTable>),
}

/// Two independent real solutions `X1`, `X2` on a closed domain.
///
/// Values are immutable; clones share the underlying Numerov table.
#[derive(Clone, Debug)]
pub struct SolutionPair {
    axis: Axis,
    energy: f64,
    domain: Interval,
    anchor: f64,
    constants: PhysicalConstants,
    potential: Arc<Potential1D>,
    basis: Basis,
    /// `X_i = mix[i][0] B1 + mix[i][1] B2` over the canonical basis `B`.
    mix: [[f64; 2]; 2],
    wronskian_at_anchor: f64,
}

/// Solve with default options (closed forms where available, Numerov step 1e-3).
pub fn solve_pair(
    potential: &Potential1D,
    energy: f64,
    domain: Interval,
    anchor: f64,
    constants: PhysicalConstants,
) -> Result<SolutionPair> {
    solve_pair_with(potential, energy, domain, anchor, constants, &SolveOptions::default())
}

pub fn solve_pair_with(
    potential: &Potential1D,
    energy: f64,
    domain: Interval,
    anchor: f64,
    constants: PhysicalConstants,
    opts: &SolveOptions,
) -> Result<SolutionPair> {
    let domain = Interval::new(domain.lo, domain.hi)?;
    PhysicalConstants::new(constants.hbar, constants.mass)?;
    if !domain.contains(anchor) {
        return Err(Error::OutOfDomain {
            x: anchor,
            lo: domain.lo,
            hi: domain.hi,
        });
    }
    if !energy.is_finite() {
        return Err(Error::InvalidPotential(format!("energy {energy} is not finite")));
    }

    let basis = match potential.flat_value() {
        Some(v0) if !opts.force_numerov => {
            let q = constants.ode_factor() * (v0 - energy);
            let form = if q == 0.0 {
                ClosedForm::Linear
            } else if q < 0.0 {
                ClosedForm::Oscillatory { k: (-q).sqrt() }
            } else {
                let kappa = q.sqrt();
                let reach = (domain.hi - anchor).abs().max((anchor - domain.lo).abs());
                if kappa * reach > 700.0 {
                    return Err(Error::NonFiniteSolution {
                        x: if domain.hi - anchor > anchor - domain.lo {
                            domain.hi
                        } else {
                            domain.lo
                        },
                    });
                }
                ClosedForm::Exponential { kappa }
            };
            Basis::Closed(form)
        }
        _ => Basis::Numerov(Arc::new(numerov_table(
            potential, energy, domain, anchor, constants, opts.step,
        )?)),
    };

    Ok(SolutionPair {
        axis: potential.axis(),
        energy,
        domain,
        anchor,
        constants,
        potential: Arc::new(potential.clone()),
        basis,
        mix: [[1.0, 0.0], [0.0, 1.0]],
        wronskian_at_anchor: 1.0,
    })
}

fn numerov_table(
    potential: &Potential1D,
    energy: f64,
    domain: Interval,
    anchor: f64,
    constants: PhysicalConstants,
    h: f64,
) -> Result<NumerovTable> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidPotential(format!("Numerov step must be > 0, got {h}")));
    }
    let factor = constants.ode_factor();
    let q = |x: f64| factor * (potential.value(x) - energy);

    // one extra node beyond each end feeds the derivative formula
    let n_left = ((anchor - domain.lo) / h - 1e-9).ceil().max(0.0) as usize + 1;
    let n_right = ((domain.hi - anchor) / h - 1e-9).ceil().max(0.0) as usize + 1;
    let n = n_left + n_right + 1;
    let x0 = anchor - n_left as f64 * h;
    let xs: Vec<f64> = (0..n).map(|j| x0 + j as f64 * h).collect();
    let qs: Vec<f64> = xs.iter().map(|&x| q(x)).collect();
    let h2 = h * h;

    let mut y = [vec![0.0; n], vec![0.0; n]];
    for (sol, (y0, dy0)) in [(1.0, 0.0), (0.0, 1.0)].into_iter().enumerate() {
        let ys = &mut y[sol];
        ys[n_left] = y0;
        ys[n_left + 1] = rk4_start(&q, anchor, y0, dy0, h);
        ys[n_left - 1] = rk4_start(&q, anchor, y0, dy0, -h);
        for j in n_left + 1..n - 1 {
            ys[j + 1] = numerov_step(ys[j], ys[j - 1], qs[j + 1], qs[j], qs[j - 1], h2);
            if !ys[j + 1].is_finite() || ys[j + 1].abs() > 1e290 {
                return Err(Error::NonFiniteSolution { x: xs[j + 1] });
            }
        }
        for j in (1..n_left).rev() {
            ys[j - 1] = numerov_step(ys[j], ys[j + 1], qs[j - 1], qs[j], qs[j + 1], h2);
            if !ys[j - 1].is_finite() || ys[j - 1].abs() > 1e290 {
                return Err(Error::NonFiniteSolution { x: xs[j - 1] });
            }
        }
    }

    let mut dy = [vec![0.0; n], vec![0.0; n]];
    let mut d2y = [vec![0.0; n], vec![0.0; n]];
    for sol in 0..2 {
        let ys = &y[sol];
        for j in 1..n - 1 {
            // fourth-order derivative consistent with y'' = q y
            dy[sol][j] = ((1.0 - h2 * qs[j + 1] / 6.0) * ys[j + 1]
                - (1.0 - h2 * qs[j - 1] / 6.0) * ys[j - 1])
                / (2.0 * h);
        }
        dy[sol][0] = (ys[1] - ys[0]) / h;
        dy[sol][n - 1] = (ys[n - 1] - ys[n - 2]) / h;
        for j in 0..n {
            d2y[sol][j] = qs[j] * ys[j];
        }
    }

    Ok(NumerovTable { x0, h, y, dy, d2y })
}

/// `y_{next}` from the Numerov recurrence for `y'' = q y`.
fn numerov_step(y_cur: f64, y_prev: f64, q_next: f64, q_cur: f64, q_prev: f64, h2: f64) -> f64 {
    (2.0 * (1.0 + 5.0 * h2 * q_cur / 12.0) * y_cur - (1.0 - h2 * q_prev / 12.0) * y_prev)
        / (1.0 - h2 * q_next / 12.0)
}

/// First Numerov node from the initial conditions, by sub-stepped RK4.
fn rk4_start<Q: Fn(f64) -> f64>(q: &Q, x0: f64, y0: f64, dy0: f64, h: f64) -> f64 {
    const SUB: usize = 64;
    let dt = h / SUB as f64;
    let (mut x, mut y, mut v) = (x0, y0, dy0);
    for _ in 0..SUB {
        let k1y = v;
        let k1v = q(x) * y;
        let k2y = v + 0.5 * dt * k1v;
        let k2v = q(x + 0.5 * dt) * (y + 0.5 * dt * k1y);
        let k3y = v + 0.5 * dt * k2v;
        let k3v = q(x + 0.5 * dt) * (y + 0.5 * dt * k2y);
        let k4y = v + dt * k3v;
        let k4v = q(x + dt) * (y + dt * k3y);
        y += dt / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        x += dt;
    }
    y
}

impl SolutionPair {
    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    pub fn constants(&self) -> PhysicalConstants {
        self.constants
    }

    pub fn potential(&self) -> &Potential1D {
        &self.potential
    }

    pub fn wronskian_at_anchor(&self) -> f64 {
        self.wronskian_at_anchor
    }

    pub fn is_numerov(&self) -> bool {
        matches!(self.basis, Basis::Numerov(_))
    }

    /// Numerov grid step, if the pair is tabulated.
    pub fn grid_step(&self) -> Option<f64> {
        match &self.basis {
            Basis::Numerov(t) => Some(t.h),
            Basis::Closed(_) => None,
        }
    }

    pub fn check_domain(&self, x: f64) -> Result<()> {
        if self.domain.contains(x) && x.is_finite() {
            Ok(())
        } else {
            Err(Error::OutOfDomain {
                x,
                lo: self.domain.lo,
                hi: self.domain.hi,
            })
        }
    }

    /// `[X1, X2]` with first and second derivatives at `x`.
    pub fn eval(&self, x: f64) -> Result<[Jet; 2]> {
        self.check_domain(x)?;
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: f64) -> [Jet; 2] {
        let [b1, b2] = match &self.basis {
            Basis::Closed(form) => form.eval(x - self.anchor),
            Basis::Numerov(table) => table.eval(x),
        };
        let m = self.mix;
        [
            b1.combine(m[0][0], b2, m[0][1]),
            b1.combine(m[1][0], b2, m[1][1]),
        ]
    }

    pub fn x1(&self, x: f64) -> Result<f64> {
        Ok(self.eval(x)?[0].value)
    }

    pub fn x2(&self, x: f64) -> Result<f64> {
        Ok(self.eval(x)?[1].value)
    }

    /// `X1 X2' - X2 X1'` at `x`.
    pub fn wronskian(&self, x: f64) -> Result<f64> {
        wronskian(self, x)
    }

    /// New pair `(X1', X2') = M (X1, X2)`; the Wronskian scales by `det M`.
    pub fn recombined(&self, m: [[f64; 2]; 2]) -> Result<SolutionPair> {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let w = det * self.wronskian_at_anchor;
        if !w.is_finite() || w == 0.0 {
            return Err(Error::DependentSolutions { wronskian: w });
        }
        let old = self.mix;
        let mut mix = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                mix[i][j] = m[i][0] * old[0][j] + m[i][1] * old[1][j];
            }
        }
        Ok(SolutionPair {
            mix,
            wronskian_at_anchor: w,
            ..self.clone()
        })
    }

    /// `(X2, X1)`.
    pub fn swapped(&self) -> SolutionPair {
        self.recombined([[0.0, 1.0], [1.0, 0.0]])
            .expect("swap has unit determinant")
    }

    /// The Schrödinger residual `-(hbar^2/2m) X'' + (V - E) X` for both
    /// solutions, with `X''` taken by five-point differences of the dense
    /// output at spacing `h`.
    pub fn schrodinger_residual(&self, x: f64, h: f64) -> Result<[f64; 2]> {
        let lo = x - 2.0 * h;
        let hi = x + 2.0 * h;
        if !self.domain.contains(lo) || !self.domain.contains(hi) {
            return Err(Error::StencilOutOfDomain { x });
        }
        let kin = self.constants.hbar * self.constants.hbar / (2.0 * self.constants.mass);
        let dv = self.potential.value(x) - self.energy;
        let mut out = [0.0; 2];
        for (k, o) in out.iter_mut().enumerate() {
            let f = |s: f64| self.eval_unchecked(s)[k].value;
            let second = crate::stencil::d2(f, x, h);
            *o = -kin * second + dv * f(x);
        }
        Ok(out)
    }
}

/// `X1(x) X2'(x) - X2(x) X1'(x)`.
pub fn wronskian(pair: &SolutionPair, x: f64) -> Result<f64> {
    let [a, b] = pair.eval(x)?;
    Ok(a.value * b.d1 - b.value * a.d1)
}
