//! Reduced actions built from Schrödinger solution pairs.
//!
//! A 1D reduced action is
//!
//! ```text
//! S0(x) = o * hbar * arctan((X1 + g_num X2) / (g_den X1 + X2))
//! ```
//!
//! evaluated as a continuous branch (no jumps of `pi hbar`), with `o = ±1`
//! the orientation. Its derivative is the quantum momentum
//!
//! ```text
//! P(x) = -o * hbar * (1 - g_num g_den) * W / [(X1 + g_num X2)^2 + (g_den X1 + X2)^2]
//! ```
//!
//! which never vanishes. Schwarzian derivatives are taken from the momentum
//! (equivalently from the denominator `D = u^2 + v^2`), never through the
//! arctan branches.

use std::f64::consts::{FRAC_PI_4, PI};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::schrodinger1d::{PhysicalConstants, Potential1D, SolutionPair};
use crate::{Axis, Error, Jet, Point3, Result};

/// Sign in front of the reduced action; flipping it reverses the momentum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Positive,
    Negative,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Positive => 1.0,
            Orientation::Negative => -1.0,
        }
    }

    pub fn flipped(self) -> Orientation {
        match self {
            Orientation::Positive => Orientation::Negative,
            Orientation::Negative => Orientation::Positive,
        }
    }

    pub fn from_sign(s: f64) -> Orientation {
        if s < 0.0 {
            Orientation::Negative
        } else {
            Orientation::Positive
        }
    }
}

/// Phase data of `theta = atan2(u, v)` for two solutions `u`, `v` of the same
/// linear ODE.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseJet {
    /// `u^2 + v^2`
    pub denom: f64,
    /// `d/dx ln D`
    pub log_denom_d1: f64,
    /// `D'' / D`
    pub denom_d2_ratio: f64,
    /// local `u' v - u v'`, so that `theta' = cross / D`
    pub cross: f64,
}

impl PhaseJet {
    pub fn new(u: Jet, v: Jet) -> PhaseJet {
        let denom = u.value * u.value + v.value * v.value;
        let d1 = 2.0 * (u.value * u.d1 + v.value * v.d1);
        let d2 = 2.0 * (u.d1 * u.d1 + u.value * u.d2 + v.d1 * v.d1 + v.value * v.d2);
        PhaseJet {
            denom,
            log_denom_d1: d1 / denom,
            denom_d2_ratio: d2 / denom,
            cross: u.d1 * v.value - u.value * v.d1,
        }
    }

    /// Schwarzian of `theta` (and of any `a theta + b`): `(D'/D)^2 / 2 - D''/D`.
    pub fn schwarzian(&self) -> f64 {
        0.5 * self.log_denom_d1 * self.log_denom_d1 - self.denom_d2_ratio
    }
}

/// One-axis reduced action: a solution pair, two integration constants and
/// an orientation.
#[derive(Clone, Debug)]
pub struct ReducedAction1D {
    pair: SolutionPair,
    gamma_num: f64,
    gamma_den: f64,
    orientation: Orientation,
    branches: Arc<BranchTable>,
}

/// Continuous angle `theta(x)` on refined nodes of the domain.
#[derive(Debug)]
struct BranchTable {
    xs: Vec<f64>,
    thetas: Vec<f64>,
    /// principal `atan2(u, v)` at each node
    phis: Vec<f64>,
}

fn wrap_pi(d: f64) -> f64 {
    let w = d - 2.0 * PI * (d / (2.0 * PI)).round();
    if w <= -PI {
        w + 2.0 * PI
    } else {
        w
    }
}

// 5-point Gauss-Legendre on [-1, 1]
const GL_NODES: [f64; 5] = [
    0.0,
    -0.538_469_310_105_683_1,
    0.538_469_310_105_683_1,
    -0.906_179_845_938_664,
    0.906_179_845_938_664,
];
const GL_WEIGHTS: [f64; 5] = [
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
    0.236_926_885_056_189_1,
];

fn gauss5<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    GL_NODES
        .iter()
        .zip(GL_WEIGHTS)
        .map(|(t, w)| w * f(mid + half * t))
        .sum::<f64>()
        * half
}

impl ReducedAction1D {
    /// Rejects `1 - g_num g_den = 0`, for which the action is constant.
    pub fn new(
        pair: SolutionPair,
        gamma_num: f64,
        gamma_den: f64,
        orientation: Orientation,
    ) -> Result<Self> {
        let det = 1.0 - gamma_num * gamma_den;
        if !(gamma_num.is_finite() && gamma_den.is_finite()) || det.abs() < 1e-14 {
            return Err(Error::DegenerateAction {
                axis: pair.axis(),
                value: det,
            });
        }
        let mut action = ReducedAction1D {
            pair,
            gamma_num,
            gamma_den,
            orientation,
            branches: Arc::new(BranchTable {
                xs: Vec::new(),
                thetas: Vec::new(),
                phis: Vec::new(),
            }),
        };
        action.branches = Arc::new(action.build_branches());
        Ok(action)
    }

    pub fn pair(&self) -> &SolutionPair {
        &self.pair
    }

    pub fn axis(&self) -> Axis {
        self.pair.axis()
    }

    pub fn gammas(&self) -> (f64, f64) {
        (self.gamma_num, self.gamma_den)
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn constants(&self) -> PhysicalConstants {
        self.pair.constants()
    }

    pub fn hbar(&self) -> f64 {
        self.pair.constants().hbar
    }

    /// Same action with the given orientation; shares the branch table.
    pub fn with_orientation(&self, orientation: Orientation) -> ReducedAction1D {
        ReducedAction1D {
            orientation,
            ..self.clone()
        }
    }

    pub fn flipped(&self) -> ReducedAction1D {
        self.with_orientation(self.orientation.flipped())
    }

    /// `(1 - g_num g_den)`
    pub fn gamma_det(&self) -> f64 {
        1.0 - self.gamma_num * self.gamma_den
    }

    /// `d theta / dx = theta_rate_numerator / D`, with the constant anchor Wronskian.
    fn rate_numerator(&self) -> f64 {
        -self.gamma_det() * self.pair.wronskian_at_anchor()
    }

    /// `u = X1 + g_num X2` and `v = g_den X1 + X2` with derivatives.
    fn uv(&self, x: f64) -> (Jet, Jet) {
        let [x1, x2] = self.pair.eval_unchecked(x);
        (
            x1.combine(1.0, x2, self.gamma_num),
            x1.combine(self.gamma_den, x2, 1.0),
        )
    }

    pub fn phase_jet(&self, x: f64) -> Result<PhaseJet> {
        self.pair.check_domain(x)?;
        let (u, v) = self.uv(x);
        Ok(PhaseJet::new(u, v))
    }

    fn build_branches(&self) -> BranchTable {
        let domain = self.pair.domain();
        let anchor = self.pair.anchor();
        let rate_num = self.rate_numerator();
        let rate = |x: f64| {
            let (u, v) = self.uv(x);
            rate_num / (u.value * u.value + v.value * v.value)
        };
        let phi = |x: f64| {
            let (u, v) = self.uv(x);
            u.value.atan2(v.value)
        };

        let mut seeds = domain.linspace(257);
        seeds.push(anchor.clamp(domain.lo, domain.hi));
        seeds.sort_by(|a, b| a.total_cmp(b));
        seeds.dedup_by(|a, b| (*a - *b).abs() < 1e-14);

        // refine until each segment turns by at most pi/4
        let mut xs = vec![seeds[0]];
        let mut increments = Vec::new();
        let mut stack: Vec<(f64, f64, u32)> = Vec::new();
        for w in seeds.windows(2) {
            stack.push((w[0], w[1], 0));
            while let Some((a, b, depth)) = stack.pop() {
                let est = gauss5(rate, a, b);
                let raw = wrap_pi(phi(b) - phi(a));
                if depth < 48 && (est.abs() > FRAC_PI_4 || raw.abs() > FRAC_PI_4) {
                    let m = 0.5 * (a + b);
                    // right half first so the left half is processed next
                    stack.push((m, b, depth + 1));
                    stack.push((a, m, depth + 1));
                    continue;
                }
                let d = phi(b) - phi(a);
                let n = ((est - d) / (2.0 * PI)).round();
                increments.push(d + 2.0 * PI * n);
                xs.push(b);
            }
        }

        let phis: Vec<f64> = xs.iter().map(|&x| phi(x)).collect();
        let ia = xs
            .iter()
            .position(|&x| (x - anchor).abs() < 1e-14)
            .unwrap_or(0);
        let (ua, va) = self.uv(xs[ia]);
        let mut thetas = vec![0.0; xs.len()];
        thetas[ia] = (ua.value / va.value).atan();
        for i in ia..xs.len() - 1 {
            thetas[i + 1] = thetas[i] + increments[i];
        }
        for i in (0..ia).rev() {
            thetas[i] = thetas[i + 1] - increments[i];
        }
        BranchTable { xs, thetas, phis }
    }

    /// Continuous `atan2(u, v)` anchored at the principal arctan value.
    pub fn theta(&self, x: f64) -> Result<f64> {
        self.pair.check_domain(x)?;
        let t = &self.branches;
        let i = t.xs.partition_point(|&n| n <= x).saturating_sub(1).min(t.xs.len() - 1);
        let (u, v) = self.uv(x);
        Ok(t.thetas[i] + wrap_pi(u.value.atan2(v.value) - t.phis[i]))
    }

    /// Branch-continuous reduced action `S0(x)`.
    pub fn action(&self, x: f64) -> Result<f64> {
        Ok(self.orientation.sign() * self.hbar() * self.theta(x)?)
    }

    /// `dS0/dx`; never zero.
    pub fn momentum(&self, x: f64) -> Result<f64> {
        self.pair.check_domain(x)?;
        let (u, v) = self.uv(x);
        let d = u.value * u.value + v.value * v.value;
        Ok(self.orientation.sign() * self.hbar() * self.rate_numerator() / d)
    }

    /// `(P, P', P'')` at `x`.
    pub fn momentum_derivatives(&self, x: f64) -> Result<[f64; 3]> {
        let pj = self.phase_jet(x)?;
        let p = self.orientation.sign() * self.hbar() * self.rate_numerator() / pj.denom;
        let l1 = pj.log_denom_d1;
        // P = C / D  =>  P'/P = -D'/D,  P''/P = 2 (D'/D)^2 - D''/D
        Ok([p, -p * l1, p * (2.0 * l1 * l1 - pj.denom_d2_ratio)])
    }

    /// `{S0; x} = S0'''/S0' - (3/2) (S0''/S0')^2`.
    pub fn schwarzian(&self, x: f64) -> Result<f64> {
        Ok(self.phase_jet(x)?.schwarzian())
    }

    /// Quantum potential `(hbar^2 / 4m) {S0; x}`.
    pub fn quantum_potential(&self, x: f64) -> Result<f64> {
        let c = self.constants();
        Ok(c.hbar * c.hbar / (4.0 * c.mass) * self.schwarzian(x)?)
    }

    pub fn qshje_terms(&self, x: f64, potential: &Potential1D, energy: f64) -> Result<QshjeTerms> {
        let p = self.momentum(x)?;
        Ok(QshjeTerms {
            kinetic: p * p / (2.0 * self.constants().mass),
            quantum: self.quantum_potential(x)?,
            potential: potential.value(x),
            energy,
        })
    }

    /// QSHJE residual against the pair's own potential and energy.
    pub fn own_qshje_residual(&self, x: f64) -> Result<f64> {
        Ok(self
            .qshje_terms(x, self.pair.potential(), self.pair.energy())?
            .residual())
    }

    /// Lower bound `hbar |1 - g g'| |W| / max D` on `|P|` over `samples`.
    pub fn momentum_lower_bound(&self, samples: &[f64]) -> Result<f64> {
        let mut dmax: f64 = 0.0;
        for &x in samples {
            dmax = dmax.max(self.phase_jet(x)?.denom);
        }
        Ok(self.hbar() * self.rate_numerator().abs() / dmax)
    }
}

/// The four terms of the 1D QSHJE
/// `P^2/2m + (hbar^2/4m){S0; x} + V - E = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QshjeTerms {
    pub kinetic: f64,
    pub quantum: f64,
    pub potential: f64,
    pub energy: f64,
}

impl QshjeTerms {
    pub fn residual(&self) -> f64 {
        self.kinetic + self.quantum + self.potential - self.energy
    }

    /// Magnitude used to scale residuals.
    pub fn scale(&self) -> f64 {
        self.kinetic.abs() + self.quantum.abs() + self.potential.abs() + self.energy.abs()
    }
}

pub fn action_1d(action: &ReducedAction1D, x: f64) -> Result<f64> {
    action.action(x)
}

pub fn momentum_1d(action: &ReducedAction1D, x: f64) -> Result<f64> {
    action.momentum(x)
}

pub fn schwarzian(action: &ReducedAction1D, x: f64) -> Result<f64> {
    action.schwarzian(x)
}

pub fn qshje_residual_1d(
    action: &ReducedAction1D,
    potential: &Potential1D,
    energy: f64,
    x: f64,
) -> Result<f64> {
    Ok(action.qshje_terms(x, potential, energy)?.residual())
}

/// `S0(x, y, z) = S0x(x) + S0y(y) + S0z(z) + hbar lambda0`: six gammas plus
/// one additive constant.
#[derive(Clone, Debug)]
pub struct SeparableAction3D {
    axes: [ReducedAction1D; 3],
    lambda0: f64,
}

pub fn assemble_separable(
    ax: ReducedAction1D,
    ay: ReducedAction1D,
    az: ReducedAction1D,
    lambda0: f64,
) -> Result<SeparableAction3D> {
    let mut slots: [Option<ReducedAction1D>; 3] = [None, None, None];
    for a in [ax, ay, az] {
        let i = a.axis().index();
        if slots[i].is_some() {
            return Err(Error::DuplicateAxis(a.axis()));
        }
        slots[i] = Some(a);
    }
    let [x, y, z] = slots.map(|s| s.expect("three distinct axes fill all slots"));
    let c = x.constants();
    if y.constants() != c || z.constants() != c {
        return Err(Error::InvalidConstants(
            "axes use different hbar or mass".into(),
        ));
    }
    Ok(SeparableAction3D {
        axes: [x, y, z],
        lambda0,
    })
}

impl SeparableAction3D {
    /// Number of free constants: six gammas and the additive one.
    pub const CONSTANT_COUNT: usize = 7;

    pub fn axis(&self, axis: Axis) -> &ReducedAction1D {
        &self.axes[axis.index()]
    }

    pub fn axes(&self) -> &[ReducedAction1D; 3] {
        &self.axes
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    pub fn constants(&self) -> PhysicalConstants {
        self.axes[0].constants()
    }

    pub fn hbar(&self) -> f64 {
        self.constants().hbar
    }

    /// All six gammas in axis order `(g1, g2, g3, g4, g5, g6)`.
    pub fn gammas(&self) -> [f64; 6] {
        let mut g = [0.0; 6];
        for (i, a) in self.axes.iter().enumerate() {
            let (n, d) = a.gammas();
            g[2 * i] = n;
            g[2 * i + 1] = d;
        }
        g
    }

    pub fn with_axis(&self, action: ReducedAction1D) -> SeparableAction3D {
        let mut out = self.clone();
        let i = action.axis().index();
        out.axes[i] = action;
        out
    }

    pub fn value(&self, p: Point3) -> Result<f64> {
        let mut s = self.hbar() * self.lambda0;
        for (a, x) in self.axes.iter().zip(p) {
            s += a.action(x)?;
        }
        Ok(s)
    }

    /// `(dS0/dx, dS0/dy, dS0/dz)`, each depending only on its own coordinate.
    pub fn gradient(&self, p: Point3) -> Result<[f64; 3]> {
        Ok([
            self.axes[0].momentum(p[0])?,
            self.axes[1].momentum(p[1])?,
            self.axes[2].momentum(p[2])?,
        ])
    }

    /// Residuals of the three 1D QSHJEs, each against its own potential and
    /// the matching entry of `energies`.
    pub fn qshje_residuals(&self, p: Point3, energies: [f64; 3]) -> Result<[f64; 3]> {
        let mut out = [0.0; 3];
        for i in 0..3 {
            let a = &self.axes[i];
            out[i] = a
                .qshje_terms(p[i], a.pair().potential(), energies[i])?
                .residual();
        }
        Ok(out)
    }

    pub fn contains(&self, p: Point3) -> bool {
        self.axes
            .iter()
            .zip(p)
            .all(|(a, x)| a.pair().domain().contains(x))
    }
}

/// Complex weights of `R (alpha e^{iS0/hbar} + beta e^{-iS0/hbar})`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WaveParameters {
    alpha: Complex64,
    beta: Complex64,
}

impl WaveParameters {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        if alpha == Complex64::new(0.0, 0.0) && beta == Complex64::new(0.0, 0.0) {
            return Err(Error::ZeroWaveParameters);
        }
        Ok(WaveParameters { alpha, beta })
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }
}

/// Polar combination `r (alpha e^{i s/hbar} + beta e^{-i s/hbar})`.
pub fn polar_wavefunction(r: f64, s: f64, hbar: f64, wp: &WaveParameters) -> Complex64 {
    let e = Complex64::from_polar(1.0, s / hbar);
    (wp.alpha * e + wp.beta * e.inv()) * r
}

/// Constants `a', b', c', d'` of the two wavefunctions
/// `psi1 ~ a' e^{iS/hbar} + b' e^{-iS/hbar}`, `psi2 ~ c' e^{iS/hbar} + d' e^{-iS/hbar}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RecoveryConstants {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl RecoveryConstants {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let det = a * d - b * c;
        if det.norm() < 1e-14 {
            return Err(Error::SingularRecovery);
        }
        Ok(RecoveryConstants { a, b, c, d })
    }

    /// `psi1 <-> psi2`
    pub fn swapped(&self) -> RecoveryConstants {
        RecoveryConstants {
            a: self.c,
            b: self.d,
            c: self.a,
            d: self.b,
        }
    }
}

/// The two wavefunctions attached to a separable action:
///
/// ```text
/// psi1 = -hbar^2 |dS0/dx|^{-1/2} f(y, z) (a' e^{iS0/hbar} + b' e^{-iS0/hbar})
/// psi2 = -hbar^2 |dS0/dx|^{-1/2} f(y, z) (c' e^{iS0/hbar} + d' e^{-iS0/hbar})
/// ```
///
/// with `f(y, z) = k |dS0/dy dS0/dz|^{-1/2}`.
#[derive(Clone, Debug)]
pub struct FmWavefunctions {
    action: SeparableAction3D,
    rec: RecoveryConstants,
    k_norm: f64,
}

pub fn fm_wavefunctions(
    action: &SeparableAction3D,
    rec: RecoveryConstants,
    k_norm: f64,
) -> FmWavefunctions {
    FmWavefunctions {
        action: action.clone(),
        rec,
        k_norm,
    }
}

impl FmWavefunctions {
    fn parts(&self, p: Point3) -> Result<(f64, Complex64)> {
        let grad = self.action.gradient(p)?;
        let hbar = self.action.hbar();
        let amp = -hbar * hbar * self.k_norm
            / (grad[0].abs() * grad[1].abs() * grad[2].abs()).sqrt();
        let e = Complex64::from_polar(1.0, self.action.value(p)? / hbar);
        Ok((amp, e))
    }

    pub fn psi1(&self, p: Point3) -> Result<Complex64> {
        let (amp, e) = self.parts(p)?;
        Ok((self.rec.a * e + self.rec.b * e.inv()) * amp)
    }

    pub fn psi2(&self, p: Point3) -> Result<Complex64> {
        let (amp, e) = self.parts(p)?;
        Ok((self.rec.c * e + self.rec.d * e.inv()) * amp)
    }

    pub fn constants(&self) -> RecoveryConstants {
        self.rec
    }

    pub fn action(&self) -> &SeparableAction3D {
        &self.action
    }
}

/// `(hbar / 2i) ln[(-d' psi1 + b' psi2) / (c' psi1 - a' psi2)]` as a complex
/// number; its real part is the action modulo `pi hbar`.
pub fn recover_action_complex(
    psi1: Complex64,
    psi2: Complex64,
    rec: &RecoveryConstants,
    hbar: f64,
) -> Result<Complex64> {
    let den = rec.c * psi1 - rec.a * psi2;
    if den.norm() < 1e-12 {
        return Err(Error::DegeneratePoint {
            magnitude: den.norm(),
        });
    }
    let num = -rec.d * psi1 + rec.b * psi2;
    Ok((num / den).ln() * Complex64::new(0.0, -0.5 * hbar))
}

/// Real action recovered from two wavefunction evaluators at `p`, in
/// `(-pi hbar / 2, pi hbar / 2]`.
pub fn recover_action<F1, F2>(
    psi1: F1,
    psi2: F2,
    rec: &RecoveryConstants,
    hbar: f64,
    p: Point3,
) -> Result<f64>
where
    F1: Fn(Point3) -> Result<Complex64>,
    F2: Fn(Point3) -> Result<Complex64>,
{
    Ok(recover_action_complex(psi1(p)?, psi2(p)?, rec, hbar)?.re)
}
