//! Reduced quantum actions for cartesian-separable potentials.
//!
//! The crate builds 1D reduced actions `S0 = hbar * arctan((X1 + g1 X2) / (g2 X1 + X2))`
//! from pairs of independent Schrödinger solutions, assembles them into a
//! separable 3D action, checks the quantum stationary Hamilton-Jacobi equation
//! (QSHJE) and current conservation numerically, reduces the 16-coefficient
//! arctan form back to six constants, and integrates quantum trajectories
//! through classical turning points.
//!
//! Module map:
//! - [`schrodinger1d`]: potentials, solution pairs (closed form or Numerov)
//! - [`reduced_action`]: 1D/3D reduced actions, Schwarzian, QSHJE residuals,
//!   wavefunction construction and action recovery
//! - [`tensor_reduction`]: the 2x2x2 tensor form, gamma expansion and fitting
//! - [`amplitude`]: amplitude `R`, current conservation, product comparison
//! - [`dynamics`]: quantum law of motion, metric factor, trajectories
//! - [`cli`]: scenario files, verification reports and file outputs

pub mod amplitude;
pub mod cli;
pub mod dynamics;
mod error;
pub mod reduced_action;
pub mod schrodinger1d;
pub mod stencil;
pub mod tensor_reduction;

pub use error::{Error, Result};

use std::fmt;

/// A point in configuration space, `(x, y, z)`.
pub type Point3 = [f64; 3];

/// Cartesian axis label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }

    pub fn from_label(s: &str) -> Option<Axis> {
        match s {
            "x" | "X" => Some(Axis::X),
            "y" | "Y" => Some(Axis::Y),
            "z" | "Z" => Some(Axis::Z),
            _ => None,
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Closed interval `[lo, hi]` with `lo < hi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
            return Err(Error::EmptyDomain { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    fn slack(&self) -> f64 {
        1e-12 * (1.0 + self.lo.abs().max(self.hi.abs()))
    }

    pub fn contains(&self, x: f64) -> bool {
        let s = self.slack();
        x >= self.lo - s && x <= self.hi + s
    }

    /// `n` equally spaced points including both endpoints.
    pub fn linspace(&self, n: usize) -> Vec<f64> {
        match n {
            0 => Vec::new(),
            1 => vec![self.midpoint()],
            _ => (0..n)
                .map(|i| self.lo + self.width() * i as f64 / (n - 1) as f64)
                .collect(),
        }
    }

    /// Same as [`Interval::linspace`] but shrunk by `margin` on both sides.
    pub fn interior(&self, n: usize, margin: f64) -> Vec<f64> {
        Interval {
            lo: self.lo + margin,
            hi: self.hi - margin,
        }
        .linspace(n)
    }
}

/// Value of a real function together with its first two derivatives.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub fn new(value: f64, d1: f64, d2: f64) -> Self {
        Jet { value, d1, d2 }
    }

    pub fn scale(self, s: f64) -> Jet {
        Jet::new(s * self.value, s * self.d1, s * self.d2)
    }

    /// `a * self + b * other`
    pub fn combine(self, a: f64, other: Jet, b: f64) -> Jet {
        Jet::new(
            a * self.value + b * other.value,
            a * self.d1 + b * other.d1,
            a * self.d2 + b * other.d2,
        )
    }
}
