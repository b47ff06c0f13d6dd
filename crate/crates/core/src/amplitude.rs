//! Wavefunction amplitude `R = k prod_i |dS0/dx_i|^(-1/2)` and the checks
//! built on it: current conservation per axis, separability of `R`, and
//! comparison of the polar wavefunction with products of 1D solutions.

use std::io::{self, Write};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::reduced_action::{polar_wavefunction, SeparableAction3D, WaveParameters};
use crate::schrodinger1d::SolutionPair;
use crate::stencil;
use crate::tensor_reduction::flat_index;
use crate::{Axis, Error, Point3, Result};

#[derive(Clone, Debug)]
pub struct Amplitude3D {
    action: SeparableAction3D,
    k_norm: f64,
}

impl Amplitude3D {
    pub fn new(action: SeparableAction3D, k_norm: f64) -> Result<Self> {
        if !(k_norm > 0.0 && k_norm.is_finite()) {
            return Err(Error::InvalidConstants(format!("k_norm must be positive, got {k_norm}")));
        }
        Ok(Amplitude3D { action, k_norm })
    }

    pub fn action(&self) -> &SeparableAction3D {
        &self.action
    }

    pub fn k_norm(&self) -> f64 {
        self.k_norm
    }

    /// `|P_axis(x)|^(-1/2)`
    pub fn axis_factor(&self, axis: Axis, x: f64) -> Result<f64> {
        Ok(self.action.axis(axis).momentum(x)?.abs().powf(-0.5))
    }

    pub fn amplitude_at(&self, p: Point3) -> Result<f64> {
        let mut r = self.k_norm;
        for axis in Axis::ALL {
            r *= self.axis_factor(axis, p[axis.index()])?;
        }
        Ok(r)
    }

    /// `R (alpha e^{iS0/hbar} + beta e^{-iS0/hbar})`
    pub fn build_wavefunction(&self, wp: &WaveParameters, p: Point3) -> Result<Complex64> {
        Ok(polar_wavefunction(
            self.amplitude_at(p)?,
            self.action.value(p)?,
            self.action.hbar(),
            wp,
        ))
    }

    /// `d/dx_i (R^2 dS0/dx_i)` by a five-point stencil of step `h`, relative
    /// to `|R^2 dS0/dx_i|` at the point.
    pub fn current_residual(&self, axis: Axis, p: Point3, h: f64) -> Result<f64> {
        current_residual_with(|q| self.amplitude_at(q), &self.action, axis, p, h)
    }

    /// Residual of the 1D Schrödinger equation along `axis` for the built
    /// wavefunction, using that axis' potential and energy, relative to the
    /// size of its terms.
    pub fn schrodinger_residual(&self, wp: &WaveParameters, axis: Axis, p: Point3, h: f64) -> Result<f64> {
        let i = axis.index();
        let pair = self.action.axis(axis).pair();
        check_stencil(pair, p[i], h)?;
        let psi_along = |t: f64| {
            let mut q = p;
            q[i] = t;
            self.build_wavefunction(wp, q)
        };
        let re = stencil::try_d2(|t| psi_along(t).map(|z| z.re), p[i], h)?;
        let im = stencil::try_d2(|t| psi_along(t).map(|z| z.im), p[i], h)?;
        let d2 = Complex64::new(re, im);
        let psi = psi_along(p[i])?;
        let c = pair.constants();
        let kin = c.hbar * c.hbar / (2.0 * c.mass);
        let v = pair.potential().value(p[i]);
        let e = pair.energy();
        let res = -d2 * kin + psi * (v - e);
        let scale = kin * d2.norm() + (v.abs() + e.abs()) * psi.norm();
        Ok(res.norm() / scale.max(f64::MIN_POSITIVE))
    }

    /// Writes `x,y,z,re_psi,im_psi,r,s0` rows for the given points.
    pub fn write_grid_csv<W: Write>(&self, wp: &WaveParameters, points: &[Point3], mut out: W) -> io::Result<()> {
        writeln!(out, "x,y,z,re_psi,im_psi,r,s0")?;
        for &p in points {
            let psi = self.build_wavefunction(wp, p).map_err(io::Error::other)?;
            let r = self.amplitude_at(p).map_err(io::Error::other)?;
            let s = self.action.value(p).map_err(io::Error::other)?;
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                p[0], p[1], p[2], psi.re, psi.im, r, s
            )?;
        }
        Ok(())
    }
}

fn check_stencil(pair: &SolutionPair, x: f64, h: f64) -> Result<()> {
    let d = pair.domain();
    if !(d.contains(x - 2.0 * h) && d.contains(x + 2.0 * h)) {
        return Err(Error::StencilOutOfDomain { x });
    }
    Ok(())
}

/// Current residual for an arbitrary amplitude function, so that broken
/// amplitudes can be checked against the same action.
pub fn current_residual_with<F>(amplitude: F, action: &SeparableAction3D, axis: Axis, p: Point3, h: f64) -> Result<f64>
where
    F: Fn(Point3) -> Result<f64>,
{
    let i = axis.index();
    let a = action.axis(axis);
    check_stencil(a.pair(), p[i], h)?;
    let flux = |t: f64| -> Result<f64> {
        let mut q = p;
        q[i] = t;
        let r = amplitude(q)?;
        Ok(r * r * a.momentum(t)?)
    };
    let d = stencil::try_d1(flux, p[i], h)?;
    Ok(d.abs() / flux(p[i])?.abs())
}

pub fn amplitude_at(amp: &Amplitude3D, p: Point3) -> Result<f64> {
    amp.amplitude_at(p)
}

pub fn current_residual(amp: &Amplitude3D, axis: Axis, p: Point3, h: f64) -> Result<f64> {
    amp.current_residual(axis, p, h)
}

pub fn build_wavefunction(amp: &Amplitude3D, wp: &WaveParameters, p: Point3) -> Result<Complex64> {
    amp.build_wavefunction(wp, p)
}

/// `sum a_ijk Xi(x) Yj(y) Zk(z)` with real coefficients.
#[derive(Clone, Debug)]
pub struct WavefunctionProduct {
    coeffs: [f64; 8],
    pairs: [SolutionPair; 3],
}

impl WavefunctionProduct {
    /// `pairs` are given in x, y, z order.
    pub fn new(coeffs: [f64; 8], pairs: [SolutionPair; 3]) -> Result<Self> {
        if coeffs.iter().all(|&c| c == 0.0) {
            return Err(Error::DegenerateTensor);
        }
        for (i, p) in pairs.iter().enumerate() {
            if p.axis() != Axis::ALL[i] {
                return Err(Error::DuplicateAxis(p.axis()));
            }
        }
        Ok(WavefunctionProduct { coeffs, pairs })
    }

    pub fn coefficients(&self) -> &[f64; 8] {
        &self.coeffs
    }

    /// The eight products `Xi Yj Zk` at `p`, in flat index order.
    pub fn basis(&self, p: Point3) -> Result<[f64; 8]> {
        let v: [[f64; 2]; 3] = [
            [self.pairs[0].x1(p[0])?, self.pairs[0].x2(p[0])?],
            [self.pairs[1].x1(p[1])?, self.pairs[1].x2(p[1])?],
            [self.pairs[2].x1(p[2])?, self.pairs[2].x2(p[2])?],
        ];
        let mut out = [0.0; 8];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    out[flat_index(i, j, k)] = v[0][i] * v[1][j] * v[2][k];
                }
            }
        }
        Ok(out)
    }

    pub fn value(&self, p: Point3) -> Result<f64> {
        Ok(self.basis(p)?.iter().zip(&self.coeffs).map(|(b, c)| b * c).sum())
    }
}

/// Result of comparing a polar wavefunction with product solutions.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductComparison {
    /// relative residual of the best complex combination of the eight products
    pub span_residual: f64,
    /// fitted complex coefficients, flat index order
    pub coefficients: [Complex64; 8],
    /// relative residual of the given product after the best complex scale
    pub product_residual: f64,
    pub condition: f64,
}

pub const MIN_PRODUCT_SAMPLES: usize = 16;

/// Least-squares fit of the built wavefunction against the product basis on
/// the sample points.
pub fn compare_to_product(
    amp: &Amplitude3D,
    wp: &WaveParameters,
    prod: &WavefunctionProduct,
    samples: &[Point3],
) -> Result<ProductComparison> {
    if samples.len() < MIN_PRODUCT_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: MIN_PRODUCT_SAMPLES,
            got: samples.len(),
        });
    }
    let n = samples.len();
    let mut basis = DMatrix::<f64>::zeros(n, 8);
    let mut psi = Vec::with_capacity(n);
    let mut given = Vec::with_capacity(n);
    for (r, &p) in samples.iter().enumerate() {
        let b = prod.basis(p)?;
        for c in 0..8 {
            basis[(r, c)] = b[c];
        }
        psi.push(amp.build_wavefunction(wp, p)?);
        given.push(prod.value(p)?);
    }

    let svd = basis.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition < 1e10) {
        return Err(Error::IllConditionedFit { condition });
    }
    let re = DVector::from_iterator(n, psi.iter().map(|z| z.re));
    let im = DVector::from_iterator(n, psi.iter().map(|z| z.im));
    let solve = |rhs: &DVector<f64>| {
        svd.solve(rhs, 0.0)
            .map_err(|_| Error::IllConditionedFit { condition })
    };
    let cr = solve(&re)?;
    let ci = solve(&im)?;
    let coefficients: [Complex64; 8] = std::array::from_fn(|c| Complex64::new(cr[c], ci[c]));

    let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let fit_re = &basis * &cr;
    let fit_im = &basis * &ci;
    let span_err: f64 = (0..n)
        .map(|r| (psi[r] - Complex64::new(fit_re[r], fit_im[r])).norm_sqr())
        .sum::<f64>()
        .sqrt();

    // best complex z for psi ~ z * given
    let gg: f64 = given.iter().map(|g| g * g).sum();
    let z: Complex64 = psi.iter().zip(&given).map(|(p, g)| p * *g).sum::<Complex64>() / gg.max(f64::MIN_POSITIVE);
    let prod_err: f64 = psi
        .iter()
        .zip(&given)
        .map(|(p, g)| (p - z * *g).norm_sqr())
        .sum::<f64>()
        .sqrt();

    Ok(ProductComparison {
        span_residual: span_err / norm,
        coefficients,
        product_residual: prod_err / norm,
        condition,
    })
}
