//! The sixteen-coefficient action
//!
//! ```text
//! S0(x, y, z) = hbar arctan( sum a_ijk Xi Yj Zk / sum b_ijk Xi Yj Zk ) + hbar lambda0
//! ```
//!
//! its relation to the separable six-constant family, and the inverse fit.
//!
//! Tensors are stored flat with index `i * 4 + j * 2 + k` (0-based), so
//! `a[0]` is `a_111` and `a[7]` is `a_222`.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_4, PI};

use nalgebra::{SMatrix, SVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::reduced_action::{Orientation, PhaseJet, QshjeTerms};
use crate::schrodinger1d::SolutionPair;
use crate::{Axis, Error, Jet, Point3, Result};

pub fn flat_index(i: usize, j: usize, k: usize) -> usize {
    i * 4 + j * 2 + k
}

/// Pair of 2x2x2 coefficient tensors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorCoefficients {
    pub a: [f64; 8],
    pub b: [f64; 8],
}

impl TensorCoefficients {
    /// `values` holds the eight `a` entries followed by the eight `b` entries.
    pub fn from_flat(values: [f64; 16]) -> Self {
        let mut a = [0.0; 8];
        let mut b = [0.0; 8];
        a.copy_from_slice(&values[..8]);
        b.copy_from_slice(&values[8..]);
        TensorCoefficients { a, b }
    }

    pub fn to_flat(&self) -> [f64; 16] {
        let mut out = [0.0; 16];
        out[..8].copy_from_slice(&self.a);
        out[8..].copy_from_slice(&self.b);
        out
    }

    pub fn scaled(&self, s: f64) -> Self {
        TensorCoefficients {
            a: self.a.map(|v| v * s),
            b: self.b.map(|v| v * s),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().chain(&self.b).all(|&v| v == 0.0)
    }

    /// Entry used as the gauge: the largest-magnitude entry of `b`, or of `a`
    /// when `b` vanishes. Returns its flat index in `to_flat` order.
    pub fn gauge_index(&self) -> Result<usize> {
        let argmax = |v: &[f64; 8]| {
            let mut best = 0;
            for i in 1..8 {
                if v[i].abs() > v[best].abs() {
                    best = i;
                }
            }
            best
        };
        let ib = argmax(&self.b);
        if self.b[ib] != 0.0 {
            return Ok(8 + ib);
        }
        let ia = argmax(&self.a);
        if self.a[ia] != 0.0 {
            return Ok(ia);
        }
        Err(Error::DegenerateTensor)
    }

    /// Jointly scaled so that the gauge entry equals 1.
    pub fn normalized(&self) -> Result<Self> {
        let g = self.to_flat()[self.gauge_index()?];
        Ok(self.scaled(1.0 / g))
    }

    /// Sum of `a` and `b` contracted with per-axis vectors.
    fn contract(&self, x: [f64; 2], y: [f64; 2], z: [f64; 2]) -> (f64, f64) {
        let mut n = 0.0;
        let mut d = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    let w = x[i] * y[j] * z[k];
                    n += self.a[flat_index(i, j, k)] * w;
                    d += self.b[flat_index(i, j, k)] * w;
                }
            }
        }
        (n, d)
    }
}

fn outer(x: [f64; 2], y: [f64; 2], z: [f64; 2]) -> [f64; 8] {
    let mut t = [0.0; 8];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                t[flat_index(i, j, k)] = x[i] * y[j] * z[k];
            }
        }
    }
    t
}

/// Three-angle tangent addition with `tan S_i = n_i . X / d_i . X`:
/// numerator `A + B + C - ABC`, denominator `1 - AB - BC - CA`, cleared.
fn tangent_sum(n: [[f64; 2]; 3], d: [[f64; 2]; 3]) -> TensorCoefficients {
    let mut a = [0.0; 8];
    let mut b = [0.0; 8];
    let terms_a = [
        (1.0, outer(n[0], d[1], d[2])),
        (1.0, outer(d[0], n[1], d[2])),
        (1.0, outer(d[0], d[1], n[2])),
        (-1.0, outer(n[0], n[1], n[2])),
    ];
    let terms_b = [
        (1.0, outer(d[0], d[1], d[2])),
        (-1.0, outer(n[0], n[1], d[2])),
        (-1.0, outer(d[0], n[1], n[2])),
        (-1.0, outer(n[0], d[1], n[2])),
    ];
    for (s, t) in terms_a {
        for i in 0..8 {
            a[i] += s * t[i];
        }
    }
    for (s, t) in terms_b {
        for i in 0..8 {
            b[i] += s * t[i];
        }
    }
    TensorCoefficients { a, b }
}

fn axis_vectors(g: &[f64; 6], signs: [f64; 3]) -> ([[f64; 2]; 3], [[f64; 2]; 3]) {
    let mut n = [[0.0; 2]; 3];
    let mut d = [[0.0; 2]; 3];
    for i in 0..3 {
        n[i] = [signs[i], signs[i] * g[2 * i]];
        d[i] = [g[2 * i + 1], 1.0];
    }
    (n, d)
}

fn check_gammas(g: &[f64; 6]) -> Result<()> {
    for (i, axis) in Axis::ALL.iter().enumerate() {
        let det = 1.0 - g[2 * i] * g[2 * i + 1];
        if !(g[2 * i].is_finite() && g[2 * i + 1].is_finite()) || det.abs() < 1e-14 {
            return Err(Error::DegenerateGammas {
                axis: *axis,
                value: det,
            });
        }
    }
    Ok(())
}

/// Tensors whose action equals the separable sum with all orientations `+`,
/// modulo `pi hbar`.
pub fn expand_gammas(g: [f64; 6]) -> Result<TensorCoefficients> {
    expand_gammas_oriented(g, [Orientation::Positive; 3])
}

pub fn expand_gammas_oriented(g: [f64; 6], orientation: [Orientation; 3]) -> Result<TensorCoefficients> {
    check_gammas(&g)?;
    let (n, d) = axis_vectors(&g, orientation.map(Orientation::sign));
    Ok(tangent_sum(n, d))
}

/// A tensor action over three solution pairs. Values are continued along the
/// straight segment from the anchors of the pairs.
#[derive(Clone, Debug)]
pub struct TensorAction {
    coeffs: TensorCoefficients,
    pairs: [SolutionPair; 3],
    additive: f64,
    base: Point3,
    base_theta: f64,
}

impl TensorAction {
    pub fn new(coeffs: TensorCoefficients, pairs: [SolutionPair; 3], additive: f64) -> Result<Self> {
        if coeffs.is_zero() {
            return Err(Error::DegenerateTensor);
        }
        let mut slots: [Option<SolutionPair>; 3] = [None, None, None];
        for p in pairs {
            let i = p.axis().index();
            if slots[i].is_some() {
                return Err(Error::DuplicateAxis(p.axis()));
            }
            slots[i] = Some(p);
        }
        let pairs = slots.map(|s| s.expect("three distinct axes fill all slots"));
        let c = pairs[0].constants();
        if pairs[1].constants() != c || pairs[2].constants() != c {
            return Err(Error::InvalidConstants("axes use different hbar or mass".into()));
        }
        let base = [pairs[0].anchor(), pairs[1].anchor(), pairs[2].anchor()];
        let mut t = TensorAction {
            coeffs,
            pairs,
            additive,
            base,
            base_theta: 0.0,
        };
        let (n, d) = t.nd(base)?;
        t.base_theta = if d == 0.0 { n.signum() * 0.5 * PI } else { (n / d).atan() };
        Ok(t)
    }

    pub fn coefficients(&self) -> &TensorCoefficients {
        &self.coeffs
    }

    pub fn pairs(&self) -> &[SolutionPair; 3] {
        &self.pairs
    }

    pub fn additive(&self) -> f64 {
        self.additive
    }

    pub fn hbar(&self) -> f64 {
        self.pairs[0].constants().hbar
    }

    fn jets(&self, p: Point3) -> Result<[[Jet; 2]; 3]> {
        Ok([self.pairs[0].eval(p[0])?, self.pairs[1].eval(p[1])?, self.pairs[2].eval(p[2])?])
    }

    fn nd(&self, p: Point3) -> Result<(f64, f64)> {
        let j = self.jets(p)?;
        let v = |a: [Jet; 2]| [a[0].value, a[1].value];
        Ok(self.coeffs.contract(v(j[0]), v(j[1]), v(j[2])))
    }

    /// Numerator and denominator as functions of one coordinate, with the
    /// other two held fixed. Both solve that axis' Schrodinger equation.
    fn axis_jets(&self, p: Point3, axis: usize) -> Result<(Jet, Jet)> {
        let j = self.jets(p)?;
        let v = |a: [Jet; 2]| [a[0].value, a[1].value];
        let mut vecs = [v(j[0]), v(j[1]), v(j[2])];
        let mut out = [[0.0; 2]; 3];
        for (slot, pick) in out.iter_mut().zip([0usize, 1, 2]) {
            // value, first and second derivative along `axis`
            vecs[axis] = match pick {
                0 => [j[axis][0].value, j[axis][1].value],
                1 => [j[axis][0].d1, j[axis][1].d1],
                _ => [j[axis][0].d2, j[axis][1].d2],
            };
            let (n, d) = self.coeffs.contract(vecs[0], vecs[1], vecs[2]);
            *slot = [n, d];
        }
        Ok((
            Jet::new(out[0][0], out[1][0], out[2][0]),
            Jet::new(out[0][1], out[1][1], out[2][1]),
        ))
    }

    /// `hbar arctan(N/D) + hbar lambda0` on the principal branch.
    pub fn principal(&self, p: Point3) -> Result<f64> {
        let (n, d) = self.nd(p)?;
        if d == 0.0 {
            return Err(Error::DenominatorZero { point: p });
        }
        Ok(self.hbar() * ((n / d).atan() + self.additive))
    }

    /// Branch-continuous value, continued from the base point.
    pub fn value(&self, p: Point3) -> Result<f64> {
        let (_, d) = self.nd(p)?;
        if d == 0.0 {
            return Err(Error::DenominatorZero { point: p });
        }
        Ok(self.hbar() * (self.continued_theta(p)? + self.additive))
    }

    fn theta_rate(&self, p: Point3, dir: [f64; 3]) -> Result<f64> {
        let g = self.theta_gradient(p)?;
        Ok(g[0] * dir[0] + g[1] * dir[1] + g[2] * dir[2])
    }

    fn continued_theta(&self, p: Point3) -> Result<f64> {
        let dir = [p[0] - self.base[0], p[1] - self.base[1], p[2] - self.base[2]];
        let at = |t: f64| [self.base[0] + t * dir[0], self.base[1] + t * dir[1], self.base[2] + t * dir[2]];
        let phase = |t: f64| -> Result<f64> {
            let (n, d) = self.nd(at(t))?;
            Ok(n.atan2(d))
        };
        let mut theta = self.base_theta;
        let mut phi_prev = phase(0.0)?;
        let mut stack: Vec<(f64, f64, u32)> = Vec::new();
        const SEGMENTS: usize = 16;
        for s in (0..SEGMENTS).rev() {
            stack.push((s as f64 / SEGMENTS as f64, (s + 1) as f64 / SEGMENTS as f64, 0));
        }
        while let Some((t0, t1, depth)) = stack.pop() {
            let est = {
                let mut acc = 0.0;
                for (x, w) in GL3 {
                    let t = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * x;
                    acc += w * self.theta_rate(at(t), dir)?;
                }
                0.5 * (t1 - t0) * acc
            };
            let phi1 = phase(t1)?;
            let raw = phi1 - phi_prev;
            let wrapped = raw - 2.0 * PI * (raw / (2.0 * PI)).round();
            if depth < 40 && (est.abs() > FRAC_PI_4 || wrapped.abs() > FRAC_PI_4) {
                let m = 0.5 * (t0 + t1);
                stack.push((m, t1, depth + 1));
                stack.push((t0, m, depth + 1));
                continue;
            }
            theta += raw + 2.0 * PI * ((est - raw) / (2.0 * PI)).round();
            phi_prev = phi1;
        }
        Ok(theta)
    }

    /// Gradient of `arctan(N/D)` (without the factor `hbar`).
    fn theta_gradient(&self, p: Point3) -> Result<[f64; 3]> {
        let mut g = [0.0; 3];
        for (i, gi) in g.iter_mut().enumerate() {
            let (u, v) = self.axis_jets(p, i)?;
            *gi = (u.d1 * v.value - u.value * v.d1) / (u.value * u.value + v.value * v.value);
        }
        Ok(g)
    }

    pub fn gradient(&self, p: Point3) -> Result<[f64; 3]> {
        Ok(self.theta_gradient(p)?.map(|g| g * self.hbar()))
    }

    /// Terms of the 1D QSHJE along `axis` at `p`, other coordinates fixed.
    pub fn qshje_terms(&self, p: Point3, axis: Axis, energy: f64) -> Result<QshjeTerms> {
        let i = axis.index();
        let (u, v) = self.axis_jets(p, i)?;
        let pj = PhaseJet::new(u, v);
        let c = self.pairs[i].constants();
        let mom = c.hbar * pj.cross / pj.denom;
        Ok(QshjeTerms {
            kinetic: mom * mom / (2.0 * c.mass),
            quantum: c.hbar * c.hbar / (4.0 * c.mass) * pj.schwarzian(),
            potential: self.pairs[i].potential().value(p[i]),
            energy,
        })
    }

    pub fn qshje_residuals(&self, p: Point3, energies: [f64; 3]) -> Result<[f64; 3]> {
        let mut out = [0.0; 3];
        for (i, axis) in Axis::ALL.iter().enumerate() {
            out[i] = self.qshje_terms(p, *axis, energies[i])?.residual();
        }
        Ok(out)
    }
}

// 3-point Gauss-Legendre on [-1, 1]
const GL3: [(f64, f64); 3] = [
    (-0.774_596_669_241_483_4, 5.0 / 9.0),
    (0.0, 8.0 / 9.0),
    (0.774_596_669_241_483_4, 5.0 / 9.0),
];

pub fn eval_tensor_action(t: &TensorAction, p: Point3) -> Result<f64> {
    t.value(p)
}

/// Settings for the inverse fit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub restarts: usize,
    pub seed: u64,
    pub threshold: f64,
    pub max_iter: usize,
    /// starts are drawn uniformly from `[-range, range]`
    pub range: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            restarts: 20,
            seed: 0,
            threshold: 1e-7,
            max_iter: 200,
            range: 3.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum FitVerdict {
    Separable {
        gammas: [f64; 6],
        /// additive phase `arg z`, the part of `lambda0` the tensor fixes
        phase: f64,
    },
    NotSeparable,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitReport {
    pub verdict: FitVerdict,
    /// sup over normalized entries of fitted minus target
    pub residual: f64,
    pub best_start: usize,
    pub starts: usize,
    /// starts whose residual fell below the threshold
    pub accepted_starts: usize,
    pub iterations: usize,
}

impl FitReport {
    pub fn is_separable(&self) -> bool {
        matches!(self.verdict, FitVerdict::Separable { .. })
    }

    pub fn gammas(&self) -> Option<[f64; 6]> {
        match self.verdict {
            FitVerdict::Separable { gammas, .. } => Some(gammas),
            FitVerdict::NotSeparable => None,
        }
    }
}

type Params = SVector<f64, 8>;
type Jac = SMatrix<f64, 16, 8>;

struct Fit {
    params: Params,
    residual: f64,
    iterations: usize,
}

/// `z * (b + i a)` with `z = zr + i zi`, as the 16 real entries `(a, b)`.
fn fitted(m: &TensorCoefficients, zr: f64, zi: f64) -> [f64; 16] {
    let mut out = [0.0; 16];
    for i in 0..8 {
        out[i] = zr * m.a[i] + zi * m.b[i];
        out[8 + i] = zr * m.b[i] - zi * m.a[i];
    }
    out
}

fn residual_and_jacobian(p: &Params, signs: [f64; 3], target: &[f64; 16]) -> (SVector<f64, 16>, Jac) {
    let g = [p[0], p[1], p[2], p[3], p[4], p[5]];
    let (zr, zi) = (p[6], p[7]);
    let (n, d) = axis_vectors(&g, signs);
    let m = tangent_sum(n, d);
    let f = fitted(&m, zr, zi);
    let r = SVector::<f64, 16>::from_fn(|i, _| f[i] - target[i]);
    let mut jac = Jac::zeros();
    // each term holds exactly one of n_i, d_i, so m is linear in (n_i, d_i)
    for axis in 0..3 {
        let zero = [0.0, 0.0];
        let mut nn = n;
        let mut dd = d;
        nn[axis] = [0.0, signs[axis]];
        dd[axis] = zero;
        let dg_odd = fitted(&tangent_sum(nn, dd), zr, zi);
        nn[axis] = zero;
        dd[axis] = [1.0, 0.0];
        let dg_even = fitted(&tangent_sum(nn, dd), zr, zi);
        for i in 0..16 {
            jac[(i, 2 * axis)] = dg_odd[i];
            jac[(i, 2 * axis + 1)] = dg_even[i];
        }
    }
    let dzr = fitted(&m, 1.0, 0.0);
    let dzi = fitted(&m, 0.0, 1.0);
    for i in 0..16 {
        jac[(i, 6)] = dzr[i];
        jac[(i, 7)] = dzi[i];
    }
    (r, jac)
}

fn levenberg_marquardt(start: [f64; 6], signs: [f64; 3], target: &[f64; 16], max_iter: usize) -> Fit {
    // optimal complex scale for the starting gammas
    let (n, d) = axis_vectors(&start, signs);
    let m = tangent_sum(n, d);
    let (mut num_r, mut num_i, mut den) = (0.0, 0.0, 0.0);
    for i in 0..8 {
        // conj(b + i a) * (tb + i ta)
        let (mb, ma, tb, ta) = (m.b[i], m.a[i], target[8 + i], target[i]);
        num_r += mb * tb + ma * ta;
        num_i += mb * ta - ma * tb;
        den += mb * mb + ma * ma;
    }
    let den = den.max(1e-300);
    let mut p = Params::from_column_slice(&[
        start[0], start[1], start[2], start[3], start[4], start[5], num_r / den, num_i / den,
    ]);
    let (mut r, mut jac) = residual_and_jacobian(&p, signs, target);
    let mut cost = r.norm_squared();
    let mut mu = 1e-3;
    let mut iterations = 0;
    while iterations < max_iter && cost > 1e-30 {
        iterations += 1;
        let jt = jac.transpose();
        let a = jt * jac;
        let g = jt * r;
        let mut improved = false;
        while mu < 1e16 {
            let mut damped = a;
            for i in 0..8 {
                damped[(i, i)] += mu * a[(i, i)].max(1e-12);
            }
            let Some(step) = damped.cholesky().map(|c| c.solve(&(-g))) else {
                mu *= 10.0;
                continue;
            };
            let trial = p + step;
            let (rt, jt_new) = residual_and_jacobian(&trial, signs, target);
            let ct = rt.norm_squared();
            if ct.is_finite() && ct < cost {
                let small = step.norm() < 1e-15 * (1.0 + p.norm());
                p = trial;
                r = rt;
                jac = jt_new;
                cost = ct;
                mu = (mu * 0.3).max(1e-15);
                improved = !small;
                break;
            }
            mu *= 10.0;
        }
        if !improved {
            break;
        }
    }
    Fit {
        params: p,
        residual: r.amax(),
        iterations,
    }
}

/// Fit the six gammas (with positive orientations) and a complex scale to a
/// tensor pair. Starts run in parallel; the smallest residual wins, ties go
/// to the lower start index.
///
/// With `c = b + i a`, an expanded tensor is the rank-one product of
/// `(g_even + i, 1 + i g_odd)` over the axes, times a complex scale. A
/// negative orientation on an axis is the same function up to a constant as
/// a positive one with other gammas, so only positive orientations are fitted.
pub fn fit_gammas(t: &TensorCoefficients, opts: &FitOptions) -> Result<FitReport> {
    let target = t.normalized()?.to_flat();
    let signs = [1.0; 3];
    let fits: Vec<Fit> = (0..opts.restarts)
        .into_par_iter()
        .map(|idx| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(idx as u64);
            let start: [f64; 6] = std::array::from_fn(|_| rng.gen_range(-opts.range..=opts.range));
            levenberg_marquardt(start, signs, &target, opts.max_iter)
        })
        .collect();

    let mut best = 0;
    for (i, f) in fits.iter().enumerate() {
        if f.residual < fits[best].residual {
            best = i;
        }
    }
    let accepted_starts = fits.iter().filter(|f| f.residual < opts.threshold).count();
    let iterations = fits.iter().map(|f| f.iterations).sum();
    let fit = &fits[best];
    let p = &fit.params;
    let verdict = if fit.residual < opts.threshold {
        FitVerdict::Separable {
            gammas: [p[0], p[1], p[2], p[3], p[4], p[5]],
            phase: p[7].atan2(p[6]),
        }
    } else {
        FitVerdict::NotSeparable
    };
    log::debug!("fit: best start {best} residual {:e}", fit.residual);
    Ok(FitReport {
        verdict,
        residual: fit.residual,
        best_start: best,
        starts: fits.len(),
        accepted_starts,
        iterations,
    })
}

/// Monomial over `(X1, X2, Y1, Y2, Z1, Z2)` as exponents.
pub type Monomial = [u8; 6];

/// Bilinear coefficient functions of one axis quotient
/// `(P1 + G_num P2) / (G_den P1 + P2)`, where `P` is the axis' pair and
/// `G(q, r) = sum G^{jk} Qj Rk` over the other two axes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaExpansion {
    pub axis: Axis,
    pub num: [[f64; 2]; 2],
    pub den: [[f64; 2]; 2],
}

fn monomial(axis_of: [usize; 3], idx: [usize; 3]) -> Monomial {
    let mut m = [0u8; 6];
    for t in 0..3 {
        m[2 * axis_of[t] + idx[t]] += 1;
    }
    m
}

fn add_term(poly: &mut BTreeMap<Monomial, f64>, m: Monomial, c: f64) {
    *poly.entry(m).or_insert(0.0) += c;
}

fn count_nonzero(poly: &BTreeMap<Monomial, f64>) -> usize {
    poly.values().filter(|&&c| c != 0.0).count()
}

/// Distinct monomials in the numerator and denominator of the expanded
/// axis quotient.
pub fn count_monomials(g: &GammaExpansion) -> (usize, usize) {
    let own = g.axis.index();
    let others: Vec<usize> = (0..3).filter(|&i| i != own).collect();
    let mut num = BTreeMap::new();
    let mut den = BTreeMap::new();
    let mut single = [0u8; 6];
    single[2 * own] = 1;
    add_term(&mut num, single, 1.0);
    let mut single = [0u8; 6];
    single[2 * own + 1] = 1;
    add_term(&mut den, single, 1.0);
    for j in 0..2 {
        for k in 0..2 {
            let axes = [own, others[0], others[1]];
            add_term(&mut num, monomial(axes, [1, j, k]), g.num[j][k]);
            add_term(&mut den, monomial(axes, [0, j, k]), g.den[j][k]);
        }
    }
    (count_nonzero(&num), count_nonzero(&den))
}

/// Distinct monomials `Xi Yj Zk` in the numerator and denominator of a
/// tensor action.
pub fn count_tensor_monomials(t: &TensorCoefficients) -> (usize, usize) {
    let mut num = BTreeMap::new();
    let mut den = BTreeMap::new();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                let m = monomial([0, 1, 2], [i, j, k]);
                add_term(&mut num, m, t.a[flat_index(i, j, k)]);
                add_term(&mut den, m, t.b[flat_index(i, j, k)]);
            }
        }
    }
    (count_nonzero(&num), count_nonzero(&den))
}
