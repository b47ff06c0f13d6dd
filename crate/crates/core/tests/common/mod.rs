//! Test-only oracles, kept independent of the library's numerical paths.
#![allow(dead_code)]

/// Adaptive Dormand-Prince 5(4) integration of `y'' = q(x) y` from `x0` to
/// `x1`, returning `(y, y')`. Tight tolerances make it a reference solution.
pub fn dopri_linear<Q: Fn(f64) -> f64>(q: Q, x0: f64, y0: f64, dy0: f64, x1: f64, rtol: f64) -> (f64, f64) {
    let f = |x: f64, s: [f64; 2]| [s[1], q(x) * s[0]];
    let c = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
    let a: [&[f64]; 7] = [
        &[],
        &[1.0 / 5.0],
        &[3.0 / 40.0, 9.0 / 40.0],
        &[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
        &[19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0],
        &[9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0],
        &[35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    let b5 = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
    let b4 = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];
    let dir = (x1 - x0).signum();
    let mut x = x0;
    let mut s = [y0, dy0];
    let mut h = 1e-3 * dir;
    while (x1 - x) * dir > 0.0 {
        if (x + h - x1) * dir > 0.0 {
            h = x1 - x;
        }
        let mut k = [[0.0; 2]; 7];
        for i in 0..7 {
            let mut st = s;
            for (j, aij) in a[i].iter().enumerate() {
                st[0] += h * aij * k[j][0];
                st[1] += h * aij * k[j][1];
            }
            k[i] = f(x + c[i] * h, st);
        }
        let mut y5 = s;
        let mut y4 = s;
        for i in 0..7 {
            for d in 0..2 {
                y5[d] += h * b5[i] * k[i][d];
                y4[d] += h * b4[i] * k[i][d];
            }
        }
        let scale = |d: usize| rtol * (1e-300 + s[d].abs().max(y5[d].abs())) + 1e-300;
        let err = ((y5[0] - y4[0]) / scale(0)).abs().max(((y5[1] - y4[1]) / scale(1)).abs());
        if err <= 1.0 {
            x += h;
            s = y5;
        }
        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= fac;
    }
    (s[0], s[1])
}

/// Small deterministic LCG for sampling in tests without sharing the
/// library's RNG plumbing.
pub struct Lcg(pub u64);

impl Lcg {
    pub fn next_f64(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

/// Reduce `d` into `(-period/2, period/2]`.
pub fn wrap(d: f64, period: f64) -> f64 {
    d - period * (d / period).round()
}

/// Seven-point central second derivative, O(h^6).
pub fn d2_7pt<T, F>(f: F, x: f64, h: f64) -> T
where
    F: Fn(f64) -> T,
    T: std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
{
    let c = [2.0, -27.0, 270.0, -490.0, 270.0, -27.0, 2.0];
    let mut acc = f(x - 3.0 * h) * c[0];
    for (i, ci) in c.iter().enumerate().skip(1) {
        acc = acc + f(x + (i as f64 - 3.0) * h) * *ci;
    }
    acc * (1.0 / (180.0 * h * h))
}

/// Plain three-point first derivative, used where an oracle must not share
/// the library's stencil code.
pub fn fd1(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Five-point central derivatives `(f', f'', f''')`.
pub fn fd123(f: impl Fn(f64) -> f64, x: f64, h: f64) -> (f64, f64, f64) {
    let fm2 = f(x - 2.0 * h);
    let fm1 = f(x - h);
    let f0 = f(x);
    let fp1 = f(x + h);
    let fp2 = f(x + 2.0 * h);
    (
        (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h),
        (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h),
        (-fm2 + 2.0 * fm1 - 2.0 * fp1 + fp2) / (2.0 * h * h * h),
    )
}
