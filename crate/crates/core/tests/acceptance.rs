//! Acceptance suite: one pass/fail line per criterion.

mod common;

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::time::Instant;

use common::{wrap, Lcg};
use num_complex::Complex64;
use qsep::amplitude::{compare_to_product, Amplitude3D, WavefunctionProduct};
use qsep::dynamics::{
    integrate, metric_g, total_energy_check, velocity, velocity_alt, EventKind, MotionConfig, Region,
    TurningPolicy,
};
use qsep::reduced_action::{
    assemble_separable, fm_wavefunctions, recover_action, Orientation, RecoveryConstants, ReducedAction1D,
    SeparableAction3D, WaveParameters,
};
use qsep::schrodinger1d::{
    solve_pair, solve_pair_with, EnergySplit, PhysicalConstants, Potential1D, SolutionPair, SolveOptions,
};
use qsep::tensor_reduction::{
    count_monomials, count_tensor_monomials, eval_tensor_action, expand_gammas, fit_gammas, FitOptions,
    GammaExpansion, TensorAction, TensorCoefficients,
};
use qsep::{Axis, Interval, Point3};

type Outcome = Result<String, String>;

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn dom(lo: f64, hi: f64) -> Interval {
    Interval::new(lo, hi).unwrap()
}

#[derive(Clone, Copy, Debug)]
enum Catalog {
    Free,
    Constant,
    Harmonic,
}

impl Catalog {
    fn potential(self, axis: Axis) -> Potential1D {
        match self {
            Catalog::Free => Potential1D::zero(axis),
            Catalog::Constant => Potential1D::constant(0.75, axis).unwrap(),
            Catalog::Harmonic => Potential1D::harmonic(1.0, axis).unwrap(),
        }
    }

    fn energy(self) -> f64 {
        match self {
            Catalog::Free | Catalog::Harmonic => 0.5,
            Catalog::Constant => 0.75,
        }
    }

    fn pair(self, axis: Axis) -> SolutionPair {
        solve_pair(&self.potential(axis), self.energy(), dom(-4.0, 4.0), 0.0, PhysicalConstants::default()).unwrap()
    }
}

const CATALOG: [Catalog; 3] = [Catalog::Free, Catalog::Constant, Catalog::Harmonic];

fn random_gammas(rng: &mut Lcg) -> [f64; 6] {
    loop {
        let g: [f64; 6] = std::array::from_fn(|_| rng.uniform(-2.0, 2.0));
        if (0..3).all(|i| (1.0 - g[2 * i] * g[2 * i + 1]).abs() > 0.05) {
            return g;
        }
    }
}

fn separable(pairs: &[SolutionPair; 3], g: [f64; 6], lambda0: f64) -> SeparableAction3D {
    let mk = |i: usize| ReducedAction1D::new(pairs[i].clone(), g[2 * i], g[2 * i + 1], Orientation::Positive).unwrap();
    assemble_separable(mk(0), mk(1), mk(2), lambda0).unwrap()
}

fn catalog_action(c: Catalog, g: [f64; 6]) -> SeparableAction3D {
    separable(&Axis::ALL.map(|a| c.pair(a)), g, 0.0)
}

fn random_points(rng: &mut Lcg, n: usize, r: f64) -> Vec<Point3> {
    (0..n).map(|_| std::array::from_fn(|_| rng.uniform(-r, r))).collect()
}

fn qshje_separability() -> Outcome {
    let mut rng = Lcg(101);
    let mut worst: f64 = 0.0;
    for c in CATALOG {
        for _ in 0..10 {
            let s = catalog_action(c, random_gammas(&mut rng));
            for axis in Axis::ALL {
                let a = s.axis(axis);
                for x in a.pair().domain().linspace(200) {
                    let t = a.qshje_terms(x, &c.potential(axis), c.energy()).unwrap();
                    worst = worst.max(t.residual().abs() / t.scale());
                }
            }
        }
    }
    verdict(worst < 1e-6, format!("max scaled residual {worst:.2e} (tol 1e-6)"))
}

fn momentum_nonvanishing() -> Outcome {
    let mut rng = Lcg(101);
    let (mut min_p, mut worst): (f64, f64) = (f64::INFINITY, 0.0);
    for c in CATALOG {
        for _ in 0..10 {
            let g = random_gammas(&mut rng);
            let s = catalog_action(c, g);
            for (i, axis) in Axis::ALL.into_iter().enumerate() {
                let a = s.axis(axis);
                let pair = a.pair();
                let (gn, gd) = (g[2 * i], g[2 * i + 1]);
                for x in pair.domain().linspace(200) {
                    let p = a.momentum(x).unwrap();
                    let [x1, x2] = pair.eval(x).unwrap();
                    let (u, v) = (x1.value + gn * x2.value, gd * x1.value + x2.value);
                    let closed = -(1.0 - gn * gd) * pair.wronskian_at_anchor() / (u * u + v * v);
                    min_p = min_p.min(p.abs());
                    worst = worst.max((p - closed).abs() / closed.abs());
                }
            }
        }
    }
    verdict(
        min_p > 1e-12 && worst < 1e-9,
        format!("min |P| {min_p:.2e} (> 1e-12), closed-form mismatch {worst:.2e} (tol 1e-9)"),
    )
}

fn mixed_pairs() -> [SolutionPair; 3] {
    [Catalog::Harmonic.pair(Axis::X), Catalog::Free.pair(Axis::Y), Catalog::Constant.pair(Axis::Z)]
}

fn tensor_equivalence() -> Outcome {
    let ps = mixed_pairs();
    let mut rng = Lcg(303);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let g = random_gammas(&mut rng);
        let t = TensorAction::new(expand_gammas(g).unwrap(), ps.clone(), 0.0).unwrap();
        let s = separable(&ps, g, 0.0);
        let offset = t.value([0.0; 3]).unwrap() - s.value([0.0; 3]).unwrap();
        for p in random_points(&mut rng, 100, 3.9) {
            let d = eval_tensor_action(&t, p).unwrap() - s.value(p).unwrap() - offset;
            worst = worst.max(wrap(d, PI).abs());
        }
    }
    verdict(worst < 1e-9, format!("max gap mod pi hbar {worst:.2e} (tol 1e-9)"))
}

fn reduction_round_trip() -> Outcome {
    let mut rng = Lcg(404);
    let mut recovered = 0;
    for trial in 0..100u64 {
        let g = random_gammas(&mut rng);
        let opts = FitOptions { seed: trial, ..FitOptions::default() };
        let report = fit_gammas(&expand_gammas(g).unwrap(), &opts).unwrap();
        if let Some(got) = report.gammas() {
            if (0..6).all(|i| (got[i] - g[i]).abs() < 1e-6) {
                recovered += 1;
            }
        }
    }
    let mut rejected = 0;
    for trial in 0..100u64 {
        let t = TensorCoefficients::from_flat(std::array::from_fn(|_| rng.uniform(-1.0, 1.0)));
        let opts = FitOptions { seed: trial, ..FitOptions::default() };
        if !fit_gammas(&t, &opts).unwrap().is_separable() {
            rejected += 1;
        }
    }
    verdict(
        recovered >= 95 && rejected == 100,
        format!("recovered {recovered}/100 (need 95), random tensors rejected {rejected}/100"),
    )
}

fn monomial_counts() -> Outcome {
    let mut rng = Lcg(505);
    let mut bad = 0;
    for k in 0..100 {
        let mut e = || {
            let v = rng.uniform(0.1, 3.0);
            if rng.next_f64() < 0.5 {
                -v
            } else {
                v
            }
        };
        let g = GammaExpansion {
            axis: Axis::ALL[k % 3],
            num: [[e(), e()], [e(), e()]],
            den: [[e(), e()], [e(), e()]],
        };
        if count_monomials(&g) != (5, 5) {
            bad += 1;
        }
        let t = TensorCoefficients::from_flat(std::array::from_fn(|_| e()));
        if count_tensor_monomials(&t) != (8, 8) {
            bad += 1;
        }
    }
    verdict(bad == 0, format!("{bad} wrong counts over 100 expansions and 100 tensors"))
}

fn harmonic_amplitude(g: [f64; 6]) -> Amplitude3D {
    Amplitude3D::new(catalog_action(Catalog::Harmonic, g), 1.0).unwrap()
}

fn amplitude_laws() -> Outcome {
    let mut rng = Lcg(606);
    let (mut current, mut mixed): (f64, f64) = (0.0, 0.0);
    let h = 1e-3;
    for _ in 0..5 {
        let a = harmonic_amplitude(random_gammas(&mut rng));
        let log_r = |p: Point3| a.amplitude_at(p).unwrap().ln();
        for p in random_points(&mut rng, 20, 3.5) {
            for axis in Axis::ALL {
                current = current.max(a.current_residual(axis, p, h).unwrap());
            }
            for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                let at = |si: f64, sj: f64| {
                    let mut q = p;
                    q[i] += si * h;
                    q[j] += sj * h;
                    log_r(q)
                };
                let d = (at(1.0, 1.0) - at(1.0, -1.0) - at(-1.0, 1.0) + at(-1.0, -1.0)) / (4.0 * h * h);
                mixed = mixed.max(d.abs());
            }
        }
    }
    verdict(
        current < 1e-6 && mixed < 1e-8,
        format!("current residual {current:.2e} (tol 1e-6), mixed log R {mixed:.2e} (tol 1e-8)"),
    )
}

fn plane_amplitude() -> Amplitude3D {
    let pairs = Axis::ALL.map(|a| Catalog::Free.pair(a).swapped());
    Amplitude3D::new(separable(&pairs, [0.0; 6], 0.0), 1.0).unwrap()
}

fn wavefunction_consistency() -> Outcome {
    let mut rng = Lcg(707);
    let params = [
        WaveParameters::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)).unwrap(),
        WaveParameters::new(Complex64::new(0.3, 0.0), Complex64::new(-2.0, 0.0)).unwrap(),
        WaveParameters::new(Complex64::new(0.0, 1.0), Complex64::new(0.5, 0.5)).unwrap(),
    ];
    let g = [0.4, -0.2, 0.0, 0.8, -1.1, 0.6];
    let cases = [
        (plane_amplitude(), Axis::ALL.map(|a| Catalog::Free.pair(a))),
        (harmonic_amplitude(g), Axis::ALL.map(|a| Catalog::Harmonic.pair(a))),
    ];
    let (mut se, mut span): (f64, f64) = (0.0, 0.0);
    for (amp, pairs) in &cases {
        for w in &params {
            for p in random_points(&mut rng, 10, 3.0) {
                for axis in Axis::ALL {
                    se = se.max(amp.schrodinger_residual(w, axis, p, 1e-3).unwrap());
                }
            }
            let prod = WavefunctionProduct::new([1.0; 8], pairs.clone()).unwrap();
            let samples = random_points(&mut rng, 64, 3.0);
            span = span.max(compare_to_product(amp, w, &prod, &samples).unwrap().span_residual);
        }
    }
    verdict(
        se < 1e-5 && span < 1e-7,
        format!("Schrodinger residual {se:.2e} (tol 1e-5), product residual {span:.2e} (tol 1e-7)"),
    )
}

fn random_rec(rng: &mut Lcg) -> RecoveryConstants {
    let mut c = || Complex64::new(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    RecoveryConstants::new(c(), c(), c(), c()).unwrap()
}

fn round_trip_error(s: &SeparableAction3D, rec: RecoveryConstants, points: &[Point3]) -> f64 {
    let fm = fm_wavefunctions(s, rec, 1.0);
    let hbar = s.hbar();
    let mut offset = None;
    let mut worst: f64 = 0.0;
    for &p in points {
        let got = recover_action(|q| fm.psi1(q), |q| fm.psi2(q), &rec, hbar, p).unwrap();
        let d = got - s.value(p).unwrap();
        let off = *offset.get_or_insert(d);
        worst = worst.max(wrap(d - off, PI * hbar).abs());
    }
    worst
}

fn recovery_round_trip() -> Outcome {
    let mut rng = Lcg(808);
    let pts = random_points(&mut rng, 50, 3.5);
    let (mut catalog, mut numerov): (f64, f64) = (0.0, 0.0);
    for c in [Catalog::Free, Catalog::Constant] {
        let s = catalog_action(c, random_gammas(&mut rng));
        for _ in 0..3 {
            catalog = catalog.max(round_trip_error(&s, random_rec(&mut rng), &pts));
        }
    }
    let s = catalog_action(Catalog::Harmonic, random_gammas(&mut rng));
    for _ in 0..3 {
        numerov = numerov.max(round_trip_error(&s, random_rec(&mut rng), &pts));
    }
    verdict(
        catalog < 1e-8 && numerov < 1e-6,
        format!("catalog {catalog:.2e} (tol 1e-8), Numerov {numerov:.2e} (tol 1e-6)"),
    )
}

fn free_wide(axis: Axis, half: f64) -> SolutionPair {
    solve_pair(&Potential1D::zero(axis), 0.5, dom(-half, half), 0.0, PhysicalConstants::default())
        .unwrap()
        .swapped()
}

fn dynamics() -> Outcome {
    let halves = EnergySplit::new(0.5, 0.5, 0.5);
    let zero = Axis::ALL.map(Potential1D::zero);
    let free = separable(&Axis::ALL.map(|a| free_wide(a, 20.0)), [0.0; 6], 0.0);
    let cfg = MotionConfig { step: 1e-3, t_max: 10.0, ..MotionConfig::default() };
    let tr = integrate(&free, &halves, &zero, [0.0; 3], &cfg).unwrap();
    let last = tr.last();
    let free_err = last.pos.iter().map(|x| (x - last.t).abs()).fold(0.0, f64::max);

    let pots = [Potential1D::harmonic(1.0, Axis::X).unwrap(), Potential1D::zero(Axis::Y), Potential1D::zero(Axis::Z)];
    let pairs = [Catalog::Harmonic.pair(Axis::X).clone(), free_wide(Axis::Y, 60.0), free_wide(Axis::Z, 60.0)];
    let harmonic = separable(&pairs, [0.3, -0.4, 0.0, 0.0, 0.0, 0.0], 0.0);
    let mut violations = 0;
    let mut energy: f64 = 0.0;
    let mut dwell = None;
    for policy in [TurningPolicy::Reflect, TurningPolicy::Transmit] {
        let cfg = MotionConfig { tp_policy: [policy; 3], t_max: 30.0, ..MotionConfig::default() };
        let tr = integrate(&harmonic, &halves, &pots, [0.2, 0.0, 0.0], &cfg).unwrap();
        for s in &tr.states {
            for i in 0..3 {
                let f = 0.5 - pots[i].value(s.pos[i]);
                if s.region[i] != Region::TurningPoint && s.velocities[i].signum() * s.momenta[i].signum() != f.signum() {
                    violations += 1;
                }
            }
            energy = energy.max(total_energy_check(s, &pots, &halves, PhysicalConstants::default()).abs());
        }
        if policy == TurningPolicy::Transmit && tr.count(EventKind::TurningPointCrossing) > 0 {
            dwell = tr.dwells.first().map(|d| d.duration());
        }
    }
    let dwell_ok = dwell.is_some_and(|d| d.is_finite() && d > 0.0);
    verdict(
        free_err < 1e-8 && violations == 0 && energy < 1e-5 && dwell_ok,
        format!(
            "free error {free_err:.2e} (tol 1e-8), sign-law violations {violations}, energy {energy:.2e} (tol 1e-5), transmit dwell {dwell:?}"
        ),
    )
}

fn wkb_action(hbar: f64) -> ReducedAction1D {
    let c = PhysicalConstants::new(hbar, 1.0).unwrap();
    let v = Potential1D::harmonic(1.0, Axis::X).unwrap();
    let opts = SolveOptions { step: 0.01 * hbar, force_numerov: true };
    let pair = solve_pair_with(&v, 0.5, dom(-0.6, 0.6), 0.0, c, &opts).unwrap();
    let pair = pair.recombined([[1.0, 0.0], [0.0, 1.0 / hbar]]).unwrap();
    ReducedAction1D::new(pair, 0.0, 0.0, Orientation::Positive).unwrap()
}

fn metric_identity() -> Outcome {
    let mut rng = Lcg(1010);
    let mut worst: f64 = 0.0;
    for c in CATALOG {
        let s = catalog_action(c, random_gammas(&mut rng));
        for axis in Axis::ALL {
            let a = s.axis(axis);
            for x in a.pair().domain().interior(50, 0.1) {
                let p = a.momentum(x).unwrap();
                let want = 2.0 * (c.energy() - c.potential(axis).value(x)) / (p * p);
                worst = worst.max((metric_g(a, x).unwrap() - want).abs() / (1.0 + want.abs()));
            }
        }
    }
    let v = Potential1D::harmonic(1.0, Axis::X).unwrap();
    let generic = ReducedAction1D::new(Catalog::Harmonic.pair(Axis::X), 0.3, -0.4, Orientation::Positive).unwrap();
    let x = 0.3;
    let (vel, alt) = (velocity(&generic, 0.5, &v, x).unwrap(), velocity_alt(&generic, x, 1e-3).unwrap());

    let xs = dom(-0.4, 0.4).linspace(33);
    let mut gaps = Vec::new();
    let mut classical: f64 = 0.0;
    for hbar in [0.1, 0.03, 0.01] {
        let a = wkb_action(hbar);
        let mut acc = 0.0;
        for &x in &xs {
            let vel = velocity(&a, 0.5, &v, x).unwrap();
            let p_cl = (1.0 - x * x).sqrt();
            if hbar == 0.01 {
                classical = classical.max((vel.abs() - p_cl).abs());
            }
            let r = (velocity_alt(&a, x, 0.01 * hbar).unwrap() - vel) / vel;
            acc += r * r;
        }
        gaps.push((acc / xs.len() as f64).sqrt());
    }
    let converging = gaps.windows(2).all(|w| w[1] < w[0]) && gaps[2] < 0.1 && classical < 1e-2;
    verdict(
        worst < 1e-6 && (alt - vel).abs() > 1e-3 && converging,
        format!(
            "metric identity {worst:.2e} (tol 1e-6); at x = {x}: velocity {vel:.6}, velocity_alt {alt:.6}; rms relative gap for hbar 0.1/0.03/0.01: {:.2e}/{:.2e}/{:.2e}; |velocity - P_cl| at hbar 0.01: {classical:.2e}",
            gaps[0], gaps[1], gaps[2]
        ),
    )
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn determinism() -> Outcome {
    let scenarios = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let jobs = [
        ("trajectory", "harmonic_transmit.toml"),
        ("sweep", "harmonic_transmit.toml"),
        ("verify", "free_particle.toml"),
        ("reduce", "tensor_reduce.toml"),
    ];
    let mut differing = Vec::new();
    let mut files = 0;
    for (cmd, name) in jobs {
        let cfg = scenarios.join(name);
        let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
        for d in &dirs {
            let args = ["qsep", cmd, "--config", cfg.to_str().unwrap(), "--out", d.path().to_str().unwrap(), "--seed", "17"];
            if qsep::cli::run(args) != 0 {
                return Err(format!("{cmd} on {name} failed"));
            }
        }
        let (a, b) = (snapshot(dirs[0].path()), snapshot(dirs[1].path()));
        files += a.len();
        if a != b || a.is_empty() {
            differing.push(cmd);
        }
    }
    verdict(
        differing.is_empty(),
        format!("{files} output files over 4 commands, differing: {differing:?}"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("QSHJE separability", qshje_separability),
        ("momentum nonvanishing", momentum_nonvanishing),
        ("tensor equivalence", tensor_equivalence),
        ("reduction round trip", reduction_round_trip),
        ("monomial counts", monomial_counts),
        ("amplitude laws", amplitude_laws),
        ("wavefunction consistency", wavefunction_consistency),
        ("recovery round trip", recovery_round_trip),
        ("dynamics", dynamics),
        ("metric identity", metric_identity),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.1}s]", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} [{secs:.1}s]", k + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
