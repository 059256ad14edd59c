//! Randomized oracle-equivalence suites behind the `verify` command.
//!
//! Every suite draws its inputs from a ChaCha8 stream seeded by the caller,
//! so a given `(seed, samples)` pair always yields the same summary text.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::control::{composition_distance, design_control};
use crate::error::Result;
use crate::generator::{
    closed_form_generator, default_step, numeric_generator, series_generator_capped,
    CoefficientMap, CompositionMode, LinearMap, SchemeConfig,
};
use crate::magnetometry::{field_coefficients, generators_no_control, FieldPoint};
use crate::oracle;
use crate::qfi::{
    entangled_weak_comm, extend_with_ancilla, phi_plus, qfim_entangled, qfim_pure,
    scheme_generators, sld_oracle,
};
use crate::su2::{BlochState, CMat, Su2Basis, Vec3};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    pub samples: usize,
    /// Multiplies every suite tolerance; `0` turns the run into a harness
    /// self-test that must fail.
    pub tolerance_scale: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            samples: 1000,
            tolerance_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub cases: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub worst_input: String,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.max_deviation <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifySummary {
    pub seed: u64,
    pub samples: usize,
    pub suites: Vec<SuiteResult>,
}

impl VerifySummary {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::passed)
    }

    pub fn failing(&self) -> impl Iterator<Item = &SuiteResult> {
        self.suites.iter().filter(|s| !s.passed())
    }

    /// Fixed-format text, one line per suite followed by a verdict line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "seed {} samples {}", self.seed, self.samples);
        for s in &self.suites {
            let _ = writeln!(
                out,
                "{:<28} cases {:>6}  max_dev {:.6e}  tol {:.1e}  {}",
                s.name,
                s.cases,
                s.max_deviation,
                s.tolerance,
                if s.passed() { "PASS" } else { "FAIL" }
            );
        }
        for s in self.failing() {
            let _ = writeln!(
                out,
                "worst input [{}] seed {}: {}",
                s.name, self.seed, s.worst_input
            );
        }
        let _ = writeln!(out, "{}", if self.passed() { "ALL PASS" } else { "FAILED" });
        out
    }
}

struct Tracker {
    name: &'static str,
    cases: usize,
    max: f64,
    worst: String,
    tolerance: f64,
}

impl Tracker {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self {
            name,
            cases: 0,
            max: 0.0,
            worst: String::from("-"),
            tolerance,
        }
    }

    fn record(&mut self, dev: f64, input: impl FnOnce() -> String) {
        self.cases += 1;
        // NaN counts as the worst possible deviation.
        if dev.is_nan() || dev > self.max || (self.cases == 1 && dev >= self.max) {
            self.max = if dev.is_nan() { f64::INFINITY } else { dev };
            self.worst = input();
        }
    }

    fn finish(self, scale: f64) -> SuiteResult {
        SuiteResult {
            name: self.name,
            cases: self.cases,
            max_deviation: self.max,
            tolerance: self.tolerance * scale,
            worst_input: self.worst,
        }
    }
}

/// Uniformly distributed direction scaled to a norm drawn from `[lo, hi]`.
pub fn random_vec(rng: &mut impl Rng, lo: f64, hi: f64) -> Vec3 {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    let phi: f64 = rng.gen_range(0.0..2.0 * PI);
    let rho = (1.0 - z * z).max(0.0).sqrt();
    let norm = rng.gen_range(lo..=hi);
    Vec3::new(rho * phi.cos(), rho * phi.sin(), z) * norm
}

pub fn random_unit(rng: &mut impl Rng) -> Vec3 {
    random_vec(rng, 1.0, 1.0)
}

fn mat_rel(a: &nalgebra::DMatrix<f64>, b: &nalgebra::DMatrix<f64>) -> f64 {
    let scale = b.amax().max(1.0);
    (a - b).amax() / scale
}

fn random_scheme(rng: &mut impl Rng, dim: usize, x_hi: f64) -> Result<SchemeConfig> {
    let base = random_vec(rng, 0.1, x_hi);
    let cols = (0..dim).map(|_| random_vec(rng, 0.1, 2.0)).collect();
    let control = if rng.gen_bool(0.5) {
        random_vec(rng, 0.0, x_hi)
    } else {
        Vec3::ZERO
    };
    let n = rng.gen_range(1..=6u64);
    let t = rng.gen_range(0.05..=0.5);
    let mode = if rng.gen_bool(0.5) {
        CompositionMode::MergedExponential
    } else {
        CompositionMode::SegmentProduct
    };
    SchemeConfig::new(LinearMap::new(base, cols), control, t, n, mode)
}

fn random_point(rng: &mut impl Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(-0.5..=0.5)).collect()
}

fn suite_generators(rng: &mut ChaCha8Rng, samples: usize) -> Result<(Tracker, Tracker)> {
    let mut series = Tracker::new("generator-closed-vs-series", 1e-12);
    let mut numeric = Tracker::new("generator-vs-numeric", 1e-6);
    for _ in 0..samples {
        let x = random_vec(rng, 0.1, 5.0);
        let d = random_vec(rng, 0.1, 5.0);
        let t = rng.gen_range(0.0..=5.0);
        let input = || format!("X={:?} dX={:?} T={t}", x.to_array(), d.to_array());
        let closed = closed_form_generator(x, d, t)?;
        let hc = closed.to_matrix();
        let ser = series_generator_capped(x, d, t, 1e-14, 128)?;
        series.record(hc.max_abs_diff(&ser.matrix), input);
        if t > 0.0 {
            let scheme = SchemeConfig::new(
                LinearMap::new(x, vec![d]),
                Vec3::ZERO,
                t,
                1,
                CompositionMode::MergedExponential,
            )?;
            let hn = numeric_generator(&scheme, &[0.0], 0, default_step(0.0))?;
            let dev = hn.max_abs_diff(&hc).max(hn.max_abs_diff(&ser.matrix));
            numeric.record(dev, input);
        }
    }
    Ok((series, numeric))
}

fn pure_rho(r: Vec3) -> Result<CMat> {
    Ok(BlochState::new(r)?.density(&Su2Basis::default()))
}

fn suite_qfim(rng: &mut ChaCha8Rng, samples: usize) -> Result<(Tracker, Tracker)> {
    let mut trace = Tracker::new("qfim-vs-trace-oracle", 1e-12);
    let mut fd = Tracker::new("qfim-vs-state-derivative", 1e-6);
    for _ in 0..samples {
        let dim = rng.gen_range(1..=3usize);
        let scheme = random_scheme(rng, dim, 3.0)?;
        let x = random_point(rng, dim);
        let r = random_unit(rng);
        let gens = scheme_generators(&scheme, &x)?;
        let closed = qfim_pure(&gens, r);
        let mats: Vec<CMat> = gens.iter().map(|g| g.to_matrix()).collect();
        let input = || format!("{scheme:?} x={x:?} r={:?}", r.to_array());
        trace.record(
            mat_rel(&closed, &oracle::trace_qfim(&mats, &pure_rho(r)?)),
            input,
        );
        let state = oracle::fd_pure_state_qfim(&scheme, &x, &oracle::bloch_ket(r)?)?;
        fd.record(mat_rel(&closed, &state), input);
    }
    Ok((trace, fd))
}

fn suite_entangled(rng: &mut ChaCha8Rng, samples: usize) -> Result<(Tracker, Tracker)> {
    let mut residual = Tracker::new("entangled-residuals", 1e-12);
    let mut qfim = Tracker::new("entangled-qfim", 1e-6);
    let psi = phi_plus();
    for _ in 0..samples {
        let dim = rng.gen_range(2..=3usize);
        let scheme = random_scheme(rng, dim, 3.0)?;
        let x = random_point(rng, dim);
        let gens = scheme_generators(&scheme, &x)?;
        let input = || format!("{scheme:?} x={x:?}");
        let mut worst = 0.0f64;
        for a in 0..dim {
            for b in 0..dim {
                let scale = (gens[a].magnitude * gens[b].magnitude).max(1.0);
                worst = worst.max(entangled_weak_comm(&gens[a], &gens[b], &psi)?.norm() / scale);
            }
        }
        residual.record(worst, input);
        let lifted: Vec<CMat> = gens
            .iter()
            .map(|g| extend_with_ancilla(&g.to_matrix()))
            .collect();
        let closed = qfim_entangled(&gens);
        let tr = oracle::trace_qfim(&lifted, &oracle::projector(&psi));
        let state = oracle::fd_pure_state_qfim(&scheme, &x, &psi)?;
        qfim.record(mat_rel(&closed, &tr).max(mat_rel(&closed, &state)), input);
    }
    Ok((residual, qfim))
}

fn suite_sld(rng: &mut ChaCha8Rng, samples: usize) -> Result<Tracker> {
    let mut tr = Tracker::new("sld-residual-identity", 1e-6);
    for k in 0..samples {
        let dim = rng.gen_range(2..=3usize);
        let scheme = random_scheme(rng, dim, 2.0)?;
        let x = random_point(rng, dim);
        let input = || format!("{scheme:?} x={x:?}");
        let probe = if k % 2 == 0 {
            pure_rho(random_unit(rng))?
        } else {
            oracle::projector(&phi_plus())
        };
        let o = sld_oracle(&scheme, &x, &probe)?;
        let scale = o
            .generator_residuals
            .iter()
            .map(|z| z.norm())
            .fold(1.0, f64::max);
        tr.record(o.identity_deviation / scale, input);
    }
    Ok(tr)
}

fn suite_magnetometry(rng: &mut ChaCha8Rng, samples: usize) -> Result<Tracker> {
    let mut tr = Tracker::new("field-generators-vs-generic", 1e-12);
    for _ in 0..samples {
        let p = FieldPoint::new(
            rng.gen_range(0.1..=5.0),
            rng.gen_range(0.0..=PI),
            rng.gen_range(0.0..2.0 * PI),
        )?;
        let t = rng.gen_range(0.0..=5.0);
        let c = field_coefficients(&p);
        let ours = generators_no_control(&p, t)?;
        let mut worst = 0.0f64;
        for (l, d) in c.partials().iter().enumerate() {
            if d.is_zero() {
                continue;
            }
            let g = closed_form_generator(c.x, *d, t)?;
            worst = worst.max(g.vector().max_abs_diff(ours[l].vector()));
        }
        tr.record(worst, || format!("{p:?} T={t}"));
    }
    Ok(tr)
}

/// Operator-norm distance between segment-product and merged unitaries at
/// fixed total time for each segment length in `steps`, with the control
/// designed at `estimate` rather than at the true point.
pub fn trotter_distances(
    map: Arc<dyn CoefficientMap>,
    truth: &[f64],
    estimate: &[f64],
    total_time: f64,
    steps: &[f64],
) -> Result<Vec<f64>> {
    let control = design_control(map.as_ref(), estimate).control_vector;
    steps
        .iter()
        .map(|&t| {
            let n = (total_time / t).round().max(1.0) as u64;
            let scheme = SchemeConfig::from_shared(
                map.clone(),
                control,
                t,
                n,
                CompositionMode::SegmentProduct,
            )?;
            composition_distance(&scheme, truth)
        })
        .collect()
}

/// `d[k] / d[k + 1]`
pub fn successive_ratios(d: &[f64]) -> Vec<f64> {
    d.windows(2).map(|w| w[0] / w[1]).collect()
}

/// Segment lengths `0.5, 0.25, 0.125, 0.0625` at `T = 5`.
pub const TROTTER_STEPS: [f64; 4] = [0.5, 0.25, 0.125, 0.0625];

fn suite_trotter(rng: &mut ChaCha8Rng, samples: usize) -> Result<Tracker> {
    let mut tr = Tracker::new("trotter-halving-ratio", 0.2);
    let cases = samples.clamp(1, 50);
    for _ in 0..cases {
        let map = LinearMap::new(random_vec(rng, 0.5, 1.0), vec![random_vec(rng, 0.5, 1.0)]);
        let truth = [rng.gen_range(-0.2..=0.2)];
        let offset = [if rng.gen_bool(0.5) { 0.1 } else { -0.1 }];
        let estimate = [truth[0] - offset[0]];
        let d = trotter_distances(
            Arc::new(map.clone()),
            &truth,
            &estimate,
            5.0,
            &TROTTER_STEPS,
        )?;
        let ratios = successive_ratios(&d);
        let dev = ratios.iter().map(|r| (r - 2.0).abs()).fold(0.0, f64::max);
        tr.record(dev, || format!("{map:?} x={truth:?} ratios={ratios:?}"));
    }
    Ok(tr)
}

/// Run every suite. `samples` is the per-suite case count for the cheap
/// suites; the finite-difference heavy suites use a tenth of it (at least 10).
pub fn run_verify(cfg: &VerifyConfig) -> Result<VerifySummary> {
    let samples = cfg.samples.max(1);
    let heavy = (samples / 10).max(10);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut trackers = Vec::new();
    let (a, b) = suite_generators(&mut rng, samples)?;
    trackers.push(a);
    trackers.push(b);
    let (a, b) = suite_qfim(&mut rng, heavy)?;
    trackers.push(a);
    trackers.push(b);
    let (a, b) = suite_entangled(&mut rng, heavy)?;
    trackers.push(a);
    trackers.push(b);
    trackers.push(suite_sld(&mut rng, heavy)?);
    trackers.push(suite_magnetometry(&mut rng, samples)?);
    trackers.push(suite_trotter(&mut rng, heavy)?);
    Ok(VerifySummary {
        seed: cfg.seed,
        samples,
        suites: trackers
            .into_iter()
            .map(|t| t.finish(cfg.tolerance_scale))
            .collect(),
    })
}
