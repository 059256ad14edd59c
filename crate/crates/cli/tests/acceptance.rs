//! Acceptance suite. Runs every criterion at its stated tolerance, prints one
//! PASS/FAIL line per criterion and exits non-zero if any fails.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_6, PI};
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qfim_core::generator::{
    closed_form_generator, default_step, numeric_generator, series_generator_capped,
};
use qfim_core::magnetometry::{
    field_coefficients, field_scheme, precision_curves, qfim_controlled, qfim_no_control,
    weak_comm_example, CurveProbe, FieldMap, FieldPoint,
};
use qfim_core::oracle;
use qfim_core::qfi::{entangled_weak_comm, phi_plus, scheme_generators, sld_oracle};
use qfim_core::verify::{
    random_unit, random_vec, successive_ratios, trotter_distances, TROTTER_STEPS,
};
use qfim_core::{
    qfi_max, qfi_max_controlled, BlochState, CMat, CompositionMode, LinearMap, SchemeConfig,
    Su2Basis, Vec3,
};

type Verdict = (bool, String);

const BIN: &str = env!("CARGO_BIN_EXE_qfim");

fn fig_point() -> FieldPoint {
    FieldPoint::new(3.0, FRAC_PI_6, 0.0).unwrap()
}

fn diag(v: [f64; 3]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&v))
}

fn generator_equivalence() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut series_dev, mut numeric_dev) = (0.0f64, 0.0f64);
    let samples = 1200;
    for _ in 0..samples {
        let x = random_vec(&mut rng, 0.1, 5.0);
        let d = random_vec(&mut rng, 0.1, 5.0);
        let t = rng.gen_range(0.0..=5.0);
        let closed = closed_form_generator(x, d, t).unwrap().to_matrix();
        let series = series_generator_capped(x, d, t, 1e-14, 128).unwrap().matrix;
        series_dev = series_dev.max(closed.max_abs_diff(&series));
        if t > 0.0 {
            let scheme = SchemeConfig::new(
                LinearMap::new(x, vec![d]),
                Vec3::ZERO,
                t,
                1,
                CompositionMode::MergedExponential,
            )
            .unwrap();
            let h = numeric_generator(&scheme, &[0.0], 0, default_step(0.0)).unwrap();
            numeric_dev = numeric_dev
                .max(h.max_abs_diff(&closed))
                .max(h.max_abs_diff(&series));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    (
        series_dev <= 1e-12 && numeric_dev <= 1e-6 && secs < 10.0,
        format!(
            "{samples} samples, closed-vs-series {series_dev:.2e} (tol 1e-12), \
             vs numeric {numeric_dev:.2e} (tol 1e-6), {secs:.2} s"
        ),
    )
}

fn qfim_golden() -> Verdict {
    let start = Instant::now();
    let p = fig_point();
    let x = p.as_params();
    let psi = phi_plus();
    let (mut closed_dev, mut oracle_dev) = (0.0f64, 0.0f64);
    for n in 1..=10u64 {
        let t = n as f64;
        let s2 = (3.0 * t).sin().powi(2);
        let cases = [
            (
                false,
                diag([4.0 * t * t, 4.0 * s2, s2]),
                qfim_no_control(&p, t).unwrap(),
            ),
            (
                true,
                diag([4.0 * t * t, 36.0 * t * t, 9.0 * t * t]),
                qfim_controlled(&p, t).unwrap(),
            ),
        ];
        for (controlled, expected, closed) in cases {
            closed_dev = closed_dev.max((&closed - &expected).amax());
            let scheme =
                field_scheme(&p, 1.0, n, controlled, CompositionMode::MergedExponential).unwrap();
            let fd = oracle::fd_pure_state_qfim(&scheme, &x, &psi).unwrap();
            oracle_dev = oracle_dev.max((&fd - &expected).amax());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    (
        closed_dev <= 1e-10 && oracle_dev <= 1e-6 && secs < 5.0,
        format!(
            "T = 1..10, closed form {closed_dev:.2e} (tol 1e-10), \
             4x4 entangled FD oracle {oracle_dev:.2e} (tol 1e-6), {secs:.2} s"
        ),
    )
}

fn bound_and_limit() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut range_ok = true;
    let mut colinear_dev = 0.0f64;
    let mut colinear_cases = 0;
    let mut limit_dev = 0.0f64;
    for k in 0..2000 {
        let x = random_vec(&mut rng, 0.1, 5.0);
        let t = rng.gen_range(0.0..=5.0);
        let d = if k % 2 == 0 {
            random_vec(&mut rng, 0.1, 5.0)
        } else {
            // sin(alpha) <= 1e-6 by construction
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let along = x * (sign * rng.gen_range(0.1..=5.0) / x.norm());
            let perp = x.cross(random_unit(&mut rng));
            let eps = rng.gen_range(0.0..=0.9e-6) * along.norm();
            along + perp * (eps / perp.norm())
        };
        let bound = t * t * d.norm_squared();
        let q = qfi_max(x, d, t).unwrap();
        range_ok &= (0.0..=bound).contains(&q);
        let sin_alpha = x.cross(d).norm() / (x.norm() * d.norm());
        if sin_alpha <= 1e-6 {
            colinear_cases += 1;
            colinear_dev = colinear_dev.max((bound - q).abs());
        }
        let s = random_vec(&mut rng, 1e-8, 1e-8);
        let qc = qfi_max_controlled(s, d, t).unwrap();
        limit_dev = limit_dev.max((qc - bound).abs());
    }
    (
        range_ok && colinear_dev <= 1e-9 && limit_dev <= 1e-12 && colinear_cases >= 1000,
        format!(
            "2000 samples in [0, T^2|dX|^2]: {range_ok}, {colinear_cases} near-colinear \
             gap {colinear_dev:.2e} (tol 1e-9), |S| = 1e-8 limit {limit_dev:.2e} (tol 1e-12)"
        ),
    )
}

fn run_cli(args: &[&str], config: Option<&str>) -> (i32, String) {
    let dir = tempfile::tempdir().unwrap();
    let mut cmd = Command::new(BIN);
    if let Some(c) = config {
        let path = dir.path().join("config.json");
        std::fs::write(&path, c).unwrap();
        cmd.arg("--config").arg(path);
    }
    let out = cmd.args(args).output().expect("qfim binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).expect("utf-8 output"),
    )
}

fn gap_sweep() -> Verdict {
    let cfg = r#"{"t": 1, "x_norm": 2, "dx_norm": 1, "n_values": [3, 5, 10], "alpha_points": 181}"#;
    let (code, csv) = run_cli(&["sweep-alpha"], Some(cfg));
    if code != 0 {
        return (false, format!("sweep-alpha exited with {code}"));
    }
    let mut lines = csv.lines();
    if lines.next() != Some("N,alpha,uncontrolled_max,controlled_limit,gap") {
        return (false, "unexpected CSV header".into());
    }
    let rows: Vec<(u64, f64, f64)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (
                f[0].parse().unwrap(),
                f[1].parse().unwrap(),
                f[4].parse().unwrap(),
            )
        })
        .collect();
    let points = 181;
    let mut asym = 0.0f64;
    let mut edges_zero = true;
    let mut peak_at_half = true;
    let mut gap_10 = f64::NAN;
    let per_n: Vec<&[(u64, f64, f64)]> = rows.chunks(points).collect();
    for chunk in &per_n {
        let gaps: Vec<f64> = chunk.iter().map(|r| r.2).collect();
        for k in 0..points {
            asym = asym.max((gaps[k] - gaps[points - 1 - k]).abs());
        }
        edges_zero &= gaps[0] == 0.0 && gaps[points - 1] == 0.0;
        let (imax, _) =
            gaps.iter().enumerate().fold(
                (0, f64::MIN),
                |acc, (i, &g)| if g > acc.1 { (i, g) } else { acc },
            );
        peak_at_half &= (chunk[imax].1 - FRAC_PI_2).abs() < 1e-12;
        if chunk[0].0 == 10 {
            gap_10 = gaps[(points - 1) / 2];
        }
    }
    let expected = 100.0 - 10f64.sin().powi(2);
    let mut monotone = true;
    for k in 1..points - 1 {
        for w in per_n.windows(2) {
            monotone &= w[1][k].2 >= w[0][k].2;
        }
    }
    let ok = asym <= 1e-12
        && edges_zero
        && peak_at_half
        && (gap_10 - expected).abs() <= 1e-10
        && monotone;
    (
        ok,
        format!(
            "asymmetry {asym:.2e}, edges zero {edges_zero}, peak at pi/2 {peak_at_half}, \
             gap(pi/2, N=10) off by {:.2e}, nondecreasing in N {monotone}",
            (gap_10 - expected).abs()
        ),
    )
}

fn weak_commutation() -> Verdict {
    let psi = phi_plus();
    let mut ent_dev = 0.0f64;
    for &(b, th, ph, t) in &[
        (3.0, FRAC_PI_6, 0.0, 1.0),
        (1.2, 2.0, 4.0, 0.7),
        (0.4, 0.3, 1.0, 2.0),
    ] {
        let p = FieldPoint::new(b, th, ph).unwrap();
        for controlled in [false, true] {
            for mode in [
                CompositionMode::MergedExponential,
                CompositionMode::SegmentProduct,
            ] {
                let scheme = field_scheme(&p, t, 5, controlled, mode).unwrap();
                let gens = scheme_generators(&scheme, &p.as_params()).unwrap();
                for (a, c) in [(0, 1), (0, 2), (1, 2)] {
                    ent_dev = ent_dev.max(
                        entangled_weak_comm(&gens[a], &gens[c], &psi)
                            .unwrap()
                            .norm(),
                    );
                }
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut pure_dev = 0.0f64;
    let samples = 200;
    for _ in 0..samples {
        let p = FieldPoint::new(
            rng.gen_range(0.1..=5.0),
            rng.gen_range(0.0..=PI),
            rng.gen_range(0.0..2.0 * PI),
        )
        .unwrap();
        let t = rng.gen_range(0.0..=5.0);
        let r = random_vec(&mut rng, 0.0, 1.0);
        let rho = BlochState::new(r).unwrap().density(&Su2Basis::default());
        let c = field_coefficients(&p);
        for controlled in [false, true] {
            let s = if controlled { Vec3::ZERO } else { c.x };
            let mats: Vec<CMat> = c
                .partials()
                .iter()
                .map(|d| {
                    if d.is_zero() {
                        CMat::zeros(2)
                    } else {
                        closed_form_generator(s, *d, t).unwrap().to_matrix()
                    }
                })
                .collect();
            let ours = weak_comm_example(&p, t, r, controlled).unwrap().to_array();
            for (k, (a, b)) in [(0, 1), (0, 2), (1, 2)].into_iter().enumerate() {
                let tr = oracle::trace_weak_comm(&mats[a], &mats[b], &rho);
                pure_dev = pure_dev.max((ours[k] - tr).norm());
            }
        }
    }
    (
        ent_dev <= 1e-12 && pure_dev <= 1e-12,
        format!(
            "entangled residuals {ent_dev:.2e} (tol 1e-12), \
             {samples} pure-qubit closed forms vs trace {pure_dev:.2e} (tol 1e-12)"
        ),
    )
}

fn heisenberg_scaling() -> Verdict {
    let p = fig_point();
    let ctl = precision_curves(&p, 1.0, 100, true, CurveProbe::Entangled).unwrap();
    let unc = precision_curves(&p, 1.0, 100, false, CurveProbe::Entangled).unwrap();
    let mut dev = 0.0f64;
    for r in &ctl {
        let n = r.n as f64;
        dev = dev
            .max((r.d_theta - 1.0 / (6.0 * n)).abs())
            .max((r.d_phi - 1.0 / (3.0 * n)).abs());
    }
    let min_unc = unc.iter().map(|r| r.d_theta).fold(f64::INFINITY, f64::min);
    (
        dev <= 1e-12 && min_unc >= 0.5,
        format!("controlled deviation {dev:.2e} (tol 1e-12), uncontrolled min dtheta {min_unc:.6}"),
    )
}

fn sld_identity() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut dev = 0.0f64;
    let samples = 150;
    for k in 0..samples {
        let dim = rng.gen_range(1..=3usize);
        let base = random_vec(&mut rng, 0.1, 3.0);
        let cols = (0..dim).map(|_| random_vec(&mut rng, 0.1, 2.0)).collect();
        let control = if k % 3 == 0 {
            Vec3::ZERO
        } else {
            random_vec(&mut rng, 0.0, 3.0)
        };
        let mode = if k % 2 == 0 {
            CompositionMode::MergedExponential
        } else {
            CompositionMode::SegmentProduct
        };
        let scheme = SchemeConfig::new(
            LinearMap::new(base, cols),
            control,
            rng.gen_range(0.05..=0.5),
            rng.gen_range(1..=6u64),
            mode,
        )
        .unwrap();
        let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-0.5..=0.5)).collect();
        let probe = match k % 3 {
            0 => BlochState::new(random_unit(&mut rng))
                .unwrap()
                .density(&Su2Basis::default()),
            1 => BlochState::new(random_vec(&mut rng, 0.0, 1.0))
                .unwrap()
                .density(&Su2Basis::default()),
            _ => oracle::projector(&phi_plus()),
        };
        dev = dev.max(sld_oracle(&scheme, &x, &probe).unwrap().identity_deviation);
    }
    (
        dev <= 1e-6,
        format!("{samples} random schemes and probes, max deviation {dev:.2e} (tol 1e-6)"),
    )
}

fn trotter_gap() -> Verdict {
    let truth = [3.0, FRAC_PI_6, 0.0];
    let estimate = [3.0, FRAC_PI_6 - 0.1, 0.0];
    let d = trotter_distances(Arc::new(FieldMap), &truth, &estimate, 5.0, &TROTTER_STEPS).unwrap();
    let field = successive_ratios(&d);
    let map = LinearMap::new(Vec3::new(0.6, -0.3, 0.7), vec![Vec3::new(0.2, 0.9, -0.1)]);
    let d = trotter_distances(Arc::new(map), &[0.0], &[-0.1], 5.0, &TROTTER_STEPS).unwrap();
    let generic = successive_ratios(&d);
    let ok = field
        .iter()
        .chain(&generic)
        .all(|r| (1.8..=2.2).contains(r));
    let fmt = |v: &[f64]| {
        v.iter()
            .map(|r| format!("{r:.4}"))
            .collect::<Vec<_>>()
            .join(", ")
    };
    (
        ok,
        format!(
            "field (B=3, theta offset 0.1) ratios [{}], generic ratios [{}]",
            fmt(&field),
            fmt(&generic)
        ),
    )
}

fn golden(name: &str) -> String {
    let path = format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

fn determinism() -> Verdict {
    let a = run_cli(&["verify", "--seed", "11", "--samples", "200"], None);
    let b = run_cli(&["verify", "--seed", "11", "--samples", "200"], None);
    let verify_ok = a.0 == 0 && a == b;

    let cases = [
        ("sweep_alpha.csv", vec!["sweep-alpha"], None),
        ("curves_controlled.csv", vec!["curves"], None),
        (
            "curves_uncontrolled.csv",
            vec!["curves"],
            Some(r#"{"control": "none"}"#),
        ),
    ];
    let mut stable = true;
    let mut mismatched = Vec::new();
    for (file, args, cfg) in cases {
        let first = run_cli(&args, cfg);
        let second = run_cli(&args, cfg);
        let same = first.0 == 0 && first == second && first.1 == golden(file);
        if !same {
            mismatched.push(file);
        }
        stable &= same;
    }
    (
        verify_ok && stable,
        format!(
            "verify summaries identical {verify_ok}, CSV goldens byte-stable {stable}{}",
            if mismatched.is_empty() {
                String::new()
            } else {
                format!(" (mismatch: {})", mismatched.join(", "))
            }
        ),
    )
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 9] = [
        ("generator oracle equivalence", generator_equivalence),
        ("QFIM golden values", qfim_golden),
        ("bound and controlled limit", bound_and_limit),
        ("control-gain sweep", gap_sweep),
        ("weak commutation", weak_commutation),
        ("Heisenberg scaling", heisenberg_scaling),
        ("SLD residual identity", sld_identity),
        ("Trotter halving ratio", trotter_gap),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (ok, detail) = match std::panic::catch_unwind(run) {
            Ok(v) => v,
            Err(_) => (false, "panicked".to_string()),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {} [{}] {name}: {detail}",
            i + 1,
            if ok { "PASS" } else { "FAIL" }
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
