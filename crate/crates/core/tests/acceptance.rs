use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use nalgebra::Matrix4;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use zitterlab::algebra::{dirac_matrices, eigen_hermitian, Complex, Mat4, Spinor};
use zitterlab::dynamics::{
    dense_evolve_oracle, detrended_max_abs, evolve_recording, init_gaussian, linear_fit,
    max_resolving_dt, zb_fit, EvolutionConfig, GaussianPacket, Grid1D, SplitStepPropagator,
};
use zitterlab::electrocalc::{
    compton_wavelength, darwin_shift_s_state, round_sig, rounded_si_speed, self_potential,
    shell_model_energy, unit_convert, zb_self_energy, ComptonVariant, Dimension, EnergyUnit,
    UnitQuantity,
};
use zitterlab::pairsim::{
    amplitude_vs_field, detect_satellites, pair_mode_sum_series, satellite_speed, FieldScan,
    ModeSumConfig, PotentialSpec, SatelliteOptions,
};
use zitterlab::planewave::{
    energy, energy_content, velocity_eigenstate, velocity_expectation, Axis, MomentumPoint,
    PhysConsts, UnitSystem, VelocityEigenstateSpec, VelocitySign,
};

const ALGEBRA_TOL: f64 = 1e-12;
const EIGENSTATE_SAMPLES: usize = 100;
const SPINOR_SAMPLES: usize = 10_000;
const BAND_EDGE: f64 = 1e-9;
const BAND_SPLIT_TOL: f64 = 1e-6;
const DRIFT_REL_TOL: f64 = 0.01;
const DRIFT_ZB_MAX_COMPTON: f64 = 1e-3;
const ZB_FREQ_REL_TOL: f64 = 0.02;
const ZB_AMP_REL_TOL: f64 = 0.10;
const ORACLE_POINTS: usize = 64;
const ORACLE_STEPS: usize = 100;
const ORACLE_TOL: f64 = 1e-8;
const NORM_DRIFT_PER_1000: f64 = 1e-10;
const NULL_TOL: f64 = 1e-12;
const GAP_MAX: f64 = 0.5;
const SEPARATION_FACTOR: f64 = 2.0;
const SPEED_REL_TOL: f64 = 0.05;
const PAIR_TIMES: [f64; 4] = [2e-4, 4e-4, 6e-4, 8e-4];
const SI_SELF_ENERGY_EV: f64 = 3.73e3;
const SI_SELF_ENERGY_REL_TOL: f64 = 0.005;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn to_na(m: &Mat4) -> Matrix4<Complex64> {
    Matrix4::from_fn(|i, j| m.0[i][j])
}

fn max_modulus<'a>(entries: impl IntoIterator<Item = &'a Complex64>) -> f64 {
    entries.into_iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn random_ab(rng: &mut ChaCha8Rng) -> (Complex, Complex) {
    let theta = rng.gen_range(0.0..PI / 2.0);
    let r = 0.5f64.sqrt();
    (
        Complex::from_polar(r * theta.cos(), rng.gen_range(0.0..2.0 * PI)),
        Complex::from_polar(r * theta.sin(), rng.gen_range(0.0..2.0 * PI)),
    )
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let (alphas, beta) = dirac_matrices();
    let mats: Vec<Matrix4<Complex64>> = alphas.iter().chain([&beta]).map(to_na).collect();
    let id = Matrix4::<Complex64>::identity();
    let mut err = 0.0f64;
    for (i, a) in mats.iter().enumerate() {
        for (j, b) in mats.iter().enumerate() {
            let want = if i == j {
                id * Complex64::new(2.0, 0.0)
            } else {
                Matrix4::zeros()
            };
            err = err.max(max_modulus(&(a * b + b * a - want)));
        }
        err = err.max(a.trace().norm());
        err = err.max(max_modulus(&(a - a.adjoint())));
    }
    for m in alphas.iter().chain([&beta]) {
        let eig = eigen_hermitian(m).expect("hermitian");
        for (v, want) in eig.values.iter().zip([-1.0, -1.0, 1.0, 1.0]) {
            err = err.max((v - want).abs());
        }
    }
    let elapsed = start.elapsed();
    outcome(
        err <= ALGEBRA_TOL && elapsed < Duration::from_secs(1),
        format!("max entry error {err:.2e} (tol {ALGEBRA_TOL:e}), {elapsed:.2?}"),
    )
}

fn criterion_2() -> Outcome {
    let k = PhysConsts::atomic();
    let (alphas, _) = dirac_matrices();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut eig_err, mut content_err) = (0.0f64, 0.0f64);
    for _ in 0..EIGENSTATE_SAMPLES {
        let (a, b) = random_ab(&mut rng);
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            for (sign, s) in [(VelocitySign::Plus, 1.0), (VelocitySign::Minus, -1.0)] {
                let psi = velocity_eigenstate(&VelocityEigenstateSpec { axis, a, b, sign })
                    .expect("valid spec");
                let na = to_na(&alphas[axis.index()]) * Complex64::new(k.c, 0.0);
                let v = nalgebra::Vector4::from_fn(|i, _| psi.0[i]);
                let diff = na * v - v * Complex64::new(s * k.c, 0.0);
                eig_err = eig_err.max(max_modulus(&diff));
                let (fp, fm) = energy_content(&psi.normalized(), MomentumPoint(0.0), &k);
                content_err = content_err.max((fp - 0.5).abs()).max((fm - 0.5).abs());
            }
        }
    }
    outcome(
        eig_err <= ALGEBRA_TOL && content_err <= ALGEBRA_TOL,
        format!(
            "{EIGENSTATE_SAMPLES} draws: eigen residual {eig_err:.2e}, energy split error {content_err:.2e}"
        ),
    )
}

fn criterion_3() -> Outcome {
    let k = PhysConsts::atomic();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut excess, mut band_err, mut in_band) = (f64::NEG_INFINITY, 0.0f64, 0usize);
    for i in 0..SPINOR_SAMPLES {
        let psi = if i % 100 == 0 {
            let (a, b) = random_ab(&mut rng);
            velocity_eigenstate(&VelocityEigenstateSpec {
                axis: Axis::X,
                a,
                b,
                sign: VelocitySign::Minus,
            })
            .expect("valid spec")
            .normalized()
        } else {
            Spinor(std::array::from_fn(|_| {
                Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            }))
            .normalized()
        };
        let v = velocity_expectation(&psi, Axis::X, &k).abs();
        excess = excess.max(v - k.c);
        if v >= k.c - BAND_EDGE {
            in_band += 1;
            let (fp, fm) = energy_content(&psi, MomentumPoint(0.0), &k);
            band_err = band_err.max((fp - 0.5).abs()).max((fm - 0.5).abs());
        }
    }
    outcome(
        excess <= ALGEBRA_TOL * k.c && in_band > 0 && band_err <= BAND_SPLIT_TOL,
        format!(
            "max(|<c alpha_x>| - c) = {excess:.2e}, {in_band} spinors at the bound with split error {band_err:.2e}"
        ),
    )
}

fn zitter_grid() -> Grid1D {
    Grid1D::centered(1024, 2.0).unwrap()
}

fn zitter_evolution(k: &PhysConsts) -> EvolutionConfig {
    EvolutionConfig {
        dt: max_resolving_dt(k) / 4.0,
        n_steps: 4000,
        potential: PotentialSpec::Zero,
        record_every: 1,
    }
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let k = PhysConsts::atomic();
    let p0 = 0.05 * k.m * k.c;
    let packet = GaussianPacket {
        x0: -0.3,
        p0,
        sigma_x: 0.1,
        c_plus: Complex::new(1.0, 0.0),
        c_minus: Complex::new(0.0, 0.0),
    };
    let mut field = init_gaussian(zitter_grid(), &packet, &k).unwrap();
    let rec = evolve_recording(&mut field, &zitter_evolution(&k), &k).unwrap();
    let (_, drift) = linear_fit(&rec.position).unwrap();
    let want = k.c * k.c * p0 / energy(MomentumPoint(p0), &k);
    let rel = (drift / want - 1.0).abs();
    let wiggle = detrended_max_abs(&rec.position).unwrap() / k.compton_length();
    let elapsed = start.elapsed();
    outcome(
        rel <= DRIFT_REL_TOL && wiggle <= DRIFT_ZB_MAX_COMPTON && elapsed < Duration::from_secs(30),
        format!(
            "drift {drift:.6} vs {want:.6} ({:.3}%), residual {wiggle:.2e} hbar/mc, {elapsed:.2?}",
            100.0 * rel
        ),
    )
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let k = PhysConsts::atomic();
    let h = 0.5f64.sqrt();
    let packet = GaussianPacket {
        x0: 0.0,
        p0: 0.0,
        sigma_x: 0.1,
        c_plus: Complex::new(h, 0.0),
        c_minus: Complex::new(h, 0.0),
    };
    let mut field = init_gaussian(zitter_grid(), &packet, &k).unwrap();
    let rec = evolve_recording(&mut field, &zitter_evolution(&k), &k).unwrap();
    let elapsed = start.elapsed();
    match zb_fit(&rec.position, &k) {
        Ok(fit) => {
            let omega = 2.0 * k.m * k.c * k.c / k.hbar;
            let amp = k.hbar / (2.0 * k.m * k.c);
            let (fe, ae) = (
                (fit.angular_frequency / omega - 1.0).abs(),
                (fit.amplitude / amp - 1.0).abs(),
            );
            outcome(
                fe <= ZB_FREQ_REL_TOL && ae <= ZB_AMP_REL_TOL && elapsed < Duration::from_secs(60),
                format!(
                    "omega {:.1} vs {omega:.1} ({:.2}%), amplitude {:.5} vs {amp:.5} ({:.2}%), {elapsed:.2?}",
                    fit.angular_frequency,
                    100.0 * fe,
                    fit.amplitude,
                    100.0 * ae
                ),
            )
        }
        Err(e) => outcome(false, format!("fit failed: {e}")),
    }
}

fn criterion_6() -> Outcome {
    let k = PhysConsts::atomic();
    let grid = Grid1D::centered(ORACLE_POINTS, 0.15).unwrap();
    let dt = 1e-3 * k.hbar / k.rest_energy();
    let potential = PotentialSpec::Zero;
    let packet = GaussianPacket {
        x0: -0.01,
        p0: 0.3 * k.c,
        sigma_x: 0.012,
        c_plus: Complex::new(0.8, 0.0),
        c_minus: Complex::new(0.0, 0.6),
    };
    let field = init_gaussian(grid, &packet, &k).unwrap();
    let oracle = dense_evolve_oracle(&field, dt, ORACLE_STEPS, &potential, &k).unwrap();
    let prop = SplitStepPropagator::new(grid, dt, &potential, &k).unwrap();
    let mut ws = prop.workspace();
    let mut split = field.clone();
    prop.evolve(&mut split, ORACLE_STEPS, &mut ws);
    let dev = split.max_diff(&oracle);

    let n0 = field.norm_sqr();
    let mut long = field.clone();
    prop.evolve(&mut long, 1000, &mut ws);
    let drift = (long.norm_sqr() - n0).abs();
    outcome(
        dev <= ORACLE_TOL && drift <= NORM_DRIFT_PER_1000,
        format!(
            "max deviation {dev:.2e} (tol {ORACLE_TOL:e}), norm drift {drift:.2e} per 1000 steps"
        ),
    )
}

fn criterion_7() -> Outcome {
    let k = PhysConsts::atomic();
    let cfg = ModeSumConfig::desk(PotentialSpec::Zero);
    let runs = pair_mode_sum_series(&cfg, &[PAIR_TIMES[0], PAIR_TIMES[3]], &k).unwrap();
    let max = runs
        .iter()
        .flat_map(|d| d.rho_e.iter().chain(&d.rho_p))
        .fold(0.0f64, |m, v| m.max(v.abs()));
    outcome(
        max <= NULL_TOL,
        format!("max created density {max:.2e} (tol {NULL_TOL:e})"),
    )
}

fn desk_step(v0: f64, width: f64) -> ModeSumConfig {
    ModeSumConfig::desk(PotentialSpec::TanhStep { v0, width })
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let k = PhysConsts::atomic();
    let cfg = desk_step(2.5 * k.c * k.c, 0.3 / k.c);
    let runs = pair_mode_sum_series(&cfg, &PAIR_TIMES, &k).unwrap();
    let report = match detect_satellites(runs.last().unwrap()) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("no satellites at t = 8e-4: {e}")),
    };
    let compton = 2.0 * PI * k.hbar / (k.m * k.c);
    let a = report.gap_depth < GAP_MAX;
    let b = report.separation >= compton / SEPARATION_FACTOR
        && report.separation <= compton * SEPARATION_FACTOR;
    let (c, speed_text) = match satellite_speed(&runs) {
        Ok(v) => (
            (v / k.c - 1.0).abs() <= SPEED_REL_TOL,
            format!("{:.4} c", v / k.c),
        ),
        Err(e) => (false, e.to_string()),
    };
    let si = rounded_si_speed(0.10, 8e-4).unwrap();
    let si_ok = si == 2.8e8;
    let elapsed = start.elapsed();
    outcome(
        a && b && c && si_ok && elapsed < Duration::from_secs(300),
        format!(
            "(a) gap {:.3} (b) separation {:.4} in [{:.4}, {:.4}] (c) speed {speed_text}, SI {si:e} m/s, {elapsed:.2?}",
            report.gap_depth,
            report.separation,
            compton / SEPARATION_FACTOR,
            compton * SEPARATION_FACTOR
        ),
    )
}

fn criterion_9() -> Outcome {
    let k = PhysConsts::atomic();
    let c2 = k.c * k.c;
    let base = desk_step(2.5 * c2, 0.3 / k.c);
    let dx = base.grid.dx();
    let opts = SatelliteOptions::default();
    let scans = [
        FieldScan::Strength {
            v0s: vec![2.2 * c2, 2.5 * c2, 3.0 * c2, 4.0 * c2],
            width: 0.3 / k.c,
        },
        FieldScan::Width {
            widths: vec![0.3 / k.c, 0.1 / k.c, 0.03 / k.c],
            v0: 2.5 * c2,
        },
    ];
    let mut passed = true;
    let mut parts = Vec::new();
    for scan in &scans {
        match amplitude_vs_field(&base, scan, PAIR_TIMES[3], &k, &opts) {
            Ok(table) => {
                let ok = table.is_non_increasing(dx);
                passed &= ok;
                let seps: Vec<String> = table
                    .rows
                    .iter()
                    .map(|r| format!("{:.4}", r.separation))
                    .collect();
                parts.push(format!(
                    "{} [{}] {}",
                    table.label,
                    seps.join(", "),
                    if ok { "non-increasing" } else { "increases" }
                ));
            }
            Err(e) => {
                passed = false;
                parts.push(format!("{}: {e}", scan.label()));
            }
        }
    }
    outcome(passed, format!("{} (slack dx = {dx:.4})", parts.join("; ")))
}

fn criterion_10() -> Outcome {
    let au = PhysConsts::atomic();
    let si = PhysConsts::si();
    let mut fails = Vec::new();
    let mut check = |name: &str, ok: bool| {
        if !ok {
            fails.push(name.to_string());
        }
    };
    for k in [au, si, PhysConsts::natural()] {
        let lhs = -k.e * self_potential(&k);
        let want = k.fine_structure() * k.rest_energy();
        check(
            "self potential",
            (lhs - want).abs() <= 4.0 * f64::EPSILON * want,
        );
        let shell = shell_model_energy(k.hbar / (2.0 * k.m * k.c), &k).unwrap();
        let direct = zb_self_energy(&k);
        check(
            "shell model",
            ((shell.value - direct.value) / direct.value).abs() <= 1e-12,
        );
    }
    let kev = zb_self_energy(&si).to_unit(EnergyUnit::EV).value;
    check(
        "SI self energy",
        (kev / SI_SELF_ENERGY_EV - 1.0).abs() <= SI_SELF_ENERGY_REL_TOL,
    );
    let length = unit_convert(
        UnitQuantity::atomic(0.05, Dimension::Length),
        UnitSystem::SI,
    )
    .unwrap()
    .value;
    let time = unit_convert(UnitQuantity::atomic(8e-4, Dimension::Time), UnitSystem::SI)
        .unwrap()
        .value;
    let speed = rounded_si_speed(0.10, 8e-4).unwrap();
    check("2.6e-12 m", round_sig(length, 2) == 2.6e-12);
    check("1.9e-20 s", round_sig(time, 2) == 1.9e-20);
    check("2.8e8 m/s", speed == 2.8e8);
    let compton = compton_wavelength(ComptonVariant::HOverMc, &si)
        .unwrap()
        .value;
    check("h/mc", round_sig(compton, 2) == 2.4e-12);
    let darwin = darwin_shift_s_state(1, 1, 0, &au).unwrap().shift.value;
    let want = 2.0 / (3.0 * au.c * au.c);
    check("darwin", (darwin - want).abs() <= 4.0 * f64::EPSILON * want);
    outcome(
        fails.is_empty(),
        format!(
            "self energy {kev:.1} eV, {length:.3e} m, {time:.3e} s, {speed:e} m/s, darwin {darwin:.6e}{}",
            if fails.is_empty() {
                String::new()
            } else {
                format!(", failed: {}", fails.join(", "))
            }
        ),
    )
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv" || x == "dat"))
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect();
    out.sort();
    out
}

fn criterion_11() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_zitterlab");
    let tmp = tempfile::tempdir().unwrap();
    let runs: [(&str, &str); 3] = [
        (
            "algebra-check",
            r#"{"seed": 11, "algebra.spinor_samples": 2000}"#,
        ),
        ("zitter", r#"{"seed": 11, "evolution.n_steps": 400}"#),
        (
            "pairsim",
            r#"{"seed": 11, "grid.n": 128, "grid.length": 1.0, "potential.kind": "tanh_step",
               "potential.v0_rest": 2.5, "pairsim.times": [1e-4, 2e-4], "pairsim.joint": true}"#,
        ),
    ];
    let mut details = Vec::new();
    let mut passed = true;
    for (command, body) in runs {
        let cfg = tmp.path().join(format!("{command}.json"));
        std::fs::write(&cfg, body).unwrap();
        let mut outputs = Vec::new();
        for rep in 0..2 {
            let out = tmp.path().join(format!("{command}-{rep}"));
            let status = Command::new(exe)
                .args([command, "--config"])
                .arg(&cfg)
                .arg("--out")
                .arg(&out)
                .stdout(Stdio::null())
                .stderr(Stdio::null())
                .status()
                .unwrap();
            // pairsim may legitimately report no structure on this tiny grid
            if !matches!(status.code(), Some(0) | Some(2)) {
                passed = false;
            }
            outputs.push(csv_files(&out));
        }
        let same = !outputs[0].is_empty() && outputs[0] == outputs[1];
        passed &= same;
        details.push(format!(
            "{command}: {} files {}",
            outputs[0].len(),
            if same { "identical" } else { "differ" }
        ));
    }
    outcome(passed, details.join(", "))
}

fn main() {
    let filter: Option<String> = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let criteria: [Criterion; 11] = [
        ("1 algebra", criterion_1),
        ("2 velocity eigenstates", criterion_2),
        ("3 velocity bound", criterion_3),
        ("4 free drift", criterion_4),
        ("5 zitterbewegung", criterion_5),
        ("6 oracle equivalence", criterion_6),
        ("7 pairsim null", criterion_7),
        ("8 satellites", criterion_8),
        ("9 amplitude scaling", criterion_9),
        ("10 calculator", criterion_10),
        ("11 determinism", criterion_11),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        if filter.as_deref().is_some_and(|f| !name.contains(f)) {
            continue;
        }
        let o = run();
        println!(
            "{} criterion {name}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.passed);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
