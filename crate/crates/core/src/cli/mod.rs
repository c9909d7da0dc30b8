//! Config-driven experiment runner behind the `zitterlab` binary.

mod checks;
mod config;
mod plot;

use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub use checks::{algebra_report, random_ab, random_spinor, CheckRow, ALGEBRA_TOL};
pub use config::{
    AlgebraSettings, Command, PairsimSettings, RunConfig, ScanSettings, Settings, ZitterSettings,
};
pub use plot::{heatmap_svg, line_svg, Curve};

use crate::dynamics::{evolve_recording, fmt_f64, init_gaussian, zb_fit, ZbFitOptions};
use crate::electrocalc::calc_table;
use crate::error::{Error, Result};
use crate::pairsim::{
    amplitude_vs_field, detect_satellites_with, pair_mode_sum_series, satellite_speed_with,
};
use crate::planewave::PhysConsts;

/// Output files of one run, written together at the end.
#[derive(Default)]
struct Outputs {
    files: Vec<(String, Vec<u8>)>,
}

impl Outputs {
    fn add(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.files.push((name.into(), bytes));
    }

    fn csv(
        &mut self,
        name: &str,
        write: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
    ) -> Result<()> {
        let mut buf = Vec::new();
        write(&mut buf).map_err(|e| Error::io(name, e))?;
        self.add(name, buf);
        Ok(())
    }

    fn write_all(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        self.files
            .iter()
            .map(|(name, bytes)| {
                let path = dir.join(name);
                std::fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
                Ok(path)
            })
            .collect()
    }
}

/// What a finished run produced.
#[derive(Debug)]
pub struct RunSummary {
    pub output_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub results: Value,
}

/// Git-style object hash (`blob <len>\0<bytes>`) using SHA-256.
pub fn content_hash(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn constants_json(k: &PhysConsts) -> Value {
    json!({
        "hbar": k.hbar,
        "c": k.c,
        "m": k.m,
        "e": k.e,
        "eps0": k.eps0,
        "fine_structure": k.fine_structure(),
    })
}

fn run_algebra(
    s: &AlgebraSettings,
    cfg: &RunConfig,
    k: &PhysConsts,
    out: &mut Outputs,
) -> Result<Value> {
    let rows = algebra_report(cfg.seed, s.eigenstate_samples, s.spinor_samples, k)?;
    out.csv("algebra_checks.csv", |w| {
        use std::io::Write;
        writeln!(w, "check,max_error,tolerance,passed")?;
        for r in &rows {
            writeln!(
                w,
                "{},{},{},{}",
                r.name,
                fmt_f64(r.max_error),
                fmt_f64(r.tolerance),
                r.passed
            )?;
        }
        Ok(())
    })?;
    let all_passed = rows.iter().all(|r| r.passed);
    out.add("algebra_report.json", serde_json::to_vec_pretty(&rows)?);
    Ok(json!({ "all_passed": all_passed, "checks": rows }))
}

fn run_zitter(
    s: &ZitterSettings,
    cfg: &RunConfig,
    k: &PhysConsts,
    out: &mut Outputs,
) -> Result<Value> {
    let mut field = init_gaussian(s.grid, &s.packet, k).map_err(|e| e.context("initial packet"))?;
    let rec = evolve_recording(&mut field, &s.evolution, k)?;
    out.csv("position.csv", |w| rec.position.write_csv(w))?;
    out.csv("velocity.csv", |w| rec.velocity.write_csv(w))?;
    out.csv("norm.csv", |w| rec.norm.write_csv(w))?;
    out.csv("f_plus.csv", |w| rec.f_plus.write_csv(w))?;
    out.csv("snapshot.csv", |w| field.write_csv(w))?;
    let (_, drift) = crate::dynamics::linear_fit(&rec.position)?;
    let fit = match zb_fit(&rec.position, k) {
        Ok(f) => json!(f),
        Err(e @ (Error::NoPeak { .. } | Error::BadSeries(_))) => json!({ "error": e.to_string() }),
        Err(e) => return Err(e),
    };
    let norm_drift = rec
        .norm
        .values
        .iter()
        .map(|n| (n - rec.norm.values[0]).abs())
        .fold(0.0, f64::max);
    let results = json!({
        "drift_velocity": drift,
        "zb_fit": fit,
        "norm_drift": norm_drift,
        "expected_zb_angular_frequency": k.zb_angular_frequency(),
        "expected_zb_amplitude": 0.5 * k.compton_length(),
    });
    out.add("zb_fit.json", serde_json::to_vec_pretty(&results)?);
    if cfg.emit_svg {
        let svg = line_svg(
            "mean position",
            "t (a.u.)",
            "<x> (a.u.)",
            &[Curve::from(&rec.position)],
        )?;
        out.add("position.svg", svg.into_bytes());
    }
    Ok(results)
}

fn run_pairsim(
    s: &PairsimSettings,
    cfg: &RunConfig,
    k: &PhysConsts,
    out: &mut Outputs,
) -> Result<Value> {
    let runs = pair_mode_sum_series(&s.modes, &s.times, k)?;
    for (i, d) in runs.iter().enumerate() {
        out.csv(&format!("density_{i:03}.csv"), |w| d.write_csv(w))?;
    }
    let last = runs.last().expect("at least one time");
    if let Some(joint) = &last.joint {
        out.csv("joint_density.dat", |w| joint.write_matrix(w))?;
        if cfg.emit_svg {
            let x0 = s.modes.grid.x_min();
            out.add(
                "joint_density.svg",
                heatmap_svg("joint pair density", joint, x0, x0)?.into_bytes(),
            );
        }
    }
    if cfg.emit_svg {
        let xs: Vec<f64> = last.grid.points().collect();
        let curves = [
            Curve {
                label: "rho_e".into(),
                xs: xs.clone(),
                ys: last.rho_e.clone(),
            },
            Curve {
                label: "rho_p".into(),
                xs,
                ys: last.rho_p.clone(),
            },
        ];
        out.add(
            "density.svg",
            line_svg("created pair densities", "x (a.u.)", "density", &curves)?.into_bytes(),
        );
    }
    let numbers: Vec<Value> = runs
        .iter()
        .map(|d| json!({ "time": d.time, "electrons": d.electron_number(), "positrons": d.positron_number() }))
        .collect();

    let mut reports = Vec::new();
    let mut table =
        String::from("time,main_peak_x,separation,outer_separation,gap_depth,satellites\n");
    for d in &runs {
        let r = detect_satellites_with(d, &s.satellites);
        if let Ok(r) = &r {
            table.push_str(&format!(
                "{},{},{},{},{},{}\n",
                fmt_f64(r.time),
                fmt_f64(r.main_peak_x),
                fmt_f64(r.separation),
                fmt_f64(r.outer_separation()),
                fmt_f64(r.gap_depth),
                r.satellite_xs.len()
            ));
        }
        reports.push(r);
    }
    out.add("satellites.csv", table.into_bytes());
    let reports: Vec<_> = reports.into_iter().collect::<Result<_>>()?;
    let speed = if runs.len() >= 3 {
        Some(satellite_speed_with(&runs, &s.satellites)?)
    } else {
        None
    };
    Ok(json!({
        "pair_numbers": numbers,
        "satellites": reports,
        "satellite_speed": speed,
        "satellite_speed_over_c": speed.map(|v| v / k.c),
    }))
}

fn run_scan(s: &ScanSettings, cfg: &RunConfig, k: &PhysConsts, out: &mut Outputs) -> Result<Value> {
    let mut results = Vec::new();
    for scan in &s.scans {
        let table = amplitude_vs_field(&s.base, scan, s.time, k, &s.satellites)?;
        let name = format!("scan_{}", table.label);
        out.csv(&format!("{name}.csv"), |w| table.write_csv(w))?;
        if cfg.emit_svg {
            let xs: Vec<f64> = table.rows.iter().map(|r| r.parameter).collect();
            let curves = [
                Curve {
                    label: "measured separation".into(),
                    xs: xs.clone(),
                    ys: table.rows.iter().map(|r| r.separation).collect(),
                },
                Curve {
                    label: "hbar c / 2 E_eff".into(),
                    xs,
                    ys: table.rows.iter().map(|r| r.predicted).collect(),
                },
            ];
            let x_label = format!("{} (a.u.)", table.label);
            out.add(
                format!("{name}.svg"),
                line_svg(&name, &x_label, "separation (a.u.)", &curves)?.into_bytes(),
            );
        }
        let monotone = table.is_non_increasing(s.base.grid.dx());
        results.push(json!({ "scan": table, "non_increasing_within_dx": monotone }));
    }
    Ok(Value::Array(results))
}

fn run_calc(k: &PhysConsts, out: &mut Outputs) -> Result<Value> {
    let rows = calc_table(k)?;
    let mut csv = String::from("quantity,value,unit\n");
    for r in &rows {
        csv.push_str(&format!("{},{},{}\n", r.name, fmt_f64(r.value), r.unit));
        println!(
            "{:<30} {:>24} {}",
            r.name,
            format!("{:.10e}", r.value),
            r.unit
        );
    }
    out.add("calc.csv", csv.into_bytes());
    Ok(serde_json::to_value(&rows)?)
}

/// Runs `cfg` and writes its outputs (plus `metadata.json`) into the output directory.
pub fn run(cfg: &RunConfig, config_bytes: &[u8]) -> Result<RunSummary> {
    let k = cfg.consts();
    let mut out = Outputs::default();
    let outcome = match &cfg.settings {
        Settings::AlgebraCheck(s) => run_algebra(s, cfg, &k, &mut out),
        Settings::Zitter(s) => run_zitter(s, cfg, &k, &mut out),
        Settings::Pairsim(s) => run_pairsim(s, cfg, &k, &mut out),
        Settings::Scan(s) => run_scan(s, cfg, &k, &mut out),
        Settings::Calc => run_calc(&k, &mut out),
    };
    let results = match &outcome {
        Ok(v) => v.clone(),
        Err(e) => json!({ "error": e.to_string() }),
    };
    let metadata = json!({
        "command": cfg.command.name(),
        "units": cfg.units,
        "seed": cfg.seed,
        "config_hash": format!("sha256:{}", content_hash(config_bytes)),
        "config": cfg,
        "constants": constants_json(&k),
        "thresholds": {
            "hermitian": crate::algebra::HERMITIAN_TOL,
            "algebra": ALGEBRA_TOL,
            "zb_fit": ZbFitOptions::default(),
        },
        "approximations": [
            "free-field energy projectors define created particles",
            "zitterbewegung amplitude is the detrended dominant Fourier component of <x>(t)",
        ],
        "parallel_feature": crate::par::Execution::parallel_available(),
        "version": env!("CARGO_PKG_VERSION"),
        "results": results,
    });
    out.add("metadata.json", serde_json::to_vec_pretty(&metadata)?);
    let files = out.write_all(&cfg.output_dir)?;
    let results = outcome?;
    if let Settings::AlgebraCheck(_) = cfg.settings {
        if results["all_passed"] != Value::Bool(true) {
            let failed: Vec<&str> = results["checks"]
                .as_array()
                .into_iter()
                .flatten()
                .filter(|r| r["passed"] != Value::Bool(true))
                .filter_map(|r| r["name"].as_str())
                .collect();
            return Err(Error::ChecksFailed(failed.join(", ")));
        }
    }
    Ok(RunSummary {
        output_dir: cfg.output_dir.clone(),
        files,
        results,
    })
}

/// Reads the config at `path`, applies command-line overrides and runs it.
pub fn run_from_file(
    command: Command,
    path: &Path,
    out_dir: Option<&Path>,
    svg: bool,
) -> Result<RunSummary> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let text =
        std::str::from_utf8(&bytes).map_err(|_| Error::config("<root>", "config is not UTF-8"))?;
    let mut cfg = RunConfig::parse(command, text)?;
    if let Some(dir) = out_dir {
        cfg.output_dir = dir.to_path_buf();
    }
    cfg.emit_svg |= svg;
    run(&cfg, &bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn content_hash_matches_git_object_format() {
        // `printf 'hello\n' | git hash-object --object-format=sha256 --stdin`
        assert_eq!(
            content_hash(b"hello\n"),
            "2cf8d83d9ee29543b34a87727421fdecb7e3f3a183d337639025de576db9ebb4"
        );
    }
}
