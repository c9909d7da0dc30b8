//! Flat JSON run configuration with dotted-section keys.

use std::collections::BTreeSet;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::algebra::Complex;
use crate::dynamics::{max_resolving_dt, EvolutionConfig, GaussianPacket, Grid1D};
use crate::error::{Error, Result};
use crate::pairsim::{FieldScan, ModeSumConfig, PotentialSpec, SatelliteOptions};
use crate::par::Execution;
use crate::planewave::{PhysConsts, UnitSystem, C_ATOMIC};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    AlgebraCheck,
    Zitter,
    Pairsim,
    Scan,
    Calc,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::AlgebraCheck => "algebra-check",
            Command::Zitter => "zitter",
            Command::Pairsim => "pairsim",
            Command::Scan => "scan",
            Command::Calc => "calc",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "algebra-check" => Command::AlgebraCheck,
            "zitter" => Command::Zitter,
            "pairsim" => Command::Pairsim,
            "scan" => Command::Scan,
            "calc" => Command::Calc,
            other => {
                return Err(Error::config(
                    "command",
                    format!("unknown command `{other}`"),
                ))
            }
        })
    }
}

/// Settings for `algebra-check`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlgebraSettings {
    pub eigenstate_samples: usize,
    pub spinor_samples: usize,
}

/// Settings for `zitter`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZitterSettings {
    pub grid: Grid1D,
    pub packet: GaussianPacket,
    pub evolution: EvolutionConfig,
}

/// Settings for `pairsim`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairsimSettings {
    pub modes: ModeSumConfig,
    pub times: Vec<f64>,
    pub satellites: SatelliteOptions,
}

/// Settings for `scan`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanSettings {
    pub base: ModeSumConfig,
    pub scans: Vec<FieldScan>,
    pub time: f64,
    pub satellites: SatelliteOptions,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Settings {
    AlgebraCheck(AlgebraSettings),
    Zitter(ZitterSettings),
    Pairsim(PairsimSettings),
    Scan(ScanSettings),
    Calc,
}

/// Fully resolved run configuration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub units: UnitSystem,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub emit_svg: bool,
    pub settings: Settings,
}

/// Reference scales of the active unit system: one bohr and one atomic time
/// unit, expressed through `hbar`, `m` and `c`.
struct Scales {
    length: f64,
    time: f64,
}

impl Scales {
    fn of(k: &PhysConsts) -> Self {
        Scales {
            length: k.compton_length() * C_ATOMIC,
            time: k.hbar / k.rest_energy() * C_ATOMIC * C_ATOMIC,
        }
    }
}

/// Key reader that remembers which keys were consumed.
struct Fields {
    map: Map<String, Value>,
    used: BTreeSet<String>,
}

impl Fields {
    fn take(&mut self, key: &str) -> Option<&Value> {
        self.used.insert(key.to_string());
        self.map.get(key).filter(|v| !v.is_null())
    }

    fn f64(&mut self, key: &str) -> Result<Option<f64>> {
        match self.take(key) {
            None => Ok(None),
            Some(v) => v
                .as_f64()
                .filter(|x| x.is_finite())
                .map(Some)
                .ok_or_else(|| Error::config(key, format!("expected a finite number, got {v}"))),
        }
    }

    fn usize(&mut self, key: &str) -> Result<Option<usize>> {
        match self.take(key) {
            None => Ok(None),
            Some(v) => v.as_u64().map(|x| Some(x as usize)).ok_or_else(|| {
                Error::config(key, format!("expected a non-negative integer, got {v}"))
            }),
        }
    }

    fn bool(&mut self, key: &str) -> Result<Option<bool>> {
        match self.take(key) {
            None => Ok(None),
            Some(v) => v
                .as_bool()
                .map(Some)
                .ok_or_else(|| Error::config(key, format!("expected true or false, got {v}"))),
        }
    }

    fn string(&mut self, key: &str) -> Result<Option<String>> {
        match self.take(key) {
            None => Ok(None),
            Some(v) => v
                .as_str()
                .map(|s| Some(s.to_string()))
                .ok_or_else(|| Error::config(key, format!("expected a string, got {v}"))),
        }
    }

    fn f64_list(&mut self, key: &str) -> Result<Option<Vec<f64>>> {
        let Some(v) = self.take(key) else {
            return Ok(None);
        };
        let bad = || Error::config(key, format!("expected an array of finite numbers, got {v}"));
        let arr = v.as_array().ok_or_else(bad)?;
        arr.iter()
            .map(|x| x.as_f64().filter(|f| f.is_finite()).ok_or_else(bad))
            .collect::<Result<Vec<f64>>>()
            .map(Some)
    }

    fn finish(self) -> Result<()> {
        match self.map.keys().find(|k| !self.used.contains(*k)) {
            Some(unknown) => Err(Error::config(unknown.clone(), "unknown key")),
            None => Ok(()),
        }
    }
}

fn attach(path: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::ConfigInvalid { .. } => e,
        other => Error::config(path, other.to_string()),
    }
}

fn parse_grid(f: &mut Fields, s: &Scales, n_default: usize, length_default: f64) -> Result<Grid1D> {
    let n = f.usize("grid.n")?.unwrap_or(n_default);
    let length = f.f64("grid.length")?;
    let x_min = f.f64("grid.x_min")?;
    let x_max = f.f64("grid.x_max")?;
    match (length, x_min, x_max) {
        (Some(_), Some(_), _) | (Some(_), _, Some(_)) => Err(Error::config(
            "grid.length",
            "give either grid.length or grid.x_min/grid.x_max",
        )),
        (_, Some(lo), Some(hi)) => Grid1D::new(n, lo, hi).map_err(attach("grid")),
        (_, Some(_), None) | (_, None, Some(_)) => Err(Error::config(
            "grid.x_max",
            "grid.x_min and grid.x_max go together",
        )),
        (length, None, None) => {
            Grid1D::centered(n, length.unwrap_or(length_default * s.length)).map_err(attach("grid"))
        }
    }
}

fn parse_potential(f: &mut Fields, k: &PhysConsts, s: &Scales) -> Result<PotentialSpec> {
    let kind = f.string("potential.kind")?;
    let v0 = f.f64("potential.v0")?;
    let v0_rest = f.f64("potential.v0_rest")?;
    let width = f.f64("potential.width")?;
    let values = f.f64_list("potential.values")?;
    let kind = kind.as_deref().unwrap_or("zero");
    let stray = match kind {
        "zero" => [
            ("potential.v0", v0.is_some()),
            ("potential.v0_rest", v0_rest.is_some()),
            ("potential.width", width.is_some()),
            ("potential.values", values.is_some()),
        ]
        .to_vec(),
        "tanh_step" => vec![("potential.values", values.is_some())],
        _ => vec![
            ("potential.v0", v0.is_some()),
            ("potential.v0_rest", v0_rest.is_some()),
            ("potential.width", width.is_some()),
        ],
    };
    if let Some((key, _)) = stray.into_iter().find(|(_, present)| *present) {
        return Err(Error::config(
            key,
            format!("not used by potential kind `{kind}`"),
        ));
    }
    let spec = match kind {
        "zero" => PotentialSpec::Zero,
        "tanh_step" => {
            let v0 = match (v0, v0_rest) {
                (Some(_), Some(_)) => {
                    return Err(Error::config(
                        "potential.v0",
                        "give either potential.v0 or potential.v0_rest",
                    ))
                }
                (Some(v), None) => v,
                (None, Some(r)) => r * k.rest_energy(),
                (None, None) => 2.5 * k.rest_energy(),
            };
            let width = width.unwrap_or(0.3 / C_ATOMIC * s.length);
            PotentialSpec::TanhStep { v0, width }
        }
        "table" => PotentialSpec::Table {
            values: values
                .ok_or_else(|| Error::config("potential.values", "required for kind `table`"))?,
        },
        other => {
            return Err(Error::config(
                "potential.kind",
                format!("expected zero, tanh_step or table, got `{other}`"),
            ))
        }
    };
    spec.validate().map_err(attach("potential"))?;
    Ok(spec)
}

fn parse_satellites(f: &mut Fields) -> Result<SatelliteOptions> {
    let d = SatelliteOptions::default();
    let threshold = f.f64("satellites.threshold")?.unwrap_or(d.threshold);
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::config("satellites.threshold", "must lie in (0, 1)"));
    }
    let min_separation_points = f
        .usize("satellites.min_separation_points")?
        .unwrap_or(d.min_separation_points);
    if min_separation_points == 0 {
        return Err(Error::config(
            "satellites.min_separation_points",
            "must be at least 1",
        ));
    }
    Ok(SatelliteOptions {
        threshold,
        min_separation_points,
    })
}

fn parse_modes(f: &mut Fields, s: &Scales, potential: PotentialSpec) -> Result<ModeSumConfig> {
    let grid = parse_grid(f, s, 512, 2.0)?;
    let n_modes = f.usize("pairsim.n_modes")?;
    if let Some(m) = n_modes {
        if m == 0 || m > grid.n() {
            return Err(Error::config(
                "pairsim.n_modes",
                format!("must lie in 1..={}", grid.n()),
            ));
        }
    }
    let dt_max = f.f64("pairsim.dt_max")?.unwrap_or(2e-6 * s.time);
    if !(dt_max > 0.0) {
        return Err(Error::config("pairsim.dt_max", "must be positive"));
    }
    let joint = f.bool("pairsim.joint")?.unwrap_or(false);
    if joint && grid.n() > crate::pairsim::MAX_JOINT_POINTS {
        return Err(Error::config(
            "pairsim.joint",
            Error::JointTooLarge { n: grid.n() }.to_string(),
        ));
    }
    let execution = match f.string("pairsim.execution")?.as_deref() {
        None | Some("parallel") => Execution::Parallel,
        Some("sequential") => Execution::Sequential,
        Some(other) => {
            return Err(Error::config(
                "pairsim.execution",
                format!("expected parallel or sequential, got `{other}`"),
            ))
        }
    };
    Ok(ModeSumConfig {
        grid,
        potential,
        n_modes,
        dt_max,
        joint,
        execution,
    })
}

fn sorted_times(times: Vec<f64>, key: &str) -> Result<Vec<f64>> {
    if times.is_empty() {
        return Err(Error::config(key, "needs at least one time"));
    }
    if times.iter().any(|&t| t < 0.0) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::config(
            key,
            "times must be non-negative and strictly increasing",
        ));
    }
    Ok(times)
}

impl RunConfig {
    /// Parses `text` for `command`. A `command` key inside the file must agree.
    pub fn parse(command: Command, text: &str) -> Result<RunConfig> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| Error::config("<root>", e.to_string()))?;
        let Value::Object(map) = value else {
            return Err(Error::config("<root>", "config must be a JSON object"));
        };
        let mut f = Fields {
            map,
            used: BTreeSet::new(),
        };
        if let Some(c) = f.string("command")? {
            if Command::parse(&c)? != command {
                return Err(Error::config(
                    "command",
                    format!("file is for `{c}` but `{}` was requested", command.name()),
                ));
            }
        }
        let units: UnitSystem = match f.take("units") {
            None => UnitSystem::AtomicUnits,
            Some(v) => serde_json::from_value(v.clone()).map_err(|_| {
                Error::config("units", format!("expected atomic, si or natural, got {v}"))
            })?,
        };
        let k = PhysConsts::for_system(units);
        let s = Scales::of(&k);
        let seed = f.usize("seed")?.unwrap_or(0) as u64;
        let output_dir = PathBuf::from(f.string("output.dir")?.unwrap_or_else(|| "out".into()));
        let emit_svg = f.bool("output.svg")?.unwrap_or(false);

        let settings = match command {
            Command::Calc => Settings::Calc,
            Command::AlgebraCheck => Settings::AlgebraCheck(AlgebraSettings {
                eigenstate_samples: f.usize("algebra.eigenstate_samples")?.unwrap_or(100),
                spinor_samples: f.usize("algebra.spinor_samples")?.unwrap_or(10_000),
            }),
            Command::Zitter => {
                let grid = parse_grid(&mut f, &s, 1024, 2.0)?;
                let potential = parse_potential(&mut f, &k, &s)?;
                let c_plus = f
                    .f64("packet.c_plus")?
                    .unwrap_or(std::f64::consts::FRAC_1_SQRT_2);
                let c_minus = f
                    .f64("packet.c_minus")?
                    .unwrap_or(std::f64::consts::FRAC_1_SQRT_2);
                let phase = f.f64("packet.phase")?.unwrap_or(0.0);
                let packet = GaussianPacket {
                    x0: f.f64("packet.x0")?.unwrap_or(0.0),
                    p0: f.f64("packet.p0")?.unwrap_or(0.0),
                    sigma_x: f.f64("packet.sigma_x")?.unwrap_or(0.1 * s.length),
                    c_plus: Complex::new(c_plus, 0.0),
                    c_minus: Complex::from_polar(c_minus, phase),
                };
                let dt = f.f64("evolution.dt")?.unwrap_or(max_resolving_dt(&k) / 4.0);
                let evolution = EvolutionConfig {
                    dt,
                    n_steps: f.usize("evolution.n_steps")?.unwrap_or(4000),
                    potential,
                    record_every: f.usize("evolution.record_every")?.unwrap_or(1),
                };
                evolution.validate(&grid, &k).map_err(|e| match &e {
                    Error::Resolution { bound } if bound.starts_with("dt") => {
                        Error::config("evolution.dt", e.to_string())
                    }
                    Error::Resolution { bound } if bound.starts_with("n_steps") => {
                        Error::config("evolution.n_steps", e.to_string())
                    }
                    Error::Resolution { .. } => Error::config("grid.n", e.to_string()),
                    _ => attach("potential")(e),
                })?;
                crate::dynamics::init_gaussian(grid, &packet, &k).map_err(attach("packet"))?;
                Settings::Zitter(ZitterSettings {
                    grid,
                    packet,
                    evolution,
                })
            }
            Command::Pairsim => {
                let potential = parse_potential(&mut f, &k, &s)?;
                let modes = parse_modes(&mut f, &s, potential)?;
                modes
                    .potential
                    .sample(&modes.grid)
                    .map_err(attach("potential"))?;
                let times = f
                    .f64_list("pairsim.times")?
                    .unwrap_or_else(|| [2e-4, 4e-4, 6e-4, 8e-4].map(|t| t * s.time).to_vec());
                Settings::Pairsim(PairsimSettings {
                    modes,
                    times: sorted_times(times, "pairsim.times")?,
                    satellites: parse_satellites(&mut f)?,
                })
            }
            Command::Scan => {
                let base = parse_modes(&mut f, &s, PotentialSpec::Zero)?;
                let c2 = k.rest_energy();
                let v0s = f.f64_list("scan.v0s")?;
                let widths = f.f64_list("scan.widths")?;
                let fixed_v0 = f.f64("scan.v0")?.unwrap_or(2.5 * c2);
                let fixed_width = f.f64("scan.width")?.unwrap_or(0.3 / C_ATOMIC * s.length);
                let v0s = v0s.unwrap_or_else(|| vec![2.2 * c2, 2.5 * c2, 3.0 * c2, 4.0 * c2]);
                let widths = widths
                    .unwrap_or_else(|| [0.3, 0.1, 0.03].map(|w| w / C_ATOMIC * s.length).to_vec());
                let check_len = |key: &str, n: usize| {
                    if n < 3 {
                        Err(Error::config(
                            key,
                            format!("needs at least 3 values, got {n}"),
                        ))
                    } else {
                        Ok(())
                    }
                };
                check_len("scan.v0s", v0s.len())?;
                check_len("scan.widths", widths.len())?;
                for (key, v) in v0s
                    .iter()
                    .map(|v| ("scan.v0s", *v))
                    .chain([("scan.v0", fixed_v0)])
                {
                    if v <= 2.0 * c2 {
                        return Err(Error::config(
                            key,
                            format!("V0 = {v} is not above 2 m c^2 = {}", 2.0 * c2),
                        ));
                    }
                }
                for (key, w) in widths
                    .iter()
                    .map(|w| ("scan.widths", *w))
                    .chain([("scan.width", fixed_width)])
                {
                    if !(w > 0.0) {
                        return Err(Error::config(key, "widths must be positive"));
                    }
                }
                let time = f.f64("scan.time")?.unwrap_or(8e-4 * s.time);
                if !(time > 0.0) {
                    return Err(Error::config("scan.time", "must be positive"));
                }
                Settings::Scan(ScanSettings {
                    scans: vec![
                        FieldScan::Strength {
                            v0s,
                            width: fixed_width,
                        },
                        FieldScan::Width {
                            widths,
                            v0: fixed_v0,
                        },
                    ],
                    base,
                    time,
                    satellites: parse_satellites(&mut f)?,
                })
            }
        };
        f.finish()?;
        Ok(RunConfig {
            command,
            units,
            seed,
            output_dir,
            emit_svg,
            settings,
        })
    }

    pub fn consts(&self) -> PhysConsts {
        PhysConsts::for_system(self.units)
    }
}
