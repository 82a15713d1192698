//! Run configuration: a flat `section.key = value` text format plus the
//! named parameter sets used throughout.
//!
//! ```text
//! preset = fig4            # optional base, later lines override it
//! gamma.omega = 1.01
//! pulse1.xi = 0.1
//! pulse1.omega = 1.01
//! pulse1.cycles = 4
//! pulse1.cep = 0           # in units of π
//! pulse2.xi = 0.2
//! delay.values = 0, 0.06L, 0.13L     # "L" = fraction of the first pulse length
//! delay.start = 0                    # or a range
//! delay.stop = 15
//! delay.step = 0.1
//! grid.radial = 200
//! grid.p_max = 2.5
//! output.path = ratio.csv
//! output.json = true
//! ```
//!
//! Unspecified pulse fields default to `ξ = 0.1`, `ω = 1.01`, `N = 4`,
//! `χ = 0`; the gamma energy defaults to `ω_γ = 1.01`; the delay defaults to
//! `D = 0`; unspecified grid fields follow [`GridSpec::for_max_xi`].

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::kinematics::GammaProbe;
use crate::probability::GridSpec;
use crate::pulse::PulseSpec;
use crate::sweep::DoublePulseConfig;

/// Short hex digest identifying a configuration.
pub fn fingerprint(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().take(8).fold(String::with_capacity(16), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// One pulse as written in a configuration; the CEP is in units of π.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseConfig {
    pub xi: f64,
    pub omega: f64,
    pub cycles: u32,
    pub cep_pi: f64,
}

impl Default for PulseConfig {
    fn default() -> Self {
        PulseConfig {
            xi: 0.1,
            omega: 1.01,
            cycles: 4,
            cep_pi: 0.0,
        }
    }
}

impl PulseConfig {
    pub const fn new(xi: f64, omega: f64, cycles: u32, cep_pi: f64) -> Self {
        PulseConfig {
            xi,
            omega,
            cycles,
            cep_pi,
        }
    }

    pub fn spec(&self) -> PulseSpec {
        PulseSpec::new(self.xi, self.omega, self.cycles, self.cep_pi * PI)
    }
}

/// Pulse A of the distinct-pulse studies; identical to P1.
pub const PULSE_P1: PulseConfig = PulseConfig::new(0.1, 1.01, 4, 0.0);
pub const PULSE_P2: PulseConfig = PulseConfig::new(0.6, 0.3535, 4, 0.0);
pub const PULSE_A: PulseConfig = PULSE_P1;
pub const PULSE_B: PulseConfig = PulseConfig::new(0.2, 0.808, 3, 0.5);
pub const PULSE_B2: PulseConfig = PulseConfig::new(1.0, 0.35, 4, 0.25);
pub const GAMMA_OMEGA: f64 = 1.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DelayValue {
    /// Gap in units of `λ_e`.
    Absolute(f64),
    /// Gap as a fraction of the first pulse's length.
    FractionOfLength(f64),
}

impl DelayValue {
    fn resolve(&self, first_length: f64) -> f64 {
        match *self {
            DelayValue::Absolute(d) => d,
            DelayValue::FractionOfLength(f) => f * first_length,
        }
    }

    fn label(&self) -> String {
        match self {
            DelayValue::Absolute(d) => format!("{d}"),
            DelayValue::FractionOfLength(f) => format!("{f}L"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DelaySpec {
    Values(Vec<DelayValue>),
    Range { start: f64, stop: f64, step: f64 },
}

impl Default for DelaySpec {
    fn default() -> Self {
        DelaySpec::Values(vec![DelayValue::Absolute(0.0)])
    }
}

impl DelaySpec {
    /// The standard sweep: 0 to 15 `λ_e` in steps of 0.1.
    pub fn standard_range() -> Self {
        DelaySpec::Range {
            start: 0.0,
            stop: 15.0,
            step: 0.1,
        }
    }

    pub fn values(&self, first_length: f64) -> Vec<f64> {
        match self {
            DelaySpec::Values(v) => v.iter().map(|d| d.resolve(first_length)).collect(),
            DelaySpec::Range { start, stop, step } => {
                let n = ((stop - start) / step + 1e-9).floor() as usize;
                (0..=n).map(|i| start + i as f64 * step).collect()
            }
        }
    }

    /// Labels used in column names, one per delay value.
    pub fn labels(&self, first_length: f64) -> Vec<String> {
        match self {
            DelaySpec::Values(v) => v.iter().map(DelayValue::label).collect(),
            DelaySpec::Range { .. } => self.values(first_length).iter().map(|d| format!("{d:.4}")).collect(),
        }
    }
}

/// Grid overrides; `None` falls back to the defaults for the pulses' ξ.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GridConfig {
    pub radial: Option<usize>,
    pub polar: Option<usize>,
    pub azimuthal: Option<usize>,
    pub p_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputConfig {
    pub path: Option<String>,
    pub json: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub gamma_omega: f64,
    pub pulses: Vec<PulseConfig>,
    pub delay: DelaySpec,
    pub grid: GridConfig,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            gamma_omega: GAMMA_OMEGA,
            pulses: vec![PulseConfig::default()],
            delay: DelaySpec::default(),
            grid: GridConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

pub const PRESET_NAMES: &[&str] = &[
    "p1",
    "p2",
    "fig2",
    "fig3-blue",
    "fig3-green",
    "fig3-xi1",
    "fig4",
    "fig4-cep0",
    "fig4-cep-half",
    "fig5",
    "fig5-xi015",
    "fig5-cep",
];

impl RunConfig {
    fn pair(first: PulseConfig, second: PulseConfig, delay: DelaySpec) -> Self {
        RunConfig {
            pulses: vec![first, second],
            delay,
            ..RunConfig::default()
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        let range = DelaySpec::standard_range;
        let p2_xi1 = PulseConfig { xi: 1.0, ..PULSE_P2 };
        let config = match name {
            "p1" => RunConfig {
                pulses: vec![PULSE_P1],
                ..RunConfig::default()
            },
            "p2" => RunConfig {
                pulses: vec![PULSE_P2],
                ..RunConfig::default()
            },
            "fig2" => Self::pair(
                PULSE_P1,
                PULSE_P1,
                DelaySpec::Values(vec![
                    DelayValue::Absolute(0.0),
                    DelayValue::FractionOfLength(0.06),
                    DelayValue::FractionOfLength(0.13),
                ]),
            ),
            "fig3-blue" => Self::pair(PULSE_P1, PULSE_P1, range()),
            "fig3-green" => Self::pair(PULSE_P2, PULSE_P2, range()),
            "fig3-xi1" => Self::pair(p2_xi1, p2_xi1, range()),
            "fig4" => Self::pair(PULSE_A, PULSE_B, range()),
            "fig4-cep0" => Self::pair(PULSE_A, PulseConfig { cep_pi: 0.0, ..PULSE_B }, range()),
            "fig4-cep-half" => Self::pair(
                PulseConfig { cep_pi: 0.5, ..PULSE_A },
                PulseConfig { cep_pi: 0.5, ..PULSE_B },
                range(),
            ),
            "fig5" => Self::pair(PULSE_A, PULSE_B2, range()),
            "fig5-xi015" => Self::pair(PulseConfig { xi: 0.15, ..PULSE_A }, PULSE_B2, range()),
            "fig5-cep" => Self::pair(
                PulseConfig { cep_pi: 0.25, ..PULSE_A },
                PulseConfig { cep_pi: 0.0, ..PULSE_B2 },
                range(),
            ),
            _ => {
                return Err(Error::validation(
                    "preset",
                    format!("unknown preset `{name}` (known: {})", PRESET_NAMES.join(", ")),
                ))
            }
        };
        Ok(config)
    }

    pub fn gamma(&self) -> GammaProbe {
        GammaProbe::new(self.gamma_omega)
    }

    pub fn first(&self) -> PulseSpec {
        self.pulses[0].spec()
    }

    pub fn second(&self) -> Option<PulseSpec> {
        self.pulses.get(1).map(PulseConfig::spec)
    }

    pub fn double(&self, gap: f64) -> Option<DoublePulseConfig> {
        self.second()
            .map(|second| DoublePulseConfig::new(self.first(), second, gap, self.gamma()))
    }

    pub fn delays(&self) -> Vec<f64> {
        self.delay.values(self.first().length())
    }

    pub fn max_xi(&self) -> f64 {
        self.pulses.iter().map(|p| p.xi).fold(0.0, f64::max)
    }

    /// Grid for this run; `scale` multiplies the node counts.
    pub fn grid_spec(&self, scale: f64) -> GridSpec {
        let base = GridSpec::for_max_xi(self.max_xi());
        let spec = GridSpec {
            radial: self.grid.radial.unwrap_or(base.radial),
            polar: self.grid.polar.unwrap_or(base.polar),
            azimuthal: self.grid.azimuthal.unwrap_or(base.azimuthal),
            p_max: self.grid.p_max.unwrap_or(base.p_max),
        };
        if scale == 1.0 {
            spec
        } else {
            spec.scaled(scale)
        }
    }

    pub fn fingerprint(&self) -> String {
        fingerprint(&self.to_text())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_omega > 0.0) {
            return Err(Error::validation("gamma.omega", "must be > 0"));
        }
        if self.pulses.is_empty() || self.pulses.len() > 2 {
            return Err(Error::validation(
                "pulses",
                format!("expected 1 or 2 pulses, got {}", self.pulses.len()),
            ));
        }
        for (i, p) in self.pulses.iter().enumerate() {
            p.spec().validate().map_err(|e| match e {
                Error::Validation { field, message } => Error::Validation {
                    field: format!("pulse{}.{field}", i + 1),
                    message,
                },
                other => other,
            })?;
        }
        match &self.delay {
            DelaySpec::Values(v) => {
                if v.is_empty() {
                    return Err(Error::validation("delay.values", "no delay values"));
                }
                let first_length = self.first().length();
                if v.iter().any(|d| !(d.resolve(first_length) >= 0.0)) {
                    return Err(Error::validation("delay.values", "gaps must be >= 0"));
                }
            }
            DelaySpec::Range { start, stop, step } => {
                if !(*start >= 0.0) || !(stop >= start) || !(*step > 0.0) {
                    return Err(Error::validation(
                        "delay",
                        format!("range needs 0 <= start <= stop and step > 0, got {start}..{stop} step {step}"),
                    ));
                }
            }
        }
        self.grid_spec(1.0).validate()
    }

    /// Canonical text form; parsing it yields an identical configuration.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "gamma.omega = {}", self.gamma_omega);
        for (i, p) in self.pulses.iter().enumerate() {
            let n = i + 1;
            let _ = writeln!(s, "pulse{n}.xi = {}", p.xi);
            let _ = writeln!(s, "pulse{n}.omega = {}", p.omega);
            let _ = writeln!(s, "pulse{n}.cycles = {}", p.cycles);
            let _ = writeln!(s, "pulse{n}.cep = {}", p.cep_pi);
        }
        match &self.delay {
            DelaySpec::Values(v) => {
                let list: Vec<String> = v.iter().map(DelayValue::label).collect();
                let _ = writeln!(s, "delay.values = {}", list.join(", "));
            }
            DelaySpec::Range { start, stop, step } => {
                let _ = writeln!(s, "delay.start = {start}");
                let _ = writeln!(s, "delay.stop = {stop}");
                let _ = writeln!(s, "delay.step = {step}");
            }
        }
        if let Some(v) = self.grid.radial {
            let _ = writeln!(s, "grid.radial = {v}");
        }
        if let Some(v) = self.grid.polar {
            let _ = writeln!(s, "grid.polar = {v}");
        }
        if let Some(v) = self.grid.azimuthal {
            let _ = writeln!(s, "grid.azimuthal = {v}");
        }
        if let Some(v) = self.grid.p_max {
            let _ = writeln!(s, "grid.p_max = {v}");
        }
        if let Some(p) = &self.output.path {
            let _ = writeln!(s, "output.path = {p}");
        }
        if self.output.json {
            let _ = writeln!(s, "output.json = true");
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut config = RunConfig::default();
        let mut pulses: [Option<PulseConfig>; 2] = [None, None];
        let mut explicit_pulses = false;
        let mut range: [Option<f64>; 3] = [None; 3];
        let mut values: Option<Vec<DelayValue>> = None;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Parse {
                    line: line_no,
                    field: line.to_string(),
                    message: "expected `key = value`".into(),
                });
            };
            let (key, value) = (key.trim(), value.trim());
            let err = |message: String| Error::Parse {
                line: line_no,
                field: key.to_string(),
                message,
            };
            let num = |v: &str| v.parse::<f64>().map_err(|e| err(format!("`{v}` is not a number ({e})")));
            let count = |v: &str| v.parse::<usize>().map_err(|e| err(format!("`{v}` is not a count ({e})")));

            if key == "preset" {
                if explicit_pulses || values.is_some() || range.iter().any(Option::is_some) {
                    return Err(err("`preset` must precede all other keys".into()));
                }
                let base = RunConfig::preset(value).map_err(|e| err(e.to_string()))?;
                for (slot, p) in pulses.iter_mut().zip(base.pulses.iter().map(Some).chain([None, None])) {
                    *slot = p.copied();
                }
                config = base;
                match &config.delay {
                    DelaySpec::Values(v) => values = Some(v.clone()),
                    DelaySpec::Range { start, stop, step } => range = [Some(*start), Some(*stop), Some(*step)],
                }
                continue;
            }

            let (section, field) = key.split_once('.').ok_or_else(|| err("expected `section.key`".into()))?;
            match (section, field) {
                ("gamma", "omega") => config.gamma_omega = num(value)?,
                ("pulse1" | "pulse2", _) => {
                    explicit_pulses = true;
                    let slot = &mut pulses[if section == "pulse1" { 0 } else { 1 }];
                    let p = slot.get_or_insert_with(PulseConfig::default);
                    match field {
                        "xi" => p.xi = num(value)?,
                        "omega" => p.omega = num(value)?,
                        "cycles" => p.cycles = value.parse().map_err(|e| err(format!("`{value}` is not a cycle count ({e})")))?,
                        "cep" => p.cep_pi = num(value)?,
                        _ => return Err(err("unknown pulse field (xi, omega, cycles, cep)".into())),
                    }
                }
                ("delay", "values") => {
                    range = [None; 3];
                    let list = value
                        .split(',')
                        .map(|v| {
                            let v = v.trim();
                            match v.strip_suffix('L') {
                                Some(frac) => num(frac.trim()).map(DelayValue::FractionOfLength),
                                None => num(v).map(DelayValue::Absolute),
                            }
                        })
                        .collect::<Result<Vec<_>>>()?;
                    values = Some(list);
                }
                ("delay", "start" | "stop" | "step") => {
                    values = None;
                    let i = ["start", "stop", "step"].iter().position(|f| *f == field).unwrap();
                    range[i] = Some(num(value)?);
                }
                ("grid", "radial") => config.grid.radial = Some(count(value)?),
                ("grid", "polar") => config.grid.polar = Some(count(value)?),
                ("grid", "azimuthal") => config.grid.azimuthal = Some(count(value)?),
                ("grid", "p_max") => config.grid.p_max = Some(num(value)?),
                ("output", "path") => config.output.path = Some(value.to_string()),
                ("output", "json") => {
                    config.output.json = value.parse().map_err(|_| err(format!("`{value}` is not true/false")))?
                }
                _ => return Err(err("unknown key".into())),
            }
        }

        config.pulses = pulses.iter().flatten().copied().collect();
        if pulses[0].is_none() && pulses[1].is_some() {
            return Err(Error::validation("pulse1", "pulse2 given without pulse1"));
        }
        if config.pulses.is_empty() {
            config.pulses.push(PulseConfig::default());
        }
        config.delay = match (values, range) {
            (Some(v), _) => DelaySpec::Values(v),
            (None, [None, None, None]) => DelaySpec::default(),
            (None, [start, stop, step]) => DelaySpec::Range {
                start: start.unwrap_or(0.0),
                stop: stop.ok_or_else(|| Error::validation("delay.stop", "range needs a stop value"))?,
                step: step.ok_or_else(|| Error::validation("delay.step", "range needs a step value"))?,
            },
        };
        config.validate()?;
        Ok(config)
    }
}

/// Loads a configuration file, or a preset when `source` names one.
pub fn load_config(source: &str) -> Result<RunConfig> {
    if PRESET_NAMES.contains(&source) {
        return RunConfig::preset(source);
    }
    let path = Path::new(source);
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        line: 0,
        field: source.to_string(),
        message: format!("cannot read configuration: {e}"),
    })?;
    RunConfig::parse(&text)
}
