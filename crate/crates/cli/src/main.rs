//! `bwdelay`: command-line driver for the double-pulse pair-creation simulator.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context as _, Result};
use bwdelay_core::config::{fingerprint, RunConfig};
use bwdelay_core::model::EnergyEstimate;
use bwdelay_core::output;
use bwdelay_core::{
    dressed_energy_stats, energy_spectrum, exchange_order, gaussian_ratio_model, order_sum_check, sweep_delay,
    total_probability, PulseSequence, QuadConfig, Simulator,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bwdelay", version, about = "Pair creation by a gamma quantum in two delayed laser pulses")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Energy spectra dP/dp for the single pulse and for each delay.
    Spectrum(Common),
    /// Total probabilities for each delay.
    Total(Common),
    /// Ratio curve R(D) over the configured delays.
    Sweep(Common),
    /// Both pulse orders and the sum-rule residual for each delay.
    Exchange(Common),
    /// Laser-dressed energy statistics and the Gaussian ratio model.
    Model {
        #[command(flatten)]
        common: Common,
        /// How ⟨E_L⟩ and ΔE_L are extracted from the energy distribution.
        #[arg(long, value_enum, default_value_t = Estimate::Moments)]
        estimate: Estimate,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Estimate {
    Moments,
    Fit,
}

#[derive(Args)]
struct Common {
    /// Named parameter set (e.g. fig3-blue, fig4).
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    preset: Option<String>,
    /// Configuration file in `section.key = value` form.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV path; defaults to `output.path` from the configuration,
    /// then to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Multiplier on the momentum-grid node counts.
    #[arg(long, default_value_t = 1.0)]
    grid_scale: f64,
    /// Worker threads (0 = all cores).
    #[arg(long, env = "BWDELAY_THREADS")]
    threads: Option<usize>,
    /// Also write `<out>.json` with run metadata.
    #[arg(long)]
    json: bool,
}

struct Run {
    name: &'static str,
    config: RunConfig,
    sim: Simulator,
    print: String,
    started: Instant,
    out: Option<PathBuf>,
    json: bool,
}

impl Run {
    fn new(name: &'static str, common: &Common) -> Result<Self> {
        let started = Instant::now();
        if let Some(threads) = common.threads {
            rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
        }
        let config = match (&common.preset, &common.config) {
            (Some(p), _) => RunConfig::preset(p)?,
            (None, Some(path)) => bwdelay_core::load_config(&path.to_string_lossy())?,
            (None, None) => bail!("either --preset or --config is required"),
        };
        if !(common.grid_scale > 0.0) {
            bail!("--grid-scale must be > 0, got {}", common.grid_scale);
        }
        let grid = config.grid_spec(common.grid_scale);
        let sim = Simulator::new(grid, config.gamma(), QuadConfig::default())?;
        let print = fingerprint(&format!("{name}|{:?}|{}", grid, config.to_text()));
        let out = common.out.clone().or_else(|| config.output.path.clone().map(PathBuf::from));
        let json = common.json || config.output.json;
        Ok(Run {
            name,
            config,
            sim,
            print,
            started,
            out,
            json,
        })
    }

    fn double_required(&self) -> Result<()> {
        if self.config.pulses.len() < 2 {
            bail!("`{}` needs two pulses (set pulse2.* or use a double-pulse preset)", self.name);
        }
        Ok(())
    }

    fn emit(&self, csv: &str, extra: &[(&str, String)]) -> Result<()> {
        match &self.out {
            Some(path) => write_file(path, csv)?,
            None => std::io::stdout().write_all(csv.as_bytes())?,
        }
        for (suffix, text) in extra {
            let path = sibling(self.out.as_deref(), suffix)?;
            write_file(&path, text)?;
        }
        if self.json {
            let path = sibling(self.out.as_deref(), "json")?;
            let spec = self.sim.grid.spec;
            let dropped: usize = self
                .config
                .pulses
                .iter()
                .filter_map(|p| self.sim.pulse(&p.spec()).ok())
                .map(|t| t.dropped)
                .sum();
            let meta = serde_json::json!({
                "tool": "bwdelay",
                "version": env!("CARGO_PKG_VERSION"),
                "command": self.name,
                "fingerprint": self.print,
                "config": self.config.to_text(),
                "grid": {
                    "radial": spec.radial,
                    "polar": spec.polar,
                    "azimuthal": spec.azimuthal,
                    "p_max": spec.p_max,
                    "nodes": self.sim.grid.nodes.len(),
                    "dropped_nodes": dropped,
                },
                "wall_time_s": self.started.elapsed().as_secs_f64(),
            });
            write_file(&path, &serde_json::to_string_pretty(&meta)?)?;
        }
        Ok(())
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// `ratio.csv` + `json` → `ratio.json`.
fn sibling(out: Option<&Path>, suffix: &str) -> Result<PathBuf> {
    let out = out.ok_or_else(|| anyhow!("--out is required when writing side files"))?;
    Ok(out.with_extension(suffix))
}

fn spectrum(run: &Run) -> Result<()> {
    let cfg = &run.config;
    let first = energy_spectrum(&PulseSequence::Single(cfg.first()), &run.sim)?;
    let mut columns = vec![("dP_dp_single".to_string(), first)];
    if let Some(second) = cfg.second() {
        if second != cfg.first() {
            columns.push((
                "dP_dp_second_single".into(),
                energy_spectrum(&PulseSequence::Single(second), &run.sim)?,
            ));
        }
        let labels = cfg.delay.labels(cfg.first().length());
        for (gap, label) in cfg.delays().into_iter().zip(labels) {
            let seq = PulseSequence::Double(cfg.double(gap).unwrap());
            columns.push((format!("dP_dp_double_D{label}"), energy_spectrum(&seq, &run.sim)?));
        }
    }
    let refs: Vec<(String, &_)> = columns.iter().map(|(n, s)| (n.clone(), s)).collect();
    run.emit(&output::spectrum_csv(&refs, &run.print), &[])
}

fn total(run: &Run) -> Result<()> {
    let cfg = &run.config;
    let p_first = total_probability(&PulseSequence::Single(cfg.first()), &run.sim)?;
    let csv = match cfg.second() {
        None => output::scalar_csv("total", &["P_single"], &[p_first], &run.print),
        Some(_) => {
            let curve = sweep_delay(&cfg.double(0.0).unwrap(), &cfg.delays(), &run.sim)?;
            output::ratio_csv(&curve, &run.print)
        }
    };
    run.emit(&csv, &[])
}

fn sweep(run: &Run) -> Result<()> {
    run.double_required()?;
    let cfg = &run.config;
    let curve = sweep_delay(&cfg.double(0.0).unwrap(), &cfg.delays(), &run.sim)?;
    run.emit(&output::ratio_csv(&curve, &run.print), &[])
}

fn exchange(run: &Run) -> Result<()> {
    run.double_required()?;
    let cfg = &run.config;
    let forward = cfg.double(0.0).unwrap();
    let rows = cfg
        .delays()
        .into_iter()
        .map(|d| order_sum_check(&forward, d, &run.sim).map(|c| (d, c)))
        .collect::<bwdelay_core::Result<Vec<_>>>()?;
    let reverse = sweep_delay(&exchange_order(&forward), &cfg.delays(), &run.sim)?;
    run.emit(
        &output::exchange_csv(&rows, &run.print),
        &[("reversed.csv", output::ratio_csv(&reverse, &run.print))],
    )
}

fn model(run: &Run, estimate: Estimate) -> Result<()> {
    let cfg = &run.config;
    let table = run.sim.pulse(&cfg.first())?;
    let stats = dressed_energy_stats(&table, &run.sim.grid)?;
    let estimate = match estimate {
        Estimate::Moments => EnergyEstimate::Moments,
        Estimate::Fit => EnergyEstimate::GaussianFit,
    };
    let curve = gaussian_ratio_model(&stats, estimate, table.field.length, &cfg.delays())?;
    run.emit(
        &output::ratio_csv(&curve, &run.print),
        &[("energy.csv", output::model_stats_csv(&stats, &run.print))],
    )
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Spectrum(c) => spectrum(&Run::new("spectrum", &c)?),
        Command::Total(c) => total(&Run::new("total", &c)?),
        Command::Sweep(c) => sweep(&Run::new("sweep", &c)?),
        Command::Exchange(c) => exchange(&Run::new("exchange", &c)?),
        Command::Model { common, estimate } => model(&Run::new("model", &common)?, estimate),
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let category = err
                .downcast_ref::<bwdelay_core::Error>()
                .map_or("runtime-error", |e| e.category());
            eprintln!("error[{category}]: {err:#}");
            ExitCode::from(2)
        }
    }
}
