//! `ambisim` command-line harness.

mod control;
mod energy;
mod failure;
mod hybrid;
mod link;
mod output;
mod setup;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use failure::{CliResult, Failure};
use output::Run;

#[derive(Parser, Debug)]
#[command(name = "ambisim", version, about = "Hybrid active/passive ambient-IoT radio simulator")]
struct Cli {
    /// Master RNG seed.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Directory receiving artifacts and metadata.json.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    /// Sectioned `key = value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

/// PHY overrides applied as register writes over the `[device]` section.
#[derive(Args, Debug, Clone, Default)]
pub struct PhyArgs {
    #[arg(long)]
    protocol: Option<String>,
    #[arg(long)]
    modulation: Option<String>,
    /// Data rate, e.g. `250k` or `1M`.
    #[arg(long)]
    rate: Option<String>,
    #[arg(long)]
    sps: Option<String>,
    /// Subcarrier offset, or `none`.
    #[arg(long)]
    subcarrier: Option<String>,
    #[arg(long)]
    channel: Option<String>,
    #[arg(long)]
    line_coding: Option<String>,
    /// Further register writes, `key=value`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Bits to IQ through the configured PHY and transmit path.
    Modulate(link::ModulateArgs),
    /// IQ file back to bits.
    Demodulate(link::DemodulateArgs),
    /// Monte-Carlo BER/goodput sweep.
    BerSweep(link::SweepArgs),
    /// Capacitor/PMIC timeline under a harvester.
    EnergySim(energy::EnergyArgs),
    /// Hybrid mode-selection policy against the fixed-mode baselines.
    HybridDemo(hybrid::HybridArgs),
    /// Interaction frame codec.
    #[command(subcommand)]
    Frame(control::FrameCommand),
    /// Register bank operations.
    #[command(subcommand)]
    Registers(control::RegistersCommand),
    /// Fit the link budget to the distance and sensitivity anchors.
    CalibrateLink(link::CalibrateArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Modulate(_) => "modulate",
            Command::Demodulate(_) => "demodulate",
            Command::BerSweep(_) => "ber-sweep",
            Command::EnergySim(_) => "energy-sim",
            Command::HybridDemo(_) => "hybrid-demo",
            Command::Frame(control::FrameCommand::Encode(_)) => "frame encode",
            Command::Frame(control::FrameCommand::Decode(_)) => "frame decode",
            Command::Registers(_) => "registers apply",
            Command::CalibrateLink(_) => "calibrate-link",
        }
    }
}

fn dispatch(cli: Cli) -> CliResult<()> {
    let cfg = setup::load_config(cli.config.as_deref())?;
    let mut run = Run::new(&cli.out_dir, cli.seed, cli.command.name(), cli.config.as_deref())?;
    log::debug!("{} seed={} out_dir={}", cli.command.name(), cli.seed, cli.out_dir.display());
    match &cli.command {
        Command::Modulate(a) => link::modulate(&mut run, &cfg, a)?,
        Command::Demodulate(a) => link::demodulate(&mut run, &cfg, a)?,
        Command::BerSweep(a) => link::ber_sweep(&mut run, &cfg, a)?,
        Command::EnergySim(a) => energy::energy_sim(&mut run, &cfg, a)?,
        Command::HybridDemo(a) => hybrid::hybrid_demo(&mut run, &cfg, a)?,
        Command::Frame(c) => control::frame(&mut run, c)?,
        Command::Registers(c) => control::registers(&mut run, &cfg, c)?,
        Command::CalibrateLink(a) => link::calibrate(&mut run, a)?,
    }
    run.finish()
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(Failure::Usage(String::new()).code() as u8),
            };
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{f}");
            ExitCode::from(f.code() as u8)
        }
    }
}
