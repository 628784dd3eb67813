//! `twistwave`: reproducible recipes for angularly accelerating electron waves.
//!
//! Every flag has a config key of the same name. `--config FILE` reads a JSON
//! object whose keys override the flags. Each run stages its files inside the
//! output directory and moves them into place only on success, followed by
//! `run.json` with the resolved config, its hash and the crate versions.
//!
//! Exit status: 0 on success, 2 for configuration errors, 3 when a numerical
//! method fails to converge.

// `!(x > 0.0)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod error;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;

use commands::Context;
use error::Result;
use run::{resolve, Manifest, Staging};

#[derive(Debug, Parser)]
#[command(
    name = "twistwave",
    version,
    about = "Angularly accelerating electron waves: fields, holograms, focal series and fits"
)]
struct Cli {
    /// JSON config whose keys override the flags
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Seed for noise models
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Intensity and phase images of an anisotropic or accelerating wave
    Wave(commands::WaveArgs),
    /// Rotation-law curves and petal tracks on a tube
    Kinematics(commands::KinematicsArgs),
    /// Electromagnetic field profiles and the far-cylinder flux check
    Fields(commands::FieldsArgs),
    /// Probability-current flux lines
    Trajectories(commands::TrajectoriesArgs),
    /// Double-ring hologram mask
    Hologram(commands::HologramArgs),
    /// Synthetic focal series
    Series(commands::SeriesArgs),
    /// Rotation fit of a stored focal series
    Fit(commands::FitArgs),
    /// Intensity volume of a stored focal series
    Volume(commands::VolumeArgs),
}

type Body<T> = fn(&T, &Context) -> Result<String>;

fn execute<T>(name: &str, flags: &T, cli: &Cli, body: Body<T>) -> Result<()>
where
    T: Serialize + DeserializeOwned,
{
    let resolved = resolve(
        name,
        flags,
        cli.out.clone(),
        cli.seed,
        cli.config.as_deref(),
    )?;
    let staging = Staging::new(&resolved.out, name)?;
    let ctx = Context {
        dir: staging.dir(),
        seed: resolved.seed,
    };
    let summary = body(&resolved.params, &ctx)?;
    let manifest = staging.commit(Manifest::new(name, resolved.config, resolved.seed))?;
    println!("{name}: {summary}");
    println!(
        "{name}: {} files in {} (config {})",
        manifest.outputs.len(),
        resolved.out.display(),
        &manifest.config_hash[..12]
    );
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Wave(a) => execute("wave", a, cli, commands::wave),
        Command::Kinematics(a) => execute("kinematics", a, cli, commands::kinematics),
        Command::Fields(a) => execute("fields", a, cli, commands::fields),
        Command::Trajectories(a) => execute("trajectories", a, cli, commands::trajectories),
        Command::Hologram(a) => execute("hologram", a, cli, commands::hologram),
        Command::Series(a) => execute("series", a, cli, commands::series),
        Command::Fit(a) => execute("fit", a, cli, commands::fit),
        Command::Volume(a) => execute("volume", a, cli, commands::volume),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("twistwave: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
