use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use couette_lab::checkpoint::SimCheckpoint;
use couette_lab::drivers::simulate::{run_simulation_with, RunOptions};
use couette_lab::drivers::threshold::{workers_from_env, AmplitudePolicy};
use couette_lab::drivers::{run_inviscid_damping, run_linear_decay, run_threshold_sweep, verify_inequality_suite};
use couette_lab::{Result, RunManifest, SimConfig};

#[derive(Parser)]
#[command(name = "couette-lab", version, about = "Couette channel experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    /// Library defaults: ν = 1e-2, L_x = 2π/ν, 512 × 65, T = 50 ν^(-1/3), A = 1
    Default,
    /// Defaults with E₀ = 0.05 ν^(1/3) and 200 samples
    Stability,
    /// ν = 1e-3, L_x = 8π/ν, 32768 × 65, T = 100 ν^(-1/3)
    LinearDecay,
}

#[derive(Args)]
struct Common {
    /// Config file in `key = value` form
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Starting point when no config file is given
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// Extra `key=value` overrides, applied after the config file or preset
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long, env = "COUETTE_OUT_DIR", default_value = "out")]
    out_dir: PathBuf,
    /// File stem of the manifest; defaults to the subcommand name
    #[arg(long)]
    stem: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Nonlinear run with stability bounds, optionally with the ω_L + ω_e decomposition
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        decomposition: bool,
        /// Write the final state here
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Continue from a checkpoint
        #[arg(long)]
        resume: Option<PathBuf>,
    },
    /// Closed-form linear decay with power-law fits
    LinearDecay {
        #[command(flatten)]
        common: Common,
    },
    /// Bisected stability threshold across ν and the fitted exponent γ
    Threshold {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_values_t = [1e-2, 3e-3, 1e-3])]
        nus: Vec<f64>,
        #[arg(long, default_value_t = AmplitudePolicy::default().lo)]
        lo: f64,
        #[arg(long, default_value_t = AmplitudePolicy::default().hi)]
        hi: f64,
        #[arg(long, default_value_t = AmplitudePolicy::default().bisections)]
        bisections: usize,
        #[arg(long, default_value_t = AmplitudePolicy::default().max_widenings)]
        max_widenings: usize,
        /// Parallel sweep jobs; defaults to COUETTE_WORKERS or 1
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Weighted inviscid-damping integral at T/2 and T
    Inviscid {
        #[command(flatten)]
        common: Common,
    },
    /// Randomized inequality checks
    Verify {
        #[command(flatten)]
        common: Common,
        /// Suite ids, comma separated; all when omitted
        #[arg(long, value_delimiter = ',')]
        suite: Vec<String>,
        /// Overrides the config seed
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn config(common: &Common, fallback: Preset) -> Result<SimConfig> {
    let mut text = match &common.config {
        Some(p) => std::fs::read_to_string(p)?,
        None => match common.preset.unwrap_or(fallback) {
            Preset::Default => SimConfig::default(),
            Preset::Stability => SimConfig::stability_preset(),
            Preset::LinearDecay => SimConfig::linear_decay_preset(),
        }
        .to_text(),
    };
    for o in &common.overrides {
        text.push('\n');
        text.push_str(o);
    }
    SimConfig::parse(&text)
}

fn report(m: &RunManifest, dir: &Path, stem: &str) -> Result<ExitCode> {
    for c in &m.checks {
        println!("{} {} = {:e} ({:?})", if c.pass { "PASS" } else { "FAIL" }, c.name, c.value, c.limit);
    }
    for c in &m.constants {
        println!("     {} = {:e}", c.name, c.value);
    }
    for f in &m.fits {
        let verdict = match f.pass {
            Some(true) => "PASS",
            Some(false) => "FAIL",
            None => "    ",
        };
        println!("{verdict} slope {}.{} = {:.4} on [{:.1}, {:.1}]", f.series, f.column, f.fit.slope, f.window[0], f.window[1]);
    }
    for f in &m.flags {
        println!("FLAG {f}");
    }
    for p in m.write(dir, stem)? {
        println!("wrote {}", p.display());
    }
    let status = m.status();
    println!("status {status:?} ({:.1} s)", m.wall_clock_s);
    Ok(ExitCode::from(status.exit_code() as u8))
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Simulate {
            common,
            decomposition,
            checkpoint,
            resume,
        } => {
            let mut cfg = config(&common, Preset::Stability)?;
            cfg.decomposition |= decomposition;
            let start = resume.as_deref().map(SimCheckpoint::load).transpose()?;
            let opts = RunOptions {
                resume: start.as_ref(),
                ..RunOptions::default()
            };
            let (m, out) = run_simulation_with(&cfg, &opts)?;
            if let (Some(path), Some(state)) = (checkpoint, &out.final_state) {
                state.save(&path)?;
                println!("checkpoint {}", path.display());
            }
            report(&m, &common.out_dir, common.stem.as_deref().unwrap_or("simulate"))
        }
        Command::LinearDecay { common } => {
            let m = run_linear_decay(&config(&common, Preset::LinearDecay)?)?;
            report(&m, &common.out_dir, common.stem.as_deref().unwrap_or("linear-decay"))
        }
        Command::Threshold {
            common,
            nus,
            lo,
            hi,
            bisections,
            max_widenings,
            workers,
        } => {
            let policy = AmplitudePolicy {
                lo,
                hi,
                bisections,
                max_widenings,
                ..AmplitudePolicy::default()
            };
            let cfg = config(&common, Preset::Default)?;
            let m = run_threshold_sweep(&cfg, &nus, &policy, workers.unwrap_or_else(workers_from_env))?;
            report(&m, &common.out_dir, common.stem.as_deref().unwrap_or("threshold"))
        }
        Command::Inviscid { common } => {
            let m = run_inviscid_damping(&config(&common, Preset::Stability)?)?;
            report(&m, &common.out_dir, common.stem.as_deref().unwrap_or("inviscid"))
        }
        Command::Verify { common, suite, seed } => {
            let cfg = config(&common, Preset::Default)?;
            let m = verify_inequality_suite(&cfg, &suite, seed.unwrap_or(cfg.seed))?;
            report(&m, &common.out_dir, common.stem.as_deref().unwrap_or("verify"))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
