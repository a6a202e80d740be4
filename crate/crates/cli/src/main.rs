use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use shadowlab_cli::config::{Builder, ExperimentConfig, ExperimentKind};
use shadowlab_cli::{render_file, run_experiment, CliError};

#[derive(Parser)]
#[command(name = "shadowlab", version, about = "Shadowing experiments on dendrites, hyperspaces and the cat map")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a dendrite system and write its file, report and drawing.
    Construct(ExperimentArgs),
    /// Shadow random pseudo-orbits of a simple system, or estimate the modulus over a δ grid.
    Shadow(ExperimentArgs),
    /// Shadow continuum pseudo-orbits in the hyperspace of a monotone system.
    HyperShadow(ExperimentArgs),
    /// Splice a stable and an unstable continuum of the cat map and refute shadowing over a candidate family.
    AnosovRefute(ExperimentArgs),
    /// Probe the diameter dichotomy on random short cat-map segments.
    Dichotomy(ExperimentArgs),
    /// Least return times between random balls under the cat map.
    Transitivity(ExperimentArgs),
    /// Build universal dendrite stages and run the invariant suite.
    UniversalDendrite(ExperimentArgs),
    /// Run whatever `kind` the config file names.
    Run(ExperimentArgs),
    /// Draw a dendrite file as SVG.
    Render {
        input: PathBuf,
        /// Defaults to the input with an `.svg` extension.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ExperimentArgs {
    /// TOML config; flags override its values.
    #[arg(short, long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    system: Option<Builder>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    left: Option<usize>,
    #[arg(long)]
    right: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    delta_grid: Option<Vec<f64>>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    mesh: Option<f64>,
    #[arg(long)]
    k_max: Option<u32>,
    /// Output directory; overrides the config and `SHADOWLAB_OUT`.
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[arg(long)]
    no_svg: bool,
}

macro_rules! overlay {
    ($dst:expr, $src:expr) => {
        if let Some(v) = $src {
            $dst = Some(v);
        }
    };
}

impl ExperimentArgs {
    fn config(self, kind: Option<ExperimentKind>) -> Result<ExperimentConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(kind) = kind {
            match cfg.kind {
                Some(k) if k != kind => {
                    return Err(CliError::Validation(format!("config is for `{}`, not `{}`", k.name(), kind.name())))
                }
                _ => cfg.kind = Some(kind),
            }
        }
        overlay!(cfg.seed, self.seed);
        let s = &mut cfg.system;
        overlay!(s.builder, self.system);
        overlay!(s.n, self.n);
        overlay!(s.k, self.k);
        overlay!(s.m, self.m);
        overlay!(s.left, self.left);
        overlay!(s.right, self.right);
        let p = &mut cfg.params;
        overlay!(p.eps, self.eps);
        overlay!(p.delta, self.delta);
        overlay!(p.delta_grid, self.delta_grid);
        overlay!(p.steps, self.steps);
        overlay!(p.trials, self.trials);
        overlay!(p.mesh, self.mesh);
        overlay!(p.k_max, self.k_max);
        overlay!(cfg.output.dir, self.out);
        if self.no_svg {
            cfg.output.svg = Some(false);
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (args, kind) = match cli.command {
        Command::Construct(a) => (a, Some(ExperimentKind::Construct)),
        Command::Shadow(a) => (a, Some(ExperimentKind::Shadow)),
        Command::HyperShadow(a) => (a, Some(ExperimentKind::HyperShadow)),
        Command::AnosovRefute(a) => (a, Some(ExperimentKind::AnosovRefute)),
        Command::Dichotomy(a) => (a, Some(ExperimentKind::Dichotomy)),
        Command::Transitivity(a) => (a, Some(ExperimentKind::Transitivity)),
        Command::UniversalDendrite(a) => (a, Some(ExperimentKind::UniversalDendrite)),
        Command::Run(a) => (a, None),
        Command::Render { input, output } => {
            let svg = render_file(&input)?;
            let output = output.unwrap_or_else(|| input.with_extension("svg"));
            std::fs::write(&output, svg).map_err(|e| CliError::Io(output.clone(), e))?;
            println!("{}", output.display());
            return Ok(());
        }
    };
    let artifacts = run_experiment(&args.config(kind)?)?;
    for f in &artifacts.files {
        println!("{}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
