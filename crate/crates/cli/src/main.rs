use abm_cli::commands;
use abm_cli::output::write_rows;
use abm_cli::spec::{Estimator, Format, ModelKind};
use abm_cli::{CliError, RunSpec};
use abm_core::rib::Genotype;
use abm_core::NeighborLaw;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "abm", version, about = "Agent-based simulations and recurrence estimates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One run; writes agent positions and states.
    Simulate(RunArgs),
    /// Replicate runs; writes per-step mean and sample std per state.
    Ensemble(RunArgs),
    /// Recurrence estimate only.
    Grr(RunArgs),
    /// Ensemble statistics next to the recurrence estimate.
    Compare(RunArgs),
    /// `compare` over a list of values for one parameter.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Parameter to vary, e.g. shh_log, n0, w
        #[arg(long)]
        param: String,
        /// Comma-separated values
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        values: Vec<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Gol,
    Rib,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum EstimatorArg {
    Closed,
    Probe,
}

/// Flags shared by every subcommand. Each one overrides the config file.
#[derive(Args)]
struct RunArgs {
    /// TOML run specification
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Output file (stdout if omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for ensembles
    #[arg(long)]
    workers: Option<usize>,
    /// Output format
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Model family
    #[arg(long, value_enum)]
    model: Option<ModelArg>,
    /// GoL environment side length
    #[arg(long)]
    w: Option<u32>,
    /// GoL lower survival bound
    #[arg(long)]
    lsurv: Option<u32>,
    /// GoL upper survival bound
    #[arg(long)]
    usurv: Option<u32>,
    /// GoL lower reproduction bound
    #[arg(long)]
    lrep: Option<u32>,
    /// GoL upper reproduction bound
    #[arg(long)]
    urep: Option<u32>,
    /// Rib genotype: normal, apaf1ko, shhko or dko
    #[arg(long)]
    genotype: Option<Genotype>,
    /// Rib log10 Hh source intensity
    #[arg(long, allow_hyphen_values = true)]
    shh_log: Option<f64>,
    /// Initial agent count
    #[arg(long)]
    n0: Option<u64>,
    /// Initial agents per unit square (overrides --n0)
    #[arg(long)]
    density: Option<f64>,
    /// Number of steps
    #[arg(long)]
    horizon: Option<u64>,
    /// Ensemble replicates
    #[arg(long)]
    replicates: Option<u64>,
    /// Recurrence estimator
    #[arg(long, value_enum)]
    estimator: Option<EstimatorArg>,
    /// GoL neighbor-count law: binomial or poisson
    #[arg(long)]
    mode: Option<NeighborLaw>,
    /// Probe samples per state and step
    #[arg(long)]
    samples: Option<u64>,
    /// Agent dump interval in steps
    #[arg(long)]
    dump_every: Option<u64>,
    /// Drop dead agents from memory (counts stay exact)
    #[arg(long)]
    prune_dead: bool,
    /// Include dead agents in agent dumps
    #[arg(long)]
    include_dead: bool,
}

impl RunArgs {
    fn spec(&self) -> Result<RunSpec, CliError> {
        let mut s = match &self.config {
            Some(path) => RunSpec::load(path)?,
            None => RunSpec::default(),
        };
        if let Some(m) = self.model {
            s.model = match m {
                ModelArg::Gol => ModelKind::Gol,
                ModelArg::Rib => ModelKind::Rib,
            };
        }
        if let Some(v) = self.seed {
            s.seed = v;
        }
        if let Some(v) = &self.out {
            s.output.out = Some(v.clone());
        }
        if let Some(v) = self.workers {
            s.workers = v;
        }
        if let Some(f) = self.format {
            s.output.format = match f {
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
            };
        }
        let gol = [
            ("w", self.w),
            ("l_surv", self.lsurv),
            ("u_surv", self.usurv),
            ("l_rep", self.lrep),
            ("u_rep", self.urep),
        ];
        if gol.iter().any(|(_, v)| v.is_some()) && s.model != ModelKind::Gol {
            return Err(CliError::Validation("GoL flags need --model gol".into()));
        }
        for (name, v) in gol {
            if let Some(v) = v {
                s.set_param(name, f64::from(v))?;
            }
        }
        if (self.genotype.is_some() || self.shh_log.is_some()) && s.model != ModelKind::Rib {
            return Err(CliError::Validation("--genotype and --shh-log need --model rib".into()));
        }
        if let Some(g) = self.genotype {
            s.rib.genotype = g;
        }
        if let Some(v) = self.shh_log {
            s.rib_params.shh_log_intensity = Some(v);
        }
        if let Some(v) = self.n0 {
            s.init.n0 = Some(v);
            s.init.density = None;
        }
        if let Some(v) = self.density {
            s.init.density = Some(v);
        }
        if let Some(v) = self.horizon {
            s.horizon = v;
        }
        if let Some(v) = self.replicates {
            s.ensemble.replicates = v;
        }
        if let Some(e) = self.estimator {
            s.grr.estimator = match e {
                EstimatorArg::Closed => Estimator::Closed,
                EstimatorArg::Probe => Estimator::Probe,
            };
        }
        if let Some(v) = self.mode {
            s.grr.mode = v;
        }
        if let Some(v) = self.samples {
            s.grr.samples_per_state = v;
        }
        if let Some(v) = self.dump_every {
            s.ensemble.dump_every = Some(v);
        }
        s.ensemble.prune_dead |= self.prune_dead;
        s.output.include_dead |= self.include_dead;
        s.validate()?;
        Ok(s)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(a) => {
            let s = a.spec()?;
            write_rows(&commands::simulate(&s)?, s.output.format, s.output.out.as_deref())
        }
        Command::Ensemble(a) => {
            let s = a.spec()?;
            if s.ensemble.dump_every.is_some() && s.output.out.is_none() {
                return Err(CliError::Validation("--dump-every with `ensemble` needs --out".into()));
            }
            let t = commands::ensemble(&s)?;
            commands::write_ensemble(&s, &t)
        }
        Command::Grr(a) => {
            let s = a.spec()?;
            write_rows(&commands::grr(&s)?, s.output.format, s.output.out.as_deref())
        }
        Command::Compare(a) => {
            let s = a.spec()?;
            write_rows(&commands::compare(&s)?, s.output.format, s.output.out.as_deref())
        }
        Command::Sweep { run, param, values } => {
            let s = run.spec()?;
            write_rows(&commands::sweep(&s, &param, &values)?, s.output.format, s.output.out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
