//! `qfactor` command-line frontend.
//!
//! Exit codes: 0 on success, 1 for invalid input (including bad flags),
//! 2 when an internal invariant is violated.

pub mod artifact;
pub mod tables;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use crate::analysis;
use crate::compiler::{emit_qasm, synthesize_layer};
use crate::error::Error;
use crate::exec::{self, Parallelism};
use crate::hamiltonians::{BinaryPolynomial, DiagonalHamiltonian, Model};
use crate::instances::Instance;
use crate::qaoa::{depth_sweep, OptimizerConfig, Problem};
use crate::simulator::{InitPattern, MixerSpec};

pub use artifact::RunArtifact;
use tables::{ResourceRow, SweepRow};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INTERNAL: i32 = 2;

/// Thresholds reported by `spectrum` alongside the CSV.
const DENSITY_DELTAS: [f64; 4] = [0.01, 0.02, 0.05, 0.1];

#[derive(Debug, Parser)]
#[command(
    name = "qfactor",
    version,
    about = "QUBO vs PUBO digitized adiabatic factorization"
)]
pub struct Cli {
    /// Worker threads (0 = one per core, 1 = sequential).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print register sizes, factors and solution states.
    Encode(Target),
    /// Per-layer gate counts for both models.
    Resources(ResourcesArgs),
    /// Run a warm-started depth sweep and write the result document.
    Factor(FactorArgs),
    /// Dump the diagonal spectrum of one model as CSV.
    Spectrum(SpectrumArgs),
    /// Final-depth metrics for several instances, models and seeds as CSV.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct Target {
    /// Semiprime to encode.
    #[arg(required_unless_present = "all", conflicts_with = "all")]
    pub n: Option<u64>,
    /// Every instance of the reference table.
    #[arg(long)]
    pub all: bool,
}

impl Target {
    fn instances(&self) -> Result<Vec<Instance>, Error> {
        match self.n {
            Some(n) => Ok(vec![Instance::new(n)?]),
            None => Ok(Instance::reference_set()),
        }
    }
}

#[derive(Debug, Args)]
pub struct ResourcesArgs {
    #[command(flatten)]
    pub target: Target,
    /// Write one OpenQASM layer per instance and model into this directory.
    #[arg(long, value_name = "DIR")]
    pub emit_qasm: Option<PathBuf>,
    /// Phase angle used for the exported layers.
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub gamma: f64,
    /// Mixer angle used for the exported layers.
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub beta: f64,
}

#[derive(Debug, Args)]
pub struct FactorArgs {
    pub n: u64,
    #[arg(long, default_value = "qubo")]
    pub model: Model,
    #[arg(long, default_value_t = 10)]
    pub layers: usize,
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Initial product state (default: alternating for qubo, plus for pubo).
    #[arg(long)]
    pub init: Option<InitPattern>,
    /// Mixer strength.
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    /// Populations listed per depth.
    #[arg(long, default_value_t = 8)]
    pub top_k: usize,
    /// Result document path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    pub n: u64,
    #[arg(long, default_value = "qubo")]
    pub model: Model,
    /// CSV path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Semiprimes to sweep (repeatable).
    #[arg(
        long = "n",
        value_name = "N",
        required_unless_present = "all",
        conflicts_with = "all"
    )]
    pub numbers: Vec<u64>,
    /// Every instance of the reference table.
    #[arg(long)]
    pub all: bool,
    #[arg(long, default_value_t = 10)]
    pub layers: usize,
    /// Seeds 0..SEEDS per instance and model.
    #[arg(long, default_value_t = 5)]
    pub seeds: u64,
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,
    /// CSV path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `std::env::args` and runs; returns the process exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &anyhow::Error) -> i32 {
    match e.downcast_ref::<Error>() {
        Some(Error::Invariant(_)) => EXIT_INTERNAL,
        _ => EXIT_INPUT,
    }
}

pub fn run(cli: &Cli) -> anyhow::Result<()> {
    #[cfg(feature = "parallel")]
    if cli.threads > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build()
            .context("building thread pool")?;
        return pool.install(|| dispatch(cli));
    }
    dispatch(cli)
}

fn parallelism(cli: &Cli) -> Parallelism {
    if cli.threads == 1 {
        Parallelism::Sequential
    } else {
        Parallelism::Parallel
    }
}

fn dispatch(cli: &Cli) -> anyhow::Result<()> {
    let par = parallelism(cli);
    match &cli.command {
        Command::Encode(t) => {
            print!("{}", tables::encode_table(&t.instances()?));
            Ok(())
        }
        Command::Resources(a) => cmd_resources(a),
        Command::Factor(a) => cmd_factor(a, par),
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Sweep(a) => cmd_sweep(a, par),
    }
}

fn write_output(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn cmd_resources(a: &ResourcesArgs) -> anyhow::Result<()> {
    let instances = a.target.instances()?;
    let rows: Vec<ResourceRow> = instances
        .iter()
        .map(tables::resource_row)
        .collect::<Result<_, _>>()?;
    print!("{}", tables::write_csv(&rows)?);
    if let Some(dir) = &a.emit_qasm {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for inst in &instances {
            for model in Model::ALL {
                let pauli = BinaryPolynomial::problem(inst, model).to_pauli();
                let circuit = synthesize_layer(&pauli, a.gamma, a.beta)?.with_model(model);
                let path = dir.join(format!("N{}_{}.qasm", inst.semiprime(), model));
                fs::write(&path, emit_qasm(&circuit))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
        }
    }
    Ok(())
}

/// Builds the optimizer configuration shared by `factor` and `sweep`.
pub fn factor_config(a: &FactorArgs, par: Parallelism) -> anyhow::Result<OptimizerConfig> {
    if a.layers == 0 {
        bail!(Error::InvalidArgument("--layers must be at least 1".into()));
    }
    if a.restarts == 0 {
        bail!(Error::InvalidArgument(
            "--restarts must be at least 1".into()
        ));
    }
    if a.top_k == 0 {
        bail!(Error::InvalidArgument("--top-k must be at least 1".into()));
    }
    Ok(OptimizerConfig {
        restarts: a.restarts,
        seed: a.seed,
        pattern: Some(a.init.unwrap_or_else(|| InitPattern::default_for(a.model))),
        mixer: MixerSpec::new(a.omega)?,
        top_k: a.top_k,
        parallelism: par,
        ..OptimizerConfig::default()
    })
}

/// Runs the sweep behind `qfactor factor` and returns its document.
pub fn factor_artifact(a: &FactorArgs, par: Parallelism) -> anyhow::Result<RunArtifact> {
    let config = factor_config(a, par)?;
    let inst = Instance::new(a.n)?;
    let problem = Problem::new(inst.clone(), a.model)?;
    let record = depth_sweep(&problem, a.layers, &config)?;
    let doc = RunArtifact::new(&inst, a.layers, &config, &record);
    doc.validate()
        .map_err(|e| Error::Invariant(format!("emitted document is invalid: {e}")))?;
    Ok(doc)
}

fn print_populations(
    out: &mut dyn std::io::Write,
    depth: &artifact::DepthEntry,
) -> std::io::Result<()> {
    for (rank, e) in depth.populations.iter().enumerate() {
        let mark = if e.is_solution { "  <- solution" } else { "" };
        writeln!(
            out,
            "{:>4}  |{}>  {:.6}{mark}",
            rank + 1,
            e.bitstring,
            e.probability
        )?;
    }
    writeln!(out, "      Others  {:.6}", depth.others)?;
    let placement = if depth.solution_rank == 1 {
        "most populated"
    } else {
        "not most populated"
    };
    writeln!(out, "solution rank: {} ({placement})", depth.solution_rank)
}

fn cmd_factor(a: &FactorArgs, par: Parallelism) -> anyhow::Result<()> {
    let doc = factor_artifact(a, par)?;
    let last = doc.depths.last().expect("layers >= 1");
    // Keep stdout clean for the document when it is not written to a file.
    let mut summary: Box<dyn std::io::Write> = if a.out.is_some() {
        Box::new(std::io::stdout())
    } else {
        Box::new(std::io::stderr())
    };
    writeln!(
        summary,
        "N = {} model = {} layers = {} C_min = {:.6e} fidelity = {:.6} confidence = {:.6}",
        a.n, a.model, a.layers, last.c_min, last.fidelity, last.confidence
    )?;
    print_populations(&mut summary, last)?;
    write_output(a.out.as_deref(), &doc.to_json())
}

fn cmd_spectrum(a: &SpectrumArgs) -> anyhow::Result<()> {
    let inst = Instance::new(a.n)?;
    let d = DiagonalHamiltonian::generator(&inst, a.model)?;
    let report = analysis::spectrum_report(&d, &inst)?;
    write_output(a.out.as_deref(), &tables::spectrum_csv(&report))?;
    for delta in DENSITY_DELTAS {
        eprintln!(
            "near-zero density (|E|/E_max < {delta}): {:.6}",
            analysis::near_zero_density(&d, delta)?
        );
    }
    Ok(())
}

/// Final-depth rows for every (instance, model, seed), ordered by
/// `(N, model, seed)` regardless of scheduling.
pub fn sweep_rows(
    instances: &[Instance],
    layers: usize,
    seeds: u64,
    restarts: usize,
    par: Parallelism,
) -> anyhow::Result<Vec<SweepRow>> {
    if layers == 0 || restarts == 0 {
        bail!(Error::InvalidArgument(
            "--layers and --restarts must be at least 1".into()
        ));
    }
    let mut tasks: Vec<(Instance, Model, u64)> = Vec::new();
    for inst in instances {
        for model in Model::ALL {
            for seed in 0..seeds {
                tasks.push((inst.clone(), model, seed));
            }
        }
    }
    tasks.sort_by_key(|(i, m, s)| (i.semiprime(), *m, *s));
    let rows = exec::map_tasks(
        par,
        &tasks,
        |(inst, model, seed)| -> Result<SweepRow, Error> {
            let config = OptimizerConfig {
                restarts,
                seed: *seed,
                parallelism: par,
                ..OptimizerConfig::default()
            };
            let problem = Problem::new(inst.clone(), *model)?;
            let record = depth_sweep(&problem, layers, &config)?;
            let last = record.last();
            Ok(SweepRow {
                semiprime: inst.semiprime(),
                model: *model,
                seed: *seed,
                layers,
                c_min: last.c_min,
                c_first: record.depths[0].c_min,
                ratio_first: last.ratio_first,
                fidelity: last.fidelity,
                confidence: last.confidence,
                solution_rank: last.populations.solution_rank,
            })
        },
    );
    Ok(rows.into_iter().collect::<Result<_, _>>()?)
}

fn cmd_sweep(a: &SweepArgs, par: Parallelism) -> anyhow::Result<()> {
    let instances = if a.all {
        Instance::reference_set()
    } else {
        a.numbers
            .iter()
            .map(|&n| Instance::new(n))
            .collect::<Result<_, _>>()?
    };
    let rows = sweep_rows(&instances, a.layers, a.seeds, a.restarts, par)?;
    write_output(a.out.as_deref(), &tables::write_csv(&rows)?)
}
