// SPDX-License-Identifier: Apache-2.0

//! `symprop`: batch driver for standard and symmetry-merged Pauli propagation.
//!
//! Exit status: 0 success, 1 a self-check failed, 2 invalid configuration,
//! 3 memory cap exceeded, 4 I/O failure.

mod config;
mod error;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use symprop::oracle::{exact_expectation_trace, MAX_DENSE_QUBITS};
use symprop::propagation::{fmt_float, propagate_with_state};
use symprop::random::{random_circuit, random_pauli_sum, random_symmetric_circuit};
use symprop::{Permutation, ProductState64, PropagationConfig64, PropagationTrace, SymmetryGroup};

use crate::config::{Experiment, Overrides, SymmetrySpec};
use crate::error::CliError;

const COMPARE_CSV_HEADER: &str = "layer,n_terms_standard,n_terms_symmetry,expectation_standard,expectation_symmetry";
const COUNT_CSV_HEADER: &str = "n,group,count,ratio";

#[derive(Parser)]
#[command(name = "symprop", version, about = "Symmetry-merged Pauli propagation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate the configured observable and write the per-layer trace.
    Propagate {
        #[command(flatten)]
        run: RunArgs,
        /// Run both standard and symmetry-merged propagation and write the joined table.
        #[arg(long)]
        compare: bool,
    },
    /// Same as `propagate --compare`.
    Compare {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Tabulate orbit-representative counts and space ratios.
    CountReps(CountArgs),
    /// Check the sparse engine against exact dense evolution on random circuits.
    OracleCheck(OracleArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON run config.
    #[arg(long)]
    config: PathBuf,
    /// Output file (overrides `output_path`); stdout when neither is set.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Worker threads (overrides `threads`).
    #[arg(long)]
    threads: Option<usize>,
    /// Maximum number of stored terms (overrides `memory_cap`).
    #[arg(long)]
    memory_cap: Option<usize>,
    /// Record per-layer wall-clock times (overrides `timing`).
    #[arg(long)]
    timing: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum GroupName {
    Trivial,
    #[value(name = "translation_1d")]
    Translation1d,
    #[value(name = "translation_2d")]
    Translation2d,
    Dihedral,
    #[value(name = "permutation_full")]
    PermutationFull,
    Generic,
}

#[derive(Args)]
struct CountArgs {
    #[arg(long, value_enum)]
    group: GroupName,
    /// Number of qubits, or the start of the range with `--n-max`.
    #[arg(long, required_unless_present_any = ["lx", "generators"])]
    n: Option<usize>,
    /// Last qubit count of the range.
    #[arg(long)]
    n_max: Option<usize>,
    /// Torus width for `translation_2d`.
    #[arg(long, requires = "ly")]
    lx: Option<usize>,
    /// Torus height for `translation_2d`.
    #[arg(long, requires = "lx")]
    ly: Option<usize>,
    /// Generators for `generic`, as JSON image lists, e.g. `[[1,2,0]]`.
    #[arg(long)]
    generators: Option<String>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    /// Largest qubit count; every n from 1 up to it is tested.
    #[arg(long, default_value_t = 5)]
    n_max: usize,
    /// Random circuits per qubit count and mode.
    #[arg(long, default_value_t = 20)]
    circuits: usize,
    /// Gates per standard random circuit.
    #[arg(long, default_value_t = 40)]
    max_gates: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-8)]
    tolerance: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Propagate { run, compare } => run_propagation(&run, compare),
        Command::Compare { run } => run_propagation(&run, true),
        Command::CountReps(args) => count_reps(&args),
        Command::OracleCheck(args) => oracle_check(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("symprop: {e}");
            e.exit_code()
        }
    }
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), CliError> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("writing {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(exp: &Experiment, config: &PropagationConfig64) -> Result<PropagationTrace<f64>, CliError> {
    Ok(propagate_with_state(&exp.observable, &exp.circuit, config, Some(&exp.state))?)
}

fn run_propagation(args: &RunArgs, compare: bool) -> Result<(), CliError> {
    let cfg = config::load(&args.config)?;
    let overrides = Overrides {
        output: args.output.clone(),
        threads: args.threads,
        memory_cap: args.memory_cap,
        timing: args.timing,
    };
    let exp = cfg.build(&overrides)?;
    let text = if compare {
        let Some(symmetric) = exp.symmetric() else {
            return Err(CliError::Validation("symmetry: comparison needs a symmetry group".into()));
        };
        let standard = run(&exp, &exp.standard)?;
        let merged = run(&exp, &symmetric)?;
        eprintln!("symprop: final terms standard {} / symmetry {}", standard.observable.len(), merged.observable.len());
        render_compare(&standard, &merged, args.format)
    } else {
        let config = exp.symmetric().unwrap_or_else(|| exp.standard.clone());
        let trace = run(&exp, &config)?;
        eprintln!("symprop: final terms {}", trace.observable.len());
        render_trace(&trace, exp.timing, args.format)
    };
    emit(exp.output.as_deref(), &text)
}

fn expectation_text(e: Option<f64>) -> String {
    e.map(fmt_float).unwrap_or_default()
}

fn render_trace(trace: &PropagationTrace<f64>, timing: bool, format: Format) -> String {
    match format {
        Format::Csv => trace.to_csv(timing),
        Format::Json => {
            let rows: Vec<_> = trace
                .layers
                .iter()
                .map(|m| {
                    json!({
                        "layer": m.layer,
                        "time": m.time,
                        "n_terms": m.n_terms,
                        "sum_abs_coeff": m.sum_abs_coeff,
                        "sum_sq_coeff": m.sum_sq_coeff,
                        "expectation": m.expectation,
                        "wall_ms": if timing { m.wall_ms } else { 0.0 },
                    })
                })
                .collect();
            format!("{:#}\n", json!({ "layers": rows }))
        }
    }
}

fn render_compare(standard: &PropagationTrace<f64>, merged: &PropagationTrace<f64>, format: Format) -> String {
    let rows = standard.layers.iter().zip(&merged.layers);
    match format {
        Format::Csv => {
            let mut out = format!("{COMPARE_CSV_HEADER}\n");
            for (a, b) in rows {
                out += &format!(
                    "{},{},{},{},{}\n",
                    a.layer,
                    a.n_terms,
                    b.n_terms,
                    expectation_text(a.expectation),
                    expectation_text(b.expectation)
                );
            }
            out
        }
        Format::Json => {
            let rows: Vec<_> = rows
                .map(|(a, b)| {
                    json!({
                        "layer": a.layer,
                        "n_terms_standard": a.n_terms,
                        "n_terms_symmetry": b.n_terms,
                        "expectation_standard": a.expectation,
                        "expectation_symmetry": b.expectation,
                    })
                })
                .collect();
            format!("{:#}\n", json!({ "layers": rows }))
        }
    }
}

fn count_reps(args: &CountArgs) -> Result<(), CliError> {
    let groups: Vec<SymmetryGroup> = match args.group {
        GroupName::Translation2d => {
            let (Some(lx), Some(ly)) = (args.lx, args.ly) else {
                return Err(CliError::Validation("translation_2d needs --lx and --ly".into()));
            };
            vec![SymmetryGroup::translation_2d(lx, ly)?]
        }
        GroupName::Generic => {
            let Some(text) = &args.generators else {
                return Err(CliError::Validation("generic needs --generators".into()));
            };
            let images: Vec<Vec<usize>> =
                serde_json::from_str(text).map_err(|e| CliError::Validation(format!("generators: {e}")))?;
            let n = images.first().map_or(0, Vec::len);
            vec![config::build_group(&SymmetrySpec::Generic { generators: images }, n)?]
        }
        name => {
            let Some(start) = args.n else {
                return Err(CliError::Validation("--n is required".into()));
            };
            let end = args.n_max.unwrap_or(start);
            if end < start {
                return Err(CliError::Validation(format!("n-max {end} is below n {start}")));
            }
            (start..=end)
                .map(|n| match name {
                    GroupName::Trivial => SymmetryGroup::trivial(n),
                    GroupName::Translation1d => SymmetryGroup::translation_1d(n),
                    GroupName::Dihedral => SymmetryGroup::dihedral(n),
                    _ => SymmetryGroup::permutation_full(n),
                })
                .collect::<symprop::Result<_>>()?
        }
    };
    let mut out = format!("{COUNT_CSV_HEADER}\n");
    for g in &groups {
        let count = g.count_representatives()?;
        out += &format!("{},{},{count},{}\n", g.n_qubits(), g.kind(), fmt_float(g.space_ratio()?));
    }
    emit(args.output.as_deref(), &out)
}

fn random_bloch(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        if v.iter().map(|x: &f64| x * x).sum::<f64>() <= 1.0 {
            return v;
        }
    }
}

fn oracle_check(args: &OracleArgs) -> Result<(), CliError> {
    if args.n_max == 0 || args.n_max > MAX_DENSE_QUBITS {
        return Err(CliError::Validation(format!("n-max must be between 1 and {MAX_DENSE_QUBITS}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut out = String::from("n,mode,circuits,max_abs_error\n");
    let mut worst = 0f64;
    for n in 1..=args.n_max {
        let mut modes = vec![("standard".to_string(), None)];
        modes.push(("translation_1d".into(), Some(SymmetryGroup::translation_1d(n)?)));
        if n >= 3 {
            modes.push(("dihedral".into(), Some(SymmetryGroup::dihedral(n)?)));
        }
        modes.push(("permutation_full".into(), Some(SymmetryGroup::permutation_full(n)?)));
        if n >= 2 {
            let swap = Permutation::new((0..n).map(|i| if i < 2 { 1 - i } else { i }).collect())?;
            modes.push(("generic".into(), Some(SymmetryGroup::generic(n, &[swap])?)));
        }
        for (name, group) in modes {
            let mut max_err = 0f64;
            for _ in 0..args.circuits {
                let n_terms = rng.gen_range(1..=4);
                let obs = random_pauli_sum(&mut rng, n, n_terms)?;
                let (circuit, state, config) = match &group {
                    None => {
                        let layers = rng.gen_range(1..=4);
                        let circuit = random_circuit(&mut rng, n, args.max_gates.max(1), layers)?;
                        let bloch = (0..n).map(|_| random_bloch(&mut rng)).collect();
                        (circuit, ProductState64::from_bloch(bloch)?, PropagationConfig64::default())
                    }
                    Some(g) => {
                        let layers = rng.gen_range(1..=6);
                        let circuit = random_symmetric_circuit(&mut rng, g, layers, 2)?;
                        let state = ProductState64::uniform(n, random_bloch(&mut rng))?;
                        (circuit, state, PropagationConfig64::default().with_symmetry(g.clone()))
                    }
                };
                let exact = exact_expectation_trace(&obs, &circuit, &state)?;
                let trace = propagate_with_state(&obs, &circuit, &config, Some(&state))?;
                for (row, e) in trace.layers.iter().zip(&exact) {
                    max_err = max_err.max((row.expectation.unwrap_or(f64::NAN) - e).abs());
                }
            }
            worst = worst.max(max_err);
            out += &format!("{n},{name},{},{}\n", args.circuits, fmt_float(max_err));
        }
    }
    emit(args.output.as_deref(), &out)?;
    if worst.is_nan() || worst > args.tolerance {
        return Err(CliError::CheckFailed(format!("largest deviation {worst:e} exceeds {:e}", args.tolerance)));
    }
    eprintln!("symprop: all deviations within {:e}", args.tolerance);
    Ok(())
}
