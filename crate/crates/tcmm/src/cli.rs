//! The `tcmm` command line.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Value};
use tcmm_core::labels::{encode_inputs, DECISION_LABEL};
use tcmm_core::trace::encode_trace_inputs;
use tcmm_core::{decode_outputs, evaluate, IntMatrix, Regime};

use crate::algo::resolve_algorithm;
use crate::circuits::{build_circuit, build_report, BuildConfig, Kind};
use crate::error::{Result, ToolError};
use crate::matrices::{matrix_to_json, parse_matrices};
use crate::netlist::{read_netlist, write_netlist};
use crate::scaling::{scaling_rows, write_csv};
use crate::verify::{verify, VerifyConfig};

#[derive(Debug, Parser)]
#[command(name = "tcmm", version, about = "Threshold circuits for fast matrix multiplication")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the sparsity parameters of a base algorithm.
    Params {
        /// `strassen` or a path to an algorithm JSON file.
        #[arg(long, default_value = "strassen")]
        algo: String,
        #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
        format: ReportFormat,
    },
    /// Build a circuit and write it as a netlist.
    Build {
        #[command(flatten)]
        circuit: CircuitArgs,
        /// Trace threshold.
        #[arg(long, allow_hyphen_values = true)]
        tau: Option<BigInt>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a netlist on a matrix file.
    Simulate {
        #[arg(long)]
        netlist: PathBuf,
        /// JSON object of matrices, e.g. {"A": [[1, 2], [3, 4]], "B": ...}.
        #[arg(long)]
        input: PathBuf,
    },
    /// Build once and compare random instances with the reference oracles.
    Verify {
        #[command(flatten)]
        circuit: CircuitArgs,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Cost-model gate counts over N and stage budgets, as CSV.
    Scaling {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, default_value = "strassen")]
        algo: String,
        #[arg(long, default_value_t = 5)]
        bits: u32,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
        depth_budgets: Vec<u32>,
        #[arg(long, value_delimiter = ',', default_value = "4,8,16,32,64")]
        n_list: Vec<usize>,
        /// Write the table here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ReportFormat {
    Json,
    Table,
}

#[derive(Debug, Args)]
pub struct CircuitArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    #[arg(long)]
    pub n: usize,
    /// Magnitude bits per input entry.
    #[arg(long)]
    pub bits: u32,
    #[arg(long, default_value = "strassen")]
    pub algo: String,
    #[command(flatten)]
    pub schedule: ScheduleArgs,
    /// Trace only: symmetric zero-diagonal input (adjacency matrices).
    #[arg(long)]
    pub symmetric: bool,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct ScheduleArgs {
    /// Use at most `d` materialized levels.
    #[arg(long)]
    pub depth_budget: Option<u32>,
    /// Use O(log log N) levels.
    #[arg(long)]
    pub loglog: bool,
}

impl ScheduleArgs {
    fn regime(&self) -> Result<Regime> {
        match self.depth_budget {
            Some(0) => Err(ToolError::Usage("--depth-budget must be at least 1".into())),
            Some(d) => Ok(Regime::ConstantDepth(d)),
            None => Ok(Regime::LogLog),
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(|e| ToolError::io(path, e))?))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| ToolError::io(path, e))
}

fn print_json(out: &mut impl Write, v: &impl serde::Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(v)?;
    writeln!(out, "{text}").map_err(|e| ToolError::io("<stdout>", e))
}

fn params(algo: &str, format: ReportFormat, out: &mut impl Write) -> Result<()> {
    let alg = resolve_algorithm(algo)?;
    let p = alg.derive_params()?;
    let report = json!({
        "algorithm": alg.name,
        "T": p.block_dim,
        "r": p.rank,
        "omega": p.omega,
        "s_A": p.s_a,
        "s_B": p.s_b,
        "s_C": p.s_c,
        "alpha": p.alpha.to_string(),
        "beta": p.beta.to_string(),
        "alpha_value": p.alpha_f64(),
        "beta_value": p.beta_f64(),
        "gamma": p.gamma,
        "c": p.c_const,
    });
    match format {
        ReportFormat::Json => print_json(out, &report),
        ReportFormat::Table => {
            let obj = report.as_object().expect("object literal");
            for (k, v) in obj {
                let v = v.as_str().map_or_else(|| v.to_string(), str::to_string);
                writeln!(out, "{k:<12} {v}").map_err(|e| ToolError::io("<stdout>", e))?;
            }
            Ok(())
        }
    }
}

fn build(circuit: &CircuitArgs, tau: Option<BigInt>, path: &Path, out: &mut impl Write) -> Result<()> {
    let alg = resolve_algorithm(&circuit.algo)?;
    let cfg = BuildConfig {
        kind: circuit.kind,
        n: circuit.n,
        bits: circuit.bits,
        regime: circuit.schedule.regime()?,
        tau,
        symmetric: circuit.symmetric,
    };
    let plan = cfg.plan(&alg)?;
    let c = build_circuit(&alg, &plan)?;
    write_netlist(&c, create(path)?).map_err(|e| ToolError::io(path, e))?;
    print_json(out, &build_report(&alg, &cfg, &plan, &c)?)
}

fn simulate(netlist: &Path, input: &Path, out: &mut impl Write) -> Result<()> {
    let file = File::open(netlist).map_err(|e| ToolError::io(netlist, e))?;
    let c = read_netlist(file)?;
    let mut mats: BTreeMap<String, IntMatrix> = parse_matrices(&read(input)?)?;
    if !mats.contains_key("x") {
        if let Some(a) = mats.get("A").cloned() {
            mats.insert("x".into(), a);
        }
    }
    let meta = c.metadata();
    let bits = if meta.get("kind").map(String::as_str) == Some("trace") {
        let a = mats
            .get("A")
            .ok_or_else(|| ToolError::Core(tcmm_core::Error::MissingInput("A".into())))?;
        encode_trace_inputs(&c, a, meta.get("symmetric").map(String::as_str) == Some("true"))?
    } else {
        let refs: BTreeMap<&str, &IntMatrix> = mats.iter().map(|(k, v)| (k.as_str(), v)).collect();
        encode_inputs(c.input_labels(), &refs)?
    };
    let outputs = evaluate(&c, &bits)?;
    let raw: String = outputs.iter().map(|&b| if b { '1' } else { '0' }).collect();
    let mut report = serde_json::Map::new();
    report.insert("outputs".into(), Value::from(raw));
    if c.output_labels().iter().any(|l| l.starts_with("C[")) {
        report.insert("C".into(), matrix_to_json(&decode_outputs(&c, &outputs)?));
    }
    if let Some(i) = c.output_labels().iter().position(|l| l == DECISION_LABEL) {
        report.insert("decision".into(), Value::from(outputs[i]));
    }
    print_json(out, &report)
}

/// Runs one command; returns the process exit status.
pub fn run(cli: Cli, out: &mut impl Write) -> Result<u8> {
    match cli.command {
        Command::Params { algo, format } => params(&algo, format, out)?,
        Command::Build { circuit, tau, out: path } => build(&circuit, tau, &path, out)?,
        Command::Simulate { netlist, input } => simulate(&netlist, &input, out)?,
        Command::Verify {
            circuit,
            trials,
            seed,
        } => {
            if circuit.symmetric && circuit.kind != Kind::Trace {
                return Err(ToolError::Usage("--symmetric applies to trace circuits only".into()));
            }
            let alg = resolve_algorithm(&circuit.algo)?;
            let cfg = VerifyConfig {
                kind: circuit.kind,
                n: circuit.n,
                bits: circuit.bits,
                regime: circuit.schedule.regime()?,
                symmetric: circuit.symmetric,
                trials,
                seed,
            };
            let report = verify(&alg, &cfg)?;
            print_json(out, &report)?;
            return Ok(if report.passed() { 0 } else { 1 });
        }
        Command::Scaling {
            kind,
            algo,
            bits,
            depth_budgets,
            n_list,
            out: path,
        } => {
            let alg = resolve_algorithm(&algo)?;
            if depth_budgets.contains(&0) {
                return Err(ToolError::Usage("depth budgets must be at least 1".into()));
            }
            let rows = scaling_rows(&alg, kind, bits, &depth_budgets, &n_list)?;
            match path {
                Some(p) => write_csv(&rows, create(&p)?)?,
                None => write_csv(&rows, &mut *out)?,
            }
        }
    }
    Ok(0)
}
