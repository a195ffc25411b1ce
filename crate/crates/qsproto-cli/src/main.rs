//! `qsproto`: run protocols, produce and check proofs, reduce circuits and
//! run the simulator suites. Every output is JSON and embeds its parameters
//! and seed.
//!
//! Exit codes: 0 success, 1 rejected proof or failed suite, 2 protocol
//! abort, 3 configuration error.

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use qsproto::bits::Bits;
use qsproto::functionalities::{OtInput, ZkProverInput, ZkVerifierInput};
use qsproto::machine::{run_execution, Corruption, ExecutionConfig, MachineError, Output, Payload, Protocol, Role};
use qsproto::npreduce::{circuit_to_hc, BooleanCircuit, RelationStatement, DEFAULT_GATE_BOUND};
use qsproto::protocols::*;
use qsproto::simcheck::{run_suite, SUITES};
use qsproto::tape::{derive_seed, Tape};
use qsproto::zk::{prove_to_file, verify_file, ProofFile, RepetitionMode};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

const EXIT_REJECT: u8 = 1;
const EXIT_ABORT: u8 = 2;
const EXIT_CONFIG: u8 = 3;

#[derive(Parser)]
#[command(name = "qsproto", version, about = "Zero-knowledge and coin-flipping protocol toolkit")]
struct Cli {
    /// Worker threads for independent trials.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Directory searched for parameter files given by bare name.
    #[arg(long, global = true, env = "QSPROTO_PARAM_DIR")]
    param_dir: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Execute a protocol and write its transcript.
    Run(RunArgs),
    /// Write a parameter file for `run --config`.
    Params(RunArgs),
    /// Prove a statement with a witness, writing a proof file.
    Prove(ProveArgs),
    /// Check a proof file.
    Verify {
        proof: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reduce a circuit to a Hamiltonicity instance and a witness map.
    Reduce {
        circuit: PathBuf,
        #[arg(long, default_value_t = DEFAULT_GATE_BOUND)]
        gate_bound: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a simulator comparison suite.
    Simtest {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
        suite: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        mode: Option<SubproofMode>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ProtocolId {
    Coinflip,
    Zkaok,
    Zkcf,
    Ot,
    Echo,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum CorruptionSpec {
    #[default]
    None,
    SemiHonestA,
    SemiHonestB,
    /// The corrupted party runs the honest program under adversary control.
    MaliciousA,
    MaliciousB,
}

#[derive(Args, Clone)]
struct RunArgs {
    protocol: Option<ProtocolId>,
    /// Parameter file; a bare name is looked up in the parameter directory.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    /// Blum rounds per subproof in micro mode.
    #[arg(long)]
    rounds: Option<usize>,
    /// Parallel rounds of the witness indistinguishable proof.
    #[arg(long)]
    parallel_q: Option<usize>,
    #[arg(long)]
    mode: Option<SubproofMode>,
    #[arg(long)]
    seed: Option<u64>,
    /// Vertices of the demo Hamiltonicity statement.
    #[arg(long)]
    vertices: Option<usize>,
    #[arg(long, value_enum)]
    corrupt: Option<CorruptionSpec>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Everything needed to replay a run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
struct RunConfig {
    protocol: Option<ProtocolId>,
    n: Option<usize>,
    rounds: Option<usize>,
    q: Option<usize>,
    mode: Option<SubproofMode>,
    seed: Option<u64>,
    vertices: Option<usize>,
    #[serde(default)]
    corruption: CorruptionSpec,
}

#[derive(Debug)]
struct ConfigError(String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "configuration error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn config_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(ConfigError(msg.into()).into())
}

fn resolve(path: &Path, dir: Option<&Path>) -> PathBuf {
    match dir {
        Some(d) if !path.exists() && path.is_relative() => d.join(path),
        _ => path.to_path_buf(),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

impl RunConfig {
    /// Flags override the file, which overrides defaults.
    fn load(args: &RunArgs, dir: Option<&Path>) -> Result<RunConfig> {
        let mut c: RunConfig = match &args.config {
            Some(p) => read_json(&resolve(p, dir))?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($f:ident <- $a:expr),*) => { $(if let Some(v) = $a { c.$f = Some(v); })* };
        }
        set!(protocol <- args.protocol, n <- args.n, rounds <- args.rounds, q <- args.parallel_q,
             mode <- args.mode, seed <- args.seed, vertices <- args.vertices);
        if let Some(k) = args.corrupt {
            c.corruption = k;
        }
        let Some(proto) = c.protocol else { return config_err("no protocol given") };
        let mode = *c.mode.get_or_insert(SubproofMode::Hybrid);
        let micro = mode == SubproofMode::Micro;
        let n = *c.n.get_or_insert(match proto {
            ProtocolId::Zkcf if !micro => 64,
            _ if micro => 4,
            _ => 16,
        });
        c.rounds.get_or_insert(n);
        c.q.get_or_insert(n);
        c.seed.get_or_insert(0);
        if matches!(proto, ProtocolId::Zkaok | ProtocolId::Zkcf) {
            c.vertices.get_or_insert(if micro { 3 } else { 5 });
        }
        if n == 0 || c.rounds == Some(0) || c.q == Some(0) {
            return config_err("n, rounds and q must be positive");
        }
        if micro && n > 8 {
            return config_err("micro mode compiles real subproofs and supports n <= 8");
        }
        if micro && matches!(proto, ProtocolId::Ot | ProtocolId::Echo) {
            return config_err("this protocol has no subproofs to run in micro mode");
        }
        if c.vertices.is_some_and(|v| v < 3) {
            return config_err("demo statements need at least 3 vertices");
        }
        Ok(c)
    }

    fn build(&self) -> (Arc<Protocol>, Payload, Payload, serde_json::Value) {
        let (n, rounds, q, mode, seed) =
            (self.n.unwrap(), self.rounds.unwrap(), self.q.unwrap(), self.mode.unwrap(), self.seed.unwrap());
        let micro = mode == SubproofMode::Micro;
        let zk_inputs = || {
            let (x, w) = demo_statement(self.vertices.unwrap());
            let vin = Payload::encode(&ZkVerifierInput::new(x.relation_id()));
            (Payload::encode(&ZkProverInput::new(x, w)), vin)
        };
        match self.protocol.unwrap() {
            ProtocolId::Coinflip => {
                let mut p = if micro { CoinflipParams::micro(n) } else { CoinflipParams::hybrid(n) };
                p.rounds = rounds;
                let unit = Payload::encode(&());
                (coinflip_protocol(p), unit.clone(), unit, json(&p))
            }
            ProtocolId::Zkaok => {
                let mut p = if micro { ZkaokParams::micro(n) } else { ZkaokParams::hybrid(n) };
                p.rounds = rounds;
                let (a, b) = zk_inputs();
                (zkaok_protocol(p), a, b, json(&p))
            }
            ProtocolId::Zkcf => {
                let mut p = if micro { ZkcfParams::micro(n) } else { ZkcfParams::hybrid(n) };
                p.q = q;
                let (a, b) = zk_inputs();
                (zk_from_cf_protocol(p), a, b, json(&p))
            }
            ProtocolId::Ot => {
                let p = OtParams::default();
                let mut t = Tape::from_seed(derive_seed(&seed.to_le_bytes(), "cli/ot-inputs"));
                let input = OtInput { s0: t.bits(n), s1: t.bits(n) };
                (ot_semi_honest_protocol(p), Payload::encode(&input), Payload::encode(&t.bit()), json(&p))
            }
            ProtocolId::Echo => {
                let mut t = Tape::from_seed(derive_seed(&seed.to_le_bytes(), "cli/echo-input"));
                (echo_protocol(), Payload::encode(&t.bits(n)), Payload::default(), serde_json::json!({ "n": n }))
            }
        }
    }
}

fn json<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("parameters serialize")
}

#[derive(Serialize)]
struct RunReport {
    config: RunConfig,
    params: serde_json::Value,
    outputs: [Output; 2],
    aborted: bool,
    transcript: qsproto::machine::Transcript,
}

fn cmd_run(args: &RunArgs, dir: Option<&Path>) -> Result<u8> {
    let c = RunConfig::load(args, dir)?;
    let (proto, a, b, params) = c.build();
    let corruption = match c.corruption {
        CorruptionSpec::None => Corruption::none(),
        CorruptionSpec::SemiHonestA => Corruption::semi_honest(Role::A),
        CorruptionSpec::SemiHonestB => Corruption::semi_honest(Role::B),
        CorruptionSpec::MaliciousA => Corruption::malicious(Role::A, proto.program(Role::A).clone()),
        CorruptionSpec::MaliciousB => Corruption::malicious(Role::B, proto.program(Role::B).clone()),
    };
    let cfg = ExecutionConfig::new(proto, a, b, c.seed.unwrap()).corrupt(corruption);
    let r = match run_execution(&cfg) {
        Ok(r) => r,
        Err(MachineError::Config(m)) => return config_err(m),
        Err(e) => return config_err(e.to_string()),
    };
    let outputs = [r.output(Role::A).clone(), r.output(Role::B).clone()];
    let aborted = r.transcript.aborted() || outputs.iter().any(Output::is_bot);
    emit(&RunReport { config: c, params, outputs, aborted, transcript: r.transcript }, args.out.as_deref())?;
    Ok(if aborted { EXIT_ABORT } else { 0 })
}

#[derive(Args)]
struct ProveArgs {
    /// Statement JSON.
    statement: PathBuf,
    /// Witness JSON (a bit string).
    witness: PathBuf,
    #[arg(long, default_value_t = 4)]
    n: usize,
    #[arg(long, default_value_t = 32)]
    rounds: usize,
    /// Run the rounds in parallel instead of sequentially.
    #[arg(long)]
    parallel: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn cmd_prove(a: &ProveArgs) -> Result<u8> {
    let x: RelationStatement = read_json(&a.statement)?;
    let w: Bits = read_json(&a.witness)?;
    let mode = if a.parallel { RepetitionMode::Parallel } else { RepetitionMode::Sequential };
    match prove_to_file(x, &w, a.n, a.rounds, mode, a.seed) {
        Ok(pf) => emit(&pf, a.out.as_deref()).map(|_| 0),
        Err(e) => config_err(e.to_string()),
    }
}

fn cmd_verify(proof: &Path, out: Option<&Path>) -> Result<u8> {
    // A file that no longer parses is a rejected proof, not a usage error.
    let accept = match read_json::<ProofFile>(proof) {
        Ok(pf) => verify_file(&pf).unwrap_or(false),
        Err(_) => false,
    };
    emit(&serde_json::json!({ "proof": proof, "accept": accept }), out)?;
    Ok(if accept { 0 } else { EXIT_REJECT })
}

fn cmd_reduce(circuit: &Path, gate_bound: usize, out: Option<&Path>) -> Result<u8> {
    let c: BooleanCircuit = read_json(circuit)?;
    match circuit_to_hc(&c, gate_bound) {
        Ok((graph, map)) => {
            emit(&serde_json::json!({ "gate_bound": gate_bound, "graph": graph, "witness_map": map }), out)?;
            Ok(0)
        }
        Err(e) => config_err(e.to_string()),
    }
}

fn run(cli: Cli) -> Result<u8> {
    if let Some(j) = cli.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(j).build_global().context("configuring --jobs")?;
    }
    let dir = cli.param_dir.as_deref();
    match &cli.cmd {
        Cmd::Run(a) => cmd_run(a, dir),
        Cmd::Params(a) => {
            let c = RunConfig::load(a, dir)?;
            let out = a.out.as_ref().map(|p| match dir {
                Some(d) if p.is_relative() && p.components().count() == 1 => d.join(p),
                _ => p.clone(),
            });
            emit(&c, out.as_deref()).map(|_| 0)
        }
        Cmd::Prove(a) => cmd_prove(a),
        Cmd::Verify { proof, out } => cmd_verify(proof, out.as_deref()),
        Cmd::Reduce { circuit, gate_bound, out } => cmd_reduce(circuit, *gate_bound, out.as_deref()),
        Cmd::Simtest { suite, n, mode, trials, seed, out } => {
            let report = match run_suite(suite, *n, *mode, *trials, *seed) {
                Ok(r) => r,
                Err(e) => return config_err(e),
            };
            emit(&report, out.as_deref())?;
            Ok(if report.pass { 0 } else { EXIT_REJECT })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("qsproto: {e:#}");
            ExitCode::from(if e.is::<ConfigError>() { EXIT_CONFIG } else { EXIT_REJECT })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(p: ProtocolId) -> RunArgs {
        RunArgs {
            protocol: Some(p),
            config: None,
            n: None,
            rounds: None,
            parallel_q: None,
            mode: None,
            seed: None,
            vertices: None,
            corrupt: None,
            out: None,
        }
    }

    #[test]
    fn defaults_depend_on_mode() {
        let c = RunConfig::load(&args(ProtocolId::Zkcf), None).unwrap();
        assert_eq!((c.n, c.q, c.vertices), (Some(64), Some(64), Some(5)));
        let mut a = args(ProtocolId::Zkaok);
        a.mode = Some(SubproofMode::Micro);
        let c = RunConfig::load(&a, None).unwrap();
        assert_eq!((c.n, c.rounds, c.vertices), (Some(4), Some(4), Some(3)));
    }

    #[test]
    fn bad_parameters_are_config_errors() {
        let mut a = args(ProtocolId::Coinflip);
        a.n = Some(0);
        assert!(RunConfig::load(&a, None).unwrap_err().is::<ConfigError>());
        let mut a = args(ProtocolId::Ot);
        a.mode = Some(SubproofMode::Micro);
        assert!(RunConfig::load(&a, None).unwrap_err().is::<ConfigError>());
    }

    #[test]
    fn cli_parses() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
