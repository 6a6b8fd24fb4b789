//! The `trilock` command-line front end.
//!
//! Three subcommands cover the pipeline: `lock` applies the
//! transformation (plus optional state re-encoding) and writes a locked
//! `.bench` with a metadata sidecar; `attack` runs the oracle-guided
//! key recovery on a bare netlist; `eval` measures corruptibility,
//! SCC metrics, and structural overhead. Every run is fully determined
//! by its arguments and seed; reports are JSON on stdout (timing fields
//! excluded from reproducibility guarantees).
//!
//! Exit codes: 0 success, 2 configuration error, 3 attack timeout,
//! 4 verification failure.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::attack::{self, AttackStatus, VerifyOutcome};
use crate::bits::BitSequence;
use crate::eval::{self, SampleMode};
use crate::lock::{self, LockConfig, LockMetadata, LockMode, LockedCircuit};
use crate::netlist::{parse_bench, write_bench, Circuit};
use crate::reencode;
use crate::sat::{SatBackend, SolverLimits};
use crate::unroll::UnrolledCircuit;

/// Environment variable naming an external DIMACS solver command.
pub const SOLVER_ENV: &str = "TRILOCK_SOLVER";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_TIMEOUT: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

#[derive(Debug)]
pub struct CliFailure {
    pub code: i32,
    pub message: String,
}

impl CliFailure {
    fn config(msg: impl Into<String>) -> Self {
        CliFailure {
            code: EXIT_CONFIG,
            message: msg.into(),
        }
    }
}

type CliResult<T> = Result<T, CliFailure>;

#[derive(Parser, Debug)]
#[command(
    name = "trilock",
    about = "Sequential logic locking: lock netlists, attack them, measure the damage",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lock a `.bench` netlist and write the result with metadata.
    Lock(LockArgs),
    /// Run the SAT key-recovery attack against a locked netlist.
    Attack(AttackArgs),
    /// Measure corruptibility, SCC metrics, and overhead.
    Eval(EvalArgs),
}

#[derive(Args, Debug)]
struct LockArgs {
    /// Input `.bench` netlist.
    #[arg(long)]
    bench: PathBuf,
    /// Line-oriented `key = value` file supplying defaults for the
    /// flags below.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Key cycles devoted to SAT hardening.
    #[arg(long)]
    kappa_s: Option<usize>,
    /// Key cycles devoted to corruptibility tuning.
    #[arg(long)]
    kappa_f: Option<usize>,
    /// Error-selection fraction in (0, 1).
    #[arg(long)]
    alpha: Option<f64>,
    /// Correct key bits, grouped per cycle (e.g. "10 01 01");
    /// generated from the seed when absent.
    #[arg(long)]
    kstar: Option<String>,
    /// Error-free suffix bits; generated from the seed when absent.
    #[arg(long)]
    kdstar: Option<String>,
    /// Primary outputs driven by the output error handler.
    #[arg(long)]
    po_invert: Option<usize>,
    /// Original registers driven by the state error handler.
    #[arg(long)]
    ff_invert: Option<usize>,
    /// Register pairs to re-encode after locking.
    #[arg(long)]
    pairs: Option<usize>,
    /// Baseline point-function mode (kappa_f = 0).
    #[arg(long)]
    naive: bool,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for the locked netlist and metadata.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Check correct-key transparency after locking.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    verify: bool,
}

#[derive(Args, Debug)]
struct AttackArgs {
    /// Locked `.bench` netlist (no metadata is read).
    #[arg(long)]
    locked: PathBuf,
    /// Oracle `.bench` netlist, queried as a black box.
    #[arg(long)]
    oracle: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Key sequence length in cycles (public protocol knowledge).
    #[arg(long)]
    kappa: Option<usize>,
    /// Known minimum unrolling depth to start from.
    #[arg(long)]
    bstar: Option<usize>,
    /// Depth cap for iterative deepening.
    #[arg(long)]
    b_max: Option<usize>,
    /// Wall-clock budget in seconds.
    #[arg(long)]
    timeout: Option<f64>,
    /// Conflict budget per solver call.
    #[arg(long)]
    max_conflicts: Option<u64>,
    /// `embedded` or an external DIMACS solver command; defaults to
    /// the TRILOCK_SOLVER environment variable, else embedded.
    #[arg(long)]
    solver: Option<String>,
    /// Write the attack trace as JSON lines.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write the unrolled locked circuit's CNF in DIMACS form.
    #[arg(long)]
    dump_dimacs: Option<PathBuf>,
    /// Report file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// Locked `.bench` netlist.
    #[arg(long)]
    locked: PathBuf,
    /// Original `.bench` netlist.
    #[arg(long)]
    oracle: PathBuf,
    /// Metadata sidecar; defaults to the locked path with `.meta`.
    #[arg(long)]
    meta: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Functional depth; defaults to kappa_s.
    #[arg(long)]
    depth: Option<usize>,
    /// Monte-Carlo sample count.
    #[arg(long)]
    samples: Option<u64>,
    /// Force exhaustive (census) corruptibility measurement.
    #[arg(long)]
    exhaustive: bool,
    /// Sweep depths kappa_s ..= kappa_s + 5 and average.
    #[arg(long)]
    profile: bool,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the exhaustive error table as a portable bitmap.
    #[arg(long)]
    table_pbm: Option<PathBuf>,
    /// Write the exhaustive error table as CSV.
    #[arg(long)]
    table_csv: Option<PathBuf>,
    /// Report file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Line-oriented `key = value` defaults file.
fn read_config_file(path: &Path) -> CliResult<BTreeMap<String, String>> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliFailure::config(format!("cannot read {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliFailure::config(format!(
                "{}:{}: expected `key = value`",
                path.display(),
                idx + 1
            )));
        };
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn config_get<T: std::str::FromStr>(
    map: &BTreeMap<String, String>,
    key: &str,
) -> CliResult<Option<T>> {
    match map.get(key) {
        None => Ok(None),
        Some(raw) => raw
            .parse()
            .map(Some)
            .map_err(|_| CliFailure::config(format!("config field `{key}`: bad value `{raw}`"))),
    }
}

fn load_circuit(path: &Path) -> CliResult<Circuit> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliFailure::config(format!("cannot read {}: {e}", path.display())))?;
    parse_bench(&text).map_err(|e| CliFailure::config(format!("{}: {e}", path.display())))
}

fn solver_backend(
    solver: Option<String>,
    timeout: Option<f64>,
    max_conflicts: Option<u64>,
) -> SatBackend {
    let limits = SolverLimits {
        max_conflicts,
        timeout: timeout.map(Duration::from_secs_f64),
    };
    let choice = solver.or_else(|| std::env::var(SOLVER_ENV).ok());
    match choice.as_deref() {
        None | Some("embedded") => SatBackend::Embedded { limits },
        Some(cmd) => SatBackend::ExternalDimacs {
            command: cmd.to_string(),
            limits,
        },
    }
}

fn random_bits(rng: &mut ChaCha8Rng, cycles: usize, width: usize) -> BitSequence {
    let bits: Vec<bool> = (0..cycles * width).map(|_| rng.gen()).collect();
    BitSequence::new(bits, width).expect("width divides")
}

#[derive(Serialize)]
struct LockReport {
    schema_version: u32,
    circuit: String,
    locked_bench: String,
    metadata: String,
    mode: String,
    kappa_s: usize,
    kappa_f: usize,
    alpha: f64,
    threshold: u128,
    pairs_applied: usize,
    gates_before: usize,
    gates_after: usize,
    ffs_before: usize,
    ffs_after: usize,
    verified: Option<String>,
}

fn cmd_lock(args: LockArgs) -> CliResult<(LockReport, i32)> {
    let file_cfg = match &args.config {
        Some(p) => read_config_file(p)?,
        None => BTreeMap::new(),
    };
    let circuit = load_circuit(&args.bench)?;
    let width = circuit.input_count();

    let seed: u64 = args.seed.or(config_get(&file_cfg, "seed")?).unwrap_or(0);
    let naive = args.naive || config_get::<bool>(&file_cfg, "naive")?.unwrap_or(false);
    let kappa_s = args
        .kappa_s
        .or(config_get(&file_cfg, "kappa_s")?)
        .unwrap_or(1);
    let kappa_f = if naive {
        0
    } else {
        args.kappa_f
            .or(config_get(&file_cfg, "kappa_f")?)
            .unwrap_or(1)
    };
    let alpha = args
        .alpha
        .or(config_get(&file_cfg, "alpha")?)
        .unwrap_or(0.6);
    let kappa = kappa_s + kappa_f;

    let mut key_rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6b65795f);
    let parse_bits = |text: &str, cycles: usize, what: &str| -> CliResult<BitSequence> {
        let seq = BitSequence::from_bit_str(text, width)
            .map_err(|e| CliFailure::config(format!("{what}: {e}")))?;
        if seq.cycles() != cycles {
            return Err(CliFailure::config(format!(
                "{what}: expected {cycles} cycles of {width} bits, got {}",
                seq.cycles()
            )));
        }
        Ok(seq)
    };
    let kstar_text = args.kstar.or_else(|| file_cfg.get("kstar").cloned());
    let k_star = match kstar_text {
        Some(t) => parse_bits(&t, kappa, "kstar")?,
        None => random_bits(&mut key_rng, kappa, width),
    };
    let kdstar_text = args.kdstar.or_else(|| file_cfg.get("kdstar").cloned());
    let k_double_star = if naive {
        BitSequence::zeros(0, width)
    } else {
        match kdstar_text {
            Some(t) => parse_bits(&t, kappa_f, "kdstar")?,
            None => {
                // Draw until the suffix condition holds; flip the last
                // bit as a deterministic fallback.
                let suffix = k_star.range(kappa_s + 1, kappa).expect("kappa_f >= 1");
                let mut cand = random_bits(&mut key_rng, kappa_f, width);
                if cand == suffix {
                    let mut bits = cand.as_slice().to_vec();
                    let last = bits.len() - 1;
                    bits[last] = !bits[last];
                    cand = BitSequence::new(bits, width).expect("width divides");
                }
                cand
            }
        }
    };

    let cfg = LockConfig {
        kappa_s,
        kappa_f,
        alpha,
        k_star,
        k_double_star,
        po_invert_count: args
            .po_invert
            .or(config_get(&file_cfg, "po_invert")?)
            .unwrap_or(1),
        ff_invert_count: args
            .ff_invert
            .or(config_get(&file_cfg, "ff_invert")?)
            .unwrap_or(0),
        mode: if naive {
            LockMode::NaiveBaseline
        } else {
            LockMode::TriLock
        },
        threshold_override: None,
    };
    cfg.validate(Some(&circuit))
        .map_err(|e| CliFailure::config(e.to_string()))?;

    let mut locked =
        lock::lock(&circuit, &cfg, seed).map_err(|e| CliFailure::config(e.to_string()))?;

    let pairs = args.pairs.or(config_get(&file_cfg, "pairs")?).unwrap_or(0);
    let mut pairs_applied = 0;
    let mut plan_text = None;
    if pairs > 0 {
        let plan = reencode::select_pairs(&locked, pairs);
        pairs_applied = plan.pairs.len();
        plan_text = Some(plan.to_pair_list());
        locked = reencode::insert_encoder_decoder(&locked, &plan)
            .map_err(|e| CliFailure::config(e.to_string()))?;
    }

    fs::create_dir_all(&args.out)
        .map_err(|e| CliFailure::config(format!("cannot create {}: {e}", args.out.display())))?;
    let bench_path = args.out.join(format!("{}.bench", locked.circuit.name()));
    let meta_path = args.out.join(format!("{}.meta", locked.circuit.name()));
    fs::write(&bench_path, write_bench(&locked.circuit))
        .map_err(|e| CliFailure::config(format!("cannot write {}: {e}", bench_path.display())))?;
    let metadata = LockMetadata::from_locked(&locked, seed);
    fs::write(&meta_path, metadata.to_string_lossless())
        .map_err(|e| CliFailure::config(format!("cannot write {}: {e}", meta_path.display())))?;
    if let Some(text) = plan_text {
        let plan_path = args.out.join(format!("{}.pairs", locked.circuit.name()));
        fs::write(&plan_path, text).map_err(|e| {
            CliFailure::config(format!("cannot write {}: {e}", plan_path.display()))
        })?;
    }

    let mut exit = EXIT_OK;
    let verified = if args.verify {
        let verdict = attack::verify_key(
            &locked.circuit,
            cfg.kappa(),
            &circuit,
            &locked.config.k_star,
            &SatBackend::default(),
            None,
        )
        .map_err(|e| CliFailure::config(e.to_string()))?;
        let text = match &verdict {
            VerifyOutcome::Equivalent => "equivalent".to_string(),
            VerifyOutcome::BoundedEquivalent { depth } => {
                format!("bounded-equivalent(depth={depth})")
            }
            VerifyOutcome::Counterexample { depth, .. } => {
                exit = EXIT_VERIFY;
                format!("counterexample(depth={depth})")
            }
        };
        Some(text)
    } else {
        None
    };

    Ok((
        LockReport {
            schema_version: 1,
            circuit: circuit.name().to_string(),
            locked_bench: bench_path.display().to_string(),
            metadata: meta_path.display().to_string(),
            mode: cfg.mode.name().to_string(),
            kappa_s,
            kappa_f,
            alpha,
            threshold: if naive { 0 } else { locked.config.threshold() },
            pairs_applied,
            gates_before: circuit.gate_count(),
            gates_after: locked.circuit.gate_count(),
            ffs_before: circuit.ff_count(),
            ffs_after: locked.circuit.ff_count(),
            verified,
        },
        exit,
    ))
}

#[derive(Serialize)]
struct AttackReport {
    schema_version: u32,
    status: AttackStatus,
    n_dip: u64,
    depth_used: usize,
    sat_queries: u64,
    key: Option<String>,
    bounded_verification: bool,
    wall_time_s: f64,
}

fn cmd_attack(args: AttackArgs) -> CliResult<(AttackReport, i32)> {
    let file_cfg = match &args.config {
        Some(p) => read_config_file(p)?,
        None => BTreeMap::new(),
    };
    let locked = load_circuit(&args.locked)?;
    let oracle = load_circuit(&args.oracle)?;
    let kappa: usize = args
        .kappa
        .or(config_get(&file_cfg, "kappa")?)
        .ok_or_else(|| CliFailure::config("--kappa is required (key length in cycles)"))?;
    let bstar = args.bstar.or(config_get(&file_cfg, "bstar")?);
    let b_max = args
        .b_max
        .or(config_get(&file_cfg, "b_max")?)
        .unwrap_or_else(|| bstar.unwrap_or(kappa).max(kappa) + 4);
    let backend = solver_backend(
        args.solver.or_else(|| file_cfg.get("solver").cloned()),
        args.timeout.or(config_get(&file_cfg, "timeout")?),
        args.max_conflicts
            .or(config_get(&file_cfg, "max_conflicts")?),
    );

    if let Some(path) = &args.dump_dimacs {
        let unrolled = UnrolledCircuit::unroll(&locked, bstar.unwrap_or(1).max(1), kappa);
        let mut file = fs::File::create(path)
            .map_err(|e| CliFailure::config(format!("cannot write {}: {e}", path.display())))?;
        unrolled
            .to_cnf()
            .write_dimacs(&mut file)
            .map_err(|e| CliFailure::config(e.to_string()))?;
    }

    let result = attack::sequential_attack(&locked, kappa, &oracle, b_max, &backend, bstar)
        .map_err(|e| CliFailure::config(e.to_string()))?;

    if let Some(path) = &args.trace {
        let mut lines = String::new();
        for rec in &result.trace {
            lines.push_str(&serde_json::to_string(rec).expect("serializable"));
            lines.push('\n');
        }
        fs::write(path, lines)
            .map_err(|e| CliFailure::config(format!("cannot write {}: {e}", path.display())))?;
    }

    let exit = match result.status {
        AttackStatus::KeyRecovered => EXIT_OK,
        AttackStatus::TimedOut => EXIT_TIMEOUT,
        AttackStatus::ExhaustedDepth => EXIT_VERIFY,
    };
    Ok((
        AttackReport {
            schema_version: 1,
            status: result.status,
            n_dip: result.n_dip,
            depth_used: result.depth_used,
            sat_queries: result.sat_queries,
            key: result.key.map(|k| k.to_grouped_string()),
            bounded_verification: result.bounded_verification,
            wall_time_s: result.wall_time.as_secs_f64(),
        },
        exit,
    ))
}

#[derive(Serialize)]
struct EvalReport {
    schema_version: u32,
    circuit: String,
    mode: String,
    kappa_s: usize,
    kappa_f: usize,
    alpha: f64,
    depth: usize,
    predicted_fc: f64,
    max_fc: f64,
    predicted_ndip: u128,
    fc: eval::FcEstimate,
    exhaustive: bool,
    scc: reencode::SccReport,
    overhead: eval::OverheadProxy,
}

fn cmd_eval(args: EvalArgs) -> CliResult<(EvalReport, i32)> {
    let file_cfg = match &args.config {
        Some(p) => read_config_file(p)?,
        None => BTreeMap::new(),
    };
    let locked_netlist = load_circuit(&args.locked)?;
    let oracle = load_circuit(&args.oracle)?;
    let meta_path = args
        .meta
        .clone()
        .unwrap_or_else(|| args.locked.with_extension("meta"));
    let meta_text = fs::read_to_string(&meta_path)
        .map_err(|e| CliFailure::config(format!("cannot read {}: {e}", meta_path.display())))?;
    let metadata = LockMetadata::parse(&meta_text, oracle.input_count())
        .map_err(|e| CliFailure::config(format!("{}: {e}", meta_path.display())))?;
    // Bench files carry no register tags; reattach them from the sidecar.
    let tags: Vec<crate::netlist::RegisterTag> = locked_netlist
        .flipflops()
        .iter()
        .map(|ff| {
            metadata
                .register_tags
                .get(&ff.output)
                .copied()
                .unwrap_or(crate::netlist::RegisterTag::Original)
        })
        .collect();
    let locked_netlist = locked_netlist
        .with_register_tags(tags)
        .map_err(|e| CliFailure::config(e.to_string()))?;
    let locked = LockedCircuit {
        circuit: locked_netlist,
        config: metadata.config.clone(),
        flag_nets: metadata.flag_nets.clone(),
    };
    let cfg = &locked.config;
    let width = oracle.input_count();

    let depth = args
        .depth
        .or(config_get(&file_cfg, "depth")?)
        .unwrap_or(cfg.kappa_s);
    let samples = args
        .samples
        .or(config_get(&file_cfg, "samples")?)
        .unwrap_or(800);
    let seed = args.seed.or(config_get(&file_cfg, "seed")?).unwrap_or(0);

    let enumerable = (cfg.kappa() + depth) * width <= eval::ENUMERATION_BOUND_BITS;
    let use_exhaustive = args.exhaustive || (enumerable && args.samples.is_none());

    let fc = if args.profile {
        eval::estimate_fc_depth_profile(&locked, &oracle, samples, seed)
            .map_err(|e| CliFailure::config(e.to_string()))?
    } else if use_exhaustive {
        eval::estimate_fc(&locked, &oracle, depth, 0, SampleMode::Exhaustive, seed)
            .map_err(|e| CliFailure::config(e.to_string()))?
    } else {
        eval::estimate_fc(&locked, &oracle, depth, samples, SampleMode::Random, seed)
            .map_err(|e| CliFailure::config(e.to_string()))?
    };

    if args.table_pbm.is_some() || args.table_csv.is_some() {
        let table = eval::build_error_table(&locked, &oracle, depth)
            .map_err(|e| CliFailure::config(e.to_string()))?;
        if let Some(path) = &args.table_pbm {
            let mut f = fs::File::create(path)
                .map_err(|e| CliFailure::config(format!("{}: {e}", path.display())))?;
            table
                .write_pbm(&mut f)
                .map_err(|e| CliFailure::config(e.to_string()))?;
        }
        if let Some(path) = &args.table_csv {
            let mut f = fs::File::create(path)
                .map_err(|e| CliFailure::config(format!("{}: {e}", path.display())))?;
            table
                .write_csv(&mut f)
                .map_err(|e| CliFailure::config(e.to_string()))?;
        }
    }

    Ok((
        EvalReport {
            schema_version: 1,
            circuit: locked.circuit.name().to_string(),
            mode: cfg.mode.name().to_string(),
            kappa_s: cfg.kappa_s,
            kappa_f: cfg.kappa_f,
            alpha: cfg.alpha,
            depth,
            predicted_fc: eval::predict_fc(cfg, width),
            max_fc: eval::max_fc(cfg, width),
            predicted_ndip: attack::predict_ndip(cfg, width),
            fc,
            exhaustive: use_exhaustive && !args.profile,
            scc: reencode::scc_metrics(&locked.circuit),
            overhead: eval::overhead_proxy(&oracle, &locked.circuit),
        },
        EXIT_OK,
    ))
}

fn emit<T: Serialize>(report: &T, out: Option<&Path>) -> CliResult<()> {
    let json = serde_json::to_string_pretty(report).expect("serializable");
    match out {
        Some(path) => fs::write(path, json.as_bytes())
            .map_err(|e| CliFailure::config(format!("cannot write {}: {e}", path.display())))?,
        None => println!("{json}"),
    }
    Ok(())
}

/// Runs the CLI on the given arguments and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version with success exits.
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let outcome: CliResult<i32> = match cli.command {
        Command::Lock(args) => cmd_lock(args).and_then(|(report, code)| {
            emit(&report, None)?;
            Ok(code)
        }),
        Command::Attack(args) => {
            let out = args.out.clone();
            cmd_attack(args).and_then(|(report, code)| {
                emit(&report, out.as_deref())?;
                Ok(code)
            })
        }
        Command::Eval(args) => {
            let out = args.out.clone();
            cmd_eval(args).and_then(|(report, code)| {
                emit(&report, out.as_deref())?;
                Ok(code)
            })
        }
    };
    match outcome {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            failure.code
        }
    }
}
