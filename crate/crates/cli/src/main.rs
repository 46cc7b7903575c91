//! Command-line harness: network generation, cutset selection, inference and
//! accuracy evaluation over the line-oriented text formats.
//!
//! Exit codes: 0 ok, 2 usage, 3 model invalid, 4 zero-probability evidence,
//! 5 width-guard violation.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use wcutset_core::exact::{all_marginals, DEFAULT_WIDTH_CAP, Distribution, ExactError};
use wcutset_core::format;
use wcutset_core::gen::{
    gen_coding, gen_coding_from_checks, gen_evidence, gen_grid, gen_random, gen_twolayer,
    parse_parity_matrix, EvidencePolicy,
};
use wcutset_core::graph::{adjusted_width, loop_cutset};
use wcutset_core::ibp::ibp_run;
use wcutset_core::metrics;
use wcutset_core::model::{BayesNet, Evidence, VarId};
use wcutset_core::sampling::{
    cutset_estimate, gibbs_estimate, Cutset, SamplerConfig, SamplingError,
};
use wcutset_core::wcutset;

const EXIT_MODEL: u8 = 3;
const EXIT_ZERO_EVIDENCE: u8 = 4;
const EXIT_WIDTH_GUARD: u8 = 5;

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn new(code: u8, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::new(1, format!("io: {e}"))
    }
}

impl From<format::FormatError> for CliError {
    fn from(e: format::FormatError) -> Self {
        CliError::new(EXIT_MODEL, format!("model: {e}"))
    }
}

impl From<wcutset_core::model::ModelError> for CliError {
    fn from(e: wcutset_core::model::ModelError) -> Self {
        CliError::new(EXIT_MODEL, format!("model: {e}"))
    }
}

impl From<wcutset_core::gen::GenError> for CliError {
    fn from(e: wcutset_core::gen::GenError) -> Self {
        CliError::new(2, format!("usage: {e}"))
    }
}

impl From<ExactError> for CliError {
    fn from(e: ExactError) -> Self {
        let code = match e {
            ExactError::ZeroEvidence => EXIT_ZERO_EVIDENCE,
            ExactError::WidthGuard { .. } => EXIT_WIDTH_GUARD,
            ExactError::BadEvidence(_) => EXIT_MODEL,
            _ => 1,
        };
        CliError::new(code, format!("exact: {e}"))
    }
}

impl From<SamplingError> for CliError {
    fn from(e: SamplingError) -> Self {
        let code = match &e {
            SamplingError::Exact(inner) => {
                return CliError::from(clone_exact_code(inner, &e));
            }
            SamplingError::Model(_) => EXIT_MODEL,
            _ => 1,
        };
        CliError::new(code, format!("sampling: {e}"))
    }
}

fn clone_exact_code(inner: &ExactError, outer: &SamplingError) -> CliError {
    let code = match inner {
        ExactError::ZeroEvidence => EXIT_ZERO_EVIDENCE,
        ExactError::WidthGuard { .. } => EXIT_WIDTH_GUARD,
        _ => 1,
    };
    CliError::new(code, format!("sampling: {outer}"))
}

impl From<metrics::MetricsError> for CliError {
    fn from(e: metrics::MetricsError) -> Self {
        CliError::new(1, format!("metrics: {e}"))
    }
}

#[derive(Parser)]
#[command(name = "wcutset", version, about = "Cutset-sampling inference for discrete Bayesian networks")]
struct Cli {
    /// Master RNG seed; per-chain seeds are derived as seed XOR chain index.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write primary output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Suppress informational output on stdout.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a benchmark network (and optionally an evidence file).
    Gen {
        #[command(subcommand)]
        family: GenFamily,
    },
    /// Select a w-cutset and report its size and measured width.
    Cutset(CutsetArgs),
    /// Run inference and emit a CSV of posterior marginals.
    Infer(InferArgs),
    /// Compare an estimate CSV against an exact CSV.
    Eval(EvalArgs),
}

#[derive(Args)]
struct EvidenceGenArgs {
    /// Also generate this many evidence variables via one forward sample.
    #[arg(long)]
    evidence: Option<usize>,
    /// Where evidence variables may be placed.
    #[arg(long, value_enum, default_value_t = PolicyArg::Leaves)]
    policy: PolicyArg,
    /// Output path for the generated evidence file.
    #[arg(long)]
    evidence_out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Leaves,
    Channel,
    Any,
}

impl From<PolicyArg> for EvidencePolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Leaves => EvidencePolicy::Leaves,
            PolicyArg::Channel => EvidencePolicy::Channel,
            PolicyArg::Any => EvidencePolicy::Any,
        }
    }
}

#[derive(Subcommand)]
enum GenFamily {
    /// Random DAG: n variables, r roots, p parents per non-root.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        roots: usize,
        #[arg(long, default_value_t = 2)]
        parents: usize,
        #[command(flatten)]
        ev: EvidenceGenArgs,
    },
    /// Two-layer network: r roots feeding n - r leaves with p parents each.
    Twolayer {
        #[arg(long)]
        roots: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        parents: usize,
        #[command(flatten)]
        ev: EvidenceGenArgs,
    },
    /// Directed grid with parents up and left.
    Grid {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        /// Add a third diagonal parent where available.
        #[arg(long)]
        diagonal: bool,
        #[command(flatten)]
        ev: EvidenceGenArgs,
    },
    /// Coding network: k code bits, k parity checks, 2k channel bits.
    Coding {
        #[arg(long)]
        k: usize,
        /// Channel flip probability.
        #[arg(long, default_value_t = 0.05)]
        flip: f64,
        /// Optional parity-check matrix file (three parent indices per line).
        #[arg(long)]
        parity: Option<PathBuf>,
        #[command(flatten)]
        ev: EvidenceGenArgs,
    },
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum MethodArg {
    Loop,
    Ga,
    Mg,
    Hg,
}

#[derive(Args)]
struct CutsetArgs {
    #[arg(long)]
    net: PathBuf,
    #[arg(long)]
    evidence: Option<PathBuf>,
    #[arg(long, value_enum)]
    method: MethodArg,
    /// Width bound, a single value ("3") or inclusive range ("1..6").
    #[arg(long, default_value = "1")]
    w: String,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum AlgorithmArg {
    Exact,
    Gibbs,
    Cutset,
    Ibp,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum CutsetSourceArg {
    Loop,
    Ga,
    Mg,
    Hg,
    File,
}

#[derive(Args)]
struct InferArgs {
    #[arg(long)]
    net: PathBuf,
    #[arg(long)]
    evidence: Option<PathBuf>,
    #[arg(long, value_enum)]
    algorithm: AlgorithmArg,
    /// How to obtain the cutset (algorithm=cutset only).
    #[arg(long, value_enum, default_value_t = CutsetSourceArg::Loop)]
    cutset_source: CutsetSourceArg,
    /// Cutset file for --cutset-source file.
    #[arg(long)]
    cutset_file: Option<PathBuf>,
    /// Width bound for the ga/mg/hg cutset sources.
    #[arg(long, default_value_t = 1)]
    w: usize,
    /// Number of independent chains.
    #[arg(long, default_value_t = 20)]
    chains: usize,
    /// Samples (full sweeps) per chain.
    #[arg(long, default_value_t = 1000, conflicts_with = "time_ms")]
    samples: usize,
    /// Wall-clock budget in milliseconds, split across chains.
    #[arg(long)]
    time_ms: Option<u64>,
    /// Burn-in sweeps per chain.
    #[arg(long, default_value_t = 0)]
    burn_in: usize,
    /// Message-passing rounds (algorithm=ibp only).
    #[arg(long, default_value_t = 25)]
    iterations: usize,
    /// Also compute exact marginals; adds exact/abs_error CSV columns and an
    /// accuracy summary.
    #[arg(long)]
    exact_ref: bool,
}

#[derive(Args)]
struct EvalArgs {
    /// Estimate CSV (variable,value,estimate).
    estimates: PathBuf,
    /// Exact CSV (variable,value,estimate).
    exact: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Gen { family } => cmd_gen(cli, family),
        Command::Cutset(args) => cmd_cutset(cli, args),
        Command::Infer(args) => cmd_infer(cli, args),
        Command::Eval(args) => cmd_eval(cli, args),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::new(1, format!("cannot read {}: {e}", path.display())))
}

fn emit(cli: &Cli, content: &str) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => std::fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn info(cli: &Cli, line: &str) {
    if !cli.quiet {
        println!("{line}");
    }
}

fn load_net(path: &Path) -> Result<BayesNet, CliError> {
    let net = format::parse_network(&read(path)?)?;
    let diags = net.validate();
    if !diags.is_empty() {
        return Err(CliError::new(
            EXIT_MODEL,
            format!("model: {}", diags[0].message),
        ));
    }
    Ok(net)
}

fn load_evidence(path: Option<&PathBuf>, net: &BayesNet) -> Result<Evidence, CliError> {
    match path {
        Some(p) => Ok(format::parse_evidence(&read(p)?, net)?),
        None => Ok(Evidence::new()),
    }
}

fn cmd_gen(cli: &Cli, family: &GenFamily) -> Result<(), CliError> {
    let (net, ev) = match family {
        GenFamily::Random {
            n,
            roots,
            parents,
            ev,
        } => (gen_random(*n, *roots, *parents, cli.seed)?, ev),
        GenFamily::Twolayer {
            roots,
            n,
            parents,
            ev,
        } => (gen_twolayer(*roots, *n, *parents, cli.seed)?, ev),
        GenFamily::Grid {
            rows,
            cols,
            diagonal,
            ev,
        } => (gen_grid(*rows, *cols, *diagonal, cli.seed)?, ev),
        GenFamily::Coding { k, flip, parity, ev } => {
            let net = match parity {
                Some(path) => {
                    let checks = parse_parity_matrix(&read(path)?)?;
                    gen_coding_from_checks(*k, &checks, *flip)?
                }
                None => gen_coding(*k, *flip, cli.seed)?,
            };
            (net, ev)
        }
    };
    emit(cli, &format::serialize_network(&net))?;
    let edges: usize = net.vars().map(|v| net.parents(v).len()).sum();
    info(cli, &format!("generated {} variables, {} edges", net.num_vars(), edges));

    if let Some(count) = ev.evidence {
        let out = ev.evidence_out.as_ref().ok_or_else(|| {
            CliError::new(2, "usage: --evidence requires --evidence-out")
        })?;
        let e = gen_evidence(&net, count, ev.policy.into(), cli.seed ^ 0x45564944)?;
        std::fs::write(out, format::serialize_evidence(&e, &net))?;
        info(cli, &format!("evidence on {} variables -> {}", e.len(), out.display()));
    }
    Ok(())
}

fn parse_w_range(spec: &str) -> Result<Vec<usize>, CliError> {
    let parse_one = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| CliError::new(2, format!("usage: bad width `{s}`")))
    };
    if let Some((lo, hi)) = spec.split_once("..") {
        let (lo, hi) = (parse_one(lo)?, parse_one(hi)?);
        if lo == 0 || hi < lo {
            return Err(CliError::new(2, format!("usage: bad width range `{spec}`")));
        }
        Ok((lo..=hi).collect())
    } else {
        let w = parse_one(spec)?;
        if w == 0 {
            return Err(CliError::new(2, "usage: width must be at least 1"));
        }
        Ok(vec![w])
    }
}

fn loop_cutset_for(net: &BayesNet, e: &Evidence) -> Cutset {
    let members: Vec<VarId> = loop_cutset(net)
        .into_iter()
        .filter(|v| !e.contains(*v))
        .collect();
    let member_set = members.iter().copied().collect();
    let e_vars = e.vars().collect();
    let measured = adjusted_width(net, &member_set, &e_vars);
    Cutset {
        members,
        w_bound: 1,
        measured_width: measured,
    }
}

fn cmd_cutset(cli: &Cli, args: &CutsetArgs) -> Result<(), CliError> {
    let net = load_net(&args.net)?;
    let e = load_evidence(args.evidence.as_ref(), &net)?;
    let ws = parse_w_range(&args.w)?;
    let mut last_members: Option<Vec<VarId>> = None;
    for &w in &ws {
        let (cutset, elapsed) = match args.method {
            MethodArg::Loop => {
                let start = std::time::Instant::now();
                (loop_cutset_for(&net, &e), start.elapsed())
            }
            MethodArg::Ga | MethodArg::Mg | MethodArg::Hg => {
                let method = match args.method {
                    MethodArg::Ga => wcutset::Method::Ga,
                    MethodArg::Mg => wcutset::Method::Mg,
                    _ => wcutset::Method::Hg,
                };
                let r = wcutset::select(&net, &e, method, w)?;
                (r.cutset, r.elapsed)
            }
        };
        info(
            cli,
            &format!(
                "w={} |C|={} width={} seconds={:.3}",
                w,
                cutset.members.len(),
                cutset.measured_width,
                elapsed.as_secs_f64()
            ),
        );
        last_members = Some(cutset.members);
    }
    if let (Some(path), Some(members)) = (&cli.out, &last_members) {
        std::fs::write(path, format::serialize_cutset_members(members, &net))?;
    }
    Ok(())
}

fn build_cutset(args: &InferArgs, net: &BayesNet, e: &Evidence) -> Result<Cutset, CliError> {
    match args.cutset_source {
        CutsetSourceArg::Loop => Ok(loop_cutset_for(net, e)),
        CutsetSourceArg::File => {
            let path = args.cutset_file.as_ref().ok_or_else(|| {
                CliError::new(2, "usage: --cutset-source file requires --cutset-file")
            })?;
            let members = format::parse_cutset_members(&read(path)?, net)?;
            let member_set = members.iter().copied().collect();
            let e_vars = e.vars().collect();
            let measured = adjusted_width(net, &member_set, &e_vars);
            Ok(Cutset {
                members,
                w_bound: measured,
                measured_width: measured,
            })
        }
        CutsetSourceArg::Ga | CutsetSourceArg::Mg | CutsetSourceArg::Hg => {
            let method = match args.cutset_source {
                CutsetSourceArg::Ga => wcutset::Method::Ga,
                CutsetSourceArg::Mg => wcutset::Method::Mg,
                _ => wcutset::Method::Hg,
            };
            Ok(wcutset::select(net, e, method, args.w)?.cutset)
        }
    }
}

struct InferResult {
    pooled: BTreeMap<VarId, Distribution>,
    per_chain: Vec<BTreeMap<VarId, Distribution>>,
}

fn cmd_infer(cli: &Cli, args: &InferArgs) -> Result<(), CliError> {
    let net = load_net(&args.net)?;
    let e = load_evidence(args.evidence.as_ref(), &net)?;
    let mut config = SamplerConfig::new(args.chains, args.samples, cli.seed);
    config.burn_in = args.burn_in;
    config.time_bound = args.time_ms.map(Duration::from_millis);

    let result = match args.algorithm {
        AlgorithmArg::Exact => {
            let pooled = all_marginals(&net, &e)?;
            InferResult {
                per_chain: vec![pooled.clone()],
                pooled,
            }
        }
        AlgorithmArg::Ibp => {
            let pooled = ibp_run(&net, &e, args.iterations)
                .map_err(|err| CliError::new(EXIT_ZERO_EVIDENCE, format!("ibp: {err}")))?;
            InferResult {
                per_chain: vec![pooled.clone()],
                pooled,
            }
        }
        AlgorithmArg::Gibbs => {
            let est = gibbs_estimate(&net, &e, &config)?;
            InferResult {
                pooled: est.pooled,
                per_chain: est.per_chain,
            }
        }
        AlgorithmArg::Cutset => {
            let cutset = build_cutset(args, &net, &e)?;
            if cutset.measured_width > DEFAULT_WIDTH_CAP {
                return Err(CliError::new(
                    EXIT_WIDTH_GUARD,
                    format!(
                        "width-guard: cutset width {} exceeds cap {}",
                        cutset.measured_width, DEFAULT_WIDTH_CAP
                    ),
                ));
            }
            info(
                cli,
                &format!(
                    "cutset: {} members, width {}",
                    cutset.members.len(),
                    cutset.measured_width
                ),
            );
            let est = cutset_estimate(&net, &cutset, &e, &config)?;
            InferResult {
                pooled: est.pooled,
                per_chain: est.per_chain,
            }
        }
    };

    let exact = if args.exact_ref && args.algorithm != AlgorithmArg::Exact {
        Some(all_marginals(&net, &e)?)
    } else {
        None
    };

    let mut csv = String::new();
    if exact.is_some() {
        csv.push_str("variable,value,estimate,exact,abs_error\n");
    } else {
        csv.push_str("variable,value,estimate\n");
    }
    for (v, d) in &result.pooled {
        for (value, &p) in d.probs.iter().enumerate() {
            match &exact {
                Some(ex) => {
                    let q = ex[v].probs[value];
                    writeln!(
                        csv,
                        "{},{},{:.9},{:.9},{:.9}",
                        net.name(*v),
                        value,
                        p,
                        q,
                        (p - q).abs()
                    )
                    .unwrap();
                }
                None => {
                    writeln!(csv, "{},{},{:.9}", net.name(*v), value, p).unwrap();
                }
            }
        }
    }
    emit(cli, &csv)?;

    if let Some(ex) = &exact {
        if result.per_chain.len() >= 2 {
            let (acc, _) = metrics::build_report(ex, &result.per_chain, 0.10)?;
            info(
                cli,
                &format!(
                    "mse={:.9} delta={:.9} delta90={:.9}",
                    acc.mse, acc.delta, acc.delta90
                ),
            );
        } else {
            let m = metrics::mse(ex, &result.pooled)?;
            let d = metrics::avg_abs_error(ex, &result.pooled)?;
            info(cli, &format!("mse={m:.9} delta={d:.9}"));
        }
    }
    Ok(())
}

/// Parse a marginal CSV (header `variable,value,estimate[,...]`) into
/// per-variable distributions keyed by name.
fn parse_csv(text: &str, path: &Path) -> Result<BTreeMap<String, Vec<(usize, f64)>>, CliError> {
    let mut rows: BTreeMap<String, Vec<(usize, f64)>> = BTreeMap::new();
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::new(1, format!("{}: empty file", path.display())))?;
    if !header.starts_with("variable,value,estimate") {
        return Err(CliError::new(
            1,
            format!("{}: unexpected header `{header}`", path.display()),
        ));
    }
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut cols = line.split(',');
        let bad = || CliError::new(1, format!("{}: bad row {}", path.display(), i + 2));
        let name = cols.next().ok_or_else(bad)?;
        let value: usize = cols.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let est: f64 = cols.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        rows.entry(name.to_string()).or_default().push((value, est));
    }
    Ok(rows)
}

fn to_marginals(
    rows: &BTreeMap<String, Vec<(usize, f64)>>,
) -> BTreeMap<VarId, Distribution> {
    // Names are mapped to synthetic ids by sorted order; eval joins on the
    // name anyway, so both inputs get the same mapping.
    rows.iter()
        .enumerate()
        .map(|(i, (_, entries))| {
            let mut entries = entries.clone();
            entries.sort_by_key(|&(value, _)| value);
            let probs = entries.into_iter().map(|(_, p)| p).collect();
            let v = VarId(i);
            (v, Distribution { var: v, probs })
        })
        .collect()
}

fn cmd_eval(cli: &Cli, args: &EvalArgs) -> Result<(), CliError> {
    let est_rows = parse_csv(&read(&args.estimates)?, &args.estimates)?;
    let exact_rows = parse_csv(&read(&args.exact)?, &args.exact)?;

    // Join check on (variable, value).
    let keys = |rows: &BTreeMap<String, Vec<(usize, f64)>>| {
        rows.iter()
            .flat_map(|(n, es)| es.iter().map(move |(v, _)| (n.clone(), *v)))
            .collect::<std::collections::BTreeSet<_>>()
    };
    let (ka, kb) = (keys(&est_rows), keys(&exact_rows));
    if ka != kb {
        let missing: Vec<String> = ka
            .symmetric_difference(&kb)
            .map(|(n, v)| format!("{n}/{v}"))
            .collect();
        return Err(CliError::new(
            1,
            format!("join mismatch on keys: {}", missing.join(", ")),
        ));
    }

    let est = to_marginals(&est_rows);
    let exact = to_marginals(&exact_rows);
    let mse = metrics::mse(&exact, &est)?;
    let delta = metrics::avg_abs_error(&exact, &est)?;

    let mut csv = String::new();
    csv.push_str("metric,variable,value\n");
    writeln!(csv, "mse,,{mse:.9}").unwrap();
    writeln!(csv, "delta,,{delta:.9}").unwrap();
    for (i, name) in exact_rows.keys().enumerate() {
        let v = VarId(i);
        let err: f64 = exact[&v]
            .probs
            .iter()
            .zip(&est[&v].probs)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            / exact[&v].probs.len() as f64;
        writeln!(csv, "var_abs_error,{name},{err:.9}").unwrap();
    }
    emit(cli, &csv)?;
    Ok(())
}
