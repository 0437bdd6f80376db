use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::time::Instant;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use m2s_core::{
    compute_z, count_k_minima, enumerate_k_minima, exact_interval_prob, find_t1t2, find_t_deterministic,
    find_t_randomized, gen_column, gen_csse, gen_multicopy, gen_random, gen_random_regular, good_set_nonsparse,
    ising_to_maxsat_value, k_basins, lemma_scaling_report, max_interval_prob, mc_interval_prob, solve_auto,
    solve_avg_degree, solve_brute, solve_coloring_baseline, solve_combined, ColumnTargets, IsingInstance, RandomSpec,
    SolveOptions, SolveResult, TParams, VertexRule, WeightGen, WeightedSum,
};
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use crate::input::{self, InputFormat};

const TOOL: &str = "m2s";
const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Largest instance `--verify` checks against brute force.
const VERIFY_MAX_N: usize = 20;

/// Bad flag combination found after parsing.
#[derive(Debug)]
pub struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}
impl std::error::Error for Usage {}

#[derive(Debug)]
pub struct VerifyFailed(pub String);

impl std::fmt::Display for VerifyFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "verification against brute force failed: {}", self.0)
    }
}
impl std::error::Error for VerifyFailed {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(Usage(msg.into()))
}

#[derive(Parser, Debug)]
#[command(name = "m2s", version, about = "Exact weighted MAX-2-SAT / Ising toolkit")]
pub struct Cli {
    /// Output path; `-` writes to standard output.
    #[arg(long, short, global = true, default_value = "-")]
    pub output: String,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate an instance from a named family.
    Generate(GenerateArgs),
    /// Find an exact ground state.
    Solve(SolveArgs),
    /// Count strict k-minima.
    CountMinima(CountArgs),
    /// Connected components of k-minima under k-flips.
    Basins(BasinArgs),
    /// Construct a variable set with weak internal coupling.
    Tset(TsetArgs),
    /// Leaf count of the effective-field enumeration for a set T.
    Z(ZArgs),
    /// Interval probabilities of weighted sign sums.
    Probe(ProbeArgs),
    /// Counter table for several methods over a family and sizes.
    Bench(BenchArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

#[derive(Args, Debug, Clone)]
pub struct InputArgs {
    /// Instance path; `-` reads standard input.
    #[arg(long, short, default_value = "-")]
    pub input: String,
    #[arg(long, value_enum, default_value_t = InputFormat::Auto)]
    pub format: InputFormat,
}

#[derive(Args, Debug, Clone)]
pub struct TArgs {
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Degree bound used for the thresholds (default: maximum degree).
    #[arg(long)]
    pub degree: Option<f64>,
    #[arg(long, default_value_t = 99.0)]
    pub c_dt: f64,
    #[arg(long, default_value_t = 99.0)]
    pub c_dtbar: f64,
    #[arg(long, default_value_t = 99.0)]
    pub c_delta: f64,
    #[arg(long, default_value_t = 99.0)]
    pub c_split: f64,
    #[arg(long, default_value_t = 32)]
    pub retries: usize,
}

impl TArgs {
    fn params(&self) -> TParams {
        TParams {
            epsilon: self.epsilon,
            degree: self.degree,
            c_dt: self.c_dt,
            c_dtbar: self.c_dtbar,
            c_delta: self.c_delta,
            c_split: self.c_split,
            ..TParams::default()
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Csse,
    Multicopy,
    Column,
    Random,
    Regular,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[arg(value_enum)]
    pub family: Family,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub copies: Option<usize>,
    #[arg(long, default_value_t = 4)]
    pub block: usize,
    #[arg(long)]
    pub f: Option<usize>,
    #[arg(long)]
    pub l: Option<usize>,
    /// Column targets from a random planted assignment instead of zeros.
    #[arg(long)]
    pub sampled: bool,
    #[arg(long, default_value_t = 0.3)]
    pub density: f64,
    /// Degree of the regular family.
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, default_value_t = -5, allow_hyphen_values = true)]
    pub wmin: i64,
    #[arg(long, default_value_t = 5, allow_hyphen_values = true)]
    pub wmax: i64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodArg {
    Brute,
    Coloring,
    Effective,
    AvgDegree,
    Combined,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value_t = MethodArg::Effective)]
    pub method: MethodArg,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    /// Row bound for the combined method (default: largest row sum of |J|).
    #[arg(long)]
    pub jmax: Option<i64>,
    /// Compare with brute force (instances of at most 20 variables).
    #[arg(long)]
    pub verify: bool,
    /// Refuse instances with more variables than this.
    #[arg(long, default_value_t = 64)]
    pub max_n: usize,
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub t: TArgs,
}

#[derive(Args, Debug)]
pub struct CountArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Also list the minima.
    #[arg(long)]
    pub list: bool,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleArg {
    NoStrictImprovement,
    NoStrictWorsening,
}

#[derive(Args, Debug)]
pub struct BasinArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, value_enum, default_value_t = RuleArg::NoStrictImprovement)]
    pub rule: RuleArg,
    /// Print basin sizes as CSV instead of the JSON report.
    #[arg(long)]
    pub csv: bool,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum TsetMode {
    Randomized,
    Deterministic,
    Split,
    Nonsparse,
}

#[derive(Args, Debug)]
pub struct TsetArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value_t = TsetMode::Randomized)]
    pub mode: TsetMode,
    /// Set size for deterministic mode.
    #[arg(long)]
    pub size: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub t: TArgs,
}

#[derive(Args, Debug)]
pub struct ZArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Seed of the randomized set construction.
    #[arg(long, conflicts_with = "t_set")]
    pub tset_seed: Option<u64>,
    /// Explicit set, e.g. `0,3,5`.
    #[arg(long = "t", value_name = "LIST")]
    pub t_set: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    #[command(flatten)]
    pub t: TArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeMode {
    Exact,
    Max,
    Mc,
    Scaling,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Json,
    Csv,
}

#[derive(Args, Debug)]
pub struct ProbeArgs {
    /// File of integer weights separated by commas or whitespace.
    #[arg(long, conflicts_with = "weights")]
    pub weights_file: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub weights: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub delta: i64,
    #[arg(long, value_enum, default_value_t = ProbeMode::Max)]
    pub mode: ProbeMode,
    /// Shift; `mc` defaults to the maximizing shift.
    #[arg(long, allow_hyphen_values = true)]
    pub h: Option<i64>,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    /// Sizes for the scaling table, e.g. `16,64,256`.
    #[arg(long)]
    pub n_list: Option<String>,
    /// Magnitudes to draw scaling weights from (default: unit weights).
    #[arg(long)]
    pub choice: Option<String>,
    #[arg(long = "table-format", value_enum, default_value_t = TableFormat::Json)]
    pub table_format: TableFormat,
    #[command(flatten)]
    pub common: Common,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchFamily {
    Multicopy,
    Edgeless,
    Random,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub family: BenchFamily,
    /// Instance sizes, e.g. `8,12,16`; may be empty.
    #[arg(long, default_value = "")]
    pub sizes: String,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "brute,coloring,effective")]
    pub methods: Vec<MethodArg>,
    #[arg(long, default_value_t = 4)]
    pub block: usize,
    #[arg(long, default_value_t = 0.3)]
    pub density: f64,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long = "table-format", value_enum, default_value_t = TableFormat::Json)]
    pub table_format: TableFormat,
    #[command(flatten)]
    pub common: Common,
}

fn check_workers(w: usize) -> Result<()> {
    if w == 0 {
        return Err(usage("--workers must be at least 1"));
    }
    Ok(())
}

fn emit(path: &str, text: &str) -> Result<()> {
    if path == "-" {
        let mut out = io::stdout().lock();
        out.write_all(text.as_bytes()).context("writing standard output")?;
        out.flush().context("writing standard output")?;
        Ok(())
    } else {
        fs::write(path, text).with_context(|| format!("writing {path}"))
    }
}

fn emit_json(path: &str, v: &Value) -> Result<()> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    emit(path, &s)
}

struct Envelope<'a> {
    command: &'a str,
    seed: Option<u64>,
    workers: Option<usize>,
    digest: Option<String>,
    start: Instant,
}

impl Envelope<'_> {
    fn wrap(self, counters: Value, result: Value) -> Value {
        json!({
            "tool": TOOL,
            "version": VERSION,
            "command": self.command,
            "seed": self.seed,
            "workers": self.workers,
            "instance_digest": self.digest,
            "wall_time_s": self.start.elapsed().as_secs_f64(),
            "counters": counters,
            "result": result,
        })
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let out = cli.output.clone();
    match cli.command {
        Command::Generate(a) => generate(a, &out),
        Command::Solve(a) => solve(a, &out),
        Command::CountMinima(a) => count_minima(a, &out),
        Command::Basins(a) => basins(a, &out),
        Command::Tset(a) => tset(a, &out),
        Command::Z(a) => z(a, &out),
        Command::Probe(a) => probe(a, &out),
        Command::Bench(a) => bench(a, &out),
    }
}

fn need<T: Copy>(v: Option<T>, flag: &str, family: &str) -> Result<T> {
    v.ok_or_else(|| usage(format!("family {family} needs --{flag}")))
}

fn generate(a: GenerateArgs, out: &str) -> Result<()> {
    let start = Instant::now();
    let mut meta = Map::new();
    let (family, inst) = match a.family {
        Family::Csse => {
            let n = need(a.n, "n", "csse")?;
            ("csse", gen_csse(n)?)
        }
        Family::Multicopy => {
            let c = need(a.copies, "copies", "multicopy")?;
            meta.insert("copies".into(), json!(c));
            meta.insert("block".into(), json!(a.block));
            ("multicopy", gen_multicopy(c, a.block)?)
        }
        Family::Column => {
            let f = need(a.f, "f", "column")?;
            let l = need(a.l, "l", "column")?;
            let mode = if a.sampled {
                ColumnTargets::Sampled(a.seed)
            } else {
                ColumnTargets::Zeros
            };
            let ci = gen_column(f, l, mode)?;
            meta.insert("f".into(), json!(f));
            meta.insert("l".into(), json!(l));
            meta.insert("M".into(), json!(ci.targets));
            if let Some(p) = &ci.planted {
                meta.insert("planted".into(), json!(p.to_string()));
            }
            ("column", ci.inst)
        }
        Family::Random => {
            let n = need(a.n, "n", "random")?;
            meta.insert("density".into(), json!(a.density));
            meta.insert("wmin".into(), json!(a.wmin));
            meta.insert("wmax".into(), json!(a.wmax));
            let spec = RandomSpec {
                n,
                density: a.density,
                wmin: a.wmin,
                wmax: a.wmax,
                seed: a.seed,
            };
            ("random", gen_random(&spec)?)
        }
        Family::Regular => {
            let n = need(a.n, "n", "regular")?;
            let d = need(a.d, "d", "regular")?;
            meta.insert("d".into(), json!(d));
            meta.insert("wmin".into(), json!(a.wmin));
            meta.insert("wmax".into(), json!(a.wmax));
            ("regular", gen_random_regular(n, d, a.wmin, a.wmax, a.seed)?)
        }
    };
    meta.entry("f").or_insert(Value::Null);
    meta.entry("l").or_insert(Value::Null);
    meta.entry("M").or_insert(Value::Null);
    meta.insert("family".into(), json!(family));
    meta.insert("seed".into(), json!(a.seed));
    meta.insert("tool".into(), json!(TOOL));
    meta.insert("version".into(), json!(VERSION));
    meta.insert("instance_digest".into(), json!(input::digest(&inst)));
    meta.insert("counters".into(), json!({}));
    meta.insert("wall_time_s".into(), json!(start.elapsed().as_secs_f64()));
    let mut doc = serde_json::to_value(inst.to_json())?;
    doc.as_object_mut()
        .expect("instance JSON is an object")
        .insert("meta".into(), Value::Object(meta));
    emit_json(out, &doc)
}

fn max_row_sum(inst: &IsingInstance) -> i64 {
    (0..inst.n()).map(|i| inst.abs_row_sum(i)).max().unwrap_or(0)
}

fn run_method(
    inst: &IsingInstance,
    method: MethodArg,
    alpha: f64,
    jmax: Option<i64>,
    opts: &SolveOptions,
) -> Result<SolveResult> {
    let r = match method {
        MethodArg::Brute => solve_brute(inst, opts.workers)?,
        MethodArg::Coloring => solve_coloring_baseline(inst, opts.workers)?,
        MethodArg::Effective => solve_auto(inst, opts)?,
        MethodArg::AvgDegree => solve_avg_degree(inst, opts)?,
        MethodArg::Combined => {
            let j = jmax.unwrap_or_else(|| max_row_sum(inst));
            solve_combined(inst, alpha, j, opts)?
        }
    };
    Ok(r)
}

fn solve(a: SolveArgs, out: &str) -> Result<()> {
    check_workers(a.common.workers)?;
    if !(a.alpha > 0.0 && a.alpha < 1.0) {
        return Err(usage(format!("--alpha {} outside (0, 1)", a.alpha)));
    }
    let start = Instant::now();
    let loaded = input::load(&a.input.input, a.input.format)?;
    let inst = &loaded.inst;
    if inst.n() > a.max_n {
        return Err(m2s_core::Error::ResourceLimit(format!("{} variables above --max-n {}", inst.n(), a.max_n)).into());
    }
    let opts = SolveOptions {
        seed: a.common.seed,
        workers: a.common.workers,
        params: a.t.params(),
        retries: a.t.retries,
    };
    let r = run_method(inst, a.method, a.alpha, a.jmax, &opts)?;

    let verified = if a.verify {
        if inst.n() <= VERIFY_MAX_N {
            let b = solve_brute(inst, a.common.workers)?;
            if b.energy != r.energy || b.best != r.best {
                return Err(anyhow::Error::new(VerifyFailed(format!(
                    "method gave energy {} at {}, brute force {} at {}",
                    r.energy, r.best, b.energy, b.best
                ))));
            }
            Some(true)
        } else {
            eprintln!("warning: --verify skipped, {} variables above {VERIFY_MAX_N}", inst.n());
            None
        }
    } else {
        None
    };

    let mut result = json!({
        "n": inst.n(),
        "energy": r.energy,
        "assignment": r.best.to_string(),
        "method": r.method,
        "engine": r.engine,
        "t": r.t,
        "blocks": r.blocks,
        "notes": r.notes,
        "verified": verified,
    });
    if let Some(w) = &loaded.wcnf {
        let total = w.total_weight();
        let sat = ising_to_maxsat_value(inst, &r.best, total)?;
        result["maxsat"] = json!({
            "total_weight": total,
            "satisfied_weight": sat,
            "violated_weight": total - sat,
        });
    }
    let env = Envelope {
        command: "solve",
        seed: Some(a.common.seed),
        workers: Some(a.common.workers),
        digest: Some(input::digest(inst)),
        start,
    };
    emit_json(out, &env.wrap(serde_json::to_value(r.counters)?, result))
}

fn count_minima(a: CountArgs, out: &str) -> Result<()> {
    check_workers(a.workers)?;
    let start = Instant::now();
    let inst = input::load(&a.input.input, a.input.format)?.inst;
    let result = if a.list {
        let rep = enumerate_k_minima(&inst, a.k, a.workers)?;
        json!({ "k": a.k, "count": rep.minima.len(), "minima": rep.minima })
    } else {
        json!({ "k": a.k, "count": count_k_minima(&inst, a.k, a.workers)? })
    };
    let env = Envelope {
        command: "count-minima",
        seed: None,
        workers: Some(a.workers),
        digest: Some(input::digest(&inst)),
        start,
    };
    emit_json(out, &env.wrap(json!({ "assignments_scanned": scanned(&inst) }), result))
}

fn scanned(inst: &IsingInstance) -> Value {
    if inst.n() < 64 {
        json!(1u64 << inst.n())
    } else {
        Value::Null
    }
}

fn basins(a: BasinArgs, out: &str) -> Result<()> {
    check_workers(a.workers)?;
    let start = Instant::now();
    let inst = input::load(&a.input.input, a.input.format)?.inst;
    let rule = match a.rule {
        RuleArg::NoStrictImprovement => VertexRule::NoStrictImprovement,
        RuleArg::NoStrictWorsening => VertexRule::NoStrictWorsening,
    };
    let rep = k_basins(&inst, a.k, rule, a.workers)?;
    if a.csv {
        let mut s = String::from("basin,size\n");
        for (i, size) in rep.basin_sizes.iter().enumerate() {
            writeln!(s, "{i},{size}").expect("string write");
        }
        return emit(out, &s);
    }
    let env = Envelope {
        command: "basins",
        seed: None,
        workers: Some(a.workers),
        digest: Some(input::digest(&inst)),
        start,
    };
    let result = json!({
        "k": rep.k,
        "rule": rule,
        "vertex_count": rep.vertex_count,
        "basin_count": rep.basin_count,
        "basin_sizes": rep.basin_sizes,
        "minima_count": rep.minima.len(),
    });
    emit_json(out, &env.wrap(json!({ "assignments_scanned": scanned(&inst) }), result))
}

fn tset(a: TsetArgs, out: &str) -> Result<()> {
    check_workers(a.common.workers)?;
    let start = Instant::now();
    let inst = input::load(&a.input.input, a.input.format)?.inst;
    let params = a.t.params();
    let seed = a.common.seed;
    let (mode, result) = match a.mode {
        TsetMode::Randomized => (
            "randomized",
            serde_json::to_value(find_t_randomized(&inst, &params, seed, a.t.retries)?)?,
        ),
        TsetMode::Deterministic => {
            let size = a.size.ok_or_else(|| usage("deterministic mode needs --size"))?;
            (
                "deterministic",
                serde_json::to_value(find_t_deterministic(&inst, &params, size)?)?,
            )
        }
        TsetMode::Split => (
            "split",
            serde_json::to_value(find_t1t2(&inst.degree_graph(), a.alpha, seed, a.t.retries)?)?,
        ),
        TsetMode::Nonsparse => {
            let eps =
                a.t.epsilon
                    .unwrap_or_else(|| m2s_core::tset::default_nonsparse_epsilon(inst.n()));
            (
                "nonsparse",
                serde_json::to_value(good_set_nonsparse(&inst, eps, seed, a.t.retries)?)?,
            )
        }
    };
    let env = Envelope {
        command: "tset",
        seed: Some(seed),
        workers: Some(a.common.workers),
        digest: Some(input::digest(&inst)),
        start,
    };
    let result = json!({ "mode": mode, "params": params, "set": result });
    emit_json(out, &env.wrap(json!({}), result))
}

fn z(a: ZArgs, out: &str) -> Result<()> {
    check_workers(a.workers)?;
    let start = Instant::now();
    let inst = input::load(&a.input.input, a.input.format)?.inst;
    let (t, cert) = match (&a.t_set, a.tset_seed) {
        (Some(list), _) => {
            let mut t = input::parse_index_list(list)?;
            t.sort_unstable();
            t.dedup();
            (t, Value::Null)
        }
        (None, seed) => {
            let c = find_t_randomized(&inst, &a.t.params(), seed.unwrap_or(0), a.t.retries)?;
            (
                c.t.clone(),
                json!({ "success": c.success, "checks": c.checks, "thresholds": c.thresholds }),
            )
        }
    };
    let zv = compute_z(&inst, &t, a.workers)?;
    let outer_bits = inst.n() - t.len();
    let env = Envelope {
        command: "z",
        seed: a.tset_seed,
        workers: Some(a.workers),
        digest: Some(input::digest(&inst)),
        start,
    };
    let result = json!({
        "t": t,
        "z": zv.to_string(),
        "outer_bits": outer_bits,
        "certificate": cert,
    });
    emit_json(
        out,
        &env.wrap(json!({ "outer_assignments": scanned_bits(outer_bits) }), result),
    )
}

fn scanned_bits(bits: usize) -> Value {
    if bits < 64 {
        json!(1u64 << bits)
    } else {
        Value::Null
    }
}

fn ratio_f64(r: &num_rational::BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn probe_weights(a: &ProbeArgs) -> Result<WeightedSum> {
    let text = match (&a.weights_file, &a.weights) {
        (Some(p), _) => input::read_text(p)?,
        (None, Some(w)) => w.clone(),
        (None, None) => return Err(usage("probe needs --weights or --weights-file")),
    };
    Ok(WeightedSum::new(input::parse_int_list(&text)?)?)
}

fn probe(a: ProbeArgs, out: &str) -> Result<()> {
    check_workers(a.common.workers)?;
    let start = Instant::now();
    let seed = a.common.seed;
    let mut counters = json!({});
    let (result, csv) = match a.mode {
        ProbeMode::Exact => {
            let w = probe_weights(&a)?;
            let h = a.h.unwrap_or(0);
            let p = exact_interval_prob(&w, a.delta, h)?;
            let csv = format!(
                "n,delta,h,value_exact,value\n{},{},{h},{p},{}\n",
                w.len(),
                a.delta,
                ratio_f64(&p)
            );
            (
                json!({ "n": w.len(), "delta": a.delta, "h": h, "value_exact": p.to_string(), "value": ratio_f64(&p) }),
                csv,
            )
        }
        ProbeMode::Max => {
            let w = probe_weights(&a)?;
            let (h, p) = max_interval_prob(&w, a.delta)?;
            let csv = format!(
                "n,delta,h_star,value_exact,value\n{},{},{h},{p},{}\n",
                w.len(),
                a.delta,
                ratio_f64(&p)
            );
            (
                json!({ "n": w.len(), "delta": a.delta, "h_star": h, "value_exact": p.to_string(), "value": ratio_f64(&p) }),
                csv,
            )
        }
        ProbeMode::Mc => {
            let w = probe_weights(&a)?;
            let h = match a.h {
                Some(h) => h,
                None => max_interval_prob(&w, a.delta)?.0,
            };
            let m = mc_interval_prob(&w, a.delta, h, a.samples, seed, a.common.workers)?;
            counters = json!({ "samples": m.samples, "hits": m.hits });
            let csv = format!(
                "n,delta,h,estimate,std_error,hits,samples\n{},{},{h},{},{},{},{}\n",
                w.len(),
                a.delta,
                m.estimate,
                m.std_error,
                m.hits,
                m.samples
            );
            (json!({ "n": w.len(), "delta": a.delta, "h": h, "mc": m }), csv)
        }
        ProbeMode::Scaling => {
            let list = a
                .n_list
                .as_deref()
                .ok_or_else(|| usage("scaling mode needs --n-list"))?;
            let ns = input::parse_index_list(list)?;
            let gen = match &a.choice {
                Some(c) => WeightGen::Choice(input::parse_int_list(c)?),
                None => WeightGen::Unit,
            };
            let rows = lemma_scaling_report(&ns, &gen, a.delta, seed)?;
            let mut csv = String::from("n,h_star,value_exact,value,normalized,ratio_to_previous\n");
            for r in &rows {
                let ratio = r.ratio_to_previous.map(|x| x.to_string()).unwrap_or_default();
                writeln!(
                    csv,
                    "{},{},{},{},{},{ratio}",
                    r.n, r.h_star, r.value_exact, r.value, r.normalized
                )
                .expect("string write");
            }
            (json!({ "delta": a.delta, "weights": gen, "rows": rows }), csv)
        }
    };
    if a.table_format == TableFormat::Csv {
        return emit(out, &csv);
    }
    let env = Envelope {
        command: "probe",
        seed: Some(seed),
        workers: Some(a.common.workers),
        digest: None,
        start,
    };
    emit_json(out, &env.wrap(counters, result))
}

fn bench_instance(a: &BenchArgs, n: usize) -> Result<IsingInstance> {
    let inst = match a.family {
        BenchFamily::Multicopy => {
            if a.block == 0 || !n.is_multiple_of(a.block) {
                return Err(usage(format!("size {n} is not a multiple of --block {}", a.block)));
            }
            gen_multicopy(n / a.block, a.block)?
        }
        BenchFamily::Edgeless => gen_random(&RandomSpec {
            n,
            density: 0.0,
            wmin: -5,
            wmax: 5,
            seed: a.common.seed,
        })?,
        BenchFamily::Random => gen_random(&RandomSpec {
            n,
            density: a.density,
            wmin: -5,
            wmax: 5,
            seed: a.common.seed,
        })?,
    };
    Ok(inst)
}

fn bench(a: BenchArgs, out: &str) -> Result<()> {
    check_workers(a.common.workers)?;
    let start = Instant::now();
    let sizes = input::parse_index_list(&a.sizes)?;
    let opts = SolveOptions {
        seed: a.common.seed,
        workers: a.common.workers,
        ..SolveOptions::default()
    };
    let family = a.family.to_possible_value().expect("named").get_name().to_string();
    let mut rows = Vec::new();
    for &n in &sizes {
        let inst = bench_instance(&a, n)?;
        for &m in &a.methods {
            let t0 = Instant::now();
            let r = run_method(&inst, m, a.alpha, None, &opts).map_err(|e| anyhow!("{family} n={n}: {e:#}"))?;
            rows.push(json!({
                "family": family,
                "n": n,
                "method": r.method,
                "engine": r.engine,
                "energy": r.energy,
                "t_size": r.t.len(),
                "outer_assignments": r.counters.outer_assignments,
                "leaves_explored": r.counters.leaves_explored,
                "tie_leaves": r.counters.tie_leaves,
                "block_steps": r.counters.block_steps,
                "wall_time_s": t0.elapsed().as_secs_f64(),
            }));
        }
    }
    if a.table_format == TableFormat::Csv {
        let mut s = String::from(
            "family,n,method,engine,energy,t_size,outer_assignments,leaves_explored,tie_leaves,block_steps,wall_time_s\n",
        );
        for r in &rows {
            let cells: Vec<String> = [
                "family",
                "n",
                "method",
                "engine",
                "energy",
                "t_size",
                "outer_assignments",
                "leaves_explored",
                "tie_leaves",
                "block_steps",
                "wall_time_s",
            ]
            .iter()
            .map(|k| match &r[*k] {
                Value::String(s) => s.clone(),
                v => v.to_string(),
            })
            .collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        return emit(out, &s);
    }
    let env = Envelope {
        command: "bench",
        seed: Some(a.common.seed),
        workers: Some(a.common.workers),
        digest: None,
        start,
    };
    emit_json(
        out,
        &env.wrap(json!({ "rows": rows.len() }), json!({ "family": family, "rows": rows })),
    )
}
