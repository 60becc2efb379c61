use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use d3lab::acceptance::{Suite, DEFAULT_SEED, NAMES};
use d3lab::boolfn::{make_majority, make_parity, TruthTable};
use d3lab::cnfmin::{min_cnf_for_mode, CostCache, Mode};
use d3lab::coding::{
    audit, parse_bits, parse_permutation, ppz_decode, ppz_encode, width_reduce_decode, width_reduce_encode_traced,
};
use d3lab::constructions::{build_parity_blocks, build_parity_cnf, build_parity_depth3, lupanov_depth3};
use d3lab::duality::{build_cover_instance, solve_duality, synthesize_exact, synthesize_greedy};
use d3lab::error::Error;
use d3lab::extremal::{extremal_t, majority_correspondence, turan_bottom_fanin2, ExtremalReport, Family};
use d3lab::io::{parse_dimacs, parse_truth_table, write_d3f, write_dimacs, write_truth_table};
use d3lab::report::point_string;
use d3lab::sample::seeded_permutations;

type CliResult<T> = Result<T, Box<dyn std::error::Error>>;

#[derive(Parser)]
#[command(name = "d3lab", version, about = "Depth-3 formula size and one-sided CNF approximation at small n")]
struct Cli {
    /// Seed for randomized campaigns.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Where to write the artifact (table, formula or witness) of a command.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Refuse inputs with more variables than this.
    #[arg(long, global = true, default_value_t = 24)]
    max_n: usize,
    /// Directory holding the persistent CNF cost cache.
    #[arg(long, global = true, env = "D3LAB_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build or inspect truth tables.
    #[command(subcommand)]
    Fn(FnCommand),
    /// Minimum (monotone) CNF of a function.
    Cnfmin {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, default_value_t = ModeArg::General)]
        mode: ModeArg,
    },
    /// Covering LP, hard distributions and depth-3 synthesis.
    #[command(subcommand)]
    Duality(DualityCommand),
    /// Prefix-free codes of isolated solutions.
    #[command(subcommand)]
    Coding(CodingCommand),
    /// Explicit formula constructions.
    #[command(subcommand)]
    Build(BuildCommand),
    /// Hitting-set extremal problems.
    #[command(subcommand)]
    Extremal(ExtremalCommand),
    /// Run the acceptance suite (`all`, a criterion name, or its number).
    Acceptance {
        #[arg(default_value = "all")]
        which: String,
    },
    /// Cartesian parameter sweeps.
    #[command(subcommand)]
    Sweep(SweepCommand),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    General,
    Monotone,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::General => Mode::General,
            ModeArg::Monotone => Mode::Monotone,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Parity,
    Majority,
}

/// A function given by family and size, by table file, or by hex.
#[derive(Args)]
struct Source {
    #[arg(long, value_enum, conflicts_with_all = ["table", "hex"])]
    family: Option<FamilyArg>,
    #[arg(long)]
    n: Option<usize>,
    /// Truth-table file (`n=<k>` then bits or hex).
    #[arg(long, conflicts_with = "hex")]
    table: Option<PathBuf>,
    /// Table as hex, index order, with `--n`.
    #[arg(long)]
    hex: Option<String>,
}

#[derive(Subcommand)]
enum FnCommand {
    /// Write a named family's truth table.
    Make {
        #[command(flatten)]
        source: Source,
    },
    /// Summarize a function.
    Show {
        #[command(flatten)]
        source: Source,
    },
}

#[derive(Subcommand)]
enum DualityCommand {
    /// Solve the covering LP and report s*, the hard distribution and the sandwich.
    Solve {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, default_value_t = ModeArg::General)]
        mode: ModeArg,
    },
    /// Synthesize a depth-3 formula (exact when |f^-1(1)| <= 12, else greedy).
    Synth {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, default_value_t = ModeArg::General)]
        mode: ModeArg,
        /// Use the greedy cover even when the exact one is affordable.
        #[arg(long)]
        greedy: bool,
    },
}

#[derive(Args)]
struct CodeArgs {
    /// DIMACS file.
    #[arg(long)]
    cnf: PathBuf,
    /// Variable order, 1-based and comma separated; identity when omitted.
    #[arg(long)]
    perm: Option<String>,
    /// Use the width-reduced codec.
    #[arg(long)]
    width_reduced: bool,
}

#[derive(Subcommand)]
enum CodingCommand {
    Encode {
        #[command(flatten)]
        args: CodeArgs,
        /// Assignment bits `x_1 ... x_n`.
        #[arg(long)]
        assignment: String,
    },
    Decode {
        #[command(flatten)]
        args: CodeArgs,
        /// Code bits.
        #[arg(long)]
        code: String,
    },
    /// Isolated-solution count, Kraft sums and prefix-freeness.
    Audit {
        #[arg(long)]
        cnf: PathBuf,
        /// Number of orders to test: the identity plus seeded random ones.
        #[arg(long, default_value_t = 8)]
        perms: usize,
    },
}

#[derive(Subcommand)]
enum BuildCommand {
    ParityCnf {
        #[arg(long)]
        n: usize,
    },
    ParityBlocks {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    ParityD3 {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    Lupanov {
        #[command(flatten)]
        source: Source,
        /// Drop disjuncts that accept nothing.
        #[arg(long)]
        prune: bool,
    },
}

#[derive(Subcommand)]
enum ExtremalCommand {
    /// Exact T(n, tau) with a witness.
    #[command(name = "T")]
    T {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        tau: usize,
        #[arg(long, default_value = "hypergraphs")]
        family: Family,
    },
    /// T(n, ceil(n/2)) against the monotone duality of majority.
    Majority {
        #[arg(long)]
        n: usize,
    },
    /// Graph-mode T(n, n/2) and the perfect-matching witness.
    Turan {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Subcommand)]
enum SweepCommand {
    /// Block approximators over n in [n-min, n-max] and k' in [k-min, k-max].
    ParityBlocks {
        #[arg(long, default_value_t = 4)]
        n_min: usize,
        #[arg(long, default_value_t = 16)]
        n_max: usize,
        #[arg(long, default_value_t = 1)]
        k_min: usize,
        #[arg(long, default_value_t = 4)]
        k_max: usize,
    },
    /// T(n, ceil(n/2)) over hypergraphs for n in [n-min, n-max].
    MajorityT {
        #[arg(long, default_value_t = 2)]
        n_min: usize,
        #[arg(long, default_value_t = 5)]
        n_max: usize,
    },
}

struct Context {
    seed: u64,
    out: Option<PathBuf>,
    max_n: usize,
    cache: CostCache,
}

impl Context {
    fn cap(&self, n: usize) -> CliResult<()> {
        if n > self.max_n {
            return Err(Box::new(Error::CapExceeded {
                what: "n (--max-n)",
                got: n,
                cap: self.max_n,
            }));
        }
        Ok(())
    }

    fn function(&self, source: &Source) -> CliResult<TruthTable> {
        let f = match (&source.family, &source.table, &source.hex) {
            (Some(family), None, None) => {
                let n = source.n.ok_or("--family needs --n")?;
                self.cap(n)?;
                match family {
                    FamilyArg::Parity => make_parity(n)?,
                    FamilyArg::Majority => make_majority(n)?,
                }
            }
            (None, Some(path), None) => parse_truth_table(&read(path)?)?,
            (None, None, Some(hex)) => {
                let n = source.n.ok_or("--hex needs --n")?;
                parse_truth_table(&format!("n={n}\n0x{}", hex.trim_start_matches("0x")))?
            }
            _ => return Err("give one of --family, --table or --hex".into()),
        };
        self.cap(f.n())?;
        Ok(f)
    }

    fn cnf(&self, path: &Path) -> CliResult<d3lab::formula::CnfFormula> {
        let phi = parse_dimacs(&read(path)?)?;
        self.cap(phi.n())?;
        Ok(phi)
    }

    /// Writes an artifact to `--out` and returns its path for the report.
    fn artifact(&self, text: &str) -> CliResult<Option<String>> {
        match &self.out {
            Some(path) => {
                fs::write(path, text)?;
                Ok(Some(path.display().to_string()))
            }
            None => Ok(None),
        }
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn to_value(v: &impl Serialize) -> CliResult<Value> {
    Ok(serde_json::to_value(v)?)
}

fn table_summary(f: &TruthTable) -> Value {
    json!({
        "n": f.n(),
        "hex": format!("0x{}", f.to_hex()),
        "ones": f.ones_count(),
        "monotone": f.is_monotone(),
        "constant": f.is_constant(),
    })
}

/// Runs one command; returns the reports and whether every verdict held.
fn run(cli: Cli, ctx: Context) -> CliResult<(Vec<Value>, bool)> {
    let one = |mut v: Value, ok: bool| -> CliResult<(Vec<Value>, bool)> {
        v["ok"] = json!(ok);
        Ok((vec![v], ok))
    };
    if let Command::Acceptance { which } = &cli.command {
        return acceptance(which, ctx);
    }
    let ctx = &ctx;
    match cli.command {
        Command::Fn(FnCommand::Make { source }) => {
            let f = ctx.function(&source)?;
            let file = ctx.artifact(&write_truth_table(&f))?;
            let mut v = table_summary(&f);
            v["file"] = json!(file);
            if file.is_none() {
                v["bits"] = json!(f.to_bit_string());
            }
            one(v, true)
        }
        Command::Fn(FnCommand::Show { source }) => {
            let f = ctx.function(&source)?;
            let mut v = table_summary(&f);
            v["ones_list"] = json!(f.ones().map(|x| point_string(f.n(), x)).collect::<Vec<_>>());
            one(v, true)
        }
        Command::Cnfmin { source, mode } => {
            let f = ctx.function(&source)?;
            let m = min_cnf_for_mode(&f, mode.into())?;
            let file = ctx.artifact(&write_dimacs(&m.witness))?;
            let verified = m.witness.to_truth_table()? == f;
            one(
                json!({
                    "f": format!("n={} 0x{}", f.n(), f.to_hex()),
                    "mode": Mode::from(mode),
                    "size": m.size,
                    "witness": m.witness.to_string(),
                    "witness_file": file,
                    "verified": verified,
                }),
                verified,
            )
        }
        Command::Duality(DualityCommand::Solve { source, mode }) => {
            let f = ctx.function(&source)?;
            let r = solve_duality(&f, mode.into(), &ctx.cache)?;
            if ctx.out.is_some() {
                ctx.artifact(&write_d3f(&r.witness))?;
            }
            one(to_value(&r)?, r.ok())
        }
        Command::Duality(DualityCommand::Synth { source, mode, greedy }) => {
            let f = ctx.function(&source)?;
            let inst = build_cover_instance(&f, mode.into(), &ctx.cache)?;
            let exact = !greedy && inst.universe().len() <= d3lab::duality::MAX_EXACT_UNIVERSE;
            let phi = if exact { synthesize_exact(&inst)? } else { synthesize_greedy(&inst)? };
            let verified = phi.to_truth_table()? == f;
            let file = ctx.artifact(&write_d3f(&phi))?;
            one(
                json!({
                    "f": format!("n={} 0x{}", f.n(), f.to_hex()),
                    "mode": Mode::from(mode),
                    "method": if exact { "exact" } else { "greedy" },
                    "size": phi.size(),
                    "disjuncts": phi.disjuncts().len(),
                    "file": file,
                    "verified": verified,
                }),
                verified,
            )
        }
        Command::Coding(CodingCommand::Encode { args, assignment }) => {
            let phi = ctx.cnf(&args.cnf)?;
            let n = phi.n();
            let pi = order(args.perm.as_deref(), n)?;
            let bits = parse_bits(&assignment)?;
            if bits.len() != n {
                return Err(format!("assignment has {} bits, the formula has {n} variables", bits.len()).into());
            }
            let x = bits.iter().fold(0u32, |acc, &b| acc << 1 | u32::from(b));
            let (code, trace) = if args.width_reduced {
                let (c, t) = width_reduce_encode_traced(x, &phi, &pi)?;
                (c, Some(t))
            } else {
                (ppz_encode(x, &phi, &pi)?, None)
            };
            one(
                json!({
                    "assignment": point_string(n, x),
                    "perm": pi.iter().map(|v| v + 1).collect::<Vec<_>>(),
                    "codec": if args.width_reduced { "width-reduced" } else { "ppz" },
                    "code": code.to_string(),
                    "length": code.len(),
                    "trace": trace,
                }),
                true,
            )
        }
        Command::Coding(CodingCommand::Decode { args, code }) => {
            let phi = ctx.cnf(&args.cnf)?;
            let pi = order(args.perm.as_deref(), phi.n())?;
            let bits = parse_bits(&code)?;
            let x = if args.width_reduced {
                width_reduce_decode(&bits, &phi, &pi)?
            } else {
                ppz_decode(&bits, &phi, &pi)?
            };
            one(
                json!({
                    "code": code.trim(),
                    "perm": pi.iter().map(|v| v + 1).collect::<Vec<_>>(),
                    "assignment": point_string(phi.n(), x),
                }),
                true,
            )
        }
        Command::Coding(CodingCommand::Audit { cnf, perms }) => {
            let phi = ctx.cnf(&cnf)?;
            let n = phi.n();
            let orders = seeded_permutations(ctx.seed, n, perms);
            let r = audit(&phi, &orders)?;
            one(to_value(&r)?, r.ok())
        }
        Command::Build(cmd) => {
            let r = match cmd {
                BuildCommand::ParityCnf { n } => {
                    ctx.cap(n)?;
                    build_parity_cnf(n)?
                }
                BuildCommand::ParityBlocks { n, k } => {
                    ctx.cap(n)?;
                    build_parity_blocks(n, k)?
                }
                BuildCommand::ParityD3 { n, k } => {
                    ctx.cap(n)?;
                    build_parity_depth3(n, k)?
                }
                BuildCommand::Lupanov { source, prune } => lupanov_depth3(&ctx.function(&source)?, prune)?,
            };
            let file = ctx.artifact(&r.formula.to_text())?;
            let mut v = to_value(&r)?;
            v["file"] = json!(file);
            one(v, r.ok())
        }
        Command::Extremal(cmd) => {
            let (v, ok) = match cmd {
                ExtremalCommand::T { n, tau, family } => {
                    ctx.cap(n)?;
                    let r = extremal_t(n, tau, family)?;
                    (extremal_value(ctx, &r)?, r.ok())
                }
                ExtremalCommand::Majority { n } => {
                    ctx.cap(n)?;
                    let r = majority_correspondence(n, &ctx.cache)?;
                    ctx.artifact(&edge_list(&r.extremal))?;
                    (to_value(&r)?, r.ok())
                }
                ExtremalCommand::Turan { n } => {
                    ctx.cap(n)?;
                    let r = turan_bottom_fanin2(n)?;
                    (extremal_value(ctx, &r)?, r.ok())
                }
            };
            one(v, ok)
        }
        Command::Acceptance { .. } => unreachable!("handled above"),
        Command::Sweep(SweepCommand::ParityBlocks { n_min, n_max, k_min, k_max }) => {
            let mut subs = Vec::new();
            let mut ok = true;
            for n in n_min..=n_max {
                ctx.cap(n)?;
                for k in k_min..=k_max.min(n) {
                    let r = build_parity_blocks(n, k)?;
                    ok &= r.ok();
                    subs.push(to_value(&r)?);
                }
            }
            one(json!({ "sweep": "parity-blocks", "count": subs.len(), "reports": subs, "ok": ok }), ok)
        }
        Command::Sweep(SweepCommand::MajorityT { n_min, n_max }) => {
            let mut rows = Vec::new();
            for n in n_min..=n_max {
                ctx.cap(n)?;
                let r = extremal_t(n, n.div_ceil(2), Family::Hypergraphs)?;
                rows.push(json!({
                    "n": n,
                    "tau": r.tau,
                    "T": r.ratio.as_ref().map(d3lab::report::rational_string),
                    "witness": r.witness,
                }));
            }
            one(json!({ "sweep": "majority-t", "count": rows.len(), "rows": rows, "ok": true }), true)
        }
    }
}

/// Runs criteria; the suite takes over the cost cache.
fn acceptance(which: &str, ctx: Context) -> CliResult<(Vec<Value>, bool)> {
    let ids: Vec<usize> = if which == "all" {
        (1..=NAMES.len()).collect()
    } else {
        vec![Suite::id_of(which).ok_or_else(|| format!("unknown criterion `{which}`"))?]
    };
    let suite = Suite::new(ctx.cache, ctx.seed);
    let mut reports = Vec::new();
    let mut all = true;
    for id in ids {
        let r = suite.run(id);
        eprintln!("{}", r.line());
        all &= r.pass;
        let mut v = to_value(&r)?;
        v["ok"] = json!(r.pass);
        reports.push(v);
    }
    Ok((reports, all))
}

fn order(perm: Option<&str>, n: usize) -> CliResult<Vec<usize>> {
    Ok(match perm {
        Some(p) => parse_permutation(p, n)?,
        None => (0..n).collect(),
    })
}

fn edge_list(r: &ExtremalReport) -> String {
    let mut out = format!("# n={} tau={}\n", r.n, r.tau);
    for e in r.witness.iter().flatten() {
        out.push_str(&e.iter().map(usize::to_string).collect::<Vec<_>>().join(" "));
        out.push('\n');
    }
    out
}

fn extremal_value(ctx: &Context, r: &ExtremalReport) -> CliResult<Value> {
    let file = ctx.artifact(&edge_list(r))?;
    let mut v = to_value(r)?;
    v["witness_file"] = json!(file);
    Ok(v)
}

fn open_cache(dir: Option<&Path>) -> CliResult<CostCache> {
    Ok(match dir {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            CostCache::open(dir.join("costs.txt"))?
        }
        None => CostCache::in_memory(),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let echo: Vec<String> = std::env::args().skip(1).collect();
    let start = Instant::now();
    let ctx = match open_cache(cli.cache_dir.as_deref()) {
        Ok(cache) => Context {
            seed: cli.seed,
            out: cli.out.clone(),
            max_n: cli.max_n,
            cache,
        },
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let outcome = run(cli, ctx);
    let code = match outcome {
        Ok((reports, ok)) => {
            for mut r in reports {
                if let Value::Object(map) = &mut r {
                    map.insert("command".into(), json!(echo.join(" ")));
                }
                println!("{}", serde_json::to_string(&r).expect("reports serialize"));
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    };
    eprintln!("wall time: {:.3}s", start.elapsed().as_secs_f64());
    code
}
