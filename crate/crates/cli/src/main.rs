//! Command-line front end: named graph constructions, fold reduction,
//! homology profiles, exact coloring, the edge-pair property scan and the
//! per-theorem verification pipelines. Graphs travel as JSON; `-` reads
//! from stdin so commands compose in pipelines.
//!
//! Exit codes: 0 pass, 1 check failure, 2 usage or IO error,
//! 3 budget exceeded.

mod cache;
mod config;

use std::collections::BTreeSet;
use std::io::Read;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use nbhd_core::coloring::{self, ChromaticOutcome, Verification};
use nbhd_core::complexes::{hom_k2_complex, neighborhood_complex, reduced_homology};
use nbhd_core::error::Error as CoreError;
use nbhd_core::graph::{
    canonical_key, categorical_product, complete_graph, cycle_graph, exponential_graph,
    generalized_mycielskian, path_with_loops, Graph, GraphJson, PathSpec,
};
use nbhd_core::reductions::fold_core;
use nbhd_core::verify::{self, Verdict};
use nbhd_core::Limits;

use cache::Cache;
use config::{Config, Overrides};

#[derive(Parser)]
#[command(name = "nbhd", version, about = "graph topology toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    overrides: FlagOverrides,
}

#[derive(Args, Debug, Clone)]
struct FlagOverrides {
    /// Largest exponential graph handled by full enumeration
    #[arg(long, global = true)]
    vertex_budget: Option<usize>,
    /// Cap on enumerated simplicial faces per complex
    #[arg(long, global = true)]
    face_budget: Option<usize>,
    /// Solver budget in milliseconds (mapped to deterministic steps)
    #[arg(long, global = true)]
    solver_budget_ms: Option<u64>,
    /// Seed for every sampling fallback
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    report_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Emit a named construction as graph JSON
    Build {
        #[command(subcommand)]
        what: BuildCmd,
    },
    /// Fold a graph to its core and print the certified trace
    Reduce { file: String },
    /// Reduced integer homology profile of a complex of the graph
    Homology {
        file: String,
        #[arg(long, value_enum, default_value = "nbhd")]
        complex: ComplexKind,
        /// Compute on the given graph directly instead of its fold core
        #[arg(long)]
        no_fold: bool,
    },
    /// Exact chromatic number with a verified coloring witness
    Chi { file: String },
    /// Scan for the edge-pair property, reporting a witness on failure
    CheckP { file: String },
    /// Run a verification pipeline and write its verdict report
    Verify {
        #[command(subcommand)]
        what: VerifyCmd,
    },
    /// Inspect or clear the result cache
    Cache {
        #[command(subcommand)]
        what: CacheCmd,
    },
}

#[derive(Subcommand)]
enum BuildCmd {
    /// Complete graph on n vertices
    Complete { n: usize },
    /// Cycle on n >= 3 vertices
    Cycle { n: usize },
    /// Path of length r with loops at the listed positions
    Path {
        r: usize,
        #[arg(long, value_delimiter = ',')]
        loops: Vec<usize>,
    },
    /// Generalized Mycielskian of the graph in FILE
    Mycielskian {
        file: String,
        #[arg(short, long, default_value_t = 2)]
        r: usize,
    },
    /// Categorical product of two graphs
    Product { a: String, b: String },
    /// Exponential graph H^G (first file is the target H)
    Exponential { h: String, g: String },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ComplexKind {
    /// Neighborhood complex
    Nbhd,
    /// Order complex of the Hom(K2, -) poset
    Homk2,
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Sphere certificate and sharp bound for K_m^T
    Main2 {
        #[arg(long)]
        t: String,
        #[arg(long)]
        m: usize,
    },
    /// Homology transfer between the quotient power and the looped path
    Generalmain {
        #[arg(long)]
        t: String,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        r: usize,
        /// Loop levels, comma separated (may be empty)
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        a: Vec<usize>,
    },
    /// Sphere certificate for K_m^{(K_n)_A^r} with A = {0..i}
    Cormain {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        i: usize,
    },
    /// Sphere certificate for K_m^{M(M(K_n))}
    Doubesharp {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
    /// Chromatic certificate for K_m^{M(M(K_n))} and an optional host
    Doublenew {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        host: Option<String>,
    },
    /// Product-chromatic spot check against a pool of second factors
    Hedetniemi {
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Host graph; defaults to M(M(K_n))
        #[arg(long)]
        g: Option<String>,
        /// Extra pool members; the built-in pool is used when empty
        #[arg(long = "h", num_args = 0..)]
        pool: Vec<String>,
    },
    /// Chromatic number against the connectivity bound certificate
    Lovasz { file: String },
}

#[derive(Subcommand)]
enum CacheCmd {
    Ls,
    Clear,
}

fn main() {
    let cli = Cli::parse();
    let config = Config::load(&Overrides {
        vertex_budget: cli.overrides.vertex_budget,
        face_budget: cli.overrides.face_budget,
        solver_budget_ms: cli.overrides.solver_budget_ms,
        seed: cli.overrides.seed,
        cache_dir: cli.overrides.cache_dir.clone(),
        report_dir: cli.overrides.report_dir.clone(),
    });
    match run(cli.cmd, &config) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = err
                .downcast_ref::<CoreError>()
                .map_or(2, |e| match e {
                    CoreError::SizeExceeded { .. }
                    | CoreError::FaceBudget { .. }
                    | CoreError::StepBudget { .. } => 3,
                    _ => 2,
                });
            std::process::exit(code);
        }
    }
}

fn read_graph(path: &str) -> Result<Graph> {
    let text = if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .context("reading graph from stdin")?;
        buf
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading graph file {path}"))?
    };
    let parsed: GraphJson =
        serde_json::from_str(&text).with_context(|| format!("parsing graph JSON from {path}"))?;
    Ok(parsed.into_graph()?)
}

fn print_json(value: &Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn graph_json(g: &Graph) -> Value {
    serde_json::to_value(GraphJson::from(g)).expect("graph serializes")
}

fn coloring_json(col: &coloring::Coloring, labels: &[String]) -> Value {
    let assignment: serde_json::Map<String, Value> = col
        .assignment_pairs(labels)
        .into_iter()
        .map(|(l, c)| (l, json!(c)))
        .collect();
    json!({
        "k": col.k,
        "assignment": assignment,
        "verified": match col.verified {
            Verification::Exhaustive => "exhaustive".to_string(),
            Verification::Sampled { seed, pairs } => format!("sampled({seed},{pairs})"),
        },
    })
}

fn run(cmd: Cmd, config: &Config) -> Result<i32> {
    let limits = config.limits();
    match cmd {
        Cmd::Build { what } => {
            let g = match what {
                BuildCmd::Complete { n } => {
                    if n == 0 {
                        return Err(anyhow!("complete graph needs n >= 1"));
                    }
                    complete_graph(n)
                }
                BuildCmd::Cycle { n } => cycle_graph(n)?,
                BuildCmd::Path { r, loops } => {
                    path_with_loops(&PathSpec::new(r, loops.into_iter().collect())?)
                }
                BuildCmd::Mycielskian { file, r } => {
                    generalized_mycielskian(&read_graph(&file)?, r)?
                }
                BuildCmd::Product { a, b } => {
                    categorical_product(&read_graph(&a)?, &read_graph(&b)?)
                }
                BuildCmd::Exponential { h, g } => exponential_graph(
                    &read_graph(&h)?,
                    &read_graph(&g)?,
                    limits.vertex_budget.min(limits.dense_vertex_cap),
                )?,
            };
            print_json(&graph_json(&g))?;
            Ok(0)
        }
        Cmd::Reduce { file } => {
            let g = read_graph(&file)?;
            let (core, trace) = fold_core(&g);
            print_json(&json!({
                "core": graph_json(&core),
                "trace": serde_json::to_value(trace.to_json_steps())?,
            }))?;
            Ok(0)
        }
        Cmd::Homology {
            file,
            complex,
            no_fold,
        } => {
            let g = read_graph(&file)?;
            let cache = Cache::new(config);
            let op_id = format!("homology:{complex:?}:fold={}", !no_fold);
            let key = canonical_key(&g, limits.canonical_brute_cap);
            if let Some(hit) = cache.lookup(&op_id, &key)? {
                print_json(&hit)?;
                return Ok(0);
            }
            let target = if no_fold { g.clone() } else { fold_core(&g).0 };
            let k = match complex {
                ComplexKind::Nbhd => neighborhood_complex(&target),
                ComplexKind::Homk2 => hom_k2_complex(&target, limits.face_budget)?,
            };
            let profile = reduced_homology(&k, limits.face_budget)?;
            let out = serde_json::to_value(&profile)?;
            cache.store(&op_id, &key, &out)?;
            print_json(&out)?;
            Ok(0)
        }
        Cmd::Chi { file } => {
            let g = read_graph(&file)?;
            let cache = Cache::new(config);
            let key = canonical_key(&g, limits.canonical_brute_cap);
            if let Some(hit) = cache.lookup("chi", &key)? {
                print_json(&hit)?;
                return Ok(0);
            }
            let outcome = coloring::chromatic_number(&g, &limits)?;
            let (out, code) = match outcome {
                ChromaticOutcome::Exact { chi, mut witness } => {
                    witness.graph_key = Some(key.clone());
                    (
                        json!({
                            "status": "exact",
                            "chi": chi,
                            "coloring": coloring_json(&witness, g.labels()),
                        }),
                        0,
                    )
                }
                ChromaticOutcome::Bracket {
                    lower,
                    upper,
                    witness,
                } => (
                    json!({
                        "status": "bracket",
                        "lower": lower,
                        "upper": upper,
                        "coloring": witness.map(|w| coloring_json(&w, g.labels())),
                    }),
                    3,
                ),
            };
            if code == 0 {
                cache.store("chi", &key, &out)?;
            }
            print_json(&out)?;
            Ok(code)
        }
        Cmd::CheckP { file } => {
            let g = read_graph(&file)?;
            let res = coloring::property_p(&g)?;
            let witness = res.witness.map(|[v1, w1, v2, w2]| {
                json!([g.label(v1), g.label(w1), g.label(v2), g.label(w2)])
            });
            print_json(&json!({ "property_p": res.holds, "witness": witness }))?;
            Ok(0)
        }
        Cmd::Verify { what } => run_verify(what, config, &limits),
        Cmd::Cache { what } => {
            let cache = Cache::new(config);
            match what {
                CacheCmd::Ls => {
                    let entries = cache.entries()?;
                    let list: Vec<Value> = entries
                        .iter()
                        .map(|(name, size)| json!({ "entry": name, "bytes": size }))
                        .collect();
                    print_json(&json!({ "entries": list }))?;
                }
                CacheCmd::Clear => {
                    let removed = cache.clear()?;
                    print_json(&json!({ "removed": removed }))?;
                }
            }
            Ok(0)
        }
    }
}

fn builtin_pool(n: usize, host: &Graph) -> Vec<(String, Graph)> {
    let mut pool = vec![
        ("K3".to_string(), complete_graph(3)),
        ("K4".to_string(), complete_graph(4)),
        ("C5".to_string(), cycle_graph(5).expect("5 >= 3")),
        ("C7".to_string(), cycle_graph(7).expect("7 >= 3")),
    ];
    if n == 2 && host.vertex_count() > 1 {
        let keep: Vec<usize> = (1..host.vertex_count()).collect();
        pool.push(("host-minus-vertex".to_string(), host.induced(&keep)));
    }
    pool
}

fn run_verify(what: VerifyCmd, config: &Config, limits: &Limits) -> Result<i32> {
    let start = Instant::now();
    let mut verdict: Verdict = match what {
        VerifyCmd::Main2 { t, m } => verify::verify_main2(&read_graph(&t)?, m, limits),
        VerifyCmd::Generalmain { t, m, r, a } => {
            let a: BTreeSet<usize> = a.into_iter().collect();
            verify::verify_generalmain(&read_graph(&t)?, m, r, &a, limits)
        }
        VerifyCmd::Cormain { n, m, r, i } => verify::verify_cormain(n, m, r, i, limits),
        VerifyCmd::Doubesharp { n, m } => verify::verify_doubesharp(n, m, limits),
        VerifyCmd::Doublenew { n, m, host } => {
            let host = host.map(|p| read_graph(&p)).transpose()?;
            verify::verify_doublenew(n, m, host.as_ref(), limits)
        }
        VerifyCmd::Hedetniemi { n, g, pool } => {
            let host = match g {
                Some(p) => read_graph(&p)?,
                None => nbhd_core::reductions::double_mycielskian_base(n)?,
            };
            let pool = if pool.is_empty() {
                builtin_pool(n, &host)
            } else {
                pool.iter()
                    .map(|p| read_graph(p).map(|g| (p.clone(), g)))
                    .collect::<Result<Vec<_>>>()?
            };
            verify::hedetniemi_spot_check(&host, &pool, n, limits)
        }
        VerifyCmd::Lovasz { file } => verify::lovasz_report(&read_graph(&file)?, limits),
    };
    verdict.stamp_runtime(start.elapsed().as_millis() as u64);

    let report = json!({
        "version": nbhd_core::VERSION,
        "seed": config.seed,
        "config": serde_json::to_value(config)?,
        "verdict": serde_json::to_value(&verdict)?,
    });
    std::fs::create_dir_all(&config.report_dir)
        .with_context(|| format!("creating report dir {}", config.report_dir.display()))?;
    let mut param_tag = String::new();
    for (k, v) in &verdict.instance {
        param_tag.push_str(&format!("-{k}_{v}"));
    }
    let sanitized: String = param_tag
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .take(80)
        .collect();
    let path = config
        .report_dir
        .join(format!("{}{}.json", verdict.theorem_id, sanitized));
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, serde_json::to_vec_pretty(&report)?)?;
    std::fs::rename(&tmp, &path)?;

    print_json(&report)?;
    Ok(if verdict.passed() { 0 } else { 1 })
}
