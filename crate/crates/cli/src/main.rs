//! `dstoch`: exact reports on doubly stochastic matrices and the semigroups
//! they generate.
//!
//! Exit codes: 0 success, 1 mathematical negative, 2 input error,
//! 3 budget exceeded.

mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dstoch_core::convergence::{self, CoreParams, ProductSchedule, ScheduleRule};
use dstoch_core::explorer::{self, SemigroupSnapshot};
use dstoch_core::{domestic, factorization, majorization, Error, Rational, Result, Word};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "dstoch", version, about = "Exact analysis of doubly stochastic semigroups")]
struct Cli {
    /// Worker threads for parallel sections.
    #[arg(long, default_value_t = 1, global = true)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Domesticity margin and optional ε test.
    CheckDomestic {
        matrix: PathBuf,
        #[arg(long)]
        eps: Option<String>,
        #[arg(long, default_value_t = domestic::DEFAULT_DIM_LIMIT)]
        dim_limit: usize,
    },
    /// Split into a permutation and a domestic factor.
    Factor {
        matrix: PathBuf,
        /// Skip the ε computation (no dimension limit).
        #[arg(long)]
        no_eps: bool,
    },
    /// Convex combination of permutation matrices.
    Birkhoff { matrix: PathBuf },
    /// Majorization test for two simplex vectors.
    Majorize {
        p: PathBuf,
        q: PathBuf,
        #[arg(long)]
        witness: bool,
    },
    /// Averaging core and per-subset limit checks.
    Core {
        generators: PathBuf,
        #[arg(long, default_value_t = convergence::DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = convergence::DEFAULT_MATCH_TOL)]
        match_tol: f64,
        #[arg(long, default_value_t = convergence::DEFAULT_MAX_ITER)]
        max_iter: usize,
    },
    /// Numeric limit of an infinite right product.
    Limit {
        generators: PathBuf,
        #[arg(long, value_enum, default_value_t = Schedule::RoundRobin)]
        schedule: Schedule,
        /// Comma-separated generator names, for `--schedule word`.
        #[arg(long)]
        word: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = convergence::DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = convergence::DEFAULT_MAX_ITER)]
        max_iter: usize,
    },
    /// Enumerate the generated semigroup and report entry gaps.
    Explore {
        generators: PathBuf,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value = "0")]
        min_gap: String,
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        no_matrices: bool,
    },
    /// Check that every entry is 1 or at most the largest sub-unit generator entry.
    GapLaw {
        generators: PathBuf,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Reduce a bilinear form to a single matrix entry.
    Reduce {
        generators: PathBuf,
        p: PathBuf,
        q: PathBuf,
        /// Word to evaluate both sides on.
        #[arg(long)]
        word: Option<String>,
    },
    /// Distance from powers of probe words to the enumerated semigroup.
    Contain {
        generators: PathBuf,
        /// Comma-separated generator names; repeatable.
        #[arg(long = "probe", required = true)]
        probes: Vec<String>,
        #[arg(long)]
        power: u32,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        budget: Option<usize>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Schedule {
    RoundRobin,
    Word,
    Random,
}

/// A report and the exit code it implies.
struct Outcome {
    report: Value,
    code: u8,
}

impl Outcome {
    fn ok(report: Value) -> Self {
        Outcome { report, code: 0 }
    }

    fn negative_if(report: Value, negative: bool) -> Self {
        Outcome {
            report,
            code: u8::from(negative),
        }
    }
}

const EXIT_NEGATIVE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_BUDGET: u8 = 3;

fn exit_code(e: &Error) -> u8 {
    if e.is_negative_result() {
        EXIT_NEGATIVE
    } else if e.is_budget() {
        EXIT_BUDGET
    } else {
        EXIT_INPUT
    }
}

fn error_json(e: &Error) -> Value {
    let mut body = json!({"kind": e.kind(), "detail": e.to_string()});
    match e {
        Error::NotDomestic { name, x, y, sum } => {
            body["generator"] = json!(name);
            body["witness"] = json!({"X": x, "Y": y, "sum": sum});
        }
        Error::NonConvergent {
            iterations,
            residual,
            last,
            previous,
        } => {
            body["iterations"] = json!(iterations);
            body["residual"] = json!(residual);
            body["last"] = io::float_grid(last);
            body["previous"] = io::float_grid(previous);
        }
        _ => {}
    }
    json!({"error": body})
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.max(1))
        .build_global()
        .map_err(|e| Error::Input(format!("cannot start thread pool: {e}")))
        .and_then(|_| run(cli.command))
        .unwrap_or_else(|e| Outcome {
            report: error_json(&e),
            code: exit_code(&e),
        });
    println!(
        "{}",
        serde_json::to_string_pretty(&outcome.report).expect("reports serialize")
    );
    ExitCode::from(outcome.code)
}

fn parse_rational(s: &str) -> Result<Rational> {
    s.parse()
}

fn budget(flag: Option<usize>) -> Result<usize> {
    match flag {
        Some(0) => Err(Error::Input("--budget must be positive".into())),
        Some(b) => Ok(b),
        None => explorer::budget_from_env(),
    }
}

fn run(command: Command) -> Result<Outcome> {
    match command {
        Command::CheckDomestic {
            matrix,
            eps,
            dim_limit,
        } => check_domestic(&io::matrix(&io::read_json(&matrix)?)?, eps.as_deref(), dim_limit),
        Command::Factor { matrix, no_eps } => {
            let m = io::matrix(&io::read_json(&matrix)?)?;
            let f = factorization::factor_permutation_opts(&m, !no_eps)?;
            Ok(Outcome::ok(json!({
                "P": f.p.one_based(),
                "M_prime": io::matrix_json(&f.m_prime),
                "eps": f.eps.as_ref().map(io::rational_str),
            })))
        }
        Command::Birkhoff { matrix } => {
            let d = factorization::birkhoff_decompose(&io::matrix(&io::read_json(&matrix)?)?)?;
            let terms: Vec<Value> = d
                .terms
                .iter()
                .map(|(c, p)| json!({"coeff": io::rational_str(c), "perm": p.one_based()}))
                .collect();
            Ok(Outcome::ok(json!({ "terms": terms })))
        }
        Command::Majorize { p, q, witness } => {
            let p = io::vector(&io::read_json(&p)?)?;
            let q = io::vector(&io::read_json(&q)?)?;
            let holds = majorization::majorizes(&p, &q)?;
            let mut report = json!({
                "majorizes": holds,
                "p_sorted": io::vector_json(&majorization::sort_desc(&p)),
                "q_sorted": io::vector_json(&majorization::sort_desc(&q)),
            });
            if holds && witness {
                let w = majorization::majorization_witness(&p, &q)?;
                report["witness"] = json!({"matrix": io::matrix_json(&w.matrix), "steps": w.steps});
            }
            Ok(Outcome::negative_if(report, !holds))
        }
        Command::Core {
            generators,
            tol,
            match_tol,
            max_iter,
        } => {
            let set = io::generators(&io::read_json(&generators)?)?;
            let core = convergence::core_partitions(&set)?;
            let params = CoreParams {
                tol,
                match_tol,
                max_iter,
            };
            let r = convergence::verify_convergence_core(&set, params)?;
            let subsets: Vec<Value> = r
                .subsets
                .iter()
                .map(|s| {
                    json!({
                        "members": s.members,
                        "partition": io::partition_json(&s.predicted),
                        "iterations": s.iterations,
                        "distance": s.distance,
                        "within_tol": s.within_tol,
                    })
                })
                .collect();
            let report = json!({
                "core": core.iter().map(io::partition_json).collect::<Vec<_>>(),
                "subsets": subsets,
                "all_within_tol": r.all_within_tol,
            });
            Ok(Outcome::negative_if(report, !r.all_within_tol))
        }
        Command::Limit {
            generators,
            schedule,
            word,
            seed,
            tol,
            max_iter,
        } => {
            let set = io::generators(&io::read_json(&generators)?)?;
            let rule = match (schedule, word) {
                (Schedule::RoundRobin, None) => ScheduleRule::RoundRobin,
                (Schedule::Random, None) => ScheduleRule::PseudoRandom(seed),
                (Schedule::Word, Some(w)) => ScheduleRule::RepeatWord(Word::parse(&w)),
                (Schedule::Word, None) => {
                    return Err(Error::Input("--schedule word needs --word".into()))
                }
                (_, Some(_)) => {
                    return Err(Error::Input("--word is only used with --schedule word".into()))
                }
            };
            let r = convergence::iterate_product(&ProductSchedule::new(set, rule)?, tol, max_iter)?;
            Ok(Outcome::ok(json!({
                "converged": true,
                "iterations": r.iterations,
                "residual": r.residual,
                "matched_partition": r.matched_averaging.as_ref().map(io::partition_json),
                "match_error": r.match_error,
                "approximate_limit": io::float_grid(&r.value),
            })))
        }
        Command::Explore {
            generators,
            depth,
            min_gap,
            budget: flag,
            no_matrices,
        } => {
            let set = io::generators(&io::read_json(&generators)?)?;
            let min_gap = parse_rational(&min_gap)?;
            let budget = budget(flag)?;
            let snap = partial_ok(explorer::generate_with_budget(&set, depth, budget))?;
            let gaps = explorer::snapshot_gap_report(&snap, &min_gap)?;
            let mut report = snapshot_json(&snap, !no_matrices);
            report["entries"] = json!(gaps.entries.iter().map(io::rational_str).collect::<Vec<_>>());
            report["gaps"] = json!(gaps
                .gaps
                .iter()
                .map(|(a, b)| json!([io::rational_str(a), io::rational_str(b)]))
                .collect::<Vec<_>>());
            report["evidence"] = json!(if gaps.exhaustive { "exhaustive" } else { "truncated" });
            Ok(truncated_outcome(report, snap.truncated))
        }
        Command::GapLaw {
            generators,
            depth,
            budget: flag,
        } => {
            let set = io::generators(&io::read_json(&generators)?)?;
            let r = explorer::entry_gap_law_check(&set, depth, budget(flag)?)?;
            let report = json!({
                "x": io::rational_str(&r.x),
                "holds": r.holds,
                "counterexample": r.counterexample.as_ref().map(|(w, v)| json!({"word": io::word_json(w), "entry": io::rational_str(v)})),
                "max_observed": r.max_observed.as_ref().map(io::rational_str),
                "elements": r.elements,
                "truncated": r.truncated,
            });
            if !r.holds {
                return Ok(Outcome::negative_if(report, true));
            }
            Ok(truncated_outcome(report, r.truncated))
        }
        Command::Reduce { generators, p, q, word } => {
            let set = io::generators(&io::read_json(&generators)?)?;
            let p = io::vector(&io::read_json(&p)?)?;
            let q = io::vector(&io::read_json(&q)?)?;
            let red = explorer::bilinear_reduction(&set, &p, &q)?;
            let mut report = json!({
                "A": {"name": red.a.0, "matrix": io::matrix_json(&red.a.1)},
                "B_T": {"name": red.bt.0, "matrix": io::matrix_json(&red.bt.1)},
                "generators": io::generators_json(&red.generators),
            });
            if let Some(w) = word {
                let w = Word::parse(&w);
                let prod = w.product(&set)?;
                let value = explorer::bilinear_value(&q, &prod, &p)?;
                let entry = red.sandwich_entry(&prod);
                let embedded = explorer::entry_embed(&entry, set.n().max(2))?;
                report["evaluation"] = json!({
                    "word": io::word_json(&w),
                    "bilinear": io::rational_str(&value),
                    "sandwich_entry": io::rational_str(&entry),
                    "embedded": io::matrix_json(&embedded),
                });
            }
            Ok(Outcome::ok(report))
        }
        Command::Contain {
            generators,
            probes,
            power,
            depth,
            tol,
            budget: flag,
        } => {
            let set = io::generators(&io::read_json(&generators)?)?;
            let probes: Vec<Word> = probes.iter().map(|p| Word::parse(p)).collect();
            let r = explorer::closure_containment_check(&set, &probes, power, depth, tol, budget(flag)?)?;
            let rows: Vec<Value> = r
                .probes
                .iter()
                .map(|p| {
                    json!({
                        "word": io::word_json(&p.word),
                        "power": p.power,
                        "distance": p.distance,
                        "nearest": io::word_json(&p.nearest),
                        "within_tol": p.within_tol,
                    })
                })
                .collect();
            let all = r.probes.iter().all(|p| p.within_tol);
            let report = json!({
                "augmented": r.augmented.names().collect::<Vec<_>>(),
                "elements": r.elements,
                "probes": rows,
            });
            Ok(Outcome::negative_if(report, !all))
        }
    }
}

fn check_domestic(m: &dstoch_core::DSMatrix, eps: Option<&str>, dim_limit: usize) -> Result<Outcome> {
    let report = domestic::domesticity_margin_with_limit(m, dim_limit)?;
    let mut out = json!({
        "margin": io::rational_str(&report.margin),
        "witness": report.witness.as_ref().map(io::pair_json),
        "domestic_for_eps": report.domestic_for_eps(m.n()).as_ref().map(io::rational_str),
    });
    let domestic = match eps {
        Some(e) => {
            let eps = parse_rational(e)?;
            domestic::check_eps(m.n(), &eps)?;
            let verdict = domestic::DomesticVerdict::from_report(report.clone(), &eps);
            out["eps"] = io::rational_str(&eps);
            out["violation"] = json!(verdict.violation.as_ref().map(io::pair_json));
            verdict.domestic
        }
        None => report.margin < Rational::one(),
    };
    out["domestic"] = json!(domestic);
    Ok(Outcome::negative_if(out, !domestic))
}

/// Keeps a partial snapshot instead of failing on budget exhaustion.
fn partial_ok(r: Result<SemigroupSnapshot>) -> Result<SemigroupSnapshot> {
    match r {
        Err(Error::BudgetExceeded { partial, .. }) => Ok(*partial),
        other => other,
    }
}

fn truncated_outcome(report: Value, truncated: bool) -> Outcome {
    Outcome {
        report,
        code: if truncated { EXIT_BUDGET } else { 0 },
    }
}

fn snapshot_json(snap: &SemigroupSnapshot, with_matrices: bool) -> Value {
    let elements: Vec<Value> = snap
        .elements
        .iter()
        .map(|e| {
            let mut v = json!({"key": hex::encode(&e.key), "word": io::word_json(&snap.word(e))});
            if with_matrices {
                v["matrix"] = io::matrix_json(&e.matrix);
            }
            v
        })
        .collect();
    json!({
        "n": snap.n(),
        "depth": snap.depth,
        "count": snap.len(),
        "truncated": snap.truncated,
        "elements": elements,
    })
}
