//! `offsim`: resource estimates, oracle suites, small simulations and the
//! reproduced tables. Reports go to stdout, diagnostics to stderr.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error.

mod table;

use clap::{Parser, Subcommand, ValueEnum};
use offsim::estimator::{AttackSpec, CostReport, Estimator};
use offsim::primitives::CipherId;
use offsim::simon::{self, FunctionTable, ToyConfig, ToyConstruction};
use offsim::verify::{run_suite, Suite};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use std::process::ExitCode;
use table::Table;

const DEFAULT_SEED: u64 = 1;

#[derive(Parser, Debug)]
#[command(
    name = "offsim",
    version,
    about = "Offline Simon attack circuits, simulation and cost estimates"
)]
struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Seed for every randomized step.
    #[arg(long, global = true, env = "OFFSIM_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads for parallel sweeps and trials (default: all cores).
    #[arg(long, global = true, env = "OFFSIM_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Offline,
    Grover,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Simon,
    ToyAttack,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    Primitives,
    Linalg,
    Adders,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ConstructionArg {
    Em,
    Chaskey,
    Elephant,
    Fx,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Cost of the offline Simon attack or of exhaustive key search.
    Estimate {
        /// chaskey-8, chaskey-12, prince, elephant-160, elephant-176, elephant-200.
        #[arg(long, value_parser = parse_cipher)]
        target: CipherId,
        #[arg(long, value_enum, default_value_t = Mode::Offline)]
        mode: Mode,
        /// log2 of the classical query limit, or `none`.
        #[arg(long, value_parser = parse_limit)]
        data_limit: Option<Limit>,
        /// Fix the Simon domain size instead of optimizing it.
        #[arg(long)]
        u: Option<usize>,
    },
    /// Run an oracle suite; exits 1 with the failure list if any check fails.
    Verify {
        #[arg(long, value_enum)]
        suite: SuiteArg,
    },
    /// Exact Simon distribution with a rank test, or toy attack trials.
    Simulate {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Domain bits (simon) or block size (toy-attack).
        #[arg(long)]
        n: usize,
        /// Toy Simon domain (default n − 4).
        #[arg(long)]
        u: Option<usize>,
        #[arg(long, value_enum, default_value_t = ConstructionArg::Em)]
        construction: ConstructionArg,
        /// Rank-test trials (simon, default 1000) or attack trials (toy-attack, default 100).
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Reproduce a results table.
    Tables {
        #[arg(long, value_parser = ["1", "2", "3", "5"])]
        id: String,
    },
}

#[derive(Clone, Copy, Debug)]
enum Limit {
    Log2(usize),
    Unlimited,
}

fn parse_cipher(s: &str) -> Result<CipherId, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn parse_limit(s: &str) -> Result<Limit, String> {
    if s.eq_ignore_ascii_case("none") {
        return Ok(Limit::Unlimited);
    }
    s.parse()
        .map(Limit::Log2)
        .map_err(|_| format!("expected log2 of a query count or `none`, got {s:?}"))
}

/// Errors that are the caller's fault; reported on stderr with exit 2.
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
        {
            eprintln!("offsim: thread pool: {e}");
        }
    }
    match run(&cli) {
        Ok(Outcome { stdout, ok }) => {
            print!("{stdout}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(UsageError(msg)) => {
            eprintln!("offsim: {msg}");
            ExitCode::from(2)
        }
    }
}

struct Outcome {
    stdout: String,
    ok: bool,
}

impl From<String> for Outcome {
    fn from(stdout: String) -> Self {
        Outcome { stdout, ok: true }
    }
}

fn run(cli: &Cli) -> Result<Outcome, UsageError> {
    match &cli.command {
        Command::Estimate {
            target,
            mode,
            data_limit,
            u,
        } => estimate(cli.format, *target, *mode, *data_limit, *u).map(Into::into),
        Command::Verify { suite } => Ok(verify(cli.format, *suite, cli.seed)),
        Command::Simulate {
            kind: Kind::Simon,
            n,
            u,
            trials,
            ..
        } => {
            if u.is_some() {
                return Err(UsageError("--u applies to --kind toy-attack".into()));
            }
            simulate_simon(cli.format, *n, trials.unwrap_or(1000), cli.seed).map(Into::into)
        }
        Command::Simulate {
            kind: Kind::ToyAttack,
            n,
            u,
            construction,
            trials,
        } => {
            let u = u.unwrap_or(n.saturating_sub(4));
            simulate_toy(
                cli.format,
                *construction,
                *n,
                u,
                trials.unwrap_or(100),
                cli.seed,
            )
            .map(Into::into)
        }
        Command::Tables { id } => Ok(tables(cli.format, id).into()),
    }
}

fn f1(v: f64) -> String {
    format!("{v:.1}")
}

const REPORT_COLUMNS: [&str; 9] = [
    "target",
    "mode",
    "u",
    "queries_log2",
    "ops_log2",
    "t_log2",
    "depth_log2",
    "t_depth_log2",
    "qubits_log2",
];

fn report_row(r: &CostReport) -> Vec<String> {
    vec![
        r.target.clone(),
        r.mode.clone(),
        r.u.map_or("-".into(), |u| u.to_string()),
        f1(r.queries_log2),
        f1(r.ops_log2),
        f1(r.t_log2),
        f1(r.depth_log2),
        f1(r.t_depth_log2),
        f1(r.qubits_log2),
    ]
}

fn render_reports(format: Format, reports: &[CostReport]) -> String {
    match format {
        Format::Json => {
            let v: Vec<serde_json::Value> = reports
                .iter()
                .map(|r| serde_json::from_str(&r.to_json()).expect("report serializes"))
                .collect();
            format!("{}\n", serde_json::to_string_pretty(&v).expect("json"))
        }
        _ => {
            let mut t = Table::new(REPORT_COLUMNS);
            for r in reports {
                t.row(report_row(r));
            }
            if format == Format::Csv {
                t.csv()
            } else {
                t.text()
            }
        }
    }
}

fn estimate(
    format: Format,
    target: CipherId,
    mode: Mode,
    limit: Option<Limit>,
    u: Option<usize>,
) -> Result<String, UsageError> {
    let est = Estimator::default();
    let mut spec = AttackSpec::for_cipher(target);
    match limit {
        Some(Limit::Log2(d)) => spec.data_limit_log2 = Some(d),
        Some(Limit::Unlimited) => spec = spec.unlimited(),
        None => {}
    }
    let report = match (mode, u) {
        (Mode::Grover, Some(_)) => {
            return Err(UsageError("--u applies to --mode offline".into()));
        }
        (Mode::Grover, None) => est.grover_key_search(&spec),
        (Mode::Offline, Some(u)) => est.offline_cost(&spec, u)?,
        (Mode::Offline, None) => est.optimize_u(&spec)?,
    };
    Ok(match format {
        Format::Json => format!("{}\n", report.to_json()),
        Format::Csv => render_reports(format, &[report]),
        Format::Table => {
            let mut t = Table::new(["field", "value"]);
            for (k, v) in REPORT_COLUMNS.iter().zip(report_row(&report)) {
                t.row(vec![k.to_string(), v]);
            }
            t.row(vec!["qubits".into(), format!("{:.0}", report.qubits)]);
            t.row(vec!["m_queries".into(), report.m_queries.to_string()]);
            let b = &report.breakdown;
            t.row(vec!["iterations_log2".into(), f1(b.iterations.log2())]);
            for (name, c) in [
                ("qrom_ops_log2", b.qrom),
                ("cipher_ops_per_iteration_log2", b.cipher_per_iteration),
                ("linalg_ops_per_iteration_log2", b.linalg_per_iteration),
                ("other_ops_per_iteration_log2", b.other_per_iteration),
            ] {
                let ops = c.ops();
                t.row(vec![
                    name.into(),
                    if ops > 0.0 {
                        f1(ops.log2())
                    } else {
                        "-".into()
                    },
                ]);
            }
            t.text()
        }
    })
}

fn verify(format: Format, suite: SuiteArg, seed: u64) -> Outcome {
    let suite = match suite {
        SuiteArg::Primitives => Suite::Primitives,
        SuiteArg::Linalg => Suite::Linalg,
        SuiteArg::Adders => Suite::Adders,
    };
    let report = run_suite(suite, seed);
    let failures: Vec<serde_json::Value> = report
        .checks
        .iter()
        .filter(|c| !c.passed())
        .map(|c| json!({"check": c.name, "failed": c.failed, "cases": c.cases, "examples": c.failures}))
        .collect();
    let stdout = match format {
        Format::Json => format!(
            "{}\n",
            serde_json::to_string_pretty(&json!({
                "suite": report.suite,
                "seed": seed,
                "passed": report.passed(),
                "checks": report.checks,
            }))
            .expect("json")
        ),
        Format::Csv => {
            eprintln!("seed: {seed}");
            let mut t = Table::new(["check", "cases", "failed", "status"]);
            for c in &report.checks {
                t.row(vec![
                    c.name.clone(),
                    c.cases.to_string(),
                    c.failed.to_string(),
                    status(c.passed()).into(),
                ]);
            }
            t.csv()
        }
        Format::Table => {
            let mut s = format!("suite: {suite}\nseed: {seed}\n");
            for c in &report.checks {
                s.push_str(&format!(
                    "{}: {} ({} cases)\n",
                    c.name,
                    status(c.passed()),
                    c.cases
                ));
            }
            if !failures.is_empty() {
                let list = json!({ "failures": failures });
                s.push_str(&format!("{list}\n"));
            }
            s
        }
    };
    Outcome {
        stdout,
        ok: report.passed(),
    }
}

fn status(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Simon outputs carry the width the attack uses.
const SIMON_M_OUT: usize = 11;
const SIMON_ALPHA: usize = 9;

fn simulate_simon(
    format: Format,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<String, UsageError> {
    if n == 0 || n > simon::MAX_TABLE_BITS {
        return Err(UsageError(format!(
            "--n must be in 1..={} for the exact distribution",
            simon::MAX_TABLE_BITS
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let period = rng.gen_range(1..1u64 << n);
    let f = FunctionTable::random_periodic(n, SIMON_M_OUT, period, &mut rng);
    let p = simon::simon_distribution(&f)?;
    if format == Format::Csv {
        eprintln!("seed: {seed}");
        return Ok(simon::distribution_csv(&p));
    }
    let statevector_l1 = simon::statevector_simon(&f).ok().map(|run| {
        p.iter()
            .zip(&run.probabilities)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
    });
    let off_mass: f64 = p
        .iter()
        .enumerate()
        .filter(|&(j, _)| (j as u64 & period).count_ones() % 2 == 1)
        .map(|(_, v)| v)
        .sum();
    let support = p.iter().filter(|&&v| v > 0.0).count();
    let m = n + SIMON_ALPHA + 1;
    let rt = simon::rank_test_success(&f, Some(period), m, trials, rng.gen())?;
    Ok(match format {
        Format::Json => format!(
            "{}\n",
            serde_json::to_string_pretty(&json!({
                "seed": seed,
                "n": n,
                "m_out": SIMON_M_OUT,
                "period": period,
                "support": support,
                "mass_not_orthogonal": off_mass,
                "statevector_l1": statevector_l1,
                "rank_test": rt,
                "distribution": p,
            }))
            .expect("json")
        ),
        _ => {
            let mut t = Table::new(["field", "value"]);
            let mut kv = |k: &str, v: String| t.row(vec![k.into(), v]);
            kv("seed", seed.to_string());
            kv("n", n.to_string());
            kv("m_out", SIMON_M_OUT.to_string());
            kv("period", format!("{period:#x}"));
            kv("support", support.to_string());
            kv("P(j = 0)", format!("{:.6}", p[0]));
            kv("mass on j not orthogonal to s", format!("{off_mass:e}"));
            kv(
                "statevector L1",
                statevector_l1.map_or("- (above size cap)".into(), |v| format!("{v:e}")),
            );
            kv("rank test queries m", m.to_string());
            kv("rank test trials", rt.trials.to_string());
            kv("periodic rank < n", format!("{:.4}", rt.periodic_low_rank));
            kv("random rank = n", format!("{:.4}", rt.control_full_rank));
            kv("false periodic", format!("{:.5}", rt.false_periodic));
            kv(
                "orthogonality violations",
                rt.orthogonality_violations.to_string(),
            );
            t.text()
        }
    })
}

fn simulate_toy(
    format: Format,
    construction: ConstructionArg,
    n: usize,
    u: usize,
    trials: usize,
    seed: u64,
) -> Result<String, UsageError> {
    let construction = match construction {
        ConstructionArg::Em => ToyConstruction::EvenMansour,
        ConstructionArg::Chaskey => ToyConstruction::ChaskeyStyle,
        ConstructionArg::Elephant => ToyConstruction::ElephantStyle,
        ConstructionArg::Fx => ToyConstruction::Fx,
    };
    let cfg = ToyConfig::new(construction, n, u);
    cfg.validate()?;
    let (reports, summary) = simon::toy_trials(cfg, seed, trials)?;
    let hex = |v: Option<u64>| v.map_or("-".into(), |v| format!("{v:#x}"));
    let mut t = Table::new([
        "seed",
        "guess",
        "true_guess",
        "rank",
        "period",
        "recovered_key",
        "success",
    ]);
    for r in &reports {
        t.row(vec![
            r.seed.to_string(),
            hex(r.guess),
            format!("{:#x}", r.true_guess),
            r.rank.map_or("-".into(), |v| v.to_string()),
            hex(r.period),
            r.recovered_key.clone().unwrap_or_else(|| "-".into()),
            r.success.to_string(),
        ]);
    }
    Ok(match format {
        Format::Json => format!(
            "{}\n",
            serde_json::to_string_pretty(&json!({
                "seed": seed,
                "summary": summary,
                "trials": reports,
            }))
            .expect("json")
        ),
        Format::Csv => {
            eprintln!("seed: {seed}");
            t.csv()
        }
        Format::Table => {
            let p = cfg.params();
            format!(
                "seed: {seed}\nconstruction: {construction:?}  n: {n}  u: {u}  inner key bits: {}  m_out: {}  queries: {}\n{}\
                 success: {}/{} = {:.3}  bound: {:.3}{}\nwrong guesses passing the rank test: {}/{}\n",
                cfg.k,
                cfg.m_out,
                p.m_queries,
                t.text(),
                summary.successes,
                summary.trials,
                summary.success_rate,
                summary.bound,
                if summary.hypotheses_hold {
                    ""
                } else {
                    " (theorem hypotheses not met; indicative)"
                },
                summary.wrong_guesses_passed,
                summary.wrong_guesses,
            )
        }
    })
}

fn tables(format: Format, id: &str) -> String {
    let est = Estimator::default();
    let reports: Vec<CostReport> = match id {
        "1" => CipherId::ALL
            .iter()
            .map(|&c| {
                est.optimize_u(&AttackSpec::for_cipher(c))
                    .expect("default spec")
            })
            .collect(),
        "2" => CipherId::ALL
            .iter()
            .map(|&c| {
                est.optimize_u(&AttackSpec::for_cipher(c).unlimited())
                    .expect("default spec")
            })
            .collect(),
        "3" => CipherId::ALL
            .iter()
            .map(|&c| est.grover_key_search(&AttackSpec::for_cipher(c)))
            .collect(),
        _ => return table5(format, &est),
    };
    render_reports(format, &reports)
}

fn table5(format: Format, est: &Estimator) -> String {
    let rows = est.table5_rows();
    if format == Format::Json {
        let v: Vec<serde_json::Value> = rows
            .iter()
            .map(|(c, r)| {
                json!({
                    "target": c.name(),
                    "cnot": r.cnot,
                    "one_qubit_clifford": r.one_qubit_clifford,
                    "t": r.t,
                    "measurement": r.measurement,
                    "t_depth": r.t_depth,
                    "depth": r.depth,
                    "qubits": r.qubits,
                })
            })
            .collect();
        return format!("{}\n", serde_json::to_string_pretty(&v).expect("json"));
    }
    let mut t = Table::new([
        "target",
        "cnot",
        "1qc",
        "t",
        "measurement",
        "t_depth",
        "depth",
        "qubits",
    ]);
    for (c, r) in &rows {
        t.row(vec![
            c.name().into(),
            r.cnot.to_string(),
            r.one_qubit_clifford.to_string(),
            r.t.to_string(),
            r.measurement.to_string(),
            r.t_depth.to_string(),
            r.depth.to_string(),
            r.qubits.to_string(),
        ]);
    }
    if format == Format::Csv {
        t.csv()
    } else {
        t.text()
    }
}
