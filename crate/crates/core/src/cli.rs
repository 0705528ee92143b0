//! The `qdt` command line.
//!
//! Exit codes: 0 success, 1 usage or file error, 2 parse error, 3 semantic
//! or runtime error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::decision::{RiskPolicy, UtilityRankResult, Verdict};
use crate::dsl::{
    command_text, parse_action, parse_formula, parse_model, parse_query, Command, ErrorKind, ModelDocument,
    ParseError, QueryScript, ShowTarget,
};
use crate::epsilon::{agreement_report, DEFAULT_EPSILON};
use crate::error::Error;
use crate::logic::World;
use crate::network::stratified_joint;
use crate::principles::{check_principle, Principle, PrincipleConfig, PRINCIPLE_MAX_VARS};
use crate::ranking::{RankingFunction, WorldRank};
use crate::session::{Outcome, Session};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "qdt", version, about = "Qualitative decisions over ranked causal networks")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PolicyArg {
    Averse,
    Strict,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PrincipleArg {
    SureThing,
    WeakConsistency,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Parse and validate a model, then print its prior ranking.
    Check { model: PathBuf },
    /// Run a query script against a model.
    Run {
        model: PathBuf,
        script: PathBuf,
        /// Emit one JSON trace object per command.
        #[arg(long)]
        json: bool,
        #[arg(long, value_enum, default_value = "averse")]
        policy: PolicyArg,
        /// Evaluate every `ought` in strong mode.
        #[arg(long)]
        strong: bool,
    },
    /// One-shot query: observations, then an `ought` and/or a `dmc`.
    Query {
        model: PathBuf,
        /// Formula to observe; may be repeated.
        #[arg(long)]
        observe: Vec<String>,
        /// Action such as `(u & !n) | (l)`.
        #[arg(long)]
        ought: Option<String>,
        /// Conditional such as `(u) => l`.
        #[arg(long)]
        dmc: Option<String>,
        #[arg(long)]
        json: bool,
        #[arg(long, value_enum, default_value = "averse")]
        policy: PolicyArg,
        #[arg(long)]
        strong: bool,
    },
    /// Search random models for violations of a deontic principle.
    Principles {
        #[arg(long, value_enum, default_value = "sure-thing")]
        principle: PrincipleArg,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = PRINCIPLE_MAX_VARS)]
        vars: usize,
        #[arg(long, env = "QDT_SEED", default_value_t = 0)]
        seed: u64,
        /// Directory for the JSON report and reproduction files.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Compare ranks against the numeric infinitesimal semantics.
    Oracle {
        model: PathBuf,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
        #[arg(long, default_value_t = 20)]
        draws: usize,
        #[arg(long, env = "QDT_SEED", default_value_t = 0)]
        seed: u64,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }

    fn runtime(e: impl std::fmt::Display) -> Self {
        Failure { code: EXIT_RUNTIME, message: format!("error: {e}") }
    }

    fn parse(origin: &str, e: &ParseError) -> Self {
        let code = if e.kind == ErrorKind::Semantic { EXIT_RUNTIME } else { EXIT_PARSE };
        Failure { code, message: format!("{origin}:{e}") }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::runtime(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::usage(format!("error: {e}"))
    }
}

type CmdResult = std::result::Result<(), Failure>;

/// Runs the command line and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_OK
            };
        }
    };
    let result = match cli.command {
        Cmd::Check { model } => cmd_check(&model, stdout),
        Cmd::Run { model, script, json, policy, strong } => {
            let doc = load_model(&model);
            doc.and_then(|doc| {
                let text = read(&script)?;
                let q = parse_query(&text, &doc.names()).map_err(|e| Failure::parse(&script.display().to_string(), &e))?;
                run_script(&doc, &q, json, policy, strong, stdout)
            })
        }
        Cmd::Query { model, observe, ought, dmc, json, policy, strong } => load_model(&model).and_then(|doc| {
            let q = one_shot(&doc, &observe, ought.as_deref(), dmc.as_deref())?;
            run_script(&doc, &q, json, policy, strong, stdout)
        }),
        Cmd::Principles { principle, trials, vars, seed, out, json } => {
            cmd_principles(principle, trials, vars, seed, out.as_deref(), json, stdout)
        }
        Cmd::Oracle { model, epsilon, draws, seed } => cmd_oracle(&model, epsilon, draws, seed, stdout),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = stdout.flush();
            let _ = writeln!(stderr, "{}", f.message);
            f.code
        }
    }
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("error: cannot read {}: {e}", path.display())))
}

fn load_model(path: &Path) -> std::result::Result<ModelDocument, Failure> {
    let text = read(path)?;
    parse_model(&text).map_err(|e| Failure::parse(&path.display().to_string(), &e))
}

fn belief_lines(k: &RankingFunction, names: &[String]) -> String {
    let mut out = String::new();
    for (w, r) in k.support() {
        writeln!(out, "  {}  {:>3}  {}", w.bitstring(k.num_vars()), r, w.describe(names)).unwrap();
    }
    out
}

fn cmd_check(path: &Path, stdout: &mut dyn Write) -> CmdResult {
    let doc = load_model(path)?;
    let net = &doc.network;
    let prior = stratified_joint(net);
    writeln!(
        stdout,
        "model {}: {} variables, {} edges, {} utility clauses",
        doc.name,
        net.num_vars(),
        net.edges().len(),
        doc.utility_clauses.len()
    )?;
    writeln!(stdout, "prior ranking ({} finite worlds):", prior.support().count())?;
    write!(stdout, "{}", belief_lines(&prior, &net.names()))?;
    Ok(())
}

fn one_shot(
    doc: &ModelDocument,
    observe: &[String],
    ought: Option<&str>,
    dmc: Option<&str>,
) -> std::result::Result<QueryScript, Failure> {
    let names = doc.names();
    let mut commands = Vec::new();
    for o in observe {
        let p = parse_formula(o, &names).map_err(|e| Failure::parse("--observe", &e))?;
        commands.push(Command::Observe(p));
    }
    if let Some(a) = ought {
        let action = parse_action(a, &names).map_err(|e| Failure::parse("--ought", &e))?;
        commands.push(Command::Ought { action, strong: false });
    }
    if let Some(d) = dmc {
        let (a, b) = d.split_once("=>").ok_or_else(|| Failure::usage("error: --dmc expects `<action> => <formula>`"))?;
        let action = parse_action(a.trim(), &names).map_err(|e| Failure::parse("--dmc", &e))?;
        let outcome = parse_formula(b.trim(), &names).map_err(|e| Failure::parse("--dmc", &e))?;
        commands.push(Command::Dmc { action, outcome });
    }
    if ought.is_none() && dmc.is_none() {
        commands.push(Command::Show(ShowTarget::Ranking));
    }
    Ok(QueryScript { commands: commands.into_iter().map(|c| (0, c)).collect() })
}

#[derive(Serialize)]
struct ArgminEntry {
    world: String,
    prev: Vec<String>,
}

#[derive(Serialize)]
struct TraceRecord {
    command: String,
    belief: Vec<WorldRank>,
    n_plus: Option<u64>,
    n_minus: Option<u64>,
    verdict: Option<Verdict>,
    baseline: Option<Verdict>,
    assertable: Option<bool>,
    argmin_prev_worlds: Vec<ArgminEntry>,
    action_value: Option<i64>,
    baseline_value: Option<i64>,
    negation: Option<Verdict>,
    post: Option<Vec<WorldRank>>,
    dmc: Option<bool>,
}

fn argmin(n: usize, entries: &[(World, Vec<World>)]) -> Vec<ArgminEntry> {
    entries
        .iter()
        .map(|(w, prev)| ArgminEntry { world: w.bitstring(n), prev: prev.iter().map(|p| p.bitstring(n)).collect() })
        .collect()
}

fn describe_rank(value: i64, r: &UtilityRankResult) -> String {
    match r.verdict {
        Verdict::Ambiguous(_) => format!("{value} [{}]", r.verdict),
        Verdict::Value(_) => value.to_string(),
    }
}

fn run_script(
    doc: &ModelDocument,
    q: &QueryScript,
    json: bool,
    policy: PolicyArg,
    strong: bool,
    stdout: &mut dyn Write,
) -> CmdResult {
    let policy = match policy {
        PolicyArg::Averse => RiskPolicy::RiskAverse,
        PolicyArg::Strict => RiskPolicy::Strict,
    };
    let mut session = Session::new(doc)?.with_policy(policy).with_strong(strong);
    let names = doc.names();
    let n = names.len();
    for (_, cmd) in &q.commands {
        let text = command_text(cmd, &names);
        let outcome = session.execute(cmd)?;
        let belief = session.belief();
        if json {
            let mut rec = TraceRecord {
                command: text,
                belief: belief.table(),
                n_plus: None,
                n_minus: None,
                verdict: None,
                baseline: None,
                assertable: None,
                argmin_prev_worlds: Vec::new(),
                action_value: None,
                baseline_value: None,
                negation: None,
                post: None,
                dmc: None,
            };
            match &outcome {
                Outcome::Acted(trace) => rec.argmin_prev_worlds = argmin(n, &trace.argmin),
                Outcome::Ought(v) => {
                    rec.n_plus = Some(v.trace.action.n_plus);
                    rec.n_minus = Some(v.trace.action.n_minus);
                    rec.verdict = Some(v.trace.action.verdict);
                    rec.baseline = Some(v.trace.baseline.verdict);
                    rec.assertable = Some(v.assertable);
                    rec.argmin_prev_worlds = argmin(n, &v.trace.post.argmin);
                    rec.action_value = Some(v.action_value);
                    rec.baseline_value = Some(v.baseline_value);
                    rec.negation = v.trace.negation.map(|r| r.verdict);
                    rec.post = Some(v.trace.post.ranking.table());
                }
                Outcome::Dmc(b) => rec.dmc = Some(*b),
                _ => {}
            }
            writeln!(stdout, "{}", serde_json::to_string(&rec).expect("trace serializes"))?;
            continue;
        }
        writeln!(stdout, "> {text}")?;
        match outcome {
            Outcome::Observed | Outcome::Acted(_) => {
                writeln!(stdout, "{} finite worlds", belief.support().count())?;
            }
            Outcome::Ought(v) => {
                let mut line = format!(
                    "{}  mu(action) = {}  mu(baseline) = {}",
                    if v.assertable { "ASSERTABLE" } else { "NOT ASSERTABLE" },
                    describe_rank(v.action_value, &v.trace.action),
                    describe_rank(v.baseline_value, &v.trace.baseline),
                );
                if let (Some(value), Some(r)) = (v.negation_value, &v.trace.negation) {
                    write!(line, "  mu(negation) = {}", describe_rank(value, r)).unwrap();
                }
                writeln!(stdout, "{line}")?;
            }
            Outcome::Dmc(b) => writeln!(stdout, "{b}")?,
            Outcome::Show(ShowTarget::Ranking) => write!(stdout, "{}", belief_lines(belief, &names))?,
            Outcome::Show(ShowTarget::Utility) => {
                let mu = session.state().utility();
                for w in World::all(n) {
                    writeln!(stdout, "  {}  {:>3}  {}", w.bitstring(n), mu.level(w), w.describe(&names))?;
                }
            }
            Outcome::Reset => writeln!(stdout, "belief reset to prior")?,
        }
    }
    Ok(())
}

fn cmd_principles(
    principle: PrincipleArg,
    trials: usize,
    vars: usize,
    seed: u64,
    out: Option<&Path>,
    json: bool,
    stdout: &mut dyn Write,
) -> CmdResult {
    if vars == 0 || vars > PRINCIPLE_MAX_VARS {
        return Err(Failure::usage(format!("error: --vars must be between 1 and {PRINCIPLE_MAX_VARS}")));
    }
    let principle = match principle {
        PrincipleArg::SureThing => Principle::SureThing,
        PrincipleArg::WeakConsistency => Principle::WeakConsistency,
    };
    let mut cfg = PrincipleConfig::new(principle, trials, seed);
    cfg.max_vars = vars;
    let report = check_principle(&cfg)?;
    let report_json = serde_json::to_string_pretty(&report).expect("report serializes");
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.json"), format!("{report_json}\n"))?;
        for f in report.counterexamples.iter().chain(&report.rejected) {
            std::fs::write(dir.join(format!("trial{}.qdt", f.trial)), &f.model)?;
            std::fs::write(dir.join(format!("trial{}.qdq", f.trial)), &f.query)?;
        }
    }
    if json {
        writeln!(stdout, "{report_json}")?;
        return Ok(());
    }
    writeln!(stdout, "principle {} seed {}", report.principle, report.seed)?;
    writeln!(
        stdout,
        "{} trials, {} vacuous, antecedent held {} times",
        report.trials_run, report.vacuous, report.antecedent_held
    )?;
    writeln!(
        stdout,
        "{} confirmed counterexamples, {} rejected by the oracle",
        report.counterexamples.len(),
        report.rejected.len()
    )?;
    for f in report.counterexamples.iter().chain(&report.rejected) {
        let tag = if f.validated { "confirmed" } else { "rejected" };
        writeln!(stdout, "\n--- trial {} ({tag})", f.trial)?;
        for v in &f.values {
            writeln!(stdout, "# {}  action {}  baseline {}  assertable {}", v.query, v.action, v.baseline, v.assertable)?;
        }
        for note in &f.oracle_notes {
            writeln!(stdout, "# oracle: {note}")?;
        }
        if out.is_none() {
            write!(stdout, "{}--- script\n{}", f.model, f.query)?;
        }
    }
    Ok(())
}

fn cmd_oracle(path: &Path, epsilon: f64, draws: usize, seed: u64, stdout: &mut dyn Write) -> CmdResult {
    let doc = load_model(path)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let report = agreement_report(&doc, epsilon, draws, seed, &mut rng)?;
    writeln!(stdout, "{}", serde_json::to_string_pretty(&report).expect("report serializes"))?;
    if report.agree {
        Ok(())
    } else {
        Err(Failure::runtime("ranks and numeric semantics disagree"))
    }
}
