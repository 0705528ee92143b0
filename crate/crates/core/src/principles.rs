//! Randomized search for counterexamples to deontic principles.
//!
//! * sure-thing: `O(A|C) ∧ O(A|¬C) ⟹ O(A)`
//! * weak consistency: `O(A|C) ⟹ ¬O(¬A|C)`
//!
//! Every raw hit is re-examined with independent machinery: the doubled
//! network must reproduce each post-action ranking and the numeric
//! utility oracle must agree with each utility rank involved. Hits that
//! pass are findings about the semantics; hits that fail point at an
//! engine bug.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::action::{doubled_network_ranking, post_action_ranking, ActionDnf};
use crate::decision::{ought, EpistemicState, OughtMode, OughtVerdict, RiskPolicy, UtilityRanking};
use crate::dsl::{parse_model, parse_query, Command, ModelDocument};
use crate::epsilon::{agrees, numeric_utility_verdict, DEFAULT_EPSILON};
use crate::error::Result;
use crate::gen::{random_conjunct, random_formula, random_network, random_utility, GenConfig};
use crate::logic::{Prop, World};
use crate::rank::Rank;
use crate::session::{Outcome, Session};

pub const PRINCIPLE_MAX_VARS: usize = 4;
const ORACLE_DRAWS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Principle {
    SureThing,
    WeakConsistency,
}

impl fmt::Display for Principle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Principle::SureThing => "sure-thing",
            Principle::WeakConsistency => "weak-consistency",
        })
    }
}

impl FromStr for Principle {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "sure-thing" => Ok(Principle::SureThing),
            "weak-consistency" => Ok(Principle::WeakConsistency),
            _ => Err(format!("unknown principle `{s}` (expected sure-thing or weak-consistency)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PrincipleConfig {
    pub principle: Principle,
    pub trials: usize,
    pub max_vars: usize,
    pub seed: u64,
}

impl PrincipleConfig {
    pub fn new(principle: Principle, trials: usize, seed: u64) -> Self {
        PrincipleConfig { principle, trials, max_vars: PRINCIPLE_MAX_VARS, seed }
    }

    fn generator(&self) -> GenConfig {
        let max_vars = self.max_vars.clamp(1, PRINCIPLE_MAX_VARS);
        GenConfig {
            min_vars: max_vars.min(2),
            max_vars,
            edge_prob: 0.5,
            max_parents: 3,
            ranks: vec![Rank::Finite(0), Rank::Finite(1), Rank::Finite(2), Rank::Infinite],
            max_persistence: 3,
            max_level: 2,
        }
    }
}

/// A principle violation with everything needed to reproduce it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Finding {
    pub trial: usize,
    /// The hit survived the independent checks.
    pub validated: bool,
    /// Disagreements found by the independent checks.
    pub oracle_notes: Vec<String>,
    /// Utility ranks of the `ought` queries, in script order.
    pub values: Vec<OughtValues>,
    pub model: String,
    pub query: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OughtValues {
    pub query: String,
    pub action: String,
    pub baseline: String,
    pub assertable: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrincipleReport {
    pub principle: Principle,
    pub seed: u64,
    pub trials_run: usize,
    /// Trials whose conditions were impossible under the prior.
    pub vacuous: usize,
    /// Trials where the principle's antecedent held.
    pub antecedent_held: usize,
    /// Violations confirmed by the independent checks.
    pub counterexamples: Vec<Finding>,
    /// Violations the independent checks disagree with.
    pub rejected: Vec<Finding>,
}

enum Trial {
    Vacuous,
    Fine { antecedent: bool },
    Hit(Finding),
}

struct Query {
    text: String,
    condition: Prop,
    action: ActionDnf,
}

fn world_clauses(mu: &UtilityRanking, n: usize) -> Vec<(i64, Prop)> {
    World::all(n).filter(|&w| mu.level(w) != 0).map(|w| (mu.level(w), Prop::world(w, n))).collect()
}

fn run_trial(cfg: &PrincipleConfig, trial: usize) -> Result<Trial> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(trial as u64);
    let net = random_network(&cfg.generator(), &mut rng);
    let n = net.num_vars();
    let mu = random_utility(n, 2, &mut rng);
    let a = ActionDnf::from(random_conjunct(n, 2, &mut rng));
    let c = random_formula(n, 2, &mut rng);
    let es = EpistemicState::new(net.clone(), mu.clone())?;
    let names = net.names();
    let prior = es.prior();

    let not_c = !c.clone();
    let queries = match cfg.principle {
        Principle::SureThing => {
            if !prior.rank_of(&c).is_finite() || !prior.rank_of(&not_c).is_finite() {
                return Ok(Trial::Vacuous);
            }
            vec![(c.clone(), a.clone()), (not_c.clone(), a.clone()), (Prop::True, a.clone())]
        }
        Principle::WeakConsistency => {
            if !prior.rank_of(&c).is_finite() {
                return Ok(Trial::Vacuous);
            }
            let neg = a.negation().expect("a single conjunct has a satisfiable negation");
            vec![(c.clone(), a.clone()), (c.clone(), neg)]
        }
    };
    let verdicts = queries
        .iter()
        .map(|(c, a)| ought(&es, a, c, RiskPolicy::RiskAverse, OughtMode::Standard))
        .collect::<Result<Vec<OughtVerdict>>>()?;
    let held: Vec<bool> = verdicts.iter().map(|v| v.assertable).collect();
    let (antecedent, violated) = match cfg.principle {
        Principle::SureThing => (held[0] && held[1], held[0] && held[1] && !held[2]),
        Principle::WeakConsistency => (held[0], held[0] && held[1]),
    };
    if !violated {
        return Ok(Trial::Fine { antecedent });
    }

    let queries: Vec<Query> = queries
        .into_iter()
        .map(|(c, a)| Query { text: format!("ought {} ?", a.display(&names)), condition: c, action: a })
        .collect();

    let mut notes = Vec::new();
    for (q, v) in queries.iter().zip(&verdicts) {
        let belief = prior.condition(&q.condition)?;
        for d in q.action.disjuncts() {
            if doubled_network_ranking(&net, &belief, d)? != post_action_ranking(&net, &belief, d)? {
                notes.push(format!("{}: doubled network disagrees on {}", q.text, d.display(&names)));
            }
        }
        let post = &v.trace.post.ranking;
        let numeric = numeric_utility_verdict(&q.action.to_prop(), post, &mu, DEFAULT_EPSILON, ORACLE_DRAWS, &mut rng)?;
        if !agrees(&v.trace.action, numeric) {
            notes.push(format!("{}: action rank {} but numeric {}", q.text, v.trace.action.verdict, numeric));
        }
        let numeric = numeric_utility_verdict(&Prop::True, &belief, &mu, DEFAULT_EPSILON, ORACLE_DRAWS, &mut rng)?;
        if !agrees(&v.trace.baseline, numeric) {
            notes.push(format!("{}: baseline rank {} but numeric {}", q.text, v.trace.baseline.verdict, numeric));
        }
    }

    let doc = ModelDocument::new(format!("trial{trial}"), net, world_clauses(&mu, n))?;
    let observe = |p: &Prop| format!("observe {}\n", p.display(&names));
    let query = match cfg.principle {
        Principle::SureThing => format!(
            "{}{}\nreset\n{}{}\nreset\n{}\n",
            observe(&c),
            queries[0].text,
            observe(&not_c),
            queries[1].text,
            queries[2].text
        ),
        Principle::WeakConsistency => format!("{}{}\n{}\n", observe(&c), queries[0].text, queries[1].text),
    };
    let values = queries
        .iter()
        .zip(&verdicts)
        .map(|(q, v)| OughtValues {
            query: q.text.clone(),
            action: v.trace.action.verdict.to_string(),
            baseline: v.trace.baseline.verdict.to_string(),
            assertable: v.assertable,
        })
        .collect();
    Ok(Trial::Hit(Finding {
        trial,
        validated: notes.is_empty(),
        oracle_notes: notes,
        values,
        model: doc.serialize(),
        query,
    }))
}

/// Runs `trials` independent random trials. Trial `k` draws from stream
/// `k` of the master seed, so results do not depend on scheduling.
pub fn check_principle(cfg: &PrincipleConfig) -> Result<PrincipleReport> {
    let trials = (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial(cfg, t))
        .collect::<Result<Vec<Trial>>>()?;
    let mut report = PrincipleReport {
        principle: cfg.principle,
        seed: cfg.seed,
        trials_run: cfg.trials,
        vacuous: 0,
        antecedent_held: 0,
        counterexamples: Vec::new(),
        rejected: Vec::new(),
    };
    for t in trials {
        match t {
            Trial::Vacuous => report.vacuous += 1,
            Trial::Fine { antecedent } => report.antecedent_held += antecedent as usize,
            Trial::Hit(f) => {
                report.antecedent_held += 1;
                if f.validated {
                    report.counterexamples.push(f);
                } else {
                    report.rejected.push(f);
                }
            }
        }
    }
    Ok(report)
}

/// Re-runs a finding's model and script and reports whether the same
/// violation appears.
pub fn replay(principle: Principle, finding: &Finding) -> std::result::Result<bool, String> {
    let doc = parse_model(&finding.model).map_err(|e| e.to_string())?;
    let script = parse_query(&finding.query, &doc.names()).map_err(|e| e.to_string())?;
    let mut session = Session::new(&doc).map_err(|e| e.to_string())?;
    let mut held = Vec::new();
    for (_, cmd) in &script.commands {
        if let Outcome::Ought(v) = session.execute(cmd).map_err(|e| e.to_string())? {
            held.push(v.assertable);
        }
        if matches!(cmd, Command::Ought { .. }) && held.len() > 3 {
            return Ok(false);
        }
    }
    Ok(match principle {
        Principle::SureThing => held == [true, true, false],
        Principle::WeakConsistency => held == [true, true],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_trials_is_empty() {
        let r = check_principle(&PrincipleConfig::new(Principle::SureThing, 0, 1)).unwrap();
        assert_eq!(r.trials_run, 0);
        assert!(r.counterexamples.is_empty() && r.rejected.is_empty());
    }

    #[test]
    fn reports_are_reproducible() {
        let cfg = PrincipleConfig::new(Principle::WeakConsistency, 300, 11);
        assert_eq!(check_principle(&cfg).unwrap(), check_principle(&cfg).unwrap());
    }

    #[test]
    fn parallel_matches_single_thread() {
        let cfg = PrincipleConfig::new(Principle::SureThing, 500, 3);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let sequential = pool.install(|| check_principle(&cfg)).unwrap();
        assert_eq!(check_principle(&cfg).unwrap(), sequential);
    }

    #[test]
    fn parses_names() {
        assert_eq!("sure-thing".parse(), Ok(Principle::SureThing));
        assert!("other".parse::<Principle>().is_err());
    }
}
