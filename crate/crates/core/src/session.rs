//! Sequential query sessions.
//!
//! `observe` conditions the current belief and `do` replaces it with the
//! post-action ranking. `ought` and `dmc` are hypothetical and leave the
//! belief untouched.

use crate::action::{post_action_trace_dnf, PostActionTrace};
use crate::decision::{dmc_given, ought_given, EpistemicState, OughtMode, OughtVerdict, RiskPolicy};
use crate::dsl::{Command, ModelDocument, ShowTarget};
use crate::error::{Error, Result};
use crate::ranking::RankingFunction;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Observed,
    Acted(PostActionTrace),
    Ought(Box<OughtVerdict>),
    Dmc(bool),
    Show(ShowTarget),
    Reset,
}

#[derive(Clone, Debug)]
pub struct Session {
    es: EpistemicState,
    names: Vec<String>,
    belief: RankingFunction,
    history: Vec<Command>,
    policy: RiskPolicy,
    force_strong: bool,
}

impl Session {
    pub fn new(doc: &ModelDocument) -> Result<Self> {
        let es = EpistemicState::new(doc.network.clone(), doc.utility.clone())?;
        let belief = es.prior().clone();
        Ok(Session {
            es,
            names: doc.names(),
            belief,
            history: Vec::new(),
            policy: RiskPolicy::RiskAverse,
            force_strong: false,
        })
    }

    pub fn with_policy(mut self, policy: RiskPolicy) -> Self {
        self.policy = policy;
        self
    }

    /// Evaluates every `ought` in strong mode.
    pub fn with_strong(mut self, strong: bool) -> Self {
        self.force_strong = strong;
        self
    }

    pub fn state(&self) -> &EpistemicState {
        &self.es
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn belief(&self) -> &RankingFunction {
        &self.belief
    }

    pub fn history(&self) -> &[Command] {
        &self.history
    }

    pub fn execute(&mut self, cmd: &Command) -> Result<Outcome> {
        let out = match cmd {
            Command::Observe(p) => {
                self.belief = self.belief.condition(p).map_err(|e| match e {
                    Error::ImpossibleCondition => Error::ContradictoryObservation(p.display(&self.names).to_string()),
                    other => other,
                })?;
                Outcome::Observed
            }
            Command::Do(a) => {
                let trace = post_action_trace_dnf(self.es.network(), &self.belief, a)?;
                self.belief = trace.ranking.clone();
                Outcome::Acted(trace)
            }
            Command::Ought { action, strong } => {
                let mode = if *strong || self.force_strong { OughtMode::Strong } else { OughtMode::Standard };
                Outcome::Ought(Box::new(ought_given(&self.es, &self.belief, action, self.policy, mode)?))
            }
            Command::Dmc { action, outcome } => Outcome::Dmc(dmc_given(&self.es, &self.belief, action, outcome)?),
            Command::Show(t) => Outcome::Show(*t),
            Command::Reset => {
                self.belief = self.es.prior().clone();
                Outcome::Reset
            }
        };
        self.history.push(cmd.clone());
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_query;
    use crate::models;

    fn run(doc: &ModelDocument, script: &str) -> Vec<Outcome> {
        let q = parse_query(script, &doc.names()).unwrap();
        let mut s = Session::new(doc).unwrap();
        q.commands.iter().map(|(_, c)| s.execute(c).unwrap()).collect()
    }

    #[test]
    fn dialogue_reverses() {
        let out = run(&models::switch(), models::DIALOGUE_SCRIPT);
        let verdicts: Vec<bool> = out
            .iter()
            .filter_map(|o| match o {
                Outcome::Ought(v) => Some(v.assertable),
                _ => None,
            })
            .collect();
        assert_eq!(verdicts, vec![true, true]);
    }

    #[test]
    fn ought_leaves_belief_alone() {
        let doc = models::umbrella();
        let q = parse_query("observe c\nought (u) ?\n", &doc.names()).unwrap();
        let mut s = Session::new(&doc).unwrap();
        s.execute(&q.commands[0].1).unwrap();
        let before = s.belief().clone();
        s.execute(&q.commands[1].1).unwrap();
        assert_eq!(s.belief(), &before);
        s.execute(&Command::Reset).unwrap();
        assert_eq!(s.belief(), s.state().prior());
        assert_eq!(s.history().len(), 3);
    }

    #[test]
    fn contradiction_is_reported() {
        let doc = models::switch();
        let q = parse_query("observe l\nobserve !l\n", &doc.names()).unwrap();
        let mut s = Session::new(&doc).unwrap();
        s.execute(&q.commands[0].1).unwrap();
        let e = s.execute(&q.commands[1].1).unwrap_err();
        assert!(e.to_string().starts_with("contradictory observation"));
    }
}
