//! Utility rankings, qualitative expected utility, and conditional oughts.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::action::{post_action_trace_dnf, ActionDnf, PostActionTrace};
use crate::error::{Error, Result};
use crate::logic::{world_count, Prop, World};
use crate::network::{stratified_joint, CausalNetwork};
use crate::rank::Rank;
use crate::ranking::RankingFunction;

/// `μ(ω)`: signed integer level per world. Level `±i` stands for a utility
/// of order `±1/ε^i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UtilityRanking {
    n: usize,
    mu: Vec<i64>,
}

impl UtilityRanking {
    pub fn zero(n: usize) -> Result<Self> {
        Ok(UtilityRanking { n, mu: vec![0; world_count(n)?] })
    }

    pub fn from_values(n: usize, mu: Vec<i64>) -> Result<Self> {
        let expected = world_count(n)?;
        if mu.len() != expected {
            return Err(Error::WrongTableSize { got: mu.len(), expected });
        }
        Ok(UtilityRanking { n, mu })
    }

    /// Ordered clauses; the first clause a world satisfies sets its level,
    /// unmatched worlds get 0.
    pub fn from_clauses(n: usize, clauses: &[(i64, Prop)]) -> Result<Self> {
        for (_, p) in clauses {
            p.check(n)?;
        }
        let mu = World::all(n)
            .map(|w| clauses.iter().find(|(_, p)| p.eval(w)).map_or(0, |(lvl, _)| *lvl))
            .collect();
        Ok(UtilityRanking { n, mu })
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn level(&self, w: World) -> i64 {
        self.mu[w.index()]
    }

    pub fn values(&self) -> &[i64] {
        &self.mu
    }

    pub fn max_level(&self) -> u64 {
        self.mu.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0)
    }

    /// Distinct nonzero levels present.
    pub fn levels(&self) -> BTreeSet<i64> {
        self.mu.iter().copied().filter(|&v| v != 0).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Value(i64),
    /// Serious possibility of both gain and loss at the same order.
    Ambiguous(u64),
}

impl Serialize for Verdict {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Verdict::Value(v) => s.serialize_i64(*v),
            Verdict::Ambiguous(n) => s.serialize_str(&format!("ambiguous({n})")),
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Value(v) => write!(f, "{v}"),
            Verdict::Ambiguous(n) => write!(f, "ambiguous({n})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct UtilityRankResult {
    pub n_plus: u64,
    pub n_minus: u64,
    pub verdict: Verdict,
}

impl UtilityRankResult {
    pub fn from_counts(n_plus: u64, n_minus: u64) -> Self {
        let verdict = if n_plus == n_minus && n_plus > 0 {
            Verdict::Ambiguous(n_plus)
        } else {
            Verdict::Value(n_plus as i64 - n_minus as i64)
        };
        UtilityRankResult { n_plus, n_minus, verdict }
    }
}

/// How ambiguous utility ranks are turned into comparable integers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum RiskPolicy {
    /// `Ambiguous(n)` counts as `-n`.
    #[default]
    RiskAverse,
    /// Comparing an ambiguous value is an error.
    Strict,
}

impl RiskPolicy {
    pub fn resolve(self, r: &UtilityRankResult) -> Result<i64> {
        match (r.verdict, self) {
            (Verdict::Value(v), _) => Ok(v),
            (Verdict::Ambiguous(n), RiskPolicy::RiskAverse) => Ok(-(n as i64)),
            (Verdict::Ambiguous(n), RiskPolicy::Strict) => Err(Error::StrictAmbiguity(n)),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OughtMode {
    /// Doing `A` beats doing nothing.
    #[default]
    Standard,
    /// Doing `A` beats both doing nothing and doing `¬A`.
    Strong,
}

/// `μ(φ; κ')`.
///
/// `n⁺ = max(0, max_i [i - κ'(W_i⁺ ∧ φ)])`, `n⁻` likewise, and the verdict
/// is `n⁺ - n⁻` unless both are equal and positive.
///
/// Requires `κ'(φ) = 0`. Worlds outside `φ` may keep finite ranks.
pub fn expected_utility_rank(
    phi: &Prop,
    k_post: &RankingFunction,
    mu: &UtilityRanking,
) -> Result<UtilityRankResult> {
    check_pair(k_post, mu)?;
    let r = k_post.rank_of(phi);
    if !r.is_zero() {
        return Err(Error::InvalidPostRanking(r.to_string()));
    }
    let mut n_plus = 0u64;
    let mut n_minus = 0u64;
    for level in mu.levels() {
        let k = k_post.rank_where(|w| mu.level(w) == level && phi.eval(w));
        let Some(k) = k.finite() else { continue };
        let i = level.unsigned_abs();
        if i > k {
            let slot = if level > 0 { &mut n_plus } else { &mut n_minus };
            *slot = (*slot).max(i - k);
        }
    }
    Ok(UtilityRankResult::from_counts(n_plus, n_minus))
}

/// Three-level utility rank with risk aversion built in: `-1` if
/// `κ'(W⁻|φ) = 0`, else `+1` if `κ'(W⁺|φ) = 0`, else `0`.
pub fn three_level_rank(phi: &Prop, k_post: &RankingFunction, mu: &UtilityRanking) -> Result<i64> {
    check_pair(k_post, mu)?;
    if let Some(&bad) = mu.values().iter().find(|v| !(-1..=1).contains(*v)) {
        return Err(Error::LevelOutOfRange(bad));
    }
    let given = k_post.rank_of(phi);
    if !given.is_finite() {
        return Err(Error::ImpossibleCondition);
    }
    let cond = |level: i64| -> Result<Rank> {
        k_post
            .rank_where(|w| mu.level(w) == level && phi.eval(w))
            .checked_sub(given)
    };
    let minus = cond(-1)?;
    let plus = cond(1)?;
    Ok(if minus.is_zero() {
        -1
    } else if plus.is_zero() {
        1
    } else {
        0
    })
}

fn check_pair(k: &RankingFunction, mu: &UtilityRanking) -> Result<()> {
    if k.num_vars() != mu.num_vars() {
        return Err(Error::VariableMismatch { network: k.num_vars(), utility: mu.num_vars() });
    }
    Ok(())
}

/// Beliefs, causal structure and utilities. The prior belief is the
/// network's stratified joint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpistemicState {
    network: CausalNetwork,
    utility: UtilityRanking,
    prior: RankingFunction,
}

impl EpistemicState {
    pub fn new(network: CausalNetwork, utility: UtilityRanking) -> Result<Self> {
        if network.num_vars() != utility.num_vars() {
            return Err(Error::VariableMismatch {
                network: network.num_vars(),
                utility: utility.num_vars(),
            });
        }
        let prior = stratified_joint(&network);
        Ok(EpistemicState { network, utility, prior })
    }

    pub fn network(&self) -> &CausalNetwork {
        &self.network
    }

    pub fn utility(&self) -> &UtilityRanking {
        &self.utility
    }

    pub fn prior(&self) -> &RankingFunction {
        &self.prior
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OughtTrace {
    /// Post-action ranking `κ_A(·|C)`.
    pub post: PostActionTrace,
    pub action: UtilityRankResult,
    pub baseline: UtilityRankResult,
    /// Utility rank of doing `¬A`, strong mode only.
    pub negation: Option<UtilityRankResult>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OughtVerdict {
    pub assertable: bool,
    pub action_value: i64,
    pub baseline_value: i64,
    pub negation_value: Option<i64>,
    pub mode: OughtMode,
    pub trace: OughtTrace,
}

/// `O(A|C)`: is `μ(A; κ_A(·|C)) > μ(true; κ(·|C))`?
pub fn ought(
    es: &EpistemicState,
    a: &ActionDnf,
    c: &Prop,
    policy: RiskPolicy,
    mode: OughtMode,
) -> Result<OughtVerdict> {
    let belief = es.prior.condition(c)?;
    ought_given(es, &belief, a, policy, mode)
}

/// As [`ought`], with `belief` already standing for `κ(·|C)`.
pub fn ought_given(
    es: &EpistemicState,
    belief: &RankingFunction,
    a: &ActionDnf,
    policy: RiskPolicy,
    mode: OughtMode,
) -> Result<OughtVerdict> {
    let mu = &es.utility;
    let post = post_action_trace_dnf(&es.network, belief, a)?;
    let action = expected_utility_rank(&a.to_prop(), &post.ranking, mu)?;
    let baseline = expected_utility_rank(&Prop::True, belief, mu)?;
    let action_value = policy.resolve(&action)?;
    let baseline_value = policy.resolve(&baseline)?;
    let mut assertable = action_value > baseline_value;

    let mut negation = None;
    let mut negation_value = None;
    if mode == OughtMode::Strong {
        // ¬A unsatisfiable: there is no alternative action to beat
        if let Some(neg) = a.negation() {
            let neg_post = post_action_trace_dnf(&es.network, belief, &neg)?;
            let r = expected_utility_rank(&neg.to_prop(), &neg_post.ranking, mu)?;
            let v = policy.resolve(&r)?;
            assertable &= action_value > v;
            negation = Some(r);
            negation_value = Some(v);
        }
    }
    Ok(OughtVerdict {
        assertable,
        action_value,
        baseline_value,
        negation_value,
        mode,
        trace: OughtTrace { post, action, baseline, negation },
    })
}

/// Decision-making conditional `A > B | C`: `¬B` is a serious possibility
/// given `C`, and surprising once `A` is done.
pub fn dmc(es: &EpistemicState, a: &ActionDnf, b: &Prop, c: &Prop) -> Result<bool> {
    let not_b = !b.clone();
    if !es.prior.cond_rank(&not_b, c)?.is_zero() {
        return Ok(false);
    }
    let belief = es.prior.condition(c)?;
    dmc_given(es, &belief, a, b)
}

/// As [`dmc`], with `belief` standing for `κ(·|C)`.
pub fn dmc_given(es: &EpistemicState, belief: &RankingFunction, a: &ActionDnf, b: &Prop) -> Result<bool> {
    let not_b = !b.clone();
    if !belief.rank_of(&not_b).is_zero() {
        return Ok(false);
    }
    let post = post_action_trace_dnf(&es.network, belief, a)?.ranking;
    Ok(post.rank_of(&not_b) > Rank::Finite(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rank::{INF, ZERO};

    #[test]
    fn flat_utility_is_worth_nothing() {
        let k = RankingFunction::uniform(2).unwrap();
        let mu = UtilityRanking::zero(2).unwrap();
        let r = expected_utility_rank(&Prop::True, &k, &mu).unwrap();
        assert_eq!(r, UtilityRankResult { n_plus: 0, n_minus: 0, verdict: Verdict::Value(0) });
    }

    #[test]
    fn gain_and_loss_both_normal_is_ambiguous() {
        let k = RankingFunction::uniform(1).unwrap();
        let mu = UtilityRanking::from_values(1, vec![-1, 1]).unwrap();
        let r = expected_utility_rank(&Prop::True, &k, &mu).unwrap();
        assert_eq!(r.verdict, Verdict::Ambiguous(1));
        assert_eq!(RiskPolicy::RiskAverse.resolve(&r), Ok(-1));
        assert_eq!(RiskPolicy::Strict.resolve(&r), Err(Error::StrictAmbiguity(1)));
    }

    #[test]
    fn surprise_discounts_levels() {
        // level +2 at rank 1 and level -1 at rank 0: n+ = 1, n- = 1 -> ambiguous
        let k = RankingFunction::new(1, vec![ZERO, Rank::Finite(1)]).unwrap();
        let mu = UtilityRanking::from_values(1, vec![-1, 2]).unwrap();
        let r = expected_utility_rank(&Prop::True, &k, &mu).unwrap();
        assert_eq!((r.n_plus, r.n_minus), (1, 1));
        // level +2 at rank 3 contributes nothing
        let k = RankingFunction::new(1, vec![ZERO, Rank::Finite(3)]).unwrap();
        let r = expected_utility_rank(&Prop::True, &k, &mu).unwrap();
        assert_eq!(r.verdict, Verdict::Value(-1));
    }

    #[test]
    fn precondition_requires_zero_rank_phi() {
        let k = RankingFunction::new(1, vec![ZERO, INF]).unwrap();
        let mu = UtilityRanking::zero(1).unwrap();
        assert!(matches!(
            expected_utility_rank(&Prop::var(0), &k, &mu),
            Err(Error::InvalidPostRanking(_))
        ));
    }

    #[test]
    fn three_level_rejects_wide_levels() {
        let k = RankingFunction::uniform(1).unwrap();
        let mu = UtilityRanking::from_values(1, vec![0, 2]).unwrap();
        assert_eq!(three_level_rank(&Prop::True, &k, &mu), Err(Error::LevelOutOfRange(2)));
    }

    #[test]
    fn first_matching_clause_wins() {
        let mu = UtilityRanking::from_clauses(
            2,
            &[(-1, Prop::var(0) & Prop::var(1)), (2, Prop::var(0))],
        )
        .unwrap();
        assert_eq!(mu.values(), &[0, 2, 0, -1]);
        assert_eq!(mu.max_level(), 2);
    }
}
