//! Infinitesimal-probability reading of ranks.
//!
//! A rank `k` stands for a probability of order `ε^k`. Each table entry
//! becomes `c · ε^rank`, renormalized per row, and joints are products.
//! Everything is accumulated as natural logarithms.
//!
//! Reading a rank back off a single number is fragile when many worlds
//! share a rank, since their mass piles up into the coefficient. The
//! `*_exponents` functions therefore evaluate at `ε` and `ε²` and read the
//! exponent off the ratio, where the coefficient cancels.

use rand::Rng;
use serde::Serialize;

use crate::action::{post_action_ranking, ActionConjunct};
use crate::decision::{expected_utility_rank, UtilityRankResult, UtilityRanking, Verdict};
use crate::dsl::ModelDocument;
use crate::error::{Error, Result};
use crate::logic::{Prop, World};
use crate::network::{atomic_action_update, stratified_joint, AtomicAction, CausalNetwork};
use crate::rank::Rank;
use crate::ranking::RankingFunction;

pub const DEFAULT_EPSILON: f64 = 1e-3;
pub const NUMERIC_MAX_VARS: usize = 10;
/// Largest allowed distance from an integer when reading an exponent.
pub const EXPONENT_BAND: f64 = 0.35;
pub const COEFFICIENT_RANGE: (f64, f64) = (0.5, 2.0);

#[derive(Clone, Debug, PartialEq)]
pub struct EpsilonModel {
    epsilon: f64,
    // [node][row] -> [coefficient of false, coefficient of true]
    table_coefficients: Vec<Vec<[f64; 2]>>,
}

impl EpsilonModel {
    /// Unit coefficients everywhere.
    pub fn new(epsilon: f64) -> Result<Self> {
        // a factor-4 coefficient spread must never bridge one power of ε
        if !(epsilon > 0.0 && epsilon < 0.05) {
            return Err(Error::InvalidEpsilon(format!("{epsilon} is not in (0, 0.05)")));
        }
        Ok(EpsilonModel { epsilon, table_coefficients: Vec::new() })
    }

    /// Draws every table coefficient uniformly from [`COEFFICIENT_RANGE`].
    pub fn with_random_coefficients<R: Rng>(mut self, net: &CausalNetwork, rng: &mut R) -> Self {
        let (lo, hi) = COEFFICIENT_RANGE;
        self.table_coefficients = (0..net.num_vars())
            .map(|i| {
                (0..net.table(i).rows().len())
                    .map(|_| [rng.gen_range(lo..=hi), rng.gen_range(lo..=hi)])
                    .collect()
            })
            .collect();
        self
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    fn squared(&self) -> Self {
        EpsilonModel { epsilon: self.epsilon * self.epsilon, table_coefficients: self.table_coefficients.clone() }
    }

    fn coefficient(&self, node: usize, row: usize, value: bool) -> f64 {
        self.table_coefficients
            .get(node)
            .and_then(|rows| rows.get(row))
            .map_or(1.0, |c| c[value as usize])
    }
}

fn ln_term(coef: f64, rank: Rank, ln_eps: f64) -> f64 {
    match rank {
        Rank::Finite(k) => coef.ln() + k as f64 * ln_eps,
        Rank::Infinite => f64::NEG_INFINITY,
    }
}

/// `ln Σ exp(x)`; `-∞` for an empty or all-zero sum.
pub fn log_sum_exp<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let xs: Vec<f64> = xs.into_iter().collect();
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

fn check_size(net: &CausalNetwork) -> Result<()> {
    let n = net.num_vars();
    if n > NUMERIC_MAX_VARS {
        return Err(Error::TooManyVariables { n, limit: NUMERIC_MAX_VARS });
    }
    Ok(())
}

/// `ln P(X_i = value | row)` for every node, row and value.
fn log_tables(net: &CausalNetwork, em: &EpsilonModel) -> Vec<Vec<[f64; 2]>> {
    let ln_eps = em.epsilon.ln();
    (0..net.num_vars())
        .map(|i| {
            net.table(i)
                .rows()
                .iter()
                .enumerate()
                .map(|(k, row)| {
                    let f = ln_term(em.coefficient(i, k, false), row.if_false, ln_eps);
                    let t = ln_term(em.coefficient(i, k, true), row.if_true, ln_eps);
                    let z = log_sum_exp([f, t]);
                    [f - z, t - z]
                })
                .collect()
        })
        .collect()
}

fn log_joint_with(net: &CausalNetwork, em: &EpsilonModel, skip: Option<usize>) -> Vec<f64> {
    let tables = log_tables(net, em);
    World::all(net.num_vars())
        .map(|w| {
            (0..net.num_vars())
                .filter(|&i| Some(i) != skip)
                .map(|i| tables[i][net.table(i).row_index(w)][w.get(i) as usize])
                .sum()
        })
        .collect()
}

/// `ln P(ω)` for every world.
pub fn log_joint(net: &CausalNetwork, em: &EpsilonModel) -> Result<Vec<f64>> {
    check_size(net)?;
    Ok(log_joint_with(net, em, None))
}

/// The joint distribution, indexed by world.
pub fn numeric_joint(net: &CausalNetwork, em: &EpsilonModel) -> Result<Vec<f64>> {
    Ok(log_joint(net, em)?.into_iter().map(f64::exp).collect())
}

fn exponent_of(x: f64) -> Result<Rank> {
    let r = x.round();
    if (x - r).abs() > EXPONENT_BAND || r < 0.0 {
        return Err(Error::AmbiguousExponent { value: x });
    }
    Ok(Rank::Finite(r as u64))
}

/// `round(log p / log ε)`; zero maps to `∞`.
pub fn leading_exponent(p: f64, epsilon: f64) -> Result<Rank> {
    if p == 0.0 {
        return Ok(Rank::Infinite);
    }
    if p.is_nan() || p < 0.0 {
        return Err(Error::AmbiguousExponent { value: p });
    }
    exponent_of(p.ln() / epsilon.ln())
}

/// Exponent of `f` from `ln f(ε)` and `ln f(ε²)`.
pub fn two_scale_exponent(ln_at_eps: f64, ln_at_eps2: f64, epsilon: f64) -> Result<Rank> {
    match (ln_at_eps == f64::NEG_INFINITY, ln_at_eps2 == f64::NEG_INFINITY) {
        (true, true) => Ok(Rank::Infinite),
        (false, false) => exponent_of((ln_at_eps2 - ln_at_eps) / epsilon.ln()),
        _ => Err(Error::AmbiguousExponent { value: f64::NAN }),
    }
}

fn exponents(a: &[f64], b: &[f64], epsilon: f64) -> Vec<Result<Rank>> {
    a.iter().zip(b).map(|(&x, &y)| two_scale_exponent(x, y, epsilon)).collect()
}

/// Leading exponent of every world's joint probability.
pub fn joint_exponents(net: &CausalNetwork, em: &EpsilonModel) -> Result<Vec<Result<Rank>>> {
    let a = log_joint(net, em)?;
    let b = log_joint(net, &em.squared())?;
    Ok(exponents(&a, &b, em.epsilon))
}

fn log_conditional(lj: Vec<f64>, c: &Prop) -> Result<Vec<f64>> {
    let z = log_sum_exp(lj.iter().enumerate().filter(|(i, _)| c.eval(World(*i as u32))).map(|(_, &x)| x));
    if z == f64::NEG_INFINITY {
        return Err(Error::ImpossibleCondition);
    }
    Ok(lj
        .into_iter()
        .enumerate()
        .map(|(i, x)| if c.eval(World(i as u32)) { x - z } else { f64::NEG_INFINITY })
        .collect())
}

/// Leading exponents of `P(ω | c)`.
pub fn conditional_exponents(net: &CausalNetwork, em: &EpsilonModel, c: &Prop) -> Result<Vec<Result<Rank>>> {
    let a = log_conditional(log_joint(net, em)?, c)?;
    let b = log_conditional(log_joint(net, &em.squared())?, c)?;
    Ok(exponents(&a, &b, em.epsilon))
}

/// `ln P(ω | F = do)` in the network augmented with an action node `F`.
///
/// `F` is a fair coin parent of the acted-on variable. Under `F = idle`
/// the variable keeps its table; under `F = do` it takes the action's
/// value with certainty.
fn log_augmented_action(net: &CausalNetwork, em: &EpsilonModel, a: AtomicAction) -> Vec<f64> {
    let tables = log_tables(net, em);
    let half = 0.5f64.ln();
    let others = log_joint_with(net, em, Some(a.var));
    // (world, F) pairs, F = do in the upper half
    let joint: Vec<f64> = [false, true]
        .iter()
        .flat_map(|&act| {
            let tables = &tables;
            let others = &others;
            World::all(net.num_vars()).map(move |w| {
                let own = if act {
                    if w.get(a.var) == a.value { 0.0 } else { f64::NEG_INFINITY }
                } else {
                    tables[a.var][net.table(a.var).row_index(w)][w.get(a.var) as usize]
                };
                half + own + others[w.index()]
            })
        })
        .collect();
    let done = &joint[joint.len() / 2..];
    let z = log_sum_exp(done.iter().copied());
    done.iter().map(|x| x - z).collect()
}

/// Leading exponents of the numeric atomic-action update.
pub fn action_exponents(net: &CausalNetwork, em: &EpsilonModel, a: AtomicAction) -> Result<Vec<Result<Rank>>> {
    check_size(net)?;
    if a.var >= net.num_vars() {
        return Err(Error::UnknownVariable(a.var));
    }
    let x = log_augmented_action(net, em, a);
    let y = log_augmented_action(net, &em.squared(), a);
    Ok(exponents(&x, &y, em.epsilon))
}

/// Numeric expected-utility outcome: a signed order of magnitude, or a
/// sign that depends on the coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NumericUtility {
    Level(i64),
    Ambiguous,
}

impl Serialize for NumericUtility {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            NumericUtility::Level(v) => s.serialize_i64(*v),
            NumericUtility::Ambiguous => s.serialize_str("ambiguous"),
        }
    }
}

impl std::fmt::Display for NumericUtility {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NumericUtility::Level(v) => write!(f, "{v}"),
            NumericUtility::Ambiguous => f.write_str("ambiguous"),
        }
    }
}

/// Whether a numeric outcome matches a rank verdict.
///
/// The numeric magnitude is the dominant order `max(n⁺, n⁻)`, while the
/// rank verdict reports the difference, so signs and dominant orders are
/// compared.
pub fn agrees(r: &UtilityRankResult, v: NumericUtility) -> bool {
    match r.verdict {
        Verdict::Ambiguous(_) => v == NumericUtility::Ambiguous,
        Verdict::Value(x) => v == NumericUtility::Level(x.signum() * r.n_plus.max(r.n_minus) as i64),
    }
}

/// Signed sum of `s · exp(l)` terms as (sign, ln |sum|).
fn signed_log_sum(terms: &[(f64, f64)]) -> (f64, f64) {
    let m = terms.iter().map(|t| t.1).fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return (0.0, m);
    }
    let s: f64 = terms.iter().map(|(sign, l)| sign * (l - m).exp()).sum();
    (s.signum() * (s != 0.0) as u8 as f64, m + s.abs().ln())
}

/// Real expected utility of `phi` under `P'(ω) ∝ ε^κ'(ω)` with utilities
/// `±C_i / ε^i`, repeated for `draws` random coefficient vectors.
///
/// Each draw favors one sign: coefficients of that sign come from the top
/// of the coefficient range, the others from the bottom. A verdict whose
/// sign is decided by the coefficients therefore flips between draws.
pub fn numeric_utility_verdict<R: Rng>(
    phi: &Prop,
    k_post: &RankingFunction,
    mu: &UtilityRanking,
    epsilon: f64,
    draws: usize,
    rng: &mut R,
) -> Result<NumericUtility> {
    if k_post.num_vars() != mu.num_vars() {
        return Err(Error::VariableMismatch { network: k_post.num_vars(), utility: mu.num_vars() });
    }
    // dominant mass exponent of W_l ∧ φ for every level l
    let masses = |eps: f64| -> Vec<(i64, f64)> {
        let ln_eps = eps.ln();
        let lp: Vec<f64> = k_post.iter().map(|(_, r)| ln_term(1.0, r, ln_eps)).collect();
        let z = log_sum_exp(lp.iter().copied());
        mu.levels()
            .into_iter()
            .map(|l| {
                let m = log_sum_exp(
                    k_post.iter().filter(|(w, _)| mu.level(*w) == l && phi.eval(*w)).map(|(w, _)| lp[w.index()]),
                );
                (l, m - z)
            })
            .collect()
    };
    let (a, b) = (masses(epsilon), masses(epsilon * epsilon));
    let mut levels = Vec::new();
    for ((l, x), (_, y)) in a.into_iter().zip(b) {
        if let Rank::Finite(e) = two_scale_exponent(x, y, epsilon)? {
            levels.push((l, e as f64 - l.unsigned_abs() as f64));
        }
    }

    let (lo, hi) = COEFFICIENT_RANGE;
    let mut outcome = None;
    for _ in 0..draws {
        let favored = if rng.gen_bool(0.5) { 1 } else { -1 };
        let coefs: Vec<f64> = levels
            .iter()
            .map(|&(l, _)| {
                if l == 0 {
                    rng.gen_range(lo..=hi)
                } else if l.signum() == favored {
                    rng.gen_range(1.6..=hi)
                } else {
                    rng.gen_range(lo..=0.53)
                }
            })
            .collect();
        let utility = |eps: f64| {
            let terms: Vec<(f64, f64)> = levels
                .iter()
                .zip(&coefs)
                .map(|(&(l, power), c)| (if l < 0 { -1.0 } else { 1.0 }, c.ln() + power * eps.ln()))
                .collect();
            signed_log_sum(&terms)
        };
        let (s1, l1) = utility(epsilon);
        let (s2, l2) = utility(epsilon * epsilon);
        let draw = if s1 != s2 {
            None
        } else if s1 == 0.0 {
            Some(0)
        } else {
            let x = (l2 - l1) / epsilon.ln();
            let r = x.round();
            if (x - r).abs() > EXPONENT_BAND {
                None
            } else if r >= 0.0 {
                Some(0)
            } else {
                Some(s1 as i64 * (-r) as i64)
            }
        };
        match (draw, outcome) {
            (None, _) => return Ok(NumericUtility::Ambiguous),
            (Some(v), None) => outcome = Some(v),
            (Some(v), Some(prev)) if v != prev => return Ok(NumericUtility::Ambiguous),
            _ => {}
        }
    }
    Ok(NumericUtility::Level(outcome.unwrap_or(0)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Mismatch {
    pub case: String,
    pub expected: String,
    pub numeric: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckSummary {
    pub check: &'static str,
    pub compared: usize,
    pub mismatches: Vec<Mismatch>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AgreementReport {
    pub model: String,
    pub epsilon: f64,
    pub draws: usize,
    pub seed: u64,
    pub checks: Vec<CheckSummary>,
    pub agree: bool,
}

fn show(r: &Result<Rank>) -> String {
    match r {
        Ok(r) => r.to_string(),
        Err(e) => e.to_string(),
    }
}

fn compare_worlds(
    summary: &mut CheckSummary,
    case: &str,
    names: &[String],
    expected: &RankingFunction,
    numeric: &[Result<Rank>],
) {
    for (w, r) in expected.iter() {
        summary.compared += 1;
        if numeric[w.index()].as_ref() != Ok(&r) {
            summary.mismatches.push(Mismatch {
                case: format!("{case} at {}", w.describe(names)),
                expected: r.to_string(),
                numeric: show(&numeric[w.index()]),
            });
        }
    }
}

/// Runs every numeric agreement check on a model.
///
/// Table coefficients and utility draws come from `rng`.
pub fn agreement_report<R: Rng>(
    doc: &ModelDocument,
    epsilon: f64,
    draws: usize,
    seed: u64,
    rng: &mut R,
) -> Result<AgreementReport> {
    let net = &doc.network;
    check_size(net)?;
    let em = EpsilonModel::new(epsilon)?.with_random_coefficients(net, rng);
    let names = net.names();
    let n = net.num_vars();
    let prior = stratified_joint(net);
    let literals: Vec<(usize, bool)> = (0..n).flat_map(|i| [(i, true), (i, false)]).collect();
    let lit_name = |(i, v): (usize, bool)| format!("{}{}", if v { "" } else { "!" }, names[i]);

    let mut joint = CheckSummary { check: "joint", compared: 0, mismatches: Vec::new() };
    compare_worlds(&mut joint, "prior", &names, &prior, &joint_exponents(net, &em)?);

    let mut cond = CheckSummary { check: "conditional", compared: 0, mismatches: Vec::new() };
    for &(i, v) in &literals {
        let c = Prop::lit(i, v);
        if let Ok(k) = prior.condition(&c) {
            compare_worlds(&mut cond, &format!("given {}", lit_name((i, v))), &names, &k, &conditional_exponents(net, &em, &c)?);
        }
    }

    let mut act = CheckSummary { check: "action", compared: 0, mismatches: Vec::new() };
    for &(i, v) in &literals {
        let a = AtomicAction::new(i, v);
        let k = atomic_action_update(net, a)?;
        compare_worlds(&mut act, &format!("do {}", lit_name((i, v))), &names, &k, &action_exponents(net, &em, a)?);
    }

    let mut util = CheckSummary { check: "utility", compared: 0, mismatches: Vec::new() };
    let mut cases: Vec<(String, Prop, RankingFunction)> = vec![("prior".into(), Prop::True, prior.clone())];
    for &(i, v) in &literals {
        let c = Prop::lit(i, v);
        if let Ok(k) = prior.condition(&c) {
            cases.push((format!("given {}", lit_name((i, v))), Prop::True, k));
        }
        let post = post_action_ranking(net, &prior, &ActionConjunct::single(i, v))?;
        cases.push((format!("after do {}", lit_name((i, v))), c, post));
    }
    for (case, phi, k) in cases {
        let expected = expected_utility_rank(&phi, &k, &doc.utility)?;
        let numeric = numeric_utility_verdict(&phi, &k, &doc.utility, epsilon, draws, rng)?;
        util.compared += 1;
        if !agrees(&expected, numeric) {
            util.mismatches.push(Mismatch {
                case,
                expected: format!("{} (n+={}, n-={})", expected.verdict, expected.n_plus, expected.n_minus),
                numeric: numeric.to_string(),
            });
        }
    }

    let checks = vec![joint, cond, act, util];
    let agree = checks.iter().all(|c| c.mismatches.is_empty());
    Ok(AgreementReport { model: doc.name.clone(), epsilon, draws, seed, checks, agree })
}
