//! Post-action belief update under persistence.
//!
//! The post-action ranking for a conjunctive action `A` applied to a
//! belief `κ(·|C)` is
//!
//! ```text
//! κ_A(ω|C) = Σ_{i ∉ J∪R} κ(X_i(ω) | pa_i(ω))
//!          + min_ω' [ Σ_{i ∉ J} S_i(ω, ω') + κ(ω'|C) ]      for ω ⊨ A
//!          = ∞                                               otherwise
//! ```
//!
//! where `J` are the acted-on variables, `R` the roots and `S_i` the
//! spontaneity penalty. This is the residual form: the roots' and the
//! action variables' causal terms are never added, so `∞ - ∞` cannot occur.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::logic::{world_count, Prop, World};
use crate::network::CausalNetwork;
use crate::rank::{Rank, INF, ZERO};
use crate::ranking::RankingFunction;

/// Largest model for which the explicit two-layer joint is built.
pub const DOUBLED_MAX_VARS: usize = 10;

/// A consistent, non-empty conjunction of literals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionConjunct {
    literals: BTreeMap<usize, bool>,
}

impl ActionConjunct {
    pub fn new<I: IntoIterator<Item = (usize, bool)>>(literals: I) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (var, value) in literals {
            if let Some(prev) = map.insert(var, value) {
                if prev != value {
                    return Err(Error::InconsistentAction(var));
                }
            }
        }
        if map.is_empty() {
            return Err(Error::EmptyAction);
        }
        Ok(ActionConjunct { literals: map })
    }

    pub fn single(var: usize, value: bool) -> Self {
        ActionConjunct { literals: BTreeMap::from([(var, value)]) }
    }

    pub fn literals(&self) -> &BTreeMap<usize, bool> {
        &self.literals
    }

    pub fn contains(&self, var: usize) -> bool {
        self.literals.contains_key(&var)
    }

    pub fn holds(&self, w: World) -> bool {
        self.literals.iter().all(|(&v, &b)| w.get(v) == b)
    }

    pub fn to_prop(&self) -> Prop {
        Prop::all(self.literals.iter().map(|(&v, &b)| Prop::lit(v, b)))
    }

    fn check(&self, n: usize) -> Result<()> {
        match self.literals.keys().next_back() {
            Some(&v) if v >= n => Err(Error::UnknownVariable(v)),
            _ => Ok(()),
        }
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        DisplayWith(move |f: &mut fmt::Formatter<'_>| {
            f.write_str("(")?;
            for (k, (&v, &b)) in self.literals.iter().enumerate() {
                if k > 0 {
                    f.write_str(" & ")?;
                }
                if !b {
                    f.write_str("!")?;
                }
                f.write_str(&names[v])?;
            }
            f.write_str(")")
        })
    }
}

/// `do(A¹) ∨ do(A²) ∨ …`
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ActionDnf {
    disjuncts: Vec<ActionConjunct>,
}

impl ActionDnf {
    pub fn new(disjuncts: Vec<ActionConjunct>) -> Result<Self> {
        if disjuncts.is_empty() {
            return Err(Error::EmptyAction);
        }
        Ok(ActionDnf { disjuncts })
    }

    pub fn disjuncts(&self) -> &[ActionConjunct] {
        &self.disjuncts
    }

    pub fn holds(&self, w: World) -> bool {
        self.disjuncts.iter().any(|d| d.holds(w))
    }

    pub fn to_prop(&self) -> Prop {
        Prop::any(self.disjuncts.iter().map(ActionConjunct::to_prop))
    }

    /// The action `¬A` in disjunctive form, with inconsistent and subsumed
    /// conjuncts dropped. `None` when `¬A` is unsatisfiable.
    pub fn negation(&self) -> Option<ActionDnf> {
        let mut partial: Vec<BTreeMap<usize, bool>> = vec![BTreeMap::new()];
        for d in &self.disjuncts {
            let mut next = Vec::new();
            for p in &partial {
                for (&v, &b) in d.literals() {
                    match p.get(&v) {
                        Some(&prev) if prev == b => continue,
                        Some(_) => next.push(p.clone()),
                        None => {
                            let mut q = p.clone();
                            q.insert(v, !b);
                            next.push(q);
                        }
                    }
                }
            }
            next.sort();
            next.dedup();
            partial = next;
        }
        // drop conjuncts that strictly contain another one
        let minimal: Vec<_> = partial
            .iter()
            .filter(|q| {
                !partial
                    .iter()
                    .any(|p| p.len() < q.len() && p.iter().all(|(k, v)| q.get(k) == Some(v)))
            })
            .cloned()
            .collect();
        if minimal.is_empty() {
            return None;
        }
        let disjuncts = minimal.into_iter().map(|literals| ActionConjunct { literals }).collect();
        Some(ActionDnf { disjuncts })
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        DisplayWith(move |f: &mut fmt::Formatter<'_>| {
            for (k, d) in self.disjuncts.iter().enumerate() {
                if k > 0 {
                    f.write_str(" | ")?;
                }
                write!(f, "{}", d.display(names))?;
            }
            Ok(())
        })
    }
}

impl From<ActionConjunct> for ActionDnf {
    fn from(c: ActionConjunct) -> Self {
        ActionDnf { disjuncts: vec![c] }
    }
}

struct DisplayWith<F>(F);

impl<F: Fn(&mut fmt::Formatter<'_>) -> fmt::Result> fmt::Display for DisplayWith<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        (self.0)(f)
    }
}

/// `S_i(ω, ω')`: `s_i` when `X_i` changed with no causal support for the
/// new value, 0 otherwise.
pub fn spontaneity(net: &CausalNetwork, i: usize, w: World, prev: World) -> Rank {
    if w.get(i) == prev.get(i) {
        return ZERO;
    }
    if net.is_root(i) || net.counter_rank(i, w).is_zero() {
        Rank::Finite(net.persistence(i))
    } else {
        ZERO
    }
}

/// Result of a post-action update together with, for every reachable
/// world, the pre-action worlds attaining the minimum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PostActionTrace {
    pub ranking: RankingFunction,
    pub argmin: Vec<(World, Vec<World>)>,
}

fn check_inputs(net: &CausalNetwork, belief: &RankingFunction) -> Result<()> {
    if belief.num_vars() != net.num_vars() {
        return Err(Error::VariableMismatch { network: net.num_vars(), utility: belief.num_vars() });
    }
    if belief.support().next().is_none() {
        return Err(Error::DegenerateRanking);
    }
    Ok(())
}

fn raw_post_action(
    net: &CausalNetwork,
    belief: &RankingFunction,
    a: &ActionConjunct,
) -> Result<Vec<(Rank, Vec<World>)>> {
    check_inputs(net, belief)?;
    let n = net.num_vars();
    a.check(n)?;
    let prev: Vec<(World, u64)> = belief.support().collect();
    let free: Vec<usize> = (0..n).filter(|&i| !a.contains(i)).collect();
    let caused: Vec<usize> = free.iter().copied().filter(|&i| !net.is_root(i)).collect();

    let out = (0..world_count(n)? as u32)
        .into_par_iter()
        .map(|bits| {
            let w = World(bits);
            if !a.holds(w) {
                return (INF, Vec::new());
            }
            let causal: Rank = caused.iter().map(|&i| net.local_rank(i, w)).sum();
            if !causal.is_finite() {
                return (INF, Vec::new());
            }
            let mut best = INF;
            let mut argmin = Vec::new();
            for &(p, r) in &prev {
                let cost = free.iter().map(|&i| spontaneity(net, i, w, p)).sum::<Rank>() + Rank::Finite(r);
                if cost < best {
                    best = cost;
                    argmin.clear();
                }
                if cost == best {
                    argmin.push(p);
                }
            }
            (causal + best, argmin)
        })
        .collect();
    Ok(out)
}

/// `κ_A(ω|C)` for a conjunctive action, with `belief` playing `κ(·|C)`.
pub fn post_action_ranking(
    net: &CausalNetwork,
    belief: &RankingFunction,
    a: &ActionConjunct,
) -> Result<RankingFunction> {
    Ok(post_action_trace(net, belief, a)?.ranking)
}

pub fn post_action_trace(
    net: &CausalNetwork,
    belief: &RankingFunction,
    a: &ActionConjunct,
) -> Result<PostActionTrace> {
    let raw = raw_post_action(net, belief, a)?;
    let ranks = raw.iter().map(|(r, _)| *r).collect();
    // the minimum is 0 whenever the belief has a finite world
    let ranking = RankingFunction::new(net.num_vars(), ranks)?;
    let argmin = raw
        .into_iter()
        .enumerate()
        .filter(|(_, (r, _))| r.is_finite())
        .map(|(i, (_, ws))| (World(i as u32), ws))
        .collect();
    Ok(PostActionTrace { ranking, argmin })
}

/// Disjunctive action: pointwise minimum over the disjuncts' updates.
pub fn post_action_ranking_dnf(
    net: &CausalNetwork,
    belief: &RankingFunction,
    a: &ActionDnf,
) -> Result<RankingFunction> {
    Ok(post_action_trace_dnf(net, belief, a)?.ranking)
}

pub fn post_action_trace_dnf(
    net: &CausalNetwork,
    belief: &RankingFunction,
    a: &ActionDnf,
) -> Result<PostActionTrace> {
    let traces = a
        .disjuncts()
        .iter()
        .map(|d| post_action_trace(net, belief, d))
        .collect::<Result<Vec<_>>>()?;
    let mut ranking = traces[0].ranking.clone();
    for t in &traces[1..] {
        ranking = ranking.pointwise_min(&t.ranking);
    }
    let argmin = ranking
        .support()
        .map(|(w, r)| {
            let mut prev: Vec<World> = traces
                .iter()
                .filter(|t| t.ranking.rank(w) == Rank::Finite(r))
                .flat_map(|t| t.argmin.iter().find(|(x, _)| *x == w).map(|(_, p)| p.clone()).unwrap_or_default())
                .collect();
            prev.sort_unstable();
            prev.dedup();
            (w, prev)
        })
        .collect();
    Ok(PostActionTrace { ranking, argmin })
}

/// Builds the explicit two-layer joint `κ(ω, ω')` (pre-action copy `ω'`
/// carrying the belief, post-action copy `ω` wired to it by persistence
/// links) and marginalizes out `ω'`.
///
/// Each non-action variable's conditional given its parents and its own
/// past value is
///
/// ```text
/// root, value changed                              s_i
/// root, value kept                                 0
/// changed, κ(¬X_i(ω)|pa_i(ω)) = 0                  s_i + κ(X_i(ω)|pa_i(ω))
/// otherwise                                        κ(X_i(ω)|pa_i(ω))
/// ```
///
/// Action variables are clamped to the action's value at rank 0.
pub fn doubled_network_ranking(
    net: &CausalNetwork,
    belief: &RankingFunction,
    a: &ActionConjunct,
) -> Result<RankingFunction> {
    check_inputs(net, belief)?;
    let n = net.num_vars();
    if n > DOUBLED_MAX_VARS {
        return Err(Error::TooManyVariables { n, limit: DOUBLED_MAX_VARS });
    }
    a.check(n)?;
    let worlds = 1usize << n;
    let mut joint = vec![INF; worlds * worlds];
    for now in World::all(n) {
        for past in World::all(n) {
            let mut total = belief.rank(past);
            for i in 0..n {
                if !total.is_finite() {
                    break;
                }
                let value = now.get(i);
                let term = if let Some(&target) = a.literals().get(&i) {
                    if value == target { ZERO } else { INF }
                } else {
                    let changed = value != past.get(i);
                    let row = net.table(i).row(now);
                    let s = Rank::Finite(net.persistence(i));
                    if net.parents(i).is_empty() {
                        if changed { s } else { ZERO }
                    } else if changed && row.get(!value).is_zero() {
                        s + row.get(value)
                    } else {
                        row.get(value)
                    }
                };
                total = total + term;
            }
            joint[now.index() * worlds + past.index()] = total;
        }
    }
    let marginal = (0..worlds)
        .map(|w| *joint[w * worlds..(w + 1) * worlds].iter().min().unwrap())
        .collect();
    RankingFunction::normalized(n, marginal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{stratified_joint, NetworkBuilder, RankTable, Row, Variable};

    fn f(v: u64) -> Rank {
        Rank::Finite(v)
    }

    fn switch() -> CausalNetwork {
        let mut b = NetworkBuilder::new();
        let u = b.variable(Variable::new("u"));
        let n = b.variable(Variable::new("n"));
        let l = b.variable(Variable::new("l"));
        b.edge(u, l).edge(n, l);
        b.table(u, RankTable::root(f(0), f(0)));
        b.table(n, RankTable::root(f(0), f(1)));
        let rows = vec![
            Row::new(f(0), INF),
            Row::new(INF, f(0)),
            Row::new(INF, f(0)),
            Row::new(f(0), INF),
        ];
        b.table(l, RankTable::new(vec![u, n], rows));
        b.build().unwrap()
    }

    fn w(u: bool, n: bool, l: bool) -> World {
        World(0).with(0, u).with(1, n).with(2, l)
    }

    #[test]
    fn spontaneity_cases() {
        let net = switch();
        // root n changes from n to !n
        assert_eq!(spontaneity(&net, 1, w(true, false, false), w(true, true, true)), f(1));
        // no change
        assert_eq!(spontaneity(&net, 1, w(true, true, true), w(false, true, false)), ZERO);
        // functional light changes: κ(¬l | u, n) = ∞
        assert_eq!(spontaneity(&net, 2, w(true, true, true), w(false, true, false)), ZERO);
    }

    #[test]
    fn push_switch_up_in_the_dark() {
        let net = switch();
        let belief = stratified_joint(&net).condition(&!Prop::var(2)).unwrap();
        let k = post_action_ranking(&net, &belief, &ActionConjunct::single(0, true)).unwrap();
        let expected: Vec<(World, u64)> = vec![(w(true, false, false), 1), (w(true, true, true), 0)];
        assert_eq!(k.support().collect::<Vec<_>>(), expected);
    }

    #[test]
    fn push_switch_down_once_known_up() {
        let net = switch();
        let belief = stratified_joint(&net)
            .condition(&(!Prop::var(2) & Prop::var(0)))
            .unwrap();
        let k = post_action_ranking(&net, &belief, &ActionConjunct::single(0, false)).unwrap();
        let expected: Vec<(World, u64)> = vec![(w(false, true, false), 1), (w(false, false, true), 0)];
        assert_eq!(k.support().collect::<Vec<_>>(), expected);
    }

    #[test]
    fn doubled_network_matches_on_the_switch() {
        let net = switch();
        let belief = stratified_joint(&net).condition(&!Prop::var(2)).unwrap();
        let a = ActionConjunct::single(0, true);
        assert_eq!(
            doubled_network_ranking(&net, &belief, &a).unwrap(),
            post_action_ranking(&net, &belief, &a).unwrap()
        );
    }

    #[test]
    fn strong_persistence_keeps_the_single_believed_world() {
        let mut b = NetworkBuilder::new();
        let x = b.variable(Variable::with_persistence("x", 10));
        let y = b.variable(Variable::with_persistence("y", 10));
        let z = b.variable(Variable::with_persistence("z", 10));
        b.edge(x, y);
        b.table(x, RankTable::root(f(0), f(0)));
        b.table(y, RankTable::new(vec![x], vec![Row::new(f(0), f(0)); 2]));
        b.table(z, RankTable::root(f(0), f(0)));
        let net = b.build().unwrap();
        let start = World(0b110); // !x y z
        let mut ranks = vec![INF; 8];
        ranks[start.index()] = ZERO;
        let belief = RankingFunction::new(3, ranks).unwrap();
        let a = ActionConjunct::single(z, true);
        let k = doubled_network_ranking(&net, &belief, &a).unwrap();
        assert_eq!(k.rank(start), ZERO);
        assert!(k.iter().filter(|&(w, _)| w != start).all(|(_, r)| r >= f(10)));
    }

    #[test]
    fn disjunction_of_opposites_covers_every_world() {
        let net = switch();
        let belief = stratified_joint(&net);
        let a = ActionDnf::new(vec![ActionConjunct::single(1, true), ActionConjunct::single(1, false)]).unwrap();
        let k = post_action_ranking_dnf(&net, &belief, &a).unwrap();
        // every world satisfies n or !n, so only causal exclusions remain
        for (world, r) in k.iter() {
            let lawful = net.local_rank(2, world).is_finite();
            assert_eq!(r.is_finite(), lawful);
        }
    }

    #[test]
    fn single_disjunct_dnf_matches_conjunct() {
        let net = switch();
        let belief = stratified_joint(&net).condition(&!Prop::var(2)).unwrap();
        let c = ActionConjunct::single(0, true);
        assert_eq!(
            post_action_ranking_dnf(&net, &belief, &c.clone().into()).unwrap(),
            post_action_ranking(&net, &belief, &c).unwrap()
        );
    }

    #[test]
    fn action_constructors() {
        assert_eq!(ActionConjunct::new([(0, true), (0, false)]), Err(Error::InconsistentAction(0)));
        assert_eq!(ActionConjunct::new([]), Err(Error::EmptyAction));
        assert_eq!(ActionDnf::new(vec![]), Err(Error::EmptyAction));
    }

    #[test]
    fn negation_of_dnf() {
        let a = ActionDnf::new(vec![
            ActionConjunct::new([(0, true), (1, true)]).unwrap(),
            ActionConjunct::single(2, false),
        ])
        .unwrap();
        let neg = a.negation().unwrap();
        let np = neg.to_prop();
        let ap = a.to_prop();
        assert!(np.equivalent(&!ap, 3));
        assert_eq!(neg.disjuncts().len(), 2);

        let taut = ActionDnf::new(vec![ActionConjunct::single(0, true), ActionConjunct::single(0, false)]).unwrap();
        assert!(taut.negation().is_none());
    }

    #[test]
    fn trace_reports_argmin_worlds() {
        let net = switch();
        let belief = stratified_joint(&net).condition(&!Prop::var(2)).unwrap();
        let t = post_action_trace(&net, &belief, &ActionConjunct::single(0, true)).unwrap();
        let (_, prev) = t.argmin.iter().find(|(x, _)| *x == w(true, true, true)).unwrap();
        assert_eq!(prev, &vec![w(false, true, false)]);
        // ω2 = u !n !l is reached at rank 1 from either believed world
        let (_, prev) = t.argmin.iter().find(|(x, _)| *x == w(true, false, false)).unwrap();
        assert_eq!(prev.len(), 2);
    }
}
