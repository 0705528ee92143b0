//! Brute-force reference computations shared by the test targets.
#![allow(dead_code)]

use qdt::action::ActionConjunct;
use qdt::decision::UtilityRanking;
use qdt::logic::{Prop, World};
use qdt::network::CausalNetwork;
use qdt::rank::Rank;
use qdt::ranking::RankingFunction;

pub fn add(a: Rank, b: Rank) -> Rank {
    match (a, b) {
        (Rank::Finite(x), Rank::Finite(y)) => Rank::Finite(x + y),
        _ => Rank::Infinite,
    }
}

pub fn worlds(n: usize) -> impl Iterator<Item = World> {
    (0..1u32 << n).map(World)
}

/// `κ(X_i = w_i | pa_i(w))` read straight off the table.
pub fn local(net: &CausalNetwork, i: usize, w: World) -> Rank {
    let t = net.table(i);
    let idx: usize = t.parents().iter().enumerate().map(|(j, &p)| (w.get(p) as usize) << j).sum();
    t.rows()[idx].get(w.get(i))
}

pub fn shift_to_zero(ranks: Vec<Rank>) -> Vec<Rank> {
    let m = ranks.iter().copied().min().unwrap();
    match m {
        Rank::Finite(m) => ranks
            .into_iter()
            .map(|r| match r {
                Rank::Finite(x) => Rank::Finite(x - m),
                Rank::Infinite => Rank::Infinite,
            })
            .collect(),
        Rank::Infinite => ranks,
    }
}

/// Sum of local ranks for every world.
pub fn joint(net: &CausalNetwork) -> Vec<Rank> {
    let n = net.num_vars();
    worlds(n).map(|w| (0..n).fold(Rank::Finite(0), |acc, i| add(acc, local(net, i, w)))).collect()
}

pub fn rank_of(ranks: &[Rank], p: &Prop) -> Rank {
    ranks.iter().enumerate().filter(|(i, _)| p.eval(World(*i as u32))).map(|(_, r)| *r).min().unwrap_or(Rank::Infinite)
}

pub fn conditioned(ranks: &[Rank], c: &Prop) -> Vec<Rank> {
    let base = rank_of(ranks, c);
    ranks
        .iter()
        .enumerate()
        .map(|(i, &r)| match (c.eval(World(i as u32)), r, base) {
            (true, Rank::Finite(x), Rank::Finite(b)) => Rank::Finite(x - b),
            _ => Rank::Infinite,
        })
        .collect()
}

/// Augmented network with an action node `F` over `X_var`, conditioned
/// on `F = do`. `F` is a root with ranks (0, 0); under `F = do` the
/// variable is forced to `value`.
pub fn augmented_action(net: &CausalNetwork, var: usize, value: bool) -> Vec<Rank> {
    let n = net.num_vars();
    let f = n;
    let mut ranks = Vec::new();
    for big in 0..1u32 << (n + 1) {
        let w = World(big & ((1 << n) - 1));
        let act = big >> f & 1 == 1;
        let mut r = Rank::Finite(0);
        for i in 0..n {
            let term = if i == var && act {
                if w.get(i) == value { Rank::Finite(0) } else { Rank::Infinite }
            } else {
                local(net, i, w)
            };
            r = add(r, term);
        }
        ranks.push(r);
    }
    // condition on F = do and drop F
    let done: Vec<Rank> = ranks[1 << n..].to_vec();
    shift_to_zero(done)
}

/// Two-layer network: a copy of the belief for the pre-action layer, a
/// persistence-augmented copy of the tables for the post-action layer.
pub fn doubled(net: &CausalNetwork, belief: &RankingFunction, a: &ActionConjunct) -> Vec<Rank> {
    let n = net.num_vars();
    let mut out = vec![Rank::Infinite; 1 << n];
    for post in worlds(n) {
        let mut best = Rank::Infinite;
        for pre in worlds(n) {
            let mut r = belief.rank(pre);
            for i in 0..n {
                let changed = pre.get(i) != post.get(i);
                let s = Rank::Finite(net.variables()[i].persistence);
                let term = if let Some(&v) = a.literals().get(&i) {
                    if post.get(i) == v { Rank::Finite(0) } else { Rank::Infinite }
                } else if net.parents(i).is_empty() {
                    if changed { s } else { Rank::Finite(0) }
                } else {
                    let row_new = local(net, i, post);
                    let old_value_rank = local(net, i, post.with(i, pre.get(i)));
                    if changed && old_value_rank == Rank::Finite(0) { add(row_new, s) } else { row_new }
                };
                r = add(r, term);
            }
            best = best.min(r);
        }
        out[post.index()] = best;
    }
    shift_to_zero(out)
}

/// `(n⁺, n⁻)` by direct enumeration.
pub fn utility_counts(phi: &Prop, k: &RankingFunction, mu: &UtilityRanking) -> (u64, u64) {
    let (mut plus, mut minus) = (0i64, 0i64);
    for (w, r) in k.iter() {
        let (Rank::Finite(r), true) = (r, phi.eval(w)) else { continue };
        let l = mu.level(w);
        let gain = l.abs() - r as i64;
        if l > 0 {
            plus = plus.max(gain);
        } else if l < 0 {
            minus = minus.max(gain);
        }
    }
    (plus as u64, minus as u64)
}

/// Three-level reading: −1 if a serious world is bad, else +1 if a
/// serious world is good, else 0.
pub fn three_level(phi: &Prop, k: &RankingFunction, mu: &UtilityRanking) -> i64 {
    let base = k.rank_of(phi);
    let serious = |level: i64| k.iter().any(|(w, r)| phi.eval(w) && mu.level(w) == level && r == base);
    if serious(-1) {
        -1
    } else if serious(1) {
        1
    } else {
        0
    }
}
