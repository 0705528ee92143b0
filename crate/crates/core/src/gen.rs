//! Random models, formulas and actions for searches and property tests.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::action::{ActionConjunct, ActionDnf};
use crate::decision::UtilityRanking;
use crate::dsl::ModelDocument;
use crate::logic::{Prop, World};
use crate::network::{CausalNetwork, NetworkBuilder, RankTable, Row, Variable};
use crate::rank::Rank;

#[derive(Clone, Debug, PartialEq)]
pub struct GenConfig {
    pub min_vars: usize,
    pub max_vars: usize,
    pub edge_prob: f64,
    pub max_parents: usize,
    /// Candidate non-zero entry of each row; the other entry is 0.
    pub ranks: Vec<Rank>,
    pub max_persistence: u64,
    /// Utility levels are drawn from `-max_level..=max_level`.
    pub max_level: i64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            min_vars: 1,
            max_vars: 6,
            edge_prob: 0.4,
            max_parents: 3,
            ranks: vec![Rank::Finite(0), Rank::Finite(1), Rank::Finite(2), Rank::Infinite],
            max_persistence: 3,
            max_level: 2,
        }
    }
}

pub fn random_network<R: Rng>(cfg: &GenConfig, rng: &mut R) -> CausalNetwork {
    let n = rng.gen_range(cfg.min_vars..=cfg.max_vars);
    let mut b = NetworkBuilder::new();
    for i in 0..n {
        let s = rng.gen_range(1..=cfg.max_persistence.max(1));
        b.variable(Variable::with_persistence(format!("x{i}"), s));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut parents = vec![Vec::new(); n];
    for (k, &child) in order.iter().enumerate() {
        for &p in &order[..k] {
            if parents[child].len() < cfg.max_parents && rng.gen_bool(cfg.edge_prob) {
                parents[child].push(p);
                b.edge(p, child);
            }
        }
    }
    for (i, ps) in parents.into_iter().enumerate() {
        let rows = (0..1usize << ps.len())
            .map(|_| {
                let r = *cfg.ranks.choose(rng).unwrap_or(&Rank::Finite(0));
                if rng.gen_bool(0.5) {
                    Row::new(Rank::Finite(0), r)
                } else {
                    Row::new(r, Rank::Finite(0))
                }
            })
            .collect();
        b.table(i, RankTable::new(ps, rows));
    }
    b.build().expect("generated networks are valid")
}

pub fn random_utility<R: Rng>(n: usize, max_level: i64, rng: &mut R) -> UtilityRanking {
    let mu = World::all(n).map(|_| rng.gen_range(-max_level..=max_level)).collect();
    UtilityRanking::from_values(n, mu).expect("sized to n")
}

pub fn random_formula<R: Rng>(n: usize, depth: u32, rng: &mut R) -> Prop {
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..20) {
            0 => Prop::True,
            1 => Prop::False,
            _ => Prop::lit(rng.gen_range(0..n), rng.gen_bool(0.5)),
        };
    }
    match rng.gen_range(0..3) {
        0 => !random_formula(n, depth - 1, rng),
        1 => random_formula(n, depth - 1, rng) & random_formula(n, depth - 1, rng),
        _ => random_formula(n, depth - 1, rng) | random_formula(n, depth - 1, rng),
    }
}

/// A consistent conjunction of between one and `max_lits` literals.
pub fn random_conjunct<R: Rng>(n: usize, max_lits: usize, rng: &mut R) -> ActionConjunct {
    let mut vars: Vec<usize> = (0..n).collect();
    vars.shuffle(rng);
    let k = rng.gen_range(1..=max_lits.clamp(1, n));
    ActionConjunct::new(vars[..k].iter().map(|&v| (v, rng.gen_bool(0.5)))).expect("distinct variables")
}

pub fn random_dnf<R: Rng>(n: usize, max_disjuncts: usize, max_lits: usize, rng: &mut R) -> ActionDnf {
    let k = rng.gen_range(1..=max_disjuncts.max(1));
    ActionDnf::new((0..k).map(|_| random_conjunct(n, max_lits, rng)).collect()).expect("non-empty")
}

/// A full model document with a few utility clauses.
pub fn random_document<R: Rng>(cfg: &GenConfig, name: &str, rng: &mut R) -> ModelDocument {
    let net = random_network(cfg, rng);
    let n = net.num_vars();
    let clauses = (0..rng.gen_range(0..=3))
        .map(|_| (rng.gen_range(-cfg.max_level..=cfg.max_level), random_formula(n, 3, rng)))
        .collect();
    ModelDocument::new(name, net, clauses).expect("clauses range over the network")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_networks_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let cfg = GenConfig::default();
        for _ in 0..200 {
            let net = random_network(&cfg, &mut rng);
            assert!(net.validate().is_empty());
            assert!(net.num_vars() <= cfg.max_vars);
        }
    }

    #[test]
    fn same_seed_same_model() {
        let cfg = GenConfig::default();
        let a = random_document(&cfg, "m", &mut ChaCha8Rng::seed_from_u64(4));
        let b = random_document(&cfg, "m", &mut ChaCha8Rng::seed_from_u64(4));
        assert_eq!(a, b);
    }
}
