//! Belief rankings and Spohn's calculus over them.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::logic::{world_count, Prop, World};
use crate::rank::{Rank, INF, ZERO};

/// A normalized map from worlds to ranks: some world has rank 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RankingFunction {
    n: usize,
    ranks: Vec<Rank>,
}

/// One row of a ranking table, as emitted in traces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WorldRank {
    pub world: String,
    pub rank: Rank,
}

impl RankingFunction {
    /// Wraps an already-normalized table.
    pub fn new(n: usize, ranks: Vec<Rank>) -> Result<Self> {
        let expected = world_count(n)?;
        if ranks.len() != expected {
            return Err(Error::WrongTableSize { got: ranks.len(), expected });
        }
        match ranks.iter().min() {
            Some(&ZERO) => Ok(RankingFunction { n, ranks }),
            Some(&INF) | None => Err(Error::DegenerateRanking),
            Some(other) => Err(Error::NotNormalized(other.to_string())),
        }
    }

    /// Shifts the table so that its minimum becomes 0.
    pub fn normalized(n: usize, mut ranks: Vec<Rank>) -> Result<Self> {
        let expected = world_count(n)?;
        if ranks.len() != expected {
            return Err(Error::WrongTableSize { got: ranks.len(), expected });
        }
        let min = *ranks.iter().min().ok_or(Error::DegenerateRanking)?;
        if min == INF {
            return Err(Error::DegenerateRanking);
        }
        for r in &mut ranks {
            *r = r.checked_sub(min)?;
        }
        Ok(RankingFunction { n, ranks })
    }

    /// Every world a serious possibility.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(n, vec![ZERO; world_count(n)?])
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn rank(&self, w: World) -> Rank {
        self.ranks[w.index()]
    }

    pub fn ranks(&self) -> &[Rank] {
        &self.ranks
    }

    pub fn iter(&self) -> impl Iterator<Item = (World, Rank)> + '_ {
        self.ranks.iter().enumerate().map(|(i, &r)| (World(i as u32), r))
    }

    /// Worlds of finite rank, in canonical order.
    pub fn support(&self) -> impl Iterator<Item = (World, u64)> + '_ {
        self.iter().filter_map(|(w, r)| r.finite().map(|v| (w, v)))
    }

    /// `κ(φ)`: the least rank among models of `p`, `∞` if there are none.
    pub fn rank_of(&self, p: &Prop) -> Rank {
        self.rank_where(|w| p.eval(w))
    }

    /// `κ` of an arbitrary world predicate.
    pub fn rank_where(&self, mut pred: impl FnMut(World) -> bool) -> Rank {
        self.iter()
            .filter(|&(w, _)| pred(w))
            .map(|(_, r)| r)
            .min()
            .unwrap_or(INF)
    }

    /// `κ(p | q) = κ(p ∧ q) - κ(q)`.
    pub fn cond_rank(&self, p: &Prop, q: &Prop) -> Result<Rank> {
        let given = self.rank_of(q);
        if !given.is_finite() {
            return Err(Error::ImpossibleCondition);
        }
        self.rank_where(|w| p.eval(w) && q.eval(w)).checked_sub(given)
    }

    /// Revision by an observation: `κ(ω | q)`.
    pub fn condition(&self, q: &Prop) -> Result<RankingFunction> {
        let given = self.rank_of(q);
        if !given.is_finite() {
            return Err(Error::ImpossibleCondition);
        }
        let ranks = self
            .iter()
            .map(|(w, r)| if q.eval(w) { r.checked_sub(given) } else { Ok(INF) })
            .collect::<Result<Vec<_>>>()?;
        Ok(RankingFunction { n: self.n, ranks })
    }

    /// Pointwise minimum. Both operands are normalized, so the result is too.
    pub fn pointwise_min(&self, other: &RankingFunction) -> RankingFunction {
        assert_eq!(self.n, other.n, "rankings over different variable sets");
        let ranks = self.ranks.iter().zip(&other.ranks).map(|(a, b)| *a.min(b)).collect();
        RankingFunction { n: self.n, ranks }
    }

    pub fn table(&self) -> Vec<WorldRank> {
        self.iter()
            .map(|(w, rank)| WorldRank { world: w.bitstring(self.n), rank })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(v: u64) -> Rank {
        Rank::Finite(v)
    }

    /// Umbrella example: variables c, r, u; worlds with r and !c have rank 1.
    fn umbrella() -> RankingFunction {
        let ranks = World::all(3)
            .map(|w| if w.get(1) && !w.get(0) { f(1) } else { f(0) })
            .collect();
        RankingFunction::new(3, ranks).unwrap()
    }

    #[test]
    fn rank_of_rain_on_a_clear_day() {
        let k = umbrella();
        assert_eq!(k.rank_of(&(Prop::var(1) & !Prop::var(0))), f(1));
        assert_eq!(k.rank_of(&Prop::True), f(0));
        assert_eq!(k.rank_of(&Prop::False), INF);
    }

    #[test]
    fn cond_rank_is_infinite_for_excluded_worlds() {
        let k = umbrella();
        let (c, r, u) = (Prop::var(0), Prop::var(1), Prop::var(2));
        let given = u.clone() & c;
        assert_eq!(k.cond_rank(&(r & !u), &given), Ok(INF));
        assert_eq!(k.cond_rank(&Prop::var(1), &Prop::True), Ok(k.rank_of(&Prop::var(1))));
    }

    #[test]
    fn conditioning_on_impossible_is_an_error() {
        let k = umbrella().condition(&Prop::var(0)).unwrap();
        assert_eq!(k.condition(&!Prop::var(0)), Err(Error::ImpossibleCondition));
        assert_eq!(k.cond_rank(&Prop::True, &!Prop::var(0)), Err(Error::ImpossibleCondition));
    }

    #[test]
    fn condition_on_true_is_identity() {
        let k = umbrella();
        assert_eq!(k.condition(&Prop::True).unwrap(), k);
    }

    #[test]
    fn constructors_reject_bad_tables() {
        assert_eq!(RankingFunction::new(1, vec![f(1), f(2)]), Err(Error::NotNormalized("1".into())));
        assert_eq!(RankingFunction::new(1, vec![INF, INF]), Err(Error::DegenerateRanking));
        assert!(matches!(RankingFunction::new(2, vec![f(0)]), Err(Error::WrongTableSize { .. })));
        let k = RankingFunction::normalized(1, vec![f(3), INF]).unwrap();
        assert_eq!(k.ranks(), &[f(0), INF]);
    }
}
