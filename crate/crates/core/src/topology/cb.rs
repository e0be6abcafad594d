use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

use super::{isolated_in, names_of, ClosureSpace, PointSet};
use crate::error::Result;

/// A Cantor-Bendixson rank. `Infinite` is its own variant and sorts above
/// every finite rank.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CbRank {
    Finite(usize),
    Infinite,
}

impl Serialize for CbRank {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            CbRank::Finite(n) => s.serialize_u64(*n as u64),
            CbRank::Infinite => s.serialize_str("infinite"),
        }
    }
}

impl std::fmt::Display for CbRank {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CbRank::Finite(n) => write!(f, "{n}"),
            CbRank::Infinite => f.write_str("infinite"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CbReport {
    pub ranks: BTreeMap<String, CbRank>,
    pub space_rank: CbRank,
    /// T⁽⁰⁾ ⊋ T⁽¹⁾ ⊋ ..., ending with the empty set or a stationary remainder.
    pub derivative_chain: Vec<Vec<String>>,
}

impl CbReport {
    pub fn rank_of(&self, name: &str) -> Option<CbRank> {
        self.ranks.get(name).copied()
    }
}

/// Strips isolated points stage by stage, using the induced closure on what
/// is left. A nonempty remainder with no isolated point gets `Infinite`.
pub fn cb_rank<S: ClosureSpace + ?Sized>(space: &S) -> Result<CbReport> {
    let names = space.names();
    let mut current: PointSet = space.all_points();
    let mut ranks = BTreeMap::new();
    let mut chain = vec![names_of(&names, &current)];
    let mut stage = 0;
    let mut space_rank = CbRank::Finite(0);
    while !current.is_empty() {
        let iso = if stage == 0 { space.isolated_points()? } else { isolated_in(space, &current)? };
        if iso.is_empty() {
            for &x in &current {
                ranks.insert(names[x].clone(), CbRank::Infinite);
            }
            space_rank = CbRank::Infinite;
            break;
        }
        for &x in &iso {
            ranks.insert(names[x].clone(), CbRank::Finite(stage));
            current.remove(&x);
        }
        space_rank = CbRank::Finite(stage);
        chain.push(names_of(&names, &current));
        stage += 1;
    }
    Ok(CbReport { ranks, space_rank, derivative_chain: chain })
}

#[cfg(test)]
mod tests {
    use super::super::table::tests::dvr;
    use super::super::tests::an_space;
    use super::super::TableSpace;
    use super::*;

    #[test]
    fn dvr_has_rank_one() {
        let r = cb_rank(&dvr()).unwrap();
        assert_eq!(r.space_rank, CbRank::Finite(1));
        assert_eq!(r.rank_of("eta"), Some(CbRank::Finite(0)));
        assert_eq!(r.rank_of("m"), Some(CbRank::Finite(1)));
        assert_eq!(r.derivative_chain, vec![vec!["eta".to_string(), "m".into()], vec!["m".into()], vec![]]);
    }

    #[test]
    fn discrete_spaces_have_rank_zero() {
        let t = TableSpace::discrete(vec!["a".into(), "b".into(), "c".into()]).unwrap();
        assert_eq!(cb_rank(&t).unwrap().space_rank, CbRank::Finite(0));
        for n in 1..=3 {
            assert_eq!(cb_rank(&an_space(n)).unwrap().space_rank, CbRank::Finite(0));
        }
    }

    #[test]
    fn indiscrete_pair_is_infinite() {
        let t = TableSpace::from_singletons(vec!["x".into(), "y".into()], vec![[0, 1].into(), [0, 1].into()]).unwrap();
        let r = cb_rank(&t).unwrap();
        assert_eq!(r.space_rank, CbRank::Infinite);
        assert_eq!(r.rank_of("x"), Some(CbRank::Infinite));
        assert_eq!(serde_json::to_string(&r.space_rank).unwrap(), "\"infinite\"");
    }

    #[test]
    fn one_limit_point_raises_rank_to_one() {
        // a, b discrete; c closed but in the closure of {a, b}.
        let names: Vec<String> = vec!["a".into(), "b".into(), "c".into()];
        let table = (0u32..8)
            .map(|m| {
                let mut s: PointSet = (0..3).filter(|i| m >> i & 1 == 1).collect();
                if s.contains(&0) && s.contains(&1) {
                    s.insert(2);
                }
                s
            })
            .collect();
        let t = TableSpace::from_table(names, table).unwrap();
        let r = cb_rank(&t).unwrap();
        assert_eq!(r.space_rank, CbRank::Finite(1));
        assert_eq!(r.rank_of("c"), Some(CbRank::Finite(1)));
    }

    #[test]
    fn empty_space_has_rank_zero() {
        let t = TableSpace::discrete(vec![]).unwrap();
        let r = cb_rank(&t).unwrap();
        assert_eq!(r.space_rank, CbRank::Finite(0));
        assert!(r.ranks.is_empty());
    }
}
