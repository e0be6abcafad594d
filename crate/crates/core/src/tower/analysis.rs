use std::collections::{BTreeMap, BTreeSet};
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::Serialize;

use super::TruncationTower;
use crate::catdatum::{is_split_epi, validate_datum, AddMorphism, AddObject, CategoryDatum, PointId};
use crate::error::{Error, Result};
use crate::functors::{exclusion_witness, right_almost_split};
use crate::topology::{cb_rank, CbRank, CbReport, PointSet, TableSpace};

/// Upper limit on candidate source sets tried by the fallback search.
const SEARCH_BUDGET: usize = 200_000;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TowerReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl TowerReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Id of `id` (a level `from` point) at level `to`, following embeddings.
fn carry(t: &TruncationTower, id: &str, from: usize, to: usize) -> Option<String> {
    let mut cur = id.to_string();
    for k in from..to {
        cur = t.embedding(k).get(&cur)?.clone();
    }
    Some(cur)
}

fn index_at(t: &TruncationTower, id: &str, level: usize) -> Option<PointId> {
    t.level(level).point_index(id).ok()
}

/// Levels are valid, embeddings are injective and total, and between points
/// past their declared stabilization level the hom spaces, identities,
/// radicals and structure constants agree exactly from one level to the next.
pub fn verify_tower(t: &TruncationTower) -> Result<TowerReport> {
    let reports: Vec<_> = (1..=t.height()).into_par_iter().map(|k| (k, validate_datum(t.level(k)))).collect();
    for (k, r) in reports {
        if let Some(v) = r.violations.first() {
            return Err(Error::Inconsistent(format!("level {k} is not a valid datum: {v}")));
        }
    }
    let mut report = TowerReport::default();
    for k in 1..t.height() {
        let (a, b) = (t.level(k), t.level(k + 1));
        let emb = t.embedding(k);
        let mut images = BTreeSet::new();
        for p in a.points() {
            report.checked += 1;
            match emb.get(&p.id) {
                None => report.failures.push(format!("level {}: `{}` has no image in level {}", k, p.id, k + 1)),
                Some(q) if b.point_index(q).is_err() => {
                    report.failures.push(format!("level {}: `{}` maps to `{q}`, absent from level {}", k, p.id, k + 1))
                }
                Some(q) if !images.insert(q.clone()) => {
                    report.failures.push(format!("level {}: embedding into level {} is not injective at `{q}`", k, k + 1))
                }
                Some(_) => {}
            }
        }
        if !report.failures.is_empty() {
            return Ok(report);
        }
        // Points of level k already stabilized, with their index at both levels.
        let mut stable = Vec::new();
        for (i, p) in a.points().iter().enumerate() {
            if t.flag(&p.id)?.stabilizes_at_level <= k {
                let q = &emb[&p.id];
                stable.push((i, b.point_index(q)?, p.id.clone()));
            }
        }
        if let Some(msg) = compare_levels(a, b, &stable, &mut report.checked) {
            report.failures.push(format!("level {}: {msg}", k + 1));
            return Ok(report);
        }
    }
    Ok(report)
}

fn compare_levels(a: &CategoryDatum, b: &CategoryDatum, stable: &[(PointId, PointId, String)], checked: &mut usize) -> Option<String> {
    for (x, x2, xid) in stable {
        for (y, y2, yid) in stable {
            *checked += 1;
            if a.hom_dim(*x, *y) != b.hom_dim(*x2, *y2) {
                return Some(format!("hom({xid}, {yid}) has dim {}, previous level {}", b.hom_dim(*x2, *y2), a.hom_dim(*x, *y)));
            }
        }
    }
    for (x, x2, xid) in stable {
        if a.identity(*x) != b.identity(*x2) || a.radical(*x) != b.radical(*x2) {
            return Some(format!("identity or radical of {xid} changed"));
        }
        for (y, y2, yid) in stable {
            for (z, z2, zid) in stable {
                *checked += 1;
                for g in 0..a.hom_dim(*y, *z) {
                    for f in 0..a.hom_dim(*x, *y) {
                        if a.compose_basis(*x, *y, *z, g, f) != b.compose_basis(*x2, *y2, *z2, g, f) {
                            return Some(format!(
                                "composite {} ∘ {} changed ({xid} -> {yid} -> {zid})",
                                a.hom_basis(*y, *z)[g],
                                a.hom_basis(*x, *y)[f]
                            ));
                        }
                    }
                }
            }
        }
    }
    None
}

/// A set of tower points: an explicit list, or every point of a named
/// family plus `with` minus `without`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyDesc {
    Points(Vec<String>),
    Family { name: String, with: Vec<String>, without: Vec<String> },
}

impl FamilyDesc {
    pub fn contains(&self, t: &TruncationTower, id: &str) -> bool {
        match self {
            FamilyDesc::Points(v) => v.iter().any(|p| p == id),
            FamilyDesc::Family { name, with, without } => {
                if without.iter().any(|p| p == id) {
                    return false;
                }
                with.iter().any(|p| p == id) || t.flags().get(id).and_then(|f| f.family.as_ref()) == Some(name)
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, FamilyDesc::Points(_))
    }

    /// Members present at `level`.
    pub fn at_level(&self, t: &TruncationTower, level: usize) -> PointSet {
        let d = t.level(level);
        (0..d.n_points()).filter(|&i| self.contains(t, &d.point(i).id)).collect()
    }

    pub fn describe(&self) -> String {
        match self {
            FamilyDesc::Points(v) => format!("{{{}}}", v.join(",")),
            FamilyDesc::Family { name, with, without } => {
                let mut s = format!("family {name}");
                if !with.is_empty() {
                    s += &format!(" + {{{}}}", with.join(","));
                }
                if !without.is_empty() {
                    s += &format!(" - {{{}}}", without.join(","));
                }
                s
            }
        }
    }
}

/// `g` re-expressed at another level by point ids. Hom bases of stabilized
/// points agree between levels, so coordinates carry over unchanged.
fn move_morphism(t: &TruncationTower, g: &AddMorphism, from: usize, to: usize) -> Option<AddMorphism> {
    let (a, b) = (t.level(from), t.level(to));
    let map = |obj: &AddObject| -> Option<AddObject> {
        let s = obj.summands().iter().map(|&x| index_at(t, &carry(t, &a.point(x).id, from, to)?, to)).collect::<Option<_>>()?;
        Some(AddObject::from_summands(s))
    };
    let moved = AddMorphism { source: map(&g.source)?, target: map(&g.target)?, blocks: g.blocks.clone() };
    moved.check(b).ok()?;
    Some(moved)
}

fn factors_all(d: &CategoryDatum, g: &AddMorphism, pts: &PointSet) -> Result<bool> {
    for &x in pts {
        if !crate::catdatum::hom_matrix(d, x, g)?.is_surjective() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// First level after `from` at which `g` (built at level `from`) stops
/// covering every map from `target` into its codomain; `None` if it
/// survives to the top.
fn first_failure(t: &TruncationTower, g: &AddMorphism, from: usize, target: &FamilyDesc) -> Result<Option<usize>> {
    for k in from + 1..=t.height() {
        let Some(h) = move_morphism(t, g, from, k) else {
            return Ok(Some(k));
        };
        if !factors_all(t.level(k), &h, &target.at_level(t, k))? {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// A morphism into one point, by source point ids and coordinate blocks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessMap {
    pub level: usize,
    pub source: Vec<String>,
    pub target: String,
    pub blocks: Vec<Vec<String>>,
}

impl WitnessMap {
    fn new(t: &TruncationTower, level: usize, g: &AddMorphism) -> Self {
        let d = t.level(level);
        let f = d.field();
        WitnessMap {
            level,
            source: g.source.summands().iter().map(|&x| d.point(x).id.clone()).collect(),
            target: d.point(g.target.summands()[0]).id.clone(),
            blocks: g.blocks[0].iter().map(|v| v.iter().map(|c| f.format(c)).collect()).collect(),
        }
    }

    fn support_within(&self, bound: usize) -> bool {
        let mut mult: BTreeMap<&str, usize> = BTreeMap::new();
        for s in &self.source {
            *mult.entry(s).or_default() += 1;
        }
        mult.len() <= bound && mult.values().all(|&m| m <= bound)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum LimitVerdict {
    InSet,
    /// A witness built at `witness.level` that still covers every map from
    /// the target set at every later level up to the top.
    Excluded { witness: WitnessMap },
    /// Evidence only: no witness within the bound was found.
    NoWitnessUpTo { bound: usize, levels_searched: Vec<usize> },
}

/// Searches for a finite witness excluding `y` from the closure of `desc`.
///
/// For an infinite family the witness must be built at some level below the
/// top and survive every later level. For a finite set the search starts at
/// the first level holding the set and `y`.
pub fn closure_in_limit(t: &TruncationTower, y: &str, desc: &FamilyDesc, bound: usize) -> Result<LimitVerdict> {
    let top = t.height();
    let first_y = (1..=top).find(|&k| index_at(t, y, k).is_some()).ok_or_else(|| Error::UnknownPoint(y.to_string()))?;
    if desc.contains(t, y) {
        return Ok(LimitVerdict::InSet);
    }
    let levels: Vec<usize> = match desc {
        FamilyDesc::Points(pts) => {
            let mut first = first_y;
            for p in pts {
                first = first.max((1..=top).find(|&k| index_at(t, p, k).is_some()).ok_or_else(|| Error::UnknownPoint(p.clone()))?);
            }
            vec![first]
        }
        FamilyDesc::Family { .. } => (first_y..top).collect(),
    };
    let mut budget = SEARCH_BUDGET;
    for &n in &levels {
        let d = t.level(n);
        let yi = index_at(t, y, n).expect("present from its first level");
        let pts = desc.at_level(t, n);
        let Some(g) = exclusion_witness(d, yi, &pts)? else {
            continue;
        };
        if first_failure(t, &g, n, desc)?.is_some() {
            // Every other candidate at this level maps into the same image.
            continue;
        }
        let w = WitnessMap::new(t, n, &g);
        if w.support_within(bound) {
            return Ok(LimitVerdict::Excluded { witness: w });
        }
        if let Some(w) = bounded_search(t, n, yi, &pts, desc, bound, &mut budget)? {
            return Ok(LimitVerdict::Excluded { witness: w });
        }
    }
    Ok(LimitVerdict::NoWitnessUpTo { bound, levels_searched: levels })
}

/// Source sets of at most `bound` points, smallest first; each gets the sum
/// of all its basis maps into `y`, pruned and checked against the bound.
fn bounded_search(
    t: &TruncationTower,
    n: usize,
    y: PointId,
    pts: &PointSet,
    desc: &FamilyDesc,
    bound: usize,
    budget: &mut usize,
) -> Result<Option<WitnessMap>> {
    let d = t.level(n);
    let cands: Vec<PointId> = pts.iter().copied().collect();
    for size in 1..=bound.min(cands.len()) {
        for combo in combinations(cands.len(), size) {
            if *budget == 0 {
                return Err(Error::Resource(format!(
                    "witness search for {} at level {n} exhausted its budget of {SEARCH_BUDGET} candidates",
                    d.point(y).id
                )));
            }
            *budget -= 1;
            let s: BTreeSet<PointId> = combo.iter().map(|&i| cands[i]).collect();
            let g = crate::functors::canonical_map(d, y, &s);
            if !factors_all(d, &g, pts)? || is_split_epi(d, &g)? {
                continue;
            }
            let g = crate::functors::prune(&g, |h| factors_all(d, h, pts))?;
            if first_failure(t, &g, n, desc)?.is_some() {
                continue;
            }
            let w = WitnessMap::new(t, n, &g);
            if w.support_within(bound) {
                return Ok(Some(w));
            }
        }
    }
    Ok(None)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainEntry {
    pub level: usize,
    pub witness: Option<WitnessMap>,
    /// First later level at which the witness stops working; `None` means
    /// it persists to the top.
    pub fails_at: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessChain {
    pub excluded: String,
    pub target_family: String,
    pub entries: Vec<ChainEntry>,
}

/// For each level N in `levels`: the minimal witness excluding `y` from the
/// members of `desc` present at level N, and where it dies.
pub fn witness_failure_chain(t: &TruncationTower, y: &str, desc: &FamilyDesc, levels: RangeInclusive<usize>) -> Result<WitnessChain> {
    if (1..=t.height()).all(|k| index_at(t, y, k).is_none()) {
        return Err(Error::UnknownPoint(y.to_string()));
    }
    let levels: Vec<usize> = levels.filter(|&k| k >= 1 && k <= t.height()).collect();
    let entries = levels
        .par_iter()
        .map(|&n| {
            let Some(yi) = index_at(t, y, n) else {
                return Ok(ChainEntry { level: n, witness: None, fails_at: None });
            };
            let d = t.level(n);
            match exclusion_witness(d, yi, &desc.at_level(t, n))? {
                None => Ok(ChainEntry { level: n, witness: None, fails_at: None }),
                Some(g) => {
                    let fails_at = first_failure(t, &g, n, desc)?;
                    Ok(ChainEntry { level: n, witness: Some(WitnessMap::new(t, n, &g)), fails_at })
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WitnessChain { excluded: y.to_string(), target_family: desc.describe(), entries })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ArVerdict {
    /// The minimal map is identical from `from` through the top.
    Stable { from: usize },
    /// The minimal map still changed on the last step; evidence of
    /// non-isolation, not a proof.
    GrowingUpTo { top: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ArReport {
    pub point: String,
    pub per_level: Vec<WitnessMap>,
    #[serde(flatten)]
    pub verdict: ArVerdict,
}

/// The minimal right almost split map into `m` at every level holding it.
pub fn ar_stabilization(t: &TruncationTower, m: &str) -> Result<ArReport> {
    let top = t.height();
    let levels: Vec<usize> = (1..=top).filter(|&k| index_at(t, m, k).is_some()).collect();
    if levels.last() != Some(&top) {
        return Err(Error::UnknownPoint(format!("{m} is not a point of the top level")));
    }
    let per_level = levels
        .par_iter()
        .map(|&k| {
            let r = right_almost_split(t.level(k), index_at(t, m, k).expect("present"))?;
            Ok(WitnessMap::new(t, k, &r.map))
        })
        .collect::<Result<Vec<_>>>()?;
    let same = |a: &WitnessMap, b: &WitnessMap| a.source == b.source && a.blocks == b.blocks;
    let last_change = per_level.windows(2).rposition(|w| !same(&w[0], &w[1]));
    let verdict = match last_change {
        None => ArVerdict::Stable { from: levels[0] },
        Some(i) if levels[i + 1] == top => ArVerdict::GrowingUpTo { top },
        Some(i) => ArVerdict::Stable { from: levels[i + 1] },
    };
    Ok(ArReport { point: m.to_string(), per_level, verdict })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TowerCbReport {
    #[serde(flatten)]
    pub report: CbReport,
    /// Flag conflicts: points outside the locally free part whose AR data
    /// stabilized.
    pub warnings: Vec<String>,
    /// Locally free points whose AR data were still changing at the top.
    pub notes: Vec<String>,
}

/// Locally free points get rank 0. The remaining points form a finite
/// subspace whose closure is read off pairwise `closure_in_limit` verdicts;
/// its CB rank plus one ranks them.
pub fn tower_cb_rank(t: &TruncationTower, bound: usize) -> Result<TowerCbReport> {
    let top = t.top();
    let ids: Vec<String> = top.points().iter().map(|p| p.id.clone()).collect();
    let ar = ids.par_iter().map(|id| ar_stabilization(t, id)).collect::<Result<Vec<_>>>()?;
    let mut ranks = BTreeMap::new();
    let mut warnings = Vec::new();
    let mut notes = Vec::new();
    let mut plus = Vec::new();
    for (id, a) in ids.iter().zip(&ar) {
        let locally_free = t.flag(id)?.locally_free;
        match (&a.verdict, locally_free) {
            (_, true) => {
                if let ArVerdict::GrowingUpTo { top } = a.verdict {
                    notes.push(format!("{id}: AR data still changing at level {top}; rank 0 from the locally free flag"));
                }
                ranks.insert(id.clone(), CbRank::Finite(0));
            }
            (ArVerdict::Stable { from }, false) => {
                warnings.push(format!("{id} is flagged not locally free but its AR data are stable from level {from}"));
                plus.push(id.clone());
            }
            (ArVerdict::GrowingUpTo { .. }, false) => plus.push(id.clone()),
        }
    }
    let mut singletons = Vec::with_capacity(plus.len());
    for p in &plus {
        let mut c = PointSet::new();
        for (j, q) in plus.iter().enumerate() {
            if q == p || !matches!(closure_in_limit(t, q, &FamilyDesc::Points(vec![p.clone()]), bound)?, LimitVerdict::Excluded { .. }) {
                c.insert(j);
            }
        }
        singletons.push(c);
    }
    let sub = cb_rank(&TableSpace::from_singletons(plus.clone(), singletons)?)?;
    let mut space_rank = CbRank::Finite(0);
    for (id, r) in &sub.ranks {
        let r = match r {
            CbRank::Finite(n) => CbRank::Finite(n + 1),
            CbRank::Infinite => CbRank::Infinite,
        };
        space_rank = space_rank.max(r);
        ranks.insert(id.clone(), r);
    }
    // The whole space, then the remainder's own chain.
    let mut chain = vec![ids.clone()];
    chain.extend(sub.derivative_chain);
    chain.dedup();
    Ok(TowerCbReport { report: CbReport { ranks, space_rank, derivative_chain: chain }, warnings, notes })
}

#[cfg(test)]
mod tests {
    use super::super::PointFlags;
    use super::*;
    use crate::catdatum::fixtures::{simple_point, two_simple_points};
    use crate::linalg::FieldSpec;
    use crate::packs::{gen_ainf_tower, AINF_FAMILY};

    fn flags(ids: &[&str], locally_free: bool) -> BTreeMap<String, PointFlags> {
        ids.iter()
            .map(|id| {
                let f = PointFlags { locally_free, appears_at_level: 1, stabilizes_at_level: 1, family: None };
                (id.to_string(), f)
            })
            .collect()
    }

    fn family() -> FamilyDesc {
        FamilyDesc::Family { name: AINF_FAMILY.into(), with: vec![], without: vec![] }
    }

    #[test]
    fn constant_tower() {
        let t = TruncationTower::new(vec![simple_point(); 3], flags(&["S"], true)).unwrap();
        assert!(verify_tower(&t).unwrap().passed());
        assert_eq!(ar_stabilization(&t, "S").unwrap().verdict, ArVerdict::Stable { from: 1 });
        let cb = tower_cb_rank(&t, 4).unwrap();
        assert_eq!(cb.report.space_rank, CbRank::Finite(0));
        let one = TruncationTower::new(vec![simple_point()], flags(&["S"], true)).unwrap();
        assert_eq!(ar_stabilization(&one, "S").unwrap().verdict, ArVerdict::Stable { from: 1 });
    }

    #[test]
    fn two_point_remainder_has_rank_one() {
        let t = TruncationTower::new(vec![two_simple_points(); 2], flags(&["S", "TS"], false)).unwrap();
        let cb = tower_cb_rank(&t, 4).unwrap();
        assert_eq!(cb.report.space_rank, CbRank::Finite(1));
        assert_eq!(cb.report.rank_of("S"), Some(CbRank::Finite(1)));
        assert_eq!(cb.report.rank_of("TS"), Some(CbRank::Finite(1)));
        assert_eq!(cb.warnings.len(), 2);
    }

    #[test]
    fn corrupted_level_is_reported() {
        let good = gen_ainf_tower(3, 9, FieldSpec::default_prime()).unwrap().tower;
        let other = gen_ainf_tower(3, 10, FieldSpec::default_prime()).unwrap().tower;
        let levels = vec![good.level(1).clone(), other.level(2).clone(), good.level(3).clone()];
        let t = TruncationTower::new(levels, good.flags().clone()).unwrap();
        let r = verify_tower(&t).unwrap();
        assert_eq!(r.failures.len(), 1);
        assert!(r.failures[0].starts_with("level 2: hom(I, I) has dim 10"), "{}", r.failures[0]);
    }

    #[test]
    fn small_ainf_tower_analyses() {
        let t = gen_ainf_tower(4, 12, FieldSpec::default_prime()).unwrap().tower;
        assert!(verify_tower(&t).unwrap().passed());
        assert_eq!(ar_stabilization(&t, "I").unwrap().verdict, ArVerdict::GrowingUpTo { top: 4 });
        assert_eq!(ar_stabilization(&t, "I2").unwrap().verdict, ArVerdict::Stable { from: 3 });

        let chain = witness_failure_chain(&t, "I", &family(), 1..=3).unwrap();
        for e in &chain.entries {
            assert_eq!(e.fails_at, Some(e.level + 1));
        }
        let empty = witness_failure_chain(&t, "I", &FamilyDesc::Points(vec![]), 1..=2).unwrap();
        assert!(empty.entries.iter().all(|e| e.witness.as_ref().unwrap().source.is_empty() && e.fails_at.is_none()));

        assert!(matches!(closure_in_limit(&t, "I", &family(), 2).unwrap(), LimitVerdict::NoWitnessUpTo { bound: 2, .. }));
        assert_eq!(closure_in_limit(&t, "I2", &family(), 2).unwrap(), LimitVerdict::InSet);
        let others = FamilyDesc::Family { name: AINF_FAMILY.into(), with: vec!["I".into()], without: vec!["I2".into()] };
        match closure_in_limit(&t, "I2", &others, 4).unwrap() {
            LimitVerdict::Excluded { witness } => assert_eq!(witness.source, vec!["I1", "I3"]),
            v => panic!("{v:?}"),
        }

        let cb = tower_cb_rank(&t, 4).unwrap();
        assert_eq!(cb.report.space_rank, CbRank::Finite(1));
        assert_eq!(cb.report.rank_of("I"), Some(CbRank::Finite(1)));
        assert_eq!(cb.report.rank_of("I1"), Some(CbRank::Finite(0)));
        assert!(cb.warnings.is_empty());
    }

    #[test]
    fn combinations_in_order() {
        assert_eq!(combinations(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(combinations(2, 0), vec![Vec::<usize>::new()]);
    }
}
