use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{names_of, ClosureSpace, DatumSpace, PointSet};
use crate::catdatum::{hom_matrix, ideal_block, CategoryDatum, PointId};
use crate::error::{Error, Result};
use crate::functors::{functor_family, in_sigma, simple_quotient, FpFunctor, RightModule};
use crate::linalg::Subspace;

/// Exhaustive over all subsets, or a fixed number of seeded samples.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckMode {
    Exhaustive,
    Sampled { samples: usize, seed: u64 },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    pub suite: String,
    pub checked: usize,
    pub violations: Vec<String>,
}

impl PropertyReport {
    fn new(suite: &str) -> Self {
        PropertyReport { suite: suite.into(), ..Default::default() }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    fn expect(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.violations.push(msg());
        }
    }
}

fn all_subsets(n: usize) -> Vec<PointSet> {
    (0u64..1 << n).map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect()).collect()
}

fn random_subset(n: usize, rng: &mut impl Rng) -> PointSet {
    (0..n).filter(|_| rng.gen_bool(0.5)).collect()
}

fn show(names: &[String], s: &PointSet) -> String {
    format!("{{{}}}", names_of(names, s).join(","))
}

/// Empty set, extensivity, idempotence and finite-union additivity of the
/// closure operator.
pub fn kuratowski_check<S: ClosureSpace + ?Sized>(space: &S, mode: CheckMode) -> Result<PropertyReport> {
    let names = space.names();
    let n = names.len();
    let mut r = PropertyReport::new("kuratowski");
    let c0 = space.closure(&PointSet::new())?;
    r.expect(c0.is_empty(), || format!("closure of the empty set is {}", show(&names, &c0)));

    let pairs: Vec<(PointSet, PointSet)> = match mode {
        CheckMode::Exhaustive => {
            let all = all_subsets(n);
            all.iter().flat_map(|x| all.iter().map(move |y| (x.clone(), y.clone()))).collect()
        }
        CheckMode::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..samples).map(|_| (random_subset(n, &mut rng), random_subset(n, &mut rng))).collect()
        }
    };
    let violations: Vec<Vec<String>> = pairs
        .par_iter()
        .map(|(x, y)| {
            let mut v = Vec::new();
            let (cx, cy) = (space.closure(x)?, space.closure(y)?);
            let xy: PointSet = x.union(y).copied().collect();
            let cxy = space.closure(&xy)?;
            if !x.is_subset(&cx) {
                v.push(format!("extensivity: {} is not inside its closure {}", show(&names, x), show(&names, &cx)));
            }
            let ccx = space.closure(&cx)?;
            if ccx != cx {
                v.push(format!("idempotence: closure of {} is {}, closing again gives {}", show(&names, x), show(&names, &cx), show(&names, &ccx)));
            }
            let union: PointSet = cx.union(&cy).copied().collect();
            if union != cxy {
                v.push(format!(
                    "union: closure({}) ∪ closure({}) = {} but closure({}) = {}",
                    show(&names, x),
                    show(&names, y),
                    show(&names, &union),
                    show(&names, &xy),
                    show(&names, &cxy)
                ));
            }
            Ok(v)
        })
        .collect::<Result<_>>()?;
    r.checked += 3 * pairs.len();
    r.violations.extend(violations.into_iter().flatten());
    Ok(r)
}

/// Every singleton is closed.
pub fn t1_check<S: ClosureSpace + ?Sized>(space: &S) -> Result<PropertyReport> {
    let names = space.names();
    let mut r = PropertyReport::new("t1");
    for x in 0..names.len() {
        let c = space.closure(&[x].into())?;
        r.expect(c == [x].into(), || format!("closure of {{{}}} is {}", names[x], show(&names, &c)));
    }
    Ok(r)
}

fn gamma(ds: &DatumSpace, family: &[&FpFunctor]) -> Result<PointSet> {
    let d = ds.datum();
    let mut out = PointSet::new();
    for y in 0..d.n_points() {
        if family.iter().try_fold(true, |acc, f| Ok::<_, Error>(acc && in_sigma(d, f, &[y].into())?))? {
            out.insert(y);
        }
    }
    Ok(out)
}

/// Monotonicity of Σ and γ, and Σ(X) = Σ(closure X), on seeded functor
/// families and subsets.
pub fn galois_check(ds: &DatumSpace, samples: usize, seed: u64) -> Result<PropertyReport> {
    let d = ds.datum();
    let names = ds.names();
    let n = names.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let family = functor_family(d, samples, &mut rng)?;
    let mut r = PropertyReport::new("galois");
    for _ in 0..samples {
        let y = random_subset(n, &mut rng);
        let x: PointSet = y.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        let cx = ds.closure(&x)?;
        let f = &family[rng.gen_range(0..family.len())];
        let (fx, fy, fcx) = (in_sigma(d, f, &x)?, in_sigma(d, f, &y)?, in_sigma(d, f, &cx)?);
        r.expect(!fy || fx, || format!("Σ not antitone: F vanishes on {} but not on its subset {}", show(&names, &y), show(&names, &x)));
        r.expect(fx == fcx, || format!("Σ({}) and Σ of its closure {} disagree", show(&names, &x), show(&names, &cx)));

        // Families ℱ ⊆ 𝒢 as a random prefix and a longer one.
        let a = rng.gen_range(0..=family.len());
        let b = rng.gen_range(a..=family.len());
        let small: Vec<&FpFunctor> = family[..a].iter().collect();
        let large: Vec<&FpFunctor> = family[..b].iter().collect();
        let (gs, gl) = (gamma(ds, &small)?, gamma(ds, &large)?);
        r.expect(gl.is_subset(&gs), || format!("γ not antitone: families of size {a} and {b} give {} and {}", show(&names, &gs), show(&names, &gl)));
    }
    Ok(r)
}

/// Σ-membership agrees with the annihilator test F·J = 0 for every subset
/// (or sampled subsets) and a seeded family of `random` presentations plus
/// representables and simples.
pub fn perp_check(ds: &DatumSpace, mode: CheckMode, random: usize) -> Result<PropertyReport> {
    let d = ds.datum();
    let alg = ds.algebra();
    let names = ds.names();
    let n = names.len();
    let (subsets, seed) = match mode {
        CheckMode::Exhaustive => (all_subsets(n), 0),
        CheckMode::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            ((0..samples).map(|_| random_subset(n, &mut rng)).collect(), seed)
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37);
    let family = functor_family(d, random, &mut rng)?;
    let lists: Vec<Vec<PointId>> = subsets.iter().map(|p| p.iter().copied().collect()).collect();
    let per_functor: Vec<Vec<String>> = family
        .par_iter()
        .enumerate()
        .map(|(k, f)| {
            let m = RightModule::from_functor(alg, f)?;
            let mut bad = Vec::new();
            for (pts, list) in subsets.iter().zip(&lists) {
                let (s, p) = (in_sigma(d, f, pts)?, m.annihilated_by_points(d, list));
                if s != p {
                    bad.push(format!("functor #{k} on {}: in Σ is {s}, in the double perp is {p}", show(&names, pts)));
                }
            }
            Ok(bad)
        })
        .collect::<Result<_>>()?;
    let mut r = PropertyReport::new("perp");
    r.checked = subsets.len() * family.len();
    r.violations = per_functor.into_iter().flatten().collect();
    Ok(r)
}

/// For sampled submodules H ⊆ G of functor modules: G·J = 0 iff H·J = 0 and
/// (G/H)·J = 0.
pub fn serre_stability_check(ds: &DatumSpace, samples: usize, seed: u64) -> Result<PropertyReport> {
    let d = ds.datum();
    let alg = ds.algebra();
    let names = ds.names();
    let n = names.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let family = functor_family(d, samples, &mut rng)?;
    let mut r = PropertyReport::new("serre-stability");
    for _ in 0..samples {
        let f = &family[rng.gen_range(0..family.len())];
        let g = RightModule::from_functor(alg, f)?;
        if g.dim() == 0 {
            continue;
        }
        let gens: Vec<_> = (0..rng.gen_range(1..=2))
            .map(|_| (0..g.dim()).map(|_| d.field().from_i64(rng.gen_range(0..3))).collect())
            .collect();
        let sub = g.submodule(&gens);
        let (h, q) = (g.restrict(&sub)?, g.quotient(&sub));
        let pts = random_subset(n, &mut rng);
        let list: Vec<PointId> = pts.iter().copied().collect();
        let (ag, ah, aq) = (g.annihilated_by_points(d, &list), h.annihilated_by_points(d, &list), q.annihilated_by_points(d, &list));
        r.expect(ag == (ah && aq), || {
            format!("on {}: middle term annihilated is {ag}, sub {ah}, quotient {aq}", show(&names, &pts))
        });
    }
    Ok(r)
}

/// The ideal J_X as its hom blocks, indexed `w * n + z`.
fn ideal_blocks(d: &CategoryDatum, pts: &PointSet) -> Vec<Subspace> {
    let pts: Vec<PointId> = pts.iter().copied().collect();
    let n = d.n_points();
    (0..n * n).map(|i| ideal_block(d, &pts, i / n, i % n)).collect()
}

fn same_blocks(a: &[Subspace], b: &[Subspace]) -> bool {
    a.iter().zip(b).all(|(x, y)| x.equals(y))
}

/// J² = J, block by block: composites of J-blocks through any point span
/// each block of J.
fn is_idempotent(d: &CategoryDatum, j: &[Subspace]) -> bool {
    let n = d.n_points();
    for w in 0..n {
        for z in 0..n {
            let want = &j[w * n + z];
            let mut sq = Subspace::new(d.field(), want.ambient());
            'fill: for y in 0..n {
                for a in j[w * n + y].basis() {
                    for b in j[y * n + z].basis() {
                        if sq.dim() == want.dim() {
                            break 'fill;
                        }
                        sq.insert(&d.compose(w, y, z, b, a));
                    }
                }
            }
            if !sq.equals(want) {
                return false;
            }
        }
    }
    true
}

/// X ↦ J_X round-trips: the points whose simple functor is not killed by
/// J_X are exactly X, J_X² = J_X, and distinct subsets give distinct
/// ideals. Exhaustive mode needs at most three points.
pub fn serre_correspondence_check(ds: &DatumSpace, mode: CheckMode) -> Result<PropertyReport> {
    let d = ds.datum();
    let alg = ds.algebra();
    let names = ds.names();
    let n = names.len();
    let subsets = match mode {
        CheckMode::Exhaustive => {
            if n > 3 {
                return Err(Error::input(format!(
                    "exhaustive correspondence check takes at most 3 points, this datum has {n}; use sampling"
                )));
            }
            all_subsets(n)
        }
        CheckMode::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..samples).map(|_| random_subset(n, &mut rng)).collect()
        }
    };
    let simples = (0..n)
        .map(|y| RightModule::from_functor(alg, &simple_quotient(d, y)?))
        .collect::<Result<Vec<_>>>()?;
    let mut r = PropertyReport::new("serre");
    let mut classes: Vec<(PointSet, Vec<Subspace>)> = Vec::new();
    for x in &subsets {
        let j = ideal_blocks(d, x);
        r.expect(is_idempotent(d, &j), || format!("ideal of {} is not idempotent", show(&names, x)));
        let list: Vec<PointId> = x.iter().copied().collect();
        let back: PointSet = (0..n).filter(|&y| !simples[y].annihilated_by_points(d, &list)).collect();
        r.expect(&back == x, || format!("{} maps back to {}", show(&names, x), show(&names, &back)));
        let j2 = ideal_blocks(d, &back);
        r.expect(same_blocks(&j2, &j), || {
            format!("{} and {} give different annihilator classes", show(&names, x), show(&names, &back))
        });
        if mode == CheckMode::Exhaustive {
            for (y, k) in &classes {
                r.expect(!same_blocks(k, &j), || format!("{} and {} give the same class", show(&names, x), show(&names, y)));
            }
            classes.push((x.clone(), j));
        }
    }
    Ok(r)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContravariantReport {
    pub contravariantly_finite: bool,
    pub closed: bool,
}

impl ContravariantReport {
    /// Contravariant finiteness implies closedness.
    pub fn passed(&self) -> bool {
        !self.contravariantly_finite || self.closed
    }
}

/// For each M outside `pts`, the sum of all basis maps from points of `pts`
/// into M must be a right add(pts)-approximation: at every Z, Hom(Z, g)
/// reaches exactly the maps Z -> M that factor through add(pts).
pub fn contravariant_finiteness_check(ds: &DatumSpace, pts: &PointSet) -> Result<ContravariantReport> {
    let d = ds.datum();
    let f = d.field();
    let n = d.n_points();
    let mut finite = true;
    for m in (0..n).filter(|m| !pts.contains(m)) {
        let g = crate::functors::canonical_map(d, m, pts);
        for z in 0..n {
            let mut factoring = Subspace::new(f, d.hom_dim(z, m));
            for &x in pts {
                for a in 0..d.hom_dim(z, x) {
                    for b in 0..d.hom_dim(x, m) {
                        factoring.insert(&d.compose(z, x, m, &d.unit_vector(x, m, b), &d.unit_vector(z, x, a)));
                    }
                }
            }
            let h = hom_matrix(d, z, &g)?;
            let image = Subspace::spanned_by(f, h.rows(), &(0..h.cols()).map(|c| h.column(c)).collect::<Vec<_>>());
            finite &= image.equals(&factoring);
        }
    }
    Ok(ContravariantReport { contravariantly_finite: finite, closed: ds.is_closed(pts)? })
}

#[cfg(test)]
mod tests {
    use super::super::table::tests::dvr;
    use super::super::tests::{an_space, subsets};
    use super::super::TableSpace;
    use super::*;

    #[test]
    fn datum_spaces_pass_kuratowski_and_t1() {
        for n in 1..=3 {
            let s = an_space(n);
            assert!(kuratowski_check(&s, CheckMode::Exhaustive).unwrap().passed());
            assert!(t1_check(&s).unwrap().passed());
        }
    }

    #[test]
    fn dvr_is_a_topology_but_not_t1() {
        assert!(kuratowski_check(&dvr(), CheckMode::Exhaustive).unwrap().passed());
        let t1 = t1_check(&dvr()).unwrap();
        assert_eq!(t1.violations.len(), 1);
        assert!(t1.violations[0].contains("eta"));
    }

    #[test]
    fn union_violation_is_reported() {
        // {a, b} closes to include c, but neither {a} nor {b} does.
        let names: Vec<String> = vec!["a".into(), "b".into(), "c".into()];
        let table: Vec<PointSet> = (0u32..8)
            .map(|m| {
                let mut s: PointSet = (0..3).filter(|i| m >> i & 1 == 1).collect();
                if m == 0b011 {
                    s.insert(2);
                }
                s
            })
            .collect();
        let r = kuratowski_check(&TableSpace::from_table(names, table).unwrap(), CheckMode::Exhaustive).unwrap();
        assert!(!r.passed());
        assert!(r.violations.iter().any(|v| v.starts_with("union: closure({a}) ∪ closure({b})")));
    }

    #[test]
    fn sampled_mode_is_deterministic() {
        let s = an_space(3);
        let a = kuratowski_check(&s, CheckMode::Sampled { samples: 10, seed: 3 }).unwrap();
        let b = kuratowski_check(&s, CheckMode::Sampled { samples: 10, seed: 3 }).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.checked, 31);
    }

    #[test]
    fn galois_and_perp_pass_on_a3() {
        let s = an_space(3);
        assert!(galois_check(&s, 30, 5).unwrap().passed());
        assert!(perp_check(&s, CheckMode::Exhaustive, 10).unwrap().passed());
        assert!(serre_stability_check(&s, 30, 5).unwrap().passed());
    }

    #[test]
    fn serre_correspondence_small_packs() {
        for n in 1..=3 {
            let r = serre_correspondence_check(&an_space(n), CheckMode::Exhaustive).unwrap();
            assert!(r.passed(), "{:?}", r.violations);
        }
        assert!(serre_correspondence_check(&an_space(4), CheckMode::Exhaustive).is_err());
        assert!(serre_correspondence_check(&an_space(4), CheckMode::Sampled { samples: 8, seed: 1 }).unwrap().passed());
    }

    #[test]
    fn contravariant_finiteness() {
        let s = an_space(3);
        for pts in subsets(3) {
            let r = contravariant_finiteness_check(&s, &pts).unwrap();
            assert!(r.contravariantly_finite && r.closed);
        }
    }
}
