//! End-to-end acceptance runs against the shipped packs in `packs/`, each
//! with its runtime budget.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde_json::Value;

use spectra_core::catdatum::CategoryDatum;
use spectra_core::functors::{eval_dim, exclusion_witness, in_sigma, FpFunctor};
use spectra_core::linalg::FieldSpec;
use spectra_core::packs::{gen_ainf_tower, sha256_hex, verify_pack, Certifier, PackManifest, AINF_FAMILY};
use spectra_core::topology::{
    cb_rank, kuratowski_check, perp_check, serre_correspondence_check, t1_check, CbRank, CheckMode, ClosureSpace, DatumSpace,
    PointSet, TableSpace,
};
use spectra_core::tower::{ar_stabilization, tower_cb_rank, witness_failure_chain, ArVerdict, FamilyDesc, TruncationTower};

fn packs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../packs")
}

fn an(n: usize) -> DatumSpace {
    DatumSpace::new(CategoryDatum::read(packs().join(format!("a{n}.json"))).unwrap())
}

fn shipped_tower() -> TruncationTower {
    TruncationTower::read(packs().join("ainf-tower")).unwrap()
}

fn subsets(n: usize) -> impl Iterator<Item = PointSet> {
    (0u32..1 << n).map(move |m| (0..n).filter(|i| m >> i & 1 == 1).collect())
}

fn within(start: Instant, budget: u64, what: &str) {
    let t = start.elapsed();
    assert!(t < Duration::from_secs(budget), "{what} took {t:?}, budget {budget} s");
}

#[test]
fn kuratowski_axioms_on_an_packs() {
    let start = Instant::now();
    for n in 1..=5 {
        let mode = if n <= 4 { CheckMode::Exhaustive } else { CheckMode::Sampled { samples: 200, seed: 0 } };
        let r = kuratowski_check(&an(n), mode).unwrap();
        assert!(r.passed(), "A{n}: {:?}", r.violations);
        assert!(r.checked > 0);
    }
    within(start, 60, "Kuratowski suite");
}

#[test]
fn datum_spaces_are_t1() {
    let mut spaces: Vec<DatumSpace> = (1..=5).map(an).collect();
    let t = shipped_tower();
    spaces.extend((1..=t.height()).map(|k| DatumSpace::new(t.level(k).clone())));
    let start = Instant::now();
    for s in &spaces {
        let r = t1_check(s).unwrap();
        assert!(r.passed(), "{:?}", r.violations);
    }
    within(start, 5, "T1 suite");
}

#[test]
fn finite_type_is_discrete() {
    for n in 1..=5 {
        let s = an(n);
        for pts in subsets(n) {
            assert_eq!(s.closure(&pts).unwrap(), pts, "A{n}");
        }
        let r = cb_rank(&s).unwrap();
        assert_eq!(r.space_rank, CbRank::Finite(0), "A{n}");
        assert!(r.ranks.values().all(|&k| k == CbRank::Finite(0)));
    }
}

#[test]
fn closure_routes_agree() {
    for n in 1..=5 {
        let s = an(n);
        for pts in subsets(n) {
            let by_ideal = s.closure_by_ideal(&pts).unwrap();
            let by_witness = s.closure_by_witness(&pts).unwrap().closure;
            assert_eq!(by_ideal, by_witness, "A{n}, {pts:?}");
        }
    }
}

#[test]
fn ideal_functors_vanish_nowhere() {
    let start = Instant::now();
    let t = gen_ainf_tower(8, 24, FieldSpec::default_prime()).unwrap().tower;
    for k in 1..=t.height() {
        let d = t.level(k);
        let family: Vec<usize> = d
            .points()
            .iter()
            .enumerate()
            .filter(|(_, p)| p.id.strip_prefix('I').is_some_and(|s| s.parse::<usize>().is_ok_and(|n| n <= 8)))
            .map(|(i, _)| i)
            .collect();
        assert_eq!(family.len(), k, "level {k}");
        for &i in &family {
            let rep = FpFunctor::representable(d, i);
            for x in 0..d.n_points() {
                assert!(d.hom_dim(x, i) >= 1, "level {k}: stHom({}, {}) = 0", d.point(x).id, d.point(i).id);
                assert!(!in_sigma(d, &rep, &[x].into()).unwrap());
            }
        }
    }
    within(start, 120, "A-infinity vanishing run");
}

#[test]
fn cb_rank_of_the_tower_and_the_dvr() {
    let t = shipped_tower().truncate(8).unwrap();
    let r = tower_cb_rank(&t, 4).unwrap();
    assert_eq!(r.report.space_rank, CbRank::Finite(1));
    assert_eq!(r.report.rank_of("I"), Some(CbRank::Finite(1)));
    for n in 1..=8 {
        assert_eq!(r.report.rank_of(&format!("I{n}")), Some(CbRank::Finite(0)));
    }
    assert!(r.warnings.is_empty(), "{:?}", r.warnings);

    let dvr = TableSpace::read(packs().join("dvr-spec.json")).unwrap();
    let r = cb_rank(&dvr).unwrap();
    assert_eq!(r.space_rank, CbRank::Finite(1));
    assert_eq!(r.rank_of("eta"), Some(CbRank::Finite(0)));
    assert_eq!(r.rank_of("m"), Some(CbRank::Finite(1)));
}

#[test]
fn ar_data_stabilize_except_at_the_limit() {
    let t = shipped_tower();
    assert_eq!(t.height(), 8);
    for n in 1..=6 {
        let r = ar_stabilization(&t, &format!("I{n}")).unwrap();
        match r.verdict {
            ArVerdict::Stable { from } => assert!(from <= n + 2, "I{n} stable only from {from}"),
            v => panic!("I{n}: {v:?}"),
        }
    }
    assert_eq!(ar_stabilization(&t, "I").unwrap().verdict, ArVerdict::GrowingUpTo { top: 8 });

    let family = FamilyDesc::Family { name: AINF_FAMILY.into(), with: vec![], without: vec![] };
    let chain = witness_failure_chain(&t, "I", &family, 1..=6).unwrap();
    assert_eq!(chain.entries.len(), 6);
    for e in &chain.entries {
        assert!(e.witness.is_some(), "no witness at level {}", e.level);
        let fails = e.fails_at.unwrap_or_else(|| panic!("level {} witness never fails", e.level));
        assert!(fails <= e.level + 1, "level {} witness fails only at {fails}", e.level);
    }
}

#[test]
fn sigma_is_its_double_perp() {
    for n in 1..=3 {
        let r = perp_check(&an(n), CheckMode::Exhaustive, 50).unwrap();
        assert!(r.passed(), "A{n}: {:?}", r.violations);
    }
}

#[test]
fn closed_sets_match_annihilator_classes() {
    for n in 1..=3 {
        let r = serre_correspondence_check(&an(n), CheckMode::Exhaustive).unwrap();
        assert!(r.passed(), "A{n}: {:?}", r.violations);
    }
}

fn pack_paths() -> Vec<PathBuf> {
    let mut out: Vec<PathBuf> = (1..=5).map(|n| packs().join(format!("a{n}.json"))).collect();
    out.push(packs().join("ainf-tower"));
    out
}

#[test]
fn shipped_packs_are_certified() {
    for p in pack_paths() {
        let r = verify_pack(&p, true).unwrap();
        assert!(r.passed(), "{}: {:?}", p.display(), r.failures);
        assert!(!r.checked.is_empty());
    }
}

/// Every `coeff` string in a datum document, as a JSON pointer.
fn coeff_pointers(v: &Value, at: String, out: &mut Vec<String>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                if k == "coeff" {
                    out.push(format!("{at}/coeff"));
                } else {
                    coeff_pointers(x, format!("{at}/{k}"), out);
                }
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                coeff_pointers(x, format!("{at}/{i}"), out);
            }
        }
        _ => {}
    }
}

/// Adds one to a single coefficient and checks the recomputation notices.
fn assert_mutations_detected(text: &str, manifest: &PackManifest, stride: usize) -> usize {
    let doc: Value = serde_json::from_str(text).unwrap();
    let mut pointers = Vec::new();
    coeff_pointers(&doc, String::new(), &mut pointers);
    assert!(!pointers.is_empty());
    let field = manifest.field();
    let certifier = Certifier::new(&CategoryDatum::from_json_str(text).unwrap(), manifest).unwrap();
    let mut tried = 0;
    for ptr in pointers.iter().step_by(stride) {
        let mut m = doc.clone();
        let c = m.pointer_mut(ptr).unwrap();
        let old = field.parse(c.as_str().unwrap()).unwrap();
        *c = Value::String(field.format(&field.add(&old, &field.one())));
        tried += 1;
        let detected = match CategoryDatum::from_json_str(&m.to_string()) {
            Err(_) => true,
            Ok(d) => certifier.check(&d).unwrap().is_some(),
        };
        assert!(detected, "mutation at {ptr} went unnoticed");
    }
    tried
}

#[test]
fn single_coefficient_mutations_are_detected() {
    for n in 1..=5 {
        let path = packs().join(format!("a{n}.json"));
        let manifest = PackManifest::read(packs().join(format!("a{n}.manifest.json"))).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(assert_mutations_detected(&text, &manifest, 1) > 0);
    }
    let dir = packs().join("ainf-tower");
    let manifest = PackManifest::read(dir.join("manifest.json")).unwrap();
    // Every coefficient on the first level, a fixed spread further up.
    for (k, stride) in [(1, 1), (4, 13), (8, 97)] {
        let text = std::fs::read_to_string(dir.join(TruncationTower::level_file_name(k))).unwrap();
        assert!(assert_mutations_detected(&text, &manifest, stride) > 0);
    }
}

#[test]
fn mutation_is_caught_even_with_a_matching_hash() {
    let tmp = tempfile::tempdir().unwrap();
    for f in ["a3.json", "a3.manifest.json"] {
        std::fs::copy(packs().join(f), tmp.path().join(f)).unwrap();
    }
    let path = tmp.path().join("a3.json");
    let text = std::fs::read_to_string(&path).unwrap();
    let mutated = text.replacen("\"coeff\": \"1\"", "\"coeff\": \"2\"", 1);
    assert_ne!(mutated, text);
    std::fs::write(&path, &mutated).unwrap();

    let mpath = tmp.path().join("a3.manifest.json");
    let mut manifest = PackManifest::read(&mpath).unwrap();
    for fh in &mut manifest.files {
        fh.sha256 = sha256_hex(mutated.as_bytes());
    }
    std::fs::write(&mpath, manifest.to_json_string()).unwrap();

    assert!(verify_pack(&path, false).unwrap().passed());
    let r = verify_pack(&path, true).unwrap();
    assert!(!r.passed());
}

#[test]
fn nonzero_maps_give_exclusion_witnesses() {
    let t = shipped_tower();
    let mut data: Vec<CategoryDatum> = (1..=5).map(|n| an(n).datum().clone()).collect();
    data.extend((1..=t.height()).map(|k| t.level(k).clone()));
    let mut pairs = 0;
    for d in &data {
        for x in 0..d.n_points() {
            for y in (0..d.n_points()).filter(|&y| y != x && d.hom_dim(x, y) > 0) {
                let g = exclusion_witness(d, y, &[x].into()).unwrap();
                let g = g.unwrap_or_else(|| panic!("no witness excluding {} from {{{}}}", d.point(y).id, d.point(x).id));
                let f = FpFunctor::new(g);
                assert_eq!(eval_dim(d, &f, x).unwrap(), 0);
                assert!(eval_dim(d, &f, y).unwrap() > 0);
                pairs += 1;
            }
        }
    }
    assert!(pairs > 0);
}
