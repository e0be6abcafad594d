use std::collections::BTreeSet;
use std::sync::OnceLock;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spectra_core::catdatum::{hom_matrix, idempotent_ideal, is_split_epi, AddMorphism, AddObject, CategoryDatum};
use spectra_core::functors::{eval_dim, exclusion_witness, random_functor, FpFunctor};
use spectra_core::linalg::{ExactMatrix, FieldSpec};
use spectra_core::packs::{gen_ainf_tower, gen_an_pack, ArtinianRingSpec};
use spectra_core::topology::{serre_stability_check, ClosureSpace, DatumSpace, PointSet};

fn a4() -> &'static DatumSpace {
    static S: OnceLock<DatumSpace> = OnceLock::new();
    S.get_or_init(|| DatumSpace::new(gen_an_pack(ArtinianRingSpec { n: 4, field: FieldSpec::default_prime() }).unwrap().datum))
}

/// Top level of a short A-infinity tower: larger hom spaces and radicals than A_n.
fn tower_top() -> &'static DatumSpace {
    static S: OnceLock<DatumSpace> = OnceLock::new();
    S.get_or_init(|| DatumSpace::new(gen_ainf_tower(3, 9, FieldSpec::default_prime()).unwrap().tower.top().clone()))
}

fn spaces() -> [&'static DatumSpace; 2] {
    [a4(), tower_top()]
}

fn field_strategy() -> impl Strategy<Value = FieldSpec> {
    prop_oneof![Just(FieldSpec::prime(5).unwrap()), Just(FieldSpec::default_prime()), Just(FieldSpec::Rational)]
}

fn matrix(field: FieldSpec, rows: usize, cols: usize, entries: &[i64]) -> ExactMatrix {
    let rows: Vec<Vec<_>> = entries.chunks(cols.max(1)).take(rows).map(|r| r.iter().map(|&v| field.from_i64(v)).collect()).collect();
    ExactMatrix::from_rows(field, cols, rows).unwrap()
}

fn matrix_strategy() -> impl Strategy<Value = ExactMatrix> {
    (field_strategy(), 1usize..6, 1usize..6)
        .prop_flat_map(|(f, r, c)| (Just(f), Just(r), Just(c), prop::collection::vec(-3i64..4, r * c)))
        .prop_map(|(f, r, c, e)| matrix(f, r, c, &e))
}

fn subset(n: usize, mask: u32) -> PointSet {
    (0..n).filter(|i| mask >> i & 1 == 1).collect()
}

fn random_morphism(d: &CategoryDatum, source: Vec<usize>, target: Vec<usize>, rng: &mut ChaCha8Rng) -> AddMorphism {
    use rand::Rng;
    let blocks = target
        .iter()
        .map(|&b| source.iter().map(|&a| (0..d.hom_dim(a, b)).map(|_| d.field().from_i64(rng.gen_range(-2..3))).collect()).collect())
        .collect();
    AddMorphism { source: AddObject::from_summands(source), target: AddObject::from_summands(target), blocks }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rank_bounded_and_transpose_invariant(m in matrix_strategy()) {
        let r = m.rank();
        prop_assert!(r <= m.rows().min(m.cols()));
        prop_assert_eq!(r, m.transpose().rank());
    }

    #[test]
    fn solve_right_solves(a in matrix_strategy(), seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = a.field();
        let x0: Vec<Vec<_>> = (0..a.cols()).map(|_| (0..2).map(|_| f.from_i64(rng.gen_range(-3..4))).collect()).collect();
        let x0 = ExactMatrix::from_rows(f, 2, x0).unwrap();
        let b = a.mul(&x0).unwrap();
        let x = a.solve_right(&b).unwrap();
        prop_assert!(x.is_some());
        prop_assert_eq!(a.mul(&x.unwrap()).unwrap(), b);
    }

    #[test]
    fn nullspace_is_killed(m in matrix_strategy()) {
        let ns = m.nullspace();
        prop_assert_eq!(ns.len() + m.rank(), m.cols());
        for v in ns {
            prop_assert!(m.mul_vec(&v).iter().all(|s| m.field().is_zero(s)));
        }
    }

    #[test]
    fn hom_matrix_is_functorial(which in 0usize..2, seed in any::<u64>(), sizes in (1usize..3, 1usize..3, 1usize..3)) {
        use rand::Rng;
        let d = spaces()[which].datum();
        let n = d.n_points();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut obj = |k: usize| (0..k).map(|_| rng.gen_range(0..n)).collect::<Vec<_>>();
        let (a, b, c) = (obj(sizes.0), obj(sizes.1), obj(sizes.2));
        let f = random_morphism(d, a, b.clone(), &mut rng);
        let g = random_morphism(d, b, c, &mut rng);
        let gf = g.compose(d, &f).unwrap();
        for z in 0..n {
            let lhs = hom_matrix(d, z, &gf).unwrap();
            let rhs = hom_matrix(d, z, &g).unwrap().mul(&hom_matrix(d, z, &f).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn split_epis_are_pointwise_surjective(which in 0usize..2, seed in any::<u64>()) {
        use rand::Rng;
        let d = spaces()[which].datum();
        let n = d.n_points();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b: Vec<usize> = (0..rng.gen_range(1..3)).map(|_| rng.gen_range(0..n)).collect();
        let extra: Vec<usize> = (0..rng.gen_range(0..3)).map(|_| rng.gen_range(0..n)).collect();
        // [id_B | h] is split by the inclusion of B.
        let h = random_morphism(d, extra.clone(), b.clone(), &mut rng);
        let id = AddMorphism::identity(d, AddObject::from_summands(b.clone()));
        let mut src = b.clone();
        src.extend(&extra);
        let blocks = (0..b.len()).map(|t| id.blocks[t].iter().chain(&h.blocks[t]).cloned().collect()).collect();
        let g = AddMorphism { source: AddObject::from_summands(src), target: AddObject::from_summands(b), blocks };
        prop_assert!(is_split_epi(d, &g).unwrap());
        let r = random_morphism(d, extra, g.target.summands().to_vec(), &mut rng);
        for m in [&g, &r] {
            if is_split_epi(d, m).unwrap() {
                for z in 0..n {
                    prop_assert!(hom_matrix(d, z, m).unwrap().is_surjective());
                }
            }
        }
    }

    #[test]
    fn ideals_grow_with_the_point_set(which in 0usize..2, s in any::<u32>(), t in any::<u32>()) {
        let ds = spaces()[which];
        let n = ds.n_points();
        let alg = ds.algebra();
        let small: Vec<usize> = subset(n, s & t).into_iter().collect();
        let big: Vec<usize> = subset(n, s).into_iter().collect();
        let js = idempotent_ideal(alg, &small).unwrap();
        let jb = idempotent_ideal(alg, &big).unwrap();
        prop_assert!(js.is_subspace_of(&jb));
        // J is idempotent: J = J·J.
        let mut prod = spectra_core::linalg::Subspace::new(alg.field(), alg.dim());
        for u in jb.basis() {
            for v in jb.basis() {
                prod.insert(&alg.mul(u, v));
            }
        }
        prop_assert!(prod.equals(&jb));
    }

    #[test]
    fn closure_is_monotone_and_idempotent(which in 0usize..2, s in any::<u32>(), t in any::<u32>()) {
        let ds = spaces()[which];
        let n = ds.n_points();
        let (small, big) = (subset(n, s & t), subset(n, s));
        let cs = ds.closure(&small).unwrap();
        let cb = ds.closure(&big).unwrap();
        prop_assert!(cs.is_subset(&cb));
        prop_assert!(small.is_subset(&cs));
        prop_assert_eq!(ds.closure(&cs).unwrap(), cs);
    }

    #[test]
    fn witnesses_are_sound(which in 0usize..2, y in 0usize..16, s in any::<u32>()) {
        let ds = spaces()[which];
        let d = ds.datum();
        let n = d.n_points();
        let y = y % n;
        let pts = subset(n, s);
        if let Some(g) = exclusion_witness(d, y, &pts).unwrap() {
            let f = FpFunctor::new(g);
            for &x in &pts {
                prop_assert_eq!(eval_dim(d, &f, x).unwrap(), 0);
            }
            prop_assert!(eval_dim(d, &f, y).unwrap() > 0);
        } else {
            prop_assert!(ds.closure(&pts).unwrap().contains(&y));
        }
    }

    #[test]
    fn random_functors_are_seed_determined(seed in any::<u64>()) {
        let d = a4().datum();
        let f = random_functor(d, &mut ChaCha8Rng::seed_from_u64(seed));
        let g = random_functor(d, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(f.to_json_string(d), g.to_json_string(d));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn serre_stability_holds(which in 0usize..2, seed in any::<u64>()) {
        let r = serre_stability_check(spaces()[which], 8, seed).unwrap();
        prop_assert!(r.passed(), "{:?}", r.violations);
    }
}

#[test]
fn closures_are_reproducible() {
    let ds = tower_top();
    let all: BTreeSet<usize> = ds.all_points();
    let first = ds.closure_checked(&all).unwrap();
    let second = ds.closure_checked(&all).unwrap();
    assert_eq!(first.closure, second.closure);
    assert_eq!(first.witnesses, second.witnesses);
    let again = gen_an_pack(ArtinianRingSpec { n: 3, field: FieldSpec::default_prime() }).unwrap();
    let once = gen_an_pack(ArtinianRingSpec { n: 3, field: FieldSpec::default_prime() }).unwrap();
    assert_eq!(again.datum.to_json_string(), once.datum.to_json_string());
}
