//! Axiom checks for a [`CategoryDatum`]: unital associative composition,
//! local endomorphism rings with the declared radicals, and pairwise
//! non-isomorphic points.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{CategoryDatum, PointId};
use crate::linalg::{is_zero_vec, ExactMatrix, FieldSpec, Scalar, Subspace};

/// Quotients with at most this many elements are checked exhaustively.
const ENUMERATION_LIMIT: u64 = 10_000;
const DIVISION_SAMPLES: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    LeftIdentity { point: String, basis: String },
    RightIdentity { point: String, basis: String },
    Associativity { h: String, g: String, f: String },
    RadicalNotIdeal { point: String, detail: String },
    RadicalNotNilpotent { point: String },
    QuotientNotDivision { point: String, detail: String },
    IsomorphicPoints { x: String, y: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::LeftIdentity { point, basis } => write!(f, "id_{point} ∘ {basis} != {basis}"),
            Violation::RightIdentity { point, basis } => write!(f, "{basis} ∘ id_{point} != {basis}"),
            Violation::Associativity { h, g, f: ff } => write!(f, "({h} ∘ {g}) ∘ {ff} != {h} ∘ ({g} ∘ {ff})"),
            Violation::RadicalNotIdeal { point, detail } => write!(f, "radical of {point} is not an ideal: {detail}"),
            Violation::RadicalNotNilpotent { point } => write!(f, "radical of {point} is not nilpotent"),
            Violation::QuotientNotDivision { point, detail } => {
                write!(f, "End({point})/rad is not a division algebra: {detail}")
            }
            Violation::IsomorphicPoints { x, y } => write!(f, "{x} is a direct summand of {y}"),
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_datum(d: &CategoryDatum) -> ValidationReport {
    let mut v = Vec::new();
    check_identities(d, &mut v);
    check_associativity(d, &mut v);
    for x in 0..d.n_points() {
        check_radical(d, x, &mut v);
    }
    check_non_isomorphic(d, &mut v);
    ValidationReport { violations: v }
}

fn check_identities(d: &CategoryDatum, out: &mut Vec<Violation>) {
    let n = d.n_points();
    for x in 0..n {
        for y in 0..n {
            for k in 0..d.hom_dim(x, y) {
                let f = d.unit_vector(x, y, k);
                if d.compose(x, y, y, d.identity(y), &f) != f {
                    out.push(Violation::LeftIdentity { point: d.point(y).id.clone(), basis: d.hom_basis(x, y)[k].clone() });
                }
                if d.compose(x, x, y, &f, d.identity(x)) != f {
                    out.push(Violation::RightIdentity { point: d.point(x).id.clone(), basis: d.hom_basis(x, y)[k].clone() });
                }
            }
        }
    }
}

fn check_associativity(d: &CategoryDatum, out: &mut Vec<Violation>) {
    let n = d.n_points();
    let field = d.field();
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                for w in 0..n {
                    let (dxy, dyz, dzw) = (d.hom_dim(x, y), d.hom_dim(y, z), d.hom_dim(z, w));
                    if dxy == 0 || dyz == 0 || dzw == 0 {
                        continue;
                    }
                    for hi in 0..dzw {
                        let h = d.unit_vector(z, w, hi);
                        for gi in 0..dyz {
                            let hg = sparse_to_dense(field, d.hom_dim(y, w), d.compose_basis(y, z, w, hi, gi));
                            for fi in 0..dxy {
                                let f = d.unit_vector(x, y, fi);
                                let gf = sparse_to_dense(field, d.hom_dim(x, z), d.compose_basis(x, y, z, gi, fi));
                                let left = d.compose(x, y, w, &hg, &f);
                                let right = d.compose(x, z, w, &h, &gf);
                                if left != right {
                                    out.push(Violation::Associativity {
                                        h: d.hom_basis(z, w)[hi].clone(),
                                        g: d.hom_basis(y, z)[gi].clone(),
                                        f: d.hom_basis(x, y)[fi].clone(),
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}

fn sparse_to_dense(field: FieldSpec, dim: usize, s: &[(usize, Scalar)]) -> Vec<Scalar> {
    let mut v = vec![field.zero(); dim];
    for (k, c) in s {
        v[*k] = c.clone();
    }
    v
}

fn check_radical(d: &CategoryDatum, x: PointId, out: &mut Vec<Violation>) {
    let field = d.field();
    let point = d.point(x).id.clone();
    let dim = d.hom_dim(x, x);
    let rad = Subspace::spanned_by(field, dim, d.radical(x));
    let end_basis: Vec<Vec<Scalar>> = (0..dim).map(|k| d.unit_vector(x, x, k)).collect();

    for r in rad.basis() {
        for (k, b) in end_basis.iter().enumerate() {
            let name = &d.hom_basis(x, x)[k];
            if !rad.contains(&d.compose(x, x, x, r, b)) {
                out.push(Violation::RadicalNotIdeal { point: point.clone(), detail: format!("r ∘ {name} escapes") });
                return;
            }
            if !rad.contains(&d.compose(x, x, x, b, r)) {
                out.push(Violation::RadicalNotIdeal { point: point.clone(), detail: format!("{name} ∘ r escapes") });
                return;
            }
        }
    }

    // rad^(k+1) = rad^k ∘ rad must reach zero within dim steps.
    let mut power: Vec<Vec<Scalar>> = rad.basis().to_vec();
    let mut steps = 0;
    while !power.is_empty() {
        if steps > dim {
            out.push(Violation::RadicalNotNilpotent { point: point.clone() });
            return;
        }
        let mut next = Subspace::new(field, dim);
        for p in &power {
            for r in rad.basis() {
                next.insert(&d.compose(x, x, x, p, r));
            }
        }
        if next.dim() == power.len() && next.dim() > 0 {
            out.push(Violation::RadicalNotNilpotent { point: point.clone() });
            return;
        }
        power = next.basis().to_vec();
        steps += 1;
    }

    if let Err(detail) = check_division(d, x, &rad) {
        out.push(Violation::QuotientNotDivision { point, detail });
    }
}

/// End(x)/rad must be a division algebra: every nonzero coset acts
/// invertibly on the quotient by left multiplication.
fn check_division(d: &CategoryDatum, x: PointId, rad: &Subspace) -> Result<(), String> {
    let field = d.field();
    let dim = d.hom_dim(x, x);
    let id = d.identity(x).to_vec();
    if rad.contains(&id) {
        return Err("identity lies in the radical".into());
    }
    // Coset representatives, identity first.
    let mut span = rad.clone();
    let mut reps = Vec::new();
    for v in std::iter::once(id).chain((0..dim).map(|k| d.unit_vector(x, x, k))) {
        if span.insert(&v) {
            reps.push(v);
        }
    }
    let q = reps.len();
    // Coordinates modulo the radical: solve against [reps | rad].
    let mut cols = reps.clone();
    cols.extend(rad.basis().iter().cloned());
    let frame = ExactMatrix::from_columns(field, dim, &cols);
    let coords = |v: &[Scalar]| -> Vec<Scalar> {
        let b = ExactMatrix::from_columns(field, dim, &[v.to_vec()]);
        let sol = frame.solve_right(&b).expect("shapes agree").expect("reps and radical span End");
        (0..q).map(|i| sol.get(i, 0).clone()).collect()
    };
    // Left multiplication by each rep on the quotient.
    let lmul: Vec<ExactMatrix> = reps
        .iter()
        .map(|a| {
            let cols: Vec<Vec<Scalar>> = reps.iter().map(|c| coords(&d.compose(x, x, x, a, c))).collect();
            ExactMatrix::from_columns(field, q, &cols)
        })
        .collect();
    let is_unit = |u: &[Scalar]| -> bool {
        let mut m = ExactMatrix::zeros(field, q, q);
        for (c, l) in u.iter().zip(&lmul) {
            if field.is_zero(c) {
                continue;
            }
            for i in 0..q {
                for j in 0..q {
                    let v = field.add(m.get(i, j), &field.mul(c, l.get(i, j)));
                    m.set(i, j, v);
                }
            }
        }
        m.rank() == q
    };
    let describe = |u: &[Scalar]| u.iter().map(|s| field.format(s)).collect::<Vec<_>>().join(",");

    let exhaustive = match field {
        FieldSpec::Prime(p) => (q as u32) < 64 && (p as f64).powi(q as i32) <= ENUMERATION_LIMIT as f64,
        FieldSpec::Rational => false,
    };
    if exhaustive {
        let p = field.characteristic();
        let total = p.pow(q as u32);
        for code in 1..total {
            let mut c = code;
            let u: Vec<Scalar> = (0..q)
                .map(|_| {
                    let s = field.from_i64((c % p) as i64);
                    c /= p;
                    s
                })
                .collect();
            if !is_unit(&u) {
                return Err(format!("coset ({}) is not invertible", describe(&u)));
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ x as u64);
        let basis = (0..q).map(|i| {
            let mut u = vec![field.zero(); q];
            u[i] = field.one();
            u
        });
        let random = (0..DIVISION_SAMPLES).map(|_| (0..q).map(|_| field.from_i64(rng.gen_range(-50..50))).collect::<Vec<_>>());
        for u in basis.chain(random) {
            if is_zero_vec(field, &u) {
                continue;
            }
            if !is_unit(&u) {
                return Err(format!("coset ({}) is not invertible", describe(&u)));
            }
        }
    }
    Ok(())
}

fn check_non_isomorphic(d: &CategoryDatum, out: &mut Vec<Violation>) {
    let n = d.n_points();
    let field = d.field();
    for x in 0..n {
        let rad = Subspace::spanned_by(field, d.hom_dim(x, x), d.radical(x));
        for y in 0..n {
            if x == y {
                continue;
            }
            'pair: for fi in 0..d.hom_dim(x, y) {
                let f = d.unit_vector(x, y, fi);
                for gi in 0..d.hom_dim(y, x) {
                    let g = d.unit_vector(y, x, gi);
                    if !rad.contains(&d.compose(x, y, x, &g, &f)) {
                        out.push(Violation::IsomorphicPoints { x: d.point(x).id.clone(), y: d.point(y).id.clone() });
                        break 'pair;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::{DatumBuilder, PointInfo};
    use super::*;

    #[test]
    fn single_simple_point_is_valid() {
        assert!(validate_datum(&simple_point()).is_valid());
        assert!(validate_datum(&arrow()).is_valid());
    }

    fn dual_numbers(rad_declared: bool, break_assoc: bool) -> CategoryDatum {
        // End = k[e]/(e^2), basis (1, e).
        let f = FieldSpec::prime(5).unwrap();
        let mut b = DatumBuilder::new(f, vec![PointInfo { id: "D".into(), locally_free: true }]);
        b.set_hom(0, 0, vec!["1".into(), "e".into()]);
        b.set_identity(0, vec![f.one(), f.zero()]);
        b.set_compose(0, 0, 0, 0, 0, vec![(0, f.one())]);
        b.set_compose(0, 0, 0, 0, 1, vec![(1, f.one())]);
        b.set_compose(0, 0, 0, 1, 0, vec![(1, f.one())]);
        if break_assoc {
            // e∘e = e is associative but not nilpotent; e∘e = 1 breaks locality.
            b.set_compose(0, 0, 0, 1, 1, vec![(0, f.one())]);
        }
        if rad_declared {
            b.set_radical(0, vec![vec![f.zero(), f.one()]]);
        }
        b.build().unwrap()
    }

    #[test]
    fn dual_numbers_with_radical_are_local() {
        assert!(validate_datum(&dual_numbers(true, false)).is_valid());
    }

    #[test]
    fn missing_radical_breaks_division() {
        let r = validate_datum(&dual_numbers(false, false));
        assert!(matches!(r.violations.as_slice(), [Violation::QuotientNotDivision { .. }]), "{r:?}");
    }

    #[test]
    fn non_nilpotent_radical_is_reported() {
        let r = validate_datum(&dual_numbers(true, true));
        assert!(r.violations.iter().any(|v| matches!(v, Violation::RadicalNotIdeal { .. } | Violation::RadicalNotNilpotent { .. })), "{r:?}");
    }

    #[test]
    fn associativity_violation_names_the_triple() {
        // Arrow X -a-> Y plus b: Y -> Y with b∘b = 0 but b∘a = a breaks
        // (b∘b)∘a = 0 vs b∘(b∘a) = b∘a = a.
        let f = FieldSpec::default_prime();
        let pts = vec![PointInfo { id: "X".into(), locally_free: true }, PointInfo { id: "Y".into(), locally_free: true }];
        let mut b = DatumBuilder::new(f, pts);
        b.set_hom(0, 0, vec!["1_X".into()]);
        b.set_hom(1, 1, vec!["1_Y".into(), "b".into()]);
        b.set_hom(0, 1, vec!["a".into()]);
        b.set_identity(0, vec![f.one()]);
        b.set_identity(1, vec![f.one(), f.zero()]);
        b.set_radical(1, vec![vec![f.zero(), f.one()]]);
        b.set_compose(0, 0, 0, 0, 0, vec![(0, f.one())]);
        b.set_compose(0, 0, 1, 0, 0, vec![(0, f.one())]);
        b.set_compose(0, 1, 1, 0, 0, vec![(0, f.one())]);
        b.set_compose(1, 1, 1, 0, 0, vec![(0, f.one())]);
        b.set_compose(1, 1, 1, 0, 1, vec![(1, f.one())]);
        b.set_compose(1, 1, 1, 1, 0, vec![(1, f.one())]);
        b.set_compose(0, 1, 1, 1, 0, vec![(0, f.one())]);
        let r = validate_datum(&b.build().unwrap());
        assert!(
            r.violations.contains(&Violation::Associativity { h: "b".into(), g: "b".into(), f: "a".into() }),
            "{r:?}"
        );
    }

    #[test]
    fn isomorphic_points_detected() {
        // Two copies of one simple object joined by mutually inverse maps.
        let f = FieldSpec::default_prime();
        let pts = vec![PointInfo { id: "A".into(), locally_free: true }, PointInfo { id: "B".into(), locally_free: true }];
        let mut b = DatumBuilder::new(f, pts);
        let names = [["1_A", "u"], ["v", "1_B"]];
        for x in 0..2 {
            for y in 0..2 {
                b.set_hom(x, y, vec![names[x][y].into()]);
                for z in 0..2 {
                    b.set_compose(x, y, z, 0, 0, vec![(0, f.one())]);
                }
            }
            b.set_identity(x, vec![f.one()]);
        }
        let r = validate_datum(&b.build().unwrap());
        assert!(r.violations.contains(&Violation::IsomorphicPoints { x: "A".into(), y: "B".into() }), "{r:?}");
    }
}
