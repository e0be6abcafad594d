//! Graded modules over R = k[x,y]/(x^2), deg x = deg y = 1.
//!
//! An element of R_e is stored as (a, b) meaning a·y^e + b·x·y^(e-1); the
//! x-part is zero in degree 0. A map of degree d is the list of generator
//! images, generator i going to R_(deg_i + d). Stable homs are taken modulo
//! maps through free modules and modulo y^T, which keeps every hom space
//! finite.

use super::oracle::{Rep, RingModel};
use crate::catdatum::PointInfo;
use crate::error::{Error, Result};
use crate::linalg::{ExactMatrix, FieldSpec, Scalar, Subspace};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Ideal {
    /// The free module R.
    Free,
    /// I = (x).
    X,
    /// I_n = (x, y^n).
    XY(usize),
}

impl Ideal {
    pub fn id(&self) -> String {
        match self {
            Ideal::Free => "R".into(),
            Ideal::X => "I".into(),
            Ideal::XY(n) => format!("I{n}"),
        }
    }

    pub fn parse(id: &str) -> Option<Ideal> {
        match id {
            "R" => Some(Ideal::Free),
            "I" => Some(Ideal::X),
            _ => id.strip_prefix('I').and_then(|s| s.parse().ok()).filter(|&n| n >= 1).map(Ideal::XY),
        }
    }
}

/// Homogeneous element of R.
#[derive(Clone, Debug)]
struct Elem {
    deg: i64,
    a: Scalar,
    b: Scalar,
}

struct Presentation {
    gens: Vec<Elem>,
    /// relation[k][i] is the coefficient of generator i, if any.
    relations: Vec<Vec<Option<Elem>>>,
}

fn presentation(f: FieldSpec, m: Ideal) -> Presentation {
    let e = |deg: i64, a: i64, b: i64| Elem { deg, a: f.from_i64(a), b: f.from_i64(b) };
    match m {
        Ideal::Free => Presentation { gens: vec![e(0, 1, 0)], relations: vec![] },
        Ideal::X => Presentation { gens: vec![e(1, 0, 1)], relations: vec![vec![Some(e(1, 0, 1))]] },
        Ideal::XY(n) => {
            let n = n as i64;
            Presentation {
                gens: vec![e(1, 0, 1), e(n, 1, 0)],
                relations: vec![vec![Some(e(1, 0, 1)), None], vec![Some(e(n, 1, 0)), Some(e(1, 0, -1))]],
            }
        }
    }
}

pub(crate) struct AinfModel {
    field: FieldSpec,
    trunc: i64,
    points: Vec<PointInfo>,
    ideals: Vec<Ideal>,
    pres: Vec<Presentation>,
    free: Presentation,
    /// Surviving degree window per ordered pair.
    windows: Vec<Vec<i64>>,
}

impl AinfModel {
    pub fn new(field: FieldSpec, trunc: usize, ideals: Vec<Ideal>) -> Result<Self> {
        if field.characteristic() == 2 {
            return Err(Error::Generation("the graded model refuses characteristic 2".into()));
        }
        if ideals.contains(&Ideal::Free) {
            return Err(Error::input("the free module is not a point"));
        }
        let points = ideals.iter().map(|m| PointInfo { id: m.id(), locally_free: *m != Ideal::X }).collect();
        let pres = ideals.iter().map(|&m| presentation(field, m)).collect();
        let mut model = AinfModel {
            field,
            trunc: trunc as i64,
            points,
            ideals,
            pres,
            free: presentation(field, Ideal::Free),
            windows: Vec::new(),
        };
        let n = model.ideals.len();
        let mut windows = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let table = model.degree_table(i, j)?;
                windows.push(table.into_iter().filter(|&(_, q)| q > 0).map(|(d, _)| d).collect());
            }
        }
        model.windows = windows;
        Ok(model)
    }

    /// Range of degrees examined for maps i -> j and the top degree at
    /// which the quotient must already vanish.
    fn degree_range(&self, i: usize, j: usize) -> (i64, i64) {
        let maxdeg = |p: &Presentation| p.gens.iter().map(|g| g.deg).max().unwrap_or(0);
        let lo = -maxdeg(&self.pres[i]);
        let hi = self.trunc + 2 * maxdeg(&self.pres[i]).max(maxdeg(&self.pres[j])) + 2;
        (lo, hi)
    }

    /// (degree, dim of the stable quotient) over the examined range; fails
    /// unless the last two degrees are already zero.
    pub fn degree_table(&self, i: usize, j: usize) -> Result<Vec<(i64, usize)>> {
        let (lo, hi) = self.degree_range(i, j);
        let table: Vec<(i64, usize)> = (lo..=hi)
            .map(|d| {
                let hom = self.maps(&self.pres[i], &self.pres[j], d, false);
                let null = Subspace::spanned_by(self.field, 2 * self.pres[i].gens.len(), &self.null_vectors(i, j, d));
                (d, hom.len() - null.dim())
            })
            .collect();
        if table.iter().rev().take(2).any(|&(_, q)| q > 0) {
            return Err(Error::Generation(format!(
                "stable maps {} -> {} do not vanish by degree {hi}; raise the truncation degree",
                self.points[i].id, self.points[j].id
            )));
        }
        Ok(table)
    }

    /// Total stable dimension per ordered pair.
    pub fn total_dims(&self) -> Vec<Vec<usize>> {
        let n = self.ideals.len();
        (0..n).map(|i| (0..n).map(|j| self.windows[i * n + j].iter().map(|&d| self.stable_dim_in(i, j, d)).sum()).collect()).collect()
    }

    fn stable_dim_in(&self, i: usize, j: usize, d: i64) -> usize {
        let hom = self.maps(&self.pres[i], &self.pres[j], d, false);
        let null = Subspace::spanned_by(self.field, 2 * self.pres[i].gens.len(), &self.null_vectors(i, j, d));
        hom.len() - null.dim()
    }

    /// Basis of the degree-e part of the submodule generated by `gens`, in
    /// (a, b) coordinates.
    fn span_in_degree(&self, gens: &[Elem], e: i64) -> Vec<[Scalar; 2]> {
        let mut out = Vec::new();
        for g in gens {
            let s = e - g.deg;
            for r in monomials(self.field, s) {
                let p = mul(self.field, &r, g);
                out.push([p.a, p.b]);
            }
        }
        out
    }

    /// Maps of degree d from the module presented by `src` into the ideal
    /// generated by `dst`, as concatenated (a, b) images of the generators.
    fn maps(&self, src: &Presentation, dst: &Presentation, d: i64, reversed: bool) -> Vec<Vec<Scalar>> {
        let f = self.field;
        let ng = src.gens.len();
        let nvars = 2 * ng;
        let var = |k: usize| if reversed { nvars - 1 - k } else { k };
        let one = f.one();
        let mut rows: Vec<Vec<Scalar>> = Vec::new();
        let unit_row = |k: usize| {
            let mut r = vec![f.zero(); nvars];
            r[var(k)] = one.clone();
            r
        };
        for (i, g) in src.gens.iter().enumerate() {
            let e = g.deg + d;
            if e < 0 {
                rows.push(unit_row(2 * i));
                rows.push(unit_row(2 * i + 1));
                continue;
            }
            if e == 0 {
                rows.push(unit_row(2 * i + 1));
            }
            // The image must lie in the target ideal: annihilate with every
            // functional vanishing on its degree-e part.
            let span = self.span_in_degree(&dst.gens, e);
            let basis = if span.is_empty() {
                ExactMatrix::zeros(f, 0, 2)
            } else {
                ExactMatrix::from_rows(f, 2, span.into_iter().map(|p| p.to_vec()).collect()).expect("two columns")
            };
            for w in basis.nullspace() {
                let mut r = vec![f.zero(); nvars];
                r[var(2 * i)] = w[0].clone();
                r[var(2 * i + 1)] = w[1].clone();
                rows.push(r);
            }
        }
        for rel in &src.relations {
            // Σ_i r_i · u_i = 0 in both coordinates.
            let mut ra = vec![f.zero(); nvars];
            let mut rb = vec![f.zero(); nvars];
            for (i, c) in rel.iter().enumerate() {
                let Some(c) = c else { continue };
                // (ca, cb)·(a, b) = (ca·a, ca·b + cb·a).
                ra[var(2 * i)] = f.add(&ra[var(2 * i)], &c.a);
                rb[var(2 * i + 1)] = f.add(&rb[var(2 * i + 1)], &c.a);
                rb[var(2 * i)] = f.add(&rb[var(2 * i)], &c.b);
            }
            rows.push(ra);
            rows.push(rb);
        }
        let m = ExactMatrix::from_rows(f, nvars, rows).expect("rows have nvars entries");
        m.nullspace().into_iter().map(|v| (0..nvars).map(|k| v[var(k)].clone()).collect()).collect()
    }

    /// Maps through a free module plus y^T times all maps.
    fn null_vectors(&self, i: usize, j: usize, d: i64) -> Vec<Vec<Scalar>> {
        let f = self.field;
        let src = &self.pres[i];
        let dst = &self.pres[j];
        let mut out = Vec::new();
        for h in &dst.gens {
            for psi in self.maps(src, &self.free, d - h.deg, false) {
                let mut v = Vec::with_capacity(psi.len());
                for (k, g) in src.gens.iter().enumerate() {
                    let u = Elem { deg: g.deg + d - h.deg, a: psi[2 * k].clone(), b: psi[2 * k + 1].clone() };
                    let p = mul(f, &u, h);
                    v.push(p.a);
                    v.push(p.b);
                }
                out.push(v);
            }
        }
        // Multiplying by y^T leaves (a, b) coordinates unchanged.
        out.extend(self.maps(src, dst, d - self.trunc, false));
        out
    }

    /// Writes `u`, an element of the ideal generated by `gens`, as
    /// Σ c_j · gens[j].
    fn express(&self, gens: &[Elem], u: &Elem) -> Vec<Elem> {
        let f = self.field;
        let mut cols = Vec::new();
        let mut labels = Vec::new();
        for (j, g) in gens.iter().enumerate() {
            for (t, r) in monomials(f, u.deg - g.deg).into_iter().enumerate() {
                let p = mul(f, &r, g);
                cols.push(vec![p.a, p.b]);
                labels.push((j, t));
            }
        }
        let mut coeffs: Vec<Elem> =
            gens.iter().map(|g| Elem { deg: u.deg - g.deg, a: f.zero(), b: f.zero() }).collect();
        if cols.is_empty() {
            return coeffs;
        }
        let m = ExactMatrix::from_columns(f, 2, &cols);
        let rhs = ExactMatrix::from_columns(f, 2, &[vec![u.a.clone(), u.b.clone()]]);
        let x = m.solve_right(&rhs).expect("two rows").expect("element lies in the ideal");
        for (k, &(j, t)) in labels.iter().enumerate() {
            let c = x.get(k, 0).clone();
            if t == 0 {
                coeffs[j].a = c;
            } else {
                coeffs[j].b = c;
            }
        }
        coeffs
    }
}

/// Monomial basis of R_s: y^s, then x·y^(s-1).
fn monomials(f: FieldSpec, s: i64) -> Vec<Elem> {
    match s {
        s if s < 0 => vec![],
        0 => vec![Elem { deg: 0, a: f.one(), b: f.zero() }],
        s => vec![Elem { deg: s, a: f.one(), b: f.zero() }, Elem { deg: s, a: f.zero(), b: f.one() }],
    }
}

fn mul(f: FieldSpec, p: &Elem, q: &Elem) -> Elem {
    Elem { deg: p.deg + q.deg, a: f.mul(&p.a, &q.a), b: f.add(&f.mul(&p.a, &q.b), &f.mul(&p.b, &q.a)) }
}

impl RingModel for AinfModel {
    fn field(&self) -> FieldSpec {
        self.field
    }

    fn points(&self) -> &[PointInfo] {
        &self.points
    }

    fn degrees(&self, i: usize, j: usize) -> Vec<i64> {
        self.windows[i * self.ideals.len() + j].clone()
    }

    fn hom_basis(&self, i: usize, j: usize, degree: i64, reversed: bool) -> Vec<Vec<Scalar>> {
        self.maps(&self.pres[i], &self.pres[j], degree, reversed)
    }

    fn null_span(&self, i: usize, j: usize, degree: i64) -> Vec<Vec<Scalar>> {
        self.null_vectors(i, j, degree)
    }

    fn compose(&self, i: usize, j: usize, _k: usize, g: &Rep, f: &Rep) -> Rep {
        let fs = self.field;
        let src = &self.pres[i];
        let mid = &self.pres[j];
        let g_images: Vec<Elem> = mid
            .gens
            .iter()
            .enumerate()
            .map(|(t, h)| Elem { deg: h.deg + g.degree, a: g.coords[2 * t].clone(), b: g.coords[2 * t + 1].clone() })
            .collect();
        let mut coords = Vec::with_capacity(2 * src.gens.len());
        for (s, h) in src.gens.iter().enumerate() {
            let u = Elem { deg: h.deg + f.degree, a: f.coords[2 * s].clone(), b: f.coords[2 * s + 1].clone() };
            let mut acc = Elem { deg: u.deg + g.degree, a: fs.zero(), b: fs.zero() };
            if u.deg >= 0 {
                for (c, gi) in self.express(&mid.gens, &u).iter().zip(&g_images) {
                    let p = mul(fs, c, gi);
                    acc.a = fs.add(&acc.a, &p.a);
                    acc.b = fs.add(&acc.b, &p.b);
                }
            }
            coords.push(acc.a);
            coords.push(acc.b);
        }
        Rep { degree: f.degree + g.degree, coords }
    }

    fn identity(&self, i: usize) -> Rep {
        let coords = self.pres[i].gens.iter().flat_map(|g| [g.a.clone(), g.b.clone()]).collect();
        Rep { degree: 0, coords }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(t: usize, ideals: Vec<Ideal>) -> AinfModel {
        AinfModel::new(FieldSpec::default_prime(), t, ideals).unwrap()
    }

    #[test]
    fn end_of_i_is_truncated_polynomial_ring() {
        let m = model(7, vec![Ideal::X]);
        assert_eq!(m.total_dims(), vec![vec![7]]);
    }

    #[test]
    fn maps_between_i_and_i_n() {
        for n in 1..=4 {
            let m = model(12, vec![Ideal::X, Ideal::XY(n)]);
            let dims = m.total_dims();
            assert_eq!(dims[1][0], n, "stHom(I{n}, I)");
            assert_eq!(dims[0][1], n, "stHom(I, I{n})");
            assert_eq!(m.degrees(1, 0), (1 - n as i64..=0).collect::<Vec<_>>());
            assert_eq!(m.degrees(0, 1), (0..n as i64).collect::<Vec<_>>());
        }
    }

    #[test]
    fn characteristic_two_refused() {
        assert!(AinfModel::new(FieldSpec::prime(2).unwrap(), 6, vec![Ideal::X]).is_err());
    }

    #[test]
    fn ids_round_trip() {
        for m in [Ideal::Free, Ideal::X, Ideal::XY(3)] {
            assert_eq!(Ideal::parse(&m.id()), Some(m));
        }
        assert_eq!(Ideal::parse("I0"), None);
    }
}
