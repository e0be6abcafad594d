//! `stable-cat-datum/1` JSON encoding.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CategoryDatum, DatumBuilder, PointInfo};
use crate::error::{Error, Result};
use crate::linalg::{FieldSpec, Scalar};

pub const DATUM_SCHEMA: &str = "stable-cat-datum/1";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct Term {
    pub basis: String,
    pub coeff: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointFile {
    id: String,
    locally_free: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HomFile {
    src: String,
    dst: String,
    dim: usize,
    basis: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComposeFile {
    g: String,
    f: String,
    result: Vec<Term>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IdentityFile {
    point: String,
    element: Vec<Term>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RadicalFile {
    point: String,
    basis_elements: Vec<Vec<Term>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DatumFile {
    schema: String,
    field: FieldSpec,
    points: Vec<PointFile>,
    hom: Vec<HomFile>,
    #[serde(default)]
    compose: Vec<ComposeFile>,
    identities: Vec<IdentityFile>,
    #[serde(default)]
    radical: Vec<RadicalFile>,
}

pub(crate) fn terms_of(field: FieldSpec, names: &[String], v: &[Scalar]) -> Vec<Term> {
    names
        .iter()
        .zip(v)
        .filter(|(_, c)| !field.is_zero(c))
        .map(|(n, c)| Term { basis: n.clone(), coeff: field.format(c) })
        .collect()
}

pub(crate) fn parse_terms(field: FieldSpec, terms: &[Term], at: &str) -> Result<Vec<(String, Scalar)>> {
    terms
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let c = field.parse(&t.coeff).map_err(|e| Error::input(format!("{at}[{i}].coeff: {e}")))?;
            Ok((t.basis.clone(), c))
        })
        .collect()
}

impl CategoryDatum {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: DatumFile = serde_json::from_str(s).map_err(|e| Error::input(format!("datum: {e}")))?;
        from_file(file)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let s = std::fs::read_to_string(path)?;
        Self::from_json_str(&s).map_err(|e| match e {
            Error::Input(m) => Error::Input(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_json_string(&self) -> String {
        let f = self.field;
        let n = self.n_points();
        let points = self.points.iter().map(|p| PointFile { id: p.id.clone(), locally_free: p.locally_free }).collect();
        let mut hom = Vec::new();
        let mut compose = Vec::new();
        for x in 0..n {
            for y in 0..n {
                hom.push(HomFile {
                    src: self.points[x].id.clone(),
                    dst: self.points[y].id.clone(),
                    dim: self.hom_dim(x, y),
                    basis: self.hom_basis(x, y).to_vec(),
                });
            }
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    for g in 0..self.hom_dim(y, z) {
                        for fi in 0..self.hom_dim(x, y) {
                            let r = self.compose_basis(x, y, z, g, fi);
                            if r.is_empty() {
                                continue;
                            }
                            compose.push(ComposeFile {
                                g: self.hom_basis(y, z)[g].clone(),
                                f: self.hom_basis(x, y)[fi].clone(),
                                result: r
                                    .iter()
                                    .map(|(k, c)| Term { basis: self.hom_basis(x, z)[*k].clone(), coeff: f.format(c) })
                                    .collect(),
                            });
                        }
                    }
                }
            }
        }
        let identities = (0..n)
            .map(|x| IdentityFile {
                point: self.points[x].id.clone(),
                element: terms_of(f, self.hom_basis(x, x), self.identity(x)),
            })
            .collect();
        let radical = (0..n)
            .map(|x| RadicalFile {
                point: self.points[x].id.clone(),
                basis_elements: self.radical(x).iter().map(|v| terms_of(f, self.hom_basis(x, x), v)).collect(),
            })
            .collect();
        let file = DatumFile { schema: DATUM_SCHEMA.into(), field: f, points, hom, compose, identities, radical };
        let mut s = serde_json::to_string_pretty(&file).expect("datum serializes");
        s.push('\n');
        s
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json_string())?;
        Ok(())
    }
}

fn from_file(file: DatumFile) -> Result<CategoryDatum> {
    if file.schema != DATUM_SCHEMA {
        return Err(Error::input(format!("schema `{}` is not `{DATUM_SCHEMA}`", file.schema)));
    }
    let field = file.field;
    let points: Vec<PointInfo> =
        file.points.iter().map(|p| PointInfo { id: p.id.clone(), locally_free: p.locally_free }).collect();
    let lookup = |id: &str, at: &str| {
        points.iter().position(|p| p.id == id).ok_or_else(|| Error::input(format!("{at}: unknown point `{id}`")))
    };
    let mut b = DatumBuilder::new(field, points.clone());
    let mut dims = std::collections::HashMap::new();
    for (i, h) in file.hom.iter().enumerate() {
        let at = format!("hom[{i}]");
        let x = lookup(&h.src, &at)?;
        let y = lookup(&h.dst, &at)?;
        if h.dim != h.basis.len() {
            return Err(Error::input(format!("{at}: dim {} but {} basis names", h.dim, h.basis.len())));
        }
        if dims.insert((x, y), h.dim).is_some() {
            return Err(Error::input(format!("{at}: duplicate hom entry")));
        }
        b.set_hom(x, y, h.basis.clone());
    }
    // Resolve basis names against the declared homs before composition.
    let mut names = std::collections::HashMap::new();
    for h in &file.hom {
        let x = lookup(&h.src, "hom")?;
        let y = lookup(&h.dst, "hom")?;
        for (k, n) in h.basis.iter().enumerate() {
            if names.insert(n.clone(), (x, y, k)).is_some() {
                return Err(Error::input(format!("duplicate basis name `{n}`")));
            }
        }
    }
    let resolve = |n: &str, at: &str| names.get(n).copied().ok_or_else(|| Error::input(format!("{at}: unknown basis `{n}`")));
    let mut seen_comp = std::collections::HashSet::new();
    for (i, c) in file.compose.iter().enumerate() {
        let at = format!("compose[{i}]");
        let (y, z, gi) = resolve(&c.g, &at)?;
        let (x, y2, fi) = resolve(&c.f, &at)?;
        if y != y2 {
            return Err(Error::input(format!("{at}: `{}` and `{}` are not composable", c.g, c.f)));
        }
        if !seen_comp.insert((c.g.clone(), c.f.clone())) {
            return Err(Error::input(format!("{at}: duplicate composition entry")));
        }
        let mut result = Vec::new();
        for (j, (name, coeff)) in parse_terms(field, &c.result, &format!("{at}.result"))?.into_iter().enumerate() {
            let (rx, rz, k) = resolve(&name, &format!("{at}.result[{j}]"))?;
            if rx != x || rz != z {
                return Err(Error::input(format!("{at}.result[{j}]: `{name}` lies in the wrong hom space")));
            }
            result.push((k, coeff));
        }
        b.set_compose(x, y, z, gi, fi, merge(field, result));
    }
    let element = |x: usize, terms: &[Term], at: &str| -> Result<Vec<Scalar>> {
        let dim = dims.get(&(x, x)).copied().unwrap_or(0);
        let mut v = vec![field.zero(); dim];
        for (j, (name, coeff)) in parse_terms(field, terms, at)?.into_iter().enumerate() {
            let (a, bb, k) = resolve(&name, &format!("{at}[{j}]"))?;
            if a != x || bb != x {
                return Err(Error::input(format!("{at}[{j}]: `{name}` is not an endomorphism of `{}`", points[x].id)));
            }
            v[k] = field.add(&v[k], &coeff);
        }
        Ok(v)
    };
    let mut have_id = vec![false; points.len()];
    for (i, idf) in file.identities.iter().enumerate() {
        let at = format!("identities[{i}]");
        let x = lookup(&idf.point, &at)?;
        if std::mem::replace(&mut have_id[x], true) {
            return Err(Error::input(format!("{at}: duplicate identity")));
        }
        b.set_identity(x, element(x, &idf.element, &format!("{at}.element"))?);
    }
    let mut have_rad = vec![false; points.len()];
    for (i, r) in file.radical.iter().enumerate() {
        let at = format!("radical[{i}]");
        let x = lookup(&r.point, &at)?;
        if std::mem::replace(&mut have_rad[x], true) {
            return Err(Error::input(format!("{at}: duplicate radical")));
        }
        let basis = r
            .basis_elements
            .iter()
            .enumerate()
            .map(|(j, t)| element(x, t, &format!("{at}.basis_elements[{j}]")))
            .collect::<Result<Vec<_>>>()?;
        b.set_radical(x, basis);
    }
    b.build()
}

fn merge(field: FieldSpec, mut terms: Vec<(usize, Scalar)>) -> Vec<(usize, Scalar)> {
    terms.sort_by_key(|(k, _)| *k);
    let mut out: Vec<(usize, Scalar)> = Vec::new();
    for (k, c) in terms {
        match out.last_mut() {
            Some((lk, lc)) if *lk == k => *lc = field.add(lc, &c),
            _ => out.push((k, c)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::arrow;
    use super::*;

    #[test]
    fn json_round_trip_is_byte_stable() {
        let d = arrow();
        let s = d.to_json_string();
        let back = CategoryDatum::from_json_str(&s).unwrap();
        assert_eq!(back, d);
        assert_eq!(back.to_json_string(), s);
    }

    #[test]
    fn unknown_fields_rejected() {
        let s = arrow().to_json_string().replacen("\"schema\"", "\"bogus\": 1,\n  \"schema\"", 1);
        assert!(matches!(CategoryDatum::from_json_str(&s), Err(Error::Input(_))));
    }

    #[test]
    fn errors_carry_location() {
        let s = arrow().to_json_string().replace("\"result\": [\n        {\n          \"basis\": \"a\"", "\"result\": [\n        {\n          \"basis\": \"nope\"");
        let err = CategoryDatum::from_json_str(&s).unwrap_err().to_string();
        assert!(err.contains("compose[") && err.contains("nope"), "{err}");
    }

    #[test]
    fn wrong_schema_rejected() {
        let s = arrow().to_json_string().replace(DATUM_SCHEMA, "stable-cat-datum/9");
        assert!(CategoryDatum::from_json_str(&s).is_err());
    }
}
