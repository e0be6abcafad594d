use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::FpFunctor;
use crate::catdatum::{AddMorphism, AddObject, CategoryDatum};
use crate::error::{Error, Result};

pub const FUNCTOR_SCHEMA: &str = "fp-functor/1";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Term {
    basis: String,
    coeff: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Block {
    src: String,
    src_copy: usize,
    dst: String,
    dst_copy: usize,
    element: Vec<Term>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctorFile {
    schema: String,
    source: BTreeMap<String, usize>,
    target: BTreeMap<String, usize>,
    #[serde(default)]
    blocks: Vec<Block>,
}

/// Summands sorted by point order; copy `k` of point x is the k-th summand equal to x.
fn object(d: &CategoryDatum, m: &BTreeMap<String, usize>) -> Result<AddObject> {
    let mut mult = BTreeMap::new();
    for (id, &k) in m {
        mult.insert(d.point_index(id)?, k);
    }
    Ok(AddObject::from_multiplicities(&mult))
}

fn position(obj: &AddObject, x: usize, copy: usize, what: &str, id: &str) -> Result<usize> {
    obj.summands()
        .iter()
        .enumerate()
        .filter(|(_, &s)| s == x)
        .nth(copy)
        .map(|(i, _)| i)
        .ok_or_else(|| Error::input(format!("{what} has no copy {copy} of `{id}`")))
}

impl FpFunctor {
    pub fn from_json_str(d: &CategoryDatum, s: &str) -> Result<Self> {
        let file: FunctorFile = serde_json::from_str(s)?;
        if file.schema != FUNCTOR_SCHEMA {
            return Err(Error::input(format!("schema `{}` is not {FUNCTOR_SCHEMA}", file.schema)));
        }
        let source = object(d, &file.source)?;
        let target = object(d, &file.target)?;
        let mut g = AddMorphism::zero(d, source, target);
        for b in &file.blocks {
            let (x, y) = (d.point_index(&b.src)?, d.point_index(&b.dst)?);
            let s = position(&g.source, x, b.src_copy, "source", &b.src)?;
            let t = position(&g.target, y, b.dst_copy, "target", &b.dst)?;
            let mut terms = Vec::with_capacity(b.element.len());
            for term in &b.element {
                terms.push((term.basis.clone(), d.field().parse(&term.coeff)?));
            }
            g.blocks[t][s] = d.element_from_terms(x, y, &terms)?;
        }
        Ok(FpFunctor::new(g))
    }

    pub fn read(d: &CategoryDatum, path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let s = std::fs::read_to_string(path).map_err(|e| Error::input(format!("{}: {e}", path.display())))?;
        Self::from_json_str(d, &s)
    }

    /// The fp-functor/1 document as a JSON value.
    pub fn to_json_value(&self, d: &CategoryDatum) -> serde_json::Value {
        let f = d.field();
        let g = &self.presentation;
        let names = |obj: &AddObject| -> BTreeMap<String, usize> {
            obj.multiplicities().into_iter().map(|(x, k)| (d.point(x).id.clone(), k)).collect()
        };
        let copy = |obj: &AddObject, i: usize| obj.summands()[..i].iter().filter(|&&s| s == obj.summands()[i]).count();
        let mut blocks = Vec::new();
        for (t, &y) in g.target.summands().iter().enumerate() {
            for (s, &x) in g.source.summands().iter().enumerate() {
                let element: Vec<Term> = g.blocks[t][s]
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !f.is_zero(c))
                    .map(|(k, c)| Term { basis: d.hom_basis(x, y)[k].clone(), coeff: f.format(c) })
                    .collect();
                if element.is_empty() {
                    continue;
                }
                blocks.push(Block {
                    src: d.point(x).id.clone(),
                    src_copy: copy(&g.source, s),
                    dst: d.point(y).id.clone(),
                    dst_copy: copy(&g.target, t),
                    element,
                });
            }
        }
        let file = FunctorFile { schema: FUNCTOR_SCHEMA.into(), source: names(&g.source), target: names(&g.target), blocks };
        serde_json::to_value(&file).expect("functor serializes")
    }

    pub fn to_json_string(&self, d: &CategoryDatum) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json_value(d)).expect("functor serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::a;
    use super::super::{eval_dim, simple_quotient};
    use super::*;

    #[test]
    fn round_trip_keeps_dimensions() {
        let d = a(3);
        for m in 0..3 {
            let s = simple_quotient(&d, m).unwrap();
            let text = s.to_json_string(&d);
            let back = FpFunctor::from_json_str(&d, &text).unwrap();
            for x in 0..3 {
                assert_eq!(eval_dim(&d, &s, x).unwrap(), eval_dim(&d, &back, x).unwrap());
            }
            assert_eq!(back.to_json_string(&d), text);
        }
    }

    #[test]
    fn rejects_missing_copy() {
        let d = a(2);
        let text = r#"{"schema":"fp-functor/1","source":{"M1":1},"target":{"M2":1},
            "blocks":[{"src":"M1","src_copy":1,"dst":"M2","dst_copy":0,"element":[]}]}"#;
        assert!(FpFunctor::from_json_str(&d, text).is_err());
    }
}
