use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ClosureSpace, PointSet};
use crate::error::{Error, Result};

pub const TOP_SCHEMA: &str = "finite-top/1";
const MAX_TABLE_POINTS: usize = 12;

/// A finite space given by a closure table: either the closure of every
/// subset, or singleton closures with closure of a union taken as the union.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableSpace {
    points: Vec<String>,
    union_generated: bool,
    /// Indexed by subset bitmask; for union-generated tables only the
    /// singleton entries are meaningful.
    table: Vec<PointSet>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Entry {
    set: Vec<String>,
    closure: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TopFile {
    schema: String,
    points: Vec<String>,
    #[serde(default)]
    union_generated: bool,
    closures: Vec<Entry>,
}

fn mask(pts: &PointSet) -> usize {
    pts.iter().fold(0, |m, &i| m | 1 << i)
}

impl TableSpace {
    /// From the closure of every singleton, extended to unions.
    pub fn from_singletons(points: Vec<String>, singletons: Vec<PointSet>) -> Result<Self> {
        let n = points.len();
        if singletons.len() != n {
            return Err(Error::input("one singleton closure per point is required"));
        }
        Self::check_points(&points)?;
        let mut table = vec![PointSet::new(); 1 << n];
        for (i, c) in singletons.into_iter().enumerate() {
            table[1 << i] = c;
        }
        Ok(TableSpace { points, union_generated: true, table })
    }

    /// From a closure for each subset, indexed by bitmask.
    pub fn from_table(points: Vec<String>, table: Vec<PointSet>) -> Result<Self> {
        Self::check_points(&points)?;
        if table.len() != 1 << points.len() {
            return Err(Error::input("a full closure table needs one entry per subset"));
        }
        Ok(TableSpace { points, union_generated: false, table })
    }

    /// Every subset of `points` is its own closure.
    pub fn discrete(points: Vec<String>) -> Result<Self> {
        let singletons = (0..points.len()).map(|i| [i].into()).collect();
        Self::from_singletons(points, singletons)
    }

    fn check_points(points: &[String]) -> Result<()> {
        if points.len() > MAX_TABLE_POINTS {
            return Err(Error::input(format!("closure tables hold at most {MAX_TABLE_POINTS} points")));
        }
        let mut seen = std::collections::BTreeSet::new();
        for p in points {
            if !seen.insert(p) {
                return Err(Error::input(format!("duplicate point `{p}`")));
            }
        }
        Ok(())
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: TopFile = serde_json::from_str(s)?;
        if file.schema != TOP_SCHEMA {
            return Err(Error::input(format!("schema `{}` is not {TOP_SCHEMA}", file.schema)));
        }
        Self::check_points(&file.points)?;
        let index: BTreeMap<&str, usize> = file.points.iter().enumerate().map(|(i, p)| (p.as_str(), i)).collect();
        let set = |names: &[String]| -> Result<PointSet> {
            names.iter().map(|s| index.get(s.as_str()).copied().ok_or_else(|| Error::UnknownPoint(s.clone()))).collect()
        };
        let n = file.points.len();
        let mut entries: BTreeMap<usize, PointSet> = BTreeMap::new();
        for e in &file.closures {
            let s = set(&e.set)?;
            if entries.insert(mask(&s), set(&e.closure)?).is_some() {
                return Err(Error::input(format!("closure of {:?} given twice", e.set)));
            }
        }
        if file.union_generated {
            let mut singletons = Vec::with_capacity(n);
            for i in 0..n {
                let c = entries
                    .remove(&(1 << i))
                    .ok_or_else(|| Error::input(format!("no closure given for `{}`", file.points[i])))?;
                singletons.push(c);
            }
            if let Some((&m, _)) = entries.iter().find(|(&m, _)| m != 0) {
                return Err(Error::input(format!("union-generated table lists a non-singleton set (mask {m:#b})")));
            }
            Self::from_singletons(file.points, singletons)
        } else {
            let mut table = Vec::with_capacity(1 << n);
            for m in 0..1usize << n {
                let c = entries.remove(&m).ok_or_else(|| {
                    let names: Vec<_> = (0..n).filter(|i| m >> i & 1 == 1).map(|i| file.points[i].clone()).collect();
                    Error::input(format!("no closure given for {names:?}"))
                })?;
                table.push(c);
            }
            Self::from_table(file.points, table)
        }
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let s = std::fs::read_to_string(path).map_err(|e| Error::input(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&s)
    }

    pub fn to_json_string(&self) -> String {
        let names = |s: &PointSet| s.iter().map(|&i| self.points[i].clone()).collect::<Vec<_>>();
        let n = self.points.len();
        let masks: Vec<usize> = if self.union_generated { (0..n).map(|i| 1 << i).collect() } else { (0..1 << n).collect() };
        let closures = masks
            .into_iter()
            .map(|m| {
                let set: PointSet = (0..n).filter(|i| m >> i & 1 == 1).collect();
                Entry { set: names(&set), closure: names(&self.table[m]) }
            })
            .collect();
        let file = TopFile { schema: TOP_SCHEMA.into(), points: self.points.clone(), union_generated: self.union_generated, closures };
        let mut s = serde_json::to_string_pretty(&file).expect("table serializes");
        s.push('\n');
        s
    }
}

impl ClosureSpace for TableSpace {
    fn names(&self) -> Vec<String> {
        self.points.clone()
    }

    fn n_points(&self) -> usize {
        self.points.len()
    }

    fn closure(&self, pts: &PointSet) -> Result<PointSet> {
        if let Some(x) = pts.iter().find(|&&x| x >= self.points.len()) {
            return Err(Error::UnknownPoint(format!("#{x}")));
        }
        if self.union_generated {
            Ok(pts.iter().flat_map(|&i| self.table[1 << i].iter().copied()).collect())
        } else {
            Ok(self.table[mask(pts)].clone())
        }
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub fn dvr() -> TableSpace {
        TableSpace::from_singletons(vec!["eta".into(), "m".into()], vec![[0, 1].into(), [1].into()]).unwrap()
    }

    #[test]
    fn dvr_round_trip() {
        let s = dvr();
        let text = s.to_json_string();
        assert_eq!(TableSpace::from_json_str(&text).unwrap(), s);
        assert_eq!(s.closure(&[0].into()).unwrap(), [0, 1].into());
        assert_eq!(s.closure(&PointSet::new()).unwrap(), PointSet::new());
    }

    #[test]
    fn full_table_needs_every_subset() {
        let text = r#"{"schema":"finite-top/1","points":["a"],"closures":[{"set":["a"],"closure":["a"]}]}"#;
        assert!(TableSpace::from_json_str(text).is_err());
        let text = r#"{"schema":"finite-top/1","points":["a"],"closures":[{"set":[],"closure":[]},{"set":["a"],"closure":["a"]}]}"#;
        assert_eq!(TableSpace::from_json_str(text).unwrap().closure(&[0].into()).unwrap(), [0].into());
    }

    #[test]
    fn rejects_unknown_fields_and_points() {
        assert!(TableSpace::from_json_str(r#"{"schema":"finite-top/1","points":[],"closures":[],"x":1}"#).is_err());
        let text = r#"{"schema":"finite-top/1","points":["a"],"union_generated":true,"closures":[{"set":["a"],"closure":["b"]}]}"#;
        assert!(TableSpace::from_json_str(text).is_err());
    }
}
