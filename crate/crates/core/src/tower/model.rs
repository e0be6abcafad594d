use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::catdatum::CategoryDatum;
use crate::error::{Error, Result};

pub const TOWER_SCHEMA: &str = "stable-cat-tower/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointFlags {
    pub locally_free: bool,
    pub appears_at_level: usize,
    pub stabilizes_at_level: usize,
    /// Name of the indexed family the point belongs to, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
}

/// Finite truncations of a countable spectrum. Level `k` (1-based) is
/// `levels[k - 1]`; each level's points embed into the next level by the
/// recorded id maps.
#[derive(Clone, Debug)]
pub struct TruncationTower {
    levels: Vec<CategoryDatum>,
    embeddings: Vec<BTreeMap<String, String>>,
    flags: BTreeMap<String, PointFlags>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LevelRef {
    level: usize,
    datum: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EmbeddingFile {
    from: usize,
    to: usize,
    map: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointFile {
    id: String,
    locally_free: bool,
    appears_at_level: usize,
    stabilizes_at_level: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    family: Option<String>,
}

impl PointFile {
    fn new(id: &str, f: &PointFlags) -> Self {
        PointFile {
            id: id.to_string(),
            locally_free: f.locally_free,
            appears_at_level: f.appears_at_level,
            stabilizes_at_level: f.stabilizes_at_level,
            family: f.family.clone(),
        }
    }

    fn flags(&self) -> PointFlags {
        PointFlags {
            locally_free: self.locally_free,
            appears_at_level: self.appears_at_level,
            stabilizes_at_level: self.stabilizes_at_level,
            family: self.family.clone(),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TowerFile {
    schema: String,
    levels: Vec<LevelRef>,
    embeddings: Vec<EmbeddingFile>,
    points: Vec<PointFile>,
}

impl TruncationTower {
    /// Embeddings default to the identity on point ids.
    pub fn new(levels: Vec<CategoryDatum>, flags: BTreeMap<String, PointFlags>) -> Result<Self> {
        let embeddings = levels
            .windows(2)
            .map(|w| w[0].points().iter().map(|p| (p.id.clone(), p.id.clone())).collect())
            .collect();
        Self::with_embeddings(levels, embeddings, flags)
    }

    pub fn with_embeddings(
        levels: Vec<CategoryDatum>,
        embeddings: Vec<BTreeMap<String, String>>,
        flags: BTreeMap<String, PointFlags>,
    ) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::input("a tower needs at least one level"));
        }
        if embeddings.len() + 1 != levels.len() {
            return Err(Error::input("one embedding per pair of consecutive levels"));
        }
        for p in levels.iter().flat_map(|l| l.points()) {
            if !flags.contains_key(&p.id) {
                return Err(Error::input(format!("no flags for point `{}`", p.id)));
            }
        }
        Ok(TruncationTower { levels, embeddings, flags })
    }

    pub fn height(&self) -> usize {
        self.levels.len()
    }

    /// Level `k`, 1-based.
    pub fn level(&self, k: usize) -> &CategoryDatum {
        &self.levels[k - 1]
    }

    pub fn top(&self) -> &CategoryDatum {
        self.levels.last().expect("nonempty")
    }

    pub fn embedding(&self, from: usize) -> &BTreeMap<String, String> {
        &self.embeddings[from - 1]
    }

    pub fn flags(&self) -> &BTreeMap<String, PointFlags> {
        &self.flags
    }

    pub fn flag(&self, id: &str) -> Result<&PointFlags> {
        self.flags.get(id).ok_or_else(|| Error::UnknownPoint(id.to_string()))
    }

    /// The first `n` levels.
    pub fn truncate(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.height() {
            return Err(Error::input(format!("--top {n} outside 1..={}", self.height())));
        }
        let levels = self.levels[..n].to_vec();
        let embeddings = self.embeddings[..n - 1].to_vec();
        let keep: std::collections::BTreeSet<&str> =
            levels.iter().flat_map(|l| l.points()).map(|p| p.id.as_str()).collect();
        let flags = self.flags.iter().filter(|(k, _)| keep.contains(k.as_str())).map(|(k, v)| (k.clone(), v.clone())).collect();
        Self::with_embeddings(levels, embeddings, flags)
    }

    /// Disjoint union level by level; ids of `other` get `prefix`.
    pub fn disjoint_union(&self, other: &TruncationTower, prefix: &str) -> Result<Self> {
        if self.height() != other.height() {
            return Err(Error::input("towers of different heights"));
        }
        let levels = self
            .levels
            .iter()
            .zip(&other.levels)
            .map(|(a, b)| a.disjoint_union(b, prefix))
            .collect::<Result<Vec<_>>>()?;
        let embeddings = self
            .embeddings
            .iter()
            .zip(&other.embeddings)
            .map(|(a, b)| {
                let mut m = a.clone();
                m.extend(b.iter().map(|(k, v)| (format!("{prefix}{k}"), format!("{prefix}{v}"))));
                m
            })
            .collect();
        let mut flags = self.flags.clone();
        for (k, v) in &other.flags {
            let mut v = v.clone();
            v.family = v.family.map(|f| format!("{prefix}{f}"));
            flags.insert(format!("{prefix}{k}"), v);
        }
        Self::with_embeddings(levels, embeddings, flags)
    }

    /// Reads `tower.json`, or a directory containing it; level files are
    /// resolved relative to it.
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file_path: PathBuf = if path.is_dir() { path.join("tower.json") } else { path.to_path_buf() };
        let dir = file_path.parent().map(Path::to_path_buf).unwrap_or_default();
        let s = std::fs::read_to_string(&file_path)?;
        let file: TowerFile =
            serde_json::from_str(&s).map_err(|e| Error::input(format!("{}: {e}", file_path.display())))?;
        if file.schema != TOWER_SCHEMA {
            return Err(Error::input(format!("{}: schema `{}` is not `{TOWER_SCHEMA}`", file_path.display(), file.schema)));
        }
        let mut levels = Vec::new();
        for (i, l) in file.levels.iter().enumerate() {
            if l.level != i + 1 {
                return Err(Error::input(format!("levels[{i}]: expected level {}", i + 1)));
            }
            levels.push(CategoryDatum::read(dir.join(&l.datum))?);
        }
        let mut embeddings = Vec::new();
        for (i, e) in file.embeddings.iter().enumerate() {
            if e.from != i + 1 || e.to != i + 2 {
                return Err(Error::input(format!("embeddings[{i}]: expected {} -> {}", i + 1, i + 2)));
            }
            embeddings.push(e.map.clone());
        }
        let flags = file.points.iter().map(|p| (p.id.clone(), p.flags())).collect();
        Self::with_embeddings(levels, embeddings, flags)
    }

    pub fn level_file_name(k: usize) -> String {
        format!("level-{k}.json")
    }

    /// The tower file contents. Points are listed in top-level order.
    pub fn to_json_string(&self) -> String {
        let levels = (1..=self.height()).map(|k| LevelRef { level: k, datum: Self::level_file_name(k) }).collect();
        let embeddings = self
            .embeddings
            .iter()
            .enumerate()
            .map(|(i, m)| EmbeddingFile { from: i + 1, to: i + 2, map: m.clone() })
            .collect();
        let points = self.top().points().iter().map(|p| PointFile::new(&p.id, &self.flags[&p.id])).collect();
        let file = TowerFile { schema: TOWER_SCHEMA.into(), levels, embeddings, points };
        let mut s = serde_json::to_string_pretty(&file).expect("tower serializes");
        s.push('\n');
        s
    }

    /// Writes `tower.json` and one datum file per level into `dir`.
    pub fn write_dir(&self, dir: impl AsRef<Path>) -> Result<Vec<(String, String)>> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for k in 1..=self.height() {
            let name = Self::level_file_name(k);
            let s = self.level(k).to_json_string();
            std::fs::write(dir.join(&name), &s)?;
            written.push((name, s));
        }
        let s = self.to_json_string();
        std::fs::write(dir.join("tower.json"), &s)?;
        written.push(("tower.json".into(), s));
        Ok(written)
    }
}
