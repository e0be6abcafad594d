use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::oracle::Rep;
use crate::error::{Error, Result};
use crate::linalg::FieldSpec;

pub const MANIFEST_SCHEMA: &str = "pack-manifest/1";
pub const GENERATOR_VERSION: &str = concat!("spectra-kit ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum OracleParams {
    /// k[x]/(x^(n+1)).
    An { n: usize, field: FieldSpec },
    /// Graded k[x,y]/(x^2) truncated at y-degree `trunc_degree`.
    Ainf { levels: usize, trunc_degree: usize, field: FieldSpec },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileHash {
    pub path: String,
    pub sha256: String,
}

/// Model-level representative of one basis element: its degree and the
/// nonzero coordinates of the generator images.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepresentativeEntry {
    pub basis: String,
    pub degree: i64,
    pub len: usize,
    pub coords: Vec<(usize, String)>,
}

/// Total stable dimension of one ordered pair at truncation T and T+1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilizationEntry {
    pub src: String,
    pub dst: String,
    pub dim_at_t: usize,
    pub dim_at_t_plus_1: usize,
    pub degrees: Vec<(i64, usize)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PackManifest {
    pub schema: String,
    pub pack_id: String,
    pub generator: String,
    pub oracle: OracleParams,
    pub files: Vec<FileHash>,
    pub representatives: Vec<RepresentativeEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub stabilization: Vec<StabilizationEntry>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl RepresentativeEntry {
    pub(crate) fn from_rep(field: FieldSpec, basis: &str, r: &Rep) -> Self {
        RepresentativeEntry {
            basis: basis.to_string(),
            degree: r.degree,
            len: r.coords.len(),
            coords: r
                .coords
                .iter()
                .enumerate()
                .filter(|(_, c)| !field.is_zero(c))
                .map(|(k, c)| (k, field.format(c)))
                .collect(),
        }
    }

    pub(crate) fn to_rep(&self, field: FieldSpec) -> Result<Rep> {
        let mut coords = vec![field.zero(); self.len];
        for (k, c) in &self.coords {
            let slot = coords
                .get_mut(*k)
                .ok_or_else(|| Error::input(format!("representative of `{}`: index {k} out of range", self.basis)))?;
            *slot = field.parse(c)?;
        }
        Ok(Rep { degree: self.degree, coords })
    }
}

impl PackManifest {
    pub fn field(&self) -> FieldSpec {
        match self.oracle {
            OracleParams::An { field, .. } | OracleParams::Ainf { field, .. } => field,
        }
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let s = std::fs::read_to_string(path)?;
        let m: PackManifest =
            serde_json::from_str(&s).map_err(|e| Error::input(format!("{}: {e}", path.display())))?;
        if m.schema != MANIFEST_SCHEMA {
            return Err(Error::input(format!("{}: schema `{}` is not `{MANIFEST_SCHEMA}`", path.display(), m.schema)));
        }
        Ok(m)
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}
