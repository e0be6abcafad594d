//! Generated data packs: A_n from k[x]/(x^(n+1)) and the A∞ tower from a
//! graded model of k[x,y]/(x^2), each with a manifest that lets
//! [`verify_pack`] recompute everything from the ring.

mod ainf;
mod an;
mod manifest;
mod oracle;
mod verify;

use std::collections::BTreeMap;
use std::path::Path;

use crate::catdatum::{validate_datum, CategoryDatum};
use crate::error::{Error, Result};
use crate::linalg::FieldSpec;
use crate::tower::{PointFlags, TruncationTower};

pub use an::{an_stable_dim, ArtinianRingSpec};
pub use manifest::{
    sha256_hex, FileHash, OracleParams, PackManifest, RepresentativeEntry, StabilizationEntry, GENERATOR_VERSION,
    MANIFEST_SCHEMA,
};
pub use oracle::Rep;
pub use verify::{manifest_path_for, verify_datum, verify_pack, Certifier, VerifyReport};

use ainf::{AinfModel, Ideal};
use an::AnModel;

/// A generated pack before it is written: datum plus manifest (file hashes
/// are filled in when written).
#[derive(Clone, Debug)]
pub struct GeneratedPack {
    pub datum: CategoryDatum,
    pub manifest: PackManifest,
}

fn representatives(field: FieldSpec, reps: &BTreeMap<String, Rep>) -> Vec<RepresentativeEntry> {
    reps.iter().map(|(name, r)| RepresentativeEntry::from_rep(field, name, r)).collect()
}

pub fn gen_an_pack(spec: ArtinianRingSpec) -> Result<GeneratedPack> {
    let model = AnModel::new(spec)?;
    let (datum, _, reps) = oracle::stable_datum(&model, false)?;
    for i in 0..spec.n {
        for j in 0..spec.n {
            let (want, got) = (an_stable_dim(spec.n, i + 1, j + 1), datum.hom_dim(i, j));
            if want != got {
                return Err(Error::Generation(format!("stHom(M{}, M{}) has dim {got}, closed form gives {want}", i + 1, j + 1)));
            }
        }
    }
    let report = validate_datum(&datum);
    if !report.is_valid() {
        return Err(Error::Generation(format!("generated A{} datum is invalid: {}", spec.n, report.violations[0])));
    }
    let manifest = PackManifest {
        schema: MANIFEST_SCHEMA.into(),
        pack_id: format!("a{}", spec.n),
        generator: GENERATOR_VERSION.into(),
        oracle: OracleParams::An { n: spec.n, field: spec.field },
        files: Vec::new(),
        representatives: representatives(spec.field, &reps),
        stabilization: Vec::new(),
    };
    Ok(GeneratedPack { datum, manifest })
}

/// Writes the datum to `path` and the manifest next to it.
pub fn write_pack(pack: &GeneratedPack, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let s = pack.datum.to_json_string();
    std::fs::write(path, &s)?;
    let name = path.file_name().and_then(|n| n.to_str()).ok_or_else(|| Error::input("output path has no file name"))?;
    let mut manifest = pack.manifest.clone();
    manifest.files = vec![FileHash { path: name.to_string(), sha256: sha256_hex(s.as_bytes()) }];
    std::fs::write(manifest_path_for(path), manifest.to_json_string())?;
    Ok(())
}

pub const AINF_FAMILY: &str = "I_n";

/// Points of level `k` in the A∞ tower: I, I1, ..., Ik.
fn ainf_level_ideals(k: usize) -> Vec<Ideal> {
    std::iter::once(Ideal::X).chain((1..=k).map(Ideal::XY)).collect()
}

#[derive(Clone, Debug)]
pub struct GeneratedTower {
    pub tower: TruncationTower,
    pub manifest: PackManifest,
}

pub fn gen_ainf_tower(levels: usize, trunc_degree: usize, field: FieldSpec) -> Result<GeneratedTower> {
    if levels == 0 {
        return Err(Error::input("a tower needs at least one level"));
    }
    if trunc_degree < 3 * levels {
        return Err(Error::input(format!("truncation degree {trunc_degree} is below 3 x levels = {}", 3 * levels)));
    }
    let ideals = ainf_level_ideals(levels);
    let model = AinfModel::new(field, trunc_degree, ideals.clone())?;
    let (top, _, reps) = oracle::stable_datum(&model, false)?;
    let report = validate_datum(&top);
    if !report.is_valid() {
        return Err(Error::Generation(format!("generated A∞ top level is invalid: {}", report.violations[0])));
    }

    // Evidence: total stable dimensions at T and T+1 must agree except
    // between two points that are not locally free.
    let next = AinfModel::new(field, trunc_degree + 1, ideals.clone())?;
    let (dims_t, dims_t1) = (model.total_dims(), next.total_dims());
    let mut stabilization = Vec::new();
    for (i, a) in ideals.iter().enumerate() {
        for (j, b) in ideals.iter().enumerate() {
            let free_pair = *a == Ideal::X && *b == Ideal::X;
            if !free_pair && dims_t[i][j] != dims_t1[i][j] {
                return Err(Error::Generation(format!(
                    "stHom({}, {}) changes from {} to {} between truncations {trunc_degree} and {}; raise the truncation degree",
                    a.id(),
                    b.id(),
                    dims_t[i][j],
                    dims_t1[i][j],
                    trunc_degree + 1
                )));
            }
            stabilization.push(StabilizationEntry {
                src: a.id(),
                dst: b.id(),
                dim_at_t: dims_t[i][j],
                dim_at_t_plus_1: dims_t1[i][j],
                degrees: model.degree_table(i, j)?.into_iter().filter(|&(_, q)| q > 0).collect(),
            });
        }
    }

    let mut level_data = Vec::with_capacity(levels);
    for k in 1..=levels {
        // Point k + 1 of the top level is I_(k+1); level k keeps the first k + 1.
        let keep: Vec<usize> = (0..=k).collect();
        level_data.push(top.restrict(&keep));
    }
    let mut flags = BTreeMap::new();
    for m in &ideals {
        let (appears, family) = match m {
            Ideal::XY(n) => (*n, Some(AINF_FAMILY.to_string())),
            _ => (1, None),
        };
        flags.insert(
            m.id(),
            PointFlags { locally_free: *m != Ideal::X, appears_at_level: appears, stabilizes_at_level: appears, family },
        );
    }
    let tower = TruncationTower::new(level_data, flags)?;
    let manifest = PackManifest {
        schema: MANIFEST_SCHEMA.into(),
        pack_id: "ainf-tower".into(),
        generator: GENERATOR_VERSION.into(),
        oracle: OracleParams::Ainf { levels, trunc_degree, field },
        files: Vec::new(),
        representatives: representatives(field, &reps),
        stabilization,
    };
    Ok(GeneratedTower { tower, manifest })
}

/// Writes the tower files and `manifest.json` into `dir`.
pub fn write_tower(gen: &GeneratedTower, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    let written = gen.tower.write_dir(dir)?;
    let mut manifest = gen.manifest.clone();
    manifest.files = written.iter().map(|(name, s)| FileHash { path: name.clone(), sha256: sha256_hex(s.as_bytes()) }).collect();
    std::fs::write(dir.join("manifest.json"), manifest.to_json_string())?;
    Ok(())
}
