use std::collections::HashMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::ainf::{AinfModel, Ideal};
use super::an::{AnModel, ArtinianRingSpec};
use super::manifest::{sha256_hex, OracleParams, PackManifest};
use super::oracle::{reduced_basis, stable_datum, RingModel, StableModel};
use crate::catdatum::CategoryDatum;
use crate::error::{Error, Result};
use crate::linalg::{ExactMatrix, Scalar};

#[derive(Clone, Debug, Default, Serialize)]
pub struct VerifyReport {
    pub pack_id: String,
    pub checked: Vec<String>,
    pub failures: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// `a2.json` -> `a2.manifest.json`; a directory -> `dir/manifest.json`.
pub fn manifest_path_for(path: &Path) -> PathBuf {
    if path.is_dir() {
        return path.join("manifest.json");
    }
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
    if name.ends_with("manifest.json") {
        return path.to_path_buf();
    }
    if name == "tower.json" {
        return path.with_file_name("manifest.json");
    }
    let stem = path.file_stem().and_then(|n| n.to_str()).unwrap_or("");
    path.with_file_name(format!("{stem}.manifest.json"))
}

/// Checks file hashes and, with `recompute`, rebuilds every datum file from
/// the ring with reversed enumeration order.
pub fn verify_pack(path: impl AsRef<Path>, recompute: bool) -> Result<VerifyReport> {
    let mpath = manifest_path_for(path.as_ref());
    let manifest = PackManifest::read(&mpath)?;
    let dir = mpath.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut report = VerifyReport { pack_id: manifest.pack_id.clone(), ..Default::default() };
    for fh in &manifest.files {
        let bytes = std::fs::read(dir.join(&fh.path))?;
        report.checked.push(fh.path.clone());
        if sha256_hex(&bytes) != fh.sha256 {
            report.failures.push(format!("{}: sha256 does not match the manifest", fh.path));
        }
        if !recompute || fh.path == "tower.json" {
            continue;
        }
        let text = String::from_utf8(bytes).map_err(|_| Error::input(format!("{}: not UTF-8", fh.path)))?;
        let datum = CategoryDatum::from_json_str(&text).map_err(|e| Error::input(format!("{}: {e}", fh.path)))?;
        if let Some(msg) = verify_datum(&datum, &manifest)? {
            report.failures.push(format!("{}: {msg}", fh.path));
        }
    }
    Ok(report)
}

fn model_for(d: &CategoryDatum, oracle: &OracleParams) -> Result<Box<dyn RingModel>> {
    match *oracle {
        OracleParams::An { n, field } => {
            let lengths = d
                .points()
                .iter()
                .map(|p| {
                    p.id.strip_prefix('M')
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| Error::input(format!("point `{}` is not of the form M<i>", p.id)))
                })
                .collect::<Result<Vec<usize>>>()?;
            Ok(Box::new(AnModel::with_lengths(ArtinianRingSpec { n, field }, lengths)?))
        }
        OracleParams::Ainf { trunc_degree, field, .. } => {
            let ideals = d
                .points()
                .iter()
                .map(|p| Ideal::parse(&p.id).ok_or_else(|| Error::input(format!("point `{}` is not I or I<n>", p.id))))
                .collect::<Result<Vec<_>>>()?;
            Ok(Box::new(AinfModel::new(field, trunc_degree, ideals)?))
        }
    }
}

/// Recomputes `d` from the ring and compares it in the shipped basis.
/// Returns the first divergence.
pub fn verify_datum(d: &CategoryDatum, manifest: &PackManifest) -> Result<Option<String>> {
    Certifier::new(d, manifest)?.check(d)
}

/// The reversed-order oracle for one point list, reusable for every datum
/// on those points.
pub struct Certifier<'a> {
    manifest: &'a PackManifest,
    oracle: CategoryDatum,
    sm: StableModel,
}

impl<'a> Certifier<'a> {
    /// Builds the oracle for the points of `d`; only the point ids are read.
    pub fn new(d: &CategoryDatum, manifest: &'a PackManifest) -> Result<Self> {
        let model = model_for(d, &manifest.oracle)?;
        let (oracle, sm, _) = stable_datum(model.as_ref(), true)?;
        Ok(Certifier { manifest, oracle, sm })
    }

    /// The first divergence of `d` from the oracle, if any.
    pub fn check(&self, d: &CategoryDatum) -> Result<Option<String>> {
        let (manifest, oracle, sm) = (self.manifest, &self.oracle, &self.sm);
        let field = manifest.field();
        if d.field() != field {
            return Ok(Some(format!("field {} differs from the manifest's {field}", d.field())));
        }
        if oracle.points() != d.points() {
            return Ok(Some("point list or flags differ from the oracle".into()));
        }
        let reps: HashMap<&str, _> = manifest.representatives.iter().map(|r| (r.basis.as_str(), r)).collect();
        let n = d.n_points();
        // change[x * n + y]: shipped basis of hom(x, y) in oracle coordinates, and its inverse.
        let mut change = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                let names = d.hom_basis(x, y);
                if names.len() != oracle.hom_dim(x, y) {
                    return Ok(Some(format!(
                        "hom({}, {}) has dim {}, oracle gives {}",
                        d.point(x).id,
                        d.point(y).id,
                        names.len(),
                        oracle.hom_dim(x, y)
                    )));
                }
                let mut cols = Vec::with_capacity(names.len());
                for name in names {
                    let Some(entry) = reps.get(name.as_str()) else {
                        return Ok(Some(format!("no representative for `{name}`")));
                    };
                    let rep = entry.to_rep(field)?;
                    match sm.coordinates(x, y, &rep) {
                        Ok(c) => cols.push(c),
                        Err(_) => return Ok(Some(format!("representative of `{name}` is not a module map"))),
                    }
                }
                let c = ExactMatrix::from_columns(field, names.len(), &cols);
                let Some(inv) = c.solve_right(&ExactMatrix::identity(field, names.len()))? else {
                    return Ok(Some(format!(
                        "representatives of hom({}, {}) are not a basis of the stable hom space",
                        d.point(x).id,
                        d.point(y).id
                    )));
                };
                change.push((c, inv));
            }
        }
        let to_oracle = |x: usize, y: usize, v: &[Scalar]| change[x * n + y].0.mul_vec(v);
        let to_shipped = |x: usize, y: usize, v: &[Scalar]| change[x * n + y].1.mul_vec(v);
        let show = |x: usize, y: usize, v: &[Scalar], k: usize| {
            format!("coefficient of `{}` is {}", d.hom_basis(x, y)[k], field.format(&v[k]))
        };

        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    for g in 0..d.hom_dim(y, z) {
                        let go = to_oracle(y, z, &d.unit_vector(y, z, g));
                        for f in 0..d.hom_dim(x, y) {
                            let fo = to_oracle(x, y, &d.unit_vector(x, y, f));
                            let want = to_shipped(x, z, &oracle.compose(x, y, z, &go, &fo));
                            let mut have = vec![field.zero(); d.hom_dim(x, z)];
                            for (k, c) in d.compose_basis(x, y, z, g, f) {
                                have[*k] = c.clone();
                            }
                            if let Some(k) = (0..have.len()).find(|&k| have[k] != want[k]) {
                                return Ok(Some(format!(
                                    "compose {} ∘ {}: {}, oracle gives {}",
                                    d.hom_basis(y, z)[g],
                                    d.hom_basis(x, y)[f],
                                    show(x, z, &have, k),
                                    field.format(&want[k])
                                )));
                            }
                        }
                    }
                }
            }
        }
        for x in 0..n {
            let want = to_shipped(x, x, oracle.identity(x));
            let have = d.identity(x);
            if let Some(k) = (0..have.len()).find(|&k| have[k] != want[k]) {
                return Ok(Some(format!("identity of {}: {}, oracle gives {}", d.point(x).id, show(x, x, have, k), field.format(&want[k]))));
            }
            // Shipped radicals are reduced echelon bases, so compare exactly.
            let computed: Vec<_> = oracle.radical(x).iter().map(|v| to_shipped(x, x, v)).collect();
            if d.radical(x) != reduced_basis(field, d.hom_dim(x, x), &computed)?.as_slice() {
                return Ok(Some(format!("radical of {} differs from the oracle", d.point(x).id)));
            }
        }
        Ok(None)
    }
}
