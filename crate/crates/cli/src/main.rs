//! `spectra-kit`: JSON reports on stdout, a short human summary on stderr.
//!
//! Exit codes: 0 pass, 1 property violation or certification failure,
//! 2 input error, 3 resource limit.

mod dot;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use spectra_core::catdatum::{validate_datum, CategoryDatum, DATUM_SCHEMA};
use spectra_core::functors::{eval_dim, exclusion_witness, in_sigma, right_almost_split, right_perp_member, FpFunctor};
use spectra_core::linalg::FieldSpec;
use spectra_core::packs::{gen_ainf_tower, gen_an_pack, verify_pack, write_pack, write_tower, ArtinianRingSpec};
use spectra_core::topology::{
    cb_rank, galois_check, kuratowski_check, names_of, parse_point_set, perp_check, serre_correspondence_check,
    serre_stability_check, t1_check, CheckMode, ClosureSpace, DatumSpace, PropertyReport, TableSpace, TOP_SCHEMA,
};
use spectra_core::tower::{
    ar_stabilization, closure_in_limit, tower_cb_rank, witness_failure_chain, FamilyDesc, LimitVerdict, TruncationTower,
    TOWER_SCHEMA,
};
use spectra_core::Error;

#[derive(Parser)]
#[command(name = "spectra-kit", version, about = "Closure topology and CB rank on finite stable categories")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the category axioms of a datum.
    Validate { datum: PathBuf },
    /// Closure of a point set, with an exclusion witness for every other point.
    Closure {
        datum: PathBuf,
        #[arg(long, default_value = "")]
        set: String,
    },
    /// Minimal exclusion witness for one point against a set.
    Witness {
        datum: PathBuf,
        #[arg(long)]
        exclude: String,
        #[arg(long, default_value = "")]
        from: String,
    },
    /// Isolated points of a datum or closure table.
    Isolated { input: PathBuf },
    /// Cantor-Bendixson rank of a datum, closure table or tower.
    CbRank {
        input: PathBuf,
        #[arg(long)]
        top: Option<usize>,
        /// Witness bound for limit closures in towers.
        #[arg(long, default_value_t = 4)]
        bound: usize,
    },
    /// Whether a functor vanishes on a point set.
    Sigma {
        datum: PathBuf,
        #[arg(long)]
        functor: PathBuf,
        #[arg(long, default_value = "")]
        set: String,
    },
    /// Run property suites.
    Check {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        /// Sample count; without it small inputs are checked exhaustively.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, env = "SPECTRA_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Generate a data pack.
    GenPack {
        #[arg(value_enum)]
        family: PackFamily,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = spectra_core::linalg::DEFAULT_PRIME)]
        p: u64,
        /// Work over the rationals instead of F_p.
        #[arg(long)]
        rational: bool,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Generate a truncation tower.
    GenTower {
        #[arg(value_enum)]
        family: TowerFamily,
        #[arg(long)]
        levels: usize,
        /// Truncation degree in y (defaults to 3 x levels).
        #[arg(long)]
        ydeg: Option<usize>,
        #[arg(long, default_value_t = spectra_core::linalg::DEFAULT_PRIME)]
        p: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Witness failure chain for excluding a point from growing prefixes.
    TowerChain {
        tower: PathBuf,
        #[arg(long)]
        exclude: String,
        #[command(flatten)]
        target: TargetArgs,
        /// Inclusive level range `A..B` (defaults to 1..top-1).
        #[arg(long)]
        levels: Option<String>,
        #[arg(long)]
        top: Option<usize>,
    },
    /// Bounded search for a witness excluding a point from a tower set.
    Limit {
        tower: PathBuf,
        #[arg(long)]
        exclude: String,
        #[command(flatten)]
        target: TargetArgs,
        #[arg(long, default_value_t = 4)]
        bound: usize,
        #[arg(long)]
        top: Option<usize>,
    },
    /// Minimal right almost split maps, optionally as a DOT quiver.
    Ar {
        input: PathBuf,
        /// One point; all points when omitted.
        #[arg(long)]
        point: Option<String>,
        #[arg(long)]
        dot: Option<PathBuf>,
        #[arg(long)]
        top: Option<usize>,
    },
    /// Check a pack's hashes and recompute it from the ring.
    VerifyPack {
        pack: PathBuf,
        /// Only check file hashes.
        #[arg(long)]
        no_recompute: bool,
    },
}

#[derive(clap::Args)]
struct TargetArgs {
    /// Explicit target points.
    #[arg(long, conflicts_with_all = ["family", "with", "without"])]
    from: Option<String>,
    /// Family name (defaults to the tower's only family).
    #[arg(long)]
    family: Option<String>,
    #[arg(long, default_value = "")]
    with: String,
    /// Family members to leave out (the excluded point always is).
    #[arg(long, default_value = "")]
    without: String,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Kuratowski,
    T1,
    Serre,
    Perp,
    Galois,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum PackFamily {
    An,
}

#[derive(Clone, Copy, ValueEnum)]
enum TowerFamily {
    Ainf,
}

/// A finished command: JSON payload, stderr summary, verdict.
struct Outcome {
    payload: Value,
    summary: String,
    passed: bool,
}

impl Outcome {
    fn ok(payload: Value, summary: impl Into<String>) -> Self {
        Outcome { payload, summary: summary.into(), passed: true }
    }
}

enum Input {
    Datum(CategoryDatum),
    Space(TableSpace),
    Tower(TruncationTower),
}

fn load(path: &Path) -> Result<Input, Error> {
    if path.is_dir() {
        return Ok(Input::Tower(TruncationTower::read(path)?));
    }
    let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    match v.get("schema").and_then(Value::as_str) {
        Some(s) if s == DATUM_SCHEMA => Ok(Input::Datum(CategoryDatum::from_json_str(&text)?)),
        Some(s) if s == TOP_SCHEMA => Ok(Input::Space(TableSpace::from_json_str(&text)?)),
        Some(s) if s == TOWER_SCHEMA => Ok(Input::Tower(TruncationTower::read(path)?)),
        Some(s) => Err(Error::Input(format!("{}: unknown schema `{s}`", path.display()))),
        None => Err(Error::Input(format!("{}: no schema field", path.display()))),
    }
}

fn load_datum(path: &Path) -> Result<CategoryDatum, Error> {
    match load(path)? {
        Input::Datum(d) => Ok(d),
        _ => Err(Error::Input(format!("{}: expected a datum file", path.display()))),
    }
}

fn load_tower(path: &Path, top: Option<usize>) -> Result<TruncationTower, Error> {
    match load(path)? {
        Input::Tower(t) => truncated(t, top),
        _ => Err(Error::Input(format!("{}: expected a tower", path.display()))),
    }
}

fn truncated(t: TruncationTower, top: Option<usize>) -> Result<TruncationTower, Error> {
    match top {
        Some(n) => t.truncate(n),
        None => Ok(t),
    }
}

fn set_json(names: &[String], s: &spectra_core::topology::PointSet) -> Value {
    json!(names_of(names, s))
}

fn brace(v: &[String]) -> String {
    format!("{{{}}}", v.join(","))
}

fn field_for(p: u64, rational: bool) -> Result<FieldSpec, Error> {
    if rational {
        Ok(FieldSpec::Rational)
    } else {
        FieldSpec::prime(p)
    }
}

fn split_list(s: &str) -> Vec<String> {
    s.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect()
}

fn target_desc(t: &TruncationTower, exclude: &str, a: &TargetArgs) -> Result<FamilyDesc, Error> {
    if let Some(list) = &a.from {
        return Ok(FamilyDesc::Points(split_list(list)));
    }
    let name = match &a.family {
        Some(n) => n.clone(),
        None => {
            let fams: std::collections::BTreeSet<&String> = t.flags().values().filter_map(|f| f.family.as_ref()).collect();
            match fams.into_iter().collect::<Vec<_>>().as_slice() {
                [one] => (*one).clone(),
                _ => return Err(Error::Input("the tower does not have exactly one family; pass --family or --from".into())),
            }
        }
    };
    let mut without = split_list(&a.without);
    if !without.iter().any(|w| w == exclude) {
        without.push(exclude.to_string());
    }
    Ok(FamilyDesc::Family { name, with: split_list(&a.with), without })
}

fn parse_levels(s: &str) -> Result<std::ops::RangeInclusive<usize>, Error> {
    let bad = || Error::Input(format!("--levels `{s}` is not of the form A..B"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let b = b.strip_prefix('=').unwrap_or(b);
    Ok(a.trim().parse().map_err(|_| bad())?..=b.trim().parse().map_err(|_| bad())?)
}

fn check_suites(input: &Input, suite: Suite, samples: Option<usize>, seed: u64) -> Result<Vec<PropertyReport>, Error> {
    let want = |s: Suite| suite == s || suite == Suite::All;
    let mode_for = |n: usize, exhaustive_up_to: usize| match samples {
        None if n <= exhaustive_up_to => CheckMode::Exhaustive,
        s => CheckMode::Sampled { samples: s.unwrap_or(200), seed },
    };
    let count = samples.unwrap_or(50);
    let mut out = Vec::new();
    match input {
        Input::Space(s) => {
            if want(Suite::Kuratowski) {
                out.push(kuratowski_check(s, mode_for(s.n_points(), 6))?);
            }
            if want(Suite::T1) {
                out.push(t1_check(s)?);
            }
            if !matches!(suite, Suite::Kuratowski | Suite::T1 | Suite::All) {
                return Err(Error::Input("closure tables support only the kuratowski and t1 suites".into()));
            }
        }
        Input::Datum(d) => {
            let ds = DatumSpace::new(d.clone());
            let n = ds.n_points();
            if want(Suite::Kuratowski) {
                out.push(kuratowski_check(&ds, mode_for(n, 4))?);
            }
            if want(Suite::T1) {
                out.push(t1_check(&ds)?);
            }
            if want(Suite::Serre) {
                out.push(serre_correspondence_check(&ds, mode_for(n, 3))?);
                out.push(serre_stability_check(&ds, count, seed)?);
            }
            if want(Suite::Perp) {
                out.push(perp_check(&ds, mode_for(n, 5), count)?);
            }
            if want(Suite::Galois) {
                out.push(galois_check(&ds, count, seed)?);
            }
        }
        Input::Tower(_) => return Err(Error::Input("property suites run on a datum or a closure table".into())),
    }
    Ok(out)
}

fn run(cmd: Cmd) -> Result<Outcome, Error> {
    match cmd {
        Cmd::Validate { datum } => {
            let d = load_datum(&datum)?;
            let r = validate_datum(&d);
            let summary = match r.violations.first() {
                None => format!("valid datum with {} points", d.n_points()),
                Some(v) => format!("{} violations, first: {v}", r.violations.len()),
            };
            Ok(Outcome { passed: r.is_valid(), payload: json!({"valid": r.is_valid(), "violations": r.violations}), summary })
        }
        Cmd::Closure { datum, set } => {
            let ds = DatumSpace::new(load_datum(&datum)?);
            let names = ds.names();
            let pts = parse_point_set(&names, &set)?;
            let r = ds.closure_checked(&pts)?;
            let witnesses: BTreeMap<String, Value> =
                r.witnesses.iter().map(|(&y, g)| (names[y].clone(), FpFunctor::new(g.clone()).to_json_value(ds.datum()))).collect();
            let summary = format!("closure of {} is {}", brace(&names_of(&names, &pts)), brace(&names_of(&names, &r.closure)));
            Ok(Outcome::ok(json!({"closure": set_json(&names, &r.closure), "witnesses": witnesses}), summary))
        }
        Cmd::Witness { datum, exclude, from } => {
            let d = load_datum(&datum)?;
            let names: Vec<String> = d.points().iter().map(|p| p.id.clone()).collect();
            let pts = parse_point_set(&names, &from)?;
            let y = d.point_index(&exclude)?;
            let w = exclusion_witness(&d, y, &pts)?;
            let summary = match &w {
                Some(g) => format!("{exclude} excluded by a map from {} summands", g.source.len()),
                None => format!("{exclude} lies in {}: no witness", brace(&names_of(&names, &pts))),
            };
            let witness = w.map(|g| FpFunctor::new(g).to_json_value(&d));
            Ok(Outcome::ok(json!({"excluded": exclude, "from": set_json(&names, &pts), "witness": witness}), summary))
        }
        Cmd::Isolated { input } => {
            let (names, iso) = match load(&input)? {
                Input::Datum(d) => {
                    let ds = DatumSpace::new(d);
                    (ds.names(), ds.isolated_points()?)
                }
                Input::Space(s) => (s.names(), s.isolated_points()?),
                Input::Tower(_) => return Err(Error::Input("use cb-rank or ar for towers".into())),
            };
            let summary = format!("isolated: {}", brace(&names_of(&names, &iso)));
            Ok(Outcome::ok(json!({"isolated": set_json(&names, &iso)}), summary))
        }
        Cmd::CbRank { input, top, bound } => {
            let r = match load(&input)? {
                Input::Tower(t) => {
                    let t = truncated(t, top)?;
                    let r = tower_cb_rank(&t, bound)?;
                    let mut summary = format!("space rank {} over {} levels", r.report.space_rank, t.height());
                    for w in &r.warnings {
                        summary += &format!("\nwarning: {w}");
                    }
                    return Ok(Outcome::ok(serde_json::to_value(&r)?, summary));
                }
                Input::Datum(d) => cb_rank(&DatumSpace::new(d))?,
                Input::Space(s) => cb_rank(&s)?,
            };
            Ok(Outcome::ok(serde_json::to_value(&r)?, format!("space rank {}", r.space_rank)))
        }
        Cmd::Sigma { datum, functor, set } => {
            let ds = DatumSpace::new(load_datum(&datum)?);
            let d = ds.datum();
            let names = ds.names();
            let pts = parse_point_set(&names, &set)?;
            let f = FpFunctor::read(d, &functor)?;
            let mut dims = BTreeMap::new();
            for x in 0..d.n_points() {
                dims.insert(names[x].clone(), eval_dim(d, &f, x)?);
            }
            let (s, p) = (in_sigma(d, &f, &pts)?, right_perp_member(ds.algebra(), &f, &pts)?);
            if s != p {
                return Err(Error::Inconsistent(format!("Σ-membership is {s} but the annihilator test gives {p}")));
            }
            let summary = format!("functor {} on {}", if s { "vanishes" } else { "does not vanish" }, brace(&names_of(&names, &pts)));
            Ok(Outcome::ok(json!({"in_sigma": s, "dims": dims}), summary))
        }
        Cmd::Check { input, suite, samples, seed } => {
            let reports = check_suites(&load(&input)?, suite, samples, seed)?;
            let passed = reports.iter().all(PropertyReport::passed);
            let summary = reports
                .iter()
                .map(|r| format!("{}: {} checks, {} violations", r.suite, r.checked, r.violations.len()))
                .collect::<Vec<_>>()
                .join("\n");
            Ok(Outcome { payload: json!({"passed": passed, "suites": reports}), summary, passed })
        }
        Cmd::GenPack { family: PackFamily::An, n, p, rational, output } => {
            let pack = gen_an_pack(ArtinianRingSpec { n, field: field_for(p, rational)? })?;
            write_pack(&pack, &output)?;
            let summary = format!("wrote {} ({} points)", output.display(), pack.datum.n_points());
            Ok(Outcome::ok(json!({"pack": pack.manifest.pack_id, "points": pack.datum.n_points()}), summary))
        }
        Cmd::GenTower { family: TowerFamily::Ainf, levels, ydeg, p, output } => {
            let gen = gen_ainf_tower(levels, ydeg.unwrap_or(3 * levels), FieldSpec::prime(p)?)?;
            write_tower(&gen, &output)?;
            let summary = format!("wrote {} levels to {}", levels, output.display());
            Ok(Outcome::ok(json!({"pack": gen.manifest.pack_id, "levels": levels}), summary))
        }
        Cmd::TowerChain { tower, exclude, target, levels, top } => {
            let t = load_tower(&tower, top)?;
            let desc = target_desc(&t, &exclude, &target)?;
            let range = match levels {
                Some(s) => parse_levels(&s)?,
                None => 1..=t.height().saturating_sub(1).max(1),
            };
            let chain = witness_failure_chain(&t, &exclude, &desc, range)?;
            let summary = chain
                .entries
                .iter()
                .map(|e| match (&e.witness, e.fails_at) {
                    (None, _) => format!("level {}: no witness", e.level),
                    (Some(_), Some(k)) => format!("level {}: witness fails at level {k}", e.level),
                    (Some(_), None) => format!("level {}: witness persists to the top", e.level),
                })
                .collect::<Vec<_>>()
                .join("\n");
            Ok(Outcome::ok(serde_json::to_value(&chain)?, summary))
        }
        Cmd::Limit { tower, exclude, target, bound, top } => {
            let t = load_tower(&tower, top)?;
            let desc = target_desc(&t, &exclude, &target)?;
            let v = closure_in_limit(&t, &exclude, &desc, bound)?;
            let summary = match &v {
                LimitVerdict::InSet => format!("{exclude} is in {}", desc.describe()),
                LimitVerdict::Excluded { witness } => format!("{exclude} excluded by a witness built at level {}", witness.level),
                LimitVerdict::NoWitnessUpTo { bound, .. } => format!("no witness within bound {bound} (evidence, not proof)"),
            };
            Ok(Outcome::ok(json!({"excluded": exclude, "target": desc.describe(), "result": v}), summary))
        }
        Cmd::Ar { input, point, dot, top } => ar_command(&input, point, dot, top),
        Cmd::VerifyPack { pack, no_recompute } => {
            let r = verify_pack(&pack, !no_recompute)?;
            let summary = match r.failures.first() {
                None => format!("{}: {} files certified", r.pack_id, r.checked.len()),
                Some(f) => format!("{}: {} failures, first: {f}", r.pack_id, r.failures.len()),
            };
            Ok(Outcome { passed: r.passed(), payload: serde_json::to_value(&r)?, summary })
        }
    }
}

fn ar_command(input: &Path, point: Option<String>, dot: Option<PathBuf>, top: Option<usize>) -> Result<Outcome, Error> {
    // (target, source ids) per point, for the DOT export.
    let mut edges: Vec<(String, Vec<String>)> = Vec::new();
    let (payload, summary) = match load(input)? {
        Input::Datum(d) => {
            let ids: Vec<String> = match &point {
                Some(p) => vec![d.point(d.point_index(p)?).id.clone()],
                None => d.points().iter().map(|p| p.id.clone()).collect(),
            };
            let mut out = BTreeMap::new();
            for id in &ids {
                let r = right_almost_split(&d, d.point_index(id)?)?;
                let source: Vec<String> = r.map.source.summands().iter().map(|&x| d.point(x).id.clone()).collect();
                edges.push((id.clone(), source.clone()));
                let map = FpFunctor::new(r.map).to_json_value(&d);
                out.insert(id.clone(), json!({"source": source, "map": map, "minimal": r.minimal}));
            }
            let summary = edges.iter().map(|(t, s)| format!("{t} <- {}", brace(s))).collect::<Vec<_>>().join("\n");
            (json!({"right_almost_split": out}), summary)
        }
        Input::Tower(t) => {
            let t = truncated(t, top)?;
            let ids: Vec<String> = match &point {
                Some(p) => vec![p.clone()],
                None => t.top().points().iter().map(|p| p.id.clone()).collect(),
            };
            let mut out = BTreeMap::new();
            let mut lines = Vec::new();
            for id in &ids {
                let r = ar_stabilization(&t, id)?;
                let last = r.per_level.last().expect("point present at the top");
                edges.push((id.clone(), last.source.clone()));
                lines.push(format!("{id}: {}", serde_json::to_string(&r.verdict)?));
                out.insert(id.clone(), serde_json::to_value(&r)?);
            }
            (json!({"ar_stabilization": out}), lines.join("\n"))
        }
        Input::Space(_) => return Err(Error::Input("AR data need a datum or a tower".into())),
    };
    if let Some(path) = dot {
        std::fs::write(&path, dot::quiver(&edges))?;
    }
    Ok(Outcome::ok(payload, summary))
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Inconsistent(_) | Error::Generation(_) => 1,
        Error::Resource(_) => 3,
        _ => 2,
    }
}

const REPORT_SCHEMA: &str = "spectra-report/1";

/// A closed pipe downstream is not our failure.
fn emit(v: &Value) {
    let mut out = serde_json::Map::new();
    out.insert("schema".into(), REPORT_SCHEMA.into());
    match v {
        Value::Object(m) => out.extend(m.clone()),
        other => {
            out.insert("result".into(), other.clone());
        }
    }
    let text = serde_json::to_string_pretty(&Value::Object(out)).expect("payload serializes");
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: --jobs: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli.cmd) {
        Ok(out) => {
            emit(&out.payload);
            if !out.summary.is_empty() {
                eprintln!("{}", out.summary);
            }
            ExitCode::from(if out.passed { 0 } else { 1 })
        }
        Err(e) => {
            let code = exit_code(&e);
            emit(&json!({"error": e.to_string(), "exit_code": code}));
            eprintln!("error: {e}");
            ExitCode::from(code)
        }
    }
}
