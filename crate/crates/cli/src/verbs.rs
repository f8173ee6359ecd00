use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde_json::{json, Map, Value};

use ksymvar::catalog::VarietySpec;
use ksymvar::fan::Fan;
use ksymvar::group_ring::{ElementJson, GroupRingElement};
use ksymvar::kring::{
    collapse, enumerate_fixed_points, enumerate_invariant_curves, filtration_membership, graded_multiply, kg_decompose,
    kg_membership, kt_membership, localization_to_sr, wonderful_presentation_check, DecompositionJson,
    GradedDecomposition, KringError, LocalizationClass, LocalizationClassJson, Scope, SrRing,
};
use ksymvar::root_datum::SymmetricDatum;
use ksymvar::verify::{verify, VerifyOptions};

pub const VERBS: [&str; 11] = [
    "describe",
    "fixed-points",
    "curves",
    "check-kt",
    "check-kg",
    "decompose",
    "multiply",
    "filtration",
    "presentation",
    "splitting-check",
    "verify",
];

const DEFAULT_BOX: i64 = 4;

/// A variety plus the verb to run on it and the verb's arguments.
#[derive(Debug, Clone, serde::Deserialize)]
pub struct JobSpec {
    #[serde(flatten)]
    pub variety: VarietySpec,
    #[serde(default)]
    pub verb: Option<String>,
    #[serde(default)]
    pub args: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    Io(String),
    Env(String),
    Spec(String),
    Args(String),
    Datum(String),
    Computation(String),
}

impl CliError {
    pub fn to_json(&self) -> Value {
        let (kind, message) = match self {
            CliError::Io(m) => ("io", m),
            CliError::Env(m) => ("environment", m),
            CliError::Spec(m) => ("spec", m),
            CliError::Args(m) => ("args", m),
            CliError::Datum(m) => ("datum", m),
            CliError::Computation(m) => ("computation", m),
        };
        json!({ "kind": kind, "message": message })
    }
}

impl From<KringError> for CliError {
    fn from(e: KringError) -> Self {
        CliError::Computation(e.to_string())
    }
}

fn arg<T: DeserializeOwned>(job: &JobSpec, key: &str) -> Result<Option<T>, CliError> {
    job.args
        .get(key)
        .map(|v| serde_json::from_value(v.clone()).map_err(|e| CliError::Args(format!("{key}: {e}"))))
        .transpose()
}

fn required<T: DeserializeOwned>(job: &JobSpec, key: &str) -> Result<T, CliError> {
    arg(job, key)?.ok_or_else(|| CliError::Args(format!("missing argument {key:?}")))
}

fn scope(job: &JobSpec) -> Result<Scope, CliError> {
    Ok(arg(job, "scope")?.unwrap_or(Scope::X))
}

fn to_value(v: impl serde::Serialize) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

/// A localized class from `args.class`, or the constant `args.constant`
/// on the fixed points of `args.scope`.
fn class(fan: &Fan, job: &JobSpec) -> Result<LocalizationClass, CliError> {
    if let Some(json) = arg::<LocalizationClassJson>(job, "class")? {
        return Ok(LocalizationClass::from_json(fan, &json)?);
    }
    match arg::<i64>(job, "constant")? {
        Some(c) => Ok(LocalizationClass::constant(fan, scope(job)?, c)),
        None => Err(CliError::Args("expected \"class\" or \"constant\"".into())),
    }
}

fn cone(fan: &Fan, label: &str) -> Result<usize, CliError> {
    fan.cone_by_label(label).map_err(|e| CliError::Args(e.to_string()))
}

fn decomposition(fan: &Fan, job: &JobSpec, key: &str) -> Result<GradedDecomposition, CliError> {
    let json: DecompositionJson = required(job, key)?;
    Ok(GradedDecomposition::from_json(fan, &json)?)
}

/// Runs one verb. The flag is false when the report records a failed check.
pub fn run(job: &JobSpec, verb: &str, bound: Option<i64>) -> Result<(Value, bool), CliError> {
    if verb == "splitting-check" {
        let d = SymmetricDatum::from_spec(&job.variety.datum).map_err(|e| CliError::Datum(e.to_string()))?;
        let report = d.simply_connected_splitting().map_err(|e| CliError::Datum(e.to_string()))?;
        return Ok((to_value(report), true));
    }
    let fan = job.variety.build().map_err(|e| CliError::Datum(e.to_string()))?;
    let report = match verb {
        "describe" => describe(&fan),
        "fixed-points" => fixed_points(&fan, scope(job)?),
        "curves" => curves(&fan, scope(job)?)?,
        "check-kt" => to_value(kt_membership(&fan, &class(&fan, job)?)?),
        "check-kg" => to_value(kg_membership(&fan, &collapse(&fan, &class(&fan, job)?)?)?),
        "decompose" => decompose(&fan, job, bound)?,
        "multiply" => {
            let product = graded_multiply(&fan, &decomposition(&fan, job, "left")?, &decomposition(&fan, job, "right")?)?;
            json!({ "product": product.to_json(&fan) })
        }
        "filtration" => filtration(&fan, job)?,
        "presentation" => to_value(wonderful_presentation_check(&fan)?),
        "verify" => return run_verify(&fan, job),
        other => return Err(CliError::Spec(format!("unknown verb {other:?}"))),
    };
    Ok((report, true))
}

fn describe(fan: &Fan) -> Value {
    let d = fan.datum();
    let sr = SrRing::full(fan);
    json!({
        "datum": d.label(),
        "group_case": d.group_case,
        "rank": d.rank(),
        "simple_roots": (0..d.rank()).map(|i| d.simple_root_label(i)).collect::<Vec<_>>(),
        "positive_roots": d.roots.positive_roots(),
        "theta": d.theta,
        "Delta_L": d.delta_l.iter().map(|&i| d.simple_root_label(i)).collect::<Vec<_>>(),
        "Delta_G/H": d.restricted_simple_roots,
        "H_simple_roots": d.h_simple_roots,
        "orders": {
            "W": d.weyl.order(),
            "W_H": d.weyl_h.len(),
            "W_L": d.weyl_l.len(),
            "W_G/H": d.restricted_weyl.len(),
        },
        "fan": {
            "wonderful": fan.is_wonderful(),
            "rays": fan.rays(),
            "cones": (0..fan.cones().len()).map(|i| fan.cone_label(i)).collect::<Vec<_>>(),
            "maximal_cones": fan.maximal_cones().iter().map(|&i| fan.cone_label(i)).collect::<Vec<_>>(),
        },
        "sr_lattice": { "name": sr.lattice().name, "basis": sr.lattice().basis_labels },
    })
}

fn fixed_points(fan: &Fan, scope: Scope) -> Value {
    let fps = enumerate_fixed_points(fan, scope);
    let points: Vec<Value> = (0..fps.len())
        .map(|i| {
            let (cone, coset) = fps.labels(fan, i);
            json!({ "index": i, "cone": cone, "coset": coset })
        })
        .collect();
    json!({ "scope": scope, "count": fps.len(), "points": points })
}

fn curves(fan: &Fan, scope: Scope) -> Result<Value, CliError> {
    let fps = enumerate_fixed_points(fan, scope);
    let curves = enumerate_invariant_curves(fan, scope)?;
    let mut by_kind: BTreeMap<&str, usize> = BTreeMap::new();
    let listed: Vec<Value> = curves
        .iter()
        .map(|c| {
            *by_kind.entry(c.kind.code()).or_default() += 1;
            json!({
                "kind": c.kind.code(),
                "endpoints": [fps.label(fan, c.endpoints[0]), fps.label(fan, c.endpoints[1])],
                "character": c.character,
            })
        })
        .collect();
    Ok(json!({ "scope": scope, "count": curves.len(), "by_kind": by_kind, "curves": listed }))
}

/// Decomposes `args.element` (over SR(F)) or the Stanley-Reisner preimage
/// of the Y-scope class `args.class`.
fn decompose(fan: &Fan, job: &JobSpec, bound: Option<i64>) -> Result<Value, CliError> {
    let lattice = SrRing::full(fan).lattice().clone();
    let element = match arg::<ElementJson>(job, "element")? {
        Some(e) => GroupRingElement::from_json(&e, lattice).map_err(|e| CliError::Args(e.to_string()))?,
        None => {
            let c = class(fan, job)?;
            if c.scope != Scope::Y {
                return Err(KringError::ScopeMismatch { expected: Scope::Y }.into());
            }
            localization_to_sr(fan, &c, bound.unwrap_or(DEFAULT_BOX))?
        }
    };
    let d = kg_decompose(fan, &element)?;
    Ok(json!({ "element": element.to_json(), "decomposition": d.to_json(fan) }))
}

/// Membership of `args.decomposition` in F_τ for `args.cone`, or for every cone.
fn filtration(fan: &Fan, job: &JobSpec) -> Result<Value, CliError> {
    let d = decomposition(fan, job, "decomposition")?;
    let cones: Vec<usize> = match arg::<String>(job, "cone")? {
        Some(label) => vec![cone(fan, &label)?],
        None => (0..fan.cones().len()).collect(),
    };
    let mut members = Map::new();
    for t in cones {
        members.insert(fan.cone_label(t), Value::Bool(filtration_membership(fan, &d, t)?));
    }
    Ok(json!({ "membership": members }))
}

fn run_verify(fan: &Fan, job: &JobSpec) -> Result<(Value, bool), CliError> {
    let defaults = VerifyOptions::default();
    let opts = VerifyOptions {
        seed: arg(job, "seed")?.unwrap_or(defaults.seed),
        samples: arg(job, "samples")?.unwrap_or(defaults.samples),
        oracle_triples: arg(job, "oracle_triples")?.unwrap_or(defaults.oracle_triples),
    };
    let results = verify(fan, opts);
    for r in &results {
        eprintln!("{}", r.line());
    }
    let passed = results.iter().all(|r| r.passed);
    let criteria: Vec<Value> = results
        .iter()
        .map(|r| {
            json!({
                "id": r.id,
                "name": r.name,
                "result": if r.passed { "PASS" } else { "FAIL" },
                "detail": r.detail,
                "limit_ms": r.limit_ms,
            })
        })
        .collect();
    Ok((json!({ "datum": fan.datum().label(), "passed": passed, "criteria": criteria }), passed))
}
