//! Problem files in, JSON reports out.
//!
//! Anything wrong with the input itself (bad JSON, unknown fields, invalid
//! forms, missing truncation) is malformed and exits 3. A well-formed
//! problem whose computation fails (degenerate kernel, non-orthogonal span)
//! is a domain error and exits 2. Verdict commands exit 1 on `false`.

use crate::density::{LinHalfDensity, Prefactor};
use crate::error::Error;
use crate::formal::FormalFunction;
use crate::graded::{GradedSpace, Subspace};
use crate::integral::{bv_integral_lagrangian, fiber_integral, BvValue, DgOddSympSpace};
use crate::quantum::{check_relation, transfer, GeneralizedLagrangian, QuantumLInfty, RelationCertificate};
use crate::symplectic::{factorize, OddSympSpace, Relation};
use crate::verify::{self, Suite};
use crate::wire::{self, vectors_from_wire};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FALSE: u8 = 1;
pub const EXIT_DOMAIN: u8 = 2;
pub const EXIT_MALFORMED: u8 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Classify,
    Factorize,
    Compose,
    Integrate,
    Transfer,
    CheckQme,
    CheckRelation,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Factorize => "factorize",
            Command::Compose => "compose",
            Command::Integrate => "integrate",
            Command::Transfer => "transfer",
            Command::CheckQme => "check-qme",
            Command::CheckRelation => "check-relation",
        }
    }
}

/// Command-line overrides of the problem file's `options`.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub max_weight: Option<i64>,
}

#[derive(Debug)]
pub struct Report {
    pub body: Value,
    pub exit: u8,
}

enum Failure {
    Malformed(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

fn malformed(e: impl std::fmt::Display) -> Failure {
    Failure::Malformed(e.to_string())
}

/// Result payload plus an optional verdict.
type Outcome = std::result::Result<(Value, Option<bool>), Failure>;

pub fn execute(command: Command, input: &str, overrides: &Overrides) -> Report {
    let outcome = match command {
        Command::Classify => classify(input),
        Command::Factorize => factorize_cmd(input),
        Command::Compose => compose(input, overrides),
        Command::Integrate => integrate(input, overrides),
        Command::Transfer => transfer_cmd(input, overrides),
        Command::CheckQme => check_qme(input, overrides),
        Command::CheckRelation => check_relation_cmd(input, overrides),
    };
    let name = command.name();
    match outcome {
        Ok((result, verdict)) => {
            let exit = if verdict == Some(false) { EXIT_FALSE } else { EXIT_OK };
            let mut body = json!({ "command": name, "result": result });
            if let Some(v) = verdict {
                body["verdict"] = json!(v);
            }
            Report { body, exit }
        }
        Err(Failure::Domain(e)) => Report { body: json!({ "command": name, "error": { "kind": e.kind(), "message": e.to_string() } }), exit: EXIT_DOMAIN },
        Err(Failure::Malformed(message)) => Report { body: json!({ "command": name, "error": { "kind": "MalformedInput", "message": message } }), exit: EXIT_MALFORMED },
    }
}

pub fn run_verify(suite: Option<Suite>, seed: u64, instances: usize) -> Report {
    let suites: Vec<Suite> = suite.map_or_else(|| Suite::ALL.to_vec(), |s| vec![s]);
    let reports: Vec<_> = suites.into_iter().map(|s| verify::run(s, seed, instances)).collect();
    let passed = reports.iter().all(verify::SuiteReport::passed);
    Report { body: json!({ "command": "verify", "result": reports, "verdict": passed }), exit: if passed { EXIT_OK } else { EXIT_FALSE } }
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct ProblemOptions {
    w_max: Option<i64>,
    #[allow(dead_code)]
    seed: Option<u64>,
}

fn parse<T: DeserializeOwned>(input: &str) -> std::result::Result<T, Failure> {
    serde_json::from_str(input).map_err(malformed)
}

fn check_version(version: Option<u32>) -> std::result::Result<(), Failure> {
    match version {
        None | Some(1) => Ok(()),
        Some(v) => Err(Failure::Malformed(format!("unsupported version {v}"))),
    }
}

fn truncation(overrides: &Overrides, options: &ProblemOptions) -> std::result::Result<i64, Failure> {
    match overrides.max_weight.or(options.w_max) {
        Some(w) if w >= 1 => Ok(w),
        Some(w) => Err(Failure::Malformed(format!("max weight must be positive, got {w}"))),
        None => Err(Failure::Malformed("series operations need --max-weight or options.w_max".into())),
    }
}

/// Re-truncates `f` at `w`, after checking it lives on `space`, is known up
/// to `w`, and is not so singular in `ℏ` that truncated products lose terms.
fn series(f: FormalFunction, space: &GradedSpace, w: i64, what: &str) -> std::result::Result<FormalFunction, Failure> {
    if f.space() != space {
        return Err(Failure::Malformed(format!("{what} lives on {:?}, expected {:?}", f.space().degrees(), space.degrees())));
    }
    if f.w_max() < w {
        return Err(Failure::Malformed(format!("{what} is only known up to weight {}, below {w}", f.w_max())));
    }
    if f.min_weight().is_some_and(|m| m < -2 * w) {
        return Err(Failure::Malformed(format!("{what} has weight below −2·{w}")));
    }
    Ok(FormalFunction::from_terms(space, f.terms().map(|(m, c)| (m.clone(), c.clone())), w))
}

fn bv_value(v: &BvValue) -> Value {
    json!({ "series": v.series, "prefactor": v.prefactor })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassifyProblem {
    version: Option<u32>,
    // Accepted for uniformity; nothing here is truncated.
    #[serde(default)]
    #[allow(dead_code)]
    options: ProblemOptions,
    space: Option<OddSympSpace>,
    subspace: Option<Vec<Vec<String>>>,
    relation: Option<Relation>,
}

fn classify(input: &str) -> Outcome {
    let p: ClassifyProblem = parse(input)?;
    check_version(p.version)?;
    let (ambient, w, relation) = match (p.space, p.subspace, p.relation) {
        (Some(v), Some(basis), None) => {
            let vectors = vectors_from_wire(&basis).map_err(malformed)?;
            if vectors.iter().any(|x| x.len() != v.dim()) {
                return Err(Failure::Malformed("subspace vectors must match the space dimension".into()));
            }
            let w = Subspace::span(v.space(), &vectors).map_err(malformed)?;
            (v, w, None)
        }
        (None, None, Some(l)) => (l.ambient(), l.graph().clone(), Some(l)),
        _ => return Err(Failure::Malformed("give either {space, subspace} or {relation}".into())),
    };
    let flags = ambient.flags(&w)?;
    let class = flags.class();
    let mut result = json!({
        "class": class.as_str(),
        "dimension": w.dim(),
        "isotropic": flags.isotropic,
        "coisotropic": flags.coisotropic,
        "symplectic": flags.symplectic,
    });
    if let Some(l) = relation.filter(Relation::is_lagrangian) {
        result["reduction"] = json!(l.is_reduction()?);
        result["coreduction"] = json!(l.is_coreduction()?);
    }
    Ok((result, None))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RelationProblem {
    version: Option<u32>,
    // Accepted for uniformity; nothing here is truncated.
    #[serde(default)]
    #[allow(dead_code)]
    options: ProblemOptions,
    relation: Relation,
}

fn factorize_cmd(input: &str) -> Outcome {
    let p: RelationProblem = parse(input)?;
    check_version(p.version)?;
    let cospan = factorize(&p.relation)?;
    Ok((json!({ "left": cospan.left, "right": cospan.right, "middle": cospan.middle }), None))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GenLagWire {
    coisotrope: Relation,
    function: Option<FormalFunction>,
    density: Option<Prefactor>,
    s_free: Option<FormalFunction>,
}

impl GenLagWire {
    fn build(self, w: i64) -> std::result::Result<GeneralizedLagrangian, Failure> {
        if !self.coisotrope.is_coisotropic() {
            return Err(Failure::Malformed("generalized Lagrangian needs a coisotropic relation".into()));
        }
        let reduced = self.coisotrope.ambient().reduce(self.coisotrope.graph()).map_err(malformed)?.reduced().clone();
        let r = reduced.space();
        let f = match self.function {
            Some(f) => series(f, r, w, "function")?,
            None => FormalFunction::one(r, w),
        };
        let s_free = match self.s_free {
            Some(s) => series(s, r, w, "s_free")?,
            None => FormalFunction::zero(r, w),
        };
        let rho = LinHalfDensity::new(r.clone(), self.density.unwrap_or_else(Prefactor::one));
        GeneralizedLagrangian::new(self.coisotrope, f, rho, &s_free).map_err(malformed)
    }
}

fn genlag_json(g: &GeneralizedLagrangian) -> Value {
    json!({
        "coisotrope": g.coisotrope(),
        "reduced_space": g.reduction().reduced(),
        "representatives": wire::vectors_to_wire(g.reduction().representatives()),
        "function": g.function(),
        "density": g.density().coefficient,
        "s_free": g.dg().s_free(g.function().w_max()),
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ComposeProblem {
    version: Option<u32>,
    #[serde(default)]
    options: ProblemOptions,
    relations: Option<Vec<Relation>>,
    generalized_lagrangians: Option<Vec<GenLagWire>>,
}

fn compose(input: &str, overrides: &Overrides) -> Outcome {
    let p: ComposeProblem = parse(input)?;
    check_version(p.version)?;
    match (p.relations, p.generalized_lagrangians) {
        (Some(chain), None) => {
            let mut it = chain.into_iter();
            let first = it.next().ok_or_else(|| Failure::Malformed("empty composition chain".into()))?;
            let composite = it.try_fold(first, |acc, next| acc.then(&next))?;
            let class = composite.ambient().classify(composite.graph())?;
            Ok((json!({ "relation": composite, "class": class.as_str() }), None))
        }
        (None, Some(chain)) => {
            let w = truncation(overrides, &p.options)?;
            let chain = chain.into_iter().map(|g| g.build(w)).collect::<std::result::Result<Vec<_>, _>>()?;
            let mut it = chain.into_iter();
            let first = it.next().ok_or_else(|| Failure::Malformed("empty composition chain".into()))?;
            let composite = it.try_fold(first, |acc, next| acc.then(&next))?;
            let mut result = genlag_json(&composite);
            if composite.source().dim() == 0 && composite.target().dim() == 0 {
                result["value"] = json!({ "series": composite.function(), "prefactor": composite.density().coefficient });
            }
            Ok((result, None))
        }
        _ => Err(Failure::Malformed("give exactly one of relations or generalized_lagrangians".into())),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IntegrateProblem {
    version: Option<u32>,
    #[serde(default)]
    options: ProblemOptions,
    space: OddSympSpace,
    s_free: FormalFunction,
    lagrangian: Option<Vec<Vec<String>>>,
    reduction: Option<Relation>,
    #[serde(alias = "f")]
    function: Option<FormalFunction>,
    #[serde(alias = "rho")]
    density: Option<Prefactor>,
    w_max: Option<i64>,
}

fn integrate(input: &str, overrides: &Overrides) -> Outcome {
    let mut p: IntegrateProblem = parse(input)?;
    check_version(p.version)?;
    p.options.w_max = p.options.w_max.or(p.w_max);
    let w = truncation(overrides, &p.options)?;
    let v = p.space;
    let s_free = series(p.s_free, v.space(), w, "s_free")?;
    let dg = DgOddSympSpace::from_action(&v, &s_free).map_err(malformed)?;
    let f = match p.function {
        Some(f) => series(f, v.space(), w, "function")?,
        None => FormalFunction::one(v.space(), w),
    };
    let rho = LinHalfDensity::new(v.space().clone(), p.density.unwrap_or_else(Prefactor::one));
    match (p.lagrangian, p.reduction) {
        (Some(basis), None) => {
            let vectors = vectors_from_wire(&basis).map_err(malformed)?;
            if vectors.iter().any(|x| x.len() != v.dim()) {
                return Err(Failure::Malformed("lagrangian vectors must match the space dimension".into()));
            }
            let l = Subspace::span(v.space(), &vectors).map_err(malformed)?;
            Ok((bv_value(&bv_integral_lagrangian(&dg, &f, &rho, &l)?), None))
        }
        (None, Some(l)) => {
            if l.source() != &v {
                return Err(Failure::Malformed("reduction must start at the given space".into()));
            }
            let fi = fiber_integral(&dg, &f, &rho, &l)?;
            Ok((json!({ "space": fi.transferred.base(), "function": fi.function, "density": fi.density.coefficient, "s_free": fi.transferred.s_free(w) }), None))
        }
        _ => Err(Failure::Malformed("give exactly one of lagrangian or reduction".into())),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TheoryWire {
    space: OddSympSpace,
    action: FormalFunction,
}

impl TheoryWire {
    fn build(self, w: i64) -> std::result::Result<QuantumLInfty, Failure> {
        let action = series(self.action, self.space.space(), w, "action")?;
        QuantumLInfty::new(&self.space, action).map_err(malformed)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TransferProblem {
    version: Option<u32>,
    #[serde(default)]
    options: ProblemOptions,
    space: OddSympSpace,
    action: FormalFunction,
    reduction: Relation,
}

fn transfer_cmd(input: &str, overrides: &Overrides) -> Outcome {
    let p: TransferProblem = parse(input)?;
    check_version(p.version)?;
    let w = truncation(overrides, &p.options)?;
    let s = TheoryWire { space: p.space, action: p.action }.build(w)?;
    if p.reduction.source() != s.space() {
        return Err(Failure::Malformed("reduction must start at the given space".into()));
    }
    // A degenerate kernel means the defining composition does not exist.
    let t = transfer(&s, &p.reduction).map_err(|e| if e == Error::Degenerate { Error::NonComposable } else { e })?;
    Ok((json!({ "space": t.action.space(), "action": t.action.action(), "vacuum": t.vacuum, "density": t.density.coefficient }), None))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct QmeProblem {
    version: Option<u32>,
    #[serde(default)]
    options: ProblemOptions,
    space: OddSympSpace,
    action: FormalFunction,
}

fn check_qme(input: &str, overrides: &Overrides) -> Outcome {
    let p: QmeProblem = parse(input)?;
    check_version(p.version)?;
    let w = truncation(overrides, &p.options)?;
    let s = TheoryWire { space: p.space, action: p.action }.build(w)?;
    let residual = s.qme_residual()?;
    let holds = residual.is_zero();
    Ok((json!({ "residual": residual, "forms": s.qme_forms()? }), Some(holds)))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RelationCheckProblem {
    version: Option<u32>,
    #[serde(default)]
    options: ProblemOptions,
    source: TheoryWire,
    target: TheoryWire,
    relation: Relation,
}

fn certificate_json(c: &RelationCertificate) -> Value {
    let leg = |t: &Option<crate::quantum::Transfer>| {
        t.as_ref().map(|t| json!({ "action": t.action.action(), "vacuum": t.vacuum, "density": t.density.coefficient }))
    };
    json!({
        "relation": c.relation,
        "cospan": { "left": c.cospan.left, "right": c.cospan.right, "middle": c.cospan.middle },
        "kernels_nondegenerate": c.kernels_nondegenerate,
        "differentials_agree": c.differentials_agree,
        "densities_agree": c.densities_agree,
        "left_transfer": leg(&c.left),
        "right_transfer": leg(&c.right),
        "ratio": c.ratio.as_ref().map(bv_value),
    })
}

fn check_relation_cmd(input: &str, overrides: &Overrides) -> Outcome {
    let p: RelationCheckProblem = parse(input)?;
    check_version(p.version)?;
    let w = truncation(overrides, &p.options)?;
    let (s_u, s_v) = (p.source.build(w)?, p.target.build(w)?);
    if p.relation.source() != s_u.space() || p.relation.target() != s_v.space() {
        return Err(Failure::Malformed("relation must run from the source space to the target space".into()));
    }
    let cert = check_relation(&s_u, &s_v, &p.relation)?;
    Ok((certificate_json(&cert), Some(cert.holds())))
}
