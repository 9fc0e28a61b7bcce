//! One function per verb. Each returns the document to print or a failure
//! with its exit status.

use std::fs;
use std::sync::Arc;

use nilalg::commensurator::{self, AdaptedSubgroup, MalcevLattice};
use nilalg::free::{free_nilpotent, Variety};
use nilalg::linalg::{Matrix, Vector};
use nilalg::orders::{self, Comparison, FactorKind};
use nilalg::polyfun::{self, PolyFunction};
use nilalg::polymap::{self, SeriesMap, VectorField};
use nilalg::quasigroup::{self, CircleOp, IdentityReport};
use nilalg::reconstruct::{self, NodeCounts};
use nilalg::solver::{self, AffineOutcome};
use nilalg::{Algebra, Field, FieldElement};
use serde_json::{json, Map, Value};

use crate::doc::{self, Issue, OpError};

pub enum Output {
    Json(Value),
    Csv(String),
}

/// A failed run: exit status, machine-readable code, message and optional
/// payload merged into the error document.
#[derive(Debug)]
pub struct Failure {
    pub status: i32,
    pub code: String,
    pub message: String,
    pub extra: Box<Map<String, Value>>,
}

impl Failure {
    fn io(message: String) -> Failure {
        Failure {
            status: 1,
            code: "IoError".into(),
            message,
            extra: Box::default(),
        }
    }

    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            status: 1,
            code: "UsageError".into(),
            message: message.into(),
            extra: Box::default(),
        }
    }

    fn schema(doc: &str, i: Issue) -> Failure {
        let mut extra = Map::new();
        extra.insert("document".into(), json!(doc));
        extra.insert(
            "path".into(),
            json!(if i.path.is_empty() {
                "/".to_string()
            } else {
                i.path.clone()
            }),
        );
        Failure {
            status: 1,
            code: "SchemaError".into(),
            message: i.message,
            extra: Box::new(extra),
        }
    }

    pub fn document(&self) -> Value {
        let mut m = Map::new();
        m.insert("schema".into(), json!("nilalg/error/1"));
        m.insert("code".into(), json!(self.code));
        m.insert("message".into(), json!(self.message));
        for (k, v) in self.extra.iter() {
            m.insert(k.clone(), v.clone());
        }
        Value::Object(m)
    }
}

impl From<nilalg::Error> for Failure {
    fn from(e: nilalg::Error) -> Failure {
        let status = if e.is_negative_result() { 3 } else { 2 };
        Failure {
            status,
            code: e.code().into(),
            message: e.to_string(),
            extra: Box::default(),
        }
    }
}

type Run<T> = Result<T, Failure>;

fn schema(verb: &str) -> Value {
    json!(format!("nilalg/{verb}/1"))
}

fn report(verb: &str, fields: Value) -> Output {
    let mut m = Map::new();
    m.insert("schema".into(), schema(verb));
    if let Value::Object(f) = fields {
        m.extend(f);
    }
    Output::Json(Value::Object(m))
}

/// Inline JSON when the argument starts with `[` or `{`, otherwise a path.
pub fn load(arg: &str) -> Run<Value> {
    let t = arg.trim_start();
    let text = if t.starts_with('[') || t.starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).map_err(|e| Failure::io(format!("{arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| Failure {
        status: 1,
        code: "ParseError".into(),
        message: format!("{arg}: {e}"),
        extra: Box::default(),
    })
}

fn algebra(arg: &str) -> Run<Arc<Algebra>> {
    let v = load(arg)?;
    doc::algebra(&v)
        .map(Arc::new)
        .map_err(|i| Failure::schema("algebra", i))
}

fn vector(alg: &Algebra, arg: &str, name: &str) -> Run<Vector> {
    let v = load(arg)?;
    doc::vector_of_dim(alg.field(), alg.dim(), &v, "").map_err(|i| Failure::schema(name, i))
}

fn square_matrix(alg: &Algebra, arg: &str) -> Run<Matrix> {
    let v = load(arg)?;
    let m = doc::matrix(alg.field(), &v, "").map_err(|i| Failure::schema("matrix", i))?;
    if m.len() != alg.dim() || m.iter().any(|r| r.len() != alg.dim()) {
        let i = Issue {
            path: String::new(),
            message: format!("expected a {0}x{0} matrix", alg.dim()),
        };
        return Err(Failure::schema("matrix", i));
    }
    Ok(m)
}

fn system(alg: &Arc<Algebra>, arg: &str) -> Run<Vec<PolyFunction>> {
    let v = load(arg)?;
    doc::system(alg, &v).map_err(|i| Failure::schema("system", i))
}

fn operation(alg: &Arc<Algebra>, arg: &str) -> Run<CircleOp> {
    let v = load(arg)?;
    if let Some(f) = v.get("field") {
        let f = doc::field(f, "/field").map_err(|i| Failure::schema("operation", i))?;
        if f != alg.field() {
            return Err(nilalg::Error::AlgebraMismatch.into());
        }
    }
    op_result(doc::operation(alg, &v))
}

fn op_result(r: Result<CircleOp, OpError>) -> Run<CircleOp> {
    r.map_err(|e| match e {
        OpError::Schema(i) => Failure::schema("operation", i),
        OpError::Math(e) => e.into(),
    })
}

fn scalar(field: Field, s: &str) -> Run<FieldElement> {
    field
        .parse_scalar(s)
        .map_err(|e| Failure::usage(format!("{s:?}: {e}")))
}

fn variety(s: &str) -> Run<Variety> {
    Variety::parse(s).map_err(|e| Failure::usage(e.to_string()))
}

fn vectors_json(vs: &[Vector]) -> Value {
    Value::Array(vs.iter().map(|v| doc::vector_json(v)).collect())
}

fn ints_json(rows: &[Vec<num_bigint::BigInt>]) -> Value {
    Value::Array(
        rows.iter()
            .map(|r| Value::Array(r.iter().map(|x| json!(x.to_string())).collect()))
            .collect(),
    )
}

pub fn solve(alg: &str, sys: &str, affine: bool) -> Run<(Output, i32)> {
    let alg = algebra(alg)?;
    let sys = system(&alg, sys)?;
    if affine {
        return Ok(match solver::solve_affine(&sys)? {
            AffineOutcome::Solution(x) => (
                report(
                    "solve",
                    json!({ "status": "solution", "solution": vectors_json(&x) }),
                ),
                0,
            ),
            AffineOutcome::Inconsistent {
                certificate,
                matrix,
                rhs,
            } => {
                let ok = solver::verify_certificate(&certificate, &matrix, &rhs);
                let out = json!({
                    "status": "inconsistent",
                    "code": "Inconsistent",
                    "certificate": doc::vector_json(&certificate),
                    "matrix": doc::matrix_json(&matrix),
                    "rhs": doc::vector_json(&rhs),
                    "certificate_verified": ok,
                });
                (report("solve", out), 3)
            }
        });
    }
    let x = solver::solve_square(&sys)?;
    Ok((
        report(
            "solve",
            json!({ "status": "solution", "solution": vectors_json(&x) }),
        ),
        0,
    ))
}

pub fn implicit(alg: &str, sys: &str, free: Option<&str>) -> Run<Output> {
    let alg = algebra(alg)?;
    let sys = system(&alg, sys)?;
    let p = solver::implicit_solve(&sys)?;
    let h: Vec<Value> = p.h.iter().map(doc::expression_json).collect();
    let mut out = json!({ "pivots": p.pivots, "free": p.free, "h": h });
    if let Some(arg) = free {
        let v = load(arg)?;
        let rows = doc::matrix(alg.field(), &v, "").map_err(|i| Failure::schema("free", i))?;
        if rows.len() != p.free.len() || rows.iter().any(|r| r.len() != alg.dim()) {
            let i = Issue {
                path: String::new(),
                message: format!(
                    "expected {} vectors of dimension {}",
                    p.free.len(),
                    alg.dim()
                ),
            };
            return Err(Failure::schema("free", i));
        }
        out["point"] = vectors_json(&p.point(&rows)?);
    }
    Ok(report("implicit", out))
}

pub fn jacobian(alg: &str, sys: &str) -> Run<Output> {
    let alg = algebra(alg)?;
    let sys = system(&alg, sys)?;
    let j = polyfun::jacobian(&sys)?;
    let rank = nilalg::linalg::rank(&j);
    Ok(report(
        "jacobian",
        json!({ "jacobian": doc::matrix_json(&j), "rank": rank }),
    ))
}

pub fn bch(alg: &str, x: &str, y: &str) -> Run<Output> {
    let alg = algebra(alg)?;
    let (x, y) = (vector(&alg, x, "x")?, vector(&alg, y, "y")?);
    let z = quasigroup::bch(&alg, &x, &y)?;
    Ok(report("bch", json!({ "result": doc::vector_json(&z) })))
}

fn label(v: &[FieldElement]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn circle_table(alg: &str, op: &str, limit: usize) -> Run<Output> {
    let alg = algebra(alg)?;
    let op = operation(&alg, op)?;
    let (elements, table) = op.cayley_table(limit)?;
    let labels: Vec<String> = elements.iter().map(|e| label(e)).collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Failure::io(e.to_string());
    let mut header = vec!["circ".to_string()];
    header.extend(labels.iter().cloned());
    w.write_record(&header).map_err(io)?;
    for (i, row) in table.iter().enumerate() {
        let mut rec = vec![labels[i].clone()];
        rec.extend(row.iter().map(|&j| labels[j].clone()));
        w.write_record(&rec).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::io(e.to_string()))?;
    Ok(Output::Csv(String::from_utf8(bytes).expect("utf-8")))
}

pub struct DivideArgs<'a> {
    pub algebra: &'a str,
    pub op: &'a str,
    pub a: &'a str,
    pub c: Option<&'a str>,
    pub side: &'a str,
    pub power: Option<&'a str>,
}

pub fn divide(args: DivideArgs<'_>) -> Run<Output> {
    let alg = algebra(args.algebra)?;
    let op = operation(&alg, args.op)?;
    let a = vector(&alg, args.a, "a")?;
    if let Some(q) = args.power {
        let q = scalar(alg.field(), q)?;
        let r = op.rational_power(&a, &q)?;
        return Ok(report(
            "divide",
            json!({ "power": doc::scalar_json(&q), "result": doc::vector_json(&r) }),
        ));
    }
    let c = vector(
        &alg,
        args.c
            .ok_or_else(|| Failure::usage("--c is required unless --power is given"))?,
        "c",
    )?;
    let (x, check) = match args.side {
        "left" => {
            let x = op.left_divide(&a, &c)?;
            let back = op.circle(&a, &x)?;
            (x, back)
        }
        "right" => {
            let x = op.right_divide(&a, &c)?;
            let back = op.circle(&x, &a)?;
            (x, back)
        }
        other => return Err(Failure::usage(format!("unknown side {other:?}"))),
    };
    Ok(report(
        "divide",
        json!({ "side": args.side, "result": doc::vector_json(&x), "verified": check == c }),
    ))
}

/// The operation for reconstruction lives on the free algebra being compiled for.
fn free_operation(arg: &str, c: usize, var: Variety) -> Run<CircleOp> {
    let v = load(arg)?;
    let field = doc::operation_field(&v).map_err(|i| Failure::schema("operation", i))?;
    let free = free_nilpotent(field, &["a", "b"], c.max(1), var)?;
    op_result(doc::operation(&Arc::new(free.algebra), &v))
}

fn counts_json(n: NodeCounts) -> Value {
    json!({ "vars": n.vars, "circ": n.circ, "smul": n.smul, "call": n.call })
}

pub fn reconstruct(op: &str, class: usize, var: &str) -> Run<Output> {
    let var = variety(var)?;
    let op = free_operation(op, class, var)?;
    let r = reconstruct::reconstruct_ops(&op, class, var)?;
    let out = json!({
        "class": r.class,
        "variety": r.variety.name(),
        "branch": r.branch,
        "add": doc::derived_json(&r.add),
        "mul": doc::derived_json(&r.mul),
        "audit": { "add": counts_json(r.add.audit()?), "mul": counts_json(r.mul.audit()?) },
    });
    Ok(report("reconstruct", out))
}

pub fn coherence(op: &str, class: usize, var: &str) -> Run<Output> {
    let var = variety(var)?;
    let op = free_operation(op, class, var)?;
    let r = reconstruct::truncation_coherence(&op, class, var)?;
    let out = json!({ "class": r.class, "variety": var.name(), "add_agrees": r.add_agrees, "mul_agrees": r.mul_agrees, "holds": r.holds() });
    Ok(report("coherence", out))
}

pub fn aut_check(alg: &str, m: &str) -> Run<Output> {
    let alg = algebra(alg)?;
    let m = square_matrix(&alg, m)?;
    let ok = commensurator::is_automorphism(&alg, &m)?;
    Ok(report(
        "aut-check",
        json!({ "automorphism": ok, "heisenberg_shape": commensurator::has_heisenberg_shape(&m) }),
    ))
}

pub fn aut_det(alg: &str, m: &str) -> Run<Output> {
    let alg = algebra(alg)?;
    let m = square_matrix(&alg, m)?;
    let d = commensurator::comm_determinant(&alg, &m)?;
    Ok(report(
        "aut-det",
        json!({ "determinant": doc::scalar_json(&d) }),
    ))
}

fn subgroup(arg: &str) -> Run<AdaptedSubgroup> {
    let v = load(arg)?;
    let rows = doc::int_rows(&v, "").map_err(|i| Failure::schema("subgroup", i))?;
    Ok(AdaptedSubgroup::new(rows)?)
}

pub fn index(alg: &str, h: &str) -> Run<Output> {
    let alg = algebra(alg)?;
    let lat = MalcevLattice::new(&alg)?;
    let h = subgroup(h)?;
    let r = commensurator::subgroup_index(&lat, &h)?;
    let layers: Vec<String> = r.layer_indices.iter().map(|x| x.to_string()).collect();
    Ok(report(
        "index",
        json!({ "index": r.index.to_string(), "layer_indices": layers, "echelon": ints_json(&r.echelon) }),
    ))
}

pub fn index_ratio(alg: &str, m: &str, h: &str) -> Run<Output> {
    let alg = algebra(alg)?;
    let m = square_matrix(&alg, m)?;
    let lat = MalcevLattice::new(&alg)?;
    let h = subgroup(h)?;
    let r = commensurator::index_ratio_check(&lat, &m, &h)?;
    let out = json!({
        "determinant": doc::scalar_json(&r.determinant),
        "index_h": r.index_h.to_string(),
        "index_k": r.index_k.to_string(),
        "ratio": doc::scalar_json(&r.ratio()),
        "k_generators": ints_json(&r.k_generators),
        "holds": r.holds(),
    });
    Ok(report("index-ratio", out))
}

pub struct PolymapArgs<'a> {
    pub class: usize,
    pub field: &'a str,
    pub action: &'a str,
    pub f: Option<&'a str>,
    pub g: Option<&'a str>,
    pub n: Option<usize>,
}

fn coeffs(field: Field, arg: Option<&str>, name: &str, len: usize) -> Run<Vector> {
    let arg = arg.ok_or_else(|| Failure::usage(format!("--{name} is required for this action")))?;
    let v = load(arg)?;
    doc::vector_of_dim(field, len, &v, "").map_err(|i| Failure::schema(name, i))
}

pub fn polymap(args: PolymapArgs<'_>) -> Run<Output> {
    let c = args.class;
    if c < 1 {
        return Err(Failure::usage("--class must be at least 1"));
    }
    let field = Field::parse(args.field).map_err(|e| Failure::usage(e.to_string()))?;
    let series = |name: &str, arg: Option<&str>| -> Run<SeriesMap> {
        Ok(SeriesMap::new(coeffs(field, arg, name, c)?)?)
    };
    let n = || {
        args.n
            .ok_or_else(|| Failure::usage("--n is required for this action"))
    };
    let map_out = |s: SeriesMap| json!({ "coefficients": doc::vector_json(s.coefficients()) });
    let out = match args.action {
        "compose" => map_out(series("f", args.f)?.compose(&series("g", args.g)?)?),
        "invert" => map_out(series("f", args.f)?.invert()?),
        "commutator" => map_out(series("f", args.f)?.commutator(&series("g", args.g)?)?),
        "conjugate" => map_out(series("f", args.f)?.conjugate(&series("g", args.g)?)?),
        "power" => map_out(series("f", args.f)?.power(n()?)?),
        "root" => map_out(series("f", args.f)?.root(n()?)?),
        "log" => {
            json!({ "vector_field": doc::vector_json(polymap::log_map(&series("f", args.f)?)?.coordinates()) })
        }
        "exp" => {
            if c < 2 {
                return Err(Failure::usage("exp needs --class at least 2"));
            }
            let d = VectorField::new(coeffs(field, args.f, "f", c - 1)?)?;
            map_out(polymap::exp_map(&d)?)
        }
        "lower-central" => {
            let s = polymap::lower_central_series(c)?;
            json!({ "terms": s, "nilpotency_class": s.len() - 1 })
        }
        "derived" => {
            let s = polymap::derived_series(c)?;
            json!({ "terms": s, "derived_length": s.len() - 1 })
        }
        other => return Err(Failure::usage(format!("unknown action {other:?}"))),
    };
    let mut m = Map::new();
    m.insert("class".into(), json!(c));
    m.insert("action".into(), json!(args.action));
    if let Value::Object(o) = out {
        m.extend(o);
    }
    Ok(report("polymap", Value::Object(m)))
}

pub fn filiform(k: u32, extend: bool) -> Run<Output> {
    let l = polymap::filiform(k)?;
    let a = if extend {
        polymap::extend_with_derivation(&l, &polymap::weight_derivation(&l))?
    } else {
        l
    };
    Ok(report("filiform", doc::algebra_json(&a)))
}

pub fn po_rank(alg: &str) -> Run<Output> {
    let alg = algebra(alg)?;
    Ok(report(
        "po-rank",
        json!({ "po_rank": orders::po_rank(&alg)? }),
    ))
}

pub fn cartan(alg: &str, seed: u64) -> Run<Output> {
    let alg = algebra(alg)?;
    let r = orders::cartan_dimension(&alg, seed)?;
    let po = orders::po_rank(&alg)?;
    let out = json!({
        "seed": seed,
        "dimension": r.dimension,
        "regular_element": doc::vector_json(&r.regular_element),
        "subalgebra": doc::matrix_json(&r.subalgebra.rows),
        "samples": r.samples,
        "po_rank": po,
        "ranks_agree": po == r.dimension,
    });
    Ok(report("cartan", out))
}

fn comparison_name(c: Comparison) -> &'static str {
    match c {
        Comparison::Less => "less",
        Comparison::Greater => "greater",
        Comparison::Equal => "equal",
        Comparison::Incomparable => "incomparable",
    }
}

pub struct ChiefArgs<'a> {
    pub algebra: &'a str,
    pub seed: Option<u64>,
    pub compare: Option<(&'a str, &'a str)>,
    pub op: Option<&'a str>,
    pub samples: usize,
}

pub fn chief_series(args: ChiefArgs<'_>) -> Run<Output> {
    let alg = algebra(args.algebra)?;
    let s = match args.seed {
        Some(seed) => orders::chief_series_seeded(&alg, seed)?,
        None => orders::chief_series(&alg)?,
    };
    let factors: Vec<Value> = s
        .factors
        .iter()
        .zip(&s.ideals[1..])
        .map(|(f, i)| {
            let kind = match f.kind {
                FactorKind::Central => "central",
                FactorKind::Noncentral => "noncentral",
            };
            json!({ "kind": kind, "basis": doc::matrix_json(&f.basis.rows), "ideal": doc::matrix_json(&i.rows) })
        })
        .collect();
    let mut out = json!({ "seed": args.seed, "rank": s.rank(), "factors": factors });
    if let Some((x, y)) = args.compare {
        let (x, y) = (vector(&alg, x, "x")?, vector(&alg, y, "y")?);
        out["comparison"] = json!(comparison_name(orders::compare_lex(&s, &x, &y)));
    }
    if let Some(op) = args.op {
        let op = operation(&alg, op)?;
        let seed = args.seed.unwrap_or(0);
        let r = orders::order_monotonicity_check(&op, &s, args.samples, seed)?;
        out["monotonicity"] = json!({ "seed": seed, "checked": r.checked, "violations": r.violations.len(), "holds": r.holds() });
    }
    Ok(report("chief-series", out))
}

fn identity_json(r: &IdentityReport) -> Value {
    json!({
        "name": r.name,
        "checked": r.checked,
        "holds": r.holds(),
        "counterexample": r.counterexample.as_ref().map(|c| vectors_json(c)),
    })
}

/// Finite algebras with at most this many elements are checked exhaustively.
const EXHAUSTIVE_LIMIT: usize = 64;

pub struct CheckArgs<'a> {
    pub algebra: &'a str,
    pub system: Option<&'a str>,
    pub op: Option<&'a str>,
    pub samples: usize,
    pub seed: u64,
}

/// Validation report; exits 1 when a document is invalid.
pub fn check(args: CheckArgs<'_>) -> Run<(Output, i32)> {
    let v = load(args.algebra)?;
    let issue_json = |doc: &str, i: &Issue| json!({ "document": doc, "path": if i.path.is_empty() { "/" } else { &i.path }, "message": i.message });
    let alg = match doc::algebra(&v) {
        Ok(a) => Arc::new(a),
        Err(i) => {
            return Ok((
                report(
                    "check",
                    json!({ "valid": false, "issues": [issue_json("algebra", &i)] }),
                ),
                1,
            ))
        }
    };
    let mut out = json!({
        "valid": true,
        "issues": [],
        "field": doc::field_name(alg.field()),
        "dim": alg.dim(),
        "flags": alg.flags().names(),
        "flags_verified": alg.verify_flags().is_ok(),
        "class": alg.nilpotency_class().ok(),
    });
    if let Some(arg) = args.system {
        let sv = load(arg)?;
        if let Err(i) = doc::system(&alg, &sv) {
            out["valid"] = json!(false);
            out["issues"] = json!([issue_json("system", &i)]);
            return Ok((report("check", out), 1));
        }
    }
    if let Some(arg) = args.op {
        let ov = load(arg)?;
        let op = match doc::operation(&alg, &ov) {
            Ok(op) => op,
            Err(OpError::Schema(i)) => {
                out["valid"] = json!(false);
                out["issues"] = json!([issue_json("operation", &i)]);
                return Ok((report("check", out), 1));
            }
            Err(OpError::Math(e)) => return Err(e.into()),
        };
        let small = alg
            .field()
            .order()
            .and_then(|q| q.checked_pow(alg.dim() as u32))
            .is_some_and(|n| n <= EXHAUSTIVE_LIMIT as u64);
        let reports = if small {
            out["mode"] = json!("exhaustive");
            quasigroup::check_identities_exhaustive(&op, EXHAUSTIVE_LIMIT)?
        } else {
            out["mode"] = json!("sampled");
            out["seed"] = json!(args.seed);
            quasigroup::check_identities(&op, args.samples, args.seed)?
        };
        out["identities"] = Value::Array(reports.iter().map(identity_json).collect());
    }
    Ok((report("check", out), 0))
}
