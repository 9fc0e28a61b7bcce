//! JSON documents: algebras, expressions, operations, matrices.

use std::fmt;
use std::sync::Arc;

use nilalg::algebra::Table;
use nilalg::free::{free_nilpotent, Variety};
use nilalg::linalg::{Matrix, Vector};
use nilalg::polyfun::{PTree, PolyFunction};
use nilalg::quasigroup::CircleOp;
use nilalg::reconstruct::{DerivedExpr, Expr};
use nilalg::{Algebra, Field, FieldElement, Flags};
use num_bigint::BigInt;
use serde_json::{json, Map, Value};

/// A schema violation at a JSON pointer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Issue {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {}",
            if self.path.is_empty() {
                "/"
            } else {
                &self.path
            },
            self.message
        )
    }
}

pub type Parsed<T> = Result<T, Issue>;

fn issue<T>(path: &str, message: impl Into<String>) -> Parsed<T> {
    Err(Issue {
        path: path.to_string(),
        message: message.into(),
    })
}

fn child(path: &str, key: impl fmt::Display) -> String {
    format!("{path}/{key}")
}

fn get<'a>(v: &'a Value, path: &str, key: &str) -> Parsed<&'a Value> {
    match v.get(key) {
        Some(x) => Ok(x),
        None => issue(path, format!("missing field {key:?}")),
    }
}

fn array<'a>(v: &'a Value, path: &str) -> Parsed<&'a Vec<Value>> {
    v.as_array()
        .map_or_else(|| issue(path, "expected an array"), Ok)
}

fn index(v: &Value, path: &str) -> Parsed<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .map_or_else(|| issue(path, "expected a nonnegative integer"), Ok)
}

pub fn field(v: &Value, path: &str) -> Parsed<Field> {
    let s = v
        .as_str()
        .map_or_else(|| issue(path, "expected \"Q\" or \"Fp:<p>\""), Ok)?;
    Field::parse(s).or_else(|e| issue(path, e.to_string()))
}

pub fn scalar(field: Field, v: &Value, path: &str) -> Parsed<FieldElement> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) if n.is_i64() || n.is_u64() => n.to_string(),
        _ => return issue(path, "expected a scalar \"p/q\""),
    };
    field
        .parse_scalar(&text)
        .or_else(|e| issue(path, e.to_string()))
}

pub fn vector(field: Field, v: &Value, path: &str) -> Parsed<Vector> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| scalar(field, x, &child(path, i)))
        .collect()
}

pub fn vector_of_dim(field: Field, d: usize, v: &Value, path: &str) -> Parsed<Vector> {
    let x = vector(field, v, path)?;
    if x.len() != d {
        return issue(path, format!("expected {d} coordinates, found {}", x.len()));
    }
    Ok(x)
}

pub fn matrix(field: Field, v: &Value, path: &str) -> Parsed<Matrix> {
    let rows = array(v, path)?;
    let m: Matrix = rows
        .iter()
        .enumerate()
        .map(|(i, r)| vector(field, r, &child(path, i)))
        .collect::<Parsed<_>>()?;
    if let Some(w) = m.first().map(|r| r.len()) {
        if let Some(i) = m.iter().position(|r| r.len() != w) {
            return issue(&child(path, i), "rows have different lengths");
        }
    }
    Ok(m)
}

pub fn int_rows(v: &Value, path: &str) -> Parsed<Vec<Vec<BigInt>>> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let p = child(path, i);
            array(r, &p)?
                .iter()
                .enumerate()
                .map(|(j, x)| {
                    let q = child(&p, j);
                    let s = match x {
                        Value::Number(n) if n.is_i64() || n.is_u64() => n.to_string(),
                        Value::String(s) => s.clone(),
                        _ => return issue(&q, "expected an integer"),
                    };
                    s.parse::<BigInt>()
                        .or_else(|_| issue(&q, "expected an integer"))
                })
                .collect()
        })
        .collect()
}

/// Parses an algebra document, either explicit structure constants or a
/// `"free"` description.
pub fn algebra(v: &Value) -> Parsed<Algebra> {
    let f = field(get(v, "", "field")?, "/field")?;
    if let Some(free) = v.get("free") {
        let gens: Vec<String> = array(get(free, "/free", "generators")?, "/free/generators")?
            .iter()
            .enumerate()
            .map(|(i, g)| {
                g.as_str().map(String::from).map_or_else(
                    || issue(&format!("/free/generators/{i}"), "expected a name"),
                    Ok,
                )
            })
            .collect::<Parsed<_>>()?;
        let c = index(get(free, "/free", "class")?, "/free/class")?;
        let var = get(free, "/free", "variety")?.as_str().unwrap_or("");
        let var = Variety::parse(var).or_else(|e| issue("/free/variety", e.to_string()))?;
        let refs: Vec<&str> = gens.iter().map(String::as_str).collect();
        return free_nilpotent(f, &refs, c, var)
            .map(|x| x.algebra)
            .or_else(|e| issue("/free", e.to_string()));
    }
    let d = index(get(v, "", "dim")?, "/dim")?;
    let basis: Vec<String> = match v.get("basis") {
        None => (1..=d).map(|i| format!("e{i}")).collect(),
        Some(b) => array(b, "/basis")?
            .iter()
            .enumerate()
            .map(|(i, n)| {
                n.as_str()
                    .map(String::from)
                    .map_or_else(|| issue(&format!("/basis/{i}"), "expected a name"), Ok)
            })
            .collect::<Parsed<_>>()?,
    };
    if basis.len() != d {
        return issue(
            "/basis",
            format!("expected {d} names, found {}", basis.len()),
        );
    }
    let mut table = Table::new();
    for (n, entry) in array(get(v, "", "table")?, "/table")?.iter().enumerate() {
        let p = format!("/table/{n}");
        let e = array(entry, &p)?;
        if e.len() != 3 {
            return issue(&p, "expected [i, j, [[k, \"p/q\"], ...]]");
        }
        let (i, j) = (index(&e[0], &child(&p, 0))?, index(&e[1], &child(&p, 1))?);
        for (x, q) in [(i, 0), (j, 1)] {
            if x >= d {
                return issue(
                    &child(&p, q),
                    format!("index {x} out of range for dimension {d}"),
                );
            }
        }
        let mut list = Vec::new();
        for (m, kv) in array(&e[2], &child(&p, 2))?.iter().enumerate() {
            let q = format!("{p}/2/{m}");
            let pair = array(kv, &q)?;
            if pair.len() != 2 {
                return issue(&q, "expected [k, \"p/q\"]");
            }
            let k = index(&pair[0], &child(&q, 0))?;
            if k >= d {
                return issue(
                    &child(&q, 0),
                    format!("index {k} out of range for dimension {d}"),
                );
            }
            list.push((k, scalar(f, &pair[1], &child(&q, 1))?));
        }
        table.entry((i, j)).or_default().extend(list);
    }
    let flag_names: Vec<String> = match v.get("flags") {
        None => Vec::new(),
        Some(fl) => array(fl, "/flags")?
            .iter()
            .map(|x| x.as_str().unwrap_or("").to_string())
            .collect(),
    };
    let flags = Flags::from_names(flag_names.iter().map(String::as_str))
        .or_else(|e| issue("/flags", e.to_string()))?;
    Algebra::new(f, basis, table, flags).or_else(|e| issue("", format!("{}: {}", e.code(), e)))
}

pub fn field_name(f: Field) -> String {
    match f {
        Field::Q => "Q".to_string(),
        Field::Fp(p) => format!("Fp:{p}"),
    }
}

pub fn scalar_json(x: &FieldElement) -> Value {
    Value::String(x.to_string())
}

pub fn vector_json(v: &[FieldElement]) -> Value {
    Value::Array(v.iter().map(scalar_json).collect())
}

pub fn matrix_json(m: &[Vector]) -> Value {
    Value::Array(m.iter().map(|r| vector_json(r)).collect())
}

pub fn algebra_json(a: &Algebra) -> Value {
    let table: Vec<Value> = a
        .table()
        .into_iter()
        .map(|((i, j), list)| {
            json!([
                i,
                j,
                list.iter()
                    .map(|(k, g)| json!([k, scalar_json(g)]))
                    .collect::<Vec<_>>()
            ])
        })
        .collect();
    json!({
        "field": field_name(a.field()),
        "dim": a.dim(),
        "basis": a.basis_names(),
        "table": table,
        "flags": a.flags().names(),
    })
}

/// `["add", e…] | ["smul", "p/q", e] | ["mul", e, e] | ["var", j] | ["const", [coords…]]`.
pub fn expression(alg: &Arc<Algebra>, arity: usize, v: &Value, path: &str) -> Parsed<PolyFunction> {
    let items = array(v, path)?;
    let head = items
        .first()
        .and_then(Value::as_str)
        .map_or_else(|| issue(path, "expected an operator name"), Ok)?;
    let arg = |i: usize| -> Parsed<&Value> {
        items
            .get(i)
            .map_or_else(|| issue(path, format!("{head} needs more arguments")), Ok)
    };
    let lift = |r: nilalg::Result<PolyFunction>| r.or_else(|e| issue(path, e.to_string()));
    match head {
        "add" => {
            let mut acc = PolyFunction::zero(alg.clone(), arity);
            for (i, e) in items.iter().enumerate().skip(1) {
                acc = lift(acc.add(&expression(alg, arity, e, &child(path, i))?))?;
            }
            Ok(acc)
        }
        "smul" => {
            let s = scalar(alg.field(), arg(1)?, &child(path, 1))?;
            Ok(expression(alg, arity, arg(2)?, &child(path, 2))?.scale(&s))
        }
        "mul" => {
            let l = expression(alg, arity, arg(1)?, &child(path, 1))?;
            lift(l.mul(&expression(alg, arity, arg(2)?, &child(path, 2))?))
        }
        "var" => {
            let j = index(arg(1)?, &child(path, 1))?;
            if j >= arity {
                return issue(
                    &child(path, 1),
                    format!("variable {j} out of range for arity {arity}"),
                );
            }
            Ok(PolyFunction::var(alg.clone(), arity, j))
        }
        "const" => {
            let c = vector_of_dim(alg.field(), alg.dim(), arg(1)?, &child(path, 1))?;
            Ok(PolyFunction::constant(alg.clone(), arity, &c))
        }
        other => issue(&child(path, 0), format!("unknown operator {other:?}")),
    }
}

fn tree_json(t: &PTree) -> Value {
    match t {
        PTree::Var(j) => json!(["var", j]),
        PTree::Const(v) => json!(["const", vector_json(v)]),
        PTree::Node(l, r) => json!(["mul", tree_json(l), tree_json(r)]),
    }
}

pub fn expression_json(f: &PolyFunction) -> Value {
    let mut out = vec![json!("add")];
    for (t, c) in f.terms() {
        out.push(if c.is_one() {
            tree_json(t)
        } else {
            json!(["smul", scalar_json(c), tree_json(t)])
        });
    }
    Value::Array(out)
}

/// A polynomial system: `{"arity": m, "equations": [expr, ...]}`.
pub fn system(alg: &Arc<Algebra>, v: &Value) -> Parsed<Vec<PolyFunction>> {
    let m = index(get(v, "", "arity")?, "/arity")?;
    let eqs = array(get(v, "", "equations")?, "/equations")?;
    if eqs.is_empty() {
        return issue("/equations", "no equations");
    }
    eqs.iter()
        .enumerate()
        .map(|(i, e)| expression(alg, m, e, &format!("/equations/{i}")))
        .collect()
}

/// An operation `a ∘ b = a + b + f(a, b)`:
/// `{"kind": "product" | "bch" | "quadratic" | "poly", ...}`.
pub fn operation(alg: &Arc<Algebra>, v: &Value) -> Result<CircleOp, OpError> {
    let kind = get(v, "", "kind")?.as_str().unwrap_or("");
    match kind {
        "product" => Ok(CircleOp::product(alg.clone())),
        "bch" => CircleOp::bch(alg.clone()).map_err(OpError::Math),
        "quadratic" => {
            let c = vector_of_dim(alg.field(), 4, get(v, "", "coefficients")?, "/coefficients")?;
            Ok(CircleOp::from_quadratic(
                alg.clone(),
                c[0].clone(),
                c[1].clone(),
                c[2].clone(),
                c[3].clone(),
            ))
        }
        "poly" => {
            let f = expression(alg, 2, get(v, "", "f")?, "/f")?;
            CircleOp::new(f).map_err(OpError::Math)
        }
        other => Err(OpError::Schema(Issue {
            path: "/kind".into(),
            message: format!("unknown operation kind {other:?}"),
        })),
    }
}

/// Field declared by an operation document (defaults to ℚ).
pub fn operation_field(v: &Value) -> Parsed<Field> {
    match v.get("field") {
        None => Ok(Field::Q),
        Some(f) => field(f, "/field"),
    }
}

pub enum OpError {
    Schema(Issue),
    Math(nilalg::Error),
}

impl From<Issue> for OpError {
    fn from(i: Issue) -> Self {
        OpError::Schema(i)
    }
}

fn derived_node(e: &Expr) -> Value {
    match e {
        Expr::A => json!("a"),
        Expr::B => json!("b"),
        Expr::Circ(x, y) => json!(["circ", derived_node(x), derived_node(y)]),
        Expr::Smul(s, x) => json!(["smul", scalar_json(s), derived_node(x)]),
        Expr::Call(n, x, y) => json!(["call", n, derived_node(x), derived_node(y)]),
    }
}

/// `{"let": {name: expr, ...}, "in": expr}` with bindings in dependency order.
pub fn derived_json(d: &DerivedExpr) -> Value {
    let mut bindings = Map::new();
    for (name, e) in &d.bindings {
        bindings.insert(name.clone(), derived_node(e));
    }
    json!({ "let": Value::Object(bindings), "in": derived_node(&d.body) })
}
