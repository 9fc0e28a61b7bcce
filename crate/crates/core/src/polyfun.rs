//! Polynomial functions `A^m -> A` with field coefficients on product trees
//! whose leaves are variables or constants of `A`.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::algebra::Algebra;
use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::linalg::{self, Matrix, Vector};

/// A product tree. Constant leaves are kept primitive (first nonzero
/// coordinate equal to one); their scale lives in the term coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PTree {
    Var(usize),
    Const(Vector),
    Node(Box<PTree>, Box<PTree>),
}

impl PTree {
    pub fn degree(&self) -> usize {
        match self {
            PTree::Var(_) | PTree::Const(_) => 1,
            PTree::Node(l, r) => l.degree() + r.degree(),
        }
    }

    fn shape(&self, out: &mut Vec<bool>) {
        match self {
            PTree::Node(l, r) => {
                out.push(true);
                l.shape(out);
                r.shape(out);
            }
            _ => out.push(false),
        }
    }

    fn leaves<'a>(&'a self, out: &mut Vec<&'a PTree>) {
        match self {
            PTree::Node(l, r) => {
                l.leaves(out);
                r.leaves(out);
            }
            _ => out.push(self),
        }
    }

    pub fn contains_var(&self, j: usize) -> bool {
        match self {
            PTree::Var(i) => *i == j,
            PTree::Const(_) => false,
            PTree::Node(l, r) => l.contains_var(j) || r.contains_var(j),
        }
    }

    pub fn has_const(&self) -> bool {
        match self {
            PTree::Var(_) => false,
            PTree::Const(_) => true,
            PTree::Node(l, r) => l.has_const() || r.has_const(),
        }
    }

    fn const_count(&self) -> usize {
        match self {
            PTree::Var(_) => 0,
            PTree::Const(_) => 1,
            PTree::Node(l, r) => l.const_count() + r.const_count(),
        }
    }

    /// Swaps the constant leaves out (into `taken`) for empty placeholders.
    fn replace_const(&self, taken: &mut Vector) -> PTree {
        match self {
            PTree::Const(v) => {
                *taken = v.clone();
                PTree::Const(Vec::new())
            }
            PTree::Var(j) => PTree::Var(*j),
            PTree::Node(l, r) => PTree::Node(
                Box::new(l.replace_const(taken)),
                Box::new(r.replace_const(taken)),
            ),
        }
    }

    fn fill_const(&self, v: &[FieldElement]) -> PTree {
        match self {
            PTree::Const(_) => PTree::Const(v.to_vec()),
            PTree::Var(j) => PTree::Var(*j),
            PTree::Node(l, r) => PTree::Node(Box::new(l.fill_const(v)), Box::new(r.fill_const(v))),
        }
    }

    /// Number of variable leaves.
    pub fn var_count(&self) -> usize {
        match self {
            PTree::Var(_) => 1,
            PTree::Const(_) => 0,
            PTree::Node(l, r) => l.var_count() + r.var_count(),
        }
    }

    pub fn evaluate(&self, alg: &Algebra, point: &[Vector]) -> Vector {
        match self {
            PTree::Var(j) => point[*j].clone(),
            PTree::Const(v) => v.clone(),
            PTree::Node(l, r) => alg.mul_vec(&l.evaluate(alg, point), &r.evaluate(alg, point)),
        }
    }

    fn fmt_with(&self, names: &[String], top: bool) -> String {
        match self {
            PTree::Var(j) => names
                .get(*j)
                .cloned()
                .unwrap_or_else(|| format!("x{}", j + 1)),
            PTree::Const(v) => {
                let parts: Vec<String> = v.iter().map(|x| format!("{x}")).collect();
                format!("[{}]", parts.join(","))
            }
            PTree::Node(l, r) => {
                let s = format!("{}*{}", l.fmt_with(names, false), r.fmt_with(names, false));
                if top {
                    s
                } else {
                    format!("({s})")
                }
            }
        }
    }
}

fn leaf_cmp(a: &PTree, b: &PTree) -> Ordering {
    match (a, b) {
        (PTree::Var(i), PTree::Var(j)) => i.cmp(j),
        (PTree::Var(_), _) => Ordering::Less,
        (_, PTree::Var(_)) => Ordering::Greater,
        (PTree::Const(u), PTree::Const(v)) => u.cmp(v),
        _ => Ordering::Equal,
    }
}

/// Order by degree, then shape code, then leaves.
impl Ord for PTree {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let (mut a, mut b) = (Vec::new(), Vec::new());
            self.shape(&mut a);
            other.shape(&mut b);
            a.cmp(&b).then_with(|| {
                let (mut la, mut lb) = (Vec::new(), Vec::new());
                self.leaves(&mut la);
                other.leaves(&mut lb);
                for (x, y) in la.iter().zip(&lb) {
                    let o = leaf_cmp(x, y);
                    if o != Ordering::Equal {
                        return o;
                    }
                }
                Ordering::Equal
            })
        })
    }
}

impl PartialOrd for PTree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

type Terms = BTreeMap<PTree, FieldElement>;

/// A polynomial function of `arity` variables into an algebra.
#[derive(Clone, Debug)]
pub struct PolyFunction {
    alg: Arc<Algebra>,
    arity: usize,
    terms: Terms,
}

impl PartialEq for PolyFunction {
    fn eq(&self, other: &Self) -> bool {
        self.arity == other.arity
            && same_algebra(&self.alg, &other.alg)
            && self.terms == other.terms
    }
}

impl Eq for PolyFunction {}

pub fn same_algebra(a: &Arc<Algebra>, b: &Arc<Algebra>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Splits `v` into a scalar and a primitive vector.
fn primitive(v: &[FieldElement]) -> Option<(FieldElement, Vector)> {
    let lead = v.iter().find(|x| !x.is_zero())?.clone();
    let inv = lead.inv().unwrap();
    Some((lead, linalg::scale_vec(&inv, v)))
}

/// Terms with a single constant leaf are linear in it, so terms of the same
/// shape and variables combine into one constant.
fn merge_constants(terms: Terms) -> Terms {
    if terms.keys().filter(|t| t.const_count() == 1).count() < 2 {
        return terms;
    }
    let mut out = Terms::new();
    let mut groups: BTreeMap<PTree, Vector> = BTreeMap::new();
    for (t, c) in terms {
        if t.const_count() != 1 {
            out.insert(t, c);
            continue;
        }
        let mut v = Vec::new();
        let skeleton = t.replace_const(&mut v);
        let acc = groups
            .entry(skeleton)
            .or_insert_with(|| v.iter().map(|x| x.zero_like()).collect());
        linalg::axpy(acc, &c, &v);
    }
    for (skeleton, acc) in groups {
        if let Some((s, p)) = primitive(&acc) {
            out.insert(skeleton.fill_const(&p), s);
        }
    }
    out
}

impl PolyFunction {
    pub fn zero(alg: Arc<Algebra>, arity: usize) -> Self {
        PolyFunction {
            alg,
            arity,
            terms: Terms::new(),
        }
    }

    pub fn var(alg: Arc<Algebra>, arity: usize, j: usize) -> Self {
        assert!(j < arity, "variable index out of range");
        let one = alg.field().one();
        let mut f = PolyFunction::zero(alg, arity);
        f.terms.insert(PTree::Var(j), one);
        f
    }

    pub fn constant(alg: Arc<Algebra>, arity: usize, v: &[FieldElement]) -> Self {
        assert_eq!(v.len(), alg.dim(), "constant has wrong dimension");
        let mut f = PolyFunction::zero(alg, arity);
        if let Some((s, p)) = primitive(v) {
            f.terms.insert(PTree::Const(p), s);
        }
        f
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.alg
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PTree, &FieldElement)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of a tree in canonical form.
    pub fn coefficient(&self, t: &PTree) -> FieldElement {
        self.terms
            .get(t)
            .cloned()
            .unwrap_or_else(|| self.alg.field().zero())
    }

    fn class(&self) -> Option<usize> {
        self.alg.nilpotency_class().ok()
    }

    fn insert(&self, terms: &mut Terms, t: PTree, c: FieldElement) {
        if c.is_zero() {
            return;
        }
        if let Some(k) = self.class() {
            if t.degree() > k {
                return;
            }
        }
        let e = terms.entry(t).or_insert_with(|| c.zero_like());
        *e += &c;
    }

    #[allow(clippy::wrong_self_convention)]
    fn from_terms(&self, arity: usize, mut terms: Terms) -> PolyFunction {
        terms.retain(|_, c| !c.is_zero());
        PolyFunction {
            alg: self.alg.clone(),
            arity,
            terms: merge_constants(terms),
        }
    }

    /// Builds `l * r`, folding products of constants.
    fn node(&self, l: &PTree, r: &PTree) -> Option<(FieldElement, PTree)> {
        if let (PTree::Const(u), PTree::Const(v)) = (l, r) {
            let p = self.alg.mul_vec(u, v);
            return primitive(&p).map(|(s, p)| (s, PTree::Const(p)));
        }
        Some((
            self.alg.field().one(),
            PTree::Node(Box::new(l.clone()), Box::new(r.clone())),
        ))
    }

    fn check_compatible(&self, other: &PolyFunction) -> Result<()> {
        if !same_algebra(&self.alg, &other.alg) {
            return Err(Error::AlgebraMismatch);
        }
        if self.arity != other.arity {
            return Err(Error::DimensionMismatch {
                expected: self.arity,
                found: other.arity,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &PolyFunction) -> Result<PolyFunction> {
        self.check_compatible(other)?;
        let mut t = self.terms.clone();
        for (k, c) in &other.terms {
            self.insert(&mut t, k.clone(), c.clone());
        }
        Ok(self.from_terms(self.arity, t))
    }

    pub fn sub(&self, other: &PolyFunction) -> Result<PolyFunction> {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &FieldElement) -> PolyFunction {
        let t = self.terms.iter().map(|(k, c)| (k.clone(), s * c)).collect();
        self.from_terms(self.arity, t)
    }

    pub fn neg(&self) -> PolyFunction {
        self.scale(&self.alg.field().from_i64(-1))
    }

    /// The product `self * other` in the algebra.
    pub fn mul(&self, other: &PolyFunction) -> Result<PolyFunction> {
        self.check_compatible(other)?;
        let mut t = Terms::new();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                if let Some(k) = self.class() {
                    if a.degree() + b.degree() > k {
                        continue;
                    }
                }
                if let Some((s, n)) = self.node(a, b) {
                    self.insert(&mut t, n, &(x * y) * &s);
                }
            }
        }
        Ok(self.from_terms(self.arity, t))
    }

    pub fn evaluate(&self, point: &[Vector]) -> Result<Vector> {
        if point.len() != self.arity {
            return Err(Error::DimensionMismatch {
                expected: self.arity,
                found: point.len(),
            });
        }
        for p in point {
            if p.len() != self.alg.dim() {
                return Err(Error::DimensionMismatch {
                    expected: self.alg.dim(),
                    found: p.len(),
                });
            }
            if p.iter().any(|x| x.field() != self.alg.field()) {
                return Err(Error::AlgebraMismatch);
            }
        }
        let mut out = linalg::zeros(self.alg.field(), self.alg.dim());
        for (t, c) in &self.terms {
            linalg::axpy(&mut out, c, &t.evaluate(&self.alg, point));
        }
        Ok(out)
    }

    /// The field coefficients `λ_j` of the bare variables.
    pub fn linear_part(&self) -> Vector {
        (0..self.arity)
            .map(|j| self.coefficient(&PTree::Var(j)))
            .collect()
    }

    /// The value at zero.
    pub fn constant_part(&self) -> Vector {
        let mut out = linalg::zeros(self.alg.field(), self.alg.dim());
        for (t, c) in &self.terms {
            if let PTree::Const(v) = t {
                linalg::axpy(&mut out, c, v);
            }
        }
        out
    }

    pub fn truncate(&self, k: usize) -> PolyFunction {
        let t = self
            .terms
            .iter()
            .filter(|(t, _)| t.degree() <= k)
            .map(|(t, c)| (t.clone(), c.clone()))
            .collect();
        self.from_terms(self.arity, t)
    }

    fn graft(&self, t: &PTree, subs: &[PolyFunction]) -> Terms {
        match t {
            PTree::Var(j) => subs[*j].terms.clone(),
            PTree::Const(_) => Terms::from([(t.clone(), self.alg.field().one())]),
            PTree::Node(l, r) => {
                let (a, b) = (self.graft(l, subs), self.graft(r, subs));
                let mut out = Terms::new();
                for (u, x) in &a {
                    for (v, y) in &b {
                        if let Some(k) = self.class() {
                            if u.degree() + v.degree() > k {
                                continue;
                            }
                        }
                        if let Some((s, n)) = self.node(u, v) {
                            self.insert(&mut out, n, &(x * y) * &s);
                        }
                    }
                }
                out
            }
        }
    }

    /// Simultaneous substitution `x_j := subs[j]`; the result has the arity of
    /// the substituted functions.
    pub fn substitute_all(&self, subs: &[PolyFunction]) -> Result<PolyFunction> {
        if subs.len() != self.arity {
            return Err(Error::DimensionMismatch {
                expected: self.arity,
                found: subs.len(),
            });
        }
        let arity = subs.first().map_or(0, |s| s.arity);
        for s in subs {
            if !same_algebra(&self.alg, &s.alg) {
                return Err(Error::AlgebraMismatch);
            }
            if s.arity != arity {
                return Err(Error::DimensionMismatch {
                    expected: arity,
                    found: s.arity,
                });
            }
        }
        let mut out = Terms::new();
        for (t, c) in &self.terms {
            for (u, x) in self.graft(t, subs) {
                self.insert(&mut out, u, c * &x);
            }
        }
        Ok(self.from_terms(arity, out))
    }

    /// Replaces `x_j` by `g` and leaves the other variables alone.
    pub fn substitute(&self, j: usize, g: &PolyFunction) -> Result<PolyFunction> {
        if j >= self.arity {
            return Err(Error::IndexOutOfRange {
                index: j,
                bound: self.arity,
            });
        }
        self.check_compatible(g)?;
        let subs: Vec<PolyFunction> = (0..self.arity)
            .map(|i| {
                if i == j {
                    g.clone()
                } else {
                    PolyFunction::var(self.alg.clone(), self.arity, i)
                }
            })
            .collect();
        self.substitute_all(&subs)
    }

    /// Same function viewed with more variables.
    pub fn with_arity(&self, arity: usize) -> Result<PolyFunction> {
        if self
            .terms
            .keys()
            .any(|t| (0..self.arity).any(|j| j >= arity && t.contains_var(j)))
        {
            return Err(Error::InvalidInput(String::from(
                "function uses a dropped variable",
            )));
        }
        Ok(self.from_terms(arity, self.terms.clone()))
    }

    /// The image of this function in another algebra under a linear map on
    /// constants (for instance the projection onto a quotient).
    pub fn map_constants(
        &self,
        target: Arc<Algebra>,
        f: impl Fn(&[FieldElement]) -> Vector,
    ) -> PolyFunction {
        let mut g = PolyFunction::zero(target, self.arity);
        for (t, c) in &self.terms {
            let term = g.tree_function(t, &f);
            g = g.add(&term.scale(c)).expect("same target");
        }
        g
    }

    fn tree_function(&self, t: &PTree, f: &impl Fn(&[FieldElement]) -> Vector) -> PolyFunction {
        match t {
            PTree::Var(j) => PolyFunction::var(self.alg.clone(), self.arity, *j),
            PTree::Const(v) => PolyFunction::constant(self.alg.clone(), self.arity, &f(v)),
            PTree::Node(l, r) => self
                .tree_function(l, f)
                .mul(&self.tree_function(r, f))
                .expect("same target"),
        }
    }

    pub fn uses_var(&self, j: usize) -> bool {
        self.terms.keys().any(|t| t.contains_var(j))
    }

    /// Maximal number of variable leaves in a term.
    pub fn var_degree(&self) -> usize {
        self.terms.keys().map(|t| t.var_count()).max().unwrap_or(0)
    }

    pub fn display_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return String::from("0");
        }
        let mut s = String::new();
        for (i, (t, c)) in self.terms.iter().enumerate() {
            let body = t.fmt_with(names, true);
            let neg = c.signum() == Ordering::Less;
            if i > 0 {
                s.push_str(if neg { " - " } else { " + " });
            } else if neg {
                s.push('-');
            }
            let a = if neg { -c } else { c.clone() };
            if a.is_one() {
                s.push_str(&body);
            } else {
                s.push_str(&format!("{a}*{body}"));
            }
        }
        s
    }
}

impl fmt::Display for PolyFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&[]))
    }
}

/// The `r x m` matrix of linear-part coefficients of a system.
pub fn jacobian(system: &[PolyFunction]) -> Result<Matrix> {
    let first = system
        .first()
        .ok_or_else(|| Error::InvalidInput(String::from("empty system")))?;
    for f in system {
        first.check_compatible(f)?;
    }
    first.alg.nilpotency_class()?;
    Ok(system.iter().map(|f| f.linear_part()).collect())
}
