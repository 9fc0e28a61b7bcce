//! Compiles `+` and `·` of a nilpotent algebra into expressions built from
//! `∘` and scalar multiplication only.
//!
//! Scalars chosen along the way come from the tracked quadratic parts
//! (`Leading`); the final operations are verified exactly on the free
//! nilpotent algebra of the requested class.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::algebra::Algebra;
use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::free::{free_nilpotent, FreeNilpotentAlgebra, Tree, Variety};
use crate::linalg::{self, Vector};
use crate::polyfun::PTree;
use crate::quasigroup::CircleOp;

/// A node of a derived expression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    A,
    B,
    Circ(Box<Expr>, Box<Expr>),
    Smul(FieldElement, Box<Expr>),
    /// A previously bound binary operation applied to two subexpressions.
    Call(String, Box<Expr>, Box<Expr>),
}

pub fn circ(x: Expr, y: Expr) -> Expr {
    Expr::Circ(Box::new(x), Box::new(y))
}

pub fn smul(s: FieldElement, x: Expr) -> Expr {
    Expr::Smul(s, Box::new(x))
}

pub fn call(name: &str, x: Expr, y: Expr) -> Expr {
    Expr::Call(String::from(name), Box::new(x), Box::new(y))
}

impl Expr {
    fn calls(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::A | Expr::B => {}
            Expr::Circ(x, y) => {
                x.calls(out);
                y.calls(out);
            }
            Expr::Smul(_, x) => x.calls(out),
            Expr::Call(n, x, y) => {
                out.insert(n.clone());
                x.calls(out);
                y.calls(out);
            }
        }
    }

    fn count(&self, counts: &mut NodeCounts) {
        match self {
            Expr::A | Expr::B => counts.vars += 1,
            Expr::Circ(x, y) => {
                counts.circ += 1;
                x.count(counts);
                y.count(counts);
            }
            Expr::Smul(_, x) => {
                counts.smul += 1;
                x.count(counts);
            }
            Expr::Call(_, x, y) => {
                counts.call += 1;
                x.count(counts);
                y.count(counts);
            }
        }
    }
}

/// Node-kind tally of a derived expression.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct NodeCounts {
    pub vars: usize,
    pub circ: usize,
    pub smul: usize,
    pub call: usize,
}

/// Named binary operations followed by a body in `a`, `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedExpr {
    pub bindings: Vec<(String, Expr)>,
    pub body: Expr,
}

impl DerivedExpr {
    /// Node counts over bindings and body; also checks that every call
    /// refers to an earlier binding, so evaluation only ever applies `∘`
    /// and scalar multiplication.
    pub fn audit(&self) -> Result<NodeCounts> {
        let mut counts = NodeCounts::default();
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        for (name, e) in &self.bindings {
            let mut used = BTreeSet::new();
            e.calls(&mut used);
            if let Some(bad) = used.iter().find(|u| !seen.contains(u.as_str())) {
                return Err(Error::CheckFailed(format!(
                    "binding {name} calls unbound {bad}"
                )));
            }
            e.count(&mut counts);
            seen.insert(name);
        }
        let mut used = BTreeSet::new();
        self.body.calls(&mut used);
        if let Some(bad) = used.iter().find(|u| !seen.contains(u.as_str())) {
            return Err(Error::CheckFailed(format!("body calls unbound {bad}")));
        }
        self.body.count(&mut counts);
        Ok(counts)
    }

    pub fn evaluate(
        &self,
        op: &CircleOp,
        alg: &Algebra,
        a: &[FieldElement],
        b: &[FieldElement],
    ) -> Result<Vector> {
        let mut ev = Evaluator::new(op, alg, &self.bindings)?;
        ev.eval(&self.body, a, b)
    }

    /// Keeps only the bindings reachable from the body.
    fn pruned(bindings: &[(String, Expr)], body: Expr) -> DerivedExpr {
        let mut need = BTreeSet::new();
        body.calls(&mut need);
        for (name, e) in bindings.iter().rev() {
            if need.contains(name) {
                e.calls(&mut need);
            }
        }
        let bindings = bindings
            .iter()
            .filter(|(n, _)| need.contains(n))
            .cloned()
            .collect();
        DerivedExpr { bindings, body }
    }
}

/// Evaluates expressions on a concrete algebra with memoized calls.
pub struct Evaluator<'a> {
    alg: &'a Algebra,
    f: Vec<(PTree, FieldElement)>,
    index: BTreeMap<String, usize>,
    bodies: alloc::sync::Arc<Vec<Expr>>,
    pub circles: usize,
    memo: BTreeMap<(usize, Vector, Vector), Vector>,
}

impl<'a> Evaluator<'a> {
    pub fn new(op: &CircleOp, alg: &'a Algebra, bindings: &[(String, Expr)]) -> Result<Self> {
        if op.field() != alg.field() {
            return Err(Error::AlgebraMismatch);
        }
        let class = alg.nilpotency_class().ok();
        let f = op
            .f()
            .terms()
            .filter(|(t, _)| class.map_or(true, |c| t.degree() <= c))
            .map(|(t, c)| (t.clone(), c.clone()))
            .collect();
        let index = bindings
            .iter()
            .enumerate()
            .map(|(i, (n, _))| (n.clone(), i))
            .collect();
        let bodies = alloc::sync::Arc::new(bindings.iter().map(|(_, e)| e.clone()).collect());
        Ok(Evaluator {
            alg,
            f,
            index,
            bodies,
            circles: 0,
            memo: BTreeMap::new(),
        })
    }

    pub fn circle(&self, x: &[FieldElement], y: &[FieldElement]) -> Vector {
        let mut out = linalg::add_vec(x, y);
        let point = [x.to_vec(), y.to_vec()];
        for (t, c) in &self.f {
            linalg::axpy(&mut out, c, &t.evaluate(self.alg, &point));
        }
        out
    }

    pub fn eval(&mut self, e: &Expr, a: &[FieldElement], b: &[FieldElement]) -> Result<Vector> {
        match e {
            Expr::A => Ok(a.to_vec()),
            Expr::B => Ok(b.to_vec()),
            Expr::Circ(x, y) => {
                let (u, v) = (self.eval(x, a, b)?, self.eval(y, a, b)?);
                self.circles += 1;
                Ok(self.circle(&u, &v))
            }
            Expr::Smul(s, x) => Ok(linalg::scale_vec(s, &self.eval(x, a, b)?)),
            Expr::Call(name, x, y) => {
                let i = *self
                    .index
                    .get(name)
                    .ok_or_else(|| Error::InvalidInput(format!("unbound operation {name}")))?;
                let (u, v) = (self.eval(x, a, b)?, self.eval(y, a, b)?);
                let key = (i, u, v);
                if let Some(r) = self.memo.get(&key) {
                    return Ok(r.clone());
                }
                let bodies = self.bodies.clone();
                let r = self.eval(&bodies[i], &key.1, &key.2)?;
                self.memo.insert(key, r.clone());
                Ok(r)
            }
        }
    }
}

/// Claimed linear and quadratic part `λ_a a + λ_b b + k ab + l ba + m a² + n b²`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Leading {
    pub lin: [FieldElement; 2],
    pub quad: [FieldElement; 4],
}

impl Leading {
    fn new(field: Field, lin: [i64; 2], quad: [FieldElement; 4]) -> Leading {
        Leading {
            lin: [field.from_i64(lin[0]), field.from_i64(lin[1])],
            quad,
        }
    }
}

/// A derived operation with its claimed leading terms and the proof branch taken.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedOp {
    pub expr: DerivedExpr,
    pub leading: Leading,
    pub branch: String,
    /// Set when a branch outside the general hypotheses was used.
    pub experimental: bool,
}

struct Builder {
    field: Field,
    bindings: Vec<(String, Expr)>,
}

impl Builder {
    fn new(field: Field) -> Self {
        Builder {
            field,
            bindings: Vec::new(),
        }
    }

    fn bind(&mut self, name: &str, e: Expr) -> String {
        self.bindings.push((String::from(name), e));
        String::from(name)
    }

    fn s(&self, v: i64) -> FieldElement {
        self.field.from_i64(v)
    }

    fn zero(&self) -> Expr {
        smul(self.field.zero(), Expr::A)
    }

    fn finish(
        &self,
        name: &str,
        leading: Leading,
        branch: String,
        experimental: bool,
    ) -> DerivedOp {
        DerivedOp {
            expr: DerivedExpr::pruned(&self.bindings, call(name, Expr::A, Expr::B)),
            leading,
            branch,
            experimental,
        }
    }
}

fn require_three_elements(field: Field) -> Result<()> {
    if field == Field::Fp(2) {
        return Err(Error::UnsupportedField(String::from(
            "GF(2): the field must have at least 3 elements",
        )));
    }
    Ok(())
}

fn check_general(q: &[FieldElement; 4]) -> Result<()> {
    let [k, l, m, n] = q;
    if k == l {
        return Err(Error::HypothesisViolated(String::from("k = l")));
    }
    if m.is_zero() && n.is_zero() && *k == -l {
        return Err(Error::HypothesisViolated(String::from(
            "k = -l while m = n = 0",
        )));
    }
    Ok(())
}

/// `sq(a, _) = a² + ...`. Returns the binding name and the branch label.
fn build_square(bld: &mut Builder, q: &[FieldElement; 4]) -> Result<(String, String)> {
    check_general(q)?;
    let [k, l, m, n] = q.clone();
    let a = Expr::A;
    let neg_a = smul(bld.s(-1), Expr::A);
    if m.is_zero() && n.is_zero() {
        // (a∘b)∘(-a) = b + (k-l)ab + (l-k)ba - (k+l)a² + ...
        let pre = bld.bind("sq_pre", circ(circ(Expr::A, Expr::B), neg_a));
        let s = -(&k + &l);
        let body = smul(s.inv().unwrap(), call(&pre, Expr::A, bld.zero()));
        return Ok((bld.bind("sq", body), String::from("m=n=0")));
    }
    // v_s = u_s ∘ (-a) with u_0 = a, u_1 = a∘0 has a² coefficient (s+1)m + n - k - l;
    // with m = 0 the mirrored sequence uses n.
    let (mirror, mm, nn) = if m.is_zero() {
        (true, n.clone(), m.clone())
    } else {
        (false, m.clone(), n.clone())
    };
    let v0 = &(&mm + &nn) - &(&k + &l);
    let (s, coef) = if !v0.is_zero() {
        (0, v0)
    } else {
        (1, &v0 + &mm)
    };
    let u = if s == 0 {
        a
    } else if mirror {
        circ(bld.zero(), Expr::A)
    } else {
        circ(Expr::A, bld.zero())
    };
    let v = if mirror {
        circ(smul(bld.s(-1), Expr::A), u)
    } else {
        circ(u, smul(bld.s(-1), Expr::A))
    };
    let label = format!("{}s={s}", if mirror { "n!=0,mirrored," } else { "m!=0," });
    Ok((bld.bind("sq", smul(coef.inv().unwrap(), v)), label))
}

/// Derived operation `a² + ...` for an operation meeting the hypotheses.
pub fn derive_square(op: &CircleOp) -> Result<DerivedOp> {
    require_three_elements(op.field())?;
    let field = op.field();
    let mut bld = Builder::new(field);
    let (name, branch) = build_square(&mut bld, op.quadratic())?;
    let quad = [field.zero(), field.zero(), field.one(), field.zero()];
    Ok(bld.finish(&name, Leading::new(field, [0, 0], quad), branch, false))
}

/// `a ∗ b = a + b + k'ab + l'ba + n'b² + ...` with `k' != ±l'`.
fn build_star(
    bld: &mut Builder,
    q: &[FieldElement; 4],
    sq: &str,
) -> Result<(String, [FieldElement; 4], String, bool)> {
    let field = bld.field;
    let [k, l, m, n] = q.clone();
    let base_mirrored = m.is_zero() && !n.is_zero() && k == -&l;
    let (k, l, m, n) = if base_mirrored {
        (l, k, n, m)
    } else {
        (k, l, m, n)
    };
    let base = |x: Expr, y: Expr| {
        if base_mirrored {
            circ(y, x)
        } else {
            circ(x, y)
        }
    };
    let sq_a = |s: FieldElement| smul(s, call(sq, Expr::A, Expr::A));
    let tag = if base_mirrored { "mirrored," } else { "" };
    if m.is_zero() {
        let name = bld.bind("star", base(Expr::A, Expr::B));
        return Ok((name, [k, l, field.zero(), n], format!("{tag}m=0"), false));
    }
    let km = &k + &m;
    let lm = &l + &m;
    let nm = &n + &m;
    if field.characteristic() == 2 {
        let name = bld.bind("star", base(base(Expr::A, Expr::B), sq_a(field.zero())));
        return Ok((
            name,
            [km, lm, field.zero(), nm],
            format!("{tag}char2,t=0"),
            true,
        ));
    }
    let two_m = &m + &m;
    if km != -&lm {
        let name = bld.bind("star", base(base(Expr::A, Expr::B), sq_a(-&two_m)));
        return Ok((
            name,
            [km, lm, field.zero(), nm],
            format!("{tag}t=-2m"),
            false,
        ));
    }
    let pre = bld.bind("star_pre", base(base(Expr::A, Expr::B), sq_a(-&m)));
    let name = bld.bind("star", base(call(&pre, Expr::A, Expr::B), sq_a(-&two_m)));
    Ok((
        name,
        [&k + &two_m, &l + &two_m, field.zero(), &n + &two_m],
        format!("{tag}k'=-l',t=-m then -2m"),
        false,
    ))
}

/// Derived operation `a + b + k'ab + l'ba + n'b² + ...` with `k' != ±l'`.
pub fn derive_star(op: &CircleOp) -> Result<DerivedOp> {
    let field = op.field();
    let mut bld = Builder::new(field);
    let (sq, _) = build_square(&mut bld, op.quadratic())?;
    let (name, quad, branch, experimental) = build_star(&mut bld, op.quadratic(), &sq)?;
    Ok(bld.finish(
        &name,
        Leading::new(field, [1, 1], quad),
        branch,
        experimental,
    ))
}

struct Bilinear {
    sq: String,
    dollar: String,
    dollar_quad: [FieldElement; 4],
    hash: String,
    hat: (FieldElement, FieldElement),
    branch: String,
}

fn build_bilinear(bld: &mut Builder, q: &[FieldElement; 4]) -> Result<Bilinear> {
    let field = bld.field;
    let (sq, _) = build_square(bld, q)?;
    let (star, sq_quad, star_branch, _) = build_star(bld, q, &sq)?;
    let [k, l, _, n] = sq_quad;
    // Removing n b² must use ∗ itself so that no a² term comes back.
    let dollar = bld.bind(
        "dollar",
        call(
            &star,
            call(&star, Expr::A, Expr::B),
            smul(-&n, call(&sq, Expr::B, Expr::B)),
        ),
    );
    let dollar_quad = [k.clone(), l.clone(), field.zero(), field.zero()];
    let kl = &k + &l;
    let d = |x: Expr, y: Expr| call(&dollar, x, y);
    let (hash, hat, branch) = if field == Field::Fp(3) {
        // (a$b)$((-a)$(-b)) = 2k ab + 2l ba - (k+l)(a+b)² + ...
        let t = d(
            d(Expr::A, Expr::B),
            d(smul(bld.s(-1), Expr::A), smul(bld.s(-1), Expr::B)),
        );
        let sq_ab = call(&sq, d(Expr::A, Expr::B), d(Expr::A, Expr::B));
        let body = smul(
            field.from_i64(2).inv().unwrap(),
            d(t, smul(kl.clone(), sq_ab)),
        );
        (
            bld.bind("hash", body),
            (k.clone(), l.clone()),
            String::from("GF(3)"),
        )
    } else {
        let mu = bld.s(2);
        let p = d(
            d(smul(-&mu, Expr::A), smul(-&mu, Expr::B)),
            smul(mu.clone(), d(Expr::A, Expr::B)),
        );
        // a|b = (k - μl)ab + (l - μk)ba - μ(k+l)(a² + b²) + ...
        let bar = bld.bind("bar", smul(mu.inv().unwrap(), p));
        let c = &mu * &kl;
        let body = d(
            d(
                call(&bar, Expr::A, Expr::B),
                smul(c.clone(), call(&sq, Expr::A, Expr::A)),
            ),
            smul(c, call(&sq, Expr::B, Expr::B)),
        );
        (
            bld.bind("hash", body),
            (&k - &(&mu * &l), &l - &(&mu * &k)),
            String::from("mu=2"),
        )
    };
    Ok(Bilinear {
        sq,
        dollar,
        dollar_quad,
        hash,
        hat,
        branch: format!("{star_branch};{branch}"),
    })
}

/// Derived operation `k̂ab + l̂ba + ...` with `k̂ != ±l̂`.
pub fn derive_bilinear(op: &CircleOp) -> Result<DerivedOp> {
    require_three_elements(op.field())?;
    let field = op.field();
    let mut bld = Builder::new(field);
    let bl = build_bilinear(&mut bld, op.quadratic())?;
    let quad = [
        bl.hat.0.clone(),
        bl.hat.1.clone(),
        field.zero(),
        field.zero(),
    ];
    Ok(bld.finish(
        &bl.hash,
        Leading::new(field, [0, 0], quad),
        bl.branch,
        false,
    ))
}

/// The intermediate `$` operation `a + b + kab + lba + ...` of the bilinear step.
pub fn derive_dollar(op: &CircleOp) -> Result<DerivedOp> {
    require_three_elements(op.field())?;
    let field = op.field();
    let mut bld = Builder::new(field);
    let bl = build_bilinear(&mut bld, op.quadratic())?;
    let _ = &bl.sq;
    Ok(bld.finish(
        &bl.dollar,
        Leading::new(field, [1, 1], bl.dollar_quad.clone()),
        bl.branch,
        false,
    ))
}

/// Derived expressions for `a + b` and `ab`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reconstruction {
    pub class: usize,
    pub variety: Variety,
    pub add: DerivedExpr,
    pub mul: DerivedExpr,
    pub branch: String,
}

/// Compiles `+` and `·` for algebras of class at most `c` in the variety.
pub fn reconstruct_ops(op: &CircleOp, c: usize, variety: Variety) -> Result<Reconstruction> {
    let field = op.field();
    require_three_elements(field)?;
    if c == 0 {
        return Err(Error::InvalidInput(String::from(
            "class must be at least 1",
        )));
    }
    let mut bld = Builder::new(field);
    let anti = variety.is_anticommutative();
    if anti && field.characteristic() == 2 {
        return Err(Error::UnsupportedField(String::from(
            "anticommutative path needs characteristic != 2",
        )));
    }
    let (mut add, mut mul, branch);
    if c == 1 {
        add = bld.bind("add1", circ(Expr::A, Expr::B));
        mul = bld.bind("mul1", bld.zero());
        branch = String::from("class 1");
    } else if anti {
        let [k, l, _, _] = op.quadratic().clone();
        if k == l {
            return Err(Error::HypothesisViolated(String::from("k = l")));
        }
        let kappa = &k - &l;
        // ((-a)∘(-b))∘(a∘b) = 2κ ab + ... since (a+b)² = 0.
        let t = circ(
            circ(smul(bld.s(-1), Expr::A), smul(bld.s(-1), Expr::B)),
            circ(Expr::A, Expr::B),
        );
        mul = bld.bind("mul2", smul((&kappa + &kappa).inv().unwrap(), t));
        add = bld.bind(
            "add2",
            circ(
                circ(Expr::A, Expr::B),
                smul(-&kappa, call(&mul, Expr::A, Expr::B)),
            ),
        );
        branch = String::from("anticommutative");
    } else {
        check_general(op.quadratic())?;
        let bl = build_bilinear(&mut bld, op.quadratic())?;
        let (kh, lh) = bl.hat.clone();
        let amp = bld.bind("amp", call(&bl.hash, Expr::B, Expr::A));
        let det = &(&kh * &kh) - &(&lh * &lh);
        let dinv = det
            .inv()
            .ok_or_else(|| Error::CheckFailed(String::from("k̂ = ±l̂")))?;
        let (r, s) = (&kh * &dinv, -&(&lh * &dinv));
        mul = bld.bind(
            "mul2",
            circ(
                smul(r, call(&bl.hash, Expr::A, Expr::B)),
                smul(s, call(&amp, Expr::A, Expr::B)),
            ),
        );
        let [k, l, _, _] = bl.dollar_quad.clone();
        let d = |x: Expr, y: Expr| call(&bl.dollar, x, y);
        let body = d(
            d(d(Expr::A, Expr::B), smul(-&k, call(&mul, Expr::A, Expr::B))),
            smul(-&l, call(&mul, Expr::B, Expr::A)),
        );
        add = bld.bind("add2", body);
        branch = bl.branch;
    }
    for level in 3..=c {
        let free = free_nilpotent(field, &["a", "b"], level, variety)?;
        let (na, nm) = lift_level(&mut bld, op, &free, level, &add, &mul)?;
        add = na;
        mul = nm;
    }
    let out = Reconstruction {
        class: c,
        variety,
        add: DerivedExpr::pruned(&bld.bindings, call(&add, Expr::A, Expr::B)),
        mul: DerivedExpr::pruned(&bld.bindings, call(&mul, Expr::A, Expr::B)),
        branch,
    };
    if c >= 2 {
        let free = free_nilpotent(field, &["a", "b"], c, variety)?;
        verify_on_free(op, &out, &free)?;
    }
    Ok(out)
}

fn monomial(tree: &Tree, times: &str) -> Expr {
    match tree {
        Tree::Leaf(0) => Expr::A,
        Tree::Leaf(_) => Expr::B,
        Tree::Node(l, r) => call(times, monomial(l, times), monomial(r, times)),
    }
}

/// One induction step: from operations exact modulo `N^c` to exact ones.
fn lift_level(
    bld: &mut Builder,
    op: &CircleOp,
    free: &FreeNilpotentAlgebra,
    c: usize,
    plus: &str,
    times: &str,
) -> Result<(String, String)> {
    let field = bld.field;
    let neg = |x: Expr| smul(field.from_i64(-1), x);
    // a • b = ab + g1(a, b) with every monomial of g1 involving both a and b.
    let bullet = bld.bind(
        &format!("bullet{c}"),
        call(
            plus,
            call(
                plus,
                call(times, Expr::A, Expr::B),
                neg(call(times, Expr::A, smul(field.zero(), Expr::B))),
            ),
            neg(call(times, smul(field.zero(), Expr::A), Expr::B)),
        ),
    );
    let top: Vec<usize> = free.degree_indices(c);
    let express = |z: &[FieldElement]| -> Expr {
        let mut acc: Option<Expr> = None;
        for &i in &top {
            if z[i].is_zero() {
                continue;
            }
            let (u, v) = free.splits[i].expect("degree >= 2 has a split");
            let term = smul(
                z[i].clone(),
                call(
                    &bullet,
                    monomial(&free.trees[u], times),
                    monomial(&free.trees[v], times),
                ),
            );
            acc = Some(match acc {
                None => term,
                Some(prev) => circ(prev, term),
            });
        }
        acc.unwrap_or_else(|| smul(field.zero(), Expr::A))
    };
    let alg = &free.algebra;
    let (a, b) = (free.generator_element(0), free.generator_element(1));
    let zero = linalg::zeros(field, alg.dim());
    let mut ev = Evaluator::new(op, alg, &bld.bindings)?;
    let ab = alg.mul_vec(&a, &b);
    let g1 = linalg::sub_vec(&ev.eval(&call(&bullet, Expr::A, Expr::B), &a, &b)?, &ab);
    let sum = linalg::add_vec(&a, &b);
    let g = linalg::sub_vec(&ev.eval(&call(plus, Expr::A, Expr::B), &a, &b)?, &sum);
    let g_sum = linalg::sub_vec(&ev.eval(&call(plus, Expr::A, Expr::B), &sum, &zero)?, &sum);
    for v in [&g1, &g, &g_sum] {
        if v.iter()
            .enumerate()
            .any(|(i, x)| !x.is_zero() && free.degrees[i] < c)
        {
            return Err(Error::CheckFailed(format!(
                "class {} operations are not exact below degree {c}",
                c - 1
            )));
        }
    }
    let neg_g1: Vector = g1.iter().map(|x| -x).collect();
    let h: Vector = linalg::add_vec(&g, &g_sum).iter().map(|x| -x).collect();
    let mul = bld.bind(
        &format!("mul{c}"),
        call(plus, call(&bullet, Expr::A, Expr::B), express(&neg_g1)),
    );
    let add = bld.bind(
        &format!("add{c}"),
        call(plus, call(plus, Expr::A, Expr::B), express(&h)),
    );
    Ok((add, mul))
}

fn verify_on_free(op: &CircleOp, r: &Reconstruction, free: &FreeNilpotentAlgebra) -> Result<()> {
    let alg = &free.algebra;
    let (a, b) = (free.generator_element(0), free.generator_element(1));
    if r.add.evaluate(op, alg, &a, &b)? != linalg::add_vec(&a, &b) {
        return Err(Error::CheckFailed(String::from(
            "reconstructed addition is wrong on the free algebra",
        )));
    }
    if r.mul.evaluate(op, alg, &a, &b)? != alg.mul_vec(&a, &b) {
        return Err(Error::CheckFailed(String::from(
            "reconstructed product is wrong on the free algebra",
        )));
    }
    Ok(())
}

/// Comparison of the class-`c` and class-`(c-1)` reconstructions on the free
/// algebra of class `c - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoherenceReport {
    pub class: usize,
    pub add_agrees: bool,
    pub mul_agrees: bool,
}

impl CoherenceReport {
    pub fn holds(&self) -> bool {
        self.add_agrees && self.mul_agrees
    }
}

pub fn truncation_coherence(op: &CircleOp, c: usize, variety: Variety) -> Result<CoherenceReport> {
    if c < 2 {
        return Err(Error::InvalidInput(String::from(
            "coherence needs class at least 2",
        )));
    }
    let hi = reconstruct_ops(op, c, variety)?;
    let lo = reconstruct_ops(op, c - 1, variety)?;
    let free = free_nilpotent(op.field(), &["a", "b"], c - 1, variety)?;
    let alg = &free.algebra;
    let (a, b) = (free.generator_element(0), free.generator_element(1));
    Ok(CoherenceReport {
        class: c,
        add_agrees: hi.add.evaluate(op, alg, &a, &b)? == lo.add.evaluate(op, alg, &a, &b)?,
        mul_agrees: hi.mul.evaluate(op, alg, &a, &b)? == lo.mul.evaluate(op, alg, &a, &b)?,
    })
}

/// Everything obtainable from `generators` by `∘` and scalar multiples
/// (finite fields only).
pub fn derived_closure(op: &CircleOp, generators: &[Vector]) -> Result<Vec<Vector>> {
    let scalars = op
        .field()
        .elements()
        .ok_or_else(|| Error::UnsupportedField(String::from("closure needs a finite field")))?;
    let mut set: BTreeSet<Vector> = generators.iter().cloned().collect();
    loop {
        let items: Vec<Vector> = set.iter().cloned().collect();
        let before = set.len();
        for x in &items {
            for s in &scalars {
                set.insert(linalg::scale_vec(s, x));
            }
            for y in &items {
                set.insert(op.circle(x, y)?);
            }
        }
        if set.len() == before {
            return Ok(set.into_iter().collect());
        }
    }
}
