//! Polynomial operations `a ∘ b = a + b + f(a, b)` and the BCH group law.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::algebra::Algebra;
use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::free::{free_nilpotent, FreeNilpotentAlgebra, Tree, Variety};
use crate::linalg::{self, Vector};
use crate::polyfun::{PTree, PolyFunction};
use crate::sample::Sampler;
use crate::solver::solve_square;

fn quad(i: usize, j: usize) -> PTree {
    PTree::Node(
        alloc::boxed::Box::new(PTree::Var(i)),
        alloc::boxed::Box::new(PTree::Var(j)),
    )
}

/// `a ∘ b = a + b + f(a, b)` with `f` free of constants and linear terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircleOp {
    f: PolyFunction,
    /// Coefficients of `xy, yx, x², y²` in `f`.
    quadratic: [FieldElement; 4],
}

impl CircleOp {
    pub fn new(f: PolyFunction) -> Result<CircleOp> {
        if f.arity() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: f.arity(),
            });
        }
        if f.terms().any(|(t, _)| t.has_const()) {
            return Err(Error::InvalidInput(String::from(
                "f must not contain algebra constants",
            )));
        }
        if f.terms().any(|(t, _)| t.degree() < 2) {
            return Err(Error::InvalidInput(String::from(
                "f must not have linear terms",
            )));
        }
        let quadratic = [
            f.coefficient(&quad(0, 1)),
            f.coefficient(&quad(1, 0)),
            f.coefficient(&quad(0, 0)),
            f.coefficient(&quad(1, 1)),
        ];
        Ok(CircleOp { f, quadratic })
    }

    /// `f = kxy + lyx + mx² + ny²`.
    pub fn from_quadratic(
        alg: Arc<Algebra>,
        k: FieldElement,
        l: FieldElement,
        m: FieldElement,
        n: FieldElement,
    ) -> CircleOp {
        let x = PolyFunction::var(alg.clone(), 2, 0);
        let y = PolyFunction::var(alg, 2, 1);
        let f = x
            .mul(&y)
            .unwrap()
            .scale(&k)
            .add(&y.mul(&x).unwrap().scale(&l))
            .unwrap()
            .add(&x.mul(&x).unwrap().scale(&m))
            .unwrap()
            .add(&y.mul(&y).unwrap().scale(&n))
            .unwrap();
        CircleOp::new(f).expect("quadratic form is a valid operation")
    }

    /// `a ∘ b = a + b + ab`.
    pub fn product(alg: Arc<Algebra>) -> CircleOp {
        let field = alg.field();
        CircleOp::from_quadratic(alg, field.one(), field.zero(), field.zero(), field.zero())
    }

    /// The BCH group law of a nilpotent Lie algebra over ℚ.
    pub fn bch(alg: Arc<Algebra>) -> Result<CircleOp> {
        let x = PolyFunction::var(alg.clone(), 2, 0);
        let y = PolyFunction::var(alg.clone(), 2, 1);
        let z = bch_polyfunction(alg)?;
        CircleOp::new(z.sub(&x)?.sub(&y)?)
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        self.f.algebra()
    }

    pub fn field(&self) -> Field {
        self.algebra().field()
    }

    pub fn f(&self) -> &PolyFunction {
        &self.f
    }

    /// `(k, l, m, n)`.
    pub fn quadratic(&self) -> &[FieldElement; 4] {
        &self.quadratic
    }

    /// The same operation on another algebra (trees are reused verbatim).
    pub fn on_algebra(&self, alg: Arc<Algebra>) -> Result<CircleOp> {
        if alg.field() != self.field() {
            return Err(Error::AlgebraMismatch);
        }
        CircleOp::new(self.f.map_constants(alg, |v| v.to_vec()))
    }

    pub fn circle(&self, a: &[FieldElement], b: &[FieldElement]) -> Result<Vector> {
        let v = self.f.evaluate(&[a.to_vec(), b.to_vec()])?;
        Ok(linalg::add_vec(&linalg::add_vec(a, b), &v))
    }

    fn constant(&self, v: &[FieldElement]) -> PolyFunction {
        PolyFunction::constant(self.algebra().clone(), 1, v)
    }

    /// The unique `y` with `a ∘ y = c`.
    pub fn left_divide(&self, a: &[FieldElement], c: &[FieldElement]) -> Result<Vector> {
        let y = PolyFunction::var(self.algebra().clone(), 1, 0);
        let ca = self.constant(a);
        let eq = self
            .f
            .substitute_all(&[ca.clone(), y.clone()])?
            .add(&ca)?
            .add(&y)?
            .sub(&self.constant(c))?;
        Ok(solve_square(&[eq])?.remove(0))
    }

    /// The unique `x` with `x ∘ b = c`.
    pub fn right_divide(&self, b: &[FieldElement], c: &[FieldElement]) -> Result<Vector> {
        let x = PolyFunction::var(self.algebra().clone(), 1, 0);
        let cb = self.constant(b);
        let eq = self
            .f
            .substitute_all(&[x.clone(), cb.clone()])?
            .add(&cb)?
            .add(&x)?
            .sub(&self.constant(c))?;
        Ok(solve_square(&[eq])?.remove(0))
    }

    /// The right inverse: `a ∘ a⁻¹ = 0`.
    pub fn inverse(&self, a: &[FieldElement]) -> Result<Vector> {
        self.left_divide(a, &linalg::zeros(self.field(), a.len()))
    }

    /// `[a, b]∘ = (a ∘ b) ∘ (a⁻¹ ∘ b⁻¹)`.
    pub fn commutator(&self, a: &[FieldElement], b: &[FieldElement]) -> Result<Vector> {
        let ab = self.circle(a, b)?;
        let ib = self.circle(&self.inverse(a)?, &self.inverse(b)?)?;
        self.circle(&ab, &ib)
    }

    /// `a^n` as the left-normed product `((a ∘ a) ∘ a) ∘ ...`.
    pub fn power(&self, a: &[FieldElement], n: usize) -> Result<Vector> {
        let mut x = linalg::zeros(self.field(), a.len());
        for _ in 0..n {
            x = self.circle(&x, a)?;
        }
        Ok(x)
    }

    /// `a^q = q·a` in an anticommutative algebra over ℚ.
    pub fn rational_power(&self, a: &[FieldElement], q: &FieldElement) -> Result<Vector> {
        if self.field() != Field::Q || q.field() != Field::Q {
            return Err(Error::UnsupportedField(String::from(
                "rational powers need the rationals",
            )));
        }
        if !self.algebra().flags().anticommutative {
            return Err(Error::UnsupportedVariety(String::from(
                "rational powers need an anticommutative algebra",
            )));
        }
        Ok(linalg::scale_vec(q, a))
    }

    /// Closure of a set under `∘` (finite fields only).
    pub fn closure(&self, generators: &[Vector]) -> Result<Vec<Vector>> {
        if self.field() == Field::Q {
            return Err(Error::UnsupportedField(String::from(
                "closure needs a finite field",
            )));
        }
        let mut set: BTreeSet<Vector> = generators.iter().cloned().collect();
        loop {
            let items: Vec<Vector> = set.iter().cloned().collect();
            let mut grown = false;
            for a in &items {
                for b in &items {
                    if set.insert(self.circle(a, b)?) {
                        grown = true;
                    }
                }
            }
            if !grown {
                return Ok(set.into_iter().collect());
            }
        }
    }

    /// All elements of a finite algebra with the full Cayley table as indices.
    pub fn cayley_table(&self, limit: usize) -> Result<(Vec<Vector>, Vec<Vec<usize>>)> {
        let elements = all_elements(self.field(), self.algebra().dim(), limit)?;
        let index: BTreeMap<&Vector, usize> =
            elements.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let mut table = Vec::with_capacity(elements.len());
        for a in &elements {
            let row = elements
                .iter()
                .map(|b| self.circle(a, b).map(|c| index[&c]))
                .collect::<Result<_>>()?;
            table.push(row);
        }
        Ok((elements, table))
    }
}

/// All vectors of `GF(p)^d` in lexicographic order, if there are at most `limit`.
pub fn all_elements(field: Field, d: usize, limit: usize) -> Result<Vec<Vector>> {
    let els = field
        .elements()
        .ok_or_else(|| Error::UnsupportedField(String::from("finite field required")))?;
    let total = (els.len() as u128)
        .checked_pow(d as u32)
        .unwrap_or(u128::MAX);
    if total > limit as u128 {
        return Err(Error::InvalidInput(alloc::format!(
            "{total} elements exceed the limit {limit}"
        )));
    }
    let mut out: Vec<Vector> = alloc::vec![Vec::new()];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|v| {
                els.iter().map(move |x| {
                    let mut w = v.clone();
                    w.push(x.clone());
                    w
                })
            })
            .collect();
    }
    Ok(out)
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Coordinates of `log(exp x · exp y)` in the Lyndon basis of the free Lie
/// algebra on `x, y` of class `c`, by Dynkin's formula with right-nested
/// brackets.
pub fn bch_lie_coordinates(c: usize) -> Result<(FreeNilpotentAlgebra, Vector)> {
    let free = free_nilpotent(Field::Q, &["x", "y"], c, Variety::Lie)?;
    let field = Field::Q;
    let mut total = linalg::zeros(field, free.dim());
    let mut cache: BTreeMap<Vec<usize>, Vector> = BTreeMap::new();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    dynkin(&free, c, 0, &mut pairs, &mut cache, &mut total);
    Ok((free, total))
}

fn dynkin(
    free: &FreeNilpotentAlgebra,
    c: usize,
    used: usize,
    pairs: &mut Vec<(usize, usize)>,
    cache: &mut BTreeMap<Vec<usize>, Vector>,
    total: &mut Vector,
) {
    for len in 1..=c - used {
        for r in 0..=len {
            pairs.push((r, len - r));
            let n = used + len;
            let mut word = Vec::with_capacity(n);
            let mut denom: i64 = (pairs.len() * n) as i64;
            for &(r, s) in pairs.iter() {
                word.extend(core::iter::repeat(0).take(r));
                word.extend(core::iter::repeat(1).take(s));
                denom *= (factorial(r) * factorial(s)) as i64;
            }
            let v = cache
                .entry(word.clone())
                .or_insert_with(|| right_nested(free, &word))
                .clone();
            if !linalg::is_zero_vec(&v) {
                let sign = if pairs.len() % 2 == 1 { 1 } else { -1 };
                linalg::axpy(total, &Field::Q.ratio(sign, denom), &v);
            }
            dynkin(free, c, n, pairs, cache, total);
            pairs.pop();
        }
    }
}

fn right_nested(free: &FreeNilpotentAlgebra, word: &[usize]) -> Vector {
    let mut v = free.generator_element(*word.last().unwrap());
    for &g in word[..word.len() - 1].iter().rev() {
        v = free.algebra.mul_vec(&free.generator_element(g), &v);
    }
    v
}

fn tree_function(t: &Tree, alg: &Arc<Algebra>) -> PolyFunction {
    match t {
        Tree::Leaf(i) => PolyFunction::var(alg.clone(), 2, *i),
        Tree::Node(l, r) => tree_function(l, alg)
            .mul(&tree_function(r, alg))
            .expect("same algebra"),
    }
}

/// The BCH series truncated at the class of `alg`, as a polynomial function
/// of two variables written with Lyndon-basis brackets.
pub fn bch_polyfunction(alg: Arc<Algebra>) -> Result<PolyFunction> {
    if !alg.flags().lie {
        return Err(Error::NotLie);
    }
    if alg.field() != Field::Q {
        return Err(Error::PositiveCharacteristic);
    }
    let c = alg.nilpotency_class()?;
    let (free, coords) = bch_lie_coordinates(c)?;
    let mut z = PolyFunction::zero(alg.clone(), 2);
    for (i, x) in coords.iter().enumerate() {
        if !x.is_zero() {
            z = z.add(&tree_function(&free.trees[i], &alg).scale(x))?;
        }
    }
    Ok(z)
}

/// `log(exp x · exp y)` evaluated in a nilpotent Lie algebra over ℚ.
pub fn bch(alg: &Arc<Algebra>, x: &[FieldElement], y: &[FieldElement]) -> Result<Vector> {
    bch_polyfunction(alg.clone())?.evaluate(&[x.to_vec(), y.to_vec()])
}

/// Outcome of checking one identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityReport {
    pub name: &'static str,
    pub checked: usize,
    pub counterexample: Option<Vec<Vector>>,
}

impl IdentityReport {
    pub fn holds(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// The identities checked by [`check_identities`], in report order.
pub const IDENTITIES: [&str; 6] = [
    "neutral",
    "left-division",
    "right-division",
    "flexibility",
    "commutator",
    "associativity",
];

fn check_one(op: &CircleOp, name: &'static str, t: &[Vector]) -> Result<bool> {
    let (a, b, c) = (&t[0], &t[1], &t[2]);
    let zero = linalg::zeros(op.field(), a.len());
    Ok(match name {
        "neutral" => op.circle(a, &zero)? == *a && op.circle(&zero, a)? == *a,
        "left-division" => op.circle(a, &op.left_divide(a, c)?)? == *c,
        "right-division" => op.circle(&op.right_divide(b, c)?, b)? == *c,
        "flexibility" => op.circle(a, &op.circle(b, a)?)? == op.circle(&op.circle(a, b)?, a)?,
        "commutator" => {
            let u = op.commutator(a, b)?;
            let v = op.commutator(&op.inverse(a)?, &op.inverse(b)?)?;
            linalg::is_zero_vec(&op.commutator(&u, &v)?)
        }
        _ => op.circle(&op.circle(a, b)?, c)? == op.circle(a, &op.circle(b, c)?)?,
    })
}

fn run_checks(op: &CircleOp, tuples: &[Vec<Vector>]) -> Result<Vec<IdentityReport>> {
    let mut out = Vec::new();
    for name in IDENTITIES {
        let mut rep = IdentityReport {
            name,
            checked: 0,
            counterexample: None,
        };
        for t in tuples {
            rep.checked += 1;
            if !check_one(op, name, t)? {
                rep.counterexample = Some(t.clone());
                break;
            }
        }
        out.push(rep);
    }
    Ok(out)
}

/// Checks loop axioms and the flexibility and commutator laws on `samples`
/// random triples drawn from `seed`.
pub fn check_identities(op: &CircleOp, samples: usize, seed: u64) -> Result<Vec<IdentityReport>> {
    let mut s = Sampler::new(seed);
    let (field, d) = (op.field(), op.algebra().dim());
    let tuples: Vec<Vec<Vector>> = (0..samples)
        .map(|_| (0..3).map(|_| s.fraction_vector(field, d, 3)).collect())
        .collect();
    run_checks(op, &tuples)
}

/// Checks the same identities on every triple of a finite algebra.
pub fn check_identities_exhaustive(op: &CircleOp, limit: usize) -> Result<Vec<IdentityReport>> {
    let els = all_elements(op.field(), op.algebra().dim(), limit)?;
    let mut tuples = Vec::new();
    for a in &els {
        for b in &els {
            for c in &els {
                tuples.push(alloc::vec![a.clone(), b.clone(), c.clone()]);
            }
        }
    }
    run_checks(op, &tuples)
}
