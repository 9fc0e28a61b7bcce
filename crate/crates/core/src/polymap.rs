//! Groups of polynomial substitutions `x ↦ a_1 x + a_2 x² + ...` on a
//! nilpotent algebra, the truncated power series case `A_c = t F[t] / (t^{c+1})`,
//! its Lie algebra of vector fields and the filiform algebras `L(k)`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::{Algebra, Flags, Table};
use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::linalg::{self, Matrix, Vector};
use crate::polyfun::{PTree, PolyFunction};
use crate::solver::solve_square;

/// A substitution on a nilpotent algebra, stored as a one-variable
/// polynomial function with scalar coefficients on monomial shapes.
#[derive(Clone, Debug)]
pub struct PolyMap {
    f: PolyFunction,
}

impl PartialEq for PolyMap {
    fn eq(&self, other: &PolyMap) -> bool {
        self.f.terms().eq(other.f.terms())
    }
}

impl PolyMap {
    pub fn new(f: PolyFunction) -> Result<PolyMap> {
        if f.arity() != 1 {
            return Err(Error::InvalidInput(format!(
                "a substitution has one variable, got {}",
                f.arity()
            )));
        }
        f.algebra().nilpotency_class()?;
        if f.terms().any(|(t, _)| t.has_const()) {
            return Err(Error::InvalidInput(String::from(
                "substitutions have scalar coefficients only",
            )));
        }
        if f.linear_part()[0].is_zero() {
            return Err(Error::NotInvertible);
        }
        Ok(PolyMap { f })
    }

    /// `x ↦ a x`.
    pub fn scalar(alg: Arc<Algebra>, a: &FieldElement) -> Result<PolyMap> {
        PolyMap::new(PolyFunction::var(alg, 1, 0).scale(a))
    }

    pub fn identity(alg: Arc<Algebra>) -> PolyMap {
        PolyMap {
            f: PolyFunction::var(alg, 1, 0),
        }
    }

    pub fn function(&self) -> &PolyFunction {
        &self.f
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        self.f.algebra()
    }

    /// `a_1`; the map `f ↦ a_1` is a homomorphism onto `F*`.
    pub fn leading_coefficient(&self) -> FieldElement {
        self.f.linear_part().remove(0)
    }

    pub fn coefficient(&self, t: &PTree) -> FieldElement {
        self.f.coefficient(t)
    }

    /// Member of `U` (`a_1 = 1`).
    pub fn is_unipotent(&self) -> bool {
        self.leading_coefficient().is_one()
    }

    /// Member of `U_k`: unipotent with no monomials of degree `2..=k`.
    pub fn in_u(&self, k: usize) -> bool {
        self.is_unipotent()
            && self
                .f
                .terms()
                .all(|(t, _)| t.degree() == 1 || t.degree() > k)
    }

    /// Lowest degree `>= 2` of a monomial present.
    pub fn nonlinear_degree(&self) -> Option<usize> {
        self.f
            .terms()
            .map(|(t, _)| t.degree())
            .filter(|&d| d >= 2)
            .min()
    }

    pub fn evaluate(&self, x: &[FieldElement]) -> Result<Vector> {
        self.f.evaluate(&[x.to_vec()])
    }

    /// `(fg)(x) = f(g(x))`.
    pub fn compose(&self, g: &PolyMap) -> Result<PolyMap> {
        Ok(PolyMap {
            f: self.f.substitute_all(core::slice::from_ref(&g.f))?,
        })
    }

    /// Solves `f(g(x)) = x` by the fixed point `g = (x - N(g)) / a_1`, which
    /// gains one degree per round.
    pub fn invert(&self) -> Result<PolyMap> {
        let alg = self.algebra().clone();
        let a1 = self.leading_coefficient();
        let inv = a1.inv().ok_or(Error::NotInvertible)?;
        let x = PolyFunction::var(alg.clone(), 1, 0);
        let n = self.f.sub(&x.scale(&a1))?;
        let mut g = x.scale(&inv);
        for _ in 0..alg.nilpotency_class()? {
            g = x.sub(&n.substitute_all(&[g])?)?.scale(&inv);
        }
        Ok(PolyMap { f: g })
    }

    /// `f g f⁻¹ g⁻¹`.
    pub fn commutator(&self, g: &PolyMap) -> Result<PolyMap> {
        self.compose(&g.compose(&self.invert()?.compose(&g.invert()?)?)?)
    }
}

/// `A_c`: polynomials in `t` without constant term modulo `t^{c+1}`, on the
/// basis `t, t², ..., t^c`.
pub fn truncated_polynomials(field: Field, c: usize) -> Result<Algebra> {
    if c == 0 {
        return Err(Error::InvalidInput(String::from("need c >= 1")));
    }
    let mut table = Table::new();
    for i in 1..=c {
        for j in 1..=c - i {
            if i + j <= c {
                table.insert((i - 1, j - 1), vec![(i + j - 1, field.one())]);
            }
        }
    }
    let names = (1..=c)
        .map(|i| {
            if i == 1 {
                String::from("t")
            } else {
                format!("t^{i}")
            }
        })
        .collect();
    Algebra::new(
        field,
        names,
        table,
        Flags {
            commutative: true,
            associative: true,
            ..Flags::NONE
        },
    )
}

/// A substitution on `A_c` given by `(a_1, ..., a_c)`; it is determined by
/// the image of `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesMap {
    coeffs: Vec<FieldElement>,
}

fn series_mul(a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
    // Index i holds the coefficient of t^{i+1}.
    let c = a.len();
    let mut out = vec![a[0].zero_like(); c];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(c.saturating_sub(i + 1)) {
            out[i + j + 1] += &(x * y);
        }
    }
    out
}

impl SeriesMap {
    pub fn new(coeffs: Vec<FieldElement>) -> Result<SeriesMap> {
        let first = coeffs
            .first()
            .ok_or_else(|| Error::InvalidInput(String::from("empty coefficient list")))?;
        if coeffs.iter().any(|x| x.field() != first.field()) {
            return Err(Error::AlgebraMismatch);
        }
        if first.is_zero() {
            return Err(Error::NotInvertible);
        }
        Ok(SeriesMap { coeffs })
    }

    pub fn from_ints(field: Field, coeffs: &[i64]) -> Result<SeriesMap> {
        SeriesMap::new(coeffs.iter().map(|&x| field.from_i64(x)).collect())
    }

    pub fn identity(field: Field, c: usize) -> SeriesMap {
        let mut coeffs = vec![field.zero(); c];
        coeffs[0] = field.one();
        SeriesMap { coeffs }
    }

    /// `x ↦ x + a x^s`.
    pub fn elementary(field: Field, c: usize, s: usize, a: &FieldElement) -> SeriesMap {
        let mut f = SeriesMap::identity(field, c);
        if (2..=c).contains(&s) {
            f.coeffs[s - 1] = a.clone();
        }
        f
    }

    pub fn class(&self) -> usize {
        self.coeffs.len()
    }

    pub fn field(&self) -> Field {
        self.coeffs[0].field()
    }

    /// `a_1, ..., a_c`.
    pub fn coefficients(&self) -> &[FieldElement] {
        &self.coeffs
    }

    /// `a_s` for `1 <= s <= c`.
    pub fn coefficient(&self, s: usize) -> FieldElement {
        self.coeffs[s - 1].clone()
    }

    pub fn is_unipotent(&self) -> bool {
        self.coeffs[0].is_one()
    }

    pub fn is_identity(&self) -> bool {
        self.is_unipotent() && self.coeffs[1..].iter().all(|x| x.is_zero())
    }

    /// Member of `U_k`.
    pub fn in_u(&self, k: usize) -> bool {
        self.is_unipotent()
            && self.coeffs[1..k.min(self.class())]
                .iter()
                .all(|x| x.is_zero())
    }

    /// Smallest `s >= 2` with `a_s != 0`.
    pub fn nonlinear_degree(&self) -> Option<usize> {
        (2..=self.class()).find(|&s| !self.coeffs[s - 1].is_zero())
    }

    fn check(&self, g: &SeriesMap) -> Result<()> {
        if g.class() != self.class() {
            return Err(Error::DimensionMismatch {
                expected: self.class(),
                found: g.class(),
            });
        }
        if g.field() != self.field() {
            return Err(Error::AlgebraMismatch);
        }
        Ok(())
    }

    /// `f(g(t))`, truncated past `t^c`.
    pub fn compose(&self, g: &SeriesMap) -> Result<SeriesMap> {
        self.check(g)?;
        let c = self.class();
        let mut out = vec![self.field().zero(); c];
        let mut power = g.coeffs.clone();
        for (i, a) in self.coeffs.iter().enumerate() {
            if i > 0 {
                power = series_mul(&power, &g.coeffs);
            }
            if !a.is_zero() {
                linalg::axpy(&mut out, a, &power);
            }
        }
        Ok(SeriesMap { coeffs: out })
    }

    /// `Σ a_i y^i` for `y` in `A_c`.
    pub fn evaluate(&self, y: &[FieldElement]) -> Result<Vector> {
        if y.len() != self.class() {
            return Err(Error::DimensionMismatch {
                expected: self.class(),
                found: y.len(),
            });
        }
        let as_map = SeriesMap { coeffs: y.to_vec() };
        let mut out = vec![self.field().zero(); self.class()];
        let mut power = as_map.coeffs.clone();
        for (i, a) in self.coeffs.iter().enumerate() {
            if i > 0 {
                power = series_mul(&power, &as_map.coeffs);
            }
            linalg::axpy(&mut out, a, &power);
        }
        Ok(out)
    }

    /// The same substitution written as a polynomial function on `A_c`.
    pub fn to_polymap(&self) -> Result<PolyMap> {
        let alg = Arc::new(truncated_polynomials(self.field(), self.class())?);
        let x = PolyFunction::var(alg.clone(), 1, 0);
        let mut acc = PolyFunction::zero(alg, 1);
        let mut power = x.clone();
        for (i, a) in self.coeffs.iter().enumerate() {
            if i > 0 {
                power = power.mul(&x)?;
            }
            acc = acc.add(&power.scale(a))?;
        }
        PolyMap::new(acc)
    }

    /// The inverse by triangular lifting: the `t^s` coefficient of `f(g(t))`
    /// is `a_1 g_s` plus terms in `g_1, ..., g_{s-1}`.
    pub fn invert(&self) -> Result<SeriesMap> {
        let f = self.field();
        let inv = self.coeffs[0].inv().ok_or(Error::NotInvertible)?;
        let mut g = SeriesMap {
            coeffs: vec![f.zero(); self.class()],
        };
        g.coeffs[0] = inv.clone();
        for s in 2..=self.class() {
            let e = self.compose(&g)?.coeffs[s - 1].clone();
            g.coeffs[s - 1] = -(e * &inv);
        }
        Ok(g)
    }

    /// The inverse as the solution `y` of `f(y) = t`, a nonsingular square
    /// system over `A_c`.
    pub fn invert_by_solver(&self) -> Result<SeriesMap> {
        let pm = self.to_polymap()?;
        let alg = pm.algebra().clone();
        let t =
            PolyFunction::constant(alg.clone(), 1, &linalg::unit(self.field(), self.class(), 0));
        let y = solve_square(&[pm.function().sub(&t)?])?.remove(0);
        SeriesMap::new(y)
    }

    /// `f g f⁻¹ g⁻¹`.
    pub fn commutator(&self, g: &SeriesMap) -> Result<SeriesMap> {
        self.compose(&g.compose(&self.invert()?.compose(&g.invert()?)?)?)
    }

    /// `g⁻¹ f g`.
    pub fn conjugate(&self, g: &SeriesMap) -> Result<SeriesMap> {
        g.invert()?.compose(&self.compose(g)?)
    }

    /// `f^n` for `n >= 0`.
    pub fn power(&self, n: usize) -> Result<SeriesMap> {
        let mut acc = SeriesMap::identity(self.field(), self.class());
        for _ in 0..n {
            acc = acc.compose(self)?;
        }
        Ok(acc)
    }

    /// The unique `h` in `U` with `h^n = f`, found degree by degree: the
    /// `t^s` coefficient of `h^n` is `n h_s` plus terms in lower `h_i`.
    pub fn root(&self, n: usize) -> Result<SeriesMap> {
        if !self.is_unipotent() {
            return Err(Error::NotMember(String::from("roots are taken in U")));
        }
        let inv_n = self
            .field()
            .from_i64(n as i64)
            .inv()
            .ok_or(Error::PositiveCharacteristic)?;
        let mut h = SeriesMap::identity(self.field(), self.class());
        for s in 2..=self.class() {
            let hn = h.power(n)?;
            let gap = &self.coeffs[s - 1] - &hn.coeffs[s - 1];
            h.coeffs[s - 1] = gap * &inv_n;
        }
        Ok(h)
    }
}

/// `v(x) d/dx` with `v = Σ_{s=2}^{c} v_s x^s`: an element of the Lie algebra
/// of `U(A_c)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorField {
    /// Index `i` holds `v_{i+2}`.
    coeffs: Vec<FieldElement>,
}

impl VectorField {
    /// `(v_2, ..., v_c)`.
    pub fn new(coeffs: Vec<FieldElement>) -> Result<VectorField> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput(String::from("need c >= 2")));
        }
        Ok(VectorField { coeffs })
    }

    pub fn zero(field: Field, c: usize) -> VectorField {
        VectorField {
            coeffs: vec![field.zero(); c.max(2) - 1],
        }
    }

    /// `x^s d/dx`.
    pub fn monomial(field: Field, c: usize, s: usize) -> VectorField {
        let mut v = VectorField::zero(field, c);
        if (2..=c).contains(&s) {
            v.coeffs[s - 2] = field.one();
        }
        v
    }

    pub fn class(&self) -> usize {
        self.coeffs.len() + 1
    }

    pub fn field(&self) -> Field {
        self.coeffs[0].field()
    }

    /// Coordinates on the basis `e_2, ..., e_c`.
    pub fn coordinates(&self) -> &[FieldElement] {
        &self.coeffs
    }

    fn v_series(&self) -> Vec<FieldElement> {
        let mut s = vec![self.field().zero()];
        s.extend(self.coeffs.iter().cloned());
        s
    }

    /// `D(p) = v p'` on `A_c`, for `p` given by `(p_1, ..., p_c)`.
    pub fn apply(&self, p: &[FieldElement]) -> Vector {
        let f = self.field();
        let c = self.class();
        // p' has constant term p_1, so v p' = Σ_i i p_i t^{i-1} v.
        let mut out = vec![f.zero(); c];
        let v = self.v_series();
        for (i, pi) in p.iter().enumerate() {
            let di = f.from_i64(i as i64 + 1) * pi;
            if di.is_zero() {
                continue;
            }
            for (s, vs) in v.iter().enumerate() {
                // t^i · v_{s+1} t^{s+1} / t = v_{s+1} t^{i+s+1}, stored at index i + s.
                if i + s < c {
                    out[i + s] += &(&di * vs);
                }
            }
        }
        out
    }

    /// `[v ∂, w ∂] = (v w' - w v') ∂`; on monomials `(j - i) x^{i+j-1}`.
    pub fn bracket(&self, other: &VectorField) -> Result<VectorField> {
        if other.class() != self.class() {
            return Err(Error::DimensionMismatch {
                expected: self.class(),
                found: other.class(),
            });
        }
        let (v, w) = (self.v_series(), other.v_series());
        let a = self.apply(&w);
        let b = other.apply(&v);
        Ok(VectorField {
            coeffs: linalg::sub_vec(&a, &b)[1..].to_vec(),
        })
    }

    pub fn add(&self, other: &VectorField) -> VectorField {
        VectorField {
            coeffs: linalg::add_vec(&self.coeffs, &other.coeffs),
        }
    }

    pub fn scale(&self, s: &FieldElement) -> VectorField {
        VectorField {
            coeffs: linalg::scale_vec(s, &self.coeffs),
        }
    }
}

/// `exp(D)(x) = Σ_k D^k(x) / k!`, truncated at degree `c`.
pub fn exp_map(d: &VectorField) -> Result<SeriesMap> {
    let f = d.field();
    if f.characteristic() != 0 && (f.characteristic() as usize) <= d.class() {
        return Err(Error::PositiveCharacteristic);
    }
    let c = d.class();
    let mut term = linalg::unit(f, c, 0);
    let mut acc = term.clone();
    for k in 1..c {
        term = d.apply(&term);
        let inv = f
            .from_i64(k as i64)
            .inv()
            .ok_or(Error::PositiveCharacteristic)?;
        term = linalg::scale_vec(&inv, &term);
        acc = linalg::add_vec(&acc, &term);
    }
    SeriesMap::new(acc)
}

/// Inverse of [`exp_map`] on `U`, by triangular lifting: the `x^s`
/// coefficient of `exp(D)(x)` is `v_s` plus terms in `v_2, ..., v_{s-1}`.
pub fn log_map(f: &SeriesMap) -> Result<VectorField> {
    if !f.is_unipotent() {
        return Err(Error::NotMember(String::from("log is defined on U")));
    }
    let c = f.class();
    if c < 2 {
        return Err(Error::InvalidInput(String::from("need c >= 2")));
    }
    let mut v = VectorField::zero(f.field(), c);
    for s in 2..=c {
        let e = exp_map(&v)?;
        v.coeffs[s - 2] = &f.coeffs[s - 1] - &e.coeffs[s - 1];
    }
    Ok(v)
}

/// The Lie algebra of `U(A_c)` on `e_2, ..., e_c` with
/// `[e_i, e_j] = (j - i) e_{i+j-1}` (zero past `e_c`).
pub fn vector_field_algebra(field: Field, c: usize) -> Result<Algebra> {
    if c < 2 {
        return Err(Error::InvalidInput(String::from("need c >= 2")));
    }
    let mut table = Table::new();
    for i in 2..=c {
        for j in 2..=c {
            let s = i + j - 1;
            let coef = field.from_i64(j as i64 - i as i64);
            if s <= c && !coef.is_zero() {
                table.insert((i - 2, j - 2), vec![(s - 2, coef)]);
            }
        }
    }
    let names = (2..=c).map(|s| format!("e{s}")).collect();
    Algebra::new(field, names, table, Flags::lie())
}

/// `L(k)`, the Lie algebra of `U(A_{2^k})`: filiform of dimension `2^k - 1`.
pub fn filiform(k: u32) -> Result<Algebra> {
    if !(2..=10).contains(&k) {
        return Err(Error::InvalidInput(String::from("k must lie in 2..=10")));
    }
    vector_field_algebra(Field::Q, 1 << k)
}

/// The grading derivation `e_s ↦ (s - 1) e_s` of `L(k)`.
pub fn weight_derivation(l: &Algebra) -> Matrix {
    let mut m = linalg::zero_matrix(l.field(), l.dim(), l.dim());
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = l.field().from_i64(i as i64 + 1);
    }
    m
}

/// Whether `d` satisfies `D(xy) = D(x) y + x D(y)` on basis pairs.
pub fn is_derivation(l: &Algebra, d: &Matrix) -> bool {
    let n = l.dim();
    let e = |i: usize| linalg::unit(l.field(), n, i);
    (0..n).all(|i| {
        (0..n).all(|j| {
            let lhs = linalg::mat_vec(d, &l.mul_vec(&e(i), &e(j)));
            let rhs = linalg::add_vec(
                &l.mul_vec(&linalg::mat_vec(d, &e(i)), &e(j)),
                &l.mul_vec(&e(i), &linalg::mat_vec(d, &e(j))),
            );
            lhs == rhs
        })
    })
}

/// `L ⋊ F d` with `[d, x] = D x`; the new basis vector comes first.
pub fn extend_with_derivation(l: &Algebra, d: &Matrix) -> Result<Algebra> {
    if d.len() != l.dim() {
        return Err(Error::DimensionMismatch {
            expected: l.dim(),
            found: d.len(),
        });
    }
    if !is_derivation(l, d) {
        return Err(Error::HypothesisViolated(String::from(
            "matrix is not a derivation",
        )));
    }
    let n = l.dim();
    let mut table = Table::new();
    for ((i, j), entries) in l.table() {
        table.insert(
            (i + 1, j + 1),
            entries.into_iter().map(|(k, g)| (k + 1, g)).collect(),
        );
    }
    for j in 0..n {
        let img: Vec<(usize, FieldElement)> = (0..n)
            .filter(|&k| !d[k][j].is_zero())
            .map(|k| (k + 1, d[k][j].clone()))
            .collect();
        if !img.is_empty() {
            table.insert((0, j + 1), img.clone());
            table.insert((j + 1, 0), img.into_iter().map(|(k, g)| (k, -g)).collect());
        }
    }
    let mut names = vec![String::from("d")];
    names.extend(l.basis_names().iter().cloned());
    Algebra::new(l.field(), names, table, l.flags())
}

fn leading_after_commutators(
    c: usize,
    left: &[usize],
    right: &[usize],
    field: Field,
) -> Result<usize> {
    let mut best = c + 1;
    for &i in left {
        for &j in right {
            let f = SeriesMap::elementary(field, c, i, &field.one());
            let g = SeriesMap::elementary(field, c, j, &field.one());
            if let Some(s) = f.commutator(&g)?.nonlinear_degree() {
                best = best.min(s);
            }
        }
    }
    Ok(best)
}

/// A term `U_k` of a series of `U(A_c)`, recorded by `k`.
fn u_generators(k: usize, c: usize) -> Vec<usize> {
    (k + 1..=c).collect()
}

/// Lower central series of `U(A_c)` as the indices `k` of its terms `U_k`,
/// ending with `c` (the trivial group). Each step takes the lowest degree
/// occurring in commutators of the elementary generators `x + x^s`; a normal
/// subgroup of `U` containing an element led by `x^s` (`s >= 4`) contains
/// all of `U_{s-1}`.
pub fn lower_central_series(c: usize) -> Result<Vec<usize>> {
    let mut out = vec![1];
    let all = u_generators(1, c);
    while *out.last().unwrap() < c {
        let k = *out.last().unwrap();
        let s = leading_after_commutators(c, &u_generators(k, c), &all, Field::Q)?;
        out.push((s - 1).min(c));
    }
    Ok(out)
}

/// Derived series of `U(A_c)` in the same encoding.
pub fn derived_series(c: usize) -> Result<Vec<usize>> {
    let mut out = vec![1];
    while *out.last().unwrap() < c {
        let k = *out.last().unwrap();
        let g = u_generators(k, c);
        let s = leading_after_commutators(c, &g, &g, Field::Q)?;
        out.push((s - 1).min(c));
    }
    Ok(out)
}

/// Nilpotency class of `U(A_c)`, from the lower central series.
pub fn u_nilpotency_class(c: usize) -> Result<usize> {
    Ok(lower_central_series(c)?.len() - 1)
}

/// Derived length of `U(A_c)`.
pub fn u_derived_length(c: usize) -> Result<usize> {
    Ok(derived_series(c)?.len() - 1)
}

/// Explicit iterated commutator sets: level 0 is `{x + x^s}` and level `j`
/// holds the nontrivial commutators of pairs from level `j - 1`. Returns the
/// lowest leading degree seen at each level.
pub fn derived_witness_degrees(c: usize, levels: usize) -> Result<Vec<Option<usize>>> {
    let field = Field::Q;
    let mut cur: Vec<SeriesMap> = (2..=c)
        .map(|s| SeriesMap::elementary(field, c, s, &field.one()))
        .collect();
    let mut out = Vec::new();
    for _ in 0..=levels {
        out.push(cur.iter().filter_map(|f| f.nonlinear_degree()).min());
        let mut seen = BTreeSet::new();
        let mut next = Vec::new();
        for (a, f) in cur.iter().enumerate() {
            for g in &cur[a + 1..] {
                let h = f.commutator(g)?;
                if !h.is_identity() && seen.insert(format!("{:?}", h.coefficients())) {
                    next.push(h);
                }
            }
        }
        cur = next;
    }
    Ok(out)
}
