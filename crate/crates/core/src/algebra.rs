//! Finite-dimensional algebras given by structure constants.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::linalg::{self, Matrix, Subspace, Vector};

/// Identities an algebra is declared to satisfy.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Flags {
    pub anticommutative: bool,
    pub lie: bool,
    pub associative: bool,
    pub commutative: bool,
}

impl Flags {
    pub const NONE: Flags = Flags {
        anticommutative: false,
        lie: false,
        associative: false,
        commutative: false,
    };

    pub fn lie() -> Flags {
        Flags {
            anticommutative: true,
            lie: true,
            ..Flags::NONE
        }
    }

    pub fn names(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.anticommutative {
            out.push("anticommutative");
        }
        if self.lie {
            out.push("lie");
        }
        if self.associative {
            out.push("associative");
        }
        if self.commutative {
            out.push("commutative");
        }
        out
    }

    pub fn from_names<'a>(names: impl IntoIterator<Item = &'a str>) -> Result<Flags> {
        let mut f = Flags::NONE;
        for n in names {
            match n {
                "anticommutative" => f.anticommutative = true,
                "lie" => {
                    f.lie = true;
                    f.anticommutative = true;
                }
                "associative" => f.associative = true,
                "commutative" => f.commutative = true,
                other => return Err(Error::InvalidInput(format!("unknown flag {other:?}"))),
            }
        }
        Ok(f)
    }
}

/// A vector of an algebra, stored densely.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element {
    pub coords: Vector,
}

impl Element {
    pub fn new(coords: Vector) -> Self {
        Element { coords }
    }

    pub fn zero(field: Field, dim: usize) -> Self {
        Element {
            coords: linalg::zeros(field, dim),
        }
    }

    pub fn basis(field: Field, dim: usize, i: usize) -> Self {
        Element {
            coords: linalg::unit(field, dim, i),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        linalg::is_zero_vec(&self.coords)
    }

    pub fn add(&self, other: &Element) -> Element {
        Element {
            coords: linalg::add_vec(&self.coords, &other.coords),
        }
    }

    pub fn sub(&self, other: &Element) -> Element {
        Element {
            coords: linalg::sub_vec(&self.coords, &other.coords),
        }
    }

    pub fn scale(&self, s: &FieldElement) -> Element {
        Element {
            coords: linalg::scale_vec(s, &self.coords),
        }
    }

    pub fn neg(&self) -> Element {
        Element {
            coords: self.coords.iter().map(|x| -x).collect(),
        }
    }
}

/// A finite-dimensional algebra with sparse structure constants
/// `e_i e_j = sum_k gamma_ij^k e_k`.
#[derive(Clone, Debug)]
pub struct Algebra {
    field: Field,
    basis: Vec<String>,
    /// `rows[i]` lists `(j, [(k, gamma)])` for the nonzero products `e_i e_j`.
    rows: Vec<Vec<(usize, Vec<(usize, FieldElement)>)>>,
    flags: Flags,
    /// `A^1, A^2, ...`, ending with the zero space when nilpotent.
    powers: Vec<Subspace>,
    class: Option<usize>,
}

pub type Table = BTreeMap<(usize, usize), Vec<(usize, FieldElement)>>;

impl PartialEq for Algebra {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field
            && self.basis == other.basis
            && self.rows == other.rows
            && self.flags == other.flags
    }
}

impl Eq for Algebra {}

impl Algebra {
    /// Builds an algebra, validating indices, scalars and the declared flags.
    pub fn new(field: Field, basis: Vec<String>, table: Table, flags: Flags) -> Result<Algebra> {
        let a = Algebra::unchecked(field, basis, table, flags)?;
        a.verify_flags()?;
        Ok(a)
    }

    /// Builds an algebra whose flags are trusted (used for constructions whose
    /// identities hold by design).
    pub(crate) fn unchecked(
        field: Field,
        basis: Vec<String>,
        table: Table,
        flags: Flags,
    ) -> Result<Algebra> {
        let mut a = Algebra::raw(field, basis, table, flags)?;
        let (powers, class) = a.compute_powers();
        a.powers = powers;
        a.class = class;
        Ok(a)
    }

    /// Builds a graded algebra generated in degree one, where `A^i` is the span
    /// of the basis vectors of degree at least `i`.
    pub(crate) fn graded(
        field: Field,
        basis: Vec<String>,
        table: Table,
        flags: Flags,
        degrees: &[usize],
    ) -> Result<Algebra> {
        let mut a = Algebra::raw(field, basis, table, flags)?;
        let d = a.dim();
        let top = degrees.iter().copied().max().unwrap_or(0);
        let mut powers = Vec::new();
        for i in 1..=top + 1 {
            let vecs = (0..d)
                .filter(|&b| degrees[b] >= i)
                .map(|b| linalg::unit(field, d, b))
                .collect();
            powers.push(Subspace::span(field, d, vecs));
        }
        a.powers = powers;
        a.class = Some(top.max(1));
        Ok(a)
    }

    fn raw(field: Field, basis: Vec<String>, table: Table, flags: Flags) -> Result<Algebra> {
        let d = basis.len();
        let mut rows: Vec<Vec<(usize, Vec<(usize, FieldElement)>)>> = vec![Vec::new(); d];
        for ((i, j), entries) in table {
            for &ix in &[i, j] {
                if ix >= d {
                    return Err(Error::IndexOutOfRange {
                        index: ix,
                        bound: d,
                    });
                }
            }
            let mut acc: BTreeMap<usize, FieldElement> = BTreeMap::new();
            for (k, g) in entries {
                if k >= d {
                    return Err(Error::IndexOutOfRange { index: k, bound: d });
                }
                if g.field() != field {
                    return Err(Error::AlgebraMismatch);
                }
                let slot = acc.entry(k).or_insert_with(|| field.zero());
                *slot += &g;
            }
            let list: Vec<(usize, FieldElement)> =
                acc.into_iter().filter(|(_, g)| !g.is_zero()).collect();
            if !list.is_empty() {
                rows[i].push((j, list));
            }
        }
        for r in rows.iter_mut() {
            r.sort_by_key(|(j, _)| *j);
        }
        Ok(Algebra {
            field,
            basis,
            rows,
            flags,
            powers: Vec::new(),
            class: None,
        })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_names(&self) -> &[String] {
        &self.basis
    }

    pub fn flags(&self) -> Flags {
        self.flags
    }

    /// The sparse table as `(i, j) -> [(k, gamma)]`.
    pub fn table(&self) -> Table {
        let mut t = Table::new();
        for (i, r) in self.rows.iter().enumerate() {
            for (j, e) in r {
                t.insert((i, *j), e.clone());
            }
        }
        t
    }

    pub fn zero(&self) -> Element {
        Element::zero(self.field, self.dim())
    }

    pub fn basis_element(&self, i: usize) -> Element {
        Element::basis(self.field, self.dim(), i)
    }

    pub fn element(&self, coords: Vector) -> Result<Element> {
        self.check_coords(&coords)?;
        Ok(Element::new(coords))
    }

    fn check_coords(&self, c: &[FieldElement]) -> Result<()> {
        if c.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: c.len(),
            });
        }
        if c.iter().any(|x| x.field() != self.field) {
            return Err(Error::AlgebraMismatch);
        }
        Ok(())
    }

    pub fn check(&self, a: &Element) -> Result<()> {
        self.check_coords(&a.coords)
    }

    /// Bilinear product; errors when an operand does not belong to the algebra.
    pub fn multiply(&self, a: &Element, b: &Element) -> Result<Element> {
        self.check(a)?;
        self.check(b)?;
        Ok(Element::new(self.mul_vec(&a.coords, &b.coords)))
    }

    /// Product of coordinate vectors without validation.
    pub fn mul_vec(&self, a: &[FieldElement], b: &[FieldElement]) -> Vector {
        let mut out = linalg::zeros(self.field, self.dim());
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, entries) in &self.rows[i] {
                let bj = &b[*j];
                if bj.is_zero() {
                    continue;
                }
                let s = ai * bj;
                for (k, g) in entries {
                    out[*k] += &(&s * g);
                }
            }
        }
        out
    }

    pub fn mul(&self, a: &Element, b: &Element) -> Element {
        Element::new(self.mul_vec(&a.coords, &b.coords))
    }

    /// Matrix of `x -> a x` (columns are images of basis vectors).
    pub fn left_mul_matrix(&self, a: &[FieldElement]) -> Matrix {
        let d = self.dim();
        let cols: Vec<Vector> = (0..d)
            .map(|j| self.mul_vec(a, &linalg::unit(self.field, d, j)))
            .collect();
        linalg::transpose(&cols)
    }

    /// Matrix of `x -> x a`.
    pub fn right_mul_matrix(&self, a: &[FieldElement]) -> Matrix {
        let d = self.dim();
        let cols: Vec<Vector> = (0..d)
            .map(|j| self.mul_vec(&linalg::unit(self.field, d, j), a))
            .collect();
        linalg::transpose(&cols)
    }

    pub fn verify_flags(&self) -> Result<()> {
        let d = self.dim();
        let e = |i: usize| linalg::unit(self.field, d, i);
        if self.flags.anticommutative || self.flags.lie {
            for i in 0..d {
                if !linalg::is_zero_vec(&self.mul_vec(&e(i), &e(i))) {
                    return Err(Error::FlagViolated(format!("e{i} e{i} != 0")));
                }
                for j in i + 1..d {
                    let s =
                        linalg::add_vec(&self.mul_vec(&e(i), &e(j)), &self.mul_vec(&e(j), &e(i)));
                    if !linalg::is_zero_vec(&s) {
                        return Err(Error::FlagViolated(format!("e{i} e{j} != -e{j} e{i}")));
                    }
                }
            }
        }
        if self.flags.commutative {
            for i in 0..d {
                for j in i + 1..d {
                    if self.mul_vec(&e(i), &e(j)) != self.mul_vec(&e(j), &e(i)) {
                        return Err(Error::FlagViolated(format!("e{i} e{j} != e{j} e{i}")));
                    }
                }
            }
        }
        if self.flags.lie {
            for i in 0..d {
                for j in i + 1..d {
                    let ij = self.mul_vec(&e(i), &e(j));
                    for k in j + 1..d {
                        let jk = self.mul_vec(&e(j), &e(k));
                        let ki = self.mul_vec(&e(k), &e(i));
                        let s = linalg::add_vec(
                            &linalg::add_vec(&self.mul_vec(&e(i), &jk), &self.mul_vec(&e(j), &ki)),
                            &self.mul_vec(&e(k), &ij),
                        );
                        if !linalg::is_zero_vec(&s) {
                            return Err(Error::FlagViolated(format!(
                                "Jacobi fails on e{i}, e{j}, e{k}"
                            )));
                        }
                    }
                }
            }
        }
        if self.flags.associative {
            for i in 0..d {
                for j in 0..d {
                    let ij = self.mul_vec(&e(i), &e(j));
                    for k in 0..d {
                        let l = self.mul_vec(&ij, &e(k));
                        let r = self.mul_vec(&e(i), &self.mul_vec(&e(j), &e(k)));
                        if l != r {
                            return Err(Error::FlagViolated(format!(
                                "associativity fails on e{i}, e{j}, e{k}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Span of all products `u v` with `u` in `x`, `v` in `y`.
    pub fn product_space(&self, x: &Subspace, y: &Subspace) -> Subspace {
        let mut vecs = Vec::new();
        for u in &x.rows {
            for v in &y.rows {
                let p = self.mul_vec(u, v);
                if !linalg::is_zero_vec(&p) {
                    vecs.push(p);
                }
            }
        }
        Subspace::span(self.field, self.dim(), vecs)
    }

    fn compute_powers(&self) -> (Vec<Subspace>, Option<usize>) {
        let d = self.dim();
        let mut powers = vec![Subspace::full(self.field, d)];
        if d == 0 {
            powers.push(Subspace::zero(self.field, d));
            return (powers, Some(1));
        }
        loop {
            let i = powers.len() + 1;
            let mut acc = Subspace::zero(self.field, d);
            for j in 1..i {
                let p = self.product_space(&powers[j - 1], &powers[i - j - 1]);
                acc = acc.sum(&p);
            }
            let zero = acc.is_zero();
            powers.push(acc);
            if zero {
                return (powers.clone(), Some(i - 1));
            }
            // Constant on [m, 2m] forces the chain to be constant from m on.
            let n = powers.len();
            let last_dim = powers[n - 1].dim();
            let mut m = n;
            while m > 1 && powers[m - 2].dim() == last_dim {
                m -= 1;
            }
            if n >= 2 * m {
                return (powers, None);
            }
        }
    }

    /// The filtration `A ⊇ A^2 ⊇ ...` as computed (ends with zero when nilpotent).
    pub fn powers(&self) -> &[Subspace] {
        &self.powers
    }

    /// `A^i` for `i >= 1`; zero beyond the end of a nilpotent chain.
    pub fn power(&self, i: usize) -> Subspace {
        assert!(i >= 1);
        match self.powers.get(i - 1) {
            Some(s) => s.clone(),
            None if self.class.is_some() => Subspace::zero(self.field, self.dim()),
            None => self.powers.last().unwrap().clone(),
        }
    }

    /// Least `c` with `A^{c+1} = 0`.
    pub fn nilpotency_class(&self) -> Result<usize> {
        self.class.ok_or(Error::NotNilpotent)
    }

    pub fn is_nilpotent(&self) -> bool {
        self.class.is_some()
    }

    /// The quotient by an ideal, using the non-pivot standard basis vectors
    /// as the complement.
    pub fn quotient(&self, ideal: &Subspace) -> Result<Quotient> {
        let comp = ideal.complement_indices();
        for r in &ideal.rows {
            for k in 0..self.dim() {
                let e = linalg::unit(self.field, self.dim(), k);
                if !ideal.contains(&self.mul_vec(r, &e)) || !ideal.contains(&self.mul_vec(&e, r)) {
                    return Err(Error::InvalidInput(String::from(
                        "subspace is not an ideal",
                    )));
                }
            }
        }
        let mut table = Table::new();
        for (a, &ia) in comp.iter().enumerate() {
            for (b, &ib) in comp.iter().enumerate() {
                let p = self.mul_vec(
                    &linalg::unit(self.field, self.dim(), ia),
                    &linalg::unit(self.field, self.dim(), ib),
                );
                let red = ideal.reduce(&p);
                let entries: Vec<(usize, FieldElement)> = comp
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| !red[c].is_zero())
                    .map(|(t, &c)| (t, red[c].clone()))
                    .collect();
                if !entries.is_empty() {
                    table.insert((a, b), entries);
                }
            }
        }
        let names = comp.iter().map(|&c| self.basis[c].clone()).collect();
        let algebra = Algebra::unchecked(self.field, names, table, self.flags)?;
        Ok(Quotient {
            algebra,
            ideal: ideal.clone(),
            complement: comp,
        })
    }

    /// Derived series `L, L^(1) = LL, ...` until it stabilizes.
    pub fn derived_series(&self) -> Vec<Subspace> {
        let mut out = vec![Subspace::full(self.field, self.dim())];
        loop {
            let last = out.last().unwrap();
            let next = self.product_space(last, last);
            if next.dim() == last.dim() {
                return out;
            }
            let done = next.is_zero();
            out.push(next);
            if done {
                return out;
            }
        }
    }

    /// Number of steps for the derived series to reach zero.
    pub fn derived_length(&self) -> Option<usize> {
        let s = self.derived_series();
        if s.last().unwrap().is_zero() {
            Some(s.len() - 1)
        } else {
            None
        }
    }

    /// Lower central series `A, A·A + ..., ` with `C^{i+1} = A C^i + C^i A`.
    pub fn lower_central_series(&self) -> Vec<Subspace> {
        let full = Subspace::full(self.field, self.dim());
        let mut out = vec![full.clone()];
        loop {
            let last = out.last().unwrap();
            let next = self
                .product_space(&full, last)
                .sum(&self.product_space(last, &full));
            if next.dim() == last.dim() {
                return out;
            }
            let done = next.is_zero();
            out.push(next);
            if done {
                return out;
            }
        }
    }

    /// `Z_{i+1} = {x : x A + A x ⊆ Z_i}`, starting from `Z_0 = 0`, until it
    /// stabilizes. The first entry is `Z_0`.
    pub fn upper_central_series(&self) -> Vec<Subspace> {
        let d = self.dim();
        let mut out = vec![Subspace::zero(self.field, d)];
        loop {
            let last = out.last().unwrap();
            // Column i: the residues of e_i e_j and e_j e_i modulo Z_i.
            let mut rows: Matrix = Vec::new();
            for j in 0..d {
                let ej = linalg::unit(self.field, d, j);
                let left: Vec<Vector> = (0..d)
                    .map(|i| last.reduce(&self.mul_vec(&linalg::unit(self.field, d, i), &ej)))
                    .collect();
                let right: Vec<Vector> = (0..d)
                    .map(|i| last.reduce(&self.mul_vec(&ej, &linalg::unit(self.field, d, i))))
                    .collect();
                for k in 0..d {
                    rows.push((0..d).map(|i| left[i][k].clone()).collect());
                    rows.push((0..d).map(|i| right[i][k].clone()).collect());
                }
            }
            let next = Subspace::span(self.field, d, linalg::kernel(&rows, d, self.field));
            if next.dim() == last.dim() {
                return out;
            }
            let full = next.dim() == d;
            out.push(next);
            if full {
                return out;
            }
        }
    }
}

/// An algebra `A/I` with the maps to and from `A`.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub algebra: Algebra,
    pub ideal: Subspace,
    /// Indices of the basis vectors of `A` forming the complement of `I`.
    pub complement: Vec<usize>,
}

impl Quotient {
    pub fn project(&self, v: &[FieldElement]) -> Vector {
        let red = self.ideal.reduce(v);
        self.complement.iter().map(|&c| red[c].clone()).collect()
    }

    pub fn lift(&self, v: &[FieldElement]) -> Vector {
        let mut out = linalg::zeros(self.ideal.field, self.ideal.ambient);
        for (t, &c) in self.complement.iter().enumerate() {
            out[c] = v[t].clone();
        }
        out
    }
}

/// Convenience builder for small tables from integer data.
pub fn table_from_ints(field: Field, entries: &[(usize, usize, &[(usize, i64)])]) -> Table {
    let mut t = Table::new();
    for (i, j, list) in entries {
        let v = t.entry((*i, *j)).or_default();
        v.extend(list.iter().map(|(k, g)| (*k, field.from_i64(*g))));
    }
    t
}

/// `e1 e2 = e3 = -e2 e1` over the given field.
pub fn heisenberg(field: Field) -> Algebra {
    let t = table_from_ints(field, &[(0, 1, &[(2, 1)]), (1, 0, &[(2, -1)])]);
    Algebra::new(field, names(&["x", "y", "z"]), t, Flags::lie()).expect("Heisenberg algebra")
}

/// `<e, f | ef = f = -fe>`.
pub fn ef_algebra(field: Field) -> Algebra {
    let t = table_from_ints(field, &[(0, 1, &[(1, 1)]), (1, 0, &[(1, -1)])]);
    Algebra::new(field, names(&["e", "f"]), t, Flags::lie())
        .expect("two-dimensional solvable algebra")
}

pub fn abelian(field: Field, d: usize) -> Algebra {
    let basis = (1..=d).map(|i| format!("e{i}")).collect();
    Algebra::new(
        field,
        basis,
        Table::new(),
        Flags {
            anticommutative: true,
            lie: true,
            associative: true,
            commutative: true,
        },
    )
    .expect("abelian algebra")
}

pub fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| String::from(*s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heisenberg_class() {
        let h = heisenberg(Field::Q);
        assert_eq!(h.nilpotency_class(), Ok(2));
        let e3 = h
            .multiply(&h.basis_element(0), &h.basis_element(1))
            .unwrap();
        assert_eq!(e3, h.basis_element(2));
    }

    #[test]
    fn ef_not_nilpotent() {
        assert_eq!(
            ef_algebra(Field::Q).nilpotency_class(),
            Err(Error::NotNilpotent)
        );
    }

    #[test]
    fn zero_multiplication_has_class_one() {
        assert_eq!(abelian(Field::Q, 4).nilpotency_class(), Ok(1));
    }

    #[test]
    fn bad_flags_rejected() {
        let t = table_from_ints(Field::Q, &[(0, 1, &[(2, 1)])]);
        let r = Algebra::new(Field::Q, names(&["a", "b", "c"]), t, Flags::lie());
        assert!(matches!(r, Err(Error::FlagViolated(_))));
    }

    #[test]
    fn quotient_of_heisenberg_by_centre() {
        let h = heisenberg(Field::Q);
        let q = h.quotient(&h.power(2)).unwrap();
        assert_eq!(q.algebra.dim(), 2);
        assert_eq!(q.algebra.nilpotency_class(), Ok(1));
    }
}
