//! Exact dense linear algebra over a `Field`.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::field::{Field, FieldElement};

pub type Vector = Vec<FieldElement>;
pub type Matrix = Vec<Vec<FieldElement>>;

pub fn zeros(field: Field, n: usize) -> Vector {
    vec![field.zero(); n]
}

pub fn unit(field: Field, n: usize, i: usize) -> Vector {
    let mut v = zeros(field, n);
    v[i] = field.one();
    v
}

pub fn zero_matrix(field: Field, rows: usize, cols: usize) -> Matrix {
    vec![zeros(field, cols); rows]
}

pub fn identity(field: Field, n: usize) -> Matrix {
    (0..n).map(|i| unit(field, n, i)).collect()
}

pub fn is_zero_vec(v: &[FieldElement]) -> bool {
    v.iter().all(|x| x.is_zero())
}

pub fn add_vec(a: &[FieldElement], b: &[FieldElement]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub_vec(a: &[FieldElement], b: &[FieldElement]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale_vec(s: &FieldElement, a: &[FieldElement]) -> Vector {
    a.iter().map(|x| s * x).collect()
}

/// `acc += s * v`
pub fn axpy(acc: &mut [FieldElement], s: &FieldElement, v: &[FieldElement]) {
    if s.is_zero() {
        return;
    }
    for (a, x) in acc.iter_mut().zip(v) {
        if !x.is_zero() {
            *a += &(s * x);
        }
    }
}

pub fn dot(a: &[FieldElement], b: &[FieldElement]) -> FieldElement {
    let mut acc = a[0].zero_like();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += &(x * y);
        }
    }
    acc
}

pub fn transpose(m: &Matrix) -> Matrix {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len())
        .map(|j| m.iter().map(|r| r[j].clone()).collect())
        .collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            let mut out = vec![row[0].zero_like(); n];
            for (k, x) in row.iter().enumerate() {
                axpy(&mut out, x, &b[k]);
            }
            out
        })
        .collect()
}

pub fn mat_vec(a: &Matrix, v: &[FieldElement]) -> Vector {
    a.iter().map(|row| dot(row, v)).collect()
}

/// In-place reduced row echelon form. Pivots are chosen as the first nonzero
/// entry scanning columns left to right; returns the pivot columns.
pub fn rref(m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv().unwrap();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = -&row[c];
                axpy(row, &f, &pivot_row);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &Matrix) -> usize {
    let mut w = m.clone();
    rref(&mut w).len()
}

pub fn det(m: &Matrix) -> FieldElement {
    let n = m.len();
    assert!(
        m.iter().all(|r| r.len() == n),
        "determinant of a non-square matrix"
    );
    if n == 0 {
        return Field::Q.one();
    }
    let mut a = m.clone();
    let mut d = a[0][0].one_like();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return d.zero_like();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d = &d * &a[c][c];
        let inv = a[c][c].inv().unwrap();
        for i in c + 1..n {
            if !a[i][c].is_zero() {
                let f = -(&a[i][c] * &inv);
                let pr = a[c].clone();
                axpy(&mut a[i], &f, &pr);
            }
        }
    }
    d
}

pub fn inverse(m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    if n == 0 {
        return Some(Vec::new());
    }
    let field = m[0][0].field();
    let mut aug: Matrix = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend(unit(field, n, i));
            row
        })
        .collect();
    let piv = rref(&mut aug);
    if piv.len() < n || piv[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Basis of the right kernel `{x : m x = 0}`; `cols` is the number of columns.
pub fn kernel(m: &Matrix, cols: usize, field: Field) -> Vec<Vector> {
    let mut w = m.clone();
    let piv = rref(&mut w);
    let free: Vec<usize> = (0..cols).filter(|c| !piv.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = zeros(field, cols);
            v[f] = field.one();
            for (r, &pc) in piv.iter().enumerate() {
                v[pc] = -&w[r][f];
            }
            v
        })
        .collect()
}

/// Outcome of solving `a x = b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinearSolution {
    /// A particular solution (free variables set to zero).
    Solution(Vector),
    /// A vector `y` with `y a = 0` and `y b != 0`.
    Inconsistent(Vector),
}

pub fn solve(a: &Matrix, b: &[FieldElement], field: Field) -> LinearSolution {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    // Augment with b and the identity so the row operations are recorded.
    let mut aug: Matrix = (0..rows)
        .map(|i| {
            let mut r = a[i].clone();
            r.push(b[i].clone());
            r.extend(unit(field, rows, i));
            r
        })
        .collect();
    let piv = rref(&mut aug);
    if let Some(r) = piv.iter().position(|&c| c == cols) {
        let mut y: Vector = aug[r][cols + 1..].to_vec();
        let s = aug[r][cols].inv().unwrap();
        y = scale_vec(&s, &y);
        return LinearSolution::Inconsistent(y);
    }
    let mut x = zeros(field, cols);
    for (r, &c) in piv.iter().enumerate() {
        x[c] = aug[r][cols].clone();
    }
    LinearSolution::Solution(x)
}

/// A subspace of `F^n` stored as a reduced row echelon basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    pub field: Field,
    pub ambient: usize,
    pub rows: Matrix,
    pub pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(field: Field, ambient: usize) -> Self {
        Subspace {
            field,
            ambient,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(field: Field, ambient: usize) -> Self {
        Subspace::span(field, ambient, identity(field, ambient))
    }

    pub fn span(field: Field, ambient: usize, vectors: Matrix) -> Self {
        let mut m = vectors;
        let pivots = rref(&mut m);
        m.truncate(pivots.len());
        Subspace {
            field,
            ambient,
            rows: m,
            pivots,
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    /// Remainder of `v` after eliminating the pivot coordinates.
    pub fn reduce(&self, v: &[FieldElement]) -> Vector {
        let mut w = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !w[p].is_zero() {
                let f = -&w[p];
                axpy(&mut w, &f, row);
            }
        }
        w
    }

    pub fn contains(&self, v: &[FieldElement]) -> bool {
        is_zero_vec(&self.reduce(v))
    }

    pub fn contains_space(&self, other: &Subspace) -> bool {
        other.rows.iter().all(|r| self.contains(r))
    }

    /// Coordinates of `v` in the echelon basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[FieldElement]) -> Option<Vector> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut all = self.rows.clone();
        all.extend(other.rows.iter().cloned());
        Subspace::span(self.field, self.ambient, all)
    }

    pub fn with(&self, v: &[FieldElement]) -> Subspace {
        let mut all = self.rows.clone();
        all.push(v.to_vec());
        Subspace::span(self.field, self.ambient, all)
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        // Solve sum a_i r_i = sum b_j s_j.
        let n = self.dim();
        let m = other.dim();
        if n == 0 || m == 0 {
            return Subspace::zero(self.field, self.ambient);
        }
        let mat: Matrix = (0..self.ambient)
            .map(|k| {
                let mut row: Vector = self.rows.iter().map(|r| r[k].clone()).collect();
                row.extend(other.rows.iter().map(|r| -&r[k]));
                row
            })
            .collect();
        let ker = kernel(&mat, n + m, self.field);
        let vecs = ker
            .iter()
            .map(|c| {
                let mut v = zeros(self.field, self.ambient);
                for (i, r) in self.rows.iter().enumerate() {
                    axpy(&mut v, &c[i], r);
                }
                v
            })
            .collect();
        Subspace::span(self.field, self.ambient, vecs)
    }

    /// Non-pivot coordinates: the standard complement used for quotients.
    pub fn complement_indices(&self) -> Vec<usize> {
        (0..self.ambient)
            .filter(|c| !self.pivots.contains(c))
            .collect()
    }
}

/// Smith normal form diagonal (nonnegative invariant factors, zeros last).
pub fn smith_diagonal(m: &[Vec<BigInt>]) -> Vec<BigInt> {
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // Find a nonzero entry of minimal absolute value in the trailing block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[i][j].is_zero()
                    && best.map_or(true, |(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        a.swap(t, bi);
        for row in a.iter_mut() {
            row.swap(t, bj);
        }
        let mut clean = true;
        for i in t + 1..rows {
            let q = a[i][t].div_floor(&a[t][t]);
            if !q.is_zero() {
                for j in t..cols {
                    let s = &q * &a[t][j];
                    a[i][j] -= s;
                }
            }
            if !a[i][t].is_zero() {
                clean = false;
            }
        }
        for j in t + 1..cols {
            let q = a[t][j].div_floor(&a[t][t]);
            if !q.is_zero() {
                for i in t..rows {
                    let s = &q * &a[i][t];
                    a[i][j] -= s;
                }
            }
            if !a[t][j].is_zero() {
                clean = false;
            }
        }
        if !clean {
            continue;
        }
        // Divisibility condition: the pivot must divide the remaining block.
        let mut fixed = true;
        'outer: for i in t + 1..rows {
            for j in t + 1..cols {
                if !(&a[i][j] % &a[t][t]).is_zero() {
                    for k in t..cols {
                        let v = a[i][k].clone();
                        a[t][k] += v;
                    }
                    fixed = false;
                    break 'outer;
                }
            }
        }
        if !fixed {
            continue;
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    while diag.len() < rows.min(cols) {
        diag.push(BigInt::zero());
    }
    diag
}

/// Characteristic polynomial coefficients `[c_0, ..., c_n]` of `det(tI - m)`,
/// by the Faddeev-LeVerrier recursion (characteristic zero only).
pub fn char_poly(m: &Matrix) -> Vector {
    let n = m.len();
    let field = if n == 0 { Field::Q } else { m[0][0].field() };
    assert_eq!(
        field.characteristic(),
        0,
        "Faddeev-LeVerrier needs characteristic zero"
    );
    let mut coeffs = zeros(field, n + 1);
    coeffs[n] = field.one();
    let mut mk = zero_matrix(field, n, n);
    for k in 1..=n {
        let mut next = mat_mul(m, &mk);
        for i in 0..n {
            next[i][i] += &coeffs[n - k + 1];
        }
        let am = mat_mul(m, &next);
        let mut tr = field.zero();
        for (i, row) in am.iter().enumerate() {
            tr += &row[i];
        }
        coeffs[n - k] = -(tr / field.from_i64(k as i64));
        mk = next;
    }
    coeffs
}

/// Rational roots of a polynomial with rational coefficients (low degree first).
pub fn rational_roots(poly: &[FieldElement]) -> Vec<FieldElement> {
    use num_rational::BigRational;
    let mut p: Vec<BigRational> = poly.iter().map(|c| c.to_rational()).collect();
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    let mut roots = Vec::new();
    if p.len() <= 1 {
        return roots;
    }
    let mut lcm = BigInt::one();
    for c in &p {
        lcm = lcm.lcm(c.denom());
    }
    let mut ints: Vec<BigInt> = p
        .iter()
        .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
        .collect();
    // Strip the factor t^k.
    let mut shift = 0;
    while ints.first().is_some_and(|c| c.is_zero()) {
        ints.remove(0);
        shift += 1;
    }
    if shift > 0 {
        roots.push(Field::Q.zero());
    }
    if ints.len() <= 1 {
        return roots;
    }
    let a0 = ints[0].abs();
    let an = ints.last().unwrap().abs();
    let divs = |n: &BigInt| -> Vec<BigInt> {
        let mut out = Vec::new();
        let mut d = BigInt::one();
        while &d * &d <= *n {
            if (n % &d).is_zero() {
                out.push(d.clone());
                let e = n / &d;
                if e != d {
                    out.push(e);
                }
            }
            d += 1;
        }
        out
    };
    let mut cands: Vec<BigRational> = Vec::new();
    for pn in divs(&a0) {
        for qd in divs(&an) {
            for s in [1i32, -1] {
                let r = BigRational::new(pn.clone() * s, qd.clone());
                if !cands.contains(&r) {
                    cands.push(r);
                }
            }
        }
    }
    cands.sort();
    for r in cands {
        let mut acc = BigRational::zero();
        for c in ints.iter().rev() {
            acc = acc * &r + BigRational::from_integer(c.clone());
        }
        if acc.is_zero() {
            roots.push(FieldElement::Q(r));
        }
    }
    roots
}
