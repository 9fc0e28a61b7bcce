//! Lexicographic partial orders along chief series, partial order rank and
//! the rank of solvable Lie algebras.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::{table_from_ints, Algebra, Flags};
use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::linalg::{self, Matrix, Subspace, Vector};
use crate::quasigroup::CircleOp;
use crate::sample::Sampler;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FactorKind {
    /// `A` annihilates the factor from both sides; ordered by its basis.
    Central,
    /// A minimal ideal of `A / I_{j-1}` with nonzero action; trivially ordered.
    Noncentral,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factor {
    pub kind: FactorKind,
    /// Echelon basis of `I_j` reduced modulo `I_{j-1}`.
    pub basis: Subspace,
}

impl Factor {
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }
}

/// `0 = I_0 < I_1 < ... < I_m = A` with tagged factors `I_j / I_{j-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvexSeries {
    pub ideals: Vec<Subspace>,
    pub factors: Vec<Factor>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Comparison {
    Less,
    Greater,
    Equal,
    Incomparable,
}

impl Comparison {
    pub fn reverse(self) -> Comparison {
        match self {
            Comparison::Less => Comparison::Greater,
            Comparison::Greater => Comparison::Less,
            other => other,
        }
    }
}

fn operators(a: &Algebra) -> Vec<Matrix> {
    let d = a.dim();
    let mut ops = Vec::with_capacity(2 * d);
    for i in 0..d {
        let e = linalg::unit(a.field(), d, i);
        ops.push(a.left_mul_matrix(&e));
        ops.push(a.right_mul_matrix(&e));
    }
    ops
}

/// The smallest subspace containing `base` and `w` that is stable under `ops`.
fn spin(ops: &[Matrix], base: &Subspace, w: &[FieldElement]) -> Subspace {
    let mut s = base.with(w);
    let mut frontier = vec![w.to_vec()];
    while let Some(v) = frontier.pop() {
        for m in ops {
            let img = linalg::mat_vec(m, &v);
            if !s.contains(&img) {
                s = s.with(&img);
                frontier.push(img);
            }
        }
    }
    s
}

/// Basis of `s` modulo `base`: echelon rows of the reduced vectors.
fn relative_basis(base: &Subspace, s: &Subspace) -> Subspace {
    let reduced: Matrix = s
        .rows
        .iter()
        .map(|r| base.reduce(r))
        .filter(|r| !linalg::is_zero_vec(r))
        .collect();
    Subspace::span(s.field, s.ambient, reduced)
}

/// Matrix of `m` acting on `s / base` in the relative basis.
fn restrict(m: &Matrix, base: &Subspace, rel: &Subspace) -> Matrix {
    let k = rel.dim();
    let cols: Vec<Vector> = rel
        .rows
        .iter()
        .map(|r| {
            let img = base.reduce(&linalg::mat_vec(m, r));
            rel.coordinates(&img).expect("subspace is invariant")
        })
        .collect();
    if k == 0 {
        return Vec::new();
    }
    linalg::transpose(&cols)
}

fn combine(rel: &Subspace, coords: &[FieldElement]) -> Vector {
    let mut v = linalg::zeros(rel.field, rel.ambient);
    for (c, r) in coords.iter().zip(&rel.rows) {
        linalg::axpy(&mut v, c, r);
    }
    v
}

/// Candidate generators of a smaller invariant subspace of `s / base`: the
/// basis from the last vector back (optionally shuffled, with random
/// mixtures), annihilated vectors, then eigenvectors of single operators
/// for rational eigenvalues.
fn candidates(
    ops: &[Matrix],
    base: &Subspace,
    s: &Subspace,
    rng: &mut Option<Sampler>,
) -> Vec<Vector> {
    let rel = relative_basis(base, s);
    let k = rel.dim();
    let field = rel.field;
    let restricted: Vec<Matrix> = ops.iter().map(|m| restrict(m, base, &rel)).collect();
    let mut basis: Vec<Vector> = rel.rows.iter().rev().cloned().collect();
    if let Some(s) = rng.as_mut() {
        for i in (1..basis.len()).rev() {
            let j = s.below(i as u64 + 1) as usize;
            basis.swap(i, j);
        }
        for _ in 0..2 {
            let c = s.vector(field, k, 3);
            if !linalg::is_zero_vec(&c) {
                basis.insert(0, combine(&rel, &c));
            }
        }
    }
    let mut out = basis;
    let stacked: Matrix = restricted.iter().flatten().cloned().collect();
    for v in linalg::kernel(&stacked, k, field) {
        out.push(combine(&rel, &v));
    }
    for m in &restricted {
        if m.iter().flatten().all(|x| x.is_zero()) {
            continue;
        }
        for lambda in linalg::rational_roots(&linalg::char_poly(m)) {
            let mut shifted = m.clone();
            for (i, row) in shifted.iter_mut().enumerate() {
                row[i] -= &lambda;
            }
            let ker = linalg::kernel(&shifted, k, field);
            if ker.len() < k {
                out.extend(ker.iter().map(|v| combine(&rel, v)));
            }
        }
    }
    out
}

fn minimal_over(ops: &[Matrix], base: &Subspace, rng: &mut Option<Sampler>) -> Subspace {
    let mut s = Subspace::full(base.field, base.ambient);
    'descend: loop {
        for w in candidates(ops, base, &s, rng) {
            let t = spin(ops, base, &w);
            if t.dim() < s.dim() {
                s = t;
                continue 'descend;
            }
        }
        return s;
    }
}

fn is_central_factor(a: &Algebra, below: &Subspace, ideal: &Subspace) -> bool {
    let d = a.dim();
    ideal.rows.iter().all(|v| {
        (0..d).all(|i| {
            let e = linalg::unit(a.field(), d, i);
            below.contains(&a.mul_vec(&e, v)) && below.contains(&a.mul_vec(v, &e))
        })
    })
}

fn build_series(a: &Algebra, mut rng: Option<Sampler>) -> Result<ConvexSeries> {
    if a.field() != Field::Q {
        return Err(Error::UnsupportedField(String::from(
            "orders are built over the rationals",
        )));
    }
    let d = a.dim();
    let ops = operators(a);
    let mut ideals = vec![Subspace::zero(Field::Q, d)];
    let mut factors = Vec::new();
    while ideals.last().unwrap().dim() < d {
        let below = ideals.last().unwrap().clone();
        let next = minimal_over(&ops, &below, &mut rng);
        let kind = if is_central_factor(a, &below, &next) {
            FactorKind::Central
        } else {
            FactorKind::Noncentral
        };
        factors.push(Factor {
            kind,
            basis: relative_basis(&below, &next),
        });
        ideals.push(next);
    }
    Ok(ConvexSeries { ideals, factors })
}

/// A chief series with each factor tagged by the annihilation test.
pub fn chief_series(a: &Algebra) -> Result<ConvexSeries> {
    build_series(a, None)
}

/// A chief series built from a seeded candidate order.
pub fn chief_series_seeded(a: &Algebra, seed: u64) -> Result<ConvexSeries> {
    build_series(a, Some(Sampler::new(seed)))
}

impl ConvexSeries {
    /// Sum of the dimensions of the central factors.
    pub fn rank(&self) -> usize {
        self.factors
            .iter()
            .filter(|f| f.kind == FactorKind::Central)
            .map(|f| f.dim())
            .sum()
    }

    pub fn has_noncentral(&self) -> bool {
        self.factors
            .iter()
            .any(|f| f.kind == FactorKind::Noncentral)
    }

    /// Checks the ideal chain, the tags, and that every factor is minimal
    /// in the sense that each basis vector spins up to the whole factor.
    pub fn verify(&self, a: &Algebra) -> Result<()> {
        let d = a.dim();
        let fail = |s: &str| Err(Error::CheckFailed(String::from(s)));
        if self.ideals.first().map(|s| s.dim()) != Some(0)
            || self.ideals.last().map(|s| s.dim()) != Some(d)
        {
            return fail("series does not run from 0 to A");
        }
        let ops = operators(a);
        for (j, f) in self.factors.iter().enumerate() {
            let (below, ideal) = (&self.ideals[j], &self.ideals[j + 1]);
            if !ideal.contains_space(below) || ideal.dim() <= below.dim() {
                return fail("series is not strictly increasing");
            }
            if spin(&ops, ideal, &linalg::zeros(Field::Q, d)).dim() != ideal.dim() {
                return fail("term is not an ideal");
            }
            let central = is_central_factor(a, below, ideal);
            if central != (f.kind == FactorKind::Central) {
                return fail("factor tag disagrees with the annihilation test");
            }
            if central && f.dim() != 1 {
                return fail("central chief factor is not one-dimensional");
            }
            for r in &f.basis.rows {
                if spin(&ops, below, r).dim() != ideal.dim() {
                    return fail("factor is not minimal");
                }
            }
        }
        Ok(())
    }

    /// Lexicographic comparison: the outermost layer containing `x - y`
    /// decides, by its leading coordinate when central.
    pub fn compare(&self, x: &[FieldElement], y: &[FieldElement]) -> Comparison {
        let diff = linalg::sub_vec(x, y);
        if linalg::is_zero_vec(&diff) {
            return Comparison::Equal;
        }
        let j = self
            .ideals
            .iter()
            .position(|s| s.contains(&diff))
            .expect("top term is A");
        let f = &self.factors[j - 1];
        if f.kind == FactorKind::Noncentral {
            return Comparison::Incomparable;
        }
        let coords = f
            .basis
            .coordinates(&self.ideals[j - 1].reduce(&diff))
            .expect("layer membership");
        let lead = coords
            .iter()
            .find(|c| !c.is_zero())
            .expect("nonzero in its layer");
        match lead.signum() {
            core::cmp::Ordering::Greater => Comparison::Greater,
            _ => Comparison::Less,
        }
    }

    /// Span of lifts of the central factors: the order is linear on it.
    pub fn linear_subspace(&self) -> Subspace {
        let d = self.ideals[0].ambient;
        let rows = self
            .factors
            .iter()
            .filter(|f| f.kind == FactorKind::Central)
            .flat_map(|f| f.basis.rows.clone())
            .collect();
        Subspace::span(Field::Q, d, rows)
    }
}

/// Compares `x` and `y` in the lexicographic order of `series`.
pub fn compare_lex(series: &ConvexSeries, x: &[FieldElement], y: &[FieldElement]) -> Comparison {
    series.compare(x, y)
}

/// Partial order rank: total dimension of the central chief factors.
pub fn po_rank(a: &Algebra) -> Result<usize> {
    Ok(chief_series(a)?.rank())
}

fn require_solvable_lie(l: &Algebra) -> Result<()> {
    if !l.flags().lie {
        return Err(Error::NotLie);
    }
    if l.field() != Field::Q {
        return Err(Error::UnsupportedField(String::from(
            "rank computations are over the rationals",
        )));
    }
    if l.derived_length().is_none() {
        return Err(Error::NotSolvable);
    }
    Ok(())
}

/// Fitting null component of `ad a`: the kernel of `(ad a)^d`.
pub fn null_component(l: &Algebra, a: &[FieldElement]) -> Subspace {
    let d = l.dim();
    let ad = l.left_mul_matrix(a);
    let mut p = linalg::identity(l.field(), d);
    for _ in 0..d {
        p = linalg::mat_mul(&p, &ad);
    }
    Subspace::span(l.field(), d, linalg::kernel(&p, d, l.field()))
}

/// Multiplicity of 0 as a root of the characteristic polynomial of `ad a`.
pub fn zero_multiplicity(l: &Algebra, a: &[FieldElement]) -> usize {
    let cp = linalg::char_poly(&l.left_mul_matrix(a));
    cp.iter().take_while(|c| c.is_zero()).count()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartanReport {
    pub dimension: usize,
    pub regular_element: Vector,
    /// The null component of the regular element, a Cartan subalgebra.
    pub subalgebra: Subspace,
    pub samples: usize,
}

/// Rank of a solvable Lie algebra over ℚ: the least zero multiplicity of
/// `ad a` over sampled `a`. Sampling stops once the minimum has been seen
/// three times and equals the lower bound given by the central chief
/// factors (every `ad a` vanishes on them), or after a fixed budget.
pub fn cartan_dimension(l: &Algebra, seed: u64) -> Result<CartanReport> {
    require_solvable_lie(l)?;
    let d = l.dim();
    let bound = po_rank(l)?;
    let mut s = Sampler::new(seed);
    let mut best = (usize::MAX, linalg::zeros(Field::Q, d), 0usize);
    let budget = 64 + 16 * d;
    let mut samples = 0;
    while samples < budget {
        samples += 1;
        let h = 1 + (samples / 8) as i64;
        let a = s.vector(Field::Q, d, h);
        let m = zero_multiplicity(l, &a);
        if m < best.0 {
            best = (m, a, 1);
        } else if m == best.0 {
            best.2 += 1;
        }
        if best.2 >= 3 && best.0 == bound {
            break;
        }
    }
    let subalgebra = null_component(l, &best.1);
    Ok(CartanReport {
        dimension: best.0,
        regular_element: best.1,
        subalgebra,
        samples,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankReport {
    pub po_rank: usize,
    pub cartan_dimension: usize,
}

impl RankReport {
    pub fn holds(&self) -> bool {
        self.po_rank == self.cartan_dimension
    }
}

pub fn rank_equality_check(l: &Algebra, seed: u64) -> Result<RankReport> {
    require_solvable_lie(l)?;
    Ok(RankReport {
        po_rank: po_rank(l)?,
        cartan_dimension: cartan_dimension(l, seed)?.dimension,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonotonicityReport {
    pub checked: usize,
    /// Triples `(a, b, c)` where comparing `a, b` disagrees with comparing
    /// `a∘c, b∘c` or `c∘a, c∘b`.
    pub violations: Vec<[Vector; 3]>,
}

impl MonotonicityReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Samples triples and checks that `∘` preserves and reflects the order on
/// both sides. The series must be all central (a linear order).
pub fn order_monotonicity_check(
    op: &CircleOp,
    series: &ConvexSeries,
    samples: usize,
    seed: u64,
) -> Result<MonotonicityReport> {
    if series.has_noncentral() {
        return Err(Error::HypothesisViolated(String::from(
            "the order is not linear",
        )));
    }
    let d = op.algebra().dim();
    let mut s = Sampler::new(seed);
    let mut violations = Vec::new();
    for _ in 0..samples {
        let (a, b, c) = (
            s.vector(Field::Q, d, 3),
            s.vector(Field::Q, d, 3),
            s.vector(Field::Q, d, 3),
        );
        let base = series.compare(&a, &b);
        let right = series.compare(&op.circle(&a, &c)?, &op.circle(&b, &c)?);
        let left = series.compare(&op.circle(&c, &a)?, &op.circle(&c, &b)?);
        if base != right || base != left {
            violations.push([a, b, c]);
        }
    }
    Ok(MonotonicityReport {
        checked: samples,
        violations,
    })
}

/// `L ⋊ ⟨c⟩` with `L = ⟨a, b, ab⟩` Heisenberg and `ad c: a ↦ a, b ↦ -b,
/// ab ↦ 0`; basis `a, b, ab, c`.
pub fn weighted_heisenberg_extension() -> Algebra {
    let t = table_from_ints(
        Field::Q,
        &[
            (0, 1, &[(2, 1)]),
            (1, 0, &[(2, -1)]),
            (3, 0, &[(0, 1)]),
            (0, 3, &[(0, -1)]),
            (3, 1, &[(1, -1)]),
            (1, 3, &[(1, 1)]),
        ],
    );
    Algebra::new(
        Field::Q,
        crate::algebra::names(&["a", "b", "ab", "c"]),
        t,
        Flags::lie(),
    )
    .expect("Lie algebra")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{ef_algebra, heisenberg};

    #[test]
    fn heisenberg_series_is_central() {
        let s = chief_series(&heisenberg(Field::Q)).unwrap();
        s.verify(&heisenberg(Field::Q)).unwrap();
        assert_eq!(s.factors.len(), 3);
        assert!(!s.has_noncentral());
        assert_eq!(
            s.ideals[1],
            Subspace::span(Field::Q, 3, vec![linalg::unit(Field::Q, 3, 2)])
        );
    }

    #[test]
    fn ef_series() {
        let ef = ef_algebra(Field::Q);
        let s = chief_series(&ef).unwrap();
        assert_eq!(
            s.factors.iter().map(|f| f.kind).collect::<Vec<_>>(),
            vec![FactorKind::Noncentral, FactorKind::Central]
        );
        assert_eq!(s.rank(), 1);
    }

    #[test]
    fn weighted_extension_ranks() {
        let l = weighted_heisenberg_extension();
        assert_eq!(po_rank(&l).unwrap(), 2);
        assert_eq!(cartan_dimension(&l, 1).unwrap().dimension, 2);
    }
}
