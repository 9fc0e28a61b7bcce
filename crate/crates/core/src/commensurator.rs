//! Automorphisms of rational nilpotent Lie algebras and index ratios of
//! subgroups in the lattice groups they carry.
//!
//! A finitely generated torsion-free nilpotent group is modelled as the set
//! of elements `(a_1 e_1) ∘ ... ∘ (a_n e_n)` with integer `a_i` inside
//! `(L, bch)`, where `e_1, ..., e_n` is adapted to the upper central series
//! (the tail of the basis spans the centre, a longer tail the second centre,
//! and so on).

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::algebra::{table_from_ints, Algebra, Flags};
use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::linalg::{self, Matrix, Vector};
use crate::quasigroup::CircleOp;

fn check_square(l: &Algebra, m: &Matrix) -> Result<()> {
    let d = l.dim();
    if m.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: m.len(),
        });
    }
    for row in m {
        if row.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: row.len(),
            });
        }
        if row.iter().any(|x| x.field() != l.field()) {
            return Err(Error::AlgebraMismatch);
        }
    }
    Ok(())
}

/// Image of a coordinate vector; column `j` of `m` is the image of `e_j`.
pub fn apply(m: &Matrix, v: &[FieldElement]) -> Vector {
    linalg::mat_vec(m, v)
}

/// Nonsingular and `φ(e_i e_j) = φ(e_i) φ(e_j)` for all basis pairs.
pub fn is_automorphism(l: &Algebra, m: &Matrix) -> Result<bool> {
    check_square(l, m)?;
    let d = l.dim();
    if linalg::det(m).is_zero() && d > 0 {
        return Ok(false);
    }
    let images: Vec<Vector> = (0..d)
        .map(|j| m.iter().map(|r| r[j].clone()).collect())
        .collect();
    for i in 0..d {
        for j in 0..d {
            let prod = l.mul_vec(
                &linalg::unit(l.field(), d, i),
                &linalg::unit(l.field(), d, j),
            );
            if apply(m, &prod) != l.mul_vec(&images[i], &images[j]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Determinant of an automorphism.
pub fn comm_determinant(l: &Algebra, m: &Matrix) -> Result<FieldElement> {
    if !is_automorphism(l, m)? {
        return Err(Error::NotAutomorphism);
    }
    Ok(linalg::det(m))
}

/// `(A 0; u Δ)` with `Δ = det A`, on the basis `x, y, z = xy`.
pub fn heisenberg_block(a: &[[FieldElement; 2]; 2], u: &[FieldElement; 2]) -> Matrix {
    let delta = &a[0][0] * &a[1][1] - &a[0][1] * &a[1][0];
    let z = delta.zero_like();
    vec![
        vec![a[0][0].clone(), a[0][1].clone(), z.clone()],
        vec![a[1][0].clone(), a[1][1].clone(), z],
        vec![u[0].clone(), u[1].clone(), delta],
    ]
}

/// Whether a 3×3 matrix has the Heisenberg automorphism shape with `det A != 0`.
pub fn has_heisenberg_shape(m: &Matrix) -> bool {
    if m.len() != 3 || m.iter().any(|r| r.len() != 3) {
        return false;
    }
    let delta = &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0];
    m[0][2].is_zero() && m[1][2].is_zero() && !delta.is_zero() && m[2][2] == delta
}

/// `a, b_1, ..., b_c` with `[a, b_i] = b_{i+1}`: the Lie algebra of
/// `ℤ ⋉ ℤ^c` acting by a unipotent Jordan cell.
pub fn semidirect_filiform(field: Field, c: usize) -> Result<Algebra> {
    if c == 0 {
        return Err(Error::InvalidInput(String::from("need c >= 1")));
    }
    let mut entries: Vec<(usize, usize, Vec<(usize, i64)>)> = Vec::new();
    for i in 1..c {
        entries.push((0, i, vec![(i + 1, 1)]));
        entries.push((i, 0, vec![(i + 1, -1)]));
    }
    let borrowed: Vec<(usize, usize, &[(usize, i64)])> = entries
        .iter()
        .map(|(i, j, v)| (*i, *j, v.as_slice()))
        .collect();
    let mut names = vec![String::from("a")];
    names.extend((1..=c).map(|i| format!("b{i}")));
    Algebra::new(
        field,
        names,
        table_from_ints(field, &borrowed),
        Flags::lie(),
    )
}

/// Dimension of the derivation algebra: the tangent space at the identity
/// of the automorphism group, cut out by the linearized conditions
/// `D(e_i e_j) = D(e_i) e_j + e_i D(e_j)`.
pub fn derivation_dimension(l: &Algebra) -> usize {
    let d = l.dim();
    let f = l.field();
    let e = |i: usize| linalg::unit(f, d, i);
    // Unknown (p, q) is the e_p coefficient of D(e_q), column p * d + q.
    let mut rows: Matrix = Vec::new();
    let prods: Vec<Vec<Vector>> = (0..d)
        .map(|i| (0..d).map(|j| l.mul_vec(&e(i), &e(j))).collect())
        .collect();
    for i in 0..d {
        for j in 0..d {
            for p in 0..d {
                let mut row = linalg::zeros(f, d * d);
                for q in 0..d {
                    row[p * d + q] += &prods[i][j][q];
                }
                for r in 0..d {
                    row[r * d + i] -= &prods[r][j][p];
                    row[r * d + j] -= &prods[i][r][p];
                }
                rows.push(row);
            }
        }
    }
    d * d - linalg::rank(&rows)
}

/// `dim {y : xy = yx = 0}`.
pub fn centralizer_dimension(l: &Algebra, x: &[FieldElement]) -> usize {
    let mut m = l.left_mul_matrix(x);
    m.extend(l.right_mul_matrix(x));
    l.dim() - linalg::rank(&m)
}

/// The integer lattice of an adapted basis under the BCH group law.
#[derive(Clone, Debug)]
pub struct MalcevLattice {
    op: CircleOp,
    /// Index ranges of `Z_k \ Z_{k-1}`, outermost first.
    layers: Vec<Range<usize>>,
}

impl MalcevLattice {
    /// Checks that `l` is a nilpotent Lie algebra over ℚ whose basis is
    /// adapted to the upper central series, and that the group generated by
    /// the basis has integral structure constants in these coordinates.
    pub fn new(l: &Algebra) -> Result<MalcevLattice> {
        if l.field() != Field::Q {
            return Err(Error::PositiveCharacteristic);
        }
        if !l.flags().lie {
            return Err(Error::NotLie);
        }
        l.nilpotency_class()?;
        let d = l.dim();
        let series = l.upper_central_series();
        let mut starts = Vec::new();
        for z in &series {
            let s = d - z.dim();
            let tail_ok = (s..d).all(|i| z.contains(&linalg::unit(Field::Q, d, i)));
            if !tail_ok {
                return Err(Error::HypothesisViolated(String::from(
                    "basis is not adapted to the upper central series",
                )));
            }
            starts.push(s);
        }
        let layers: Vec<Range<usize>> = starts.windows(2).rev().map(|w| w[1]..w[0]).collect();
        let lat = MalcevLattice {
            op: CircleOp::bch(Arc::new(l.clone()))?,
            layers,
        };
        let n = d;
        for i in 0..n {
            for j in i + 1..n {
                let (ei, ej) = (lat.basis(i), lat.basis(j));
                lat.group_commutator(&ei, &ej)?;
                lat.group_commutator(&ej, &lat.inverse(&ei)?)?;
            }
        }
        Ok(lat)
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        self.op.algebra()
    }

    pub fn dim(&self) -> usize {
        self.algebra().dim()
    }

    pub fn layers(&self) -> &[Range<usize>] {
        &self.layers
    }

    pub fn basis(&self, i: usize) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.dim()];
        v[i] = BigInt::one();
        v
    }

    /// `(a_1 e_1) ∘ (a_2 e_2) ∘ ...`.
    pub fn to_lie(&self, coords: &[BigInt]) -> Result<Vector> {
        let d = self.dim();
        let mut acc = linalg::zeros(Field::Q, d);
        for (i, a) in coords.iter().enumerate() {
            if !a.is_zero() {
                let mut t = linalg::zeros(Field::Q, d);
                t[i] = Field::Q.from_bigint(a);
                acc = self.op.circle(&acc, &t)?;
            }
        }
        Ok(acc)
    }

    /// Rational Malcev coordinates of the second kind.
    pub fn rational_coordinates(&self, x: &[FieldElement]) -> Result<Vector> {
        let d = self.dim();
        let mut cur = x.to_vec();
        let mut out = Vec::with_capacity(d);
        for i in 0..d {
            let a = cur[i].clone();
            if !a.is_zero() {
                let mut t = linalg::zeros(Field::Q, d);
                t[i] = -&a;
                cur = self.op.circle(&t, &cur)?;
                debug_assert!(cur[..=i].iter().all(|c| c.is_zero()));
            }
            out.push(a);
        }
        Ok(out)
    }

    /// Integer coordinates of a Lie element, or `NonIntegralLattice`.
    pub fn coordinates(&self, x: &[FieldElement]) -> Result<Vec<BigInt>> {
        self.rational_coordinates(x)?
            .iter()
            .map(|c| c.to_integer().ok_or(Error::NonIntegralLattice))
            .collect()
    }

    pub fn multiply(&self, g: &[BigInt], h: &[BigInt]) -> Result<Vec<BigInt>> {
        let x = self.op.circle(&self.to_lie(g)?, &self.to_lie(h)?)?;
        self.coordinates(&x)
    }

    pub fn inverse(&self, g: &[BigInt]) -> Result<Vec<BigInt>> {
        let x = self.to_lie(g)?;
        self.coordinates(&linalg::scale_vec(&Field::Q.from_i64(-1), &x))
    }

    /// `g^k` for any integer `k` (in BCH, `k · log g`).
    pub fn pow(&self, g: &[BigInt], k: &BigInt) -> Result<Vec<BigInt>> {
        let x = self.to_lie(g)?;
        self.coordinates(&linalg::scale_vec(&Field::Q.from_bigint(k), &x))
    }

    /// `g⁻¹ h⁻¹ g h`.
    pub fn group_commutator(&self, g: &[BigInt], h: &[BigInt]) -> Result<Vec<BigInt>> {
        let (x, y) = (self.to_lie(g)?, self.to_lie(h)?);
        let m1 = Field::Q.from_i64(-1);
        let xy = self.op.circle(&x, &y)?;
        let inv = self
            .op
            .circle(&linalg::scale_vec(&m1, &x), &linalg::scale_vec(&m1, &y))?;
        self.coordinates(&self.op.circle(&inv, &xy)?)
    }

    /// The rational automorphism applied to a lattice element; fails when
    /// the image leaves the lattice.
    pub fn image(&self, phi: &Matrix, g: &[BigInt]) -> Result<Vec<BigInt>> {
        self.coordinates(&apply(phi, &self.to_lie(g)?))
    }
}

fn leading(g: &[BigInt]) -> Option<usize> {
    g.iter().position(|x| !x.is_zero())
}

/// A subgroup given by generators in Malcev coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdaptedSubgroup {
    pub generators: Vec<Vec<BigInt>>,
}

impl AdaptedSubgroup {
    /// Generators in triangular form: the leading coordinates are distinct
    /// and every generator is nontrivial.
    pub fn new(generators: Vec<Vec<BigInt>>) -> Result<AdaptedSubgroup> {
        let mut seen = Vec::new();
        for g in &generators {
            let l =
                leading(g).ok_or_else(|| Error::InvalidInput(String::from("trivial generator")))?;
            if seen.contains(&l) {
                return Err(Error::InvalidInput(format!(
                    "two generators lead at coordinate {}",
                    l + 1
                )));
            }
            seen.push(l);
        }
        Ok(AdaptedSubgroup { generators })
    }

    pub fn from_ints(rows: &[&[i64]]) -> Result<AdaptedSubgroup> {
        AdaptedSubgroup::new(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    /// The whole lattice.
    pub fn standard(lat: &MalcevLattice) -> AdaptedSubgroup {
        AdaptedSubgroup {
            generators: (0..lat.dim()).map(|i| lat.basis(i)).collect(),
        }
    }

    /// Leading entries `d_i` by leading coordinate.
    pub fn leading_entries(&self) -> Vec<(usize, BigInt)> {
        let mut out: Vec<(usize, BigInt)> = self
            .generators
            .iter()
            .filter_map(|g| leading(g).map(|l| (l, g[l].clone())))
            .collect();
        out.sort();
        out
    }
}

/// Triangular generating sequence of the subgroup generated by `gens`, closed
/// under commutators so that every element is `t_1^{k_1} ... t_n^{k_n}`.
/// Slots with no generator are `None`.
pub fn polycyclic_echelon(
    lat: &MalcevLattice,
    gens: &[Vec<BigInt>],
) -> Result<Vec<Option<Vec<BigInt>>>> {
    let n = lat.dim();
    let mut table: Vec<Option<Vec<BigInt>>> = vec![None; n];
    let mut queue: Vec<Vec<BigInt>> = gens.to_vec();
    while let Some(mut g) = queue.pop() {
        if g.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: g.len(),
            });
        }
        while let Some(l) = leading(&g) {
            let Some(t) = table[l].clone() else {
                if g[l].is_negative() {
                    g = lat.inverse(&g)?;
                }
                push_commutators(lat, &table, &g, &mut queue)?;
                table[l] = Some(g);
                break;
            };
            let (a, b) = (&t[l], &g[l]);
            if b.is_multiple_of(a) {
                let q = b / a;
                g = lat.multiply(&lat.pow(&t, &-q)?, &g)?;
                continue;
            }
            let e = a.extended_gcd(b);
            let mut new = lat.multiply(&lat.pow(&t, &e.x)?, &lat.pow(&g, &e.y)?)?;
            if new[l].is_negative() {
                new = lat.inverse(&new)?;
            }
            debug_assert_eq!(new[l], e.gcd.abs());
            push_commutators(lat, &table, &new, &mut queue)?;
            table[l] = Some(new);
            queue.push(t);
            queue.push(g);
            break;
        }
    }
    Ok(table)
}

fn push_commutators(
    lat: &MalcevLattice,
    table: &[Option<Vec<BigInt>>],
    g: &[BigInt],
    queue: &mut Vec<Vec<BigInt>>,
) -> Result<()> {
    for t in table.iter().flatten() {
        queue.push(lat.group_commutator(g, t)?);
        queue.push(lat.group_commutator(g, &lat.inverse(t)?)?);
    }
    Ok(())
}

/// `[G : H]` with the contribution of each upper-central layer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexReport {
    pub index: BigInt,
    /// Outermost layer first.
    pub layer_indices: Vec<BigInt>,
    pub echelon: Vec<Vec<BigInt>>,
}

/// Index of a subgroup of the lattice, multiplied up from the Smith normal
/// forms of the layers `H Z_{k-1} ∩ Z_k / Z_{k-1}`.
pub fn subgroup_index(lat: &MalcevLattice, h: &AdaptedSubgroup) -> Result<IndexReport> {
    let table = polycyclic_echelon(lat, &h.generators)?;
    if table.iter().any(|t| t.is_none()) {
        return Err(Error::InfiniteIndex);
    }
    let echelon: Vec<Vec<BigInt>> = table.into_iter().flatten().collect();
    let mut layer_indices = Vec::new();
    let mut index = BigInt::one();
    for r in lat.layers() {
        let block: Vec<Vec<BigInt>> = echelon
            .iter()
            .filter(|g| r.contains(&leading(g).unwrap()))
            .map(|g| g[r.clone()].to_vec())
            .collect();
        let diag = linalg::smith_diagonal(&block);
        let li: BigInt = diag.iter().product();
        if li.is_zero() {
            return Err(Error::InfiniteIndex);
        }
        index *= &li;
        layer_indices.push(li);
    }
    Ok(IndexReport {
        index,
        layer_indices,
        echelon,
    })
}

/// Outcome of comparing `|det φ|` with `[G : φ(H)] / [G : H]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexRatioReport {
    pub determinant: FieldElement,
    pub index_h: BigInt,
    pub index_k: BigInt,
    /// Generators of `K = φ(H)` in Malcev coordinates.
    pub k_generators: Vec<Vec<BigInt>>,
}

impl IndexRatioReport {
    pub fn ratio(&self) -> FieldElement {
        Field::Q.from_bigint(&self.index_k)
            * Field::Q
                .from_bigint(&self.index_h)
                .inv()
                .expect("positive index")
    }

    pub fn holds(&self) -> bool {
        self.determinant.abs() == self.ratio()
    }
}

pub fn index_ratio_check(
    lat: &MalcevLattice,
    phi: &Matrix,
    h: &AdaptedSubgroup,
) -> Result<IndexRatioReport> {
    let determinant = comm_determinant(lat.algebra(), phi)?;
    let hr = subgroup_index(lat, h)?;
    let k_generators: Vec<Vec<BigInt>> = hr
        .echelon
        .iter()
        .map(|g| lat.image(phi, g))
        .collect::<Result<_>>()?;
    let kr = subgroup_index(
        lat,
        &AdaptedSubgroup {
            generators: k_generators.clone(),
        },
    )?;
    Ok(IndexRatioReport {
        determinant,
        index_h: hr.index,
        index_k: kr.index,
        k_generators,
    })
}
