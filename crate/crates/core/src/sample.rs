//! Seeded sampling of scalars, vectors and small nilpotent algebras.

use alloc::format;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use alloc::sync::Arc;

use crate::algebra::{Algebra, Flags, Table};
use crate::error::Result;
use crate::field::{Field, FieldElement};
use crate::linalg::{self, Matrix, Vector};
use crate::polyfun::PolyFunction;

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Uniform in `[0, n)`.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        let zone = u64::MAX - u64::MAX % n;
        loop {
            let v = self.rng.next_u64();
            if v < zone {
                return v % n;
            }
        }
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        lo + self.below((hi - lo + 1) as u64) as i64
    }

    pub fn chance(&mut self, num: u64, den: u64) -> bool {
        self.below(den) < num
    }

    /// An integer in `[-h, h]` over ℚ, a uniform residue over GF(p).
    pub fn scalar(&mut self, field: Field, h: i64) -> FieldElement {
        match field {
            Field::Q => field.from_i64(self.int(-h, h)),
            Field::Fp(p) => FieldElement::Fp {
                r: self.below(p),
                p,
            },
        }
    }

    /// A nonzero scalar.
    pub fn unit_scalar(&mut self, field: Field, h: i64) -> FieldElement {
        loop {
            let s = self.scalar(field, h);
            if !s.is_zero() {
                return s;
            }
        }
    }

    /// A rational `p/q` with `|p| <= h`, `1 <= q <= h` over ℚ.
    pub fn fraction(&mut self, field: Field, h: i64) -> FieldElement {
        match field {
            Field::Q => field.ratio(self.int(-h, h), self.int(1, h.max(1))),
            _ => self.scalar(field, h),
        }
    }

    pub fn vector(&mut self, field: Field, d: usize, h: i64) -> Vector {
        (0..d).map(|_| self.scalar(field, h)).collect()
    }

    pub fn fraction_vector(&mut self, field: Field, d: usize, h: i64) -> Vector {
        (0..d).map(|_| self.fraction(field, h)).collect()
    }
}

/// A random graded nilpotent algebra of dimension `d` and class at most `c`:
/// basis vectors get degrees `1..=c` and `e_i e_j` is a random combination
/// of basis vectors of degree `deg i + deg j`.
pub fn random_nilpotent(s: &mut Sampler, field: Field, d: usize, c: usize) -> Result<Algebra> {
    let c = c.clamp(1, d.max(1));
    let mut degrees: Vec<usize> = (1..=c).collect();
    while degrees.len() < d {
        degrees.push(1 + s.below(c as u64) as usize);
    }
    degrees.truncate(d);
    degrees.sort_unstable();
    let mut table = Table::new();
    for i in 0..d {
        for j in 0..d {
            let t = degrees[i] + degrees[j];
            let mut entries = Vec::new();
            for (k, &dk) in degrees.iter().enumerate() {
                if dk == t && s.chance(2, 3) {
                    entries.push((k, s.scalar(field, 2)));
                }
            }
            if !entries.is_empty() {
                table.insert((i, j), entries);
            }
        }
    }
    let names = (1..=d).map(|i| format!("e{i}")).collect();
    Algebra::unchecked(field, names, table, Flags::NONE)
}

/// A random `r × m` matrix of full row rank with entries of height `h`.
pub fn full_rank_matrix(s: &mut Sampler, field: Field, r: usize, m: usize, h: i64) -> Matrix {
    loop {
        let a: Matrix = (0..r).map(|_| s.vector(field, m, h)).collect();
        if linalg::rank(&a) == r.min(m) {
            return a;
        }
    }
}

/// `r` equations in `m` unknowns over `alg`: a full-rank linear part, a
/// random constant, quadratic and cubic monomials, and terms `b x_j` whose
/// coefficient `b` is an algebra element.
pub fn random_system(
    s: &mut Sampler,
    alg: &Arc<Algebra>,
    r: usize,
    m: usize,
) -> Result<Vec<PolyFunction>> {
    let field = alg.field();
    let d = alg.dim();
    let lin = full_rank_matrix(s, field, r, m, 3);
    let var = |j: usize| PolyFunction::var(alg.clone(), m, j);
    let mut out = Vec::with_capacity(r);
    for row in &lin {
        let mut f = PolyFunction::constant(alg.clone(), m, &s.vector(field, d, 3));
        for (j, a) in row.iter().enumerate() {
            f = f.add(&var(j).scale(a))?;
        }
        for _ in 0..2 {
            let (i, j) = (s.below(m as u64) as usize, s.below(m as u64) as usize);
            f = f.add(&var(i).mul(&var(j))?.scale(&s.scalar(field, 2)))?;
        }
        let (i, j, k) = (
            s.below(m as u64) as usize,
            s.below(m as u64) as usize,
            s.below(m as u64) as usize,
        );
        f = f.add(
            &var(i)
                .mul(&var(j))?
                .mul(&var(k))?
                .scale(&s.scalar(field, 2)),
        )?;
        let b = PolyFunction::constant(alg.clone(), m, &s.vector(field, d, 2));
        f = f.add(&b.mul(&var(s.below(m as u64) as usize))?)?;
        out.push(f);
    }
    Ok(out)
}
