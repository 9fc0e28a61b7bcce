//! Solving polynomial systems over nilpotent algebras.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::linalg::{self, LinearSolution, Matrix, Vector};
use crate::polyfun::{jacobian, PolyFunction};

fn shape(system: &[PolyFunction]) -> Result<(usize, usize)> {
    let first = system
        .first()
        .ok_or_else(|| Error::InvalidInput(String::from("empty system")))?;
    Ok((system.len(), first.arity()))
}

/// The unique solution of a square system with nonsingular Jacobian.
///
/// Solves modulo `A^c` in the quotient algebra, lifts, and corrects the
/// residual (which lies in `A^c`) coordinatewise with the Jacobian.
pub fn solve_square(system: &[PolyFunction]) -> Result<Vec<Vector>> {
    let (r, m) = shape(system)?;
    if r != m {
        return Err(Error::NotSquare {
            equations: r,
            unknowns: m,
        });
    }
    let j = jacobian(system)?;
    let jinv = linalg::inverse(&j).ok_or(Error::SingularJacobian)?;
    lift(system, &jinv)
}

fn lift(system: &[PolyFunction], jinv: &Matrix) -> Result<Vec<Vector>> {
    let alg = system[0].algebra().clone();
    let d = alg.dim();
    let m = system[0].arity();
    if d == 0 {
        return Ok(alloc::vec![Vec::new(); m]);
    }
    let c = alg.nilpotency_class()?;
    let top = alg.power(c);
    let quot = alg.quotient(&top)?;
    let qalg = Arc::new(quot.algebra.clone());
    let reduced: Vec<PolyFunction> = system
        .iter()
        .map(|f| f.map_constants(qalg.clone(), |v| quot.project(v)))
        .collect();
    let below = lift(&reduced, jinv)?;
    let mut x: Vec<Vector> = below.iter().map(|v| quot.lift(v)).collect();
    let residual: Vec<Vector> = system
        .iter()
        .map(|f| f.evaluate(&x))
        .collect::<Result<_>>()?;
    for (i, xi) in x.iter_mut().enumerate() {
        for (k, rk) in residual.iter().enumerate() {
            let s = -&jinv[i][k];
            linalg::axpy(xi, &s, rk);
        }
    }
    Ok(x)
}

/// A solution `x_{p_i} = H_i(free variables)` of a full-rank system.
#[derive(Clone, Debug)]
pub struct ParametricSolution {
    pub pivots: Vec<usize>,
    pub free: Vec<usize>,
    /// `H_i` as functions of all `m` variables that only use free ones.
    pub h: Vec<PolyFunction>,
}

impl ParametricSolution {
    /// The full point for given values of the free variables (in order).
    pub fn point(&self, free_values: &[Vector]) -> Result<Vec<Vector>> {
        if free_values.len() != self.free.len() {
            return Err(Error::DimensionMismatch {
                expected: self.free.len(),
                found: free_values.len(),
            });
        }
        let m = self.pivots.len() + self.free.len();
        let alg = match self.h.first() {
            Some(h) => h.algebra().clone(),
            None => return Ok(free_values.to_vec()),
        };
        let mut x = alloc::vec![linalg::zeros(alg.field(), alg.dim()); m];
        for (v, &f) in free_values.iter().zip(&self.free) {
            x[f] = v.clone();
        }
        let values: Vec<Vector> = self
            .h
            .iter()
            .map(|h| h.evaluate(&x))
            .collect::<Result<_>>()?;
        for (v, &p) in values.into_iter().zip(&self.pivots) {
            x[p] = v;
        }
        Ok(x)
    }
}

/// Parametrizes the solutions of a system whose Jacobian has full row rank.
pub fn implicit_solve(system: &[PolyFunction]) -> Result<ParametricSolution> {
    let (r, m) = shape(system)?;
    let j = jacobian(system)?;
    let alg = system[0].algebra().clone();
    let c = alg.nilpotency_class()?;
    let mut red = j.clone();
    let pivots = linalg::rref(&mut red);
    if pivots.len() < r {
        return Err(Error::RankDeficient {
            rank: pivots.len(),
            required: r,
        });
    }
    let jp: Matrix = j
        .iter()
        .map(|row| pivots.iter().map(|&p| row[p].clone()).collect())
        .collect();
    let jpinv = linalg::inverse(&jp).ok_or(Error::SingularJacobian)?;
    // G = J_P^{-1} F has linear part e_{p_i} on the pivots.
    let mut h0 = Vec::with_capacity(r);
    for (i, &p) in pivots.iter().enumerate() {
        let mut g = PolyFunction::zero(alg.clone(), m);
        for (k, f) in system.iter().enumerate() {
            if !jpinv[i][k].is_zero() {
                g = g.add(&f.scale(&jpinv[i][k]))?;
            }
        }
        h0.push(PolyFunction::var(alg.clone(), m, p).sub(&g)?);
    }
    let mut h = h0.clone();
    for _ in 1..c {
        let subs: Vec<PolyFunction> = (0..m)
            .map(|v| match pivots.iter().position(|&p| p == v) {
                Some(i) => h[i].clone(),
                None => PolyFunction::var(alg.clone(), m, v),
            })
            .collect();
        h = h0
            .iter()
            .map(|f| f.substitute_all(&subs))
            .collect::<Result<_>>()?;
    }
    for f in &h {
        if pivots.iter().any(|&p| f.uses_var(p)) {
            return Err(Error::CheckFailed(String::from(
                "pivot variable survived the substitution rounds",
            )));
        }
    }
    let free = (0..m).filter(|v| !pivots.contains(v)).collect();
    Ok(ParametricSolution { pivots, free, h })
}

/// Result of analysing an affine system over an arbitrary algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AffineOutcome {
    Solution(Vec<Vector>),
    /// A functional `y` on the coordinates of the equations with `y M = 0`
    /// and `y b != 0` for the coordinate system `M x = b`.
    Inconsistent {
        certificate: Vector,
        matrix: Matrix,
        rhs: Vector,
    },
}

/// Solves a system that is affine in the variables by exact linear algebra
/// on coordinates; works without nilpotency.
pub fn solve_affine(system: &[PolyFunction]) -> Result<AffineOutcome> {
    let (_, m) = shape(system)?;
    if system.iter().any(|f| f.var_degree() > 1) {
        return Err(Error::InvalidInput(String::from(
            "system is not affine in the variables",
        )));
    }
    let alg = system[0].algebra().clone();
    let field = alg.field();
    let d = alg.dim();
    let zero: Vec<Vector> = alloc::vec![linalg::zeros(field, d); m];
    let base: Vector = system
        .iter()
        .map(|f| f.evaluate(&zero))
        .collect::<Result<Vec<_>>>()?
        .concat();
    let mut cols: Vec<Vector> = Vec::with_capacity(m * d);
    for v in 0..m {
        for k in 0..d {
            let mut pt = zero.clone();
            pt[v] = linalg::unit(field, d, k);
            let val: Vector = system
                .iter()
                .map(|f| f.evaluate(&pt))
                .collect::<Result<Vec<_>>>()?
                .concat();
            cols.push(linalg::sub_vec(&val, &base));
        }
    }
    let matrix = linalg::transpose(&cols);
    let rhs: Vector = base.iter().map(|x| -x).collect();
    match linalg::solve(&matrix, &rhs, field) {
        LinearSolution::Solution(x) => Ok(AffineOutcome::Solution(
            x.chunks(d).map(|c| c.to_vec()).collect(),
        )),
        LinearSolution::Inconsistent(y) => Ok(AffineOutcome::Inconsistent {
            certificate: y,
            matrix,
            rhs,
        }),
    }
}

/// Checks `y M = 0` and `y b != 0`.
pub fn verify_certificate(y: &[FieldElement], matrix: &Matrix, rhs: &[FieldElement]) -> bool {
    let cols = matrix.first().map_or(0, |r| r.len());
    let annihilates = (0..cols).all(|j| {
        let col: Vector = matrix.iter().map(|r| r[j].clone()).collect();
        linalg::dot(y, &col).is_zero()
    });
    annihilates && !linalg::dot(y, rhs).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ef_algebra;
    use crate::field::Field;
    use crate::free::{free_nilpotent, Variety};

    #[test]
    fn commutative_square_root_like() {
        let f = free_nilpotent(Field::Q, &["u"], 2, Variety::Commutative).unwrap();
        let a = Arc::new(f.algebra.clone());
        let x = PolyFunction::var(a.clone(), 1, 0);
        let u = PolyFunction::constant(a.clone(), 1, &f.generator_element(0));
        let eq = x.add(&x.mul(&x).unwrap()).unwrap().sub(&u).unwrap();
        let sol = solve_square(&[eq]).unwrap();
        assert_eq!(
            sol[0],
            alloc::vec![Field::Q.from_i64(1), Field::Q.from_i64(-1)]
        );
    }

    #[test]
    fn x_plus_xe_equals_f_is_inconsistent() {
        let l = Arc::new(ef_algebra(Field::Q));
        let x = PolyFunction::var(l.clone(), 1, 0);
        let e = PolyFunction::constant(l.clone(), 1, &linalg::unit(Field::Q, 2, 0));
        let f = PolyFunction::constant(l.clone(), 1, &linalg::unit(Field::Q, 2, 1));
        let eq = x.add(&x.mul(&e).unwrap()).unwrap().sub(&f).unwrap();
        match solve_affine(&[eq]).unwrap() {
            AffineOutcome::Inconsistent {
                certificate,
                matrix,
                rhs,
            } => assert!(verify_certificate(&certificate, &matrix, &rhs)),
            other => panic!("expected inconsistency, got {other:?}"),
        }
    }
}
