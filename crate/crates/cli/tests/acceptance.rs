//! One line per acceptance criterion. Runs as a plain binary so the lines
//! are always printed.

mod common;

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use nilalg::algebra::{abelian, ef_algebra, heisenberg, names, table_from_ints};
use nilalg::commensurator::{self, heisenberg_block, AdaptedSubgroup, MalcevLattice};
use nilalg::free::{free_nilpotent, Tree, Variety};
use nilalg::linalg::{self, Matrix, Vector};
use nilalg::orders;
use nilalg::polyfun::PolyFunction;
use nilalg::polymap::{self, SeriesMap};
use nilalg::quasigroup::{self, CircleOp};
use nilalg::reconstruct::{derived_closure, reconstruct_ops};
use nilalg::sample::{random_nilpotent, random_system, Sampler};
use nilalg::solver::{self, AffineOutcome};
use nilalg::{Algebra, Field, FieldElement, Flags};
use num_bigint::BigInt;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn q(n: i64, d: i64) -> FieldElement {
    Field::Q.ratio(n, d)
}

fn ok<T>(r: nilalg::Result<T>, what: &str) -> Result<T, String> {
    r.map_err(|e| format!("{what}: {} ({e})", e.code()))
}

fn residual_is_zero(system: &[PolyFunction], x: &[Vector]) -> bool {
    system.iter().all(|f| {
        f.evaluate(x)
            .map(|v| linalg::is_zero_vec(&v))
            .unwrap_or(false)
    })
}

fn random_algebras(seed: u64, n: usize) -> Vec<(Arc<Algebra>, usize)> {
    let mut s = Sampler::new(seed);
    (0..n)
        .map(|i| {
            let field = if i % 2 == 0 { Field::Q } else { Field::Fp(5) };
            let d = 2 + s.below(7) as usize;
            let c = 1 + s.below(4) as usize;
            let m = 1 + s.below(3) as usize;
            (Arc::new(random_nilpotent(&mut s, field, d, c).unwrap()), m)
        })
        .collect()
}

fn solver_soundness() -> Outcome {
    let start = Instant::now();
    let mut s = Sampler::new(2024);
    let corpus = random_algebras(31, 60);
    let mut fields = (0, 0);
    for (n, (alg, m)) in corpus.iter().enumerate() {
        ensure!(
            alg.dim() <= 8 && alg.nilpotency_class().unwrap_or(99) <= 4,
            "algebra {n} out of range"
        );
        let sys = ok(random_system(&mut s, alg, *m, *m), "random system")?;
        let x = ok(solver::solve_square(&sys), "solve_square")?;
        ensure!(residual_is_zero(&sys, &x), "system {n}: nonzero residual");
        let mut perm = sys.clone();
        perm.rotate_left(1);
        perm.reverse();
        ensure!(
            ok(solver::solve_square(&perm), "permuted")? == x,
            "system {n}: permutation changed the solution"
        );
        if alg.field() == Field::Q {
            fields.0 += 1;
        } else {
            fields.1 += 1;
        }
    }
    let t = start.elapsed();
    ensure!(t < Duration::from_secs(10), "took {t:?}");
    Ok(format!(
        "{} systems ({} over Q, {} over GF(5)) in {:.2}s",
        corpus.len(),
        fields.0,
        fields.1,
        t.as_secs_f64()
    ))
}

/// Free parts sampled along the parametrization span `d(m - r)` dimensions,
/// and each point is the unique solution once its free part is fixed.
fn solution_dimension(sys: &[PolyFunction], seed: u64) -> Result<usize, String> {
    let p = ok(solver::implicit_solve(sys), "implicit_solve")?;
    let alg = sys[0].algebra();
    let (r, m) = (p.pivots.len(), sys[0].arity());
    let mut s = Sampler::new(seed);
    let mut free_parts = Vec::new();
    for _ in 0..alg.dim() * p.free.len() + 4 {
        let free: Vec<Vector> = (0..p.free.len())
            .map(|_| s.vector(alg.field(), alg.dim(), 5))
            .collect();
        let x = ok(p.point(&free), "point")?;
        ensure!(
            residual_is_zero(sys, &x),
            "parametrized point is not a solution"
        );
        let subs: Vec<PolyFunction> = (0..m)
            .map(|v| match p.pivots.iter().position(|&w| w == v) {
                Some(i) => PolyFunction::var(alg.clone(), r, i),
                None => PolyFunction::constant(alg.clone(), r, &x[v]),
            })
            .collect();
        let fixed: Vec<PolyFunction> = sys
            .iter()
            .map(|f| f.substitute_all(&subs).unwrap())
            .collect();
        let pivots = ok(solver::solve_square(&fixed), "fixed free part")?;
        ensure!(
            pivots == p.pivots.iter().map(|&w| x[w].clone()).collect::<Vec<_>>(),
            "pivot values not unique"
        );
        free_parts.push(free.concat());
    }
    let diffs: Vec<Vector> = free_parts[1..]
        .iter()
        .map(|v| linalg::sub_vec(v, &free_parts[0]))
        .collect();
    Ok(linalg::rank(&diffs))
}

fn implicit_contract() -> Outcome {
    let mut s = Sampler::new(77);
    let mut count = 0;
    for (alg, m) in random_algebras(41, 24) {
        let m = m + 1;
        let r = 1 + s.below(m as u64 - 1) as usize;
        let sys = ok(random_system(&mut s, &alg, r, m), "random system")?;
        let p = ok(solver::implicit_solve(&sys), "implicit_solve")?;
        ensure!(
            p.pivots.len() == r && p.free.len() == m - r,
            "wrong pivot count"
        );
        for _ in 0..10 {
            let free: Vec<Vector> = (0..m - r)
                .map(|_| s.vector(alg.field(), alg.dim(), 4))
                .collect();
            ensure!(
                residual_is_zero(&sys, &ok(p.point(&free), "point")?),
                "nonzero residual"
            );
        }
        count += 1;
    }
    let h = Arc::new(heisenberg(Field::Q));
    let v2 = |j| PolyFunction::var(h.clone(), 2, j);
    let v3 = |j| PolyFunction::var(h.clone(), 3, j);
    let e3 = PolyFunction::constant(h.clone(), 2, &linalg::unit(Field::Q, 3, 2));
    let f = v2(0)
        .add(&v2(0).mul(&v2(1)).unwrap())
        .unwrap()
        .sub(&v2(1))
        .unwrap()
        .sub(&e3)
        .unwrap();
    let g1 = v3(0).sub(&v3(1).mul(&v3(2)).unwrap()).unwrap();
    let g2 = v3(1)
        .add(&v3(2))
        .unwrap()
        .add(&v3(0).mul(&v3(2)).unwrap())
        .unwrap();
    let instances: [(Vec<PolyFunction>, usize); 3] =
        [(vec![f], 3), (vec![g1.clone()], 6), (vec![g1, g2], 3)];
    let mut dims = Vec::new();
    for (i, (sys, expected)) in instances.iter().enumerate() {
        let d = solution_dimension(sys, i as u64)?;
        ensure!(
            d == *expected,
            "instance {i}: dimension {d}, expected {expected}"
        );
        dims.push(d);
    }
    Ok(format!(
        "{count} systems x 10 assignments; dimensions {dims:?} = d(m-r)"
    ))
}

fn non_nilpotent_counterexample() -> Outcome {
    let ef = Arc::new(ef_algebra(Field::Q));
    let x = PolyFunction::var(ef.clone(), 1, 0);
    let e = PolyFunction::constant(ef.clone(), 1, &linalg::unit(Field::Q, 2, 0));
    let f = PolyFunction::constant(ef.clone(), 1, &linalg::unit(Field::Q, 2, 1));
    let eq = x.add(&x.mul(&e).unwrap()).unwrap().sub(&f).unwrap();
    match ok(solver::solve_affine(&[eq]), "solve_affine")? {
        AffineOutcome::Inconsistent {
            certificate,
            matrix,
            rhs,
        } => {
            ensure!(
                solver::verify_certificate(&certificate, &matrix, &rhs),
                "certificate does not verify"
            );
            Ok(format!(
                "certificate y = {:?} with yM = 0, yb != 0",
                certificate
                    .iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
            ))
        }
        AffineOutcome::Solution(x) => Err(format!("unexpected solution {x:?}")),
    }
}

type Poly = BTreeMap<Vec<usize>, FieldElement>;

fn add_scaled(acc: &mut Poly, s: &FieldElement, p: &Poly) {
    for (w, x) in p {
        let e = acc.entry(w.clone()).or_insert_with(|| Field::Q.zero());
        *e = &*e + &(s * x);
    }
    acc.retain(|_, x| !x.is_zero());
}

fn pmul(a: &Poly, b: &Poly, c: usize) -> Poly {
    let mut out = Poly::new();
    for (u, x) in a {
        for (v, y) in b {
            if u.len() + v.len() <= c {
                let w: Vec<usize> = u.iter().chain(v).copied().collect();
                let e = out.entry(w).or_insert_with(|| Field::Q.zero());
                *e = &*e + &(x * y);
            }
        }
    }
    out.retain(|_, x| !x.is_zero());
    out
}

fn one() -> Poly {
    Poly::from([(vec![], Field::Q.one())])
}

fn exp_series(x: &Poly, c: usize) -> Poly {
    let mut out = one();
    let mut term = one();
    for k in 1..=c {
        term = pmul(&term, x, c);
        let fact: i64 = (1..=k as i64).product();
        add_scaled(&mut out, &q(1, fact), &term);
    }
    out
}

/// log(exp x exp y) in the free associative algebra on two letters.
fn bch_oracle(c: usize) -> Poly {
    let letter = |i: usize| Poly::from([(vec![i], Field::Q.one())]);
    let mut z = pmul(&exp_series(&letter(0), c), &exp_series(&letter(1), c), c);
    z.remove(&vec![]);
    let mut out = Poly::new();
    let mut term = one();
    for k in 1..=c {
        term = pmul(&term, &z, c);
        add_scaled(
            &mut out,
            &q(if k % 2 == 1 { 1 } else { -1 }, k as i64),
            &term,
        );
    }
    out
}

fn expand(t: &Tree, c: usize) -> Poly {
    match t {
        Tree::Leaf(i) => Poly::from([(vec![*i], Field::Q.one())]),
        Tree::Node(a, b) => {
            let (a, b) = (expand(a, c), expand(b, c));
            let mut p = pmul(&a, &b, c);
            add_scaled(&mut p, &q(-1, 1), &pmul(&b, &a, c));
            p
        }
    }
}

fn bch_checks() -> Outcome {
    for c in 1..=4 {
        let (free, z) = ok(quasigroup::bch_lie_coordinates(c), "bch_lie_coordinates")?;
        let mut lie = Poly::new();
        for (i, x) in z.iter().enumerate() {
            add_scaled(&mut lie, x, &expand(&free.trees[i], c));
        }
        ensure!(
            lie == bch_oracle(c),
            "degree {c} differs from log(exp x exp y)"
        );
    }
    let h = Arc::new(heisenberg(Field::Q));
    let mut s = Sampler::new(4);
    for _ in 0..50 {
        let (x, y) = (s.vector(Field::Q, 3, 6), s.vector(Field::Q, 3, 6));
        let mut law = linalg::add_vec(&x, &y);
        linalg::axpy(&mut law, &q(1, 2), &h.mul_vec(&x, &y));
        ensure!(
            ok(quasigroup::bch(&h, &x, &y), "bch")? == law,
            "class-2 law fails"
        );
    }
    let mut triples = 0;
    for c in 2..=4 {
        let free = ok(
            free_nilpotent(Field::Q, &["x", "y", "z"], c, Variety::Lie),
            "free Lie",
        )?;
        let op = ok(CircleOp::bch(Arc::new(free.algebra.clone())), "bch op")?;
        let n = if c == 4 { 34 } else { 33 };
        for _ in 0..n {
            let d = free.algebra.dim();
            let (a, b, e) = (
                s.vector(Field::Q, d, 3),
                s.vector(Field::Q, d, 3),
                s.vector(Field::Q, d, 3),
            );
            let l = op.circle(&op.circle(&a, &b).unwrap(), &e).unwrap();
            let r = op.circle(&a, &op.circle(&b, &e).unwrap()).unwrap();
            ensure!(l == r, "associativity fails in class {c}");
            triples += 1;
        }
    }
    Ok(format!(
        "oracle agrees to degree 4; x+y+1/2(x,y) on 50 pairs; {triples} associative triples"
    ))
}

fn round_trip(
    free: &nilalg::free::FreeNilpotentAlgebra,
    op: &CircleOp,
    c: usize,
    var: Variety,
) -> Result<usize, String> {
    let r = ok(reconstruct_ops(op, c, var), "reconstruct_ops")?;
    ok(r.add.audit(), "audit")?;
    ok(r.mul.audit(), "audit")?;
    let alg = &free.algebra;
    let d = alg.dim();
    for i in 0..d {
        for j in 0..d {
            let (x, y) = (
                linalg::unit(alg.field(), d, i),
                linalg::unit(alg.field(), d, j),
            );
            ensure!(
                ok(r.add.evaluate(op, alg, &x, &y), "add")? == linalg::add_vec(&x, &y),
                "+ differs on ({i},{j}) class {c}"
            );
            ensure!(
                ok(r.mul.evaluate(op, alg, &x, &y), "mul")? == alg.mul_vec(&x, &y),
                "product differs on ({i},{j}) class {c}"
            );
        }
    }
    Ok(d * d)
}

fn quadratic(alg: &Algebra, k: [i64; 4]) -> CircleOp {
    let f = alg.field();
    CircleOp::from_quadratic(
        Arc::new(alg.clone()),
        f.from_i64(k[0]),
        f.from_i64(k[1]),
        f.from_i64(k[2]),
        f.from_i64(k[3]),
    )
}

fn reconstruction() -> Outcome {
    let mut pairs = 0;
    for c in 1..=3 {
        let free = ok(
            free_nilpotent(Field::Q, &["a", "b"], c, Variety::Nonassociative),
            "free",
        )?;
        for k in [[1, 0, 0, 0], [1, -1, 1, 0], [2, 1, 0, 0], [3, -1, -1, 2]] {
            pairs += round_trip(
                &free,
                &quadratic(&free.algebra, k),
                c,
                Variety::Nonassociative,
            )?;
        }
    }
    for c in 1..=4 {
        let free = ok(
            free_nilpotent(Field::Q, &["a", "b"], c, Variety::Lie),
            "free Lie",
        )?;
        let op = ok(CircleOp::bch(Arc::new(free.algebra.clone())), "bch")?;
        pairs += round_trip(&free, &op, c, Variety::Lie)?;
    }
    let n2 = ok(
        free_nilpotent(Field::Q, &["a", "b"], 2, Variety::Nonassociative),
        "free",
    )?;
    for (k, var) in [
        ([1, 1, 0, 0], Variety::Lie),
        ([1, 1, 0, 0], Variety::Nonassociative),
        ([1, -1, 0, 0], Variety::Nonassociative),
    ] {
        match reconstruct_ops(&quadratic(&n2.algebra, k), 2, var) {
            Err(e) if e.code() == "HypothesisViolated" => {}
            other => {
                return Err(format!(
                    "{k:?} in {}: expected HypothesisViolated, got {other:?}",
                    var.name()
                ))
            }
        }
    }
    let f = Field::Fp(2);
    let t = table_from_ints(f, &[(0, 1, &[(2, 1)]), (1, 0, &[(2, 1)])]);
    let alg = ok(
        Algebra::new(
            f,
            names(&["a", "b", "ab"]),
            t,
            Flags {
                commutative: true,
                ..Flags::NONE
            },
        ),
        "GF(2) algebra",
    )?;
    ensure!(
        quasigroup::all_elements(f, 3, 8).map(|e| e.len()) == Ok(8),
        "not 8 elements"
    );
    let op = CircleOp::product(Arc::new(alg));
    match reconstruct_ops(&op, 2, Variety::Commutative) {
        Err(e) if e.code() == "UnsupportedField" => {}
        other => return Err(format!("GF(2): expected UnsupportedField, got {other:?}")),
    }
    let v = |x: [i64; 3]| -> Vector { x.iter().map(|&c| f.from_i64(c)).collect() };
    let klein = [v([0, 0, 0]), v([1, 0, 0]), v([0, 1, 0]), v([1, 1, 1])];
    let mut closure = ok(
        derived_closure(&op, &[klein[1].clone(), klein[2].clone()]),
        "closure",
    )?;
    let mut sorted = klein.to_vec();
    sorted.sort();
    closure.sort();
    ensure!(closure == sorted, "closure of a, b is {closure:?}");
    // Klein four-group: 0 is neutral, every element is its own inverse,
    // and two distinct nonzero elements give the third.
    for (i, x) in klein.iter().enumerate() {
        for (j, y) in klein.iter().enumerate() {
            let expected = match (i, j) {
                (0, _) => j,
                (_, 0) => i,
                _ if i == j => 0,
                _ => 6 - i - j,
            };
            ensure!(
                op.circle(x, y).unwrap() == klein[expected],
                "table entry ({i},{j})"
            );
        }
    }
    Ok(format!("{pairs} basis pairs exact; k = l and k = -l rejected; GF(2) rejected with Klein subloop {{0, a, b, a+b+ab}}"))
}

fn small_values() -> Vec<FieldElement> {
    vec![q(-1, 1), q(0, 1), q(1, 2), q(1, 1)]
}

fn is_rational_square(x: &FieldElement) -> bool {
    let r = x.to_rational();
    let sq = |n: &BigInt| n.sign() != num_bigint::Sign::Minus && n.sqrt().pow(2) == *n;
    sq(r.numer()) && sq(r.denom())
}

fn commensurator_checks() -> Outcome {
    let h = heisenberg(Field::Q);
    let vals = small_values();
    let n = vals.len();
    let (mut grid, mut autos) = (0usize, 0usize);
    for code in 0..n.pow(9) {
        let mut c = code;
        let m: Matrix = (0..3)
            .map(|_| {
                (0..3)
                    .map(|_| {
                        let x = vals[c % n].clone();
                        c /= n;
                        x
                    })
                    .collect()
            })
            .collect();
        let aut = ok(commensurator::is_automorphism(&h, &m), "is_automorphism")?;
        ensure!(
            aut == commensurator::has_heisenberg_shape(&m),
            "mismatch at {m:?}"
        );
        grid += 1;
        autos += aut as usize;
    }
    let mut s = Sampler::new(9);
    let mut squares = 0;
    while squares < 100 {
        let a = [
            [s.scalar(Field::Q, 4), s.scalar(Field::Q, 4)],
            [s.scalar(Field::Q, 4), s.scalar(Field::Q, 4)],
        ];
        if (&a[0][0] * &a[1][1] - &a[0][1] * &a[1][0]).is_zero() {
            continue;
        }
        let m = heisenberg_block(&a, &[s.scalar(Field::Q, 4), s.scalar(Field::Q, 4)]);
        let d = ok(commensurator::comm_determinant(&h, &m), "comm_determinant")?;
        ensure!(is_rational_square(&d), "det {d} is not a square");
        squares += 1;
    }
    let diag = |xs: &[FieldElement]| -> Matrix {
        let mut m = linalg::identity(Field::Q, xs.len());
        for (i, x) in xs.iter().enumerate() {
            m[i][i] = x.clone();
        }
        m
    };
    let mut fixtures = Vec::new();
    let z = abelian(Field::Q, 1);
    let lat = ok(MalcevLattice::new(&z), "lattice")?;
    let r = ok(
        commensurator::index_ratio_check(
            &lat,
            &vec![vec![q(-3, 2)]],
            &AdaptedSubgroup::from_ints(&[&[2]]).unwrap(),
        ),
        "Z",
    )?;
    ensure!(
        r.holds() && r.determinant == q(-3, 2) && r.index_k == BigInt::from(3),
        "Z fixture {r:?}"
    );
    fixtures.push(format!("Z [-3/2]: {}/{}", r.index_k, r.index_h));
    let z2 = abelian(Field::Q, 2);
    let lat = ok(MalcevLattice::new(&z2), "lattice")?;
    let r = ok(
        commensurator::index_ratio_check(
            &lat,
            &diag(&[q(3, 2), q(1, 1)]),
            &AdaptedSubgroup::from_ints(&[&[2, 0], &[0, 1]]).unwrap(),
        ),
        "Z2",
    )?;
    ensure!(r.holds(), "Z2 fixture {r:?}");
    fixtures.push(format!("Z2: {}/{}", r.index_k, r.index_h));
    let lat = ok(MalcevLattice::new(&h), "lattice")?;
    let phi = heisenberg_block(
        &[[q(2, 1), q(1, 1)], [q(0, 1), q(3, 1)]],
        &[q(5, 1), q(-1, 1)],
    );
    let r = ok(
        commensurator::index_ratio_check(
            &lat,
            &phi,
            &AdaptedSubgroup::from_ints(&[&[2, 0, 0], &[0, 2, 0], &[0, 0, 4]]).unwrap(),
        ),
        "H",
    )?;
    ensure!(
        r.holds() && r.determinant == q(36, 1),
        "Heisenberg fixture {r:?}"
    );
    fixtures.push(format!("Heisenberg: {}/{}", r.index_k, r.index_h));
    Ok(format!("{grid} grid matrices ({autos} automorphisms) agree with the block shape; 100 dets are squares; {}", fixtures.join(", ")))
}

fn polymap_checks() -> Outcome {
    for c in 4..=8 {
        let a = q(3, 1);
        let mut coeffs = vec![Field::Q.zero(); c];
        coeffs[0] = Field::Q.one();
        coeffs[c - 2] = a.clone();
        let f = ok(SeriesMap::new(coeffs), "series")?;
        let g = SeriesMap::elementary(Field::Q, c, 2, &Field::Q.one());
        let h = ok(f.commutator(&g), "commutator")?;
        let expected = SeriesMap::elementary(Field::Q, c, c, &(&q(c as i64 - 3, 1) * &a));
        ensure!(h == expected, "commutator identity fails at c = {c}");
    }
    for c in 3..=8 {
        let k = ok(polymap::u_nilpotency_class(c), "class")?;
        ensure!(k == c - 2, "class of U(A_{c}) is {k}");
    }
    let mut lengths = Vec::new();
    let mut slowest = Duration::ZERO;
    for c in [4usize, 8, 16] {
        let start = Instant::now();
        let dl = ok(polymap::u_derived_length(c), "derived length")?;
        let t = start.elapsed();
        slowest = slowest.max(t);
        let k = (usize::BITS - 1 - c.leading_zeros()) as usize;
        // At least k since c >= 2^k; at most k since c < 2^(k+1).
        ensure!(dl == k, "derived length of U(A_{c}) is {dl}");
        ensure!(t < Duration::from_secs(60), "c = {c} took {t:?}");
        lengths.push(dl);
    }
    Ok(format!("[f, g] = x + (c-3)a x^c for c = 4..8; class c-2 for c = 3..8; derived lengths {lengths:?} for c = 4, 8, 16 (slowest {:.2}s)", slowest.as_secs_f64()))
}

fn filiform_checks() -> Outcome {
    for k in 2..=4u32 {
        let l = ok(polymap::filiform(k), "filiform")?;
        ensure!(l.dim() == (1 << k) - 1, "dim L({k}) = {}", l.dim());
        let dims: Vec<usize> = l.lower_central_series().iter().map(|s| s.dim()).collect();
        let filiform = dims[0] - dims[1] == 2
            && dims.windows(2).skip(1).all(|w| w[0] - w[1] == 1)
            && *dims.last().unwrap() == 0;
        ensure!(filiform, "L({k}) is not filiform: {dims:?}");
        ensure!(
            l.derived_length() == Some(k as usize),
            "derived length of L({k}) is {:?}",
            l.derived_length()
        );
        let ext = ok(
            polymap::extend_with_derivation(&l, &polymap::weight_derivation(&l)),
            "extension",
        )?;
        ensure!(
            ext.dim() == 1 << k && ext.derived_length() == Some(k as usize + 1),
            "extension of L({k})"
        );
    }
    let l2 = ok(polymap::filiform(2), "filiform")?;
    ensure!(
        l2.table() == heisenberg(Field::Q).table(),
        "L(2) is not the Heisenberg table"
    );
    Ok("L(k) for k = 2, 3, 4: dim 2^k-1, filiform, derived length k; extensions dim 2^k, length k+1; L(2) = Heisenberg".into())
}

type Triple = (usize, usize, Vec<(usize, i64)>);

fn lie(labels: &[&str], brackets: &[Triple]) -> Algebra {
    let mut all: Vec<Triple> = Vec::new();
    for (i, j, v) in brackets {
        all.push((*i, *j, v.clone()));
        all.push((*j, *i, v.iter().map(|&(k, c)| (k, -c)).collect()));
    }
    let refs: Vec<(usize, usize, &[(usize, i64)])> =
        all.iter().map(|(i, j, v)| (*i, *j, v.as_slice())).collect();
    Algebra::new(
        Field::Q,
        names(labels),
        table_from_ints(Field::Q, &refs),
        Flags::lie(),
    )
    .unwrap()
}

/// Upper triangular 2×2 or 3×3 matrices and strictly upper 4×4 ones.
fn borel(n: usize, strict: bool) -> Algebra {
    let idx: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i..n).map(move |j| (i, j)))
        .filter(|(i, j)| !strict || i < j)
        .collect();
    let pos = |p: (usize, usize)| idx.iter().position(|&r| r == p).unwrap();
    let mut all: Vec<Triple> = Vec::new();
    for (a, &(i, j)) in idx.iter().enumerate() {
        for (b, &(k, l)) in idx.iter().enumerate() {
            let mut v: Vec<(usize, i64)> = Vec::new();
            if j == k {
                v.push((pos((i, l)), 1));
            }
            if l == i {
                match v.iter_mut().find(|(p, _)| *p == pos((k, j))) {
                    Some(e) => e.1 -= 1,
                    None => v.push((pos((k, j)), -1)),
                }
            }
            v.retain(|&(_, c)| c != 0);
            if !v.is_empty() {
                all.push((a, b, v));
            }
        }
    }
    let labels: Vec<String> = idx
        .iter()
        .map(|(i, j)| format!("E{}{}", i + 1, j + 1))
        .collect();
    let refs: Vec<(usize, usize, &[(usize, i64)])> =
        all.iter().map(|(i, j, v)| (*i, *j, v.as_slice())).collect();
    Algebra::new(
        Field::Q,
        labels,
        table_from_ints(Field::Q, &refs),
        Flags::lie(),
    )
    .unwrap()
}

fn orders_checks() -> Outcome {
    let corpus: Vec<(&str, Algebra, usize)> = vec![
        ("abelian3", abelian(Field::Q, 3), 3),
        ("heisenberg", heisenberg(Field::Q), 3),
        ("ef", ef_algebra(Field::Q), 1),
        ("weighted", orders::weighted_heisenberg_extension(), 2),
        ("borel2", borel(2, false), 2),
        ("borel3", borel(3, false), 3),
        ("strict4", borel(4, true), 6),
        (
            "sqrt2",
            lie(
                &["c", "a", "b"],
                &[(0, 1, vec![(2, 1)]), (0, 2, vec![(1, 2)])],
            ),
            1,
        ),
        (
            "rotation",
            lie(
                &["c", "a", "b"],
                &[(0, 1, vec![(2, 1)]), (0, 2, vec![(1, -1)])],
            ),
            1,
        ),
        (
            "jordan",
            lie(
                &["c", "a", "b"],
                &[(0, 1, vec![(1, 1)]), (0, 2, vec![(1, 1), (2, 1)])],
            ),
            1,
        ),
        ("filiform3", ok(polymap::filiform(3), "filiform")?, 7),
    ];
    for (name, a, expected) in &corpus {
        let r = ok(orders::rank_equality_check(a, 1), name)?;
        ensure!(
            r.holds() && r.po_rank == *expected,
            "{name}: po_rank {} cartan {}",
            r.po_rank,
            r.cartan_dimension
        );
        for seed in 0..5 {
            let s = ok(orders::chief_series_seeded(a, seed), name)?;
            ok(s.verify(a), name)?;
            ensure!(
                s.rank() == *expected,
                "{name}: seed {seed} gives rank {}",
                s.rank()
            );
        }
    }
    let mut pairs = 0;
    for (name, a, _) in &corpus {
        if !a.is_nilpotent() {
            continue;
        }
        let alg = Arc::new(a.clone());
        let series = ok(orders::chief_series(a), name)?;
        for op in [
            CircleOp::product(alg.clone()),
            ok(CircleOp::bch(alg.clone()), "bch")?,
        ] {
            let r = ok(orders::order_monotonicity_check(&op, &series, 500, 3), name)?;
            ensure!(
                r.checked == 500 && r.holds(),
                "{name}: {} violations",
                r.violations.len()
            );
            pairs += 1;
        }
    }
    Ok(format!("po_rank = Cartan dimension on {} algebras (weighted Heisenberg extension: 2 = 2), stable over 5 seeds; 500 triples x {pairs} (algebra, op) pairs monotone", corpus.len()))
}

fn cli_determinism() -> Outcome {
    let mut checked = 0;
    for (name, status, args) in common::CASES {
        let (a, b) = (common::nilalg(args), common::nilalg(args));
        ensure!(
            a.status == *status,
            "{name}: exit {} expected {status}",
            a.status
        );
        ensure!(
            a.stdout == b.stdout && a.status == b.status,
            "{name}: output differs between runs"
        );
        let path = common::golden_dir().join(common::golden_name(name, args));
        let golden =
            std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        ensure!(golden == a.stdout, "{name}: differs from golden");
        checked += 1;
    }
    let verbs: std::collections::BTreeSet<&str> =
        common::CASES.iter().map(|(_, _, a)| a[0]).collect();
    ensure!(verbs.len() == 18, "only {} verbs have goldens", verbs.len());
    Ok(format!(
        "{checked} golden cases over {} verbs, byte-identical across two runs",
        verbs.len()
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("solver soundness", solver_soundness),
        ("implicit-function contract", implicit_contract),
        ("non-nilpotent counterexample", non_nilpotent_counterexample),
        ("BCH", bch_checks),
        ("reconstruction round trip", reconstruction),
        ("commensurator", commensurator_checks),
        ("polynomial-mapping groups", polymap_checks),
        ("filiform", filiform_checks),
        ("orders", orders_checks),
        ("CLI determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let t = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{t:.2}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} [{t:.2}s]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
