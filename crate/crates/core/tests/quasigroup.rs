use std::collections::BTreeMap;
use std::sync::Arc;

use nilalg::algebra::{abelian, heisenberg};
use nilalg::free::{free_nilpotent, Tree, Variety};
use nilalg::linalg::{self, Vector};
use nilalg::polyfun::PolyFunction;
use nilalg::quasigroup::*;
use nilalg::sample::{random_nilpotent, Sampler};
use nilalg::Field;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

type Poly = BTreeMap<Vec<usize>, BigRational>;

fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn add_scaled(acc: &mut Poly, s: &BigRational, p: &Poly) {
    for (w, x) in p {
        *acc.entry(w.clone()).or_insert_with(BigRational::zero) += s * x;
    }
    acc.retain(|_, x| !x.is_zero());
}

fn mul(a: &Poly, b: &Poly, c: usize) -> Poly {
    let mut out = Poly::new();
    for (u, x) in a {
        for (v, y) in b {
            if u.len() + v.len() <= c {
                let w: Vec<usize> = u.iter().chain(v).copied().collect();
                *out.entry(w).or_insert_with(BigRational::zero) += x * y;
            }
        }
    }
    out.retain(|_, x| !x.is_zero());
    out
}

fn letter(i: usize) -> Poly {
    Poly::from([(vec![i], BigRational::one())])
}

fn exp(x: &Poly, c: usize) -> Poly {
    let mut out = Poly::from([(vec![], BigRational::one())]);
    let mut term = out.clone();
    for k in 1..=c {
        term = mul(&term, x, c);
        let fact: i64 = (1..=k as i64).product();
        add_scaled(&mut out, &r(1, fact), &term);
    }
    out
}

fn log1p(z: &Poly, c: usize) -> Poly {
    let mut out = Poly::new();
    let mut term = Poly::from([(vec![], BigRational::one())]);
    for k in 1..=c {
        term = mul(&term, z, c);
        let sign = if k % 2 == 1 { 1 } else { -1 };
        add_scaled(&mut out, &r(sign, k as i64), &term);
    }
    out
}

/// log(exp x · exp y) in the free associative algebra on two letters.
fn bch_oracle(c: usize) -> Poly {
    let mut p = mul(&exp(&letter(0), c), &exp(&letter(1), c), c);
    p.remove(&vec![]);
    log1p(&p, c)
}

fn expand(t: &Tree, c: usize) -> Poly {
    match t {
        Tree::Leaf(i) => letter(*i),
        Tree::Node(a, b) => {
            let (a, b) = (expand(a, c), expand(b, c));
            let mut p = mul(&a, &b, c);
            add_scaled(&mut p, &r(-1, 1), &mul(&b, &a, c));
            p
        }
    }
}

#[test]
fn dynkin_matches_associative_oracle() {
    for c in 1..=5 {
        let (free, z) = bch_lie_coordinates(c).unwrap();
        let mut lie = Poly::new();
        for (i, x) in z.iter().enumerate() {
            add_scaled(&mut lie, &x.to_rational(), &expand(&free.trees[i], c));
        }
        assert_eq!(lie, bch_oracle(c), "class {c}");
    }
}

#[test]
fn bch_low_degree_terms() {
    let free = free_nilpotent(Field::Q, &["x", "y"], 3, Variety::Lie).unwrap();
    let alg = Arc::new(free.algebra.clone());
    let z = nilalg::quasigroup::bch_polyfunction(alg.clone()).unwrap();
    let (x, y) = (
        PolyFunction::var(alg.clone(), 2, 0),
        PolyFunction::var(alg.clone(), 2, 1),
    );
    let two = x
        .add(&y)
        .unwrap()
        .add(&x.mul(&y).unwrap().scale(&Field::Q.ratio(1, 2)))
        .unwrap();
    assert_eq!(z.truncate(2), two);
    let (ex, ey) = (free.generator_element(0), free.generator_element(1));
    let v = bch(&alg, &ex, &ey).unwrap();
    let xy = alg.mul_vec(&ex, &ey);
    // (x,(x,y)) has coefficient 1/12, (y,(x,y)) has -1/12.
    let xxy = alg.mul_vec(&ex, &xy);
    let yxy = alg.mul_vec(&ey, &xy);
    let mut expected = linalg::add_vec(&ex, &ey);
    linalg::axpy(&mut expected, &Field::Q.ratio(1, 2), &xy);
    linalg::axpy(&mut expected, &Field::Q.ratio(1, 12), &xxy);
    linalg::axpy(&mut expected, &Field::Q.ratio(-1, 12), &yxy);
    assert_eq!(v, expected);
    let neg: Vector = ex.iter().map(|a| -a).collect();
    assert!(linalg::is_zero_vec(&bch(&alg, &ex, &neg).unwrap()));
}

#[test]
fn bch_requires_lie_over_q() {
    let h5 = Arc::new(heisenberg(Field::Fp(5)));
    assert_eq!(
        CircleOp::bch(h5).unwrap_err().code(),
        "PositiveCharacteristic"
    );
    let mut s = Sampler::new(1);
    let a = Arc::new(random_nilpotent(&mut s, Field::Q, 4, 2).unwrap());
    assert_eq!(CircleOp::bch(a).unwrap_err().code(), "NotLie");
}

#[test]
fn bch_is_associative_on_free_lie_algebras() {
    let mut s = Sampler::new(8);
    for c in 2..=5 {
        let free = free_nilpotent(Field::Q, &["x", "y", "z"], c, Variety::Lie).unwrap();
        let alg = Arc::new(free.algebra);
        let op = CircleOp::bch(alg.clone()).unwrap();
        let n = if c <= 4 { 40 } else { 10 };
        for _ in 0..n {
            let (a, b, d) = (
                s.fraction_vector(Field::Q, alg.dim(), 3),
                s.fraction_vector(Field::Q, alg.dim(), 3),
                s.fraction_vector(Field::Q, alg.dim(), 3),
            );
            let left = op.circle(&op.circle(&a, &b).unwrap(), &d).unwrap();
            let right = op.circle(&a, &op.circle(&b, &d).unwrap()).unwrap();
            assert_eq!(left, right, "class {c}");
        }
    }
}

#[test]
fn neutral_element_and_divisions() {
    let h = Arc::new(heisenberg(Field::Q));
    let mut s = Sampler::new(4);
    let prod = CircleOp::product(h.clone());
    let group = CircleOp::bch(h.clone()).unwrap();
    let zero = linalg::zeros(Field::Q, 3);
    for _ in 0..20 {
        let (a, b, c) = (
            s.fraction_vector(Field::Q, 3, 4),
            s.fraction_vector(Field::Q, 3, 4),
            s.fraction_vector(Field::Q, 3, 4),
        );
        for op in [&prod, &group] {
            assert_eq!(op.circle(&a, &zero).unwrap(), a);
            assert_eq!(op.left_divide(&a, &op.circle(&a, &b).unwrap()).unwrap(), b);
            assert_eq!(op.right_divide(&zero, &c).unwrap(), c);
            assert_eq!(op.circle(&a, &op.left_divide(&a, &c).unwrap()).unwrap(), c);
            assert_eq!(op.circle(&op.right_divide(&b, &c).unwrap(), &b).unwrap(), c);
        }
        let neg: Vector = a.iter().map(|x| -x).collect();
        assert_eq!(
            group.left_divide(&a, &c).unwrap(),
            group.circle(&neg, &c).unwrap()
        );
    }
}

#[test]
fn multiples_compose_additively() {
    let h = Arc::new(heisenberg(Field::Q));
    let op = CircleOp::from_quadratic(
        h.clone(),
        Field::Q.ratio(3, 2),
        Field::Q.ratio(-1, 5),
        Field::Q.zero(),
        Field::Q.zero(),
    );
    let a: Vector = [2, -1, 7].iter().map(|&x| Field::Q.from_i64(x)).collect();
    for n in -3i64..=3 {
        for m in -3i64..=3 {
            let na = linalg::scale_vec(&Field::Q.from_i64(n), &a);
            let ma = linalg::scale_vec(&Field::Q.from_i64(m), &a);
            assert_eq!(
                op.circle(&na, &ma).unwrap(),
                linalg::scale_vec(&Field::Q.from_i64(n + m), &a)
            );
        }
    }
    assert_eq!(op.rational_power(&a, &Field::Q.one()).unwrap(), a);
    assert_eq!(
        op.rational_power(&a, &Field::Q.from_i64(2)).unwrap(),
        op.circle(&a, &a).unwrap()
    );
    let half = op.rational_power(&a, &Field::Q.ratio(1, 2)).unwrap();
    assert_eq!(op.circle(&half, &half).unwrap(), a);
    // a^{2/3} solves x^3 = a^2.
    let x = op.rational_power(&a, &Field::Q.ratio(2, 3)).unwrap();
    assert_eq!(op.power(&x, 3).unwrap(), op.power(&a, 2).unwrap());
}

#[test]
fn heisenberg_product_loop_identities() {
    let op = CircleOp::product(Arc::new(heisenberg(Field::Q)));
    let reports = check_identities(&op, 200, 12).unwrap();
    let get = |n: &str| reports.iter().find(|r| r.name == n).unwrap();
    for name in [
        "neutral",
        "left-division",
        "right-division",
        "flexibility",
        "commutator",
    ] {
        assert!(get(name).holds(), "{name}");
        assert_eq!(get(name).checked, 200);
    }
    // In class 2, (ab)c = 0, so a + b + ab is even a group law.
    assert!(get("associativity").holds());
}

#[test]
fn exhaustive_search_finds_nonassociative_triple() {
    // On <x, x²> over GF(3), a∘b = a + b + ab + a² has associator a² + ab + ba.
    let alg = Arc::new(
        free_nilpotent(Field::Fp(3), &["x"], 2, Variety::Nonassociative)
            .unwrap()
            .algebra,
    );
    let op = CircleOp::from_quadratic(
        alg.clone(),
        Field::Fp(3).one(),
        Field::Fp(3).zero(),
        Field::Fp(3).one(),
        Field::Fp(3).zero(),
    );
    let reports = check_identities_exhaustive(&op, 100).unwrap();
    let assoc = reports.iter().find(|r| r.name == "associativity").unwrap();
    let t = assoc.counterexample.clone().expect("a counterexample");
    assert_ne!(
        op.circle(&op.circle(&t[0], &t[1]).unwrap(), &t[2]).unwrap(),
        op.circle(&t[0], &op.circle(&t[1], &t[2]).unwrap()).unwrap()
    );
}

#[test]
fn klein_four_group() {
    // <a, b | a² = b² = 0> over GF(2).
    let alg = nilalg::Algebra::new(
        Field::Fp(2),
        vec!["a".into(), "b".into(), "ab".into()],
        nilalg::algebra::table_from_ints(Field::Fp(2), &[(0, 1, &[(2, 1)]), (1, 0, &[(2, 1)])]),
        nilalg::Flags {
            commutative: true,
            ..Default::default()
        },
    )
    .unwrap();
    let op = CircleOp::product(Arc::new(alg));
    let one = Field::Fp(2).one();
    let zero = Field::Fp(2).zero();
    let a = vec![one.clone(), zero.clone(), zero.clone()];
    let b = vec![zero.clone(), one.clone(), zero.clone()];
    let set = op
        .closure(&[linalg::zeros(Field::Fp(2), 3), a.clone(), b.clone()])
        .unwrap();
    let abab = vec![one.clone(), one.clone(), one.clone()];
    assert_eq!(set.len(), 4);
    assert!(set.contains(&abab));
    for x in &set {
        assert!(linalg::is_zero_vec(&op.circle(x, x).unwrap()));
    }
}

fn element(d: usize) -> impl Strategy<Value = Vector> {
    proptest::collection::vec((-4i64..=4, 1i64..=3), d)
        .prop_map(|v| v.into_iter().map(|(n, m)| Field::Q.ratio(n, m)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn subalgebra_is_a_subquasigroup(x in -5i64..=5, y in -5i64..=5, u in -5i64..=5, w in -5i64..=5) {
        // <e2, e3> is an abelian subalgebra of Heisenberg.
        let op = CircleOp::product(Arc::new(heisenberg(Field::Q)));
        let q = |n: i64| Field::Q.from_i64(n);
        let c = op.circle(&[q(0), q(x), q(y)], &[q(0), q(u), q(w)]).unwrap();
        prop_assert!(c[0].is_zero());
    }

    #[test]
    fn homomorphisms_commute_with_circle(a in element(3), b in element(3), s in -3i64..=3, t in -3i64..=3) {
        // e1 -> s e1, e2 -> t e2, e3 -> st e3 is an endomorphism of Heisenberg.
        let h = Arc::new(heisenberg(Field::Q));
        let op = CircleOp::bch(h).unwrap();
        let phi = |v: &Vector| -> Vector {
            vec![&v[0] * &Field::Q.from_i64(s), &v[1] * &Field::Q.from_i64(t), &v[2] * &Field::Q.from_i64(s * t)]
        };
        prop_assert_eq!(phi(&op.circle(&a, &b).unwrap()), op.circle(&phi(&a), &phi(&b)).unwrap());
    }

    #[test]
    fn top_power_is_central_under_circle(a in element(3), z in -5i64..=5) {
        let h = Arc::new(heisenberg(Field::Q));
        let op = CircleOp::product(h);
        let c: Vector = vec![Field::Q.zero(), Field::Q.zero(), Field::Q.from_i64(z)];
        prop_assert_eq!(op.circle(&a, &c).unwrap(), op.circle(&c, &a).unwrap());
        prop_assert_eq!(op.circle(&a, &c).unwrap(), linalg::add_vec(&a, &c));
    }

    #[test]
    fn zero_multiplication_circle_is_addition(a in element(2), b in element(2)) {
        let op = CircleOp::product(Arc::new(abelian(Field::Q, 2)));
        prop_assert_eq!(op.circle(&a, &b).unwrap(), linalg::add_vec(&a, &b));
    }
}
