//! Truncated free algebras in five varieties with explicit monomial bases.
//!
//! The Lie variety uses the Lyndon basis: each Lyndon word `w` with standard
//! factorization `w = uv` gives the basis element `[P(u), P(v)]`, realized
//! inside the truncated free associative algebra. Products are rewritten by
//! peeling off the lexicographically smallest word, which is always the
//! leading word of a unique basis element.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::algebra::{Algebra, Flags, Table};
use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::linalg::Vector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variety {
    Nonassociative,
    Commutative,
    Anticommutative,
    Lie,
    Associative,
}

impl Variety {
    pub fn parse(s: &str) -> Result<Variety> {
        match s {
            "nonassociative" => Ok(Variety::Nonassociative),
            "commutative" => Ok(Variety::Commutative),
            "anticommutative" => Ok(Variety::Anticommutative),
            "lie" | "Lie" => Ok(Variety::Lie),
            "associative" => Ok(Variety::Associative),
            other => Err(Error::UnsupportedVariety(String::from(other))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Variety::Nonassociative => "nonassociative",
            Variety::Commutative => "commutative",
            Variety::Anticommutative => "anticommutative",
            Variety::Lie => "lie",
            Variety::Associative => "associative",
        }
    }

    /// Whether `x^2 = 0` holds in the variety.
    pub fn is_anticommutative(&self) -> bool {
        matches!(self, Variety::Anticommutative | Variety::Lie)
    }
}

impl fmt::Display for Variety {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A binary product tree over generator indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Tree {
    Leaf(usize),
    Node(Box<Tree>, Box<Tree>),
}

impl Tree {
    pub fn node(l: Tree, r: Tree) -> Tree {
        Tree::Node(Box::new(l), Box::new(r))
    }

    pub fn degree(&self) -> usize {
        match self {
            Tree::Leaf(_) => 1,
            Tree::Node(l, r) => l.degree() + r.degree(),
        }
    }

    fn shape(&self, out: &mut Vec<bool>) {
        match self {
            Tree::Leaf(_) => out.push(false),
            Tree::Node(l, r) => {
                out.push(true);
                l.shape(out);
                r.shape(out);
            }
        }
    }

    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<usize>) {
        match self {
            Tree::Leaf(i) => out.push(*i),
            Tree::Node(l, r) => {
                l.collect_leaves(out);
                r.collect_leaves(out);
            }
        }
    }

    pub fn label(&self, names: &[String]) -> String {
        match self {
            Tree::Leaf(i) => names[*i].clone(),
            Tree::Node(l, r) => format!("{}*{}", l.wrapped(names), r.wrapped(names)),
        }
    }

    fn wrapped(&self, names: &[String]) -> String {
        match self {
            Tree::Leaf(_) => self.label(names),
            Tree::Node(..) => format!("({})", self.label(names)),
        }
    }

    pub fn bracket_label(&self, names: &[String]) -> String {
        match self {
            Tree::Leaf(i) => names[*i].clone(),
            Tree::Node(l, r) => format!("[{},{}]", l.bracket_label(names), r.bracket_label(names)),
        }
    }

    /// Evaluates the product tree in `alg` with leaf `i` sent to `images[i]`.
    pub fn evaluate(&self, alg: &Algebra, images: &[Vector]) -> Vector {
        match self {
            Tree::Leaf(i) => images[*i].clone(),
            Tree::Node(l, r) => alg.mul_vec(&l.evaluate(alg, images), &r.evaluate(alg, images)),
        }
    }
}

/// Order by degree, then shape code, then leaf labels.
impl Ord for Tree {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let (mut a, mut b) = (Vec::new(), Vec::new());
            self.shape(&mut a);
            other.shape(&mut b);
            a.cmp(&b).then_with(|| self.leaves().cmp(&other.leaves()))
        })
    }
}

impl PartialOrd for Tree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A word in the generators, as a linear combination key.
pub type Word = Vec<usize>;
/// A linear combination of words.
pub type WordPoly = BTreeMap<Word, FieldElement>;

/// A truncated free algebra with its monomial basis.
#[derive(Clone, Debug)]
pub struct FreeNilpotentAlgebra {
    pub algebra: Algebra,
    pub generators: Vec<String>,
    pub class: usize,
    pub variety: Variety,
    /// Product tree of each basis element.
    pub trees: Vec<Tree>,
    pub degrees: Vec<usize>,
    /// For basis elements of degree at least 2, basis indices `(u, v)` with
    /// `e = e_u e_v` exactly.
    pub splits: Vec<Option<(usize, usize)>>,
    /// Associative words (associative variety) or the expansions `P(w)` of
    /// the Lie basis; empty otherwise.
    pub word_forms: Vec<WordPoly>,
}

impl FreeNilpotentAlgebra {
    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    /// Index of the basis element of the `i`-th generator.
    pub fn generator(&self, i: usize) -> usize {
        i
    }

    pub fn generator_element(&self, i: usize) -> Vector {
        crate::linalg::unit(self.algebra.field(), self.dim(), i)
    }

    /// Basis indices of a given degree.
    pub fn degree_indices(&self, d: usize) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.degrees[i] == d).collect()
    }
}

/// Builds the free nilpotent algebra of class `c` on the given generators.
pub fn free_nilpotent(
    field: Field,
    generators: &[&str],
    c: usize,
    variety: Variety,
) -> Result<FreeNilpotentAlgebra> {
    if generators.is_empty() || c == 0 {
        return Err(Error::InvalidInput(String::from(
            "need at least one generator and class >= 1",
        )));
    }
    let gens: Vec<String> = generators.iter().map(|s| String::from(*s)).collect();
    match variety {
        Variety::Nonassociative | Variety::Commutative | Variety::Anticommutative => {
            tree_variety(field, gens, c, variety)
        }
        Variety::Associative => associative(field, gens, c),
        Variety::Lie => lie(field, gens, c),
    }
}

fn tree_variety(
    field: Field,
    gens: Vec<String>,
    c: usize,
    variety: Variety,
) -> Result<FreeNilpotentAlgebra> {
    let k = gens.len();
    let mut by_degree: Vec<Vec<Tree>> = Vec::new();
    by_degree.push(Vec::new());
    by_degree.push((0..k).map(Tree::Leaf).collect());
    for n in 2..=c {
        let mut level = Vec::new();
        for i in 1..n {
            for l in &by_degree[i] {
                for r in &by_degree[n - i] {
                    let ok = match variety {
                        Variety::Nonassociative => true,
                        Variety::Commutative => l <= r,
                        _ => l < r,
                    };
                    if ok {
                        level.push(Tree::node(l.clone(), r.clone()));
                    }
                }
            }
        }
        level.sort();
        by_degree.push(level);
    }
    let trees: Vec<Tree> = by_degree.into_iter().flatten().collect();
    let index: BTreeMap<Tree, usize> = trees
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, t)| (t, i))
        .collect();
    let degrees: Vec<usize> = trees.iter().map(|t| t.degree()).collect();
    let mut table = Table::new();
    let mut splits = alloc::vec![None; trees.len()];
    for (i, a) in trees.iter().enumerate() {
        for (j, b) in trees.iter().enumerate() {
            if degrees[i] + degrees[j] > c {
                continue;
            }
            let (t, sign) = match variety {
                Variety::Nonassociative => (Tree::node(a.clone(), b.clone()), 1),
                Variety::Commutative => {
                    if a <= b {
                        (Tree::node(a.clone(), b.clone()), 1)
                    } else {
                        (Tree::node(b.clone(), a.clone()), 1)
                    }
                }
                _ => match a.cmp(b) {
                    Ordering::Less => (Tree::node(a.clone(), b.clone()), 1),
                    Ordering::Greater => (Tree::node(b.clone(), a.clone()), -1),
                    Ordering::Equal => continue,
                },
            };
            let target = index[&t];
            table.insert((i, j), alloc::vec![(target, field.from_i64(sign))]);
            if sign == 1 && (variety == Variety::Nonassociative || a <= b) {
                splits[target].get_or_insert((i, j));
            }
        }
    }
    let flags = match variety {
        Variety::Commutative => Flags {
            commutative: true,
            ..Flags::NONE
        },
        Variety::Anticommutative => Flags {
            anticommutative: true,
            ..Flags::NONE
        },
        _ => Flags::NONE,
    };
    let names: Vec<String> = trees.iter().map(|t| t.label(&gens)).collect();
    let algebra = Algebra::graded(field, names, table, flags, &degrees)?;
    Ok(FreeNilpotentAlgebra {
        algebra,
        generators: gens,
        class: c,
        variety,
        trees,
        degrees,
        splits,
        word_forms: Vec::new(),
    })
}

fn all_words(k: usize, c: usize) -> Vec<Word> {
    let mut out: Vec<Word> = Vec::new();
    let mut level: Vec<Word> = (0..k).map(|i| alloc::vec![i]).collect();
    for _ in 1..=c {
        out.extend(level.iter().cloned());
        let mut next = Vec::new();
        for w in &level {
            for i in 0..k {
                let mut v = w.clone();
                v.push(i);
                next.push(v);
            }
        }
        level = next;
    }
    out
}

fn right_comb(w: &[usize]) -> Tree {
    if w.len() == 1 {
        Tree::Leaf(w[0])
    } else {
        Tree::node(Tree::Leaf(w[0]), right_comb(&w[1..]))
    }
}

fn associative(field: Field, gens: Vec<String>, c: usize) -> Result<FreeNilpotentAlgebra> {
    let words = all_words(gens.len(), c);
    let index: BTreeMap<Word, usize> = words
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, w)| (w, i))
        .collect();
    let degrees: Vec<usize> = words.iter().map(|w| w.len()).collect();
    let mut table = Table::new();
    let mut splits = alloc::vec![None; words.len()];
    for (i, a) in words.iter().enumerate() {
        for (j, b) in words.iter().enumerate() {
            if a.len() + b.len() > c {
                continue;
            }
            let mut w = a.clone();
            w.extend(b.iter().copied());
            let t = index[&w];
            table.insert((i, j), alloc::vec![(t, field.one())]);
            if a.len() == 1 {
                splits[t] = Some((i, j));
            }
        }
    }
    let names: Vec<String> = words.iter().map(|w| word_label(w, &gens)).collect();
    let trees = words.iter().map(|w| right_comb(w)).collect();
    let word_forms = words
        .iter()
        .map(|w| WordPoly::from([(w.clone(), field.one())]))
        .collect();
    let flags = Flags {
        associative: true,
        ..Flags::NONE
    };
    let algebra = Algebra::graded(field, names, table, flags, &degrees)?;
    Ok(FreeNilpotentAlgebra {
        algebra,
        generators: gens,
        class: c,
        variety: Variety::Associative,
        trees,
        degrees,
        splits,
        word_forms,
    })
}

fn word_label(w: &[usize], gens: &[String]) -> String {
    let parts: Vec<&str> = w.iter().map(|&i| gens[i].as_str()).collect();
    parts.join("*")
}

/// Lyndon words of length at most `c` over `k` letters, by Duval's algorithm,
/// in lexicographic order.
pub fn lyndon_words(k: usize, c: usize) -> Vec<Word> {
    let mut out = Vec::new();
    if k == 0 {
        return out;
    }
    let mut w: Vec<usize> = alloc::vec![0];
    loop {
        out.push(w.clone());
        let m = w.len();
        while w.len() < c {
            let x = w[w.len() - m];
            w.push(x);
        }
        while let Some(&last) = w.last() {
            if last == k - 1 {
                w.pop();
            } else {
                break;
            }
        }
        match w.last_mut() {
            None => break,
            Some(l) => *l += 1,
        }
    }
    out
}

/// Standard factorization `w = uv` with `v` the longest proper Lyndon suffix.
fn standard_factorization(w: &[usize], lyndon: &BTreeMap<Word, usize>) -> (Word, Word) {
    for s in 1..w.len() {
        if lyndon.contains_key(&w[s..].to_vec()) {
            return (w[..s].to_vec(), w[s..].to_vec());
        }
    }
    unreachable!("Lyndon word of length >= 2 has a proper Lyndon suffix")
}

pub fn poly_mul(a: &WordPoly, b: &WordPoly, c: usize) -> WordPoly {
    let mut out = WordPoly::new();
    for (u, x) in a {
        for (v, y) in b {
            if u.len() + v.len() > c {
                continue;
            }
            let mut w = u.clone();
            w.extend(v.iter().copied());
            let e = out.entry(w).or_insert_with(|| x.zero_like());
            *e += &(x * y);
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

pub fn poly_add_scaled(acc: &mut WordPoly, s: &FieldElement, p: &WordPoly) {
    for (w, x) in p {
        let e = acc.entry(w.clone()).or_insert_with(|| x.zero_like());
        *e += &(s * x);
    }
    acc.retain(|_, v| !v.is_zero());
}

fn lie(field: Field, gens: Vec<String>, c: usize) -> Result<FreeNilpotentAlgebra> {
    let k = gens.len();
    let mut lw = lyndon_words(k, c);
    lw.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    let index: BTreeMap<Word, usize> = lw
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, w)| (w, i))
        .collect();
    let mut trees: Vec<Tree> = Vec::new();
    let mut polys: Vec<WordPoly> = Vec::new();
    let mut splits = Vec::new();
    for w in &lw {
        if w.len() == 1 {
            trees.push(Tree::Leaf(w[0]));
            polys.push(WordPoly::from([(w.clone(), field.one())]));
            splits.push(None);
        } else {
            let (u, v) = standard_factorization(w, &index);
            let (iu, iv) = (index[&u], index[&v]);
            trees.push(Tree::node(trees[iu].clone(), trees[iv].clone()));
            let mut p = poly_mul(&polys[iu], &polys[iv], c);
            poly_add_scaled(
                &mut p,
                &field.from_i64(-1),
                &poly_mul(&polys[iv], &polys[iu], c),
            );
            polys.push(p);
            splits.push(Some((iu, iv)));
        }
    }
    let degrees: Vec<usize> = lw.iter().map(|w| w.len()).collect();
    let mut table = Table::new();
    for i in 0..lw.len() {
        for j in 0..lw.len() {
            if i == j || degrees[i] + degrees[j] > c {
                continue;
            }
            let mut p = poly_mul(&polys[i], &polys[j], c);
            poly_add_scaled(
                &mut p,
                &field.from_i64(-1),
                &poly_mul(&polys[j], &polys[i], c),
            );
            let coords = decompose_lie(&p, &polys, &index)?;
            let entries: Vec<(usize, FieldElement)> = coords.into_iter().collect();
            if !entries.is_empty() {
                table.insert((i, j), entries);
            }
        }
    }
    let names: Vec<String> = trees.iter().map(|t| t.bracket_label(&gens)).collect();
    let algebra = Algebra::graded(field, names, table, Flags::lie(), &degrees)?;
    Ok(FreeNilpotentAlgebra {
        algebra,
        generators: gens,
        class: c,
        variety: Variety::Lie,
        trees,
        degrees,
        splits,
        word_forms: polys,
    })
}

/// Coordinates of a Lie polynomial in the Lyndon basis.
fn decompose_lie(
    p: &WordPoly,
    polys: &[WordPoly],
    index: &BTreeMap<Word, usize>,
) -> Result<BTreeMap<usize, FieldElement>> {
    let mut rest = p.clone();
    let mut out = BTreeMap::new();
    while let Some((w, x)) = rest.iter().next().map(|(w, x)| (w.clone(), x.clone())) {
        let Some(&i) = index.get(&w) else {
            return Err(Error::CheckFailed(String::from(
                "non-Lie polynomial in Lyndon decomposition",
            )));
        };
        poly_add_scaled(&mut rest, &(-&x), &polys[i]);
        out.insert(i, x);
    }
    Ok(out)
}

/// Expands an element of a free Lie or associative algebra into words.
pub fn to_words(f: &FreeNilpotentAlgebra, v: &[FieldElement]) -> WordPoly {
    let mut out = WordPoly::new();
    for (i, x) in v.iter().enumerate() {
        if !x.is_zero() {
            poly_add_scaled(&mut out, x, &f.word_forms[i]);
        }
    }
    out
}

/// Catalan number `C_n`.
pub fn catalan(n: usize) -> u128 {
    let mut c: u128 = 1;
    for i in 0..n {
        c = c * 2 * (2 * i as u128 + 1) / (i as u128 + 2);
    }
    c
}
