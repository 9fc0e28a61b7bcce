//! Exact scalars: the rationals and prime fields GF(p).

use alloc::string::{String, ToString};
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Largest modulus accepted for GF(p). Products of residues fit in `u128`.
pub const MAX_MODULUS: u64 = 1 << 61;

/// The coefficient field of an algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Q,
    Fp(u64),
}

/// An element of ℚ or of GF(p).
///
/// Rationals are kept reduced with a positive denominator (this is what
/// `BigRational` guarantees). Residues lie in `[0, p)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FieldElement {
    Q(BigRational),
    Fp { r: u64, p: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScalarError {
    Malformed(String),
    ZeroDenominator(String),
    NotPrime(u64),
}

impl fmt::Display for ScalarError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarError::Malformed(s) => write!(f, "malformed scalar {s:?}"),
            ScalarError::ZeroDenominator(s) => write!(f, "nonpositive denominator in {s:?}"),
            ScalarError::NotPrime(p) => write!(f, "modulus {p} is not a prime"),
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

impl Field {
    pub fn fp(p: u64) -> Result<Field, ScalarError> {
        if p > MAX_MODULUS || !is_prime(p) {
            return Err(ScalarError::NotPrime(p));
        }
        Ok(Field::Fp(p))
    }

    /// Parses `"Q"` or `"Fp:<p>"`.
    pub fn parse(s: &str) -> Result<Field, ScalarError> {
        if s == "Q" {
            return Ok(Field::Q);
        }
        if let Some(rest) = s.strip_prefix("Fp:") {
            let p: u64 = rest
                .parse()
                .map_err(|_| ScalarError::Malformed(s.to_string()))?;
            return Field::fp(p);
        }
        Err(ScalarError::Malformed(s.to_string()))
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Q => 0,
            Field::Fp(p) => *p,
        }
    }

    /// Number of elements, `None` for ℚ.
    pub fn order(&self) -> Option<u64> {
        match self {
            Field::Q => None,
            Field::Fp(p) => Some(*p),
        }
    }

    pub fn zero(&self) -> FieldElement {
        self.from_i64(0)
    }

    pub fn one(&self) -> FieldElement {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> FieldElement {
        match self {
            Field::Q => FieldElement::Q(BigRational::from_integer(BigInt::from(v))),
            Field::Fp(p) => FieldElement::Fp {
                r: v.rem_euclid(*p as i64) as u64,
                p: *p,
            },
        }
    }

    pub fn from_bigint(&self, v: &BigInt) -> FieldElement {
        match self {
            Field::Q => FieldElement::Q(BigRational::from_integer(v.clone())),
            Field::Fp(p) => {
                let m = BigInt::from(*p);
                let r = v.mod_floor(&m).to_u64().expect("residue fits");
                FieldElement::Fp { r, p: *p }
            }
        }
    }

    /// `num/den`; panics if `den` is zero in the field.
    pub fn ratio(&self, num: i64, den: i64) -> FieldElement {
        self.from_i64(num) * self.from_i64(den).inv().expect("nonzero denominator")
    }

    pub fn from_rational(&self, q: &BigRational) -> Option<FieldElement> {
        match self {
            Field::Q => Some(FieldElement::Q(q.clone())),
            Field::Fp(_) => {
                let n = self.from_bigint(q.numer());
                let d = self.from_bigint(q.denom());
                d.inv().map(|di| n * di)
            }
        }
    }

    /// Parses `"p/q"` or `"p"` into this field.
    pub fn parse_scalar(&self, s: &str) -> Result<FieldElement, ScalarError> {
        let t = s.trim();
        let (num, den) = match t.split_once('/') {
            Some((a, b)) => (a.trim(), Some(b.trim())),
            None => (t, None),
        };
        let n: BigInt = num
            .parse()
            .map_err(|_| ScalarError::Malformed(s.to_string()))?;
        let d: BigInt = match den {
            Some(b) => b
                .parse()
                .map_err(|_| ScalarError::Malformed(s.to_string()))?,
            None => BigInt::one(),
        };
        if !d.is_positive() {
            return Err(ScalarError::ZeroDenominator(s.to_string()));
        }
        self.from_rational(&BigRational::new(n, d))
            .ok_or_else(|| ScalarError::ZeroDenominator(s.to_string()))
    }

    /// All field elements, for finite fields.
    pub fn elements(&self) -> Option<alloc::vec::Vec<FieldElement>> {
        match self {
            Field::Q => None,
            Field::Fp(p) => Some((0..*p).map(|r| FieldElement::Fp { r, p: *p }).collect()),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Q => write!(f, "Q"),
            Field::Fp(p) => write!(f, "Fp:{p}"),
        }
    }
}

fn mismatch() -> ! {
    panic!("field mismatch: scalars from different fields were combined")
}

impl FieldElement {
    pub fn field(&self) -> Field {
        match self {
            FieldElement::Q(_) => Field::Q,
            FieldElement::Fp { p, .. } => Field::Fp(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldElement::Q(q) => q.is_zero(),
            FieldElement::Fp { r, .. } => *r == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            FieldElement::Q(q) => q.is_one(),
            FieldElement::Fp { r, .. } => *r == 1,
        }
    }

    pub fn zero_like(&self) -> FieldElement {
        self.field().zero()
    }

    pub fn one_like(&self) -> FieldElement {
        self.field().one()
    }

    pub fn inv(&self) -> Option<FieldElement> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            FieldElement::Q(q) => FieldElement::Q(q.recip()),
            FieldElement::Fp { r, p } => FieldElement::Fp {
                r: pow_mod(*r, *p - 2, *p),
                p: *p,
            },
        })
    }

    pub fn pow(&self, e: i64) -> FieldElement {
        let base = if e < 0 {
            self.inv().expect("inverse of zero")
        } else {
            self.clone()
        };
        let mut e = e.unsigned_abs();
        let mut acc = self.one_like();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            e >>= 1;
        }
        acc
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            FieldElement::Q(q) => Some(q),
            FieldElement::Fp { .. } => None,
        }
    }

    /// Sign for rationals; residues count as positive when nonzero.
    pub fn signum(&self) -> Ordering {
        match self {
            FieldElement::Q(q) => q.numer().sign().cmp(&num_bigint::Sign::NoSign),
            FieldElement::Fp { r, .. } => r.cmp(&0),
        }
    }

    pub fn is_integer(&self) -> bool {
        match self {
            FieldElement::Q(q) => q.is_integer(),
            FieldElement::Fp { .. } => true,
        }
    }

    pub fn to_integer(&self) -> Option<BigInt> {
        match self {
            FieldElement::Q(q) if q.is_integer() => Some(q.to_integer()),
            FieldElement::Q(_) => None,
            FieldElement::Fp { r, .. } => Some(BigInt::from(*r)),
        }
    }

    /// Rational number of the element, reading residues as integers in `[0, p)`.
    pub fn to_rational(&self) -> BigRational {
        match self {
            FieldElement::Q(q) => q.clone(),
            FieldElement::Fp { r, .. } => BigRational::from_integer(BigInt::from(*r)),
        }
    }

    /// Absolute value of a rational.
    pub fn abs(&self) -> FieldElement {
        match self {
            FieldElement::Q(q) => FieldElement::Q(q.abs()),
            other => other.clone(),
        }
    }
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc: u64 = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    acc
}

#[inline]
fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElement::Q(q) => {
                if q.is_integer() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            FieldElement::Fp { r, .. } => write!(f, "{r}"),
        }
    }
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Numeric order on ℚ, residue order on GF(p). Only meaningful as a total
/// order for canonical sorting when the field is finite.
impl Ord for FieldElement {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (FieldElement::Q(a), FieldElement::Q(b)) => a.cmp(b),
            (FieldElement::Fp { r: a, p: pa }, FieldElement::Fp { r: b, p: pb }) => {
                pa.cmp(pb).then(a.cmp(b))
            }
            (FieldElement::Q(_), FieldElement::Fp { .. }) => Ordering::Less,
            (FieldElement::Fp { .. }, FieldElement::Q(_)) => Ordering::Greater,
        }
    }
}

impl<'a> Add<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        match (self, rhs) {
            (FieldElement::Q(a), FieldElement::Q(b)) => FieldElement::Q(a + b),
            (FieldElement::Fp { r: a, p }, FieldElement::Fp { r: b, p: q }) if p == q => {
                let s = a + b;
                FieldElement::Fp {
                    r: if s >= *p { s - p } else { s },
                    p: *p,
                }
            }
            _ => mismatch(),
        }
    }
}

impl<'a> Sub<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        match (self, rhs) {
            (FieldElement::Q(a), FieldElement::Q(b)) => FieldElement::Q(a - b),
            (FieldElement::Fp { r: a, p }, FieldElement::Fp { r: b, p: q }) if p == q => {
                FieldElement::Fp {
                    r: if a >= b { a - b } else { a + p - b },
                    p: *p,
                }
            }
            _ => mismatch(),
        }
    }
}

impl<'a> Mul<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        match (self, rhs) {
            (FieldElement::Q(a), FieldElement::Q(b)) => FieldElement::Q(a * b),
            (FieldElement::Fp { r: a, p }, FieldElement::Fp { r: b, p: q }) if p == q => {
                FieldElement::Fp {
                    r: mul_mod(*a, *b, *p),
                    p: *p,
                }
            }
            _ => mismatch(),
        }
    }
}

impl<'a> Div<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &FieldElement) -> FieldElement {
        self * &rhs.inv().expect("division by zero")
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        match self {
            FieldElement::Q(a) => FieldElement::Q(-a),
            FieldElement::Fp { r, p } => FieldElement::Fp {
                r: if *r == 0 { 0 } else { p - r },
                p: *p,
            },
        }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: FieldElement) -> FieldElement {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: &FieldElement) -> FieldElement {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<FieldElement> for &'a FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: FieldElement) -> FieldElement {
                self.$m(&rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);
owned_binop!(Div, div);

impl AddAssign<&FieldElement> for FieldElement {
    fn add_assign(&mut self, rhs: &FieldElement) {
        match (&mut *self, rhs) {
            (FieldElement::Q(a), FieldElement::Q(b)) => *a += b,
            _ => *self = &*self + rhs,
        }
    }
}

impl SubAssign<&FieldElement> for FieldElement {
    fn sub_assign(&mut self, rhs: &FieldElement) {
        match (&mut *self, rhs) {
            (FieldElement::Q(a), FieldElement::Q(b)) => *a -= b,
            _ => *self = &*self - rhs,
        }
    }
}

impl MulAssign<&FieldElement> for FieldElement {
    fn mul_assign(&mut self, rhs: &FieldElement) {
        *self = &*self * rhs;
    }
}
