//! Coefficient rings: principal ideal rings with canonical associates.

use std::fmt::{self, Debug};
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Output of the extended gcd step.
///
/// `s*a + t*b = g` and `u*a + v*b = 0`, with `s*v - t*u` a unit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gcdex<E> {
    pub g: E,
    pub s: E,
    pub t: E,
    pub u: E,
    pub v: E,
}

/// Coefficient domain tag, as it appears in interchange documents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "modulus", rename_all = "kebab-case")]
pub enum CoefficientDomain {
    Rationals,
    Integers,
    PrimeField(u64),
    ResidueRing(u64),
}

impl CoefficientDomain {
    /// Parses `q`, `z`, `fp:<p>` or `zm:<m>`.
    pub fn parse(s: &str) -> Result<Self, String> {
        let s = s.trim();
        match s {
            "q" | "Q" => return Ok(Self::Rationals),
            "z" | "Z" => return Ok(Self::Integers),
            _ => {}
        }
        let (kind, m) = s.split_once(':').ok_or_else(|| {
            format!("unrecognised domain `{s}` (expected q, z, fp:<p> or zm:<m>)")
        })?;
        let m: u64 = m
            .parse()
            .map_err(|_| format!("modulus in `{s}` is not a positive integer"))?;
        match kind {
            "fp" => {
                if !is_prime(m) {
                    return Err(format!("fp:{m} requires a prime modulus"));
                }
                Ok(Self::PrimeField(m))
            }
            "zm" => {
                if m < 2 {
                    return Err(format!("zm:{m} requires modulus at least 2"));
                }
                Ok(Self::ResidueRing(m))
            }
            _ => Err(format!("unrecognised domain kind `{kind}`")),
        }
    }

    pub fn modulus(&self) -> Option<u64> {
        match *self {
            Self::PrimeField(p) => Some(p),
            Self::ResidueRing(m) => Some(m),
            _ => None,
        }
    }
}

impl fmt::Display for CoefficientDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Rationals => write!(f, "q"),
            Self::Integers => write!(f, "z"),
            Self::PrimeField(p) => write!(f, "fp:{p}"),
            Self::ResidueRing(m) => write!(f, "zm:{m}"),
        }
    }
}

/// A commutative principal ideal ring with computable canonical forms.
pub trait Ring: Clone + Debug + PartialEq + Eq + Hash + Send + Sync + 'static {
    type Elem: Clone + Debug + PartialEq + Eq + Hash + Ord + Send + Sync + 'static;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn is_unit(&self, a: &Self::Elem) -> bool;
    fn inverse(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn is_field(&self) -> bool;
    fn gcdex(&self, a: &Self::Elem, b: &Self::Elem) -> Gcdex<Self::Elem>;
    /// Canonical associate `c` of `a` and a unit `u` with `u*a = c`.
    fn normalize(&self, a: &Self::Elem) -> (Self::Elem, Self::Elem);
    /// Generator of the annihilator ideal of `a`.
    fn annihilator(&self, a: &Self::Elem) -> Self::Elem;
    /// `(q, r)` with `b = q*a + r` and `r` the canonical residue of `b` modulo `(a)`.
    fn div_rem(&self, b: &Self::Elem, a: &Self::Elem) -> (Self::Elem, Self::Elem);
    fn domain(&self) -> CoefficientDomain;
    /// Every element, for finite rings.
    fn elements(&self) -> Option<Vec<Self::Elem>>;
    fn size(&self) -> Option<u64>;
    fn random<G: Rng + ?Sized>(&self, rng: &mut G) -> Self::Elem;
    fn to_json(&self, a: &Self::Elem) -> Value;
    fn from_json(&self, v: &Value) -> Result<Self::Elem, String>;
    fn render(&self, a: &Self::Elem) -> String;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn reduce(&self, x: &Self::Elem, modulus: &Self::Elem) -> Self::Elem {
        self.div_rem(x, modulus).1
    }

    fn divides(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        self.is_zero(&self.div_rem(b, a).1)
    }

    /// Generator of the ideal `{x : a*x ∈ (b)}`.
    fn colon(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        if self.is_zero(b) {
            return self.annihilator(a);
        }
        let big_b = self.normalize(b).0;
        let g = self.normalize(&self.gcdex(a, &big_b).g).0;
        self.div_rem(&big_b, &g).0
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn egcd_i128(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// `Z/m` with canonical residues in `[0, m)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ResidueRing {
    m: u64,
    field: bool,
    tagged_field: bool,
}

impl ResidueRing {
    pub fn new(m: u64) -> Result<Self, String> {
        if m < 2 {
            return Err(format!("residue ring modulus must be at least 2, got {m}"));
        }
        if m > (1u64 << 62) {
            return Err(format!("modulus {m} too large"));
        }
        Ok(Self {
            m,
            field: is_prime(m),
            tagged_field: false,
        })
    }

    pub fn prime_field(p: u64) -> Result<Self, String> {
        if !is_prime(p) {
            return Err(format!("{p} is not prime"));
        }
        Ok(Self {
            m: p,
            field: true,
            tagged_field: true,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    fn red(&self, v: i128) -> u64 {
        v.rem_euclid(self.m as i128) as u64
    }

    fn gcd_m(&self, a: u64) -> u64 {
        a.gcd(&self.m)
    }
}

impl Ring for ResidueRing {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn from_i64(&self, v: i64) -> u64 {
        self.red(v as i128)
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 + *b as u128) % self.m as u128) as u64
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.m - a % self.m) % self.m
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.m as u128) as u64
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn is_unit(&self, a: &u64) -> bool {
        self.gcd_m(*a) == 1
    }
    fn inverse(&self, a: &u64) -> Option<u64> {
        let (g, s, _) = egcd_i128(*a as i128, self.m as i128);
        (g == 1).then(|| self.red(s))
    }
    fn is_field(&self) -> bool {
        self.field
    }

    fn gcdex(&self, a: &u64, b: &u64) -> Gcdex<u64> {
        if *a == 0 && *b == 0 {
            return Gcdex {
                g: 0,
                s: 1,
                t: 0,
                u: 0,
                v: 1,
            };
        }
        let (g, s, t) = egcd_i128(*a as i128, *b as i128);
        Gcdex {
            g: self.red(g),
            s: self.red(s),
            t: self.red(t),
            u: self.red(-(*b as i128) / g),
            v: self.red(*a as i128 / g),
        }
    }

    fn normalize(&self, a: &u64) -> (u64, u64) {
        if *a == 0 {
            return (0, 1);
        }
        let g = self.gcd_m(*a);
        let m1 = self.m / g;
        let a1 = a / g;
        let mut u = if m1 == 1 {
            1
        } else {
            let (_, s, _) = egcd_i128(a1 as i128, m1 as i128);
            s.rem_euclid(m1 as i128) as u64
        };
        // Step through the residue class of u mod m/g until it is a unit mod m.
        while u.gcd(&self.m) != 1 {
            u += m1;
        }
        (g % self.m, u % self.m)
    }

    fn annihilator(&self, a: &u64) -> u64 {
        (self.m / self.gcd_m(*a)) % self.m
    }

    fn div_rem(&self, b: &u64, a: &u64) -> (u64, u64) {
        if *a == 0 {
            return (0, *b);
        }
        let (g, u) = self.normalize(a);
        let r = b % g;
        let q = (b - r) / g;
        (self.mul(&q, &u), r)
    }

    fn domain(&self) -> CoefficientDomain {
        if self.tagged_field {
            CoefficientDomain::PrimeField(self.m)
        } else {
            CoefficientDomain::ResidueRing(self.m)
        }
    }

    fn elements(&self) -> Option<Vec<u64>> {
        Some((0..self.m).collect())
    }

    fn size(&self) -> Option<u64> {
        Some(self.m)
    }

    fn random<G: Rng + ?Sized>(&self, rng: &mut G) -> u64 {
        rng.gen_range(0..self.m)
    }

    fn to_json(&self, a: &u64) -> Value {
        Value::from(*a)
    }

    fn from_json(&self, v: &Value) -> Result<u64, String> {
        if let Some(i) = v.as_i64() {
            return Ok(self.from_i64(i));
        }
        if let Some(s) = v.as_str() {
            let i: i64 = s.trim().parse().map_err(|_| format!("bad residue `{s}`"))?;
            return Ok(self.from_i64(i));
        }
        Err(format!("expected an integer residue, got {v}"))
    }

    fn render(&self, a: &u64) -> String {
        a.to_string()
    }
}

/// The integers, with non-negative canonical associates.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Integers;

impl Ring for Integers {
    type Elem = BigInt;

    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn from_i64(&self, v: i64) -> BigInt {
        BigInt::from(v)
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a - b
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn is_unit(&self, a: &BigInt) -> bool {
        a.abs().is_one()
    }
    fn inverse(&self, a: &BigInt) -> Option<BigInt> {
        self.is_unit(a).then(|| a.clone())
    }
    fn is_field(&self) -> bool {
        false
    }

    fn gcdex(&self, a: &BigInt, b: &BigInt) -> Gcdex<BigInt> {
        if a.is_zero() && b.is_zero() {
            return Gcdex {
                g: self.zero(),
                s: self.one(),
                t: self.zero(),
                u: self.zero(),
                v: self.one(),
            };
        }
        let e = a.extended_gcd(b);
        let (mut g, mut s, mut t) = (e.gcd, e.x, e.y);
        if g.is_negative() {
            g = -g;
            s = -s;
            t = -t;
        }
        Gcdex {
            u: -(b / &g),
            v: a / &g,
            g,
            s,
            t,
        }
    }

    fn normalize(&self, a: &BigInt) -> (BigInt, BigInt) {
        if a.is_negative() {
            (-a, BigInt::from(-1))
        } else {
            (a.clone(), BigInt::one())
        }
    }

    fn annihilator(&self, a: &BigInt) -> BigInt {
        if a.is_zero() {
            BigInt::one()
        } else {
            BigInt::zero()
        }
    }

    fn div_rem(&self, b: &BigInt, a: &BigInt) -> (BigInt, BigInt) {
        if a.is_zero() {
            return (BigInt::zero(), b.clone());
        }
        let r = b.mod_floor(&a.abs());
        let q = (b - &r) / a;
        (q, r)
    }

    fn domain(&self) -> CoefficientDomain {
        CoefficientDomain::Integers
    }

    fn elements(&self) -> Option<Vec<BigInt>> {
        None
    }

    fn size(&self) -> Option<u64> {
        None
    }

    fn random<G: Rng + ?Sized>(&self, rng: &mut G) -> BigInt {
        BigInt::from(rng.gen_range(-3i64..=3))
    }

    fn to_json(&self, a: &BigInt) -> Value {
        match a.to_i64() {
            Some(i) => Value::from(i),
            None => Value::from(a.to_string()),
        }
    }

    fn from_json(&self, v: &Value) -> Result<BigInt, String> {
        if let Some(i) = v.as_i64() {
            return Ok(BigInt::from(i));
        }
        if let Some(s) = v.as_str() {
            return s.trim().parse().map_err(|_| format!("bad integer `{s}`"));
        }
        Err(format!("expected an integer, got {v}"))
    }

    fn render(&self, a: &BigInt) -> String {
        a.to_string()
    }
}

/// The rational numbers.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Rationals;

impl Ring for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn is_unit(&self, a: &BigRational) -> bool {
        !a.is_zero()
    }
    fn inverse(&self, a: &BigRational) -> Option<BigRational> {
        (!a.is_zero()).then(|| a.recip())
    }
    fn is_field(&self) -> bool {
        true
    }

    fn gcdex(&self, a: &BigRational, b: &BigRational) -> Gcdex<BigRational> {
        if !a.is_zero() {
            Gcdex {
                g: self.one(),
                s: a.recip(),
                t: self.zero(),
                u: -b,
                v: a.clone(),
            }
        } else if !b.is_zero() {
            Gcdex {
                g: self.one(),
                s: self.zero(),
                t: b.recip(),
                u: -b,
                v: self.zero(),
            }
        } else {
            Gcdex {
                g: self.zero(),
                s: self.one(),
                t: self.zero(),
                u: self.zero(),
                v: self.one(),
            }
        }
    }

    fn normalize(&self, a: &BigRational) -> (BigRational, BigRational) {
        if a.is_zero() {
            (self.zero(), self.one())
        } else {
            (self.one(), a.recip())
        }
    }

    fn annihilator(&self, a: &BigRational) -> BigRational {
        if a.is_zero() {
            self.one()
        } else {
            self.zero()
        }
    }

    fn div_rem(&self, b: &BigRational, a: &BigRational) -> (BigRational, BigRational) {
        if a.is_zero() {
            (self.zero(), b.clone())
        } else {
            (b / a, self.zero())
        }
    }

    fn domain(&self) -> CoefficientDomain {
        CoefficientDomain::Rationals
    }

    fn elements(&self) -> Option<Vec<BigRational>> {
        None
    }

    fn size(&self) -> Option<u64> {
        None
    }

    fn random<G: Rng + ?Sized>(&self, rng: &mut G) -> BigRational {
        let n = rng.gen_range(-3i64..=3);
        let d = rng.gen_range(1i64..=2);
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn to_json(&self, a: &BigRational) -> Value {
        Value::from(self.render(a))
    }

    fn from_json(&self, v: &Value) -> Result<BigRational, String> {
        if let Some(i) = v.as_i64() {
            return Ok(self.from_i64(i));
        }
        let s = v
            .as_str()
            .ok_or_else(|| format!("expected a rational string, got {v}"))?;
        let s = s.trim();
        match s.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad numerator in `{s}`"))?;
                let d: BigInt = d
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad denominator in `{s}`"))?;
                if d.is_zero() {
                    return Err(format!("zero denominator in `{s}`"));
                }
                Ok(BigRational::new(n, d))
            }
            None => {
                let n: BigInt = s.parse().map_err(|_| format!("bad rational `{s}`"))?;
                Ok(BigRational::from_integer(n))
            }
        }
    }

    fn render(&self, a: &BigRational) -> String {
        if a.denom().is_one() {
            a.numer().to_string()
        } else {
            format!("{}/{}", a.numer(), a.denom())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_gcdex<R: Ring>(r: &R, a: &R::Elem, b: &R::Elem) {
        let e = r.gcdex(a, b);
        assert_eq!(r.add(&r.mul(&e.s, a), &r.mul(&e.t, b)), e.g);
        assert!(r.is_zero(&r.add(&r.mul(&e.u, a), &r.mul(&e.v, b))));
        let det = r.sub(&r.mul(&e.s, &e.v), &r.mul(&e.t, &e.u));
        assert!(r.is_unit(&det), "det {det:?} for {a:?}, {b:?}");
    }

    #[test]
    fn residue_gcdex_all_pairs() {
        for m in [2u64, 4, 6, 9, 12] {
            let r = ResidueRing::new(m).unwrap();
            for a in 0..m {
                for b in 0..m {
                    check_gcdex(&r, &a, &b);
                }
            }
        }
    }

    #[test]
    fn residue_normalize_and_annihilator() {
        let r = ResidueRing::new(12).unwrap();
        for a in 0..12u64 {
            let (c, u) = r.normalize(&a);
            assert!(r.is_unit(&u));
            assert_eq!(r.mul(&u, &a), c);
            assert!(c == 0 || 12 % c == 0);
            let ann = r.annihilator(&a);
            assert_eq!(r.mul(&ann, &a), 0);
            // every annihilating element is a multiple of ann
            for x in 0..12u64 {
                if r.mul(&x, &a) == 0 {
                    assert!(r.divides(&ann, &x), "{x} not in ann({a}) = ({ann})");
                }
            }
        }
        assert_eq!(r.normalize(&10), (2, r.normalize(&10).1));
        assert_eq!(r.annihilator(&0), 1);
    }

    #[test]
    fn residue_div_rem() {
        let r = ResidueRing::new(12).unwrap();
        for a in 0..12u64 {
            for b in 0..12u64 {
                let (q, rem) = r.div_rem(&b, &a);
                assert_eq!(r.add(&r.mul(&q, &a), &rem), b);
            }
        }
    }

    #[test]
    fn colon_ideal_matches_brute_force() {
        let r = ResidueRing::new(12).unwrap();
        for a in 0..12u64 {
            for b in 0..12u64 {
                let c = r.colon(&a, &b);
                for x in 0..12u64 {
                    let inside = r.divides(&b, &r.mul(&a, &x)) || (b == 0 && r.mul(&a, &x) == 0);
                    assert_eq!(inside, r.divides(&c, &x), "a={a} b={b} x={x} c={c}");
                }
            }
        }
    }

    #[test]
    fn integer_and_rational_gcdex() {
        let z = Integers;
        for a in -6i64..=6 {
            for b in -6i64..=6 {
                check_gcdex(&z, &BigInt::from(a), &BigInt::from(b));
            }
        }
        let q = Rationals;
        for a in -2i64..=2 {
            for b in -2i64..=2 {
                check_gcdex(&q, &q.from_i64(a), &q.from_i64(b));
            }
        }
        assert_eq!(
            z.div_rem(&BigInt::from(-7), &BigInt::from(3)),
            (BigInt::from(-3), BigInt::from(2))
        );
    }

    #[test]
    fn domain_parsing() {
        assert_eq!(
            CoefficientDomain::parse("fp:3"),
            Ok(CoefficientDomain::PrimeField(3))
        );
        assert_eq!(
            CoefficientDomain::parse("zm:4"),
            Ok(CoefficientDomain::ResidueRing(4))
        );
        assert_eq!(
            CoefficientDomain::parse("q"),
            Ok(CoefficientDomain::Rationals)
        );
        assert!(CoefficientDomain::parse("fp:4").is_err());
        assert!(CoefficientDomain::parse("zm:1").is_err());
        let json = serde_json::to_string(&CoefficientDomain::PrimeField(3)).unwrap();
        assert_eq!(json, r#"{"kind":"prime-field","modulus":3}"#);
    }

    #[test]
    fn rational_json_roundtrip() {
        let q = Rationals;
        let x = BigRational::new(BigInt::from(-3), BigInt::from(4));
        assert_eq!(q.from_json(&q.to_json(&x)).unwrap(), x);
    }
}
