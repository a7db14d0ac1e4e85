//! Exact scalar fields: the rationals, the Gaussian rationals `Q(i)` and
//! finite fields `GF(p^k)`.
//!
//! Field elements are plain values; every operation goes through the owning
//! [`Field`] value, which carries whatever context the arithmetic needs
//! (the modulus and log tables for a finite field, nothing for `Q`).

use std::collections::BTreeSet;
use std::fmt::{self, Debug};
use std::hash::Hash;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Serializable description of a base field.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldSpec {
    Rational,
    GaussianRational,
    Finite {
        p: u32,
        #[serde(default = "one_u32")]
        k: u32,
        /// Low-to-high coefficients of the monic defining polynomial (k+1 entries).
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        modulus: Vec<u32>,
    },
}

fn one_u32() -> u32 {
    1
}

impl FieldSpec {
    pub fn finite(p: u32, k: u32) -> Result<FieldSpec> {
        let modulus = if k == 1 { Vec::new() } else { default_modulus(p, k)? };
        Ok(FieldSpec::Finite { p, k, modulus })
    }

    /// Parses the short forms accepted on the command line: `Q`, `Q(i)`,
    /// `GF(p)`, `GF(p^k)` and `GF(q)` for a prime power `q`.
    pub fn parse_short(s: &str) -> Result<FieldSpec> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let lower = t.to_ascii_lowercase();
        match lower.as_str() {
            "q" | "rational" | "rationals" => return Ok(FieldSpec::Rational),
            "q(i)" | "qi" | "gaussian_rational" | "gaussian" => return Ok(FieldSpec::GaussianRational),
            _ => {}
        }
        let inner = lower
            .strip_prefix("gf(")
            .and_then(|r| r.strip_suffix(')'))
            .or_else(|| lower.strip_prefix("gf"))
            .ok_or_else(|| Error::InvalidField(format!("unrecognised field {s:?}")))?;
        let bad = || Error::InvalidField(format!("unrecognised field {s:?}"));
        if let Some((p, k)) = inner.split_once('^') {
            let p: u32 = p.parse().map_err(|_| bad())?;
            let k: u32 = k.parse().map_err(|_| bad())?;
            return FieldSpec::finite(p, k);
        }
        let q: u64 = inner.parse().map_err(|_| bad())?;
        let (p, k) = prime_power(q).ok_or_else(|| Error::InvalidField(format!("{q} is not a prime power")))?;
        FieldSpec::finite(p, k)
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, FieldSpec::Finite { .. })
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rational => write!(f, "Q"),
            FieldSpec::GaussianRational => write!(f, "Q(i)"),
            FieldSpec::Finite { p, k: 1, .. } => write!(f, "GF({p})"),
            FieldSpec::Finite { p, k, .. } => write!(f, "GF({p}^{k})"),
        }
    }
}

/// An exact field.
pub trait Field: Clone + Debug + PartialEq + Send + Sync + 'static {
    type Elem: Clone + Debug + PartialEq + Eq + Hash + Send + Sync;

    fn spec(&self) -> FieldSpec;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, n: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }
    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        Ok(self.mul(a, &self.inv(b)?))
    }
    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }
    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    fn characteristic(&self) -> u64;
    /// Number of elements, `None` for infinite fields.
    fn order(&self) -> Option<u64>;
    /// All elements with 0 first and 1 second.
    fn enumerate(&self) -> Result<Vec<Self::Elem>>;
    /// Position of `a` in [`Field::enumerate`] order (finite fields only).
    fn index_of(&self, a: &Self::Elem) -> Option<u64>;
    /// Some(p) iff this is the prime field GF(p).
    fn prime_field(&self) -> Option<u32> {
        None
    }

    /// Small random element, used for probing.
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;
    /// Elements of height at most `h`, ordered by height. Finite fields
    /// return everything.
    fn small_elements(&self, h: u64) -> Vec<Self::Elem>;
    fn height(&self, a: &Self::Elem) -> u64;

    fn render(&self, a: &Self::Elem) -> String;
    fn parse(&self, s: &str) -> Result<Self::Elem>;

    /// Maps an element of the prime field (or of `Q`) given as a rational
    /// into this field; used for scalar extension.
    fn from_rational(&self, q: &BigRational) -> Result<Self::Elem>;
    /// Inverse of [`Field::from_rational`] on the prime subfield (or on `Q`).
    fn as_rational(&self, a: &Self::Elem) -> Option<BigRational>;
}

fn parse_err(input: &str, reason: impl Into<String>) -> Error {
    Error::ParseScalar { input: input.to_string(), reason: reason.into() }
}

fn rational_height(q: &BigRational) -> u64 {
    let n = q.numer().abs().to_u64().unwrap_or(u64::MAX);
    let d = q.denom().to_u64().unwrap_or(u64::MAX);
    n.max(d)
}

fn rationals_of_height(h: u64) -> Vec<BigRational> {
    let mut seen = BTreeSet::new();
    let mut out: Vec<BigRational> = Vec::new();
    for level in 0..=h as i64 {
        let mut fresh = Vec::new();
        for num in -level..=level {
            for den in 1..=level.max(1) {
                let q = BigRational::new(BigInt::from(num), BigInt::from(den));
                if rational_height(&q) as i64 == level && seen.insert(q.clone()) {
                    fresh.push(q);
                }
            }
        }
        fresh.sort_by(|a, b| a.abs().cmp(&b.abs()).then(b.cmp(a)));
        out.extend(fresh);
    }
    out
}

fn render_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let t = t.strip_prefix('+').unwrap_or(t);
    if t.is_empty() {
        return Err(parse_err(s, "empty"));
    }
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| parse_err(s, "bad numerator"))?;
        let d = BigInt::from_str(d.trim()).map_err(|_| parse_err(s, "bad denominator"))?;
        if d.is_zero() {
            return Err(parse_err(s, "zero denominator"));
        }
        Ok(BigRational::new(n, d))
    } else {
        let n = BigInt::from_str(t).map_err(|_| parse_err(s, "not an integer"))?;
        Ok(BigRational::from_integer(n))
    }
}

fn random_rational<R: Rng + ?Sized>(rng: &mut R) -> BigRational {
    let num: i64 = rng.random_range(-9..=9);
    let den: i64 = if rng.random_bool(0.25) { rng.random_range(1..=4) } else { 1 };
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// The field of rational numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Rational
    }
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn inv(&self, a: &BigRational) -> Result<BigRational> {
        if a.is_zero() {
            Err(Error::DivisionByZero)
        } else {
            Ok(a.recip())
        }
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn characteristic(&self) -> u64 {
        0
    }
    fn order(&self) -> Option<u64> {
        None
    }
    fn enumerate(&self) -> Result<Vec<BigRational>> {
        Err(Error::NotEnumerable("Q".into()))
    }
    fn index_of(&self, _a: &BigRational) -> Option<u64> {
        None
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> BigRational {
        random_rational(rng)
    }
    fn small_elements(&self, h: u64) -> Vec<BigRational> {
        rationals_of_height(h)
    }
    fn height(&self, a: &BigRational) -> u64 {
        rational_height(a)
    }
    fn render(&self, a: &BigRational) -> String {
        render_rational(a)
    }
    fn parse(&self, s: &str) -> Result<BigRational> {
        parse_rational(s)
    }
    fn from_rational(&self, q: &BigRational) -> Result<BigRational> {
        Ok(q.clone())
    }
    fn as_rational(&self, a: &BigRational) -> Option<BigRational> {
        Some(a.clone())
    }
}

/// `a + b i` with rational parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Gaussian {
    pub re: BigRational,
    pub im: BigRational,
}

impl Gaussian {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Gaussian { re, im }
    }
}

/// The Gaussian rationals `Q(i)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GaussianRationals;

impl GaussianRationals {
    /// The element `i` with `i^2 = -1`.
    pub fn unit_i(&self) -> Gaussian {
        Gaussian::new(BigRational::zero(), BigRational::one())
    }

    pub fn from_parts(&self, re: i64, im: i64) -> Gaussian {
        Gaussian::new(BigRational::from_integer(re.into()), BigRational::from_integer(im.into()))
    }
}

/// The imaginary unit of a Gaussian-rational field spec; other kinds are rejected.
pub fn gaussian_unit_i(spec: &FieldSpec) -> Result<Gaussian> {
    match spec {
        FieldSpec::GaussianRational => Ok(GaussianRationals.unit_i()),
        other => Err(Error::InvalidField(format!("{other} has no distinguished square root of -1"))),
    }
}

impl Field for GaussianRationals {
    type Elem = Gaussian;

    fn spec(&self) -> FieldSpec {
        FieldSpec::GaussianRational
    }
    fn zero(&self) -> Gaussian {
        Gaussian::new(BigRational::zero(), BigRational::zero())
    }
    fn one(&self) -> Gaussian {
        Gaussian::new(BigRational::one(), BigRational::zero())
    }
    fn from_i64(&self, n: i64) -> Gaussian {
        self.from_parts(n, 0)
    }
    fn add(&self, a: &Gaussian, b: &Gaussian) -> Gaussian {
        Gaussian::new(&a.re + &b.re, &a.im + &b.im)
    }
    fn sub(&self, a: &Gaussian, b: &Gaussian) -> Gaussian {
        Gaussian::new(&a.re - &b.re, &a.im - &b.im)
    }
    fn neg(&self, a: &Gaussian) -> Gaussian {
        Gaussian::new(-&a.re, -&a.im)
    }
    fn mul(&self, a: &Gaussian, b: &Gaussian) -> Gaussian {
        Gaussian::new(&a.re * &b.re - &a.im * &b.im, &a.re * &b.im + &a.im * &b.re)
    }
    fn inv(&self, a: &Gaussian) -> Result<Gaussian> {
        let norm = &a.re * &a.re + &a.im * &a.im;
        if norm.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Gaussian::new(&a.re / &norm, -&a.im / &norm))
    }
    fn is_zero(&self, a: &Gaussian) -> bool {
        a.re.is_zero() && a.im.is_zero()
    }
    fn characteristic(&self) -> u64 {
        0
    }
    fn order(&self) -> Option<u64> {
        None
    }
    fn enumerate(&self) -> Result<Vec<Gaussian>> {
        Err(Error::NotEnumerable("Q(i)".into()))
    }
    fn index_of(&self, _a: &Gaussian) -> Option<u64> {
        None
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Gaussian {
        Gaussian::new(random_rational(rng), random_rational(rng))
    }
    fn small_elements(&self, h: u64) -> Vec<Gaussian> {
        let parts = rationals_of_height(h);
        let mut out: Vec<Gaussian> = Vec::with_capacity(parts.len() * parts.len());
        for re in &parts {
            for im in &parts {
                out.push(Gaussian::new(re.clone(), im.clone()));
            }
        }
        // stable sort keeps the rational ordering within a height level
        out.sort_by_key(|g| self.height(g));
        out
    }
    fn height(&self, a: &Gaussian) -> u64 {
        rational_height(&a.re).max(rational_height(&a.im))
    }
    fn render(&self, a: &Gaussian) -> String {
        let re = render_rational(&a.re);
        if a.im.is_zero() {
            return re;
        }
        let im = if a.im.is_one() {
            "i".to_string()
        } else if (-&a.im).is_one() {
            "-i".to_string()
        } else {
            format!("{}*i", render_rational(&a.im))
        };
        if a.re.is_zero() {
            im
        } else if im.starts_with('-') {
            format!("{re}{im}")
        } else {
            format!("{re}+{im}")
        }
    }
    fn parse(&self, s: &str) -> Result<Gaussian> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(parse_err(s, "empty"));
        }
        let Some(body) = t.strip_suffix('i') else {
            return Ok(Gaussian::new(parse_rational(&t)?, BigRational::zero()));
        };
        let body = body.strip_suffix('*').unwrap_or(body);
        // split off the real part at the last sign that is not leading
        let bytes = body.as_bytes();
        let split = (1..bytes.len()).rev().find(|&j| (bytes[j] == b'+' || bytes[j] == b'-') && bytes[j - 1] != b'/');
        let (re_str, im_str) = match split {
            Some(j) => (&body[..j], &body[j..]),
            None => ("", body),
        };
        let im = match im_str {
            "" | "+" => BigRational::one(),
            "-" => -BigRational::one(),
            other => parse_rational(other).map_err(|_| parse_err(s, "bad imaginary part"))?,
        };
        let re = if re_str.is_empty() { BigRational::zero() } else { parse_rational(re_str)? };
        Ok(Gaussian::new(re, im))
    }
    fn from_rational(&self, q: &BigRational) -> Result<Gaussian> {
        Ok(Gaussian::new(q.clone(), BigRational::zero()))
    }
    fn as_rational(&self, a: &Gaussian) -> Option<BigRational> {
        a.im.is_zero().then(|| a.re.clone())
    }
}

/// Element of `GF(p^k)`, encoded as `sum c_i p^i` over its coefficient vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gf(pub u32);

#[derive(Debug)]
struct GfInner {
    p: u32,
    k: u32,
    q: u32,
    modulus: Vec<u32>,
    /// exp[i] = g^i for a primitive g, length q-1; log[exp[i]] = i.
    tables: Option<(Vec<u32>, Vec<u32>)>,
}

/// The finite field `GF(p^k)` modulo a stored irreducible polynomial.
#[derive(Debug, Clone)]
pub struct FiniteField(Arc<GfInner>);

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.p == other.0.p && self.0.k == other.0.k && self.0.modulus == other.0.modulus)
    }
}

const TABLE_LIMIT: u32 = 1 << 16;

impl FiniteField {
    pub fn prime(p: u32) -> Result<FiniteField> {
        FiniteField::new(p, 1, Vec::new())
    }

    /// `GF(p^k)` with the built-in default modulus.
    pub fn with_default_modulus(p: u32, k: u32) -> Result<FiniteField> {
        let modulus = if k == 1 { Vec::new() } else { default_modulus(p, k)? };
        FiniteField::new(p, k, modulus)
    }

    pub fn new(p: u32, k: u32, modulus: Vec<u32>) -> Result<FiniteField> {
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if k == 0 {
            return Err(Error::InvalidField("extension degree must be at least 1".into()));
        }
        let q64 = (p as u64).checked_pow(k).filter(|&q| q < (1u64 << 31));
        let q = q64.ok_or_else(|| Error::InvalidField(format!("GF({p}^{k}) is too large")))? as u32;
        let modulus = if k == 1 {
            vec![0, 1]
        } else {
            let mut m = modulus;
            if m.len() == k as usize {
                m.push(1);
            }
            if m.len() != k as usize + 1 || m.iter().any(|&c| c >= p) || m[k as usize] != 1 {
                return Err(Error::InvalidField(format!(
                    "modulus must list {} coefficients in [0,{p}) ending in 1",
                    k + 1
                )));
            }
            if !is_irreducible(p, &m) {
                return Err(Error::InvalidField(format!("modulus {m:?} is reducible over GF({p})")));
            }
            m
        };
        let mut inner = GfInner { p, k, q, modulus, tables: None };
        if k > 1 && q <= TABLE_LIMIT {
            inner.tables = Some(build_tables(&inner));
        }
        Ok(FiniteField(Arc::new(inner)))
    }

    pub fn from_spec(spec: &FieldSpec) -> Result<FiniteField> {
        match spec {
            FieldSpec::Finite { p, k, modulus } => FiniteField::new(*p, *k, modulus.clone()),
            other => Err(Error::InvalidField(format!("{other} is not finite"))),
        }
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }
    pub fn degree(&self) -> u32 {
        self.0.k
    }
    pub fn size(&self) -> u32 {
        self.0.q
    }
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn coeffs(&self, a: Gf) -> Vec<u32> {
        let mut v = a.0;
        (0..self.0.k)
            .map(|_| {
                let c = v % self.0.p;
                v /= self.0.p;
                c
            })
            .collect()
    }

    pub fn from_coeffs(&self, cs: &[i64]) -> Gf {
        let p = self.0.p as i64;
        let digits: Vec<u32> = cs.iter().map(|c| c.rem_euclid(p) as u32).collect();
        Gf(encode(self.0.p, &reduce_poly(self.0.p, &digits, &self.0.modulus)))
    }

    /// Multiplication by schoolbook polynomial product, independent of the log tables.
    pub fn mul_slow(&self, a: Gf, b: Gf) -> Gf {
        let p = self.0.p;
        if self.0.k == 1 {
            return Gf(((a.0 as u64 * b.0 as u64) % p as u64) as u32);
        }
        let x = self.coeffs(a);
        let y = self.coeffs(b);
        let mut prod = vec![0u32; x.len() + y.len() - 1];
        for (i, &xi) in x.iter().enumerate() {
            for (j, &yj) in y.iter().enumerate() {
                prod[i + j] = ((prod[i + j] as u64 + xi as u64 * yj as u64) % p as u64) as u32;
            }
        }
        Gf(encode(p, &reduce_poly(p, &prod, &self.0.modulus)))
    }
}

fn encode(p: u32, digits: &[u32]) -> u32 {
    digits.iter().rev().fold(0u32, |acc, &d| acc * p + d)
}

/// Remainder of `a` modulo the monic `m`, padded to `deg m` digits.
fn reduce_poly(p: u32, a: &[u32], m: &[u32]) -> Vec<u32> {
    let k = m.len() - 1;
    let mut r: Vec<u32> = a.to_vec();
    while r.len() > k {
        let lead = r.pop().unwrap();
        if lead != 0 {
            let shift = r.len() - k;
            for (i, &mc) in m[..k].iter().enumerate() {
                let sub = (lead as u64 * mc as u64) % p as u64;
                r[shift + i] = ((r[shift + i] as u64 + p as u64 - sub) % p as u64) as u32;
            }
        }
    }
    r.resize(k, 0);
    r
}

fn build_tables(inner: &GfInner) -> (Vec<u32>, Vec<u32>) {
    let field = FiniteField(Arc::new(GfInner {
        p: inner.p,
        k: inner.k,
        q: inner.q,
        modulus: inner.modulus.clone(),
        tables: None,
    }));
    let q = inner.q;
    for g in 2..q {
        let mut exp = Vec::with_capacity(q as usize - 1);
        let mut x = Gf(1);
        let mut primitive = true;
        for i in 0..q - 1 {
            if i > 0 && x == Gf(1) {
                primitive = false;
                break;
            }
            exp.push(x.0);
            x = field.mul_slow(x, Gf(g));
        }
        if primitive && x == Gf(1) {
            let mut log = vec![0u32; q as usize];
            for (i, &e) in exp.iter().enumerate() {
                log[e as usize] = i as u32;
            }
            return (exp, log);
        }
    }
    unreachable!("the multiplicative group of a finite field is cyclic")
}

impl Field for FiniteField {
    type Elem = Gf;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Finite {
            p: self.0.p,
            k: self.0.k,
            modulus: if self.0.k == 1 { Vec::new() } else { self.0.modulus.clone() },
        }
    }
    fn zero(&self) -> Gf {
        Gf(0)
    }
    fn one(&self) -> Gf {
        Gf(1)
    }
    fn from_i64(&self, n: i64) -> Gf {
        Gf(n.rem_euclid(self.0.p as i64) as u32)
    }
    fn add(&self, a: &Gf, b: &Gf) -> Gf {
        let p = self.0.p;
        if self.0.k == 1 {
            let s = a.0 + b.0;
            return Gf(if s >= p { s - p } else { s });
        }
        if p == 2 {
            return Gf(a.0 ^ b.0);
        }
        let (mut x, mut y, mut out, mut place) = (a.0, b.0, 0u32, 1u32);
        for _ in 0..self.0.k {
            let d = (x % p + y % p) % p;
            out += d * place;
            place = place.wrapping_mul(p);
            x /= p;
            y /= p;
        }
        Gf(out)
    }
    fn neg(&self, a: &Gf) -> Gf {
        let p = self.0.p;
        if self.0.k == 1 {
            return Gf(if a.0 == 0 { 0 } else { p - a.0 });
        }
        if p == 2 {
            return *a;
        }
        let (mut x, mut out, mut place) = (a.0, 0u32, 1u32);
        for _ in 0..self.0.k {
            let d = x % p;
            out += ((p - d) % p) * place;
            place = place.wrapping_mul(p);
            x /= p;
        }
        Gf(out)
    }
    fn mul(&self, a: &Gf, b: &Gf) -> Gf {
        if a.0 == 0 || b.0 == 0 {
            return Gf(0);
        }
        match &self.0.tables {
            Some((exp, log)) => {
                let s = log[a.0 as usize] as u64 + log[b.0 as usize] as u64;
                Gf(exp[(s % (self.0.q as u64 - 1)) as usize])
            }
            None => self.mul_slow(*a, *b),
        }
    }
    fn inv(&self, a: &Gf) -> Result<Gf> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        match &self.0.tables {
            Some((exp, log)) => {
                let l = log[a.0 as usize];
                Ok(Gf(exp[((self.0.q - 1 - l) % (self.0.q - 1)) as usize]))
            }
            None => Ok(self.pow(a, self.0.q as u64 - 2)),
        }
    }
    fn is_zero(&self, a: &Gf) -> bool {
        a.0 == 0
    }
    fn characteristic(&self) -> u64 {
        self.0.p as u64
    }
    fn order(&self) -> Option<u64> {
        Some(self.0.q as u64)
    }
    fn enumerate(&self) -> Result<Vec<Gf>> {
        Ok((0..self.0.q).map(Gf).collect())
    }
    fn index_of(&self, a: &Gf) -> Option<u64> {
        Some(a.0 as u64)
    }
    fn prime_field(&self) -> Option<u32> {
        (self.0.k == 1).then_some(self.0.p)
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Gf {
        Gf(rng.random_range(0..self.0.q))
    }
    fn small_elements(&self, _h: u64) -> Vec<Gf> {
        (0..self.0.q).map(Gf).collect()
    }
    fn height(&self, _a: &Gf) -> u64 {
        1
    }
    fn render(&self, a: &Gf) -> String {
        if self.0.k == 1 {
            return a.0.to_string();
        }
        let cs: Vec<String> = self.coeffs(*a).iter().map(|c| c.to_string()).collect();
        format!("[{}]", cs.join(","))
    }
    fn parse(&self, s: &str) -> Result<Gf> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(body) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let cs: Vec<i64> = if body.is_empty() {
                Vec::new()
            } else {
                body.split(',')
                    .map(|c| c.parse::<i64>().map_err(|_| parse_err(s, "bad coefficient")))
                    .collect::<Result<_>>()?
            };
            if cs.len() > self.0.k as usize {
                return Err(parse_err(s, format!("more than {} coefficients", self.0.k)));
            }
            return Ok(self.from_coeffs(&cs));
        }
        let n: i64 = t.parse().map_err(|_| parse_err(s, "expected an integer or a coefficient list"))?;
        Ok(self.from_i64(n))
    }
    fn from_rational(&self, q: &BigRational) -> Result<Gf> {
        let p = BigInt::from(self.0.p);
        let num = (q.numer() % &p + &p) % &p;
        let den = (q.denom() % &p + &p) % &p;
        let num = self.from_i64(num.to_i64().unwrap());
        let den = self.from_i64(den.to_i64().unwrap());
        self.div(&num, &den)
    }
    fn as_rational(&self, a: &Gf) -> Option<BigRational> {
        (a.0 < self.0.p).then(|| BigRational::from_integer(BigInt::from(a.0)))
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while p * p <= q && q % p != 0 {
        p += 1;
    }
    if q % p != 0 {
        p = q;
    }
    let (mut r, mut k) = (q, 0u32);
    while r % p == 0 {
        r /= p;
        k += 1;
    }
    (r == 1 && p < u32::MAX as u64).then_some((p as u32, k))
}

/// Checks irreducibility by trial division with every monic polynomial of
/// degree at most `deg/2` (for degree at most 3 this is the root test).
pub fn is_irreducible(p: u32, m: &[u32]) -> bool {
    let k = m.len() - 1;
    for d in 1..=k / 2 {
        let count = (p as u64).pow(d as u32);
        for code in 0..count {
            let mut divisor = Vec::with_capacity(d + 1);
            let mut c = code;
            for _ in 0..d {
                divisor.push((c % p as u64) as u32);
                c /= p as u64;
            }
            divisor.push(1);
            if reduce_poly(p, m, &divisor).iter().all(|&x| x == 0) {
                return false;
            }
        }
    }
    true
}

/// Built-in moduli (Conway polynomials where listed), else the first
/// irreducible polynomial in enumeration order.
pub fn default_modulus(p: u32, k: u32) -> Result<Vec<u32>> {
    if !is_prime(p) {
        return Err(Error::InvalidField(format!("{p} is not prime")));
    }
    let known: Option<Vec<u32>> = match (p, k) {
        (2, 2) => Some(vec![1, 1, 1]),
        (2, 3) => Some(vec![1, 1, 0, 1]),
        (2, 4) => Some(vec![1, 1, 0, 0, 1]),
        (3, 2) => Some(vec![2, 2, 1]),
        (3, 3) => Some(vec![1, 2, 0, 1]),
        (3, 5) => Some(vec![1, 2, 0, 0, 0, 1]),
        (5, 2) => Some(vec![2, 4, 1]),
        _ => None,
    };
    if let Some(m) = known {
        return Ok(m);
    }
    let count = (p as u64).checked_pow(k).ok_or_else(|| Error::InvalidField("degree too large".into()))?;
    for code in 0..count {
        let mut m = Vec::with_capacity(k as usize + 1);
        let mut c = code;
        for _ in 0..k {
            m.push((c % p as u64) as u32);
            c /= p as u64;
        }
        m.push(1);
        if m[0] != 0 && is_irreducible(p, &m) {
            return Ok(m);
        }
    }
    Err(Error::InvalidField(format!("no irreducible polynomial of degree {k} over GF({p})")))
}

/// All elements of a finite field in enumeration order.
pub fn field_enumerate<F: Field>(field: &F) -> Result<Vec<F::Elem>> {
    field.enumerate()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gf(p: u32, k: u32) -> FiniteField {
        FiniteField::with_default_modulus(p, k).unwrap()
    }

    #[test]
    fn small_prime_fields_enumerate_in_order() {
        assert_eq!(gf(2, 1).enumerate().unwrap(), vec![Gf(0), Gf(1)]);
        assert_eq!(gf(3, 1).enumerate().unwrap(), vec![Gf(0), Gf(1), Gf(2)]);
    }

    #[test]
    fn gf27_is_closed_and_complete() {
        let f = FiniteField::new(3, 3, vec![1, 2, 0, 1]).unwrap();
        let all = f.enumerate().unwrap();
        assert_eq!(all.len(), 27);
        assert_eq!(all[0], f.zero());
        assert_eq!(all[1], f.one());
        let set: BTreeSet<Gf> = all.iter().copied().collect();
        assert_eq!(set.len(), 27);
        // every product and sum stays in the set; every nonzero row of the
        // multiplication table is a permutation
        for a in &all {
            let row: BTreeSet<Gf> = all.iter().map(|b| f.mul(a, b)).collect();
            assert!(row.is_subset(&set));
            if !f.is_zero(a) {
                assert_eq!(row.len(), 27);
            }
            for b in &all {
                assert!(set.contains(&f.add(a, b)));
                assert_eq!(f.mul(a, b), f.mul_slow(*a, *b));
            }
        }
    }

    #[test]
    fn infinite_fields_are_not_enumerable() {
        assert!(matches!(Rationals.enumerate(), Err(Error::NotEnumerable(_))));
        assert!(matches!(GaussianRationals.enumerate(), Err(Error::NotEnumerable(_))));
    }

    #[test]
    fn gaussian_unit() {
        let f = GaussianRationals;
        let i = gaussian_unit_i(&f.spec()).unwrap();
        assert_eq!(f.mul(&i, &i), f.from_i64(-1));
        let a = f.from_parts(1, 1);
        let b = f.from_parts(1, -1);
        assert_eq!(f.mul(&a, &b), f.from_i64(2));
        assert_eq!(f.inv(&i).unwrap(), f.neg(&i));
        assert!(gaussian_unit_i(&FieldSpec::Rational).is_err());
    }

    #[test]
    fn inverse_of_zero_is_an_error() {
        assert_eq!(Rationals.inv(&Rationals.zero()), Err(Error::DivisionByZero));
        assert_eq!(gf(3, 3).inv(&Gf(0)), Err(Error::DivisionByZero));
    }

    #[test]
    fn frobenius_fixes_every_element() {
        for (p, k) in [(2, 1), (3, 1), (2, 3), (3, 3), (5, 2), (3, 5)] {
            let f = gf(p, k);
            let q = f.order().unwrap();
            for x in f.enumerate().unwrap() {
                assert_eq!(f.pow(&x, q), x, "GF({p}^{k})");
            }
        }
    }

    #[test]
    fn reducible_moduli_are_rejected() {
        // x^3 + x^2 + x + 1 = (x+1)(x^2+1) over GF(2)
        assert!(FiniteField::new(2, 3, vec![1, 1, 1, 1]).is_err());
        // x^4 + 2x^2 + 1 = (x^2+1)^2 over GF(3): no roots, still reducible
        assert!(FiniteField::new(3, 4, vec![1, 0, 2, 0, 1]).is_err());
        assert!(FiniteField::new(4, 1, vec![]).is_err());
    }

    #[test]
    fn parse_short_forms() {
        assert_eq!(FieldSpec::parse_short("Q").unwrap(), FieldSpec::Rational);
        assert_eq!(FieldSpec::parse_short("Q(i)").unwrap(), FieldSpec::GaussianRational);
        assert_eq!(FieldSpec::parse_short("GF(27)").unwrap(), FieldSpec::parse_short("GF(3^3)").unwrap());
        assert_eq!(
            FieldSpec::parse_short("gf3").unwrap(),
            FieldSpec::Finite { p: 3, k: 1, modulus: vec![] }
        );
        assert!(FieldSpec::parse_short("GF(6)").is_err());
    }

    #[test]
    fn scalar_syntax() {
        let q = Rationals;
        assert_eq!(q.render(&q.parse("6/-4").unwrap()), "-3/2");
        assert!(q.parse("1/0").is_err());
        let g = GaussianRationals;
        for (text, re, im) in [("i", 0, 1), ("-i", 0, -1), ("1-i", 1, -1), ("2+3*i", 2, 3), ("-4", -4, 0)] {
            assert_eq!(g.parse(text).unwrap(), g.from_parts(re, im), "{text}");
        }
        let half = g.parse("1/2-3/4*i").unwrap();
        assert_eq!(g.render(&half), "1/2-3/4*i");
        let f = gf(3, 3);
        assert_eq!(f.parse("[1,2]").unwrap(), f.from_coeffs(&[1, 2, 0]));
        assert_eq!(f.parse("5").unwrap(), f.from_i64(2));
        assert!(f.parse("[1,2,0,1]").is_err());
    }

    fn check_axioms<F: Field>(f: &F, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..1000 {
            let (a, b, c) = (f.random(&mut rng), f.random(&mut rng), f.random(&mut rng));
            assert_eq!(f.mul(&a, &f.add(&b, &c)), f.add(&f.mul(&a, &b), &f.mul(&a, &c)));
            assert!(f.is_zero(&f.add(&a, &f.neg(&a))));
            if !f.is_zero(&a) {
                assert!(f.is_one(&f.mul(&a, &f.inv(&a).unwrap())));
            }
            assert_eq!(f.parse(&f.render(&a)).unwrap(), a);
        }
    }

    #[test]
    fn field_axioms_on_random_triples() {
        check_axioms(&Rationals, 1);
        check_axioms(&GaussianRationals, 2);
        check_axioms(&gf(2, 1), 3);
        check_axioms(&gf(3, 1), 4);
        check_axioms(&gf(2, 3), 5);
        check_axioms(&gf(3, 3), 6);
    }

    #[test]
    fn render_round_trips_every_enumerated_element() {
        for f in [gf(2, 1), gf(3, 3), gf(2, 3), gf(5, 2)] {
            for x in f.enumerate().unwrap() {
                assert_eq!(f.parse(&f.render(&x)).unwrap(), x);
            }
        }
    }

    #[test]
    fn small_elements_are_ordered_by_height() {
        let els = Rationals.small_elements(3);
        assert_eq!(els.len(), 15);
        assert!(els.windows(2).all(|w| Rationals.height(&w[0]) <= Rationals.height(&w[1])));
        let gi = GaussianRationals.small_elements(1);
        assert_eq!(gi.len(), 9);
        assert!(gi.contains(&GaussianRationals.from_parts(0, -1)));
    }

    #[test]
    fn rationals_map_into_prime_fields() {
        let f = gf(3, 1);
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(f.from_rational(&half).unwrap(), Gf(2));
        assert!(f.from_rational(&BigRational::new(1.into(), 3.into())).is_err());
    }
}
