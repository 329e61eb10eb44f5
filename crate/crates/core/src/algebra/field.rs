//! Finite fields F_q with q = p^e, e ≤ 4.
//!
//! Elements are stored as a single integer code: the coordinates of the
//! element in the power basis of the modulus, read as base-p digits
//! (coordinate i is the digit of weight p^i). For prime fields the code is
//! simply the residue mod p.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest supported extension degree.
pub const MAX_EXTENSION_DEGREE: u32 = 4;

const TABLE_LIMIT: u64 = 1024;

/// An element of some [`Field`], identified by its integer code.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fq(pub(crate) u32);

impl Fq {
    pub const ZERO: Fq = Fq(0);
    pub const ONE: Fq = Fq(1);

    pub fn code(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

struct Tables {
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
}

struct Inner {
    p: u64,
    e: u32,
    q: u64,
    /// Monic modulus, ascending coefficients, length e + 1. Empty for prime fields.
    modulus: Vec<u64>,
    tables: Option<Tables>,
}

/// A validated finite field descriptor. Cheap to clone.
#[derive(Clone)]
pub struct Field(Arc<Inner>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.e == other.0.e && self.0.modulus == other.0.modulus)
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.e == 1 {
            write!(f, "F_{}", self.0.p)
        } else {
            write!(f, "F_{}[{:?}]", self.0.q, self.0.modulus)
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

// Dense polynomial helpers over F_p, ascending coefficients.

fn fp_trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn fp_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    fp_trim(&mut r);
    let db = b.len() - 1;
    let lead_inv = mod_pow(b[db], p - 2, p);
    while r.len() > db {
        let dr = r.len() - 1;
        let c = r[dr] * lead_inv % p;
        for (i, &bi) in b.iter().enumerate() {
            let idx = dr - db + i;
            r[idx] = (r[idx] + p - c * bi % p) % p;
        }
        fp_trim(&mut r);
    }
    r
}

fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((acc as u128 * base as u128) % m as u128) as u64;
        }
        base = ((base as u128 * base as u128) % m as u128) as u64;
        exp >>= 1;
    }
    acc
}

fn digits(mut code: u64, p: u64, len: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(code % p);
        code /= p;
    }
    out
}

/// Exhaustive irreducibility test by trial division with every monic
/// polynomial of degree at most half the degree.
fn is_irreducible(poly: &[u64], p: u64) -> bool {
    let deg = poly.len() - 1;
    if deg == 0 {
        return false;
    }
    for d in 1..=deg / 2 {
        let count = p.pow(d as u32);
        for low in 0..count {
            let mut cand = digits(low, p, d);
            cand.push(1);
            if fp_rem(poly, &cand, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// The monic irreducible polynomial of degree `e` over F_p whose lower
/// coefficients, read as a base-p number, are smallest.
pub fn default_modulus(p: u64, e: u32) -> Vec<u64> {
    let count = p.pow(e);
    for low in 0..count {
        let mut cand = digits(low, p, e as usize);
        cand.push(1);
        if is_irreducible(&cand, p) {
            return cand;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl Field {
    /// The prime field F_p.
    pub fn prime(p: u64) -> Result<Field> {
        Field::new(p, 1, None)
    }

    /// Builds F_{p^e}. For `e > 1` the modulus is the given monic polynomial
    /// (ascending coefficients over F_p) or [`default_modulus`].
    pub fn new(p: u64, e: u32, modulus: Option<&[u64]>) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::NonPrimeCharacteristic(p));
        }
        if e == 0 || e > MAX_EXTENSION_DEGREE {
            return Err(Error::InvalidField(format!(
                "extension degree {e} outside 1..={MAX_EXTENSION_DEGREE}"
            )));
        }
        let q = p
            .checked_pow(e)
            .filter(|&q| q < (1u64 << 31))
            .ok_or_else(|| Error::InvalidField(format!("p^e too large for p={p}, e={e}")))?;
        let modulus = if e == 1 {
            if let Some(m) = modulus {
                if m.len() > 2 {
                    return Err(Error::InvalidField("prime field takes no modulus".into()));
                }
            }
            Vec::new()
        } else {
            match modulus {
                Some(m) => {
                    if m.len() != e as usize + 1 {
                        return Err(Error::InvalidField(format!(
                            "modulus must have degree {e}, got {} coefficients",
                            m.len()
                        )));
                    }
                    if m.iter().any(|&c| c >= p) || m[e as usize] != 1 {
                        return Err(Error::InvalidField(
                            "modulus must be monic with coefficients in [0, p)".into(),
                        ));
                    }
                    if !is_irreducible(m, p) {
                        return Err(Error::ReducibleModulus(p));
                    }
                    m.to_vec()
                }
                None => default_modulus(p, e),
            }
        };
        let mut inner = Inner { p, e, q, modulus, tables: None };
        if q <= TABLE_LIMIT {
            inner.tables = Some(build_tables(&inner));
        }
        Ok(Field(Arc::new(inner)))
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }

    pub fn e(&self) -> u32 {
        self.0.e
    }

    pub fn q(&self) -> u64 {
        self.0.q
    }

    /// Monic modulus (ascending, over F_p); empty for prime fields.
    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    pub fn zero(&self) -> Fq {
        Fq::ZERO
    }

    pub fn one(&self) -> Fq {
        Fq::ONE
    }

    /// Element from its integer code; `None` if the code is not below q.
    pub fn elem(&self, code: u64) -> Option<Fq> {
        (code < self.0.q).then_some(Fq(code as u32))
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> Fq {
        Fq(n.rem_euclid(self.0.p as i64) as u32)
    }

    /// Image of a non-negative integer (given as `u64`) in the prime subfield.
    pub fn from_u64(&self, n: u64) -> Fq {
        Fq((n % self.0.p) as u32)
    }

    /// All field elements in code order.
    pub fn elements(&self) -> impl Iterator<Item = Fq> {
        (0..self.0.q as u32).map(Fq)
    }

    pub fn coords(&self, x: Fq) -> Vec<u64> {
        digits(x.0 as u64, self.0.p, self.0.e as usize)
    }

    fn from_coords(&self, c: &[u64]) -> Fq {
        let p = self.0.p;
        Fq(c.iter().rev().fold(0u64, |acc, &d| acc * p + d) as u32)
    }

    #[inline]
    pub fn add(&self, a: Fq, b: Fq) -> Fq {
        if let Some(t) = &self.0.tables {
            return Fq(t.add[(a.0 as usize) * self.0.q as usize + b.0 as usize]);
        }
        self.add_slow(a, b)
    }

    #[inline]
    pub fn neg(&self, a: Fq) -> Fq {
        if let Some(t) = &self.0.tables {
            return Fq(t.neg[a.0 as usize]);
        }
        self.neg_slow(a)
    }

    #[inline]
    pub fn sub(&self, a: Fq, b: Fq) -> Fq {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fq, b: Fq) -> Fq {
        if let Some(t) = &self.0.tables {
            return Fq(t.mul[(a.0 as usize) * self.0.q as usize + b.0 as usize]);
        }
        self.mul_slow(a, b)
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: Fq) -> Option<Fq> {
        if a.is_zero() {
            return None;
        }
        if let Some(t) = &self.0.tables {
            return Some(Fq(t.inv[a.0 as usize]));
        }
        Some(self.pow(a, self.0.q - 2))
    }

    pub fn div(&self, a: Fq, b: Fq) -> Option<Fq> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    pub fn pow(&self, a: Fq, mut exp: u64) -> Fq {
        let mut acc = Fq::ONE;
        let mut base = a;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// x ↦ x^p.
    pub fn frobenius(&self, a: Fq) -> Fq {
        self.pow(a, self.0.p)
    }

    /// x ↦ x^(p^s); only s mod e matters.
    pub fn frobenius_pow(&self, a: Fq, s: u64) -> Fq {
        let s = s % self.0.e as u64;
        (0..s).fold(a, |x, _| self.frobenius(x))
    }

    /// The unique p-th root, x^(p^(e-1)).
    pub fn pth_root(&self, a: Fq) -> Fq {
        self.frobenius_pow(a, self.0.e as u64 - 1)
    }

    fn add_slow(&self, a: Fq, b: Fq) -> Fq {
        let p = self.0.p;
        if self.0.e == 1 {
            return Fq(((a.0 as u64 + b.0 as u64) % p) as u32);
        }
        let (ca, cb) = (self.coords(a), self.coords(b));
        let c: Vec<u64> = ca.iter().zip(&cb).map(|(x, y)| (x + y) % p).collect();
        self.from_coords(&c)
    }

    fn neg_slow(&self, a: Fq) -> Fq {
        let p = self.0.p;
        if self.0.e == 1 {
            return Fq(((p - a.0 as u64) % p) as u32);
        }
        let c: Vec<u64> = self.coords(a).iter().map(|x| (p - x) % p).collect();
        self.from_coords(&c)
    }

    fn mul_slow(&self, a: Fq, b: Fq) -> Fq {
        let p = self.0.p;
        if self.0.e == 1 {
            return Fq(((a.0 as u64 * b.0 as u64) % p) as u32);
        }
        let (ca, cb) = (self.coords(a), self.coords(b));
        let mut prod = vec![0u64; ca.len() + cb.len() - 1];
        for (i, x) in ca.iter().enumerate() {
            for (j, y) in cb.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        let mut r = fp_rem(&prod, &self.0.modulus, p);
        r.resize(self.0.e as usize, 0);
        self.from_coords(&r)
    }
}

fn build_tables(inner: &Inner) -> Tables {
    // A table-free view of the same field to fill the tables.
    let bare = Field(Arc::new(Inner {
        p: inner.p,
        e: inner.e,
        q: inner.q,
        modulus: inner.modulus.clone(),
        tables: None,
    }));
    let q = inner.q as usize;
    let mut add = vec![0u32; q * q];
    let mut mul = vec![0u32; q * q];
    let mut neg = vec![0u32; q];
    let mut inv = vec![0u32; q];
    for a in 0..q {
        neg[a] = bare.neg_slow(Fq(a as u32)).0;
        for b in 0..q {
            add[a * q + b] = bare.add_slow(Fq(a as u32), Fq(b as u32)).0;
            let m = bare.mul_slow(Fq(a as u32), Fq(b as u32)).0;
            mul[a * q + b] = m;
            if m == 1 {
                inv[a] = b as u32;
            }
        }
    }
    Tables { add, mul, neg, inv }
}
