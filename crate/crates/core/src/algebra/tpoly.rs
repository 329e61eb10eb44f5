//! Dense polynomials in F_q[T].

use std::fmt;

use crate::algebra::abs::AbsValue;
use crate::algebra::field::{Field, Fq};
use crate::error::{Error, Result};

/// An element of F_q[T], coefficients in ascending powers of T.
///
/// The coefficient vector never has a trailing zero, so the zero polynomial
/// is the empty vector.
#[derive(Clone, PartialEq, Eq)]
pub struct TPoly {
    field: Field,
    coeffs: Vec<Fq>,
}

/// Binary operations accepted by [`tpoly_arith`].
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum TPolyOp {
    Add,
    Sub,
    Mul,
    DivRem,
    Gcd,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TPolyResult {
    Single(TPoly),
    Pair(TPoly, TPoly),
}

/// Checked ring arithmetic in F_q[T].
pub fn tpoly_arith(a: &TPoly, b: &TPoly, op: TPolyOp) -> Result<TPolyResult> {
    if a.field != b.field {
        return Err(Error::FieldMismatch);
    }
    Ok(match op {
        TPolyOp::Add => TPolyResult::Single(a.add(b)),
        TPolyOp::Sub => TPolyResult::Single(a.sub(b)),
        TPolyOp::Mul => TPolyResult::Single(a.mul(b)),
        TPolyOp::DivRem => {
            let (q, r) = a.divrem(b)?;
            TPolyResult::Pair(q, r)
        }
        TPolyOp::Gcd => TPolyResult::Single(a.gcd(b)),
    })
}

/// Splits a vector of polynomials into its monic gcd and the primitive
/// quotient vector.
pub fn tpoly_content_primitive(v: &[TPoly]) -> Result<(TPoly, Vec<TPoly>)> {
    let first = v.iter().find(|c| !c.is_zero()).ok_or(Error::AllZero)?;
    if v.iter().any(|c| c.field != first.field) {
        return Err(Error::FieldMismatch);
    }
    let content = v.iter().fold(TPoly::zero(&first.field), |g, c| g.gcd(c));
    let prim = v
        .iter()
        .map(|c| c.div_exact(&content))
        .collect::<Result<Vec<_>>>()?;
    Ok((content, prim))
}

impl TPoly {
    pub fn new(field: &Field, mut coeffs: Vec<Fq>) -> TPoly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        TPoly { field: field.clone(), coeffs }
    }

    /// Builds a polynomial from element codes; panics on codes ≥ q.
    pub fn from_codes(field: &Field, codes: &[u64]) -> TPoly {
        let coeffs = codes
            .iter()
            .map(|&c| field.elem(c).expect("coefficient code out of range"))
            .collect();
        TPoly::new(field, coeffs)
    }

    pub fn zero(field: &Field) -> TPoly {
        TPoly { field: field.clone(), coeffs: Vec::new() }
    }

    pub fn one(field: &Field) -> TPoly {
        TPoly::constant(field, Fq::ONE)
    }

    pub fn constant(field: &Field, c: Fq) -> TPoly {
        TPoly::new(field, vec![c])
    }

    /// c·T^d
    pub fn monomial(field: &Field, c: Fq, d: usize) -> TPoly {
        if c.is_zero() {
            return TPoly::zero(field);
        }
        let mut coeffs = vec![Fq::ZERO; d + 1];
        coeffs[d] = c;
        TPoly { field: field.clone(), coeffs }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[Fq] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Fq {
        self.coeffs.get(i).copied().unwrap_or(Fq::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial (degree −∞).
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Fq {
        self.coeffs.last().copied().unwrap_or(Fq::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Fq::ONE
    }

    /// |a| = q^{deg a}, |0| = 0.
    pub fn abs(&self) -> AbsValue {
        match self.degree() {
            None => AbsValue::Zero,
            Some(d) => AbsValue::exact(-(d as i64)),
        }
    }

    fn check(&self, other: &TPoly) {
        assert!(self.field == other.field, "F_q[T] operands over different fields");
    }

    pub fn add(&self, other: &TPoly) -> TPoly {
        self.check(other);
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| self.field.add(self.coeff(i), other.coeff(i)))
            .collect();
        TPoly::new(&self.field, coeffs)
    }

    pub fn neg(&self) -> TPoly {
        let coeffs = self.coeffs.iter().map(|&c| self.field.neg(c)).collect();
        TPoly::new(&self.field, coeffs)
    }

    pub fn sub(&self, other: &TPoly) -> TPoly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: Fq) -> TPoly {
        let coeffs = self.coeffs.iter().map(|&a| self.field.mul(a, c)).collect();
        TPoly::new(&self.field, coeffs)
    }

    /// Multiplies by T^k.
    pub fn shift(&self, k: usize) -> TPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![Fq::ZERO; k];
        coeffs.extend_from_slice(&self.coeffs);
        TPoly { field: self.field.clone(), coeffs }
    }

    pub fn mul(&self, other: &TPoly) -> TPoly {
        self.check(other);
        if self.is_zero() || other.is_zero() {
            return TPoly::zero(&self.field);
        }
        let f = &self.field;
        let mut out = vec![Fq::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = f.add(out[i + j], f.mul(a, b));
                }
            }
        }
        TPoly::new(f, out)
    }

    pub fn pow(&self, mut e: u32) -> TPoly {
        let mut acc = TPoly::one(&self.field);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Euclidean division: `self = q·b + r` with `deg r < deg b`.
    pub fn divrem(&self, b: &TPoly) -> Result<(TPoly, TPoly)> {
        if self.field != b.field {
            return Err(Error::FieldMismatch);
        }
        let db = b.degree().ok_or(Error::DivisionByZeroPoly)?;
        let f = &self.field;
        let lead_inv = f.inv(b.leading()).expect("nonzero leading coefficient");
        let mut r = self.coeffs.clone();
        if r.len() <= db {
            return Ok((TPoly::zero(f), self.clone()));
        }
        let mut q = vec![Fq::ZERO; r.len() - db];
        for top in (db..r.len()).rev() {
            let c = f.mul(r[top], lead_inv);
            if c.is_zero() {
                continue;
            }
            q[top - db] = c;
            for (i, &bi) in b.coeffs.iter().enumerate() {
                let idx = top - db + i;
                r[idx] = f.sub(r[idx], f.mul(c, bi));
            }
        }
        Ok((TPoly::new(f, q), TPoly::new(f, r)))
    }

    /// Quotient of an exact division; errors if the remainder is nonzero.
    pub fn div_exact(&self, b: &TPoly) -> Result<TPoly> {
        let (q, r) = self.divrem(b)?;
        if !r.is_zero() {
            return Err(Error::InvalidArgument(format!("{b} does not divide {self}")));
        }
        Ok(q)
    }

    pub fn monic(&self) -> TPoly {
        match self.field.inv(self.leading()) {
            Some(inv) => self.scale(inv),
            None => self.clone(),
        }
    }

    /// Monic gcd; gcd(0, 0) = 0.
    pub fn gcd(&self, other: &TPoly) -> TPoly {
        self.check(other);
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.divrem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Evaluation at a field element.
    pub fn eval(&self, x: Fq) -> Fq {
        self.coeffs
            .iter()
            .rev()
            .fold(Fq::ZERO, |acc, &c| self.field.add(self.field.mul(acc, x), c))
    }
}

impl fmt::Display for TPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            let code = c.code();
            match (i, code) {
                (0, _) => write!(f, "{code}")?,
                (1, 1) => write!(f, "T")?,
                (1, _) => write!(f, "{code}*T")?,
                (_, 1) => write!(f, "T^{i}")?,
                (_, _) => write!(f, "{code}*T^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for TPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TPoly({self})")
    }
}
