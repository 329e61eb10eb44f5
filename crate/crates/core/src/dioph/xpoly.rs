//! Polynomials in X with coefficients in F_q[T].

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;

use crate::algebra::{AbsValue, Field, Fq, TPoly};
use crate::error::{Error, Result};
use crate::series::{next_horizon, Series};

/// P(X) = Σ c_i(T) X^i, no trailing zero coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct XPoly {
    field: Field,
    coeffs: Vec<TPoly>,
}

pub fn xpoly_height(p: &XPoly) -> Result<AbsValue> {
    p.height()
}

/// P(s) and its absolute value, refining a rule-backed `s` while the value
/// stays unresolved.
pub fn xpoly_eval(p: &XPoly, s: &Series, refinement_cap: u32) -> Result<(AbsValue, Series)> {
    let mut cur = s.clone();
    for _ in 0..=refinement_cap {
        let v = p.eval(&cur)?;
        let a = v.abs();
        if !matches!(a, AbsValue::Below(_)) || !cur.has_rule() {
            return Ok((a, v));
        }
        cur = cur.extend_to(&next_horizon(cur.horizon().expect("rule-backed series has a horizon")))?;
    }
    let v = p.eval(&cur)?;
    match v.abs() {
        AbsValue::Below(e) => Err(Error::PrecisionExhausted(e)),
        a => Ok((a, v)),
    }
}

impl XPoly {
    pub fn new(field: &Field, mut coeffs: Vec<TPoly>) -> XPoly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        XPoly { field: field.clone(), coeffs }
    }

    /// Coefficient i is given by the element codes `codes[i]` (ascending in T).
    pub fn from_codes(field: &Field, codes: &[&[u64]]) -> XPoly {
        XPoly::new(field, codes.iter().map(|c| TPoly::from_codes(field, c)).collect())
    }

    pub fn zero(field: &Field) -> XPoly {
        XPoly { field: field.clone(), coeffs: Vec::new() }
    }

    /// X
    pub fn x(field: &Field) -> XPoly {
        XPoly::new(field, vec![TPoly::zero(field), TPoly::one(field)])
    }

    pub fn constant(c: &TPoly) -> XPoly {
        XPoly::new(c.field(), vec![c.clone()])
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[TPoly] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> TPoly {
        self.coeffs.get(i).cloned().unwrap_or_else(|| TPoly::zero(&self.field))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn deg_x(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> &TPoly {
        self.coeffs.last().expect("leading coefficient of the zero polynomial")
    }

    /// log_q H(P): the largest coefficient degree.
    pub fn height_exponent(&self) -> Result<usize> {
        self.coeffs
            .iter()
            .filter_map(|c| c.degree())
            .max()
            .ok_or(Error::ZeroPolynomial)
    }

    pub fn height(&self) -> Result<AbsValue> {
        Ok(AbsValue::exact(-(self.height_exponent()? as i64)))
    }

    fn check(&self, other: &XPoly) {
        assert!(self.field == other.field, "X-polynomials over different fields");
    }

    pub fn add(&self, other: &XPoly) -> XPoly {
        self.check(other);
        let n = self.coeffs.len().max(other.coeffs.len());
        XPoly::new(&self.field, (0..n).map(|i| self.coeff(i).add(&other.coeff(i))).collect())
    }

    pub fn neg(&self) -> XPoly {
        XPoly::new(&self.field, self.coeffs.iter().map(TPoly::neg).collect())
    }

    pub fn sub(&self, other: &XPoly) -> XPoly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &TPoly) -> XPoly {
        XPoly::new(&self.field, self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    /// Multiplies by X^k.
    pub fn shift_x(&self, k: usize) -> XPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![TPoly::zero(&self.field); k];
        coeffs.extend(self.coeffs.iter().cloned());
        XPoly::new(&self.field, coeffs)
    }

    pub fn mul(&self, other: &XPoly) -> XPoly {
        self.check(other);
        if self.is_zero() || other.is_zero() {
            return XPoly::zero(&self.field);
        }
        let mut out = vec![TPoly::zero(&self.field); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        XPoly::new(&self.field, out)
    }

    /// dP/dX
    pub fn derivative(&self) -> XPoly {
        let f = &self.field;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.scale(f.from_u64(i as u64 % f.p())))
            .collect();
        XPoly::new(f, coeffs)
    }

    /// Monic gcd of the coefficients (zero for the zero polynomial).
    pub fn content(&self) -> TPoly {
        self.coeffs.iter().fold(TPoly::zero(&self.field), |g, c| g.gcd(c))
    }

    pub fn is_primitive(&self) -> bool {
        !self.is_zero() && self.content().degree() == Some(0)
    }

    /// P / content, scaled so the leading coefficient is monic.
    pub fn primitive_part(&self) -> XPoly {
        if self.is_zero() {
            return self.clone();
        }
        let c = self.content();
        let p = XPoly::new(
            &self.field,
            self.coeffs.iter().map(|a| a.div_exact(&c).expect("content divides")).collect(),
        );
        let inv = self.field.inv(p.leading().leading()).expect("nonzero leading coefficient");
        XPoly::new(&self.field, p.coeffs.iter().map(|a| a.scale(inv)).collect())
    }

    /// A remainder of `lc(b)^k · self` by `b`, with deg_X below deg_X b.
    pub fn pseudo_rem(&self, b: &XPoly) -> XPoly {
        let db = b.deg_x().expect("pseudo-division by zero");
        let lb = b.leading().clone();
        let mut r = self.clone();
        while let Some(dr) = r.deg_x() {
            if dr < db {
                break;
            }
            let lr = r.leading().clone();
            r = r.scale(&lb).sub(&b.scale(&lr).shift_x(dr - db));
        }
        r
    }

    /// gcd in F_q(T)[X], returned primitive with monic leading coefficient.
    pub fn gcd(&self, other: &XPoly) -> XPoly {
        let (mut a, mut b) = (self.primitive_part(), other.primitive_part());
        if a.deg_x() < b.deg_x() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b);
            a = b;
            b = r.primitive_part();
        }
        a.primitive_part()
    }

    /// Exact quotient in F_q[T][X].
    pub fn div_exact(&self, b: &XPoly) -> Result<XPoly> {
        let db = b.deg_x().ok_or(Error::DivisionByZeroPoly)?;
        let f = &self.field;
        let mut r = self.clone();
        let mut q = vec![TPoly::zero(f); self.coeffs.len().saturating_sub(db)];
        while let Some(dr) = r.deg_x() {
            if dr < db {
                return Err(Error::InvalidArgument(format!("{b} does not divide {self}")));
            }
            let t = r.leading().div_exact(b.leading())?;
            r = r.sub(&b.scale(&t).shift_x(dr - db));
            q[dr - db] = t;
        }
        Ok(XPoly::new(f, q))
    }

    /// Q with Q(X^p) = P, when every X-exponent of P is a multiple of p.
    pub fn deflate(&self) -> Option<XPoly> {
        let p = self.field.p() as usize;
        let ok = self.coeffs.iter().enumerate().all(|(i, c)| i % p == 0 || c.is_zero());
        ok.then(|| XPoly::new(&self.field, self.coeffs.iter().step_by(p).cloned().collect()))
    }

    /// P(s), evaluating only the nonzero terms; powers of s use Frobenius on
    /// the base-p digits of the exponent.
    pub fn eval(&self, s: &Series) -> Result<Series> {
        if s.field() != &self.field {
            return Err(Error::FieldMismatch);
        }
        let mut acc = Series::zero(&self.field);
        let p = self.field.p();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let power = if i > 1 && is_power_of(i as u64, p) {
                s.frobenius(&BigUint::from(i))?
            } else {
                s.pow(i as u64)?
            };
            acc = acc.add(&Series::from_tpoly(c).mul(&power));
        }
        Ok(acc)
    }
}

fn is_power_of(mut x: u64, p: u64) -> bool {
    while x > 1 {
        let (q, r) = x.div_rem(&p);
        if r != 0 {
            return false;
        }
        x = q;
    }
    x == 1
}

impl fmt::Display for XPoly {
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
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*X")?,
                _ => write!(f, "({c})*X^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for XPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "XPoly({self})")
    }
}

/// Uniformly random polynomial with deg_X ≤ `max_deg_x` and coefficient
/// degrees ≤ `max_deg_t`, drawn from `next` (a source of element codes).
pub fn random_xpoly(field: &Field, max_deg_x: usize, max_deg_t: usize, mut next: impl FnMut() -> u64) -> XPoly {
    let coeffs = (0..=max_deg_x)
        .map(|_| {
            let codes: Vec<Fq> = (0..=max_deg_t)
                .map(|_| field.elem(next() % field.q()).expect("code below q"))
                .collect();
            TPoly::new(field, codes)
        })
        .collect();
    XPoly::new(field, coeffs)
}
