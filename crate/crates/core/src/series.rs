//! Laurent series in T^{-1} over F_q with sparse, unbounded exponents.
//!
//! A [`Series`] stores the nonzero coefficients it knows as a map from the
//! exponent n (the series is Σ a_n T^{-n}) to a_n, together with a
//! [`Precision`]: either the series is a finite sum and nothing is missing,
//! or every coefficient with n ≤ K is known and nothing beyond K is. A
//! series may also carry a [`CoeffRule`], a pure description of all of its
//! coefficients, which lets it be re-materialized at a larger horizon.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebra::{AbsValue, Field, Fq, TPoly};
use crate::error::{Error, Result};

/// Largest window a dense expansion (rational long division, scan windows)
/// is allowed to allocate.
pub const DENSE_EXPONENT_BUDGET: u64 = 1 << 24;

/// How far the coefficients of a series are known.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Precision {
    /// A finite sum: every coefficient not stored is zero.
    Exact,
    /// Coefficients with exponent ≤ K are known; the rest are unknown.
    Horizon(BigInt),
}

impl Precision {
    fn min(&self, other: &Precision) -> Precision {
        match (self, other) {
            (Precision::Exact, p) | (p, Precision::Exact) => p.clone(),
            (Precision::Horizon(a), Precision::Horizon(b)) => Precision::Horizon(a.min(b).clone()),
        }
    }

    fn shifted(&self, by: &BigInt) -> Precision {
        match self {
            Precision::Exact => Precision::Exact,
            Precision::Horizon(k) => Precision::Horizon(k + by),
        }
    }

    fn covers(&self, n: &BigInt) -> bool {
        match self {
            Precision::Exact => true,
            Precision::Horizon(k) => n <= k,
        }
    }
}

/// A pure rule producing every coefficient of a conceptually infinite series.
pub trait CoeffRule: Send + Sync + fmt::Debug {
    /// The coefficient of T^{-n}.
    fn coeff(&self, n: &BigInt) -> Fq;

    /// All nonzero coefficients with exponent ≤ `horizon`, ascending.
    fn support_upto(&self, horizon: &BigInt) -> Result<Vec<(BigInt, Fq)>>;
}

/// Σ c_i · rule_i
#[derive(Debug)]
pub struct LinearRule {
    field: Field,
    parts: Vec<(Fq, Arc<dyn CoeffRule>)>,
}

impl LinearRule {
    pub fn new(field: &Field, parts: Vec<(Fq, Arc<dyn CoeffRule>)>) -> LinearRule {
        LinearRule { field: field.clone(), parts }
    }
}

impl CoeffRule for LinearRule {
    fn coeff(&self, n: &BigInt) -> Fq {
        self.parts.iter().fold(Fq::ZERO, |acc, (c, r)| {
            self.field.add(acc, self.field.mul(*c, r.coeff(n)))
        })
    }

    fn support_upto(&self, horizon: &BigInt) -> Result<Vec<(BigInt, Fq)>> {
        let mut acc: BTreeMap<BigInt, Fq> = BTreeMap::new();
        for (c, rule) in &self.parts {
            for (n, a) in rule.support_upto(horizon)? {
                let term = self.field.mul(*c, a);
                let slot = acc.entry(n).or_insert(Fq::ZERO);
                *slot = self.field.add(*slot, term);
            }
        }
        Ok(acc.into_iter().filter(|(_, a)| !a.is_zero()).collect())
    }
}

/// A finite set of terms.
#[derive(Debug)]
pub struct FiniteRule {
    terms: BTreeMap<BigInt, Fq>,
}

impl FiniteRule {
    pub fn new(terms: BTreeMap<BigInt, Fq>) -> FiniteRule {
        FiniteRule { terms }
    }
}

impl CoeffRule for FiniteRule {
    fn coeff(&self, n: &BigInt) -> Fq {
        self.terms.get(n).copied().unwrap_or(Fq::ZERO)
    }

    fn support_upto(&self, horizon: &BigInt) -> Result<Vec<(BigInt, Fq)>> {
        Ok(self
            .terms
            .range(..=horizon.clone())
            .map(|(n, a)| (n.clone(), *a))
            .collect())
    }
}

/// x ↦ x^t for t = p^s.
#[derive(Debug)]
struct FrobeniusRule {
    field: Field,
    inner: Arc<dyn CoeffRule>,
    t: BigInt,
    s: u64,
}

impl CoeffRule for FrobeniusRule {
    fn coeff(&self, n: &BigInt) -> Fq {
        let (q, r) = n.div_rem(&self.t);
        if !r.is_zero() {
            return Fq::ZERO;
        }
        self.field.frobenius_pow(self.inner.coeff(&q), self.s)
    }

    fn support_upto(&self, horizon: &BigInt) -> Result<Vec<(BigInt, Fq)>> {
        let inner_h = horizon.div_floor(&self.t);
        Ok(self
            .inner
            .support_upto(&inner_h)?
            .into_iter()
            .map(|(n, a)| (n * &self.t, self.field.frobenius_pow(a, self.s)))
            .collect())
    }
}

#[derive(Debug)]
struct PthRootRule {
    field: Field,
    inner: Arc<dyn CoeffRule>,
}

impl CoeffRule for PthRootRule {
    fn coeff(&self, n: &BigInt) -> Fq {
        let p = BigInt::from(self.field.p());
        self.field.pth_root(self.inner.coeff(&(n * p)))
    }

    fn support_upto(&self, horizon: &BigInt) -> Result<Vec<(BigInt, Fq)>> {
        let p = BigInt::from(self.field.p());
        let mut out = Vec::new();
        for (n, a) in self.inner.support_upto(&(horizon * &p))? {
            let (q, r) = n.div_rem(&p);
            if r.is_zero() {
                out.push((q, self.field.pth_root(a)));
            }
        }
        Ok(out)
    }
}

#[derive(Debug)]
struct ShiftRule {
    inner: Arc<dyn CoeffRule>,
    d: BigInt,
}

impl CoeffRule for ShiftRule {
    fn coeff(&self, n: &BigInt) -> Fq {
        self.inner.coeff(&(n + &self.d))
    }

    fn support_upto(&self, horizon: &BigInt) -> Result<Vec<(BigInt, Fq)>> {
        Ok(self
            .inner
            .support_upto(&(horizon + &self.d))?
            .into_iter()
            .map(|(n, a)| (n - &self.d, a))
            .collect())
    }
}

/// Expansion of num/den at T = ∞ by power-series division in T^{-1}.
#[derive(Debug)]
pub struct RationalRule {
    field: Field,
    num: TPoly,
    den: TPoly,
}

impl RationalRule {
    fn expand(&self, horizon: &BigInt) -> Result<Vec<(BigInt, Fq)>> {
        let f = &self.field;
        let (Some(da), Some(db)) = (self.num.degree(), self.den.degree()) else {
            return Ok(Vec::new());
        };
        // exponent n of T^{-n} corresponds to index k = n + da - db
        let offset = da as i64 - db as i64;
        let last_k = horizon + BigInt::from(offset);
        if last_k.is_negative() {
            return Ok(Vec::new());
        }
        let last_k = last_k
            .to_u64()
            .filter(|&k| k < DENSE_EXPONENT_BUDGET)
            .ok_or_else(|| Error::ExponentBudgetExceeded {
                needed: last_k.to_string(),
                budget: DENSE_EXPONENT_BUDGET,
            })? as usize;
        // reversed coefficients: num = T^da · Σ ã_i T^{-i}, den likewise
        let a_rev: Vec<Fq> = self.num.coeffs().iter().rev().copied().collect();
        let b_rev: Vec<Fq> = self.den.coeffs().iter().rev().copied().collect();
        let b0_inv = f.inv(b_rev[0]).expect("leading coefficient is nonzero");
        let mut c = vec![Fq::ZERO; last_k + 1];
        for k in 0..=last_k {
            let mut acc = a_rev.get(k).copied().unwrap_or(Fq::ZERO);
            for i in 1..b_rev.len().min(k + 1) {
                acc = f.sub(acc, f.mul(b_rev[i], c[k - i]));
            }
            c[k] = f.mul(acc, b0_inv);
        }
        Ok(c
            .into_iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero())
            .map(|(k, a)| (BigInt::from(k as i64 - offset), a))
            .collect())
    }
}

impl CoeffRule for RationalRule {
    fn coeff(&self, n: &BigInt) -> Fq {
        self.expand(n)
            .ok()
            .and_then(|terms| terms.into_iter().find(|(m, _)| m == n).map(|(_, a)| a))
            .unwrap_or(Fq::ZERO)
    }

    fn support_upto(&self, horizon: &BigInt) -> Result<Vec<(BigInt, Fq)>> {
        self.expand(horizon)
    }
}

/// A Laurent series Σ a_n T^{-n} with explicit precision.
#[derive(Clone)]
pub struct Series {
    field: Field,
    terms: BTreeMap<BigInt, Fq>,
    precision: Precision,
    rule: Option<Arc<dyn CoeffRule>>,
}

/// Operations accepted by [`series_arith`].
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum SeriesOp {
    Add,
    Sub,
    Mul,
}

pub fn series_arith(x: &Series, y: &Series, op: SeriesOp) -> Result<Series> {
    if x.field != y.field {
        return Err(Error::FieldMismatch);
    }
    Ok(match op {
        SeriesOp::Add => x.add(y),
        SeriesOp::Sub => x.sub(y),
        SeriesOp::Mul => x.mul(y),
    })
}

/// Laurent expansion of a/b, exact through exponent `horizon`.
pub fn series_from_rational(a: &TPoly, b: &TPoly, horizon: impl Into<BigInt>) -> Result<Series> {
    if b.is_zero() {
        return Err(Error::DivisionByZeroPoly);
    }
    if a.field() != b.field() {
        return Err(Error::FieldMismatch);
    }
    let field = a.field().clone();
    let g = a.gcd(b);
    let (num, den) = if g.is_zero() {
        (a.clone(), b.clone())
    } else {
        (a.div_exact(&g)?, b.div_exact(&g)?)
    };
    // finite expansion iff the reduced denominator is a monomial c·T^k
    let den_terms = den.coeffs().iter().filter(|c| !c.is_zero()).count();
    if den_terms == 1 {
        let k = den.degree().unwrap() as i64;
        let inv = field.inv(den.leading()).unwrap();
        let terms = num
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, &c)| (BigInt::from(k - i as i64), field.mul(c, inv)))
            .collect();
        return Ok(Series::exact(&field, terms));
    }
    let rule = RationalRule { field: field.clone(), num, den };
    Series::from_rule(&field, Arc::new(rule), horizon.into())
}

pub fn series_coeff(s: &Series, n: &BigInt) -> Result<Fq> {
    s.coeff(n)
}

pub fn series_abs(s: &Series) -> AbsValue {
    s.abs()
}

pub fn series_pow_frobenius(x: &Series, t: &BigUint) -> Result<Series> {
    x.frobenius(t)
}

pub fn series_pth_root(x: &Series) -> Result<Series> {
    x.pth_root()
}

pub fn series_dist(x: &Series, y: &Series) -> Result<AbsValue> {
    if x.field != y.field {
        return Err(Error::FieldMismatch);
    }
    Ok(x.sub(y).abs())
}

/// Writes t = p^s, or fails.
fn log_p(t: &BigUint, p: u64) -> Option<u64> {
    if t.is_zero() {
        return None;
    }
    let p = BigUint::from(p);
    let mut s = 0u64;
    let mut rest = t.clone();
    while !rest.is_one() {
        let (q, r) = rest.div_rem(&p);
        if !r.is_zero() {
            return None;
        }
        rest = q;
        s += 1;
    }
    Some(s)
}

impl Series {
    /// The finite sum of the given terms; zero coefficients are dropped.
    pub fn exact(field: &Field, terms: BTreeMap<BigInt, Fq>) -> Series {
        let terms = terms.into_iter().filter(|(_, a)| !a.is_zero()).collect();
        Series { field: field.clone(), terms, precision: Precision::Exact, rule: None }
    }

    pub fn zero(field: &Field) -> Series {
        Series::exact(field, BTreeMap::new())
    }

    /// c·T^{-n}
    pub fn monomial(field: &Field, c: Fq, n: impl Into<BigInt>) -> Series {
        Series::exact(field, BTreeMap::from([(n.into(), c)]))
    }

    /// Known terms through `horizon`, nothing known beyond.
    pub fn truncated(field: &Field, terms: BTreeMap<BigInt, Fq>, horizon: BigInt) -> Series {
        let terms = terms
            .into_iter()
            .filter(|(n, a)| !a.is_zero() && *n <= horizon)
            .collect();
        Series { field: field.clone(), terms, precision: Precision::Horizon(horizon), rule: None }
    }

    pub fn from_tpoly(a: &TPoly) -> Series {
        let terms = a
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, &c)| (BigInt::from(-(i as i64)), c))
            .collect();
        Series::exact(a.field(), terms)
    }

    /// Materializes a rule through `horizon`.
    pub fn from_rule(field: &Field, rule: Arc<dyn CoeffRule>, horizon: BigInt) -> Result<Series> {
        let terms = rule
            .support_upto(&horizon)?
            .into_iter()
            .filter(|(_, a)| !a.is_zero())
            .collect();
        Ok(Series { field: field.clone(), terms, precision: Precision::Horizon(horizon), rule: Some(rule) })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn precision(&self) -> &Precision {
        &self.precision
    }

    /// The horizon K, or `None` for a finite (exact) series.
    pub fn horizon(&self) -> Option<&BigInt> {
        match &self.precision {
            Precision::Exact => None,
            Precision::Horizon(k) => Some(k),
        }
    }

    pub fn rule(&self) -> Option<&Arc<dyn CoeffRule>> {
        self.rule.as_ref()
    }

    pub fn has_rule(&self) -> bool {
        self.rule.is_some()
    }

    /// Nonzero known coefficients, ascending exponent.
    pub fn terms(&self) -> &BTreeMap<BigInt, Fq> {
        &self.terms
    }

    /// Least exponent with a nonzero known coefficient.
    pub fn valuation(&self) -> Option<&BigInt> {
        self.terms.keys().next()
    }

    /// A lower bound for the true valuation (K + 1 when nothing is known).
    fn valuation_bound(&self) -> Option<BigInt> {
        match (self.valuation(), &self.precision) {
            (Some(v), _) => Some(v.clone()),
            (None, Precision::Horizon(k)) => Some(k + 1),
            (None, Precision::Exact) => None,
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.precision == Precision::Exact
    }

    /// The coefficient of T^{-n}; past the horizon only if a rule is present.
    pub fn coeff(&self, n: &BigInt) -> Result<Fq> {
        if self.precision.covers(n) {
            return Ok(self.terms.get(n).copied().unwrap_or(Fq::ZERO));
        }
        match &self.rule {
            Some(rule) => Ok(rule.coeff(n)),
            None => Err(Error::BeyondHorizon {
                requested: n.clone(),
                horizon: self.horizon().cloned().unwrap_or_default(),
            }),
        }
    }

    /// Re-materializes a rule-backed series at a larger horizon. Series
    /// without a rule, or already past `horizon`, are returned unchanged.
    pub fn extend_to(&self, horizon: &BigInt) -> Result<Series> {
        match (&self.rule, &self.precision) {
            (Some(rule), Precision::Horizon(k)) if horizon > k => {
                Series::from_rule(&self.field, rule.clone(), horizon.clone())
            }
            _ => Ok(self.clone()),
        }
    }

    /// Drops everything past `horizon`.
    pub fn truncate(&self, horizon: &BigInt) -> Series {
        if let Precision::Horizon(k) = &self.precision {
            if k <= horizon {
                return self.clone();
            }
        }
        Series {
            field: self.field.clone(),
            terms: self.terms.range(..=horizon.clone()).map(|(n, a)| (n.clone(), *a)).collect(),
            precision: Precision::Horizon(horizon.clone()),
            rule: self.rule.clone(),
        }
    }

    /// |s| per the precision contract: exact if a nonzero coefficient is
    /// known, zero for the literal zero series, otherwise `Below(K + 1)`.
    pub fn abs(&self) -> AbsValue {
        match (self.valuation(), &self.precision) {
            (Some(v), _) => AbsValue::Exact(v.clone()),
            (None, Precision::Exact) => AbsValue::Zero,
            (None, Precision::Horizon(k)) => AbsValue::Below(k + 1),
        }
    }

    /// |s|, doubling the horizon of a rule-backed series up to
    /// `max_doublings` times while the value is unresolved.
    pub fn abs_refined(&self, max_doublings: u32) -> Result<AbsValue> {
        let mut cur = self.clone();
        for _ in 0..=max_doublings {
            let a = cur.abs();
            if !matches!(a, AbsValue::Below(_)) || !cur.has_rule() {
                return Ok(a);
            }
            let next = next_horizon(cur.horizon().unwrap());
            cur = cur.extend_to(&next)?;
        }
        match cur.abs() {
            AbsValue::Below(v) => Err(Error::PrecisionExhausted(v)),
            a => Ok(a),
        }
    }

    fn check(&self, other: &Series) {
        assert!(self.field == other.field, "series over different fields");
    }

    fn finite_rule(&self) -> Arc<dyn CoeffRule> {
        Arc::new(FiniteRule::new(self.terms.clone()))
    }

    /// The rule describing all coefficients, if they are all determined.
    fn full_rule(&self) -> Option<Arc<dyn CoeffRule>> {
        match (&self.rule, &self.precision) {
            (Some(r), _) => Some(r.clone()),
            (None, Precision::Exact) => Some(self.finite_rule()),
            (None, Precision::Horizon(_)) => None,
        }
    }

    fn combine(&self, other: &Series, c: Fq) -> Series {
        self.check(other);
        let f = &self.field;
        let precision = self.precision.min(&other.precision);
        let mut terms = self.terms.clone();
        for (n, a) in &other.terms {
            if !precision.covers(n) {
                continue;
            }
            let slot = terms.entry(n.clone()).or_insert(Fq::ZERO);
            *slot = f.add(*slot, f.mul(c, *a));
        }
        terms.retain(|n, a| !a.is_zero() && precision.covers(n));
        let rule = if self.rule.is_none() && other.rule.is_none() {
            None
        } else {
            match (self.full_rule(), other.full_rule()) {
                (Some(a), Some(b)) => {
                    Some(Arc::new(LinearRule::new(f, vec![(Fq::ONE, a), (c, b)])) as Arc<dyn CoeffRule>)
                }
                _ => None,
            }
        };
        let precision = if rule.is_none() && precision == Precision::Exact {
            Precision::Exact
        } else {
            precision
        };
        Series { field: f.clone(), terms, precision, rule }
    }

    pub fn add(&self, other: &Series) -> Series {
        self.combine(other, Fq::ONE)
    }

    pub fn sub(&self, other: &Series) -> Series {
        self.combine(other, self.field.neg(Fq::ONE))
    }

    pub fn neg(&self) -> Series {
        self.scale(self.field.neg(Fq::ONE))
    }

    pub fn scale(&self, c: Fq) -> Series {
        let f = &self.field;
        if c.is_zero() {
            return Series { precision: self.precision.clone(), terms: BTreeMap::new(), rule: None, field: f.clone() }
                .with_zero_rule(self.rule.is_some());
        }
        Series {
            field: f.clone(),
            terms: self.terms.iter().map(|(n, a)| (n.clone(), f.mul(c, *a))).collect(),
            precision: self.precision.clone(),
            rule: self
                .rule
                .as_ref()
                .map(|r| Arc::new(LinearRule::new(f, vec![(c, r.clone())])) as Arc<dyn CoeffRule>),
        }
    }

    fn with_zero_rule(mut self, yes: bool) -> Series {
        if yes {
            self.rule = Some(Arc::new(FiniteRule::new(BTreeMap::new())));
        }
        self
    }

    /// Truncated product. The horizon is min(K_x + N_y, K_y + N_x).
    pub fn mul(&self, other: &Series) -> Series {
        self.check(other);
        let f = &self.field;
        if self.is_exact_zero() || other.is_exact_zero() {
            return Series::zero(f);
        }
        let nx = self.valuation_bound().unwrap();
        let ny = other.valuation_bound().unwrap();
        let precision = self.precision.shifted(&ny).min(&other.precision.shifted(&nx));
        let mut terms: BTreeMap<BigInt, Fq> = BTreeMap::new();
        for (n, a) in &self.terms {
            for (m, b) in &other.terms {
                let e = n + m;
                if !precision.covers(&e) {
                    // exponents only grow along the inner map
                    break;
                }
                let slot = terms.entry(e).or_insert(Fq::ZERO);
                *slot = f.add(*slot, f.mul(*a, *b));
            }
        }
        terms.retain(|_, a| !a.is_zero());
        Series { field: f.clone(), terms, precision, rule: None }
    }

    /// x^t for t a power of p: exponents scale by t and coefficients are
    /// raised to the t-th power; the horizon scales by t.
    pub fn frobenius(&self, t: &BigUint) -> Result<Series> {
        let s = log_p(t, self.field.p())
            .ok_or_else(|| Error::NotAPowerOfCharacteristic(t.to_string()))?;
        let t = BigInt::from(t.clone());
        let f = &self.field;
        Ok(Series {
            field: f.clone(),
            terms: self
                .terms
                .iter()
                .map(|(n, a)| (n * &t, f.frobenius_pow(*a, s)))
                .collect(),
            precision: match &self.precision {
                Precision::Exact => Precision::Exact,
                Precision::Horizon(k) => Precision::Horizon(k * &t),
            },
            rule: self.rule.as_ref().map(|r| {
                Arc::new(FrobeniusRule { field: f.clone(), inner: r.clone(), t: t.clone(), s })
                    as Arc<dyn CoeffRule>
            }),
        })
    }

    /// Multiplies by T^d: every exponent n becomes n - d.
    pub fn shift(&self, d: &BigInt) -> Series {
        let neg = -d;
        Series {
            field: self.field.clone(),
            terms: self.terms.iter().map(|(n, a)| (n - d, *a)).collect(),
            precision: self.precision.shifted(&neg),
            rule: self.rule.as_ref().map(|r| {
                Arc::new(ShiftRule { inner: r.clone(), d: d.clone() }) as Arc<dyn CoeffRule>
            }),
        }
    }

    /// Inverse of Frobenius; every known exponent must be divisible by p.
    pub fn pth_root(&self) -> Result<Series> {
        let f = &self.field;
        let p = BigInt::from(f.p());
        let mut terms = BTreeMap::new();
        for (n, a) in &self.terms {
            let (q, r) = n.div_rem(&p);
            if !r.is_zero() {
                return Err(Error::NotAPthPower(n.clone()));
            }
            terms.insert(q, f.pth_root(*a));
        }
        Ok(Series {
            field: f.clone(),
            terms,
            precision: match &self.precision {
                Precision::Exact => Precision::Exact,
                Precision::Horizon(k) => Precision::Horizon(k.div_floor(&p)),
            },
            rule: self.rule.as_ref().map(|r| {
                Arc::new(PthRootRule { field: f.clone(), inner: r.clone() }) as Arc<dyn CoeffRule>
            }),
        })
    }

    /// x^k by Frobenius on the base-p digits of k.
    pub fn pow(&self, k: u64) -> Result<Series> {
        let p = self.field.p();
        let mut acc = Series::monomial(&self.field, Fq::ONE, 0);
        let mut frob = self.clone();
        let mut rest = k;
        let mut first = true;
        while rest > 0 {
            if !first {
                frob = frob.frobenius(&BigUint::from(p))?;
            }
            first = false;
            for _ in 0..rest % p {
                acc = acc.mul(&frob);
            }
            rest /= p;
        }
        Ok(acc)
    }

    /// Coefficients for exponents lo..=hi as a dense vector.
    pub fn dense_window(&self, lo: i64, hi: i64) -> Result<Vec<Fq>> {
        if !self.precision.covers(&BigInt::from(hi)) {
            return Err(Error::BeyondHorizon {
                requested: BigInt::from(hi),
                horizon: self.horizon().cloned().unwrap_or_default(),
            });
        }
        let len = (hi - lo + 1).max(0) as usize;
        let mut out = vec![Fq::ZERO; len];
        for (n, a) in self.terms.range(BigInt::from(lo)..=BigInt::from(hi)) {
            out[(n.to_i64().unwrap() - lo) as usize] = *a;
        }
        Ok(out)
    }

    /// The part with exponents ≤ 0 (the polynomial part) as a polynomial in T.
    pub fn polynomial_part(&self) -> TPoly {
        let f = &self.field;
        let mut coeffs = Vec::new();
        for (n, a) in self.terms.range(..=BigInt::zero()) {
            let d = (-n).to_usize().expect("polynomial part degree fits in usize");
            if coeffs.len() <= d {
                coeffs.resize(d + 1, Fq::ZERO);
            }
            coeffs[d] = *a;
        }
        TPoly::new(f, coeffs)
    }
}

/// Next horizon in an adaptive refinement loop.
pub fn next_horizon(k: &BigInt) -> BigInt {
    let floor = BigInt::from(64);
    if *k < floor {
        floor
    } else {
        k * 2
    }
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Series({self})")
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const SHOWN: usize = 8;
        if self.terms.is_empty() {
            write!(f, "0")?;
        }
        for (i, (n, a)) in self.terms.iter().take(SHOWN).enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            if *a != Fq::ONE {
                write!(f, "{a}*")?;
            }
            if n.is_zero() {
                write!(f, "1")?;
            } else {
                write!(f, "T^{}", -n)?;
            }
        }
        if self.terms.len() > SHOWN {
            write!(f, "+...")?;
        }
        if let Precision::Horizon(k) = &self.precision {
            write!(f, " [K={k}]")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(p: u64) -> Field {
        Field::prime(p).unwrap()
    }

    fn mono(field: &Field, n: i64) -> Series {
        Series::monomial(field, Fq::ONE, n)
    }

    /// Mahler's α = Σ T^{-r^n} as a rule, independent of the mahler module.
    #[derive(Debug)]
    struct PowersOf(u64);

    impl CoeffRule for PowersOf {
        fn coeff(&self, n: &BigInt) -> Fq {
            let mut x = BigInt::from(self.0);
            while &x < n {
                x *= self.0;
            }
            if &x == n { Fq::ONE } else { Fq::ZERO }
        }
        fn support_upto(&self, horizon: &BigInt) -> Result<Vec<(BigInt, Fq)>> {
            let mut out = Vec::new();
            let mut x = BigInt::from(self.0);
            while &x <= horizon {
                out.push((x.clone(), Fq::ONE));
                x *= self.0;
            }
            Ok(out)
        }
    }

    fn alpha(field: &Field, r: u64, horizon: i64) -> Series {
        Series::from_rule(field, Arc::new(PowersOf(r)), BigInt::from(horizon)).unwrap()
    }

    #[test]
    fn geometric_series() {
        let f3 = f(3);
        let one = TPoly::one(&f3);
        let t_minus_1 = TPoly::from_codes(&f3, &[2, 1]);
        let s = series_from_rational(&one, &t_minus_1, 5).unwrap();
        let expected: BTreeMap<BigInt, Fq> = (1..=5).map(|n| (BigInt::from(n), Fq::ONE)).collect();
        assert_eq!(s.terms(), &expected);
        assert_eq!(s.horizon(), Some(&BigInt::from(5)));
        // b·s − a vanishes through the horizon
        let back = Series::from_tpoly(&t_minus_1).mul(&s).sub(&Series::from_tpoly(&one));
        assert!(matches!(back.abs(), AbsValue::Below(_)));
    }

    #[test]
    fn polynomial_and_reciprocal_inputs() {
        let f2 = f(2);
        let t = TPoly::from_codes(&f2, &[0, 1]);
        let one = TPoly::one(&f2);
        let s = series_from_rational(&t, &one, 10).unwrap();
        assert_eq!(s.terms().keys().collect::<Vec<_>>(), vec![&BigInt::from(-1)]);
        let s = series_from_rational(&one, &t, 10).unwrap();
        assert_eq!(s.terms().keys().collect::<Vec<_>>(), vec![&BigInt::from(1)]);
        assert_eq!(
            series_from_rational(&one, &TPoly::zero(&f2), 3).unwrap_err(),
            Error::DivisionByZeroPoly
        );
    }

    #[test]
    fn coefficient_access() {
        let f2 = f(2);
        let a = alpha(&f2, 2, 10);
        assert_eq!(a.coeff(&BigInt::from(4)).unwrap(), Fq::ONE);
        assert_eq!(a.coeff(&BigInt::from(3)).unwrap(), Fq::ZERO);
        // past the horizon the rule answers
        assert_eq!(a.coeff(&BigInt::from(1024)).unwrap(), Fq::ONE);
        let plain = Series::truncated(&f2, a.terms().clone(), BigInt::from(10));
        assert!(matches!(plain.coeff(&BigInt::from(11)), Err(Error::BeyondHorizon { .. })));
    }

    #[test]
    fn absolute_values() {
        let f2 = f(2);
        let s = mono(&f2, 3).add(&mono(&f2, 5));
        assert_eq!(s.abs(), AbsValue::exact(3));
        assert_eq!(Series::zero(&f2).abs(), AbsValue::Zero);
        let a = alpha(&f2, 2, 100);
        let z = a.sub(&a);
        assert_eq!(z.abs(), AbsValue::Below(BigInt::from(101)));
    }

    #[test]
    fn arithmetic_examples() {
        let f2 = f(2);
        let x = mono(&f2, 1);
        assert!(x.add(&x).is_exact_zero());
        assert_eq!(mono(&f2, 2).mul(&mono(&f2, 3)).terms(), mono(&f2, 5).terms());
        let f3 = f(3);
        let a = alpha(&f3, 3, 200);
        let s = a.add(&a).add(&a);
        assert!(s.terms().is_empty());
        assert_eq!(s.abs(), AbsValue::Below(BigInt::from(201)));
    }

    #[test]
    fn frobenius_identity_for_mahler_alpha() {
        for (p, r) in [(2u64, 2u64), (3, 3), (2, 4)] {
            let field = f(p);
            let a = alpha(&field, r, 1000);
            let lhs = a
                .frobenius(&BigUint::from(r))
                .unwrap()
                .add(&mono(&field, r as i64))
                .sub(&a);
            assert_eq!(lhs.abs(), AbsValue::Below(BigInt::from(1001)), "r={r}");
        }
    }

    #[test]
    fn frobenius_examples() {
        let f2 = f(2);
        let x = mono(&f2, 2).add(&mono(&f2, 4));
        let y = x.frobenius(&BigUint::from(2u32)).unwrap();
        assert_eq!(y.terms(), mono(&f2, 4).add(&mono(&f2, 8)).terms());
        assert_eq!(x.frobenius(&BigUint::one()).unwrap().terms(), x.terms());
        assert!(matches!(
            x.frobenius(&BigUint::from(3u32)),
            Err(Error::NotAPowerOfCharacteristic(_))
        ));
    }

    #[test]
    fn pth_root_examples() {
        let f2 = f(2);
        let x = mono(&f2, 4).add(&mono(&f2, 8));
        assert_eq!(x.pth_root().unwrap().terms(), mono(&f2, 2).add(&mono(&f2, 4)).terms());
        assert_eq!(mono(&f2, 3).pth_root().unwrap_err(), Error::NotAPthPower(BigInt::from(3)));
        assert!(Series::zero(&f2).pth_root().unwrap().is_exact_zero());
    }

    #[test]
    fn distances() {
        let f2 = f(2);
        assert_eq!(series_dist(&mono(&f2, 1), &mono(&f2, 2)).unwrap(), AbsValue::exact(1));
        let a = alpha(&f2, 2, 50);
        assert_eq!(series_dist(&a, &a).unwrap(), AbsValue::Below(BigInt::from(51)));
        let x = mono(&f2, 7);
        assert_eq!(series_dist(&x, &x).unwrap(), AbsValue::Zero);
        assert_eq!(series_dist(&x, &mono(&f(3), 1)).unwrap_err(), Error::FieldMismatch);
    }

    #[test]
    fn product_horizon_rule() {
        let f2 = f(2);
        let a = alpha(&f2, 2, 40); // N = 2, K = 40
        let b = alpha(&f2, 2, 100).add(&mono(&f2, -1)); // N = -1, K = 100
        let prod = a.mul(&b);
        assert_eq!(prod.horizon(), Some(&BigInt::from(39))); // min(40 - 1, 100 + 2)
    }

    #[test]
    fn refinement_extends_rule_backed_series() {
        let f2 = f(2);
        let a = alpha(&f2, 2, 10);
        let tail = a.sub(&mono(&f2, 2).add(&mono(&f2, 4)).add(&mono(&f2, 8)));
        assert!(matches!(tail.abs(), AbsValue::Below(_)));
        assert_eq!(tail.abs_refined(8).unwrap(), AbsValue::exact(16));
        let z = a.sub(&a);
        assert!(matches!(z.abs_refined(3), Err(Error::PrecisionExhausted(_))));
    }

    #[test]
    fn pow_uses_base_p_digits() {
        let f3 = f(3);
        let x = mono(&f3, 1).add(&mono(&f3, 2));
        let by_mul = x.mul(&x).mul(&x).mul(&x).mul(&x);
        assert_eq!(x.pow(5).unwrap().terms(), by_mul.terms());
    }

    #[test]
    fn shift_multiplies_by_power_of_t() {
        let f2 = f(2);
        let a = alpha(&f2, 2, 20);
        let s = a.shift(&BigInt::from(3));
        assert_eq!(s.valuation(), Some(&BigInt::from(-1)));
        assert_eq!(s.horizon(), Some(&BigInt::from(17)));
        assert_eq!(s.coeff(&BigInt::from(61)).unwrap(), Fq::ONE);
    }

    fn arb_series(p: u64) -> impl Strategy<Value = BTreeMap<BigInt, Fq>> {
        prop::collection::btree_map(-5i64..30, 1..p as u32, 0..8)
            .prop_map(|m| m.into_iter().map(|(n, c)| (BigInt::from(n), Fq(c))).collect())
    }

    proptest! {
        #[test]
        fn ultrametric_inequality(x in arb_series(3), y in arb_series(3)) {
            let field = f(3);
            let (x, y) = (Series::exact(&field, x), Series::exact(&field, y));
            let (ax, ay, s) = (x.abs(), y.abs(), x.add(&y).abs());
            if let (AbsValue::Exact(vx), AbsValue::Exact(vy)) = (&ax, &ay) {
                let vmin = vx.min(vy);
                match &s {
                    AbsValue::Exact(vs) => {
                        prop_assert!(vs >= vmin);
                        if vx != vy { prop_assert_eq!(vs, vmin); }
                    }
                    AbsValue::Zero => prop_assert_eq!(vx, vy),
                    AbsValue::Below(_) => prop_assert!(false),
                }
            }
        }

        #[test]
        fn multiplicativity(x in arb_series(5), y in arb_series(5)) {
            let field = f(5);
            let (x, y) = (Series::exact(&field, x), Series::exact(&field, y));
            prop_assert_eq!(x.mul(&y).abs(), x.abs().mul(&y.abs()));
        }

        #[test]
        fn frobenius_matches_repeated_product(x in arb_series(3), k in 20i64..60) {
            let field = f(3);
            let x = Series::truncated(&field, x, BigInt::from(k));
            let fr = x.frobenius(&BigUint::from(3u32)).unwrap();
            let prod = x.mul(&x).mul(&x);
            let h = fr.horizon().unwrap().min(prod.horizon().unwrap()).clone();
            let (a, b) = (fr.truncate(&h), prod.truncate(&h));
            prop_assert_eq!(a.terms(), b.terms());
        }

        #[test]
        fn pth_root_round_trip(x in arb_series(2), k in 10i64..40) {
            let field = f(2);
            let x = Series::truncated(&field, x, BigInt::from(k));
            let back = x.frobenius(&BigUint::from(2u32)).unwrap().pth_root().unwrap();
            prop_assert_eq!(back.terms(), x.terms());
            prop_assert_eq!(back.horizon(), x.horizon());
        }
    }
}
