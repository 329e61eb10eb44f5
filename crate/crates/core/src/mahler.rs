//! The series α_j(r, m), ξ(r, m), the approximants α(j, k) and the
//! polynomials they satisfy.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::algebra::{AbsValue, Field, Fq, TPoly};
use crate::dioph::XPoly;
use crate::error::{Error, Result};
use crate::series::{CoeffRule, Series};

/// Largest M(0, j) for which r_j = r^{M(0,j)} is materialized.
pub const MAX_BLOCK_EXPONENT: u64 = 1 << 20;

/// A 0/1 selection of blocks: a finite prefix, then a repeating tail.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mask {
    prefix: Vec<bool>,
    tail: Vec<bool>,
}

impl Mask {
    pub fn new(prefix: Vec<bool>, tail: Vec<bool>) -> Result<Mask> {
        if !tail.iter().any(|&b| b) {
            return Err(Error::InvalidSpec(
                "mask tail must contain a 1 so that infinitely many blocks are selected".into(),
            ));
        }
        Ok(Mask { prefix, tail })
    }

    pub fn get(&self, j: usize) -> bool {
        match self.prefix.get(j) {
            Some(&b) => b,
            None => self.tail[(j - self.prefix.len()) % self.tail.len()],
        }
    }

    pub fn prefix(&self) -> &[bool] {
        &self.prefix
    }

    pub fn tail(&self) -> &[bool] {
        &self.tail
    }
}

/// Parameters of ξ(r, m) and its masked variants ξ_a(r, m).
#[derive(Clone, Debug)]
pub struct MahlerSpec {
    field: Field,
    r_exponent: u32,
    m_prefix: Vec<u64>,
    m_tail: u64,
    mask: Option<Mask>,
}

impl PartialEq for MahlerSpec {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field
            && self.r_exponent == other.r_exponent
            && self.m_prefix == other.m_prefix
            && self.m_tail == other.m_tail
            && self.mask == other.mask
    }
}

impl MahlerSpec {
    /// r = p^`r_exponent`; `m_prefix` starts with m_0 = 1.
    pub fn new(
        field: &Field,
        r_exponent: u32,
        m_prefix: Vec<u64>,
        m_tail: u64,
        mask: Option<Mask>,
    ) -> Result<MahlerSpec> {
        if r_exponent == 0 {
            return Err(Error::InvalidSpec("r must be at least p (r_exponent >= 1)".into()));
        }
        match m_prefix.first() {
            Some(1) => {}
            _ => return Err(Error::InvalidSpec("m_prefix must start with m_0 = 1".into())),
        }
        if let Some((j, m)) = m_prefix.iter().enumerate().skip(1).find(|(_, &m)| m < 2) {
            return Err(Error::InvalidSpec(format!("m_{j} = {m} but m_j >= 2 is required")));
        }
        if m_tail < 2 {
            return Err(Error::InvalidSpec(format!("m_tail = {m_tail} but must be >= 2")));
        }
        Ok(MahlerSpec { field: field.clone(), r_exponent, m_prefix, m_tail, mask })
    }

    /// m_j = 2 for every j >= 1.
    pub fn uniform(field: &Field, r_exponent: u32, m_tail: u64) -> Result<MahlerSpec> {
        MahlerSpec::new(field, r_exponent, vec![1], m_tail, None)
    }

    pub fn with_mask(&self, mask: Option<Mask>) -> MahlerSpec {
        MahlerSpec { mask, ..self.clone() }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn p(&self) -> u64 {
        self.field.p()
    }

    pub fn r_exponent(&self) -> u32 {
        self.r_exponent
    }

    pub fn r(&self) -> BigUint {
        BigUint::from(self.p()).pow(self.r_exponent)
    }

    pub fn m_prefix(&self) -> &[u64] {
        &self.m_prefix
    }

    pub fn m_tail(&self) -> u64 {
        self.m_tail
    }

    pub fn mask(&self) -> Option<&Mask> {
        self.mask.as_ref()
    }

    pub fn m(&self, j: usize) -> u64 {
        self.m_prefix.get(j).copied().unwrap_or(self.m_tail)
    }

    /// Whether block j enters the sum.
    pub fn selected(&self, j: usize) -> bool {
        self.mask.as_ref().map_or(true, |m| m.get(j))
    }

    /// M(i, j) = m_i ⋯ m_j, and 1 when i > j.
    pub fn big_m(&self, i: usize, j: i64) -> BigUint {
        if (i as i64) > j {
            return BigUint::one();
        }
        let j = j as usize;
        let mut acc = BigUint::one();
        let prefix_end = self.m_prefix.len().min(j + 1);
        for t in i..prefix_end {
            acc *= self.m_prefix[t];
        }
        let tail_from = i.max(self.m_prefix.len());
        if j + 1 > tail_from {
            acc *= BigUint::from(self.m_tail).pow((j + 1 - tail_from) as u32);
        }
        acc
    }

    fn big_m_u64(&self, i: usize, j: i64) -> Option<u64> {
        self.big_m(i, j).to_u64()
    }

    /// r_j = r^{M(0,j)}.
    pub fn r_j(&self, j: usize) -> Result<BigUint> {
        let e = self
            .big_m_u64(0, j as i64)
            .filter(|&e| e <= MAX_BLOCK_EXPONENT)
            .ok_or_else(|| Error::ExponentBudgetExceeded {
                needed: format!("r^M(0,{j}) with M(0,{j}) = {}", self.big_m(0, j as i64)),
                budget: MAX_BLOCK_EXPONENT,
            })?;
        Ok(self.r().pow(e as u32))
    }

    /// α_j = Σ_{n≥1} T^{-r_j^n}, materialized through `horizon`.
    pub fn alpha_block(&self, j: usize, horizon: &BigInt) -> Result<Series> {
        let rule = AlphaRule { base: BigInt::from(self.r_j(j)?) };
        Series::from_rule(&self.field, Arc::new(rule), horizon.clone())
    }

    fn blocks_rule(&self, first: usize, last: Option<usize>) -> Arc<dyn CoeffRule> {
        Arc::new(BlockSumRule { spec: self.clone(), first, last })
    }

    /// ξ = Σ_j a_j α_j through `horizon`.
    pub fn xi(&self, horizon: &BigInt) -> Result<Series> {
        Series::from_rule(&self.field, self.blocks_rule(0, None), horizon.clone())
    }

    /// Coefficient of T^{-r^e} in Σ_{first ≤ t ≤ last} a_t α_t.
    fn block_count(&self, e: &BigUint, first: usize, last: Option<usize>) -> Fq {
        let mut count = 0u64;
        let mut t = first;
        let mut m = self.big_m(0, first as i64);
        while &m <= e && last.map_or(true, |l| t <= l) {
            if self.selected(t) && (e % &m).is_zero() {
                count += 1;
            }
            t += 1;
            m *= self.m(t);
        }
        self.field.from_u64(count % self.p())
    }

    /// a(j, n): the coefficient of T^{-r^n} in α_0 + ⋯ + α_j.
    pub fn a_coeff(&self, j: usize, n: u64) -> Fq {
        self.block_count(&BigUint::from(n), 0, Some(j))
    }

    /// b(j, n) = ℓ mod p, where M(j+2, j+ℓ) | n and M(j+2, j+ℓ+1) ∤ n.
    pub fn b_coeff(&self, j: usize, n: u64) -> Fq {
        assert!(n >= 1, "b(j, n) is defined for n >= 1");
        let mut ell = 1u64;
        let mut m = 1u64; // M(j+2, j+ell)
        loop {
            let next = m.saturating_mul(self.m(j + 1 + ell as usize));
            if n % next != 0 {
                break;
            }
            m = next;
            ell += 1;
        }
        self.field.from_u64(ell % self.p())
    }

    fn require_unmasked(&self, what: &str) -> Result<()> {
        match &self.mask {
            None => Ok(()),
            Some(_) => Err(Error::InvalidSpec(format!("{what} is only defined for unmasked specs"))),
        }
    }

    /// Σ_{n=1}^{k} b(j,n) T^{-r_{j+1}^n} as an exact series.
    fn b_part(&self, j: usize, k: u64) -> Result<Series> {
        let base = BigInt::from(self.r_j(j + 1)?);
        let mut terms = BTreeMap::new();
        let mut x = base.clone();
        for n in 1..=k {
            terms.insert(x.clone(), self.b_coeff(j, n));
            x *= &base;
        }
        Ok(Series::exact(&self.field, terms))
    }

    /// α(j, k) = α_0 + ⋯ + α_j + Σ_{n=1}^{k} b(j,n) T^{-r_{j+1}^n}.
    pub fn approximant(&self, j: usize, k: u64, horizon: &BigInt) -> Result<Series> {
        self.require_unmasked("the approximant α(j, k)")?;
        if k == 0 {
            return Err(Error::InvalidArgument("approximant index k must be >= 1".into()));
        }
        let head = Series::from_rule(&self.field, self.blocks_rule(0, Some(j)), horizon.clone())?;
        Ok(head.add(&self.b_part(j, k)?))
    }

    /// The polynomial T^D (X^{r_j} - X + C) vanishing at α(j, k).
    pub fn annihilator(&self, j: usize, k: u64) -> Result<Annihilator> {
        self.require_unmasked("the annihilator of α(j, k)")?;
        if k == 0 {
            return Err(Error::InvalidArgument("approximant index k must be >= 1".into()));
        }
        let f = &self.field;
        let r = BigInt::from(self.r());
        let rj = BigInt::from(self.r_j(j)?);
        let rj1 = BigInt::from(self.r_j(j + 1)?);
        let mut c: BTreeMap<BigInt, Fq> = BTreeMap::new();
        let put = |c: &mut BTreeMap<BigInt, Fq>, n: BigInt, a: Fq| {
            let slot = c.entry(n).or_insert(Fq::ZERO);
            *slot = f.add(*slot, a);
        };
        let top = self.big_m(1, j as i64).to_u64().expect("M(1, j) fits once r_j does");
        let mut x = r.clone();
        for n in 1..=top {
            put(&mut c, x.clone(), self.a_coeff(j, n));
            x *= &r;
        }
        let mut x = rj1.clone();
        let mut k_prime = 0;
        for n in 1..=k {
            let b = self.b_coeff(j, n);
            if !b.is_zero() {
                k_prime = n;
            }
            put(&mut c, x.clone(), b);
            put(&mut c, &x * &rj, f.neg(b));
            x *= &rj1;
        }
        c.retain(|_, a| !a.is_zero());
        let d = c.keys().next_back().cloned().unwrap_or_default();
        Ok(Annihilator {
            field: f.clone(),
            x_degree: rj.clone(),
            d,
            constant: c,
            k_prime,
            bound_exponent: rj1.pow(k as u32) * &rj,
        })
    }

    /// The first `count` elements of K_j.
    pub fn k_set(&self, j: usize, count: usize) -> Vec<u64> {
        let p = self.p() as i64;
        let step = self
            .big_m_u64(j + 2, j as i64 + p)
            .expect("M(j+2, j+p) fits in 64 bits");
        let excluded = self.m(j + p as usize + 1);
        let mut out = Vec::with_capacity(count);
        let mut c = 1u64;
        while out.len() < count {
            if c % excluded != 0 && c * step >= 2 {
                out.push(c * step - 1);
            }
            c += 1;
        }
        out
    }

    /// |ξ - α(j, k)| measured with the horizon r_{j+1}^{k+2}.
    pub fn approximant_distance(&self, j: usize, k: u64) -> Result<AbsValue> {
        let rj1 = BigInt::from(self.r_j(j + 1)?);
        let horizon = rj1.pow(k as u32 + 2);
        let xi = self.xi(&horizon)?;
        let approx = self.approximant(j, k, &horizon)?;
        Ok(xi.sub(&approx).abs())
    }

    /// Checks |ξ - α(j, k_i)| = q^{-r_{j+1}^{k_i+2}} for the i-th element of K_j (1-based).
    pub fn distance_identity_check(&self, j: usize, i: usize) -> Result<DistanceCheck> {
        if i == 0 {
            return Err(Error::InvalidArgument("K_j is indexed from 1".into()));
        }
        let k = self.k_set(j, i)[i - 1];
        let claimed = self.r_j(j + 1)?.pow(k as u32 + 2);
        let measured = self.approximant_distance(j, k)?;
        let pass = measured == AbsValue::Exact(BigInt::from(claimed.clone()));
        Ok(DistanceCheck { j, k, claimed, measured, pass })
    }

    /// Checks r_{j+1}^{k+1} ≤ v(ξ - α(j, k)) ≤ r_{j+1}^{k+2}, with equality at
    /// the top whenever k ∈ K_j.
    pub fn sandwich_check(&self, j: usize, k: u64) -> Result<SandwichCheck> {
        let rj1 = self.r_j(j + 1)?;
        let lower = rj1.pow(k as u32 + 1);
        let upper = rj1.pow(k as u32 + 2);
        let in_k_set = self.in_k_set(j, k);
        let measured = self.approximant_distance(j, k)?;
        let pass = match measured.valuation() {
            Some(v) => {
                let (lo, hi) = (BigInt::from(lower.clone()), BigInt::from(upper.clone()));
                *v >= lo && *v <= hi && (!in_k_set || *v == hi)
            }
            None => false,
        };
        Ok(SandwichCheck { j, k, lower, upper, in_k_set, measured, pass })
    }

    pub fn in_k_set(&self, j: usize, k: u64) -> bool {
        let p = self.p() as i64;
        let a = self.big_m(j + 2, j as i64 + p);
        let b = self.big_m(j + 2, j as i64 + p + 1);
        let k1 = BigUint::from(k + 1);
        (&k1 % a).is_zero() && !(&k1 % b).is_zero()
    }

    /// α_t^{r_j} + Σ_{i=1}^{M(t+1,j)} T^{-r_t^i} - α_t, which vanishes.
    pub fn telescope_residual(&self, t: usize, j: usize, horizon: &BigInt) -> Result<Series> {
        if t > j {
            return Err(Error::InvalidArgument(format!("telescoping needs t <= j, got t={t}, j={j}")));
        }
        let alpha = self.alpha_block(t, horizon)?;
        let rt = BigInt::from(self.r_j(t)?);
        let count = self.big_m(t + 1, j as i64).to_u64().expect("M(t+1, j) fits once r_j does");
        let mut terms = BTreeMap::new();
        let mut x = rt.clone();
        for _ in 0..count {
            terms.insert(x.clone(), Fq::ONE);
            x *= &rt;
        }
        Ok(alpha
            .frobenius(&self.r_j(j)?)?
            .add(&Series::exact(&self.field, terms))
            .sub(&alpha))
    }
}

/// α^r + T^{-r} - α for α = Σ T^{-r^n} with r = p^`r_exponent`.
pub fn frobenius_residual(field: &Field, r_exponent: u32, horizon: &BigInt) -> Result<Series> {
    let spec = MahlerSpec::uniform(field, r_exponent, 2)?;
    let alpha = spec.alpha_block(0, horizon)?;
    let r = spec.r();
    let t = Series::monomial(field, Fq::ONE, BigInt::from(r.clone()));
    Ok(alpha.frobenius(&r)?.add(&t).sub(&alpha))
}

/// Σ a_t α_t over first ≤ t ≤ last, computed by listing every r_t^i ≤ horizon
/// of every block and adding. Independent of the divisibility rules.
pub fn block_sum_oracle(
    spec: &MahlerSpec,
    first: usize,
    last: Option<usize>,
    horizon: &BigInt,
) -> Result<Series> {
    let mut counts: BTreeMap<BigInt, u64> = BTreeMap::new();
    let hbits = horizon.bits();
    let mut t = first;
    while last.map_or(true, |l| t <= l) {
        let e = spec.big_m(0, t as i64);
        // r_t > horizon once its bit length exceeds the horizon's
        if e.clone() * BigUint::from(spec.r_exponent()) > BigUint::from(hbits) * 2u32 + 2u32 {
            break;
        }
        let rt = BigInt::from(spec.r_j(t)?);
        if &rt > horizon {
            break;
        }
        if spec.selected(t) {
            let mut x = rt.clone();
            while &x <= horizon {
                *counts.entry(x.clone()).or_insert(0) += 1;
                x *= &rt;
            }
        }
        t += 1;
    }
    let f = spec.field();
    let terms = counts.into_iter().map(|(n, c)| (n, f.from_u64(c % spec.p()))).collect();
    Ok(Series::truncated(f, terms, horizon.clone()))
}

/// b(j, 1..=n_max) read off the tail Σ_{t > j} α_t at the exponents r_{j+1}^n.
pub fn b_oracle(spec: &MahlerSpec, j: usize, n_max: u64) -> Result<Vec<Fq>> {
    let base = BigInt::from(spec.r_j(j + 1)?);
    read_powers(&block_sum_oracle(spec, j + 1, None, &base.pow(n_max as u32))?, &base, n_max)
}

/// a(j, 1..=n_max) read off α_0 + ⋯ + α_j at the exponents r^n.
pub fn a_oracle(spec: &MahlerSpec, j: usize, n_max: u64) -> Result<Vec<Fq>> {
    let base = BigInt::from(spec.r());
    read_powers(&block_sum_oracle(spec, 0, Some(j), &base.pow(n_max as u32))?, &base, n_max)
}

fn read_powers(s: &Series, base: &BigInt, n_max: u64) -> Result<Vec<Fq>> {
    let mut x = base.clone();
    let mut out = Vec::with_capacity(n_max as usize);
    for _ in 0..n_max {
        out.push(s.coeff(&x)?);
        x *= base;
    }
    Ok(out)
}

/// Outcome of the exact distance identity for one k ∈ K_j.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceCheck {
    pub j: usize,
    pub k: u64,
    pub claimed: BigUint,
    pub measured: AbsValue,
    pub pass: bool,
}

/// Outcome of the two-sided distance bound for one (j, k).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SandwichCheck {
    pub j: usize,
    pub k: u64,
    pub lower: BigUint,
    pub upper: BigUint,
    pub in_k_set: bool,
    pub measured: AbsValue,
    pub pass: bool,
}

/// T^D (X^{r_j} - X + C) with C a finite sum of T^{-n}, kept sparse.
#[derive(Clone, Debug)]
pub struct Annihilator {
    field: Field,
    x_degree: BigInt,
    d: BigInt,
    constant: BTreeMap<BigInt, Fq>,
    k_prime: u64,
    bound_exponent: BigInt,
}

impl Annihilator {
    pub fn x_degree(&self) -> &BigInt {
        &self.x_degree
    }

    /// D, so that the height is q^D exactly.
    pub fn height_exponent(&self) -> &BigInt {
        &self.d
    }

    /// r_{j+1}^k r_j, the height bound it is compared against.
    pub fn bound_exponent(&self) -> &BigInt {
        &self.bound_exponent
    }

    /// Largest n ≤ k with b(j, n) ≠ 0.
    pub fn k_prime(&self) -> u64 {
        self.k_prime
    }

    /// C as exponent ↦ coefficient of T^{-n}.
    pub fn constant(&self) -> &BTreeMap<BigInt, Fq> {
        &self.constant
    }

    /// P(s), using Frobenius for the X^{r_j} term.
    pub fn eval(&self, s: &Series) -> Result<Series> {
        let c = Series::exact(&self.field, self.constant.clone());
        let rj = self.x_degree.to_biguint().expect("r_j is positive");
        Ok(s.frobenius(&rj)?.sub(s).add(&c).shift(&self.d))
    }

    /// The dense polynomial in (F_q[T])[X].
    pub fn to_xpoly(&self, exponent_budget: u64) -> Result<XPoly> {
        let too_big = |what: &BigInt| Error::ExponentBudgetExceeded {
            needed: what.to_string(),
            budget: exponent_budget,
        };
        let d = self.d.to_u64().filter(|&d| d <= exponent_budget).ok_or_else(|| too_big(&self.d))?;
        let deg = self
            .x_degree
            .to_u64()
            .filter(|&x| x <= exponent_budget)
            .ok_or_else(|| too_big(&self.x_degree))? as usize;
        let f = &self.field;
        let d = d as usize;
        let mut c0 = vec![Fq::ZERO; d + 1];
        for (n, a) in &self.constant {
            c0[d - n.to_usize().unwrap()] = *a;
        }
        let mut coeffs = vec![TPoly::zero(f); deg + 1];
        coeffs[0] = TPoly::new(f, c0);
        coeffs[1] = TPoly::monomial(f, f.neg(Fq::ONE), d);
        coeffs[deg] = coeffs[deg].add(&TPoly::monomial(f, Fq::ONE, d));
        Ok(XPoly::new(f, coeffs))
    }
}

/// Σ_{t ≥ 1} T^{-base^t}
#[derive(Debug)]
struct AlphaRule {
    base: BigInt,
}

impl CoeffRule for AlphaRule {
    fn coeff(&self, n: &BigInt) -> Fq {
        match exact_log(n, &self.base) {
            Some(e) if e >= 1u32.into() => Fq::ONE,
            _ => Fq::ZERO,
        }
    }

    fn support_upto(&self, horizon: &BigInt) -> Result<Vec<(BigInt, Fq)>> {
        let mut out = Vec::new();
        let mut x = self.base.clone();
        while &x <= horizon {
            out.push((x.clone(), Fq::ONE));
            x *= &self.base;
        }
        Ok(out)
    }
}

/// Σ a_t α_t over a range of blocks, by counting the blocks whose support
/// contains each power of r.
#[derive(Debug)]
struct BlockSumRule {
    spec: MahlerSpec,
    first: usize,
    last: Option<usize>,
}

impl CoeffRule for BlockSumRule {
    fn coeff(&self, n: &BigInt) -> Fq {
        match exact_log(n, &BigInt::from(self.spec.r())) {
            Some(e) if !e.is_zero() => self.spec.block_count(&e, self.first, self.last),
            _ => Fq::ZERO,
        }
    }

    fn support_upto(&self, horizon: &BigInt) -> Result<Vec<(BigInt, Fq)>> {
        let r = BigInt::from(self.spec.r());
        let mut out = Vec::new();
        let mut x = r.clone();
        let mut e = BigUint::one();
        while &x <= horizon {
            let c = self.spec.block_count(&e, self.first, self.last);
            if !c.is_zero() {
                out.push((x.clone(), c));
            }
            x *= &r;
            e += 1u32;
        }
        Ok(out)
    }
}

/// e with base^e = n, if any.
fn exact_log(n: &BigInt, base: &BigInt) -> Option<BigUint> {
    if n <= &BigInt::zero() {
        return None;
    }
    let mut e = BigUint::zero();
    let mut rest = n.clone();
    while !rest.is_one() {
        let (q, r) = rest.div_rem(base);
        if !r.is_zero() {
            return None;
        }
        rest = q;
        e += 1u32;
    }
    Some(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(p: u64, s: u32, prefix: Vec<u64>, tail: u64) -> MahlerSpec {
        MahlerSpec::new(&Field::prime(p).unwrap(), s, prefix, tail, None).unwrap()
    }

    fn n(x: u64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn big_m_examples() {
        let s = spec(2, 1, vec![1], 2);
        assert_eq!(s.big_m(2, 3), BigUint::from(4u32));
        assert_eq!(s.big_m(5, 4), BigUint::one());
        let s = spec(2, 1, vec![1, 2, 3], 3);
        assert_eq!(s.big_m(0, 2), BigUint::from(6u32));
        assert_eq!(s.big_m(1, 4), BigUint::from(54u32));
    }

    #[test]
    fn r_j_examples() {
        let s = spec(2, 1, vec![1], 2);
        let got: Vec<BigUint> = (0..4).map(|j| s.r_j(j).unwrap()).collect();
        assert_eq!(got, [2u32, 4, 16, 256].map(BigUint::from));
        assert_eq!(spec(3, 1, vec![1], 2).r_j(1).unwrap(), BigUint::from(9u32));
        assert_eq!(spec(2, 2, vec![1, 5], 2).r_j(0).unwrap(), BigUint::from(4u32));
    }

    #[test]
    fn validation() {
        let f = Field::prime(2).unwrap();
        assert!(MahlerSpec::new(&f, 1, vec![2], 2, None).is_err());
        assert!(MahlerSpec::new(&f, 1, vec![1, 1], 2, None).is_err());
        assert!(MahlerSpec::new(&f, 1, vec![1], 1, None).is_err());
        assert!(MahlerSpec::new(&f, 0, vec![1], 2, None).is_err());
        assert!(Mask::new(vec![true], vec![false]).is_err());
    }

    #[test]
    fn alpha_blocks() {
        let s = spec(2, 1, vec![1], 2);
        let a0 = s.alpha_block(0, &n(40)).unwrap();
        assert_eq!(a0.terms().keys().cloned().collect::<Vec<_>>(), vec![n(2), n(4), n(8), n(16), n(32)]);
        let a1 = s.alpha_block(1, &n(100)).unwrap();
        assert_eq!(a1.terms().keys().cloned().collect::<Vec<_>>(), vec![n(4), n(16), n(64)]);
        for j in 0..3 {
            assert_eq!(s.alpha_block(j, &n(10)).unwrap().coeff(&n(1)).unwrap(), Fq::ZERO);
        }
    }

    #[test]
    fn xi_matches_example_rule_and_oracle() {
        let s = spec(2, 1, vec![1], 2);
        let h = n(1 << 12);
        let xi = s.xi(&h).unwrap();
        let oracle = block_sum_oracle(&s, 0, None, &h).unwrap();
        assert_eq!(xi.terms(), oracle.terms());
        for (x, want) in [(2, 1), (4, 0), (8, 1), (16, 1), (6, 0)] {
            assert_eq!(xi.coeff(&n(x)).unwrap(), Fq(want), "n = {x}");
        }
    }

    #[test]
    fn a_and_b_examples() {
        let s = spec(2, 1, vec![1], 2);
        assert_eq!(s.b_coeff(0, 3), Fq::ONE);
        assert_eq!(s.b_coeff(0, 2), Fq::ZERO);
        assert_eq!(s.a_coeff(1, 1), Fq::ONE);
        assert_eq!(s.a_coeff(1, 2), Fq::ZERO);
        assert!((1..20).all(|x| s.a_coeff(0, x) == Fq::ONE));
        // p = 3, m = 2: ℓ = 3 at n = 4
        assert_eq!(spec(3, 1, vec![1], 2).b_coeff(0, 4), Fq::ZERO);
    }

    #[test]
    fn b_matches_tail_oracle() {
        for s in [spec(2, 1, vec![1], 2), spec(3, 1, vec![1], 2), spec(2, 1, vec![1, 3], 3)] {
            for j in 0..2 {
                let base = BigInt::from(s.r_j(j + 1).unwrap());
                let h = base.pow(40);
                let tail = block_sum_oracle(&s, j + 1, None, &h).unwrap();
                let mut x = base.clone();
                for m in 1..=40 {
                    assert_eq!(tail.coeff(&x).unwrap(), s.b_coeff(j, m), "j={j} n={m}");
                    x *= &base;
                }
            }
        }
    }

    #[test]
    fn approximant_example() {
        let s = spec(2, 1, vec![1], 2);
        let a = s.approximant(0, 1, &n(64)).unwrap();
        let want = s.alpha_block(0, &n(64)).unwrap().add(&Series::monomial(s.field(), Fq::ONE, 4));
        assert_eq!(a.terms(), want.terms());
        assert!(s.approximant(0, 0, &n(64)).is_err());
    }

    #[test]
    fn annihilator_example() {
        let s = spec(2, 1, vec![1], 2);
        let ann = s.annihilator(0, 1).unwrap();
        assert_eq!(ann.height_exponent(), &n(8));
        assert_eq!(ann.x_degree(), &n(2));
        let keys: Vec<BigInt> = ann.constant().keys().cloned().collect();
        assert_eq!(keys, vec![n(2), n(4), n(8)]);
        let a = s.approximant(0, 1, &n(200)).unwrap();
        let v = ann.eval(&a).unwrap();
        assert!(matches!(v.abs(), AbsValue::Below(_)));
        let dense = ann.to_xpoly(1 << 10).unwrap();
        assert_eq!(dense.height_exponent().unwrap(), 8);
    }

    #[test]
    fn k_sets() {
        let s = spec(2, 1, vec![1], 2);
        assert_eq!(s.k_set(0, 3), vec![1, 5, 9]);
        assert!(s.k_set(0, 3).iter().all(|&k| s.in_k_set(0, k)));
        let s3 = spec(3, 1, vec![1], 2);
        assert_eq!(s3.k_set(0, 3), vec![3, 11, 19]);
        for spec in [s, s3, spec(2, 1, vec![1, 3], 3)] {
            for j in 0..3 {
                let ks = spec.k_set(j, 20);
                let gap = spec.big_m(j + 2, j as i64 + spec.p() as i64) * 2u32;
                assert!(ks[0] >= 1);
                assert!(ks.windows(2).all(|w| BigUint::from(w[1] - w[0]) <= gap));
            }
        }
    }

    #[test]
    fn first_distance_identity() {
        let s = spec(2, 1, vec![1], 2);
        let c = s.distance_identity_check(0, 1).unwrap();
        assert_eq!(c.claimed, BigUint::from(64u32));
        assert!(c.pass, "{c:?}");
        let c = s.distance_identity_check(0, 2).unwrap();
        assert_eq!(c.claimed, BigUint::from(16384u32));
        assert!(c.pass, "{c:?}");
    }

    #[test]
    fn telescoping() {
        let s = spec(2, 1, vec![1], 2);
        let h = n(5000);
        for j in 0..3 {
            for t in 0..=j {
                let res = s.telescope_residual(t, j, &h).unwrap();
                assert!(matches!(res.abs(), AbsValue::Below(_)), "t={t} j={j}");
            }
        }
    }

    #[test]
    fn mask_separation() {
        let f = Field::prime(2).unwrap();
        let a = MahlerSpec::new(&f, 1, vec![1], 2, Some(Mask::new(vec![true, false], vec![true]).unwrap())).unwrap();
        let b = a.with_mask(Some(Mask::new(vec![true, false, false], vec![true]).unwrap()));
        let h = n(1 << 20);
        let d = a.xi(&h).unwrap().sub(&b.xi(&h).unwrap());
        assert_eq!(d.abs(), AbsValue::Exact(BigInt::from(a.r_j(2).unwrap())));
        assert!(a.approximant(0, 1, &h).is_err());
    }
}
