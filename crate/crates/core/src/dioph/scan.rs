//! Exhaustive height-shell scans for w_n(ξ, H) and w_n*(ξ, H).
//!
//! Shell h holds the polynomials whose largest coefficient degree is exactly
//! h - 1, so row h covers every P with H(P) ≤ q^{h-1}. Within a row the best
//! value wins; ties go to the smallest witness key.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

use crate::algebra::{AbsValue, Field, Fq, TPoly};
use crate::dioph::roots::roots_in_field;
use crate::dioph::xpoly::XPoly;
use crate::error::{Error, Result};
use crate::series::{series_from_rational, Series};

const CHUNK: u64 = 1 << 12;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ScanKind {
    Wn,
    Wstar,
}

impl ScanKind {
    pub fn name(self) -> &'static str {
        match self {
            ScanKind::Wn => "wn",
            ScanKind::Wstar => "wstar",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ScanConfig {
    /// Degree bound in X.
    pub n: usize,
    /// Last height shell.
    pub h_max: usize,
    /// Horizon of the first evaluation pass.
    pub horizon: u64,
    /// Horizon doublings tried before a value counts as potentially zero.
    pub refinement_cap: u32,
    pub horizon_cap: u64,
    pub enumeration_budget: u64,
    pub threads: usize,
}

impl ScanConfig {
    pub fn new(n: usize, h_max: usize) -> ScanConfig {
        ScanConfig {
            n,
            h_max,
            horizon: 128,
            refinement_cap: 4,
            horizon_cap: 1 << 14,
            enumeration_budget: 1 << 24,
            threads: 1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Witness {
    pub poly: XPoly,
    /// For w*, the root of `poly` closest to ξ.
    pub root: Option<Series>,
}

#[derive(Clone, Debug)]
pub struct RecordRow {
    pub h: usize,
    /// log_q H for this row, h - 1.
    pub h_log: usize,
    pub witness: Option<Witness>,
    pub value_valuation: Option<BigInt>,
    pub exponent_ratio: Option<BigRational>,
}

#[derive(Clone, Debug)]
pub struct RecordTable {
    pub kind: ScanKind,
    pub n: usize,
    pub h_max: usize,
    pub rows: Vec<RecordRow>,
    pub best_exponent: Option<BigRational>,
    /// Candidates whose value was measured.
    pub enumerated: u64,
    /// Candidates left unresolved at the last refinement level.
    pub potentially_zero: u64,
}

pub fn wn_scan(xi: &Series, cfg: &ScanConfig) -> Result<RecordTable> {
    scan(ScanKind::Wn, xi, cfg)
}

pub fn wstar_scan(xi: &Series, cfg: &ScanConfig) -> Result<RecordTable> {
    scan(ScanKind::Wstar, xi, cfg)
}

/// Runs a scan over shells 1..=h_max.
pub fn scan(kind: ScanKind, xi: &Series, cfg: &ScanConfig) -> Result<RecordTable> {
    if cfg.n == 0 || cfg.h_max == 0 {
        return Err(Error::InvalidArgument("scans need n >= 1 and h_max >= 1".into()));
    }
    let field = xi.field().clone();
    let q = field.q();
    let mut total: u64 = 0;
    for h in 1..=cfg.h_max {
        let size = (h * (cfg.n + 1)) as u32;
        let count = q.checked_pow(size).ok_or_else(|| budget_error(q, size, cfg))?;
        total = total.checked_add(count).ok_or_else(|| budget_error(q, size, cfg))?;
    }
    if total > cfg.enumeration_budget {
        return Err(Error::BudgetExceeded {
            needed: total.to_string(),
            budget: cfg.enumeration_budget,
        });
    }
    let eval = Evaluator::new(xi, cfg)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;

    let mut rows = Vec::new();
    let mut best: Option<Best> = None;
    let mut enumerated = 0;
    let mut potentially_zero = 0;
    for h in 1..=cfg.h_max {
        let size = q.pow((h * (cfg.n + 1)) as u32);
        let chunks: Vec<(u64, u64)> =
            (0..size).step_by(CHUNK as usize).map(|s| (s, (s + CHUNK).min(size))).collect();
        let parts: Vec<Result<Partial>> = pool.install(|| {
            chunks
                .par_iter()
                .map(|&(s, e)| scan_chunk(kind, &eval, cfg.n, h, s, e))
                .collect()
        });
        for part in parts {
            let part = part?;
            enumerated += part.enumerated;
            potentially_zero += part.potentially_zero;
            best = merge(best, part.best);
        }
        if potentially_zero > 0 {
            log::debug!("{} scan shell {h}: {potentially_zero} potentially zero values so far", kind.name());
        }
        rows.push(make_row(kind, &eval, cfg.n, h, best.as_ref())?);
    }
    let best_exponent = rows
        .iter()
        .filter(|r| r.h >= 2 && 2 * r.h > cfg.h_max)
        .filter_map(|r| r.exponent_ratio.clone())
        .max();
    Ok(RecordTable { kind, n: cfg.n, h_max: cfg.h_max, rows, best_exponent, enumerated, potentially_zero })
}

fn budget_error(q: u64, size: u32, cfg: &ScanConfig) -> Error {
    Error::BudgetExceeded { needed: format!("{q}^{size}"), budget: cfg.enumeration_budget }
}

#[derive(Clone, Debug)]
struct Best {
    val: i64,
    key: Vec<i64>,
    h: usize,
    idx: u64,
}

fn better(a: &Best, b: &Best) -> bool {
    match a.val.cmp(&b.val) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => a.key < b.key,
    }
}

fn merge(a: Option<Best>, b: Option<Best>) -> Option<Best> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => Some(if better(&b, &a) { b } else { a }),
    }
}

struct Partial {
    best: Option<Best>,
    enumerated: u64,
    potentially_zero: u64,
}

/// Coefficient i of a candidate occupies digits i*h .. (i+1)*h of its index.
fn decode(field: &Field, mut idx: u64, n: usize, h: usize, buf: &mut [Fq]) {
    let q = field.q();
    for slot in buf.iter_mut().take((n + 1) * h) {
        *slot = field.elem(idx % q).expect("digit below q");
        idx /= q;
    }
}

fn degree(c: &[Fq]) -> Option<usize> {
    c.iter().rposition(|x| !x.is_zero())
}

fn key_of(buf: &[Fq], n: usize, h: usize) -> Vec<i64> {
    let coeffs: Vec<&[Fq]> = buf.chunks(h).take(n + 1).collect();
    let deg_x = coeffs.iter().rposition(|c| degree(c).is_some()).map_or(-1, |d| d as i64);
    let mut key = vec![deg_x];
    key.extend(coeffs.iter().map(|c| degree(c).map_or(-1, |d| d as i64)));
    for c in &coeffs {
        key.extend(c.iter().map(|x| x.code() as i64));
    }
    key
}

fn to_xpoly(field: &Field, buf: &[Fq], n: usize, h: usize) -> XPoly {
    XPoly::new(field, buf.chunks(h).take(n + 1).map(|c| TPoly::new(field, c.to_vec())).collect())
}

fn scan_chunk(kind: ScanKind, eval: &Evaluator, n: usize, h: usize, start: u64, end: u64) -> Result<Partial> {
    let field = &eval.field;
    let mut buf = vec![Fq::ZERO; (n + 1) * h];
    let mut part = Partial { best: None, enumerated: 0, potentially_zero: 0 };
    for idx in start..end {
        decode(field, idx, n, h, &mut buf);
        let coeffs: Vec<&[Fq]> = buf.chunks(h).collect();
        // shell: some coefficient has degree exactly h - 1
        if !coeffs.iter().any(|c| !c[h - 1].is_zero()) {
            continue;
        }
        let Some(deg_x) = coeffs.iter().rposition(|c| degree(c).is_some()) else {
            continue;
        };
        // one representative per F_q^* multiple: monic leading coefficient
        if coeffs[deg_x][degree(coeffs[deg_x]).unwrap()] != Fq::ONE {
            continue;
        }
        let val = match kind {
            ScanKind::Wn => eval.poly_valuation(&coeffs[..=deg_x]),
            ScanKind::Wstar => {
                if deg_x == 0 || !to_xpoly(field, &buf, n, h).is_primitive() {
                    continue;
                }
                if deg_x == 1 {
                    let b = degree(coeffs[1]).unwrap() as i64;
                    eval.poly_valuation(&coeffs[..=1]).map(|v| v + b)
                } else {
                    eval.root_distance(&to_xpoly(field, &buf, n, h))?.map(|(v, _)| v)
                }
            }
        };
        let Some(val) = val else {
            part.potentially_zero += 1;
            continue;
        };
        part.enumerated += 1;
        if part.best.as_ref().is_some_and(|b| b.val > val) {
            continue;
        }
        let cand = Best { val, key: key_of(&buf, n, h), h, idx };
        if part.best.as_ref().map_or(true, |b| better(&cand, b)) {
            part.best = Some(cand);
        }
    }
    Ok(part)
}

fn make_row(kind: ScanKind, eval: &Evaluator, n: usize, h: usize, best: Option<&Best>) -> Result<RecordRow> {
    let Some(best) = best else {
        return Ok(RecordRow { h, h_log: h - 1, witness: None, value_valuation: None, exponent_ratio: None });
    };
    let field = &eval.field;
    let mut buf = vec![Fq::ZERO; (n + 1) * best.h];
    decode(field, best.idx, n, best.h, &mut buf);
    let poly = to_xpoly(field, &buf, n, best.h);
    let root = match kind {
        ScanKind::Wn => None,
        ScanKind::Wstar if poly.deg_x() == Some(1) => {
            Some(series_from_rational(&poly.coeff(0).neg(), &poly.coeff(1), eval.levels[0].k)?)
        }
        ScanKind::Wstar => eval.root_distance(&poly)?.map(|(_, r)| r),
    };
    let ratio = (h >= 2).then(|| {
        let r = BigRational::new(BigInt::from(best.val), BigInt::from(h as i64 - 1));
        match kind {
            ScanKind::Wn => r,
            ScanKind::Wstar => r - BigRational::from_integer(BigInt::from(1)),
        }
    });
    Ok(RecordRow {
        h,
        h_log: h - 1,
        witness: Some(Witness { poly, root }),
        value_valuation: Some(BigInt::from(best.val)),
        exponent_ratio: ratio,
    })
}

/// Dense windows of ξ^0, …, ξ^n at one horizon.
struct Level {
    k: i64,
    xi: Series,
    lo: i64,
    /// tops[i]: last exponent of ξ^i that is known.
    tops: Vec<i64>,
    pows: Vec<Vec<Fq>>,
}

impl Level {
    fn new(xi: &Series, n: usize, k: i64) -> Result<Level> {
        let field = xi.field();
        let x = xi.extend_to(&BigInt::from(k))?;
        let k = x.horizon().map_or(k, |h| i64::try_from(h).unwrap_or(k).min(k));
        let nn = x
            .valuation()
            .map_or(0, |v| i64::try_from(v).expect("valuation fits").min(0));
        let lo = n as i64 * nn;
        let w1 = x.dense_window(lo, k)?;
        let mut tops = vec![0, k];
        let mut pows = vec![Vec::new(), w1.clone()];
        for i in 2..=n {
            let top = k + (i as i64 - 1) * nn;
            let prev = &pows[i - 1];
            let prev_top = tops[i - 1];
            let mut w = vec![Fq::ZERO; (top - lo + 1) as usize];
            for (ai, &a) in prev.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let ea = lo + ai as i64;
                if ea > prev_top {
                    break;
                }
                for (bi, &b) in w1.iter().enumerate() {
                    let e = ea + lo + bi as i64;
                    if e > top {
                        break;
                    }
                    if !b.is_zero() {
                        let slot = &mut w[(e - lo) as usize];
                        *slot = field.add(*slot, field.mul(a, b));
                    }
                }
            }
            tops.push(top);
            pows.push(w);
        }
        Ok(Level { k, xi: x, lo, tops, pows })
    }

    fn pw(&self, i: usize, e: i64) -> Fq {
        if i == 0 {
            return if e == 0 { Fq::ONE } else { Fq::ZERO };
        }
        if e < self.lo {
            return Fq::ZERO;
        }
        self.pows[i][(e - self.lo) as usize]
    }

    /// Valuation of Σ c_i ξ^i if it shows up within the known range.
    fn valuation(&self, field: &Field, coeffs: &[&[Fq]]) -> Option<i64> {
        let mut m_hi = i64::MAX;
        let mut max_deg = 0;
        for (i, c) in coeffs.iter().enumerate() {
            if let Some(d) = degree(c) {
                max_deg = max_deg.max(d as i64);
                if i >= 1 {
                    m_hi = m_hi.min(self.tops[i] - d as i64);
                }
            }
        }
        if m_hi == i64::MAX {
            return degree(coeffs[0]).map(|d| -(d as i64));
        }
        for m in self.lo - max_deg..=m_hi {
            let mut s = Fq::ZERO;
            for (i, c) in coeffs.iter().enumerate() {
                for (d, &a) in c.iter().enumerate() {
                    if !a.is_zero() {
                        s = field.add(s, field.mul(a, self.pw(i, m + d as i64)));
                    }
                }
            }
            if !s.is_zero() {
                return Some(m);
            }
        }
        None
    }
}

struct Evaluator {
    field: Field,
    levels: Vec<Level>,
}

impl Evaluator {
    fn new(xi: &Series, cfg: &ScanConfig) -> Result<Evaluator> {
        let mut levels = Vec::new();
        let mut k = cfg.horizon.max(1);
        for step in 0..=cfg.refinement_cap {
            if step > 0 && (k > cfg.horizon_cap || !xi.has_rule()) {
                break;
            }
            levels.push(Level::new(xi, cfg.n, k as i64)?);
            k *= 2;
        }
        Ok(Evaluator { field: xi.field().clone(), levels })
    }

    fn poly_valuation(&self, coeffs: &[&[Fq]]) -> Option<i64> {
        self.levels.iter().find_map(|l| l.valuation(&self.field, coeffs))
    }

    /// Largest exact valuation of ξ - β over the roots β of `p`, with the root.
    fn root_distance(&self, p: &XPoly) -> Result<Option<(i64, Series)>> {
        let last = self.levels.len() - 1;
        for (li, level) in self.levels.iter().enumerate() {
            let roots = match roots_in_field(p, level.k) {
                Ok(r) => r,
                Err(Error::HorizonTooSmall(_)) if li < last => continue,
                Err(e) => return Err(e),
            };
            if roots.is_empty() {
                return Ok(None);
            }
            let mut best: Option<(i64, Series)> = None;
            let mut unresolved = false;
            for r in roots {
                match level.xi.sub(&r.root).abs() {
                    AbsValue::Exact(v) => {
                        let v = i64::try_from(&v).expect("valuation fits");
                        if best.as_ref().map_or(true, |(b, _)| v > *b) {
                            best = Some((v, r.root));
                        }
                    }
                    _ => unresolved = true,
                }
            }
            if !unresolved || li == last {
                return Ok(best);
            }
        }
        Ok(None)
    }
}
