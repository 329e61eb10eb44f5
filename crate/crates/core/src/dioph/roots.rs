//! Roots of X-polynomials inside F_q((T^{-1})).
//!
//! Internally everything is written in u = T^{-1}, so a root of valuation λ
//! is u^λ times a unit of F_q[[u]].

use std::collections::BTreeMap;

use num_bigint::BigInt;

use crate::algebra::{Field, Fq, TPoly};
use crate::dioph::xpoly::XPoly;
use crate::error::{Error, Result};
use crate::series::Series;

/// Depth limit for the shift recursion on repeated residue roots.
pub const ROOT_RECURSION_CAP: u32 = 64;

/// A root of `defining` in F_q((T^{-1})), known through the horizon of `root`.
#[derive(Clone, Debug)]
pub struct RootDescriptor {
    pub defining: XPoly,
    pub root: Series,
    pub multiplicity: usize,
    /// log_q of the height of `defining`.
    pub height_exponent: usize,
    pub degree_bound: usize,
}

impl RootDescriptor {
    /// A root known exactly from elsewhere, with given height and degree bounds.
    pub fn with_bounds(defining: XPoly, root: Series, height_exponent: usize, degree_bound: usize) -> Self {
        RootDescriptor { defining, root, multiplicity: 1, height_exponent, degree_bound }
    }
}

/// All roots of `p` in F_q((T^{-1})) through exponent `horizon`.
pub fn roots_in_field(p: &XPoly, horizon: i64) -> Result<Vec<RootDescriptor>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let h = p.height_exponent()?;
    let d = p.deg_x().unwrap();
    let found = roots_rec(p, horizon)?;
    Ok(found
        .into_iter()
        .map(|(root, multiplicity)| RootDescriptor {
            defining: p.clone(),
            root,
            multiplicity,
            height_exponent: h,
            degree_bound: d,
        })
        .collect())
}

fn roots_rec(p: &XPoly, horizon: i64) -> Result<Vec<(Series, usize)>> {
    let f = p.field().clone();
    let Some(deg) = p.deg_x() else {
        return Err(Error::ZeroPolynomial);
    };
    if deg == 0 {
        return Ok(Vec::new());
    }
    let zeros = p.coeffs().iter().take_while(|c| c.is_zero()).count();
    if zeros > 0 {
        let rest = XPoly::new(&f, p.coeffs()[zeros..].to_vec());
        let mut out = vec![(Series::zero(&f), zeros)];
        out.extend(roots_rec(&rest, horizon)?);
        return Ok(out);
    }
    if let Some(q) = p.deflate() {
        // P(X) = Q(X^p): roots are p-th roots of roots of Q, multiplicities times p
        let pp = f.p() as i64;
        let mut out = Vec::new();
        for (gamma, m) in roots_rec(&q, horizon * pp)? {
            if let Ok(beta) = gamma.pth_root() {
                out.push((beta, m * pp as usize));
            }
        }
        return Ok(out);
    }
    let g = p.gcd(&p.derivative());
    if g.deg_x().unwrap_or(0) > 0 {
        let mut out = roots_rec(&p.div_exact(&g)?, horizon)?;
        for (r, m) in roots_rec(&g, horizon)? {
            match out.iter_mut().find(|(s, _)| s.terms() == r.terms()) {
                Some(slot) => slot.1 += m,
                None => out.push((r, m)),
            }
        }
        return Ok(out);
    }
    let roots = squarefree_roots(p, horizon)?;
    for (i, a) in roots.iter().enumerate() {
        if roots[i + 1..].iter().any(|b| b.terms() == a.terms()) {
            return Err(Error::HorizonTooSmall(horizon));
        }
    }
    Ok(roots.into_iter().map(|r| (r, 1)).collect())
}

/// Roots of a squarefree polynomial with nonzero constant term.
fn squarefree_roots(p: &XPoly, horizon: i64) -> Result<Vec<Series>> {
    let f = p.field().clone();
    let pts: Vec<(i64, i64)> = p
        .coeffs()
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c.degree().map(|d| (i as i64, -(d as i64))))
        .collect();
    let mut out = Vec::new();
    for w in lower_hull(&pts).windows(2) {
        let ((i1, v1), (i2, v2)) = (w[0], w[1]);
        // a root of valuation λ balances the endpoints: v1 + λ i1 = v2 + λ i2
        if (v1 - v2) % (i2 - i1) != 0 {
            continue;
        }
        let lambda = (v1 - v2) / (i2 - i1);
        let q: Vec<Lp> = p
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| Lp::from_tpoly(c).shift(lambda * i as i64))
            .collect();
        let len = (horizon - lambda + 1).max(0) as usize;
        let units = integral_roots(&f, &q, len, 0, true).map_err(|e| match e {
            Unresolved::Horizon => Error::HorizonTooSmall(horizon),
            Unresolved::Depth => Error::RecursionCapExceeded(ROOT_RECURSION_CAP),
        })?;
        for y in units {
            let terms: BTreeMap<BigInt, Fq> = y
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(j, &c)| (BigInt::from(lambda + j as i64), c))
                .collect();
            out.push(Series::truncated(&f, terms, BigInt::from(horizon)));
        }
    }
    Ok(out)
}

/// Lower convex hull of points sorted by x.
fn lower_hull(pts: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &pt in pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 - a.0) * (pt.1 - a.1) - (b.1 - a.1) * (pt.0 - a.0);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    hull
}

enum Unresolved {
    Horizon,
    Depth,
}

/// Roots of `q` in F_q[[u]] as their first `len` digits. With `units_only`,
/// roots divisible by u are skipped.
fn integral_roots(
    f: &Field,
    q: &[Lp],
    len: usize,
    depth: u32,
    units_only: bool,
) -> std::result::Result<Vec<Vec<Fq>>, Unresolved> {
    let q = normalize(q);
    let residue: Vec<Fq> = q.iter().map(|c| c.coeff(0)).collect();
    let mut out = Vec::new();
    for c in f.elements() {
        if units_only && c.is_zero() {
            continue;
        }
        let m = multiplicity(f, &residue, c);
        if m == 0 {
            continue;
        }
        if m == 1 {
            out.push(newton_lift(f, &q, c, len));
            continue;
        }
        if len <= 1 {
            return Err(Unresolved::Horizon);
        }
        if depth >= ROOT_RECURSION_CAP {
            return Err(Unresolved::Depth);
        }
        let shifted = substitute(f, &q, c);
        for z in integral_roots(f, &shifted, len - 1, depth + 1, false)? {
            let mut y = Vec::with_capacity(len);
            y.push(c);
            y.extend(z);
            out.push(y);
        }
    }
    Ok(out)
}

/// Multiplicity of c as a root of a polynomial over F_q.
fn multiplicity(f: &Field, poly: &[Fq], c: Fq) -> usize {
    let mut cur: Vec<Fq> = poly.to_vec();
    while cur.last().is_some_and(|x| x.is_zero()) {
        cur.pop();
    }
    let mut m = 0;
    while cur.len() > 1 {
        // synthetic division by (y - c)
        let mut quo = vec![Fq::ZERO; cur.len() - 1];
        let mut acc = Fq::ZERO;
        for i in (0..cur.len()).rev() {
            acc = f.add(f.mul(acc, c), cur[i]);
            if i > 0 {
                quo[i - 1] = acc;
            }
        }
        if !acc.is_zero() {
            break;
        }
        m += 1;
        cur = quo;
    }
    m
}

/// q(c + u Z), normalized.
fn substitute(f: &Field, q: &[Lp], c: Fq) -> Vec<Lp> {
    let mut a: Vec<Lp> = q.to_vec();
    let d = a.len();
    for i in 0..d {
        for j in (i..d - 1).rev() {
            let t = a[j + 1].scale(f, c);
            a[j] = a[j].add(f, &t);
        }
    }
    let shifted: Vec<Lp> = a.into_iter().enumerate().map(|(k, c)| c.shift(k as i64)).collect();
    normalize(&shifted)
}

fn normalize(q: &[Lp]) -> Vec<Lp> {
    let mu = q.iter().filter_map(Lp::val).min().unwrap_or(0);
    q.iter().map(|c| c.shift(-mu)).collect()
}

/// Newton iteration from a simple residue root, doubling the precision.
fn newton_lift(f: &Field, q: &[Lp], c: Fq, len: usize) -> Vec<Fq> {
    if len == 0 {
        return Vec::new();
    }
    let dense: Vec<Vec<Fq>> = q.iter().map(|a| a.dense(len)).collect();
    let deriv: Vec<Vec<Fq>> = dense
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, a)| {
            let k = f.from_u64(i as u64 % f.p());
            a.iter().map(|&x| f.mul(k, x)).collect()
        })
        .collect();
    let mut y = vec![Fq::ZERO; len];
    y[0] = c;
    let mut prec = 1;
    while prec < len {
        prec = (2 * prec).min(len);
        let val = horner(f, &dense, &y, prec);
        let dval = horner(f, &deriv, &y, prec);
        let step = ps_mul(f, &val, &ps_inv(f, &dval, prec), prec);
        for i in 0..prec {
            y[i] = f.sub(y[i], step[i]);
        }
    }
    y
}

fn horner(f: &Field, coeffs: &[Vec<Fq>], y: &[Fq], prec: usize) -> Vec<Fq> {
    let mut acc = vec![Fq::ZERO; prec];
    for c in coeffs.iter().rev() {
        acc = ps_mul(f, &acc, y, prec);
        for i in 0..prec {
            acc[i] = f.add(acc[i], c[i]);
        }
    }
    acc
}

fn ps_mul(f: &Field, a: &[Fq], b: &[Fq], prec: usize) -> Vec<Fq> {
    let mut out = vec![Fq::ZERO; prec];
    for (i, &x) in a.iter().enumerate().take(prec) {
        if x.is_zero() {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(prec - i) {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    out
}

fn ps_inv(f: &Field, a: &[Fq], prec: usize) -> Vec<Fq> {
    let a0 = f.inv(a[0]).expect("unit power series");
    let mut out = vec![Fq::ZERO; prec];
    out[0] = a0;
    for k in 1..prec {
        let mut s = Fq::ZERO;
        for i in 1..=k.min(a.len() - 1) {
            s = f.add(s, f.mul(a[i], out[k - i]));
        }
        out[k] = f.neg(f.mul(s, a0));
    }
    out
}

/// A Laurent polynomial in u: Σ coeffs[j] u^{start + j}.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Lp {
    start: i64,
    coeffs: Vec<Fq>,
}

impl Lp {
    fn new(start: i64, mut coeffs: Vec<Fq>) -> Lp {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        let lead = coeffs.iter().take_while(|c| c.is_zero()).count();
        coeffs.drain(..lead);
        Lp { start: start + lead as i64, coeffs }
    }

    fn from_tpoly(c: &TPoly) -> Lp {
        match c.degree() {
            None => Lp { start: 0, coeffs: Vec::new() },
            Some(d) => Lp::new(-(d as i64), c.coeffs().iter().rev().copied().collect()),
        }
    }

    fn val(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then_some(self.start)
    }

    fn coeff(&self, e: i64) -> Fq {
        let i = e - self.start;
        if i < 0 {
            return Fq::ZERO;
        }
        self.coeffs.get(i as usize).copied().unwrap_or(Fq::ZERO)
    }

    fn shift(&self, k: i64) -> Lp {
        Lp { start: self.start + k, coeffs: self.coeffs.clone() }
    }

    fn scale(&self, f: &Field, c: Fq) -> Lp {
        Lp::new(self.start, self.coeffs.iter().map(|&x| f.mul(x, c)).collect())
    }

    fn add(&self, f: &Field, other: &Lp) -> Lp {
        if self.coeffs.is_empty() {
            return other.clone();
        }
        if other.coeffs.is_empty() {
            return self.clone();
        }
        let lo = self.start.min(other.start);
        let hi = (self.start + self.coeffs.len() as i64).max(other.start + other.coeffs.len() as i64);
        let coeffs = (lo..hi).map(|e| f.add(self.coeff(e), other.coeff(e))).collect();
        Lp::new(lo, coeffs)
    }

    /// Coefficients of u^0 .. u^{len-1}; the valuation must be ≥ 0.
    fn dense(&self, len: usize) -> Vec<Fq> {
        (0..len as i64).map(|e| self.coeff(e)).collect()
    }
}

/// The expansion of a/b as the root of bX - a.
pub fn rational_root(a: &TPoly, b: &TPoly, horizon: i64) -> Result<RootDescriptor> {
    let f = a.field();
    let g = a.gcd(b);
    let (a, b) = if g.is_zero() { (a.clone(), b.clone()) } else { (a.div_exact(&g)?, b.div_exact(&g)?) };
    let root = crate::series::series_from_rational(&a, &b, horizon)?;
    let defining = XPoly::new(f, vec![a.neg(), b.clone()]);
    let h = defining.height_exponent()?;
    Ok(RootDescriptor { defining, root, multiplicity: 1, height_exponent: h, degree_bound: 1 })
}
