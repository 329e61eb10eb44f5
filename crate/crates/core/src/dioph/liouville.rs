//! Liouville lower bounds |α - β| ≥ H(α)^{-deg β} H(β)^{-deg α}.

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::algebra::{AbsValue, Field, Fq, TPoly};
use crate::dioph::roots::RootDescriptor;
use crate::error::{Error, Result};
use crate::mahler::MahlerSpec;

/// Outcome of one pair. Valuations: the bound holds iff `measured ≤ bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiouvilleCheck {
    pub bound: BigInt,
    pub measured: BigInt,
    pub pass: bool,
}

pub fn liouville_check(a: &RootDescriptor, b: &RootDescriptor) -> Result<LiouvilleCheck> {
    let bound = BigInt::from(a.height_exponent) * b.degree_bound + BigInt::from(b.height_exponent) * a.degree_bound;
    match a.root.sub(&b.root).abs() {
        AbsValue::Exact(v) => Ok(LiouvilleCheck { pass: v <= bound, bound, measured: v }),
        AbsValue::Below(v) => Err(Error::IndistinguishableAtHorizon(v)),
        AbsValue::Zero => Err(Error::IndistinguishableAtHorizon(BigInt::from(0))),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LiouvilleSummary {
    pub pairs: u64,
    pub failures: u64,
    /// Pairs where the series distance disagreed with exact rational arithmetic.
    pub oracle_mismatches: u64,
}

/// Reduced a/b with b monic and deg a, deg b ≤ max_deg.
pub fn reduced_rationals(field: &Field, max_deg: usize) -> Vec<(TPoly, TPoly)> {
    let all = |monic: bool| {
        let q = field.q();
        let mut out = Vec::new();
        for len in 1..=max_deg + 1 {
            let count = q.pow(len as u32);
            for idx in 0..count {
                let mut i = idx;
                let codes: Vec<u64> = (0..len)
                    .map(|_| {
                        let c = i % q;
                        i /= q;
                        c
                    })
                    .collect();
                if codes[len - 1] == 0 || (monic && codes[len - 1] != 1) {
                    continue;
                }
                out.push(TPoly::from_codes(field, &codes));
            }
        }
        out
    };
    let mut nums = all(false);
    nums.insert(0, TPoly::zero(field));
    let dens = all(true);
    let mut out = Vec::new();
    for b in &dens {
        for a in &nums {
            if a.gcd(b).degree() == Some(0) || (a.is_zero() && b.degree() == Some(0)) {
                out.push((a.clone(), b.clone()));
            }
        }
    }
    out
}

/// Every distinct pair of rationals with height ≤ q^max_deg.
pub fn liouville_rationals(field: &Field, max_deg: usize) -> LiouvilleSummary {
    let rats = reduced_rationals(field, max_deg);
    // valuations of differences never exceed 2·max_deg
    let lo = -(max_deg as i64);
    let hi = 2 * max_deg as i64 + 2;
    let windows: Vec<Vec<Fq>> = rats
        .iter()
        .map(|(a, b)| {
            crate::series::series_from_rational(a, b, hi)
                .and_then(|s| s.dense_window(lo, hi))
                .expect("rational expansion")
        })
        .collect();
    let heights: Vec<i64> = rats
        .iter()
        .map(|(a, b)| a.degree().unwrap_or(0).max(b.degree().unwrap_or(0)) as i64)
        .collect();
    (0..rats.len())
        .into_par_iter()
        .map(|i| {
            let mut s = LiouvilleSummary::default();
            let (a, b) = &rats[i];
            for k in i + 1..rats.len() {
                let (c, d) = &rats[k];
                s.pairs += 1;
                let measured = windows[i].iter().zip(&windows[k]).position(|(x, y)| x != y).map(|p| lo + p as i64);
                let oracle = b.mul(d).degree().unwrap() as i64 - a.mul(d).sub(&b.mul(c)).degree().unwrap() as i64;
                if measured != Some(oracle) {
                    s.oracle_mismatches += 1;
                }
                if oracle > heights[i] + heights[k] {
                    s.failures += 1;
                }
            }
            s
        })
        .reduce(LiouvilleSummary::default, |x, y| LiouvilleSummary {
            pairs: x.pairs + y.pairs,
            failures: x.failures + y.failures,
            oracle_mismatches: x.oracle_mismatches + y.oracle_mismatches,
        })
}

#[derive(Clone, Debug, Default)]
pub struct ApproximantPairs {
    /// (j, k, j', k', outcome)
    pub checks: Vec<(usize, u64, usize, u64, LiouvilleCheck)>,
    /// Pairs that agree through one past the bound: equal, or a violation.
    pub indistinguishable: Vec<(usize, u64, usize, u64)>,
}

/// Every pair α(j, k), α(j', k') with j ≤ max_j and k ≤ max_k, using the
/// annihilators' exact heights and X-degrees as the bounds.
pub fn liouville_approximants(spec: &MahlerSpec, max_j: usize, max_k: u64) -> Result<ApproximantPairs> {
    let mut items = Vec::new();
    for j in 0..=max_j {
        for k in 1..=max_k {
            let ann = spec.annihilator(j, k)?;
            let h: usize = ann.height_exponent().try_into().map_err(|_| Error::ExponentBudgetExceeded {
                needed: ann.height_exponent().to_string(),
                budget: u64::MAX,
            })?;
            let d: usize = ann.x_degree().try_into().expect("r_j fits");
            items.push((j, k, h, d));
        }
    }
    let mut out = ApproximantPairs::default();
    for (x, &(j, k, ha, da)) in items.iter().enumerate() {
        for &(j2, k2, hb, db) in &items[x + 1..] {
            let horizon = BigInt::from(ha) * db + BigInt::from(hb) * da + 1;
            let a = spec.approximant(j, k, &horizon)?;
            let b = spec.approximant(j2, k2, &horizon)?;
            let dummy = crate::dioph::xpoly::XPoly::zero(spec.field());
            let ra = RootDescriptor::with_bounds(dummy.clone(), a, ha, da);
            let rb = RootDescriptor::with_bounds(dummy, b, hb, db);
            match liouville_check(&ra, &rb) {
                Ok(c) => out.checks.push((j, k, j2, k2, c)),
                Err(Error::IndistinguishableAtHorizon(_)) => out.indistinguishable.push((j, k, j2, k2)),
                Err(e) => return Err(e),
            }
        }
    }
    Ok(out)
}
