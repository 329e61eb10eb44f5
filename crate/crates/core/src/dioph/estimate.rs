//! Finite-scale exponent windows and type bounds for ξ(r, m).

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::algebra::AbsValue;
use crate::error::{Error, Result};
use crate::mahler::MahlerSpec;

#[derive(Clone, Debug)]
pub struct ApplioRow {
    pub k: u64,
    /// log_q β(j, k) = r_{j+1}^k r_j
    pub log_beta: BigUint,
    pub distance_valuation: BigInt,
    /// -log|ξ - α(j,k)| / log β(j,k)
    pub distance_ratio: BigRational,
    /// log H(α(j,k)) / log β(j,k), from the exact annihilator height.
    pub height_ratio: BigRational,
    /// log β(j, k_{i+1}) / log β(j, k_i); absent on the last row.
    pub beta_ratio: Option<BigRational>,
}

#[derive(Clone, Debug)]
pub struct ApplioReport {
    pub j: usize,
    /// d = r_j
    pub d: BigUint,
    /// δ = ρ = r_{j+1}^2 / r_j - r_j
    pub delta: BigRational,
    pub rho: BigRational,
    /// θ = r_{j+p}^2
    pub theta: BigUint,
    pub expected_ratio: BigRational,
    pub rows: Vec<ApplioRow>,
    pub distance_ratios_exact: bool,
    pub beta_ratios_bounded: bool,
    pub heights_bounded: bool,
    /// [d + δ - 1, (d + ρ) dθ/δ - 1], a window for w*_{r_j}(ξ).
    pub window: (BigRational, BigRational),
}

impl ApplioReport {
    pub fn pass(&self) -> bool {
        self.distance_ratios_exact && self.beta_ratios_bounded && self.heights_bounded
    }
}

fn ratio(a: impl Into<BigInt>, b: impl Into<BigInt>) -> BigRational {
    BigRational::new(a.into(), b.into())
}

pub fn applio_consistency(spec: &MahlerSpec, j: usize, count: usize) -> Result<ApplioReport> {
    if count < 2 {
        return Err(Error::InvalidArgument("applio consistency needs count >= 2".into()));
    }
    let p = spec.p() as usize;
    let rj = spec.r_j(j)?;
    let rj1 = spec.r_j(j + 1)?;
    let rjp = spec.r_j(j + p)?;
    let d = BigRational::from_integer(rj.clone().into());
    let expected = ratio(&rj1 * &rj1, rj.clone());
    let delta = &expected - &d;
    let theta = &rjp * &rjp;
    let theta_q = BigRational::from_integer(theta.clone().into());
    let one = BigRational::one();
    let window = (
        &d + &delta - &one,
        (&d + &delta) * &d * &theta_q / &delta - &one,
    );

    let ks = spec.k_set(j, count);
    let mut rows = Vec::with_capacity(count);
    for &k in &ks {
        let log_beta = rj1.pow(k as u32) * &rj;
        let v = match spec.approximant_distance(j, k)? {
            AbsValue::Exact(v) => v,
            other => {
                return Err(Error::PrecisionExhausted(other.valuation().cloned().unwrap_or_default()))
            }
        };
        let height = spec.annihilator(j, k)?.height_exponent().clone();
        rows.push(ApplioRow {
            k,
            distance_ratio: ratio(v.clone(), log_beta.clone()),
            height_ratio: ratio(height, log_beta.clone()),
            log_beta,
            distance_valuation: v,
            beta_ratio: None,
        });
    }
    for i in 0..rows.len() - 1 {
        let r = ratio(rows[i + 1].log_beta.clone(), rows[i].log_beta.clone());
        rows[i].beta_ratio = Some(r);
    }
    let distance_ratios_exact = rows.iter().all(|r| r.distance_ratio == expected);
    let beta_ratios_bounded = rows.iter().filter_map(|r| r.beta_ratio.as_ref()).all(|b| *b <= theta_q);
    let heights_bounded = rows.iter().all(|r| r.height_ratio <= one);
    Ok(ApplioReport {
        j,
        d: rj,
        rho: delta.clone(),
        delta,
        theta,
        expected_ratio: expected,
        rows,
        distance_ratios_exact,
        beta_ratios_bounded,
        heights_bounded,
        window,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeRow {
    pub j: usize,
    pub lower: BigUint,
    pub star_upper: BigUint,
    pub upper: BigUint,
    pub refined_star_upper: Option<BigUint>,
    pub refined_upper: Option<BigUint>,
}

/// Sup over 1 ≤ j ≤ J of each bound; every value is a truncation, not a limit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeBounds {
    pub truncation: usize,
    pub rows: Vec<TypeRow>,
    pub lower: BigUint,
    pub star_upper: BigUint,
    pub upper: BigUint,
    /// Present when the tail has m_j ≥ 3.
    pub refined_star_upper: Option<BigUint>,
    pub refined_upper: Option<BigUint>,
}

pub fn type_bounds(spec: &MahlerSpec, truncation: usize) -> TypeBounds {
    let p = spec.p() as i64;
    let refined = spec.m_tail() >= 3;
    let rows: Vec<TypeRow> = (1..=truncation)
        .map(|j| {
            let m = BigUint::from(spec.m(j));
            let m1 = BigUint::from(spec.m(j + 1));
            let prod = spec.big_m(j, j as i64 + p);
            let two = BigUint::from(2u32);
            TypeRow {
                j,
                lower: &two * &m - 1u32,
                star_upper: &m + &two * &prod,
                upper: &two * &m + &two * &prod,
                refined_star_upper: refined.then(|| &m + &two * &m * &m1),
                refined_upper: refined.then(|| &two * &m + &two * &m * &m1),
            }
        })
        .collect();
    let sup = |f: &dyn Fn(&TypeRow) -> BigUint| rows.iter().map(f).max().unwrap_or_else(BigUint::zero);
    TypeBounds {
        truncation,
        lower: sup(&|r| r.lower.clone()),
        star_upper: sup(&|r| r.star_upper.clone()),
        upper: sup(&|r| r.upper.clone()),
        refined_star_upper: refined.then(|| sup(&|r| r.refined_star_upper.clone().unwrap())),
        refined_upper: refined.then(|| sup(&|r| r.refined_upper.clone().unwrap())),
        rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Field;

    #[test]
    fn applio_r2_j0() {
        let f2 = Field::prime(2).unwrap();
        let spec = MahlerSpec::uniform(&f2, 1, 2).unwrap();
        let rep = applio_consistency(&spec, 0, 3).unwrap();
        assert_eq!(rep.expected_ratio, ratio(8, 1));
        assert!(rep.pass(), "{rep:?}");
        assert_eq!(rep.window, (ratio(7, 1), ratio(2045, 3)));
        for w in rep.rows.windows(2) {
            let gap = w[1].k - w[0].k;
            assert_eq!(w[0].beta_ratio, Some(ratio(BigUint::from(4u32).pow(gap as u32), 1)));
        }
    }

    #[test]
    fn applio_j1() {
        let f2 = Field::prime(2).unwrap();
        let spec = MahlerSpec::uniform(&f2, 1, 2).unwrap();
        let rep = applio_consistency(&spec, 1, 2).unwrap();
        assert_eq!(rep.expected_ratio, ratio(64, 1));
        assert!(rep.pass());
    }

    #[test]
    fn type_bound_examples() {
        let f2 = Field::prime(2).unwrap();
        let t = type_bounds(&MahlerSpec::uniform(&f2, 1, 2).unwrap(), 5);
        assert_eq!(t.lower, BigUint::from(3u32));
        assert_eq!(t.upper, BigUint::from(20u32));
        assert_eq!(t.star_upper, BigUint::from(18u32));
        assert!(t.refined_upper.is_none());
        let t = type_bounds(&MahlerSpec::uniform(&f2, 1, 3).unwrap(), 5);
        assert_eq!(t.refined_star_upper, Some(BigUint::from(21u32)));
        assert_eq!(t.refined_upper, Some(BigUint::from(24u32)));
    }

    #[test]
    fn growing_prefix_grows_lower_bound() {
        let f2 = Field::prime(2).unwrap();
        let prefix: Vec<u64> = (0..8).map(|j| if j == 0 { 1 } else { j + 2 }).collect();
        let spec = MahlerSpec::new(&f2, 1, prefix, 2, None).unwrap();
        let lows: Vec<BigUint> = (1..=7).map(|j| type_bounds(&spec, j).lower).collect();
        assert!(lows.windows(2).all(|w| w[0] < w[1]));
    }
}
