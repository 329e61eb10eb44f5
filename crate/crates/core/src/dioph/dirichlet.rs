//! Small-value polynomials by linear algebra over F_q.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::algebra::{AbsValue, Field, Fq, TPoly};
use crate::dioph::xpoly::XPoly;
use crate::error::{Error, Result};
use crate::series::Series;

#[derive(Clone, Debug)]
pub struct DirichletWitness {
    /// P, in terms of the normalized ξ - A.
    pub poly: XPoly,
    /// The polynomial part A subtracted from ξ first.
    pub shift: TPoly,
    pub n: usize,
    pub h: usize,
    pub value_valuation: BigInt,
    /// c with v(P(ξ - A)) ≥ (n+1)h - n - c guaranteed by the construction.
    pub construction_constant: i64,
    /// value_valuation / (h - 1)
    pub exponent_ratio: BigRational,
}

/// A nonzero P with deg_X P ≤ n, coefficient degrees < h and P(ξ - A)
/// vanishing through T^{-(nh-1)}.
pub fn dirichlet_witness(xi: &Series, n: usize, h: usize, refinement_cap: u32) -> Result<DirichletWitness> {
    if n == 0 || h < 2 {
        return Err(Error::InvalidArgument("dirichlet witness needs n >= 1 and h >= 2".into()));
    }
    let field = xi.field().clone();
    let shift = xi.polynomial_part();
    let x = xi.sub(&Series::from_tpoly(&shift));
    let unknowns = (n + 1) * h;
    let top = (n * h) as i64 - 1;
    let bottom = -(h as i64 - 1);
    let need = top + h as i64;
    let x = x.extend_to(&BigInt::from(need))?;
    let powers = power_windows(&field, &x, n, need)?;

    // row m - bottom: coefficient of T^{-m}; column i*h + d: c_{i,d}
    let rows = (top - bottom + 1) as usize;
    let mut mat = vec![vec![Fq::ZERO; unknowns]; rows];
    for (r, row) in mat.iter_mut().enumerate() {
        let m = bottom + r as i64;
        for i in 0..=n {
            for d in 0..h {
                let e = m + d as i64;
                if (0..=need).contains(&e) {
                    row[i * h + d] = powers[i][e as usize];
                }
            }
        }
    }
    for v in kernel(&field, mat, unknowns) {
        let coeffs: Vec<TPoly> = v.chunks(h).map(|c| TPoly::new(&field, c.to_vec())).collect();
        let poly = XPoly::new(&field, coeffs);
        match poly.eval(&x)?.abs_refined(refinement_cap) {
            Ok(AbsValue::Exact(val)) => {
                let exponent_ratio = BigRational::new(val.clone(), BigInt::from(h as i64 - 1));
                return Ok(DirichletWitness {
                    poly,
                    shift,
                    n,
                    h,
                    value_valuation: val,
                    construction_constant: h as i64 - n as i64,
                    exponent_ratio,
                });
            }
            Ok(_) | Err(Error::PrecisionExhausted(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::ZeroValueWitness(format!(
        "every kernel vector for n = {n}, h = {h} vanishes at the working precision"
    )))
}

/// Dense coefficients of ξ^0, …, ξ^n on exponents 0..=hi, for |ξ| < 1.
fn power_windows(field: &Field, x: &Series, n: usize, hi: i64) -> Result<Vec<Vec<Fq>>> {
    let len = hi as usize + 1;
    let w1 = x.dense_window(0, hi)?;
    let mut one = vec![Fq::ZERO; len];
    one[0] = Fq::ONE;
    let mut out = vec![one];
    for i in 1..=n {
        let prev = &out[i - 1];
        let mut w = vec![Fq::ZERO; len];
        for (a, &pa) in prev.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            for (b, &wb) in w1[..len - a].iter().enumerate() {
                if !wb.is_zero() {
                    w[a + b] = field.add(w[a + b], field.mul(pa, wb));
                }
            }
        }
        out.push(w);
    }
    Ok(out)
}

/// Kernel basis of `mat` (rows × cols) by reduced row echelon form.
fn kernel(field: &Field, mut mat: Vec<Vec<Fq>>, cols: usize) -> Vec<Vec<Fq>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..mat.len()).find(|&i| !mat[i][c].is_zero()) else {
            continue;
        };
        mat.swap(r, p);
        let inv = field.inv(mat[r][c]).expect("nonzero pivot");
        for x in mat[r].iter_mut() {
            *x = field.mul(*x, inv);
        }
        let pivot_row = mat[r].clone();
        for (i, row) in mat.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c];
                for (x, &y) in row.iter_mut().zip(&pivot_row) {
                    *x = field.sub(*x, field.mul(f, y));
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == mat.len() {
            break;
        }
    }
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![Fq::ZERO; cols];
            v[free] = Fq::ONE;
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = field.neg(mat[row][free]);
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mahler::MahlerSpec;
    use crate::series::series_from_rational;

    fn xi2() -> Series {
        let f2 = Field::prime(2).unwrap();
        MahlerSpec::uniform(&f2, 1, 2).unwrap().xi(&BigInt::from(256)).unwrap()
    }

    #[test]
    fn witness_meets_the_guarantee() {
        let xi = xi2();
        for (n, h) in [(1, 6), (2, 5), (2, 6), (3, 4)] {
            let w = dirichlet_witness(&xi, n, h, 6).unwrap();
            assert!(w.poly.deg_x().unwrap() <= n);
            assert!(w.poly.height_exponent().unwrap() < h);
            let floor = BigInt::from(((n + 1) * h) as i64 - n as i64 - w.construction_constant);
            assert!(w.value_valuation >= floor);
            let v = w.poly.eval(&xi).unwrap().abs();
            assert_eq!(v, AbsValue::Exact(w.value_valuation.clone()));
        }
    }

    #[test]
    fn spec_ratios() {
        let xi = xi2();
        let w = dirichlet_witness(&xi, 1, 6, 6).unwrap();
        assert!(w.exponent_ratio >= BigRational::new(4.into(), 5.into()));
        let w = dirichlet_witness(&xi, 2, 5, 6).unwrap();
        assert!(w.exponent_ratio >= BigRational::new(3.into(), 2.into()));
    }

    #[test]
    fn normalization_records_shift() {
        let xi = xi2();
        let big = xi.add(&Series::from_tpoly(&TPoly::from_codes(xi.field(), &[1, 1, 1])));
        let w = dirichlet_witness(&big, 1, 5, 6).unwrap();
        assert_eq!(w.shift, TPoly::from_codes(xi.field(), &[1, 1, 1]));
    }

    #[test]
    fn rational_gives_zero_value() {
        let f3 = Field::prime(3).unwrap();
        let xi = series_from_rational(&TPoly::one(&f3), &TPoly::from_codes(&f3, &[2, 1]), 64).unwrap();
        assert!(matches!(dirichlet_witness(&xi, 1, 4, 2), Err(Error::ZeroValueWitness(_))));
    }

    #[test]
    fn kernel_vectors_solve_the_system() {
        let f3 = Field::prime(3).unwrap();
        let mat: Vec<Vec<Fq>> = [[1u64, 2, 0, 1], [0, 1, 1, 2]]
            .iter()
            .map(|r| r.iter().map(|&c| f3.elem(c).unwrap()).collect())
            .collect();
        let ker = kernel(&f3, mat.clone(), 4);
        assert_eq!(ker.len(), 2);
        for v in ker {
            for row in &mat {
                let s = row.iter().zip(&v).fold(Fq::ZERO, |s, (&a, &b)| f3.add(s, f3.mul(a, b)));
                assert!(s.is_zero());
            }
        }
    }
}
