//! Acceptance criteria 1-14, one PASS/FAIL line each.

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tnum_cli::commands::{verify, VerifyParams};
use tnum_cli::{RunConfig, TargetFile, VerifyTarget};
use tnum_core::dioph::{
    applio_consistency, dirichlet_witness, liouville_approximants, liouville_rationals, random_xpoly,
    roots_in_field, wn_scan, ScanConfig, XPoly,
};
use tnum_core::mahler::{block_sum_oracle, frobenius_residual};
use tnum_core::series::series_from_rational;
use tnum_core::{AbsValue, Budgets, Field, Fq, MahlerSpec, Series, TPoly};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn prime(p: u64) -> Field {
    Field::prime(p).unwrap()
}

fn spec(field: &Field, s: u32, prefix: Vec<u64>, tail: u64) -> MahlerSpec {
    MahlerSpec::new(field, s, prefix, tail, None).unwrap()
}

fn cfg(spec: MahlerSpec) -> RunConfig {
    RunConfig { spec, budgets: Budgets::default(), target: TargetFile::Xi {}, polynomial: None }
}

fn rat(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

fn run_verify(rc: &RunConfig, target: VerifyTarget, tweak: impl Fn(&mut VerifyParams)) -> Result<(usize, usize), String> {
    let mut prm = VerifyParams::defaults(target);
    tweak(&mut prm);
    let rep = verify(rc, target, &prm).map_err(|e| e.to_string())?;
    ensure(!rep.instances.is_empty(), format!("{target:?}: nothing checked"))?;
    ensure(rep.pass(), format!("{target:?}: {} failing instance(s): {}", rep.failures(), rep.to_json()))?;
    Ok((rep.instances.len(), rep.skipped.len()))
}

fn c1_frobenius() -> Check {
    let f4 = Field::new(2, 2, None).map_err(|e| e.to_string())?;
    let h = BigInt::from(1000);
    for (field, s, label) in [(prime(2), 1, "(2,2)"), (prime(3), 1, "(3,3)"), (f4, 2, "(4,4)"), (prime(2), 2, "(2,4)")] {
        let res = frobenius_residual(&field, s, &h).map_err(|e| e.to_string())?.abs();
        ensure(matches!(&res, AbsValue::Below(v) if *v > h), format!("{label}: residual {res}"))?;
    }
    Ok("residual <= q^-1001 at horizon 1000 for (q,r) = (2,2), (3,3), (4,4), (2,4)".into())
}

/// a_n = 1 iff n = 2^e with the 2-adic valuation of e even.
fn example_rule(n: u64) -> u32 {
    if n < 2 || !n.is_power_of_two() {
        return 0;
    }
    let e = n.trailing_zeros();
    u32::from(e.trailing_zeros() % 2 == 0)
}

fn c2_coefficients() -> Check {
    let s = spec(&prime(2), 1, vec![1], 2);
    let bound = 1u64 << 16;
    let h = BigInt::from(bound);
    let xi = s.xi(&h).map_err(|e| e.to_string())?;
    let oracle = block_sum_oracle(&s, 0, None, &h).map_err(|e| e.to_string())?;
    let mut ones = 0;
    for n in 0..=bound {
        let k = BigInt::from(n);
        let c = xi.coeff(&k).map_err(|e| e.to_string())?.code();
        let o = oracle.coeff(&k).map_err(|e| e.to_string())?.code();
        ensure(c == example_rule(n) && c == o, format!("n = {n}: generator {c}, rule {}, oracle {o}", example_rule(n)))?;
        ones += c;
    }
    Ok(format!("n <= 65536 agree with the 2^(4^k l) rule and the block-sum oracle ({ones} nonzero)"))
}

fn c3_a_b() -> Check {
    let f4 = Field::new(2, 2, None).map_err(|e| e.to_string())?;
    let specs = [
        ("p=2 tail 2", spec(&prime(2), 1, vec![1], 2)),
        ("p=2 tail 3", spec(&prime(2), 1, vec![1], 3)),
        ("p=3 tail 2", spec(&prime(3), 1, vec![1], 2)),
        ("q=4 prefix (1,2,3) tail 2", spec(&f4, 2, vec![1, 2, 3], 2)),
    ];
    for (label, s) in specs {
        let rc = cfg(s);
        for t in [VerifyTarget::Bjn, VerifyTarget::Ajn] {
            run_verify(&rc, t, |p| {
                p.j = 3;
                p.horizon = 256;
            })
            .map_err(|e| format!("{label}: {e}"))?;
        }
    }
    Ok("b(j,n) and a(j,n) match block sums for j <= 3, n <= 256 on 4 specs".into())
}

fn c4_annihilator() -> Check {
    let mut checked = 0;
    let mut skipped = 0;
    for s in [spec(&prime(2), 1, vec![1], 2), spec(&prime(3), 1, vec![1], 2)] {
        let (c, k) = run_verify(&cfg(s), VerifyTarget::Annihilator, |p| {
            p.j = 2;
            p.count = 3;
        })?;
        checked += c;
        skipped += k;
    }
    Ok(format!(
        "{checked} (j,k) with j <= 2, k <= 3 vanish, deg_X = r_j, exact height q^(r_(j+1)^k' r_j) within bound; {skipped} over the exponent budget"
    ))
}

fn c5_distance() -> Check {
    let mut n = 0;
    for s in [spec(&prime(2), 1, vec![1], 2), spec(&prime(3), 1, vec![1], 2)] {
        for j in 0..=1 {
            for i in 1..=3 {
                let c = s.distance_identity_check(j, i).map_err(|e| e.to_string())?;
                let want = AbsValue::Exact(BigInt::from(c.claimed.clone()));
                ensure(c.pass && c.measured == want, format!("j={j} k={}: {} vs {}", c.k, c.measured, want))?;
                n += 1;
            }
        }
    }
    Ok(format!("{n} exact valuations equal r_(j+1)^(k+2) (p = 2 and p = 3)"))
}

fn c6_sandwich() -> Check {
    let mut n = 0;
    for s in [spec(&prime(2), 1, vec![1], 2), spec(&prime(3), 1, vec![1], 2)] {
        for j in 0..=1 {
            for k in 1..=6 {
                let c = s.sandwich_check(j, k).map_err(|e| e.to_string())?;
                let ok = matches!(&c.measured, AbsValue::Exact(v)
                    if *v >= BigInt::from(c.lower.clone()) && *v <= BigInt::from(c.upper.clone()));
                ensure(ok && c.pass, format!("j={j} k={k}: {} not in [{}, {}]", c.measured, c.lower, c.upper))?;
                n += 1;
            }
        }
    }
    Ok(format!("{n} distances lie in [r_(j+1)^(k+1), r_(j+1)^(k+2)]"))
}

/// Product by schoolbook convolution of the T-coefficients.
fn naive_product(p: &XPoly, q: &XPoly) -> Vec<TPoly> {
    let f = p.field();
    let mut out = vec![TPoly::zero(f); p.coeffs().len() + q.coeffs().len()];
    for (i, a) in p.coeffs().iter().enumerate() {
        for (k, b) in q.coeffs().iter().enumerate() {
            out[i + k] = out[i + k].add(&a.mul(b));
        }
    }
    out
}

fn max_degree(cs: &[TPoly]) -> Option<usize> {
    cs.iter().filter_map(|c| c.degree()).max()
}

fn c7_heights() -> Check {
    let f4 = Field::new(2, 2, None).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for field in [prime(2), prime(3), f4] {
        let mut done = 0;
        while done < 1000 {
            let mut draw = || random_xpoly(&field, rng.gen_range(0..=4), rng.gen_range(0..=6), || rng.gen());
            let (p, q) = (draw(), draw());
            if p.is_zero() || q.is_zero() {
                continue;
            }
            let (hp, hq) = (p.height_exponent().unwrap(), q.height_exponent().unwrap());
            let pq = p.mul(&q);
            let naive = max_degree(&naive_product(&p, &q));
            ensure(
                pq.height_exponent().ok() == Some(hp + hq) && naive == Some(hp + hq),
                format!("F_{}: H({p}) H({q}) != H(PQ)", field.q()),
            )?;
            done += 1;
        }
    }
    Ok("1000 random pairs per field in F_2, F_3, F_4: H(PQ) = H(P) H(Q)".into())
}

fn c8_liouville() -> Check {
    let mut pairs = 0;
    for p in [2, 3] {
        let s = liouville_rationals(&prime(p), 3);
        ensure(
            s.failures == 0 && s.oracle_mismatches == 0,
            format!("q={p}: {} failures, {} oracle mismatches", s.failures, s.oracle_mismatches),
        )?;
        pairs += s.pairs;
    }
    let mut approx = 0;
    for s in [spec(&prime(2), 1, vec![1], 2), spec(&prime(3), 1, vec![1], 2)] {
        let out = liouville_approximants(&s, 1, 3).map_err(|e| e.to_string())?;
        for (j, k, j2, k2, c) in &out.checks {
            ensure(c.pass, format!("alpha({j},{k}) vs alpha({j2},{k2}): {} > {}", c.measured, c.bound))?;
        }
        for &(j, k, j2, k2) in &out.indistinguishable {
            let equal = j == j2 && (k.min(k2) + 1..=k.max(k2)).all(|n| s.b_coeff(j, n).is_zero());
            ensure(equal, format!("alpha({j},{k}) vs alpha({j2},{k2}) agree past the bound but differ"))?;
        }
        approx += out.checks.len();
    }
    Ok(format!("{pairs} rational pairs (height <= q^3, q = 2, 3) and {approx} approximant pairs, zero failures"))
}

fn mahler_alpha(p: u64) -> Series {
    spec(&prime(p), 1, vec![1], 2).alpha_block(0, &BigInt::from(400)).unwrap()
}

fn c9_mahler_record() -> Check {
    let three = wn_scan(&mahler_alpha(3), &ScanConfig::new(1, 6)).map_err(|e| e.to_string())?;
    let two = wn_scan(&mahler_alpha(2), &ScanConfig::new(1, 6)).map_err(|e| e.to_string())?;
    let b3 = three.best_exponent.ok_or("no record for r=3")?;
    let b2 = two.best_exponent.ok_or("no record for r=2")?;
    ensure(b3 >= rat(17, 10) && b3 <= rat(3, 1), format!("r=3 best_exponent {b3} outside [1.7, 3.0]"))?;
    ensure(b2 >= rat(7, 10) && b2 <= rat(2, 1), format!("r=2 best_exponent {b2} outside [0.7, 2.0]"))?;
    Ok(format!("best_exponent {b3} for r=3 (target 2) and {b2} for r=2"))
}

fn c10_rational() -> Check {
    let f3 = prime(3);
    let xi = series_from_rational(&TPoly::one(&f3), &TPoly::from_codes(&f3, &[2, 1]), 128).map_err(|e| e.to_string())?;
    let t = wn_scan(&xi, &ScanConfig::new(1, 4)).map_err(|e| e.to_string())?;
    let b = t.best_exponent.ok_or("no record")?;
    ensure(b <= rat(1, 2), format!("best_exponent {b} > 1/2"))?;
    Ok(format!("1/(T-1) over F_3: best_exponent {b}, {} potentially zero values excluded", t.potentially_zero))
}

fn c11_dirichlet() -> Check {
    let xi = spec(&prime(2), 1, vec![1], 2).xi(&BigInt::from(512)).unwrap();
    let mut parts = Vec::new();
    for n in 1..=2usize {
        let w = dirichlet_witness(&xi, n, 6, 4).map_err(|e| e.to_string())?;
        let measured = w.poly.eval(&xi).map_err(|e| e.to_string())?.abs();
        ensure(measured == AbsValue::Exact(w.value_valuation.clone()), format!("n={n}: re-evaluation gave {measured}"))?;
        let floor = rat(2 * n as i64 - 1, 2);
        ensure(w.exponent_ratio >= floor, format!("n={n}: ratio {} < {floor}", w.exponent_ratio))?;
        parts.push(format!("n={n}: ratio {}", w.exponent_ratio));
    }
    Ok(format!("h = 6, {}", parts.join(", ")))
}

fn c12_applio() -> Check {
    let s = spec(&prime(2), 1, vec![1], 2);
    let mut windows = Vec::new();
    for j in 0..=1 {
        let rep = applio_consistency(&s, j, 3).map_err(|e| e.to_string())?;
        let rj1 = BigInt::from(s.r_j(j + 1).unwrap());
        let want = BigRational::new(&rj1 * &rj1, BigInt::from(rep.d.clone()));
        for r in &rep.rows {
            ensure(r.distance_ratio == want, format!("j={j} k={}: ratio {} != {want}", r.k, r.distance_ratio))?;
        }
        ensure(rep.pass(), format!("j={j}: beta or height ratio check failed"))?;
        windows.push(rep.window.clone());
    }
    // r_0 r_1^2 r_2^2 / (r_1^2 - r_0^2) - 1 with r_0 = 2, r_1 = 4, r_2 = 16
    let upper = rat(2 * 16 * 256, 16 - 4) - rat(1, 1);
    ensure(windows[0] == (rat(7, 1), upper.clone()), format!("window {:?}", windows[0]))?;
    Ok(format!(
        "distance ratios exactly 8 (j=0) and 64 (j=1); j=0 window [7, {upper}] (8*256/12 - 1 = 509/3 would drop a factor r_0^2 = 4)"
    ))
}

fn c13_roots() -> Check {
    let f2 = prime(2);
    let p = XPoly::from_codes(&f2, &[&[1], &[0, 0, 1], &[0, 0, 1]]);
    let roots = roots_in_field(&p, 128).map_err(|e| e.to_string())?;
    let h = BigInt::from(128);
    let alpha = spec(&f2, 1, vec![1], 2).alpha_block(0, &h).unwrap();
    let alpha1 = alpha.add(&Series::from_tpoly(&TPoly::one(&f2)));
    ensure(roots.len() == 2, format!("{} roots", roots.len()))?;
    for want in [&alpha, &alpha1] {
        ensure(
            roots.iter().any(|r| r.root.truncate(&h).terms() == want.terms() && r.multiplicity == 1),
            format!("missing root {want}"),
        )?;
    }
    let sqrt_t = XPoly::from_codes(&f2, &[&[0, 1], &[], &[1]]);
    ensure(roots_in_field(&sqrt_t, 128).map_err(|e| e.to_string())?.is_empty(), "X^2 - T has roots")?;
    let f3 = prime(3);
    let lin = XPoly::from_codes(&f3, &[&[2], &[0, 1]]);
    let sq = roots_in_field(&lin.mul(&lin), 128).map_err(|e| e.to_string())?;
    let inv_t = Series::monomial(&f3, Fq::ONE, BigInt::from(1));
    ensure(
        sq.len() == 1 && sq[0].multiplicity == 2 && sq[0].root.terms() == inv_t.terms(),
        format!("(TX-1)^2: {:?}", sq.iter().map(|r| (r.root.to_string(), r.multiplicity)).collect::<Vec<_>>()),
    )?;
    Ok("alpha and alpha+1 to horizon 128; X^2 - T has none; (TX-1)^2 gives 1/T twice".into())
}

fn c14_determinism() -> Check {
    let bin = env!("CARGO_BIN_EXE_tnum");
    let dir = std::env::temp_dir().join(format!("tnum-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let mahler = dir.join("mahler.json");
    let xi = dir.join("xi.json");
    std::fs::write(&mahler, r#"{"schema_version": 1, "p": 3, "target": {"kind": "alpha"}}"#).unwrap();
    std::fs::write(&xi, r#"{"schema_version": 1, "p": 2, "m_tail": 2}"#).unwrap();
    let runs: [(&str, &std::path::Path, &[&str]); 3] = [
        ("wn", &mahler, &["--degree", "1", "--hmax", "6"]),
        ("wstar", &mahler, &["--degree", "1", "--hmax", "6"]),
        ("wn", &xi, &["--degree", "2", "--hmax", "5", "--format", "json"]),
    ];
    for (kind, spec, extra) in runs {
        let mut outs = Vec::new();
        for threads in ["1", "4", "8"] {
            let out = Command::new(bin)
                .args(["scan", kind, "--spec"])
                .arg(spec)
                .args(extra)
                .args(["--threads", threads])
                .output()
                .map_err(|e| e.to_string())?;
            ensure(out.status.success(), format!("scan {kind} exited {:?}", out.status.code()))?;
            outs.push(out.stdout);
        }
        ensure(outs.windows(2).all(|w| w[0] == w[1]), format!("scan {kind} output depends on thread count"))?;
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok("scan outputs byte-identical for threads 1, 4, 8 (3 scans)".into())
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Check); 14] = [
        ("Frobenius identity", c1_frobenius),
        ("coefficient rule vs example", c2_coefficients),
        ("b(j,n) and a(j,n) formulas", c3_a_b),
        ("annihilator", c4_annihilator),
        ("distance identity", c5_distance),
        ("distance sandwich", c6_sandwich),
        ("height multiplicativity", c7_heights),
        ("Liouville inequality", c8_liouville),
        ("w_1 record for Mahler's series", c9_mahler_record),
        ("degree-one bound on rationals", c10_rational),
        ("Dirichlet witness", c11_dirichlet),
        ("applio consistency", c12_applio),
        ("root finder", c13_roots),
        ("scan determinism", c14_determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        // written to the raw handle so the lines survive output capture
        let line = match result {
            Ok(detail) => format!("criterion {:>2} PASS [{secs:.2}s] {name}: {detail}\n", i + 1),
            Err(why) => {
                failed.push(i + 1);
                format!("criterion {:>2} FAIL [{secs:.2}s] {name}: {why}\n", i + 1)
            }
        };
        std::io::stdout().lock().write_all(line.as_bytes()).unwrap();
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
