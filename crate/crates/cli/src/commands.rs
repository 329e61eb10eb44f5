use num_bigint::{BigInt, BigUint};
use serde_json::{json, Value};
use tnum_core::dioph::{
    applio_consistency, liouville_approximants, liouville_rationals, roots_in_field, scan, type_bounds,
    ApplioReport, RecordTable, ScanConfig, ScanKind, TypeBounds,
};
use tnum_core::mahler::{a_oracle, b_oracle, block_sum_oracle, frobenius_residual};
use tnum_core::{AbsValue, Error, MahlerSpec};

use crate::render::{abs, csv_text, int, json_text, opt_rational, rational, valuation};
use crate::{Cli, CliError, Command, EstimateTarget, Format, Outcome, RunConfig, ScanArg, VerifyTarget};

pub fn dispatch(cli: &Cli, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let format = cli.format.unwrap_or(match cli.command {
        Command::Coeffs | Command::Scan { .. } => Format::Csv,
        _ => Format::Json,
    });
    let json_only = |what: &str| {
        if format == Format::Csv {
            Err(CliError::Config(format!("{what} reports are JSON only")))
        } else {
            Ok(())
        }
    };
    match cli.command {
        Command::Coeffs => coeffs(cfg, cli.horizon.unwrap_or(64), cli.oracle, format),
        Command::Verify { target } => {
            json_only("verify")?;
            let report = verify(cfg, target, &VerifyParams::from_cli(target, cli))?;
            Ok(report.into_outcome())
        }
        Command::Scan { kind } => {
            let kind = match kind {
                ScanArg::Wn => ScanKind::Wn,
                ScanArg::Wstar => ScanKind::Wstar,
            };
            let mut sc = ScanConfig::new(cli.degree.unwrap_or(1), cli.hmax.unwrap_or(4));
            sc.horizon = cli.horizon.unwrap_or(sc.horizon);
            sc.threads = cli.threads;
            sc.refinement_cap = cfg.budgets.refinement_cap;
            sc.horizon_cap = cfg.budgets.horizon_cap;
            sc.enumeration_budget = cli.budget.unwrap_or(cfg.budgets.enumeration_budget);
            let xi = cfg.target_series(sc.horizon)?;
            let table = scan(kind, &xi, &sc)?;
            Ok(Outcome { body: render_scan(&table, format), pass: true, diagnostics: Vec::new() })
        }
        Command::Estimate { target } => {
            json_only("estimate")?;
            let jmax = cli.j.unwrap_or(1);
            let v = match target {
                EstimateTarget::Type => type_json(&type_bounds(&cfg.spec, cli.j.unwrap_or(10))),
                EstimateTarget::Exponent => {
                    let mut windows = Vec::new();
                    for j in 0..=jmax {
                        windows.push(applio_json(&applio_consistency(&cfg.spec, j, cli.count.unwrap_or(3))?));
                    }
                    json!({
                        "applio_windows": windows,
                        "type_bounds": type_json(&type_bounds(&cfg.spec, cli.j.unwrap_or(10))),
                    })
                }
            };
            Ok(Outcome { body: json_text(&v), pass: true, diagnostics: Vec::new() })
        }
        Command::Roots => {
            json_only("roots")?;
            let p = cfg
                .polynomial
                .as_ref()
                .ok_or_else(|| CliError::Config("the spec has no `polynomial` for roots".into()))?;
            let horizon = cli.horizon.unwrap_or(64);
            let horizon = i64::try_from(horizon).map_err(|_| CliError::Config("--horizon too large".into()))?;
            let roots = roots_in_field(p, horizon)?;
            let list: Vec<Value> = roots
                .iter()
                .map(|r| {
                    json!({
                        "root": r.root.to_string(),
                        "terms": r.root.terms().iter().map(|(n, a)| json!([n.to_string(), a.code()])).collect::<Vec<_>>(),
                        "multiplicity": r.multiplicity,
                        "height_exponent": r.height_exponent,
                        "degree_bound": r.degree_bound,
                    })
                })
                .collect();
            let v = json!({ "polynomial": p.to_string(), "horizon": horizon, "roots": list });
            Ok(Outcome { body: json_text(&v), pass: true, diagnostics: Vec::new() })
        }
    }
}

/// Coefficients of T^{-n} in ξ for 1 ≤ n ≤ bound.
pub fn coeffs(cfg: &RunConfig, bound: u64, oracle: bool, format: Format) -> Result<Outcome, CliError> {
    let h = BigInt::from(bound);
    let xi = cfg.spec.xi(&h)?;
    let codes: Vec<u32> = (1..=bound).map(|n| xi.coeff(&BigInt::from(n)).map(|c| c.code())).collect::<Result<_, _>>()?;
    let mut diagnostics = Vec::new();
    let mut pass = true;
    if oracle {
        let o = block_sum_oracle(&cfg.spec, 0, None, &h)?;
        for (i, &c) in codes.iter().enumerate() {
            let n = i as u64 + 1;
            if o.coeff(&BigInt::from(n))?.code() != c {
                diagnostics.push(format!("oracle mismatch at n = {n}"));
                pass = false;
                break;
            }
        }
    }
    let body = match format {
        Format::Csv => {
            let rows: Vec<Vec<String>> =
                codes.iter().enumerate().map(|(i, c)| vec![(i + 1).to_string(), c.to_string()]).collect();
            csv_text(&["n", "coefficient"], &rows)
        }
        Format::Json => {
            let rows: Vec<Value> =
                codes.iter().enumerate().map(|(i, c)| json!({ "n": i + 1, "coefficient": c })).collect();
            json_text(&json!({ "bound": bound, "rows": rows, "oracle_checked": oracle, "pass": pass }))
        }
    };
    Ok(Outcome { body, pass, diagnostics })
}

/// Knobs shared by the verify targets; unset ones take per-target defaults.
#[derive(Clone, Debug)]
pub struct VerifyParams {
    pub j: usize,
    pub count: usize,
    pub horizon: u64,
    pub degree: usize,
}

impl VerifyParams {
    pub fn defaults(target: VerifyTarget) -> VerifyParams {
        use VerifyTarget::*;
        let (j, count, horizon) = match target {
            Frobenius => (0, 2, 1000),
            Bjn | Ajn => (3, 0, 256),
            Telescope => (2, 0, 1000),
            Annihilator => (2, 3, 0),
            Distance => (1, 3, 0),
            Sandwich => (1, 6, 0),
            Liouville => (1, 3, 0),
            Applio => (1, 3, 0),
        };
        VerifyParams { j, count, horizon, degree: 3 }
    }

    fn from_cli(target: VerifyTarget, cli: &Cli) -> VerifyParams {
        let d = VerifyParams::defaults(target);
        VerifyParams {
            j: cli.j.unwrap_or(d.j),
            count: cli.count.unwrap_or(d.count),
            horizon: cli.horizon.unwrap_or(d.horizon),
            degree: cli.degree.unwrap_or(d.degree),
        }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub target: VerifyTarget,
    pub instances: Vec<Value>,
    pub skipped: Vec<Value>,
}

impl VerifyReport {
    pub fn pass(&self) -> bool {
        self.instances.iter().all(|i| i["pass"] == Value::Bool(true))
    }

    pub fn failures(&self) -> usize {
        self.instances.iter().filter(|i| i["pass"] != Value::Bool(true)).count()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "target": format!("{:?}", self.target).to_lowercase(),
            "checked": self.instances.len(),
            "failures": self.failures(),
            "pass": self.pass(),
            "instances": self.instances,
            "skipped": self.skipped,
        })
    }

    fn into_outcome(self) -> Outcome {
        let pass = self.pass();
        let mut diagnostics = Vec::new();
        if !pass {
            diagnostics.push(format!("{} check(s) failed", self.failures()));
        }
        Outcome { body: json_text(&self.to_json()), pass, diagnostics }
    }
}

pub fn verify(cfg: &RunConfig, target: VerifyTarget, prm: &VerifyParams) -> Result<VerifyReport, CliError> {
    let spec = &cfg.spec;
    let budget = cfg.budgets.exponent_budget;
    let mut instances = Vec::new();
    let mut skipped = Vec::new();
    match target {
        VerifyTarget::Frobenius => {
            let h = BigInt::from(prm.horizon);
            for s in 1..=(prm.count as u32).max(spec.r_exponent()) {
                let res = frobenius_residual(spec.field(), s, &h)?.abs();
                let pass = matches!(&res, AbsValue::Below(v) if v > &h);
                instances.push(json!({
                    "r": int(BigUint::from(spec.p()).pow(s)),
                    "horizon": prm.horizon,
                    "residual": abs(&res),
                    "pass": pass,
                }));
            }
        }
        VerifyTarget::Bjn | VerifyTarget::Ajn => {
            let is_b = target == VerifyTarget::Bjn;
            if is_b && spec.mask().is_some() {
                return Err(Error::InvalidSpec("b(j, n) is only defined for unmasked specs".into()).into());
            }
            let n_max = prm.horizon;
            for j in 0..=prm.j {
                let oracle = if is_b { b_oracle(spec, j, n_max)? } else { a_oracle(spec, j, n_max)? };
                let formula = (1..=n_max).map(|n| if is_b { spec.b_coeff(j, n) } else { spec.a_coeff(j, n) });
                let bad: Vec<u64> =
                    formula.zip(&oracle).enumerate().filter(|(_, (x, y))| x != *y).map(|(i, _)| i as u64 + 1).collect();
                instances.push(json!({
                    "j": j,
                    "n_max": n_max,
                    "nonzero": oracle.iter().filter(|c| !c.is_zero()).count(),
                    "mismatches": bad.len(),
                    "first_mismatch": bad.first(),
                    "pass": bad.is_empty(),
                }));
            }
        }
        VerifyTarget::Telescope => {
            for j in 0..=prm.j {
                let rj = spec.r_j(j)?;
                let h = BigInt::from(prm.horizon).max(BigInt::from(rj.clone()) * 2u32);
                if h > BigInt::from(budget) {
                    skipped.push(json!({ "j": j, "reason": format!("horizon {h} exceeds the exponent budget") }));
                    continue;
                }
                for t in 0..=j {
                    let res = spec.telescope_residual(t, j, &h)?.abs();
                    instances.push(json!({
                        "t": t,
                        "j": j,
                        "horizon": h.to_string(),
                        "residual": abs(&res),
                        "pass": matches!(res, AbsValue::Below(_)),
                    }));
                }
            }
        }
        VerifyTarget::Annihilator => {
            for j in 0..=prm.j {
                for k in 1..=prm.count as u64 {
                    match annihilator_instance(spec, j, k, budget) {
                        Ok(v) => instances.push(v),
                        Err(Error::ExponentBudgetExceeded { needed, .. }) => skipped.push(json!({
                            "j": j,
                            "k": k,
                            "reason": format!("exponent {needed} exceeds the budget {budget}"),
                        })),
                        Err(e) => return Err(e.into()),
                    }
                }
            }
        }
        VerifyTarget::Distance => {
            for j in 0..=prm.j {
                for i in 1..=prm.count {
                    let c = spec.distance_identity_check(j, i)?;
                    instances.push(json!({
                        "j": j,
                        "i": i,
                        "k": c.k,
                        "claimed": valuation(&BigInt::from(c.claimed)),
                        "measured": abs(&c.measured),
                        "pass": c.pass,
                    }));
                }
            }
        }
        VerifyTarget::Sandwich => {
            for j in 0..=prm.j {
                for k in 1..=prm.count as u64 {
                    let c = spec.sandwich_check(j, k)?;
                    instances.push(json!({
                        "j": j,
                        "k": k,
                        "lower": int(&c.lower),
                        "upper": int(&c.upper),
                        "in_k_set": c.in_k_set,
                        "measured": abs(&c.measured),
                        "pass": c.pass,
                    }));
                }
            }
        }
        VerifyTarget::Liouville => {
            let s = liouville_rationals(spec.field(), prm.degree);
            instances.push(json!({
                "kind": "rationals",
                "q": spec.field().q(),
                "max_height_exponent": prm.degree,
                "pairs": s.pairs,
                "failures": s.failures,
                "oracle_mismatches": s.oracle_mismatches,
                "pass": s.failures == 0 && s.oracle_mismatches == 0 && s.pairs > 0,
            }));
            if spec.mask().is_none() {
                let pairs = liouville_approximants(spec, prm.j, prm.count as u64)?;
                for (j, k, j2, k2, c) in pairs.checks {
                    instances.push(json!({
                        "kind": "approximants",
                        "a": [j, k],
                        "b": [j2, k2],
                        "bound": int(&c.bound),
                        "measured": int(&c.measured),
                        "pass": c.pass,
                    }));
                }
                for (j, k, j2, k2) in pairs.indistinguishable {
                    let equal = j == j2 && (k.min(k2) + 1..=k.max(k2)).all(|n| spec.b_coeff(j, n).is_zero());
                    instances.push(json!({
                        "kind": "approximants",
                        "a": [j, k],
                        "b": [j2, k2],
                        "equal": equal,
                        "pass": equal,
                    }));
                }
            }
        }
        VerifyTarget::Applio => {
            for j in 0..=prm.j {
                let rep = applio_consistency(spec, j, prm.count.max(2))?;
                let mut v = applio_json(&rep);
                v["pass"] = Value::Bool(rep.pass());
                instances.push(v);
            }
        }
    }
    Ok(VerifyReport { target, instances, skipped })
}

fn annihilator_instance(spec: &MahlerSpec, j: usize, k: u64, budget: u64) -> Result<Value, Error> {
    let ann = spec.annihilator(j, k)?;
    let bound = ann.bound_exponent().clone();
    let horizon: BigInt = &bound * 2 + 16;
    if horizon > BigInt::from(budget) {
        return Err(Error::ExponentBudgetExceeded { needed: horizon.to_string(), budget });
    }
    let alpha = spec.approximant(j, k, &horizon)?;
    let residual = ann.eval(&alpha)?.abs();
    let rj = BigInt::from(spec.r_j(j)?);
    let rj1 = BigInt::from(spec.r_j(j + 1)?);
    let exact_height = rj1.pow(ann.k_prime() as u32) * &rj;
    // small cases: evaluate the dense polynomial too
    let dense = if ann.height_exponent() <= &BigInt::from(4096) {
        let p = ann.to_xpoly(budget)?;
        Some(p.eval(&alpha)?.abs())
    } else {
        None
    };
    let vanishes = matches!(residual, AbsValue::Below(_)) && dense.as_ref().map_or(true, |d| matches!(d, AbsValue::Below(_)));
    let pass = vanishes && ann.x_degree() == &rj && ann.height_exponent() <= &bound && ann.height_exponent() == &exact_height;
    Ok(json!({
        "j": j,
        "k": k,
        "k_prime": ann.k_prime(),
        "deg_x": int(ann.x_degree()),
        "height_exponent": int(ann.height_exponent()),
        "bound_exponent": int(&bound),
        "residual": abs(&residual),
        "dense_residual": dense.as_ref().map(abs),
        "pass": pass,
    }))
}

fn applio_json(rep: &ApplioReport) -> Value {
    let rows: Vec<Value> = rep
        .rows
        .iter()
        .map(|r| {
            json!({
                "k": r.k,
                "log_beta": int(&r.log_beta),
                "distance": valuation(&r.distance_valuation),
                "distance_ratio": rational(&r.distance_ratio),
                "height_ratio": rational(&r.height_ratio),
                "beta_ratio": opt_rational(r.beta_ratio.as_ref()),
            })
        })
        .collect();
    json!({
        "j": rep.j,
        "d": int(&rep.d),
        "delta": rational(&rep.delta),
        "rho": rational(&rep.rho),
        "theta": int(&rep.theta),
        "expected_ratio": rational(&rep.expected_ratio),
        "distance_ratios_exact": rep.distance_ratios_exact,
        "beta_ratios_bounded": rep.beta_ratios_bounded,
        "heights_bounded": rep.heights_bounded,
        "rows": rows,
        "window": {
            "lower": rational(&rep.window.0),
            "upper": rational(&rep.window.1),
            "of": format!("w*_{}(xi)", rep.d),
            "scale": "finite-scale truncation over the listed k, not a limit",
        },
    })
}

fn type_json(t: &TypeBounds) -> Value {
    let opt = |x: &Option<BigUint>| x.as_ref().map(int);
    let rows: Vec<Value> = t
        .rows
        .iter()
        .map(|r| {
            json!({
                "j": r.j,
                "lower": int(&r.lower),
                "star_upper": int(&r.star_upper),
                "upper": int(&r.upper),
                "refined_star_upper": opt(&r.refined_star_upper),
                "refined_upper": opt(&r.refined_upper),
            })
        })
        .collect();
    json!({
        "truncation": t.truncation,
        "scale": format!("sup over 1 <= j <= {}; a finite-scale truncation, not a limsup", t.truncation),
        "lower": int(&t.lower),
        "star_upper": int(&t.star_upper),
        "upper": int(&t.upper),
        "refined_star_upper": opt(&t.refined_star_upper),
        "refined_upper": opt(&t.refined_upper),
        "rows": rows,
    })
}

fn witness_text(table: &RecordTable, i: usize) -> String {
    match &table.rows[i].witness {
        None => String::new(),
        Some(w) => match &w.root {
            Some(r) => format!("{} ; root {}", w.poly, r),
            None => w.poly.to_string(),
        },
    }
}

pub fn render_scan(table: &RecordTable, format: Format) -> String {
    match format {
        Format::Csv => {
            let mut rows: Vec<Vec<String>> = table
                .rows
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    vec![
                        r.h.to_string(),
                        r.h_log.to_string(),
                        witness_text(table, i),
                        r.value_valuation.as_ref().map(|v| v.to_string()).unwrap_or_default(),
                        r.exponent_ratio.as_ref().map(|x| x.to_string()).unwrap_or_default(),
                    ]
                })
                .collect();
            rows.push(vec![
                "best_exponent".into(),
                String::new(),
                String::new(),
                String::new(),
                table.best_exponent.as_ref().map(|x| x.to_string()).unwrap_or_default(),
            ]);
            csv_text(&["h", "H_log", "witness", "value_valuation", "exponent_ratio"], &rows)
        }
        Format::Json => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    json!({
                        "h": r.h,
                        "H_log": r.h_log,
                        "witness": witness_text(table, i),
                        "value": r.value_valuation.as_ref().map(valuation),
                        "exponent_ratio": opt_rational(r.exponent_ratio.as_ref()),
                    })
                })
                .collect();
            json_text(&json!({
                "kind": table.kind.name(),
                "n": table.n,
                "h_max": table.h_max,
                "rows": rows,
                "best_exponent": opt_rational(table.best_exponent.as_ref()),
                "enumerated": table.enumerated,
                "potentially_zero": table.potentially_zero,
                "scale": "finite height shells; not a limiting exponent",
            }))
        }
    }
}
