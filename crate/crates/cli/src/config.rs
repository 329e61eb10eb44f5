//! Spec files: strict JSON with an explicit schema version.

use std::path::Path;

use num_bigint::BigInt;
use serde::Deserialize;
use tnum_core::dioph::XPoly;
use tnum_core::series::series_from_rational;
use tnum_core::{Budgets, Field, MahlerSpec, Mask, Series, TPoly};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub schema_version: u32,
    pub p: u64,
    #[serde(default = "one")]
    pub e: u32,
    #[serde(default)]
    pub modulus: Option<Vec<u64>>,
    #[serde(default = "one")]
    pub r_exponent: u32,
    #[serde(default = "m_prefix")]
    pub m_prefix: Vec<u64>,
    #[serde(default = "m_tail")]
    pub m_tail: u64,
    #[serde(default)]
    pub mask_prefix: Option<Vec<bool>>,
    #[serde(default)]
    pub mask_tail: Option<Vec<bool>>,
    #[serde(default)]
    pub budgets: Option<BudgetsFile>,
    /// X-coefficients in ascending order, each as ascending T-coefficient codes.
    #[serde(default)]
    pub polynomial: Option<Vec<Vec<u64>>>,
    #[serde(default)]
    pub target: Option<TargetFile>,
}

fn one() -> u32 {
    1
}

fn m_prefix() -> Vec<u64> {
    vec![1]
}

fn m_tail() -> u64 {
    2
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetsFile {
    pub horizon_cap: Option<u64>,
    pub exponent_budget: Option<u64>,
    pub enumeration_budget: Option<u64>,
    pub refinement_cap: Option<u32>,
}

/// The series a scan runs against.
#[derive(Debug, Deserialize, Clone, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum TargetFile {
    Xi {},
    /// α_block = Σ_n T^{-r_block^n}; block 0 is Mahler's series.
    Alpha {
        #[serde(default)]
        block: usize,
    },
    Rational {
        num: Vec<u64>,
        den: Vec<u64>,
    },
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub spec: MahlerSpec,
    pub budgets: Budgets,
    pub target: TargetFile,
    pub polynomial: Option<XPoly>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        RunConfig::parse(&text)
    }

    pub fn parse(text: &str) -> Result<RunConfig, CliError> {
        let file: SpecFile = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        RunConfig::from_file(file)
    }

    pub fn from_file(file: SpecFile) -> Result<RunConfig, CliError> {
        if file.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                file.schema_version
            )));
        }
        let field = Field::new(file.p, file.e, file.modulus.as_deref())?;
        let mask = match (file.mask_prefix, file.mask_tail) {
            (None, None) => None,
            (prefix, tail) => Some(Mask::new(prefix.unwrap_or_default(), tail.unwrap_or_else(|| vec![true]))?),
        };
        let spec = MahlerSpec::new(&field, file.r_exponent, file.m_prefix, file.m_tail, mask)?;
        let mut budgets = Budgets::default();
        if let Some(b) = file.budgets {
            let positive = |name: &str, v: u64| {
                if v == 0 {
                    Err(CliError::Config(format!("budgets.{name} must be positive")))
                } else {
                    Ok(v)
                }
            };
            if let Some(v) = b.horizon_cap {
                budgets.horizon_cap = positive("horizon_cap", v)?;
            }
            if let Some(v) = b.exponent_budget {
                budgets.exponent_budget = positive("exponent_budget", v)?;
            }
            if let Some(v) = b.enumeration_budget {
                budgets.enumeration_budget = positive("enumeration_budget", v)?;
            }
            if let Some(v) = b.refinement_cap {
                budgets.refinement_cap = positive("refinement_cap", v as u64)? as u32;
            }
        }
        let check_codes = |codes: &[u64], what: &str| match codes.iter().find(|&&c| c >= field.q()) {
            Some(c) => Err(CliError::Config(format!("{what}: code {c} is not an element of F_{}", field.q()))),
            None => Ok(()),
        };
        let polynomial = match file.polynomial {
            None => None,
            Some(rows) => {
                let mut coeffs = Vec::new();
                for row in &rows {
                    check_codes(row, "polynomial")?;
                    coeffs.push(TPoly::from_codes(&field, row));
                }
                let p = XPoly::new(&field, coeffs);
                if p.is_zero() {
                    return Err(CliError::Config("polynomial must be nonzero".into()));
                }
                Some(p)
            }
        };
        let target = file.target.unwrap_or(TargetFile::Xi {});
        if let TargetFile::Rational { num, den } = &target {
            check_codes(num, "target.num")?;
            check_codes(den, "target.den")?;
            if TPoly::from_codes(&field, den).is_zero() {
                return Err(CliError::Config("target.den must be nonzero".into()));
            }
        }
        Ok(RunConfig { spec, budgets, target, polynomial })
    }

    pub fn field(&self) -> &Field {
        self.spec.field()
    }

    /// The target series through `horizon`.
    pub fn target_series(&self, horizon: u64) -> Result<Series, CliError> {
        let h = BigInt::from(horizon);
        let f = self.field();
        Ok(match &self.target {
            TargetFile::Xi {} => self.spec.xi(&h)?,
            TargetFile::Alpha { block } => self.spec.alpha_block(*block, &h)?,
            TargetFile::Rational { num, den } => {
                series_from_rational(&TPoly::from_codes(f, num), &TPoly::from_codes(f, den), h)?
            }
        })
    }
}
