//! Experiment configuration: one document (JSON or TOML) per experiment,
//! with CLI flags overriding document fields.

use crate::{HResult, HarnessError};
use num_bigint::BigInt;
use num_rational::BigRational;
use quadrics_core::forms::{QuadraticForm, QuadricInstance, RationalBox};
use quadrics_core::poly::Poly;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Experiment kinds, matching the CLI subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Enumerate,
    CountMod,
    Density,
    Equidist,
    Sieve,
    AlmostPrime,
    GeomSieve,
    Halfdim,
}

impl Kind {
    pub fn name(&self) -> &'static str {
        match self {
            Kind::Enumerate => "enumerate",
            Kind::CountMod => "count-mod",
            Kind::Density => "density",
            Kind::Equidist => "equidist",
            Kind::Sieve => "sieve",
            Kind::AlmostPrime => "almost-prime",
            Kind::GeomSieve => "geom-sieve",
            Kind::Halfdim => "halfdim",
        }
    }
}

/// Flat experiment configuration; unused fields are ignored by each kind.
/// All fields optional so that document values and CLI flags merge cleanly.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub form: Option<String>,
    pub gram: Option<Vec<Vec<i64>>>,
    pub m: Option<i64>,
    pub height: Option<i64>,
    pub sup_norm: Option<bool>,
    pub p0: Option<u64>,
    pub h: Option<u32>,
    pub region: Option<String>,
    pub p: Option<u64>,
    pub k: Option<u32>,
    pub all_primes_upto: Option<u64>,
    pub real: Option<bool>,
    pub ball: Option<bool>,
    pub sub_f: Option<String>,
    pub sub_g: Option<String>,
    pub f: Option<String>,
    pub g: Option<String>,
    pub modulus: Option<u64>,
    pub residue: Option<String>,
    pub schedule: Option<String>,
    pub h_schedule: Option<String>,
    pub p_cut: Option<u64>,
    pub grid: Option<usize>,
    pub z: Option<u64>,
    pub y: Option<u64>,
    pub sprime: Option<String>,
    pub min_norm: Option<u64>,
    pub max_places: Option<usize>,
    pub budget: Option<f64>,
    pub m_grid: Option<String>,
    pub a: Option<i64>,
    pub tail: Option<String>,
    pub c: Option<i64>,
    /// When set, the halfdim target is `c_per_b2 * B^2` at each grid point.
    pub c_per_b2: Option<i64>,
    pub b_grid: Option<String>,
    pub scan_cap: Option<u64>,
    pub class_cap: Option<usize>,
    pub naive_cap: Option<u64>,
    pub threads: Option<usize>,
    pub seed: Option<u64>,
}

impl ExperimentConfig {
    /// Load a JSON or TOML document.
    pub fn from_file(path: &Path) -> HResult<Self> {
        let text = std::fs::read_to_string(path)?;
        let parsed = if path.extension().map_or(false, |e| e == "toml") {
            toml::from_str(&text).map_err(|e| HarnessError::Config(format!("{path:?}: {e}")))?
        } else {
            serde_json::from_str(&text)
                .map_err(|e| HarnessError::Config(format!("{path:?}: {e}")))?
        };
        Ok(parsed)
    }

    /// Overlay: any field set on `over` wins.
    pub fn merged_with(mut self, over: ExperimentConfig) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if over.$f.is_some() { self.$f = over.$f; } )* };
        }
        take!(
            form, gram, m, height, sup_norm, p0, h, region, p, k, all_primes_upto, real, ball,
            sub_f, sub_g, f, g, modulus, residue, schedule, h_schedule, p_cut, grid, z, y, sprime,
            min_norm, max_places, budget, m_grid, a, tail, c, c_per_b2, b_grid, scan_cap,
            class_cap, naive_cap, threads, seed
        );
        self
    }

    pub fn require<T: Clone>(field: &Option<T>, name: &str) -> HResult<T> {
        field
            .clone()
            .ok_or_else(|| HarnessError::Config(format!("missing required field `{name}`")))
    }

    pub fn parse_form(&self) -> HResult<QuadraticForm> {
        if let Some(g) = &self.gram {
            return QuadraticForm::from_gram(g.clone()).map_err(|e| HarnessError::Config(e.to_string()));
        }
        let literal = Self::require(&self.form, "form")?;
        QuadraticForm::parse_diagonal(&literal).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn parse_instance(&self) -> HResult<QuadricInstance> {
        let form = self.parse_form()?;
        let m = Self::require(&self.m, "m")?;
        let mut inst =
            QuadricInstance::new(form, m).map_err(|e| HarnessError::Config(e.to_string()))?;
        if let Some(p0) = self.p0 {
            inst = inst
                .with_denominator_prime(p0, self.h.unwrap_or(0))
                .map_err(|e| HarnessError::Config(e.to_string()))?;
        }
        if let Some(region) = &self.region {
            let rb = parse_region(region, inst.form.dim())?;
            inst = inst.with_region(rb).map_err(|e| HarnessError::Config(e.to_string()))?;
        }
        Ok(inst)
    }

    pub fn count_budget(&self) -> quadrics_core::modular::CountBudget {
        let mut b = quadrics_core::modular::CountBudget::default();
        if let Some(cap) = self.scan_cap {
            b.scan_cap = cap as u128;
        }
        if let Some(cap) = self.class_cap {
            b.class_cap = cap;
        }
        b
    }

    /// Parse a polynomial field: a path to a JSON monomial list, or an inline
    /// linear shorthand such as `x1+x2+3`.
    pub fn parse_poly(spec: &str, n_vars: usize) -> HResult<Poly> {
        let path = Path::new(spec);
        if path.exists() {
            let text = std::fs::read_to_string(path)?;
            let terms: Vec<quadrics_core::poly::Monomial> = serde_json::from_str(&text)
                .map_err(|e| HarnessError::Config(format!("{spec}: {e}")))?;
            return Poly::new(n_vars, terms).map_err(|e| HarnessError::Config(e.to_string()));
        }
        Poly::parse_linear(spec, n_vars).map_err(|e| HarnessError::Config(e.to_string()))
    }
}

/// Parse an exact rational from a decimal or fraction literal.
pub fn parse_rational(s: &str) -> HResult<BigRational> {
    let s = s.trim();
    let bad = || HarnessError::Config(format!("bad rational literal {s:?}"));
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| bad())?;
        let d: BigInt = den.trim().parse().map_err(|_| bad())?;
        if d == BigInt::from(0) {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let neg = int_part.trim_start().starts_with('-');
        let i: BigInt = if int_part.is_empty() || int_part == "-" {
            BigInt::from(0)
        } else {
            int_part.parse().map_err(|_| bad())?
        };
        if frac_part.is_empty() || !frac_part.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let f: BigInt = frac_part.parse().map_err(|_| bad())?;
        let scale = num_traits::pow::pow(BigInt::from(10), frac_part.len());
        let frac = BigRational::new(f, scale);
        let whole = BigRational::from_integer(i.clone());
        return Ok(if neg { whole - frac } else { whole + frac });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

/// Region literal: comma-separated `lo:hi` per axis, e.g. `-1.5:1.5,-2:2,...`.
/// A single `lo:hi` pair is broadcast to every axis.
pub fn parse_region(s: &str, n: usize) -> HResult<RationalBox> {
    let parts: Vec<&str> = s.split(',').collect();
    let pairs: Vec<(BigRational, BigRational)> = parts
        .iter()
        .map(|p| {
            let (lo, hi) = p
                .split_once(':')
                .ok_or_else(|| HarnessError::Config(format!("bad region axis {p:?}")))?;
            Ok((parse_rational(lo)?, parse_rational(hi)?))
        })
        .collect::<HResult<_>>()?;
    let pairs = if pairs.len() == 1 { vec![pairs[0].clone(); n] } else { pairs };
    if pairs.len() != n {
        return Err(HarnessError::Config(format!(
            "region has {} axes, form has {n}",
            pairs.len()
        )));
    }
    let (lo, hi) = pairs.into_iter().unzip();
    RationalBox::new(lo, hi).map_err(|e| HarnessError::Config(e.to_string()))
}

/// Grid literals: `10,30,100` or geometric `64:4096:x2` or arithmetic `0:6`
/// (step 1) / `0:12:+2`.
pub fn parse_grid(s: &str) -> HResult<Vec<i64>> {
    let bad = || HarnessError::Config(format!("bad grid literal {s:?}"));
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() < 2 || parts.len() > 3 {
            return Err(bad());
        }
        let start: i64 = parts[0].trim().parse().map_err(|_| bad())?;
        let end: i64 = parts[1].trim().parse().map_err(|_| bad())?;
        let mut out = Vec::new();
        match parts.get(2) {
            Some(step) if step.trim_start().starts_with('x') => {
                let ratio: i64 = step.trim()[1..].parse().map_err(|_| bad())?;
                if ratio < 2 || start <= 0 {
                    return Err(bad());
                }
                let mut v = start;
                while v <= end {
                    out.push(v);
                    v = v.checked_mul(ratio).ok_or_else(bad)?;
                }
            }
            step => {
                let inc: i64 = match step {
                    Some(t) => t.trim().trim_start_matches('+').parse().map_err(|_| bad())?,
                    None => 1,
                };
                if inc <= 0 {
                    return Err(bad());
                }
                let mut v = start;
                while v <= end {
                    out.push(v);
                    v += inc;
                }
            }
        }
        if out.is_empty() {
            return Err(bad());
        }
        Ok(out)
    } else {
        let vals: Vec<i64> = s
            .split(',')
            .map(|t| t.trim().parse().map_err(|_| bad()))
            .collect::<std::result::Result<_, _>>()?;
        if vals.is_empty() {
            return Err(bad());
        }
        Ok(vals)
    }
}

/// Comma-separated integer list.
pub fn parse_i64_list(s: &str) -> HResult<Vec<i64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| HarnessError::Config(format!("bad integer {t:?} in list")))
        })
        .collect()
}

pub fn parse_u64_list(s: &str) -> HResult<Vec<u64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| HarnessError::Config(format!("bad integer {t:?} in list")))
        })
        .collect()
}
