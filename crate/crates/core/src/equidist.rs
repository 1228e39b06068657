//! Counts of points in congruence neighborhoods against their main terms,
//! with the measured discrepancy exponent.
//!
//! The main term replaces the local density at each prime dividing the
//! modulus by the exact measure of the prescribed congruence class; summing
//! over a full residue system recovers the unconditioned main term exactly in
//! the non-archimedean factors.

use crate::arith::{pow_u128, primes_upto};
use crate::density::{
    class_density, local_density, padic_ball_volume, real_density, RealDensity, RealRegion,
};
use crate::enumerate::{enumerate_integral, enumerate_s_integral, IntegralPoint};
use crate::error::Error;
use crate::fit::linear_fit;
use crate::forms::{rat_to_f64, QuadricInstance};
use crate::modular::{reduce_point, CountBudget};
use crate::{Int, Rat, Result};
use num_traits::One;
use std::collections::BTreeMap;

/// A congruence neighborhood: modulus `l` as a factored map `p -> e` with a
/// prescribed on-quadric residue mod `p^e` for each `p | l`.
#[derive(Debug, Clone)]
pub struct CongruenceNeighborhood {
    factors: BTreeMap<u64, (u32, Vec<u64>)>,
}

impl CongruenceNeighborhood {
    /// The trivial neighborhood (`l = 1`, no condition).
    pub fn trivial() -> Self {
        CongruenceNeighborhood { factors: BTreeMap::new() }
    }

    pub fn new(
        inst: &QuadricInstance,
        parts: Vec<(u64, u32, Vec<u64>)>,
    ) -> Result<Self> {
        let mut factors = BTreeMap::new();
        for (p, e, xi) in parts {
            if !crate::arith::is_prime_u64(p) {
                return Err(Error::InvalidInput(format!("{p} is not prime")));
            }
            if Some(p) == inst.p0 {
                return Err(Error::InvalidInput(
                    "modulus must be coprime to the denominator prime".into(),
                ));
            }
            if e == 0 || xi.len() != inst.form.dim() {
                return Err(Error::InvalidInput("bad residue data".into()));
            }
            let md = pow_u128(p, e);
            if md > u64::MAX as u128 || xi.iter().any(|&c| c as u128 >= md) {
                return Err(Error::InvalidInput("residue out of range".into()));
            }
            let rp = crate::modular::ResiduePoint { p, k: e, coords: xi.clone() };
            if !rp.on_quadric(&inst.form, inst.m) {
                return Err(Error::InvalidInput(format!(
                    "residue is not on the quadric mod {p}^{e}"
                )));
            }
            if factors.insert(p, (e, xi)).is_some() {
                return Err(Error::InvalidInput(format!("duplicate prime {p}")));
            }
        }
        Ok(CongruenceNeighborhood { factors })
    }

    pub fn modulus(&self) -> u64 {
        self.factors
            .iter()
            .map(|(&p, &(e, _))| pow_u128(p, e) as u64)
            .product()
    }

    pub fn parts(&self) -> impl Iterator<Item = (u64, u32, &Vec<u64>)> + '_ {
        self.factors.iter().map(|(&p, &(e, ref xi))| (p, e, xi))
    }

    /// Does the point reduce to the prescribed residues at every prime?
    pub fn admits(&self, x: &IntegralPoint) -> Result<bool> {
        for (p, e, xi) in self.parts() {
            let r = reduce_point(x, p, e)?;
            if &r.coords != xi {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// One schedule point: integral enumeration in a Euclidean ball of radius N,
/// or `p0`-integral enumeration at adic exponent h (region from the instance).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchedulePoint {
    Real(i64),
    Adic(u32),
}

impl SchedulePoint {
    pub fn label(&self) -> i64 {
        match self {
            SchedulePoint::Real(n) => *n,
            SchedulePoint::Adic(h) => *h as i64,
        }
    }
}

/// Count points at the schedule point whose reductions match the neighborhood.
pub fn count_in_neighborhood(
    inst: &QuadricInstance,
    at: SchedulePoint,
    nbhd: &CongruenceNeighborhood,
) -> Result<u64> {
    let mut count = 0u64;
    let mut err: Option<Error> = None;
    {
        let mut visitor = |x: IntegralPoint| {
            if err.is_some() {
                return;
            }
            match nbhd.admits(&x) {
                Ok(true) => count += 1,
                Ok(false) => {}
                Err(e) => err = Some(e),
            }
        };
        match at {
            SchedulePoint::Real(n) => enumerate_integral(inst, n, true, &mut visitor)?,
            SchedulePoint::Adic(h) => {
                let mut scaled = inst.clone();
                scaled.h = h;
                enumerate_s_integral(&scaled, &mut visitor)?;
            }
        }
    }
    match err {
        Some(e) => Err(e),
        None => Ok(count),
    }
}

/// The assembled main term for one schedule point and neighborhood.
#[derive(Debug, Clone)]
pub struct MainTerm {
    pub sigma_inf: RealDensity,
    /// Product of every non-archimedean factor (ball volume and local
    /// densities, with class measures at primes dividing the modulus); exact.
    pub adelic_factor: Rat,
    pub total: f64,
}

/// Main term: the unconditioned prediction with the factor at each `p | l`
/// replaced by the measure of the prescribed congruence class.
pub fn main_term(
    inst: &QuadricInstance,
    at: SchedulePoint,
    nbhd: &CongruenceNeighborhood,
    p_cut: u64,
    grid: usize,
    budget: &CountBudget,
) -> Result<MainTerm> {
    let q = &inst.form;
    if q.dim() < 4 {
        return Err(Error::InvalidInput("main terms require n >= 4".into()));
    }
    if !crate::forms::represents_global(q, inst.m)? {
        return Err(Error::InvalidInput("instance is not globally solvable".into()));
    }
    let m_big = Int::from(inst.m);
    let (sigma_inf, mut adelic) = match at {
        SchedulePoint::Real(n) => {
            let s = real_density(q, inst.m, &RealRegion::Ball(n as f64), grid)?;
            (s, Rat::one())
        }
        SchedulePoint::Adic(h) => {
            let p0 = inst.p0.ok_or_else(|| Error::InvalidInput("no p0 on instance".into()))?;
            let region = inst
                .region
                .clone()
                .ok_or_else(|| Error::InvalidInput("no region on instance".into()))?;
            let s = real_density(q, inst.m, &RealRegion::Box(region), grid)?;
            let (vol, _) = padic_ball_volume(q, inst.m, p0, h, budget)?;
            (s, vol)
        }
    };
    for p in primes_upto(p_cut) {
        if Some(p) == inst.p0 {
            continue;
        }
        let factor = match nbhd.factors.get(&p) {
            Some(&(e, ref xi)) => class_density(q, &m_big, p, xi, e, budget)?.value,
            None => local_density(q, &m_big, p, budget)?.value,
        };
        adelic *= factor;
    }
    // Primes dividing the modulus beyond p_cut still constrain the count.
    for (p, e, xi) in nbhd.parts() {
        if p > p_cut {
            let factor = class_density(q, &m_big, p, xi, e, budget)?.value;
            adelic *= factor;
        }
    }
    let total = sigma_inf.value * rat_to_f64(&adelic);
    Ok(MainTerm { sigma_inf, adelic_factor: adelic, total })
}

/// One row of a discrepancy experiment.
#[derive(Debug, Clone)]
pub struct DiscrepancyRecord {
    pub at: SchedulePoint,
    pub count: u64,
    pub main: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub modulus: u64,
}

/// Fit of `log |error|` against `log(main)`: the slope is `1 - delta_hat`.
#[derive(Debug, Clone, Copy)]
pub struct DiscrepancyFit {
    pub one_minus_delta: f64,
    pub delta_hat: f64,
    pub residual: f64,
    pub points_used: usize,
    pub low_confidence: bool,
}

/// Fit the power-saving exponent from finished records. Records with exactly
/// zero error carry no information for the log fit and are dropped.
pub fn fit_discrepancy(records: &[DiscrepancyRecord]) -> Result<DiscrepancyFit> {
    let usable: Vec<&DiscrepancyRecord> = records
        .iter()
        .filter(|r| r.abs_err > 0.0 && r.main > 0.0)
        .collect();
    if usable.len() < 2 {
        return Err(Error::DegenerateFit("need two records with nonzero error".into()));
    }
    let xs: Vec<f64> = usable.iter().map(|r| r.main.ln()).collect();
    let ys: Vec<f64> = usable.iter().map(|r| r.abs_err.ln()).collect();
    let (slope, _, residual) = linear_fit(&xs, &ys)?;
    Ok(DiscrepancyFit {
        one_minus_delta: slope,
        delta_hat: 1.0 - slope,
        residual,
        points_used: usable.len(),
        low_confidence: usable.len() < 4 || residual > 0.75,
    })
}

/// Run the full series: per-point counts, main terms, and the fitted exponent.
pub fn discrepancy_series(
    inst: &QuadricInstance,
    nbhd: &CongruenceNeighborhood,
    schedule: &[SchedulePoint],
    p_cut: u64,
    grid: usize,
    budget: &CountBudget,
) -> Result<(Vec<DiscrepancyRecord>, DiscrepancyFit)> {
    if schedule.len() < 4 {
        return Err(Error::DegenerateFit("need at least four schedule points".into()));
    }
    let modulus = nbhd.modulus();
    let mut records = Vec::with_capacity(schedule.len());
    for &at in schedule {
        let count = count_in_neighborhood(inst, at, nbhd)?;
        let main = main_term(inst, at, nbhd, p_cut, grid, budget)?;
        let abs_err = (count as f64 - main.total).abs();
        records.push(DiscrepancyRecord {
            at,
            count,
            main: main.total,
            abs_err,
            rel_err: if main.total > 0.0 { abs_err / main.total } else { f64::INFINITY },
            modulus,
        });
    }
    let fit = fit_discrepancy(&records)?;
    Ok((records, fit))
}

/// All on-quadric residues mod `p^e`, by scan.
pub fn on_quadric_residues(
    q: &crate::forms::QuadraticForm,
    m: i64,
    p: u64,
    e: u32,
    budget: &CountBudget,
) -> Result<Vec<Vec<u64>>> {
    let n = q.dim();
    let md = pow_u128(p, e);
    let total = md.checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > budget.scan_cap {
        return Err(Error::CapExceeded { needed: total, cap: budget.scan_cap });
    }
    let md = md as u64;
    let target = (m.rem_euclid(md as i64)) as u64;
    let mut out = Vec::new();
    let mut x = vec![0u64; n];
    loop {
        let rp = crate::modular::ResiduePoint { p, k: e, coords: x.clone() };
        if rp.on_quadric(q, target as i64) {
            out.push(x.clone());
        }
        let mut d = 0;
        loop {
            if d == n {
                return Ok(out);
            }
            x[d] += 1;
            if x[d] < md {
                break;
            }
            x[d] = 0;
            d += 1;
        }
    }
}

/// Is the residue a smooth point mod `p` (gradient not identically zero)?
pub fn is_smooth_residue(q: &crate::forms::QuadraticForm, xi: &[u64], p: u64) -> bool {
    let n = q.dim();
    (0..n).any(|i| {
        let mut row: u128 = 0;
        for j in 0..n {
            row += (q.gram()[i][j].rem_euclid(p as i64)) as u128 * xi[j] as u128;
        }
        (2 * row % p as u128) != 0
    })
}
