//! Local densities, archimedean densities over regions, p-adic height-ball
//! volumes, and the assembled main-term prediction.
//!
//! Every non-archimedean quantity is an exact rational: the density at `p` is
//! the stabilized ratio `#{x mod p^k : q = m} / p^(k(n-1))`, verified by exact
//! agreement at two consecutive levels (never assumed). The archimedean
//! density is a quadrature estimate of the surface measure
//! `dx_1..dx_(n-1) / |dq/dx_n|` with a refinement-difference error bar.

use crate::arith::{pow_big, primes_upto, val_big};
use crate::error::Error;
use crate::fit::linear_fit;
use crate::forms::{rat_to_f64, QuadraticForm, QuadricInstance, RationalBox};
use crate::modular::{count_prime_power, count_prime_power_in_class, CountBudget};
use crate::{Int, Rat, Result};
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

/// A stabilized local density at a finite prime.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalDensity {
    pub p: u64,
    pub value: Rat,
    pub k_used: u32,
    pub stabilized: bool,
}

/// Stabilization threshold `k0 = 2 v_p(2 det m) + 1`; densities are computed
/// at `k0 + 1` and `k0 + 2` and must agree exactly.
pub fn stabilization_threshold(q: &QuadraticForm, m: &Int, p: u64) -> u32 {
    let quantity = Int::from(2) * q.det() * m;
    2 * val_big(&quantity, p) + 1
}

fn density_at_level(q: &QuadraticForm, m: &Int, p: u64, k: u32, budget: &CountBudget) -> Result<Rat> {
    let count = count_prime_power(q, m, p, k, budget)?;
    Ok(Rat::new(count, pow_big(p, k * (q.dim() as u32 - 1))))
}

/// The local density `sigma_p = lim_k count(p^k) / p^(k(n-1))`, exact.
pub fn local_density(
    q: &QuadraticForm,
    m: &Int,
    p: u64,
    budget: &CountBudget,
) -> Result<LocalDensity> {
    if m.is_zero() {
        return Err(Error::InvalidInput("m must be nonzero".into()));
    }
    let k0 = stabilization_threshold(q, m, p);
    let mut k = k0 + 1;
    let mut prev = density_at_level(q, m, p, k, budget)?;
    let k_limit = k0 + 8;
    while k < k_limit {
        let next = density_at_level(q, m, p, k + 1, budget)?;
        if next == prev {
            return Ok(LocalDensity { p, value: next, k_used: k + 1, stabilized: true });
        }
        prev = next;
        k += 1;
    }
    Err(Error::NotStabilized { p, k_reached: k })
}

/// Measure of one congruence class `{x ≡ xi mod p^e}` inside the integral
/// points, under the same normalization as [`local_density`]. Classes off the
/// quadric get measure zero.
pub fn class_density(
    q: &QuadraticForm,
    m: &Int,
    p: u64,
    xi: &[u64],
    e: u32,
    budget: &CountBudget,
) -> Result<LocalDensity> {
    let k0 = stabilization_threshold(q, m, p).max(e);
    let n1 = q.dim() as u32 - 1;
    let level = |k: u32| -> Result<Rat> {
        let c = count_prime_power_in_class(q, m, p, k, xi, e, budget)?;
        Ok(Rat::new(c, pow_big(p, k * n1)))
    };
    let mut k = k0 + 1;
    let mut prev = level(k)?;
    let k_limit = k0 + 8;
    while k < k_limit {
        let next = level(k + 1)?;
        if next == prev {
            return Ok(LocalDensity { p, value: next, k_used: k + 1, stabilized: true });
        }
        prev = next;
        k += 1;
    }
    Err(Error::NotStabilized { p, k_reached: k })
}

/// Region of integration on the real points.
#[derive(Debug, Clone)]
pub enum RealRegion {
    Box(RationalBox),
    /// Euclidean ball of the given radius.
    Ball(f64),
}

impl RealRegion {
    fn axis_bounds(&self, n: usize) -> Vec<(f64, f64)> {
        match self {
            RealRegion::Box(b) => b
                .lo
                .iter()
                .zip(&b.hi)
                .map(|(l, h)| (rat_to_f64(l), rat_to_f64(h)))
                .collect(),
            RealRegion::Ball(r) => vec![(-r, *r); n],
        }
    }

    fn admits(&self, x: &[f64]) -> bool {
        match self {
            RealRegion::Box(b) => b.contains_f64(x),
            RealRegion::Ball(r) => x.iter().map(|v| v * v).sum::<f64>() <= r * r,
        }
    }
}

/// Archimedean density estimate with a refinement-difference error bar.
#[derive(Debug, Clone, Copy)]
pub struct RealDensity {
    pub value: f64,
    pub error: f64,
    pub grid: usize,
}

/// Gauge-measure of `{q = m}` inside the region by chartwise midpoint
/// quadrature. Requires a diagonal Gram matrix (diagonalize first); the chart
/// solved for is the coordinate maximizing `|a_i x_i^2|`, which keeps the
/// integrand `1/|2 a_i x_i|` bounded on its cell.
pub fn real_density(
    q: &QuadraticForm,
    m: i64,
    region: &RealRegion,
    grid: usize,
) -> Result<RealDensity> {
    let diag = q
        .diagonal_entries()
        .ok_or_else(|| Error::InvalidInput("real_density needs a diagonal Gram".into()))?;
    if m == 0 {
        return Err(Error::ChartDegenerate);
    }
    if q.dim() < 2 {
        return Err(Error::InvalidInput("need n >= 2".into()));
    }
    if grid < 2 {
        return Err(Error::InvalidInput("grid must be >= 2".into()));
    }
    let coarse = quadrature(&diag, m, region, grid);
    let fine = quadrature(&diag, m, region, grid * 2);
    Ok(RealDensity { value: fine, error: (fine - coarse).abs(), grid: grid * 2 })
}

fn quadrature(diag: &[i64], m: i64, region: &RealRegion, grid: usize) -> f64 {
    let n = diag.len();
    let bounds = region.axis_bounds(n);
    let mut total = 0.0f64;
    for chart in 0..n {
        let others: Vec<usize> = (0..n).filter(|&j| j != chart).collect();
        let steps: Vec<f64> = others
            .iter()
            .map(|&j| (bounds[j].1 - bounds[j].0) / grid as f64)
            .collect();
        let cell = steps.iter().product::<f64>();
        if cell == 0.0 {
            continue;
        }
        // Parallel over the first free axis, deterministic ordered reduction.
        let partials: Vec<f64> = (0..grid)
            .into_par_iter()
            .map(|i0| {
                let mut sum = 0.0f64;
                let mut idx = vec![0usize; n - 1];
                idx[0] = i0;
                loop {
                    let mut x = vec![0.0f64; n];
                    for (slot, &j) in others.iter().enumerate() {
                        x[j] = bounds[j].0 + (idx[slot] as f64 + 0.5) * steps[slot];
                    }
                    sum += cell_contribution(diag, m, region, chart, &mut x);
                    // odometer over idx[1..]
                    let mut d = 1;
                    loop {
                        if d == n - 1 {
                            return sum;
                        }
                        idx[d] += 1;
                        if idx[d] < grid {
                            break;
                        }
                        idx[d] = 0;
                        d += 1;
                    }
                    if n == 1 {
                        return sum;
                    }
                }
            })
            .collect();
        total += cell * partials.iter().sum::<f64>();
    }
    total
}

fn cell_contribution(diag: &[i64], m: i64, region: &RealRegion, chart: usize, x: &mut [f64]) -> f64 {
    let n = diag.len();
    let a_i = diag[chart] as f64;
    let mut rest = 0.0f64;
    for j in 0..n {
        if j != chart {
            rest += diag[j] as f64 * x[j] * x[j];
        }
    }
    let t = (m as f64 - rest) / a_i;
    if t <= 0.0 {
        return 0.0;
    }
    let kappa_i = (a_i * t).abs();
    // Chart ownership: strictly larger than every earlier coordinate's
    // |a_j x_j^2|, at least as large as every later one.
    for j in 0..n {
        if j == chart {
            continue;
        }
        let kj = (diag[j] as f64 * x[j] * x[j]).abs();
        if j < chart {
            if kj >= kappa_i {
                return 0.0;
            }
        } else if kj > kappa_i {
            return 0.0;
        }
    }
    let root = t.sqrt();
    let weight = 1.0 / (2.0 * a_i.abs() * root);
    let mut acc = 0.0;
    for sign in [root, -root] {
        x[chart] = sign;
        if region.admits(x) {
            acc += weight;
        }
    }
    x[chart] = 0.0;
    acc
}

/// Exact volume of the `p0`-adic height ball of exponent `h`:
/// `p0^(h(n-2)) * sigma_(p0)(q = p0^(2h) m)`.
pub fn padic_ball_volume(
    q: &QuadraticForm,
    m: i64,
    p0: u64,
    h: u32,
    budget: &CountBudget,
) -> Result<(Rat, LocalDensity)> {
    if !crate::forms::represents_local(q, m, crate::forms::Place::finite(p0)?)? {
        return Err(Error::InvalidInput(format!("q = {m} is not solvable over Q_{p0}")));
    }
    let n = q.dim() as u32;
    let scaled = pow_big(p0, 2 * h) * Int::from(m);
    let density = local_density(q, &scaled, p0, budget)?;
    let volume = Rat::from_integer(pow_big(p0, h * (n - 2))) * &density.value;
    Ok((volume, density))
}

/// Assembled main-term prediction over an adelic box: archimedean factor,
/// `p0`-ball volume, and the finite product of local densities up to `p_cut`,
/// with a reported multiplicative tail bracket fitted from the computed
/// factors (envelope `|sigma_p - 1| <= C / p^2`).
#[derive(Debug, Clone)]
pub struct HLPrediction {
    pub sigma_inf: RealDensity,
    pub ball_volume: Rat,
    pub ball_density: LocalDensity,
    pub finite_product: Rat,
    pub local_factors: Vec<LocalDensity>,
    pub p_cut: u64,
    pub tail_bound: f64,
    pub total: f64,
    pub total_lo: f64,
    pub total_hi: f64,
}

/// Prediction gate and assembly. Requires `n >= 4` (the density function is
/// identically one there) and global solvability.
pub fn hl_prediction(
    inst: &QuadricInstance,
    p_cut: u64,
    grid: usize,
    budget: &CountBudget,
) -> Result<HLPrediction> {
    let q = &inst.form;
    if q.dim() < 4 {
        return Err(Error::InvalidInput(
            "main-term predictions require n >= 4 (density function constant)".into(),
        ));
    }
    if !crate::forms::represents_global(q, inst.m)? {
        return Err(Error::InvalidInput("instance is not globally solvable".into()));
    }
    let p0 = inst.p0.ok_or_else(|| Error::InvalidInput("instance has no p0".into()))?;
    let region = inst
        .region
        .clone()
        .ok_or_else(|| Error::InvalidInput("instance has no region".into()))?;
    let sigma_inf = real_density(q, inst.m, &RealRegion::Box(region), grid)?;
    let (ball_volume, ball_density) = padic_ball_volume(q, inst.m, p0, inst.h, budget)?;
    let m_big = Int::from(inst.m);
    let mut finite_product = Rat::one();
    let mut local_factors = Vec::new();
    for p in primes_upto(p_cut) {
        if p == p0 {
            continue;
        }
        let d = local_density(q, &m_big, p, budget)?;
        finite_product *= &d.value;
        local_factors.push(d);
    }
    // Fitted tail envelope: C = max |sigma_p - 1| p^2 over the computed range,
    // summed beyond p_cut as roughly 1/(P log P).
    let c_env = local_factors
        .iter()
        .map(|d| {
            let dev = rat_to_f64(&(d.value.clone() - Rat::one())).abs();
            dev * (d.p as f64) * (d.p as f64)
        })
        .fold(0.0f64, f64::max);
    let tail_bound = c_env / (p_cut as f64 * (p_cut as f64).ln());
    let total = sigma_inf.value * rat_to_f64(&ball_volume) * rat_to_f64(&finite_product);
    Ok(HLPrediction {
        sigma_inf,
        ball_volume,
        ball_density,
        finite_product,
        local_factors,
        p_cut,
        tail_bound,
        total,
        total_lo: total * (-tail_bound).exp(),
        total_hi: total * tail_bound.exp(),
    })
}

/// Least-squares slope of `log(volume)` against `h log p0`; the expected
/// exponent is `n - 2`.
pub fn volume_exponent_fit(series: &[(u32, Rat)], p0: u64) -> Result<(f64, f64)> {
    if series.len() < 3 {
        return Err(Error::DegenerateFit("need at least three volumes".into()));
    }
    if series.iter().any(|(_, v)| !v.is_positive()) {
        return Err(Error::DegenerateFit("volumes must be positive".into()));
    }
    let lp = (p0 as f64).ln();
    let xs: Vec<f64> = series.iter().map(|(h, _)| *h as f64 * lp).collect();
    let ys: Vec<f64> = series.iter().map(|(_, v)| rat_to_f64(v).ln()).collect();
    let (slope, _, resid) = linear_fit(&xs, &ys)?;
    Ok((slope, resid))
}
