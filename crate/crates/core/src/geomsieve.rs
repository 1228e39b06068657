//! The geometric sieve: count `p0`-integral points in a height ball whose
//! reduction at some prime in `(N1, N2]` lands in the codimension-two locus
//! `Z = X ∩ (f = g = 0)`, together with the supporting gcd-divisibility and
//! binary-form representability counts.
//!
//! Witness extraction works on the cleared point `y = p0^d x`: a prime
//! `p != p0` is a witness exactly when it divides both cleared values
//! `f_d(y)` and `g_d(y)` (the quadric condition mod `p` holds automatically
//! for exact points). `N2 = infinity` is handled by factoring: witnesses
//! divide the nonzero cleared values, so they are bounded.

use crate::arith::{exact_sqrt128, is_prime_u64, isqrt128, next_prime, primes_upto};
use crate::enumerate::{enumerate_s_integral, IntegralPoint};
use crate::error::Error;
use crate::fit::nonneg_ls;
use crate::forms::QuadricInstance;
use crate::modular::{CountBudget, SubvarietySpec};
use crate::poly::Poly;
use crate::sieve::factorize_u64;
use crate::Result;
use num_traits::ToPrimitive;

/// A point that is bad somewhere in the prime range, with verified witnesses.
#[derive(Debug, Clone)]
pub struct BadPointRecord {
    pub point: IntegralPoint,
    /// Verified witness primes within the range (empty for generic-bad points).
    pub witnesses: Vec<u64>,
    /// Both cleared values vanish exactly: bad at every prime of the range.
    pub generic_bad: bool,
}

/// Result of a bad-point sweep.
#[derive(Debug, Clone)]
pub struct BadPointReport {
    pub count: u64,
    pub total_points: u64,
    pub records: Vec<BadPointRecord>,
}

fn cleared_values(spec: &SubvarietySpec, x: &IntegralPoint) -> Result<(i128, i128)> {
    let coords: Vec<i128> = x.num.iter().map(|&c| c as i128).collect();
    if x.den_pow == 0 {
        Ok((spec.f.eval_i128(&coords), spec.g.eval_i128(&coords)))
    } else {
        let mut s: i64 = 1;
        for _ in 0..x.den_pow {
            s = s
                .checked_mul(x.p0 as i64)
                .ok_or_else(|| Error::InvalidInput("denominator power overflows".into()))?;
        }
        Ok((spec.f.cleared(s).eval_i128(&coords), spec.g.cleared(s).eval_i128(&coords)))
    }
}

/// Witness primes of one point in `(n1, n2]`; `None` for `n2` means infinity.
fn witnesses_of(
    spec: &SubvarietySpec,
    x: &IntegralPoint,
    p0: u64,
    n1: u64,
    n2: Option<u64>,
) -> Result<(Vec<u64>, bool)> {
    let (fv, gv) = cleared_values(spec, x)?;
    if fv == 0 && gv == 0 {
        return Ok((vec![], true));
    }
    let g = num_integer::gcd(fv.unsigned_abs(), gv.unsigned_abs());
    let g64 = g
        .to_u64()
        .ok_or_else(|| Error::InvalidInput("gcd of cleared values exceeds u64".into()))?;
    let mut witnesses: Vec<u64> = factorize_u64(g64)
        .into_iter()
        .map(|(p, _)| p)
        .filter(|&p| p != p0 && p > n1 && n2.map_or(true, |b| p <= b))
        .collect();
    witnesses.sort_unstable();
    Ok((witnesses, false))
}

/// Re-verify one witness from scratch: reduce the cleared point and check all
/// three defining conditions mod `p`.
pub fn verify_witness(
    inst: &QuadricInstance,
    spec: &SubvarietySpec,
    x: &IntegralPoint,
    p: u64,
) -> Result<bool> {
    if Some(p) == inst.p0 {
        return Ok(false);
    }
    let (fv, gv) = cleared_values(spec, x)?;
    let y128: Vec<i128> = x.num.iter().map(|&c| c as i128).collect();
    let qv = inst.form.eval_i128(&y128);
    // Cleared quadric target: q(y) = p0^(2d) m exactly.
    let mut target: i128 = inst.m as i128;
    for _ in 0..2 * x.den_pow {
        target *= x.p0 as i128;
    }
    let pp = p as i128;
    Ok(fv.rem_euclid(pp) == 0 && gv.rem_euclid(pp) == 0 && (qv - target).rem_euclid(pp) == 0)
}

/// Count the points of the instance ball whose reduction lies in `Z` at some
/// prime of `(n1, n2]`, with per-point witness records.
pub fn bad_point_count(
    inst: &QuadricInstance,
    spec: &SubvarietySpec,
    n1: u64,
    n2: Option<u64>,
) -> Result<BadPointReport> {
    let p0 = inst.p0.ok_or_else(|| Error::InvalidInput("instance has no p0".into()))?;
    if n1 < p0 {
        return Err(Error::InvalidInput("need N1 >= p0".into()));
    }
    // Generic-bad points need some prime in the range to exist.
    let range_nonempty = match n2 {
        None => true,
        Some(b) => next_prime(n1).map_or(false, |p| p <= b),
    };
    let mut records = Vec::new();
    let mut total_points = 0u64;
    let mut err: Option<Error> = None;
    enumerate_s_integral(inst, |x| {
        if err.is_some() {
            return;
        }
        total_points += 1;
        match witnesses_of(spec, &x, p0, n1, n2) {
            Ok((witnesses, generic_bad)) => {
                if (generic_bad && range_nonempty) || !witnesses.is_empty() {
                    records.push(BadPointRecord { point: x, witnesses, generic_bad });
                }
            }
            Err(e) => err = Some(e),
        }
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    // Every recorded witness is re-verified before the record ships.
    for rec in &records {
        for &p in &rec.witnesses {
            if !verify_witness(inst, spec, &rec.point, p)? {
                return Err(Error::InvalidInput(format!(
                    "witness verification failed at p = {p}"
                )));
            }
        }
    }
    Ok(BadPointReport { count: records.len() as u64, total_points, records })
}

/// Reference path: per-prime reduction filter over all primes in `(n1, n2]`.
/// Must equal the factoring path exactly.
pub fn bad_point_count_naive(
    inst: &QuadricInstance,
    spec: &SubvarietySpec,
    n1: u64,
    n2: u64,
) -> Result<u64> {
    let p0 = inst.p0.ok_or_else(|| Error::InvalidInput("instance has no p0".into()))?;
    let points = crate::enumerate::enumerate_s_integral_collect(inst)?;
    let primes: Vec<u64> = primes_upto(n2).into_iter().filter(|&p| p > n1 && p != p0).collect();
    let mut count = 0u64;
    for x in &points {
        let (fv, gv) = cleared_values(spec, x)?;
        let bad = primes.iter().any(|&p| {
            let pp = p as i128;
            fv.rem_euclid(pp) == 0 && gv.rem_euclid(pp) == 0
        });
        if bad {
            count += 1;
        }
    }
    Ok(count)
}

/// Count points bad at exactly the prime `p` by walking congruence classes:
/// for each `lambda` in `Z(F_p)`, integral points `y ≡ p0^h lambda (mod p)` on
/// the rescaled quadric are enumerated on the `p`-stride sublattice. Equality
/// with the naive filter is a contract, not an estimate.
pub fn medium_prime_count(
    inst: &QuadricInstance,
    spec: &SubvarietySpec,
    p: u64,
    budget: &CountBudget,
) -> Result<u64> {
    let p0 = inst.p0.ok_or_else(|| Error::InvalidInput("instance has no p0".into()))?;
    if p == p0 || !is_prime_u64(p) {
        return Err(Error::InvalidInput("need a prime p different from p0".into()));
    }
    let diag = inst
        .form
        .diagonal_entries()
        .ok_or_else(|| Error::InvalidInput("medium_prime_count needs a diagonal Gram".into()))?;
    let n = diag.len();
    let region = inst
        .region
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("instance has no region".into()))?;
    let needed = (p as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if needed > budget.scan_cap {
        return Err(Error::CapExceeded { needed, cap: budget.scan_cap });
    }
    let target = crate::enumerate::scaled_target(inst)? as i128;
    let scale = (p0 as i128).pow(inst.h) as u64;
    let bounds = crate::enumerate::LatticeBounds::from_box(region, scale)?;

    // Z(F_p) for the x-model; y-residues are p0^h * lambda.
    let mut count = 0u64;
    let mut lambda = vec![0u64; n];
    let p_i = p as i128;
    let scale_mod = (scale % p) as i128;
    loop {
        let on_z = {
            let qv: i128 = (0..n)
                .map(|i| (diag[i] as i128) * (lambda[i] as i128) * (lambda[i] as i128))
                .sum();
            (qv - inst.m as i128).rem_euclid(p_i) == 0
                && spec.f.eval_mod(&lambda, p) == 0
                && spec.g.eval_mod(&lambda, p) == 0
        };
        if on_z {
            // anchor: representative of p0^h * lambda mod p
            let anchor: Vec<i128> = lambda
                .iter()
                .map(|&l| (l as i128 * scale_mod).rem_euclid(p_i))
                .collect();
            count += count_class_points(&diag, target, &anchor, p_i, &bounds)?;
        }
        let mut d = 0;
        loop {
            if d == n {
                return Ok(count);
            }
            lambda[d] += 1;
            if lambda[d] < p {
                break;
            }
            lambda[d] = 0;
            d += 1;
        }
    }
}

/// `#{y in box : q(y) = target, y ≡ anchor (mod p)}` for diagonal q, scanning
/// the stride-`p` sublattice in the first `n-1` coordinates and solving the
/// last exactly.
fn count_class_points(
    diag: &[i64],
    target: i128,
    anchor: &[i128],
    p: i128,
    bounds: &crate::enumerate::LatticeBounds,
) -> Result<u64> {
    let n = diag.len();
    // Per-axis stride ranges: y_i = anchor_i + p t_i within the box.
    let ranges: Vec<(i128, i128)> = (0..n)
        .map(|i| {
            let (lo, hi) = bounds.axis[i];
            let lo = lo as i128;
            let hi = hi as i128;
            let tlo = (lo - anchor[i]).div_euclid(p)
                + i128::from((lo - anchor[i]).rem_euclid(p) != 0);
            let thi = (hi - anchor[i]).div_euclid(p);
            (tlo, thi)
        })
        .collect();
    let mut count = 0u64;
    let mut t = vec![0i128; n - 1];
    for (i, r) in ranges.iter().take(n - 1).enumerate() {
        if r.0 > r.1 {
            return Ok(0);
        }
        t[i] = r.0;
    }
    loop {
        // Solve a_n y_n^2 = target - sum for y_n ≡ anchor_n (mod p) in box.
        let mut rest: i128 = 0;
        for i in 0..n - 1 {
            let y = anchor[i] + p * t[i];
            rest += diag[i] as i128 * y * y;
        }
        let rhs = target - rest;
        let a_n = diag[n - 1] as i128;
        if rhs % a_n == 0 {
            if let Some(root) = exact_sqrt128(rhs / a_n) {
                for y_n in if root == 0 { vec![0] } else { vec![root, -root] } {
                    let (lo, hi) = bounds.axis[n - 1];
                    if y_n >= lo as i128
                        && y_n <= hi as i128
                        && (y_n - anchor[n - 1]).rem_euclid(p) == 0
                    {
                        count += 1;
                    }
                }
            }
        }
        let mut d = 0;
        loop {
            if d == n - 1 {
                return Ok(count);
            }
            t[d] += 1;
            if t[d] <= ranges[d].1 {
                break;
            }
            t[d] = ranges[d].0;
            d += 1;
        }
    }
}

/// Gcd-divisibility count: `#{Y in [-B, B]^d : some prime >= m_min divides
/// every poly value}`. Tuples where every value vanishes count as bad (zero
/// is divisible by all primes) and are flagged separately.
#[derive(Debug, Clone, Copy)]
pub struct EkedahlCount {
    pub bad: u64,
    pub all_zero: u64,
    pub total: u64,
}

pub fn ekedahl_count(polys: &[Poly], b: i64, m_min: u64) -> Result<EkedahlCount> {
    if polys.is_empty() || b <= 0 || m_min == 0 {
        return Err(Error::InvalidInput("need polynomials and positive B, M".into()));
    }
    let d = polys[0].n_vars;
    if polys.iter().any(|p| p.n_vars != d) {
        return Err(Error::InvalidInput("mixed arities".into()));
    }
    let mut bad = 0u64;
    let mut all_zero = 0u64;
    let mut total = 0u64;
    let mut y = vec![-b; d];
    loop {
        total += 1;
        let coords: Vec<i128> = y.iter().map(|&c| c as i128).collect();
        let mut g: u128 = 0;
        for poly in polys {
            g = num_integer::gcd(g, poly.eval_i128(&coords).unsigned_abs());
        }
        if g == 0 {
            all_zero += 1;
            bad += 1;
        } else if let Some(g64) = g.to_u64() {
            if factorize_u64(g64).iter().any(|&(p, _)| p >= m_min) {
                bad += 1;
            }
        } else {
            return Err(Error::InvalidInput("poly gcd exceeds u64".into()));
        }
        let mut dd = 0;
        loop {
            if dd == d {
                return Ok(EkedahlCount { bad, all_zero, total });
            }
            y[dd] += 1;
            if y[dd] <= b {
                break;
            }
            y[dd] = -b;
            dd += 1;
        }
    }
}

/// Is `t` representable as `u^2 + a v^2`? Bounded scan over `v`.
pub fn binary_represents(a: i64, t: i128) -> bool {
    debug_assert!(a >= 1);
    if t < 0 {
        return false;
    }
    let vmax = isqrt128(t / a as i128);
    for v in 0..=vmax {
        if exact_sqrt128(t - a as i128 * v * v).is_some() {
            return true;
        }
    }
    false
}

/// Representability table for `u^2 + a v^2` on `[0, t_max]`, built by
/// generating all values in range (the same bounded scan, batched).
pub fn representability_table(a: i64, t_max: i64) -> Result<Vec<bool>> {
    if a < 1 || t_max < 0 {
        return Err(Error::InvalidInput("need a >= 1 and t_max >= 0".into()));
    }
    if t_max > 1 << 33 {
        return Err(Error::CapExceeded { needed: t_max as u128, cap: 1 << 33 });
    }
    let mut table = vec![false; t_max as usize + 1];
    let mut v: i64 = 0;
    while a * v * v <= t_max {
        let base = a * v * v;
        let mut u: i64 = 0;
        while base + u * u <= t_max {
            table[(base + u * u) as usize] = true;
            u += 1;
        }
        v += 1;
    }
    Ok(table)
}

/// Half-dimensional representability count:
/// `#{Y in [-B, B]^d : exists u, v with u^2 + a v^2 = c - sum_i tail_i Y_i^2}`.
#[derive(Debug, Clone, Copy)]
pub struct HalfDimCount {
    pub representable: u64,
    pub total: u64,
    /// Every target was negative (count is vacuously zero).
    pub negative_target_only: bool,
}

pub fn halfdim_count(a: i64, tail: &[i64], c: i64, b: i64) -> Result<HalfDimCount> {
    if a < 1 || b < 1 || tail.is_empty() {
        return Err(Error::InvalidInput("need a >= 1, B >= 1, nonempty tail".into()));
    }
    let d = tail.len();
    // Range of targets t = c - sum tail_i Y_i^2 over the box.
    let mut t_max: i128 = c as i128;
    for &ai in tail {
        if ai < 0 {
            t_max += (-ai as i128) * (b as i128) * (b as i128);
        }
    }
    if t_max < 0 {
        return Ok(HalfDimCount {
            representable: 0,
            total: ((2 * b + 1) as u64).pow(d as u32),
            negative_target_only: true,
        });
    }
    let t_max_i64 =
        i64::try_from(t_max).map_err(|_| Error::InvalidInput("target range exceeds i64".into()))?;
    let table = representability_table(a, t_max_i64)?;
    let mut representable = 0u64;
    let mut total = 0u64;
    let mut any_nonneg = false;
    let mut y = vec![-b; d];
    loop {
        total += 1;
        let mut t: i128 = c as i128;
        for i in 0..d {
            t -= tail[i] as i128 * (y[i] as i128) * (y[i] as i128);
        }
        if t >= 0 {
            any_nonneg = true;
            if table[t as usize] {
                representable += 1;
            }
        }
        let mut dd = 0;
        loop {
            if dd == d {
                return Ok(HalfDimCount {
                    representable,
                    total,
                    negative_target_only: !any_nonneg,
                });
            }
            y[dd] += 1;
            if y[dd] <= b {
                break;
            }
            y[dd] = -b;
            dd += 1;
        }
    }
}

/// Model terms for bound-shape fits of `ratio` against the range parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelTerm {
    /// `1 / (x log x)`
    OneOverXLogX,
    /// `1 / sqrt(x log p0)` with the given `p0`
    OneOverSqrtXLog(f64),
}

impl ModelTerm {
    fn eval(&self, x: f64) -> f64 {
        match self {
            ModelTerm::OneOverXLogX => 1.0 / (x * x.ln()),
            ModelTerm::OneOverSqrtXLog(p0) => 1.0 / (x * p0.ln()).sqrt(),
        }
    }
}

/// Nonnegative least-squares fit of measured ratios against model terms.
#[derive(Debug, Clone)]
pub struct BoundShapeFit {
    pub coefficients: Vec<f64>,
    pub residual: f64,
}

pub fn bound_shape_check(
    params: &[f64],
    ratios: &[f64],
    model: &[ModelTerm],
) -> Result<BoundShapeFit> {
    if params.len() != ratios.len() || params.len() < 4 {
        return Err(Error::DegenerateFit("need at least four series points".into()));
    }
    if ratios.iter().any(|&r| r < 0.0) {
        return Err(Error::DegenerateFit("ratios must be nonnegative".into()));
    }
    let columns: Vec<Vec<f64>> = model
        .iter()
        .map(|t| params.iter().map(|&x| t.eval(x)).collect())
        .collect();
    let (coefficients, residual) = nonneg_ls(&columns, ratios)?;
    Ok(BoundShapeFit { coefficients, residual })
}
