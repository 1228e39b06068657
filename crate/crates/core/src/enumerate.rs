//! Enumeration of integral and `p0`-integral points on `q = m` inside height
//! balls and boxes.
//!
//! The fast path scans the first `n - 2` coordinates over the bounding box
//! (with running Euclidean pruning) and solves the residual binary equation
//! in the last two coordinates exactly: divisor pairing when the tail is a
//! difference of equal-weight squares, integer square roots for definite
//! tails, and a bounded scan otherwise. A full-box naive oracle backs every
//! property test. Emission order is lexicographic and deterministic.

use crate::arith::{exact_sqrt128, isqrt128, pow_big};
use crate::error::Error;
use crate::forms::{QuadraticForm, QuadricInstance, RationalBox};
use crate::{Rat, Result};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

/// Which enumerator produced a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    FastScan,
    NaiveOracle,
}

/// A point with coordinates `num_i / p0^den_pow`; integral when `den_pow = 0`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct IntegralPoint {
    pub num: Vec<i64>,
    pub den_pow: u32,
    pub p0: u64,
    pub provenance: ProvenanceTag,
}

/// Ordering-neutral provenance wrapper (ignored by Eq/Ord on points).
#[derive(Debug, Clone, Copy)]
pub struct ProvenanceTag(pub Provenance);

impl PartialEq for ProvenanceTag {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}
impl Eq for ProvenanceTag {}
impl PartialOrd for ProvenanceTag {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for ProvenanceTag {
    fn cmp(&self, _: &Self) -> std::cmp::Ordering {
        std::cmp::Ordering::Equal
    }
}

impl IntegralPoint {
    pub fn integral(num: Vec<i64>, provenance: Provenance) -> Self {
        IntegralPoint { num, den_pow: 0, p0: 1, provenance: ProvenanceTag(provenance) }
    }

    /// Build `num / p0^den_pow`, reducing common powers of `p0`.
    pub fn reduced(mut num: Vec<i64>, p0: u64, mut den_pow: u32, provenance: Provenance) -> Self {
        while den_pow > 0 && num.iter().all(|&c| c % p0 as i64 == 0) {
            for c in num.iter_mut() {
                *c /= p0 as i64;
            }
            den_pow -= 1;
        }
        let p0 = if den_pow == 0 { 1 } else { p0 };
        IntegralPoint { num, den_pow, p0, provenance: ProvenanceTag(provenance) }
    }

    /// Parse from exact rationals, checking the denominator constraint.
    pub fn from_rationals(coords: &[Rat], p0: u64) -> Result<Self> {
        let mut num = Vec::with_capacity(coords.len());
        let mut max_pow = 0u32;
        for c in coords {
            let den = c.denom();
            let mut d = den.clone();
            let mut pow = 0u32;
            let p = BigInt::from(p0);
            while (&d % &p).is_zero() {
                d /= &p;
                pow += 1;
            }
            if d != BigInt::from(1) {
                return Err(Error::DenominatorNotPPower);
            }
            max_pow = max_pow.max(pow);
            num.push(c.clone());
        }
        let scale = Rat::from_integer(pow_big(p0, max_pow));
        let ints: Vec<i64> = num
            .iter()
            .map(|c| {
                (c * &scale)
                    .to_integer()
                    .to_i64()
                    .ok_or_else(|| Error::InvalidInput("coordinate exceeds i64".into()))
            })
            .collect::<Result<_>>()?;
        Ok(IntegralPoint::reduced(ints, p0, max_pow, Provenance::FastScan))
    }

    pub fn coords_rat(&self) -> Vec<Rat> {
        let den = pow_big(self.p0.max(1), self.den_pow);
        self.num
            .iter()
            .map(|&c| Rat::new(BigInt::from(c), den.clone()))
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.num.len()
    }
}

/// Euclidean height `(sum x_i^2)^(1/2)` as a float (reporting only).
pub fn height_real(x: &IntegralPoint) -> f64 {
    let den = (x.p0 as f64).powi(x.den_pow as i32);
    x.num
        .iter()
        .map(|&c| {
            let v = c as f64 / den;
            v * v
        })
        .sum::<f64>()
        .sqrt()
}

/// Exact square of the Euclidean height.
pub fn height_real_sq(x: &IntegralPoint) -> Rat {
    let den = pow_big(x.p0.max(1), x.den_pow);
    let den_sq = &den * &den;
    let num: BigInt = x.num.iter().map(|&c| BigInt::from(c) * BigInt::from(c)).sum();
    Rat::new(num, den_sq)
}

/// p-adic height exponent: `max_i (-v_p(x_i))`, so the height is `p0^e`.
/// Negative for points divisible by `p0`; zero coordinates are skipped.
pub fn height_padic(x: &IntegralPoint, p0: u64) -> Result<i32> {
    if x.den_pow > 0 && x.p0 != p0 {
        return Err(Error::DenominatorNotPPower);
    }
    let mut best: Option<i32> = None;
    for &c in &x.num {
        if c == 0 {
            continue;
        }
        let v = crate::arith::val_u64(c.unsigned_abs(), p0) as i32;
        let e = x.den_pow as i32 - v;
        best = Some(best.map_or(e, |b: i32| b.max(e)));
    }
    best.ok_or_else(|| Error::InvalidInput("zero point has no p-adic height".into()))
}

/// Per-axis integer bounds plus an optional exact Euclidean constraint.
#[derive(Debug, Clone)]
pub struct LatticeBounds {
    pub axis: Vec<(i64, i64)>,
    pub euclid_sq: Option<i128>,
}

impl LatticeBounds {
    pub fn ball(n: usize, radius: i64) -> Self {
        LatticeBounds {
            axis: vec![(-radius, radius); n],
            euclid_sq: Some(radius as i128 * radius as i128),
        }
    }

    pub fn sup(n: usize, radius: i64) -> Self {
        LatticeBounds { axis: vec![(-radius, radius); n], euclid_sq: None }
    }

    /// Integer sublattice bounds of `scale * box` (points y with y/scale in box).
    pub fn from_box(b: &RationalBox, scale: u64) -> Result<Self> {
        let s = Rat::from_integer(BigInt::from(scale));
        let axis = b
            .lo
            .iter()
            .zip(&b.hi)
            .map(|(lo, hi)| {
                let l = (lo * &s).ceil().to_integer();
                let h = (hi * &s).floor().to_integer();
                Ok((
                    l.to_i64().ok_or_else(|| Error::InvalidInput("box bound exceeds i64".into()))?,
                    h.to_i64().ok_or_else(|| Error::InvalidInput("box bound exceeds i64".into()))?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LatticeBounds { axis, euclid_sq: None })
    }

    fn candidate_count(&self) -> u128 {
        self.axis
            .iter()
            .map(|&(l, h)| if h >= l { (h - l + 1) as u128 } else { 0 })
            .product()
    }
}

/// Enumerate `y` in the bounds with `q(y) = target`, in lexicographic order.
/// The residual equation in the last two coordinates is solved exactly.
pub fn enumerate_lattice(
    q: &QuadraticForm,
    target: i64,
    bounds: &LatticeBounds,
    mut visit: impl FnMut(&[i64]),
) {
    let n = q.dim();
    if bounds.axis.iter().any(|&(l, h)| l > h) {
        return;
    }
    let factorizer = if n >= 2 && tail_pairs(q) {
        let spf_limit = residual_magnitude_bound(q, target, bounds).min(16_000_000);
        TailFactorizer::new(spf_limit as usize)
    } else {
        TailFactorizer::new(1)
    };

    let mut x = vec![0i64; n];
    if n == 1 {
        let a = q.gram()[0][0];
        if target % a == 0 {
            if let Some(r) = exact_sqrt128((target / a) as i128) {
                let r = r as i64;
                let cands = if r == 0 { vec![0] } else { vec![-r, r] };
                for cand in cands {
                    if in_axis(bounds, 0, cand) && within_euclid(bounds, (cand as i128).pow(2)) {
                        x[0] = cand;
                        debug_assert_eq!(q.eval_i128(&[cand as i128]), target as i128);
                        visit(&x);
                    }
                }
            }
        }
        return;
    }
    scan_prefix(q, target, bounds, &factorizer, &mut x, 0, 0, &mut visit);
}

fn in_axis(b: &LatticeBounds, i: usize, v: i64) -> bool {
    v >= b.axis[i].0 && v <= b.axis[i].1
}

/// True when the last two coordinates split off as `a(u^2 - v^2)`, the shape
/// the divisor-pairing solver handles.
fn tail_pairs(q: &QuadraticForm) -> bool {
    let n = q.dim();
    let (iu, iv) = (n - 2, n - 1);
    let g = q.gram();
    g[iu][iv] == 0
        && (0..iu).all(|j| g[iu][j] == 0 && g[iv][j] == 0)
        && g[iu][iu] == -g[iv][iv]
        && g[iu][iu] != 0
}

fn within_euclid(b: &LatticeBounds, sumsq: i128) -> bool {
    b.euclid_sq.map_or(true, |cap| sumsq <= cap)
}

fn residual_magnitude_bound(q: &QuadraticForm, target: i64, bounds: &LatticeBounds) -> u64 {
    // Bound |target - F(prefix)| over the box; coarse but only sizes the
    // smallest-prime-factor table.
    let n = q.dim();
    let mut acc: i128 = target.unsigned_abs() as i128;
    for i in 0..n {
        for j in 0..n {
            let m = bounds.axis[i].0.unsigned_abs().max(bounds.axis[i].1.unsigned_abs()) as i128;
            let mj = bounds.axis[j].0.unsigned_abs().max(bounds.axis[j].1.unsigned_abs()) as i128;
            acc += (q.gram()[i][j].unsigned_abs() as i128) * m * mj;
        }
    }
    acc.min(u64::MAX as i128) as u64
}

#[allow(clippy::too_many_arguments)]
fn scan_prefix(
    q: &QuadraticForm,
    target: i64,
    bounds: &LatticeBounds,
    factorizer: &TailFactorizer,
    x: &mut Vec<i64>,
    depth: usize,
    sumsq: i128,
    visit: &mut impl FnMut(&[i64]),
) {
    let n = q.dim();
    if depth == n - 2 {
        solve_tail(q, target, bounds, factorizer, x, sumsq, visit);
        return;
    }
    let (mut lo, mut hi) = bounds.axis[depth];
    if let Some(cap) = bounds.euclid_sq {
        let room = cap - sumsq;
        if room < 0 {
            return;
        }
        let r = isqrt128(room) as i64;
        lo = lo.max(-r);
        hi = hi.min(r);
    }
    for v in lo..=hi {
        x[depth] = v;
        scan_prefix(q, target, bounds, factorizer, x, depth + 1, sumsq + (v as i128) * (v as i128), visit);
    }
    x[depth] = 0;
}

/// Solve the residual `A u^2 + B v^2 + C uv + D u + E v + F = target` over the
/// last two coordinates, emitting solutions in (u, v) order.
fn solve_tail(
    q: &QuadraticForm,
    target: i64,
    bounds: &LatticeBounds,
    factorizer: &TailFactorizer,
    x: &mut Vec<i64>,
    sumsq: i128,
    visit: &mut impl FnMut(&[i64]),
) {
    let n = q.dim();
    let (iu, iv) = (n - 2, n - 1);
    let g = q.gram();
    let a = g[iu][iu] as i128;
    let b = g[iv][iv] as i128;
    let c = 2 * g[iu][iv] as i128;
    let mut d: i128 = 0;
    let mut e: i128 = 0;
    let mut f: i128 = 0;
    for j in 0..iu {
        d += 2 * g[iu][j] as i128 * x[j] as i128;
        e += 2 * g[iv][j] as i128 * x[j] as i128;
        for k in 0..iu {
            f += g[j][k] as i128 * x[j] as i128 * x[k] as i128;
        }
    }
    let t = target as i128 - f;

    let (mut ulo, mut uhi) = bounds.axis[iu];
    let (vlo, vhi) = bounds.axis[iv];
    if let Some(cap) = bounds.euclid_sq {
        let room = cap - sumsq;
        if room < 0 {
            return;
        }
        let r = isqrt128(room) as i64;
        ulo = ulo.max(-r);
        uhi = uhi.min(r);
    }
    if ulo > uhi || vlo > vhi {
        return;
    }

    let mut sols: Vec<(i64, i64)> = Vec::new();
    let mut push = |u: i64, v: i64| {
        if u >= ulo
            && u <= uhi
            && v >= vlo
            && v <= vhi
            && within_euclid(bounds, sumsq + (u as i128) * (u as i128) + (v as i128) * (v as i128))
        {
            sols.push((u, v));
        }
    };

    let pure = c == 0 && d == 0 && e == 0;
    if pure && a == -b {
        if t % a != 0 {
            return;
        }
        // u^2 - v^2 = t/a: divisor pairing.
        let tt = t / a;
        if tt == 0 {
            let r = uhi.max(-ulo).max(vhi.max(-vlo));
            for u in -r..=r {
                push(u, u);
                if u != 0 {
                    push(u, -u);
                }
            }
        } else {
            for dpos in factorizer.divisors(tt.unsigned_abs() as u64) {
                for dd in [dpos as i128, -(dpos as i128)] {
                    let ee = tt / dd;
                    if (dd + ee) % 2 != 0 {
                        continue;
                    }
                    let u = (dd + ee) / 2;
                    let v = (ee - dd) / 2;
                    if let (Ok(u), Ok(v)) = (i64::try_from(u), i64::try_from(v)) {
                        push(u, v);
                    }
                }
            }
        }
    } else if pure && a * b > 0 {
        // Definite tail: a u^2 + b v^2 = t with a, b of one sign.
        if t.signum() * a.signum() >= 0 {
            let ta = t / a; // may truncate; bounded scan over u fixes it below
            let umax = isqrt128(ta.max(0)).min(uhi.max(-ulo) as i128) as i64;
            for u in 0..=umax {
                let rem = t - a * (u as i128) * (u as i128);
                if rem % b != 0 {
                    continue;
                }
                let vv = rem / b;
                if vv < 0 {
                    continue;
                }
                if let Some(v) = exact_sqrt128(vv) {
                    let v = v as i64;
                    for uu in if u == 0 { vec![0] } else { vec![u, -u] } {
                        for vs in if v == 0 { vec![0] } else { vec![v, -v] } {
                            push(uu, vs);
                        }
                    }
                }
            }
        }
    } else {
        // General tail: bounded scan over u, exact 1-D quadratic in v.
        for u in ulo..=uhi {
            let uu = u as i128;
            // b v^2 + (c u + e) v + (a u^2 + d u - t) = 0
            let lin = c * uu + e;
            let cst = a * uu * uu + d * uu - t;
            if b == 0 {
                if lin == 0 {
                    if cst == 0 {
                        for v in vlo..=vhi {
                            push(u, v);
                        }
                    }
                } else if cst % lin == 0 {
                    let v = -cst / lin;
                    if let Ok(v) = i64::try_from(v) {
                        push(u, v);
                    }
                }
                continue;
            }
            let disc = lin * lin - 4 * b * cst;
            if disc < 0 {
                continue;
            }
            if let Some(r) = exact_sqrt128(disc) {
                let roots = if r == 0 { vec![0] } else { vec![r, -r] };
                for root in roots {
                    let numir = -lin + root;
                    if numir % (2 * b) == 0 {
                        if let Ok(v) = i64::try_from(numir / (2 * b)) {
                            push(u, v);
                        }
                    }
                }
            }
        }
    }

    sols.sort_unstable();
    sols.dedup();
    for (u, v) in sols {
        x[iu] = u;
        x[iv] = v;
        debug_assert_eq!(
            q.eval_i128(&x.iter().map(|&c| c as i128).collect::<Vec<_>>()),
            target as i128
        );
        visit(x);
    }
    x[iu] = 0;
    x[iv] = 0;
}

/// Divisor enumeration backed by a smallest-prime-factor table when the
/// residual values are small, with Pollard-rho factorization as fallback.
struct TailFactorizer {
    spf: Vec<u32>,
}

impl TailFactorizer {
    fn new(limit: usize) -> Self {
        TailFactorizer { spf: crate::arith::spf_table(limit.clamp(1, 80_000_000)) }
    }

    fn divisors(&self, n: u64) -> Vec<u64> {
        if n == 0 {
            return vec![];
        }
        let factors: Vec<(u64, u32)> = if (n as usize) < self.spf.len() {
            let mut v = Vec::new();
            let mut m = n as usize;
            while m > 1 {
                let p = self.spf[m] as u64;
                let mut e = 0;
                while m % p as usize == 0 {
                    m /= p as usize;
                    e += 1;
                }
                v.push((p, e));
            }
            v
        } else {
            crate::sieve::factorize_u64(n)
        };
        let mut divs = vec![1u64];
        for (p, e) in factors {
            let len = divs.len();
            let mut pe = 1u64;
            for _ in 0..e {
                pe *= p;
                for i in 0..len {
                    divs.push(divs[i] * pe);
                }
            }
        }
        divs
    }
}

/// All integral points of `q = m` with Euclidean (or sup-norm) height at most
/// `radius`, in lexicographic order.
pub fn enumerate_integral(
    inst: &QuadricInstance,
    radius: i64,
    euclidean: bool,
    mut visit: impl FnMut(IntegralPoint),
) -> Result<()> {
    if radius <= 0 {
        return Err(Error::InvalidInput("radius must be positive".into()));
    }
    let bounds = if euclidean {
        LatticeBounds::ball(inst.form.dim(), radius)
    } else {
        LatticeBounds::sup(inst.form.dim(), radius)
    };
    enumerate_lattice(&inst.form, inst.m, &bounds, |y| {
        visit(IntegralPoint::integral(y.to_vec(), Provenance::FastScan))
    });
    Ok(())
}

/// Collect variant of [`enumerate_integral`].
pub fn enumerate_integral_collect(
    inst: &QuadricInstance,
    radius: i64,
    euclidean: bool,
) -> Result<Vec<IntegralPoint>> {
    let mut out = Vec::new();
    enumerate_integral(inst, radius, euclidean, |p| out.push(p))?;
    Ok(out)
}

/// The scaled target `p0^(2h) * m` as i64, guarding overflow.
pub fn scaled_target(inst: &QuadricInstance) -> Result<i64> {
    let p0 = inst.p0.ok_or_else(|| Error::InvalidInput("instance has no p0".into()))?;
    let scale = (p0 as i128).checked_pow(2 * inst.h).ok_or_else(|| {
        Error::InvalidInput("p0^(2h) overflows".into())
    })?;
    i64::try_from(scale * inst.m as i128)
        .map_err(|_| Error::InvalidInput("p0^(2h)*m exceeds i64".into()))
}

/// Points of `q = m` over `Z[1/p0]` with `p0`-adic height at most `p0^h`,
/// inside the instance region, via `y = p0^h x` on the rescaled quadric
/// `q = p0^(2h) m` in the scaled box.
pub fn enumerate_s_integral(
    inst: &QuadricInstance,
    mut visit: impl FnMut(IntegralPoint),
) -> Result<()> {
    let p0 = inst.p0.ok_or_else(|| Error::InvalidInput("instance has no p0".into()))?;
    let region = inst
        .region
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("instance has no region".into()))?;
    let target = scaled_target(inst)?;
    let scale = (p0 as i128).pow(inst.h) as u64;
    let bounds = LatticeBounds::from_box(region, scale)?;
    enumerate_lattice(&inst.form, target, &bounds, |y| {
        visit(IntegralPoint::reduced(y.to_vec(), p0, inst.h, Provenance::FastScan))
    });
    Ok(())
}

pub fn enumerate_s_integral_collect(inst: &QuadricInstance) -> Result<Vec<IntegralPoint>> {
    let mut out = Vec::new();
    enumerate_s_integral(inst, |p| out.push(p))?;
    Ok(out)
}

/// Full-box reference oracle: scans every candidate tuple and keeps exact
/// solutions. Errors when the candidate count exceeds `cap`.
pub fn naive_oracle(
    q: &QuadraticForm,
    target: i64,
    bounds: &LatticeBounds,
    cap: u128,
    mut visit: impl FnMut(IntegralPoint),
) -> Result<()> {
    let count = bounds.candidate_count();
    if count > cap {
        return Err(Error::BoxTooLarge { needed: count, cap });
    }
    let n = q.dim();
    let mut x = vec![0i64; n];
    fn rec(
        q: &QuadraticForm,
        target: i64,
        bounds: &LatticeBounds,
        x: &mut Vec<i64>,
        depth: usize,
        visit: &mut impl FnMut(IntegralPoint),
    ) {
        if depth == x.len() {
            let xi: Vec<i128> = x.iter().map(|&c| c as i128).collect();
            let sumsq: i128 = xi.iter().map(|c| c * c).sum();
            if q.eval_i128(&xi) == target as i128 && within_euclid(bounds, sumsq) {
                visit(IntegralPoint::integral(x.clone(), Provenance::NaiveOracle));
            }
            return;
        }
        let (lo, hi) = bounds.axis[depth];
        for v in lo..=hi {
            x[depth] = v;
            rec(q, target, bounds, x, depth + 1, visit);
        }
        x[depth] = 0;
    }
    rec(q, target, bounds, &mut x, 0, &mut visit);
    Ok(())
}

pub fn naive_oracle_collect(
    q: &QuadraticForm,
    target: i64,
    bounds: &LatticeBounds,
    cap: u128,
) -> Result<Vec<IntegralPoint>> {
    let mut out = Vec::new();
    naive_oracle(q, target, bounds, cap, |p| out.push(p))?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::QuadraticForm;

    fn inst(diag: &[i64], m: i64) -> QuadricInstance {
        QuadricInstance::new(QuadraticForm::diagonal(diag).unwrap(), m).unwrap()
    }

    #[test]
    fn heights() {
        let p = IntegralPoint::integral(vec![3, 4], Provenance::FastScan);
        assert_eq!(height_real(&p), 5.0);
        let p = IntegralPoint::integral(vec![1, 1, 1, 1], Provenance::FastScan);
        assert_eq!(height_real(&p), 2.0);
        let z = IntegralPoint::integral(vec![0, 0], Provenance::FastScan);
        assert_eq!(height_real(&z), 0.0);
    }

    #[test]
    fn padic_heights() {
        let p = IntegralPoint::integral(vec![1, 2, 3], Provenance::FastScan);
        assert_eq!(height_padic(&p, 5).unwrap(), 0);
        let p = IntegralPoint::reduced(vec![1, 10, 15], 5, 1, Provenance::FastScan);
        assert_eq!(height_padic(&p, 5).unwrap(), 1);
        // (1/4, 1/2, 8) at p0 = 2: exponent 2
        let p = IntegralPoint::reduced(vec![1, 2, 32], 2, 2, Provenance::FastScan);
        assert_eq!(height_padic(&p, 2).unwrap(), 2);
        // integral point divisible by p0 has negative exponent
        let p = IntegralPoint::integral(vec![4, 8], Provenance::FastScan);
        assert_eq!(height_padic(&p, 2).unwrap(), -2);
    }

    #[test]
    fn unit_sphere_minimal_vectors() {
        let pts = enumerate_integral_collect(&inst(&[1, 1, 1, 1], 1), 1, true).unwrap();
        assert_eq!(pts.len(), 8);
        for p in &pts {
            assert_eq!(p.num.iter().map(|c| c * c).sum::<i64>(), 1);
        }
    }

    #[test]
    fn four_squares_of_six() {
        // r_4(6) = 96; all representations lie within Euclidean height sqrt(6) <= 3.
        let pts = enumerate_integral_collect(&inst(&[1, 1, 1, 1], 6), 3, true).unwrap();
        assert_eq!(pts.len(), 96);
    }

    #[test]
    fn isotropic_slice() {
        let pts = enumerate_integral_collect(&inst(&[1, 1, 1, -1], 1), 1, true).unwrap();
        // (±e1, ±e2, ±e3): w = 0 on the unit sphere slice.
        assert_eq!(pts.len(), 6);
    }

    #[test]
    fn two_squares_of_25() {
        let q = QuadraticForm::diagonal(&[1, 1]).unwrap();
        let bounds = LatticeBounds::ball(2, 5);
        let pts = naive_oracle_collect(&q, 25, &bounds, 1 << 20).unwrap();
        assert_eq!(pts.len(), 12);
        let fast = enumerate_integral_collect(&inst(&[1, 1], 25), 5, true).unwrap();
        assert_eq!(fast.len(), 12);
    }

    #[test]
    fn fast_matches_oracle_small_grid() {
        for diag in [[1i64, 1, 1], [1, 1, -1], [2, -3, 1], [1, -1, -1], [3, 2, 5]] {
            for m in [-4i64, -1, 1, 2, 5, 12] {
                let i = inst(&diag, m);
                let fast = enumerate_integral_collect(&i, 6, true).unwrap();
                let oracle = naive_oracle_collect(&i.form, m, &LatticeBounds::ball(3, 6), 1 << 24)
                    .unwrap();
                assert_eq!(fast, oracle, "diag {diag:?} m {m}");
            }
        }
    }

    #[test]
    fn fast_matches_oracle_nondiagonal() {
        let q = QuadraticForm::from_gram(vec![
            vec![1, 1, 0],
            vec![1, 3, -1],
            vec![0, -1, 2],
        ])
        .unwrap();
        let i = QuadricInstance::new(q, 4).unwrap();
        let fast = enumerate_integral_collect(&i, 5, true).unwrap();
        let oracle =
            naive_oracle_collect(&i.form, 4, &LatticeBounds::ball(3, 5), 1 << 24).unwrap();
        assert_eq!(fast, oracle);
    }

    #[test]
    fn s_integral_h0_reduces_to_integral() {
        let region = RationalBox::symmetric(Rat::new(3.into(), 2.into()), 4).unwrap();
        let i = inst(&[1, 1, 1, 1], 1)
            .with_denominator_prime(2, 0)
            .unwrap()
            .with_region(region)
            .unwrap();
        let pts = enumerate_s_integral_collect(&i).unwrap();
        assert_eq!(pts.len(), 8);
        assert!(pts.iter().all(|p| p.den_pow == 0));
    }

    #[test]
    fn s_integral_h1_counts_r4_of_4() {
        let region = RationalBox::symmetric(Rat::new(3.into(), 2.into()), 4).unwrap();
        let i = inst(&[1, 1, 1, 1], 1)
            .with_denominator_prime(2, 1)
            .unwrap()
            .with_region(region)
            .unwrap();
        let pts = enumerate_s_integral_collect(&i).unwrap();
        // y on q = 4 with |y_i| <= 3: r_4(4) = 24 representations.
        assert_eq!(pts.len(), 24);
        // Integral representatives like (±1,0,0,0) come out reduced.
        assert!(pts.iter().any(|p| p.den_pow == 0));
    }

    #[test]
    fn s_integral_p3_example() {
        let region = RationalBox::symmetric(Rat::from_integer(2.into()), 3).unwrap();
        let i = inst(&[1, 1, 1], 2)
            .with_denominator_prime(3, 1)
            .unwrap()
            .with_region(region)
            .unwrap();
        let pts = enumerate_s_integral_collect(&i).unwrap();
        let q = QuadraticForm::diagonal(&[1, 1, 1]).unwrap();
        let oracle = naive_oracle_collect(&q, 18, &LatticeBounds::sup(3, 6), 1 << 24).unwrap();
        assert_eq!(pts.len(), oracle.len());
    }

    #[test]
    fn monotone_in_radius() {
        let i = inst(&[1, 1, -1], 2);
        let mut last = 0;
        for radius in [2i64, 4, 8, 16] {
            let c = enumerate_integral_collect(&i, radius, true).unwrap().len();
            assert!(c >= last);
            last = c;
        }
    }

    #[test]
    fn empty_solution_set() {
        // x^2 + y^2 = 3 has no integral points.
        let pts = enumerate_integral_collect(&inst(&[1, 1], 3), 10, true).unwrap();
        assert!(pts.is_empty());
    }

    #[test]
    fn oracle_cap_enforced() {
        let q = QuadraticForm::diagonal(&[1, 1, 1]).unwrap();
        let err = naive_oracle_collect(&q, 1, &LatticeBounds::ball(3, 2000), 1000).unwrap_err();
        assert!(matches!(err, Error::BoxTooLarge { .. }));
    }

    #[test]
    fn lexicographic_order() {
        let pts = enumerate_integral_collect(&inst(&[1, 1, 1, -1], 1), 4, true).unwrap();
        let mut sorted = pts.clone();
        sorted.sort();
        assert_eq!(pts, sorted);
    }
}
