//! Reductions mod `p^k` and exact point counts over prime fields and
//! prime-power rings, for the quadric and for codimension-two slices.
//!
//! Counting strategy for `#{x mod p^k : q(x) = m}`:
//!
//! * full scan whenever `p^(kn)` fits the budget;
//! * odd `p` with `p ∤ det`: closed lifting — every solution away from the
//!   singular point `0` is smooth and multiplies by `p^(n-1)` per level, and
//!   the `x ≡ 0 (mod p)` branch descends to the target `m / p^2`;
//! * `p = 2` with odd diagonal Gram: primitive solutions are counted from a
//!   fixed mod-4 pattern census (odd square roots exist 4-to-1 exactly for
//!   targets `≡ a_i mod 8`), and the even branch descends as above;
//! * everything else: a lift-tree walk keeping singular residue classes
//!   explicit (smooth classes collapse analytically), capped and surfaced as
//!   `CapExceeded` / `NotStabilized` rather than approximated.

use crate::arith::{legendre_big, pow_big, pow_u128, val_big};
use crate::enumerate::IntegralPoint;
use crate::error::Error;
use crate::forms::QuadraticForm;
use crate::poly::Poly;
use crate::{Int, Result};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

/// Scan and lift-tree budgets.
#[derive(Debug, Clone)]
pub struct CountBudget {
    /// Cap on scanned candidate tuples `p^(kn)`.
    pub scan_cap: u128,
    /// Cap on explicit residue classes kept by the lift tree.
    pub class_cap: usize,
}

impl Default for CountBudget {
    fn default() -> Self {
        CountBudget { scan_cap: 100_000_000, class_cap: 2_000_000 }
    }
}

/// A point with coordinates in `[0, p^k)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ResiduePoint {
    pub p: u64,
    pub k: u32,
    pub coords: Vec<u64>,
}

impl ResiduePoint {
    pub fn modulus(&self) -> u64 {
        pow_u128(self.p, self.k) as u64
    }

    /// Does this residue lie on `q = m` mod `p^k`?
    pub fn on_quadric(&self, q: &QuadraticForm, m: i64) -> bool {
        let md = self.modulus();
        eval_mod(q, &self.coords, md) == (m.rem_euclid(md as i64)) as u64
    }
}

/// Coordinatewise reduction of a point mod `p^k`; denominators prime to `p`
/// are inverted, a `p`-divisible denominator is an error.
pub fn reduce_point(x: &IntegralPoint, p: u64, k: u32) -> Result<ResiduePoint> {
    if x.den_pow > 0 && x.p0 == p {
        return Err(Error::DenominatorDivisibleByP(p));
    }
    let md = checked_pow_u128(p, k)
        .filter(|&v| v <= u64::MAX as u128)
        .ok_or_else(|| Error::InvalidInput("modulus exceeds u64".into()))? as u64;
    let den = if x.den_pow == 0 {
        1u64
    } else {
        let mut d: u64 = 1;
        for _ in 0..x.den_pow {
            d = (d as u128 * x.p0 as u128 % md as u128) as u64;
        }
        d
    };
    let den_inv = crate::arith::inv_mod(den as i128, md as i128) as u64;
    let coords = x
        .num
        .iter()
        .map(|&c| {
            let r = (c.rem_euclid(md as i64)) as u128;
            (r * den_inv as u128 % md as u128) as u64
        })
        .collect();
    Ok(ResiduePoint { p, k, coords })
}

fn eval_mod(q: &QuadraticForm, x: &[u64], modulus: u64) -> u64 {
    let n = q.dim();
    let md = modulus as u128;
    let mut acc: u128 = 0;
    for i in 0..n {
        let mut row: u128 = 0;
        for j in 0..n {
            let g = (q.gram()[i][j].rem_euclid(modulus as i64)) as u128;
            row = (row + g * (x[j] as u128)) % md;
        }
        acc = (acc + row * (x[i] as u128)) % md;
    }
    acc as u64
}

fn gradient_mod(q: &QuadraticForm, x: &[u64], modulus: u64) -> Vec<u64> {
    let n = q.dim();
    let md = modulus as u128;
    (0..n)
        .map(|i| {
            let mut row: u128 = 0;
            for j in 0..n {
                let g = (q.gram()[i][j].rem_euclid(modulus as i64)) as u128;
                row = (row + g * (x[j] as u128)) % md;
            }
            (row * 2 % md) as u64
        })
        .collect()
}

/// Codimension-two slice data: two integer polynomials cutting `Z = X ∩ (f = g = 0)`.
/// Proportional pairs are rejected; full coprimality is the caller's assertion
/// (checked only heuristically, and flagged, not proven).
#[derive(Debug, Clone)]
pub struct SubvarietySpec {
    pub f: Poly,
    pub g: Poly,
}

impl SubvarietySpec {
    pub fn new(f: Poly, g: Poly) -> Result<Self> {
        if f.is_zero() || g.is_zero() {
            return Err(Error::InvalidInput("subvariety polynomials must be nonzero".into()));
        }
        if Self::proportional(&f, &g) {
            return Err(Error::InvalidInput(
                "subvariety polynomials are proportional (advisory coprimality check)".into(),
            ));
        }
        Ok(SubvarietySpec { f, g })
    }

    fn proportional(f: &Poly, g: &Poly) -> bool {
        if f.terms.len() != g.terms.len() {
            return false;
        }
        // Terms are sorted by exponent vector; cross-multiply coefficients.
        let (a, b) = (f.terms[0].coeff as i128, g.terms[0].coeff as i128);
        f.terms.iter().zip(&g.terms).all(|(tf, tg)| {
            tf.exponents == tg.exponents && tf.coeff as i128 * b == tg.coeff as i128 * a
        })
    }
}

/// `p^k` as u128, None on overflow.
fn checked_pow_u128(p: u64, k: u32) -> Option<u128> {
    (p as u128).checked_pow(k)
}

fn check_scan(p: u64, k: u32, n: usize, cap: u128) -> Result<u64> {
    let md = checked_pow_u128(p, k).ok_or(Error::CapExceeded { needed: u128::MAX, cap })?;
    let total = md.checked_pow(n as u32).ok_or(Error::CapExceeded { needed: u128::MAX, cap })?;
    if total > cap {
        return Err(Error::CapExceeded { needed: total, cap });
    }
    if md > (1u128 << 62) {
        return Err(Error::InvalidInput("modulus exceeds u64 range".into()));
    }
    Ok(md as u64)
}

/// `#{x in F_p^n : q(x) = m}` by full scan.
pub fn count_quadric_ffield_brute(
    q: &QuadraticForm,
    m: i64,
    p: u64,
    budget: &CountBudget,
) -> Result<u64> {
    let hist = count_quadric_ffield_brute_all(q, p, budget)?;
    Ok(hist[(m.rem_euclid(p as i64)) as usize])
}

/// Value histogram of `q` over `F_p^n` in one scan: entry `r` counts
/// `#{x : q(x) = r}`.
pub fn count_quadric_ffield_brute_all(
    q: &QuadraticForm,
    p: u64,
    budget: &CountBudget,
) -> Result<Vec<u64>> {
    let md = check_scan(p, 1, q.dim(), budget.scan_cap)?;
    scan_histogram(q, md)
}

/// Same histogram over `(Z/p^k)^n`.
pub fn count_prime_power_histogram(
    q: &QuadraticForm,
    p: u64,
    k: u32,
    budget: &CountBudget,
) -> Result<Vec<u64>> {
    let md = check_scan(p, k, q.dim(), budget.scan_cap)?;
    scan_histogram(q, md)
}

fn scan_histogram(q: &QuadraticForm, md: u64) -> Result<Vec<u64>> {
    let n = q.dim();
    let g = q.gram();
    let mdw = md as u128;
    let mut hist = vec![0u64; md as usize];
    // Depth-first with running partial value and row dot products.
    // At depth d the value accumulated is q(x_1..x_d, 0, .., 0).
    let sq_last: Vec<u64> = (0..md)
        .map(|c| {
            let cc = c as u128;
            (((g[n - 1][n - 1].rem_euclid(md as i64)) as u128) * cc % mdw * cc % mdw) as u64
        })
        .collect();
    let mut x = vec![0u64; n];
    fn rec(
        q: &QuadraticForm,
        md: u64,
        x: &mut Vec<u64>,
        depth: usize,
        partial: u64,
        sq_last: &[u64],
        hist: &mut [u64],
    ) {
        let n = q.dim();
        let mdw = md as u128;
        if depth == n - 1 {
            // dot = sum_j<d g[d][j] x_j; value = partial + g_dd c^2 + 2 c dot
            let mut dot: u128 = 0;
            for j in 0..depth {
                let gg = (q.gram()[depth][j].rem_euclid(md as i64)) as u128;
                dot = (dot + gg * x[j] as u128) % mdw;
            }
            let dot2 = dot * 2 % mdw;
            for c in 0..md {
                let v = (partial as u128 + sq_last[c as usize] as u128 + dot2 * c as u128) % mdw;
                hist[v as usize] += 1;
            }
            return;
        }
        let gd = (q.gram()[depth][depth].rem_euclid(md as i64)) as u128;
        let mut dot: u128 = 0;
        for j in 0..depth {
            let gg = (q.gram()[depth][j].rem_euclid(md as i64)) as u128;
            dot = (dot + gg * x[j] as u128) % mdw;
        }
        let dot2 = dot * 2 % mdw;
        for c in 0..md {
            let cc = c as u128;
            let val = (partial as u128 + gd * cc % mdw * cc % mdw + dot2 * cc % mdw) % mdw;
            x[depth] = c;
            rec(q, md, x, depth + 1, val as u64, sq_last, hist);
        }
        x[depth] = 0;
    }
    rec(q, md, &mut x, 0, 0, &sq_last, &mut hist);
    Ok(hist)
}

/// Closed-form count over `F_p` for odd `p` with `p ∤ det`, via the quadratic
/// character of the discriminant. Errors with `BadPrime` at `p = 2` or `p | det`.
pub fn count_quadric_ffield_exact(q: &QuadraticForm, m: i64, p: u64) -> Result<Int> {
    count_quadric_ffield_exact_big(q, &Int::from(m), p)
}

/// Same closed form with a big-integer target.
pub fn count_quadric_ffield_exact_big(q: &QuadraticForm, m: &Int, p: u64) -> Result<Int> {
    if p == 2 || val_big(q.det(), p) > 0 {
        return Err(Error::BadPrime(p));
    }
    let n = q.dim() as u32;
    let chi_det = q.det().clone();
    let pk = |e: u32| pow_big(p, e);
    let m_is_zero = m.mod_floor(&Int::from(p)).is_zero();
    if n % 2 == 1 {
        if m_is_zero {
            Ok(pk(n - 1))
        } else {
            let sign_exp = ((n - 1) / 2) % 2;
            let mut arg = m * &chi_det;
            if sign_exp == 1 {
                arg = -arg;
            }
            let chi = legendre_big(&arg, p);
            Ok(pk(n - 1) + Int::from(chi) * pk((n - 1) / 2))
        }
    } else {
        let sign_exp = (n / 2) % 2;
        let mut arg = chi_det;
        if sign_exp == 1 {
            arg = -arg;
        }
        let chi = Int::from(legendre_big(&arg, p));
        if m_is_zero {
            Ok(pk(n - 1) + (Int::from(p) - Int::one()) * chi * pk(n / 2 - 1))
        } else {
            Ok(pk(n - 1) - chi * pk(n / 2 - 1))
        }
    }
}

/// `#{x in F_p^n : q(x) = m, f(x) = 0, g(x) = 0}` by scan.
pub fn count_subvariety_ffield(
    spec: &SubvarietySpec,
    q: &QuadraticForm,
    m: i64,
    p: u64,
    budget: &CountBudget,
) -> Result<u64> {
    let md = check_scan(p, 1, q.dim(), budget.scan_cap)?;
    let n = q.dim();
    let target = (m.rem_euclid(md as i64)) as u64;
    let mut count = 0u64;
    let mut x = vec![0u64; n];
    loop {
        if eval_mod(q, &x, md) == target
            && spec.f.eval_mod(&x, md) == 0
            && spec.g.eval_mod(&x, md) == 0
        {
            count += 1;
        }
        // odometer
        let mut d = 0;
        loop {
            if d == n {
                return Ok(count);
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

/// `#{x mod p^k : q(x) ≡ m}`, dispatching per the module strategy.
pub fn count_prime_power(
    q: &QuadraticForm,
    m: &Int,
    p: u64,
    k: u32,
    budget: &CountBudget,
) -> Result<Int> {
    if m.is_zero() {
        return Err(Error::InvalidInput("m must be nonzero".into()));
    }
    if k == 0 {
        return Ok(Int::one());
    }
    let n = q.dim() as u32;
    // Scan path.
    if let Some(md) = checked_pow_u128(p, k) {
        if let Some(t) = md.checked_pow(n) {
            if t <= budget.scan_cap && md <= (1 << 62) {
                let hist = scan_histogram(q, md as u64)?;
                let target = m.mod_floor(&Int::from(md as u64)).to_u64().unwrap();
                return Ok(Int::from(hist[target as usize]));
            }
        }
    }
    if p % 2 == 1 && val_big(q.det(), p) == 0 {
        return count_odd_good(q, m, p, k);
    }
    if p == 2 && q.is_diagonal_gram() && val_big(q.det(), 2) == 0 {
        return count_two_diagonal(q, m, k);
    }
    count_lift_tree(q, m, p, k, budget)
}

/// Odd `p`, `p ∤ det`: smooth collapse plus descent on the `x ≡ 0` branch.
fn count_odd_good(q: &QuadraticForm, m: &Int, p: u64, k: u32) -> Result<Int> {
    if k == 0 {
        return Ok(Int::one());
    }
    let n = q.dim() as u32;
    let v = val_big(m, p);
    let n1 = count_quadric_ffield_exact_big(q, m, p)?;
    if v == 0 {
        // Every mod-p solution is smooth (gradient 2Gx vanishes only at x = 0,
        // which is off the quadric when p ∤ m).
        return Ok(n1 * pow_big(p, (k - 1) * (n - 1)));
    }
    // p | m: the origin is the unique singular mod-p solution.
    let smooth1 = n1 - Int::one();
    let smooth_part = smooth1 * pow_big(p, (k - 1) * (n - 1));
    let singular_part = if k == 1 {
        Int::one()
    } else if v < 2 {
        Int::zero()
    } else {
        let m_shifted = m / pow_big(p, 2);
        let inner = if k >= 3 {
            count_odd_good(q, &m_shifted, p, k - 2)?
        } else {
            Int::one() // k = 2: all p^n lifts of 0 work; inner count at k = 0
        };
        pow_big(p, n) * inner
    };
    Ok(smooth_part + singular_part)
}

/// `p = 2`, odd diagonal Gram: primitive census mod 4 plus descent.
fn count_two_diagonal(q: &QuadraticForm, m: &Int, k: u32) -> Result<Int> {
    if k == 0 {
        return Ok(Int::one());
    }
    let n = q.dim() as u32;
    if k <= 2 {
        let md = 1u64 << k;
        let hist = scan_histogram(q, md)?;
        let target = m.mod_floor(&Int::from(md)).to_u64().unwrap();
        return Ok(Int::from(hist[target as usize]));
    }
    let diag = q.diagonal_entries().expect("diagonal Gram");
    let m8 = m.mod_floor(&Int::from(8u8)).to_i64().unwrap();
    let prim = primitive_census(&diag, m8) * pow_big(2, (k - 2) * (n - 1));
    let v = val_big(m, 2);
    let even_branch = if v < 2 {
        Int::zero()
    } else {
        let m_shifted = m / Int::from(4);
        pow_big(2, n) * count_two_diagonal(q, &m_shifted, k - 2)?
    };
    Ok(prim + even_branch)
}

/// `#{y mod 4^(n-1) pattern census}`: counts primitive solutions mod `2^k`
/// per `2^((k-2)(n-1))`, valid for `k >= 3`. For each pivot `i` (the first odd
/// coordinate), odd square roots of `t/a_i` exist mod `2^k` exactly when
/// `t ≡ a_i (mod 8)`, four of them.
fn primitive_census(diag: &[i64], m8: i64) -> Int {
    let n = diag.len();
    let mut total = Int::zero();
    for i in 0..n {
        let mut c_i: u64 = 0;
        // Y ranges over (Z/4)^(n-1): even before the pivot, free after.
        let rest: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        let count = 4u64.pow((n - 1) as u32);
        for code in 0..count {
            let mut cc = code;
            let mut sum: i64 = 0;
            let mut ok = true;
            for &j in &rest {
                let y = (cc % 4) as i64;
                cc /= 4;
                if j < i && y % 2 != 0 {
                    ok = false;
                    break;
                }
                sum = (sum + diag[j] * y * y).rem_euclid(8);
            }
            if ok && (m8 - sum - diag[i]).rem_euclid(8) == 0 {
                c_i += 1;
            }
        }
        total += Int::from(4u64 * c_i);
    }
    total
}

/// Lift-tree walk for bad primes: singular residue classes stay explicit,
/// smooth ones collapse by `p^(n-1)` per level (odd `p` only; at `p = 2`
/// every class is kept explicit).
fn count_lift_tree(q: &QuadraticForm, m: &Int, p: u64, k: u32, budget: &CountBudget) -> Result<Int> {
    let n = q.dim();
    let level1 = (p as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if level1 > budget.scan_cap {
        return Err(Error::CapExceeded { needed: level1, cap: budget.scan_cap });
    }
    if checked_pow_u128(p, k).map_or(true, |v| v > (1 << 62)) {
        return Err(Error::InvalidInput("lift tree modulus exceeds u64".into()));
    }
    let m_mod = |modulus: u64| -> u64 { m.mod_floor(&Int::from(modulus)).to_u64().unwrap() };

    // Level 1 by scan.
    let mut smooth = Int::zero();
    let mut explicit: Vec<Vec<u64>> = Vec::new();
    {
        let target = m_mod(p);
        let mut x = vec![0u64; n];
        loop {
            if eval_mod(q, &x, p) == target {
                let grad = gradient_mod(q, &x, p);
                if p != 2 && grad.iter().any(|&gv| gv != 0) {
                    smooth += Int::one();
                } else {
                    explicit.push(x.clone());
                }
            }
            let mut d = 0;
            loop {
                if d == n {
                    // done scanning
                    break;
                }
                x[d] += 1;
                if x[d] < p {
                    break;
                }
                x[d] = 0;
                d += 1;
            }
            if d == n {
                break;
            }
        }
    }

    let growth = pow_big(p, (n - 1) as u32);
    for j in 1..k {
        smooth *= &growth;
        let next_mod = pow_u128(p, j + 1) as u64;
        let step = pow_u128(p, j) as u64;
        let target = m_mod(next_mod);
        let mut next: Vec<Vec<u64>> = Vec::new();
        for y in &explicit {
            // Survival is representative-independent for singular classes.
            if eval_mod(q, y, next_mod) != target {
                continue;
            }
            // Spawn all p^n children.
            let kids = pow_u128(p, n as u32);
            if next.len() + kids as usize > budget.class_cap {
                return Err(Error::CapExceeded {
                    needed: (next.len() as u128) + kids,
                    cap: budget.class_cap as u128,
                });
            }
            let mut t = vec![0u64; n];
            loop {
                let child: Vec<u64> = y
                    .iter()
                    .zip(&t)
                    .map(|(&c, &ti)| c + ti * step)
                    .collect();
                next.push(child);
                let mut d = 0;
                loop {
                    if d == n {
                        break;
                    }
                    t[d] += 1;
                    if t[d] < p {
                        break;
                    }
                    t[d] = 0;
                    d += 1;
                }
                if d == n {
                    break;
                }
            }
        }
        explicit = next;
    }
    Ok(smooth + Int::from(explicit.len() as u64))
}

/// `#{x mod p^k : q(x) ≡ m, x ≡ xi mod p^e}` — the fiber of a congruence
/// class. `xi` has coordinates mod `p^e`, `e >= 1`, `k >= e`.
pub fn count_prime_power_in_class(
    q: &QuadraticForm,
    m: &Int,
    p: u64,
    k: u32,
    xi: &[u64],
    e: u32,
    budget: &CountBudget,
) -> Result<Int> {
    let n = q.dim();
    if e == 0 || k < e {
        return Err(Error::InvalidInput("need 1 <= e <= k".into()));
    }
    let mod_e = checked_pow_u128(p, e).filter(|&v| v <= (1 << 62));
    let mod_k = checked_pow_u128(p, k).filter(|&v| v <= (1 << 62));
    let (mod_e, _) = match (mod_e, mod_k) {
        (Some(a), Some(b)) => (a as u64, b),
        _ => return Err(Error::InvalidInput("modulus exceeds u64".into())),
    };
    let me = m.mod_floor(&Int::from(mod_e)).to_u64().unwrap();
    if eval_mod(q, xi, mod_e) != me {
        return Ok(Int::zero());
    }
    let grad = gradient_mod(q, xi, p);
    let smooth = p != 2 && grad.iter().any(|&gv| gv != 0);
    if smooth {
        // One smooth class lifts p^(n-1)-fold per level, unconditionally.
        return Ok(pow_big(p, (k - e) * (n as u32 - 1)));
    }
    // Explicit walk from the single class.
    let mut smooth_acc = Int::zero();
    let mut explicit: Vec<Vec<u64>> = vec![xi.to_vec()];
    let growth = pow_big(p, (n - 1) as u32);
    for j in e..k {
        smooth_acc *= &growth;
        let next_mod = pow_u128(p, j + 1) as u64;
        let step = pow_u128(p, j) as u64;
        let target = m.mod_floor(&Int::from(next_mod)).to_u64().unwrap();
        let mut next: Vec<Vec<u64>> = Vec::new();
        for y in &explicit {
            if p != 2 {
                let g1 = gradient_mod(q, y, p);
                if g1.iter().any(|&gv| gv != 0) {
                    // Smooth class encountered below a singular start (possible
                    // only when e = 1 scan seeded singular; defensive).
                    smooth_acc += Int::one();
                    continue;
                }
            }
            if eval_mod(q, y, next_mod) != target {
                continue;
            }
            let kids = pow_u128(p, n as u32);
            if next.len() + kids as usize > budget.class_cap {
                return Err(Error::CapExceeded {
                    needed: (next.len() as u128) + kids,
                    cap: budget.class_cap as u128,
                });
            }
            let mut t = vec![0u64; n];
            loop {
                next.push(y.iter().zip(&t).map(|(&c, &ti)| c + ti * step).collect());
                let mut d = 0;
                loop {
                    if d == n {
                        break;
                    }
                    t[d] += 1;
                    if t[d] < p {
                        break;
                    }
                    t[d] = 0;
                    d += 1;
                }
                if d == n {
                    break;
                }
            }
        }
        explicit = next;
    }
    Ok(smooth_acc + Int::from(explicit.len() as u64))
}
