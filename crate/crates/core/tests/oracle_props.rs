//! Oracle-backed property tests: every fast path is checked against an
//! independent naive reference on a deterministic grid, plus randomized
//! algebraic identities.

use num_bigint::BigInt;
use num_rational::BigRational;
use quadrics_core::arith::primes_upto;
use quadrics_core::enumerate::{
    enumerate_integral_collect, enumerate_s_integral_collect, naive_oracle_collect, LatticeBounds,
};
use quadrics_core::forms::{
    hilbert_symbol, is_isotropic_local, Place, QuadraticForm, QuadricInstance, RationalBox,
};
use quadrics_core::modular::{
    count_quadric_ffield_brute_all, count_quadric_ffield_exact, count_subvariety_ffield,
    CountBudget, SubvarietySpec,
};
use quadrics_core::oracles::{isotropic_brute, TestRng};
use quadrics_core::poly::Poly;
use quadrics_core::Rat;

fn rat(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

/// Sorted nonzero coefficient tuples with |a_i| <= bound (isotropy is
/// invariant under coordinate permutation).
fn sorted_tuples(n: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut values: Vec<i64> = (-bound..=bound).filter(|&v| v != 0).collect();
    values.sort_unstable();
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(n);
    fn rec(values: &[i64], start: usize, n: usize, current: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if current.len() == n {
            out.push(current.clone());
            return;
        }
        for i in start..values.len() {
            current.push(values[i]);
            rec(values, i, n, current, out);
            current.pop();
        }
    }
    rec(&values, 0, n, &mut current, &mut out);
    out
}

#[test]
fn isotropy_matches_lift_certify_oracle() {
    // Binary and ternary forms over the stated prime panel, full sorted grid.
    for n in [2usize, 3] {
        for diag in sorted_tuples(n, 10) {
            let q = QuadraticForm::diagonal(&diag).unwrap();
            for &p in &[2u64, 3, 5, 7, 11] {
                let fast = is_isotropic_local(&q, Place::Finite(p));
                let brute = isotropic_brute(&q, p);
                assert_eq!(fast, brute, "diag {diag:?} p {p}");
            }
        }
    }
}

#[test]
fn isotropy_matches_oracle_quaternary_sample() {
    // Quaternary: full sorted grid at small height plus a deterministic
    // random sample across the full coefficient range.
    for diag in sorted_tuples(4, 4) {
        let q = QuadraticForm::diagonal(&diag).unwrap();
        for &p in &[2u64, 3, 5, 7, 11] {
            assert_eq!(
                is_isotropic_local(&q, Place::Finite(p)),
                isotropic_brute(&q, p),
                "diag {diag:?} p {p}"
            );
        }
    }
    let mut rng = TestRng::new(0x5eed);
    for _ in 0..120 {
        let diag: Vec<i64> = (0..4).map(|_| rng.nonzero(10)).collect();
        let q = QuadraticForm::diagonal(&diag).unwrap();
        for &p in &[2u64, 3, 5, 7, 11] {
            assert_eq!(
                is_isotropic_local(&q, Place::Finite(p)),
                isotropic_brute(&q, p),
                "diag {diag:?} p {p}"
            );
        }
    }
}

#[test]
fn hilbert_bimultiplicative() {
    let mut rng = TestRng::new(0x601d);
    let places = [Place::Real, Place::Finite(2), Place::Finite(3), Place::Finite(5), Place::Finite(7)];
    for v in places {
        for _ in 0..200 {
            let a = rat(rng.nonzero(500));
            let a2 = rat(rng.nonzero(500));
            let b = rat(rng.nonzero(500));
            let lhs = hilbert_symbol(&(a.clone() * a2.clone()), &b, v).unwrap();
            let rhs = hilbert_symbol(&a, &b, v).unwrap() * hilbert_symbol(&a2, &b, v).unwrap();
            assert_eq!(lhs, rhs, "a={a} a'={a2} b={b} v={v}");
            // Symmetry comes along for free.
            assert_eq!(
                hilbert_symbol(&a, &b, v).unwrap(),
                hilbert_symbol(&b, &a, v).unwrap()
            );
        }
    }
}

#[test]
fn hilbert_product_formula() {
    let mut rng = TestRng::new(424242);
    for _ in 0..200 {
        let a = rng.nonzero(2000);
        let b = rng.nonzero(2000);
        let mut prod = hilbert_symbol(&rat(a), &rat(b), Place::Real).unwrap();
        let support = BigInt::from(2 * a * b);
        for (p, _) in quadrics_core::sieve::factorize_big(&support) {
            use num_traits::ToPrimitive;
            let p = p.to_u64().unwrap();
            prod *= hilbert_symbol(&rat(a), &rat(b), Place::Finite(p)).unwrap();
        }
        assert_eq!(prod, 1, "a={a} b={b}");
    }
}

#[test]
fn enumeration_matches_oracle_random_instances() {
    let mut rng = TestRng::new(20_240_817);
    let budget = 1u128 << 26;
    for _ in 0..100 {
        let n = 3 + (rng.next_u64() % 2) as usize;
        let diag: Vec<i64> = (0..n).map(|_| rng.nonzero(5)).collect();
        let m = rng.nonzero(20);
        let radius = 2 + (rng.next_u64() % 7) as i64;
        let q = QuadraticForm::diagonal(&diag).unwrap();
        let inst = QuadricInstance::new(q.clone(), m).unwrap();
        let fast = enumerate_integral_collect(&inst, radius, true).unwrap();
        let naive =
            naive_oracle_collect(&q, m, &LatticeBounds::ball(n, radius), budget).unwrap();
        assert_eq!(fast, naive, "diag {diag:?} m {m} r {radius}");
    }
}

#[test]
fn rescaling_round_trip() {
    // enumerate_s_integral at exponent h is exactly the integral enumeration
    // on the rescaled quadric inside the scaled box, divided back.
    let q = QuadraticForm::diagonal(&[1, 1, 1, -1]).unwrap();
    for (p0, h) in [(2u64, 2u32), (3, 1), (2, 3)] {
        let region = RationalBox::symmetric(Rat::new(3.into(), 2.into()), 4).unwrap();
        let inst = QuadricInstance::new(q.clone(), 1)
            .unwrap()
            .with_denominator_prime(p0, h)
            .unwrap()
            .with_region(region.clone())
            .unwrap();
        let pts = enumerate_s_integral_collect(&inst).unwrap();
        let scale = (p0 as i64).pow(h);
        let target = scale * scale * 1;
        let bounds = LatticeBounds::from_box(&region, scale as u64).unwrap();
        let lattice = naive_oracle_collect(&q, target, &bounds, 1 << 28).unwrap();
        assert_eq!(pts.len(), lattice.len(), "p0={p0} h={h}");
        // Divided back, every y is one of the reported points.
        use quadrics_core::enumerate::{IntegralPoint, Provenance};
        let mut divided: Vec<IntegralPoint> = lattice
            .iter()
            .map(|y| IntegralPoint::reduced(y.num.clone(), p0, h, Provenance::FastScan))
            .collect();
        divided.sort();
        let mut sorted_pts = pts.clone();
        sorted_pts.sort();
        assert_eq!(divided, sorted_pts);
    }
}

#[test]
fn ffield_formula_grid_slice() {
    // Exact-formula/brute agreement on a representative slice; the full
    // acceptance grid runs in the acceptance suite.
    let budget = CountBudget::default();
    let diags: [&[i64]; 6] = [
        &[1, 1, 1],
        &[1, -2, 3],
        &[2, 3, 5],
        &[1, 1, 1, -1],
        &[1, -1, 2, -7],
        &[1, 2, 3, 4, 5],
    ];
    for diag in diags {
        let q = QuadraticForm::diagonal(diag).unwrap();
        for p in primes_upto(19).into_iter().filter(|&p| p > 2) {
            if quadrics_core::arith::val_big(q.det(), p) > 0 {
                continue;
            }
            let hist = count_quadric_ffield_brute_all(&q, p, &budget).unwrap();
            for m in 1..p {
                let exact = count_quadric_ffield_exact(&q, m as i64, p).unwrap();
                assert_eq!(BigInt::from(hist[m as usize]), exact, "diag {diag:?} p {p} m {m}");
            }
        }
    }
}

#[test]
fn lang_weil_slice_counts_bounded() {
    // #Z(F_p) / p^(n-3) stays bounded for the codimension-two slice.
    let budget = CountBudget::default();
    let q = QuadraticForm::diagonal(&[1, 1, 1, -1]).unwrap();
    let spec = SubvarietySpec::new(Poly::coordinate(4, 0), Poly::coordinate(4, 1)).unwrap();
    let mut max_ratio = 0.0f64;
    for p in primes_upto(31) {
        let count = count_subvariety_ffield(&spec, &q, 1, p, &budget).unwrap();
        let ratio = count as f64 / p as f64;
        max_ratio = max_ratio.max(ratio);
    }
    assert!(max_ratio <= 4.0, "Lang-Weil ratio blew up: {max_ratio}");
}
