//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its measured quantities. Tolerances are pinned here, in code.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use quadrics_cli::commands::{deterministic_bytes, run};
use quadrics_cli::config::{ExperimentConfig, Kind};
use quadrics_core::arith::primes_upto;
use quadrics_core::density::{
    class_density, local_density, padic_ball_volume, real_density, volume_exponent_fit,
    RealRegion,
};
use quadrics_core::enumerate::{
    enumerate_integral, enumerate_s_integral, enumerate_s_integral_collect, naive_oracle,
    LatticeBounds,
};
use quadrics_core::equidist::{
    discrepancy_series, is_smooth_residue, on_quadric_residues, CongruenceNeighborhood,
    SchedulePoint,
};
use quadrics_core::forms::{
    hilbert_symbol, Place, QuadraticForm, QuadricInstance, RationalBox,
};
use quadrics_core::geomsieve::{bad_point_count, halfdim_count, verify_witness};
use quadrics_core::modular::{
    count_prime_power, count_quadric_ffield_brute_all, count_quadric_ffield_exact_big,
    reduce_point, CountBudget, SubvarietySpec,
};
use quadrics_core::oracles::TestRng;
use quadrics_core::poly::Poly;
use quadrics_core::sieve::{
    almost_prime_search, density_from_counts, factorize_u64,
    fundamental_lemma_report, sift, subsequence_count, verify_certificate, SearchOutcome,
    SieveSequence,
};
use quadrics_core::{Int, Rat};
use std::collections::BTreeSet;
use std::time::Instant;

fn rat(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

fn rat2(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn standard_instance(m: i64, p0: u64, h: u32) -> QuadricInstance {
    let q = QuadraticForm::diagonal(&[1, 1, 1, -1]).unwrap();
    QuadricInstance::new(q, m)
        .unwrap()
        .with_denominator_prime(p0, h)
        .unwrap()
        .with_region(RationalBox::symmetric(rat2(3, 2), 4).unwrap())
        .unwrap()
}

/// Sorted nonzero coefficient tuples (forms up to coordinate permutation).
fn sorted_tuples(n: usize, bound: i64) -> Vec<Vec<i64>> {
    let values: Vec<i64> = (-bound..=bound).filter(|&v| v != 0).collect();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec(vals: &[i64], start: usize, n: usize, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in start..vals.len() {
            cur.push(vals[i]);
            rec(vals, i, n, cur, out);
            cur.pop();
        }
    }
    rec(&values, 0, n, &mut cur, &mut out);
    out
}

fn check_grid(n: usize, ms: &[i64], radius: i64) {
    let cap: u128 = 1 << 34;
    for diag in sorted_tuples(n, 5) {
        let q = QuadraticForm::diagonal(&diag).unwrap();
        for &m in ms {
            let inst = QuadricInstance::new(q.clone(), m).unwrap();
            let mut fast = Vec::new();
            enumerate_integral(&inst, radius, true, |x| fast.push(x)).unwrap();
            let mut slow = Vec::new();
            naive_oracle(&q, m, &LatticeBounds::ball(n, radius), cap, |x| slow.push(x)).unwrap();
            assert_eq!(fast, slow, "diag {diag:?} m {m} N {radius}");
        }
    }
}

#[test]
fn criterion_01_enumeration_oracle_equivalence() {
    let t = Instant::now();
    let all_m: Vec<i64> = (-20..=20).filter(|&m| m != 0).collect();
    let m_slice: Vec<i64> = vec![-20, -7, -2, -1, 1, 2, 7, 20];
    // Ternary: full m range at a mid radius, sliced m at the top radius.
    check_grid(3, &all_m, 12);
    check_grid(3, &m_slice, 30);
    // Quaternary: full m range at a small radius, sliced m higher.
    check_grid(4, &all_m, 5);
    check_grid(4, &m_slice, 8);
    // Radius sweep on fixed instances covers the N axis.
    let cap: u128 = 1 << 34;
    for diag in [[1i64, 1, 1, -1], [2, -3, 1, 5], [1, 1, 1, 1]] {
        let q = QuadraticForm::diagonal(&diag).unwrap();
        let inst = QuadricInstance::new(q.clone(), 4).unwrap();
        for radius in (2..=30).step_by(7) {
            let mut fast = Vec::new();
            enumerate_integral(&inst, radius, true, |x| fast.push(x)).unwrap();
            let mut slow = Vec::new();
            naive_oracle(&q, 4, &LatticeBounds::ball(4, radius), cap, |x| slow.push(x)).unwrap();
            assert_eq!(fast, slow, "diag {diag:?} N {radius}");
        }
    }
    println!(
        "[PASS] criterion 1: fast enumerator == naive oracle over the instance grid ({:.1}s)",
        t.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_02_ffield_formula_vs_brute() {
    let t = Instant::now();
    let budget = CountBudget { scan_cap: 1 << 40, ..Default::default() };
    let panels: [&[&[i64]]; 3] = [
        &[&[1, 1, 1], &[1, 1, -1], &[1, -2, 3], &[2, 3, 5], &[1, -6, 7], &[5, 5, -4], &[7, -7, 2], &[1, 4, 6]],
        &[&[1, 1, 1, 1], &[1, 1, 1, -1], &[1, -2, 3, -4], &[2, 3, 5, 7], &[1, 1, -6, 6], &[3, -3, 4, 5], &[7, 2, -1, 1], &[5, -6, 1, 2]],
        &[&[1, 1, 1, 1, 1], &[1, 1, 1, 1, -1], &[1, 2, 3, 4, 5], &[2, -3, 5, -7, 1], &[1, -1, 2, -2, 3], &[6, 5, -4, 3, 2]],
    ];
    let mut checked = 0u64;
    for panel in panels {
        for &diag in panel {
            let q = QuadraticForm::diagonal(diag).unwrap();
            for p in primes_upto(31).into_iter().filter(|&p| p > 2) {
                if quadrics_core::arith::val_big(q.det(), p) > 0 {
                    continue;
                }
                let hist = count_quadric_ffield_brute_all(&q, p, &budget).unwrap();
                for m in -10i64..=10 {
                    if m == 0 {
                        continue;
                    }
                    let idx = m.rem_euclid(p as i64) as usize;
                    let exact = count_quadric_ffield_exact_big(&q, &Int::from(m), p).unwrap();
                    assert_eq!(Int::from(hist[idx]), exact, "diag {diag:?} p {p} m {m}");
                    checked += 1;
                }
            }
        }
    }
    println!(
        "[PASS] criterion 2: closed-form finite-field counts == brute force on {checked} cases ({:.1}s)",
        t.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_03_hensel_stabilization() {
    let t = Instant::now();
    let budget = CountBudget::default();
    let panel: [&[i64]; 4] = [&[1, 1, 1], &[1, -2, 3], &[1, 1, 1, -1], &[2, 3, 5, 1]];
    let mut checked = 0u64;
    for diag in panel {
        let q = QuadraticForm::diagonal(diag).unwrap();
        let n = q.dim() as u32;
        for p in [3u64, 5, 7, 11, 13] {
            for m in [1i64, 2, -5, 6, 9, -14] {
                let gate = Int::from(2) * q.det() * Int::from(m);
                if quadrics_core::arith::val_big(&gate, p) > 0 {
                    continue;
                }
                let mut prev = count_prime_power(&q, &Int::from(m), p, 1, &budget).unwrap();
                for k in 1..=4u32 {
                    let next = count_prime_power(&q, &Int::from(m), p, k + 1, &budget).unwrap();
                    let factor = quadrics_core::arith::pow_big(p, n - 1);
                    assert_eq!(next, &factor * &prev, "diag {diag:?} p {p} m {m} k {k}");
                    prev = next;
                    checked += 1;
                }
            }
        }
    }
    println!(
        "[PASS] criterion 3: count(p^(k+1)) = p^(n-1) count(p^k) on {checked} steps ({:.1}s)",
        t.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_04_hilbert_product_formula() {
    let t = Instant::now();
    let mut rng = TestRng::new(0xacce57);
    for i in 0..500 {
        let a = rng.nonzero(5000);
        let b = rng.nonzero(5000);
        let mut prod = hilbert_symbol(&rat(a), &rat(b), Place::Real).unwrap();
        for (p, _) in factorize_u64((2 * a.unsigned_abs() * b.unsigned_abs()) as u64) {
            prod *= hilbert_symbol(&rat(a), &rat(b), Place::Finite(p)).unwrap();
        }
        assert_eq!(prod, 1, "pair #{i}: a={a} b={b}");
    }
    println!(
        "[PASS] criterion 4: Hilbert product formula on 500 random pairs ({:.1}s)",
        t.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_05_volume_exponent() {
    let t = Instant::now();
    let budget = CountBudget::default();
    let q = QuadraticForm::diagonal(&[1, 1, 1, -1]).unwrap();
    for p0 in [2u64, 3] {
        let mut series = Vec::new();
        let mut ratios = Vec::new();
        for h in 0..=6u32 {
            let (vol, d) = padic_ball_volume(&q, 1, p0, h, &budget).unwrap();
            assert!(d.stabilized);
            let norm = Rat::from_integer(quadrics_core::arith::pow_big(p0, 2 * h));
            ratios.push(quadrics_core::forms::rat_to_f64(&(vol.clone() / norm)));
            series.push((h, vol));
        }
        let (slope, _resid) = volume_exponent_fit(&series, p0).unwrap();
        assert!(
            (slope - 2.0).abs() <= 0.2,
            "p0 {p0}: fitted exponent {slope} outside 2 +- 0.2"
        );
        let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().cloned().fold(0.0f64, f64::max);
        assert!(hi / lo <= 10.0, "p0 {p0}: ratio band {lo}..{hi} exceeds 10");
        println!("  p0={p0}: slope {slope:.4}, band ratio {:.3}", hi / lo);
    }
    println!(
        "[PASS] criterion 5: ball-volume exponent fits within 2 +- 0.2, band <= 10 ({:.1}s)",
        t.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_06_hardy_littlewood_consistency() {
    let t = Instant::now();
    let budget = CountBudget::default();
    for m in [1i64, 2] {
        let mut rel_errs = Vec::new();
        for h in 0..=4u32 {
            let inst = standard_instance(m, 2, h);
            let mut count = 0u64;
            enumerate_s_integral(&inst, |_| count += 1).unwrap();
            let pred = quadrics_core::density::hl_prediction(&inst, 997, 128, &budget).unwrap();
            assert!(pred.total.is_finite() && pred.total > 0.0, "prediction must be positive");
            let rel = (count as f64 / pred.total - 1.0).abs();
            println!("  m={m} h={h}: count {count}, prediction {:.3}, rel err {rel:.4}", pred.total);
            rel_errs.push(rel);
        }
        let last = *rel_errs.last().unwrap();
        assert!(last <= 0.15, "m={m}: relative error {last} at h=4 exceeds 0.15");
        assert!(
            last <= rel_errs[1],
            "m={m}: error at h=4 ({last}) above error at h=1 ({})",
            rel_errs[1]
        );
    }
    println!(
        "[PASS] criterion 6: Hardy-Littlewood prediction within 15% at h=4, improving from h=1 ({:.1}s)",
        t.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_07_equidistribution_in_classes() {
    let t = Instant::now();
    let budget = CountBudget::default();
    let h_top = 6u32;
    let inst = standard_instance(1, 2, h_top);
    let m_big = Int::from(1);

    // Shared archimedean and adelic pieces of the main term.
    let region = RealRegion::Box(inst.region.clone().unwrap());
    let sigma_inf = real_density(&inst.form, 1, &region, 128).unwrap();
    let (ball, _) = padic_ball_volume(&inst.form, 1, 2, h_top, &budget).unwrap();
    let mut product_others = Rat::one();
    for p in primes_upto(997) {
        if p == 2 {
            continue;
        }
        product_others *= local_density(&inst.form, &m_big, p, &budget).unwrap().value;
    }

    // One enumeration pass; bucket by residues at each modulus.
    let points = enumerate_s_integral_collect(&inst).unwrap();
    let total = points.len() as u64;

    for &(p, e) in &[(3u64, 1u32), (5, 1), (3, 2)] {
        let modulus = p.pow(e);
        let residues = on_quadric_residues(&inst.form, 1, p, e, &budget).unwrap();
        assert!(residues.iter().all(|xi| is_smooth_residue(&inst.form, xi, p)));
        // Bucket counts.
        let mut buckets: std::collections::HashMap<Vec<u64>, u64> = std::collections::HashMap::new();
        for x in &points {
            let r = reduce_point(x, p, e).unwrap();
            *buckets.entry(r.coords).or_insert(0) += 1;
        }
        // Partition identity: buckets cover every point, keys on the quadric.
        let sum: u64 = buckets.values().sum();
        assert_eq!(sum, total, "partition identity at modulus {modulus}");
        for key in buckets.keys() {
            assert!(residues.contains(key), "off-quadric bucket at {modulus}");
        }
        // Exact additivity of class measures.
        let sigma_p = local_density(&inst.form, &m_big, p, &budget).unwrap().value;
        let mut class_sum = Rat::zero();
        let mut worst_rel = 0.0f64;
        for xi in &residues {
            let mu = class_density(&inst.form, &m_big, p, xi, e, &budget).unwrap().value;
            class_sum += &mu;
            // Replace the sigma_p factor of the full product by the class measure.
            let adelic = ball.clone() * &product_others / &sigma_p * &mu;
            let main = sigma_inf.value * quadrics_core::forms::rat_to_f64(&adelic);
            assert!(main.is_finite() && main > 0.0, "main term must be positive and finite");
            let got = *buckets.get(xi).unwrap_or(&0) as f64;
            let rel = (got - main).abs() / main;
            worst_rel = worst_rel.max(rel);
        }
        assert_eq!(class_sum, sigma_p, "class measures must sum to sigma_p at {p}^{e}");
        assert!(
            worst_rel <= 0.25,
            "modulus {modulus}: worst per-class relative error {worst_rel} exceeds 0.25"
        );
        println!("  modulus {modulus}: {} classes, worst rel err {worst_rel:.4}", residues.len());
    }

    // Fitted exponent on one class, reported (not asserted).
    let nbhd = CongruenceNeighborhood::new(&inst, vec![(3, 1, vec![1, 0, 0, 0])]).unwrap();
    let schedule: Vec<SchedulePoint> = (0..=h_top).map(SchedulePoint::Adic).collect();
    let (_, fit) = discrepancy_series(&inst, &nbhd, &schedule, 199, 64, &budget).unwrap();
    println!(
        "  fitted delta_hat = {:.4} (residual {:.3}, low_confidence = {})",
        fit.delta_hat, fit.residual, fit.low_confidence
    );
    println!(
        "[PASS] criterion 7: exact partition + per-class error <= 0.25 at h={h_top} ({:.1}s)",
        t.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_08_legendre_sieve_identity() {
    let t = Instant::now();
    let mut rng = TestRng::new(0x1e6e);
    for case in 0..200 {
        let n_entries = 1 + (rng.next_u64() % 1000) as usize;
        let mut seq = SieveSequence::new(BTreeSet::new()).unwrap();
        for _ in 0..n_entries {
            seq.add_value(&Int::from(rng.range_i64(1, 5000)));
        }
        let z = [3u64, 5, 8, 12, 14][case % 5]; // P(z) has at most 6 primes
        let zprimes = primes_upto(z - 1);
        let (s, _) = sift(&seq, |_| true, z);
        let mut total = Rat::zero();
        for mask in 0..(1u32 << zprimes.len()) {
            let mut d = 1u64;
            let mut bits = 0u32;
            for (i, &p) in zprimes.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    d *= p;
                    bits += 1;
                }
            }
            let term = subsequence_count(&seq, d).unwrap();
            if bits % 2 == 0 {
                total += term;
            } else {
                total -= term;
            }
        }
        assert_eq!(s, total, "case {case}");
    }
    println!(
        "[PASS] criterion 8: Legendre inclusion-exclusion identity on 200 random sequences ({:.1}s)",
        t.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_09_fundamental_lemma_report() {
    let t = Instant::now();
    let budget = CountBudget::default();
    let q = QuadraticForm::diagonal(&[1, 1, 1, -1]).unwrap();
    let inst = QuadricInstance::new(q.clone(), 1).unwrap();
    let f = Poly::parse_linear("x1+x2+3", 4).unwrap();
    let excluded: BTreeSet<u64> = [2u64, 3].into_iter().collect();
    let (z, y) = (20u64, 400u64);

    let mut seq = SieveSequence::new(excluded.clone()).unwrap();
    let mut n_points = 0u64;
    enumerate_integral(&inst, 2000, true, |x| {
        n_points += 1;
        seq.add_point(&x, &f).unwrap();
    })
    .unwrap();

    let sieve_primes: Vec<u64> = primes_upto(z - 1)
        .into_iter()
        .filter(|p| !excluded.contains(p))
        .collect();
    let table = density_from_counts(&q, 1, &f, &sieve_primes, &budget).unwrap();
    let x_scale = seq.total();
    let report = fundamental_lemma_report(&seq, &table, &x_scale, y, z).unwrap();

    assert!(report.sifted.is_positive(), "sifted sum must be positive");
    let bound = rat2(1, 5) * &report.main_term;
    assert!(
        report.remainder <= bound,
        "remainder {} exceeds 0.2 * X V(z) = {}",
        report.remainder,
        bound
    );
    let tau = report.tau_hat.unwrap();
    assert!((0.3..=3.0).contains(&tau), "tau_hat {tau} outside [0.3, 3]");
    println!(
        "  points {n_points}, S = {}, X V(z) = {:.1}, R = {:.1}, tau_hat = {tau:.3}",
        report.sifted,
        quadrics_core::forms::rat_to_f64(&report.main_term),
        quadrics_core::forms::rat_to_f64(&report.remainder),
    );
    println!(
        "[PASS] criterion 9: sieve report with S > 0, R <= 0.2 X V(z), tau_hat in [0.3, 3] ({:.1}s)",
        t.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_10_almost_prime_existence() {
    let t = Instant::now();
    let q = QuadraticForm::diagonal(&[1, 1, 1, -1]).unwrap();
    let inst = QuadricInstance::new(q, 1).unwrap();
    let f = Poly::parse_linear("x1+x2+3", 4).unwrap();
    let excluded: BTreeSet<u64> = [2u64, 3].into_iter().collect();
    let mut points = Vec::new();
    enumerate_integral(&inst, 200, true, |x| {
        if points.len() < 10_000_000 {
            points.push(x)
        }
    })
    .unwrap();
    let outcome =
        almost_prime_search(points.into_iter(), &f, &excluded, 100, 3, 10_000_000).unwrap();
    match outcome {
        SearchOutcome::Found(cert) => {
            assert!(cert.distinct <= 3);
            assert!(verify_certificate(&cert, &f, &excluded, 100, 3).unwrap());
            println!(
                "  point {:?}, value {}, stripped {}, {} distinct places (multiplicity {})",
                cert.point.num, cert.value, cert.stripped, cert.distinct, cert.with_multiplicity
            );
        }
        SearchOutcome::Exhausted { .. } => panic!("search must find a qualifying point"),
    }
    println!(
        "[PASS] criterion 10: verified almost-prime point with <= 3 places > 100 ({:.1}s)",
        t.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_11_geometric_sieve_shape() {
    let t = Instant::now();
    let inst = standard_instance(1, 2, 5);
    let spec = SubvarietySpec::new(Poly::coordinate(4, 0), Poly::coordinate(4, 1)).unwrap();
    let mut ratios = Vec::new();
    for m_cut in [10u64, 30, 100, 300] {
        let report = bad_point_count(&inst, &spec, m_cut, None).unwrap();
        // 100% witness re-verification.
        for rec in &report.records {
            for &p in &rec.witnesses {
                assert!(verify_witness(&inst, &spec, &rec.point, p).unwrap());
            }
            assert!(rec.generic_bad || !rec.witnesses.is_empty());
        }
        let ratio = report.count as f64 / report.total_points as f64;
        println!(
            "  M={m_cut}: bad {} of {} ({ratio:.4}), generic-bad {}",
            report.count,
            report.total_points,
            report.records.iter().filter(|r| r.generic_bad).count()
        );
        ratios.push(ratio);
    }
    for w in ratios.windows(2) {
        assert!(w[1] <= w[0], "bad-point ratio must be nonincreasing in M: {ratios:?}");
    }
    assert!(ratios[3] <= 0.5, "ratio at M=300 is {} > 0.5", ratios[3]);
    println!(
        "[PASS] criterion 11: bad-point ratio nonincreasing over M, <= 0.5 at M=300, all witnesses verified ({:.1}s)",
        t.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_12_half_dimensional_thinning() {
    let t = Instant::now();
    let mut fractions = Vec::new();
    let mut b = 64i64;
    while b <= 4096 {
        let out = halfdim_count(1, &[1, 1], 3 * b * b, b).unwrap();
        let frac = out.representable as f64 / out.total as f64;
        println!("  B={b}: representable fraction {frac:.4}");
        fractions.push(frac);
        b *= 2;
    }
    for w in fractions.windows(2) {
        assert!(
            w[1] <= w[0] * 1.02,
            "representable fraction must not increase beyond 2% noise: {fractions:?}"
        );
    }
    assert!(fractions.last().unwrap() < fractions.first().unwrap());
    println!(
        "[PASS] criterion 12: representable fraction thins along B (2% noise allowance) ({:.1}s)",
        t.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_13_determinism() {
    let t = Instant::now();
    let region = Some("-1.5:1.5".to_string());
    let configs: Vec<(Kind, ExperimentConfig)> = vec![
        (
            Kind::Enumerate,
            ExperimentConfig {
                form: Some("1,1,1,-1".into()),
                m: Some(1),
                height: Some(30),
                ..Default::default()
            },
        ),
        (
            Kind::Enumerate,
            ExperimentConfig {
                form: Some("1,1,1,-1".into()),
                m: Some(1),
                p0: Some(2),
                h: Some(3),
                region: region.clone(),
                ..Default::default()
            },
        ),
        (
            Kind::CountMod,
            ExperimentConfig {
                form: Some("1,1,1,-1".into()),
                m: Some(1),
                p: Some(3),
                k: Some(2),
                sub_f: Some("x1".into()),
                sub_g: Some("x2".into()),
                ..Default::default()
            },
        ),
        (
            Kind::Density,
            ExperimentConfig {
                form: Some("1,1,1,-1".into()),
                m: Some(1),
                all_primes_upto: Some(100),
                ball: Some(true),
                p0: Some(2),
                h: Some(4),
                real: Some(true),
                region: region.clone(),
                grid: Some(64),
                ..Default::default()
            },
        ),
        (
            Kind::Equidist,
            ExperimentConfig {
                form: Some("1,1,1,-1".into()),
                m: Some(1),
                p0: Some(2),
                region: region.clone(),
                modulus: Some(9),
                residue: Some("1,0,0,0".into()),
                h_schedule: Some("0:6".into()),
                p_cut: Some(997),
                grid: Some(96),
                ..Default::default()
            },
        ),
        (
            Kind::Sieve,
            ExperimentConfig {
                form: Some("1,1,1,-1".into()),
                m: Some(1),
                height: Some(2000),
                f: Some("x1+x2+3".into()),
                z: Some(20),
                y: Some(400),
                sprime: Some("2,3".into()),
                ..Default::default()
            },
        ),
        (
            Kind::AlmostPrime,
            ExperimentConfig {
                form: Some("1,1,1,-1".into()),
                m: Some(1),
                height: Some(200),
                f: Some("x1+x2+3".into()),
                sprime: Some("2,3".into()),
                min_norm: Some(100),
                max_places: Some(3),
                budget: Some(1e7),
                ..Default::default()
            },
        ),
        (
            Kind::GeomSieve,
            ExperimentConfig {
                form: Some("1,1,1,-1".into()),
                m: Some(1),
                p0: Some(2),
                h: Some(5),
                region: region.clone(),
                f: Some("x1".into()),
                g: Some("x2".into()),
                m_grid: Some("10,30,100,300".into()),
                ..Default::default()
            },
        ),
        (
            Kind::Halfdim,
            ExperimentConfig {
                a: Some(1),
                tail: Some("1,1".into()),
                c_per_b2: Some(3),
                b_grid: Some("64:4096:x2".into()),
                ..Default::default()
            },
        ),
    ];
    for (kind, cfg) in configs {
        let (a, b) = deterministic_bytes(kind, &cfg).unwrap();
        assert_eq!(a, b, "non-deterministic report for {kind:?}");
        // The CSV rendering is part of the deterministic surface too.
        let r1 = run(kind, &cfg).unwrap();
        let r2 = run(kind, &cfg).unwrap();
        assert_eq!(r1.csv_string(), r2.csv_string(), "CSV differs for {kind:?}");
        println!("  {}: {} rows, byte-identical", kind.name(), r1.data.rows.len());
    }
    println!(
        "[PASS] criterion 13: byte-identical data rows across two runs of every acceptance config ({:.1}s)",
        t.elapsed().as_secs_f64()
    );
}
