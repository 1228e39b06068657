//! Dispatch from a merged configuration into the library, producing one
//! deterministic report per experiment.

use crate::config::{parse_grid, parse_u64_list, ExperimentConfig, Kind};
use crate::report::{fmt_f64, fmt_rat, ExperimentReport};
use crate::{HResult, HarnessError};
use quadrics_core::density::{local_density, padic_ball_volume, real_density, RealRegion};
use quadrics_core::enumerate::{
    enumerate_integral, enumerate_s_integral, height_padic, height_real, IntegralPoint,
};
use quadrics_core::equidist::{
    discrepancy_series, CongruenceNeighborhood, SchedulePoint,
};
use quadrics_core::geomsieve::{bad_point_count, bound_shape_check, halfdim_count, ModelTerm};
use quadrics_core::modular::{
    count_prime_power, count_subvariety_ffield, SubvarietySpec,
};
use quadrics_core::sieve::{
    almost_prime_search, build_sequence, density_from_counts, fundamental_lemma_report,
    verify_certificate, SearchOutcome,
};
use quadrics_core::Int;
use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

/// Run one experiment; identical configs produce identical report data.
pub fn run(kind: Kind, config: &ExperimentConfig) -> HResult<ExperimentReport> {
    let start = Instant::now();
    let (columns, rows, summary, warnings) = match kind {
        Kind::Enumerate => run_enumerate(config)?,
        Kind::CountMod => run_count_mod(config)?,
        Kind::Density => run_density(config)?,
        Kind::Equidist => run_equidist(config)?,
        Kind::Sieve => run_sieve(config)?,
        Kind::AlmostPrime => run_almost_prime(config)?,
        Kind::GeomSieve => run_geom_sieve(config)?,
        Kind::Halfdim => run_halfdim(config)?,
    };
    Ok(ExperimentReport::new(
        kind,
        config,
        columns,
        rows,
        summary,
        warnings,
        start.elapsed().as_millis(),
    ))
}

type Payload = (Vec<String>, Vec<Vec<String>>, BTreeMap<String, String>, Vec<String>);

fn cols(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn point_row(x: &IntegralPoint) -> Vec<String> {
    let mut row: Vec<String> = x.coords_rat().iter().map(fmt_rat).collect();
    row.push(fmt_f64(height_real(x)));
    let exp = if x.p0 > 1 || x.den_pow > 0 {
        height_padic(x, x.p0).map(|e| e.to_string()).unwrap_or_default()
    } else {
        String::new()
    };
    row.push(exp);
    row
}

fn run_enumerate(config: &ExperimentConfig) -> HResult<Payload> {
    let inst = config.parse_instance()?;
    let mut rows = Vec::new();
    if inst.p0.is_some() && inst.region.is_some() {
        enumerate_s_integral(&inst, |x| rows.push(point_row(&x)))?;
    } else {
        let height = ExperimentConfig::require(&config.height, "height")?;
        let euclidean = !config.sup_norm.unwrap_or(false);
        enumerate_integral(&inst, height, euclidean, |x| rows.push(point_row(&x)))?;
    }
    let mut summary = BTreeMap::new();
    summary.insert("count".into(), rows.len().to_string());
    let mut columns: Vec<String> = (1..=inst.form.dim()).map(|i| format!("x{i}")).collect();
    columns.push("height_real".into());
    columns.push("p0_exponent".into());
    Ok((columns, rows, summary, vec![]))
}

fn run_count_mod(config: &ExperimentConfig) -> HResult<Payload> {
    let form = config.parse_form()?;
    let m = ExperimentConfig::require(&config.m, "m")?;
    let p = ExperimentConfig::require(&config.p, "p")?;
    let k = config.k.unwrap_or(1);
    let budget = config.count_budget();
    let count = count_prime_power(&form, &Int::from(m), p, k, &budget)?;
    let mut rows = vec![vec![p.to_string(), k.to_string(), count.to_string(), String::new()]];
    let mut warnings = Vec::new();
    if let (Some(fs), Some(gs)) = (&config.sub_f, &config.sub_g) {
        let f = ExperimentConfig::parse_poly(fs, form.dim())?;
        let g = ExperimentConfig::parse_poly(gs, form.dim())?;
        let spec = SubvarietySpec::new(f, g)?;
        if k != 1 {
            warnings.push("SUBVARIETY_COUNTED_MOD_P_ONLY".into());
        }
        let sub = count_subvariety_ffield(&spec, &form, m, p, &budget)?;
        rows.push(vec![p.to_string(), "1".into(), sub.to_string(), "subvariety".into()]);
    }
    let mut summary = BTreeMap::new();
    summary.insert("count".into(), count.to_string());
    Ok((cols(&["p", "k", "count", "tag"]), rows, summary, warnings))
}

fn run_density(config: &ExperimentConfig) -> HResult<Payload> {
    let form = config.parse_form()?;
    let m = ExperimentConfig::require(&config.m, "m")?;
    let budget = config.count_budget();
    let m_big = Int::from(m);
    let mut rows = Vec::new();
    let mut summary = BTreeMap::new();
    let mut warnings = Vec::new();

    let mut primes: Vec<u64> = Vec::new();
    if let Some(p) = config.p {
        primes.push(p);
    }
    if let Some(upto) = config.all_primes_upto {
        primes.extend(quadrics_core::arith::primes_upto(upto));
    }
    for p in primes {
        match local_density(&form, &m_big, p, &budget) {
            Ok(d) => rows.push(vec![
                p.to_string(),
                d.value.numer().to_string(),
                d.value.denom().to_string(),
                d.k_used.to_string(),
                d.stabilized.to_string(),
            ]),
            Err(e @ quadrics_core::Error::NotStabilized { .. }) => {
                warnings.push(format!("NOT_STABILIZED p={p}"));
                let _ = e;
            }
            Err(e) => return Err(e.into()),
        }
    }
    if config.real.unwrap_or(false) {
        let region = config
            .region
            .as_ref()
            .ok_or_else(|| HarnessError::Config("--real needs --region".into()))?;
        let rb = crate::config::parse_region(region, form.dim())?;
        let grid = config.grid.unwrap_or(96);
        let d = real_density(&form, m, &RealRegion::Box(rb), grid)?;
        summary.insert("sigma_inf".into(), fmt_f64(d.value));
        summary.insert("sigma_inf_error".into(), fmt_f64(d.error));
        summary.insert("sigma_inf_grid".into(), d.grid.to_string());
    }
    if config.ball.unwrap_or(false) {
        let p0 = ExperimentConfig::require(&config.p0, "p0")?;
        let h = config.h.unwrap_or(0);
        let (vol, d) = padic_ball_volume(&form, m, p0, h, &budget)?;
        summary.insert("ball_volume".into(), fmt_rat(&vol));
        summary.insert("ball_k_used".into(), d.k_used.to_string());
    }
    Ok((cols(&["prime", "value_num", "value_den", "k_used", "stabilized"]), rows, summary, warnings))
}

fn parse_schedule(config: &ExperimentConfig) -> HResult<Vec<SchedulePoint>> {
    if let Some(s) = &config.h_schedule {
        let hs = parse_grid(s)?;
        return Ok(hs
            .into_iter()
            .map(|h| {
                u32::try_from(h)
                    .map(SchedulePoint::Adic)
                    .map_err(|_| HarnessError::Config("negative h in schedule".into()))
            })
            .collect::<HResult<_>>()?);
    }
    let s = ExperimentConfig::require(&config.schedule, "schedule")?;
    Ok(parse_grid(&s)?.into_iter().map(SchedulePoint::Real).collect())
}

fn run_equidist(config: &ExperimentConfig) -> HResult<Payload> {
    let inst = config.parse_instance()?;
    let budget = config.count_budget();
    let schedule = parse_schedule(config)?;
    let nbhd = match (config.modulus, &config.residue) {
        (Some(l), Some(res)) if l > 1 => {
            let coords = parse_u64_list(res)?;
            let parts = quadrics_core::sieve::factorize_u64(l)
                .into_iter()
                .map(|(p, e)| {
                    let pe = p.pow(e);
                    let xi: Vec<u64> = coords.iter().map(|&c| c % pe).collect();
                    (p, e, xi)
                })
                .collect();
            CongruenceNeighborhood::new(&inst, parts)?
        }
        _ => CongruenceNeighborhood::trivial(),
    };
    let p_cut = config.p_cut.unwrap_or(997);
    let grid = config.grid.unwrap_or(96);
    let (records, fit) = discrepancy_series(&inst, &nbhd, &schedule, p_cut, grid, &budget)?;
    let rows = records
        .iter()
        .map(|r| {
            vec![
                r.at.label().to_string(),
                r.count.to_string(),
                fmt_f64(r.main),
                fmt_f64(r.abs_err),
                fmt_f64(r.rel_err),
                r.modulus.to_string(),
            ]
        })
        .collect();
    let mut summary = BTreeMap::new();
    summary.insert("delta_hat".into(), fmt_f64(fit.delta_hat));
    summary.insert("one_minus_delta".into(), fmt_f64(fit.one_minus_delta));
    summary.insert("fit_residual".into(), fmt_f64(fit.residual));
    summary.insert("fit_points".into(), fit.points_used.to_string());
    let warnings = if fit.low_confidence { vec!["LOW_CONFIDENCE_FIT".into()] } else { vec![] };
    Ok((cols(&["at", "count", "main", "abs_err", "rel_err", "modulus"]), rows, summary, warnings))
}

fn excluded_set(config: &ExperimentConfig) -> HResult<BTreeSet<u64>> {
    match &config.sprime {
        Some(s) => Ok(parse_u64_list(s)?.into_iter().collect()),
        None => Ok(BTreeSet::new()),
    }
}

fn collect_points(config: &ExperimentConfig) -> HResult<(quadrics_core::forms::QuadricInstance, Vec<IntegralPoint>)> {
    let inst = config.parse_instance()?;
    let mut pts = Vec::new();
    if inst.p0.is_some() && inst.region.is_some() {
        enumerate_s_integral(&inst, |x| pts.push(x))?;
    } else {
        let height = ExperimentConfig::require(&config.height, "height")?;
        let euclidean = !config.sup_norm.unwrap_or(false);
        enumerate_integral(&inst, height, euclidean, |x| pts.push(x))?;
    }
    Ok((inst, pts))
}

fn run_sieve(config: &ExperimentConfig) -> HResult<Payload> {
    let (inst, points) = collect_points(config)?;
    let n = inst.form.dim();
    let f_spec = ExperimentConfig::require(&config.f, "f")?;
    let f = ExperimentConfig::parse_poly(&f_spec, n)?;
    let excluded = excluded_set(config)?;
    let z = ExperimentConfig::require(&config.z, "z")?;
    let y = ExperimentConfig::require(&config.y, "y")?;
    let budget = config.count_budget();

    let seq = build_sequence(points.iter(), &f, excluded.clone())?;
    let sieve_primes: Vec<u64> = quadrics_core::arith::primes_upto(z.saturating_sub(1))
        .into_iter()
        .filter(|p| !excluded.contains(p))
        .collect();
    let table = density_from_counts(&inst.form, inst.m, &f, &sieve_primes, &budget)?;
    let x_scale = seq.total();
    let report = fundamental_lemma_report(&seq, &table, &x_scale, y, z)?;

    let (_, ledger) = quadrics_core::sieve::remainder_ledger(&seq, &table, &x_scale, y, z)?;
    let rows: Vec<Vec<String>> = ledger
        .iter()
        .map(|(d, dev)| vec![d.to_string(), fmt_rat(dev)])
        .collect();
    let mut summary = BTreeMap::new();
    summary.insert("points".into(), points.len().to_string());
    summary.insert("total_weight".into(), fmt_rat(&seq.total()));
    summary.insert("zero_bucket".into(), fmt_rat(&seq.zero_bucket));
    summary.insert("sifted".into(), fmt_rat(&report.sifted));
    summary.insert("v_z".into(), fmt_rat(&report.v_z));
    summary.insert("main_term".into(), fmt_rat(&report.main_term));
    summary.insert("remainder".into(), fmt_rat(&report.remainder));
    summary.insert("survivors".into(), report.survivor_count.to_string());
    if let Some(t) = report.tau_hat {
        summary.insert("tau_hat".into(), fmt_f64(t));
    }
    let warnings = if report.degenerate { vec!["DEGENERATE_SEQUENCE".into()] } else { vec![] };
    Ok((cols(&["d", "abs_deviation"]), rows, summary, warnings))
}

fn run_almost_prime(config: &ExperimentConfig) -> HResult<Payload> {
    let inst = config.parse_instance()?;
    let n = inst.form.dim();
    let f_spec = ExperimentConfig::require(&config.f, "f")?;
    let f = ExperimentConfig::parse_poly(&f_spec, n)?;
    let excluded = excluded_set(config)?;
    let min_norm = ExperimentConfig::require(&config.min_norm, "min-norm (M)")?;
    let max_places = ExperimentConfig::require(&config.max_places, "max-places (r)")?;
    let budget = config.budget.unwrap_or(1e7) as u64;

    // Stream points lazily through a channel-free buffer: enumerate in blocks
    // by collecting (desk-scale budgets keep this reasonable).
    let (_, points) = collect_points(config)?;
    let outcome = almost_prime_search(points.into_iter(), &f, &excluded, min_norm, max_places, budget)?;
    let mut rows = Vec::new();
    let mut summary = BTreeMap::new();
    let mut warnings = Vec::new();
    match outcome {
        SearchOutcome::Found(cert) => {
            let verified = verify_certificate(&cert, &f, &excluded, min_norm, max_places)?;
            if !verified {
                return Err(HarnessError::Internal(
                    "certificate failed independent verification".into(),
                ));
            }
            let coords: Vec<String> = cert.point.coords_rat().iter().map(fmt_rat).collect();
            rows.push(vec![
                coords.join(" "),
                cert.value.to_string(),
                cert.stripped.to_string(),
                cert.factors
                    .iter()
                    .map(|(p, e)| format!("{p}^{e}"))
                    .collect::<Vec<_>>()
                    .join(" "),
            ]);
            summary.insert("found".into(), "true".into());
            summary.insert("distinct_places".into(), cert.distinct.to_string());
            summary.insert("with_multiplicity".into(), cert.with_multiplicity.to_string());
            summary.insert("verified".into(), verified.to_string());
        }
        SearchOutcome::Exhausted { examined, histogram } => {
            summary.insert("found".into(), "false".into());
            summary.insert("examined".into(), examined.to_string());
            for (distinct, count) in histogram {
                rows.push(vec![format!("histogram_{distinct}"), count.to_string(), String::new(), String::new()]);
            }
            warnings.push("EXHAUSTED".into());
        }
    }
    Ok((cols(&["point", "value", "stripped", "factors"]), rows, summary, warnings))
}

fn run_geom_sieve(config: &ExperimentConfig) -> HResult<Payload> {
    let inst = config.parse_instance()?;
    if inst.p0.is_none() || inst.region.is_none() {
        return Err(HarnessError::Config("geom-sieve needs --p0, --h and --region".into()));
    }
    let n = inst.form.dim();
    let f = ExperimentConfig::parse_poly(&ExperimentConfig::require(&config.f, "f")?, n)?;
    let g = ExperimentConfig::parse_poly(&ExperimentConfig::require(&config.g, "g")?, n)?;
    let spec = SubvarietySpec::new(f, g)?;
    let m_grid = parse_grid(&ExperimentConfig::require(&config.m_grid, "M-grid")?)?;
    let mut rows = Vec::new();
    let mut ratios = Vec::new();
    let mut params = Vec::new();
    let mut generic_bad_total = 0u64;
    for &m_cut in &m_grid {
        if m_cut <= 0 {
            return Err(HarnessError::Config("M-grid entries must be positive".into()));
        }
        let report = bad_point_count(&inst, &spec, m_cut as u64, None)?;
        let ratio = if report.total_points > 0 {
            report.count as f64 / report.total_points as f64
        } else {
            0.0
        };
        generic_bad_total = report.records.iter().filter(|r| r.generic_bad).count() as u64;
        rows.push(vec![
            m_cut.to_string(),
            report.count.to_string(),
            report.total_points.to_string(),
            fmt_f64(ratio),
        ]);
        params.push(m_cut as f64);
        ratios.push(ratio);
    }
    let mut summary = BTreeMap::new();
    summary.insert("generic_bad".into(), generic_bad_total.to_string());
    let mut warnings = Vec::new();
    if params.len() >= 4 {
        match bound_shape_check(&params, &ratios, &[ModelTerm::OneOverXLogX]) {
            Ok(fit) => {
                summary.insert("fit_coefficient".into(), fmt_f64(fit.coefficients[0]));
                summary.insert("fit_residual".into(), fmt_f64(fit.residual));
            }
            Err(e) => warnings.push(format!("FIT_FAILED {e}")),
        }
    }
    Ok((cols(&["M", "bad_count", "total_points", "ratio"]), rows, summary, warnings))
}

fn run_halfdim(config: &ExperimentConfig) -> HResult<Payload> {
    let a = ExperimentConfig::require(&config.a, "a")?;
    let tail: Vec<i64> =
        crate::config::parse_i64_list(&ExperimentConfig::require(&config.tail, "tail")?)?;
    let b_grid = parse_grid(&ExperimentConfig::require(&config.b_grid, "B-grid")?)?;
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for &b in &b_grid {
        if b < 1 {
            return Err(HarnessError::Config("B-grid entries must be >= 1".into()));
        }
        let c = match (config.c, config.c_per_b2) {
            (_, Some(scale)) => scale
                .checked_mul(b)
                .and_then(|v| v.checked_mul(b))
                .ok_or_else(|| HarnessError::Config("c_per_b2 * B^2 overflows".into()))?,
            (Some(c), None) => c,
            (None, None) => return Err(HarnessError::Config("need --c or --c-per-b2".into())),
        };
        let out = halfdim_count(a, &tail, c, b)?;
        if out.negative_target_only {
            warnings.push(format!("NEGATIVE_TARGET_ONLY B={b}"));
        }
        let frac = out.representable as f64 / out.total as f64;
        rows.push(vec![
            b.to_string(),
            c.to_string(),
            out.representable.to_string(),
            out.total.to_string(),
            fmt_f64(frac),
        ]);
    }
    Ok((cols(&["B", "c", "representable", "total", "fraction"]), rows, BTreeMap::new(), warnings))
}

/// Re-runnable determinism check used by tests: run twice, compare payloads.
pub fn deterministic_bytes(kind: Kind, config: &ExperimentConfig) -> HResult<(Vec<u8>, Vec<u8>)> {
    let a = run(kind, config)?;
    let b = run(kind, config)?;
    Ok((a.data_bytes(), b.data_bytes()))
}
