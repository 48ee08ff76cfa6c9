use std::io::Write;
use std::path::PathBuf;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use partlab_core::asymptotics::{
    freiman_remainder, freiman_terms, headline_bound, hardy_ramanujan_band, joint_tail_band,
    lemma1_bound_check, restricted_band, rousseau_ali_lower, Lemma1Check, FREIMAN_WEDGE,
};
use partlab_core::count::{coeff_from_product, count_partitions, count_restricted, joint_tail};
use partlab_core::experiments::{
    chernoff_validate, macdonald_comparable_exact, macdonald_comparable_mc, overflow_validate,
    pk_reference_curve, ratio_bound_validate, surrogate_event_pk, tie_validate, tv_distance_k1,
    tv_distance_mc, wilf_fraction_exact, wilf_fraction_mc, Binning, Estimate, FractionSeries,
    MACDONALD_ENUMERATION_CAP, TV_EXACT_MAX, WILF_ENUMERATION_CAP,
};
use partlab_core::sampling::{
    sample_boltzmann, sample_surrogate, sample_uniform_exact, BoltzmannStats, DEFAULT_RETRY_CAP,
};
use partlab_core::table::CACHE_VERSION;
use partlab_core::{RestrictedCountTable, RngStream, TableMode};

use crate::output::{Format, Report, TableInfo};
use crate::{BoundKind, CliError, Command, Global, Method, Sampler};

/// Largest `n` for which the CLI builds an exact sampling table.
pub const EXACT_TABLE_MAX: u32 = 6000;

/// Largest `n` accepted by the exact counters.
pub const COUNT_MAX: u64 = 200_000;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), CliError> {
    if cond {
        Ok(())
    } else {
        Err(CliError::Invalid(msg()))
    }
}

fn positive_samples(samples: u64) -> Result<(), CliError> {
    ensure(samples > 0, || "--samples must be positive".into())
}

fn exact_table_n(n: u32) -> Result<(), CliError> {
    ensure(n <= EXACT_TABLE_MAX, || {
        format!("n = {n} exceeds the exact sampler limit {EXACT_TABLE_MAX}")
    })
}

fn cache_dir(g: &Global) -> Option<PathBuf> {
    if g.no_cache {
        return None;
    }
    g.cache_dir
        .clone()
        .or_else(|| dirs::data_dir().map(|d| d.join("partlab")))
}

fn table(g: &Global, n: u32) -> Result<(RestrictedCountTable, TableInfo), CliError> {
    let t = RestrictedCountTable::load_or_build(n, TableMode::ByLargestPart, cache_dir(g).as_deref())?;
    let info = TableInfo {
        n_max: t.n_max(),
        mode: t.mode(),
        cache_version: CACHE_VERSION,
    };
    Ok((t, info))
}

fn stream(g: &Global, id: u64) -> RngStream {
    RngStream::new(g.seed, id)
}

pub fn run(cmd: &Command, g: &Global, out: &mut impl Write) -> Result<(), CliError> {
    let report = match cmd {
        Command::Count { n } => count(*n, g)?,
        Command::CountRestricted {
            n,
            r,
            s,
            h,
            w,
            product,
        } => count_restricted_cmd(*n, *r, *s, *h, *w, *product, g)?,
        Command::Asymptotic { n, h, w, joint } => asymptotic(n, h, w, *joint, g)?,
        Command::FreimanSweep {
            u_min,
            u_max,
            steps,
            tilt,
        } => freiman_sweep(*u_min, *u_max, *steps, *tilt, g)?,
        Command::Lemma1Grid {
            r_min,
            r_max,
            r_steps,
            theta_steps,
        } => lemma1_grid(*r_min, *r_max, *r_steps, *theta_steps, g)?,
        Command::Bound { n, constant, k } => bound(*n, *constant, *k, g)?,
        Command::Sample { n, samples, method } => return sample(*n, *samples, *method, g, out),
        Command::SampleSurrogate { n, k, samples } => {
            return sample_surrogate_cmd(*n, *k, *samples, g, out)
        }
        Command::Wilf {
            n,
            samples,
            method,
            series,
        } => wilf(*n, *samples, *method, *series, g)?,
        Command::Macdonald { n, samples, method } => macdonald(*n, *samples, *method, g)?,
        Command::Pk { k, samples, a } => pk(k, *samples, *a, g)?,
        Command::Chernoff {
            kind,
            j,
            d,
            beta,
            n,
            k,
            samples,
        } => chernoff(*kind, *j, *d, *beta, *n, *k, *samples, g)?,
        Command::Tv {
            n,
            k,
            samples,
            method,
        } => tv(*n, *k, *samples, *method, g)?,
    };
    report.write(g.format, out)?;
    Ok(())
}

fn count(n: u64, g: &Global) -> Result<Report, CliError> {
    ensure(n <= COUNT_MAX, || format!("n = {n} exceeds {COUNT_MAX}"))?;
    let p = count_partitions(n).to_str_radix(10);
    Ok(Report::new("count", g.seed, json!({ "n": n, "count": p })).text(p))
}

fn count_restricted_cmd(
    n: u64,
    r: Option<u64>,
    s: Option<u64>,
    h: Option<f64>,
    w: Option<f64>,
    product: bool,
    g: &Global,
) -> Result<Report, CliError> {
    ensure(n <= COUNT_MAX, || format!("n = {n} exceeds {COUNT_MAX}"))?;
    match (r, s, h, w) {
        (Some(r), Some(s), None, None) => {
            let (c, method) = if product {
                (coeff_from_product(n, r, s)?, "product")
            } else {
                (count_restricted(n, r, s), "recursion")
            };
            let c = c.to_str_radix(10);
            let body = json!({ "n": n, "r": r, "s": s, "count": c, "method": method });
            Ok(Report::new("count-restricted", g.seed, body).text(c))
        }
        (None, None, Some(h), Some(w)) => {
            let jt = joint_tail(n, h, w)?;
            let text = format!("{}/{} = {}", jt.numerator, jt.denominator, jt.value);
            Ok(Report::new("count-restricted", g.seed, jt).text(text))
        }
        _ => Err(invalid("give either --r and --s or --h and --w")),
    }
}

fn asymptotic(n: &[u64], h: &[f64], w: &[f64], joint: bool, g: &Global) -> Result<Report, CliError> {
    ensure(h.is_empty() == w.is_empty(), || "--h and --w go together".into())?;
    ensure(!joint || !h.is_empty(), || "--joint needs --h and --w".into())?;
    for &m in n {
        ensure((1..=COUNT_MAX).contains(&m), || format!("n = {m} must lie in [1, {COUNT_MAX}]"))?;
    }
    for &x in h.iter().chain(w) {
        ensure(x > 0.0 && x.is_finite(), || format!("h and w must be positive, got {x}"))?;
    }
    let mut rows = Vec::new();
    for &m in n {
        if h.is_empty() {
            rows.push(hardy_ramanujan_band(m)?);
            continue;
        }
        for &hh in h {
            for &ww in w {
                rows.push(if joint {
                    joint_tail_band(m, hh, ww)?
                } else {
                    restricted_band(m, hh, ww)?
                });
            }
        }
    }
    Ok(Report::new("asymptotic", g.seed, rows))
}

#[derive(Serialize)]
struct FreimanRow {
    u_re: f64,
    u_im: f64,
    terms: u64,
    remainder_re: f64,
    remainder_im: f64,
    remainder_abs: f64,
    /// `|remainder| / |u|`.
    ratio: f64,
}

fn freiman_sweep(u_min: f64, u_max: f64, steps: u32, tilt: f64, g: &Global) -> Result<Report, CliError> {
    ensure(u_min > 0.0 && u_min < u_max, || "need 0 < --u-min < --u-max".into())?;
    ensure(steps >= 1, || "--steps must be positive".into())?;
    ensure(tilt.abs() <= FREIMAN_WEDGE, || {
        format!("|tilt| must be at most {FREIMAN_WEDGE}")
    })?;
    let mut rows = Vec::new();
    for i in 0..=steps {
        let t = f64::from(i) / f64::from(steps);
        let re = u_max * (u_min / u_max).powf(t);
        let u = Complex64::new(re, tilt * re);
        let rem = freiman_remainder(u)?;
        rows.push(FreimanRow {
            u_re: u.re,
            u_im: u.im,
            terms: freiman_terms(u.re),
            remainder_re: rem.re,
            remainder_im: rem.im,
            remainder_abs: rem.norm(),
            ratio: rem.norm() / u.norm(),
        });
    }
    Ok(Report::new("freiman-sweep", g.seed, rows))
}

#[derive(Serialize)]
struct GridRow {
    #[serde(flatten)]
    check: Lemma1Check,
    holds: bool,
}

fn lemma1_grid(r_min: f64, r_max: f64, r_steps: u32, theta_steps: u32, g: &Global) -> Result<Report, CliError> {
    ensure(r_min > 0.0 && r_min <= r_max && r_max < 1.0, || {
        "need 0 < --r-min <= --r-max < 1".into()
    })?;
    ensure(r_steps >= 1 && theta_steps >= 1, || "step counts must be positive".into())?;
    let pi = std::f64::consts::PI;
    let mut rows = Vec::new();
    for i in 0..r_steps {
        let r = if r_steps == 1 {
            r_min
        } else {
            r_min + (r_max - r_min) * f64::from(i) / f64::from(r_steps - 1)
        };
        for j in 1..=theta_steps {
            let theta = -pi + 2.0 * pi * f64::from(j) / f64::from(theta_steps);
            let check = lemma1_bound_check(r, theta)?;
            rows.push(GridRow {
                check,
                holds: check.holds(),
            });
        }
    }
    Ok(Report::new("lemma1-grid", g.seed, rows))
}

fn bound(n: u64, constant: f64, k: Option<u64>, g: &Global) -> Result<Report, CliError> {
    ensure(constant.is_finite(), || "--constant must be finite".into())?;
    let b = headline_bound(n, constant)?;
    let ra = k.map(rousseau_ali_lower).transpose()?;
    let body = json!({ "n": n, "constant": constant, "bound": b, "k": k, "binomial_lower": ra });
    Ok(Report::new("bound", g.seed, body).text(b.to_string()))
}

fn sample(n: u32, samples: u64, method: Sampler, g: &Global, out: &mut impl Write) -> Result<(), CliError> {
    positive_samples(samples)?;
    ensure(g.format != Format::Csv, || "sample streams are JSON lines".into())?;
    let st = stream(g, 0);
    let mut rng = st.rng();
    match method {
        Sampler::Exact => {
            exact_table_n(n)?;
            let (t, info) = table(g, n)?;
            header(out, "sample", g, samples, Some(&info), json!({ "n": n, "method": "exact" }))?;
            for _ in 0..samples {
                let p = sample_uniform_exact(n, &mut rng, &t)?;
                serde_json::to_writer(&mut *out, &p).map_err(|e| CliError::Io(e.to_string()))?;
                writeln!(out)?;
            }
        }
        Sampler::Boltzmann => {
            header(out, "sample", g, samples, None, json!({ "n": n, "method": "boltzmann" }))?;
            let mut stats = BoltzmannStats::default();
            for _ in 0..samples {
                let p = sample_boltzmann(n, &mut rng, DEFAULT_RETRY_CAP, &mut stats)?;
                serde_json::to_writer(&mut *out, &p).map_err(|e| CliError::Io(e.to_string()))?;
                writeln!(out)?;
            }
            eprintln!("# boltzmann acceptance rate {:.6}", stats.acceptance_rate());
        }
    }
    Ok(())
}

fn header(
    out: &mut impl Write,
    command: &str,
    g: &Global,
    samples: u64,
    table: Option<&TableInfo>,
    params: serde_json::Value,
) -> Result<(), CliError> {
    let h = json!({
        "tool": "partlab",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "seed": g.seed,
        "stream_id": 0,
        "samples": samples,
        "table": table,
        "params": params,
    });
    writeln!(out, "{h}")?;
    Ok(())
}

fn sample_surrogate_cmd(n: u64, k: usize, samples: u64, g: &Global, out: &mut impl Write) -> Result<(), CliError> {
    positive_samples(samples)?;
    ensure(g.format != Format::Csv, || "sample streams are JSON lines".into())?;
    ensure(n >= 1 && k >= 1, || "need --n >= 1 and --k >= 1".into())?;
    header(out, "sample-surrogate", g, samples, None, json!({ "n": n, "k": k }))?;
    let mut rng = stream(g, 0).rng();
    for _ in 0..samples {
        let d = sample_surrogate(n, k, &mut rng)?;
        serde_json::to_writer(&mut *out, &d).map_err(|e| CliError::Io(e.to_string()))?;
        writeln!(out)?;
    }
    Ok(())
}

fn use_exact(method: Method, n: u32, cap: u32) -> bool {
    match method {
        Method::Auto => n <= cap,
        Method::Exact => true,
        Method::Mc => false,
    }
}

#[derive(Serialize)]
struct EstimateResult {
    n: u32,
    estimate: Estimate,
}

fn wilf(n: u32, samples: u64, method: Method, series: bool, g: &Global) -> Result<Report, CliError> {
    ensure(n >= 2 && n.is_multiple_of(2), || format!("n = {n} must be even and at least 2"))?;
    if series {
        ensure(method != Method::Mc, || "--series is exact only".into())?;
        ensure(n <= WILF_ENUMERATION_CAP, || {
            format!("--series enumerates; n = {n} exceeds {WILF_ENUMERATION_CAP}")
        })?;
        let s = FractionSeries::exact(n, WILF_ENUMERATION_CAP)?;
        return Ok(Report::new("wilf", g.seed, s.rows));
    }
    if use_exact(method, n, WILF_ENUMERATION_CAP) {
        ensure(n <= WILF_ENUMERATION_CAP, || {
            format!("exact enumeration is capped at n = {WILF_ENUMERATION_CAP}; use --method mc")
        })?;
        let e = wilf_fraction_exact(n)?;
        let text = e.value.to_string();
        return Ok(Report::new("wilf", g.seed, EstimateResult { n, estimate: e }).text(text));
    }
    positive_samples(samples)?;
    exact_table_n(n)?;
    let (t, info) = table(g, n)?;
    let e = wilf_fraction_mc(n, samples, stream(g, 0), &t)?;
    let text = format!("{} ± {}", e.value, e.stderr);
    Ok(Report::new("wilf", g.seed, EstimateResult { n, estimate: e })
        .samples(samples)
        .table(Some(info))
        .text(text))
}

#[derive(Serialize)]
struct MacdonaldResult {
    n: u32,
    comparable: Estimate,
    self_dual: Option<Estimate>,
    comparable_pairs: Option<u64>,
    total_pairs: Option<u64>,
    headline_bound: Option<f64>,
}

fn macdonald(n: u32, samples: u64, method: Method, g: &Global) -> Result<Report, CliError> {
    ensure(n >= 1, || "n must be at least 1".into())?;
    if use_exact(method, n, MACDONALD_ENUMERATION_CAP) {
        ensure(n <= MACDONALD_ENUMERATION_CAP, || {
            format!("exact enumeration is capped at n = {MACDONALD_ENUMERATION_CAP}; use --method mc")
        })?;
        let c = macdonald_comparable_exact(n)?;
        let text = c.estimate.value.to_string();
        let body = MacdonaldResult {
            n,
            comparable: c.estimate,
            self_dual: None,
            comparable_pairs: Some(c.comparable_pairs),
            total_pairs: Some(c.total_pairs),
            headline_bound: headline_bound(n.into(), 0.11).ok(),
        };
        return Ok(Report::new("macdonald", g.seed, body).text(text));
    }
    positive_samples(samples)?;
    exact_table_n(n)?;
    let (t, info) = table(g, n)?;
    let m = macdonald_comparable_mc(n, samples, stream(g, 0), &t)?;
    let text = format!("{} ± {}", m.comparable.value, m.comparable.stderr);
    let body = MacdonaldResult {
        n,
        comparable: m.comparable,
        self_dual: Some(m.self_dual),
        comparable_pairs: None,
        total_pairs: None,
        headline_bound: m.headline_bound,
    };
    Ok(Report::new("macdonald", g.seed, body)
        .samples(samples)
        .table(Some(info))
        .text(text))
}

#[derive(Serialize)]
struct PkRow {
    k: usize,
    estimate: Estimate,
    reference: Option<f64>,
}

fn pk(ks: &[usize], samples: u64, a: f64, g: &Global) -> Result<Report, CliError> {
    positive_samples(samples)?;
    ensure(ks.iter().all(|&k| k >= 1), || "every k must be at least 1".into())?;
    let mut rows = Vec::new();
    for &k in ks {
        rows.push(PkRow {
            k,
            estimate: surrogate_event_pk(k, samples, stream(g, k as u64))?,
            reference: pk_reference_curve(k as u64, a),
        });
    }
    Ok(Report::new("pk", g.seed, rows).samples(samples))
}

#[allow(clippy::too_many_arguments)]
fn chernoff(
    kind: BoundKind,
    j: Option<u64>,
    d: Option<f64>,
    beta: Option<f64>,
    n: Option<u64>,
    k: Option<u64>,
    samples: u64,
    g: &Global,
) -> Result<Report, CliError> {
    positive_samples(samples)?;
    let need = |name: &str| invalid(format!("--kind {kind:?} needs --{name}").to_lowercase());
    let st = stream(g, 0);
    let body = match kind {
        BoundKind::Sum => {
            let (j, d) = (j.ok_or_else(|| need("j"))?, d.ok_or_else(|| need("d"))?);
            ensure(j >= 1 && d > 0.0 && d < 1.0, || "need --j >= 1 and 0 < --d < 1".into())?;
            json!({ "kind": "sum", "j": j, "d": d, "check": chernoff_validate(j, d, samples, st)? })
        }
        BoundKind::Ratio => {
            let (j, beta) = (j.ok_or_else(|| need("j"))?, beta.ok_or_else(|| need("beta"))?);
            ensure(j >= 1 && beta > 1.0, || "need --j >= 1 and --beta > 1".into())?;
            json!({ "kind": "ratio", "j": j, "beta": beta, "check": ratio_bound_validate(j, beta, samples, st)? })
        }
        BoundKind::Overflow => {
            let (n, k) = (n.ok_or_else(|| need("n"))?, k.ok_or_else(|| need("k"))?);
            json!({ "kind": "overflow", "n": n, "k": k, "check": overflow_validate(n, k, samples, st)? })
        }
        BoundKind::Tie => {
            let (n, k) = (n.ok_or_else(|| need("n"))?, k.ok_or_else(|| need("k"))?);
            ensure(n >= 1 && k >= 1, || "need --n >= 1 and --k >= 1".into())?;
            json!({ "kind": "tie", "check": tie_validate(n, k, samples, st)? })
        }
    };
    Ok(Report::new("chernoff", g.seed, body).samples(samples))
}

fn tv(n: u32, k: usize, samples: u64, method: Method, g: &Global) -> Result<Report, CliError> {
    ensure(n >= 1 && k >= 1, || "need --n >= 1 and --k >= 1".into())?;
    let exact_ok = k == 1 && u64::from(n) <= TV_EXACT_MAX;
    let exact = match method {
        Method::Auto => exact_ok,
        Method::Exact => {
            ensure(exact_ok, || {
                format!("the exact distance needs k = 1 and n <= {TV_EXACT_MAX}")
            })?;
            true
        }
        Method::Mc => false,
    };
    if exact {
        let r = tv_distance_k1(n.into())?;
        let text = r.tv.to_string();
        return Ok(Report::new("tv", g.seed, json!({ "method": "exact", "report": r })).text(text));
    }
    positive_samples(samples)?;
    exact_table_n(n)?;
    let (t, info) = table(g, n)?;
    let r = tv_distance_mc(n, k, samples, stream(g, 0), &t, Binning::integer(n.into()))?;
    let text = format!("{} (noise floor {})", r.estimate.value, r.estimate.stderr);
    Ok(Report::new("tv", g.seed, json!({ "method": "monte-carlo", "report": r }))
        .samples(samples)
        .table(Some(info))
        .text(text))
}
