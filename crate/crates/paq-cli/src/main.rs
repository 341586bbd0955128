//! The `paq` command-line front end: state ingestion, command dispatch, sweep
//! orchestration, and bit-exact result serialization.
//!
//! Exit codes map the library error taxonomy: validation and I/O/schema
//! errors exit 2, capacity 3, convergence 4, domain 5. `verify` exits 1 when
//! any check fails.

mod args;
mod output;

use clap::Parser;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use paq_core::error::Error as CoreError;
use paq_core::exponents::{EaParams, EaSide, ModerateKind, ModerateSchedule};
use paq_core::verifier::BatteryConfig;
use paq_core::{
    conditional_entropy, ea_achievability_bound, ea_converse_bound, exact_pa_distance, fixtures,
    iid_extend, induced_cq, moderate_ea_table, moderate_table, mutual_information,
    pa_achievability_exponent, pa_converse_exponent, sampled_pa_distance, sandwich_check,
    wiretap_converse_exponent, wiretap_d1, wiretap_error_exponent, wiretap_secrecy_exponent,
    CQState, EntropyKind, ExponentReport, GFContext, MutualKind, Subsystem, WiretapChannel,
    WiretapD1Mode,
};

use args::{Cli, Command, Family, GlobalArgs, Side, SimMode, Units};
use output::{emit, fmt_f64, from_display, to_display, units_label, Csv, Envelope};

fn main() {
    let cli = Cli::parse();
    std::process::exit(run(cli));
}

fn run(cli: Cli) -> i32 {
    if cli.global.threads > 0 {
        // configuring the global pool can only happen once; later calls fail
        // harmlessly if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.global.threads)
            .build_global();
    }
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// An input state plus the content hash of its source bytes.
struct LoadedState {
    state: CQState,
    sha256: String,
}

fn sha_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn read_file(path: &std::path::Path) -> Result<String, CoreError> {
    std::fs::read_to_string(path)
        .map_err(|e| CoreError::validation(format!("cannot read {}: {e}", path.display())))
}

fn parse_json<T: serde::de::DeserializeOwned>(
    text: &str,
    path: &std::path::Path,
) -> Result<T, CoreError> {
    serde_json::from_str(text).map_err(|e| {
        CoreError::validation(format!(
            "{}:{}:{}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })
}

fn load_state(global: &GlobalArgs) -> Result<LoadedState, CoreError> {
    if let Some(name) = &global.fixture {
        let state = fixtures::by_name(name)?;
        let canonical = serde_json::to_vec(&state).expect("serializable");
        return Ok(LoadedState {
            state,
            sha256: sha_hex(&canonical),
        });
    }
    let path = global.state.as_ref().ok_or_else(|| {
        CoreError::validation("this command needs --state FILE or --fixture NAME")
    })?;
    let text = read_file(path)?;
    let state: CQState = parse_json(&text, path)?;
    Ok(LoadedState {
        state,
        sha256: sha_hex(text.as_bytes()),
    })
}

fn load_channel(global: &GlobalArgs) -> Result<(WiretapChannel, String), CoreError> {
    let path = global.state.as_ref().ok_or_else(|| {
        CoreError::validation("this command needs --state FILE with a wiretap channel")
    })?;
    let text = read_file(path)?;
    let channel: WiretapChannel = parse_json(&text, path)?;
    Ok((channel, sha_hex(text.as_bytes())))
}

fn uniform_prior(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

/// Scales the log-scale fields of a serialized exponent report into display
/// units and flags vacuous bounds.
fn display_report(report: &ExponentReport, units: Units) -> Value {
    let mut v = serde_json::to_value(report).expect("serializable");
    let scale = |x: &mut Value| {
        if let Some(f) = x.as_f64() {
            *x = json!(to_display(f, units));
        }
    };
    scale(&mut v["rate"]);
    scale(&mut v["exponent"]);
    scale(&mut v["threshold"]);
    scale(&mut v["raw"]["exponent"]);
    v["vacuous"] = json!(report.exponent == 0.0);
    v
}

fn dispatch(cli: &Cli) -> Result<i32, CoreError> {
    let g = &cli.global;
    let units = g.units;
    match &cli.command {
        Command::Entropy { alpha, kind } => {
            let loaded = load_state(g)?;
            let mut rows_json = Vec::new();
            let mut rows_csv = Vec::new();
            for k in kind {
                for &a in alpha {
                    let (value, converged) = entropy_value(k, &loaded.state, a)?;
                    let disp = to_display(value, units);
                    rows_json.push(json!({
                        "kind": k,
                        "alpha": a,
                        "value": disp,
                        "converged": converged,
                    }));
                    rows_csv.push(vec![
                        k.clone(),
                        fmt_f64(a),
                        fmt_f64(disp),
                        converged.to_string(),
                    ]);
                }
            }
            let envelope = Envelope {
                command: "entropy".into(),
                config: json!({
                    "alpha": alpha,
                    "kind": kind,
                    "seed": g.seed,
                    "fixture": g.fixture,
                    "state": g.state.as_ref().map(|p| p.display().to_string()),
                }),
                state_sha256: Some(loaded.sha256),
                units: units_label(units).into(),
                results: json!({ "rows": rows_json }),
            };
            let csv = Csv {
                header: vec!["kind", "alpha", "value", "converged"],
                rows: rows_csv,
            };
            emit(&envelope, Some(csv), g.format, &g.out).map_err(io_err)?;
            Ok(0)
        }

        Command::Exponent {
            family,
            side,
            rate,
            n,
            prior,
            f_w,
            v_const,
            prob_w,
        } => {
            let rates_nats: Vec<f64> = rate.iter().map(|&r| from_display(r, units)).collect();
            if matches!(family, Family::Ea) {
                let (pf, pv, pp) = ea_required(f_w, v_const, prob_w)?;
                let ea_side = match side {
                    Side::Ach => EaSide::Ach,
                    Side::Conv => EaSide::Conv,
                    Side::Error => {
                        return Err(CoreError::validation("family ea supports sides ach and conv"))
                    }
                };
                return ea_rows(g, units, ea_side, pf, pv, pp, &rates_nats, n, Some(rate));
            }
            let (state, sha, used_prior) = exponent_state(g, family, side, prior)?;
            let mut reports = Vec::new();
            let mut rows_csv = Vec::new();
            for &r in &rates_nats {
                let report = match (family, side) {
                    (Family::Pa, Side::Ach) => pa_achievability_exponent(&state, r)?,
                    (Family::Pa, Side::Conv) => pa_converse_exponent(&state, r)?,
                    (Family::Pa, Side::Error) => {
                        return Err(CoreError::validation("family pa supports sides ach and conv"))
                    }
                    (Family::Wiretap, Side::Ach) => wiretap_secrecy_exponent(&state, r)?,
                    (Family::Wiretap, Side::Conv) => wiretap_converse_exponent(&state, r)?,
                    (Family::Wiretap, Side::Error) => wiretap_error_exponent(&state, r)?,
                    (Family::Ea, _) => unreachable!("handled above"),
                }
                .with_bounds(n);
                for &nn in n {
                    rows_csv.push(vec![
                        format!("{family:?}").to_lowercase(),
                        format!("{side:?}").to_lowercase(),
                        fmt_f64(to_display(r, units)),
                        fmt_f64(to_display(report.exponent, units)),
                        fmt_f64(report.alpha_star),
                        fmt_f64(to_display(report.threshold, units)),
                        nn.to_string(),
                        fmt_f64(report.bound_at(nn)),
                    ]);
                }
                reports.push(display_report(&report, units));
            }
            let envelope = Envelope {
                command: "exponent".into(),
                config: json!({
                    "family": format!("{family:?}").to_lowercase(),
                    "side": format!("{side:?}").to_lowercase(),
                    "rate": rate,
                    "n": n,
                    "prior": used_prior,
                    "seed": g.seed,
                    "fixture": g.fixture,
                    "state": g.state.as_ref().map(|p| p.display().to_string()),
                }),
                state_sha256: Some(sha),
                units: units_label(units).into(),
                results: json!({ "reports": reports }),
            };
            let csv = Csv {
                header: vec![
                    "family", "side", "rate", "exponent", "alpha_star", "threshold", "n", "bound",
                ],
                rows: rows_csv,
            };
            emit(&envelope, Some(csv), g.format, &g.out).map_err(io_err)?;
            Ok(0)
        }

        Command::Simulate {
            u,
            v,
            n,
            mode,
            trials,
            breakdown,
            sandwich,
        } => {
            let loaded = load_state(g)?;
            let mut results = Vec::new();
            let mut rows_csv = Vec::new();
            for &nn in n {
                if *sandwich {
                    let rep = sandwich_check(&loaded.state, *u, *v, nn)?;
                    rows_csv.push(vec![
                        nn.to_string(),
                        fmt_f64(to_display(rep.rate, units)),
                        fmt_f64(rep.exact),
                        fmt_f64(rep.upper),
                        fmt_f64(rep.lower),
                        rep.pass().to_string(),
                    ]);
                    let mut val = serde_json::to_value(&rep).expect("serializable");
                    val["rate"] = json!(to_display(rep.rate, units));
                    val["achievability"] = display_report(&rep.achievability, units);
                    val["converse"] = display_report(&rep.converse, units);
                    results.push(val);
                } else {
                    let extended = iid_extend(&loaded.state, nn)?;
                    let ctx = GFContext::new(nn * u)?;
                    let pa = match mode {
                        SimMode::Exact => exact_pa_distance(&extended, ctx, nn * v, *breakdown)?,
                        SimMode::Mc => sampled_pa_distance(&extended, ctx, nn * v, *trials, g.seed)?,
                    };
                    rows_csv.push(vec![
                        nn.to_string(),
                        fmt_f64(to_display((nn * v) as f64 * std::f64::consts::LN_2, units)),
                        fmt_f64(pa.value),
                        pa.std_error.map(fmt_f64).unwrap_or_default(),
                        pa.family_size.to_string(),
                        pa.evaluated.to_string(),
                    ]);
                    results.push(json!({ "n": nn, "pa": serde_json::to_value(&pa).unwrap() }));
                }
            }
            let envelope = Envelope {
                command: "simulate".into(),
                config: json!({
                    "u": u, "v": v, "n": n,
                    "mode": format!("{mode:?}").to_lowercase(),
                    "trials": trials,
                    "breakdown": breakdown,
                    "sandwich": sandwich,
                    "seed": g.seed,
                    "fixture": g.fixture,
                    "state": g.state.as_ref().map(|p| p.display().to_string()),
                }),
                state_sha256: Some(loaded.sha256),
                units: units_label(units).into(),
                results: json!({ "runs": results }),
            };
            let csv = if *sandwich {
                Csv {
                    header: vec!["n", "rate", "exact", "upper", "lower", "pass"],
                    rows: rows_csv,
                }
            } else {
                Csv {
                    header: vec!["n", "rate", "value", "std_error", "family_size", "evaluated"],
                    rows: rows_csv,
                }
            };
            emit(&envelope, Some(csv), g.format, &g.out).map_err(io_err)?;
            Ok(0)
        }

        Command::Wiretap {
            m,
            l,
            prior,
            mode,
            trials,
        } => {
            let (channel, sha) = load_channel(g)?;
            let prior = prior
                .clone()
                .unwrap_or_else(|| uniform_prior(channel.alphabet_size()));
            let d1_mode = match mode {
                SimMode::Exact => WiretapD1Mode::Exact,
                SimMode::Mc => WiretapD1Mode::MonteCarlo,
            };
            let d1 = wiretap_d1(&channel, &prior, *m, *l, d1_mode, *trials, g.seed)?;
            let eve = induced_cq(&channel, &prior, Subsystem::E)?;
            let bob = induced_cq(&channel, &prior, Subsystem::B)?;
            let log_l = (*l as f64).ln();
            let log_ml = (*m as f64 * *l as f64).ln();
            let secrecy = wiretap_secrecy_exponent(&eve, log_l)?;
            let converse = wiretap_converse_exponent(&eve, log_l)?;
            let error = wiretap_error_exponent(&bob, log_ml)?;
            let envelope = Envelope {
                command: "wiretap".into(),
                config: json!({
                    "m": m, "l": l, "prior": prior,
                    "mode": format!("{mode:?}").to_lowercase(),
                    "trials": trials,
                    "seed": g.seed,
                    "state": g.state.as_ref().map(|p| p.display().to_string()),
                }),
                state_sha256: Some(sha),
                units: units_label(units).into(),
                results: json!({
                    "d1": serde_json::to_value(&d1).unwrap(),
                    "secrecy": display_report(&secrecy, units),
                    "converse": display_report(&converse, units),
                    "error": display_report(&error, units),
                    "upper_at_n1": secrecy.bound_at(1),
                    "lower_at_n1": converse.bound_at(1),
                }),
            };
            emit(&envelope, None, g.format, &g.out).map_err(io_err)?;
            Ok(0)
        }

        Command::Verify {
            checks,
            trace_trials,
            concavity_trials,
            helstrom_trials,
        } => {
            let cfg = BatteryConfig {
                trace_trials: *trace_trials,
                concavity_trials: *concavity_trials,
                helstrom_trials: *helstrom_trials,
                seed: g.seed.wrapping_add(2024),
                ..BatteryConfig::default()
            };
            let reports = paq_core::run_battery(checks, &cfg)?;
            let all_pass = reports.iter().all(|r| r.pass);
            let rows_csv = reports
                .iter()
                .map(|r| {
                    vec![
                        r.name.clone(),
                        r.trials.to_string(),
                        fmt_f64(r.worst_violation),
                        fmt_f64(r.slack),
                        r.pass.to_string(),
                        r.seed.to_string(),
                        r.excluded.to_string(),
                    ]
                })
                .collect();
            let envelope = Envelope {
                command: "verify".into(),
                config: json!({
                    "checks": checks,
                    "trace_trials": trace_trials,
                    "concavity_trials": concavity_trials,
                    "helstrom_trials": helstrom_trials,
                    "seed": g.seed,
                }),
                state_sha256: None,
                units: units_label(units).into(),
                results: serde_json::to_value(&reports).unwrap(),
            };
            let csv = Csv {
                header: vec![
                    "name", "trials", "worst_violation", "slack", "pass", "seed", "excluded",
                ],
                rows: rows_csv,
            };
            emit(&envelope, Some(csv), g.format, &g.out).map_err(io_err)?;
            Ok(if all_pass { 0 } else { 1 })
        }

        Command::Moderate {
            kind,
            t,
            n,
            f_w,
            v_const,
            prob_w,
        } => {
            let sched = ModerateSchedule::new(*t, n.clone())?;
            if kind == "ea-ach" || kind == "ea-conv" {
                let (pf, pv, pp) = ea_required(f_w, v_const, prob_w)?;
                let side = if kind == "ea-ach" { EaSide::Ach } else { EaSide::Conv };
                let table = moderate_ea_table(pf, pv, pp, side, &sched)?;
                let rows_csv = table
                    .rows
                    .iter()
                    .map(|r| {
                        vec![
                            r.n.to_string(),
                            fmt_f64(r.a_n),
                            fmt_f64(to_display(r.rate, units)),
                            r.in_window.to_string(),
                            r.bound.map(fmt_f64).unwrap_or_default(),
                            fmt_f64(r.normalized_exponent),
                        ]
                    })
                    .collect();
                let envelope = Envelope {
                    command: "moderate".into(),
                    config: json!({
                        "kind": kind, "t": t, "n": n,
                        "f_w": pf, "v_const": pv, "prob_w": pp,
                        "seed": g.seed,
                    }),
                    state_sha256: None,
                    units: units_label(units).into(),
                    results: serde_json::to_value(&table).unwrap(),
                };
                let csv = Csv {
                    header: vec!["n", "a_n", "rate", "in_window", "bound", "normalized_exponent"],
                    rows: rows_csv,
                };
                emit(&envelope, Some(csv), g.format, &g.out).map_err(io_err)?;
                return Ok(0);
            }
            let mk = match kind.as_str() {
                "pa-ach" => ModerateKind::PaAch,
                "pa-conv" => ModerateKind::PaConv,
                "wt-ach" => ModerateKind::WtAch,
                "wt-conv" => ModerateKind::WtConv,
                other => {
                    return Err(CoreError::validation(format!(
                        "unknown kind '{other}' (expected pa-ach, pa-conv, wt-ach, wt-conv, \
                         ea-ach, or ea-conv)"
                    )))
                }
            };
            let loaded = load_state(g)?;
            let table = moderate_table(&loaded.state, mk, &sched)?;
            let rows_csv = table
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        fmt_f64(r.a_n),
                        fmt_f64(to_display(r.rate, units)),
                        fmt_f64(to_display(r.exponent, units)),
                        fmt_f64(r.bound),
                        fmt_f64(r.normalized_exponent),
                    ]
                })
                .collect();
            let envelope = Envelope {
                command: "moderate".into(),
                config: json!({
                    "kind": kind, "t": t, "n": n,
                    "seed": g.seed,
                    "fixture": g.fixture,
                    "state": g.state.as_ref().map(|p| p.display().to_string()),
                }),
                state_sha256: Some(loaded.sha256),
                units: units_label(units).into(),
                results: serde_json::to_value(&table).unwrap(),
            };
            let csv = Csv {
                header: vec!["n", "a_n", "rate", "exponent", "bound", "normalized_exponent"],
                rows: rows_csv,
            };
            emit(&envelope, Some(csv), g.format, &g.out).map_err(io_err)?;
            Ok(0)
        }

        Command::Ea {
            side,
            f_w,
            v_const,
            prob_w,
            rate,
            n,
        } => {
            let rates_nats: Vec<f64> = rate.iter().map(|&r| from_display(r, units)).collect();
            let ea_side = match side {
                Side::Ach => EaSide::Ach,
                Side::Conv => EaSide::Conv,
                Side::Error => {
                    return Err(CoreError::validation("ea supports sides ach and conv"))
                }
            };
            ea_rows(g, units, ea_side, *f_w, *v_const, *prob_w, &rates_nats, n, Some(rate))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn ea_rows(
    g: &GlobalArgs,
    units: Units,
    side: EaSide,
    f_w: f64,
    v_const: f64,
    prob_w: f64,
    rates_nats: &[f64],
    ns: &[u64],
    display_rates: Option<&[f64]>,
) -> Result<i32, CoreError> {
    let mut rows_json = Vec::new();
    let mut rows_csv = Vec::new();
    for (i, &r) in rates_nats.iter().enumerate() {
        for &n in ns {
            let params = EaParams::new(f_w, v_const, prob_w, r, n)?;
            let bound = match side {
                EaSide::Ach => ea_achievability_bound(&params)?,
                EaSide::Conv => ea_converse_bound(&params)?,
            };
            let rate_disp = display_rates.map_or(to_display(r, units), |dr| dr[i]);
            rows_json.push(json!({
                "rate": rate_disp,
                "n": n,
                "raw": bound.raw,
                "clamped": bound.clamped,
                "vacuous": bound.clamped != bound.raw,
            }));
            rows_csv.push(vec![
                fmt_f64(rate_disp),
                n.to_string(),
                fmt_f64(bound.raw),
                fmt_f64(bound.clamped),
            ]);
        }
    }
    let envelope = Envelope {
        command: "ea".into(),
        config: json!({
            "side": match side { EaSide::Ach => "ach", EaSide::Conv => "conv" },
            "f_w": f_w, "v_const": v_const, "prob_w": prob_w,
            "rate": display_rates,
            "n": ns,
            "seed": g.seed,
        }),
        state_sha256: None,
        units: units_label(units).into(),
        results: json!({ "rows": rows_json }),
    };
    let csv = Csv {
        header: vec!["rate", "n", "raw", "clamped"],
        rows: rows_csv,
    };
    emit(&envelope, Some(csv), g.format, &g.out).map_err(io_err)?;
    Ok(0)
}

fn ea_required(
    f_w: &Option<f64>,
    v_const: &Option<f64>,
    prob_w: &Option<f64>,
) -> Result<(f64, f64, f64), CoreError> {
    match (f_w, v_const, prob_w) {
        (Some(f), Some(v), Some(p)) => Ok((*f, *v, *p)),
        _ => Err(CoreError::validation(
            "entropy-accumulation bounds need --f-w, --v-const, and --prob-w",
        )),
    }
}

/// Resolves the c-q state an exponent command operates on. For the wiretap
/// family the input may be either a c-q state (used as-is) or a wiretap
/// channel file, in which case the prior induces the E-side (ach/conv) or
/// B-side (error) marginal.
fn exponent_state(
    g: &GlobalArgs,
    family: &Family,
    side: &Side,
    prior: &Option<Vec<f64>>,
) -> Result<(CQState, String, Option<Vec<f64>>), CoreError> {
    if matches!(family, Family::Wiretap) {
        if let Some(path) = &g.state {
            let text = read_file(path)?;
            let value: Value = parse_json(&text, path)?;
            if value.get("outputs").is_some() {
                let channel: WiretapChannel = parse_json(&text, path)?;
                let prior = prior
                    .clone()
                    .unwrap_or_else(|| uniform_prior(channel.alphabet_size()));
                let keep = if matches!(side, Side::Error) {
                    Subsystem::B
                } else {
                    Subsystem::E
                };
                let state = induced_cq(&channel, &prior, keep)?;
                return Ok((state, sha_hex(text.as_bytes()), Some(prior)));
            }
        }
    }
    let loaded = load_state(g)?;
    Ok((loaded.state, loaded.sha256, None))
}

fn entropy_value(kind: &str, state: &CQState, alpha: f64) -> Result<(f64, bool), CoreError> {
    let result = match kind {
        "down" => conditional_entropy(EntropyKind::Down, state, alpha),
        "star" => conditional_entropy(EntropyKind::Star, state, alpha),
        "down_star" => conditional_entropy(EntropyKind::DownStar, state, alpha),
        "i_down" => mutual_information(MutualKind::Down, state, alpha),
        "i_star" => mutual_information(MutualKind::Star, state, alpha),
        other => {
            return Err(CoreError::validation(format!(
                "unknown entropy kind '{other}' (expected down, star, down_star, i_down, i_star)"
            )))
        }
    };
    match result {
        Ok(v) => Ok((v, true)),
        // report the best value reached with the convergence flag cleared
        Err(CoreError::Convergence { best, .. }) => Ok((best, false)),
        Err(e) => Err(e),
    }
}

fn io_err(e: std::io::Error) -> CoreError {
    CoreError::validation(format!("output error: {e}"))
}
