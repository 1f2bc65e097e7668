use std::path::PathBuf;

use pamd_core::acceptance::{run_all, CriterionOutcome, SuiteSize};
use pamd_core::asymptotics::{
    envelope_dormancy, envelope_no_dormancy, fit_scale, green_function_d3, growth_chain_d3,
    growth_rate_d12, rate_bound_d3, EnvelopeSpec, GreenValue, GrowthChainD3, GrowthD12,
    RateBoundD3, Scale, ScaleFit, SeriesPoint,
};
use pamd_core::estimate::EstimateSummary;
use pamd_core::fk::{estimate_annealed_u_grid, estimate_annealed_u_stirring};
use pamd_core::pam::solve_quenched;
use pamd_core::rng::RngStream;
use pamd_core::spectral::spectral_report;
use pamd_core::ssep::{sample_initial, simulate_ssep, stationarity_stats};
use pamd_core::{Error, Result};
use serde::Serialize;

use crate::config::{Estimator, ExperimentConfig};
use crate::output::{config_line, emit, json_document, num, Csv};

pub const ESTIMATE_HEADER: &str = "params_hash,t,n,mean,stderr,log_mean,log_mean_stderr,heavy_tail";

pub fn estimate_u(cfg: &ExperimentConfig) -> Result<()> {
    let params = cfg.params();
    let grid = cfg.grid();
    let est = match cfg.estimator {
        Estimator::Plain => estimate_annealed_u_grid(&params, &grid, cfg.replicas, cfg.seed)?,
        Estimator::Stirring => {
            estimate_annealed_u_stirring(&params, &grid, cfg.replicas, cfg.seed)?
        }
    };
    let hash = params.hash_hex();
    let mut csv = Csv::new(cfg, ESTIMATE_HEADER);
    for (t, e) in grid.iter().zip(&est) {
        csv.row(&[
            hash.clone(),
            num(*t),
            e.count().to_string(),
            num(e.mean()),
            num(e.stderr()),
            num(e.log_mean()),
            num(e.log_mean_stderr()),
            e.heavy_tail().to_string(),
        ]);
    }
    emit(cfg.out.as_deref(), &csv.into_string())
}

pub fn solve_pam(cfg: &ExperimentConfig) -> Result<()> {
    let params = cfg.params();
    let torus = params.torus();
    let mut rng = RngStream::new(cfg.seed, 0).rng();
    let init = sample_initial(&torus, params.p, &mut rng);
    let trace = simulate_ssep(init, &torus, params.rho, params.t, &mut rng)?;
    let field = solve_quenched(&trace, &params, params.t, cfg.tol)?;
    eprintln!(
        "total mass {} ({} accepted, {} rejected steps)",
        field.total_mass(),
        field.accepted_steps,
        field.rejected_steps
    );
    let mut text = config_line(cfg).into_bytes();
    field.write_csv(&mut text)?;
    emit(cfg.out.as_deref(), &String::from_utf8_lossy(&text))
}

pub fn spectral(cfg: &ExperimentConfig) -> Result<()> {
    let report = spectral_report(&cfg.params(), cfg.tol)?;
    emit(cfg.out.as_deref(), &json_document(cfg, &report)?)
}

#[derive(Serialize)]
struct Envelopes {
    no_dormancy: Option<EnvelopeSpec>,
    dormancy: Option<EnvelopeSpec>,
    green: Option<GreenValue>,
    rate_bound_d3: Option<RateBoundD3>,
    growth_d12: Option<GrowthD12>,
    growth_chain_d3: Option<GrowthChainD3>,
}

pub fn envelopes(cfg: &ExperimentConfig) -> Result<()> {
    let params = cfg.params();
    let low = params.d <= 2;
    let survival = params.gamma < 0.0;
    let growth = params.gamma > 0.0;
    let out = Envelopes {
        no_dormancy: if low {
            Some(envelope_no_dormancy(params.d, &params)?)
        } else {
            None
        },
        dormancy: if low && params.s0 > 0.0 && params.s1 > 0.0 {
            Some(envelope_dormancy(params.d, &params)?)
        } else {
            None
        },
        green: if low {
            None
        } else {
            Some(green_function_d3()?)
        },
        rate_bound_d3: if !low && survival {
            Some(rate_bound_d3(&params)?)
        } else {
            None
        },
        growth_d12: if low && growth {
            Some(growth_rate_d12(&params)?)
        } else {
            None
        },
        growth_chain_d3: if !low && growth {
            Some(growth_chain_d3(&params)?)
        } else {
            None
        },
    };
    emit(cfg.out.as_deref(), &json_document(cfg, &out)?)
}

/// Reads `t`, `log_mean`, `log_mean_stderr` columns of an `estimate-u` CSV
/// into a decay series `-log <U>`.
pub fn read_series(text: &str) -> Result<Vec<SeriesPoint>> {
    let mut lines = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| Error::Validation("empty series file".into()))?
        .split(',')
        .collect();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| *h == name)
            .ok_or_else(|| Error::Validation(format!("series lacks column {name}")))
    };
    let (ct, cv, cs) = (col("t")?, col("log_mean")?, col("log_mean_stderr")?);
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            let get = |i: usize| -> Result<f64> {
                f.get(i)
                    .and_then(|s| s.trim().parse().ok())
                    .ok_or_else(|| Error::Validation(format!("bad series row: {l}")))
            };
            Ok(SeriesPoint {
                t: get(ct)?,
                value: -get(cv)?,
                stderr: get(cs)?,
            })
        })
        .collect()
}

#[derive(Serialize)]
struct FitOutput {
    fit: ScaleFit,
    envelope: Option<EnvelopeSpec>,
}

pub fn fit(cfg: &ExperimentConfig) -> Result<()> {
    let input = cfg
        .input
        .as_ref()
        .ok_or_else(|| Error::Validation("fit needs \"input\"".into()))?;
    let series = read_series(&std::fs::read_to_string(input)?)?;
    let params = cfg.params();
    let scale = match cfg.scale {
        Some(s) => s,
        None => Scale::for_dim(params.d)?,
    };
    let fit = fit_scale(&series, scale)?;
    if let Some(out) = &cfg.out {
        let text = config_line(cfg) + &fit.plot_csv(&series);
        emit(Some(&plot_path(out)), &text)?;
    }
    let envelope = if params.d <= 2 {
        Some(envelope_no_dormancy(params.d, &params)?)
    } else {
        None
    };
    emit(
        cfg.out.as_deref(),
        &json_document(cfg, &FitOutput { fit, envelope })?,
    )
}

/// `fit.json` -> `fit.plot.csv`.
pub fn plot_path(out: &std::path::Path) -> PathBuf {
    out.with_extension("plot.csv")
}

#[derive(Serialize)]
struct EnvStats {
    site_marginal: EstimateSummary,
    pair: EstimateSummary,
    density: EstimateSummary,
    occupation_fraction: EstimateSummary,
    count_violations: u64,
}

pub fn env_stats(cfg: &ExperimentConfig) -> Result<()> {
    let params = cfg.params();
    let st = stationarity_stats(
        &params.torus(),
        params.p,
        params.rho,
        params.t,
        cfg.replicas,
        cfg.seed,
    )?;
    let out = EnvStats {
        site_marginal: st.site_marginal.summary(),
        pair: st.pair.summary(),
        density: st.density.summary(),
        occupation_fraction: st.occupation_fraction.summary(),
        count_violations: st.count_violations,
    };
    emit(cfg.out.as_deref(), &json_document(cfg, &out)?)
}

/// Runs the suite, prints one line per criterion, and reports whether all passed.
pub fn reproduce(cfg: &ExperimentConfig, quick: bool) -> Result<bool> {
    let size = if quick {
        SuiteSize::Quick
    } else {
        SuiteSize::Full
    };
    let outcomes: Vec<CriterionOutcome> = run_all(size, cfg.seed);
    for o in &outcomes {
        println!("{}", o.line());
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!(
        "{} of {} criteria passed",
        outcomes.len() - failed,
        outcomes.len()
    );
    if let Some(out) = &cfg.out {
        emit(Some(out), &json_document(cfg, &outcomes)?)?;
    }
    Ok(failed == 0)
}
