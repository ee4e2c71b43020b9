//! Convergence studies.

use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ifs::Attractor;
use crate::kernel_helmholtz::{integrate_helmholtz_singular_with, HelmholtzKernel};
use crate::kernel_phi_t::{integrate_phi_t_at_fixed_point_with, integrate_phi_t_double_with, SingularOptions};
use crate::partition::{level_h, partition_lh, rule_from_partition, uniform_level};
use crate::quadrature::{apply_double, apply_double_symmetric, apply_single};

use super::config::{ExperimentConfig, KernelSpec};

/// Reference level used when a level-based study names neither a reference
/// nor an exact value: 13 on the line, 7 in the plane.
pub fn default_reference_level(attractor: &Attractor) -> usize {
    if attractor.ambient_dim() == 1 {
        13
    } else {
        7
    }
}

/// Evaluates the configured integral at resolution `h`.
pub fn evaluate(attractor: &Attractor, kernel: &KernelSpec, h: f64, opts: SingularOptions) -> Result<Complex64> {
    match kernel {
        KernelSpec::PhiT { t } => Ok(Complex64::new(integrate_phi_t_double_with(attractor, *t, h, opts)?, 0.0)),
        KernelSpec::PhiTFixedPoint { t, m } => Ok(Complex64::new(
            integrate_phi_t_at_fixed_point_with(attractor, *t, *m, h, opts)?,
            0.0,
        )),
        KernelSpec::Helmholtz { k, n, c_osc } => {
            let n = n.unwrap_or(attractor.ambient_dim());
            let kernel = match c_osc {
                Some(c) => HelmholtzKernel::with_c_osc(*k, n, *c)?,
                None => HelmholtzKernel::new(*k, n)?,
            };
            integrate_helmholtz_singular_with(attractor, &kernel, h, opts)
        }
        KernelSpec::Smooth { function, c } => {
            let c = c.unwrap_or(1.0);
            let f = *function;
            let rule = rule_from_partition(&partition_lh(attractor, h)?);
            let v: f64 = if f.is_double() {
                let g = move |x, y| f.eval2(c, x, y);
                if opts.symmetric {
                    apply_double_symmetric(&rule, &g)?
                } else {
                    apply_double(&rule, &rule, &g)?
                }
            } else {
                apply_single(&rule, |x| f.eval1(c, x))?
            };
            Ok(Complex64::new(v, 0.0))
        }
    }
}

/// One level of a study.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub ell: usize,
    pub n: usize,
    pub h: f64,
    pub value: Complex64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub eoc: Option<f64>,
}

/// Study description carried alongside the rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportMeta {
    pub attractor: String,
    pub kernel: String,
    pub reference: Complex64,
    /// `"exact"`, `"level ℓ"` or `"h = …"`.
    pub reference_source: String,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub meta: ReportMeta,
    pub rows: Vec<ReportRow>,
}

/// `log(e_prev/e)/log(h_prev/h)`, or `None` when undefined.
pub fn eoc(err_prev: f64, err: f64, h_prev: f64, h: f64) -> Option<f64> {
    let v = (err_prev / err).ln() / (h_prev / h).ln();
    v.is_finite().then_some(v)
}

/// Least-squares slope of `ys` against `xs`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

impl ConvergenceReport {
    /// Slope of `log(abs_err)` against `log N`.
    pub fn slope_vs_n(&self) -> f64 {
        let xs: Vec<f64> = self.rows.iter().map(|r| (r.n as f64).ln()).collect();
        let ys: Vec<f64> = self.rows.iter().map(|r| r.abs_err.ln()).collect();
        least_squares_slope(&xs, &ys)
    }

    /// EOCs recomputed from the stored `h` and `abs_err` columns.
    pub fn recompute_eoc(&self) -> Vec<Option<f64>> {
        let mut out = vec![None];
        for w in self.rows.windows(2) {
            out.push(eoc(w[0].abs_err, w[1].abs_err, w[0].h, w[1].h));
        }
        out.truncate(self.rows.len());
        out
    }
}

/// Runs a convergence study.
pub fn run_convergence(config: &ExperimentConfig) -> Result<ConvergenceReport> {
    config.validate()?;
    match config.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;
            pool.install(|| run_inner(config))
        }
        None => run_inner(config),
    }
}

fn run_inner(config: &ExperimentConfig) -> Result<ConvergenceReport> {
    let start = Instant::now();
    let attractor = config.build_attractor()?;
    let opts = SingularOptions { symmetric: config.symmetric, strict: config.strict };

    let mut study: Vec<(usize, f64)> = if config.levels.is_empty() {
        config.h.iter().map(|&h| (uniform_level(&attractor, h), h)).collect()
    } else {
        config.levels.iter().map(|&l| (l, level_h(&attractor, l))).collect()
    };
    study.sort_by(|a, b| b.1.total_cmp(&a.1));

    let (reference, reference_source) = match (config.exact, config.reference_level, config.reference_h) {
        (Some([re, im]), _, _) => (Complex64::new(re, im), "exact".to_string()),
        (None, _, Some(h)) => (evaluate(&attractor, &config.kernel, h, opts)?, format!("h = {h}")),
        (None, level, None) => {
            let level = level.unwrap_or_else(|| default_reference_level(&attractor));
            if let Some(&(max, _)) = study.iter().max_by_key(|s| s.0) {
                if level <= max {
                    return Err(Error::Config(format!(
                        "reference level {level} must be finer than every study level (max {max})"
                    )));
                }
            }
            let h = level_h(&attractor, level);
            let v = evaluate(&attractor, &config.kernel, h, opts).map_err(|e| Error::Row {
                ell: level,
                source: Box::new(e),
            })?;
            (v, format!("level {level}"))
        }
    };

    let mut rows: Vec<ReportRow> = Vec::with_capacity(study.len());
    for &(ell, h) in &study {
        let wrap = |e: Error| Error::Row { ell, source: Box::new(e) };
        let value = evaluate(&attractor, &config.kernel, h, opts).map_err(wrap)?;
        let n = partition_lh(&attractor, h).map_err(wrap)?.len();
        let abs_err = (value - reference).norm();
        let rel_err = abs_err / reference.norm();
        let eoc = rows.last().and_then(|p: &ReportRow| eoc(p.abs_err, abs_err, p.h, h));
        rows.push(ReportRow { ell, n, h, value, abs_err, rel_err, eoc });
    }

    Ok(ConvergenceReport {
        meta: ReportMeta {
            attractor: config.attractor_label(),
            kernel: config.kernel.to_string(),
            reference,
            reference_source,
            wall_time_s: start.elapsed().as_secs_f64(),
        },
        rows,
    })
}

/// Names accepted by [`builtin_studies`].
pub const STUDIES: &[&str] = &["cantor-sets", "cantor-dusts", "log-interval", "planar-k2"];

/// Built-in studies for the standard experiments, at reduced
/// (`full_scale = false`) or full resolution.
pub fn builtin_studies(name: &str, full_scale: bool) -> Result<Vec<ExperimentConfig>> {
    let helmholtz = |k: f64| KernelSpec::Helmholtz { k, n: None, c_osc: None };
    let studies = match name {
        "cantor-dusts" => {
            let (levels, reference) = if full_scale { (vec![3, 4, 5], 7) } else { (vec![3, 4], 5) };
            ["cantor-dust(1/3)", "cantor-dust(0.26)", "cantor-dust(0.251)", "cantor-dust(0.2501)"]
                .iter()
                .map(|p| ExperimentConfig::new(p, helmholtz(5.0), levels.clone()).with_reference_level(reference))
                .collect()
        }
        "cantor-sets" => {
            let (levels, reference) = if full_scale { ((2..=9).collect::<Vec<_>>(), 13) } else { ((2..=8).collect(), 11) };
            ["cantor(1/3)", "cantor(0.1)", "cantor(0.01)", "cantor(0.001)"]
                .iter()
                .map(|p| ExperimentConfig::new(p, helmholtz(5.0), levels.clone()).with_reference_level(reference))
                .collect()
        }
        "log-interval" => {
            let levels: Vec<usize> = if full_scale { (1..=13).collect() } else { (1..=10).collect() };
            vec![ExperimentConfig::new("interval", KernelSpec::PhiT { t: 0.0 }, levels).with_exact(-1.5, 0.0)]
        }
        "planar-k2" => {
            let (top, reference) = if full_scale { (6, 8) } else { (4, 5) };
            ["cantor-dust(1/3)", "table1-II", "vicsek", "eq62-nonuniform"]
                .iter()
                .map(|p| {
                    ExperimentConfig::new(p, helmholtz(2.0), (2..=top).collect()).with_reference_level(reference)
                })
                .collect()
        }
        _ => {
            return Err(Error::invalid(format!(
                "unknown study '{name}' (expected one of {})",
                STUDIES.join(", ")
            )))
        }
    };
    Ok(studies)
}
