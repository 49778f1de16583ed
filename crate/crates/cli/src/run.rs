//! Dispatch of a resolved configuration to the library.

use riesz_lab::family::{Family, FamilyPoint};
use riesz_lab::inequality::{
    bly_kroger_check, critical_exponent_scan, excess_factor_estimate, polya_check, two_term_margin, MarginReport,
};
use riesz_lab::optimizer::{component_count_scan, convergence_scan, optimize_single, OptimizerOptions};
use riesz_lab::semiclassics::remainder_profile;
use riesz_lab::spectrum::set_spectrum_budget;
use riesz_lab::{eigenvalues_below, Body, BoundaryCondition, Domain};
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, Task};
use crate::error::CliError;
use crate::report::{Cell, Provenance, ScanReport};

/// Environment variable that sets the worker count when neither the flag
/// nor the config does.
pub const THREADS_ENV: &str = "RIESZ_LAB_THREADS";

/// Worker count from the config, then the environment; `None` lets rayon
/// choose.
pub fn thread_count(config: &ExperimentConfig) -> Result<Option<usize>, CliError> {
    if let Some(n) = config.threads {
        return Ok(Some(n));
    }
    match std::env::var(THREADS_ENV) {
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Validation(format!(
                "{THREADS_ENV}: expected a positive integer, got `{s}`"
            ))),
        },
        Err(_) => Ok(None),
    }
}

/// Validates, resolves defaults and runs the task on a dedicated pool.
pub fn run(config: &ExperimentConfig) -> Result<ScanReport, CliError> {
    let resolved = config.resolved()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count(&resolved)? {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Validation(format!("threads: {e}")))?;
    set_spectrum_budget(resolved.budget.expect("resolved"));
    let (columns, rows, summary) = pool.install(|| dispatch(&resolved))?;
    Ok(ScanReport {
        columns,
        rows,
        summary,
        provenance: Provenance::for_config(&resolved),
        config: resolved,
    })
}

type Table = (Vec<&'static str>, Vec<Vec<Cell>>, Value);

struct Inputs<'a> {
    config: &'a ExperimentConfig,
    bc: BoundaryCondition,
    lambdas: Vec<f64>,
}

impl Inputs<'_> {
    fn body(&self) -> Result<Body, CliError> {
        Ok(self.config.domain.as_deref().expect("validated").parse()?)
    }

    fn family(&self) -> Result<Family, CliError> {
        Ok(self.config.family.as_deref().expect("validated").parse()?)
    }

    fn gamma(&self) -> f64 {
        self.config.gamma.expect("resolved")
    }

    fn points(&self, family: &Family) -> Result<Vec<FamilyPoint>, CliError> {
        Ok(family.grid(self.config.points.expect("resolved"))?)
    }
}

fn params_text(p: &FamilyPoint) -> String {
    p.coords.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(";")
}

fn dispatch(config: &ExperimentConfig) -> Result<Table, CliError> {
    let task = config.task.expect("validated");
    let inputs = Inputs {
        config,
        bc: config.bc.expect("resolved"),
        lambdas: config.lambda.as_ref().expect("validated").values()?,
    };
    match task {
        Task::Spectrum => spectrum(&inputs),
        Task::Riesz => riesz(&inputs),
        Task::Weyl => weyl(&inputs),
        Task::Polya => {
            let body = inputs.body()?;
            margin_table(polya_check(&body, inputs.bc, &inputs.lambdas)?)
        }
        Task::Bly => {
            let body = inputs.body()?;
            margin_table(bly_kroger_check(&body, inputs.bc, inputs.gamma(), &inputs.lambdas)?)
        }
        Task::Excess => excess(&inputs),
        Task::Critical => critical(&inputs),
        Task::Margin => margin(&inputs),
        Task::Optimize => optimize(&inputs),
        Task::Scan => scan(&inputs),
        Task::Multicomp => multicomp(&inputs),
    }
}

fn spectrum(inputs: &Inputs) -> Result<Table, CliError> {
    let cutoff = *inputs.lambdas.last().expect("non-empty");
    let slice = eigenvalues_below(&inputs.body()?, inputs.bc, cutoff)?;
    let mut distinct = slice.eigenvalues().to_vec();
    distinct.dedup();
    let distinct = distinct.len();
    let rows = slice
        .eigenvalues()
        .iter()
        .enumerate()
        .map(|(i, &mu)| vec![Cell::from(i + 1), Cell::from(mu), Cell::from(slice.tag_label(i))])
        .collect();
    Ok((
        vec!["index", "eigenvalue", "multiplicity_tag"],
        rows,
        json!({ "count": slice.len(), "distinct": distinct, "cutoff": cutoff }),
    ))
}

fn riesz(inputs: &Inputs) -> Result<Table, CliError> {
    let gamma = inputs.gamma();
    let top = *inputs.lambdas.last().expect("non-empty");
    let slice = eigenvalues_below(&inputs.body()?, inputs.bc, top)?;
    let values = inputs
        .lambdas
        .iter()
        .map(|&l| slice.riesz_mean(gamma, l))
        .collect::<riesz_lab::Result<Vec<_>>>()?;
    let rows = inputs
        .lambdas
        .iter()
        .zip(&values)
        .map(|(&l, &v)| vec![Cell::from(l), Cell::from(gamma), Cell::from(v)])
        .collect();
    let mut summary = json!({ "values": values });
    if values.len() == 1 {
        summary["value"] = json!(values[0]);
    }
    Ok((vec!["lambda", "gamma", "value"], rows, summary))
}

fn weyl(inputs: &Inputs) -> Result<Table, CliError> {
    let alpha = inputs.config.alpha.expect("resolved");
    let p = remainder_profile(&inputs.body()?, inputs.bc, inputs.gamma(), &inputs.lambdas, alpha)?;
    let rows = p
        .records
        .iter()
        .map(|r| {
            vec![
                Cell::from(r.lambda),
                Cell::from(r.value),
                Cell::from(r.main),
                Cell::from(r.boundary),
                Cell::from(r.remainder),
                Cell::from(r.normalized),
                Cell::from(r.rate_factor),
            ]
        })
        .collect();
    Ok((
        vec![
            "lambda",
            "value",
            "main",
            "boundary",
            "remainder",
            "normalized",
            "rate_factor",
        ],
        rows,
        json!({ "empirical_constant": p.empirical_constant, "bounded": p.bounded, "alpha": alpha }),
    ))
}

fn margin_table(report: MarginReport) -> Result<Table, CliError> {
    let rows = report
        .rows
        .iter()
        .map(|r| {
            vec![
                Cell::from(r.lambda_requested),
                Cell::from(r.lambda),
                Cell::from(r.value),
                Cell::from(r.weyl),
                Cell::from(r.margin),
            ]
        })
        .collect();
    Ok((
        vec!["lambda_requested", "lambda", "value", "weyl", "margin"],
        rows,
        json!({ "min_margin": report.min_margin, "pass": report.pass, "gamma": report.gamma }),
    ))
}

fn excess(inputs: &Inputs) -> Result<Table, CliError> {
    let family = inputs.family()?;
    let points = inputs.points(&family)?;
    let e = excess_factor_estimate(&family, inputs.bc, inputs.gamma(), &inputs.lambdas, &points)?;
    let rows = e
        .samples
        .iter()
        .map(|s| {
            vec![
                Cell::from(s.point.member),
                Cell::from(params_text(&s.point)),
                Cell::from(s.domain.clone()),
                Cell::from(s.lambda),
                Cell::from(s.value),
                Cell::from(s.main),
                Cell::from(s.ratio),
            ]
        })
        .collect();
    let pass = match inputs.bc {
        BoundaryCondition::Dirichlet => e.value <= 1.0,
        BoundaryCondition::Neumann => e.value >= 1.0,
    };
    Ok((
        vec!["member", "parameters", "domain", "lambda", "value", "main", "ratio"],
        rows,
        json!({
            "value": e.value,
            "arg": { "member": e.arg.point.member, "parameters": e.arg.point.coords, "domain": e.arg.domain, "lambda": e.arg.lambda },
            "grids": e.grids,
            "pass": pass,
            "note": "grid extremum restricted to the family",
        }),
    ))
}

fn critical(inputs: &Inputs) -> Result<Table, CliError> {
    let family = inputs.family()?;
    let points = inputs.points(&family)?;
    let gammas = inputs.config.gamma_grid.as_ref().expect("resolved");
    let c = critical_exponent_scan(&family, inputs.bc, gammas, &inputs.lambdas, &points)?;
    let rows = c
        .per_gamma
        .iter()
        .map(|g| {
            vec![
                Cell::from(g.gamma),
                Cell::from(g.ratio),
                Cell::from(g.lambda),
                Cell::from(g.point.member),
                Cell::from(params_text(&g.point)),
                Cell::from(g.domain.clone()),
                Cell::from(g.violates),
            ]
        })
        .collect();
    Ok((
        vec!["gamma", "ratio", "lambda", "member", "parameters", "domain", "violates"],
        rows,
        json!({
            "lower": c.lower,
            "upper": c.upper,
            "certificate": c.certificate,
            "witnesses": c.witnesses,
            "note": "grid estimate restricted to the family",
        }),
    ))
}

fn margin(inputs: &Inputs) -> Result<Table, CliError> {
    let family = inputs.family()?;
    let points = inputs.points(&family)?;
    let m = two_term_margin(&family, inputs.bc, inputs.gamma(), &inputs.lambdas, &points)?;
    let rows = m
        .samples
        .iter()
        .map(|s| {
            vec![
                Cell::from(s.point.member),
                Cell::from(params_text(&s.point)),
                Cell::from(s.domain.clone()),
                Cell::from(s.lambda),
                Cell::from(s.value),
                Cell::from(s.main),
                Cell::from(s.scale),
                Cell::from(s.surplus),
            ]
        })
        .collect();
    Ok((
        vec![
            "member",
            "parameters",
            "domain",
            "lambda",
            "value",
            "main",
            "scale",
            "surplus",
        ],
        rows,
        json!({
            "c_hat": m.c_hat,
            "consistent": m.consistent,
            "pass": m.c_hat > 0.0,
            "arg": { "domain": m.arg.domain, "lambda": m.arg.lambda },
            "grids": m.grids,
        }),
    ))
}

fn optimize(inputs: &Inputs) -> Result<Table, CliError> {
    let family = inputs.family()?;
    let options = OptimizerOptions {
        grid_points: inputs.config.points.expect("resolved"),
        ..OptimizerOptions::default()
    };
    let tol = inputs.config.tol.expect("resolved");
    let results = inputs
        .lambdas
        .iter()
        .map(|&l| optimize_single(&family, inputs.bc, inputs.gamma(), l, tol, options))
        .collect::<riesz_lab::Result<Vec<_>>>()?;
    let rows = results
        .iter()
        .map(|r| {
            vec![
                Cell::from(r.lambda),
                Cell::from(r.best_parameter.member),
                Cell::from(params_text(&r.best_parameter)),
                Cell::from(r.best_domain.to_string()),
                Cell::from(r.value),
                Cell::from(r.iterations),
                Cell::from(r.evaluations),
                Cell::from(r.tolerance_achieved),
                Cell::from(r.degenerate),
            ]
        })
        .collect();
    Ok((
        vec![
            "lambda",
            "member",
            "parameters",
            "domain",
            "value",
            "iterations",
            "evaluations",
            "tolerance_achieved",
            "degenerate",
        ],
        rows,
        json!({
            "spec": family.to_string(),
            "results": results,
            "note": "optimum restricted to the family",
        }),
    ))
}

fn scan(inputs: &Inputs) -> Result<Table, CliError> {
    let family = inputs.family()?;
    let options = OptimizerOptions {
        grid_points: inputs.config.points.expect("resolved"),
        ..OptimizerOptions::default()
    };
    let tol = inputs.config.tol.expect("resolved");
    let records = convergence_scan(&family, inputs.bc, inputs.gamma(), &inputs.lambdas, tol, options)?;
    let rows = records
        .iter()
        .map(|r| {
            vec![
                Cell::from(r.lambda),
                Cell::from(r.best_parameter.member),
                Cell::from(params_text(&r.best_parameter)),
                Cell::from(r.best_domain.to_string()),
                Cell::from(r.value),
                Cell::from(r.hausdorff_to_ball),
                Cell::from(r.value_gap_vs_ball),
                Cell::from(r.component_count),
                Cell::from(r.inradius_sqrt_lambda),
            ]
        })
        .collect();
    Ok((
        vec![
            "lambda",
            "member",
            "parameters",
            "domain",
            "value",
            "hausdorff_to_ball",
            "value_gap_vs_ball",
            "component_count",
            "inradius_sqrt_lambda",
        ],
        rows,
        json!({ "spec": family.to_string(), "records": records.len(), "note": "optimum restricted to the family" }),
    ))
}

fn multicomp(inputs: &Inputs) -> Result<Table, CliError> {
    let candidates = inputs
        .config
        .candidates
        .as_ref()
        .expect("validated")
        .iter()
        .map(|c| Ok((c.domain.parse::<Domain>()?, c.base_lambda)))
        .collect::<Result<Vec<_>, CliError>>()?;
    let table = component_count_scan(inputs.bc, inputs.gamma(), &inputs.lambdas, &candidates)?;
    let rows = table
        .iter()
        .map(|r| {
            vec![
                Cell::from(r.lambda),
                Cell::from(r.component_count),
                Cell::from(r.normalized_count),
                Cell::from(r.value),
                Cell::from(r.base_domain.to_string()),
                Cell::from(r.base_lambda),
            ]
        })
        .collect();
    let counts: Vec<usize> = table.iter().map(|r| r.component_count).collect();
    Ok((
        vec![
            "lambda",
            "component_count",
            "normalized_count",
            "value",
            "base_domain",
            "base_lambda",
        ],
        rows,
        json!({ "component_counts": counts, "note": "optimum restricted to the candidate set" }),
    ))
}
