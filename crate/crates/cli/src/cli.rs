//! Command-line parsing into an [`ExperimentConfig`] and the inverse
//! rendering. Flags take precedence over values read from `--config`.

use clap::Parser;
use riesz_lab::grid::Spacing;
use riesz_lab::BoundaryCondition;

use crate::config::{Candidate, ExperimentConfig, LambdaRange, LambdaSpec, Task};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "riesz-lab",
    version,
    about = "Riesz means of Laplace eigenvalues on convex domains"
)]
struct Args {
    /// Task to run; may instead come from the config file.
    #[arg(value_enum)]
    task: Option<Task>,

    /// Domain descriptor, e.g. `box:1,1`, `ball:1@2`, `union:[box:1,1;ball:0.5@2]`.
    #[arg(long)]
    domain: Option<String>,

    /// Family descriptor, e.g. `box2d:1..6+ball@2`.
    #[arg(long)]
    family: Option<String>,

    /// `dirichlet` or `neumann`.
    #[arg(long, value_parser = parse_bc)]
    bc: Option<BoundaryCondition>,

    /// Riesz exponent.
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,

    /// Comma-separated exponents.
    #[arg(long, value_parser = parse_list)]
    gamma_grid: Option<Reals>,

    /// Comma-separated spectral parameters.
    #[arg(long, value_parser = parse_list, conflicts_with = "grid")]
    lambda: Option<Reals>,

    /// Spectral range `MIN:MAX:POINTS[:log|linear]`.
    #[arg(long, value_parser = parse_range)]
    grid: Option<LambdaRange>,

    /// Parameter grid points per family coordinate.
    #[arg(long)]
    points: Option<usize>,

    /// Parameter tolerance of the optimizer.
    #[arg(long)]
    tol: Option<f64>,

    /// Rate exponent of the remainder diagnostics.
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,

    /// Trial-union candidate `DOMAIN=BASE_LAMBDA`; repeatable.
    #[arg(long = "candidate", value_parser = parse_candidate)]
    candidates: Vec<Candidate>,

    /// Output prefix for `<out>.csv` and `<out>.json`.
    #[arg(long)]
    out: Option<String>,

    /// JSON config file; flags override its values.
    #[arg(long)]
    config: Option<String>,

    /// Cap on the number of eigenvalues a single enumeration may produce.
    #[arg(long)]
    budget: Option<usize>,

    /// Worker threads; defaults to RIESZ_LAB_THREADS, then to all cores.
    #[arg(long)]
    threads: Option<usize>,
}

fn parse_bc(s: &str) -> Result<BoundaryCondition, String> {
    s.parse().map_err(|e: riesz_lab::LabError| e.to_string())
}

/// Comma-separated reals, kept as one flag value.
#[derive(Debug, Clone)]
struct Reals(Vec<f64>);

fn parse_list(s: &str) -> Result<Reals, String> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| format!("`{x}` is not a number")))
        .collect::<Result<_, _>>()
        .map(Reals)
}

fn parse_range(s: &str) -> Result<LambdaRange, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if !(3..=4).contains(&parts.len()) {
        return Err(format!("`{s}` is not `MIN:MAX:POINTS[:log|linear]`"));
    }
    let num = |x: &str| x.trim().parse::<f64>().map_err(|_| format!("`{x}` is not a number"));
    let spacing = match parts.get(3).map(|x| x.trim()) {
        None | Some("log") => Spacing::Log,
        Some("linear") => Spacing::Linear,
        Some(other) => return Err(format!("`{other}` is not a spacing (log or linear)")),
    };
    Ok(LambdaRange {
        min: num(parts[0])?,
        max: num(parts[1])?,
        points: parts[2]
            .trim()
            .parse()
            .map_err(|_| format!("`{}` is not a point count", parts[2]))?,
        spacing,
    })
}

fn parse_candidate(s: &str) -> Result<Candidate, String> {
    let (domain, l) = s
        .rsplit_once('=')
        .ok_or_else(|| format!("`{s}` is not `DOMAIN=BASE_LAMBDA`"))?;
    Ok(Candidate {
        domain: domain.trim().to_string(),
        base_lambda: l.trim().parse().map_err(|_| format!("`{l}` is not a number"))?,
    })
}

/// Parses `argv` (program name first), merges it over any `--config` file
/// and validates the result.
pub fn cli_parse<I, T>(argv: I) -> Result<ExperimentConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = Args::try_parse_from(argv)?;
    let mut c = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            ExperimentConfig::from_json(&text)?
        }
        None => ExperimentConfig::default(),
    };
    macro_rules! take {
        ($field:ident, $value:expr) => {
            if let Some(v) = $value {
                c.$field = Some(v);
            }
        };
    }
    take!(task, args.task);
    take!(domain, args.domain);
    take!(family, args.family);
    take!(bc, args.bc);
    take!(gamma, args.gamma);
    take!(gamma_grid, args.gamma_grid.map(|r| r.0));
    take!(lambda, args.lambda.map(|r| LambdaSpec::List(r.0)));
    take!(lambda, args.grid.map(LambdaSpec::Range));
    take!(points, args.points);
    take!(tol, args.tol);
    take!(alpha, args.alpha);
    if !args.candidates.is_empty() {
        c.candidates = Some(args.candidates);
    }
    take!(output, args.out);
    take!(budget, args.budget);
    take!(threads, args.threads);
    c.validate()?;
    Ok(c)
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

/// Command line that [`cli_parse`] maps back to `config`.
pub fn render(config: &ExperimentConfig) -> Vec<String> {
    let mut out = vec!["riesz-lab".to_string()];
    if let Some(t) = config.task {
        out.push(t.name().to_string());
    }
    let mut flag = |name: &str, value: String| {
        out.push(format!("--{name}"));
        out.push(value);
    };
    if let Some(d) = &config.domain {
        flag("domain", d.clone());
    }
    if let Some(f) = &config.family {
        flag("family", f.clone());
    }
    if let Some(bc) = config.bc {
        flag("bc", bc.to_string());
    }
    if let Some(g) = config.gamma {
        flag("gamma", g.to_string());
    }
    if let Some(g) = &config.gamma_grid {
        flag("gamma-grid", join(g));
    }
    match &config.lambda {
        Some(LambdaSpec::List(v)) => flag("lambda", join(v)),
        Some(LambdaSpec::Range(r)) => {
            let spacing = match r.spacing {
                Spacing::Log => "log",
                Spacing::Linear => "linear",
            };
            flag("grid", format!("{}:{}:{}:{spacing}", r.min, r.max, r.points));
        }
        None => {}
    }
    if let Some(p) = config.points {
        flag("points", p.to_string());
    }
    if let Some(t) = config.tol {
        flag("tol", t.to_string());
    }
    if let Some(a) = config.alpha {
        flag("alpha", a.to_string());
    }
    for c in config.candidates.iter().flatten() {
        flag("candidate", format!("{}={}", c.domain, c.base_lambda));
    }
    if let Some(o) = &config.output {
        flag("out", o.clone());
    }
    if let Some(b) = config.budget {
        flag("budget", b.to_string());
    }
    if let Some(t) = config.threads {
        flag("threads", t.to_string());
    }
    out
}
