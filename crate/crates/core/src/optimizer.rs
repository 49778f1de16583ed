//! Shape optimisation of Riesz means over parametric families and over the
//! multi-component trial unions built from rescaled copies of a base body.
//!
//! Dirichlet problems are maximised, Neumann problems minimised. Every value
//! reported here is restricted to the family or candidate set searched.

use std::fmt;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{invalid, LabError, Result};
use crate::family::{Family, FamilyPoint};
use crate::geometry::{hausdorff_distance, unit_ball_volume, DisjointUnion, Domain};
use crate::golden::golden_section_max;
use crate::grid::check_increasing;
use crate::spectrum::{check_gamma, riesz_mean, riesz_mean_union, BoundaryCondition};

fn as_text<T: fmt::Display, S: Serializer>(value: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(value)
}

/// Objective oriented so that larger is better.
fn oriented(bc: BoundaryCondition, value: f64) -> f64 {
    match bc {
        BoundaryCondition::Dirichlet => value,
        BoundaryCondition::Neumann => -value,
    }
}

fn objective(domain: &Domain, bc: BoundaryCondition, gamma: f64, lambda: f64) -> Result<f64> {
    let v = riesz_mean(domain, bc, gamma, lambda)?.value;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(LabError::NumericalFailure(format!(
            "Riesz mean of {domain} at lambda = {lambda} is {v}"
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimizerOptions {
    /// Coarse grid points per coordinate.
    pub grid_points: usize,
    /// Coordinate-descent sweeps of golden-section refinement.
    pub max_sweeps: usize,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        OptimizerOptions {
            grid_points: 64,
            max_sweeps: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizationResult {
    pub bc: BoundaryCondition,
    pub gamma: f64,
    pub lambda: f64,
    pub best_parameter: FamilyPoint,
    #[serde(serialize_with = "as_text")]
    pub best_domain: Domain,
    pub value: f64,
    /// Refinement sweeps performed.
    pub iterations: usize,
    pub evaluations: usize,
    /// Width of the last golden-section bracket, 0 without refinement.
    pub tolerance_achieved: f64,
    /// Every coarse grid value was zero, so the grid convention point is
    /// returned.
    pub degenerate: bool,
}

/// Coarse grid search followed by golden-section coordinate descent.
/// Ties on the grid go to the earliest grid point.
pub fn optimize_single(
    family: &Family,
    bc: BoundaryCondition,
    gamma: f64,
    lambda: f64,
    tol: f64,
    options: OptimizerOptions,
) -> Result<OptimizationResult> {
    check_gamma(gamma)?;
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(invalid(format!("lambda must be positive, got {lambda}")));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(invalid(format!("tolerance must be positive, got {tol}")));
    }
    if options.grid_points == 0 {
        return Err(invalid("the optimizer grid needs at least one point"));
    }
    let points = family.grid(options.grid_points)?;
    let values = points
        .par_iter()
        .map(|p| objective(&family.domain(p)?, bc, gamma, lambda))
        .collect::<Result<Vec<_>>>()?;
    let mut evaluations = values.len();

    let mut best_i = 0;
    for (i, &v) in values.iter().enumerate() {
        if oriented(bc, v) > oriented(bc, values[best_i]) {
            best_i = i;
        }
    }
    let mut best = points[best_i].clone();
    let mut best_value = values[best_i];
    let degenerate = values.iter().all(|&v| v == 0.0);

    let mut iterations = 0;
    let mut tolerance_achieved = 0.0;
    let spec = &family.members()[best.member];
    if !degenerate && spec.arity() > 0 {
        for _ in 0..options.max_sweeps {
            iterations += 1;
            let mut moved = false;
            for (k, &(lo, hi)) in spec.ranges().iter().enumerate() {
                if lo == hi {
                    continue;
                }
                let step = if options.grid_points > 1 {
                    (hi - lo) / (options.grid_points - 1) as f64
                } else {
                    hi - lo
                };
                let x0 = best.coords[k];
                let a = (x0 - step).max(lo);
                let b = (x0 + step).min(hi);
                let mut failure = None;
                let probe = |x: f64| -> f64 {
                    let mut coords = best.coords.clone();
                    coords[k] = x;
                    evaluations += 1;
                    match spec.domain(&coords).and_then(|d| objective(&d, bc, gamma, lambda)) {
                        Ok(v) => oriented(bc, v),
                        Err(e) => {
                            failure.get_or_insert(e);
                            f64::NEG_INFINITY
                        }
                    }
                };
                let (x, fx) = golden_section_max(probe, a, b, tol);
                if let Some(e) = failure {
                    return Err(e);
                }
                tolerance_achieved = tol.min(b - a);
                if fx > oriented(bc, best_value) {
                    moved |= (x - x0).abs() > tol;
                    best.coords[k] = x;
                    best_value = oriented(bc, fx);
                }
            }
            if !moved {
                break;
            }
        }
    }
    Ok(OptimizationResult {
        bc,
        gamma,
        lambda,
        best_domain: family.domain(&best)?,
        best_parameter: best,
        value: best_value,
        iterations,
        evaluations,
        tolerance_achieved,
        degenerate,
    })
}

/// Largest number of copies a trial union may contain.
pub const MAX_TRIAL_COPIES: usize = 1_000_000;

/// Leftover volume below which no remainder ball is added.
pub const REMAINDER_VOLUME_FLOOR: f64 = 1e-12;

/// `M` copies of the base rescaled by `r = sqrt(base_lambda / target_lambda)`
/// plus a ball of radius `eta` filling the remaining volume up to 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialUnionSpec {
    #[serde(serialize_with = "as_text")]
    pub base_domain: Domain,
    pub base_lambda: f64,
    pub target_lambda: f64,
    pub r: f64,
    pub m: usize,
    pub eta: f64,
}

impl TrialUnionSpec {
    pub fn component_count(&self) -> usize {
        self.m + usize::from(self.eta > 0.0)
    }

    /// The Riesz mean of the union predicted from the base body and the
    /// unit ball by dilation and additivity.
    pub fn predicted_riesz_mean(&self, bc: BoundaryCondition, gamma: f64) -> Result<f64> {
        let copies = self.m as f64
            * (self.target_lambda / self.base_lambda).powf(gamma)
            * riesz_mean(&self.base_domain, bc, gamma, self.base_lambda)?.value;
        if self.eta == 0.0 {
            return Ok(copies);
        }
        let unit = Domain::ball(1.0, self.base_domain.dim())?;
        let ball =
            self.eta.powf(-2.0 * gamma) * riesz_mean(&unit, bc, gamma, self.target_lambda * self.eta * self.eta)?.value;
        Ok(copies + ball)
    }
}

pub fn build_trial_union(
    base: &Domain,
    base_lambda: f64,
    target_lambda: f64,
) -> Result<(TrialUnionSpec, DisjointUnion)> {
    base.validate()?;
    for (name, v) in [("base_lambda", base_lambda), ("target_lambda", target_lambda)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(invalid(format!("{name} must be positive, got {v}")));
        }
    }
    let d = base.dim();
    let vol = base.volume();
    let r = (base_lambda / target_lambda).sqrt();
    let quota = (target_lambda / base_lambda).powf(0.5 * d as f64) / vol;
    if quota < 1.0 {
        let minimal = base_lambda * vol.powf(2.0 / d as f64);
        return Err(LabError::Precondition(format!(
            "trial union of {base} at base lambda {base_lambda} has no copies at lambda = {target_lambda}; \
             need lambda >= {minimal}"
        )));
    }
    if quota > MAX_TRIAL_COPIES as f64 {
        return Err(invalid(format!(
            "trial union would need {quota:.0} copies, more than the cap of {MAX_TRIAL_COPIES}"
        )));
    }
    let m = quota.floor() as usize;
    let copy = base.scale(r)?;
    let leftover = 1.0 - m as f64 * copy.volume();
    let eta = if leftover > REMAINDER_VOLUME_FLOOR {
        (leftover / unit_ball_volume(d)).powf(1.0 / d as f64)
    } else {
        0.0
    };
    let mut components = vec![copy; m];
    if eta > 0.0 {
        components.push(Domain::ball(eta, d)?);
    }
    let spec = TrialUnionSpec {
        base_domain: base.clone(),
        base_lambda,
        target_lambda,
        r,
        m,
        eta,
    };
    Ok((spec, DisjointUnion::new(components)?))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateValue {
    pub spec: TrialUnionSpec,
    pub value: f64,
    pub component_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnionOptimizationResult {
    pub bc: BoundaryCondition,
    pub gamma: f64,
    pub lambda: f64,
    pub value: f64,
    pub best: CandidateValue,
    /// Every feasible configuration, single-body branches first.
    pub evaluated: Vec<CandidateValue>,
    /// Configurations skipped because they would have no copies.
    pub infeasible: Vec<String>,
}

impl UnionOptimizationResult {
    pub fn component_count(&self) -> usize {
        self.best.component_count
    }
}

fn check_unit_volume(d: &Domain) -> Result<()> {
    if (d.volume() - 1.0).abs() <= 1e-9 {
        Ok(())
    } else {
        Err(invalid(format!(
            "candidate base {d} must have unit volume, has {}",
            d.volume()
        )))
    }
}

/// Best trial union among the candidates `(base, base_lambda)` and the
/// single-body branch of every distinct base, evaluated at `lambda` itself.
pub fn optimize_union(
    candidates: &[(Domain, f64)],
    bc: BoundaryCondition,
    gamma: f64,
    lambda: f64,
) -> Result<UnionOptimizationResult> {
    check_gamma(gamma)?;
    if candidates.is_empty() {
        return Err(invalid("optimize_union needs at least one candidate"));
    }
    let mut configs: Vec<(Domain, f64)> = Vec::new();
    for (base, _) in candidates {
        check_unit_volume(base)?;
        if !configs.iter().any(|(b, _)| b == base) {
            configs.push((base.clone(), lambda));
        }
    }
    configs.extend(candidates.iter().filter(|(_, l)| *l != lambda).cloned());

    let outcomes = configs
        .par_iter()
        .map(
            |(base, base_lambda)| match build_trial_union(base, *base_lambda, lambda) {
                Ok((spec, union)) => {
                    let value = riesz_mean_union(&union, bc, gamma, lambda)?.value;
                    Ok(Ok(CandidateValue {
                        component_count: spec.component_count(),
                        spec,
                        value,
                    }))
                }
                Err(LabError::Precondition(msg)) => Ok(Err(msg)),
                Err(e) => Err(e),
            },
        )
        .collect::<Result<Vec<_>>>()?;
    let mut evaluated = Vec::new();
    let mut infeasible = Vec::new();
    for o in outcomes {
        match o {
            Ok(c) => evaluated.push(c),
            Err(msg) => infeasible.push(msg),
        }
    }
    if evaluated.is_empty() {
        return Err(LabError::Precondition(format!(
            "no feasible candidate: {}",
            infeasible.join("; ")
        )));
    }
    let mut best = 0;
    for (i, c) in evaluated.iter().enumerate() {
        if oriented(bc, c.value) > oriented(bc, evaluated[best].value) {
            best = i;
        }
    }
    Ok(UnionOptimizationResult {
        bc,
        gamma,
        lambda,
        value: evaluated[best].value,
        best: evaluated[best].clone(),
        evaluated,
        infeasible,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRecord {
    pub lambda: f64,
    pub best_parameter: FamilyPoint,
    #[serde(serialize_with = "as_text")]
    pub best_domain: Domain,
    pub value: f64,
    /// Hausdorff distance from the (centred) best body to the unit-volume
    /// ball.
    pub hausdorff_to_ball: f64,
    /// `(Tr(best) - Tr(ball)) / lambda^{gamma+(d-1)/2}`.
    pub value_gap_vs_ball: f64,
    pub component_count: usize,
    pub inradius_sqrt_lambda: f64,
}

pub fn convergence_scan(
    family: &Family,
    bc: BoundaryCondition,
    gamma: f64,
    lambdas: &[f64],
    tol: f64,
    options: OptimizerOptions,
) -> Result<Vec<ConvergenceRecord>> {
    check_increasing(lambdas)?;
    let d = family.dim();
    let ball = Domain::unit_volume_ball(d)?;
    lambdas
        .iter()
        .map(|&lambda| {
            let opt = optimize_single(family, bc, gamma, lambda, tol, options)?;
            let ball_value = riesz_mean(&ball, bc, gamma, lambda)?.value;
            Ok(ConvergenceRecord {
                lambda,
                hausdorff_to_ball: hausdorff_distance(&opt.best_domain, &ball)?,
                value_gap_vs_ball: (opt.value - ball_value) / lambda.powf(gamma + 0.5 * (d as f64 - 1.0)),
                component_count: 1,
                inradius_sqrt_lambda: opt.best_domain.inradius() * lambda.sqrt(),
                best_parameter: opt.best_parameter,
                best_domain: opt.best_domain,
                value: opt.value,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentCountRow {
    pub lambda: f64,
    pub component_count: usize,
    /// `component_count / lambda^{d/2}`.
    pub normalized_count: f64,
    pub value: f64,
    #[serde(serialize_with = "as_text")]
    pub base_domain: Domain,
    pub base_lambda: f64,
}

/// Optimal component counts along a list of spectral parameters. For
/// Neumann conditions every component carries a zero eigenvalue, so the
/// Riesz mean must be at least `count * lambda^gamma`; a violation is a
/// numerical failure.
pub fn component_count_scan(
    bc: BoundaryCondition,
    gamma: f64,
    lambdas: &[f64],
    candidates: &[(Domain, f64)],
) -> Result<Vec<ComponentCountRow>> {
    check_increasing(lambdas)?;
    lambdas
        .iter()
        .map(|&lambda| {
            let res = optimize_union(candidates, bc, gamma, lambda)?;
            let count = res.component_count();
            let d = res.best.spec.base_domain.dim() as f64;
            if bc == BoundaryCondition::Neumann {
                let floor = count as f64 * lambda.powf(gamma);
                if res.value < floor * (1.0 - 1e-12) {
                    return Err(LabError::NumericalFailure(format!(
                        "Neumann Riesz mean {} at lambda = {lambda} is below the zero-mode floor {floor}",
                        res.value
                    )));
                }
            }
            Ok(ComponentCountRow {
                lambda,
                component_count: count,
                normalized_count: count as f64 / lambda.powf(0.5 * d),
                value: res.value,
                base_domain: res.best.spec.base_domain.clone(),
                base_lambda: res.best.spec.base_lambda,
            })
        })
        .collect()
}
