//! Semiclassical constants, one- and two-term Weyl predictions, remainder
//! diagnostics, and the Aizenman–Lieb lifting identity.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;
use statrs::function::beta::beta_reg;
use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Result};
use crate::geometry::Components;
use crate::grid::check_increasing;
use crate::spectrum::{check_gamma, check_lambda, eigenvalues_below, BoundaryCondition, SpectrumSlice};
use crate::sum::CompensatedSum;

/// `L^sc_{gamma,d} = Gamma(1+gamma) / ((4 pi)^{d/2} Gamma(1+gamma+d/2))`.
/// `dim = 0` is allowed and gives 1.
pub fn lsc(gamma: f64, dim: usize) -> f64 {
    if dim == 0 {
        return 1.0;
    }
    let half = 0.5 * dim as f64;
    (ln_gamma(1.0 + gamma) - half * (4.0 * PI).ln() - ln_gamma(1.0 + gamma + half)).exp()
}

/// Leading Weyl term `L^sc_{gamma,d} |D| lambda^{gamma+d/2}`.
pub fn weyl_main<C: Components + ?Sized>(body: &C, gamma: f64, lambda: f64) -> f64 {
    let d = body.ambient_dim();
    lsc(gamma, d) * body.total_volume() * lambda.powf(gamma + 0.5 * d as f64)
}

/// Boundary term `(1/4) L^sc_{gamma,d-1} H^{d-1}(dD) lambda^{gamma+(d-1)/2}`.
pub fn weyl_boundary<C: Components + ?Sized>(body: &C, gamma: f64, lambda: f64) -> f64 {
    let d = body.ambient_dim();
    0.25 * lsc(gamma, d - 1) * body.total_surface() * lambda.powf(gamma + 0.5 * (d as f64 - 1.0))
}

/// Both terms of the two-term Weyl expansion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SemiclassicalTerms {
    pub gamma: f64,
    pub dim: usize,
    pub lsc: f64,
    pub main_term: f64,
    pub boundary_term: f64,
    /// -1 for Dirichlet, +1 for Neumann.
    pub bc_sign: f64,
}

impl SemiclassicalTerms {
    pub fn prediction(&self) -> f64 {
        self.main_term + self.bc_sign * self.boundary_term
    }
}

pub fn weyl_two_term<C: Components + ?Sized>(
    body: &C,
    bc: BoundaryCondition,
    gamma: f64,
    lambda: f64,
) -> Result<SemiclassicalTerms> {
    check_gamma(gamma)?;
    check_lambda(lambda)?;
    let dim = body.ambient_dim();
    Ok(SemiclassicalTerms {
        gamma,
        dim,
        lsc: lsc(gamma, dim),
        main_term: weyl_main(body, gamma, lambda),
        boundary_term: weyl_boundary(body, gamma, lambda),
        bc_sign: bc.boundary_sign(),
    })
}

/// Riesz mean divided by its leading Weyl term.
pub fn normalized_ratio<C: Components + ?Sized>(
    body: &C,
    bc: BoundaryCondition,
    gamma: f64,
    lambda: f64,
) -> Result<f64> {
    check_gamma(gamma)?;
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(invalid(format!("the normalized ratio needs lambda > 0, got {lambda}")));
    }
    let slice = eigenvalues_below(body, bc, lambda)?;
    Ok(slice.riesz_mean(gamma, lambda)? / weyl_main(body, gamma, lambda))
}

/// Same as [`normalized_ratio`] but reusing an enumerated slice.
pub fn normalized_ratio_from(slice: &SpectrumSlice, gamma: f64, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(invalid(format!("the normalized ratio needs lambda > 0, got {lambda}")));
    }
    Ok(slice.riesz_mean(gamma, lambda)? / weyl_main(slice.body(), gamma, lambda))
}

/// Default rate exponent: 1 for `gamma >= 1`, `gamma / 2` below.
pub fn default_alpha(gamma: f64) -> f64 {
    if gamma >= 1.0 {
        1.0
    } else {
        0.5 * gamma
    }
}

fn check_alpha(gamma: f64, alpha: f64) -> Result<()> {
    let ok = if gamma >= 1.0 {
        alpha == 1.0
    } else if gamma > 0.0 {
        alpha > 0.0 && alpha < gamma
    } else {
        alpha == 0.0
    };
    if ok {
        Ok(())
    } else {
        Err(invalid(format!(
            "alpha {alpha} not admissible for gamma {gamma}: need alpha = 1 for gamma >= 1, \
             0 < alpha < gamma for 0 < gamma < 1, alpha = 0 for gamma = 0"
        )))
    }
}

/// Remainder of the two-term expansion at one spectral parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RemainderRecord {
    pub lambda: f64,
    pub value: f64,
    pub main: f64,
    pub boundary: f64,
    /// `value - main - sign * boundary`.
    pub remainder: f64,
    /// `|remainder| / (H^{d-1} lambda^{gamma+(d-1)/2})`.
    pub normalized: f64,
    /// `normalized` divided by the theorem's decay factor in `r_in sqrt(lambda)`.
    pub rate_factor: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RemainderProfile {
    pub records: Vec<RemainderRecord>,
    /// Largest rate factor on the grid.
    pub empirical_constant: f64,
    /// `max(rate) <= 2 max(rate on the lower log-half of the grid)`; absent
    /// for single-point grids.
    pub bounded: Option<bool>,
}

/// Decay factor multiplying `H lambda^{gamma+(d-1)/2}` in the uniform
/// remainder bound for convex sets.
pub fn remainder_decay(bc: BoundaryCondition, gamma: f64, alpha: f64, dim: usize, r_in: f64, lambda: f64) -> f64 {
    let s = r_in * lambda.sqrt();
    match bc {
        BoundaryCondition::Dirichlet => s.powf(-alpha / 11.0),
        BoundaryCondition::Neumann => {
            let log_plus = s.ln().max(0.0);
            (1.0 + log_plus).powf(-alpha * gamma.max(1.0)) + s.powf(1.0 - dim as f64)
        }
    }
}

/// Two-term remainder diagnostics on a strictly increasing grid.
pub fn remainder_profile<C: Components + ?Sized + Sync>(
    body: &C,
    bc: BoundaryCondition,
    gamma: f64,
    lambda_grid: &[f64],
    alpha: f64,
) -> Result<RemainderProfile> {
    check_gamma(gamma)?;
    check_alpha(gamma, alpha)?;
    check_increasing(lambda_grid)?;
    let top = *lambda_grid.last().expect("non-empty grid");
    let slice = eigenvalues_below(body, bc, top)?;
    let dim = body.ambient_dim();
    let surface = body.total_surface();
    let r_in = body.max_inradius();
    let records = lambda_grid
        .par_iter()
        .map(|&lambda| -> Result<RemainderRecord> {
            let value = slice.riesz_mean(gamma, lambda)?;
            let main = weyl_main(body, gamma, lambda);
            let boundary = weyl_boundary(body, gamma, lambda);
            let remainder = value - main - bc.boundary_sign() * boundary;
            let scale = surface * lambda.powf(gamma + 0.5 * (dim as f64 - 1.0));
            let normalized = remainder.abs() / scale;
            let rate_factor = normalized / remainder_decay(bc, gamma, alpha, dim, r_in, lambda);
            Ok(RemainderRecord {
                lambda,
                value,
                main,
                boundary,
                remainder,
                normalized,
                rate_factor,
                alpha,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let empirical_constant = records.iter().map(|r| r.rate_factor).fold(0.0, f64::max);
    let bounded = (records.len() > 1).then(|| {
        let mid = (lambda_grid[0].ln() + top.ln()) / 2.0;
        let lower = records
            .iter()
            .filter(|r| r.lambda.ln() <= mid + 1e-12)
            .map(|r| r.rate_factor)
            .fold(0.0, f64::max);
        empirical_constant <= 2.0 * lower
    });
    Ok(RemainderProfile {
        records,
        empirical_constant,
        bounded,
    })
}

/// Higher-order Riesz mean obtained from a lower-order one through
/// `B(a, g+1)^{-1} int_0^lambda t^{a-1} R_g(lambda - t) dt`, `a = g' - g`.
///
/// The integrand is smooth between the points `t = lambda - mu_k`; on each
/// such piece every active eigenvalue contributes an incomplete Beta
/// integral in closed form.
pub fn aizenman_lieb_lift<C: Components + ?Sized>(
    body: &C,
    bc: BoundaryCondition,
    gamma_src: f64,
    gamma_dst: f64,
    lambda: f64,
) -> Result<f64> {
    check_gamma(gamma_src)?;
    if !(gamma_dst.is_finite() && gamma_dst > gamma_src) {
        return Err(invalid(format!(
            "the lift needs gamma_dst > gamma_src, got {gamma_dst} <= {gamma_src}"
        )));
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(invalid(format!("the lift needs lambda > 0, got {lambda}")));
    }
    let slice = eigenvalues_below(body, bc, lambda)?;
    lift_from_slice(&slice, gamma_src, gamma_dst, lambda)
}

/// Regularised incomplete Beta `I_x(a, b)` with the closed form for `b = 1`.
fn reg_inc_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else if b == 1.0 {
        x.powf(a)
    } else {
        beta_reg(a, b, x)
    }
}

fn lift_from_slice(slice: &SpectrumSlice, gamma_src: f64, gamma_dst: f64, lambda: f64) -> Result<f64> {
    let a = gamma_dst - gamma_src;
    let b = gamma_src + 1.0;
    let mus = &slice.eigenvalues()[..slice.counting(lambda)?];
    let mut acc = CompensatedSum::new();
    // Piece k: t in [lambda - mu_{k+1}, lambda - mu_k], active mu_0..=mu_k.
    for k in 0..mus.len() {
        let t_hi = lambda - mus[k];
        let t_lo = if k + 1 < mus.len() { lambda - mus[k + 1] } else { 0.0 };
        if t_hi <= t_lo {
            continue;
        }
        if gamma_src == 0.0 {
            // I_x(a, 1) = x^a: every active eigenvalue contributes t_hi^a - t_lo^a
            acc.add((k + 1) as f64 * (t_hi.powf(a) - t_lo.powf(a)));
            continue;
        }
        for &mu in &mus[..=k] {
            let c = lambda - mu;
            let piece = reg_inc_beta(a, b, t_hi / c) - reg_inc_beta(a, b, t_lo / c);
            acc.add(c.powf(gamma_dst) * piece);
        }
    }
    Ok(acc.value())
}
