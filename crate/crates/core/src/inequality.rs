//! One-term inequality checks and grid estimates of excess factors,
//! critical exponents and two-term margins over shape families.
//!
//! Every estimate is an extremum over a finite grid, so it is one-sided:
//! a Dirichlet estimate can only underestimate the true supremum and a
//! Neumann estimate can only overestimate the true infimum.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::family::{Family, FamilyPoint};
use crate::geometry::{Components, Domain};
use crate::grid::{check_increasing, nudge_off_spectrum};
use crate::semiclassics::{normalized_ratio, weyl_main};
use crate::spectrum::{check_gamma, eigenvalues_below, BoundaryCondition, SpectrumSlice};

/// Relative headroom when enumerating past the top of a grid, so that
/// nudged grid points stay inside the enumerated slice.
const CUTOFF_HEADROOM: f64 = 1e-9;

fn slice_for_grid<C: Components + ?Sized>(body: &C, bc: BoundaryCondition, grid: &[f64]) -> Result<SpectrumSlice> {
    check_increasing(grid)?;
    let top = *grid.last().expect("checked non-empty");
    eigenvalues_below(body, bc, top * (1.0 + CUTOFF_HEADROOM))
}

/// Whether `ratio` lies on the wrong side of the one-term inequality.
fn violates(bc: BoundaryCondition, ratio: f64) -> bool {
    match bc {
        BoundaryCondition::Dirichlet => ratio > 1.0,
        BoundaryCondition::Neumann => ratio < 1.0,
    }
}

/// `candidate` is strictly more extreme than `best` for `bc`.
fn more_extreme(bc: BoundaryCondition, candidate: f64, best: f64) -> bool {
    match bc {
        BoundaryCondition::Dirichlet => candidate > best,
        BoundaryCondition::Neumann => candidate < best,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginRow {
    /// Grid value as requested.
    pub lambda_requested: f64,
    /// Grid value after moving it off the spectrum.
    pub lambda: f64,
    pub value: f64,
    pub weyl: f64,
    /// `weyl - value` for Dirichlet, `value - weyl` for Neumann.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginReport {
    pub bc: BoundaryCondition,
    pub gamma: f64,
    pub rows: Vec<MarginRow>,
    pub min_margin: f64,
    pub pass: bool,
}

fn one_term_check<C: Components + ?Sized>(
    body: &C,
    bc: BoundaryCondition,
    gamma: f64,
    lambda_grid: &[f64],
) -> Result<MarginReport> {
    let slice = slice_for_grid(body, bc, lambda_grid)?;
    let rows = lambda_grid
        .iter()
        .map(|&requested| {
            let lambda = nudge_off_spectrum(&slice, requested);
            let value = slice.riesz_mean(gamma, lambda)?;
            let weyl = weyl_main(body, gamma, lambda);
            let margin = -bc.boundary_sign() * (weyl - value);
            Ok(MarginRow {
                lambda_requested: requested,
                lambda,
                value,
                weyl,
                margin,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let min_margin = rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    Ok(MarginReport {
        bc,
        gamma,
        rows,
        min_margin,
        pass: min_margin >= 0.0,
    })
}

/// Counting function against its Weyl term on a grid.
pub fn polya_check<C: Components + ?Sized>(
    body: &C,
    bc: BoundaryCondition,
    lambda_grid: &[f64],
) -> Result<MarginReport> {
    one_term_check(body, bc, 0.0, lambda_grid)
}

/// Berezin–Li–Yau (Dirichlet) or Kröger (Neumann) inequality on a grid.
pub fn bly_kroger_check<C: Components + ?Sized>(
    body: &C,
    bc: BoundaryCondition,
    gamma: f64,
    lambda_grid: &[f64],
) -> Result<MarginReport> {
    check_gamma(gamma)?;
    if gamma < 1.0 {
        return Err(invalid(format!(
            "the Berezin–Li–Yau and Kröger checks need gamma >= 1, got {gamma}"
        )));
    }
    one_term_check(body, bc, gamma, lambda_grid)
}

/// One family member with its spectrum enumerated past the grid top.
struct Sampled {
    point: FamilyPoint,
    domain: Domain,
    slice: SpectrumSlice,
    lambdas: Vec<f64>,
}

fn sample_family(
    family: &Family,
    bc: BoundaryCondition,
    lambda_grid: &[f64],
    points: &[FamilyPoint],
) -> Result<Vec<Sampled>> {
    check_increasing(lambda_grid)?;
    if points.is_empty() {
        return Err(invalid("parameter grid is empty"));
    }
    points
        .par_iter()
        .map(|point| {
            let domain = family.domain(point)?;
            let slice = slice_for_grid(&domain, bc, lambda_grid)?;
            let lambdas = lambda_grid.iter().map(|&l| nudge_off_spectrum(&slice, l)).collect();
            Ok(Sampled {
                point: point.clone(),
                domain,
                slice,
                lambdas,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioSample {
    pub point: FamilyPoint,
    pub domain: String,
    pub lambda: f64,
    pub value: f64,
    pub main: f64,
    pub ratio: f64,
}

fn ratio_samples(sampled: &[Sampled], gamma: f64) -> Result<Vec<RatioSample>> {
    let nested = sampled
        .par_iter()
        .map(|s| {
            let name = s.domain.to_string();
            s.lambdas
                .iter()
                .map(|&lambda| {
                    let value = s.slice.riesz_mean(gamma, lambda)?;
                    let main = weyl_main(&s.domain, gamma, lambda);
                    Ok(RatioSample {
                        point: s.point.clone(),
                        domain: name.clone(),
                        lambda,
                        value,
                        main,
                        ratio: value / main,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(nested.into_iter().flatten().collect())
}

/// Index of the most extreme sample; ties keep the earliest grid entry.
fn extremal_index(bc: BoundaryCondition, values: impl Iterator<Item = f64>) -> usize {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in values.enumerate() {
        match best {
            Some((_, b)) if !more_extreme(bc, v, b) => {}
            _ => best = Some((i, v)),
        }
    }
    best.expect("non-empty grid").0
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSummary {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub lambda_points: usize,
    pub parameter_points: usize,
}

impl GridSummary {
    fn new(lambda_grid: &[f64], points: &[FamilyPoint]) -> Self {
        GridSummary {
            lambda_min: lambda_grid[0],
            lambda_max: lambda_grid[lambda_grid.len() - 1],
            lambda_points: lambda_grid.len(),
            parameter_points: points.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExcessEstimate {
    pub gamma: f64,
    pub dim: usize,
    pub bc: BoundaryCondition,
    /// Grid maximum (Dirichlet) or minimum (Neumann) of the ratio.
    pub value: f64,
    /// Sample attaining `value`.
    pub arg: RatioSample,
    pub grids: GridSummary,
    pub samples: Vec<RatioSample>,
}

/// Grid extremum of Riesz mean over leading Weyl term across a family.
pub fn excess_factor_estimate(
    family: &Family,
    bc: BoundaryCondition,
    gamma: f64,
    lambda_grid: &[f64],
    points: &[FamilyPoint],
) -> Result<ExcessEstimate> {
    check_gamma(gamma)?;
    let sampled = sample_family(family, bc, lambda_grid, points)?;
    let samples = ratio_samples(&sampled, gamma)?;
    let i = extremal_index(bc, samples.iter().map(|s| s.ratio));
    Ok(ExcessEstimate {
        gamma,
        dim: family.dim(),
        bc,
        value: samples[i].ratio,
        arg: samples[i].clone(),
        grids: GridSummary::new(lambda_grid, points),
        samples,
    })
}

/// A point where the one-term inequality fails on the grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub domain: String,
    pub bc: BoundaryCondition,
    pub gamma: f64,
    pub lambda: f64,
    pub ratio: f64,
}

impl Witness {
    /// Recomputes the ratio from the stored descriptor.
    pub fn recompute(&self) -> Result<f64> {
        let domain: Domain = self.domain.parse()?;
        normalized_ratio(&domain, self.bc, self.gamma, self.lambda)
    }

    /// Whether the recomputed ratio is still strictly on the wrong side of 1.
    pub fn reproduces(&self) -> Result<bool> {
        Ok(violates(self.bc, self.recompute()?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaExtremum {
    pub gamma: f64,
    pub ratio: f64,
    pub lambda: f64,
    pub point: FamilyPoint,
    pub domain: String,
    pub violates: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalExponentEstimate {
    pub bc: BoundaryCondition,
    pub dim: usize,
    /// Greatest grid exponent with a violating witness.
    pub lower: Option<f64>,
    /// Least grid exponent from which no larger grid exponent violates.
    pub upper: Option<f64>,
    /// Grid exponents at or above `upper`, where the inequality held.
    pub certificate: Vec<f64>,
    pub witnesses: Vec<Witness>,
    pub per_gamma: Vec<GammaExtremum>,
}

fn check_gamma_grid(gammas: &[f64]) -> Result<()> {
    if gammas.is_empty() {
        return Err(invalid("gamma grid is empty"));
    }
    if let Some(g) = gammas.iter().find(|g| !(**g >= 0.0 && **g <= 1.5)) {
        return Err(invalid(format!("gamma grid values must lie in [0, 1.5], got {g}")));
    }
    if gammas.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(invalid("gamma grid must be strictly increasing"));
    }
    Ok(())
}

/// Scans exponents for violations of the one-term inequality.
pub fn critical_exponent_scan(
    family: &Family,
    bc: BoundaryCondition,
    gamma_grid: &[f64],
    lambda_grid: &[f64],
    points: &[FamilyPoint],
) -> Result<CriticalExponentEstimate> {
    check_gamma_grid(gamma_grid)?;
    let sampled = sample_family(family, bc, lambda_grid, points)?;
    let mut per_gamma = Vec::with_capacity(gamma_grid.len());
    let mut witnesses = Vec::new();
    for &gamma in gamma_grid {
        let samples = ratio_samples(&sampled, gamma)?;
        let i = extremal_index(bc, samples.iter().map(|s| s.ratio));
        let s = &samples[i];
        let bad = violates(bc, s.ratio);
        if bad {
            witnesses.push(Witness {
                domain: s.domain.clone(),
                bc,
                gamma,
                lambda: s.lambda,
                ratio: s.ratio,
            });
        }
        per_gamma.push(GammaExtremum {
            gamma,
            ratio: s.ratio,
            lambda: s.lambda,
            point: s.point.clone(),
            domain: s.domain.clone(),
            violates: bad,
        });
    }
    let lower = per_gamma.iter().rev().find(|g| g.violates).map(|g| g.gamma);
    let first_clean = match per_gamma.iter().rposition(|g| g.violates) {
        Some(i) => i + 1,
        None => 0,
    };
    let certificate: Vec<f64> = per_gamma[first_clean..].iter().map(|g| g.gamma).collect();
    Ok(CriticalExponentEstimate {
        bc,
        dim: family.dim(),
        lower,
        upper: certificate.first().copied(),
        certificate,
        witnesses,
        per_gamma,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurplusSample {
    pub point: FamilyPoint,
    pub domain: String,
    pub lambda: f64,
    pub value: f64,
    pub main: f64,
    /// `H^{d-1}(dD) lambda^{gamma+(d-1)/2}`.
    pub scale: f64,
    /// `(main - value)/scale` for Dirichlet, `(value - main)/scale` for Neumann.
    pub surplus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginEstimate {
    pub gamma: f64,
    pub dim: usize,
    pub bc: BoundaryCondition,
    /// Grid infimum of the surplus; negative when the improved inequality
    /// fails somewhere on the grid.
    pub c_hat: f64,
    pub arg: SurplusSample,
    /// Every sample satisfies the improved inequality with constant `c_hat`.
    pub consistent: bool,
    pub grids: GridSummary,
    pub samples: Vec<SurplusSample>,
}

/// Grid estimate of the constant in the improved one-term inequality.
pub fn two_term_margin(
    family: &Family,
    bc: BoundaryCondition,
    gamma: f64,
    lambda_grid: &[f64],
    points: &[FamilyPoint],
) -> Result<MarginEstimate> {
    check_gamma(gamma)?;
    if gamma <= 0.0 {
        return Err(invalid(format!("the two-term margin needs gamma > 0, got {gamma}")));
    }
    let dim = family.dim();
    let sampled = sample_family(family, bc, lambda_grid, points)?;
    let sign = -bc.boundary_sign();
    let samples: Vec<SurplusSample> = ratio_samples(&sampled, gamma)?
        .into_iter()
        .zip(
            sampled
                .iter()
                .flat_map(|s| std::iter::repeat_n(s.domain.surface(), s.lambdas.len())),
        )
        .map(|(r, surface)| {
            let scale = surface * r.lambda.powf(gamma + 0.5 * (dim as f64 - 1.0));
            SurplusSample {
                surplus: sign * (r.main - r.value) / scale,
                point: r.point,
                domain: r.domain,
                lambda: r.lambda,
                value: r.value,
                main: r.main,
                scale,
            }
        })
        .collect();
    // minimum, earliest on ties
    let i = extremal_index(BoundaryCondition::Neumann, samples.iter().map(|s| s.surplus));
    let c_hat = samples[i].surplus;
    let consistent = samples.iter().all(|s| {
        let slack = 1e-12 * s.main.abs().max(s.value.abs());
        match bc {
            BoundaryCondition::Dirichlet => s.value <= (s.main - c_hat * s.scale).max(0.0) + slack,
            BoundaryCondition::Neumann => s.value + slack >= s.main + c_hat * s.scale,
        }
    });
    Ok(MarginEstimate {
        gamma,
        dim,
        bc,
        c_hat,
        arg: samples[i].clone(),
        consistent,
        grids: GridSummary::new(lambda_grid, points),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::FamilySpec;
    use crate::grid::log_grid;
    use crate::semiclassics::lsc;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;
    use BoundaryCondition::{Dirichlet, Neumann};

    fn square() -> Domain {
        Domain::cuboid(&[1.0, 1.0]).unwrap()
    }

    #[test]
    fn polya_examples() {
        let r = polya_check(&square(), Dirichlet, &[50.0]).unwrap();
        assert_relative_eq!(r.min_margin, 50.0 / (4.0 * PI) - 3.0, max_relative = 1e-12);
        assert!(r.pass);
        let r = polya_check(&square(), Neumann, &[50.0]).unwrap();
        assert_relative_eq!(r.min_margin, 8.0 - 50.0 / (4.0 * PI), max_relative = 1e-12);
        assert!(r.pass);
        let r = polya_check(&Domain::interval(1.0).unwrap(), Dirichlet, &[100.0]).unwrap();
        assert_relative_eq!(r.min_margin, 10.0 / PI - 3.0, max_relative = 1e-12);
    }

    #[test]
    fn grid_points_on_eigenvalues_are_nudged() {
        // 2 pi^2 is the first Dirichlet eigenvalue of the unit square
        let mu = 2.0 * PI * PI;
        let r = polya_check(&square(), Dirichlet, &[mu]).unwrap();
        assert!(r.rows[0].lambda > mu);
        assert_eq!(r.rows[0].value, 1.0);
    }

    #[test]
    fn bly_kroger_examples() {
        let main = lsc(1.0, 2) * 1000f64.powi(2);
        assert_relative_eq!(main, 39788.735772973836, max_relative = 1e-12);
        let d = bly_kroger_check(&square(), Dirichlet, 1.0, &[1000.0]).unwrap();
        assert!(d.pass && d.rows[0].value < main);
        let n = bly_kroger_check(&square(), Neumann, 1.0, &[1000.0]).unwrap();
        assert!(n.pass && n.rows[0].value > main);
        let disk = Domain::unit_volume_ball(2).unwrap();
        assert!(bly_kroger_check(&disk, Dirichlet, 1.0, &[1000.0]).unwrap().pass);
        assert!(bly_kroger_check(&square(), Dirichlet, 0.5, &[10.0]).is_err());
    }

    #[test]
    fn excess_single_point_equals_ratio() {
        let fam: Family = FamilySpec::box2d_aspect(1.0, 4.0).unwrap().into();
        let pts = vec![FamilyPoint {
            member: 0,
            coords: vec![2.0],
        }];
        let e = excess_factor_estimate(&fam, Dirichlet, 1.0, &[300.0], &pts).unwrap();
        let d = Domain::cuboid(&[2.0, 0.5]).unwrap();
        assert_eq!(e.value, normalized_ratio(&d, Dirichlet, 1.0, 300.0).unwrap());
    }

    #[test]
    fn excess_extremum_is_reproducible() {
        let fam: Family = "box2d:1..4".parse().unwrap();
        let pts = fam.grid(9).unwrap();
        let grid = log_grid(10.0, 1e3, 12).unwrap();
        for bc in [Dirichlet, Neumann] {
            let e = excess_factor_estimate(&fam, bc, 1.0, &grid, &pts).unwrap();
            let d = fam.domain(&e.arg.point).unwrap();
            let again = normalized_ratio(&d, bc, 1.0, e.arg.lambda).unwrap();
            assert_relative_eq!(again, e.value, max_relative = 1e-12);
            for s in &e.samples {
                assert!(!more_extreme(bc, s.ratio, e.value));
            }
        }
    }

    #[test]
    fn boxes_never_violate_polya() {
        let fam: Family = "box2d:1..4".parse().unwrap();
        let gammas: Vec<f64> = (0..=6).map(|i| 0.25 * i as f64).collect();
        let c = critical_exponent_scan(
            &fam,
            Dirichlet,
            &gammas,
            &log_grid(5.0, 2e3, 15).unwrap(),
            &fam.grid(5).unwrap(),
        )
        .unwrap();
        assert_eq!(c.lower, None);
        assert_eq!(c.upper, Some(0.0));
        assert!(c.witnesses.is_empty());
    }

    #[test]
    fn witnesses_reproduce() {
        // Below the first Neumann eigenvalue the counting function is 1,
        // far above the Weyl term, so no Neumann violation; a Dirichlet
        // disk at the first eigenvalue is not a violation either. Use a
        // forged witness to exercise the replay path.
        let w = Witness {
            domain: "box:1,1".into(),
            bc: Neumann,
            gamma: 0.0,
            lambda: 50.0,
            ratio: 8.0 / (50.0 / (4.0 * PI)),
        };
        assert_relative_eq!(w.recompute().unwrap(), w.ratio, max_relative = 1e-12);
        assert!(!w.reproduces().unwrap());
    }

    #[test]
    fn margin_single_point() {
        let fam: Family = "box2d:1..1".parse().unwrap();
        let pts = fam.grid(64).unwrap();
        let m = two_term_margin(&fam, Dirichlet, 1.0, &[1e4], &pts).unwrap();
        let tr = crate::spectrum::riesz_mean(&square(), Dirichlet, 1.0, 1e4)
            .unwrap()
            .value;
        let expect = (lsc(1.0, 2) * 1e8 - tr) / (4.0 * 1e6);
        assert_relative_eq!(m.c_hat, expect, max_relative = 1e-12);
        assert!(m.consistent);
        assert!(two_term_margin(&fam, Dirichlet, 0.0, &[1e4], &pts).is_err());
    }
}
