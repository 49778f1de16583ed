//! Exact Dirichlet and Neumann spectra of catalogue domains, counting
//! functions and Riesz means.
//!
//! Counting follows the strict convention: an eigenvalue `mu` contributes at
//! `lambda` only if `mu < lambda` under exact floating-point comparison.
//! Multiplicities come from the index data (lattice points, angular orders)
//! and are never inferred by comparing floating-point values.

pub mod bessel;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, LabError, Result};
use crate::geometry::{Body, Components, DisjointUnion, Domain};
use crate::semiclassics::lsc;
use crate::sum::CompensatedSum;
use bessel::{zeros_below, ZeroKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
}

impl BoundaryCondition {
    /// Sign of the boundary term in the two-term Weyl expansion.
    pub fn boundary_sign(self) -> f64 {
        match self {
            BoundaryCondition::Dirichlet => -1.0,
            BoundaryCondition::Neumann => 1.0,
        }
    }
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundaryCondition::Dirichlet => "dirichlet",
            BoundaryCondition::Neumann => "neumann",
        })
    }
}

impl FromStr for BoundaryCondition {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dirichlet" | "d" => Ok(BoundaryCondition::Dirichlet),
            "neumann" | "n" => Ok(BoundaryCondition::Neumann),
            _ => Err(LabError::Parse {
                token: s.to_string(),
                reason: "boundary condition must be `dirichlet` or `neumann`".into(),
            }),
        }
    }
}

/// Default cap on the number of eigenvalues a single enumeration may produce.
pub const DEFAULT_SPECTRUM_BUDGET: usize = 50_000_000;

static SPECTRUM_BUDGET: AtomicUsize = AtomicUsize::new(DEFAULT_SPECTRUM_BUDGET);

/// Sets the process-wide enumeration cap.
pub fn set_spectrum_budget(cap: usize) {
    SPECTRUM_BUDGET.store(cap, Ordering::Relaxed);
}

pub fn spectrum_budget() -> usize {
    SPECTRUM_BUDGET.load(Ordering::Relaxed)
}

/// Padded Weyl estimate of the number of eigenvalues below `cutoff`.
pub fn estimated_count<C: Components + ?Sized>(body: &C, cutoff: f64) -> f64 {
    let d = body.ambient_dim();
    lsc(0.0, d) * body.total_volume() * cutoff.powf(0.5 * d as f64) * 1.5 + 1e3
}

fn check_budget<C: Components + ?Sized>(body: &C, cutoff: f64) -> Result<()> {
    let estimate = estimated_count(body, cutoff);
    let cap = spectrum_budget();
    if estimate > cap as f64 {
        return Err(LabError::ResourceLimit { estimate, cutoff, cap });
    }
    Ok(())
}

/// Structural multiplicity label: this entry is copy `copy` of a mode with
/// `of` degenerate copies, on union component `component`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeTag {
    pub component: u32,
    pub copy: u32,
    pub of: u32,
}

impl ModeTag {
    const SIMPLE: ModeTag = ModeTag {
        component: 0,
        copy: 1,
        of: 1,
    };
}

/// Eigenvalues strictly below a cutoff, repeated according to multiplicity,
/// in non-decreasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSlice {
    cutoff: f64,
    bc: BoundaryCondition,
    body: Body,
    eigenvalues: Vec<f64>,
    tags: Vec<ModeTag>,
}

impl SpectrumSlice {
    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn bc(&self) -> BoundaryCondition {
        self.bc
    }

    pub fn body(&self) -> &Body {
        &self.body
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn tags(&self) -> &[ModeTag] {
        &self.tags
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    fn check_within(&self, lambda: f64) -> Result<()> {
        if !(lambda >= 0.0 && lambda <= self.cutoff) {
            return Err(invalid(format!(
                "lambda {lambda} lies outside the enumerated range [0, {}]",
                self.cutoff
            )));
        }
        Ok(())
    }

    /// Number of eigenvalues strictly below `lambda <= cutoff`.
    pub fn counting(&self, lambda: f64) -> Result<usize> {
        self.check_within(lambda)?;
        Ok(self.eigenvalues.partition_point(|&mu| mu < lambda))
    }

    /// `sum_{mu < lambda} (lambda - mu)^gamma` for `lambda <= cutoff`,
    /// accumulated from the largest gap down with compensated summation.
    pub fn riesz_mean(&self, gamma: f64, lambda: f64) -> Result<f64> {
        check_gamma(gamma)?;
        self.check_within(lambda)?;
        let n = self.eigenvalues.partition_point(|&mu| mu < lambda);
        let below = &self.eigenvalues[..n];
        if gamma == 0.0 {
            return Ok(n as f64);
        }
        let mut acc = CompensatedSum::new();
        if gamma == 1.0 {
            below.iter().for_each(|&mu| acc.add(lambda - mu));
        } else {
            below.iter().for_each(|&mu| acc.add((lambda - mu).powf(gamma)));
        }
        Ok(acc.value())
    }

    /// Returns `true` if `lambda` coincides exactly with a listed eigenvalue.
    pub fn contains(&self, lambda: f64) -> bool {
        let i = self.eigenvalues.partition_point(|&mu| mu < lambda);
        i < self.eigenvalues.len() && self.eigenvalues[i] == lambda
    }

    /// Multiplicity label of entry `i`: `copy/of`, prefixed by
    /// `c<component>:` for unions.
    pub fn tag_label(&self, i: usize) -> String {
        let tag = self.tags[i];
        match self.body {
            Body::Union(_) => format!("c{}:{}/{}", tag.component, tag.copy, tag.of),
            Body::Single(_) => format!("{}/{}", tag.copy, tag.of),
        }
    }

    /// CSV with columns `index,eigenvalue,multiplicity_tag`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,eigenvalue,multiplicity_tag\n");
        for (i, mu) in self.eigenvalues.iter().enumerate() {
            out.push_str(&format!("{},{:.16e},{}\n", i + 1, mu, self.tag_label(i)));
        }
        out
    }
}

/// `(lambda, gamma, Tr(-Delta - lambda)_-^gamma)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RieszValue {
    pub gamma: f64,
    pub lambda: f64,
    pub value: f64,
}

pub(crate) fn check_gamma(gamma: f64) -> Result<()> {
    if gamma.is_finite() && gamma >= 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("gamma must be finite and non-negative, got {gamma}")))
    }
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda >= 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("lambda must be finite and non-negative, got {lambda}")))
    }
}

fn body_of<C: Components + ?Sized>(body: &C) -> Result<Body> {
    let comps = body.components();
    if comps.len() == 1 {
        Ok(Body::Single(comps[0].clone()))
    } else {
        Ok(Body::Union(DisjointUnion::new(comps.to_vec())?))
    }
}

/// All eigenvalues strictly below `cutoff`.
pub fn eigenvalues_below<C: Components + ?Sized>(
    body: &C,
    bc: BoundaryCondition,
    cutoff: f64,
) -> Result<SpectrumSlice> {
    if !(cutoff.is_finite() && cutoff > 0.0) {
        return Err(invalid(format!("cutoff must be positive and finite, got {cutoff}")));
    }
    for c in body.components() {
        c.validate()?;
    }
    check_budget(body, cutoff)?;
    let mut entries: Vec<(f64, ModeTag)> = Vec::new();
    for (i, c) in body.components().iter().enumerate() {
        let start = entries.len();
        enumerate_domain(c, bc, cutoff, &mut entries)?;
        for e in &mut entries[start..] {
            e.1.component = i as u32;
        }
    }
    entries.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (eigenvalues, tags) = entries.into_iter().unzip();
    Ok(SpectrumSlice {
        cutoff,
        bc,
        body: body_of(body)?,
        eigenvalues,
        tags,
    })
}

fn first_index(bc: BoundaryCondition) -> u64 {
    match bc {
        BoundaryCondition::Dirichlet => 1,
        BoundaryCondition::Neumann => 0,
    }
}

#[inline]
fn lattice_term(n: u64, side: f64) -> f64 {
    let k = n as f64 * PI / side;
    k * k
}

fn enumerate_domain(domain: &Domain, bc: BoundaryCondition, cutoff: f64, out: &mut Vec<(f64, ModeTag)>) -> Result<()> {
    match domain {
        Domain::Interval { length } => enumerate_box(std::slice::from_ref(length), bc, cutoff, out),
        Domain::Box { sides } => enumerate_box(sides, bc, cutoff, out),
        Domain::Ball { radius, dim: 1 } => enumerate_box(&[2.0 * radius], bc, cutoff, out),
        Domain::Ball { radius, dim: 2 } => enumerate_disk(*radius, bc, cutoff, out)?,
        Domain::Ball { radius, .. } => enumerate_sphere(*radius, bc, cutoff, out)?,
        Domain::Product { cross_section, length } => {
            let mut cross = Vec::new();
            enumerate_domain(cross_section, bc, cutoff, &mut cross)?;
            let mut axial = Vec::new();
            enumerate_box(std::slice::from_ref(length), bc, cutoff, &mut axial);
            for &(mu, tag) in &cross {
                for &(nu, _) in &axial {
                    let v = mu + nu;
                    if v >= cutoff {
                        break;
                    }
                    out.push((v, tag));
                }
            }
        }
    }
    Ok(())
}

/// Depth-first enumeration of `sum_i (n_i pi / a_i)^2 < cutoff`, summing the
/// coordinate terms left to right.
fn enumerate_box(sides: &[f64], bc: BoundaryCondition, cutoff: f64, out: &mut Vec<(f64, ModeTag)>) {
    fn recurse(sides: &[f64], start: u64, partial: f64, cutoff: f64, out: &mut Vec<(f64, ModeTag)>) {
        let Some((&a, rest)) = sides.split_first() else {
            out.push((partial, ModeTag::SIMPLE));
            return;
        };
        let mut n = start;
        loop {
            let v = partial + lattice_term(n, a);
            if v >= cutoff {
                break;
            }
            recurse(rest, start, v, cutoff, out);
            n += 1;
        }
    }
    recurse(sides, first_index(bc), 0.0, cutoff, out);
}

fn push_mode(out: &mut Vec<(f64, ModeTag)>, value: f64, degeneracy: u32) {
    for copy in 1..=degeneracy {
        out.push((
            value,
            ModeTag {
                component: 0,
                copy,
                of: degeneracy,
            },
        ));
    }
}

/// Eigenvalues of a radial problem from Bessel-type zeros: `(z / R)^2` for
/// every zero `z` of order `k`, with `degeneracy(k)` copies.
fn enumerate_radial(
    radius: f64,
    bc: BoundaryCondition,
    cutoff: f64,
    kinds: (ZeroKind, ZeroKind),
    degeneracy: impl Fn(u32) -> u32,
    out: &mut Vec<(f64, ModeTag)>,
) -> Result<()> {
    let kind = match bc {
        BoundaryCondition::Dirichlet => kinds.0,
        BoundaryCondition::Neumann => {
            push_mode(out, 0.0, 1);
            kinds.1
        }
    };
    // zeros just above R sqrt(cutoff) are filtered by the exact comparison
    let bound = radius * cutoff.sqrt() * (1.0 + 1e-12) + 1e-12;
    for k in 0u32.. {
        let zeros = zeros_below(kind, k, bound)?;
        let mut any = false;
        for z in zeros {
            let s = z / radius;
            let v = s * s;
            if v < cutoff {
                push_mode(out, v, degeneracy(k));
                any = true;
            }
        }
        // For k >= 1 the first zero increases with the order.
        if !any && k >= 1 {
            break;
        }
    }
    Ok(())
}

fn enumerate_disk(radius: f64, bc: BoundaryCondition, cutoff: f64, out: &mut Vec<(f64, ModeTag)>) -> Result<()> {
    enumerate_radial(
        radius,
        bc,
        cutoff,
        (ZeroKind::J, ZeroKind::JPrime),
        |k| if k == 0 { 1 } else { 2 },
        out,
    )
}

fn enumerate_sphere(radius: f64, bc: BoundaryCondition, cutoff: f64, out: &mut Vec<(f64, ModeTag)>) -> Result<()> {
    enumerate_radial(
        radius,
        bc,
        cutoff,
        (ZeroKind::SphericalJ, ZeroKind::SphericalJPrime),
        |l| 2 * l + 1,
        out,
    )
}

/// Number of eigenvalues strictly below `lambda`.
pub fn counting<C: Components + ?Sized>(body: &C, bc: BoundaryCondition, lambda: f64) -> Result<usize> {
    check_lambda(lambda)?;
    if lambda == 0.0 {
        return Ok(0);
    }
    eigenvalues_below(body, bc, lambda)?.counting(lambda)
}

/// `Tr(-Delta - lambda)_-^gamma = sum_{mu < lambda} (lambda - mu)^gamma`.
pub fn riesz_mean<C: Components + ?Sized>(
    body: &C,
    bc: BoundaryCondition,
    gamma: f64,
    lambda: f64,
) -> Result<RieszValue> {
    check_gamma(gamma)?;
    check_lambda(lambda)?;
    let value = if lambda == 0.0 {
        0.0
    } else {
        eigenvalues_below(body, bc, lambda)?.riesz_mean(gamma, lambda)?
    };
    Ok(RieszValue { gamma, lambda, value })
}

/// Riesz mean of a disjoint union: the Riesz mean of its merged spectrum,
/// which equals the sum of the component Riesz means.
pub fn riesz_mean_union(union: &DisjointUnion, bc: BoundaryCondition, gamma: f64, lambda: f64) -> Result<RieszValue> {
    riesz_mean(union, bc, gamma, lambda)
}
