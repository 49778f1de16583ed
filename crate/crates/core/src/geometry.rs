//! Catalogue of convex domains with closed-form geometry.
//!
//! Every body in the catalogue is centred at the origin and symmetric under
//! `x -> -x`, which lets the Hausdorff distance be computed from support
//! functions alone.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, LabError, Result};
use crate::golden::golden_section_max;

/// A bounded, open, convex body from the explicit catalogue.
#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    /// `(-L/2, L/2)`.
    Interval { length: f64 },
    /// Axis-parallel box with the given side lengths.
    Box { sides: Vec<f64> },
    /// Euclidean ball of the given radius in dimension 1, 2 or 3.
    Ball { radius: f64, dim: usize },
    /// Cylinder `cross_section x (-length/2, length/2)`.
    Product {
        cross_section: std::boxed::Box<Domain>,
        length: f64,
    },
}

fn check_len(what: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("{what} must be a positive finite number, got {x}")))
    }
}

impl Domain {
    pub fn interval(length: f64) -> Result<Self> {
        check_len("interval length", length)?;
        Ok(Domain::Interval { length })
    }

    /// Box with the given sides. A one-sided box is returned as an interval.
    pub fn cuboid(sides: &[f64]) -> Result<Self> {
        if sides.is_empty() {
            return Err(invalid("a box needs at least one side"));
        }
        for &s in sides {
            check_len("box side", s)?;
        }
        if sides.len() == 1 {
            return Ok(Domain::Interval { length: sides[0] });
        }
        Ok(Domain::Box { sides: sides.to_vec() })
    }

    pub fn ball(radius: f64, dim: usize) -> Result<Self> {
        check_len("ball radius", radius)?;
        if !(1..=3).contains(&dim) {
            return Err(invalid(format!("ball dimension must be 1, 2 or 3, got {dim}")));
        }
        Ok(Domain::Ball { radius, dim })
    }

    pub fn product(cross_section: Domain, length: f64) -> Result<Self> {
        check_len("product length", length)?;
        cross_section.validate()?;
        Ok(Domain::Product {
            cross_section: std::boxed::Box::new(cross_section),
            length,
        })
    }

    /// Unit-volume ball in dimension `dim`.
    pub fn unit_volume_ball(dim: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(invalid(format!("ball dimension must be 1, 2 or 3, got {dim}")));
        }
        Domain::ball(unit_ball_volume(dim).powf(-1.0 / dim as f64), dim)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Domain::Interval { length } => check_len("interval length", *length),
            Domain::Box { sides } => {
                if sides.is_empty() {
                    return Err(invalid("a box needs at least one side"));
                }
                sides.iter().try_for_each(|&s| check_len("box side", s))
            }
            Domain::Ball { radius, dim } => {
                check_len("ball radius", *radius)?;
                if !(1..=3).contains(dim) {
                    return Err(invalid(format!("ball dimension must be 1, 2 or 3, got {dim}")));
                }
                Ok(())
            }
            Domain::Product { cross_section, length } => {
                check_len("product length", *length)?;
                cross_section.validate()
            }
        }
    }

    /// Ambient dimension.
    pub fn dim(&self) -> usize {
        match self {
            Domain::Interval { .. } => 1,
            Domain::Box { sides } => sides.len(),
            Domain::Ball { dim, .. } => *dim,
            Domain::Product { cross_section, .. } => cross_section.dim() + 1,
        }
    }

    pub fn volume(&self) -> f64 {
        match self {
            Domain::Interval { length } => *length,
            Domain::Box { sides } => sides.iter().product(),
            Domain::Ball { radius, dim } => unit_ball_volume(*dim) * radius.powi(*dim as i32),
            Domain::Product { cross_section, length } => cross_section.volume() * length,
        }
    }

    /// (d-1)-dimensional measure of the boundary. The boundary of an
    /// interval is its two endpoints, so its measure is 2.
    pub fn surface(&self) -> f64 {
        match self {
            Domain::Interval { .. } => 2.0,
            Domain::Box { sides } => {
                let faces: f64 = (0..sides.len())
                    .map(|i| {
                        sides
                            .iter()
                            .enumerate()
                            .filter(|&(j, _)| j != i)
                            .map(|(_, a)| a)
                            .product::<f64>()
                    })
                    .sum();
                2.0 * faces
            }
            Domain::Ball { radius, dim } => match dim {
                1 => 2.0,
                2 => 2.0 * PI * radius,
                _ => 4.0 * PI * radius * radius,
            },
            Domain::Product { cross_section, length } => {
                2.0 * cross_section.volume() + length * cross_section.surface()
            }
        }
    }

    pub fn inradius(&self) -> f64 {
        match self {
            Domain::Interval { length } => 0.5 * length,
            Domain::Box { sides } => 0.5 * sides.iter().copied().fold(f64::INFINITY, f64::min),
            Domain::Ball { radius, .. } => *radius,
            Domain::Product { cross_section, length } => cross_section.inradius().min(0.5 * length),
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            Domain::Interval { length } => *length,
            Domain::Box { sides } => sides.iter().map(|a| a * a).sum::<f64>().sqrt(),
            Domain::Ball { radius, .. } => 2.0 * radius,
            Domain::Product { cross_section, length } => cross_section.diameter().hypot(*length),
        }
    }

    /// Dilation by `t` about the origin.
    pub fn scale(&self, t: f64) -> Result<Domain> {
        if !(t.is_finite() && t > 0.0) {
            return Err(invalid(format!("scale factor must be positive, got {t}")));
        }
        Ok(self.scaled_unchecked(t))
    }

    fn scaled_unchecked(&self, t: f64) -> Domain {
        match self {
            Domain::Interval { length } => Domain::Interval { length: t * length },
            Domain::Box { sides } => Domain::Box {
                sides: sides.iter().map(|a| t * a).collect(),
            },
            Domain::Ball { radius, dim } => Domain::Ball {
                radius: t * radius,
                dim: *dim,
            },
            Domain::Product { cross_section, length } => Domain::Product {
                cross_section: std::boxed::Box::new(cross_section.scaled_unchecked(t)),
                length: t * length,
            },
        }
    }

    /// Rescales to unit volume; returns the body and the factor used.
    pub fn normalize_unit_volume(&self) -> (Domain, f64) {
        let t = self.volume().powf(-1.0 / self.dim() as f64);
        if t == 1.0 {
            return (self.clone(), 1.0);
        }
        (self.scaled_unchecked(t), t)
    }

    /// Support function `h(u) = sup_{x in D} <x, u>` of the centred body.
    /// `u` need not be normalised.
    pub fn support(&self, u: &[f64]) -> f64 {
        debug_assert_eq!(u.len(), self.dim());
        match self {
            Domain::Interval { length } => 0.5 * length * u[0].abs(),
            Domain::Box { sides } => sides.iter().zip(u).map(|(a, x)| 0.5 * a * x.abs()).sum(),
            Domain::Ball { radius, .. } => radius * u.iter().map(|x| x * x).sum::<f64>().sqrt(),
            Domain::Product { cross_section, length } => {
                let (head, last) = u.split_at(u.len() - 1);
                cross_section.support(head) + 0.5 * length * last[0].abs()
            }
        }
    }

    /// Rewrites boxes of dimension one as intervals, unit-dimensional balls
    /// as intervals, and products whose cross-section is a box as boxes.
    pub fn canonical(&self) -> Domain {
        match self {
            Domain::Box { sides } if sides.len() == 1 => Domain::Interval { length: sides[0] },
            Domain::Ball { radius, dim: 1 } => Domain::Interval { length: 2.0 * radius },
            Domain::Product { cross_section, length } => match cross_section.canonical() {
                Domain::Interval { length: a } => Domain::Box {
                    sides: vec![a, *length],
                },
                Domain::Box { mut sides } => {
                    sides.push(*length);
                    Domain::Box { sides }
                }
                other => Domain::Product {
                    cross_section: std::boxed::Box::new(other),
                    length: *length,
                },
            },
            other => other.clone(),
        }
    }

    pub fn report(&self) -> GeometrySummary {
        let volume = self.volume();
        let surface = self.surface();
        let inradius = self.inradius();
        let diameter = self.diameter();
        let d = self.dim() as f64;
        let lower = volume / surface;
        let upper = d * volume / surface;
        let slack = 1e-12 * inradius;
        GeometrySummary {
            volume,
            surface,
            inradius,
            diameter,
            inradius_lower_bound: lower,
            inradius_upper_bound: upper,
            lower_bound_holds: lower <= inradius + slack,
            upper_bound_holds: inradius <= upper + slack,
            diameter_ratio: diameter * inradius.powi(self.dim() as i32 - 1) / volume,
        }
    }
}

/// Volume of the unit ball in `R^d`.
pub fn unit_ball_volume(d: usize) -> f64 {
    match d {
        1 => return 2.0,
        2 => return PI,
        3 => return 4.0 / 3.0 * PI,
        _ => {}
    }
    let half = 0.5 * d as f64;
    PI.powf(half) / statrs::function::gamma::gamma(half + 1.0)
}

/// Exact geometric functionals of a catalogue body, together with the
/// inradius bounds `|D|/H(dD) <= r_in <= d |D|/H(dD)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometrySummary {
    pub volume: f64,
    pub surface: f64,
    pub inradius: f64,
    pub diameter: f64,
    pub inradius_lower_bound: f64,
    pub inradius_upper_bound: f64,
    pub lower_bound_holds: bool,
    pub upper_bound_holds: bool,
    /// `diam * r_in^(d-1) / |D|`, reported for monitoring only.
    pub diameter_ratio: f64,
}

/// A finite family of bodies of common dimension, placed disjointly.
/// Placement never affects the functionals computed here.
#[derive(Debug, Clone, PartialEq)]
pub struct DisjointUnion {
    components: Vec<Domain>,
}

impl DisjointUnion {
    pub fn new(components: Vec<Domain>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| invalid("a disjoint union needs at least one component"))?;
        let d = first.dim();
        for c in &components {
            c.validate()?;
            if c.dim() != d {
                return Err(invalid(format!(
                    "union components must share a dimension ({} vs {d})",
                    c.dim()
                )));
            }
        }
        Ok(Self { components })
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn scale(&self, t: f64) -> Result<Self> {
        Ok(Self {
            components: self.components.iter().map(|c| c.scale(t)).collect::<Result<_>>()?,
        })
    }

    pub fn normalize_unit_volume(&self) -> (Self, f64) {
        let t = self.total_volume().powf(-1.0 / self.ambient_dim() as f64);
        let components = self.components.iter().map(|c| c.scaled_unchecked(t)).collect();
        (Self { components }, t)
    }
}

/// Anything that is a finite list of catalogue components.
pub trait Components {
    fn components(&self) -> &[Domain];

    fn ambient_dim(&self) -> usize {
        self.components()[0].dim()
    }

    fn total_volume(&self) -> f64 {
        self.components().iter().map(Domain::volume).sum()
    }

    fn total_surface(&self) -> f64 {
        self.components().iter().map(Domain::surface).sum()
    }

    /// Largest inradius among the components.
    fn max_inradius(&self) -> f64 {
        self.components().iter().map(Domain::inradius).fold(0.0, f64::max)
    }
}

impl Components for Domain {
    fn components(&self) -> &[Domain] {
        std::slice::from_ref(self)
    }
}

impl Components for DisjointUnion {
    fn components(&self) -> &[Domain] {
        &self.components
    }
}

/// A single body or a disjoint union, as produced by the text syntax.
#[derive(Debug, Clone, PartialEq)]
pub enum Body {
    Single(Domain),
    Union(DisjointUnion),
}

impl Components for Body {
    fn components(&self) -> &[Domain] {
        match self {
            Body::Single(d) => d.components(),
            Body::Union(u) => u.components(),
        }
    }
}

impl Body {
    pub fn scale(&self, t: f64) -> Result<Body> {
        Ok(match self {
            Body::Single(d) => Body::Single(d.scale(t)?),
            Body::Union(u) => Body::Union(u.scale(t)?),
        })
    }

    pub fn as_single(&self) -> Option<&Domain> {
        match self {
            Body::Single(d) => Some(d),
            Body::Union(_) => None,
        }
    }
}

impl From<Domain> for Body {
    fn from(d: Domain) -> Self {
        Body::Single(d)
    }
}

impl From<DisjointUnion> for Body {
    fn from(u: DisjointUnion) -> Self {
        Body::Union(u)
    }
}

/// Number of sampled directions for mixed-shape Hausdorff distances.
pub const HAUSDORFF_DIRECTIONS_2D: usize = 4096;
pub const HAUSDORFF_DIRECTIONS_3D: usize = 8192;
const HAUSDORFF_ANGLE_TOL: f64 = 1e-11;

/// Hausdorff distance between two centred catalogue bodies, computed as the
/// sup-norm of the difference of their support functions on the sphere.
pub fn hausdorff_distance(a: &Domain, b: &Domain) -> Result<f64> {
    a.validate()?;
    b.validate()?;
    if a.dim() != b.dim() {
        return Err(invalid(format!(
            "Hausdorff distance needs equal dimensions ({} vs {})",
            a.dim(),
            b.dim()
        )));
    }
    let (a, b) = (a.canonical(), b.canonical());
    let d = a.dim();
    if d == 1 {
        return Ok((a.support(&[1.0]) - b.support(&[1.0])).abs());
    }
    match (&a, &b) {
        (Domain::Ball { radius: ra, .. }, Domain::Ball { radius: rb, .. }) => Ok((ra - rb).abs()),
        (Domain::Box { sides: sa }, Domain::Box { sides: sb }) => {
            // sup_u sum_i c_i |u_i| over the unit sphere is the norm of the
            // positive part of c; the infimum is minus the norm of the
            // negative part.
            let (mut pos, mut neg) = (0.0f64, 0.0f64);
            for (x, y) in sa.iter().zip(sb) {
                let c = 0.5 * (x - y);
                if c > 0.0 {
                    pos += c * c;
                } else {
                    neg += c * c;
                }
            }
            Ok(pos.sqrt().max(neg.sqrt()))
        }
        _ => match d {
            2 => Ok(sampled_distance_2d(&a, &b)),
            3 => Ok(sampled_distance_3d(&a, &b)),
            _ => Err(invalid(format!(
                "mixed-shape Hausdorff distance is only available in dimension 2 and 3, got {d}"
            ))),
        },
    }
}

fn support_gap(a: &Domain, b: &Domain, u: &[f64]) -> f64 {
    (a.support(u) - b.support(u)).abs()
}

fn sampled_distance_2d(a: &Domain, b: &Domain) -> f64 {
    let n = HAUSDORFF_DIRECTIONS_2D;
    let step = 2.0 * PI / n as f64;
    let gap = |theta: f64| support_gap(a, b, &[theta.cos(), theta.sin()]);
    let (mut best_theta, mut best) = (0.0, gap(0.0));
    for k in 1..n {
        let theta = k as f64 * step;
        let g = gap(theta);
        if g > best {
            best = g;
            best_theta = theta;
        }
    }
    let (_, refined) = golden_section_max(gap, best_theta - step, best_theta + step, HAUSDORFF_ANGLE_TOL);
    best.max(refined)
}

fn sphere_point(theta: f64, phi: f64) -> [f64; 3] {
    let s = theta.sin();
    [s * phi.cos(), s * phi.sin(), theta.cos()]
}

fn sampled_distance_3d(a: &Domain, b: &Domain) -> f64 {
    let n = HAUSDORFF_DIRECTIONS_3D;
    let golden_angle = PI * (3.0 - 5f64.sqrt());
    let mut best = 0.0;
    let mut best_dir = [0.0, 0.0, 1.0];
    let mut consider = |u: [f64; 3]| {
        let g = support_gap(a, b, &u);
        if g > best {
            best = g;
            best_dir = u;
        }
    };
    // Fibonacci lattice on the sphere.
    for k in 0..n {
        let z = 1.0 - (2.0 * k as f64 + 1.0) / n as f64;
        let rho = (1.0 - z * z).sqrt();
        let phi = golden_angle * k as f64;
        consider([rho * phi.cos(), rho * phi.sin(), z]);
    }
    // Axes, face diagonals and body diagonals, where box-like support
    // functions attain their extremes.
    for i in -1i32..=1 {
        for j in -1i32..=1 {
            for k in -1i32..=1 {
                if (i, j, k) != (0, 0, 0) {
                    let norm = ((i * i + j * j + k * k) as f64).sqrt();
                    consider([i as f64 / norm, j as f64 / norm, k as f64 / norm]);
                }
            }
        }
    }

    let mut theta = best_dir[2].clamp(-1.0, 1.0).acos();
    let mut phi = best_dir[1].atan2(best_dir[0]);
    let window = (4.0 * PI / n as f64).sqrt();
    let mut value = best;
    for _ in 0..4 {
        let (t, v) = golden_section_max(
            |t| support_gap(a, b, &sphere_point(t, phi)),
            theta - window,
            theta + window,
            HAUSDORFF_ANGLE_TOL,
        );
        if v > value {
            value = v;
            theta = t;
        }
        let (p, v) = golden_section_max(
            |p| support_gap(a, b, &sphere_point(theta, p)),
            phi - window,
            phi + window,
            HAUSDORFF_ANGLE_TOL,
        );
        if v > value {
            value = v;
            phi = p;
        }
    }
    value
}

// ---------------------------------------------------------------------------
// Text syntax: interval:L, box:a,b[,c], ball:R@d, product:(CROSS)xL,
// union:[D1;D2;...]

pub(crate) fn parse_error(token: &str, reason: impl Into<String>) -> LabError {
    LabError::Parse {
        token: token.to_string(),
        reason: reason.into(),
    }
}

pub(crate) fn parse_real(whole: &str, s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| parse_error(whole, format!("`{s}` is not a decimal number")))?;
    Ok(v)
}

fn parse_domain_inner(whole: &str, s: &str) -> Result<Domain> {
    let s = s.trim();
    let (head, rest) = s
        .split_once(':')
        .ok_or_else(|| parse_error(whole, "expected `kind:parameters`"))?;
    let wrap = |r: Result<Domain>| r.map_err(|e| parse_error(whole, e.to_string()));
    match head.trim() {
        "interval" => wrap(Domain::interval(parse_real(whole, rest)?)),
        "box" => {
            let sides = rest
                .split(',')
                .map(|x| parse_real(whole, x))
                .collect::<Result<Vec<_>>>()?;
            wrap(Domain::cuboid(&sides))
        }
        "ball" => {
            let (r, d) = rest
                .split_once('@')
                .ok_or_else(|| parse_error(whole, "ball needs `R@dim`"))?;
            let dim: usize = d
                .trim()
                .parse()
                .map_err(|_| parse_error(whole, format!("`{d}` is not a dimension")))?;
            wrap(Domain::ball(parse_real(whole, r)?, dim))
        }
        "product" => {
            let rest = rest.trim();
            if !rest.starts_with('(') {
                return Err(parse_error(whole, "product needs `(CROSS)xL`"));
            }
            let close = matching_paren(rest).ok_or_else(|| parse_error(whole, "unbalanced parentheses"))?;
            let cross = parse_domain_inner(whole, &rest[1..close])?;
            let tail = rest[close + 1..].trim();
            let len = tail
                .strip_prefix('x')
                .ok_or_else(|| parse_error(whole, "product needs `(CROSS)xL`"))?;
            wrap(Domain::product(cross, parse_real(whole, len)?))
        }
        "union" => Err(parse_error(whole, "a union is not a single domain")),
        other => Err(parse_error(whole, format!("unknown domain kind `{other}`"))),
    }
}

pub(crate) fn matching_paren(s: &str) -> Option<usize> {
    let mut depth = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => {
                depth = depth.checked_sub(1)?;
                if depth == 0 {
                    return Some(i);
                }
            }
            _ => {}
        }
    }
    None
}

pub(crate) fn split_top_level(s: &str, sep: char) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            c if c == sep && depth == 0 => {
                parts.push(&s[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

impl FromStr for Domain {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        parse_domain_inner(s, s)
    }
}

impl FromStr for Body {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Some(rest) = t.strip_prefix("union:") {
            let inner = rest
                .trim()
                .strip_prefix('[')
                .and_then(|r| r.strip_suffix(']'))
                .ok_or_else(|| parse_error(s, "union needs `[D1;D2;...]`"))?;
            let components = split_top_level(inner, ';')
                .into_iter()
                .map(|part| parse_domain_inner(s, part))
                .collect::<Result<Vec<_>>>()?;
            let u = DisjointUnion::new(components).map_err(|e| parse_error(s, e.to_string()))?;
            Ok(Body::Union(u))
        } else {
            Ok(Body::Single(parse_domain_inner(s, t)?))
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Interval { length } => write!(f, "interval:{length}"),
            Domain::Box { sides } => {
                write!(f, "box:")?;
                for (i, s) in sides.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{s}")?;
                }
                Ok(())
            }
            Domain::Ball { radius, dim } => write!(f, "ball:{radius}@{dim}"),
            Domain::Product { cross_section, length } => write!(f, "product:({cross_section})x{length}"),
        }
    }
}

impl fmt::Display for DisjointUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "union:[")?;
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, ";")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for Body {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Body::Single(d) => d.fmt(f),
            Body::Union(u) => u.fmt(f),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn square() -> Domain {
        Domain::cuboid(&[1.0, 1.0]).unwrap()
    }

    #[test]
    fn volumes() {
        assert_eq!(Domain::cuboid(&[2.0, 0.5]).unwrap().volume(), 1.0);
        assert_relative_eq!(Domain::ball(1.0, 2).unwrap().volume(), PI, max_relative = 1e-15);
        let p = Domain::product(Domain::cuboid(&[0.5]).unwrap(), 2.0).unwrap();
        assert_eq!(p.volume(), 1.0);
        assert_relative_eq!(
            Domain::ball(1.0, 3).unwrap().volume(),
            4.0 / 3.0 * PI,
            max_relative = 1e-15
        );
        assert_eq!(Domain::ball(0.7, 1).unwrap().volume(), 1.4);
    }

    #[test]
    fn surfaces() {
        assert_eq!(square().surface(), 4.0);
        assert_relative_eq!(Domain::ball(1.0, 3).unwrap().surface(), 4.0 * PI);
        let p = Domain::product(Domain::interval(0.5).unwrap(), 2.0).unwrap();
        assert_eq!(p.surface(), 5.0);
        assert_eq!(Domain::interval(3.0).unwrap().surface(), 2.0);
        // cube: 6 faces
        assert_eq!(Domain::cuboid(&[1.0, 1.0, 1.0]).unwrap().surface(), 6.0);
    }

    #[test]
    fn inradius_and_diameter() {
        assert_eq!(square().inradius(), 0.5);
        assert_eq!(Domain::cuboid(&[4.0, 0.25]).unwrap().inradius(), 0.125);
        assert_eq!(Domain::ball(0.3, 2).unwrap().inradius(), 0.3);
        assert_eq!(Domain::cuboid(&[3.0, 4.0]).unwrap().diameter(), 5.0);
        assert_eq!(Domain::ball(1.0, 2).unwrap().diameter(), 2.0);
        let p = Domain::product(Domain::interval(1.0).unwrap(), 1.0).unwrap();
        assert_relative_eq!(p.diameter(), 2f64.sqrt());
    }

    #[test]
    fn scaling_and_normalisation() {
        assert_eq!(square().scale(2.0).unwrap(), Domain::cuboid(&[2.0, 2.0]).unwrap());
        assert_eq!(
            Domain::ball(1.0, 2).unwrap().scale(0.5).unwrap(),
            Domain::ball(0.5, 2).unwrap()
        );
        assert_eq!(Domain::cuboid(&[2.0, 0.5]).unwrap().scale(3.0).unwrap().volume(), 9.0);
        assert!(square().scale(0.0).is_err());
        assert!(square().scale(-1.0).is_err());

        let (d, t) = Domain::cuboid(&[2.0, 0.5]).unwrap().normalize_unit_volume();
        assert_eq!(t, 1.0);
        assert_eq!(d, Domain::cuboid(&[2.0, 0.5]).unwrap());
        let (d, t) = Domain::ball(1.0, 2).unwrap().normalize_unit_volume();
        assert_relative_eq!(t, 0.5641895835477563, max_relative = 1e-14);
        assert_relative_eq!(d.volume(), 1.0, max_relative = 1e-14);
        let (d, t) = Domain::cuboid(&[2.0, 2.0]).unwrap().normalize_unit_volume();
        assert_eq!((d, t), (square(), 0.5));
    }

    #[test]
    fn interval_is_one_dimensional_box() {
        let i = Domain::cuboid(&[2.5]).unwrap();
        assert_eq!(i, Domain::interval(2.5).unwrap());
        let b = Domain::Box { sides: vec![2.5] };
        assert_eq!(b.volume(), i.volume());
        assert_eq!(b.surface(), i.surface());
        assert_eq!(b.inradius(), i.inradius());
        assert_eq!(b.diameter(), i.diameter());
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(Domain::cuboid(&[1.0, 0.0]).is_err());
        assert!(Domain::cuboid(&[]).is_err());
        assert!(Domain::ball(1.0, 4).is_err());
        assert!(Domain::ball(-1.0, 2).is_err());
        assert!(Domain::interval(f64::NAN).is_err());
        assert!(DisjointUnion::new(vec![]).is_err());
        assert!(DisjointUnion::new(vec![square(), Domain::interval(1.0).unwrap()]).is_err());
    }

    #[test]
    fn reports() {
        let r = square().report();
        assert_eq!((r.volume, r.surface, r.inradius), (1.0, 4.0, 0.5));
        assert_relative_eq!(r.diameter, 2f64.sqrt());
        assert_eq!((r.inradius_lower_bound, r.inradius_upper_bound), (0.25, 0.5));
        assert!(r.lower_bound_holds && r.upper_bound_holds);

        let r = Domain::ball(1.0, 2).unwrap().report();
        assert_relative_eq!(r.inradius_lower_bound, 0.5);
        assert_relative_eq!(r.inradius_upper_bound, 1.0);
        assert!(r.lower_bound_holds && r.upper_bound_holds);

        let r = Domain::cuboid(&[10.0, 0.1]).unwrap().report();
        assert_relative_eq!(r.surface, 20.2, max_relative = 1e-14);
        assert_relative_eq!(r.diameter, 10.0005, max_relative = 1e-6);
        assert_relative_eq!(r.inradius_lower_bound, 1.0 / 20.2, max_relative = 1e-14);
        assert_relative_eq!(r.inradius_upper_bound, 2.0 / 20.2, max_relative = 1e-14);
        assert!(r.lower_bound_holds && r.upper_bound_holds);
    }

    #[test]
    fn hausdorff_examples() {
        let d = hausdorff_distance(&Domain::ball(1.0, 2).unwrap(), &Domain::ball(0.6, 2).unwrap()).unwrap();
        assert_relative_eq!(d, 0.4, max_relative = 1e-15);
        let d = hausdorff_distance(&square(), &Domain::cuboid(&[1.2, 0.8]).unwrap()).unwrap();
        assert_relative_eq!(d, 0.1, max_relative = 1e-12);
        let d = hausdorff_distance(&square(), &Domain::ball(0.5, 2).unwrap()).unwrap();
        assert_relative_eq!(d, 0.5 * 2f64.sqrt() - 0.5, epsilon = 1e-9);
        assert!(hausdorff_distance(&square(), &Domain::ball(0.5, 3).unwrap()).is_err());
    }

    #[test]
    fn hausdorff_cube_and_ball_in_3d() {
        // corner direction: sqrt(3)/2 - r
        let cube = Domain::cuboid(&[1.0, 1.0, 1.0]).unwrap();
        let d = hausdorff_distance(&cube, &Domain::ball(0.5, 3).unwrap()).unwrap();
        assert_relative_eq!(d, 0.75f64.sqrt() - 0.5, epsilon = 1e-9);
        // ball larger than the cube's corner: extreme on the axes
        let d = hausdorff_distance(&cube, &Domain::ball(1.0, 3).unwrap()).unwrap();
        assert_relative_eq!(d, 0.5, epsilon = 1e-9);
    }

    #[test]
    fn hausdorff_cylinder_matches_box_when_cross_section_is_box() {
        let cyl = Domain::product(Domain::cuboid(&[1.0, 2.0]).unwrap(), 3.0).unwrap();
        let b = Domain::cuboid(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(hausdorff_distance(&cyl, &b).unwrap(), 0.0);
        // disk x interval against the circumscribing box
        let disk_cyl = Domain::product(Domain::ball(0.5, 2).unwrap(), 1.0).unwrap();
        let cube = Domain::cuboid(&[1.0, 1.0, 1.0]).unwrap();
        let d = hausdorff_distance(&disk_cyl, &cube).unwrap();
        assert_relative_eq!(d, 0.5 * 2f64.sqrt() - 0.5, epsilon = 1e-9);
    }

    #[test]
    fn parse_and_display() {
        let cases = [
            "interval:3.14159265358979",
            "box:1,1",
            "box:0.5,2,3",
            "ball:1@2",
            "product:(ball:0.5@2)x2",
            "product:(product:(interval:1)x2)x0.25",
        ];
        for c in cases {
            let d: Domain = c.parse().unwrap();
            assert_eq!(d.to_string(), c);
            assert_eq!(d.to_string().parse::<Domain>().unwrap(), d);
        }
        let u: Body = "union:[box:1,1;ball:0.1@2]".parse().unwrap();
        assert_eq!(u.components().len(), 2);
        assert_eq!(u.to_string(), "union:[box:1,1;ball:0.1@2]");
        let u: Body = "union:[product:(interval:1)x2;box:1,1]".parse().unwrap();
        assert_eq!(u.components().len(), 2);
    }

    #[test]
    fn parse_errors_name_the_token() {
        for bad in [
            "box:0,-1",
            "ball:1@4",
            "sphere:1",
            "box:a,1",
            "product:(interval:1)",
            "union:[box:1,1;interval:1]",
        ] {
            match bad.parse::<Body>() {
                Err(LabError::Parse { token, .. }) => assert_eq!(token, bad),
                other => panic!("{bad}: {other:?}"),
            }
        }
    }

    #[test]
    fn union_functionals_are_sums() {
        let u = DisjointUnion::new(vec![square(), Domain::ball(0.1, 2).unwrap()]).unwrap();
        assert_relative_eq!(u.total_volume(), 1.0 + 0.01 * PI);
        assert_relative_eq!(u.total_surface(), 4.0 + 0.2 * PI);
        let (n, _) = u.normalize_unit_volume();
        assert_relative_eq!(n.total_volume(), 1.0, max_relative = 1e-14);
    }
}
