//! Parametric families of unit-volume convex bodies.
//!
//! Text syntax, with members of a family joined by `+`:
//!
//! * `box2d:LO..HI` gives `Box(s, 1/s)` for `s` in `[LO, HI]`;
//! * `box3d:LO..HI,LO..HI` gives `Box(p, q, 1/(p q))`;
//! * `ball@D` is the unit-volume ball in dimension `D`;
//! * `slab(CROSS):LO..HI` gives `CROSS x (-l/2, l/2)` with the cross-section
//!   rescaled to measure `1/l`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{invalid, LabError, Result};
use crate::geometry::{matching_paren, parse_error, parse_real, Domain};
use crate::grid::linear_grid;

#[derive(Debug, Clone, PartialEq)]
pub enum FamilyKind {
    Box2dAspect,
    Box3dAspect,
    Ball { dim: usize },
    ProductSlab { cross_section: Domain },
}

/// One parametric family with a closed interval per coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilySpec {
    kind: FamilyKind,
    ranges: Vec<(f64, f64)>,
}

fn check_range(lo: f64, hi: f64) -> Result<()> {
    if lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi {
        Ok(())
    } else {
        Err(invalid(format!(
            "parameter range must satisfy 0 < lo <= hi, got [{lo}, {hi}]"
        )))
    }
}

impl FamilySpec {
    pub fn box2d_aspect(s_min: f64, s_max: f64) -> Result<Self> {
        check_range(s_min, s_max)?;
        Ok(FamilySpec {
            kind: FamilyKind::Box2dAspect,
            ranges: vec![(s_min, s_max)],
        })
    }

    pub fn box3d_aspect(p: (f64, f64), q: (f64, f64)) -> Result<Self> {
        check_range(p.0, p.1)?;
        check_range(q.0, q.1)?;
        Ok(FamilySpec {
            kind: FamilyKind::Box3dAspect,
            ranges: vec![p, q],
        })
    }

    pub fn ball(dim: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(invalid(format!("ball dimension must be 1, 2 or 3, got {dim}")));
        }
        Ok(FamilySpec {
            kind: FamilyKind::Ball { dim },
            ranges: Vec::new(),
        })
    }

    pub fn product_slab(cross_section: Domain, l_min: f64, l_max: f64) -> Result<Self> {
        cross_section.validate()?;
        if cross_section.dim() > 2 {
            return Err(invalid("slab cross-sections must have dimension 1 or 2"));
        }
        check_range(l_min, l_max)?;
        Ok(FamilySpec {
            kind: FamilyKind::ProductSlab { cross_section },
            ranges: vec![(l_min, l_max)],
        })
    }

    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    pub fn ranges(&self) -> &[(f64, f64)] {
        &self.ranges
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            FamilyKind::Box2dAspect => 2,
            FamilyKind::Box3dAspect => 3,
            FamilyKind::Ball { dim } => *dim,
            FamilyKind::ProductSlab { cross_section } => cross_section.dim() + 1,
        }
    }

    pub fn arity(&self) -> usize {
        self.ranges.len()
    }

    /// The unit-volume body at `coords`.
    pub fn domain(&self, coords: &[f64]) -> Result<Domain> {
        if coords.len() != self.arity() {
            return Err(invalid(format!(
                "family `{self}` takes {} parameters, got {}",
                self.arity(),
                coords.len()
            )));
        }
        if let Some(&bad) = coords.iter().find(|c| !(c.is_finite() && **c > 0.0)) {
            return Err(invalid(format!("family parameters must be positive, got {bad}")));
        }
        match &self.kind {
            FamilyKind::Box2dAspect => Domain::cuboid(&[coords[0], 1.0 / coords[0]]),
            FamilyKind::Box3dAspect => {
                let (p, q) = (coords[0], coords[1]);
                Domain::cuboid(&[p, q, 1.0 / (p * q)])
            }
            FamilyKind::Ball { dim } => Domain::unit_volume_ball(*dim),
            FamilyKind::ProductSlab { cross_section } => {
                let l = coords[0];
                let k = cross_section.dim() as f64;
                let (unit, _) = cross_section.normalize_unit_volume();
                Domain::product(unit.scale(l.powf(-1.0 / k))?, l)
            }
        }
    }

    /// Tensor grid with `points` values per coordinate, first coordinate
    /// varying slowest. Degenerate ranges contribute a single value.
    pub fn grid(&self, points: usize) -> Result<Vec<Vec<f64>>> {
        let axes = self
            .ranges
            .iter()
            .map(|&(lo, hi)| {
                if lo == hi {
                    Ok(vec![lo])
                } else {
                    linear_grid(lo, hi, points)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let mut out = vec![Vec::new()];
        for axis in &axes {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    axis.iter().map(move |&x| {
                        let mut p = prefix.clone();
                        p.push(x);
                        p
                    })
                })
                .collect();
        }
        Ok(out)
    }
}

/// Parameter point inside a [`Family`]: member index plus coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyPoint {
    pub member: usize,
    pub coords: Vec<f64>,
}

impl fmt::Display for FamilyPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.member)?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Non-empty set of families of a common dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Family {
    members: Vec<FamilySpec>,
}

impl Family {
    pub fn new(members: Vec<FamilySpec>) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| invalid("a family needs at least one member"))?;
        let d = first.dim();
        if let Some(m) = members.iter().find(|m| m.dim() != d) {
            return Err(invalid(format!(
                "family member `{m}` has dimension {} but `{first}` has {d}",
                m.dim()
            )));
        }
        Ok(Family { members })
    }

    pub fn members(&self) -> &[FamilySpec] {
        &self.members
    }

    pub fn dim(&self) -> usize {
        self.members[0].dim()
    }

    pub fn domain(&self, point: &FamilyPoint) -> Result<Domain> {
        self.members
            .get(point.member)
            .ok_or_else(|| invalid(format!("family has no member {}", point.member)))?
            .domain(&point.coords)
    }

    /// Concatenation of the members' grids, in member order.
    pub fn grid(&self, points: usize) -> Result<Vec<FamilyPoint>> {
        let mut out = Vec::new();
        for (member, spec) in self.members.iter().enumerate() {
            for coords in spec.grid(points)? {
                out.push(FamilyPoint { member, coords });
            }
        }
        Ok(out)
    }
}

impl From<FamilySpec> for Family {
    fn from(spec: FamilySpec) -> Self {
        Family { members: vec![spec] }
    }
}

fn fmt_range(f: &mut fmt::Formatter<'_>, r: (f64, f64)) -> fmt::Result {
    write!(f, "{}..{}", r.0, r.1)
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            FamilyKind::Box2dAspect => {
                write!(f, "box2d:")?;
                fmt_range(f, self.ranges[0])
            }
            FamilyKind::Box3dAspect => {
                write!(f, "box3d:")?;
                fmt_range(f, self.ranges[0])?;
                write!(f, ",")?;
                fmt_range(f, self.ranges[1])
            }
            FamilyKind::Ball { dim } => write!(f, "ball@{dim}"),
            FamilyKind::ProductSlab { cross_section } => {
                write!(f, "slab({cross_section}):")?;
                fmt_range(f, self.ranges[0])
            }
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, m) in self.members.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            m.fmt(f)?;
        }
        Ok(())
    }
}

fn parse_range(whole: &str, s: &str) -> Result<(f64, f64)> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| parse_error(whole, format!("`{s}` is not a range `LO..HI`")))?;
    Ok((parse_real(whole, lo)?, parse_real(whole, hi)?))
}

fn parse_member(whole: &str, s: &str) -> Result<FamilySpec> {
    let s = s.trim();
    let wrap = |r: Result<FamilySpec>| r.map_err(|e| parse_error(whole, e.to_string()));
    if let Some(rest) = s.strip_prefix("box2d:") {
        let (lo, hi) = parse_range(whole, rest)?;
        wrap(FamilySpec::box2d_aspect(lo, hi))
    } else if let Some(rest) = s.strip_prefix("box3d:") {
        let (p, q) = rest
            .split_once(',')
            .ok_or_else(|| parse_error(whole, "box3d needs two ranges"))?;
        wrap(FamilySpec::box3d_aspect(parse_range(whole, p)?, parse_range(whole, q)?))
    } else if let Some(rest) = s.strip_prefix("ball@") {
        let dim = rest
            .trim()
            .parse()
            .map_err(|_| parse_error(whole, format!("`{rest}` is not a dimension")))?;
        wrap(FamilySpec::ball(dim))
    } else if let Some(rest) = s.strip_prefix("slab") {
        let rest = rest.trim();
        if !rest.starts_with('(') {
            return Err(parse_error(whole, "slab needs `(CROSS):LO..HI`"));
        }
        let close = matching_paren(rest).ok_or_else(|| parse_error(whole, "unbalanced parentheses"))?;
        let cross: Domain = rest[1..close]
            .parse()
            .map_err(|e: LabError| parse_error(whole, e.to_string()))?;
        let range = rest[close + 1..]
            .trim()
            .strip_prefix(':')
            .ok_or_else(|| parse_error(whole, "slab needs `(CROSS):LO..HI`"))?;
        let (lo, hi) = parse_range(whole, range)?;
        wrap(FamilySpec::product_slab(cross, lo, hi))
    } else {
        Err(parse_error(whole, format!("unknown family `{s}`")))
    }
}

/// Splits on `+` outside brackets, skipping exponent signs such as `1e+3`.
fn split_members(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let mut prev = ' ';
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            '+' if depth == 0 && !matches!(prev, 'e' | 'E') => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
        prev = c;
    }
    parts.push(&s[start..]);
    parts
}

impl FromStr for FamilySpec {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        parse_member(s, s)
    }
}

impl FromStr for Family {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        let members = split_members(s)
            .into_iter()
            .map(|m| parse_member(s, m))
            .collect::<Result<Vec<_>>>()?;
        Family::new(members).map_err(|e| parse_error(s, e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn members_have_unit_volume() {
        let fam: Family = "box2d:1..6+ball@2+slab(interval:1):0.5..3".parse().unwrap();
        for p in fam.grid(7).unwrap() {
            let d = fam.domain(&p).unwrap();
            assert_relative_eq!(d.volume(), 1.0, max_relative = 1e-14);
            assert_eq!(d.dim(), 2);
        }
        let fam: Family = "box3d:1..2,0.5..2+ball@3+slab(ball:1@2):0.5..3".parse().unwrap();
        for p in fam.grid(4).unwrap() {
            assert_relative_eq!(fam.domain(&p).unwrap().volume(), 1.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn box2d_parameterisation() {
        let f = FamilySpec::box2d_aspect(1.0, 4.0).unwrap();
        assert_eq!(f.domain(&[2.0]).unwrap(), Domain::cuboid(&[2.0, 0.5]).unwrap());
    }

    #[test]
    fn grid_order_is_lexicographic() {
        let f = FamilySpec::box3d_aspect((1.0, 2.0), (3.0, 4.0)).unwrap();
        let g = f.grid(2).unwrap();
        assert_eq!(g, vec![vec![1.0, 3.0], vec![1.0, 4.0], vec![2.0, 3.0], vec![2.0, 4.0]]);
        assert_eq!(FamilySpec::ball(2).unwrap().grid(64).unwrap(), vec![Vec::<f64>::new()]);
        assert_eq!(FamilySpec::box2d_aspect(2.0, 2.0).unwrap().grid(64).unwrap().len(), 1);
    }

    #[test]
    fn text_round_trip() {
        for s in [
            "box2d:1..6",
            "box3d:1..3,0.5..2",
            "ball@2",
            "slab(ball:1@2):0.25..4",
            "box2d:1..1e+1+ball@2",
        ] {
            let f: Family = s.parse().unwrap();
            assert_eq!(f.to_string().parse::<Family>().unwrap(), f);
        }
        assert_eq!("box2d:1..1e+1+ball@2".parse::<Family>().unwrap().members().len(), 2);
    }

    #[test]
    fn bad_families_are_rejected() {
        assert!("box2d:0..2".parse::<Family>().is_err());
        assert!("box2d:3..2".parse::<Family>().is_err());
        assert!("box2d:1..2+ball@3".parse::<Family>().is_err());
        assert!("cube:1".parse::<Family>().is_err());
        let err = "box2d:x..2".parse::<Family>().unwrap_err();
        assert!(matches!(err, LabError::Parse { token, .. } if token == "box2d:x..2"));
    }
}
