//! Parameter and spectral-parameter grids.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::spectrum::SpectrumSlice;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Log,
    Linear,
}

/// `points` values from `min` to `max` inclusive. Endpoints are reproduced
/// exactly.
pub fn spaced(min: f64, max: f64, points: usize, spacing: Spacing) -> Result<Vec<f64>> {
    if points == 0 {
        return Err(invalid("a grid needs at least one point"));
    }
    if !(min.is_finite() && max.is_finite() && min <= max) {
        return Err(invalid(format!(
            "grid bounds must satisfy min <= max, got [{min}, {max}]"
        )));
    }
    if spacing == Spacing::Log && min <= 0.0 {
        return Err(invalid(format!("log-spaced grids need min > 0, got {min}")));
    }
    if points == 1 {
        return Ok(vec![min]);
    }
    let last = (points - 1) as f64;
    let mut v: Vec<f64> = (0..points)
        .map(|i| {
            let s = i as f64 / last;
            match spacing {
                Spacing::Log => (min.ln() + s * (max.ln() - min.ln())).exp(),
                Spacing::Linear => min + s * (max - min),
            }
        })
        .collect();
    v[0] = min;
    v[points - 1] = max;
    Ok(v)
}

pub fn log_grid(min: f64, max: f64, points: usize) -> Result<Vec<f64>> {
    spaced(min, max, points, Spacing::Log)
}

pub fn linear_grid(min: f64, max: f64, points: usize) -> Result<Vec<f64>> {
    spaced(min, max, points, Spacing::Linear)
}

/// Checks that every value is positive and finite and that the list is
/// strictly increasing.
pub fn check_increasing(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(invalid("grid is empty"));
    }
    for w in values.windows(2) {
        if !(w[0] < w[1]) {
            return Err(invalid(format!(
                "grid must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
    }
    if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(invalid(format!("grid values must be positive, got {bad}")));
    }
    Ok(())
}

/// Moves `lambda` up by a relative `1e-12` until it no longer coincides
/// with an eigenvalue in `slice`. The slice must extend beyond the result.
pub fn nudge_off_spectrum(slice: &SpectrumSlice, mut lambda: f64) -> f64 {
    while slice.contains(lambda) {
        lambda *= 1.0 + 1e-12;
    }
    lambda
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_grid_endpoints_and_ratio() {
        let g = log_grid(10.0, 1e4, 4).unwrap();
        assert_eq!(g[0], 10.0);
        assert_eq!(g[3], 1e4);
        assert!((g[1] - 100.0).abs() < 1e-9 && (g[2] - 1000.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_and_invalid() {
        assert_eq!(linear_grid(2.0, 2.0, 1).unwrap(), vec![2.0]);
        assert!(log_grid(0.0, 1.0, 3).is_err());
        assert!(linear_grid(2.0, 1.0, 3).is_err());
        assert!(linear_grid(1.0, 2.0, 0).is_err());
        assert!(check_increasing(&[1.0, 1.0]).is_err());
        assert!(check_increasing(&[-1.0, 1.0]).is_err());
        assert!(check_increasing(&[1.0, 2.0]).is_ok());
    }
}
