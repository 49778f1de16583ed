//! Bessel functions of integer order, spherical Bessel functions, and the
//! positive zeros of both and of their derivatives.
//!
//! Function values come from Miller's backward recurrence. For `J_n` the
//! recurrence is normalised with `J_0 + 2 sum_k J_2k = 1`; for the spherical
//! functions it is normalised against the closed trigonometric forms of
//! `j_0` and `j_1`. Both are uniformly accurate in order and argument over
//! the desk-scale range used here (orders and arguments up to a few
//! thousand).
//!
//! Zeros are located one at a time: a unit-step scan from the previous zero
//! brackets the next sign change, and a safeguarded Newton iteration seeded
//! with McMahon's expansion polishes it. Consecutive zeros of all four
//! function kinds are more than 2 apart, so a unit step cannot skip one.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, LazyLock, RwLock};

use crate::error::{LabError, Result};

const BIG: f64 = 1e250;
const BIG_INV: f64 = 1e-250;

/// The function whose zeros are requested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ZeroKind {
    /// Bessel `J_n`.
    J,
    /// Derivative `J_n'`. For `n = 0` the trivial zero at the origin is
    /// excluded, leaving the zeros of `J_1`.
    JPrime,
    /// Spherical Bessel `j_l`.
    SphericalJ,
    /// Derivative `j_l'`, excluding the origin for `l = 0`.
    SphericalJPrime,
}

fn miller_start(order: u32, x: f64) -> u32 {
    let top = (order as f64 + 1.0).max(x);
    let m = (top + 25.0 + 12.0 * top.cbrt()).ceil() as u32;
    m + (m & 1)
}

/// Returns `(J_{n-1}(x), J_n(x), J_{n+1}(x))` for `x > 0`, with the
/// convention `J_{-1} = -J_1`.
pub fn bessel_j_triplet(n: u32, x: f64) -> (f64, f64, f64) {
    if x == 0.0 {
        return match n {
            0 => (0.0, 1.0, 0.0),
            1 => (1.0, 0.0, 0.0),
            _ => (0.0, 0.0, 0.0),
        };
    }
    let m = miller_start(n, x);
    let two_over_x = 2.0 / x;
    let (mut jkp1, mut jk) = (0.0f64, 1e-30f64);
    let mut k = m;
    let mut sum = 2.0 * jk; // m is even and positive
    let mut captured = [0.0f64; 3]; // n-1, n, n+1
    let capture = |k: u32, v: f64, captured: &mut [f64; 3]| {
        if k + 1 == n {
            captured[0] = v;
        } else if k == n {
            captured[1] = v;
        } else if k == n + 1 {
            captured[2] = v;
        }
    };
    capture(k, jk, &mut captured);
    while k > 0 {
        let jkm1 = k as f64 * two_over_x * jk - jkp1;
        k -= 1;
        jkp1 = jk;
        jk = jkm1;
        if k == 0 {
            sum += jk;
        } else if k.is_multiple_of(2) {
            sum += 2.0 * jk;
        }
        capture(k, jk, &mut captured);
        if jk.abs() > BIG {
            jk *= BIG_INV;
            jkp1 *= BIG_INV;
            sum *= BIG_INV;
            for c in captured.iter_mut() {
                *c *= BIG_INV;
            }
        }
    }
    let [mut jm1, jn, jp1] = captured.map(|c| c / sum);
    if n == 0 {
        jm1 = -jp1;
    }
    (jm1, jn, jp1)
}

/// Bessel function of the first kind `J_n(x)`, `x >= 0`.
pub fn bessel_j(n: u32, x: f64) -> f64 {
    bessel_j_triplet(n, x).1
}

/// Returns `(j_{l-1}(x), j_l(x), j_{l+1}(x))` for `x > 0`, with
/// `j_{-1}(x) = cos(x)/x`.
pub fn spherical_j_triplet(l: u32, x: f64) -> (f64, f64, f64) {
    if x == 0.0 {
        return match l {
            0 => (f64::INFINITY, 1.0, 0.0),
            _ => (if l == 1 { 1.0 } else { 0.0 }, 0.0, 0.0),
        };
    }
    let (s, c) = x.sin_cos();
    let j0 = s / x;
    let j1 = s / (x * x) - c / x;
    let m = miller_start(l, x);
    let (mut jkp1, mut jk) = (0.0f64, 1e-30f64);
    let mut k = m;
    let mut captured = [0.0f64; 3];
    let mut at_one = 0.0;
    let capture = |k: u32, v: f64, captured: &mut [f64; 3]| {
        if k + 1 == l {
            captured[0] = v;
        } else if k == l {
            captured[1] = v;
        } else if k == l + 1 {
            captured[2] = v;
        }
    };
    capture(k, jk, &mut captured);
    while k > 0 {
        let jkm1 = (2 * k + 1) as f64 / x * jk - jkp1;
        k -= 1;
        jkp1 = jk;
        jk = jkm1;
        capture(k, jk, &mut captured);
        if k == 1 {
            at_one = jk;
        }
        if jk.abs() > BIG {
            jk *= BIG_INV;
            jkp1 *= BIG_INV;
            at_one *= BIG_INV;
            for c in captured.iter_mut() {
                *c *= BIG_INV;
            }
        }
    }
    // jk now holds the unnormalised j_0
    let scale = if j0.abs() >= j1.abs() { j0 / jk } else { j1 / at_one };
    let [mut jm1, jl, jp1] = captured.map(|v| v * scale);
    if l == 0 {
        jm1 = c / x;
    }
    (jm1, jl, jp1)
}

/// Spherical Bessel function `j_l(x)`, `x >= 0`.
pub fn spherical_j(l: u32, x: f64) -> f64 {
    spherical_j_triplet(l, x).1
}

/// Value and first derivative of the function named by `kind`.
fn value_and_slope(kind: ZeroKind, order: u32, x: f64) -> (f64, f64) {
    let nu = order as f64;
    match kind {
        ZeroKind::J => {
            let (jm1, j, jp1) = bessel_j_triplet(order, x);
            (j, 0.5 * (jm1 - jp1))
        }
        ZeroKind::JPrime => {
            let (jm1, j, jp1) = bessel_j_triplet(order, x);
            let d = 0.5 * (jm1 - jp1);
            // Bessel's equation: x^2 y'' + x y' + (x^2 - n^2) y = 0
            (d, -d / x - (1.0 - nu * nu / (x * x)) * j)
        }
        ZeroKind::SphericalJ => {
            let (jm1, j, jp1) = spherical_j_triplet(order, x);
            let d = if order == 0 { -jp1 } else { jm1 - (nu + 1.0) / x * j };
            (j, d)
        }
        ZeroKind::SphericalJPrime => {
            let (jm1, j, jp1) = spherical_j_triplet(order, x);
            let d = if order == 0 { -jp1 } else { jm1 - (nu + 1.0) / x * j };
            // x^2 y'' + 2x y' + (x^2 - l(l+1)) y = 0
            (d, -2.0 * d / x - (1.0 - nu * (nu + 1.0) / (x * x)) * j)
        }
    }
}

/// McMahon's large-zero expansion, used only to seed Newton's method.
fn mcmahon_guess(kind: ZeroKind, order: u32, index: usize) -> f64 {
    // (order of the underlying J_nu, zeros of J_nu itself or of a derivative)
    let (nu, derivative) = match kind {
        ZeroKind::J => (order as f64, false),
        ZeroKind::JPrime if order == 0 => (1.0, false),
        ZeroKind::JPrime => (order as f64, true),
        ZeroKind::SphericalJ => (order as f64 + 0.5, false),
        // j_0' = -j_1 has the zeros of J_{3/2}
        ZeroKind::SphericalJPrime if order == 0 => (1.5, false),
        ZeroKind::SphericalJPrime => (order as f64 + 0.5, true),
    };
    let mu = 4.0 * nu * nu;
    if derivative {
        let beta = (index as f64 + 0.5 * nu - 0.75) * PI;
        beta - (mu + 3.0) / (8.0 * beta)
    } else {
        let beta = (index as f64 + 0.5 * nu - 0.25) * PI;
        beta - (mu - 1.0) / (8.0 * beta)
    }
}

const SCAN_STEP: f64 = 1.0;
const FIRST_GAP: f64 = 0.5;
const MAX_SCAN_STEPS: usize = 50_000_000;
const MAX_NEWTON: usize = 200;

fn scan_start(order: u32) -> f64 {
    // all four kinds are nonzero and of one sign on (0, order/2]
    (0.5 * order as f64).max(0.5)
}

fn refine(
    kind: ZeroKind,
    order: u32,
    index: usize,
    (mut a, mut fa): (f64, f64),
    (mut b, _fb): (f64, f64),
) -> Result<f64> {
    let seed = mcmahon_guess(kind, order, index);
    let mut x = if seed > a && seed < b { seed } else { 0.5 * (a + b) };
    for _ in 0..MAX_NEWTON {
        let (f, df) = value_and_slope(kind, order, x);
        if f == 0.0 {
            return Ok(x);
        }
        if (f > 0.0) == (fa > 0.0) {
            a = x;
            fa = f;
        } else {
            b = x;
        }
        let newton = x - f / df;
        let next = if df != 0.0 && newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
        if (next - x).abs() <= 2e-16 * x || (b - a) <= 4e-16 * x {
            return Ok(next);
        }
        x = next;
    }
    Err(LabError::NumericalFailure(format!(
        "Newton refinement of zero {index} of {kind:?} order {order} did not converge in [{a}, {b}]"
    )))
}

#[derive(Debug, Clone, Default)]
struct ZeroTable {
    zeros: Vec<f64>,
    /// Every zero below this point is already in `zeros`.
    complete_below: f64,
}

impl ZeroTable {
    /// Scans forward from the last known zero until at least `count` zeros
    /// are known and every zero below `bound` is known.
    fn extend(&mut self, kind: ZeroKind, order: u32, bound: f64, count: usize) -> Result<()> {
        loop {
            let need_count = self.zeros.len() < count;
            if !need_count && self.covers(bound, count) {
                return Ok(());
            }
            let mut a = match self.zeros.last() {
                Some(&z) => z + FIRST_GAP,
                None => scan_start(order),
            };
            let mut fa = value_and_slope(kind, order, a).0;
            let mut steps = 0usize;
            let found = loop {
                if !need_count && a >= bound {
                    break None;
                }
                let b = a + SCAN_STEP;
                let fb = value_and_slope(kind, order, b).0;
                if fb == 0.0 {
                    break Some(b);
                }
                if (fa > 0.0) != (fb > 0.0) && fa != 0.0 {
                    let index = self.zeros.len() + 1;
                    break Some(refine(kind, order, index, (a, fa), (b, fb))?);
                }
                a = b;
                fa = fb;
                steps += 1;
                if steps > MAX_SCAN_STEPS {
                    return Err(LabError::NumericalFailure(format!(
                        "no sign change of {kind:?} order {order} found below {a}"
                    )));
                }
            };
            match found {
                Some(z) => {
                    self.zeros.push(z);
                    self.complete_below = self.complete_below.max(z);
                }
                None => {
                    self.complete_below = self.complete_below.max(a);
                    return Ok(());
                }
            }
        }
    }

    fn covers(&self, bound: f64, count: usize) -> bool {
        self.zeros.len() >= count && (self.complete_below >= bound || self.zeros.last().is_some_and(|&z| z >= bound))
    }
}

type TableMap = HashMap<(ZeroKind, u32), Arc<ZeroTable>>;

static ZERO_TABLES: LazyLock<RwLock<TableMap>> = LazyLock::new(|| RwLock::new(HashMap::new()));

fn table(kind: ZeroKind, order: u32, bound: f64, count: usize) -> Result<Arc<ZeroTable>> {
    let key = (kind, order);
    let existing = {
        let map = ZERO_TABLES.read().unwrap_or_else(|e| e.into_inner());
        map.get(&key).cloned()
    };
    if let Some(t) = &existing {
        if t.covers(bound, count) {
            return Ok(t.clone());
        }
    }
    // Extend a private copy; each zero depends only on its predecessor, so
    // racing extensions produce identical prefixes.
    let mut fresh = existing.map(|t| (*t).clone()).unwrap_or_default();
    fresh.extend(kind, order, bound, count)?;
    let fresh = Arc::new(fresh);
    let mut map = ZERO_TABLES.write().unwrap_or_else(|e| e.into_inner());
    let slot = map.entry(key).or_insert_with(|| fresh.clone());
    if slot.zeros.len() < fresh.zeros.len() || slot.complete_below < fresh.complete_below {
        *slot = fresh.clone();
    }
    Ok(fresh)
}

/// The `index`-th positive zero (1-based) of the function named by `kind`.
pub fn bessel_zero(kind: ZeroKind, order: u32, index: usize) -> Result<f64> {
    if index == 0 {
        return Err(LabError::InvalidArgument("zero index starts at 1".into()));
    }
    let t = table(kind, order, 0.0, index)?;
    Ok(t.zeros[index - 1])
}

/// All positive zeros strictly below `bound`, in increasing order.
pub fn zeros_below(kind: ZeroKind, order: u32, bound: f64) -> Result<Vec<f64>> {
    if !(bound.is_finite()) {
        return Err(LabError::InvalidArgument(format!(
            "zero bound must be finite, got {bound}"
        )));
    }
    let t = table(kind, order, bound, 0)?;
    Ok(t.zeros.iter().copied().take_while(|&z| z < bound).collect())
}
