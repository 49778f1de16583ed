//! Golden-section search on a bracket.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maximizes `f` on `[a, b]` by golden-section search until the bracket is
/// narrower than `tol`. Returns the best point seen and its value; the
/// endpoints are evaluated too, so the result is never worse than either end.
pub fn golden_section_max<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let mut best = (lo, f(lo));
    let fb = f(hi);
    if fb > best.1 {
        best = (hi, fb);
    }
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
        // keep the earliest point on ties so the result is order-independent
        for (x, v) in [(x1, f1), (x2, f2)] {
            if v > best.1 {
                best = (x, v);
            }
        }
    }
    best
}

/// Number of golden-section iterations needed to shrink `width` below `tol`.
pub fn golden_iterations(width: f64, tol: f64) -> usize {
    if width <= tol {
        0
    } else {
        ((tol / width).ln() / INV_PHI.ln()).ceil() as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_interior_maximum() {
        let (x, v) = golden_section_max(|x| -(x - 0.3).powi(2), -1.0, 2.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-9);
        assert!(v <= 0.0 && v > -1e-18);
    }

    #[test]
    fn endpoint_maximum_is_kept() {
        let (x, v) = golden_section_max(|x| x, 0.0, 1.0, 1e-6);
        assert_eq!((x, v), (1.0, 1.0));
    }

    #[test]
    fn kinked_maximum() {
        let (x, _) = golden_section_max(|x| -(x - 0.7).abs(), 0.0, 1.0, 1e-12);
        assert!((x - 0.7).abs() < 1e-11);
    }

    #[test]
    fn iteration_count() {
        assert_eq!(golden_iterations(1.0, 2.0), 0);
        let n = golden_iterations(1.0, 1e-6);
        assert!(INV_PHI.powi(n as i32) <= 1e-6 && INV_PHI.powi(n as i32 - 1) > 1e-6);
    }
}
