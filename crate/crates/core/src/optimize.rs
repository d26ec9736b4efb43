//! One-dimensional search helpers shared by the bound and key-rate code.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
///
/// Stops once the bracket is narrower than `tol`. Returns `(x, f(x))` for the
/// best point evaluated, bracket endpoints included.
pub fn golden_section_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let (f_lo, f_hi) = (f(lo), f(hi));
    let mut best = if f_hi > f_lo { (hi, f_hi) } else { (lo, f_lo) };

    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    // 200 iterations shrink any bracket below f64 resolution.
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    for (x, v) in [(x1, f1), (x2, f2)] {
        if v > best.1 {
            best = (x, v);
        }
    }
    best
}

/// Maximizes `f` over `[lo, hi]` where it is defined (`Some`).
///
/// Scans `points` equally spaced abscissae, then refines around the best scan
/// point with golden-section search. When a neighbor of the best point is
/// outside the domain, the domain edge is first located by bisection so the
/// refinement only ever sees defined values. Returns `None` when no scan point
/// is in the domain.
pub fn scan_refine_max(
    f: impl Fn(f64) -> Option<f64>,
    lo: f64,
    hi: f64,
    points: usize,
    tol: f64,
) -> Option<(f64, f64)> {
    assert!(points >= 2, "scan needs at least two points");
    let step = (hi - lo) / (points - 1) as f64;
    let at = |k: usize| if k == points - 1 { hi } else { lo + step * k as f64 };

    let mut best: Option<(usize, f64)> = None;
    for k in 0..points {
        if let Some(v) = f(at(k)) {
            if best.map_or(true, |(_, b)| v > b) {
                best = Some((k, v));
            }
        }
    }
    let (k, v) = best?;
    let x = at(k);

    let edge = |outside: f64| -> f64 {
        // f(x) is defined and f(outside) is not
        let (mut inside, mut out) = (x, outside);
        for _ in 0..200 {
            let mid = 0.5 * (inside + out);
            if mid == inside || mid == out {
                break;
            }
            if f(mid).is_some() {
                inside = mid;
            } else {
                out = mid;
            }
        }
        inside
    };
    let left = if k == 0 {
        x
    } else {
        let l = at(k - 1);
        if f(l).is_some() { l } else { edge(l) }
    };
    let right = if k == points - 1 {
        x
    } else {
        let r = at(k + 1);
        if f(r).is_some() { r } else { edge(r) }
    };

    let g = |t: f64| f(t).unwrap_or(f64::NEG_INFINITY);
    let (xr, vr) = golden_section_max(g, left, right, tol);
    Some(if vr > v { (xr, vr) } else { (x, v) })
}

/// Bisection for a sign change of `f` on `[lo, hi]`.
///
/// Requires `f(lo) > 0 >= f(hi)`; returns the last point known to be positive
/// once the bracket is narrower than `tol` or after `max_iter` halvings.
pub fn bisect_last_positive(
    f: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    max_iter: usize,
) -> f64 {
    for _ in 0..max_iter {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_peak() {
        let (x, v) = golden_section_max(|x| -(x - 0.3) * (x - 0.3), 0.0, 1.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-8);
        assert!(v.abs() < 1e-15);
    }

    #[test]
    fn golden_returns_endpoint_for_monotone() {
        let (x, _) = golden_section_max(|x| x, 0.0, 1.0, 1e-10);
        assert_eq!(x, 1.0);
    }

    #[test]
    fn scan_refine_handles_domain_edge() {
        // increasing on [0, 0.7071...] and undefined past it
        let edge = 0.5f64.sqrt();
        let f = |x: f64| (x <= edge).then(|| x);
        let (x, _) = scan_refine_max(f, 0.0, 1.0, 101, 1e-12).unwrap();
        assert!((x - edge).abs() < 1e-12, "{x}");
    }

    #[test]
    fn scan_refine_empty_domain() {
        assert!(scan_refine_max(|_| None, 0.0, 1.0, 10, 1e-9).is_none());
    }

    #[test]
    fn bisection_locates_root() {
        let r = bisect_last_positive(|x| 0.25 - x * x, 0.0, 1.0, 1e-12, 200);
        assert!((r - 0.5).abs() < 1e-11);
    }
}
