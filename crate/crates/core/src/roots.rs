//! Bracketing root finders used by the threshold and stationary-state solvers.

/// Bisection on `[lo, hi]`. `f(lo)` and `f(hi)` must differ in sign (or one
/// of them must vanish). Stops when the bracket is below `rel_tol` relative
/// to its magnitude or when no representable midpoint remains.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, rel_tol: f64) -> Option<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut flo = f(lo);
    let fhi = f(hi);
    if !flo.is_finite() || !fhi.is_finite() {
        return None;
    }
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() {
        return None;
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo.min(hi) || mid >= lo.max(hi) {
            break;
        }
        if (hi - lo).abs() <= rel_tol * lo.abs().max(hi.abs()) {
            break;
        }
        let fmid = f(mid);
        if fmid == 0.0 {
            return Some(mid);
        }
        if fmid.signum() == flo.signum() {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Smallest `x` in `[lo, hi]` with `pred(x)` true, assuming `pred` is
/// monotone (false then true). Returns `None` when `pred(hi)` is false.
pub fn bisect_predicate<F>(mut pred: F, mut lo: f64, mut hi: f64, rel_tol: f64) -> Option<f64>
where
    F: FnMut(f64) -> bool,
{
    if pred(lo) {
        return Some(lo);
    }
    if !pred(hi) {
        return None;
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || (hi - lo) <= rel_tol * hi.abs() {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Sign-change scan over a sorted grid followed by bisection in every
/// bracketing cell. Returns candidate roots in increasing order; callers must
/// validate residuals since a jump discontinuity also changes sign.
pub fn scan_roots<F>(mut f: F, grid: &[f64], rel_tol: f64) -> Vec<f64>
where
    F: FnMut(f64) -> f64,
{
    let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let mut roots = Vec::new();
    for i in 0..grid.len().saturating_sub(1) {
        let (a, b) = (values[i], values[i + 1]);
        if !a.is_finite() || !b.is_finite() {
            continue;
        }
        if a == 0.0 {
            roots.push(grid[i]);
            continue;
        }
        if b != 0.0 && a.signum() != b.signum() {
            if let Some(x) = bisect(&mut f, grid[i], grid[i + 1], rel_tol) {
                roots.push(x);
            }
        }
    }
    if let (Some(&last), Some(&x)) = (values.last(), grid.last()) {
        if last == 0.0 {
            roots.push(x);
        }
    }
    roots
}

/// `n` points log-spaced on `[lo, hi]`, both positive.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    debug_assert!(lo > 0.0 && hi > lo && n >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// `n` points evenly spaced on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt_two() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-15).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn bisect_needs_bracket() {
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_none());
    }

    #[test]
    fn predicate_bisection_is_left_edge() {
        let r = bisect_predicate(|x| x >= 0.3, 0.0, 1.0, 1e-14).unwrap();
        assert!((r - 0.3).abs() < 1e-13);
        assert_eq!(bisect_predicate(|x| x >= 0.0, 0.0, 1.0, 1e-14), Some(0.0));
        assert!(bisect_predicate(|_| false, 0.0, 1.0, 1e-14).is_none());
    }

    #[test]
    fn scan_finds_all_sine_roots() {
        let grid = linspace(0.5, 10.0, 200);
        let roots = scan_roots(f64::sin, &grid, 1e-14);
        assert_eq!(roots.len(), 3);
        for (k, r) in roots.iter().enumerate() {
            assert!((r - (k as f64 + 1.0) * std::f64::consts::PI).abs() < 1e-12);
        }
    }

    #[test]
    fn spacing_helpers() {
        let l = logspace(1e-3, 1e3, 7);
        assert!((l[3] - 1.0).abs() < 1e-12);
        assert!((l[6] - 1e3).abs() < 1e-9);
        assert_eq!(linspace(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
    }
}
