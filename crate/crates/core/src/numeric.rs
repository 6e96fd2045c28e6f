//! Small numerical helpers shared by the schedule and analytics code.

/// `count` evenly spaced points from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (count - 1) as f64;
            (0..count)
                .map(|i| {
                    if i + 1 == count {
                        stop
                    } else {
                        start + step * i as f64
                    }
                })
                .collect()
        }
    }
}

/// `count` logarithmically spaced points from `start` to `stop` inclusive.
pub fn logspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    let mut out: Vec<f64> = linspace(start.ln(), stop.ln(), count)
        .into_iter()
        .map(f64::exp)
        .collect();
    if let Some(first) = out.first_mut() {
        *first = start;
    }
    if let Some(last) = out.last_mut() {
        *last = stop;
    }
    out
}

/// Golden-section search for a maximum of `f` on `[lo, hi]`.
pub fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, rel_tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if hi - lo <= rel_tol * scale {
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
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Maximum of `f` over `[lo, hi]`: dense uniform sampling, then golden-section
/// refinement around the best sample. Endpoints are always candidates.
pub fn sampled_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64, samples: usize) -> (f64, f64) {
    let grid = linspace(lo, hi, samples.max(3));
    let (best, value) = grid.iter().enumerate().map(|(i, &x)| (i, f(x))).fold(
        (0, f64::NEG_INFINITY),
        |acc, cur| if cur.1 > acc.1 { cur } else { acc },
    );
    let left = grid[best.saturating_sub(1)];
    let right = grid[(best + 1).min(grid.len() - 1)];
    let refined = golden_max(&f, left, right, 1e-12);
    if refined.1 > value {
        refined
    } else {
        (grid[best], value)
    }
}

/// Minimum counterpart of [`sampled_max`].
pub fn sampled_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64, samples: usize) -> (f64, f64) {
    let (x, v) = sampled_max(|t| -f(t), lo, hi, samples);
    (x, -v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing() {
        assert_eq!(linspace(0.0, 1.0, 5), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(linspace(2.0, 3.0, 1), vec![2.0]);
        let l = logspace(10.0, 1000.0, 3);
        assert!((l[1] - 100.0).abs() < 1e-12);
        assert_eq!((l[0], l[2]), (10.0, 1000.0));
    }

    #[test]
    fn refinement_finds_interior_peak() {
        let (x, v) = sampled_max(|t| -(t - 0.123_456_789).powi(2) + 2.0, 0.0, 1.0, 17);
        assert!((x - 0.123_456_789).abs() < 1e-6);
        assert!((v - 2.0).abs() < 1e-14);
        let (x, v) = sampled_min(|t| t, -1.0, 3.0, 10);
        assert_eq!((x, v), (-1.0, -1.0));
    }
}
