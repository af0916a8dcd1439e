//! Small numeric helpers shared across modules.

/// `count` points geometrically spaced from `max` down to `min`, both included.
pub fn geometric_desc(min: f64, max: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![max],
        _ => {
            let (lo, hi) = (min.ln(), max.ln());
            (0..count)
                .map(|i| {
                    if i == 0 {
                        max
                    } else if i == count - 1 {
                        min
                    } else {
                        (hi - (hi - lo) * i as f64 / (count - 1) as f64).exp()
                    }
                })
                .collect()
        }
    }
}

/// Inverts a strictly increasing `f` on `[lo, hi]` (both positive) by
/// bisection in `ln λ`, stopping once `|f(λ) − target| ≤ rel_tol · target`
/// or the bracket collapses to machine precision.
///
/// The caller guarantees `f(lo) ≤ target ≤ f(hi)`.
pub fn invert_increasing<F: Fn(f64) -> f64>(f: F, target: f64, lo: f64, hi: f64, rel_tol: f64) -> f64 {
    let (mut a, mut b) = (lo.ln(), hi.ln());
    let mut best = hi;
    for _ in 0..400 {
        let mid = 0.5 * (a + b);
        let lambda = mid.exp();
        let val = f(lambda);
        best = lambda;
        if (val - target).abs() <= rel_tol * target {
            break;
        }
        if val < target {
            a = mid;
        } else {
            b = mid;
        }
        if b - a <= f64::EPSILON * a.abs().max(1.0) {
            break;
        }
    }
    best
}

/// Sign-change bisection on `[lo, hi]` to relative width `rel_tol`.
pub fn bisect_root<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, rel_tol: f64) -> f64 {
    let f_lo = f(lo);
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (f_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= rel_tol * hi.abs() {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Population mean and standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

pub fn median(values: &[f64]) -> f64 {
    let mut v: Vec<f64> = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Least-squares slope of `ys` against `xs`.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// `max / min` of a set of positive values.
pub fn band(values: &[f64]) -> f64 {
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    hi / lo
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_exact() {
        let g = geometric_desc(1e-12, 1.0, 200);
        assert_eq!(g.len(), 200);
        assert_eq!(g[0], 1.0);
        assert_eq!(g[199], 1e-12);
        assert!(g.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn inversion_and_root() {
        let x = invert_increasing(|l| l * l, 0.04, 1e-10, 1.0, 1e-13);
        assert!((x - 0.2).abs() < 1e-12);
        let r = bisect_root(|l| 0.3 - l, 0.0, 1.0, 1e-14);
        assert!((r - 0.3).abs() < 1e-13);
    }

    #[test]
    fn stats() {
        let (m, s) = mean_std(&[1.0, 3.0]);
        assert_eq!((m, s), (2.0, 1.0));
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert!((ls_slope(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]) - 2.0).abs() < 1e-15);
    }
}
