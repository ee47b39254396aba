//! Scalar root bracketing and bounded maximization.

/// Bounded maximization of `f` on `[lo, hi]`: a uniform scan with `scan` points locates
/// the best bracket, then golden-section search refines it to `x_tol`.
pub fn maximize(f: impl Fn(f64) -> f64, lo: f64, hi: f64, scan: usize, x_tol: f64) -> (f64, f64) {
    let n = scan.max(3);
    let step = (hi - lo) / (n - 1) as f64;
    let (mut best_i, mut best_f) = (0, f64::NEG_INFINITY);
    for i in 0..n {
        let v = f(lo + step * i as f64);
        if v > best_f {
            best_f = v;
            best_i = i;
        }
    }
    let a = lo + step * best_i.saturating_sub(1) as f64;
    let b = (lo + step * (best_i + 1) as f64).min(hi);
    let (x, fx) = golden_max(&f, a, b, x_tol);
    if fx >= best_f {
        (x, fx)
    } else {
        (lo + step * best_i as f64, best_f)
    }
}

fn golden_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, x_tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= x_tol {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Bisection for a sign change of `f` on `[lo, hi]`. Returns `None` if the endpoints do
/// not bracket a root.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, x_tol: f64) -> Option<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() {
        return None;
    }
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= x_tol || mid == lo || mid == hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}
