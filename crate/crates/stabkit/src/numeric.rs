//! Scalar numerics shared across the crate: root bracketing, quadrature and
//! stable evaluation of the exponential integral kernel.

use num_complex::Complex64 as C64;

/// Outcome of a bracketing search on a 1-d function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

/// Scan `[lo, hi]` with the given step and collect every sign-change bracket.
pub fn scan_sign_changes<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, step: f64) -> Vec<Bracket> {
    let mut out = Vec::new();
    if !(step > 0.0) || hi <= lo {
        return out;
    }
    let mut x0 = lo;
    let mut f0 = f(x0);
    while x0 < hi {
        let x1 = (x0 + step).min(hi);
        let f1 = f(x1);
        if f0 == 0.0 {
            out.push(Bracket { lo: x0, hi: x0 });
        } else if f0.signum() != f1.signum() && f1 != 0.0 {
            out.push(Bracket { lo: x0, hi: x1 });
        }
        x0 = x1;
        f0 = f1;
        if x0 >= hi {
            break;
        }
    }
    out
}

/// Bisection on a sign-change bracket. Returns the midpoint of the final
/// interval; the caller is expected to have checked the sign change.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, iters: usize) -> f64 {
    let mut flo = f(lo);
    if flo == 0.0 {
        return lo;
    }
    let fhi = f(hi);
    if fhi == 0.0 {
        return hi;
    }
    debug_assert!(flo.signum() != fhi.signum(), "bisect needs a sign change");
    for _ in 0..iters {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Newton iteration guarded by a bracket: steps that leave the bracket fall
/// back to bisection. `f` returns the value and derivative.
pub fn newton_bracketed<F: Fn(f64) -> (f64, f64)>(
    f: F,
    seed: f64,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    iters: usize,
) -> f64 {
    let mut x = seed.clamp(lo, hi);
    let (mut flo, _) = f(lo);
    for _ in 0..iters {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return x;
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
        let step = fx / dfx;
        let mut next = x - step;
        if !next.is_finite() || next <= lo || next >= hi {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= tol * x.abs().max(1.0) {
            return next;
        }
        x = next;
    }
    x
}

/// Composite Simpson rule with `panels` subintervals (`panels` is rounded up
/// to the next even number).
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let n = if panels.is_multiple_of(2) { panels } else { panels + 1 }.max(2);
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for j in 1..n {
        let w = if j % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + j as f64 * h);
    }
    acc * h / 3.0
}

/// phi(s, t) = (exp(s t) - 1)/s, the primitive of exp(s u) on [0, t], with the
/// removable singularity at s = 0 handled by a short series.
pub fn exp_integral(s: C64, t: f64) -> C64 {
    let st = s * t;
    if st.norm() < 1e-6 {
        // t * (1 + st/2 + st^2/6 + st^3/24)
        let mut acc = C64::new(1.0, 0.0);
        let mut term = C64::new(1.0, 0.0);
        for n in 2..=5 {
            term = term * st / (n as f64);
            acc += term;
        }
        return acc * t;
    }
    (st.exp() - 1.0) / s
}

/// Least-squares slope and intercept of y against x.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    debug_assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let denom = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    (slope, intercept)
}

/// Indices of a log-spaced subsample of `times` restricted to `t >= cutoff`.
/// Duplicate picks collapse, so the result can be shorter than `count`.
pub fn log_spaced_indices(times: &[f64], cutoff: f64, count: usize) -> Vec<usize> {
    let first = match times.iter().position(|&t| t >= cutoff) {
        Some(i) => i,
        None => return Vec::new(),
    };
    let t0 = times[first].max(cutoff).max(1e-9);
    let t1 = match times.last() {
        Some(&t) if t > t0 => t,
        _ => return (first..times.len()).collect(),
    };
    let mut out = Vec::with_capacity(count);
    let mut cursor = first;
    for j in 0..count {
        let frac = j as f64 / (count.max(2) - 1) as f64;
        let target = t0 * (t1 / t0).powf(frac);
        while cursor + 1 < times.len() && times[cursor] < target {
            cursor += 1;
        }
        if out.last() != Some(&cursor) {
            out.push(cursor);
        }
    }
    out
}
