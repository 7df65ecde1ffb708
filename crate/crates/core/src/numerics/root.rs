use super::Tolerance;
use crate::{Error, Result};

const MAX_DOUBLINGS: u32 = 1000;

/// Solves `h(x) = target` for `h` continuous and strictly decreasing on
/// `[0, inf)` with `h(0) > target`.
///
/// The bracket is grown by doubling from `[0, 1]`, then refined by Brent's
/// method (inverse quadratic interpolation, secant, bisection fallback) until
/// the bracket collapses to rounding level. The root is accepted only if
/// `|h(x) - target| <= abs_tol`.
pub fn find_root_decreasing<H: FnMut(f64) -> f64>(mut h: H, target: f64, tol: &Tolerance) -> Result<f64> {
    let g0 = h(0.0) - target;
    if g0.is_nan() {
        return Err(Error::InvalidInput("h(0) is not a number"));
    }
    if g0 <= 0.0 {
        return Err(Error::NoPositiveRoot { h0: g0 + target, target });
    }
    let (mut a, mut fa) = (0.0_f64, g0);
    let mut b = 1.0_f64;
    let mut fb = h(b) - target;
    let mut doublings = 0;
    while fb > 0.0 {
        a = b;
        fa = fb;
        b *= 2.0;
        fb = h(b) - target;
        doublings += 1;
        if doublings >= MAX_DOUBLINGS || !b.is_finite() {
            return Err(Error::BracketNotFound { last_upper: b });
        }
    }
    if fb.is_nan() {
        return Err(Error::InvalidInput("h evaluated to NaN while bracketing"));
    }
    if fb == 0.0 {
        return Ok(b);
    }

    // Brent on [a, b] with fa > 0 > fb.
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..tol.max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let xtol = 2.0 * f64::EPSILON * b.abs() + 1e-300;
        let half = 0.5 * (c - b);
        if fb == 0.0 || half.abs() <= xtol {
            break;
        }
        if e.abs() >= xtol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * half * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * half * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            let min1 = 3.0 * half * q - (xtol * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = half;
                e = d;
            }
        } else {
            d = half;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > xtol { d } else { xtol.copysign(half) };
        fb = h(b) - target;
    }
    // `b` carries the smaller residual of the final bracket.
    if fb.abs() <= tol.abs_tol {
        Ok(b)
    } else {
        Err(Error::NonConvergence { what: "root solve", best: b })
    }
}
