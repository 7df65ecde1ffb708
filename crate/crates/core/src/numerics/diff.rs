/// `(f(x0 + h) - 2 f(x0) + f(x0 - h)) / h^2`.
///
/// For one-sided problems at `x0 = 0` pass the even extension `|x| -> f(|x|)`.
pub fn second_central_difference<F: FnMut(f64) -> f64>(mut f: F, x0: f64, h: f64) -> f64 {
    debug_assert!(h > 0.0);
    let (fp, f0, fm) = (f(x0 + h), f(x0), f(x0 - h));
    (fp - 2.0 * f0 + fm) / (h * h)
}

/// Richardson extrapolation of the second central difference at steps `h`
/// and `h / 2`, assuming an `O(h^2)` leading error.
pub fn richardson_second_difference<F: FnMut(f64) -> f64>(mut f: F, x0: f64, h: f64) -> f64 {
    let coarse = second_central_difference(&mut f, x0, h);
    let fine = second_central_difference(&mut f, x0, 0.5 * h);
    (4.0 * fine - coarse) / 3.0
}
