//! Five-point central finite differences.
//!
//! Used where a quantity is only available pointwise (current densities,
//! metric derivatives, residual checks). Callers are responsible for keeping
//! `x ± 2h` inside their domain.

/// `f'(x)` with error `O(h^4)`.
pub fn d1<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

/// `f''(x)` with error `O(h^4)`.
pub fn d2<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (-f(x - 2.0 * h) + 16.0 * f(x - h) - 30.0 * f(x) + 16.0 * f(x + h) - f(x + 2.0 * h))
        / (12.0 * h * h)
}

/// `f'''(x)` with error `O(h^2)`.
pub fn d3<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (-f(x - 2.0 * h) + 2.0 * f(x - h) - 2.0 * f(x + h) + f(x + 2.0 * h)) / (2.0 * h * h * h)
}

/// Fallible variant of [`d1`]; the first error aborts.
pub fn try_d1<F, E>(f: F, x: f64, h: f64) -> Result<f64, E>
where
    F: Fn(f64) -> Result<f64, E>,
{
    let m2 = f(x - 2.0 * h)?;
    let m1 = f(x - h)?;
    let p1 = f(x + h)?;
    let p2 = f(x + 2.0 * h)?;
    Ok((m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h))
}

/// Fallible variant of [`d2`].
pub fn try_d2<F, E>(f: F, x: f64, h: f64) -> Result<f64, E>
where
    F: Fn(f64) -> Result<f64, E>,
{
    let m2 = f(x - 2.0 * h)?;
    let m1 = f(x - h)?;
    let c = f(x)?;
    let p1 = f(x + h)?;
    let p2 = f(x + 2.0 * h)?;
    Ok((-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / (12.0 * h * h))
}
