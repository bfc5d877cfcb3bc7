use crate::error::{Error, Result};

/// Composite trapezoidal rule on a (possibly non-uniform) grid.
pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

/// `n` equally spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        if n == 1 {
            return Ok(vec![a]);
        }
        return Err(Error::InvalidGrid("at least one point is required".into()));
    }
    if !(b > a) {
        return Err(Error::InvalidGrid(format!("min {a} must be below max {b}")));
    }
    let h = (b - a) / (n - 1) as f64;
    Ok((0..n)
        .map(|i| if i == n - 1 { b } else { a + h * i as f64 })
        .collect())
}

/// Symmetric grid about `center`: uniform spacing `fine_step` out to
/// `±fine_half_width`, then geometrically growing steps out to
/// `±outer_half_width`.
pub fn composite_grid(
    center: f64,
    fine_half_width: f64,
    fine_step: f64,
    outer_half_width: f64,
    growth: f64,
) -> Result<Vec<f64>> {
    if !(fine_step > 0.0 && fine_half_width > 0.0 && outer_half_width > fine_half_width) {
        return Err(Error::InvalidGrid(
            "need 0 < fine_step, 0 < fine_half_width < outer_half_width".into(),
        ));
    }
    if !(growth > 1.0) {
        return Err(Error::InvalidGrid("growth factor must exceed 1".into()));
    }
    let n_fine = (fine_half_width / fine_step).ceil() as usize;
    let mut right = Vec::with_capacity(n_fine + 64);
    for i in 1..=n_fine {
        right.push(i as f64 * fine_step);
    }
    let mut x = n_fine as f64 * fine_step;
    let mut h = fine_step;
    while x < outer_half_width {
        h *= growth;
        x = (x + h).min(outer_half_width);
        right.push(x);
    }
    let mut grid: Vec<f64> = right.iter().rev().map(|r| center - r).collect();
    grid.push(center);
    grid.extend(right.iter().map(|r| center + r));
    Ok(grid)
}
