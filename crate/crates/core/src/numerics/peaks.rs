use serde::Serialize;

use crate::error::{Error, Result};

/// A refined local extremum of sampled data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Peak {
    pub position: f64,
    pub height: f64,
    /// Index of the bracketing centre sample.
    #[serde(skip)]
    pub index: usize,
}

fn check_grid(xs: &[f64], ys: &[f64]) -> Result<()> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidGrid(format!(
            "grid has {} points but data has {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidGrid(
            "grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Vertex of the parabola through three samples around `i`, clamped to the
/// bracket.
pub fn parabolic_vertex(xs: &[f64], ys: &[f64], i: usize) -> (f64, f64) {
    let (x1, y1) = (xs[i], ys[i]);
    let h0 = xs[i - 1] - x1;
    let h2 = xs[i + 1] - x1;
    let d0 = ys[i - 1] - y1;
    let d2 = ys[i + 1] - y1;
    let a = (d0 / h0 - d2 / h2) / (h0 - h2);
    let b = d0 / h0 - a * h0;
    if a == 0.0 || !a.is_finite() {
        return (x1, y1);
    }
    let t = (-b / (2.0 * a)).clamp(h0, h2);
    (x1 + t, y1 + b * t + a * t * t)
}

/// Interior strict local maxima refined by 3-point parabolic interpolation,
/// sorted by height (highest first).
pub fn find_peaks(xs: &[f64], ys: &[f64]) -> Result<Vec<Peak>> {
    check_grid(xs, ys)?;
    if xs.len() < 3 {
        return Ok(Vec::new());
    }
    let mut peaks: Vec<Peak> = (1..xs.len() - 1)
        .filter(|&i| ys[i] > ys[i - 1] && ys[i] > ys[i + 1])
        .map(|i| {
            let (position, height) = parabolic_vertex(xs, ys, i);
            Peak {
                position,
                height,
                index: i,
            }
        })
        .collect();
    peaks.sort_by(|a, b| b.height.total_cmp(&a.height));
    Ok(peaks)
}

/// Interior strict local minima, refined like [`find_peaks`] on `-ys`,
/// sorted deepest first.
pub fn find_minima(xs: &[f64], ys: &[f64]) -> Result<Vec<Peak>> {
    let neg: Vec<f64> = ys.iter().map(|y| -y).collect();
    Ok(find_peaks(xs, &neg)?
        .into_iter()
        .map(|p| Peak {
            height: -p.height,
            ..p
        })
        .collect())
}

/// Linearly interpolated sign changes of `ys`.
pub fn zero_crossings(xs: &[f64], ys: &[f64]) -> Result<Vec<f64>> {
    check_grid(xs, ys)?;
    let mut out = Vec::new();
    for i in 0..xs.len().saturating_sub(1) {
        let (y0, y1) = (ys[i], ys[i + 1]);
        if y0 == 0.0 {
            out.push(xs[i]);
        } else if y0 * y1 < 0.0 {
            out.push(xs[i] - y0 * (xs[i + 1] - xs[i]) / (y1 - y0));
        }
    }
    if ys.last() == Some(&0.0) && xs.len() > 1 {
        out.push(xs[xs.len() - 1]);
    }
    Ok(out)
}
