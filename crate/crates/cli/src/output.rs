//! CSV, JSON and SVG emission.

use std::fmt::Write as _;
use std::path::Path;

use optomech_core::diagnostics::DiagnosticsSpectrum;
use optomech_core::ResponseSpectrum;
use serde::Serialize;

use crate::error::CliError;

pub const SPECTRUM_COLUMNS: [&str; 5] = ["omega_pc_over_omegaR", "A_a", "S_a", "A_c", "S_c"];

pub const DIAGNOSTICS_COLUMNS: [&str; 5] = [
    "omega_over_omegaR",
    "re_sigma_over_omegaR",
    "im_sigma_over_omegaR",
    "spectral_times_omegaR",
    "kappa_eff_over_kappa",
];

/// 17 significant digits: parses back to the same f64.
pub fn number(x: f64) -> String {
    format!("{x:.16e}")
}

fn table_csv(header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> Result<Vec<u8>, CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let encode = |e: csv::Error| CliError::Encode(e.to_string());
    w.write_record(header).map_err(encode)?;
    for row in rows {
        w.write_record(row.iter().map(|&x| number(x)))
            .map_err(encode)?;
    }
    w.into_inner().map_err(|e| CliError::Encode(e.to_string()))
}

fn table_json(header: &[&str], columns: Vec<&[f64]>) -> Result<Vec<u8>, CliError> {
    let map: serde_json::Map<String, serde_json::Value> = header
        .iter()
        .zip(columns)
        .map(|(h, c)| (h.to_string(), serde_json::Value::from(c.to_vec())))
        .collect();
    json_bytes(&map)
}

pub fn json_bytes<T: Serialize + ?Sized>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut bytes =
        serde_json::to_vec_pretty(value).map_err(|e| CliError::Encode(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(CliError::io(path))
}

pub fn spectrum_csv(spec: &ResponseSpectrum) -> Result<Vec<u8>, CliError> {
    let rows = (0..spec.len()).map(|i| {
        vec![
            spec.grid[i],
            spec.anti_stokes_optical[i],
            spec.stokes_optical[i],
            spec.anti_stokes_atomic[i],
            spec.stokes_atomic[i],
        ]
    });
    table_csv(&SPECTRUM_COLUMNS, rows)
}

pub fn spectrum_json(spec: &ResponseSpectrum) -> Result<Vec<u8>, CliError> {
    table_json(
        &SPECTRUM_COLUMNS,
        vec![
            &spec.grid,
            &spec.anti_stokes_optical,
            &spec.stokes_optical,
            &spec.anti_stokes_atomic,
            &spec.stokes_atomic,
        ],
    )
}

fn diagnostics_columns(d: &DiagnosticsSpectrum) -> [Vec<f64>; 5] {
    [
        d.grid.clone(),
        d.sigma.iter().map(|s| s.re / d.omega_r).collect(),
        d.sigma.iter().map(|s| s.im / d.omega_r).collect(),
        d.spectral.clone(),
        d.kappa_eff_ratio.clone(),
    ]
}

pub fn diagnostics_csv(d: &DiagnosticsSpectrum) -> Result<Vec<u8>, CliError> {
    let cols = diagnostics_columns(d);
    table_csv(
        &DIAGNOSTICS_COLUMNS,
        (0..d.grid.len()).map(|i| cols.iter().map(|c| c[i]).collect()),
    )
}

pub fn diagnostics_json(d: &DiagnosticsSpectrum) -> Result<Vec<u8>, CliError> {
    let cols = diagnostics_columns(d);
    table_json(
        &DIAGNOSTICS_COLUMNS,
        cols.iter().map(Vec::as_slice).collect(),
    )
}

/// One polyline of an overlay plot.
pub struct Series<'a> {
    pub label: String,
    pub xs: &'a [f64],
    pub ys: &'a [f64],
}

const COLORS: [&str; 6] = [
    "#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

/// Self-contained SVG line plot with axes, ticks and a legend.
pub fn svg_overlay(title: &str, x_label: &str, y_label: &str, series: &[Series<'_>]) -> String {
    let (width, height) = (800.0, 500.0);
    let (left, right, top, bottom) = (80.0, 20.0, 40.0, 60.0);
    let finite = |v: &&f64| v.is_finite();
    let all_x = series.iter().flat_map(|s| s.xs.iter().filter(finite));
    let all_y = series.iter().flat_map(|s| s.ys.iter().filter(finite));
    let (x0, x1) = bounds(all_x.copied());
    let (y0, y1) = bounds(all_y.copied().chain(std::iter::once(0.0)));
    let pw = width - left - right;
    let ph = height - top - bottom;
    let sx = |x: f64| left + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| top + ph - (y - y0) / (y1 - y0) * ph;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        width / 2.0,
        escape(title)
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for k in 0..=5 {
        let f = k as f64 / 5.0;
        let x = x0 + f * (x1 - x0);
        let y = y0 + f * (y1 - y0);
        let _ = writeln!(
            svg,
            r#"<line x1="{0:.2}" y1="{1}" x2="{0:.2}" y2="{2}" stroke="black"/><text x="{0:.2}" y="{3}" text-anchor="middle">{4}</text>"#,
            sx(x),
            top + ph,
            top + ph + 5.0,
            top + ph + 20.0,
            tick(x)
        );
        let _ = writeln!(
            svg,
            r#"<line x1="{0}" y1="{1:.2}" x2="{2}" y2="{1:.2}" stroke="black"/><text x="{3}" y="{4:.2}" text-anchor="end">{5}</text>"#,
            left - 5.0,
            sy(y),
            left,
            left - 8.0,
            sy(y) + 4.0,
            tick(y)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        left + pw / 2.0,
        height - 15.0,
        escape(x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{0}" text-anchor="middle" transform="rotate(-90 20 {0})">{1}</text>"#,
        top + ph / 2.0,
        escape(y_label)
    );
    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let points: Vec<String> =
            s.xs.iter()
                .zip(s.ys)
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .map(|(&x, &y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
        let ly = top + 18.0 + 18.0 * i as f64;
        let lx = left + pw - 190.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            lx + 25.0,
            lx + 32.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
        (a.min(v), b.max(v))
    });
    if !lo.is_finite() || !hi.is_finite() {
        (0.0, 1.0)
    } else if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

fn tick(v: f64) -> String {
    if v == 0.0 || (1e-2..1e4).contains(&v.abs()) {
        format!("{v:.3}")
            .trim_end_matches('0')
            .trim_end_matches('.')
            .to_string()
    } else {
        format!("{v:.2e}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip_bit_exactly() {
        for x in [
            0.1,
            1.0 / 3.0,
            6.02214076e23,
            -2.2250738585072014e-308,
            39.191835884530846,
            5e-324,
        ] {
            assert_eq!(number(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn csv_uses_lf_and_header() {
        let spec = ResponseSpectrum {
            grid: vec![1.0, 2.0],
            anti_stokes_optical: vec![0.5, 0.25],
            stokes_optical: vec![0.0, 0.0],
            anti_stokes_atomic: vec![0.0, 0.0],
            stokes_atomic: vec![0.0, 0.0],
            omega_r: 1.0,
        };
        let text = String::from_utf8(spectrum_csv(&spec).unwrap()).unwrap();
        assert!(!text.contains('\r'));
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "omega_pc_over_omegaR,A_a,S_a,A_c,S_c");
        assert_eq!(lines.len(), 3);
    }

    #[test]
    fn svg_is_well_formed_enough() {
        let xs = [0.0, 1.0, 2.0];
        let ys = [1.0, 3.0, 2.0];
        let svg = svg_overlay(
            "t<1>",
            "x",
            "y",
            &[Series {
                label: "a&b".into(),
                xs: &xs,
                ys: &ys,
            }],
        );
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(svg.contains("t&lt;1&gt;") && svg.contains("a&amp;b"));
    }
}
