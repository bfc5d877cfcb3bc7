//! Subcommand implementations. Reports go to stdout, files to the output
//! directory.

use std::path::{Path, PathBuf};

use optomech_core::diagnostics::{extract_features, kappa_eff_at_mechanical, Channel};
use optomech_core::model::SINGLE_MODE_LIMIT;
use optomech_core::numerics::linspace;
use optomech_core::scenario::{run_curve, FigureKind};
use optomech_core::{
    derive, solve_mean_fields, tune_coupling_frequency, CouplingMode, Execution, FigureId,
    MeanFields, PhysicalParams, ResponseSpectrum, Scenario,
};
use serde_json::{json, Value};

use crate::config::{Format, RunConfig, TuningMode};
use crate::error::CliError;
use crate::output::{self, Series};

pub struct Context {
    pub config: RunConfig,
    pub exec: Execution,
    /// Grid given on the command line; overrides figure recipes.
    pub grid_override: bool,
}

impl Context {
    fn mode(&self) -> CouplingMode {
        match self.config.tuning {
            TuningMode::Auto => CouplingMode::RedSideband,
            TuningMode::Explicit => CouplingMode::Explicit,
        }
    }

    fn grid(&self) -> Result<Vec<f64>, CliError> {
        Ok(linspace(
            self.config.grid_min_over_omega_r,
            self.config.grid_max_over_omega_r,
            self.config.grid_points,
        )?)
    }

    fn out_dir(&self) -> Result<&Path, CliError> {
        let dir = self.config.out_dir.as_path();
        std::fs::create_dir_all(dir).map_err(CliError::io(dir))?;
        Ok(dir)
    }

    fn emit(&self, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
        let path = self.out_dir()?.join(name);
        output::write_file(&path, bytes)?;
        log::info!("wrote {}", path.display());
        Ok(path)
    }

    /// Parameters at the configured operating point, tuned when asked.
    fn operating_point(&self) -> Result<(PhysicalParams, Option<usize>), CliError> {
        let p = self.config.physical();
        match self.config.tuning {
            TuningMode::Explicit => Ok((p, None)),
            TuningMode::Auto => {
                let t = tune_coupling_frequency(&p)?;
                Ok((p.with_omega_c(t.omega_c), Some(t.root_index)))
            }
        }
    }
}

/// Ordered key/value report printed as `key = value` lines or JSON.
struct Report(serde_json::Map<String, Value>);

impl Report {
    fn new() -> Self {
        Report(serde_json::Map::new())
    }

    fn put(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.0.insert(key.to_string(), value.into());
        self
    }

    fn print(&self, format: Format) -> Result<(), CliError> {
        match format {
            Format::Json => {
                let bytes = output::json_bytes(&self.0)?;
                print!("{}", String::from_utf8_lossy(&bytes));
            }
            Format::Csv => {
                for (k, v) in &self.0 {
                    match v {
                        Value::Number(n) if n.is_f64() => {
                            println!("{k} = {}", output::number(n.as_f64().unwrap_or(f64::NAN)))
                        }
                        Value::String(s) => println!("{k} = {s}"),
                        Value::Array(rows) => {
                            println!("{k}:");
                            for row in rows {
                                println!("  {row}");
                            }
                        }
                        other => println!("{k} = {other}"),
                    }
                }
            }
        }
        Ok(())
    }
}

/// Derived constants do not depend on stability, so an unstable tuning
/// falls back to the configured `omega_c` instead of failing.
pub fn derive_cmd(ctx: &Context) -> Result<(), CliError> {
    let (p, tuning_status) = match ctx.operating_point() {
        Ok((p, _)) => (
            p,
            if ctx.config.tuning == TuningMode::Auto {
                "tuned"
            } else {
                "explicit"
            },
        ),
        Err(CliError::Core(e)) if e.is_unstable_regime() => {
            log::warn!("{e}; reporting at the bare cavity frequency");
            (ctx.config.physical(), "unstable")
        }
        Err(e) => return Err(e),
    };
    let d = derive(&p)?;
    let mf = solve_mean_fields(&d, p.kappa, p.gamma, p.eta)?;
    let metric = d.single_mode_metric(mf.photon_number());
    if metric > SINGLE_MODE_LIMIT {
        log::warn!(
            "single-mode metric U0|alpha|^2/omega_R = {metric:.3} exceeds {SINGLE_MODE_LIMIT}"
        );
    }
    let wr = p.omega_r;
    let mut r = Report::new();
    r.put("tuning_status", tuning_status)
        .put("omega_c_rad_s", p.omega_c)
        .put("atomic_detuning_rad_s", d.atomic_detuning)
        .put("cavity_detuning_rad_s", d.cavity_detuning)
        .put("barrier_per_photon_rad_s", d.barrier_per_photon)
        .put("shifted_detuning_rad_s", d.shifted_detuning)
        .put("coupling_rad_s", d.coupling)
        .put("bogoliubov_freq_over_omegaR", d.bogoliubov_freq / wr)
        .put("omega_plus_over_omegaR", d.omega_plus / wr)
        .put("omega_minus_over_omegaR", d.omega_minus / wr)
        .put("omega_sw_over_omegaR", d.scattering_freq / wr)
        .put("omega_m_over_omegaR", d.mechanical_freq / wr)
        .put("photon_number", mf.photon_number())
        .put("single_mode_metric", metric)
        .put("single_mode_metric_ok", metric <= SINGLE_MODE_LIMIT);
    r.print(ctx.config.format)
}

fn root_rows(mf: &MeanFields, p: &PhysicalParams) -> Vec<Value> {
    mf.all_roots
        .iter()
        .enumerate()
        .map(|(i, root)| {
            json!({
                "index": i,
                "selected": i == mf.selected,
                "detuning_over_omegaR": root.detuning / p.omega_r,
                "alpha_re": root.alpha.re,
                "alpha_im": root.alpha.im,
                "photon_number": root.alpha.norm_sqr(),
                "beta_re": root.beta.re,
                "beta_im": root.beta.im,
                "stable": root.stable,
                "margin_over_kappa": root.margin / p.kappa,
            })
        })
        .collect()
}

pub fn steady_cmd(ctx: &Context) -> Result<(), CliError> {
    let (p, root_index) = ctx.operating_point()?;
    let d = derive(&p)?;
    let mut mf = solve_mean_fields(&d, p.kappa, p.gamma, p.eta)?;
    if let Some(i) = root_index {
        mf = mf.select(i)?;
    }
    let mut r = Report::new();
    r.put("omega_c_rad_s", p.omega_c)
        .put("omega_m_over_omegaR", d.mechanical_freq / p.omega_r)
        .put("root_count", mf.all_roots.len())
        .put(
            "stable_root_count",
            mf.all_roots.iter().filter(|x| x.stable).count(),
        )
        .put("selected", mf.selected)
        .put("stable", mf.stable)
        .put("margin_over_kappa", mf.margin / p.kappa)
        .put("alpha_re", mf.alpha.re)
        .put("alpha_im", mf.alpha.im)
        .put("beta_re", mf.beta.re)
        .put("beta_im", mf.beta.im)
        .put("roots", root_rows(&mf, &p));
    r.print(ctx.config.format)?;
    if !mf.stable {
        return Err(CliError::Unstable(format!(
            "none of the {} mean-field roots is dynamically stable (best margin {:.3e} kappa)",
            mf.all_roots.len(),
            mf.margin / p.kappa
        )));
    }
    Ok(())
}

pub fn tune_cmd(ctx: &Context) -> Result<(), CliError> {
    let p = ctx.config.physical();
    let t = tune_coupling_frequency(&p)?;
    let candidates: Vec<Value> = t.candidates.iter().map(|c| json!(c)).collect();
    let mut r = Report::new();
    r.put("omega_c_rad_s", t.omega_c)
        .put("detuning_over_omegaR", t.detuning / p.omega_r)
        .put("omega_m_over_omegaR", t.mechanical_freq / p.omega_r)
        .put("residual_rad_s", t.residual)
        .put("shifted_cavity_freq_rad_s", t.shifted_cavity_freq)
        .put("naive_omega_c_rad_s", t.naive_omega_c)
        .put("naive_discrepancy_rad_s", t.naive_discrepancy)
        .put("candidates", candidates);
    r.print(ctx.config.format)
}

fn features_json(spec: &ResponseSpectrum) -> Value {
    let mut map = serde_json::Map::new();
    for ch in Channel::ALL {
        let v = match extract_features(spec, ch) {
            Ok(f) => json!(f),
            Err(e) => json!({ "error": e.to_string() }),
        };
        map.insert(ch.label().to_string(), v);
    }
    Value::Object(map)
}

fn scenario_summary(s: &Scenario) -> Value {
    json!({
        "omega_c_rad_s": s.params.omega_c,
        "detuning_over_omegaR": s.mean_fields.detuning / s.params.omega_r,
        "omega_m_over_omegaR": s.mechanical_freq_over_recoil(),
        "coupling_over_omegaR": s.coupling_strength_over_recoil(),
        "kappa_eff_at_omega_m_over_kappa":
            kappa_eff_at_mechanical(&s.derived, &s.mean_fields, s.params.kappa, s.params.gamma) / s.params.kappa,
    })
}

fn spectrum_bytes(
    spec: &ResponseSpectrum,
    format: Format,
) -> Result<(Vec<u8>, &'static str), CliError> {
    Ok(match format {
        Format::Csv => (output::spectrum_csv(spec)?, "csv"),
        Format::Json => (output::spectrum_json(spec)?, "json"),
    })
}

pub fn sweep_cmd(ctx: &Context) -> Result<(), CliError> {
    let grid = ctx.grid()?;
    let s = Scenario::prepare(ctx.config.physical(), ctx.mode())?;
    let spec = s.spectrum(&grid, ctx.exec)?;
    let (bytes, ext) = spectrum_bytes(&spec, ctx.config.format)?;
    let data = ctx.emit(&format!("spectrum.{ext}"), &bytes)?;
    let mut features = features_json(&spec);
    features["operating_point"] = scenario_summary(&s);
    let feat = ctx.emit("features.json", &output::json_bytes(&features)?)?;
    if ctx.config.plot {
        let series: Vec<Series> = Channel::ALL
            .iter()
            .map(|&ch| Series {
                label: ch.label().to_string(),
                xs: &spec.grid,
                ys: ch.values(&spec),
            })
            .collect();
        let svg = output::svg_overlay(
            "Sideband amplitudes",
            "omega_pc / omega_R",
            "amplitude",
            &series,
        );
        ctx.emit("spectrum.svg", svg.as_bytes())?;
    }
    println!("{}", data.display());
    println!("{}", feat.display());
    Ok(())
}

pub fn diag_cmd(ctx: &Context) -> Result<(), CliError> {
    let grid = ctx.grid()?;
    let s = Scenario::prepare(ctx.config.physical(), ctx.mode())?;
    let diag = s.diagnostics(&grid, ctx.exec)?;
    let (bytes, ext) = match ctx.config.format {
        Format::Csv => (output::diagnostics_csv(&diag)?, "csv"),
        Format::Json => (output::diagnostics_json(&diag)?, "json"),
    };
    let data = ctx.emit(&format!("diagnostics.{ext}"), &bytes)?;
    if ctx.config.plot {
        let series = [Series {
            label: "omega_R A".into(),
            xs: &diag.grid,
            ys: &diag.spectral,
        }];
        let svg = output::svg_overlay(
            "Spectral function",
            "omega / omega_R",
            "omega_R A(omega)",
            &series,
        );
        ctx.emit("diagnostics.svg", svg.as_bytes())?;
    }
    println!("{}", data.display());
    Ok(())
}

pub fn figure_cmd(ctx: &Context, id: FigureId) -> Result<(), CliError> {
    let recipe = id.recipe();
    let grid = if ctx.grid_override {
        ctx.grid()?
    } else {
        recipe.grid()?
    };
    let base = ctx.config.physical();
    let mut entries = Vec::new();
    let mut unstable = Vec::new();
    let mut plotted: Vec<(String, Vec<f64>)> = Vec::new();
    for curve in recipe.curves {
        let label = curve.label();
        let mut entry = json!({
            "label": label,
            "omega_sw_over_omegaR": curve.omega_sw_over_omega_r,
            "eta_over_kappa": curve.eta_over_kappa,
        });
        match run_curve(&base, *curve, &grid, ctx.exec) {
            Ok(res) => {
                let name = format!("{id}_{label}");
                let (bytes, ext, ys) = match (recipe.kind, ctx.config.format) {
                    (FigureKind::Response, f) => {
                        let (b, e) = spectrum_bytes(&res.spectrum, f)?;
                        (b, e, res.spectrum.anti_stokes_optical.clone())
                    }
                    (FigureKind::Diagnostics, Format::Csv) => (
                        output::diagnostics_csv(&res.diagnostics)?,
                        "csv",
                        res.diagnostics.spectral.clone(),
                    ),
                    (FigureKind::Diagnostics, Format::Json) => (
                        output::diagnostics_json(&res.diagnostics)?,
                        "json",
                        res.diagnostics.spectral.clone(),
                    ),
                };
                let path = ctx.emit(&format!("{name}.{ext}"), &bytes)?;
                entry["status"] = json!("ok");
                entry["file"] = json!(path.file_name().map(|f| f.to_string_lossy().into_owned()));
                entry["operating_point"] = scenario_summary(&res.scenario);
                entry["features"] = features_json(&res.spectrum);
                println!("{}", path.display());
                plotted.push((label, ys));
            }
            Err(e) if e.is_unstable_regime() => {
                log::warn!("{id} curve {label}: {e}");
                entry["status"] = json!("unstable");
                entry["error"] = json!(e.to_string());
                unstable.push(label);
            }
            Err(e) => return Err(e.into()),
        }
        entries.push(entry);
    }
    let combined = json!({
        "figure": id.as_str(),
        "kind": recipe.kind,
        "grid": { "min_over_omegaR": grid[0], "max_over_omegaR": grid[grid.len() - 1], "points": grid.len() },
        "curves": entries,
    });
    let feat = ctx.emit(
        &format!("{id}_features.json"),
        &output::json_bytes(&combined)?,
    )?;
    println!("{}", feat.display());
    if ctx.config.plot && !plotted.is_empty() {
        let series: Vec<Series> = plotted
            .iter()
            .map(|(label, ys)| Series {
                label: label.clone(),
                xs: &grid,
                ys,
            })
            .collect();
        let (title, x_label, y_label) = match recipe.kind {
            FigureKind::Response => (
                format!("{id}: anti-Stokes optical amplitude"),
                "omega_pc / omega_R",
                "A_a",
            ),
            FigureKind::Diagnostics => (
                format!("{id}: spectral function"),
                "omega / omega_R",
                "omega_R A(omega)",
            ),
        };
        let svg = output::svg_overlay(&title, x_label, y_label, &series);
        let path = ctx.emit(&format!("{id}.svg"), svg.as_bytes())?;
        println!("{}", path.display());
    }
    if !unstable.is_empty() {
        return Err(CliError::Unstable(format!(
            "{id}: no stable operating point for curve(s) {}",
            unstable.join(", ")
        )));
    }
    Ok(())
}
