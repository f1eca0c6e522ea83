use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use phaseless_core::recon::ReconConfig;

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::fit::RateFit;
use crate::sweep::{SweepResult, SweepRow};

/// Artifact paths produced by [`emit_outputs`].
#[derive(Clone, Debug)]
pub struct ArtifactSet {
    pub csv: PathBuf,
    pub manifest: PathBuf,
    pub svg: PathBuf,
}

/// Sweep manifest (JSON interface).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepManifest {
    pub format: String,
    pub config: ExperimentConfig,
    pub config_sha256: String,
    pub theorem: String,
    pub alpha_theory: f64,
    pub fit: Option<RateFit>,
    pub rows: Vec<SweepRow>,
    pub partial: bool,
    pub failures: Vec<String>,
}

/// Write `sweep.csv`, `manifest.json` and `sweep.svg` into `out_dir`.
///
/// Outputs carry no timestamps: identical config and seed produce
/// byte-identical artifacts.
pub fn emit_outputs(
    config: &ExperimentConfig,
    recon: &ReconConfig<f64>,
    sweep: &SweepResult,
    fit: Option<RateFit>,
    out_dir: &Path,
) -> Result<ArtifactSet> {
    fs::create_dir_all(out_dir)?;
    let csv = out_dir.join("sweep.csv");
    fs::write(&csv, render_csv(&sweep.rows))?;

    let manifest_path = out_dir.join("manifest.json");
    let manifest = SweepManifest {
        format: "phaseless-sweep-v1".into(),
        config: config.clone(),
        config_sha256: sweep.config_sha256.clone(),
        theorem: config.theorem.label().into(),
        alpha_theory: recon.alpha(),
        fit,
        rows: sweep.rows.clone(),
        partial: sweep.partial,
        failures: sweep.failures.clone(),
    };
    fs::write(
        &manifest_path,
        serde_json::to_string_pretty(&manifest)? + "\n",
    )?;

    let svg = out_dir.join("sweep.svg");
    fs::write(&svg, render_svg(&sweep.rows, fit, recon.alpha()))?;

    Ok(ArtifactSet {
        csv,
        manifest: manifest_path,
        svg,
    })
}

pub fn render_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("E,sup_error,r_E,eps_E,nodes_outside,nodes_inside,born_gap_const\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.energy,
            r.sup_error,
            r.r_e,
            r.eps_e,
            r.nodes_outside,
            r.nodes_inside,
            r.born_gap_const
        ));
    }
    out
}

/// Parse a CSV produced by [`render_csv`] back into `(E, sup_error)` pairs.
pub fn parse_csv(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 || line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let e: f64 = fields
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| crate::error::HarnessError::Config(format!("bad CSV line {i}")))?;
        let err: f64 = fields
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| crate::error::HarnessError::Config(format!("bad CSV line {i}")))?;
        rows.push((e, err));
    }
    Ok(rows)
}

/// Self-contained log-log SVG: data points, the fitted line, and a reference
/// line with the theoretical slope `-alpha`. The numeric slopes are also
/// exposed as `data-*` attributes for machine checks.
pub fn render_svg(rows: &[SweepRow], fit: Option<RateFit>, alpha_theory: f64) -> String {
    let width = 640.0;
    let height = 480.0;
    let margin = 60.0;
    let usable: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.sup_error > 0.0)
        .map(|r| (r.energy.log10(), r.sup_error.log10()))
        .collect();
    let (x_min, x_max, y_min, y_max) = if usable.is_empty() {
        (0.0, 1.0, -1.0, 0.0)
    } else {
        let xs: Vec<f64> = usable.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = usable.iter().map(|p| p.1).collect();
        let pad = 0.15;
        (
            xs.iter().cloned().fold(f64::INFINITY, f64::min) - pad,
            xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + pad,
            ys.iter().cloned().fold(f64::INFINITY, f64::min) - pad,
            ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + pad,
        )
    };
    let sx = |x: f64| margin + (x - x_min) / (x_max - x_min) * (width - 2.0 * margin);
    let sy = |y: f64| height - margin - (y - y_min) / (y_max - y_min) * (height - 2.0 * margin);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\" data-theory-slope=\"{}\"{}>\n",
        -alpha_theory,
        match fit {
            Some(f) => format!(
                " data-fitted-slope=\"{}\" data-fitted-intercept=\"{}\" data-r-squared=\"{}\"",
                f.slope, f.intercept, f.r_squared
            ),
            None => String::new(),
        }
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>\n",
        m = margin,
        b = height - margin,
        r = width - margin,
        t = margin
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"13\">log10 E</text>\n\
         <text x=\"12\" y=\"{}\" font-size=\"13\" transform=\"rotate(-90 16 {})\">log10 sup_error</text>\n",
        width / 2.0 - 30.0,
        height - 18.0,
        height / 2.0,
        height / 2.0
    ));
    for (x, y) in &usable {
        svg.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"steelblue\"/>\n",
            sx(*x),
            sy(*y)
        ));
    }
    if let Some(f) = fit {
        // fitted line in natural-log space: ln err = slope ln E + intercept
        let to_log10 = |x10: f64| (f.slope * (x10 * std::f64::consts::LN_10) + f.intercept)
            / std::f64::consts::LN_10;
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"firebrick\" \
             stroke-width=\"1.5\" data-role=\"fit\"/>\n",
            sx(x_min),
            sy(to_log10(x_min)),
            sx(x_max),
            sy(to_log10(x_max))
        ));
    }
    if let Some((x0, y0)) = usable.first() {
        // reference slope -alpha anchored at the first point
        let y_at = |x: f64| y0 - alpha_theory * (x - x0);
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"gray\" \
             stroke-dasharray=\"6 4\" data-role=\"theory\"/>\n",
            sx(*x0),
            sy(y_at(*x0)),
            sx(x_max),
            sy(y_at(x_max))
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fake_row(e: f64, err: f64) -> SweepRow {
        SweepRow {
            energy: e,
            sup_error: err,
            r_e: 2.0 * e.powf(1.0 / 14.0),
            eps_e: 0.0,
            nodes_outside: 100,
            nodes_inside: 0,
            born_gap_const: 0.01,
            min_zeta_ratio: 5.0,
            clamped_targets: 0,
            dataset_sha256: "deadbeef".into(),
        }
    }

    #[test]
    fn csv_has_exact_header_and_row_count() {
        let rows: Vec<SweepRow> = (0..5).map(|i| fake_row(16.0 * 2f64.powi(i), 0.1)).collect();
        let text = render_csv(&rows);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 6);
        assert_eq!(
            lines[0],
            "E,sup_error,r_E,eps_E,nodes_outside,nodes_inside,born_gap_const"
        );
        let parsed = parse_csv(&text).unwrap();
        assert_eq!(parsed.len(), 5);
        assert_eq!(parsed[0], (16.0, 0.1));
    }

    #[test]
    fn svg_exposes_reference_slope_exactly() {
        let rows: Vec<SweepRow> = (0..4).map(|i| fake_row(16.0 * 2f64.powi(i), 0.1)).collect();
        let alpha = 1.0 / 14.0;
        let svg = render_svg(&rows, None, alpha);
        let needle = format!("data-theory-slope=\"{}\"", -alpha);
        assert!(svg.contains(&needle), "missing {needle}");
        // read the attribute back and compare numerically
        let start = svg.find("data-theory-slope=\"").unwrap() + "data-theory-slope=\"".len();
        let end = svg[start..].find('"').unwrap() + start;
        let value: f64 = svg[start..end].parse().unwrap();
        assert!((value + alpha).abs() <= 1e-12);
    }
}
