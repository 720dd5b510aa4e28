use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::pipeline::ResultBundle;
use super::svg::{Marker, Plot};
use crate::error::{Error, Result};
use crate::spectral::{db, LineClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportKind {
    Distortion,
    Frf,
    Fit,
    ClosedLoop,
}

impl ReportKind {
    pub const ALL: [ReportKind; 4] = [ReportKind::Distortion, ReportKind::Frf, ReportKind::Fit, ReportKind::ClosedLoop];

    pub fn as_str(self) -> &'static str {
        match self {
            ReportKind::Distortion => "distortion",
            ReportKind::Frf => "frf",
            ReportKind::Fit => "fit",
            ReportKind::ClosedLoop => "closedloop",
        }
    }
}

impl FromStr for ReportKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ReportKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown report kind `{s}`")))
    }
}

/// Kinds the bundle has data for.
pub fn available_kinds(bundle: &ResultBundle) -> Vec<ReportKind> {
    let mut out = vec![ReportKind::Distortion, ReportKind::Frf];
    if bundle.levels.iter().all(|l| l.fit.is_some()) && !bundle.levels.is_empty() {
        out.push(ReportKind::Fit);
    }
    if bundle.levels.iter().all(|l| l.closed_loop.is_some()) && !bundle.levels.is_empty() {
        out.push(ReportKind::ClosedLoop);
    }
    out
}

fn require(bundle: &ResultBundle, kind: ReportKind) -> Result<()> {
    let avail = available_kinds(bundle);
    if avail.contains(&kind) {
        return Ok(());
    }
    let names: Vec<&str> = avail.iter().map(|k| k.as_str()).collect();
    Err(Error::MissingArtifact(format!(
        "{} not present; available: {}",
        kind.as_str(),
        names.join(", ")
    )))
}

fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Comma-separated table, one row per bin (and level). The first line names
/// the columns; numbers use `.` decimals and exponent notation.
pub fn render_table(bundle: &ResultBundle, kind: ReportKind) -> Result<String> {
    require(bundle, kind)?;
    let mut s = String::new();
    match kind {
        ReportKind::Distortion => {
            s.push_str("level,rms,bin,frequency_hz,class,level_db,noise_floor_db\n");
            for (i, l) in bundle.levels.iter().enumerate() {
                for b in &l.distortion.bins {
                    let _ = writeln!(
                        s,
                        "{i},{},{},{},{},{},{}",
                        num(l.rms),
                        b.bin,
                        num(b.frequency),
                        b.class.as_str(),
                        num(b.level_db()),
                        opt(b.noise_floor_db())
                    );
                }
            }
        }
        ReportKind::Frf => {
            s.push_str("level,rms,bin,frequency_hz,g_re,g_im,magnitude_db,var_noise,var_total\n");
            for (i, l) in bundle.levels.iter().enumerate() {
                for f in &l.frf.lines {
                    let _ = writeln!(
                        s,
                        "{i},{},{},{},{},{},{},{},{}",
                        num(l.rms),
                        f.bin,
                        num(f.frequency),
                        num(f.g.re),
                        num(f.g.im),
                        num(db(f.g.norm_sqr())),
                        opt(f.var_noise),
                        opt(f.var_total)
                    );
                }
            }
        }
        ReportKind::Fit => {
            s.push_str("level,rms,bin,frequency_hz,measured_re,measured_im,model_re,model_im,weighted_residual\n");
            for (i, l) in bundle.levels.iter().enumerate() {
                let fit = l.fit.as_ref().expect("checked");
                for (f, r) in l.frf.lines.iter().zip(&fit.residuals) {
                    let m = fit.model.response_at(f.frequency, l.frf.sample_rate);
                    let _ = writeln!(
                        s,
                        "{i},{},{},{},{},{},{},{},{}",
                        num(l.rms),
                        f.bin,
                        num(f.frequency),
                        num(f.g.re),
                        num(f.g.im),
                        num(m.re),
                        num(m.im),
                        num(r.weighted)
                    );
                }
            }
        }
        ReportKind::ClosedLoop => {
            s.push_str("level,rms,bin,frequency_hz,g_bla_r_re,g_bla_r_im,var_bla_r,g_direct_re,g_direct_im,bias_z\n");
            for (i, l) in bundle.levels.iter().enumerate() {
                let cl = l.closed_loop.as_ref().expect("checked");
                for x in &cl.indirect.lines {
                    let _ = writeln!(
                        s,
                        "{i},{},{},{},{},{},{},{},{},{}",
                        num(l.rms),
                        x.bin,
                        num(x.frequency),
                        num(x.g_bla_r.re),
                        num(x.g_bla_r.im),
                        opt(x.var_bla_r),
                        num(x.g_direct.re),
                        num(x.g_direct.im),
                        opt(x.bias_z)
                    );
                }
            }
        }
    }
    Ok(s)
}

/// Standalone SVG plots: one per level for distortion and fit, one overlay
/// for frf and closedloop.
pub fn render_plots(bundle: &ResultBundle, kind: ReportKind) -> Result<Vec<(String, String)>> {
    require(bundle, kind)?;
    let name = &bundle.provenance.config_name;
    let mut out = Vec::new();
    match kind {
        ReportKind::Distortion => {
            for (i, l) in bundle.levels.iter().enumerate() {
                let mut p = Plot::new(&format!("{name}: output spectrum, rms {}", l.rms), "frequency (Hz)", "level (dB)");
                let pts = |c: LineClass| -> Vec<(f64, f64)> {
                    l.distortion.of_class(c).map(|b| (b.frequency, b.level_db())).collect()
                };
                p.markers("excited", "black", Marker::Dot, pts(LineClass::Excited));
                p.markers("odd detection", "red", Marker::Bullet, pts(LineClass::OddDetection));
                p.markers("even detection", "blue", Marker::Star, pts(LineClass::EvenDetection));
                let floor: Vec<(f64, f64)> = l
                    .distortion
                    .of_class(LineClass::Excited)
                    .filter_map(|b| b.noise_floor_db().map(|n| (b.frequency, n)))
                    .collect();
                p.line("noise level", "green", floor);
                out.push((format!("distortion_level{i}.svg"), p.render()));
            }
        }
        ReportKind::Frf => {
            let mut p = Plot::new(&format!("{name}: FRF magnitude"), "frequency (Hz)", "|G| (dB)");
            for (i, l) in bundle.levels.iter().enumerate() {
                let pts = l.frf.lines.iter().map(|f| (f.frequency, db(f.g.norm_sqr()))).collect();
                p.line(&format!("rms {}", l.rms), PALETTE[i % PALETTE.len()], pts);
            }
            out.push(("frf.svg".into(), p.render()));
        }
        ReportKind::Fit => {
            for (i, l) in bundle.levels.iter().enumerate() {
                let fit = l.fit.as_ref().expect("checked");
                let mut p = Plot::new(&format!("{name}: fit, rms {}", l.rms), "frequency (Hz)", "dB");
                p.markers("measured", "black", Marker::Dot, l.frf.lines.iter().map(|f| (f.frequency, db(f.g.norm_sqr()))).collect());
                p.line(
                    "model",
                    "red",
                    l.frf
                        .lines
                        .iter()
                        .map(|f| (f.frequency, db(fit.model.response_at(f.frequency, l.frf.sample_rate).norm_sqr())))
                        .collect(),
                );
                p.markers(
                    "weighted residual",
                    "green",
                    Marker::Bullet,
                    fit.residuals.iter().map(|r| (r.frequency, db(r.weighted * r.weighted))).collect(),
                );
                out.push((format!("fit_level{i}.svg"), p.render()));
            }
        }
        ReportKind::ClosedLoop => {
            let mut p = Plot::new(&format!("{name}: direct vs indirect"), "frequency (Hz)", "|G| (dB)");
            for (i, l) in bundle.levels.iter().enumerate() {
                let cl = l.closed_loop.as_ref().expect("checked");
                let c = PALETTE[i % PALETTE.len()];
                p.line(&format!("indirect, rms {}", l.rms), c, cl.indirect.lines.iter().map(|x| (x.frequency, db(x.g_bla_r.norm_sqr()))).collect());
                p.markers(&format!("direct, rms {}", l.rms), c, Marker::Dot, cl.indirect.lines.iter().map(|x| (x.frequency, db(x.g_direct.norm_sqr()))).collect());
            }
            out.push(("closedloop.svg".into(), p.render()));
        }
    }
    Ok(out)
}

/// Writes `<kind>.csv` and the plots into `dir`, returning the paths written.
pub fn emit_report(bundle: &ResultBundle, kind: ReportKind, dir: &Path) -> Result<Vec<PathBuf>> {
    let table = render_table(bundle, kind)?;
    let plots = render_plots(bundle, kind)?;
    fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    let csv = dir.join(format!("{}.csv", kind.as_str()));
    fs::write(&csv, table)?;
    paths.push(csv);
    for (name, svg) in plots {
        let p = dir.join(name);
        fs::write(&p, svg)?;
        paths.push(p);
    }
    Ok(paths)
}
