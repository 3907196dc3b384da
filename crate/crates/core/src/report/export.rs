use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{Report, Results};
use crate::operators::fmt_f64;
use crate::stolz::StolzDomain;
use crate::tensor::ProbeRow;
use crate::{Error, Result, C64};

const BOUNDARY_POINTS: usize = 512;

/// Writes `contents` to a sibling temp file and renames it over `path`.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| Error::validation("out", format!("{} has no file name", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

fn csv(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut s = String::from(header);
    s.push('\n');
    for r in rows {
        s.push_str(&r);
        s.push('\n');
    }
    s
}

fn companions(report: &Report) -> Result<Vec<(&'static str, String)>> {
    let mut files = Vec::new();
    match &report.results {
        Results::AnalyzeMeasure(a) => {
            files.push(("symbol.csv", csv("index,re,im,modulus", a.symbol.values.iter().enumerate().map(|(i, z)| format!("{i},{},{},{}", fmt_f64(z.re), fmt_f64(z.im), fmt_f64(z.norm()))))));
            files.push(("ritt_profile.csv", csv("n,value", a.ritt.profile.iter().map(|p| format!("{},{}", p.n, fmt_f64(p.value))))));
            files.push((
                "calculus.csv",
                csv(
                    "gamma,ratio,certified_lower_bound,monomial_ratio,witness_label,family_size,seed,certificate",
                    a.calculus.iter().map(|c| {
                        format!(
                            "{},{},{},{},{},{},{},{}",
                            fmt_f64(c.gamma),
                            fmt_f64(c.ratio),
                            fmt_f64(c.certified_lower_bound),
                            fmt_f64(c.monomial_ratio),
                            c.witness_label,
                            c.family_size,
                            c.seed,
                            c.norm_certificate.label()
                        )
                    }),
                ),
            ));
        }
        Results::AnalyzeOperator(a) => {
            files.push(("ritt_profile.csv", csv("n,value", a.ritt.profile.iter().map(|p| format!("{},{}", p.n, fmt_f64(p.value))))));
            files.push(("spectrum.csv", csv("re,im", a.spectrum.iter().map(|z| format!("{},{}", fmt_f64(z.re), fmt_f64(z.im))))));
        }
        Results::Transference(t) => {
            let mut jsonl = String::new();
            for r in &t.records {
                jsonl.push_str(&serde_json::to_string(r)?);
                jsonl.push('\n');
            }
            files.push(("trials.jsonl", jsonl));
            files.push((
                "trials.csv",
                csv(
                    "seed,order,dim,p,lhs,rhs,pi_norm,holds,status",
                    t.records.iter().map(|r| {
                        format!(
                            "{},{},{},{},{},{},{},{},{}",
                            r.seed,
                            r.group.order(),
                            r.dim,
                            fmt_f64(r.p.value()),
                            fmt_f64(r.lhs),
                            fmt_f64(r.rhs),
                            fmt_f64(r.pi_norm),
                            r.holds,
                            r.status.label()
                        )
                    }),
                ),
            ));
        }
        Results::TensorChain(c) => {
            files.push((
                "chain.csv",
                csv(
                    "n,lhs,mid,rhs,status,slack,factorization_residual,lhs_certificate,mid_certificate,rhs_certificate",
                    c.table.rows.iter().map(|r| {
                        format!(
                            "{},{},{},{},{},{},{},{},{},{}",
                            r.n,
                            fmt_f64(r.lhs),
                            fmt_f64(r.mid),
                            fmt_f64(r.rhs),
                            r.status.label(),
                            fmt_f64(r.slack),
                            fmt_f64(r.factorization_residual),
                            r.lhs_certificate.label(),
                            r.mid_certificate.label(),
                            r.rhs_certificate.label()
                        )
                    }),
                ),
            ));
        }
        Results::Dilation(d) => {
            files.push((
                "chains.csv",
                csv(
                    "index,states,support,qj,qej,idempotence,constants,min_entry,isometry,holds",
                    d.chains.iter().map(|c| {
                        let r = &c.residuals;
                        format!(
                            "{},{},{},{},{},{},{},{},{},{}",
                            c.index,
                            c.states,
                            c.support,
                            fmt_f64(r.qj),
                            fmt_f64(r.qej),
                            fmt_f64(r.idempotence),
                            fmt_f64(r.constants),
                            fmt_f64(r.min_entry),
                            fmt_f64(r.isometry),
                            c.holds
                        )
                    }),
                ),
            ));
            files.push(("pisier.csv", csv("index,legs,value,certificate", d.pisier.iter().map(|r| format!("{},{},{},{}", r.index, r.legs, fmt_f64(r.value), r.certificate.label())))));
        }
        Results::Sweep(s) => {
            files.push(("sweep.csv", csv(ProbeRow::CSV_HEADER, s.rows.iter().map(ProbeRow::csv_row))));
        }
    }
    Ok(files)
}

#[derive(Serialize)]
struct TimingsFile<'a> {
    command: &'static str,
    phases: &'a [(String, f64)],
    total_seconds: f64,
}

/// Writes `report.json`, the CSV companions and `timings.json` into `dir`.
/// Returns the written paths.
pub fn write_outputs(report: &Report, dir: &Path) -> Result<Vec<PathBuf>> {
    let json = report.to_json()?;
    let files = companions(report)?;
    let timings = serde_json::to_string_pretty(&TimingsFile {
        command: report.command.name(),
        phases: &report.timings.phases,
        total_seconds: report.timings.total_seconds,
    })? + "\n";
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (name, body) in files.iter().map(|(n, b)| (*n, b.as_str())).chain([("timings.json", timings.as_str()), ("report.json", json.as_str())]) {
        let path = dir.join(name);
        write_atomic(&path, body.as_bytes())?;
        written.push(path);
    }
    Ok(written)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotSeries {
    /// Symbol values as `re,im`.
    Locus,
    /// Boundary of the minimal Stolz domain.
    Boundary,
    /// `n, n ||T^n - T^{n-1}||`.
    Profile,
}

impl PlotSeries {
    fn file_name(self) -> &'static str {
        match self {
            PlotSeries::Locus => "locus.csv",
            PlotSeries::Boundary => "boundary.csv",
            PlotSeries::Profile => "profile.csv",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlotExport {
    pub path: Option<PathBuf>,
    pub note: Option<String>,
}

fn points_csv(points: &[C64]) -> String {
    csv("re,im", points.iter().map(|z| format!("{},{}", fmt_f64(z.re), fmt_f64(z.im))))
}

/// CSV for one plot series. Errors with [`Error::MissingSeries`] when the
/// report does not carry it; an absent Stolz boundary yields a note and no file.
pub fn export_plot_data(report: &Report, series: PlotSeries, dir: &Path) -> Result<PlotExport> {
    let missing = || Error::MissingSeries(format!("{series:?} is not part of a {} report", report.command.name()));
    let (body, note) = match (&report.results, series) {
        (Results::AnalyzeMeasure(a), PlotSeries::Locus) => (points_csv(&a.symbol.values), None),
        (Results::AnalyzeMeasure(a), PlotSeries::Boundary) => match a.angle.gamma_star {
            None => return Ok(PlotExport { path: None, note: Some("no Stolz domain contains the symbol; boundary not written".into()) }),
            Some(g) if g == 0.0 => {
                let seg: Vec<C64> = (0..=BOUNDARY_POINTS).map(|k| C64::new(k as f64 / BOUNDARY_POINTS as f64, 0.0)).collect();
                (points_csv(&seg), Some("minimal angle 0: the closed domain degenerates to the segment [0, 1]".into()))
            }
            Some(g) => (points_csv(&StolzDomain::new(g)?.boundary_polyline(BOUNDARY_POINTS)), None),
        },
        (Results::AnalyzeMeasure(a), PlotSeries::Profile) => (csv("n,value", a.ritt.profile.iter().map(|p| format!("{},{}", p.n, fmt_f64(p.value)))), None),
        (Results::AnalyzeOperator(a), PlotSeries::Locus) => (points_csv(&a.spectrum), None),
        (Results::AnalyzeOperator(a), PlotSeries::Profile) => (csv("n,value", a.ritt.profile.iter().map(|p| format!("{},{}", p.n, fmt_f64(p.value)))), None),
        (Results::Sweep(s), PlotSeries::Profile) => (csv("n,value", s.rows.iter().map(|r| format!("{},{}", r.index, fmt_f64(r.value)))), None),
        _ => return Err(missing()),
    };
    fs::create_dir_all(dir)?;
    let path = dir.join(series.file_name());
    write_atomic(&path, body.as_bytes())?;
    Ok(PlotExport { path: Some(path), note })
}
