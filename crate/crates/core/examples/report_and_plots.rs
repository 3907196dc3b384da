//! Config-driven report with CSV companions and plot series.

use rittkit::report::{export_plot_data, run, write_outputs, AnalysisConfig, PlotSeries};

fn main() -> rittkit::Result<()> {
    let config = AnalysisConfig::from_json(
        r#"{"command": "analyze-measure", "group": [16], "measure": {"weights": [0.5, 0.5, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0]},
            "seed": 1, "family": {"monomials": 8, "phi": 8, "cesaro": 4, "random_draws": 16, "max_degree": 8, "refinements": 1}}"#,
    )?;
    let report = run(&config)?;
    let dir = std::env::temp_dir().join("rittkit-report-example");
    for path in write_outputs(&report, &dir)? {
        println!("wrote {}", path.display());
    }
    for series in [PlotSeries::Locus, PlotSeries::Boundary, PlotSeries::Profile] {
        let e = export_plot_data(&report, series, &dir)?;
        println!("{series:?}: {:?} {}", e.path, e.note.unwrap_or_default());
    }
    Ok(())
}
