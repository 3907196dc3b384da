use std::f64::consts::FRAC_PI_2;
use std::fs;

use rittkit::report::{export_plot_data, run, AnalysisConfig, PlotSeries};
use rittkit::{stolz_contains, Error, Report, C64};

fn report(json: &str) -> Report {
    run(&AnalysisConfig::from_json(json).unwrap()).unwrap()
}

fn points(path: &std::path::Path) -> Vec<C64> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("re,im"));
    lines
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            C64::new(a.parse().unwrap(), b.parse().unwrap())
        })
        .collect()
}

const SMALL_FAMILY: &str = r#""family":{"monomials":4,"phi":4,"cesaro":2,"random_draws":4,"max_degree":4,"refinements":0}"#;

fn weights_z32(pairs: &[(usize, f64)]) -> String {
    let mut w = vec![0.0; 32];
    for &(i, x) in pairs {
        w[i] = x;
    }
    serde_json::to_string(&w).unwrap()
}

#[test]
fn coin_locus_and_degenerate_boundary() {
    let dir = tempfile::tempdir().unwrap();
    let r = report(&format!(r#"{{"command":"analyze-measure","group":[2],"measure":{{"weights":[0.5,0.5]}},"seed":1,{SMALL_FAMILY}}}"#));
    let locus = export_plot_data(&r, PlotSeries::Locus, dir.path()).unwrap();
    assert_eq!(points(&locus.path.unwrap()), vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
    let boundary = export_plot_data(&r, PlotSeries::Boundary, dir.path()).unwrap();
    assert!(boundary.note.unwrap().contains("degenerate"));
    assert!(points(&boundary.path.unwrap()).iter().all(|z| z.im == 0.0 && (0.0..=1.0).contains(&z.re)));
}

#[test]
fn cosine_symbol_on_z32() {
    let dir = tempfile::tempdir().unwrap();
    let w = weights_z32(&[(0, 0.5), (1, 0.25), (31, 0.25)]);
    let r = report(&format!(r#"{{"command":"analyze-measure","group":[32],"measure":{{"weights":{w}}},"seed":1,{SMALL_FAMILY}}}"#));
    let locus = points(&export_plot_data(&r, PlotSeries::Locus, dir.path()).unwrap().path.unwrap());
    assert_eq!(locus.len(), 32);
    for (k, z) in locus.iter().enumerate() {
        let expected = (1.0 + (std::f64::consts::TAU * k as f64 / 32.0).cos()) / 2.0;
        assert!((z.re - expected).abs() < 1e-15 && z.im == 0.0);
    }
    let boundary = export_plot_data(&r, PlotSeries::Boundary, dir.path()).unwrap();
    assert!(boundary.note.is_some());
}

#[test]
fn lazy_shift_locus_inside_minimal_boundary() {
    let dir = tempfile::tempdir().unwrap();
    let w = weights_z32(&[(0, 0.5), (1, 0.5)]);
    let r = report(&format!(r#"{{"command":"analyze-measure","group":[32],"measure":{{"weights":{w}}},"seed":1,{SMALL_FAMILY}}}"#));
    let rittkit::report::Results::AnalyzeMeasure(a) = &r.results else { panic!() };
    let gamma = a.angle.gamma_star.unwrap();
    assert!(gamma > 0.0 && gamma < FRAC_PI_2);
    let locus = points(&export_plot_data(&r, PlotSeries::Locus, dir.path()).unwrap().path.unwrap());
    assert!(locus.iter().all(|&z| stolz_contains(gamma + 1e-12, z).unwrap()));
    assert!(locus.iter().any(|&z| !stolz_contains(gamma - 1e-6, z).unwrap()));
    let boundary = export_plot_data(&r, PlotSeries::Boundary, dir.path()).unwrap();
    assert!(boundary.note.is_none());
    let poly = points(&boundary.path.unwrap());
    assert_eq!(poly.len(), 512);
    assert!(poly.iter().all(|&z| stolz_contains(gamma, z * (1.0 - 1e-9)).unwrap()));
}

#[test]
fn shift_has_no_boundary() {
    let dir = tempfile::tempdir().unwrap();
    let r = report(r#"{"command":"analyze-measure","group":[4],"measure":{"weights":[0,1,0,0]},"seed":1}"#);
    let locus = points(&export_plot_data(&r, PlotSeries::Locus, dir.path()).unwrap().path.unwrap());
    assert!(locus.iter().all(|z| (z.norm() - 1.0).abs() < 1e-15));
    let boundary = export_plot_data(&r, PlotSeries::Boundary, dir.path()).unwrap();
    assert!(boundary.path.is_none() && boundary.note.is_some());
    assert!(!dir.path().join("boundary.csv").exists());
    let profile = fs::read_to_string(export_plot_data(&r, PlotSeries::Profile, dir.path()).unwrap().path.unwrap()).unwrap();
    assert!(profile.starts_with("n,value\n1,2.0\n2,4.0\n"));
}

#[test]
fn missing_series_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let r = report(r#"{"command":"transference","group":[8],"trials":2,"max_dim":2,"seed":3}"#);
    let err = export_plot_data(&r, PlotSeries::Profile, dir.path()).unwrap_err();
    assert!(matches!(&err, Error::MissingSeries(s) if s.contains("Profile") && s.contains("transference")));
}
