mod common;

use qhe_core::optimize::{
    max_work_temperature, maximize_work_at_efficiency, maximize_work_global, DEFAULT_REL_TOL,
};
use qhe_core::sweep::{compute_sweep, render_csv, render_json, run_sweep, CSV_HEADER};
use qhe_core::{BathPair, OutputFormat, SweepConfig};

use common::{relative_diff, work_oracle};

fn figure_baths() -> BathPair {
    BathPair::new(9.0, 1.0).unwrap()
}

#[test]
fn fixed_ratio_optimum_matches_dense_grid() {
    let baths = figure_baths();
    for nu in [0.2, 1.0 / 3.0, 0.6] {
        let n = 1_000_000;
        let top = 50.0 * baths.t_hot();
        let (mut best_a1, mut best_w) = (0.0, f64::INFINITY);
        for k in 1..=n {
            let a1 = top * k as f64 / n as f64;
            let w = work_oracle(a1, nu * a1, &baths);
            if w < best_w {
                best_w = w;
                best_a1 = a1;
            }
        }
        let opt = maximize_work_at_efficiency(&baths, nu, DEFAULT_REL_TOL).unwrap();
        assert!(opt.converged);
        assert!(
            relative_diff(opt.a1_star, best_a1) < 5e-4,
            "nu = {nu}: {} vs {best_a1}",
            opt.a1_star
        );
        assert!(
            relative_diff(opt.work_star, best_w) < 5e-5,
            "nu = {nu}: {} vs {best_w}",
            opt.work_star
        );
        assert!(opt.work_star <= best_w + 1e-15);
    }
}

#[test]
fn global_optimum_beats_coarse_grid() {
    let baths = figure_baths();
    let g = maximize_work_global(&baths, DEFAULT_REL_TOL).unwrap();
    for i in 1..400 {
        let nu = baths.theta() + (1.0 - baths.theta()) * i as f64 / 400.0;
        for j in 1..400 {
            let a1 = 60.0 * j as f64 / 400.0;
            assert!(work_oracle(a1, nu * a1, &baths) >= g.work_star - 1e-12);
        }
    }
    assert!((g.a1_star - 13.988).abs() < 1e-3);
    assert!((g.nu_star - 0.29326).abs() < 1e-5);
    assert!((g.work_star + 1.56403).abs() < 1e-5);
}

#[test]
fn sweep_row_near_coincidence_efficiency_is_near_three() {
    let dir = tempfile::tempdir().unwrap();
    let config = SweepConfig::with_defaults(9.0, 1.0, dir.path().join("s.csv"));
    let rows = compute_sweep(&config, true).unwrap();
    let row = rows
        .iter()
        .min_by(|a, b| {
            (a.eta - 2.0 / 3.0)
                .abs()
                .total_cmp(&(b.eta - 2.0 / 3.0).abs())
        })
        .unwrap();
    for t in [
        row.t1_prime,
        row.t2_prime,
        row.t_effective,
        row.t_spectral,
        row.t_contact,
    ] {
        assert!((t - 3.0).abs() < 0.02, "{row:?}");
    }
    let exact = max_work_temperature(&figure_baths(), 2.0 / 3.0).unwrap();
    assert!((exact - 3.0).abs() < 1e-9);
}

#[test]
fn csv_parses_back_to_the_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let config = SweepConfig {
        steps: 40,
        ..SweepConfig::with_defaults(4.0, 1.0, &path)
    };
    let rows = run_sweep(&config, false).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text, render_csv(&rows));
    assert!(!text.contains('\r'));

    let mut reader = csv::Reader::from_path(&path).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header.join(","), CSV_HEADER);
    let parsed: Vec<Vec<f64>> = reader
        .records()
        .map(|r| r.unwrap().iter().map(|f| f.parse().unwrap()).collect())
        .collect();
    assert_eq!(parsed.len(), rows.len());
    for (record, row) in parsed.iter().zip(&rows) {
        for (got, want) in record.iter().zip(row.values()) {
            assert!(relative_diff(*got, want) < 1e-11, "{got} vs {want}");
        }
    }
    let etas: Vec<f64> = parsed.iter().map(|r| r[0]).collect();
    assert!(etas.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(*etas.last().unwrap(), config.eta_hi);
}

#[test]
fn json_output_has_config_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.json");
    let config = SweepConfig {
        steps: 5,
        format: OutputFormat::Json,
        ..SweepConfig::with_defaults(9.0, 1.0, &path)
    };
    let rows = run_sweep(&config, false).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text, render_json(&config, &rows).unwrap());
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["config"]["t1"], 9.0);
    assert_eq!(doc["config"]["t2"], 1.0);
    assert_eq!(doc["config"]["steps"], 5);
    let out = doc["rows"].as_array().unwrap();
    assert_eq!(out.len(), 5);
    for key in CSV_HEADER.split(',') {
        assert!(out[0][key].is_f64(), "missing {key}");
    }
}

#[test]
fn failed_write_leaves_no_partial_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("sweep.csv");
    let config = SweepConfig {
        steps: 3,
        ..SweepConfig::with_defaults(9.0, 1.0, &path)
    };
    let err = run_sweep(&config, false).unwrap_err();
    assert!(err.is_io());
    assert!(!path.exists());
}

#[test]
fn sweep_rejects_grid_past_carnot() {
    let config = SweepConfig {
        eta_hi: 0.9,
        ..SweepConfig::with_defaults(9.0, 1.0, "unused.csv")
    };
    let err = compute_sweep(&config, false).unwrap_err();
    assert!(err.is_invalid_input());
    assert!(err.to_string().contains("Carnot"));
}
