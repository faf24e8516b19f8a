use kmsketch::bench::BenchRecord;
use kmsketch::plot::{emit_plot, render_svg, series, Metric};

fn rec(method: &str, r: usize, trial: usize, y: f64) -> BenchRecord {
    BenchRecord {
        method: method.into(),
        r,
        trial,
        seed: 0,
        reduce_ms: y,
        cluster_ms: 2.0 * y,
        objective: 10.0 * y,
        normalized_objective: y,
        accuracy: Some(y / 10.0),
    }
}

#[test]
fn single_point_renders() {
    let svg = render_svg(&[rec("rp", 5, 0, 0.3)], Metric::Objective).unwrap();
    assert!(svg.starts_with("<?xml"));
    assert!(svg.contains(r#"version="1.1""#));
    assert!(svg.trim_end().ends_with("</svg>"));
    assert_eq!(svg.matches(r#"class="series""#).count(), 1);
}

#[test]
fn means_over_trials() {
    let records = [rec("rp", 5, 0, 1.0), rec("rp", 5, 1, 2.0), rec("rp", 5, 2, 6.0), rec("rp", 10, 0, 4.0)];
    let s = series(&records, Metric::Objective);
    assert_eq!(s.len(), 1);
    assert_eq!(s[0].points, vec![(5, 3.0), (10, 4.0)]);
    let t = series(&records, Metric::Time);
    assert_eq!(t[0].points, vec![(5, 9.0), (10, 12.0)]);
    let a = series(&records, Metric::Accuracy);
    assert!((a[0].points[0].1 - 0.3).abs() < 1e-15);
}

#[test]
fn one_series_per_method() {
    let mut records = Vec::new();
    for (i, m) in ["rp", "svd", "sampl-svd", "kmeans"].iter().enumerate() {
        for r in [5, 10] {
            records.push(rec(m, r, 0, 0.1 * (i + 1) as f64));
        }
    }
    let svg = render_svg(&records, Metric::Time).unwrap();
    assert_eq!(svg.matches(r#"class="series""#).count(), 4);
    assert_eq!(series(&records, Metric::Time).len(), 4);
}

#[test]
fn errors() {
    assert!("speed".parse::<Metric>().is_err());
    assert_eq!("accuracy".parse::<Metric>().unwrap(), Metric::Accuracy);
    assert!(render_svg(&[], Metric::Time).is_err());
    let mut unlabeled = rec("rp", 5, 0, 1.0);
    unlabeled.accuracy = None;
    assert!(render_svg(&[unlabeled], Metric::Accuracy).is_err());
}

#[test]
fn writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.svg");
    emit_plot(&[rec("rp", 5, 0, 1.0), rec("rp", 10, 0, 2.0)], Metric::Accuracy, &path).unwrap();
    assert!(std::fs::read_to_string(&path).unwrap().contains("<polyline"));
}
