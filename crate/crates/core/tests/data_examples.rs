use rmtnet::data::{apply_discretizer, fit_discretizer, group_summary, read_csv, Dataset, RawTable, Split, SplitMode};

fn column(values: &[f64]) -> RawTable {
    let rows: Vec<Vec<f64>> = values.iter().map(|&v| vec![v]).collect();
    RawTable::from_rows(vec!["x".into()], &rows).unwrap()
}

/// Linear-interpolation quantile written out from its definition.
fn interpolated_quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[test]
fn quartile_edges_of_one_to_hundred() {
    let values: Vec<f64> = (1..=100).map(f64::from).collect();
    let map = fit_discretizer(&column(&values), 4).unwrap();
    let expected: Vec<f64> = [0.25, 0.5, 0.75]
        .iter()
        .map(|&q| interpolated_quantile(&values, q))
        .collect();
    assert_eq!(expected, vec![25.75, 50.5, 75.25]);
    for (a, b) in map.edges(0).iter().zip(&expected) {
        assert!((a - b).abs() < 1e-12);
    }

    let probe = column(&[60.0, -5.0, 500.0, 25.75, 25.8]);
    let bins = apply_discretizer(&probe, &map).unwrap();
    let got: Vec<u32> = (0..5).map(|i| bins.row(i)[0]).collect();
    // a bin index counts the edges strictly below the value
    assert_eq!(got, vec![2, 0, 3, 0, 1]);
}

#[test]
fn two_points_give_one_separating_edge() {
    let map = fit_discretizer(&column(&[1.0, 2.0]), 2).unwrap();
    let edges = map.edges(0);
    assert_eq!(edges.len(), 1);
    assert!(edges[0] >= 1.0 && edges[0] < 2.0);
    let bins = apply_discretizer(&column(&[1.0, 2.0]), &map).unwrap();
    assert_eq!((bins.row(0)[0], bins.row(1)[0]), (0, 1));
}

#[test]
fn ties_collapse_edges_and_binning_is_idempotent() {
    let values = [1.0, 1.0, 1.0, 1.0, 2.0, 3.0, 3.0, 3.0];
    let table = column(&values);
    let map = fit_discretizer(&table, 8).unwrap();
    let edges = map.edges(0);
    assert!(edges.windows(2).all(|w| w[0] < w[1]));
    let once = apply_discretizer(&table, &map).unwrap();
    let as_values: Vec<f64> = (0..values.len()).map(|i| f64::from(once.row(i)[0])).collect();
    let rebinned = fit_discretizer(&column(&as_values), 8).unwrap();
    let twice = apply_discretizer(&column(&as_values), &rebinned).unwrap();
    for i in 0..values.len() {
        assert_eq!(once.row(i), twice.row(i));
    }
}

#[test]
fn group_means_by_rejection() {
    let rows = vec![vec![700.0, 1.0], vec![680.0, 3.0], vec![640.0, 2.0], vec![655.0, 6.0]];
    let table = RawTable::from_rows(vec!["fico".into(), "dti".into()], &rows)
        .unwrap()
        .with_r(vec![0, 0, 1, 1])
        .unwrap();
    let s = group_summary(&table, &["fico".to_string(), "dti".to_string()]).unwrap();
    assert_eq!(s.approved_means, vec![Some(690.0), Some(2.0)]);
    assert_eq!(s.rejected_means, vec![Some(647.5), Some(4.0)]);

    let approved_only = table.clone().with_r(vec![0, 0, 0, 0]).unwrap();
    let s = group_summary(&approved_only, &[]).unwrap();
    assert_eq!(s.rejected_means, vec![None, None]);
    assert_eq!(s.rejected_count, 0);
}

#[test]
fn csv_rows_with_missing_features_are_dropped() {
    let text = "x1,x2,y,r\n1.0,2.0,0,0\nNA,3.0,1,0\n2.5,4.0,,1\n3.5,,1,1\n";
    let table = read_csv(text.as_bytes(), None).unwrap();
    assert_eq!(table.n_rows(), 2);
    assert_eq!(table.dropped_rows, 2);
    assert_eq!(table.y.as_ref().unwrap(), &vec![Some(0), None]);
    assert_eq!(table.r.as_ref().unwrap(), &vec![0, 1]);
}

#[test]
fn dataset_csv_round_trip_keeps_hidden_outcomes_apart() {
    let rows: Vec<Vec<f64>> = (0..40).map(|i| vec![f64::from(i), f64::from(i % 7)]).collect();
    let table = RawTable::from_rows(vec!["a".into(), "b".into()], &rows)
        .unwrap()
        .with_y((0..40).map(|i| Some(u8::from(i % 3 == 0))).collect())
        .unwrap()
        .with_r((0..40).map(|i| u8::from(i >= 10)).collect())
        .unwrap();
    let map = fit_discretizer(&table, 4).unwrap();
    let d = Dataset::from_raw(&table, &map)
        .unwrap()
        .assign_splits(1, SplitMode::ApprovalRejection)
        .unwrap();
    for i in d.rejected_rows() {
        assert_eq!(d.observed_default(i), None);
        assert!(d.evaluation_label(i).is_some());
        assert_eq!(d.split(i), Split::Test);
    }
    let mut bytes = Vec::new();
    d.write_csv(&mut bytes).unwrap();
    let back = Dataset::read_csv(bytes.as_slice(), d.cardinalities().to_vec()).unwrap();
    assert_eq!(back, d);
}

#[test]
fn too_few_approved_rows_cannot_be_split() {
    let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![f64::from(i)]).collect();
    let table = RawTable::from_rows(vec!["a".into()], &rows)
        .unwrap()
        .with_r((0..10).map(|i| u8::from(i >= 4)).collect())
        .unwrap()
        .with_y(vec![Some(0); 10])
        .unwrap();
    let map = fit_discretizer(&table, 2).unwrap();
    let d = Dataset::from_raw(&table, &map).unwrap();
    assert!(d.assign_splits(0, SplitMode::ApprovalRejection).is_err());
}
