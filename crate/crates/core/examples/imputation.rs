//! Mean-based versus similarity-based (kNN) imputation on a small mixed table.

use undersample_ensemble::data::{Column, Dataset};
use undersample_ensemble::impute::{impute, similarity, ImputationMethod};

fn show(label: &str, d: &Dataset) {
    println!("{label}");
    for r in 0..d.n_rows() {
        let cells: Vec<String> = d
            .row(r)
            .iter()
            .map(|c| c.map_or("  NA".into(), |v| format!("{v:4.1}")))
            .collect();
        println!("  {}  y={}", cells.join(" "), d.outcome()[r]);
    }
}

fn main() -> undersample_ensemble::Result<()> {
    let columns = vec![
        Column::numerical("height"),
        Column::numerical("weight"),
        Column::categorical("region", ["north", "south", "east"]),
    ];
    let cells = vec![
        Some(1.6),
        Some(55.0),
        Some(0.0),
        Some(1.7),
        Some(62.0),
        Some(0.0),
        Some(1.9),
        Some(90.0),
        Some(2.0),
        Some(1.8),
        None,
        Some(2.0),
        None,
        Some(58.0),
        None,
        Some(1.65),
        Some(60.0),
        Some(1.0),
    ];
    let data = Dataset::new(columns, cells, vec![0, 0, 1, 1, 0, 0], "y")?;
    show("input", &data);

    let (mean, report) = impute(&data, ImputationMethod::MeanBased)?;
    show("mean-based", &mean);
    println!("fills per feature: {:?}", report.fills);

    let (knn, _) = impute(&data, ImputationMethod::SimilarityBased { k: 2 })?;
    show("similarity-based, k = 2", &knn);

    // similarity is a dot product over co-present entries, divided by their count
    let a = [Some(0.2), None, Some(1.0)];
    let b = [Some(0.5), Some(0.3), Some(1.0)];
    println!("similarity(a, b) = {:.3}", similarity(&a, &b));
    Ok(())
}
