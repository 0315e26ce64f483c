//! Read a CSV against a schema, report completion and apply the completion filter.
//!
//! ```text
//! cargo run --example ingest_and_filter
//! ```

use undersample_ensemble::data::{completion_stats, filter_by_completion, ingest_reader, IngestOptions, Schema};

const SCHEMA: &str = "\
id,drop
age,num
smoker,cat
bmi,num
notes,drop
asthma,outcome
";

const CSV: &str = "\
id,age,smoker,bmi,notes,asthma
1,34,no,22.5,,0
2,NA,yes,,free text,1
3,51,no,27.1,,0
4,47,,NA,,0
5,29,yes,24.0,x,1
6,,no,,,0
";

fn main() -> undersample_ensemble::Result<()> {
    let schema = Schema::parse(SCHEMA)?;
    let data = ingest_reader(CSV.as_bytes(), &schema, &IngestOptions::default())?;
    println!(
        "{} rows, {} features, {} positive",
        data.n_rows(),
        data.n_features(),
        data.n_positive()
    );
    for c in data.columns() {
        println!("  {:<8} {:?} {:?}", c.name, c.kind, c.categories);
    }

    let stats = completion_stats(&data);
    println!("missing rate per feature: {:?}", stats.per_feature_missing_rate);
    println!("missing rate per row:     {:?}", stats.per_row_missing_rate);

    for p in [0.5, 0.7] {
        let kept = filter_by_completion(&data, p)?;
        let names: Vec<&str> = kept.columns().iter().map(|c| c.name.as_str()).collect();
        println!("p = {p}: {} rows, features {names:?}", kept.n_rows());
    }
    Ok(())
}
