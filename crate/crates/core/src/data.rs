//! Typed tabular container with an explicit missing-value mask.
//!
//! A [`Dataset`] holds feature columns that are either numerical or
//! categorical, plus a binary outcome that is never missing. Cells are stored
//! row-major as `Option<f64>`; categorical cells hold their dense category id.

use std::collections::HashMap;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Token written for missing cells by [`write_csv`].
pub const MISSING_TOKEN: &str = "NA";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ColumnKind {
    Numerical,
    Categorical,
}

/// One feature column. `categories[id]` is the label of category `id`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub categories: Vec<String>,
}

impl Column {
    pub fn numerical(name: impl Into<String>) -> Self {
        Column {
            name: name.into(),
            kind: ColumnKind::Numerical,
            categories: Vec::new(),
        }
    }

    pub fn categorical<S: Into<String>>(name: impl Into<String>, categories: impl IntoIterator<Item = S>) -> Self {
        Column {
            name: name.into(),
            kind: ColumnKind::Categorical,
            categories: categories.into_iter().map(Into::into).collect(),
        }
    }

    pub fn n_categories(&self) -> usize {
        self.categories.len()
    }

    pub fn is_categorical(&self) -> bool {
        self.kind == ColumnKind::Categorical
    }
}

/// Column-typed table with missing cells and a binary outcome (1 = positive).
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    columns: Vec<Column>,
    cells: Vec<Option<f64>>,
    outcome: Vec<u8>,
    outcome_name: String,
}

impl Dataset {
    /// Build a dataset from row-major cells, validating every invariant.
    pub fn new(
        columns: Vec<Column>,
        cells: Vec<Option<f64>>,
        outcome: Vec<u8>,
        outcome_name: impl Into<String>,
    ) -> Result<Self> {
        let n_rows = outcome.len();
        if n_rows == 0 {
            return Err(Error::Degenerate("dataset has no rows".into()));
        }
        if cells.len() != n_rows * columns.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} cells for {} rows x {} columns",
                cells.len(),
                n_rows,
                columns.len()
            )));
        }
        if let Some(bad) = outcome.iter().find(|&&y| y > 1) {
            return Err(Error::InvalidArgument(format!("outcome must be 0 or 1, found {bad}")));
        }
        let n_cols = columns.len();
        for (i, cell) in cells.iter().enumerate() {
            let col = &columns[i % n_cols];
            if let Some(v) = cell {
                if !v.is_finite() {
                    return Err(Error::InvalidArgument(format!(
                        "non-finite value in column '{}'",
                        col.name
                    )));
                }
                if col.is_categorical() && (v.fract() != 0.0 || *v < 0.0 || *v as usize >= col.n_categories()) {
                    return Err(Error::InvalidArgument(format!(
                        "category id {v} out of range for column '{}' with {} categories",
                        col.name,
                        col.n_categories()
                    )));
                }
            }
        }
        Ok(Dataset {
            columns,
            cells,
            outcome,
            outcome_name: outcome_name.into(),
        })
    }

    pub fn n_rows(&self) -> usize {
        self.outcome.len()
    }

    pub fn n_features(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, c: usize) -> &Column {
        &self.columns[c]
    }

    pub fn outcome(&self) -> &[u8] {
        &self.outcome
    }

    pub fn outcome_name(&self) -> &str {
        &self.outcome_name
    }

    pub fn cells(&self) -> &[Option<f64>] {
        &self.cells
    }

    pub fn get(&self, row: usize, col: usize) -> Option<f64> {
        self.cells[row * self.columns.len() + col]
    }

    pub fn row(&self, row: usize) -> &[Option<f64>] {
        let f = self.columns.len();
        &self.cells[row * f..(row + 1) * f]
    }

    pub fn column_values(&self, col: usize) -> impl Iterator<Item = Option<f64>> + '_ {
        let f = self.columns.len();
        (0..self.n_rows()).map(move |r| self.cells[r * f + col])
    }

    pub fn n_missing(&self) -> usize {
        self.cells.iter().filter(|c| c.is_none()).count()
    }

    pub fn is_complete(&self) -> bool {
        self.cells.iter().all(Option::is_some)
    }

    pub fn n_positive(&self) -> usize {
        self.outcome.iter().filter(|&&y| y == 1).count()
    }

    /// Copy with the same columns and outcome but new cells.
    pub fn with_cells(&self, cells: Vec<Option<f64>>) -> Result<Self> {
        Dataset::new(
            self.columns.clone(),
            cells,
            self.outcome.clone(),
            self.outcome_name.clone(),
        )
    }

    /// Restrict to the given rows and feature columns, in the given order.
    pub fn subset(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        let mut cells = Vec::with_capacity(rows.len() * cols.len());
        for &r in rows {
            let row = self.row(r);
            cells.extend(cols.iter().map(|&c| row[c]));
        }
        Dataset::new(
            cols.iter().map(|&c| self.columns[c].clone()).collect(),
            cells,
            rows.iter().map(|&r| self.outcome[r]).collect(),
            self.outcome_name.clone(),
        )
    }

    /// Dense feature matrix; fails if any cell is missing.
    pub fn to_matrix(&self) -> Result<Matrix> {
        let data = self
            .cells
            .iter()
            .enumerate()
            .map(|(i, c)| {
                c.ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "dataset is incomplete: row {} column '{}' is missing",
                        i / self.n_features(),
                        self.columns[i % self.n_features()].name
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Matrix::new(self.n_rows(), self.n_features(), data))
    }
}

/// Dense row-major matrix of complete feature values.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n_rows: usize,
    n_cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(n_rows: usize, n_cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n_rows * n_cols, "matrix data length");
        Matrix { n_rows, n_cols, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n_cols = rows.first().map_or(0, Vec::len);
        let data: Vec<f64> = rows.iter().flatten().copied().collect();
        Matrix::new(rows.len(), n_cols, data)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.n_cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.n_cols..(row + 1) * self.n_cols]
    }

    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for &r in rows {
            let row = self.row(r);
            data.extend(cols.iter().map(|&c| row[c]));
        }
        Matrix::new(rows.len(), cols.len(), data)
    }

    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(rows.len() * self.n_cols);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        Matrix::new(rows.len(), self.n_cols, data)
    }

    pub fn select_cols(&self, cols: &[usize]) -> Matrix {
        let rows: Vec<usize> = (0..self.n_rows).collect();
        self.select(&rows, cols)
    }
}

/// Per-feature and per-row missing fractions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionStats {
    pub per_feature_missing_rate: Vec<f64>,
    pub per_row_missing_rate: Vec<f64>,
}

pub fn completion_stats(d: &Dataset) -> CompletionStats {
    let (n, f) = (d.n_rows(), d.n_features());
    let mut col_missing = vec![0usize; f];
    let mut row_missing = vec![0usize; n];
    for (r, missing) in row_missing.iter_mut().enumerate() {
        for (c, cell) in d.row(r).iter().enumerate() {
            if cell.is_none() {
                col_missing[c] += 1;
                *missing += 1;
            }
        }
    }
    CompletionStats {
        per_feature_missing_rate: col_missing.iter().map(|&m| m as f64 / n as f64).collect(),
        per_row_missing_rate: row_missing
            .iter()
            .map(|&m| if f == 0 { 0.0 } else { m as f64 / f as f64 })
            .collect(),
    }
}

/// Drop features, then rows, whose completion rate is below `p`.
///
/// One pass each: columns are judged over all rows, rows over the surviving
/// columns. The input is left untouched.
pub fn filter_by_completion(d: &Dataset, p: f64) -> Result<Dataset> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "completion threshold {p} outside [0, 1]"
        )));
    }
    let (n, f) = (d.n_rows(), d.n_features());
    let mut present = vec![0usize; f];
    for r in 0..n {
        for (c, cell) in d.row(r).iter().enumerate() {
            if cell.is_some() {
                present[c] += 1;
            }
        }
    }
    let cols: Vec<usize> = (0..f).filter(|&c| present[c] as f64 / n as f64 >= p).collect();
    if cols.is_empty() {
        return Err(Error::Degenerate(format!(
            "no feature column reaches completion rate {p}"
        )));
    }
    let rows: Vec<usize> = (0..n)
        .filter(|&r| {
            let row = d.row(r);
            let kept = cols.iter().filter(|&&c| row[c].is_some()).count();
            kept as f64 / cols.len() as f64 >= p
        })
        .collect();
    if rows.is_empty() {
        return Err(Error::Degenerate(format!("no row reaches completion rate {p}")));
    }
    d.subset(&rows, &cols)
}

/// Normalized, one-hot encoded view used by the similarity imputer.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedMatrix {
    pub n_rows: usize,
    pub n_cols: usize,
    /// Row-major; `None` where the source cell is missing.
    pub values: Vec<Option<f64>>,
    /// `source[j]` is the dataset feature that derived column `j` came from.
    pub source: Vec<usize>,
}

impl EncodedMatrix {
    pub fn row(&self, r: usize) -> &[Option<f64>] {
        &self.values[r * self.n_cols..(r + 1) * self.n_cols]
    }
}

/// Min-max normalize numerical columns and one-hot expand categorical ones.
///
/// Constant numerical columns map to 0.0. A missing source cell is missing in
/// every derived column.
pub fn encode_for_similarity(d: &Dataset) -> EncodedMatrix {
    enum Plan {
        Num { min: f64, range: f64 },
        Cat { width: usize },
    }
    let plans: Vec<Plan> = d
        .columns()
        .iter()
        .enumerate()
        .map(|(c, col)| match col.kind {
            ColumnKind::Numerical => {
                let (min, max) = d
                    .column_values(c)
                    .flatten()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
                Plan::Num { min, range: max - min }
            }
            ColumnKind::Categorical => Plan::Cat {
                width: col.n_categories(),
            },
        })
        .collect();
    let mut source = Vec::new();
    for (c, plan) in plans.iter().enumerate() {
        let width = match plan {
            Plan::Num { .. } => 1,
            Plan::Cat { width } => *width,
        };
        source.extend(std::iter::repeat_n(c, width));
    }
    let n_cols = source.len();
    let mut values = Vec::with_capacity(d.n_rows() * n_cols);
    for r in 0..d.n_rows() {
        for (cell, plan) in d.row(r).iter().zip(&plans) {
            match (plan, cell) {
                (Plan::Num { .. }, None) => values.push(None),
                (Plan::Num { min, range }, Some(v)) => {
                    let scaled = if *range > 0.0 { (v - min) / range } else { 0.0 };
                    values.push(Some(scaled));
                }
                (Plan::Cat { width }, None) => values.extend(std::iter::repeat_n(None, *width)),
                (Plan::Cat { width }, Some(id)) => {
                    let id = *id as usize;
                    values.extend((0..*width).map(|k| Some(if k == id { 1.0 } else { 0.0 })));
                }
            }
        }
    }
    EncodedMatrix {
        n_rows: d.n_rows(),
        n_cols,
        values,
        source,
    }
}

/// Declared role of a CSV column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemaKind {
    Num,
    Cat,
    Outcome,
    Drop,
}

impl std::str::FromStr for SchemaKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "num" => Ok(SchemaKind::Num),
            "cat" => Ok(SchemaKind::Cat),
            "outcome" => Ok(SchemaKind::Outcome),
            "drop" => Ok(SchemaKind::Drop),
            other => Err(Error::Schema(format!(
                "unknown column kind '{other}' (expected num, cat, outcome or drop)"
            ))),
        }
    }
}

impl SchemaKind {
    fn as_str(self) -> &'static str {
        match self {
            SchemaKind::Num => "num",
            SchemaKind::Cat => "cat",
            SchemaKind::Outcome => "outcome",
            SchemaKind::Drop => "drop",
        }
    }
}

/// Column declarations, one `name,kind` line per column.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Schema {
    pub entries: Vec<(String, SchemaKind)>,
}

impl Schema {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (name, kind) = line
                .rsplit_once(',')
                .ok_or_else(|| Error::Schema(format!("line {}: expected 'name,kind', got '{line}'", i + 1)))?;
            let name = name.trim().to_string();
            if entries.iter().any(|(n, _): &(String, SchemaKind)| *n == name) {
                return Err(Error::Schema(format!("column '{name}' declared twice")));
            }
            entries.push((name, kind.parse()?));
        }
        let outcomes = entries.iter().filter(|(_, k)| *k == SchemaKind::Outcome).count();
        if outcomes != 1 {
            return Err(Error::Schema(format!(
                "schema must declare exactly one outcome column, found {outcomes}"
            )));
        }
        Ok(Schema { entries })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Schema::parse(&text)
    }

    /// Schema describing `d` as written by [`write_csv`].
    pub fn for_dataset(d: &Dataset) -> Self {
        let mut entries: Vec<(String, SchemaKind)> = d
            .columns()
            .iter()
            .map(|c| {
                let kind = match c.kind {
                    ColumnKind::Numerical => SchemaKind::Num,
                    ColumnKind::Categorical => SchemaKind::Cat,
                };
                (c.name.clone(), kind)
            })
            .collect();
        entries.push((d.outcome_name().to_string(), SchemaKind::Outcome));
        Schema { entries }
    }

    pub fn outcome_column(&self) -> &str {
        self.entries
            .iter()
            .find(|(_, k)| *k == SchemaKind::Outcome)
            .map(|(n, _)| n.as_str())
            .expect("validated schema has an outcome column")
    }

    fn kind_of(&self, name: &str) -> Option<SchemaKind> {
        self.entries.iter().find(|(n, _)| n == name).map(|(_, k)| *k)
    }

    pub fn to_text(&self) -> String {
        self.entries
            .iter()
            .map(|(n, k)| format!("{n},{}\n", k.as_str()))
            .collect()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IngestOptions {
    /// Outcome value that marks the positive (minority) class.
    pub positive_label: String,
    /// Cell contents treated as missing, compared after trimming.
    pub missing_tokens: Vec<String>,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            positive_label: "1".into(),
            missing_tokens: vec![String::new(), MISSING_TOKEN.into()],
        }
    }
}

pub fn ingest_csv(path: impl AsRef<Path>, schema: &Schema, opts: &IngestOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    ingest_reader(file, schema, opts)
}

/// Parse a headed CSV according to `schema`.
///
/// Rows in error messages are 1-based data rows (the header is not counted).
pub fn ingest_reader<R: Read>(reader: R, schema: &Schema, opts: &IngestOptions) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();

    for (name, _) in &schema.entries {
        if !header.iter().any(|h| h == name) {
            return Err(Error::Schema(format!(
                "schema column '{name}' is not present in the CSV header"
            )));
        }
    }
    let mut kinds = Vec::with_capacity(header.len());
    for h in &header {
        kinds.push(
            schema
                .kind_of(h)
                .ok_or_else(|| Error::Schema(format!("CSV column '{h}' is not declared in the schema")))?,
        );
    }

    let outcome_idx = kinds
        .iter()
        .position(|k| *k == SchemaKind::Outcome)
        .expect("schema validated");
    let feature_idx: Vec<usize> = kinds
        .iter()
        .enumerate()
        .filter(|(_, k)| matches!(k, SchemaKind::Num | SchemaKind::Cat))
        .map(|(i, _)| i)
        .collect();

    let mut columns: Vec<Column> = feature_idx
        .iter()
        .map(|&i| match kinds[i] {
            SchemaKind::Num => Column::numerical(header[i].clone()),
            _ => Column::categorical(header[i].clone(), Vec::<String>::new()),
        })
        .collect();
    let mut lookups: Vec<HashMap<String, usize>> = vec![HashMap::new(); columns.len()];

    let is_missing = |s: &str| opts.missing_tokens.iter().any(|t| t == s);
    let mut cells = Vec::new();
    let mut outcome = Vec::new();
    for (r, record) in rdr.records().enumerate() {
        let record = record?;
        let row = r + 1;
        if record.len() != header.len() {
            return Err(Error::Ingest {
                row,
                column: String::new(),
                message: format!("expected {} fields, found {}", header.len(), record.len()),
            });
        }
        let y = record[outcome_idx].trim();
        if is_missing(y) {
            return Err(Error::Ingest {
                row,
                column: header[outcome_idx].clone(),
                message: "outcome is missing".into(),
            });
        }
        outcome.push(u8::from(y == opts.positive_label));

        for (slot, &i) in feature_idx.iter().enumerate() {
            let raw = record[i].trim();
            if is_missing(raw) {
                cells.push(None);
                continue;
            }
            let col = &mut columns[slot];
            match col.kind {
                ColumnKind::Numerical => {
                    let v: f64 = raw.parse().map_err(|_| Error::Ingest {
                        row,
                        column: col.name.clone(),
                        message: format!("'{raw}' is not a number"),
                    })?;
                    if !v.is_finite() {
                        return Err(Error::Ingest {
                            row,
                            column: col.name.clone(),
                            message: format!("'{raw}' is not finite"),
                        });
                    }
                    cells.push(Some(v));
                }
                ColumnKind::Categorical => {
                    let lookup = &mut lookups[slot];
                    let id = match lookup.get(raw) {
                        Some(&id) => id,
                        None => {
                            let id = col.categories.len();
                            col.categories.push(raw.to_string());
                            lookup.insert(raw.to_string(), id);
                            id
                        }
                    };
                    cells.push(Some(id as f64));
                }
            }
        }
    }
    if outcome.is_empty() {
        return Err(Error::Degenerate("CSV has no data rows".into()));
    }
    Dataset::new(columns, cells, outcome, header[outcome_idx].clone())
}

/// Write `d` as CSV: categorical cells as labels, missing as `NA`, outcome as 0/1.
pub fn write_csv<W: Write>(d: &Dataset, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<&str> = d.columns().iter().map(|c| c.name.as_str()).collect();
    header.push(d.outcome_name());
    w.write_record(&header)?;
    let mut record = Vec::with_capacity(header.len());
    for r in 0..d.n_rows() {
        record.clear();
        for (cell, col) in d.row(r).iter().zip(d.columns()) {
            record.push(match cell {
                None => MISSING_TOKEN.to_string(),
                Some(v) if col.is_categorical() => col.categories[*v as usize].clone(),
                Some(v) => v.to_string(),
            });
        }
        record.push(d.outcome()[r].to_string());
        w.write_record(&record)?;
    }
    w.flush().map_err(|e| Error::io("<csv writer>", e))?;
    Ok(())
}

pub fn save_csv(d: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(d, std::io::BufWriter::new(file))
}
