//! Labeled tabular data, normalization into the `[-1, 1]` field range and
//! stratified train/test splitting.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// How raw columns are mapped into `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NormMode {
    /// Column min maps to -1 and max to +1.
    #[default]
    MinMaxSymmetric,
    /// Standardize, clip at three standard deviations, rescale to `[-1, 1]`.
    ZScoreClipped,
}

impl NormMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            NormMode::MinMaxSymmetric => "min-max-symmetric",
            NormMode::ZScoreClipped => "z-score-clipped",
        }
    }
}

impl std::str::FromStr for NormMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min-max-symmetric" => Ok(NormMode::MinMaxSymmetric),
            "z-score-clipped" => Ok(NormMode::ZScoreClipped),
            other => Err(Error::InvalidArgument(format!("unknown normalization mode '{other}'"))),
        }
    }
}

/// Per-column affine transform `(v - shift) / scale`, recorded at fit time so
/// unseen samples get the identical mapping. A zero scale marks a constant
/// column, which maps to exactly 0.
#[derive(Debug, Clone, PartialEq)]
pub struct NormStats {
    pub mode: NormMode,
    pub shift: Vec<f64>,
    pub scale: Vec<f64>,
    /// Clamp transformed values into `[-1, 1]`. Always on for data that feeds
    /// the Hamiltonian; can be switched off to inspect extrapolation.
    pub clamp: bool,
}

impl NormStats {
    /// Fit statistics on the rows of `samples`.
    pub fn fit(samples: &DMatrix<f64>, mode: NormMode) -> Self {
        let d = samples.ncols();
        let mut shift = Vec::with_capacity(d);
        let mut scale = Vec::with_capacity(d);
        for col in samples.column_iter() {
            match mode {
                NormMode::MinMaxSymmetric => {
                    let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
                    let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    shift.push((hi + lo) / 2.0);
                    scale.push((hi - lo) / 2.0);
                }
                NormMode::ZScoreClipped => {
                    let n = col.len() as f64;
                    let mean = col.iter().sum::<f64>() / n;
                    let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
                    shift.push(mean);
                    scale.push(3.0 * var.sqrt());
                }
            }
        }
        NormStats {
            mode,
            shift,
            scale,
            clamp: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.shift.len()
    }

    pub fn apply_value(&self, col: usize, v: f64) -> f64 {
        let scale = self.scale[col];
        if scale == 0.0 {
            return 0.0;
        }
        let z = (v - self.shift[col]) / scale;
        if self.clamp {
            z.clamp(-1.0, 1.0)
        } else {
            z
        }
    }

    pub fn apply(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "sample has {} columns, normalization expects {}",
                row.len(),
                self.dim()
            )));
        }
        Ok(row.iter().enumerate().map(|(j, &v)| self.apply_value(j, v)).collect())
    }

    pub fn apply_matrix(&self, samples: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if samples.ncols() != self.dim() {
            return Err(Error::Dimension(format!(
                "matrix has {} columns, normalization expects {}",
                samples.ncols(),
                self.dim()
            )));
        }
        Ok(DMatrix::from_fn(samples.nrows(), samples.ncols(), |i, j| {
            self.apply_value(j, samples[(i, j)])
        }))
    }
}

/// Rows of samples with an integer class label per row.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub samples: DMatrix<f64>,
    pub labels: Vec<i64>,
    pub column_names: Vec<String>,
    pub norm_stats: Option<NormStats>,
}

impl Dataset {
    pub fn new(samples: DMatrix<f64>, labels: Vec<i64>, column_names: Vec<String>) -> Result<Self> {
        if samples.nrows() == 0 || samples.ncols() == 0 {
            return Err(Error::EmptyDataset);
        }
        if labels.len() != samples.nrows() {
            return Err(Error::Dimension(format!(
                "{} labels for {} rows",
                labels.len(),
                samples.nrows()
            )));
        }
        if !column_names.is_empty() && column_names.len() != samples.ncols() {
            return Err(Error::Dimension(format!(
                "{} column names for {} columns",
                column_names.len(),
                samples.ncols()
            )));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("dataset samples".into()));
        }
        Ok(Dataset {
            samples,
            labels,
            column_names,
            norm_stats: None,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>], labels: Vec<i64>) -> Result<Self> {
        let d = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let samples = DMatrix::from_fn(rows.len(), d, |i, j| rows[i][j]);
        Dataset::new(samples, labels, Vec::new())
    }

    pub fn len(&self) -> usize {
        self.samples.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.samples.ncols()
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.samples.row(i).iter().copied().collect()
    }

    /// Sorted distinct class ids.
    pub fn classes(&self) -> Vec<i64> {
        let mut c = self.labels.clone();
        c.sort_unstable();
        c.dedup();
        c
    }

    /// Row indices grouped by class, classes in ascending order.
    pub fn class_rows(&self) -> BTreeMap<i64, Vec<usize>> {
        let mut map: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (i, &y) in self.labels.iter().enumerate() {
            map.entry(y).or_default().push(i);
        }
        map
    }

    /// New dataset holding the given rows, in order. Normalization stats are
    /// carried over.
    pub fn select(&self, rows: &[usize]) -> Dataset {
        let samples = self.samples.select_rows(rows.iter());
        Dataset {
            samples,
            labels: rows.iter().map(|&i| self.labels[i]).collect(),
            column_names: self.column_names.clone(),
            norm_stats: self.norm_stats.clone(),
        }
    }

    /// Normalize every column into `[-1, 1]`. A dataset that already carries
    /// stats is returned unchanged.
    pub fn normalize(&self, mode: NormMode) -> Dataset {
        if self.norm_stats.is_some() {
            return self.clone();
        }
        let stats = NormStats::fit(&self.samples, mode);
        self.normalize_with(&stats)
    }

    /// Apply previously fitted stats (e.g. from the training split).
    pub fn normalize_with(&self, stats: &NormStats) -> Dataset {
        let samples = DMatrix::from_fn(self.len(), self.dim(), |i, j| {
            stats.apply_value(j, self.samples[(i, j)])
        });
        Dataset {
            samples,
            labels: self.labels.clone(),
            column_names: self.column_names.clone(),
            norm_stats: Some(stats.clone()),
        }
    }
}

/// Which column of the file holds labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    Name(String),
    Index(usize),
}

impl From<&str> for LabelColumn {
    fn from(s: &str) -> Self {
        LabelColumn::Name(s.to_string())
    }
}

/// Read a comma-separated numeric table with one header row.
pub fn load_dataset(path: impl AsRef<Path>, label_column: &LabelColumn) -> Result<Dataset> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_dataset(&text, label_column)
}

pub fn parse_dataset(text: &str, label_column: &LabelColumn) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Parse {
            row: 0,
            column: String::new(),
            message: e.to_string(),
        })?
        .iter()
        .map(str::to_string)
        .collect();
    let label_idx = match label_column {
        LabelColumn::Name(name) => headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingLabelColumn(name.clone()))?,
        LabelColumn::Index(i) if *i < headers.len() => *i,
        LabelColumn::Index(i) => return Err(Error::MissingLabelColumn(i.to_string())),
    };
    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != label_idx)
        .map(|(_, h)| h.clone())
        .collect();
    if feature_names.is_empty() {
        return Err(Error::EmptyDataset);
    }

    let mut values = Vec::new();
    let mut labels = Vec::new();
    for (r, record) in reader.records().enumerate() {
        // Row numbers are 1-based data rows (the header is row 0).
        let row = r + 1;
        let record = record.map_err(|e| Error::Parse {
            row,
            column: String::new(),
            message: e.to_string(),
        })?;
        if record.len() != headers.len() {
            return Err(Error::Parse {
                row,
                column: String::new(),
                message: format!("expected {} fields, found {}", headers.len(), record.len()),
            });
        }
        for (j, cell) in record.iter().enumerate() {
            if j == label_idx {
                labels.push(parse_label(cell).ok_or_else(|| Error::Parse {
                    row,
                    column: headers[j].clone(),
                    message: format!("label '{cell}' is not an integer"),
                })?);
            } else {
                let v: f64 = cell.parse().map_err(|_| Error::Parse {
                    row,
                    column: headers[j].clone(),
                    message: format!("'{cell}' is not a number"),
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse {
                        row,
                        column: headers[j].clone(),
                        message: format!("'{cell}' is not finite"),
                    });
                }
                values.push(v);
            }
        }
    }
    if labels.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let d = feature_names.len();
    let samples = DMatrix::from_row_slice(labels.len(), d, &values);
    Dataset::new(samples, labels, feature_names)
}

fn parse_label(cell: &str) -> Option<i64> {
    if let Ok(v) = cell.parse::<i64>() {
        return Some(v);
    }
    let f: f64 = cell.parse().ok()?;
    (f.fract() == 0.0 && f.is_finite()).then_some(f as i64)
}

/// Write a dataset in the same format `load_dataset` reads.
pub fn write_dataset_csv(ds: &Dataset, label_name: &str) -> String {
    let mut out = String::new();
    let names: Vec<String> = if ds.column_names.is_empty() {
        (0..ds.dim()).map(|j| format!("x{j}")).collect()
    } else {
        ds.column_names.clone()
    };
    out.push_str(&names.join(","));
    out.push(',');
    out.push_str(label_name);
    out.push('\n');
    for i in 0..ds.len() {
        for j in 0..ds.dim() {
            out.push_str(&ds.samples[(i, j)].to_string());
            out.push(',');
        }
        out.push_str(&ds.labels[i].to_string());
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub test_fraction: f64,
    pub seed: u64,
}

/// Result of a stratified split. Row indices refer to the parent dataset.
#[derive(Debug, Clone)]
pub struct Split {
    pub train: Dataset,
    pub test: Dataset,
    pub train_idx: Vec<usize>,
    pub test_idx: Vec<usize>,
    /// Classes with a single sample, kept entirely in train.
    pub warnings: Vec<String>,
}

/// Stratified, seeded train/test split.
pub fn split(ds: &Dataset, spec: &SplitSpec) -> Result<Split> {
    if ds.len() < 2 {
        return Err(Error::InvalidArgument("split needs at least 2 rows".into()));
    }
    if !(spec.test_fraction > 0.0 && spec.test_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "test_fraction must lie in (0, 1), got {}",
            spec.test_fraction
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut train_idx = Vec::new();
    let mut test_idx = Vec::new();
    let mut warnings = Vec::new();
    for (class, mut rows) in ds.class_rows() {
        let nc = rows.len();
        if nc == 1 {
            warnings.push(format!(
                "class {class} has a single sample; it was placed in the training split"
            ));
            train_idx.extend(rows);
            continue;
        }
        rows.shuffle(&mut rng);
        let n_test = ((spec.test_fraction * nc as f64).round() as usize).clamp(1, nc - 1);
        test_idx.extend_from_slice(&rows[..n_test]);
        train_idx.extend_from_slice(&rows[n_test..]);
    }
    train_idx.sort_unstable();
    test_idx.sort_unstable();
    Ok(Split {
        train: ds.select(&train_idx),
        test: ds.select(&test_idx),
        train_idx,
        test_idx,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn col_dataset(values: &[f64]) -> Dataset {
        let rows: Vec<Vec<f64>> = values.iter().map(|&v| vec![v]).collect();
        Dataset::from_rows(&rows, vec![0; values.len()]).unwrap()
    }

    #[test]
    fn loads_small_table() {
        let text = "a,b,label\n1,2,0\n3,4,0\n5,6,1\n7,8,1\n";
        let ds = parse_dataset(text, &"label".into()).unwrap();
        assert_eq!(ds.len(), 4);
        assert_eq!(ds.dim(), 2);
        assert_eq!(ds.classes(), vec![0, 1]);
        assert_eq!(ds.row(2), vec![5.0, 6.0]);
        assert!(ds.norm_stats.is_none());
    }

    #[test]
    fn label_column_by_index() {
        let text = "y,a\n1,0.5\n0,0.25\n";
        let ds = parse_dataset(text, &LabelColumn::Index(0)).unwrap();
        assert_eq!(ds.labels, vec![1, 0]);
        assert_eq!(ds.column_names, vec!["a".to_string()]);
    }

    #[test]
    fn non_numeric_cell_names_row_and_column() {
        let text = "a,b,label\n1,2,0\n3,oops,1\n";
        match parse_dataset(text, &"label".into()) {
            Err(Error::Parse { row, column, .. }) => {
                assert_eq!(row, 2);
                assert_eq!(column, "b");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn single_row_is_valid() {
        let ds = parse_dataset("a,label\n3.5,2\n", &"label".into()).unwrap();
        assert_eq!(ds.len(), 1);
    }

    #[test]
    fn missing_label_and_empty() {
        assert!(matches!(
            parse_dataset("a,b\n1,2\n", &"label".into()),
            Err(Error::MissingLabelColumn(_))
        ));
        assert!(matches!(
            parse_dataset("a,label\n", &"label".into()),
            Err(Error::EmptyDataset)
        ));
    }

    #[test]
    fn missing_file() {
        let err = load_dataset("/definitely/not/here.csv", &"y".into()).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }

    #[test]
    fn min_max_endpoints() {
        let ds = col_dataset(&[0.0, 5.0, 10.0]).normalize(NormMode::MinMaxSymmetric);
        let col: Vec<f64> = ds.samples.column(0).iter().copied().collect();
        assert_eq!(col, vec![-1.0, 0.0, 1.0]);
    }

    #[test]
    fn constant_column_maps_to_zero() {
        for mode in [NormMode::MinMaxSymmetric, NormMode::ZScoreClipped] {
            let ds = col_dataset(&[7.0, 7.0, 7.0]).normalize(mode);
            assert!(ds.samples.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn z_score_clipped_matches_hand_computation() {
        // mean = 21.2, population variance = 7766.8 / 5 = 1553.36
        let values = [0.0, 1.0, 2.0, 3.0, 100.0];
        let sigma = 1553.36f64.sqrt();
        let ds = col_dataset(&values).normalize(NormMode::ZScoreClipped);
        for (i, &v) in values.iter().enumerate() {
            let expected = ((v - 21.2) / (3.0 * sigma)).clamp(-1.0, 1.0);
            assert_abs_diff_eq!(ds.samples[(i, 0)], expected, epsilon = 1e-12);
        }
        // 100 sits two standard deviations out, inside the clip window.
        assert_abs_diff_eq!(ds.samples[(4, 0)], 78.8 / (3.0 * sigma), epsilon = 1e-12);
        assert_abs_diff_eq!(ds.samples[(4, 0)], 0.666_452, epsilon = 1e-6);
    }

    #[test]
    fn z_score_clips_far_outliers() {
        let mut values = vec![0.0; 99];
        values.push(1000.0);
        let ds = col_dataset(&values).normalize(NormMode::ZScoreClipped);
        assert_eq!(ds.samples[(99, 0)], 1.0);
    }

    fn two_class(n0: usize, n1: usize) -> Dataset {
        let rows: Vec<Vec<f64>> = (0..n0 + n1).map(|i| vec![i as f64]).collect();
        let labels = (0..n0 + n1).map(|i| (i >= n0) as i64).collect();
        Dataset::from_rows(&rows, labels).unwrap()
    }

    #[test]
    fn stratified_split_proportions() {
        let ds = two_class(80, 20);
        let spec = SplitSpec {
            test_fraction: 0.2,
            seed: 7,
        };
        let s = split(&ds, &spec).unwrap();
        let count = |d: &Dataset, c: i64| d.labels.iter().filter(|&&y| y == c).count();
        assert_eq!(count(&s.test, 0), 16);
        assert_eq!(count(&s.test, 1), 4);
        assert_eq!(s.train.len(), 80);

        let again = split(&ds, &spec).unwrap();
        assert_eq!(s.test_idx, again.test_idx);
        assert_eq!(s.train_idx, again.train_idx);
    }

    #[test]
    fn singleton_class_goes_to_train() {
        let ds = two_class(10, 1);
        let s = split(
            &ds,
            &SplitSpec {
                test_fraction: 0.3,
                seed: 1,
            },
        )
        .unwrap();
        assert!(s.train_idx.contains(&10));
        assert_eq!(s.warnings.len(), 1);
    }
}
