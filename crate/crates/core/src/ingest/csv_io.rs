use std::collections::HashMap;
use std::path::Path;

use ndarray::Array2;

use super::{ColumnKind, Dataset};
use crate::{is_missing, Error, Result, MISSING};

pub const DEFAULT_NA_TOKENS: &[&str] = &["", "?", "NA"];

#[derive(Debug, Clone)]
pub struct CsvOptions {
    pub na_tokens: Vec<String>,
    pub delimiter: u8,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            na_tokens: DEFAULT_NA_TOKENS.iter().map(|s| s.to_string()).collect(),
            delimiter: b',',
        }
    }
}

pub fn load_csv(path: impl AsRef<Path>, target_column: &str) -> Result<Dataset> {
    load_csv_with(path, target_column, &CsvOptions::default())
}

pub fn load_csv_with(
    path: impl AsRef<Path>,
    target_column: &str,
    opts: &CsvOptions,
) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .delimiter(opts.delimiter)
        .from_reader(file);
    let header: Vec<String> = reader.headers()?.iter().map(|h| h.trim().to_string()).collect();
    let target_idx = header
        .iter()
        .position(|h| h == target_column)
        .ok_or_else(|| Error::MissingTarget(target_column.to_string()))?;

    let mut rows: Vec<Vec<String>> = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        if rec.len() != header.len() {
            return Err(Error::RaggedRow {
                row: i + 1,
                expected: header.len(),
                found: rec.len(),
            });
        }
        rows.push(rec.iter().map(|c| c.trim().to_string()).collect());
    }
    if rows.is_empty() {
        return Err(Error::EmptyData);
    }

    let is_na = |s: &str| opts.na_tokens.iter().any(|t| t == s);
    let feature_cols: Vec<usize> = (0..header.len()).filter(|&j| j != target_idx).collect();
    let n = rows.len();
    let mut features = Array2::from_elem((n, feature_cols.len()), MISSING);
    let mut kinds = Vec::with_capacity(feature_cols.len());

    for (out_j, &j) in feature_cols.iter().enumerate() {
        let numeric = rows.iter().all(|r| {
            let c = r[j].as_str();
            is_na(c) || c.parse::<f64>().map(|v| v.is_finite()).unwrap_or(false)
        });
        if numeric {
            for (i, r) in rows.iter().enumerate() {
                if !is_na(&r[j]) {
                    features[(i, out_j)] = r[j].parse::<f64>().expect("checked numeric");
                }
            }
            kinds.push(ColumnKind::Numeric);
        } else {
            let mut levels: Vec<String> = Vec::new();
            let mut index: HashMap<String, usize> = HashMap::new();
            for (i, r) in rows.iter().enumerate() {
                if is_na(&r[j]) {
                    continue;
                }
                let code = *index.entry(r[j].clone()).or_insert_with(|| {
                    levels.push(r[j].clone());
                    levels.len() - 1
                });
                features[(i, out_j)] = code as f64;
            }
            kinds.push(ColumnKind::Categorical { levels });
        }
    }

    let mut class_names: Vec<String> = Vec::new();
    let mut class_index: HashMap<String, usize> = HashMap::new();
    let mut labels = Vec::with_capacity(n);
    for (i, r) in rows.iter().enumerate() {
        let v = &r[target_idx];
        if is_na(v) {
            return Err(Error::Parse {
                line: i + 2,
                message: format!("missing target value in column `{target_column}`"),
            });
        }
        let code = *class_index.entry(v.clone()).or_insert_with(|| {
            class_names.push(v.clone());
            class_names.len() - 1
        });
        labels.push(code);
    }

    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into());
    Dataset::new(
        name,
        feature_cols.iter().map(|&j| header[j].clone()).collect(),
        kinds,
        features,
        target_column,
        labels,
        class_names,
    )
}

/// Writes features followed by the target column. Missing cells are empty.
pub fn write_csv(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path)?;
    let mut header = ds.column_names.clone();
    header.push(ds.target_name.clone());
    w.write_record(&header)?;
    for (i, row) in ds.features.rows().into_iter().enumerate() {
        let mut rec: Vec<String> = row
            .iter()
            .zip(&ds.column_kinds)
            .map(|(&v, kind)| {
                if is_missing(v) {
                    String::new()
                } else {
                    match kind {
                        ColumnKind::Numeric => format!("{v}"),
                        ColumnKind::Categorical { levels } => levels[v as usize].clone(),
                    }
                }
            })
            .collect();
        rec.push(ds.class_names[ds.labels[i]].clone());
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(dir: &tempfile::TempDir, name: &str, body: &str) -> std::path::PathBuf {
        let p = dir.path().join(name);
        std::fs::File::create(&p).unwrap().write_all(body.as_bytes()).unwrap();
        p
    }

    #[test]
    fn three_rows_two_classes() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_tmp(&dir, "a.csv", "x,colour,class\n1.5,red,a\n2,blue,b\n3,red,a\n");
        let ds = load_csv(&p, "class").unwrap();
        assert_eq!(ds.n_instances(), 3);
        assert_eq!(ds.n_classes(), 2);
        assert_eq!(ds.labels, vec![0, 1, 0]);
        assert_eq!(ds.column_kinds[0], ColumnKind::Numeric);
        assert!(ds.column_kinds[1].is_categorical());
        assert_eq!(ds.features.column(1).to_vec(), vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn empty_and_na_cells_become_missing() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_tmp(&dir, "m.csv", "x,y,class\n,1,a\n2,?,b\nNA,3,a\n");
        let ds = load_csv(&p, "class").unwrap();
        assert!(is_missing(ds.features[(0, 0)]));
        assert!(is_missing(ds.features[(1, 1)]));
        assert!(is_missing(ds.features[(2, 0)]));
        assert_eq!(ds.column_kinds, vec![ColumnKind::Numeric, ColumnKind::Numeric]);
    }

    #[test]
    fn error_paths() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_tmp(&dir, "e.csv", "x,class\n1,a\n");
        assert!(matches!(load_csv(&p, "y"), Err(Error::MissingTarget(_))));
        let p = write_tmp(&dir, "r.csv", "x,class\n1,a\n2\n");
        assert!(matches!(load_csv(&p, "class"), Err(Error::RaggedRow { row: 2, .. })));
        let p = write_tmp(&dir, "z.csv", "x,class\n");
        assert!(matches!(load_csv(&p, "class"), Err(Error::EmptyData)));
        assert!(matches!(
            load_csv(dir.path().join("nope.csv"), "class"),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn write_then_load_round_trips_cells() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_tmp(
            &dir,
            "rt.csv",
            "a,b,class\n0.1,u,x\n,v,y\n1e-300,,x\n-3.25,u,y\n",
        );
        let ds = load_csv(&p, "class").unwrap();
        let out = dir.path().join("rt2.csv");
        write_csv(&ds, &out).unwrap();
        let back = load_csv(&out, "class").unwrap();
        assert_eq!(back.column_kinds, ds.column_kinds);
        assert_eq!(back.labels, ds.labels);
        for (a, b) in ds.features.iter().zip(back.features.iter()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
