use std::path::Path;

use ndarray::Array2;

use super::{MetaDatabase, Step};
use crate::ingest::write_atomic;
use crate::{is_missing, Error, Result, MISSING};

const NAME_COLUMN: &str = "dataset";

/// Writes `dataset, <features...>, <targets...>`; MISSING cells are empty.
pub fn write_csv(db: &MetaDatabase, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![NAME_COLUMN.to_string()];
    header.extend(db.feature_names.iter().cloned());
    header.extend(db.target_names.iter().cloned());
    w.write_record(&header)?;
    for i in 0..db.n_rows() {
        let mut rec = vec![db.instance_names[i].clone()];
        rec.extend(db.x.row(i).iter().map(|v| fmt_cell(*v)));
        rec.extend(db.y.row(i).iter().map(|v| fmt_cell(*v)));
        w.write_record(&rec)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
    write_atomic(path, &bytes)
}

fn fmt_cell(v: f64) -> String {
    if is_missing(v) {
        String::new()
    } else {
        format!("{v:?}")
    }
}

/// Reads a database written by [`write_csv`]. The last `n_targets` columns are
/// targets; the provenance log starts empty.
pub fn read_csv(path: &Path, n_targets: usize) -> Result<MetaDatabase> {
    let mut r = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::invalid(format!("{other:?}")),
    })?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header.len() < 1 + n_targets || header[0] != NAME_COLUMN {
        return Err(Error::MalformedPayload(format!(
            "{}: expected `{NAME_COLUMN}` followed by features and {n_targets} targets",
            path.display()
        )));
    }
    let d = header.len() - 1 - n_targets;
    let mut names = Vec::new();
    let mut cells = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        if rec.len() != header.len() {
            return Err(Error::RaggedRow {
                row: line + 1,
                expected: header.len(),
                found: rec.len(),
            });
        }
        names.push(rec[0].to_string());
        for cell in rec.iter().skip(1) {
            let v = if cell.is_empty() {
                MISSING
            } else {
                cell.parse::<f64>().map_err(|_| Error::Parse {
                    line: line + 2,
                    message: format!("`{cell}` is not a number"),
                })?
            };
            cells.push(v);
        }
    }
    let n = names.len();
    let full = Array2::from_shape_vec((n, header.len() - 1), cells).map_err(|e| Error::Shape(e.to_string()))?;
    let db = MetaDatabase {
        instance_names: names,
        feature_names: header[1..1 + d].to_vec(),
        x: full.slice(ndarray::s![.., ..d]).to_owned(),
        y: full.slice(ndarray::s![.., d..]).to_owned(),
        target_names: header[1 + d..].to_vec(),
        provenance: vec![],
    };
    db.check()?;
    Ok(db)
}

pub fn write_provenance(steps: &[Step], path: &Path) -> Result<()> {
    let json = serde_json::to_vec_pretty(steps)?;
    write_atomic(path, &json)
}

pub fn read_provenance(path: &Path) -> Result<Vec<Step>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}
