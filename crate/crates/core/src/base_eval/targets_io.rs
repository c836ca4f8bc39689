use std::path::Path;

use super::{BaseLearnerKind, LearnerStatus, PerformanceRecord};
use crate::ingest::write_atomic;
use crate::{Error, Result, MISSING};

/// CSV with `dataset_name, auc_<kind>..., status_<kind>...`; a failed slot has
/// an empty AUC cell and `failed: <reason>` status.
pub fn write_targets(records: &[PerformanceRecord], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["dataset_name".to_string()];
    header.extend(BaseLearnerKind::ALL.iter().map(|k| format!("auc_{}", k.as_str())));
    header.extend(BaseLearnerKind::ALL.iter().map(|k| format!("status_{}", k.as_str())));
    w.write_record(&header)?;
    for r in records {
        let mut row = vec![r.dataset_name.clone()];
        for kind in BaseLearnerKind::ALL {
            row.push(r.auc(kind).map(|v| format!("{v:?}")).unwrap_or_default());
        }
        for s in &r.status {
            row.push(match s {
                LearnerStatus::Ok => "ok".to_string(),
                LearnerStatus::Failed(reason) => format!("failed: {reason}"),
            });
        }
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
    write_atomic(path, &bytes)
}

pub fn read_targets(path: &Path) -> Result<Vec<PerformanceRecord>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::invalid(format!("{other:?}")),
    })?;
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        if rec.len() != 7 {
            return Err(Error::RaggedRow {
                row: i + 1,
                expected: 7,
                found: rec.len(),
            });
        }
        let mut auc = [MISSING; 3];
        let mut status = [LearnerStatus::Ok, LearnerStatus::Ok, LearnerStatus::Ok];
        for k in 0..3 {
            let s = &rec[4 + k];
            status[k] = match s.strip_prefix("failed: ") {
                Some(reason) => LearnerStatus::Failed(reason.to_string()),
                None if s == "ok" => LearnerStatus::Ok,
                None => LearnerStatus::Failed(s.to_string()),
            };
            if status[k] == LearnerStatus::Ok {
                auc[k] = rec[1 + k].parse().map_err(|_| Error::Parse {
                    line: i + 2,
                    message: format!("`{}` is not an AUC", &rec[1 + k]),
                })?;
            }
        }
        out.push(PerformanceRecord {
            dataset_name: rec[0].to_string(),
            auc,
            status,
        });
    }
    Ok(out)
}
