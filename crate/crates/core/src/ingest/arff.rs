//! Dense, flat ARFF: `@relation`, numeric/nominal `@attribute`s and `@data`.

use std::path::Path;

use ndarray::Array2;

use super::{ColumnKind, Dataset};
use crate::{Error, Result, MISSING};

#[derive(Debug)]
enum AttrType {
    Numeric,
    Nominal(Vec<String>),
}

#[derive(Debug)]
struct Attribute {
    name: String,
    kind: AttrType,
}

pub fn load_arff(path: impl AsRef<Path>) -> Result<Dataset> {
    load_arff_with_target(path, None)
}

/// Loads an ARFF file; the target is `target` if given, else an attribute named
/// `class`, else the last attribute when it is nominal.
pub fn load_arff_with_target(path: impl AsRef<Path>, target: Option<&str>) -> Result<Dataset> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let fallback = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into());
    parse_arff(&text, target, &fallback)
}

/// Splits on commas outside single or double quotes; strips quotes and whitespace.
fn split_fields(line: &str, line_no: usize) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut quote: Option<char> = None;
    let mut chars = line.chars().peekable();
    while let Some(ch) = chars.next() {
        match quote {
            Some(q) if ch == q => quote = None,
            Some(_) if ch == '\\' => {
                if let Some(next) = chars.next() {
                    cur.push(next);
                }
            }
            Some(_) => cur.push(ch),
            None => match ch {
                '\'' | '"' => quote = Some(ch),
                ',' => out.push(std::mem::take(&mut cur).trim().to_string()),
                _ => cur.push(ch),
            },
        }
    }
    if quote.is_some() {
        return Err(Error::Parse {
            line: line_no,
            message: "unterminated quote".into(),
        });
    }
    out.push(cur.trim().to_string());
    Ok(out)
}

/// Reads one possibly-quoted token and returns (token, rest).
fn take_token(s: &str) -> (String, &str) {
    let s = s.trim_start();
    if let Some(q) = s.chars().next().filter(|c| *c == '\'' || *c == '"') {
        if let Some(end) = s[1..].find(q) {
            return (s[1..1 + end].to_string(), &s[end + 2..]);
        }
    }
    let end = s.find(char::is_whitespace).unwrap_or(s.len());
    (s[..end].to_string(), &s[end..])
}

fn parse_attribute(rest: &str, line: usize) -> Result<Attribute> {
    let (name, rest) = take_token(rest);
    let spec = rest.trim();
    if name.is_empty() || spec.is_empty() {
        return Err(Error::Parse {
            line,
            message: "malformed @attribute declaration".into(),
        });
    }
    if let Some(body) = spec.strip_prefix('{') {
        let body = body.strip_suffix('}').ok_or_else(|| Error::Parse {
            line,
            message: "unterminated nominal value list".into(),
        })?;
        let values = split_fields(body, line)?;
        return Ok(Attribute {
            name,
            kind: AttrType::Nominal(values),
        });
    }
    let ty = spec.split_whitespace().next().unwrap_or("").to_ascii_lowercase();
    match ty.as_str() {
        "numeric" | "real" | "integer" => Ok(Attribute {
            name,
            kind: AttrType::Numeric,
        }),
        other => Err(Error::UnsupportedArff {
            line,
            construct: format!("attribute type `{other}`"),
        }),
    }
}

pub fn parse_arff(text: &str, target: Option<&str>, fallback_name: &str) -> Result<Dataset> {
    let mut relation = fallback_name.to_string();
    let mut attrs: Vec<Attribute> = Vec::new();
    let mut rows: Vec<(usize, Vec<String>)> = Vec::new();
    let mut in_data = false;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if in_data {
            if line.starts_with('{') {
                return Err(Error::UnsupportedArff {
                    line: line_no,
                    construct: "sparse data row".into(),
                });
            }
            rows.push((line_no, split_fields(line, line_no)?));
            continue;
        }
        let lower = line.to_ascii_lowercase();
        if lower.starts_with("@relation") {
            let (name, _) = take_token(&line["@relation".len()..]);
            if !name.is_empty() {
                relation = name;
            }
        } else if lower.starts_with("@attribute") {
            attrs.push(parse_attribute(&line["@attribute".len()..], line_no)?);
        } else if lower.starts_with("@data") {
            in_data = true;
        } else if lower.starts_with("@end") {
            return Err(Error::UnsupportedArff {
                line: line_no,
                construct: "relational attribute block".into(),
            });
        } else {
            return Err(Error::Parse {
                line: line_no,
                message: format!("unexpected header line `{line}`"),
            });
        }
    }
    if attrs.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "no @attribute declarations".into(),
        });
    }
    if rows.is_empty() {
        return Err(Error::EmptyData);
    }

    let target_idx = match target {
        Some(t) => attrs
            .iter()
            .position(|a| a.name == t)
            .ok_or_else(|| Error::MissingTarget(t.to_string()))?,
        None => attrs
            .iter()
            .rposition(|a| a.name.eq_ignore_ascii_case("class"))
            .or_else(|| {
                let last = attrs.len() - 1;
                matches!(attrs[last].kind, AttrType::Nominal(_)).then_some(last)
            })
            .ok_or_else(|| Error::MissingTarget("class".into()))?,
    };
    let class_names = match &attrs[target_idx].kind {
        AttrType::Nominal(v) => v.clone(),
        AttrType::Numeric => {
            return Err(Error::invalid(format!(
                "target attribute `{}` is numeric; a nominal class is required",
                attrs[target_idx].name
            )))
        }
    };

    let feature_idx: Vec<usize> = (0..attrs.len()).filter(|&j| j != target_idx).collect();
    let mut features = Array2::from_elem((rows.len(), feature_idx.len()), MISSING);
    let mut labels = Vec::with_capacity(rows.len());
    for (r, (line_no, fields)) in rows.iter().enumerate() {
        if fields.len() != attrs.len() {
            return Err(Error::RaggedRow {
                row: r + 1,
                expected: attrs.len(),
                found: fields.len(),
            });
        }
        for (out_j, &j) in feature_idx.iter().enumerate() {
            let cell = fields[j].as_str();
            if cell == "?" {
                continue;
            }
            features[(r, out_j)] = match &attrs[j].kind {
                AttrType::Numeric => cell.parse::<f64>().map_err(|_| Error::Parse {
                    line: *line_no,
                    message: format!("`{cell}` is not numeric"),
                })?,
                AttrType::Nominal(values) => values
                    .iter()
                    .position(|v| v == cell)
                    .ok_or_else(|| Error::Parse {
                        line: *line_no,
                        message: format!("`{cell}` not declared for `{}`", attrs[j].name),
                    })? as f64,
            };
        }
        let cell = fields[target_idx].as_str();
        let label = class_names.iter().position(|v| v == cell).ok_or_else(|| Error::Parse {
            line: *line_no,
            message: format!("class value `{cell}` missing or undeclared"),
        })?;
        labels.push(label);
    }

    // Declared but unused class values would break the label invariant.
    let mut used = vec![false; class_names.len()];
    for &l in &labels {
        used[l] = true;
    }
    let remap: Vec<Option<usize>> = used
        .iter()
        .scan(0usize, |next, &u| {
            Some(if u {
                *next += 1;
                Some(*next - 1)
            } else {
                None
            })
        })
        .collect();
    let class_names: Vec<String> = class_names
        .into_iter()
        .zip(&used)
        .filter(|(_, u)| **u)
        .map(|(c, _)| c)
        .collect();
    let labels = labels.into_iter().map(|l| remap[l].unwrap()).collect();

    Dataset::new(
        relation,
        feature_idx.iter().map(|&j| attrs[j].name.clone()).collect(),
        feature_idx
            .iter()
            .map(|&j| match &attrs[j].kind {
                AttrType::Numeric => ColumnKind::Numeric,
                AttrType::Nominal(v) => ColumnKind::Categorical { levels: v.clone() },
            })
            .collect(),
        features,
        attrs[target_idx].name.clone(),
        labels,
        class_names,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::is_missing;

    const SMALL: &str = "% comment\n@relation toy\n@attribute a numeric\n@attribute 'b two' REAL\n@attribute class {yes,no}\n@data\n1,2,yes\n3,?,no\n5,6,yes\n7,8,no\n";

    #[test]
    fn parses_dense_file() {
        let ds = parse_arff(SMALL, None, "x").unwrap();
        assert_eq!(ds.name, "toy");
        assert_eq!((ds.n_instances(), ds.n_features(), ds.n_classes()), (4, 2, 2));
        assert_eq!(ds.column_names[1], "b two");
        assert_eq!(ds.labels, vec![0, 1, 0, 1]);
        assert!(is_missing(ds.features[(1, 1)]));
    }

    #[test]
    fn nominal_features_follow_declared_order() {
        let text = "@relation t\n@attribute c {lo,mid,hi}\n@attribute class {p,q}\n@data\nhi,p\nlo,q\nmid,p\n";
        let ds = parse_arff(text, None, "x").unwrap();
        assert_eq!(ds.features.column(0).to_vec(), vec![2.0, 0.0, 1.0]);
    }

    #[test]
    fn rejects_sparse_and_unsupported_types() {
        let sparse = "@relation t\n@attribute a numeric\n@attribute class {p,q}\n@data\n{0 1, 1 p}\n";
        assert!(matches!(
            parse_arff(sparse, None, "x"),
            Err(Error::UnsupportedArff { .. })
        ));
        let date = "@relation t\n@attribute d date \"yyyy-MM-dd\"\n@attribute class {p,q}\n@data\n";
        assert!(matches!(
            parse_arff(date, None, "x"),
            Err(Error::UnsupportedArff { .. })
        ));
        let rel = "@relation t\n@attribute r relational\n@end r\n";
        assert!(matches!(
            parse_arff(rel, None, "x"),
            Err(Error::UnsupportedArff { .. })
        ));
    }

    #[test]
    fn explicit_target_and_unused_class_value() {
        let text = "@relation t\n@attribute kind {a,b,c}\n@attribute v numeric\n@data\na,1\nc,2\n";
        let ds = parse_arff(text, Some("kind"), "x").unwrap();
        assert_eq!(ds.class_names, vec!["a", "c"]);
        assert_eq!(ds.labels, vec![0, 1]);
    }
}
