use serde::{Deserialize, Serialize};

use super::Dataset;

/// Dataset selection thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetCriteria {
    pub max_features: usize,
    pub min_classes: usize,
    pub min_minority: usize,
    pub allow_missing: bool,
}

impl Default for DatasetCriteria {
    fn default() -> Self {
        DatasetCriteria {
            max_features: 500,
            min_classes: 2,
            min_minority: 10,
            allow_missing: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleId {
    MaxFeatures,
    NoMissing,
    MinClasses,
    MinMinority,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: RuleId,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub accepted: bool,
    pub violations: Vec<Violation>,
}

/// Checks each criterion independently and lists every violation.
pub fn validate(ds: &Dataset, criteria: &DatasetCriteria) -> ValidationReport {
    let mut violations = Vec::new();
    let d = ds.n_features();
    if d > criteria.max_features {
        violations.push(Violation {
            rule: RuleId::MaxFeatures,
            message: format!("{d} features exceed the limit of {}", criteria.max_features),
        });
    }
    if !criteria.allow_missing && ds.has_missing() {
        let count = ds.features.iter().filter(|v| crate::is_missing(**v)).count();
        violations.push(Violation {
            rule: RuleId::NoMissing,
            message: format!("{count} missing cells"),
        });
    }
    let c = ds.n_classes();
    if c < criteria.min_classes {
        violations.push(Violation {
            rule: RuleId::MinClasses,
            message: format!("{c} classes, at least {} required", criteria.min_classes),
        });
    }
    let minority = ds.class_counts().into_iter().min().unwrap_or(0);
    if minority < criteria.min_minority {
        violations.push(Violation {
            rule: RuleId::MinMinority,
            message: format!(
                "minority class has {minority} instances, at least {} required",
                criteria.min_minority
            ),
        });
    }
    ValidationReport {
        accepted: violations.is_empty(),
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    fn dataset(n0: usize, n1: usize, d: usize) -> Dataset {
        let n = n0 + n1;
        let x = Array2::from_shape_fn((n, d), |(i, j)| (i * d + j) as f64);
        let labels = (0..n).map(|i| usize::from(i >= n0)).collect();
        Dataset::from_numeric("v", x, labels).unwrap()
    }

    fn rules(r: &ValidationReport) -> Vec<RuleId> {
        r.violations.iter().map(|v| v.rule).collect()
    }

    #[test]
    fn too_many_features() {
        let r = validate(&dataset(20, 20, 501), &DatasetCriteria::default());
        assert!(!r.accepted);
        assert_eq!(rules(&r), vec![RuleId::MaxFeatures]);
        assert!(validate(&dataset(20, 20, 500), &DatasetCriteria::default()).accepted);
    }

    #[test]
    fn small_minority() {
        let r = validate(&dataset(9, 30, 3), &DatasetCriteria::default());
        assert_eq!(rules(&r), vec![RuleId::MinMinority]);
    }

    #[test]
    fn complete_binary_accepted() {
        let r = validate(&dataset(20, 25, 10), &DatasetCriteria::default());
        assert!(r.accepted && r.violations.is_empty());
    }

    #[test]
    fn all_violations_listed() {
        let mut ds = dataset(5, 0, 501);
        ds.features[(0, 0)] = crate::MISSING;
        ds.class_names.truncate(1);
        let r = validate(&ds, &DatasetCriteria::default());
        assert_eq!(
            rules(&r),
            vec![RuleId::MaxFeatures, RuleId::NoMissing, RuleId::MinClasses, RuleId::MinMinority]
        );
        assert_eq!(r, validate(&ds, &DatasetCriteria::default()));
    }
}
