use ndarray::{concatenate, Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use super::pca::{pca_transform, PcaModel};
use crate::abstractnet::LatentMatrix;
use crate::metadb::MetaDatabase;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FeatureSetting {
    Abstract,
    Traditional,
    Hybrid,
    #[serde(rename = "PCA")]
    Pca,
}

impl FeatureSetting {
    pub const ALL: [FeatureSetting; 4] = [
        FeatureSetting::Abstract,
        FeatureSetting::Traditional,
        FeatureSetting::Hybrid,
        FeatureSetting::Pca,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureSetting::Abstract => "Abstract",
            FeatureSetting::Traditional => "Traditional",
            FeatureSetting::Hybrid => "Hybrid",
            FeatureSetting::Pca => "PCA",
        }
    }
}

impl std::fmt::Display for FeatureSetting {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for FeatureSetting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FeatureSetting::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::invalid(format!("unknown feature setting `{s}`")))
    }
}

/// Abstract: latent; Traditional: `traditional`; Hybrid: `[traditional | latent]`;
/// PCA: projection of `traditional`.
pub fn build_feature_matrix(
    traditional: ArrayView2<f64>,
    latent: Option<&LatentMatrix>,
    pca: Option<&PcaModel>,
    setting: FeatureSetting,
) -> Result<Array2<f64>> {
    let need_latent = || {
        let l = latent.ok_or_else(|| Error::invalid(format!("{setting} setting needs latent features")))?;
        if l.rows() != traditional.nrows() {
            return Err(Error::Shape(format!(
                "{} latent rows vs {} meta-instances",
                l.rows(),
                traditional.nrows()
            )));
        }
        Ok(l)
    };
    match setting {
        FeatureSetting::Traditional => Ok(traditional.to_owned()),
        FeatureSetting::Abstract => Ok(need_latent()?.0.clone()),
        FeatureSetting::Hybrid => {
            let l = need_latent()?;
            concatenate(Axis(1), &[traditional, l.view()]).map_err(|e| Error::Shape(e.to_string()))
        }
        FeatureSetting::Pca => {
            let model = pca.ok_or_else(|| Error::invalid("PCA setting needs a fitted PCA model"))?;
            pca_transform(model, traditional)
        }
    }
}

pub fn build_from_database(
    db: &MetaDatabase,
    latent: Option<&LatentMatrix>,
    pca: Option<&PcaModel>,
    setting: FeatureSetting,
) -> Result<Array2<f64>> {
    build_feature_matrix(db.x.view(), latent, pca, setting)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metamodels::pca_fit;

    #[test]
    fn widths() {
        let x = Array2::from_shape_fn((20, 6), |(i, j)| ((i * (j + 3)) % 7) as f64 + j as f64);
        let latent = LatentMatrix(Array2::from_elem((20, 16), 0.5));
        let pca = pca_fit(x.view(), 0.95).unwrap();
        let w = |s| build_feature_matrix(x.view(), Some(&latent), Some(&pca), s).unwrap().ncols();
        assert_eq!(w(FeatureSetting::Abstract), 16);
        assert_eq!(w(FeatureSetting::Traditional), 6);
        assert_eq!(w(FeatureSetting::Hybrid), 22);
        assert_eq!(w(FeatureSetting::Pca), pca.retained);
    }

    #[test]
    fn missing_inputs() {
        let x = Array2::zeros((4, 2));
        assert!(build_feature_matrix(x.view(), None, None, FeatureSetting::Abstract).is_err());
        assert!(build_feature_matrix(x.view(), None, None, FeatureSetting::Pca).is_err());
        let short = LatentMatrix(Array2::zeros((3, 16)));
        assert!(build_feature_matrix(x.view(), Some(&short), None, FeatureSetting::Hybrid).is_err());
    }
}
