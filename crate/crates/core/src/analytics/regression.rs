use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::{AnalyticsError, OmittedCell, SimilarityCell};

/// Heteroskedasticity-consistent covariance flavor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HcFlavor {
    Hc0,
    #[default]
    Hc1,
    Hc2,
    Hc3,
}

impl std::str::FromStr for HcFlavor {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "hc0" => Ok(Self::Hc0),
            "hc1" => Ok(Self::Hc1),
            "hc2" => Ok(Self::Hc2),
            "hc3" => Ok(Self::Hc3),
            other => Err(format!("unknown HC flavor {other:?}")),
        }
    }
}

impl std::fmt::Display for HcFlavor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Hc0 => "HC0",
            Self::Hc1 => "HC1",
            Self::Hc2 => "HC2",
            Self::Hc3 => "HC3",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Predictor {
    Survey,
    Fbpol,
    Twpol,
    Twaud,
    LogTokens,
    SameMedium,
    SameActor,
    Politics,
    NewTopic,
}

impl Predictor {
    pub fn name(self) -> &'static str {
        match self {
            Self::Survey => "survey",
            Self::Fbpol => "fbpol",
            Self::Twpol => "twpol",
            Self::Twaud => "twaud",
            Self::LogTokens => "log_tokens",
            Self::SameMedium => "same_medium",
            Self::SameActor => "same_actor",
            Self::Politics => "politics",
            Self::NewTopic => "new_topic",
        }
    }

    pub fn value(self, c: &SimilarityCell) -> f64 {
        let b = |x: bool| if x { 1.0 } else { 0.0 };
        match self {
            Self::Survey => b(c.survey_in_pair),
            Self::Fbpol => b(c.fbpol_in_pair),
            Self::Twpol => b(c.twpol_in_pair),
            Self::Twaud => b(c.twaud_in_pair),
            Self::LogTokens => (c.token_total as f64).ln(),
            Self::SameMedium => b(c.same_medium),
            Self::SameActor => b(c.same_actor),
            Self::Politics => b(c.topic_is_politics),
            Self::NewTopic => b(c.topic_is_new),
        }
    }
}

/// A named predictor subset; every model also has an intercept.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub name: String,
    pub predictors: Vec<Predictor>,
}

impl ModelSpec {
    /// The five cell models: a base set plus corpus dummies.
    pub fn standard() -> Vec<ModelSpec> {
        use Predictor::*;
        let base = [LogTokens, SameMedium, SameActor, Politics, NewTopic];
        let with = |name: &str, dummies: &[Predictor]| ModelSpec {
            name: name.into(),
            predictors: dummies.iter().chain(&base).copied().collect(),
        };
        vec![
            with("model1", &[Survey]),
            with("model2", &[Survey, Fbpol]),
            with("model3", &[Survey, Fbpol, Twpol]),
            with("model4", &[Survey, Twaud]),
            with("model5", &[Survey, Twpol, Twaud]),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegressionFrame {
    pub cells: Vec<SimilarityCell>,
    pub excluded: Vec<OmittedCell>,
}

impl RegressionFrame {
    pub fn response(&self) -> DVector<f64> {
        DVector::from_iterator(self.cells.len(), self.cells.iter().map(|c| c.cosine))
    }

    /// Design matrix with a leading intercept column, and column names.
    pub fn design(&self, spec: &ModelSpec) -> (DMatrix<f64>, Vec<String>) {
        let p = spec.predictors.len() + 1;
        let x = DMatrix::from_fn(self.cells.len(), p, |i, j| {
            if j == 0 {
                1.0
            } else {
                spec.predictors[j - 1].value(&self.cells[i])
            }
        });
        let names = std::iter::once("(intercept)".to_string())
            .chain(spec.predictors.iter().map(|p| p.name().to_string()))
            .collect();
        (x, names)
    }

    /// Predictors of `spec` that take one value over every cell; they are
    /// collinear with the intercept.
    pub fn constant_predictors(&self, spec: &ModelSpec) -> Vec<Predictor> {
        spec.predictors
            .iter()
            .copied()
            .filter(|p| {
                let mut values = self.cells.iter().map(|c| p.value(c));
                let first = values.next();
                values.all(|v| Some(v) == first)
            })
            .collect()
    }
}

/// Keeps cells with a positive token count (the log needs one).
pub fn build_regression_frame(cells: &[SimilarityCell]) -> RegressionFrame {
    let (cells, dropped): (Vec<_>, Vec<_>) = cells.iter().cloned().partition(|c| c.token_total > 0);
    RegressionFrame {
        cells,
        excluded: dropped
            .into_iter()
            .map(|c| OmittedCell {
                topic: c.topic,
                corpus_a: c.corpus_a,
                corpus_b: c.corpus_b,
                reason: "token total is zero".into(),
            })
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coefficient {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub t_value: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegressionResult {
    pub model: String,
    pub hc: HcFlavor,
    pub coefficients: Vec<Coefficient>,
    pub r_squared: f64,
    pub adj_r_squared: f64,
    pub n: usize,
    pub df_residual: usize,
    /// Residuals, in row order.
    #[serde(skip)]
    pub residuals: Vec<f64>,
}

impl RegressionResult {
    pub fn coefficient(&self, name: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.name == name)
    }
}

/// OLS through a QR decomposition with sandwich standard errors and
/// two-sided t p-values. `x` must already contain any intercept column.
pub fn ols(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    names: &[String],
    hc: HcFlavor,
    model: &str,
) -> Result<RegressionResult, AnalyticsError> {
    let (n, p) = x.shape();
    if y.len() != n {
        return Err(AnalyticsError::LengthMismatch(n, y.len()));
    }
    if n <= p {
        return Err(AnalyticsError::TooFewObservations { needed: p + 1, got: n });
    }
    let qr = x.clone().qr();
    let q = qr.q();
    let r = qr.r();
    for j in 0..p {
        let col_norm = x.column(j).norm();
        if r[(j, j)].abs() <= 1e-10 * col_norm.max(f64::MIN_POSITIVE) || col_norm == 0.0 {
            return Err(AnalyticsError::RankDeficient {
                predictor: names.get(j).cloned().unwrap_or_else(|| format!("column {j}")),
            });
        }
    }
    let beta = r
        .solve_upper_triangular(&(q.transpose() * y))
        .expect("nonsingular triangular factor");
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(p, p))
        .expect("nonsingular triangular factor");
    let bread = &r_inv * r_inv.transpose();
    let resid = y - x * &beta;
    let df = n - p;
    let weights: Vec<f64> = (0..n)
        .map(|i| {
            let e2 = resid[i] * resid[i];
            let h: f64 = q.row(i).iter().map(|v| v * v).sum();
            match hc {
                HcFlavor::Hc0 => e2,
                HcFlavor::Hc1 => e2 * n as f64 / df as f64,
                HcFlavor::Hc2 => e2 / (1.0 - h),
                HcFlavor::Hc3 => e2 / ((1.0 - h) * (1.0 - h)),
            }
        })
        .collect();
    let mut xw = x.clone();
    for (i, mut row) in xw.row_iter_mut().enumerate() {
        row *= weights[i];
    }
    let meat = x.transpose() * xw;
    let cov = &bread * meat * &bread;
    let dist = StudentsT::new(0.0, 1.0, df as f64).expect("positive degrees of freedom");
    let coefficients = (0..p)
        .map(|j| {
            let se = cov[(j, j)].max(0.0).sqrt();
            let t = beta[j] / se;
            Coefficient {
                name: names.get(j).cloned().unwrap_or_else(|| format!("column {j}")),
                estimate: beta[j],
                std_error: se,
                t_value: t,
                p_value: if t.is_finite() { (2.0 * dist.sf(t.abs())).min(1.0) } else { 0.0 },
            }
        })
        .collect();
    let mean = y.mean();
    let sst: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
    let ssr: f64 = resid.iter().map(|e| e * e).sum();
    let r2 = 1.0 - ssr / sst;
    Ok(RegressionResult {
        model: model.to_string(),
        hc,
        coefficients,
        r_squared: r2,
        adj_r_squared: 1.0 - (1.0 - r2) * (n - 1) as f64 / df as f64,
        n,
        df_residual: df,
        residuals: resid.iter().copied().collect(),
    })
}

/// Fits one model specification on a frame.
pub fn ols_hc_robust(frame: &RegressionFrame, spec: &ModelSpec, hc: HcFlavor) -> Result<RegressionResult, AnalyticsError> {
    let (x, names) = frame.design(spec);
    ols(&x, &frame.response(), &names, hc, &spec.name)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(p: usize) -> Vec<String> {
        (0..p).map(|j| format!("x{j}")).collect()
    }

    #[test]
    fn exact_fit() {
        let x = DMatrix::from_fn(6, 2, |i, j| if j == 0 { 1.0 } else { i as f64 });
        let y = DVector::from_fn(6, |i, _| 2.0 * i as f64);
        let fit = ols(&x, &y, &names(2), HcFlavor::Hc1, "m").unwrap();
        assert!((fit.coefficients[1].estimate - 2.0).abs() < 1e-12);
        assert!(fit.coefficients[0].estimate.abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn collinear_column_is_named() {
        let x = DMatrix::from_fn(8, 3, |i, j| match j {
            0 => 1.0,
            1 => i as f64,
            _ => 3.0 * i as f64 - 1.0,
        });
        let y = DVector::from_fn(8, |i, _| (i * i) as f64);
        assert_eq!(
            ols(&x, &y, &names(3), HcFlavor::Hc1, "m"),
            Err(AnalyticsError::RankDeficient { predictor: "x2".into() })
        );
    }

    #[test]
    fn standard_models() {
        let m = ModelSpec::standard();
        assert_eq!(m.len(), 5);
        assert_eq!(m[0].predictors.len(), 6);
        assert_eq!(m[2].predictors.len(), 8);
    }
}
