use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Name of the leading all-ones column.
pub const INTERCEPT: &str = "(Intercept)";

#[derive(Debug, Error)]
pub enum DataError {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: u64,
        column: usize,
        message: String,
    },
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("invalid dataset: {0}")]
    Invalid(String),
    #[error("cannot read dataset: {0}")]
    Io(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CovariateKind {
    Intercept,
    Continuous {
        /// (mean, sd) subtracted and divided out, if the column was standardized.
        standardization: Option<(f64, f64)>,
    },
    Indicator {
        variable: String,
        level: String,
        reference: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Covariate {
    pub name: String,
    pub kind: CovariateKind,
}

impl Covariate {
    pub fn continuous(name: impl Into<String>) -> Self {
        Covariate {
            name: name.into(),
            kind: CovariateKind::Continuous {
                standardization: None,
            },
        }
    }
}

/// Problems that do not block fitting but deserve a warning.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum DataWarning {
    /// Every response has the same value.
    ConstantResponse(bool),
    /// A single covariate separates the two response groups.
    Separation(String),
}

impl std::fmt::Display for DataWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DataWarning::ConstantResponse(v) => {
                write!(f, "all responses equal {}", u8::from(*v))
            }
            DataWarning::Separation(name) => {
                write!(f, "covariate `{name}` separates the responses")
            }
        }
    }
}

/// Design matrix with a leading intercept column and a binary response.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryDataset {
    x: DMatrix<f64>,
    y: Vec<bool>,
    covariates: Vec<Covariate>,
}

impl BinaryDataset {
    pub fn new(x: DMatrix<f64>, y: Vec<bool>, covariates: Vec<Covariate>) -> Result<Self, DataError> {
        let (n, p) = x.shape();
        if p == 0 {
            return Err(DataError::Invalid("design matrix has no columns".into()));
        }
        if y.len() != n {
            return Err(DataError::Invalid(format!("{} responses for {n} rows", y.len())));
        }
        if covariates.len() != p {
            return Err(DataError::Invalid(format!(
                "{} covariate names for {p} columns",
                covariates.len()
            )));
        }
        if n < p {
            return Err(DataError::Invalid(format!("{n} observations for {p} coefficients")));
        }
        if x.column(0).iter().any(|&v| v != 1.0) {
            return Err(DataError::Invalid("first column must be the intercept".into()));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(DataError::Invalid("design matrix has non-finite entries".into()));
        }
        Ok(BinaryDataset { x, y, covariates })
    }

    /// Build from response and covariate columns; the intercept is prepended.
    pub fn from_columns(y: Vec<bool>, columns: Vec<(Covariate, Vec<f64>)>) -> Result<Self, DataError> {
        let n = y.len();
        let p = columns.len() + 1;
        let mut x = DMatrix::from_element(n, p, 1.0);
        let mut covariates = vec![Covariate {
            name: INTERCEPT.into(),
            kind: CovariateKind::Intercept,
        }];
        for (j, (cov, values)) in columns.into_iter().enumerate() {
            if values.len() != n {
                return Err(DataError::Invalid(format!(
                    "column `{}` has {} values for {n} rows",
                    cov.name,
                    values.len()
                )));
            }
            x.column_mut(j + 1).copy_from_slice(&values);
            covariates.push(cov);
        }
        Self::new(x, y, covariates)
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y(&self) -> &[bool] {
        &self.y
    }

    pub fn covariates(&self) -> &[Covariate] {
        &self.covariates
    }

    pub fn covariate_names(&self) -> Vec<String> {
        self.covariates.iter().map(|c| c.name.clone()).collect()
    }

    pub fn linear_predictor(&self, beta: &[f64]) -> Vec<f64> {
        let b = DVector::from_column_slice(beta);
        (&self.x * b).as_slice().to_vec()
    }

    /// Rows reordered so that row `i` of the result is row `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let x = DMatrix::from_fn(self.n(), self.p(), |i, j| self.x[(perm[i], j)]);
        let y = perm.iter().map(|&i| self.y[i]).collect();
        BinaryDataset {
            x,
            y,
            covariates: self.covariates.clone(),
        }
    }

    /// Copy with column `j` replaced by `scale·x + shift`.
    pub fn with_rescaled_column(&self, j: usize, scale: f64, shift: f64) -> Self {
        let mut out = self.clone();
        for v in out.x.column_mut(j).iter_mut() {
            *v = scale * *v + shift;
        }
        out
    }

    pub fn warnings(&self) -> Vec<DataWarning> {
        let mut out = Vec::new();
        let ones = self.y.iter().filter(|&&v| v).count();
        if ones == 0 || ones == self.n() {
            out.push(DataWarning::ConstantResponse(ones > 0));
            return out;
        }
        for j in 1..self.p() {
            let col = self.x.column(j);
            let (mut lo1, mut hi1, mut lo0, mut hi0) = (
                f64::INFINITY,
                f64::NEG_INFINITY,
                f64::INFINITY,
                f64::NEG_INFINITY,
            );
            for (v, &y) in col.iter().zip(&self.y) {
                if y {
                    lo1 = lo1.min(*v);
                    hi1 = hi1.max(*v);
                } else {
                    lo0 = lo0.min(*v);
                    hi0 = hi0.max(*v);
                }
            }
            if hi0 < lo1 || hi1 < lo0 {
                out.push(DataWarning::Separation(self.covariates[j].name.clone()));
            }
        }
        out
    }
}
