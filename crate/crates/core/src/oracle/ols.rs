use nalgebra::{DMatrix, DVector};

use crate::analytics::HcFlavor;

/// Textbook OLS: explicit `(X'X)^-1`, explicit hat-matrix diagonal.
#[derive(Debug, Clone)]
pub struct NaiveOls {
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub r_squared: f64,
    pub adj_r_squared: f64,
}

/// `x` holds one row per observation and already contains any intercept column.
pub fn naive_ols(x: &[Vec<f64>], y: &[f64], hc: HcFlavor) -> Option<NaiveOls> {
    let n = y.len();
    let p = x.first()?.len();
    let xm = DMatrix::from_fn(n, p, |i, j| x[i][j]);
    let yv = DVector::from_column_slice(y);
    let xtx_inv = (xm.transpose() * &xm).try_inverse()?;
    let beta = &xtx_inv * xm.transpose() * &yv;
    let resid = &yv - &xm * &beta;
    let mut meat = DMatrix::<f64>::zeros(p, p);
    for i in 0..n {
        let xi = xm.row(i).transpose();
        let h = (xi.transpose() * &xtx_inv * &xi)[(0, 0)];
        let e2 = resid[i] * resid[i];
        let w = match hc {
            HcFlavor::Hc0 => e2,
            HcFlavor::Hc1 => e2 * n as f64 / (n - p) as f64,
            HcFlavor::Hc2 => e2 / (1.0 - h),
            HcFlavor::Hc3 => e2 / ((1.0 - h) * (1.0 - h)),
        };
        meat += &xi * xi.transpose() * w;
    }
    let cov = &xtx_inv * meat * &xtx_inv;
    let mean = y.iter().sum::<f64>() / n as f64;
    let sst: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let ssr: f64 = resid.iter().map(|e| e * e).sum();
    let r2 = 1.0 - ssr / sst;
    Some(NaiveOls {
        coefficients: beta.iter().copied().collect(),
        std_errors: (0..p).map(|j| cov[(j, j)].sqrt()).collect(),
        r_squared: r2,
        adj_r_squared: 1.0 - (1.0 - r2) * (n - 1) as f64 / (n - p) as f64,
    })
}
