use serde::{Deserialize, Serialize};

use super::special::t_two_sided;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Regression {
    pub slope: f64,
    pub intercept: f64,
    pub r: f64,
    pub t_statistic: f64,
    pub df: u32,
    pub p_value: f64,
}

// 1 − r² below this is treated as an exact line.
const PERFECT_FIT: f64 = 1e-12;

/// Least-squares line with the Pearson correlation and its t test.
pub fn linear_regression_pearson(xs: &[f64], ys: &[f64]) -> Result<Regression> {
    if xs.len() != ys.len() {
        return Err(Error::validation("ys", "xs and ys differ in length"));
    }
    let n = xs.len();
    if n < 3 {
        return Err(Error::validation("xs", "needs at least three points"));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::validation("xs", "every value must be finite"));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::domain("xs are all equal"));
    }
    if syy == 0.0 {
        return Err(Error::domain("ys are all equal so r is undefined"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut r = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    let df = (n - 2) as u32;
    let (t_statistic, p_value) = if 1.0 - r * r < PERFECT_FIT {
        r = r.signum();
        (r * f64::INFINITY, 0.0)
    } else {
        let t = r * ((nf - 2.0) / (1.0 - r * r)).sqrt();
        (t, t_two_sided(t, f64::from(df)))
    };
    Ok(Regression {
        slope,
        intercept,
        r,
        t_statistic,
        df,
        p_value,
    })
}
