use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::special::{chi_square_tail, normal_two_sided};
use super::{Table2x2, TableRxC, TestResult};
use crate::{Error, Result};

fn f(x: u64) -> f64 {
    x as f64
}

fn margins(t: &Table2x2) -> [f64; 4] {
    [f(t.a + t.b), f(t.c + t.d), f(t.a + t.c), f(t.b + t.d)]
}

fn margin_product(t: &Table2x2) -> Result<f64> {
    let m = margins(t);
    if m.contains(&0.0) {
        return Err(Error::domain("a row or column total is zero"));
    }
    Ok(m.iter().product())
}

// ad − bc without cancellation for realistic counts.
fn cross_difference(t: &Table2x2) -> f64 {
    (i128::from(t.a) * i128::from(t.d) - i128::from(t.b) * i128::from(t.c)) as f64
}

pub fn phi_coefficient(t: &Table2x2) -> Result<f64> {
    t.validate()?;
    Ok(cross_difference(t) / margin_product(t)?.sqrt())
}

pub fn cohens_kappa(t: &Table2x2) -> Result<f64> {
    t.validate()?;
    let n = f(t.n());
    let [r1, r2, c1, c2] = margins(t);
    let po = f(t.a + t.d) / n;
    let pe = (r1 * c1 + r2 * c2) / (n * n);
    if pe >= 1.0 {
        return Err(Error::domain("chance agreement is 1"));
    }
    Ok((po - pe) / (1.0 - pe))
}

fn row_proportions(t: &Table2x2) -> Result<(f64, f64)> {
    t.validate()?;
    if t.a + t.b == 0 || t.c + t.d == 0 {
        return Err(Error::domain("a row total is zero"));
    }
    Ok((f(t.a) / f(t.a + t.b), f(t.c) / f(t.c + t.d)))
}

/// P1 − P2, the difference of the row-wise first-column proportions.
pub fn proportion_difference(t: &Table2x2) -> Result<f64> {
    let (p1, p2) = row_proportions(t)?;
    Ok(p1 - p2)
}

pub fn relative_risk(t: &Table2x2) -> Result<f64> {
    let (p1, p2) = row_proportions(t)?;
    if p2 == 0.0 {
        return Err(Error::domain("second-row risk is zero"));
    }
    Ok(p1 / p2)
}

pub fn odds_ratio(t: &Table2x2) -> Result<f64> {
    t.validate()?;
    if t.b == 0 || t.c == 0 {
        return Err(Error::domain("b·c is zero"));
    }
    Ok((f(t.a) * f(t.d)) / (f(t.b) * f(t.c)))
}

fn discordant_total(t: &Table2x2) -> Result<f64> {
    t.validate()?;
    if t.b + t.c == 0 {
        return Err(Error::domain("no discordant pairs (b + c = 0)"));
    }
    Ok(f(t.b + t.c))
}

pub fn z_correlated_proportions(t: &Table2x2) -> Result<TestResult> {
    let bc = discordant_total(t)?;
    let z = (f(t.b) - f(t.c)) / bc.sqrt();
    Ok(TestResult {
        statistic: z,
        df: None,
        p_value: Some(normal_two_sided(z)),
        method: "z_correlated_proportions".into(),
    })
}

fn chi_square_df1(statistic: f64, method: &str) -> TestResult {
    TestResult {
        statistic,
        df: Some(1),
        p_value: Some(chi_square_tail(statistic, 1)),
        method: method.into(),
    }
}

/// Pearson chi-square on a 2x2 table; the Yates form shrinks |ad − bc| by
/// n/2, floored at zero.
pub fn chi_square_2x2(t: &Table2x2, yates: bool) -> Result<TestResult> {
    t.validate()?;
    let den = margin_product(t)?;
    let n = f(t.n());
    let mut diff = cross_difference(t).abs();
    if yates {
        diff = (diff - n / 2.0).max(0.0);
    }
    let method = if yates { "chi_square_2x2_yates" } else { "chi_square_2x2" };
    Ok(chi_square_df1(n * diff * diff / den, method))
}

/// McNemar's test on the discordant cells b and c; the Yates form
/// shrinks |b − c| by 1, floored at zero.
pub fn mcnemar(t: &Table2x2, yates: bool) -> Result<TestResult> {
    let bc = discordant_total(t)?;
    let mut diff = (f(t.b) - f(t.c)).abs();
    if yates {
        diff = (diff - 1.0).max(0.0);
    }
    let method = if yates { "mcnemar_yates" } else { "mcnemar" };
    Ok(chi_square_df1(diff * diff / bc, method))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCounts {
    pub concordant: u128,
    pub discordant: u128,
}

impl PairCounts {
    /// Concordant and discordant pairs, with rows and columns both taken as
    /// ordered categories.
    pub fn of(t: &TableRxC) -> Self {
        let (r, c) = (t.rows(), t.cols());
        // s[i][j] = sum of cells with row >= i and column >= j.
        let mut s = vec![vec![0u128; c + 1]; r + 1];
        for i in (0..r).rev() {
            for j in (0..c).rev() {
                s[i][j] = u128::from(t.get(i, j)) + s[i + 1][j] + s[i][j + 1] - s[i + 1][j + 1];
            }
        }
        let (mut concordant, mut discordant) = (0u128, 0u128);
        for i in 0..r {
            for j in 0..c {
                let n = u128::from(t.get(i, j));
                concordant += n * s[i + 1][j + 1];
                discordant += n * (s[i + 1][0] - s[i + 1][j]);
            }
        }
        PairCounts { concordant, discordant }
    }

    fn difference(&self) -> f64 {
        self.concordant as f64 - self.discordant as f64
    }
}

pub fn gk_gamma(t: &TableRxC) -> Result<f64> {
    let p = PairCounts::of(t);
    let total = p.concordant + p.discordant;
    if total == 0 {
        return Err(Error::domain("no concordant or discordant pairs"));
    }
    Ok(p.difference() / total as f64)
}

pub fn kendall_tau_a(t: &TableRxC) -> Result<f64> {
    let n = t.n();
    if n < 2 {
        return Err(Error::domain("tau-a needs at least two observations"));
    }
    let pairs = f(n) * f(n - 1) / 2.0;
    Ok(PairCounts::of(t).difference() / pairs)
}

pub fn kendall_tau_c(t: &TableRxC) -> Result<f64> {
    let n = f(t.n());
    let m = t.rows().min(t.cols()) as f64;
    Ok(2.0 * m * PairCounts::of(t).difference() / (n * n * (m - 1.0)))
}

/// Pearson chi-square test of independence.
pub fn chi_square_rxc(t: &TableRxC) -> Result<TestResult> {
    let rows = t.row_totals();
    let cols = t.col_totals();
    if rows.contains(&0) || cols.contains(&0) {
        return Err(Error::domain("a row or column total is zero so an expected count is zero"));
    }
    let n = f(t.n());
    let mut statistic = 0.0;
    for (i, ri) in rows.iter().enumerate() {
        for (j, cj) in cols.iter().enumerate() {
            let e = f(*ri) * f(*cj) / n;
            let d = f(t.get(i, j)) - e;
            statistic += d * d / e;
        }
    }
    let df = ((t.rows() - 1) * (t.cols() - 1)) as u32;
    Ok(TestResult {
        statistic,
        df: Some(df),
        p_value: Some(chi_square_tail(statistic, df)),
        method: "chi_square_rxc".into(),
    })
}

// Expected proportions must sum to one within this.
const PROPORTION_TOLERANCE: f64 = 1e-9;

/// Goodness of fit of observed counts to expected category proportions.
pub fn chi_square_gof(observed: &[f64], expected: &[f64]) -> Result<TestResult> {
    if observed.len() < 2 {
        return Err(Error::validation("observed", "needs at least two categories"));
    }
    if observed.len() != expected.len() {
        return Err(Error::validation("expected", "length differs from observed"));
    }
    if observed.iter().any(|o| !o.is_finite() || *o < 0.0) {
        return Err(Error::validation("observed", "counts must be finite and non-negative"));
    }
    if expected.iter().any(|p| !p.is_finite() || *p <= 0.0) {
        return Err(Error::validation("expected", "proportions must be positive"));
    }
    if (expected.iter().sum::<f64>() - 1.0).abs() > PROPORTION_TOLERANCE {
        return Err(Error::validation("expected", "proportions must sum to 1"));
    }
    let total: f64 = observed.iter().sum();
    if total == 0.0 {
        return Err(Error::domain("observed counts are all zero"));
    }
    let statistic = observed
        .iter()
        .zip(expected)
        .map(|(o, p)| {
            let e = total * p;
            (o - e) * (o - e) / e
        })
        .sum();
    let df = (observed.len() - 1) as u32;
    Ok(TestResult {
        statistic,
        df: Some(df),
        p_value: Some(chi_square_tail(statistic, df)),
        method: "chi_square_gof".into(),
    })
}

/// Every 2x2 measure at once. Measures that are undefined for the table are
/// absent and their reason is listed in `undefined`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Table2x2Summary {
    pub measures: BTreeMap<String, f64>,
    pub tests: BTreeMap<String, TestResult>,
    pub undefined: BTreeMap<String, String>,
}

impl Table2x2Summary {
    pub fn compute(t: &Table2x2) -> Result<Self> {
        t.validate()?;
        let mut s = Table2x2Summary::default();
        let rxc = t.to_rxc();
        let measures: [(&str, Result<f64>); 8] = [
            ("phi", phi_coefficient(t)),
            ("kappa", cohens_kappa(t)),
            ("p1_minus_p2", proportion_difference(t)),
            ("relative_risk", relative_risk(t)),
            ("odds_ratio", odds_ratio(t)),
            ("gamma", gk_gamma(&rxc)),
            ("tau_a", kendall_tau_a(&rxc)),
            ("tau_c", kendall_tau_c(&rxc)),
        ];
        for (name, r) in measures {
            match r {
                Ok(v) => {
                    s.measures.insert(name.into(), v);
                }
                Err(e) => {
                    s.undefined.insert(name.into(), e.to_string());
                }
            }
        }
        let tests: [(&str, Result<TestResult>); 5] = [
            ("z_correlated_proportions", z_correlated_proportions(t)),
            ("chi_square", chi_square_2x2(t, false)),
            ("chi_square_yates", chi_square_2x2(t, true)),
            ("mcnemar", mcnemar(t, false)),
            ("mcnemar_yates", mcnemar(t, true)),
        ];
        for (name, r) in tests {
            match r {
                Ok(v) => {
                    s.tests.insert(name.into(), v);
                }
                Err(e) => {
                    s.undefined.insert(name.into(), e.to_string());
                }
            }
        }
        Ok(s)
    }
}
