use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Non-empty list of finite reals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Sample(Vec<f64>);

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::validation("values", "sample is empty"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("values", "every value must be finite"));
        }
        Ok(Sample(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.0.iter().sum::<f64>() / self.0.len() as f64
    }
}

impl TryFrom<Vec<f64>> for Sample {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Sample::new(v)
    }
}

impl From<Sample> for Vec<f64> {
    fn from(s: Sample) -> Self {
        s.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Descriptive {
    pub n: usize,
    pub mean: f64,
    pub median: f64,
    pub variance: f64,
    pub stdev: f64,
    pub std_error: f64,
    pub min: f64,
    pub max: f64,
    pub range: f64,
}

/// Sample variance with the n − 1 denominator.
pub fn variance(sample: &Sample) -> Result<f64> {
    let n = sample.len();
    if n < 2 {
        return Err(Error::domain("variance needs at least two values"));
    }
    let m = sample.mean();
    let ss: f64 = sample.values().iter().map(|v| (v - m) * (v - m)).sum();
    Ok(ss / (n - 1) as f64)
}

pub fn descriptive(sample: &Sample) -> Result<Descriptive> {
    let var = variance(sample)?;
    let mut sorted = sample.values().to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    };
    let stdev = var.sqrt();
    let (min, max) = (sorted[0], sorted[n - 1]);
    Ok(Descriptive {
        n,
        mean: sample.mean(),
        median,
        variance: var,
        stdev,
        std_error: stdev / (n as f64).sqrt(),
        min,
        max,
        range: max - min,
    })
}
