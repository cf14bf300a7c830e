//! Sigma-point (unscented) estimates of a sign probability.
//!
//! Precision 3 uses the symmetric `2n+1` set `m ± √((n+κ) var_i) e_i`;
//! precision 5 uses `2n²+1` points with axial and pairwise offsets
//! `d_i = √3 std_i`. The probability is the plain fraction of propagated
//! points with a subcritical sign, zero not counted.

use serde::{Deserialize, Serialize};

use crate::distributions::Distribution;
use crate::error::{Error, Result};
use crate::models::BifurcationModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Precision {
    #[serde(rename = "3")]
    Three,
    #[serde(rename = "5")]
    Five,
}

impl Precision {
    pub fn from_order(p: u32) -> Result<Self> {
        match p {
            3 => Ok(Precision::Three),
            5 => Ok(Precision::Five),
            _ => Err(Error::domain("unscented", format!("precision {p} (use 3 or 5)"))),
        }
    }

    pub fn order(self) -> u32 {
        match self {
            Precision::Three => 3,
            Precision::Five => 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaPointSet {
    pub points: Vec<Vec<f64>>,
    pub precision: Precision,
    /// Only set for precision 3.
    pub kappa: Option<f64>,
}

impl SigmaPointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Precision-3 weights `κ/(n+κ)` for the centre and `1/(2(n+κ))` otherwise.
    pub fn weights(&self) -> Option<Vec<f64>> {
        let kappa = self.kappa?;
        let n = self.points[0].len() as f64;
        let mut w = vec![1.0 / (2.0 * (n + kappa)); self.points.len()];
        w[0] = kappa / (n + kappa);
        Some(w)
    }
}

fn moments(inputs: &[Distribution]) -> Result<(Vec<f64>, Vec<f64>)> {
    if inputs.is_empty() {
        return Err(Error::domain("sigma points", "need at least one input"));
    }
    for d in inputs {
        d.validate()?;
    }
    Ok(inputs.iter().map(|d| (d.mean(), d.variance())).unzip())
}

pub fn default_kappa(n: usize) -> f64 {
    3.0 - n as f64
}

pub fn sigma_points_p3(inputs: &[Distribution], kappa: f64) -> Result<SigmaPointSet> {
    let (mean, var) = moments(inputs)?;
    let n = mean.len();
    if !(n as f64 + kappa > 0.0) {
        return Err(Error::domain("sigma_points_p3", format!("n + kappa = {} must be positive", n as f64 + kappa)));
    }
    let mut points = vec![mean.clone()];
    for i in 0..n {
        let d = ((n as f64 + kappa) * var[i]).sqrt();
        for sign in [-1.0, 1.0] {
            let mut p = mean.clone();
            p[i] += sign * d;
            points.push(p);
        }
    }
    Ok(SigmaPointSet {
        points,
        precision: Precision::Three,
        kappa: Some(kappa),
    })
}

pub fn sigma_points_p5(inputs: &[Distribution]) -> Result<SigmaPointSet> {
    let (mean, var) = moments(inputs)?;
    let n = mean.len();
    let d: Vec<f64> = var.iter().map(|v| (3.0 * v).sqrt()).collect();
    let mut points = vec![mean.clone()];
    for i in 0..n {
        for sign in [-1.0, 1.0] {
            let mut p = mean.clone();
            p[i] += sign * d[i];
            points.push(p);
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for (si, sj) in [(-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0)] {
                let mut p = mean.clone();
                p[i] += si * d[i];
                p[j] += sj * d[j];
                points.push(p);
            }
        }
    }
    Ok(SigmaPointSet {
        points,
        precision: Precision::Five,
        kappa: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtEstimate {
    pub count: usize,
    pub total: usize,
    pub probability: f64,
    pub values: Vec<f64>,
    pub points: Vec<Vec<f64>>,
}

impl UtEstimate {
    pub fn fraction(&self) -> String {
        format!("{}/{}", self.count, self.total)
    }

    /// One row per point: coordinates, coefficient value, subcritical flag.
    pub fn to_csv(&self, model: BifurcationModel) -> String {
        let mut out = model.inputs().join(",");
        out.push_str(",value,subcritical\n");
        for (p, v) in self.points.iter().zip(&self.values) {
            for c in p {
                out.push_str(&format!("{c:.12e},"));
            }
            out.push_str(&format!("{v:.12e},{}\n", u8::from(model.is_subcritical(*v))));
        }
        out
    }
}

pub fn ut_sign_probability(model: BifurcationModel, sp: &SigmaPointSet) -> Result<UtEstimate> {
    if sp.points.iter().any(|p| p.len() != model.dim()) {
        return Err(Error::domain("ut_sign_probability", format!("{} expects {} inputs", model.name(), model.dim())));
    }
    let values: Vec<f64> = sp.points.iter().map(|p| model.eval_unchecked(p)).collect();
    let count = values.iter().filter(|&&v| model.is_subcritical(v)).count();
    Ok(UtEstimate {
        count,
        total: values.len(),
        probability: count as f64 / values.len() as f64,
        values,
        points: sp.points.clone(),
    })
}
