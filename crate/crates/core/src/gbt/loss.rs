//! Loss functions and per-record gradient statistics.

use serde::{Deserialize, Serialize};

use super::GbtError;

/// First- and second-order gradient statistics of one record.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GradPair {
    pub g: f64,
    pub h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Loss {
    SquaredError,
    Logistic,
}

impl Loss {
    /// Pointwise loss l(pred, y).
    pub fn loss(self, pred: f64, y: f64) -> f64 {
        match self {
            Loss::SquaredError => 0.5 * (pred - y) * (pred - y),
            Loss::Logistic => {
                // numerically stable -[y ln p + (1-y) ln(1-p)] on the logit
                let p = sigmoid(pred);
                -(y * p.max(1e-15).ln() + (1.0 - y) * (1.0 - p).max(1e-15).ln())
            }
        }
    }

    pub fn grad(self, pred: f64, y: f64) -> GradPair {
        match self {
            Loss::SquaredError => GradPair { g: pred - y, h: 1.0 },
            Loss::Logistic => {
                let p = sigmoid(pred);
                GradPair { g: p - y, h: p * (1.0 - p) }
            }
        }
    }

    /// Starting prediction: mean label, or its log-odds for logistic loss.
    pub fn base_score(self, labels: &[f64]) -> f64 {
        if labels.is_empty() {
            return 0.0;
        }
        let mean = labels.iter().sum::<f64>() / labels.len() as f64;
        match self {
            Loss::SquaredError => mean,
            Loss::Logistic => {
                let p = mean.clamp(1e-6, 1.0 - 1e-6);
                (p / (1.0 - p)).ln()
            }
        }
    }
}

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Per-record g, h for the current predictions, plus the total loss.
pub fn compute_gradients(
    labels: &[f64],
    predictions: &[f64],
    loss: Loss,
) -> Result<(Vec<GradPair>, f64), GbtError> {
    if labels.len() != predictions.len() {
        return Err(GbtError::Shape(format!(
            "{} labels vs {} predictions",
            labels.len(),
            predictions.len()
        )));
    }
    let mut grads = Vec::with_capacity(labels.len());
    let mut total = 0.0;
    for (i, (&y, &pred)) in labels.iter().zip(predictions.iter()).enumerate() {
        if !pred.is_finite() {
            return Err(GbtError::NonFinitePrediction { record: i, value: pred });
        }
        grads.push(loss.grad(pred, y));
        total += loss.loss(pred, y);
    }
    Ok((grads, total))
}
