//! Metric report: per-record values plus dataset means.

use serde::Serialize;

use super::ApBlock;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RecordMetrics {
    pub iou: f64,
    pub biou: f64,
    pub e_phi: f64,
    pub f_beta_w: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RecordEntry {
    pub image: String,
    #[serde(flatten)]
    pub metrics: RecordMetrics,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanMetrics {
    pub iou: f64,
    pub biou: f64,
    pub e_phi: f64,
    pub f_beta_w: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricReport {
    pub records: Vec<RecordEntry>,
    pub mean: MeanMetrics,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ap: Option<ApBlock>,
}

impl MetricReport {
    /// Builds a report from per-record metrics; the mean is the arithmetic
    /// mean taken in record order.
    pub fn from_records(records: Vec<RecordEntry>, ap: Option<ApBlock>) -> MetricReport {
        let n = records.len().max(1) as f64;
        let mut sums = [0.0f64; 4];
        for r in &records {
            sums[0] += r.metrics.iou;
            sums[1] += r.metrics.biou;
            sums[2] += r.metrics.e_phi;
            sums[3] += r.metrics.f_beta_w;
        }
        let mean = MeanMetrics {
            iou: sums[0] / n,
            biou: sums[1] / n,
            e_phi: sums[2] / n,
            f_beta_w: sums[3] / n,
        };
        MetricReport { records, mean, ap }
    }
}
