//! Fit results in JSON and TSV form.

use serde::{Deserialize, Serialize};
use stepfit::{Diagnostics, Fit, FitReport, Point};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentOut {
    pub x_left: f64,
    pub x_right: f64,
    pub y: f64,
}

/// Solver counters. Wall time is left out so that output depends only on the
/// input and the engine.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsOut {
    pub rounds: usize,
    pub pruned_per_round: Vec<usize>,
    pub big_indices: Vec<usize>,
    pub one_center_rounds: usize,
    pub violations: usize,
    pub fallbacks: usize,
    pub max_depth: usize,
}

impl From<&Diagnostics> for DiagnosticsOut {
    fn from(d: &Diagnostics) -> Self {
        DiagnosticsOut {
            rounds: d.rounds,
            pruned_per_round: d.pruned_per_round.clone(),
            big_indices: d.big_indices.clone(),
            one_center_rounds: d.one_center_rounds,
            violations: d.violations,
            fallbacks: d.fallbacks,
            max_depth: d.max_depth,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitOutput {
    pub cost: f64,
    pub segments: Vec<SegmentOut>,
    /// Prefix counts: points covered by the first `i + 1` segments.
    pub boundaries: Vec<usize>,
    pub engine: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<DiagnosticsOut>,
}

fn segments(fit: &Fit) -> Vec<SegmentOut> {
    fit.segments()
        .iter()
        .map(|s| SegmentOut {
            x_left: s.x_left,
            x_right: s.x_right,
            y: s.y,
        })
        .collect()
}

impl FitOutput {
    pub fn from_report(r: &FitReport<f64>) -> Self {
        FitOutput {
            cost: r.cost,
            segments: segments(&r.fit),
            boundaries: r.boundaries.clone(),
            engine: "prune".into(),
            diagnostics: Some((&r.diagnostics).into()),
        }
    }

    pub fn from_oracle(points: &[Point], fit: &Fit, cost: f64) -> Self {
        let mut boundaries = vec![0; fit.k()];
        for p in points {
            let i = fit.segment_index(p.x).expect("point inside the domain");
            boundaries[i] += 1;
        }
        for i in 1..boundaries.len() {
            boundaries[i] += boundaries[i - 1];
        }
        FitOutput {
            cost,
            segments: segments(fit),
            boundaries,
            engine: "oracle".into(),
            diagnostics: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("fit output serializes")
    }

    pub fn to_tsv(&self) -> String {
        let mut s = format!("# cost={}\n", self.cost);
        for seg in &self.segments {
            s += &format!("{}\t{}\t{}\n", seg.x_left, seg.x_right, seg.y);
        }
        s
    }
}
