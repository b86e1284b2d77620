use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cost::CostBreakdown;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    RlInit,
    RandomInit,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::RlInit => write!(f, "rl_init"),
            Method::RandomInit => write!(f, "random_init"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: String,
    pub method: Method,
    pub seed: u64,
    pub sa_steps: usize,
    pub final_cost: CostBreakdown,
    /// (step, best-so-far total cost), sampled every few steps.
    pub trace: Vec<(usize, f64)>,
    pub seconds: f64,
}

/// Writes `<stem>.json` with the full records and `<stem>.csv` with one
/// summary row per (instance, method) group.
pub fn write_results(records: &[RunRecord], stem: impl AsRef<Path>) -> Result<()> {
    let stem = stem.as_ref();
    let json_path = stem.with_extension("json");
    let csv_path = stem.with_extension("csv");

    let json = serde_json::to_string_pretty(records)?;
    std::fs::write(&json_path, json).map_err(|e| Error::io(&json_path, e))?;

    let mut groups: Vec<((String, Method), Vec<&RunRecord>)> = Vec::new();
    for r in records {
        let key = (r.instance.clone(), r.method);
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => v.push(r),
            None => groups.push((key, vec![r])),
        }
    }

    let mut w = csv::Writer::from_path(&csv_path).map_err(Error::from)?;
    w.write_record(["instance", "method", "n_runs", "mean_cost", "std_cost", "mean_seconds"])?;
    for ((instance, method), runs) in &groups {
        let costs: Vec<f64> = runs.iter().map(|r| r.final_cost.total).collect();
        let secs: Vec<f64> = runs.iter().map(|r| r.seconds).collect();
        w.write_record([
            instance.clone(),
            method.to_string(),
            runs.len().to_string(),
            format!("{}", mean(&costs)),
            format!("{}", std_dev(&costs)),
            format!("{}", mean(&secs)),
        ])?;
    }
    w.flush().map_err(|e| Error::io(&csv_path, e))?;
    Ok(())
}

pub fn read_results(stem: impl AsRef<Path>) -> Result<Vec<RunRecord>> {
    let path = stem.as_ref().with_extension("json");
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    Ok(serde_json::from_str(&text)?)
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation; 0 for fewer than two samples.
pub fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(method: Method, seed: u64, total: f64) -> RunRecord {
        RunRecord {
            instance: "t".into(),
            method,
            seed,
            sa_steps: 100,
            final_cost: CostBreakdown { area: total, wirelength: 0.0, total },
            trace: vec![(0, total + 5.0), (50, total + 1.0), (100, total)],
            seconds: 0.1,
        }
    }

    #[test]
    fn round_trip_and_summary_rows() {
        let dir = tempfile::tempdir().unwrap();
        let stem = dir.path().join("results");
        let records: Vec<RunRecord> = (0..10)
            .map(|i| record(Method::RlInit, i, 100.0 + i as f64))
            .chain((0..10).map(|i| record(Method::RandomInit, i, 110.0 + i as f64)))
            .collect();
        write_results(&records, &stem).unwrap();

        let back = read_results(&stem).unwrap();
        assert_eq!(back, records);

        let csv_text = std::fs::read_to_string(stem.with_extension("csv")).unwrap();
        let lines: Vec<&str> = csv_text.lines().collect();
        assert_eq!(lines.len(), 3); // header + 2 summary rows
        assert!(lines[1].starts_with("t,rl_init,10,"));
        assert!(lines[2].starts_with("t,random_init,10,"));
    }

    #[test]
    fn empty_list_writes_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let stem = dir.path().join("empty");
        write_results(&[], &stem).unwrap();
        let csv_text = std::fs::read_to_string(stem.with_extension("csv")).unwrap();
        assert_eq!(csv_text.lines().count(), 1);
        let json_text = std::fs::read_to_string(stem.with_extension("json")).unwrap();
        assert_eq!(json_text.trim(), "[]");
        assert!(read_results(&stem).unwrap().is_empty());
    }
}
