//! Cross-strategy comparison report: a machine-readable JSON document plus
//! an aligned plain-text rendering of the comparison, histogram, and timing
//! tables. Given identical inputs the JSON layout is stable across runs,
//! timing fields excepted.

use serde::Serialize;

use crate::bench::{BenchmarkSummary, QdLabel};

/// Qualitative run-time class by rank of mean per-query time: the fastest
/// strategy performs High, the slowest Low.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RankLabel {
    High,
    Medium,
    Low,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategyReport {
    pub runtime_class: RankLabel,
    #[serde(flatten)]
    pub summary: BenchmarkSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub strategies: Vec<StrategyReport>,
}

pub fn compare_report(summaries: &[BenchmarkSummary]) -> Report {
    let mut order: Vec<usize> = (0..summaries.len()).collect();
    order.sort_by_key(|&i| summaries[i].timing.mean_ns);

    let mut classes = vec![RankLabel::Medium; summaries.len()];
    if let Some(&fastest) = order.first() {
        classes[fastest] = RankLabel::High;
    }
    if summaries.len() >= 2 {
        classes[*order.last().expect("non-empty")] = RankLabel::Low;
    }

    Report {
        strategies: summaries
            .iter()
            .zip(classes)
            .map(|(summary, runtime_class)| StrategyReport {
                runtime_class,
                summary: summary.clone(),
            })
            .collect(),
    }
}

fn rank_str(label: RankLabel) -> &'static str {
    match label {
        RankLabel::High => "High",
        RankLabel::Medium => "Medium",
        RankLabel::Low => "Low",
    }
}

fn qd_str(label: QdLabel) -> &'static str {
    match label {
        QdLabel::Low => "Low",
        QdLabel::Medium => "Medium",
        QdLabel::High => "High",
    }
}

fn ms(ns: u64) -> f64 {
    ns as f64 / 1_000_000.0
}

fn render_row(cells: &[String], widths: &[usize], out: &mut String) {
    for (i, cell) in cells.iter().enumerate() {
        if i + 1 == cells.len() {
            out.push_str(cell);
        } else {
            out.push_str(&format!("{:<width$}  ", cell, width = widths[i]));
        }
    }
    out.push('\n');
}

fn render_table(rows: &[Vec<String>], out: &mut String) {
    let columns = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..columns)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(String::len).max().unwrap_or(0))
        .collect();
    for row in rows {
        render_row(row, &widths, out);
    }
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    /// Aligned plain-text tables: the algorithm comparison, then one
    /// result-set length table and timing line per strategy.
    pub fn to_text(&self) -> String {
        let mut out = String::new();

        let mut rows = vec![vec![
            "Algorithm".to_string(),
            "Run-time Performance".to_string(),
            "Query Dependency".to_string(),
        ]];
        for s in &self.strategies {
            rows.push(vec![
                s.summary.strategy.clone(),
                rank_str(s.runtime_class).to_string(),
                qd_str(s.summary.query_dependency.label).to_string(),
            ]);
        }
        render_table(&rows, &mut out);

        for s in &self.strategies {
            out.push('\n');
            out.push_str(&format!(
                "[{}] result-set length over {} runs\n",
                s.summary.strategy, s.summary.run.iterations
            ));
            let mut header = vec!["Output length".to_string()];
            header.extend(s.summary.histogram.bins.iter().map(|b| b.label.clone()));
            header.push("Sum".to_string());
            let mut amount = vec!["Amount".to_string()];
            amount.extend(s.summary.histogram.bins.iter().map(|b| b.count.to_string()));
            amount.push(s.summary.histogram.total.to_string());
            let mut pct = vec!["Proportion %".to_string()];
            pct.extend(s.summary.proportions.iter().map(|p| format!("{p:.1}")));
            pct.push("100".to_string());
            render_table(&[header, amount, pct], &mut out);
            let t = &s.summary.timing;
            out.push_str(&format!(
                "setup {:.1} ms | queries total {:.1} ms | mean {:.3} ms | p50 {:.3} ms | p95 {:.3} ms\n",
                ms(t.setup_ns),
                ms(t.total_ns),
                ms(t.mean_ns),
                ms(t.p50_ns),
                ms(t.p95_ns),
            ));
            let qd = &s.summary.query_dependency;
            out.push_str(&format!(
                "query dependency: empty rate {:.3}, length cv {:.3}, score {:.3} -> {}\n",
                qd.empty_rate,
                qd.length_cv,
                qd.score,
                qd_str(qd.label),
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{
        bin_lengths, query_dependency, BinScheme, RunConfig, StrategySpec, TimingStats,
    };
    use crate::strategy::ThresholdConfig;

    fn summary_with_mean(name: &str, mean_ns: u64) -> BenchmarkSummary {
        let lengths = [4usize, 5, 6];
        let histogram = bin_lengths(&lengths, BinScheme::Content);
        let proportions = crate::bench::proportions(&histogram).unwrap();
        BenchmarkSummary {
            strategy: name.to_string(),
            histogram,
            proportions,
            timing: TimingStats {
                setup_ns: 0,
                total_ns: mean_ns * 3,
                mean_ns,
                p50_ns: mean_ns,
                p95_ns: mean_ns,
            },
            query_dependency: query_dependency(&lengths).unwrap(),
            config: StrategySpec::Threshold {
                config: ThresholdConfig::default(),
            },
            run: RunConfig {
                iterations: 3,
                seed: 0,
                txn_len: 4,
            },
        }
    }

    #[test]
    fn runtime_classes_follow_mean_query_time_rank() {
        // 0.1 ms < 2 ms < 40 ms
        let summaries = vec![
            summary_with_mean("content", 100_000),
            summary_with_mean("threshold", 2_000_000),
            summary_with_mean("kmeans", 40_000_000),
        ];
        let report = compare_report(&summaries);
        let classes: Vec<RankLabel> =
            report.strategies.iter().map(|s| s.runtime_class).collect();
        assert_eq!(classes, [RankLabel::High, RankLabel::Medium, RankLabel::Low]);
    }

    #[test]
    fn single_summary_gets_one_row() {
        let report = compare_report(&[summary_with_mean("content", 5)]);
        assert_eq!(report.strategies.len(), 1);
        assert_eq!(report.strategies[0].runtime_class, RankLabel::High);
    }

    #[test]
    fn json_layout_is_stable_for_identical_inputs() {
        let summaries = vec![summary_with_mean("threshold", 10)];
        assert_eq!(
            compare_report(&summaries).to_json(),
            compare_report(&summaries).to_json()
        );
    }

    #[test]
    fn text_table_contains_comparison_and_histogram_rows() {
        let report = compare_report(&[
            summary_with_mean("content", 1),
            summary_with_mean("threshold", 2),
        ]);
        let text = report.to_text();
        assert!(text.contains("Run-time Performance"));
        assert!(text.contains("Query Dependency"));
        assert!(text.contains("Output length"));
        assert!(text.contains("Proportion %"));
        assert!(text.contains("Sum"));
    }
}
