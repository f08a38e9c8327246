//! Text rendering: the five-column solution report, optimizer tables, sweep
//! CSV and simulation summaries. Values are rounded only here.

use std::fmt::Write as _;

use crate::network::SolutionReport;
use crate::optimizer::{HeterogeneousArray, Optimum};
use crate::sim::Comparison;

/// One line of the solution report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub metric: &'static str,
    pub resource: String,
    pub work: String,
    pub value: RowValue,
    pub unit: &'static str,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RowValue {
    Count(u32),
    Decimal(f64),
}

impl RowValue {
    fn render(&self) -> String {
        match self {
            RowValue::Count(n) => n.to_string(),
            RowValue::Decimal(x) => format!("{x:.4}"),
        }
    }
}

fn line(metric: &str, resource: &str, work: &str, value: &str, unit: &str) -> String {
    format!("{metric:<16}{resource:<13}{work:<10}{value:>13}   {unit}")
        .trim_end()
        .to_string()
}

impl ReportRow {
    pub fn render(&self) -> String {
        line(self.metric, &self.resource, &self.work, &self.value.render(), self.unit)
    }
}

pub fn report_rows(report: &SolutionReport) -> Vec<ReportRow> {
    let mut rows = Vec::new();
    let work = &report.workload;
    for node in &report.nodes {
        let row = |metric, value, unit| ReportRow {
            metric,
            resource: node.name.clone(),
            work: work.clone(),
            value,
            unit,
        };
        let m = &node.metrics;
        rows.push(row("Capacity", RowValue::Count(1), "Servers"));
        rows.push(row("Throughput", RowValue::Decimal(m.throughput), "Requests/Sec"));
        rows.push(row("Utilization", RowValue::Decimal(m.utilization * 100.0), "Percent"));
        rows.push(row("Queue length", RowValue::Decimal(m.queue_length), "Requests"));
        rows.push(row("Residence time", RowValue::Decimal(m.residence_time), "Sec"));
    }
    rows
}

pub fn render_solution(report: &SolutionReport) -> String {
    let mut out = String::new();
    out.push_str(&line("Metric", "Resource", "Work", "Value", "Unit"));
    out.push('\n');
    out.push_str(&line("------", "--------", "----", "-----", "----"));
    out.push('\n');
    let rows = report_rows(report);
    for (i, row) in rows.iter().enumerate() {
        if i > 0 && i % 5 == 0 {
            out.push('\n');
        }
        out.push_str(&row.render());
        out.push('\n');
    }
    if let Some(node) = report.nodes.first().filter(|n| n.multiplicity > 1) {
        let _ = writeln!(
            out,
            "\n({} stands for {} identical queues)",
            node.name, node.multiplicity
        );
    }
    out.push('\n');
    let _ = writeln!(
        out,
        "{}",
        line(
            "Throughput",
            "System",
            &report.workload,
            &format!("{:.4}", report.system_throughput),
            "Requests/Sec"
        )
    );
    let _ = writeln!(
        out,
        "{}",
        line(
            "Response time",
            "System",
            &report.workload,
            &format!("{:.4}", report.system_residence),
            "Sec"
        )
    );
    out
}

pub fn render_optimum(array: &HeterogeneousArray, opt: &Optimum) -> String {
    let m = array.len();
    let services = array.sorted_service_times();
    let fractions = opt.sorted_fractions();
    let mut out = String::new();
    let _ = writeln!(out, "{:<18} | {:<10} | {:>10}", "Service time", "Parameter", "Value");
    let _ = writeln!(out, "{:-<18}-+-{:-<10}-+-{:->10}", "", "", "");
    for (k, (s, p)) in services.iter().zip(&fractions).enumerate() {
        let _ = writeln!(
            out,
            "{:<18} | {:<10} | {:>10.6}",
            format!("S_{} = {}", k + 1, s),
            format!("phi_{}", k + 1),
            p
        );
    }
    let _ = writeln!(out, "{:-<18}-+-{:-<10}-+-{:->10}", "", "", "");
    let _ = writeln!(
        out,
        "{:<18} | {:<10} | {:>10.6}",
        "",
        format!("R*_{m}"),
        opt.response_time
    );
    let _ = writeln!(
        out,
        "\narrival rate {}, {} iterations, residual {:.3e}",
        array.agg_rate(),
        opt.iterations,
        opt.residual
    );
    out
}

/// One grid point of a dual-queue response-time profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub phi: f64,
    pub fast: f64,
    pub slow: f64,
    pub total: f64,
}

pub const SWEEP_HEADER: &str = "phi,r_fast,r_slow,r_total";

pub fn render_sweep(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 64);
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{},{},{},{}", r.phi, r.fast, r.slow, r.total);
    }
    out
}

pub fn render_comparison(label: &str, cmp: &Comparison) -> String {
    let (lo, hi) = cmp.stats.ci();
    let mut out = String::new();
    let _ = writeln!(out, "topology          {label}");
    let _ = writeln!(out, "analytic          {:.6}", cmp.analytic);
    let _ = writeln!(out, "simulated mean    {:.6}", cmp.stats.mean_residence);
    let _ = writeln!(out, "95% CI            [{lo:.6}, {hi:.6}] (half-width {:.6})", cmp.stats.half_width_95);
    let _ = writeln!(out, "completions       {}", cmp.stats.completions);
    for (i, u) in cmp.stats.per_node_utilization.iter().enumerate() {
        let _ = writeln!(out, "utilization[{}]    {:.4}", i + 1, u);
    }
    let _ = writeln!(out, "result            {}", if cmp.pass { "PASS" } else { "FAIL" });
    out
}
