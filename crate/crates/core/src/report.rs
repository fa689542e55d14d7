//! Deterministic report bundles: one summary text plus one CSV per
//! experiment. Re-running a campaign with the same configuration reproduces
//! every byte (durations are deliberately excluded from the files; the CLI
//! prints them to the console instead).

use crate::experiments::ExperimentReport;
use std::io;
use std::path::Path;

#[derive(Debug, Clone)]
pub struct ReportBundle {
    pub summary: String,
    /// (file name, content) pairs, one CSV per experiment with samples
    pub files: Vec<(String, String)>,
}

impl ReportBundle {
    pub fn write_to_dir(&self, dir: &Path) -> io::Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("summary.txt"), &self.summary)?;
        for (name, content) in &self.files {
            std::fs::write(dir.join(name), content)?;
        }
        Ok(())
    }
}

pub fn all_passed(reports: &[ExperimentReport]) -> bool {
    reports.iter().all(|r| r.passed())
}

/// Assemble the bundle. Rows are printed in experiment order; every line
/// carries the measured value, the target with its provenance note, and a
/// PASS/FAIL (or info) status.
pub fn emit_report(reports: &[ExperimentReport]) -> ReportBundle {
    let mut summary = String::new();
    summary.push_str("experiment | quantity | measured | target | rel_dev | tol | status\n");
    summary.push_str(&"-".repeat(100));
    summary.push('\n');
    for rep in reports {
        summary.push_str(&format!("# {} [{}]\n", rep.name, rep.inputs));
        for row in &rep.rows {
            let rel = if row.target != 0.0 {
                format!("{:.3e}", ((row.measured - row.target) / row.target).abs())
            } else {
                "-".to_string()
            };
            let status = match (row.gate, row.passed) {
                (true, true) => "PASS",
                (true, false) => "FAIL",
                (false, true) => "pass (info)",
                (false, false) => "fail (info)",
            };
            summary.push_str(&format!(
                "{} | {} | {:.6e} | {:.6e} | {} | {:.1e} | {}  # {}\n",
                rep.name, row.quantity, row.measured, row.target, rel, row.tolerance, status, row.note
            ));
        }
    }
    summary.push_str(&"-".repeat(100));
    summary.push('\n');
    let gated: usize = reports.iter().map(|r| r.rows.iter().filter(|x| x.gate).count()).sum();
    let failed: usize = reports
        .iter()
        .map(|r| r.rows.iter().filter(|x| x.gate && !x.passed).count())
        .sum();
    summary.push_str(&format!(
        "overall: {} gated checks, {} failed -> {}\n",
        gated,
        failed,
        if failed == 0 { "PASS" } else { "FAIL" }
    ));

    let mut files = Vec::new();
    for rep in reports {
        if rep.samples.is_empty() {
            continue;
        }
        let mut csv = String::from("epsilon,quantity,value,error_estimate\n");
        for s in &rep.samples {
            csv.push_str(&format!(
                "{:.16e},{},{:.16e},{:.16e}\n",
                s.epsilon, s.quantity, s.value, s.error_estimate
            ));
        }
        files.push((format!("{}.csv", rep.name), csv));
    }
    ReportBundle { summary, files }
}
