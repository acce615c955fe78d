//! Report serialization.

use std::io::Write;

use crossratio_core::SuiteReport;

use crate::config::Format;
use crate::CliError;

const CSV_HEADER: [&str; 9] =
    ["suite", "space", "samples", "seed", "max_violation", "tolerance", "pass", "failure_sample", "diagnostic"];

/// Write `report` in `format`. CSV has one row per listed failure, or a
/// single row with empty failure columns when there are none.
pub fn write_report(report: &SuiteReport, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, report).map_err(|e| CliError::Output(e.to_string()))?;
            writeln!(out).map_err(|e| CliError::Output(e.to_string()))
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            let csv_err = |e: csv::Error| CliError::Output(e.to_string());
            w.write_record(CSV_HEADER).map_err(csv_err)?;
            let head = [
                report.suite.clone(),
                report.space.clone(),
                report.samples.to_string(),
                report.seed.to_string(),
                report.max_violation.to_string(),
                report.tolerance.to_string(),
                report.pass.to_string(),
            ];
            if report.failures.is_empty() {
                w.write_record(head.iter().map(String::as_str).chain(["", ""])).map_err(csv_err)?;
            }
            for f in &report.failures {
                let id = f.sample.to_string();
                w.write_record(head.iter().map(String::as_str).chain([id.as_str(), f.diagnostic.as_str()]))
                    .map_err(csv_err)?;
            }
            w.flush().map_err(|e| CliError::Output(e.to_string()))
        }
    }
}

/// One line for the terminal.
pub fn summary(report: &SuiteReport) -> String {
    format!(
        "{} {} on {}: {} samples, max violation {:e} (tolerance {:e}), {} failure(s)",
        if report.pass { "PASS" } else { "FAIL" },
        report.suite,
        report.space,
        report.samples,
        report.max_violation,
        report.tolerance,
        report.failure_count,
    )
}
