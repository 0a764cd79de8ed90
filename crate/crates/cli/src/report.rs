//! Deterministic CSV/JSON rendering of sweep reports: identical seed and
//! configuration produce byte-identical output.

use std::io;
use std::path::{Path, PathBuf};

use crate::config::OutputFormat;
use crate::svg::region_map_svg;
use crate::sweep::SweepReport;

/// CSV with the stable header `p,q,ratio,trend`.
pub fn sweep_csv(report: &SweepReport) -> String {
    let mut out = String::from("p,q,ratio,trend\n");
    for point in &report.points {
        out.push_str(&format!(
            "{},{},{},{}\n",
            point.p, point.q, point.max_ratio, point.trend
        ));
    }
    out
}

pub fn sweep_json(report: &SweepReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

/// Writes the requested artifacts into `dir`, returning the paths written.
pub fn write_sweep_outputs(
    report: &SweepReport,
    dir: &Path,
    formats: &[OutputFormat],
) -> io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for format in formats {
        let (name, payload) = match format {
            OutputFormat::Csv => ("sweep.csv", sweep_csv(report)),
            OutputFormat::Json => ("sweep.json", sweep_json(report)),
            OutputFormat::Svg => ("sweep.svg", region_map_svg(report)),
        };
        let path = dir.join(name);
        std::fs::write(&path, payload)?;
        written.push(path);
    }
    Ok(written)
}
