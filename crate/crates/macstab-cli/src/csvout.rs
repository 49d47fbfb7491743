//! CSV artifacts: semicolon separators, `.` decimal points, mandatory
//! headers. Schedules are rendered with commas (`1,0`) so they never collide
//! with the field separator.

use std::path::Path;

use macstab_core::{asymptotic_rates_limit, ScheduleCatalog, SimStats};

use crate::error::CliError;

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>, CliError> {
    Ok(csv::WriterBuilder::new()
        .delimiter(b';')
        .flexible(true)
        .from_path(path)?)
}

/// One row per serving schedule (`schedule;N;v_1..v_J;Rbar_1..Rbar_J`),
/// then one row per boundary probe (`region;dir_1..dir_J;radius`).
pub fn write_regions(
    path: &Path,
    catalog: &ScheduleCatalog,
    boundary: &[(&'static str, Vec<f64>, f64)],
) -> Result<(usize, usize), CliError> {
    let j = catalog.transmitters();
    let mut out = writer(path)?;

    let mut header = vec!["schedule".to_string(), "N".to_string()];
    header.extend((1..=j).map(|q| format!("v_{q}")));
    header.extend((1..=j).map(|q| format!("Rbar_{q}")));
    out.write_record(&header)?;

    let channel = catalog.config().channel();
    let mut catalog_rows = 0;
    for idx in catalog.serving_indices().collect::<Vec<_>>() {
        let s = catalog.schedule(idx);
        let n = catalog.length(idx).expect("serving schedule has a length");
        let limit = asymptotic_rates_limit(channel, s)?;
        let mut row = vec![s.to_string(), n.to_string()];
        row.extend(catalog.service_rates(idx).iter().map(|v| v.to_string()));
        row.extend(limit.iter().map(|r| r.to_string()));
        out.write_record(&row)?;
        catalog_rows += 1;
    }

    let mut boundary_header = vec!["region".to_string()];
    boundary_header.extend((1..=j).map(|q| format!("dir_{q}")));
    boundary_header.push("radius".to_string());
    out.write_record(&boundary_header)?;

    for (region, direction, radius) in boundary {
        let mut row = vec![region.to_string()];
        row.extend(direction.iter().map(|d| d.to_string()));
        row.push(radius.to_string());
        out.write_record(&row)?;
    }
    out.flush().map_err(|e| CliError::Io(e.to_string()))?;
    Ok((catalog_rows, boundary.len()))
}

/// Decimated backlog and workload series of one run: `slot;backlog;workload`.
pub fn write_series(path: &Path, stats: &SimStats) -> Result<usize, CliError> {
    let mut out = writer(path)?;
    out.write_record(["slot", "backlog", "workload"])?;
    let mut rows = 0;
    for ((slot, backlog), (_, workload)) in
        stats.backlog_series.iter().zip(stats.workload_series.iter())
    {
        out.write_record([slot.to_string(), backlog.to_string(), workload.to_string()])?;
        rows += 1;
    }
    out.flush().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(rows)
}
