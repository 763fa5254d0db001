use std::io::{self, Write};

/// Figures recorded at the end of one sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepMetrics {
    /// 1-based sweep number.
    pub sweep: usize,
    pub wall_ms: f64,
    /// Size of the active frontier processed in this sweep.
    pub frontier: usize,
    pub relaxations: u64,
    /// States whose value decreased.
    pub improved: u64,
    /// Accounted cache bytes after sweep-end eviction.
    pub cache_bytes: usize,
    /// Frontier elements processed per millisecond.
    pub per_msec: f64,
}

impl SweepMetrics {
    pub const CSV_HEADER: &'static str = "sweep,wall_ms,frontier,relaxations,improved,cache_bytes,per_msec";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:.3},{},{},{},{},{:.3}",
            self.sweep, self.wall_ms, self.frontier, self.relaxations, self.improved, self.cache_bytes, self.per_msec
        )
    }
}

/// Writes the header and all rows, LF-terminated.
pub fn write_metrics_csv<W: Write>(mut out: W, rows: &[SweepMetrics]) -> io::Result<()> {
    writeln!(out, "{}", SweepMetrics::CSV_HEADER)?;
    for r in rows {
        writeln!(out, "{}", r.csv_row())?;
    }
    Ok(())
}
