use std::fmt::Write;
use std::path::Path;

use crate::error::Result;
use crate::eval::CornerAngleHistogram;

use super::write_atomic;

/// `key=value` lines in the given order.
pub fn report_text<K: AsRef<str>, V: AsRef<str>>(pairs: &[(K, V)]) -> String {
    let mut out = String::new();
    for (k, v) in pairs {
        let _ = writeln!(out, "{}={}", k.as_ref(), v.as_ref());
    }
    out
}

pub fn write_report<K: AsRef<str>, V: AsRef<str>>(pairs: &[(K, V)], path: &Path) -> Result<()> {
    write_atomic(path, report_text(pairs).as_bytes())
}

/// One `lower_edge_deg,count` row per bin after a header row.
pub fn histogram_csv(histogram: &CornerAngleHistogram) -> String {
    let mut out = String::from("lower_edge_deg,count\n");
    for (edge, count) in histogram.lower_edges().iter().zip(&histogram.counts) {
        let _ = writeln!(out, "{edge},{count}");
    }
    out
}

pub fn write_histogram_csv(histogram: &CornerAngleHistogram, path: &Path) -> Result<()> {
    write_atomic(path, histogram_csv(histogram).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats() {
        assert_eq!(report_text(&[("a", "1"), ("b", "x")]), "a=1\nb=x\n");
        let h = CornerAngleHistogram {
            bin_width_deg: 90.0,
            counts: vec![4, 2],
            degenerate_faces: vec![],
        };
        assert_eq!(histogram_csv(&h), "lower_edge_deg,count\n0,4\n90,2\n");
    }
}
