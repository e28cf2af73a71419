//! CSV serialization of analysis tables.
//!
//! Floats are written with 17 significant digits (trailing zeros trimmed), so
//! every value parses back to the identical `f64`.

use crate::freq::PeriodReport;
use crate::layout::{PositionTable, TokenKind};
use crate::niah::SweepGrid;

pub const PERIODS_HEADER: [&str; 4] = ["pair", "theta", "period", "half_period"];
pub const SCAN_HEADER: [&str; 2] = ["delta", "distance"];
pub const POSITIONS_HEADER: [&str; 8] = ["idx", "kind", "frame", "w", "h", "t", "x", "y"];
pub const SWEEP_HEADER: [&str; 2] = ["frames", "depth"];
pub const OSCILLATION_HEADER: [&str; 3] = ["t", "pair", "value"];

/// Round-trip exact decimal rendering of `v`.
pub fn format_f64(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return if v.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let digits = digits.trim_end_matches('0');

    if !(-7..21).contains(&exp) {
        let (head, tail) = digits.split_at(1);
        return if tail.is_empty() {
            format!("{sign}{head}e{exp}")
        } else {
            format!("{sign}{head}.{tail}e{exp}")
        };
    }
    let body = if exp < 0 {
        format!("0.{}{digits}", "0".repeat((-exp - 1) as usize))
    } else {
        let int_len = exp as usize + 1;
        if digits.len() <= int_len {
            format!("{digits}{}", "0".repeat(int_len - digits.len()))
        } else {
            format!("{}.{}", &digits[..int_len], &digits[int_len..])
        }
    };
    format!("{sign}{body}")
}

fn write_csv<I, R>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

pub fn period_table_csv(rows: &[PeriodReport]) -> String {
    write_csv(
        &PERIODS_HEADER,
        rows.iter().map(|r| {
            [
                r.pair_index.to_string(),
                format_f64(r.theta),
                format_f64(r.period),
                format_f64(r.half_period),
            ]
        }),
    )
}

pub fn scan_csv(distances: &[(u64, f64)]) -> String {
    write_csv(
        &SCAN_HEADER,
        distances
            .iter()
            .map(|&(d, v)| [d.to_string(), format_f64(v)]),
    )
}

/// `idx,kind,frame,w,h,t,x,y`; frame and patch cells are empty for text.
pub fn position_table_csv(table: &PositionTable) -> String {
    let opt = |v: Option<usize>| v.map(|v| v.to_string()).unwrap_or_default();
    write_csv(
        &POSITIONS_HEADER,
        table.entries().iter().enumerate().map(|(idx, e)| {
            let kind = match e.kind {
                TokenKind::Text => "text",
                TokenKind::Visual => "visual",
            };
            [
                idx.to_string(),
                kind.to_string(),
                opt(e.frame),
                opt(e.patch.map(|p| p.0)),
                opt(e.patch.map(|p| p.1)),
                format_f64(e.position.t),
                format_f64(e.position.x),
                format_f64(e.position.y),
            ]
        }),
    )
}

pub fn sweep_grid_csv(grid: &SweepGrid) -> String {
    write_csv(
        &SWEEP_HEADER,
        grid.cells().map(|(f, d)| [f.to_string(), format_f64(d)]),
    )
}

/// Rows of `(t, pair, value)`.
pub fn oscillation_csv(samples: &[(f64, usize, f64)]) -> String {
    write_csv(
        &OSCILLATION_HEADER,
        samples
            .iter()
            .map(|&(t, n, v)| [format_f64(t), n.to_string(), format_f64(v)]),
    )
}
