//! CSV tables with a fixed number format.

use std::fmt::Write as _;

/// Significant digits written for every real number.
pub const SIG_DIGITS: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// Formats `v` with [`SIG_DIGITS`] significant digits, fixed-point where
/// the magnitude allows and scientific otherwise. Negative zero prints as 0.
pub fn format_real(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let mag = v.abs().log10().floor() as i32;
    let decimals = SIG_DIGITS as i32 - 1 - mag;
    if (0..=17).contains(&decimals) {
        format!("{:.*}", decimals as usize, v)
    } else {
        format!("{:.*e}", SIG_DIGITS - 1, v)
    }
}

fn render_cell(c: &Cell) -> String {
    match c {
        Cell::Real(v) => format_real(*v),
        Cell::Int(i) => i.to_string(),
        // Commas and line breaks would break the row structure.
        Cell::Text(s) => s.replace([',', '\n', '\r'], ";"),
        Cell::Empty => String::new(),
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.header.join(","));
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(render_cell).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(format_real(-0.0), "0");
        assert_eq!(format_real(-0.15), "-0.150000000000");
        assert_eq!(format_real(0.5684703033661991), "0.568470303366");
        assert_eq!(format_real(1234.5), "1234.50000000");
        assert_eq!(format_real(1e-30), "1.00000000000e-30");
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(["a", "b", "c"]);
        t.push(vec![1usize.into(), 0.25.into(), "x,y".into()]);
        assert_eq!(t.to_csv(), "a,b,c\n1,0.250000000000,x;y\n");
    }
}
