use std::fmt::Write as _;

use clap::ValueEnum;

use crate::run::{Cell, RunResult};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Plain decimal in the usual range, exponent notation outside it.
fn number(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn cell(c: &Cell) -> String {
    match c {
        Cell::Num(v) => number(*v),
        Cell::Text(s) => s.clone(),
    }
}

pub fn render(result: &RunResult, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(result).map_err(|e| CliError::Config(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let mut s = result.table.columns.join(",");
            s.push('\n');
            for row in &result.table.rows {
                let line: Vec<String> = row.iter().map(cell).collect();
                let _ = writeln!(s, "{}", line.join(","));
            }
            Ok(s)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for v in [0.0, 1.0, -2.5, 4000.0, 6.3795e-15, 1e-4, 123456.789012, 1e20] {
            assert_eq!(number(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(number(4000.0), "4000");
        assert_eq!(number(6.3795e-15), "6.3795e-15");
    }
}
