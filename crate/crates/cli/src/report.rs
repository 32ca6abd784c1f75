use std::fmt::Display;
use std::io::{self, Write};

use clap::ValueEnum;

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum StatsFormat {
    Human,
    Kv,
}

/// Ordered key/value stats, rendered as aligned text or `key=value` lines.
pub struct Report {
    rows: Vec<(&'static str, String)>,
}

impl Report {
    pub fn new() -> Self {
        Self { rows: Vec::new() }
    }

    pub fn add(&mut self, key: &'static str, value: impl Display) -> &mut Self {
        self.rows.push((key, value.to_string()));
        self
    }

    pub fn write<W: Write>(&self, format: StatsFormat, out: &mut W) -> io::Result<()> {
        match format {
            StatsFormat::Kv => {
                for (k, v) in &self.rows {
                    writeln!(out, "{k}={v}")?;
                }
            }
            StatsFormat::Human => {
                let width = self.rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
                for (k, v) in &self.rows {
                    writeln!(out, "{:width$}  {v}", format!("{k}:"), width = width + 1)?;
                }
            }
        }
        Ok(())
    }
}
