use std::fmt::Write as _;

use zrsim_core::experiments::write_table;
use zrsim_core::{fmt_sig, OutputFormat, SystemState};

use crate::args::Format;
use crate::error::CliError;

/// Rows of pre-formatted fields plus optional free text for human mode.
#[derive(Debug, Default)]
pub struct Report {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    /// Lines printed above the table in human mode.
    pub preamble: Vec<String>,
    /// Replaces the table in human mode.
    pub human: Option<String>,
}

pub const STATE_HEADER: [&str; 11] = [
    "config1",
    "config2",
    "q1",
    "q2",
    "x",
    "isp1",
    "isp2",
    "cp1",
    "cp2",
    "users_with_transport",
    "users_without_transport",
];

pub fn state_fields(s: &SystemState) -> Vec<String> {
    vec![
        s.m1.to_string(),
        s.m2.to_string(),
        fmt_sig(s.q1),
        fmt_sig(s.q2),
        fmt_sig(s.x),
        fmt_sig(s.isp1),
        fmt_sig(s.isp2),
        fmt_sig(s.cp1),
        fmt_sig(s.cp2),
        fmt_sig(s.users_with_transport),
        fmt_sig(s.users_without_transport),
    ]
}

pub fn opt_sig(v: Option<f64>) -> String {
    v.map(fmt_sig).unwrap_or_default()
}

impl Report {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self {
            header,
            ..Self::default()
        }
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>, CliError> {
        let mut buf = Vec::new();
        match format {
            Format::Csv => write_table(&mut buf, &self.header, &self.rows, OutputFormat::Csv)?,
            Format::JsonLines => write_table(&mut buf, &self.header, &self.rows, OutputFormat::JsonLines)?,
            Format::Human => {
                let mut text = String::new();
                for line in &self.preamble {
                    writeln!(text, "{line}").unwrap();
                }
                match &self.human {
                    Some(h) => text.push_str(h),
                    None if self.rows.len() == 1 => text.push_str(&self.vertical()),
                    None => text.push_str(&self.table()),
                }
                buf = text.into_bytes();
            }
        }
        Ok(buf)
    }

    fn vertical(&self) -> String {
        let width = self.header.iter().map(|h| h.len()).max().unwrap_or(0);
        let mut out = String::new();
        for (k, v) in self.header.iter().zip(&self.rows[0]) {
            let v = if v.is_empty() { "-" } else { v };
            writeln!(out, "{k:<width$}  {v}").unwrap();
        }
        out
    }

    pub fn table(&self) -> String {
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.len()).collect();
        for row in &self.rows {
            for (w, v) in widths.iter_mut().zip(row) {
                *w = (*w).max(v.len());
            }
        }
        let line = |cells: Vec<&str>| {
            let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            padded.join("  ").trim_end().to_string()
        };
        let mut out = String::new();
        writeln!(out, "{}", line(self.header.clone())).unwrap();
        for row in &self.rows {
            let cells = row
                .iter()
                .map(|v| if v.is_empty() { "-" } else { v.as_str() })
                .collect();
            writeln!(out, "{}", line(cells)).unwrap();
        }
        out
    }
}
