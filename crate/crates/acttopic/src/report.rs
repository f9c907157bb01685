//! Rendering of density tables, metrics and topic feature lists.
//!
//! The LaTeX form of a density table follows the layout of the usual
//! "topics × labels" tabular:
//!
//! ```text
//! \begin{tabular}{ |c|c|c|c|c|c| }
//! \hline
//! topics & food & menu & inside & drink & outside \\
//! \hline
//! 0 & 5095 & 1 & 40 & 2 & 9 \\
//! \hline
//! ...
//! \end{tabular}
//! ```

use std::fmt::Write as _;
use std::str::FromStr;

use acttopic_core::eval::{ContingencyTable, TopicReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Text,
    Csv,
    Latex,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Text => "txt",
            ReportFormat::Csv => "csv",
            ReportFormat::Latex => "tex",
        }
    }
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "text" => Ok(ReportFormat::Text),
            "csv" => Ok(ReportFormat::Csv),
            "latex" => Ok(ReportFormat::Latex),
            other => Err(format!(
                "unknown report format {other:?} (text, csv, latex)"
            )),
        }
    }
}

fn topic_name(table: &ContingencyTable, t: usize) -> String {
    match table.nickname(t) {
        Some(n) => format!("{t} ({n})"),
        None => t.to_string(),
    }
}

fn latex_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' | '%' | '$' | '#' | '_' | '{' | '}' => {
                out.push('\\');
                out.push(c);
            }
            '~' => out.push_str("\\textasciitilde{}"),
            '^' => out.push_str("\\textasciicircum{}"),
            '\\' => out.push_str("\\textbackslash{}"),
            _ => out.push(c),
        }
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Cell strings of a density table: raw counts, or row percentages with
/// one decimal.
fn cells(table: &ContingencyTable, percent: bool) -> Vec<Vec<String>> {
    let pct = percent.then(|| table.row_percentages());
    (0..table.topics())
        .map(|t| {
            (0..table.labels().len())
                .map(|l| match &pct {
                    Some(p) => format!("{:.1}", p[(t, l)]),
                    None => table.counts()[(t, l)].to_string(),
                })
                .collect()
        })
        .collect()
}

pub fn render_density(table: &ContingencyTable, format: ReportFormat, percent: bool) -> String {
    let body = cells(table, percent);
    let mut out = String::new();
    match format {
        ReportFormat::Latex => {
            let spec = "|c".repeat(table.labels().len() + 1);
            let _ = writeln!(out, "\\begin{{tabular}}{{ {spec}| }}");
            out.push_str("\\hline\n");
            let header: Vec<String> = table.labels().iter().map(|l| latex_escape(l)).collect();
            let _ = writeln!(out, "topics & {} \\\\", header.join(" & "));
            out.push_str("\\hline\n");
            for (t, row) in body.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{} & {} \\\\",
                    latex_escape(&topic_name(table, t)),
                    row.join(" & ")
                );
                out.push_str("\\hline\n");
            }
            out.push_str("\\end{tabular}\n");
        }
        ReportFormat::Csv => {
            let mut header = vec!["topic".to_string()];
            header.extend(table.labels().iter().map(|l| csv_field(l)));
            let _ = writeln!(out, "{}", header.join(","));
            for (t, row) in body.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{}",
                    csv_field(&topic_name(table, t)),
                    row.join(",")
                );
            }
        }
        ReportFormat::Text => {
            let totals = table.row_totals();
            let mut grid: Vec<Vec<String>> = Vec::new();
            let mut header = vec!["topics".to_string()];
            header.extend(table.labels().iter().cloned());
            header.push("total".into());
            grid.push(header);
            for (t, row) in body.into_iter().enumerate() {
                let mut line = vec![topic_name(table, t)];
                line.extend(row);
                line.push(totals[t].to_string());
                grid.push(line);
            }
            let widths: Vec<usize> = (0..grid[0].len())
                .map(|c| grid.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
                .collect();
            for row in &grid {
                let mut line = String::new();
                for (c, cell) in row.iter().enumerate() {
                    if c == 0 {
                        let _ = write!(line, "{cell:<w$}", w = widths[0]);
                    } else {
                        let _ = write!(line, "  {cell:>w$}", w = widths[c]);
                    }
                }
                out.push_str(line.trim_end());
                out.push('\n');
            }
        }
    }
    out
}

pub fn render_topics(report: &TopicReport, format: ReportFormat) -> String {
    let mut out = String::new();
    match format {
        ReportFormat::Latex => {
            let k = report.rows.iter().map(Vec::len).max().unwrap_or(0);
            let spec = "|c".repeat(k + 1);
            let _ = writeln!(out, "\\begin{{tabular}}{{ {spec}| }}");
            out.push_str("\\hline\n");
            let ranks: Vec<String> = (1..=k).map(|r| r.to_string()).collect();
            let _ = writeln!(out, "topics & {} \\\\", ranks.join(" & "));
            out.push_str("\\hline\n");
            for (t, row) in report.rows.iter().enumerate() {
                let names: Vec<String> = row.iter().map(|f| latex_escape(&f.surface)).collect();
                let _ = writeln!(out, "{t} & {} \\\\", names.join(" & "));
                out.push_str("\\hline\n");
            }
            out.push_str("\\end{tabular}\n");
        }
        ReportFormat::Csv => {
            out.push_str("topic,rank,token,weight\n");
            for (t, row) in report.rows.iter().enumerate() {
                for (r, f) in row.iter().enumerate() {
                    let _ = writeln!(
                        out,
                        "{t},{},{},{:.6}",
                        r + 1,
                        csv_field(&f.surface),
                        f.weight
                    );
                }
            }
        }
        ReportFormat::Text => {
            for (t, row) in report.rows.iter().enumerate() {
                let items: Vec<String> = row
                    .iter()
                    .map(|f| format!("{} ({:.4})", f.surface, f.weight))
                    .collect();
                let _ = writeln!(out, "{t}: {}", items.join(", "));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub labeled: u64,
    pub skipped: usize,
    pub purity: f64,
    pub nmi: f64,
}

pub fn render_metrics(m: &Metrics) -> String {
    format!(
        "labeled_docs\t{}\nunlabeled_docs\t{}\npurity\t{:.6}\nnmi\t{:.6}\n",
        m.labeled, m.skipped, m.purity, m.nmi
    )
}
