//! Tidy CSV with a schema line. Floats use the shortest exponent form that
//! parses back to the same bits.

use std::fmt::Write as _;

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Flag(bool),
    Text(String),
}

impl Cell {
    fn render(&self, out: &mut String) {
        match self {
            Cell::Num(x) => write!(out, "{x:e}"),
            Cell::Int(i) => write!(out, "{i}"),
            Cell::Flag(b) => write!(out, "{b}"),
            Cell::Text(s) => write!(out, "{s}"),
        }
        .expect("writing to a String");
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Cell {
        Cell::Num(x)
    }
}

impl From<u64> for Cell {
    fn from(i: u64) -> Cell {
        Cell::Int(i)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Cell {
        Cell::Int(i as u64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Cell {
        Cell::Flag(b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// `name/version`, written as `# schema: name/version`.
    pub schema: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(schema: &'static str, columns: &[&'static str]) -> Table {
        Table { schema, columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = format!("# schema: {}\n{}\n", self.schema, self.columns.join(","));
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                cell.render(&mut out);
            }
            out.push('\n');
        }
        out
    }
}

/// A table read back as text.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedTable {
    pub schema: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl ParsedTable {
    pub fn parse(text: &str) -> Result<ParsedTable, CliError> {
        let bad = |why: &str| CliError::Parse(format!("csv: {why}"));
        let mut lines = text.lines();
        let schema = lines
            .next()
            .and_then(|l| l.strip_prefix("# schema: "))
            .ok_or_else(|| bad("missing schema line"))?
            .to_string();
        let columns: Vec<String> =
            lines.next().ok_or_else(|| bad("missing header"))?.split(',').map(str::to_string).collect();
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            let row: Vec<String> = line.split(',').map(str::to_string).collect();
            if row.len() != columns.len() {
                return Err(bad(&format!("row {i} has {} fields, header has {}", row.len(), columns.len())));
            }
            rows.push(row);
        }
        Ok(ParsedTable { schema, columns, rows })
    }

    pub fn column_f64(&self, name: &str) -> Result<Vec<f64>, CliError> {
        let j = self
            .columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| CliError::Parse(format!("csv: no column {name}")))?;
        self.rows
            .iter()
            .map(|r| {
                r[j].parse::<f64>().map_err(|_| CliError::Parse(format!("csv: {name} = {} is not a number", r[j])))
            })
            .collect()
    }
}
