use serde::Serialize;

/// Version of the structured report document layout.
pub const SCHEMA_VERSION: u32 = 1;

/// A harness result that renders as a line table and as a structured record.
pub trait Report: Serialize {
    /// Short name used as the document's `kind`.
    fn kind(&self) -> &'static str;

    /// Whether every checked property held.
    fn passed(&self) -> bool;

    /// Header line followed by one line per row.
    fn table_lines(&self) -> Vec<String>;
}

/// Self-describing wrapper around a list of reports of one kind.
#[derive(Serialize)]
pub struct Document<'a, R: Report> {
    pub schema_version: u32,
    pub kind: &'static str,
    pub passed: bool,
    pub records: &'a [R],
}

impl<'a, R: Report> Document<'a, R> {
    pub fn new(kind: &'static str, records: &'a [R]) -> Self {
        Document {
            schema_version: SCHEMA_VERSION,
            kind,
            passed: records.iter().all(Report::passed),
            records,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// Renders reports as an aligned whitespace table, header first.
pub fn render_table<R: Report>(records: &[R]) -> String {
    let mut rows: Vec<Vec<String>> = Vec::new();
    for (i, r) in records.iter().enumerate() {
        let lines = r.table_lines();
        let skip = usize::from(i > 0);
        rows.extend(
            lines
                .into_iter()
                .skip(skip)
                .map(|l| l.split('\t').map(str::to_owned).collect()),
        );
    }
    // single-cell rows are notes and do not take part in alignment
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| {
            rows.iter()
                .filter(|r| r.len() > 1)
                .filter_map(|r| r.get(c))
                .map(String::len)
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in rows {
        if row.len() == 1 {
            out.push_str(&row[0]);
            out.push('\n');
            continue;
        }
        let cells: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, cell)| format!("{cell:>w$}", w = widths[c]))
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}
