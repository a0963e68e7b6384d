//! Tab-separated and JSON rendering for the tables every command prints.

use serde_json::json;

pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render_tsv(&self) -> String {
        let mut out = self.columns.join("\t");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join("\t"));
            out.push('\n');
        }
        out
    }

    pub fn render_json(&self) -> String {
        let v = json!({
            "columns": self.columns,
            "rows": self.rows,
        });
        let mut out = serde_json::to_string_pretty(&v).expect("tables serialize");
        out.push('\n');
        out
    }

    pub fn render(&self, format: &str) -> String {
        match format {
            "json" => self.render_json(),
            _ => self.render_tsv(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tsv_lists_header_then_rows() {
        let mut t = Table::new(vec!["weight", "degree", "betti"]);
        t.push(vec!["1".into(), "0".into(), "1".into()]);
        t.push(vec!["2".into(), "1".into(), "0".into()]);
        assert_eq!(t.render_tsv(), "weight\tdegree\tbetti\n1\t0\t1\n2\t1\t0\n");
    }

    #[test]
    fn json_mirrors_the_tsv_content() {
        let mut t = Table::new(vec!["a"]);
        t.push(vec!["x".into()]);
        let v: serde_json::Value = serde_json::from_str(&t.render_json()).unwrap();
        assert_eq!(v["columns"][0], "a");
        assert_eq!(v["rows"][0][0], "x");
    }
}
