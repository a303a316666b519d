use crate::config::Format;
use anyhow::{Context, Result};
use serde_json::{json, Map, Value};
use std::io::Write;
use std::path::{Path, PathBuf};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            // 17 significant digits round-trip any f64
            Cell::Float(x) => format!("{x:.16e}"),
            Cell::Int(i) => i.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(x) if x.is_finite() => json!(x),
            Cell::Float(_) | Cell::Empty => Value::Null,
            Cell::Int(i) => json!(i),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Self {
        x.map_or(Cell::Empty, Into::into)
    }
}

/// Columnar result with a versioned header.
#[derive(Debug, Clone)]
pub struct Table {
    pub mode: &'static str,
    pub meta: Vec<(String, String)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Summary key/values, written as trailing comments in CSV.
    pub summary: Vec<(String, Cell)>,
}

impl Table {
    pub fn new(mode: &'static str, columns: Vec<&'static str>) -> Self {
        Self {
            mode,
            meta: Vec::new(),
            columns,
            rows: Vec::new(),
            summary: Vec::new(),
        }
    }

    pub fn meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn header_line(&self) -> String {
        let mut line = format!("# oatbell {} schema={SCHEMA_VERSION} tool={TOOL_VERSION}", self.mode);
        for (k, v) in &self.meta {
            line.push_str(&format!(" {k}={v}"));
        }
        line
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{}", self.header_line())?;
        {
            let mut csv = csv::Writer::from_writer(&mut w);
            csv.write_record(&self.columns)?;
            for row in &self.rows {
                csv.write_record(row.iter().map(Cell::csv))?;
            }
            csv.flush()?;
        }
        for (k, v) in &self.summary {
            writeln!(w, "# {k}={}", v.csv())?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(r)
                    .map(|(c, v)| (c.to_string(), v.json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let meta: Map<String, Value> = self.meta.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        let summary: Map<String, Value> = self.summary.iter().map(|(k, v)| (k.clone(), v.json())).collect();
        json!({
            "tool": "oatbell",
            "mode": self.mode,
            "schema": SCHEMA_VERSION,
            "version": TOOL_VERSION,
            "meta": meta,
            "columns": self.columns,
            "rows": rows,
            "summary": summary,
        })
    }

    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{}", self.header_line())?;
        writeln!(w, "{}", self.columns.join("\t"))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            writeln!(w, "{}", cells.join("\t"))?;
        }
        for (k, v) in &self.summary {
            writeln!(w, "{k}: {}", v.csv())?;
        }
        Ok(())
    }
}

pub fn plot_script_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".plot.py");
    PathBuf::from(name)
}

/// Emit `table` to `out` (or stdout) and, for files, a matplotlib script next to it.
pub fn emit(table: &Table, out: Option<&Path>, format: Format, plot: Option<&PlotSpec>) -> Result<()> {
    let mut buf = Vec::new();
    match format {
        Format::Csv => table.write_csv(&mut buf)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut buf, &table.to_json())?;
            buf.push(b'\n');
        }
        Format::Text => table.write_text(&mut buf)?,
    }
    match out {
        Some(path) => {
            std::fs::write(path, &buf).with_context(|| format!("writing {}", path.display()))?;
            if let Some(spec) = plot {
                let script = plot_script(spec, path, format);
                let sp = plot_script_path(path);
                std::fs::write(&sp, script).with_context(|| format!("writing {}", sp.display()))?;
            }
        }
        None => std::io::stdout().write_all(&buf)?,
    }
    Ok(())
}

pub struct PlotSpec {
    pub x: &'static str,
    pub y: Vec<&'static str>,
    pub log_y: bool,
    /// Horizontal reference lines `(value, label)`.
    pub hlines: Vec<(f64, String)>,
}

fn plot_script(spec: &PlotSpec, data: &Path, format: Format) -> String {
    let file = data
        .file_name()
        .map(|f| f.to_string_lossy().into_owned())
        .unwrap_or_default();
    let loader = match format {
        Format::Json => "import json\n\
            with open(path) as fh:\n    doc = json.load(fh)\n\
            data = {c: np.array([np.nan if r[c] is None else r[c] for r in doc['rows']], dtype=float) for c in doc['columns']}\n"
            .to_string(),
        _ => "data = np.genfromtxt(path, delimiter=',', comments='#', names=True)\n".to_string(),
    };
    let mut s = String::new();
    s.push_str("import os\nimport numpy as np\nimport matplotlib\nmatplotlib.use('Agg')\nimport matplotlib.pyplot as plt\n\n");
    s.push_str(&format!("path = os.path.join(os.path.dirname(os.path.abspath(__file__)), {file:?})\n"));
    s.push_str(&loader);
    s.push_str("fig, ax = plt.subplots(figsize=(7, 4.5))\n");
    for y in &spec.y {
        s.push_str(&format!("ax.plot(data[{x:?}], data[{y:?}], label={y:?})\n", x = spec.x));
    }
    for (v, label) in &spec.hlines {
        s.push_str(&format!("ax.axhline({v:e}, color='grey', ls='--', lw=0.8, label={label:?})\n"));
    }
    if spec.log_y {
        s.push_str("ax.set_yscale('log')\n");
    }
    s.push_str(&format!("ax.set_xlabel({:?})\nax.legend()\nfig.tight_layout()\n", spec.x));
    s.push_str("fig.savefig(os.path.splitext(path)[0] + '.png', dpi=150)\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> Table {
        let mut t = Table::new("oat", vec!["tau", "value", "k"]).meta("n", 8);
        t.rows.push(vec![Cell::Float(0.1), Cell::Float(1.0 / 3.0), Cell::Int(2)]);
        t.rows.push(vec![Cell::Float(0.2), Cell::Empty, Cell::Int(3)]);
        t.summary.push(("tau_crit".into(), Cell::Float(0.5)));
        t
    }

    #[test]
    fn csv_round_trips_floats() {
        let mut buf = Vec::new();
        table().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], format!("# oatbell oat schema=1 tool={TOOL_VERSION} n=8"));
        assert_eq!(lines[1], "tau,value,k");
        let v: f64 = lines[2].split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(v, 1.0 / 3.0);
        assert!(lines[3].contains(",,"));
        assert_eq!(lines[4], "# tau_crit=5.0000000000000000e-1");
    }

    #[test]
    fn json_mirrors_columns() {
        let j = table().to_json();
        assert_eq!(j["schema"], 1);
        assert_eq!(j["rows"][0]["value"].as_f64().unwrap(), 1.0 / 3.0);
        assert!(j["rows"][1]["value"].is_null());
        assert_eq!(j["meta"]["n"], "8");
    }

    #[test]
    fn plot_script_sits_beside_output() {
        assert_eq!(plot_script_path(Path::new("/tmp/a.csv")), PathBuf::from("/tmp/a.csv.plot.py"));
    }
}
