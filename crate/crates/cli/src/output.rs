//! Run outputs: manifest, CSV table and key/value report.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use sha2::{Digest, Sha256};

/// Floats are written with 17 significant digits so tables round-trip.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn flag(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

/// The resolved parameters of a run, rendered canonically. The digest covers
/// everything that influences numeric output and nothing else (no paths, no
/// clock), so two runs with the same digest must produce the same tables.
#[derive(Clone, Debug, Default)]
pub struct Params(Vec<(String, String)>);

impl Params {
    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.0.push((key.to_string(), value.into()));
    }

    pub fn float(&mut self, key: &str, value: f64) {
        self.set(key, num(value));
    }

    fn canonical(&self, command: &str) -> String {
        let mut entries = self.0.clone();
        entries.sort();
        let mut s = format!("command={command}\n");
        for (k, v) in entries {
            writeln!(s, "{k}={v}").unwrap();
        }
        s
    }

    pub fn digest(&self, command: &str) -> String {
        Params::content_digest(self.canonical(command).as_bytes())
    }

    /// Hex sha256 of arbitrary bytes, for inputs that enter by content.
    pub fn content_digest(bytes: &[u8]) -> String {
        Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
    }
}

pub struct Table {
    columns: &'static [(&'static str, &'static str)],
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &'static [(&'static str, &'static str)]) -> Self {
        Table {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    fn render(&self, digest: &str) -> String {
        let mut s = format!("# digest={digest}\n");
        let names: Vec<&str> = self.columns.iter().map(|c| c.0).collect();
        s.push_str(&names.join(","));
        s.push('\n');
        for row in &self.rows {
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }
}

/// Self-describing key/value record; nested records are indented by two
/// spaces under their key.
#[derive(Clone, Debug, Default)]
pub struct Record {
    lines: Vec<String>,
}

impl Record {
    pub fn new() -> Self {
        Record::default()
    }

    pub fn field(&mut self, key: &str, value: impl AsRef<str>) -> &mut Self {
        self.lines.push(format!("{key}: {}", value.as_ref()));
        self
    }

    pub fn float(&mut self, key: &str, value: f64) -> &mut Self {
        self.field(key, num(value))
    }

    pub fn nested(&mut self, key: &str, child: &Record) -> &mut Self {
        self.lines.push(format!("{key}:"));
        self.lines.extend(child.lines.iter().map(|l| format!("  {l}")));
        self
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for l in &self.lines {
            s.push_str(l);
            s.push('\n');
        }
        s
    }
}

fn unix_time() -> String {
    let t = SystemTime::now().duration_since(UNIX_EPOCH).unwrap_or_default();
    format!("{}.{:03}", t.as_secs(), t.subsec_millis())
}

pub struct RunOutput {
    dir: PathBuf,
    command: &'static str,
    digest: String,
    params: Params,
    seed: u64,
    started: String,
    files: Vec<String>,
}

impl RunOutput {
    pub fn create(dir: &Path, command: &'static str, params: Params, seed: u64) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(RunOutput {
            dir: dir.to_path_buf(),
            command,
            digest: params.digest(command),
            params,
            seed,
            started: unix_time(),
            files: Vec::new(),
        })
    }

    pub fn digest(&self) -> &str {
        &self.digest
    }

    pub fn write(&mut self, name: &str, contents: &[u8]) -> io::Result<()> {
        fs::write(self.dir.join(name), contents)?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn finish(mut self, table: &Table, report: &Record) -> io::Result<()> {
        let csv = table.render(&self.digest);
        self.write("results.csv", csv.as_bytes())?;
        let mut head = Record::new();
        head.field("command", self.command).field("digest", &self.digest);
        let mut body = head.render();
        body.push_str(&report.render());
        self.write("report.txt", body.as_bytes())?;

        let mut m = Record::new();
        m.field("command", self.command)
            .field("digest", &self.digest)
            .field("version", env!("CARGO_PKG_VERSION"))
            .field("seed", self.seed.to_string())
            .field("prng", format!("pcg32 (XSH-RR 64/32), stream {:#x}", planes4::rng::STREAM))
            .field("started_unix", &self.started)
            .field("finished_unix", unix_time());
        let mut cfg = Record::new();
        let mut entries = self.params.0.clone();
        entries.sort();
        for (k, v) in &entries {
            cfg.field(k, v);
        }
        m.nested("config", &cfg);
        let mut outs = Record::new();
        for (i, f) in self.files.iter().enumerate() {
            outs.field(&i.to_string(), self.dir.join(f).display().to_string());
        }
        m.nested("outputs", &outs);
        fs::write(self.dir.join("manifest.txt"), m.render())
    }
}

/// Column documentation as shown in `--help`.
pub fn column_help(columns: &[(&str, &str)]) -> String {
    let width = columns.iter().map(|c| c.0.len()).max().unwrap_or(0);
    let mut s = String::from("results.csv columns:\n");
    for (name, doc) in columns {
        writeln!(s, "  {name:<width$}  {doc}").unwrap();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_ignores_parameter_order() {
        let mut a = Params::default();
        a.float("x", 1.0);
        a.set("y", "2");
        let mut b = Params::default();
        b.set("y", "2");
        b.float("x", 1.0);
        assert_eq!(a.digest("bounds"), b.digest("bounds"));
        assert_ne!(a.digest("bounds"), a.digest("scan"));
        assert_eq!(a.digest("bounds").len(), 64);
    }

    #[test]
    fn floats_keep_seventeen_digits() {
        let x = 0.1 + 0.2;
        assert_eq!(num(x).parse::<f64>().unwrap(), x);
        assert_eq!(num(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn nested_records_indent() {
        let mut inner = Record::new();
        inner.field("a", "1");
        let mut outer = Record::new();
        outer.field("k", "v").nested("sub", &inner);
        assert_eq!(outer.render(), "k: v\nsub:\n  a: 1\n");
    }
}
