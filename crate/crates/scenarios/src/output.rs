//! CSV tables and run manifests, written atomically.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use dipole_squeeze::liouville::{
    PIVOT_RATIO_FLOOR, RAW_HERMITICITY_TOL, RESIDUAL_TOL, TAIL_LIMIT,
};
use tempfile::NamedTempFile;

/// A header row and string cells. Numbers are formatted with `f64`'s
/// shortest round-trip representation, so equal results give equal bytes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn push_numbers(&mut self, row: &[f64]) {
        self.push(row.iter().map(|v| num(*v)).collect());
    }

    pub fn column(&self, name: &str) -> Option<Vec<&str>> {
        let j = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[j].as_str()).collect())
    }

    /// Numeric column; blank cells become `None`.
    pub fn numbers(&self, name: &str) -> Option<Vec<Option<f64>>> {
        Some(
            self.column(name)?
                .into_iter()
                .map(|c| c.parse().ok())
                .collect(),
        )
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| e.into_error().into())
    }

    pub fn from_csv(bytes: &[u8]) -> Result<Self, csv::Error> {
        let mut r = csv::Reader::from_reader(bytes);
        let header = r.headers()?.iter().map(String::from).collect();
        let rows = r
            .records()
            .map(|rec| rec.map(|r| r.iter().map(String::from).collect()))
            .collect::<Result<_, _>>()?;
        Ok(Self { header, rows })
    }
}

/// Shortest round-trip form; exponent notation for very small or large values.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-4..1e16).contains(&a) {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

pub fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Plain-text record of one run.
#[derive(Debug, Clone, Default)]
pub struct Manifest {
    pub scenario: String,
    pub sections: Vec<(String, String)>,
    pub files: Vec<PathBuf>,
    pub wall_time_s: f64,
}

impl Manifest {
    pub fn new(scenario: &str) -> Self {
        Self {
            scenario: scenario.to_string(),
            ..Self::default()
        }
    }

    pub fn section(&mut self, title: &str, body: impl Into<String>) {
        self.sections.push((title.to_string(), body.into()));
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "scenario = {}", self.scenario);
        let _ = writeln!(
            s,
            "code_version = {} {}",
            env!("CARGO_PKG_NAME"),
            env!("CARGO_PKG_VERSION")
        );
        let _ = writeln!(s, "wall_time_s = {:.3}", self.wall_time_s);
        s.push_str("\n[tolerances]\n");
        let _ = writeln!(s, "steady_residual = {RESIDUAL_TOL:e}");
        let _ = writeln!(s, "pivot_ratio_floor = {PIVOT_RATIO_FLOOR:e}");
        let _ = writeln!(s, "raw_hermiticity = {RAW_HERMITICITY_TOL:e}");
        let _ = writeln!(s, "top_sector_population = {TAIL_LIMIT:e}");
        for (title, body) in &self.sections {
            let _ = writeln!(s, "\n[{title}]");
            s.push_str(body);
            if !body.ends_with('\n') {
                s.push('\n');
            }
        }
        s.push_str("\n[files]\n");
        for f in &self.files {
            let name = f.file_name().map(|n| n.to_string_lossy()).unwrap_or_default();
            let _ = writeln!(s, "{name}");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_bytes() {
        let mut t = Table::new(["omega_over_kappa0", "analytic_opa"]);
        t.push_numbers(&[-0.5, 0.125]);
        t.push(vec!["1".into(), String::new()]);
        let bytes = t.to_csv().unwrap();
        assert_eq!(Table::from_csv(&bytes).unwrap(), t);
        let text = String::from_utf8(bytes).unwrap();
        assert_eq!(text, "omega_over_kappa0,analytic_opa\n-0.5,0.125\n1,\n");
        assert_eq!(t.numbers("analytic_opa").unwrap(), vec![Some(0.125), None]);
        assert_eq!(num(1.2685e-7), "1.2685e-7");
        assert_eq!(num(-0.0), "-0");
        for v in [3.0e-300, 0.1 + 0.2, 7.5e22, -1e-4] {
            assert_eq!(num(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub").join("x.csv");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }
}
