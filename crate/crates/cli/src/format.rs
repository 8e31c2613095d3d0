//! On-disk formats: JSON problem files, per-iteration trace CSVs and
//! benchmark CSVs.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use avi_core::{AviProblem, IterationTrace, Matrix};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Generator parameters recorded alongside a problem.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_asym: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regularization: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator_version: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemFile {
    pub problem: AviProblem,
    pub metadata: Option<Metadata>,
}

#[derive(Deserialize)]
struct RawProblem {
    n: usize,
    m: usize,
    #[serde(rename = "H")]
    h: Vec<Vec<f64>>,
    f: Vec<f64>,
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    #[serde(default)]
    metadata: Option<Metadata>,
}

// 17 significant digits: enough for every f64 to survive a round trip
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_vec(out: &mut String, v: &[f64]) {
    out.push('[');
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&num(*x));
    }
    out.push(']');
}

fn write_matrix(out: &mut String, m: &Matrix) {
    if m.rows() == 0 {
        out.push_str("[]");
        return;
    }
    out.push_str("[\n");
    for i in 0..m.rows() {
        out.push_str("    ");
        write_vec(out, m.row(i));
        out.push_str(if i + 1 < m.rows() { ",\n" } else { "\n" });
    }
    out.push_str("  ]");
}

impl ProblemFile {
    pub fn new(problem: AviProblem) -> Self {
        ProblemFile { problem, metadata: None }
    }

    pub fn to_json(&self) -> String {
        let p = &self.problem;
        let mut out = String::new();
        let _ = writeln!(out, "{{\n  \"n\": {},\n  \"m\": {},", p.n(), p.m());
        out.push_str("  \"H\": ");
        write_matrix(&mut out, p.h());
        out.push_str(",\n  \"f\": ");
        write_vec(&mut out, p.f());
        out.push_str(",\n  \"A\": ");
        write_matrix(&mut out, p.a());
        out.push_str(",\n  \"b\": ");
        write_vec(&mut out, p.b());
        if let Some(md) = &self.metadata {
            let mut fields = Vec::new();
            if let Some(s) = md.seed {
                fields.push(format!("\"seed\": {s}"));
            }
            if let Some(g) = md.gamma_asym {
                fields.push(format!("\"gamma_asym\": {}", num(g)));
            }
            if let Some(r) = md.regularization {
                fields.push(format!("\"regularization\": {}", num(r)));
            }
            if let Some(v) = &md.generator_version {
                fields.push(format!("\"generator_version\": {}", serde_json::Value::from(v.as_str())));
            }
            let _ = write!(out, ",\n  \"metadata\": {{{}}}", fields.join(", "));
        }
        out.push_str("\n}\n");
        out
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, String> {
        let raw: RawProblem = serde_json::from_str(text).map_err(|e| e.to_string())?;
        if raw.h.len() != raw.n {
            return Err(format!("H has {} rows, expected n = {}", raw.h.len(), raw.n));
        }
        if raw.a.len() != raw.m || raw.b.len() != raw.m {
            return Err(format!("A has {} rows and b {} entries, expected m = {}", raw.a.len(), raw.b.len(), raw.m));
        }
        let h = Matrix::from_rows(raw.n, &raw.h).map_err(|e| format!("H: {e}"))?;
        let a = Matrix::from_rows(raw.n, &raw.a).map_err(|e| format!("A: {e}"))?;
        let problem = AviProblem::new(h, raw.f, a, raw.b).map_err(|e| e.to_string())?;
        Ok(ProblemFile { problem, metadata: raw.metadata })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        ProblemFile::from_json(&text).map_err(|msg| CliError::parse(path, msg))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|e| CliError::io(path, e))
    }
}

#[derive(Deserialize)]
struct Reference {
    x: Vec<f64>,
}

/// Reads the `x` field of a JSON document, such as the output of `solve`.
pub fn read_reference(path: &Path, n: usize) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let r: Reference = serde_json::from_str(&text).map_err(|e| CliError::parse(path, e))?;
    if r.x.len() != n {
        return Err(CliError::parse(path, format!("reference has {} entries, expected {n}", r.x.len())));
    }
    Ok(r.x)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub k: usize,
    pub merit: f64,
    pub active_set_size: usize,
    pub newton_attempted: u8,
    pub newton_accepted: u8,
    pub inner_qp_iters: usize,
    pub dist_to_ref: Option<f64>,
}

pub fn trace_rows(trace: &IterationTrace) -> Vec<TraceRow> {
    trace
        .records
        .iter()
        .map(|r| TraceRow {
            k: r.k,
            merit: r.merit,
            active_set_size: r.active_set_size,
            newton_attempted: r.newton_attempted.into(),
            newton_accepted: r.newton_accepted.into(),
            inner_qp_iters: r.inner_qp_iters,
            dist_to_ref: r.dist_to_ref,
        })
        .collect()
}

pub fn write_trace(path: &Path, trace: &IterationTrace) -> Result<()> {
    write_csv(path, &trace_rows(trace))
}

/// One (instance, solver) run. Count columns are empty on `Error` rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    pub m: usize,
    pub gamma: f64,
    pub seed: u64,
    pub solver: String,
    pub status: String,
    pub iterations: Option<usize>,
    pub inner_qp_iters: Option<usize>,
    pub newton_attempts: Option<usize>,
    pub newton_accepts: Option<usize>,
    pub wall_time_s: f64,
}

pub fn write_bench(path: &Path, rows: &[BenchRow]) -> Result<()> {
    write_csv(path, rows)
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use avi_core::{random_avi, GenSpec};

    #[test]
    fn round_trip_is_bit_exact() {
        for seed in 0..5 {
            let p = random_avi(&GenSpec::new(4, 9, 0.5, seed)).unwrap();
            let file = ProblemFile {
                problem: p,
                metadata: Some(Metadata {
                    seed: Some(seed),
                    gamma_asym: Some(0.5),
                    regularization: Some(0.0),
                    generator_version: Some("v\"1".into()),
                }),
            };
            assert_eq!(ProblemFile::from_json(&file.to_json()).unwrap(), file);
        }
    }

    #[test]
    fn awkward_values_round_trip() {
        let vals = [f64::MIN_POSITIVE, 5e-324, -0.0, 0.1 + 0.2, f64::MAX, 1.0 / 3.0];
        let p = AviProblem::new(
            Matrix::identity(1),
            vec![vals[3]],
            Matrix::from_rows(1, &vals.iter().map(|&v| vec![v]).collect::<Vec<_>>()).unwrap(),
            vals.to_vec(),
        )
        .unwrap();
        let back = ProblemFile::from_json(&ProblemFile::new(p.clone()).to_json()).unwrap().problem;
        for (x, y) in back.b().iter().zip(p.b()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn unconstrained_problem() {
        let p = AviProblem::new(Matrix::identity(2), vec![1.0, 2.0], Matrix::zeros(0, 2), vec![]).unwrap();
        let text = ProblemFile::new(p.clone()).to_json();
        assert!(text.contains("\"A\": []"));
        assert_eq!(ProblemFile::from_json(&text).unwrap().problem, p);
    }

    #[test]
    fn dimension_errors() {
        let bad_h = r#"{"n": 2, "m": 0, "H": [[1, 0]], "f": [0, 0], "A": [], "b": []}"#;
        assert!(ProblemFile::from_json(bad_h).unwrap_err().contains("H has 1 rows"));
        let bad_row = r#"{"n": 1, "m": 1, "H": [[1]], "f": [0], "A": [[1, 2]], "b": [1]}"#;
        assert!(ProblemFile::from_json(bad_row).unwrap_err().starts_with("A:"));
        let bad_f = r#"{"n": 1, "m": 0, "H": [[1]], "f": [0, 1], "A": [], "b": []}"#;
        assert!(ProblemFile::from_json(bad_f).is_err());
        assert!(ProblemFile::from_json("{").is_err());
    }
}
