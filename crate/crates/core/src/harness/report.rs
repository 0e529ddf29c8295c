use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::sim::{Checkpoint, ExperimentOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Ndjson,
    Plotdata,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Ndjson => "ndjson",
            Format::Plotdata => "dat",
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "ndjson" => Ok(Format::Ndjson),
            "plotdata" => Ok(Format::Plotdata),
            _ => Err(Error::Config(format!("unknown format '{s}'"))),
        }
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Flattens nested objects and arrays into dotted keys.
pub fn flatten(value: &Value) -> BTreeMap<String, String> {
    fn walk(prefix: &str, v: &Value, out: &mut BTreeMap<String, String>) {
        let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
        match v {
            Value::Object(m) => m.iter().for_each(|(k, x)| walk(&key(k), x, out)),
            Value::Array(a) => a.iter().enumerate().for_each(|(i, x)| walk(&key(&i.to_string()), x, out)),
            Value::Null => {
                out.insert(prefix.to_string(), String::new());
            }
            Value::String(s) => {
                out.insert(prefix.to_string(), s.clone());
            }
            other => {
                out.insert(prefix.to_string(), other.to_string());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk("", value, &mut out);
    out
}

pub fn write_csv<W: Write>(records: &[Value], w: W) -> Result<()> {
    let rows: Vec<_> = records.iter().map(flatten).collect();
    let columns: BTreeSet<&String> = rows.iter().flat_map(|r| r.keys()).collect();
    let mut out = csv::Writer::from_writer(w);
    out.write_record(&columns).map_err(csv_err)?;
    for r in &rows {
        out.write_record(columns.iter().map(|c| r.get(*c).map(String::as_str).unwrap_or("")))
            .map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_ndjson<W: Write>(records: &[Value], mut w: W) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn parse_ndjson<R: BufRead>(r: R) -> Result<Vec<Value>> {
    let mut out = Vec::new();
    for line in r.lines() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(serde_json::from_str(&line)?);
        }
    }
    Ok(out)
}

/// Two whitespace-separated columns, sweep value and primary metric, under a
/// commented header naming the config hash and axes. Failed points are
/// written as comments.
pub fn write_plotdata<W: Write>(records: &[Value], mut w: W) -> Result<()> {
    let first = records.first();
    let field = |name: &str| first.and_then(|r| r.get(name)).and_then(Value::as_str).unwrap_or("");
    let x_axis = first.and_then(|r| r["variable"].as_str()).unwrap_or("index");
    let y_axis = records.iter().find_map(|r| r["primary_name"].as_str()).unwrap_or("primary");
    writeln!(w, "# config_hash {}", field("config_hash"))?;
    writeln!(w, "# experiment {}", field("experiment"))?;
    writeln!(w, "# {x_axis} {y_axis}")?;
    for r in records {
        let x = r["x"].as_f64().or_else(|| r["index"].as_f64()).unwrap_or(f64::NAN);
        match r["primary"].as_f64() {
            Some(y) if r["status"] == "ok" => writeln!(w, "{x:.17e} {y:.17e}")?,
            _ => writeln!(w, "# {x:.17e} {}", r["error"].as_str().unwrap_or("no value"))?,
        }
    }
    Ok(())
}

/// Writes records to `dir/stem.<ext>` and returns the path.
pub fn emit_report(records: &[Value], format: Format, dir: &Path, stem: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(format!("{stem}.{}", format.extension()));
    let mut file = std::io::BufWriter::new(std::fs::File::create(&path)?);
    match format {
        Format::Csv => write_csv(records, &mut file)?,
        Format::Ndjson => write_ndjson(records, &mut file)?,
        Format::Plotdata => write_plotdata(records, &mut file)?,
    }
    file.flush()?;
    Ok(path)
}

/// Per-mode energy series: `t, k, E0.., H0..`.
pub fn write_energy_csv<W: Write>(outcome: &ExperimentOutcome, w: W) -> Result<()> {
    let ne = outcome.series.iter().flat_map(|r| &r.modes).map(|m| m.e.len()).max().unwrap_or(0);
    let nh = outcome.series.iter().flat_map(|r| &r.modes).map(|m| m.h.len()).max().unwrap_or(0);
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["t".to_string(), "k".to_string()];
    header.extend((0..ne).map(|i| format!("e{i}")));
    header.extend((0..nh).map(|i| format!("h{i}")));
    out.write_record(&header).map_err(csv_err)?;
    for row in &outcome.series {
        for m in &row.modes {
            let mut rec = vec![row.t.to_string(), m.k.to_string()];
            rec.extend((0..ne).map(|i| m.e.get(i).map(f64::to_string).unwrap_or_default()));
            rec.extend((0..nh).map(|i| m.h.get(i).map(f64::to_string).unwrap_or_default()));
            out.write_record(&rec).map_err(csv_err)?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_checkpoint(path: &Path, checkpoint: &Checkpoint) -> Result<()> {
    let file = std::io::BufWriter::new(std::fs::File::create(path)?);
    serde_json::to_writer(file, checkpoint)?;
    Ok(())
}

pub fn read_checkpoint(path: &Path) -> Result<Checkpoint> {
    let file = std::io::BufReader::new(std::fs::File::open(path)?);
    Ok(serde_json::from_reader(file)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn gap_record(i: usize, x: f64) -> Value {
        json!({"config_hash": "abc123", "experiment": "gap", "index": i, "variable": "nu", "x": x,
               "seed": 0, "status": "ok", "primary_name": "psi", "primary": 0.5 * x, "pass": true,
               "report": {"psi": 0.5 * x, "lambdas": [1.0, 2.0]}})
    }

    #[test]
    fn csv_has_header_and_one_row() {
        let mut buf = Vec::new();
        write_csv(&[gap_record(0, 0.01)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].contains("report.lambdas.1"));
        let header: Vec<_> = lines[0].split(',').collect();
        let mut sorted = header.clone();
        sorted.sort();
        assert_eq!(header, sorted);
    }

    #[test]
    fn ndjson_round_trip() {
        let recs = vec![gap_record(0, 0.01), gap_record(1, 0.001)];
        let mut buf = Vec::new();
        write_ndjson(&recs, &mut buf).unwrap();
        assert_eq!(parse_ndjson(&buf[..]).unwrap(), recs);
    }

    #[test]
    fn plotdata_two_columns() {
        let mut recs = vec![gap_record(0, 0.01), gap_record(1, 0.001)];
        recs.push(json!({"config_hash": "abc123", "experiment": "gap", "index": 2, "x": 1e-4, "status": "error", "error": "bad"}));
        let mut buf = Vec::new();
        write_plotdata(&recs, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().next().unwrap().contains("abc123"));
        let data: Vec<_> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(data.len(), 2);
        for l in data {
            let cols: Vec<f64> = l.split_whitespace().map(|c| c.parse().unwrap()).collect();
            assert_eq!(cols.len(), 2);
            assert!((cols[1] - 0.5 * cols[0]).abs() < 1e-15);
        }
    }

    #[test]
    fn emit_writes_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = emit_report(&[gap_record(0, 0.1)], Format::Ndjson, dir.path(), "gap").unwrap();
        let back = parse_ndjson(std::io::BufReader::new(std::fs::File::open(p).unwrap())).unwrap();
        assert_eq!(back.len(), 1);
        assert!("xml".parse::<Format>().is_err());
    }
}
