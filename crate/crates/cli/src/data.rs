//! Experiment data files with header `t,p,sigma`.

use std::path::Path;

use rabi_core::revival::DataPoint;

use crate::error::{CliError, Result};

pub fn read_data(path: &Path) -> Result<Vec<DataPoint>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_data(&text, path)
}

pub fn parse_data(text: &str, path: &Path) -> Result<Vec<DataPoint>> {
    let bad = |line: u64, msg: String| CliError::Data { path: path.to_path_buf(), line, msg };
    // 1-based file line of a record start, skipping the blank lines the reader jumped over
    let line_at = |pos: Option<&csv::Position>| {
        pos.map_or(0, |p| {
            let bytes = text.as_bytes();
            let mut at = p.byte() as usize;
            while at < bytes.len() && (bytes[at] == b'\n' || bytes[at] == b'\r') {
                at += 1;
            }
            1 + bytes[..at].iter().filter(|&&b| b == b'\n').count() as u64
        })
    };
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).flexible(true).from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| bad(1, e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != ["t", "p", "sigma"] {
        return Err(bad(1, format!("expected header t,p,sigma, found {}", header.iter().collect::<Vec<_>>().join(","))));
    }
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| bad(line_at(e.position()), e.to_string()))?;
        let line = line_at(record.position());
        if record.len() != 3 {
            return Err(bad(line, format!("expected 3 fields, found {}", record.len())));
        }
        let mut v = [0.0; 3];
        for (i, (field, name)) in record.iter().zip(["t", "p", "sigma"]).enumerate() {
            v[i] = field.parse::<f64>().map_err(|_| bad(line, format!("{name} is not a number: {field:?}")))?;
        }
        let [t, p, sigma] = v;
        if !(t.is_finite() && t >= 0.0) {
            return Err(bad(line, format!("t must be finite and nonnegative, got {t}")));
        }
        if !p.is_finite() {
            return Err(bad(line, format!("p must be finite, got {p}")));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(bad(line, format!("sigma must be positive, got {sigma}")));
        }
        out.push(DataPoint { t, p, sigma });
    }
    if out.is_empty() {
        return Err(bad(1, "no data rows".into()));
    }
    Ok(out)
}
