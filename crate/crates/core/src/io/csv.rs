//! Metrics table: header `image,method,k,alpha,br,ue,dice,seconds`, reals
//! at six decimals, empty fields for missing values.

use crate::error::{IsfError, Result};

pub const METRICS_HEADER: [&str; 8] = ["image", "method", "k", "alpha", "br", "ue", "dice", "seconds"];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetricsRow {
    pub image: String,
    pub method: String,
    pub k: usize,
    pub alpha: Option<f64>,
    pub br: Option<f64>,
    pub ue: Option<f64>,
    pub dice: Option<f64>,
    pub seconds: Option<f64>,
}

fn real(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

pub fn write_metrics_csv(rows: &[MetricsRow]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
    w.write_record(METRICS_HEADER)?;
    for r in rows {
        w.write_record([
            r.image.clone(),
            r.method.clone(),
            r.k.to_string(),
            real(r.alpha),
            real(r.br),
            real(r.ue),
            real(r.dice),
            real(r.seconds),
        ])?;
    }
    w.into_inner().map_err(|e| IsfError::Io(e.into_error()))
}

pub fn read_metrics_csv(bytes: &[u8]) -> Result<Vec<MetricsRow>> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(bytes);
    let header = r.headers()?.clone();
    if header.iter().ne(METRICS_HEADER) {
        return Err(IsfError::Parse { offset: 0, message: format!("unexpected header {header:?}") });
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let offset = rec.position().map_or(0, |p| p.byte() as usize);
        let bad = |field: &str| IsfError::Parse { offset, message: format!("bad {field} field") };
        let opt = |i: usize| -> Result<Option<f64>> {
            match rec.get(i) {
                Some("") => Ok(None),
                Some(s) => s.parse().map(Some).map_err(|_| bad(METRICS_HEADER[i])),
                None => Err(bad(METRICS_HEADER[i])),
            }
        };
        rows.push(MetricsRow {
            image: rec.get(0).ok_or_else(|| bad("image"))?.to_string(),
            method: rec.get(1).ok_or_else(|| bad("method"))?.to_string(),
            k: rec.get(2).and_then(|s| s.parse().ok()).ok_or_else(|| bad("k"))?,
            alpha: opt(3)?,
            br: opt(4)?,
            ue: opt(5)?,
            dice: opt(6)?,
            seconds: opt(7)?,
        });
    }
    Ok(rows)
}
