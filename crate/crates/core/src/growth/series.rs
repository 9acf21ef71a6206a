//! Growth series `γ(0..=N)` and their CSV / JSON forms.
//!
//! CSV files start with `# key=value` metadata lines followed by a header row
//! `n,gamma,sphere,log_gamma,log_gamma_over_n,loglog_ratio`. `gamma` and
//! `sphere` are exact decimal integers; the log columns carry 20 significant
//! digits and `loglog_ratio` (`ln ln γ(n) / ln n`) is empty where undefined.
//! JSON documents mirror the same rows under a `meta` block.

use std::fs;
use std::path::Path;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const GENERATORS: &str = "abcd";
pub const JSON_FORMAT_TAG: &str = "grigorchuk-growth-series/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesMeta {
    pub radius: u32,
    pub element_count: u64,
    pub wall_time_secs: f64,
    pub cache_id: Option<String>,
    pub complete: bool,
    pub key_depth: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthSeries {
    values: Vec<BigUint>,
    meta: SeriesMeta,
}

impl GrowthSeries {
    pub fn new(values: Vec<BigUint>, meta: SeriesMeta) -> Result<Self> {
        if values.len() != meta.radius as usize + 1 {
            return Err(Error::SeriesFormat(format!(
                "{} values for radius {}",
                values.len(),
                meta.radius
            )));
        }
        if values.first().is_some_and(|v| !v.is_one()) {
            return Err(Error::SeriesFormat("gamma(0) must be 1".into()));
        }
        Ok(GrowthSeries { values, meta })
    }

    pub fn values(&self) -> &[BigUint] {
        &self.values
    }

    pub fn meta(&self) -> &SeriesMeta {
        &self.meta
    }

    pub fn meta_mut(&mut self) -> &mut SeriesMeta {
        &mut self.meta
    }

    pub fn radius(&self) -> u32 {
        self.meta.radius
    }

    pub fn sphere_sizes(&self) -> Vec<BigUint> {
        let mut prev = BigUint::zero();
        self.values
            .iter()
            .map(|v| {
                let s = v - &prev;
                prev = v.clone();
                s
            })
            .collect()
    }

    pub fn rows(&self) -> Vec<SeriesRow> {
        self.values
            .iter()
            .zip(self.sphere_sizes())
            .enumerate()
            .map(|(n, (gamma, sphere))| {
                let log_gamma = ln_big(gamma);
                let log_gamma_over_n = (n > 0).then(|| log_gamma / n as f64);
                let loglog_ratio =
                    (n >= 2 && log_gamma > 1.0).then(|| log_gamma.ln() / (n as f64).ln());
                SeriesRow {
                    n: n as u32,
                    gamma: gamma.to_string(),
                    sphere: sphere.to_string(),
                    log_gamma,
                    log_gamma_over_n,
                    loglog_ratio,
                }
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# generators={GENERATORS}\n"));
        out.push_str(&format!("# radius={}\n", self.meta.radius));
        out.push_str(&format!("# element_count={}\n", self.meta.element_count));
        out.push_str(&format!("# wall_time_secs={}\n", self.meta.wall_time_secs));
        out.push_str(&format!(
            "# cache_id={}\n",
            self.meta.cache_id.as_deref().unwrap_or("")
        ));
        out.push_str(&format!("# complete={}\n", self.meta.complete));
        out.push_str(&format!("# key_depth={}\n", self.meta.key_depth));
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer
            .write_record([
                "n",
                "gamma",
                "sphere",
                "log_gamma",
                "log_gamma_over_n",
                "loglog_ratio",
            ])
            .expect("in-memory write");
        for row in self.rows() {
            writer
                .write_record([
                    row.n.to_string(),
                    row.gamma,
                    row.sphere,
                    sig20(row.log_gamma),
                    row.log_gamma_over_n.map(sig20).unwrap_or_default(),
                    row.loglog_ratio.map(sig20).unwrap_or_default(),
                ])
                .expect("in-memory write");
        }
        let body = writer.into_inner().expect("in-memory flush");
        out.push_str(&String::from_utf8(body).expect("ascii"));
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut fields = std::collections::HashMap::new();
        for line in text.lines().take_while(|l| l.starts_with('#')) {
            let kv = line.trim_start_matches('#').trim();
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::SeriesFormat(format!("bad meta line {line:?}")))?;
            fields.insert(k.to_string(), v.to_string());
        }
        let get = |k: &str| {
            fields
                .get(k)
                .cloned()
                .ok_or_else(|| Error::SeriesFormat(format!("missing meta field {k}")))
        };
        let bad = |k: &str| Error::SeriesFormat(format!("bad meta field {k}"));
        if get("generators")? != GENERATORS {
            return Err(bad("generators"));
        }
        let cache_id = get("cache_id")?;
        let meta = SeriesMeta {
            radius: get("radius")?.parse().map_err(|_| bad("radius"))?,
            element_count: get("element_count")?
                .parse()
                .map_err(|_| bad("element_count"))?,
            wall_time_secs: get("wall_time_secs")?
                .parse()
                .map_err(|_| bad("wall_time_secs"))?,
            cache_id: (!cache_id.is_empty()).then_some(cache_id),
            complete: get("complete")?.parse().map_err(|_| bad("complete"))?,
            key_depth: get("key_depth")?.parse().map_err(|_| bad("key_depth"))?,
        };
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let headers = reader
            .headers()
            .map_err(|e| Error::SeriesFormat(e.to_string()))?
            .clone();
        let n_col = column(&headers, "n")?;
        let gamma_col = column(&headers, "gamma")?;
        let mut values = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record.map_err(|e| Error::SeriesFormat(e.to_string()))?;
            let n: usize = record[n_col]
                .parse()
                .map_err(|_| Error::SeriesFormat(format!("bad n in row {i}")))?;
            if n != i {
                return Err(Error::SeriesFormat(format!("row {i} has n = {n}")));
            }
            let gamma: BigUint = record[gamma_col]
                .parse()
                .map_err(|_| Error::SeriesFormat(format!("bad gamma in row {i}")))?;
            values.push(gamma);
        }
        GrowthSeries::new(values, meta)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(SeriesDocument {
            format: JSON_FORMAT_TAG.to_string(),
            generators: GENERATORS.to_string(),
            meta: self.meta.clone(),
            rows: self.rows(),
        })
        .expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SeriesDocument =
            serde_json::from_str(text).map_err(|e| Error::SeriesFormat(e.to_string()))?;
        if doc.format != JSON_FORMAT_TAG {
            return Err(Error::SeriesFormat(format!(
                "unknown format {:?}",
                doc.format
            )));
        }
        if doc.generators != GENERATORS {
            return Err(Error::SeriesFormat("unexpected generator set".into()));
        }
        let mut values = Vec::with_capacity(doc.rows.len());
        let mut prev = BigUint::zero();
        for (i, row) in doc.rows.iter().enumerate() {
            if row.n as usize != i {
                return Err(Error::SeriesFormat(format!("row {i} has n = {}", row.n)));
            }
            let gamma: BigUint = row
                .gamma
                .parse()
                .map_err(|_| Error::SeriesFormat(format!("bad gamma in row {i}")))?;
            let sphere: BigUint = row
                .sphere
                .parse()
                .map_err(|_| Error::SeriesFormat(format!("bad sphere in row {i}")))?;
            if gamma < prev || &gamma - &prev != sphere {
                return Err(Error::SeriesFormat(format!(
                    "sphere column inconsistent in row {i}"
                )));
            }
            prev = gamma.clone();
            values.push(gamma);
        }
        GrowthSeries::new(values, doc.meta)
    }

    pub fn write(&self, path: &Path, format: SeriesFormat) -> Result<()> {
        let text = match format {
            SeriesFormat::Csv => self.to_csv(),
            SeriesFormat::Json => {
                serde_json::to_string_pretty(&self.to_json()).expect("serializable") + "\n"
            }
        };
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path, format: SeriesFormat) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        match format {
            SeriesFormat::Csv => Self::from_csv(&text),
            SeriesFormat::Json => Self::from_json(&text),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesFormat {
    Csv,
    Json,
}

impl SeriesFormat {
    /// Format implied by a file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()? {
            "csv" => Some(SeriesFormat::Csv),
            "json" => Some(SeriesFormat::Json),
            _ => None,
        }
    }
}

/// Writes `series` to `path`.
pub fn export_series(series: &GrowthSeries, format: SeriesFormat, path: &Path) -> Result<()> {
    series.write(path, format)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesRow {
    pub n: u32,
    pub gamma: String,
    pub sphere: String,
    pub log_gamma: f64,
    pub log_gamma_over_n: Option<f64>,
    pub loglog_ratio: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SeriesDocument {
    format: String,
    generators: String,
    meta: SeriesMeta,
    rows: Vec<SeriesRow>,
}

fn column(headers: &csv::StringRecord, name: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| Error::SeriesFormat(format!("missing column {name}")))
}

fn sig20(x: f64) -> String {
    format!("{x:.19e}")
}

/// Natural logarithm of a big integer (`-inf` for zero).
pub fn ln_big(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("finite").ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("finite");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> GrowthSeries {
        GrowthSeries::new(
            [1u32, 5, 11, 23, 40]
                .iter()
                .map(|&v| BigUint::from(v))
                .collect(),
            SeriesMeta {
                radius: 4,
                element_count: 40,
                wall_time_secs: 0.012_345_678_9,
                cache_id: Some("ball_r4_d8".into()),
                complete: true,
                key_depth: 8,
            },
        )
        .unwrap()
    }

    #[test]
    fn csv_round_trip() {
        let s = sample();
        let text = s.to_csv();
        assert!(text.contains("n,gamma,sphere,log_gamma,log_gamma_over_n,loglog_ratio"));
        assert_eq!(GrowthSeries::from_csv(&text).unwrap(), s);
    }

    #[test]
    fn json_round_trip_and_validation() {
        let s = sample();
        let text = serde_json::to_string(&s.to_json()).unwrap();
        assert_eq!(GrowthSeries::from_json(&text).unwrap(), s);
        let tampered = text.replace("\"sphere\":\"6\"", "\"sphere\":\"7\"");
        assert!(GrowthSeries::from_json(&tampered).is_err());
        let extra = text.replacen("\"rows\"", "\"bogus\":1,\"rows\"", 1);
        assert!(GrowthSeries::from_json(&extra).is_err());
    }

    #[test]
    fn plot_columns() {
        let rows = sample().rows();
        assert_eq!(rows[1].sphere, "4");
        assert!(rows[1].loglog_ratio.is_none());
        let expected = (40f64.ln()).ln() / 4f64.ln();
        assert!((rows[4].loglog_ratio.unwrap() - expected).abs() < 1e-15);
        assert_eq!(sig20(1.0).len(), "1.0000000000000000000e0".len());
    }

    #[test]
    fn rejects_bad_series() {
        let meta = sample().meta().clone();
        assert!(GrowthSeries::new(
            vec![BigUint::from(2u32)],
            SeriesMeta {
                radius: 0,
                ..meta.clone()
            }
        )
        .is_err());
        assert!(GrowthSeries::new(vec![BigUint::from(1u32)], meta).is_err());
    }

    #[test]
    fn io_errors_carry_path() {
        let err = GrowthSeries::read(Path::new("/nonexistent/series.csv"), SeriesFormat::Csv)
            .unwrap_err();
        assert!(err.to_string().contains("/nonexistent/series.csv"));
    }

    #[test]
    fn ln_of_large_values() {
        let big = BigUint::from(3u32).pow(2000);
        assert!((ln_big(&big) - 2000.0 * 3f64.ln()).abs() < 1e-9);
    }
}
