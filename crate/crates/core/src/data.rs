//! CSV input and output. Every file the library reads or writes goes
//! through here.
//!
//! Price input is `date,price`. A first row whose price field does not
//! parse as a number is taken as a header. Dates are opaque labels.
//!
//! Output tables carry a fixed header and write floats in shortest
//! round-trip form, so reading a table back yields identical values.
//! Missing numbers (invalid estimates, failed inversions) are empty fields.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::calibration::RegressionEstimate;
use crate::error::{Error, Result};
use crate::market::{PriceSeries, YieldSeries};
use crate::pricing::{ConvergenceRow, IvSurface, VegaMap};

/// A row type with a fixed column layout.
pub trait CsvRow: Serialize + DeserializeOwned {
    const HEADER: &'static [&'static str];
}

/// One input record: an opaque label and a positive price.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceRecord {
    #[serde(rename = "date")]
    pub label: String,
    pub price: f64,
}

impl CsvRow for PriceRecord {
    const HEADER: &'static [&'static str] = &["date", "price"];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
/// `index,value`, used for both price and yield series.
pub struct SeriesRow {
    pub index: usize,
    pub value: f64,
}

impl CsvRow for SeriesRow {
    const HEADER: &'static [&'static str] = &["index", "value"];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRow {
    pub y: f64,
    pub f_hat: Option<f64>,
    pub g2_hat: Option<f64>,
    pub clamped: bool,
    pub valid: bool,
}

impl CsvRow for EstimateRow {
    const HEADER: &'static [&'static str] = &["y", "f_hat", "g2_hat", "clamped", "valid"];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceRow {
    #[serde(rename = "K")]
    pub strike: f64,
    #[serde(rename = "T_months")]
    pub maturity_months: u32,
    pub iv: Option<f64>,
    pub valid: bool,
    /// Empty for valid cells, otherwise the failure code.
    pub reason: String,
    pub vega: Option<f64>,
}

impl CsvRow for SurfaceRow {
    const HEADER: &'static [&'static str] = &["K", "T_months", "iv", "valid", "reason", "vega"];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VegaRow {
    #[serde(rename = "K")]
    pub strike: f64,
    #[serde(rename = "T_months")]
    pub maturity_months: u32,
    pub vega: f64,
}

impl CsvRow for VegaRow {
    const HEADER: &'static [&'static str] = &["K", "T_months", "vega"];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceCsvRow {
    pub paths: usize,
    pub std_dev: f64,
}

impl CsvRow for ConvergenceCsvRow {
    const HEADER: &'static [&'static str] = &["paths", "std_dev"];
}

/// Writes the header, then one line per row.
pub fn write_csv<R: CsvRow, W: Write>(rows: &[R], sink: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(sink);
    w.write_record(R::HEADER)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a table written by [`write_csv`]; the header must match exactly.
pub fn read_csv<R: CsvRow, Rd: Read>(source: Rd) -> Result<Vec<R>> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(source);
    let header = r.headers()?.clone();
    if !header.iter().eq(R::HEADER.iter().copied()) {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header {}", R::HEADER.join(",")),
        });
    }
    r.deserialize()
        .collect::<std::result::Result<Vec<R>, csv::Error>>()
        .map_err(Error::from)
}

fn row_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Parses `date,price` records in file order.
pub fn read_price_csv<R: Read>(source: R) -> Result<PriceSeries<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source);
    let mut labels = Vec::new();
    let mut prices = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let line = record.position().map_or(i + 1, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        if record.len() != 2 {
            return Err(row_err(line, format!("expected 2 fields, got {}", record.len())));
        }
        let price_field = &record[1];
        let price = match price_field.parse::<f64>() {
            Ok(p) => p,
            Err(_) if i == 0 => continue,
            Err(_) => return Err(row_err(line, format!("unparseable price `{price_field}`"))),
        };
        if !(price.is_finite() && price > 0.0) {
            return Err(row_err(line, format!("price must be positive, got {price_field}")));
        }
        labels.push(record[0].to_string());
        prices.push(price);
    }
    if prices.is_empty() {
        return Err(row_err(0, "no price rows"));
    }
    if prices.len() < 2 {
        return Err(row_err(0, format!("need at least 2 prices, got {}", prices.len())));
    }
    PriceSeries::with_labels(prices, labels)
}

pub fn read_price_csv_path(path: impl AsRef<Path>) -> Result<PriceSeries<f64>> {
    read_price_csv(File::open(path)?)
}

/// The most recent `count` records.
pub fn tail(series: &PriceSeries<f64>, count: usize) -> Result<PriceSeries<f64>> {
    series.tail(count)
}

fn series_rows(values: &[f64]) -> Vec<SeriesRow> {
    values
        .iter()
        .enumerate()
        .map(|(index, &value)| SeriesRow { index, value })
        .collect()
}

pub fn price_rows(series: &PriceSeries<f64>) -> Vec<SeriesRow> {
    series_rows(series.values())
}

pub fn yield_rows(series: &YieldSeries<f64>) -> Vec<SeriesRow> {
    series_rows(&series.values)
}

/// Labeled `date,price` records; unlabeled series use the index as label.
pub fn price_records(series: &PriceSeries<f64>) -> Vec<PriceRecord> {
    series
        .values()
        .iter()
        .enumerate()
        .map(|(i, &price)| PriceRecord {
            label: series.labels().map_or_else(|| i.to_string(), |l| l[i].clone()),
            price,
        })
        .collect()
}

pub fn estimate_rows(est: &RegressionEstimate<f64>) -> Vec<EstimateRow> {
    (0..est.len())
        .map(|i| EstimateRow {
            y: est.grid[i],
            f_hat: est.valid[i].then_some(est.f_hat[i]),
            g2_hat: est.valid[i].then_some(est.g2_hat[i]),
            clamped: est.clamped[i],
            valid: est.valid[i],
        })
        .collect()
}

/// Rows ordered by maturity, then strike.
pub fn surface_rows(surface: &IvSurface) -> Vec<SurfaceRow> {
    surface
        .iter()
        .map(|c| SurfaceRow {
            strike: c.strike,
            maturity_months: c.maturity_months,
            iv: c.iv.ok(),
            valid: c.is_valid(),
            reason: c.iv.err().map_or_else(String::new, |e| e.code().to_string()),
            vega: c.vega,
        })
        .collect()
}

pub fn vega_rows(map: &VegaMap) -> Vec<VegaRow> {
    map.maturities_months
        .iter()
        .zip(&map.values)
        .flat_map(|(&m, row)| {
            map.strikes.iter().zip(row).map(move |(&k, &vega)| VegaRow {
                strike: k,
                maturity_months: m,
                vega,
            })
        })
        .collect()
}

pub fn convergence_rows(rows: &[ConvergenceRow]) -> Vec<ConvergenceCsvRow> {
    rows.iter()
        .map(|r| ConvergenceCsvRow {
            paths: r.paths,
            std_dev: r.std_dev,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn to_string<R: CsvRow>(rows: &[R]) -> String {
        let mut buf = Vec::new();
        write_csv(rows, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn reads_plain_rows() {
        let s = read_price_csv("d1,100\nd2,101\n".as_bytes()).unwrap();
        assert_eq!(s.values(), &[100.0, 101.0]);
        assert_eq!(s.labels().unwrap(), &["d1".to_string(), "d2".to_string()]);
    }

    #[test]
    fn skips_header() {
        let s = read_price_csv("date,close\n2013-01-02, 1462.42\n2013-01-03,1459.37\n".as_bytes()).unwrap();
        assert_eq!(s.values(), &[1462.42, 1459.37]);
    }

    #[test]
    fn negative_price_names_row() {
        match read_price_csv("date,price\na,1\nb,-5\nc,2\n".as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        match read_price_csv("a,1\nb,x\n".as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn too_few_rows() {
        assert!(read_price_csv("".as_bytes()).is_err());
        assert!(read_price_csv("date,price\n".as_bytes()).is_err());
        assert!(read_price_csv("a,1\n".as_bytes()).is_err());
        assert!(read_price_csv("a,1,2\nb,2,3\n".as_bytes()).is_err());
    }

    #[test]
    fn tail_windows() {
        let s = read_price_csv("a,1\nb,2\nc,3\n".as_bytes()).unwrap();
        assert_eq!(tail(&s, 3).unwrap(), s);
        assert_eq!(tail(&s, 2).unwrap().values(), &[2.0, 3.0]);
        assert!(tail(&s, 4).is_err());
    }

    #[test]
    fn empty_table_is_header_only() {
        assert_eq!(to_string::<SurfaceRow>(&[]), "K,T_months,iv,valid,reason,vega\n");
        assert_eq!(to_string::<VegaRow>(&[]), "K,T_months,vega\n");
        assert_eq!(to_string::<ConvergenceCsvRow>(&[]), "paths,std_dev\n");
        assert_eq!(to_string::<EstimateRow>(&[]), "y,f_hat,g2_hat,clamped,valid\n");
    }

    #[test]
    fn price_series_round_trip() {
        let s = PriceSeries::new(vec![0.1 + 0.2, 1.0 / 3.0, 1e-300, 12345.678901234567]).unwrap();
        let text = to_string(&price_rows(&s));
        assert!(text.starts_with("index,value\n0,0.30000000000000004\n"));
        let back = read_price_csv(text.as_bytes()).unwrap();
        assert_eq!(back.values(), s.values());
        let labeled = read_price_csv("d,p\nx,1.5\ny,2.5\n".as_bytes()).unwrap();
        let again = read_price_csv(to_string(&price_records(&labeled)).as_bytes()).unwrap();
        assert_eq!(again, labeled);
    }

    #[test]
    fn yield_rows_round_trip() {
        let y = YieldSeries { values: vec![-0.0123456789012345, 0.0, 1e-17] };
        let back: Vec<SeriesRow> = read_csv(to_string(&yield_rows(&y)).as_bytes()).unwrap();
        assert_eq!(back.iter().map(|r| r.value).collect::<Vec<_>>(), y.values);
    }

    #[test]
    fn surface_row_round_trip() {
        let rows = vec![
            SurfaceRow {
                strike: 1100.0,
                maturity_months: 12,
                iv: Some(0.2302113),
                valid: true,
                reason: String::new(),
                vega: Some(512.25),
            },
            SurfaceRow {
                strike: 800.0,
                maturity_months: 1,
                iv: None,
                valid: false,
                reason: "vega-guard".into(),
                vega: Some(7.824541295983192e-41),
            },
        ];
        let text = to_string(&rows);
        assert!(text.contains("800.0,1,,false,vega-guard,7.824541295983192e-41"));
        let back: Vec<SurfaceRow> = read_csv(text.as_bytes()).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn header_mismatch_is_rejected() {
        assert!(read_csv::<VegaRow, _>("a,b,c\n1,2,3\n".as_bytes()).is_err());
    }
}
