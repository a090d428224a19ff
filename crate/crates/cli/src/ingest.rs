//! CSV ingestion with min-max normalization to the unit box.
//!
//! Kernel radii and length scales operate in normalized units, so every
//! dataset (CSV or synthetic) passes through the same normalization. The
//! constants are stored alongside the trained hyperparameters and inverted
//! when predictions are written back in raw coordinates.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use sparse_gp::{Dataset, Point};

/// Column mapping for a CSV dataset: coordinate columns in dimension order,
/// one value column, and optionally a per-record noise-variance column.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CsvSchema {
    pub path: PathBuf,
    pub coords: Vec<String>,
    pub value: String,
    #[serde(default)]
    pub noise: Option<String>,
}

/// Per-dimension min-max constants: `normalized = (raw - min) / span`.
/// Degenerate dimensions store span 1 so the mapping stays invertible.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Normalization {
    pub mins: Vec<f64>,
    pub spans: Vec<f64>,
}

impl Normalization {
    pub fn fit(raw_coords: &[Vec<f64>]) -> Self {
        let dim = raw_coords[0].len();
        let mut mins = vec![f64::INFINITY; dim];
        let mut maxs = vec![f64::NEG_INFINITY; dim];
        for row in raw_coords {
            for (k, c) in row.iter().enumerate() {
                mins[k] = mins[k].min(*c);
                maxs[k] = maxs[k].max(*c);
            }
        }
        let spans = mins
            .iter()
            .zip(&maxs)
            .map(|(lo, hi)| if hi > lo { hi - lo } else { 1.0 })
            .collect();
        Self { mins, spans }
    }

    pub fn dim(&self) -> usize {
        self.mins.len()
    }

    pub fn normalize(&self, raw: &[f64]) -> Vec<f64> {
        raw.iter()
            .zip(self.mins.iter().zip(&self.spans))
            .map(|(x, (min, span))| (x - min) / span)
            .collect()
    }

    pub fn denormalize(&self, norm: &[f64]) -> Vec<f64> {
        norm.iter()
            .zip(self.mins.iter().zip(&self.spans))
            .map(|(x, (min, span))| min + x * span)
            .collect()
    }
}

/// What happened to the rows of an ingested file.
#[derive(Debug, Clone, Default, Serialize)]
pub struct IngestReport {
    pub rows_read: usize,
    pub rows_dropped: usize,
    /// 1-based line numbers (excluding the header) of dropped rows, capped
    /// at 20 entries for readability.
    pub dropped_lines: Vec<usize>,
}

/// An ingested dataset: normalized points for the kernel plus the raw
/// columns for export and reporting.
#[derive(Debug, Clone)]
pub struct IngestedData {
    pub dataset: Dataset,
    pub normalization: Normalization,
    pub raw_coords: Vec<Vec<f64>>,
    pub raw_values: Vec<f64>,
    pub raw_noise: Option<Vec<f64>>,
    pub report: IngestReport,
}

fn parse_field(record: &csv::StringRecord, idx: usize) -> Option<f64> {
    let field = record.get(idx)?.trim();
    if field.is_empty() {
        return None;
    }
    field.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Reads a CSV file according to `schema`.
///
/// Rows with missing or unparseable mapped fields are dropped and counted;
/// the ingest aborts when more than 1% of data rows are dropped. Coordinates
/// are min-max normalized to `[0, 1]` per dimension.
pub fn ingest_csv(schema: &CsvSchema) -> anyhow::Result<IngestedData> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(&schema.path)
        .with_context(|| format!("cannot open {}", schema.path.display()))?;

    let headers = reader.headers()?.clone();
    let col_index = |name: &str| -> anyhow::Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .with_context(|| format!("column '{name}' not found in {}", schema.path.display()))
    };
    let coord_idx: Vec<usize> =
        schema.coords.iter().map(|c| col_index(c)).collect::<anyhow::Result<_>>()?;
    if coord_idx.is_empty() {
        bail!("schema must declare at least one coordinate column");
    }
    let value_idx = col_index(&schema.value)?;
    let noise_idx = schema.noise.as_deref().map(col_index).transpose()?;

    let mut raw_coords = Vec::new();
    let mut raw_values = Vec::new();
    let mut raw_noise: Vec<f64> = Vec::new();
    let mut report = IngestReport::default();

    for (row_no, record) in reader.records().enumerate() {
        let record = record?;
        report.rows_read += 1;
        let coords: Option<Vec<f64>> =
            coord_idx.iter().map(|&i| parse_field(&record, i)).collect();
        let value = parse_field(&record, value_idx);
        let noise = match noise_idx {
            Some(i) => match parse_field(&record, i) {
                Some(v) if v > 0.0 => Some(Some(v)),
                _ => None,
            },
            None => Some(None),
        };
        match (coords, value, noise) {
            (Some(c), Some(v), Some(n)) => {
                raw_coords.push(c);
                raw_values.push(v);
                if let Some(n) = n {
                    raw_noise.push(n);
                }
            }
            _ => {
                report.rows_dropped += 1;
                if report.dropped_lines.len() < 20 {
                    report.dropped_lines.push(row_no + 1);
                }
            }
        }
    }

    if report.rows_read == 0 || raw_coords.is_empty() {
        bail!("{} contains no usable rows", schema.path.display());
    }
    if report.rows_dropped * 100 > report.rows_read {
        bail!(
            "{} of {} rows malformed (> 1%), first bad rows: {:?}",
            report.rows_dropped,
            report.rows_read,
            report.dropped_lines
        );
    }

    let noise = if noise_idx.is_some() { Some(raw_noise.clone()) } else { None };
    let (dataset, normalization) = dataset_from_raw(&raw_coords, &raw_values, noise.clone())?;
    Ok(IngestedData {
        dataset,
        normalization,
        raw_coords,
        raw_values,
        raw_noise: noise,
        report,
    })
}

/// Normalizes raw coordinates and builds the in-memory dataset.
pub fn dataset_from_raw(
    raw_coords: &[Vec<f64>],
    values: &[f64],
    noise: Option<Vec<f64>>,
) -> anyhow::Result<(Dataset, Normalization)> {
    let normalization = Normalization::fit(raw_coords);
    let points: Vec<Point> = raw_coords
        .iter()
        .map(|c| Point::new(normalization.normalize(c)))
        .collect::<Result<_, _>>()?;
    let dataset = Dataset::new(points, values.to_vec(), noise)?;
    Ok((dataset, normalization))
}

/// Writes a dataset back to CSV with the given column names. Values use
/// shortest round-trip formatting, so ingest -> export -> ingest is
/// bit-identical.
pub fn write_dataset_csv(
    path: &Path,
    coord_names: &[String],
    value_name: &str,
    noise_name: Option<&str>,
    raw_coords: &[Vec<f64>],
    values: &[f64],
    noise: Option<&[f64]>,
) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("cannot create {}", path.display()))?;
    let mut header: Vec<String> = coord_names.to_vec();
    header.push(value_name.to_string());
    if let Some(n) = noise_name {
        header.push(n.to_string());
    }
    w.write_record(&header)?;
    for (i, coords) in raw_coords.iter().enumerate() {
        let mut row: Vec<String> = coords.iter().map(|c| format!("{c}")).collect();
        row.push(format!("{}", values[i]));
        if let Some(noise) = noise {
            row.push(format!("{}", noise[i]));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    fn schema(path: &Path) -> CsvSchema {
        CsvSchema {
            path: path.to_path_buf(),
            coords: vec!["x".into(), "y".into()],
            value: "t".into(),
            noise: None,
        }
    }

    #[test]
    fn three_complete_rows() {
        let f = write_temp("x,y,t\n0,0,1\n1,2,2\n2,4,3\n");
        let data = ingest_csv(&schema(f.path())).unwrap();
        assert_eq!(data.dataset.len(), 3);
        assert_eq!(data.report.rows_dropped, 0);
        for p in data.dataset.points() {
            for c in p.coords() {
                assert!((0.0..=1.0).contains(c));
            }
        }
    }

    #[test]
    fn missing_value_dropped_and_reported() {
        let mut content = String::from("x,y,t\n");
        for i in 0..100 {
            if i == 37 {
                content.push_str("1,,3\n");
            } else {
                content.push_str(&format!("{i},{},{}\n", i * 2, i + 1));
            }
        }
        let f = write_temp(&content);
        let data = ingest_csv(&schema(f.path())).unwrap();
        assert_eq!(data.dataset.len(), 99);
        assert_eq!(data.report.rows_dropped, 1);
        assert_eq!(data.report.dropped_lines, vec![38]);
    }

    #[test]
    fn too_many_malformed_rows_abort() {
        let f = write_temp("x,y,t\n0,0,1\n1,1,bad\n2,2,bad\n3,3,4\n");
        assert!(ingest_csv(&schema(f.path())).is_err());
    }

    #[test]
    fn missing_column_is_an_error() {
        let f = write_temp("x,y,t\n0,0,1\n");
        let mut s = schema(f.path());
        s.value = "nope".into();
        assert!(ingest_csv(&s).is_err());
    }

    #[test]
    fn empty_file_is_an_error() {
        let f = write_temp("x,y,t\n");
        assert!(ingest_csv(&schema(f.path())).is_err());
    }

    #[test]
    fn normalization_round_trips() {
        let norm = Normalization { mins: vec![-3.0, 10.0], spans: vec![6.0, 0.5] };
        let raw = vec![-1.25, 10.37];
        let back = norm.denormalize(&norm.normalize(&raw));
        assert!((back[0] - raw[0]).abs() < 1e-12);
        assert!((back[1] - raw[1]).abs() < 1e-12);
    }

    #[test]
    fn export_import_fixpoint() {
        // irregular values exercise the shortest round-trip formatting
        let mut content = String::from("lon,lat,day,tmax\n");
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..1000 {
            content.push_str(&format!(
                "{},{},{},{}\n",
                next() * 360.0 - 180.0,
                next() * 180.0 - 90.0,
                (next() * 10000.0).floor(),
                next() * 60.0 - 20.0
            ));
        }
        let f = write_temp(&content);
        let s = CsvSchema {
            path: f.path().to_path_buf(),
            coords: vec!["lon".into(), "lat".into(), "day".into()],
            value: "tmax".into(),
            noise: None,
        };
        let first = ingest_csv(&s).unwrap();

        let out = tempfile::NamedTempFile::new().unwrap();
        write_dataset_csv(
            out.path(),
            &s.coords,
            &s.value,
            None,
            &first.raw_coords,
            &first.raw_values,
            None,
        )
        .unwrap();
        let s2 = CsvSchema { path: out.path().to_path_buf(), ..s.clone() };
        let second = ingest_csv(&s2).unwrap();

        assert_eq!(first.raw_coords, second.raw_coords);
        assert_eq!(first.raw_values, second.raw_values);
        for (p, q) in first.dataset.points().iter().zip(second.dataset.points()) {
            assert_eq!(p.coords(), q.coords());
        }
    }
}
