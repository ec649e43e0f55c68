use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::{LoadedConfig, SweepRow};
use crate::error::{Error, Result};
use crate::metrics::SearchSettings;
use crate::montecarlo::SimConfig;
use crate::params::{PowerModel, SystemParams};

pub const CSV_HEADER: [&str; 12] = [
    "tc",
    "lambda_d",
    "mode",
    "beta_star_d2d",
    "beta_star_cue",
    "rate_d2d_bps",
    "rate_cue_bps",
    "asr_bps",
    "total_power_w",
    "ee_bits_per_joule",
    "asr_stderr",
    "ee_stderr",
];

const CSV_HEADER_MBIT: [&str; 12] = [
    "tc",
    "lambda_d",
    "mode",
    "beta_star_d2d",
    "beta_star_cue",
    "rate_d2d_mbps",
    "rate_cue_mbps",
    "asr_mbps",
    "total_power_w",
    "ee_mbit_per_joule",
    "asr_stderr",
    "ee_stderr",
];

/// Presentation scale for rates and efficiency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    /// bit/s and bit/J
    #[default]
    Si,
    /// Mbit/s and Mbit/J
    Mbit,
}

impl Units {
    fn scale(&self) -> f64 {
        match self {
            Units::Si => 1.0,
            Units::Mbit => 1e-6,
        }
    }
}

impl std::str::FromStr for Units {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "si" => Ok(Units::Si),
            "mbit" => Ok(Units::Mbit),
            other => Err(Error::InvalidArgument(format!("unknown units `{other}` (si|mbit)"))),
        }
    }
}

fn sci(x: f64) -> String {
    if x.is_finite() {
        format!("{x:e}")
    } else {
        String::new()
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(sci).unwrap_or_default()
}

/// Writes the rows as CSV with the fixed header. Failed rows keep their
/// coordinates and mode with empty metric fields.
pub fn write_csv<W: Write>(rows: &[SweepRow], units: Units, out: W) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::InvalidArgument("no rows to write".into()));
    }
    let k = units.scale();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(match units {
        Units::Si => CSV_HEADER,
        Units::Mbit => CSV_HEADER_MBIT,
    })?;
    for r in rows {
        w.write_record([
            r.tc.to_string(),
            sci(r.lambda_d),
            r.mode.as_str().to_string(),
            sci(r.beta_star_d2d),
            sci(r.beta_star_cue),
            sci(r.rate_d2d * k),
            sci(r.rate_cue * k),
            sci(r.asr * k),
            sci(r.total_power),
            sci(r.ee * k),
            opt(r.asr_stderr.map(|s| s * k)),
            opt(r.ee_stderr.map(|s| s * k)),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// CSV to a file, or to stdout when `path` is `-`.
pub fn emit_csv(rows: &[SweepRow], units: Units, path: &Path) -> Result<()> {
    emit(path, |w| write_csv(rows, units, w))
}

fn emit(path: &Path, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let file_err = |source| Error::File { path: path.to_path_buf(), source };
    if path == Path::new("-") {
        let stdout = std::io::stdout();
        let mut lock = stdout.lock();
        f(&mut lock)?;
        lock.flush().map_err(file_err)
    } else {
        let mut file = std::io::BufWriter::new(std::fs::File::create(path).map_err(file_err)?);
        f(&mut file).map_err(|e| match e {
            Error::Io(source) => file_err(source),
            other => other,
        })?;
        file.flush().map_err(file_err)
    }
}

/// Resolved inputs recorded alongside JSON output.
#[derive(Debug, Clone, Serialize)]
pub struct RunMeta {
    pub params: SystemParams,
    pub power: PowerModel,
    pub sim: SimConfig,
    pub seed: u64,
    pub search: SearchMeta,
    pub units: Units,
    pub version: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchMeta {
    pub beta_min_db: f64,
    pub beta_max_db: f64,
    pub grid_points: usize,
    pub rel_tol: f64,
}

impl From<&SearchSettings> for SearchMeta {
    fn from(s: &SearchSettings) -> Self {
        Self { beta_min_db: s.beta_min_db, beta_max_db: s.beta_max_db, grid_points: s.grid_points, rel_tol: s.rel_tol }
    }
}

impl RunMeta {
    pub fn new(config: &LoadedConfig, units: Units) -> Self {
        Self {
            params: config.params.clone(),
            power: config.power.clone(),
            sim: config.sim.clone(),
            seed: config.sim.master_seed,
            search: (&config.search).into(),
            units,
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

#[derive(Serialize)]
struct JsonRow<'a> {
    tc: u32,
    lambda_d: f64,
    mode: &'a str,
    beta_star_d2d: Option<f64>,
    beta_star_cue: Option<f64>,
    rate_d2d: Option<f64>,
    rate_cue: Option<f64>,
    asr: Option<f64>,
    total_power: Option<f64>,
    ee: Option<f64>,
    asr_stderr: Option<f64>,
    ee_stderr: Option<f64>,
    boundary_warning: bool,
    failure: Option<&'a str>,
}

/// `{"rows": [...], "meta": {...}}`, rates scaled per `meta.units`.
pub fn emit_json(rows: &[SweepRow], meta: &RunMeta, path: &Path) -> Result<()> {
    let k = meta.units.scale();
    let fin = |x: f64| x.is_finite().then_some(x);
    let json_rows: Vec<JsonRow> = rows
        .iter()
        .map(|r| JsonRow {
            tc: r.tc,
            lambda_d: r.lambda_d,
            mode: r.mode.as_str(),
            beta_star_d2d: fin(r.beta_star_d2d),
            beta_star_cue: fin(r.beta_star_cue),
            rate_d2d: fin(r.rate_d2d * k),
            rate_cue: fin(r.rate_cue * k),
            asr: fin(r.asr * k),
            total_power: fin(r.total_power),
            ee: fin(r.ee * k),
            asr_stderr: r.asr_stderr.map(|s| s * k),
            ee_stderr: r.ee_stderr.map(|s| s * k),
            boundary_warning: r.boundary_warning,
            failure: r.failure.as_deref(),
        })
        .collect();
    let doc = serde_json::json!({ "rows": json_rows, "meta": meta });
    emit(path, |w| {
        serde_json::to_writer_pretty(&mut *w, &doc).map_err(|e| Error::Io(e.into()))?;
        writeln!(w)?;
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::RowMode;

    fn row(tc: u32, mode: RowMode) -> SweepRow {
        SweepRow {
            tc,
            lambda_d: 1.0 / 3.0 * 1e-5,
            mode,
            beta_star_d2d: 2.0_f64.sqrt(),
            beta_star_cue: 123.456_789_012_345,
            rate_d2d: 1e7 / 3.0,
            rate_cue: 9.87e7,
            asr: 4.2e8 + 1.0 / 7.0,
            total_power: 49.365,
            ee: 8.5e6 / 3.0,
            asr_stderr: (mode == RowMode::Mc).then_some(1.25e5),
            ee_stderr: (mode == RowMode::Mc).then_some(2.5e3),
            boundary_warning: false,
            failure: None,
        }
    }

    fn to_string(rows: &[SweepRow], units: Units) -> String {
        let mut buf = Vec::new();
        write_csv(rows, units, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn single_analytic_row() {
        let text = to_string(&[row(4, RowMode::Analytic)], Units::Si);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], CSV_HEADER.join(","));
        assert!(lines[1].starts_with("4,3.3333333333333333e-6,analytic,"));
        assert!(lines[1].ends_with(",,"));
    }

    #[test]
    fn round_trip_exact() {
        let rows = vec![row(4, RowMode::Analytic), row(4, RowMode::Mc), row(70, RowMode::McFallback)];
        let text = to_string(&rows, Units::Si);
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), CSV_HEADER.to_vec());
        for (rec, r) in rdr.records().zip(&rows) {
            let rec = rec.unwrap();
            let f = |i: usize| rec[i].parse::<f64>().unwrap();
            assert_eq!(rec[0].parse::<u32>().unwrap(), r.tc);
            assert_eq!(&rec[2], r.mode.as_str());
            let want = [r.lambda_d, 0.0, r.beta_star_d2d, r.beta_star_cue, r.rate_d2d, r.rate_cue, r.asr, r.total_power, r.ee];
            for (i, w) in want.iter().enumerate() {
                if i != 1 {
                    assert_eq!(f(i + 1), *w);
                }
            }
            assert_eq!(rec[10].parse::<f64>().ok(), r.asr_stderr);
        }
    }

    #[test]
    fn mbit_scaling() {
        let text = to_string(&[row(4, RowMode::Analytic)], Units::Mbit);
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        assert_eq!(&rdr.headers().unwrap()[7], "asr_mbps");
        let rec = rdr.records().next().unwrap().unwrap();
        assert!((rec[6].parse::<f64>().unwrap() - 98.7).abs() < 1e-9);
    }

    #[test]
    fn failed_row_and_empty_input() {
        let mut r = row(4, RowMode::Analytic);
        r.asr = f64::NAN;
        r.failure = Some("boom".into());
        assert!(to_string(&[r], Units::Si).lines().nth(1).unwrap().contains(",,"));
        assert!(write_csv(&[], Units::Si, Vec::new()).is_err());
    }

    #[test]
    fn json_document() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.json");
        let meta = RunMeta::new(&LoadedConfig::default(), Units::Si);
        emit_json(&[row(4, RowMode::Mc)], &meta, &path).unwrap();
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(v["rows"][0]["mode"], "mc");
        assert_eq!(v["rows"][0]["asr_stderr"], 1.25e5);
        assert_eq!(v["meta"]["seed"], 42);
        assert_eq!(v["meta"]["params"]["u_c"], 4);
    }

    #[test]
    fn unwritable_path() {
        let e = emit_csv(&[row(4, RowMode::Analytic)], Units::Si, Path::new("/nonexistent/dir/x.csv")).unwrap_err();
        assert!(matches!(e, Error::File { .. }));
    }
}
