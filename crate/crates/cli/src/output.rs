use std::io::{self, BufWriter, Write};
use std::path::{Path as FsPath, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use hdsim_core::lamperti::{f0, f0_inv, f_ab_inv, rotation_coeffs, sigma_eps};
use hdsim_core::{ExperimentConfig, ExperimentReport, Path, ReportRow, TransformTable, Verdict};
use serde::Serialize;
use tempfile::NamedTempFile;

use crate::CliError;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Scientific notation with 17 significant digits, enough to round-trip any double.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Destination of one output: stdout, or a temporary file in the target
/// directory that is renamed over the target on [`Sink::commit`].
pub enum Sink {
    Stdout(BufWriter<io::Stdout>),
    File { tmp: BufWriter<NamedTempFile>, target: PathBuf },
}

impl Sink {
    /// Opens the destination. Failing here means the path is unusable, which
    /// is reported as a usage error before any work is done.
    pub fn open(path: Option<&FsPath>) -> Result<Self, CliError> {
        let Some(target) = path else {
            return Ok(Sink::Stdout(BufWriter::new(io::stdout())));
        };
        let dir = match target.parent() {
            Some(d) if !d.as_os_str().is_empty() => d,
            _ => FsPath::new("."),
        };
        if target.is_dir() {
            return Err(CliError::Parameter(format!("output path {} is a directory", target.display())));
        }
        let tmp = NamedTempFile::new_in(dir)
            .map_err(|e| CliError::Parameter(format!("cannot write to {}: {e}", target.display())))?;
        Ok(Sink::File { tmp: BufWriter::new(tmp), target: target.to_path_buf() })
    }

    pub fn commit(self) -> Result<(), CliError> {
        match self {
            Sink::Stdout(mut w) => w.flush().map_err(io_error),
            Sink::File { tmp, target } => {
                let tmp = tmp.into_inner().map_err(|e| io_error(e.into_error()))?;
                tmp.as_file().sync_all().map_err(io_error)?;
                tmp.persist(&target).map_err(|e| io_error(e.error))?;
                Ok(())
            }
        }
    }
}

impl Write for Sink {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        match self {
            Sink::Stdout(w) => w.write(buf),
            Sink::File { tmp, .. } => tmp.write(buf),
        }
    }

    fn flush(&mut self) -> io::Result<()> {
        match self {
            Sink::Stdout(w) => w.flush(),
            Sink::File { tmp, .. } => tmp.flush(),
        }
    }
}

pub fn io_error(e: impl std::fmt::Display) -> CliError {
    CliError::Io(e.to_string())
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}

/// Streaming writer for the `path_index,t,value` dump.
pub struct PathCsv<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> PathCsv<W> {
    pub fn new(w: W) -> Result<Self, CliError> {
        let mut inner = csv::Writer::from_writer(w);
        inner.write_record(["path_index", "t", "value"]).map_err(csv_error)?;
        Ok(Self { inner })
    }

    pub fn write_path(&mut self, index: u64, path: &Path) -> Result<(), CliError> {
        let idx = index.to_string();
        for (t, v) in path.partition().times().iter().zip(path.values()) {
            self.inner.write_record([idx.as_str(), &fmt_f64(*t), &fmt_f64(*v)]).map_err(csv_error)?;
        }
        Ok(())
    }

    pub fn finish(self) -> Result<W, CliError> {
        self.inner.into_inner().map_err(|e| io_error(e.error()))
    }
}

/// Writes `paths` as one CSV dump.
pub fn emit_paths<W: Write>(paths: &[Path], w: W) -> Result<W, CliError> {
    let mut out = PathCsv::new(w)?;
    for (i, p) in paths.iter().enumerate() {
        out.write_path(i as u64, p)?;
    }
    out.finish()
}

pub fn emit_report_csv<W: Write>(report: &ExperimentReport, w: W) -> Result<W, CliError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["param", "mean", "std_error", "ci_low", "ci_high", "pass"]).map_err(csv_error)?;
    for ReportRow { param, summary: s, pass, .. } in &report.rows {
        out.write_record([
            param.as_str(),
            &fmt_f64(s.mean),
            &fmt_f64(s.std_error),
            &fmt_f64(s.ci_low),
            &fmt_f64(s.ci_high),
            if *pass { "true" } else { "false" },
        ])
        .map_err(csv_error)?;
    }
    out.into_inner().map_err(|e| io_error(e.error()))
}

#[derive(Serialize)]
struct Timing {
    wall_time: f64,
    unix_timestamp: u64,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    name: &'a str,
    verdict: Verdict,
    rows: &'a [ReportRow],
    seed: u64,
    level: u32,
    n_paths: usize,
    tool_version: &'static str,
    config: &'a ExperimentConfig,
    /// The only run-dependent key.
    timing: Timing,
}

pub fn emit_report_json<W: Write>(report: &ExperimentReport, cfg: &ExperimentConfig, mut w: W) -> Result<W, CliError> {
    let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let doc = JsonReport {
        name: &report.name,
        verdict: report.verdict,
        rows: &report.rows,
        seed: cfg.seed,
        level: cfg.level,
        n_paths: cfg.n_paths,
        tool_version: TOOL_VERSION,
        config: cfg,
        timing: Timing { wall_time: report.wall_time, unix_timestamp: stamp },
    };
    serde_json::to_writer_pretty(&mut w, &doc).map_err(io_error)?;
    w.write_all(b"\n").map_err(io_error)?;
    Ok(w)
}

/// Tabulates the transforms on `2^level + 1` equispaced points of `[-t, t]`.
/// Rotation coefficients are included only when `eps > 0`.
pub fn emit_transforms<W: Write>(cfg: &ExperimentConfig, w: W) -> Result<W, CliError> {
    let mp = cfg.params;
    let table = TransformTable::new(&mp)?;
    let (a, b) = (mp.plateau_a.unwrap_or(0.0), mp.plateau_b.unwrap_or(0.0));
    let with_rotation = mp.eps > 0.0;
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["x", "sigma_eps", "f_eps", "f_eps_inv", "f0", "f0_inv", "f_ab_inv"];
    if with_rotation {
        header.extend(["g", "h"]);
    }
    out.write_record(&header).map_err(csv_error)?;
    let n = 1u64 << cfg.level;
    for k in 0..=n {
        let x = -cfg.t_end + 2.0 * cfg.t_end * (k as f64 / n as f64);
        let mut rec = vec![
            fmt_f64(x),
            fmt_f64(sigma_eps(x, &mp)),
            fmt_f64(table.forward(x)?),
            fmt_f64(table.inverse(x)?),
            fmt_f64(f0(x, mp.alpha)),
            fmt_f64(f0_inv(x, mp.alpha)),
            fmt_f64(f_ab_inv(x, mp.alpha, a, b)),
        ];
        if with_rotation {
            let (g, h) = rotation_coeffs(x, &mp)?;
            rec.extend([fmt_f64(g), fmt_f64(h)]);
        }
        out.write_record(&rec).map_err(csv_error)?;
    }
    out.into_inner().map_err(|e| io_error(e.error()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use hdsim_core::noise::{make_partition, sample_bm_pair};
    use hdsim_core::McSummary;

    #[test]
    fn empty_path_set_is_header_only() {
        let bytes = emit_paths(&[], Vec::new()).unwrap();
        assert_eq!(String::from_utf8(bytes).unwrap(), "path_index,t,value\n");
    }

    #[test]
    fn path_dump_round_trips() {
        let p = make_partition(1.0, 5).unwrap();
        let paths: Vec<Path> = (0..3).map(|i| sample_bm_pair(&p, 1, i).b).collect();
        let bytes = emit_paths(&paths, Vec::new()).unwrap();
        let mut rd = csv::Reader::from_reader(bytes.as_slice());
        let mut n = 0;
        for (j, rec) in rd.records().enumerate() {
            let rec = rec.unwrap();
            let (i, k) = (j / 33, j % 33);
            assert_eq!(rec[0].parse::<usize>().unwrap(), i);
            assert_eq!(rec[1].parse::<f64>().unwrap().to_bits(), p.times()[k].to_bits());
            assert_eq!(rec[2].parse::<f64>().unwrap().to_bits(), paths[i].values()[k].to_bits());
            n += 1;
        }
        assert_eq!(n, 99);
    }

    #[test]
    fn report_csv_quotes_params() {
        let r = ExperimentReport::from_rows("x", vec![ReportRow::new("m[t=1,n=2]", McSummary::new(0.5, 0.1, 2), true)]);
        let s = String::from_utf8(emit_report_csv(&r, Vec::new()).unwrap()).unwrap();
        let mut lines = s.lines();
        assert_eq!(lines.next(), Some("param,mean,std_error,ci_low,ci_high,pass"));
        assert!(lines.next().unwrap().starts_with("\"m[t=1,n=2]\",5.0000000000000000e-1,"));
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        for x in [std::f64::consts::PI, -1e-300, 123456.789, 0.0] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }
}
