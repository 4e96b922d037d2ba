//! CSV for sweep records and complex matrices.
//!
//! Reals are written with 17 significant digits (`{:.16e}`), which parses
//! back to the identical `f64`. Complex entries are `re+imj`.

use super::{SweepRecord, TrialChannel};
use crate::error::{MilacError, Result};
use crate::linalg::{c, CMat};
use num_complex::Complex64;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

pub const CSV_HEADER: [&str; 10] = [
    "scheme",
    "N",
    "K",
    "snr_db",
    "trial",
    "seed",
    "sum_rate_bits",
    "iterations",
    "converged",
    "wall_time_ms",
];

fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_err(e: csv::Error) -> MilacError {
    let line = e.position().map_or(0, |p| p.line() as usize);
    MilacError::Parse {
        line,
        msg: e.to_string(),
    }
}

fn writer<W: Write>(w: W, flexible: bool) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .flexible(flexible)
        .from_writer(w)
}

fn write_records<W: Write>(records: &[SweepRecord], w: W) -> Result<()> {
    let mut out = writer(w, false);
    out.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in records {
        out.write_record([
            r.scheme.as_str().to_string(),
            r.n.to_string(),
            r.k.to_string(),
            real(r.snr_db),
            r.trial.to_string(),
            r.seed.to_string(),
            real(r.sum_rate_bits),
            r.iterations.to_string(),
            r.status.as_str().to_string(),
            real(r.wall_time_ms),
        ])
        .map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

pub fn records_to_csv(records: &[SweepRecord]) -> Result<String> {
    let mut buf = Vec::new();
    write_records(records, &mut buf)?;
    String::from_utf8(buf).map_err(|e| MilacError::Io(e.to_string()))
}

/// Writes the records to `path`. An empty record list is an error.
pub fn emit_csv(records: &[SweepRecord], path: &Path) -> Result<()> {
    if records.is_empty() {
        return Err(MilacError::InvalidArgument("no records to write".into()));
    }
    let file = std::fs::File::create(path)
        .map_err(|e| MilacError::Io(format!("{}: {e}", path.display())))?;
    write_records(records, std::io::BufWriter::new(file))
}

fn field<T: std::str::FromStr>(row: &csv::StringRecord, idx: usize, line: usize) -> Result<T> {
    let raw = row.get(idx).unwrap_or("");
    raw.parse().map_err(|_| MilacError::Parse {
        line,
        msg: format!("bad value `{raw}` in column `{}`", CSV_HEADER[idx]),
    })
}

pub fn parse_csv<R: Read>(input: R) -> Result<Vec<SweepRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    let header = rdr.headers().map_err(csv_err)?;
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(MilacError::Parse {
            line: 1,
            msg: format!("unexpected header, want `{}`", CSV_HEADER.join(",")),
        });
    }
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(csv_err)?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        let scheme =
            row.get(0)
                .unwrap_or("")
                .parse()
                .map_err(|e: MilacError| MilacError::Parse {
                    line,
                    msg: e.to_string(),
                })?;
        out.push(SweepRecord {
            scheme,
            n: field(&row, 1, line)?,
            k: field(&row, 2, line)?,
            snr_db: field(&row, 3, line)?,
            trial: field(&row, 4, line)?,
            seed: field(&row, 5, line)?,
            sum_rate_bits: field(&row, 6, line)?,
            iterations: field(&row, 7, line)?,
            status: field(&row, 8, line)?,
            wall_time_ms: field(&row, 9, line)?,
        });
    }
    Ok(out)
}

pub fn format_complex(z: Complex64) -> String {
    format!("{:.16e}{:+.16e}j", z.re, z.im)
}

pub fn parse_complex(s: &str) -> Result<Complex64> {
    let bad = || MilacError::InvalidArgument(format!("bad complex value `{s}`"));
    let body = s.trim().strip_suffix('j').ok_or_else(bad)?;
    let bytes = body.as_bytes();
    // the imaginary sign is the last +/- not part of an exponent
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'))
        .ok_or_else(bad)?;
    let re = body[..split].parse().map_err(|_| bad())?;
    let im = body[split..].parse().map_err(|_| bad())?;
    Ok(c(re, im))
}

/// One matrix row per line, entries `re+imj`, no header.
pub fn matrix_to_csv(m: &CMat) -> String {
    let mut s = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format_complex(m[(i, j)])).collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

pub fn matrix_from_csv(text: &str) -> Result<CMat> {
    let rows: Vec<Vec<Complex64>> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split(',').map(parse_complex).collect())
        .collect::<Result<_>>()?;
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(MilacError::Dimension("ragged matrix rows".into()));
    }
    Ok(CMat::from_fn(rows.len(), cols, |i, j| rows[i][j]))
}

/// Companion file for channel dumps: `out.csv` becomes `out.channels.csv`.
pub fn channels_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map_or_else(|| "sweep".into(), |s| s.to_string_lossy().into_owned());
    out.with_file_name(format!("{stem}.channels.csv"))
}

/// One line per user: `N,trial,user,h_k1,…,h_kN` with `h_kn` the entries of
/// row `k` of `H` (that is, of `h_kᴴ`).
pub fn write_channels(channels: &[TrialChannel], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)
        .map_err(|e| MilacError::Io(format!("{}: {e}", path.display())))?;
    let mut out = writer(std::io::BufWriter::new(file), true);
    out.write_record(["N", "trial", "user", "entries"])
        .map_err(csv_err)?;
    for ch in channels {
        for k in 0..ch.h.nrows() {
            let mut row = vec![ch.n.to_string(), ch.trial.to_string(), k.to_string()];
            row.extend((0..ch.h.ncols()).map(|j| format_complex(ch.h[(k, j)])));
            out.write_record(&row).map_err(csv_err)?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn read_channels<R: Read>(input: R) -> Result<Vec<TrialChannel>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(input);
    let mut grouped: Vec<(usize, usize, Vec<Vec<Complex64>>)> = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(csv_err)?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        let int = |i: usize| -> Result<usize> {
            row.get(i)
                .and_then(|v| v.parse().ok())
                .ok_or(MilacError::Parse {
                    line,
                    msg: "bad channel row index".into(),
                })
        };
        let (n, trial, user) = (int(0)?, int(1)?, int(2)?);
        let entries: Vec<Complex64> = row
            .iter()
            .skip(3)
            .map(parse_complex)
            .collect::<Result<_>>()?;
        if entries.len() != n {
            return Err(MilacError::Parse {
                line,
                msg: format!("expected {n} entries, got {}", entries.len()),
            });
        }
        match grouped.last_mut() {
            Some((gn, gt, rows)) if *gn == n && *gt == trial && rows.len() == user => {
                rows.push(entries)
            }
            _ if user == 0 => grouped.push((n, trial, vec![entries])),
            _ => {
                return Err(MilacError::Parse {
                    line,
                    msg: "channel rows out of order".into(),
                })
            }
        }
    }
    Ok(grouped
        .into_iter()
        .map(|(n, trial, rows)| TrialChannel {
            n,
            trial,
            h: CMat::from_fn(rows.len(), n, |i, j| rows[i][j]),
        })
        .collect())
}
