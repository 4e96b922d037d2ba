//! Minimal SVG line charts of the mean curves.

use super::SummaryRow;
use crate::error::Result;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

const W: f64 = 640.0;
const H: f64 = 420.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

struct Series {
    label: String,
    points: Vec<(f64, f64)>,
}

fn chart(title: &str, x_label: &str, series: &[Series]) -> String {
    let all = series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    let y1 = if y1 > 0.0 { y1 * 1.05 } else { 1.0 };
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
    let sy = |y: f64| H - MARGIN - y / y1 * (H - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{title}</text>"#,
        W / 2.0
    );
    let _ = writeln!(
        s,
        r#"<path d="M{m} {t} V{b} H{r}" stroke="black" fill="none"/>"#,
        m = MARGIN,
        t = MARGIN,
        b = H - MARGIN,
        r = W - MARGIN
    );
    for i in 0..=4 {
        let fx = x0 + (x1 - x0) * i as f64 / 4.0;
        let fy = y1 * i as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{:.4}</text>"#,
            sx(fx),
            H - MARGIN + 18.0,
            fx
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{:.2}</text>"#,
            MARGIN - 6.0,
            sy(fy) + 4.0,
            fy
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{x_label}</text>"#,
        W / 2.0,
        H - 16.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">sum rate (bit/s/Hz)</text>"#,
        H / 2.0,
        H / 2.0
    );
    for (i, ser) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<String> = ser
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" stroke="{color}" stroke-width="2" fill="none"/>"#,
            pts.join(" ")
        );
        let ly = MARGIN + 16.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            MARGIN + 10.0,
            MARGIN + 30.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}">{}</text>"#,
            MARGIN + 36.0,
            ly + 4.0,
            ser.label
        );
    }
    s.push_str("</svg>\n");
    s
}

fn group<K: PartialEq + Copy>(
    rows: &[SummaryRow],
    key: impl Fn(&SummaryRow) -> K,
    label: impl Fn(&SummaryRow) -> String,
    x: impl Fn(&SummaryRow) -> f64,
) -> Vec<Series> {
    let mut keys: Vec<K> = Vec::new();
    let mut out: Vec<Series> = Vec::new();
    for r in rows.iter().filter(|r| r.mean.is_finite()) {
        let k = key(r);
        let idx = match keys.iter().position(|&q| q == k) {
            Some(i) => i,
            None => {
                keys.push(k);
                out.push(Series {
                    label: label(r),
                    points: Vec::new(),
                });
                out.len() - 1
            }
        };
        out[idx].points.push((x(r), r.mean));
    }
    for s in &mut out {
        s.points.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    out
}

/// Writes `<prefix>_snr.svg` when the sweep has several SNR points and
/// `<prefix>_antennas.svg` when it has several antenna counts.
pub fn write_plots(rows: &[SummaryRow], prefix: &Path) -> Result<Vec<PathBuf>> {
    let mut snrs: Vec<u64> = rows.iter().map(|r| r.snr_db.to_bits()).collect();
    snrs.sort();
    snrs.dedup();
    let mut ns: Vec<usize> = rows.iter().map(|r| r.n).collect();
    ns.sort();
    ns.dedup();
    let base = prefix.to_string_lossy().into_owned();
    let mut written = Vec::new();
    if snrs.len() > 1 {
        let series = group(
            rows,
            |r| (r.scheme, r.n),
            |r| format!("{} N={}", r.scheme, r.n),
            |r| r.snr_db,
        );
        let path = PathBuf::from(format!("{base}_snr.svg"));
        std::fs::write(&path, chart("Sum rate vs SNR", "SNR (dB)", &series))?;
        written.push(path);
    }
    if ns.len() > 1 {
        let series = group(
            rows,
            |r| (r.scheme, r.snr_db.to_bits()),
            |r| format!("{} {} dB", r.scheme, r.snr_db),
            |r| r.n as f64,
        );
        let path = PathBuf::from(format!("{base}_antennas.svg"));
        std::fs::write(&path, chart("Sum rate vs number of antennas", "N", &series))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::super::Scheme;
    use super::*;

    fn row(scheme: Scheme, n: usize, snr: f64, mean: f64) -> SummaryRow {
        SummaryRow {
            scheme,
            n,
            k: 2,
            snr_db: snr,
            trials: 1,
            failed: 0,
            mean,
            stderr: 0.0,
            ratio_to_digital: None,
        }
    }

    #[test]
    fn writes_only_meaningful_axes() {
        let dir = tempfile::tempdir().unwrap();
        let prefix = dir.path().join("out");
        let one = [row(Scheme::Milac, 4, 0.0, 1.0)];
        assert!(write_plots(&one, &prefix).unwrap().is_empty());
        let rows = [
            row(Scheme::Milac, 4, 0.0, 1.0),
            row(Scheme::Milac, 4, 10.0, 3.0),
            row(Scheme::Digital, 4, 0.0, 1.1),
            row(Scheme::Digital, 4, 10.0, 3.2),
        ];
        let files = write_plots(&rows, &prefix).unwrap();
        assert_eq!(files.len(), 1);
        let svg = std::fs::read_to_string(&files[0]).unwrap();
        assert!(svg.starts_with("<svg") && svg.matches("<polyline").count() == 2);
    }
}
