use super::{Scheme, Status, SweepRecord};

/// Mean over trials at one `(scheme, N, SNR)` point. Failed records are
/// left out of the statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub scheme: Scheme,
    pub n: usize,
    pub k: usize,
    pub snr_db: f64,
    pub trials: usize,
    pub failed: usize,
    pub mean: f64,
    /// Sample standard deviation over `√trials`; zero for a single trial.
    pub stderr: f64,
    /// Mean rate over the digital mean at the same point, when available.
    pub ratio_to_digital: Option<f64>,
}

pub fn summarize(records: &[SweepRecord]) -> Vec<SummaryRow> {
    struct Group {
        scheme: Scheme,
        n: usize,
        k: usize,
        snr_db: f64,
        rates: Vec<f64>,
        failed: usize,
    }
    let mut groups: Vec<Group> = Vec::new();
    for r in records {
        let idx = groups.iter().position(|g| {
            g.scheme == r.scheme && g.n == r.n && g.snr_db.to_bits() == r.snr_db.to_bits()
        });
        let g = match idx {
            Some(i) => &mut groups[i],
            None => {
                groups.push(Group {
                    scheme: r.scheme,
                    n: r.n,
                    k: r.k,
                    snr_db: r.snr_db,
                    rates: Vec::new(),
                    failed: 0,
                });
                groups.last_mut().unwrap()
            }
        };
        if r.status == Status::Failed {
            g.failed += 1;
        } else {
            g.rates.push(r.sum_rate_bits);
        }
    }

    let mut rows: Vec<SummaryRow> = groups
        .into_iter()
        .map(|g| {
            let m = g.rates.len();
            let mean = if m == 0 {
                f64::NAN
            } else {
                g.rates.iter().sum::<f64>() / m as f64
            };
            let stderr = if m < 2 {
                0.0
            } else {
                let var = g.rates.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
                (var / m as f64).sqrt()
            };
            SummaryRow {
                scheme: g.scheme,
                n: g.n,
                k: g.k,
                snr_db: g.snr_db,
                trials: m,
                failed: g.failed,
                mean,
                stderr,
                ratio_to_digital: None,
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        a.n.cmp(&b.n)
            .then(a.snr_db.total_cmp(&b.snr_db))
            .then(a.scheme.cmp(&b.scheme))
    });
    let digital: Vec<(usize, u64, f64)> = rows
        .iter()
        .filter(|r| r.scheme == Scheme::Digital)
        .map(|r| (r.n, r.snr_db.to_bits(), r.mean))
        .collect();
    for row in &mut rows {
        row.ratio_to_digital = digital
            .iter()
            .find(|(n, s, _)| *n == row.n && *s == row.snr_db.to_bits())
            .and_then(|&(_, _, d)| (d > 0.0).then(|| row.mean / d));
    }
    rows
}

/// The summary as CSV text.
pub fn format_summary(rows: &[SummaryRow]) -> String {
    let mut s =
        String::from("scheme,N,K,snr_db,trials,failed,mean_bits,stderr_bits,ratio_to_digital\n");
    for r in rows {
        let ratio = r
            .ratio_to_digital
            .map_or_else(String::new, |x| format!("{x:.6}"));
        s.push_str(&format!(
            "{},{},{},{},{},{},{:.6},{:.6},{}\n",
            r.scheme, r.n, r.k, r.snr_db, r.trials, r.failed, r.mean, r.stderr, ratio
        ));
    }
    s
}
