//! Static SVG trend charts drawn from a finished report.

use std::fmt::Write as _;

use super::report::Report;

const W: f64 = 760.0;
const H: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 130.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 4] = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a"];

struct Series {
    label: String,
    points: Vec<(f64, f64)>,
}

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, log: bool) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.filter(|v| v.is_finite() && (!log || *v > 0.0)) {
            let v = if log { v.log10() } else { v };
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if hi - lo < 1e-12 {
            (lo, hi) = (lo - 0.5, hi + 0.5);
        }
        let pad = 0.05 * (hi - lo);
        Self {
            lo: lo - pad,
            hi: hi + pad,
            log,
        }
    }

    fn unit(&self, v: f64) -> Option<f64> {
        let v = if self.log {
            if v <= 0.0 {
                return None;
            }
            v.log10()
        } else {
            v
        };
        v.is_finite().then(|| (v - self.lo) / (self.hi - self.lo))
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        (0..=4)
            .map(|i| {
                let t = self.lo + (self.hi - self.lo) * i as f64 / 4.0;
                let label = if self.log {
                    format!("{:.3e}", 10f64.powf(t))
                } else {
                    format!("{t:.3}")
                };
                (i as f64 / 4.0, label)
            })
            .collect()
    }
}

fn chart(title: &str, y_label: &str, series: &[Series], y_log: bool, reference: Option<f64>) -> String {
    let x = Axis::fit(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)), true);
    let y = Axis::fit(
        series
            .iter()
            .flat_map(|s| s.points.iter().map(|p| p.1))
            .chain(reference),
        y_log,
    );
    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;
    let px = |u: f64| LEFT + u * pw;
    let py = |u: f64| TOP + (1.0 - u) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="14">{title}</text>"#,
        W / 2.0
    );
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for (u, label) in x.ticks() {
        let _ = writeln!(
            s,
            r##"<line x1="{0:.1}" y1="{1:.1}" x2="{0:.1}" y2="{2:.1}" stroke="#ddd"/><text x="{0:.1}" y="{3:.1}" text-anchor="middle">{label}</text>"##,
            px(u),
            TOP,
            TOP + ph,
            TOP + ph + 16.0
        );
    }
    for (u, label) in y.ticks() {
        let _ = writeln!(
            s,
            r##"<line x1="{1:.1}" y1="{0:.1}" x2="{2:.1}" y2="{0:.1}" stroke="#ddd"/><text x="{3:.1}" y="{4:.1}" text-anchor="end">{label}</text>"##,
            py(u),
            LEFT,
            LEFT + pw,
            LEFT - 6.0,
            py(u) + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">p (log scale)</text>"#,
        LEFT + pw / 2.0,
        H - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{0:.1}" text-anchor="middle" transform="rotate(-90 16 {0:.1})">{y_label}</text>"#,
        TOP + ph / 2.0
    );
    if let Some(u) = reference.and_then(|r| y.unit(r)) {
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{0:.1}" x2="{1:.1}" y2="{0:.1}" stroke="#888" stroke-dasharray="4 3"/>"##,
            py(u),
            LEFT + pw
        );
    }
    for (i, ser) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<String> = ser
            .points
            .iter()
            .filter_map(|&(a, b)| Some(format!("{:.1},{:.1}", px(x.unit(a)?), py(y.unit(b)?))))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{}"/>"#,
            pts.join(" ")
        );
        let ly = TOP + 14.0 + 16.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{0:.1}" y1="{1:.1}" x2="{2:.1}" y2="{1:.1}" stroke="{color}" stroke-width="2"/><text x="{3:.1}" y="{4:.1}">{5}</text>"#,
            LEFT + pw + 10.0,
            ly,
            LEFT + pw + 30.0,
            LEFT + pw + 36.0,
            ly + 4.0,
            ser.label
        );
    }
    s.push_str("</svg>\n");
    s
}

fn series_by(report: &Report, value: impl Fn(&crate::moments::MomentReport) -> f64) -> Vec<Series> {
    let (n_list, m_list) = report.config.normalized_lists();
    let mut out = Vec::new();
    for &n in &n_list {
        for &m in &m_list {
            let points = report
                .primes
                .iter()
                .flat_map(|r| r.moments.iter().map(move |mr| (r.p, mr)))
                .filter(|(_, mr)| mr.n == n && mr.m == m)
                .map(|(p, mr)| (p as f64, value(mr)))
                .collect();
            out.push(Series {
                label: format!("n={n}, m={m}"),
                points,
            });
        }
    }
    out
}

/// `weighted / (C unweighted_all)` against `p`.
pub fn ratio_chart(report: &Report) -> String {
    let series = series_by(report, |mr| mr.conjecture_ratio);
    chart("Conjecture ratio", "weighted / (C * unweighted)", &series, false, Some(1.0))
}

/// Normalized weighted residual against `p`, both axes logarithmic.
pub fn residual_chart(report: &Report) -> String {
    let series = series_by(report, |mr| mr.residual_norm);
    chart("Normalized weighted residual", "residual_norm", &series, true, Some(10.0))
}
