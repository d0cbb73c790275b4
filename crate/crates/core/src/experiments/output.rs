use std::fmt::Write as _;
use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use super::{ExperimentConfig, ScalingRow, Study};
use crate::error::Result;

pub const SCALING_CSV_HEADER: &str = "n,mean,var,var_lo,var_hi,geo_len_mean,geo_len_sq_mean,ties,seconds";

/// A serialized experiment: the resolved configuration and whatever it produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub tool: String,
    pub version: String,
    pub study: Study,
    pub config: ExperimentConfig,
    pub seed: u64,
    pub results: serde_json::Value,
}

impl ExperimentReport {
    pub fn new(study: Study, config: &ExperimentConfig, results: impl Serialize) -> Result<Self> {
        Ok(Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            study,
            config: config.clone(),
            seed: config.seed,
            results: serde_json::to_value(results)?,
        })
    }
}

/// `{:.16e}`: 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

// Pretty JSON whose floats carry 17 significant digits.
struct Sig17(PrettyFormatter<'static>);

impl Formatter for Sig17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(fmt_f64(value).as_bytes())
    }
    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Pretty JSON with every float written as `{:.16e}`; non-finite floats become `null`.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig17(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

pub fn scaling_csv(rows: &[ScalingRow]) -> String {
    let mut out = String::from(SCALING_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let floats = [r.mean, r.var, r.var_lo, r.var_hi, r.geo_len_mean, r.geo_len_sq_mean];
        let cols: Vec<String> = floats.iter().map(|&x| fmt_f64(x)).collect();
        writeln!(out, "{},{},{},{}", r.n, cols.join(","), r.ties, fmt_f64(r.seconds)).unwrap();
    }
    out
}

/// One polyline, optionally with vertical error bars.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    pub bars: Option<Vec<(f64, f64)>>,
}

const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// Minimal standalone SVG line chart.
pub fn svg_line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let (w, h, pad) = (640.0, 420.0, 60.0);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for s in series {
        for (i, &(x, y)) in s.points.iter().enumerate() {
            xs.push(x);
            ys.push(y);
            if let Some(b) = &s.bars {
                ys.extend([b[i].0, b[i].1]);
            }
        }
    }
    let finite = |v: &Vec<f64>| v.iter().copied().filter(|x| x.is_finite()).collect::<Vec<_>>();
    let (xs, ys) = (finite(&xs), finite(&ys));
    let range = |v: &[f64]| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !lo.is_finite() {
            (0.0, 1.0)
        } else if hi > lo {
            (lo, hi)
        } else {
            (lo - 0.5, lo + 0.5)
        }
    };
    let ((x0, x1), (y0, y1)) = (range(&xs), range(&ys));
    let px = |x: f64| pad + (x - x0) / (x1 - x0) * (w - 2.0 * pad);
    let py = |y: f64| h - pad - (y - y0) / (y1 - y0) * (h - 2.0 * pad);
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#).unwrap();
    writeln!(
        out,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        w / 2.0,
        escape(title)
    )
    .unwrap();
    writeln!(
        out,
        r#"<path d="M{pad} {} H{} M{pad} {} V{pad}" stroke="black" fill="none"/>"#,
        h - pad,
        w - pad,
        h - pad
    )
    .unwrap();
    for (v, anchor) in [(x0, "start"), (x1, "end")] {
        writeln!(
            out,
            r#"<text x="{:.1}" y="{}" text-anchor="{anchor}">{}</text>"#,
            px(v),
            h - pad + 16.0,
            tick(v)
        )
        .unwrap();
    }
    for v in [y0, y1] {
        writeln!(
            out,
            r#"<text x="{}" y="{:.1}" text-anchor="end">{}</text>"#,
            pad - 6.0,
            py(v) + 4.0,
            tick(v)
        )
        .unwrap();
    }
    writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        w / 2.0,
        h - 16.0,
        escape(x_label)
    )
    .unwrap();
    writeln!(
        out,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        h / 2.0,
        h / 2.0,
        escape(y_label)
    )
    .unwrap();
    for (k, s) in series.iter().enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .map(|&(x, y)| format!("{:.1},{:.1}", px(x), py(y)))
            .collect();
        writeln!(
            out,
            r#"<polyline points="{}" stroke="{colour}" fill="none" stroke-width="2"/>"#,
            pts.join(" ")
        )
        .unwrap();
        if let Some(bars) = &s.bars {
            for (&(x, _), &(lo, hi)) in s.points.iter().zip(bars) {
                if lo.is_finite() && hi.is_finite() {
                    writeln!(
                        out,
                        r#"<line x1="{0:.1}" x2="{0:.1}" y1="{1:.1}" y2="{2:.1}" stroke="{colour}"/>"#,
                        px(x),
                        py(lo),
                        py(hi)
                    )
                    .unwrap();
                }
            }
        }
        writeln!(
            out,
            r#"<text x="{}" y="{}" fill="{colour}">{}</text>"#,
            w - pad - 120.0,
            pad + 16.0 * k as f64,
            escape(&s.name)
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::Distribution;

    #[test]
    fn floats_carry_17_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(2.0), "2.0000000000000000e0");
        let s = to_json(&serde_json::json!({"x": 0.1, "n": 3, "bad": f64::NAN})).unwrap();
        assert!(s.contains("\"x\": 1.0000000000000001e-1"), "{s}");
        assert!(s.contains("\"bad\": null"));
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["x"].as_f64(), Some(0.1));
    }

    #[test]
    fn report_round_trips() {
        let cfg = ExperimentConfig::new(Distribution::exponential(1.0).unwrap(), 2, vec![5], 3, 9);
        let rep = ExperimentReport::new(Study::Tails { n: 4 }, &cfg, vec![1.5, 2.5]).unwrap();
        let text = to_json(&rep).unwrap();
        let back: ExperimentReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, rep);
        assert_eq!(to_json(&back).unwrap(), text);
    }

    #[test]
    fn csv_layout() {
        let row = ScalingRow {
            n: 25,
            m: 3,
            mean: 10.0,
            var: 2.0,
            var_lo: 1.5,
            var_hi: 2.5,
            geo_len_mean: 27.0,
            geo_len_sq_mean: 740.0,
            ties: 0,
            seconds: 0.0,
        };
        let csv = scaling_csv(&[row]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], SCALING_CSV_HEADER);
        assert_eq!(lines[1].split(',').count(), 9);
        assert!(lines[1].starts_with("25,1.0000000000000000e1,"));
    }

    #[test]
    fn svg_is_well_formed() {
        let s = svg_line_chart(
            "Var/n",
            "n",
            "Var/n",
            &[Series {
                name: "exp".into(),
                points: vec![(25.0, 0.3), (50.0, 0.25)],
                bars: Some(vec![(0.2, 0.4), (0.2, 0.3)]),
            }],
        );
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
        assert_eq!(s.matches("<polyline").count(), 1);
        assert_eq!(s.matches("<line").count(), 2);
    }
}
