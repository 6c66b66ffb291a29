//! Plain-text demand-curve files.
//!
//! ```text
//! # equity prospect agents
//! [d1]
//! breakpoints = -0.0286 0 0.0648
//! -352.1 -504
//! 0 26300 512000
//! 0 35000 -450000 1440000
//! 435.46 18500 -266000 938000
//!
//! [d2slope]
//! center = 0.008
//! amp = 110
//! left_rate = 150
//! left_pow = 1.5
//! right_rate = 40
//! right_pow = 1.3
//! anchor = 0.008
//! ```
//!
//! `#` starts a comment, blank lines are ignored. Under `[d1]` the optional
//! `breakpoints` line comes first and every other line is one segment's
//! coefficients, constant first, separated by whitespace or commas. All
//! `[d2slope]` keys are required except `anchor`, which defaults to
//! `center`.

use std::fmt::Write as _;

use super::{DemandCurve, StretchedExpPair};
use crate::error::{Error, Result};
use crate::poly::{PiecewisePoly, PolyCoeffs};
use crate::scalar::Scalar;

#[derive(PartialEq)]
enum Section {
    None,
    D1,
    D2Slope,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_numbers<T: Scalar>(text: &str, line: usize) -> Result<Vec<T>> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|tok| {
            tok.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .map(T::lit)
                .ok_or_else(|| parse_err(line, format!("bad number `{tok}`")))
        })
        .collect()
}

pub fn parse_curve<T: Scalar>(text: &str) -> Result<DemandCurve<T>> {
    let mut section = Section::None;
    let mut breakpoints: Vec<T> = Vec::new();
    let mut segments: Vec<PolyCoeffs<T>> = Vec::new();
    let mut keys: [Option<T>; 7] = [None; 7];
    const KEYS: [&str; 7] = [
        "center",
        "amp",
        "left_rate",
        "left_pow",
        "right_rate",
        "right_pow",
        "anchor",
    ];

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match line {
            "[d1]" => {
                section = Section::D1;
                continue;
            }
            "[d2slope]" => {
                section = Section::D2Slope;
                continue;
            }
            _ if line.starts_with('[') => {
                return Err(parse_err(line_no, format!("unknown section {line}")));
            }
            _ => {}
        }
        match section {
            Section::None => return Err(parse_err(line_no, "content before first section")),
            Section::D1 => {
                if let Some(rest) = line.strip_prefix("breakpoints") {
                    let rest = rest.trim_start().strip_prefix('=').ok_or_else(|| {
                        parse_err(line_no, "expected `breakpoints = ...`")
                    })?;
                    if !segments.is_empty() {
                        return Err(parse_err(line_no, "breakpoints must precede segments"));
                    }
                    breakpoints = parse_numbers(rest, line_no)?;
                } else {
                    let coeffs = parse_numbers(line, line_no)?;
                    segments.push(
                        PolyCoeffs::new(coeffs).map_err(|e| parse_err(line_no, e.to_string()))?,
                    );
                }
            }
            Section::D2Slope => {
                let (key, value) = line
                    .split_once('=')
                    .ok_or_else(|| parse_err(line_no, "expected `key = value`"))?;
                let key = key.trim();
                let slot = KEYS
                    .iter()
                    .position(|k| *k == key)
                    .ok_or_else(|| parse_err(line_no, format!("unknown key `{key}`")))?;
                let nums = parse_numbers::<T>(value, line_no)?;
                if nums.len() != 1 {
                    return Err(parse_err(line_no, format!("`{key}` takes one number")));
                }
                keys[slot] = Some(nums[0]);
            }
        }
    }

    let missing = |name: &str| parse_err(0, format!("missing [d2slope] key `{name}`"));
    let get = |i: usize| keys[i].ok_or_else(|| missing(KEYS[i]));
    let slope = StretchedExpPair::new(get(0)?, get(1)?, (get(2)?, get(3)?), (get(4)?, get(5)?))?;
    let anchor = keys[6].unwrap_or(slope.center);
    let d1 = PiecewisePoly::new(breakpoints, segments)?;
    DemandCurve::new(d1, slope, anchor)
}

pub fn format_curve<T: Scalar>(curve: &DemandCurve<T>) -> String {
    let mut out = String::from("[d1]\n");
    let d1 = curve.d1_poly();
    if !d1.breakpoints().is_empty() {
        out.push_str("breakpoints =");
        for b in d1.breakpoints() {
            let _ = write!(out, " {b}");
        }
        out.push('\n');
    }
    for seg in d1.segments() {
        let line: Vec<String> = seg.coeffs().iter().map(|c| c.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    let s = curve.d2_slope_fn();
    let _ = write!(
        out,
        "\n[d2slope]\ncenter = {}\namp = {}\nleft_rate = {}\nleft_pow = {}\nright_rate = {}\nright_pow = {}\nanchor = {}\n",
        s.center,
        s.amp,
        s.left_rate,
        s.left_pow,
        s.right_rate,
        s.right_pow,
        curve.d2_anchor()
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demand::{equity_preset, fx_preset};

    #[test]
    fn presets_survive_format_and_parse() {
        for curve in [equity_preset::<f64>(), fx_preset::<f64>()] {
            let text = format_curve(&curve);
            let back: DemandCurve<f64> = parse_curve(&text).unwrap();
            assert_eq!(back.d1_poly(), curve.d1_poly());
            assert_eq!(back.d2_slope_fn(), curve.d2_slope_fn());
            assert_eq!(back.d2_anchor(), curve.d2_anchor());
        }
    }

    #[test]
    fn comments_commas_and_default_anchor() {
        let text = "# demo\n[d1]\nbreakpoints = 0\n1, 2 # left\n3 4\n[d2slope]\ncenter=0.01\namp=5\nleft_rate=1\nleft_pow=1\nright_rate=2\nright_pow=2\n";
        let c: DemandCurve<f64> = parse_curve(text).unwrap();
        assert_eq!(c.d2_anchor(), 0.01);
        assert_eq!(c.eval_d1(-1.0).unwrap(), -1.0);
        assert_eq!(c.eval_d1(1.0).unwrap(), 7.0);
    }

    #[test]
    fn reports_line_numbers() {
        let text = "[d1]\n1 2\n\n[d2slope]\ncenter = abc\n";
        match parse_curve::<f64>(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_curve::<f64>("1 2\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_curve::<f64>("[d1]\n1\n[d2slope]\ncenter = 0\n"),
            Err(Error::Parse { .. })
        ));
    }
}
