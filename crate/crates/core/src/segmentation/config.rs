use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Segmentation parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SegConfig {
    /// Minimum number of white runs for a column's mean run length to count.
    pub runlength_min_count: usize,
    /// A column is text when its mean white run length is below this fraction of the page height.
    pub line_threshold: f64,
    /// Runs narrower than this fraction of the widest run are not text lines.
    pub min_line_fraction: f64,
    /// Trial skew angles in degrees.
    pub skew_candidates: Vec<f64>,
    /// Aspect ratio above which a box holds one whole character.
    pub ratio_accept: f64,
    /// Allowed distance of `height / m_h` from an integer when splitting.
    pub height_tolerance: f64,
    /// Gap fraction for absorbing background gaps (of the median line width)
    /// and for merging fragments (of `m_h`).
    pub merge_gap_fraction: f64,
    /// Components whose larger side is below this fraction of the line width are specks.
    pub min_box_fraction: f64,
    /// Extra columns added on each side of a text line before extracting components.
    pub strip_padding: usize,
}

impl Default for SegConfig {
    fn default() -> Self {
        SegConfig {
            runlength_min_count: 7,
            line_threshold: 0.25,
            min_line_fraction: 0.2,
            skew_candidates: vec![-1.0, -0.5, 0.0, 0.5, 1.0],
            ratio_accept: 0.8,
            height_tolerance: 0.2,
            merge_gap_fraction: 0.3,
            min_box_fraction: 0.1,
            strip_padding: 2,
        }
    }
}

impl SegConfig {
    // Negated comparisons so that NaN parameters are rejected.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if self.runlength_min_count == 0 {
            return bad("runlength_min_count must be positive");
        }
        if !(self.line_threshold > 0.0) {
            return bad("line_threshold must be positive");
        }
        if !(0.0..=1.0).contains(&self.min_line_fraction) {
            return bad("min_line_fraction must be in [0, 1]");
        }
        if self.skew_candidates.is_empty() || self.skew_candidates.iter().any(|a| !a.is_finite()) {
            return bad("skew_candidates must be a non-empty list of finite angles");
        }
        if !(self.ratio_accept > 0.0 && self.ratio_accept <= 1.0) {
            return bad("ratio_accept must be in (0, 1]");
        }
        if !(self.height_tolerance > 0.0) || !(self.merge_gap_fraction > 0.0) {
            return bad("height_tolerance and merge_gap_fraction must be positive");
        }
        if !(0.0..=1.0).contains(&self.min_box_fraction) {
            return bad("min_box_fraction must be in [0, 1]");
        }
        Ok(())
    }

    /// Parses `key=value` lines; unknown keys are errors, missing keys keep defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = SegConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |m: String| Error::format("segmentation config", i + 1, m);
            let (k, v) = line.split_once('=').ok_or_else(|| err("expected key=value".into()))?;
            let (k, v) = (k.trim(), v.trim());
            let num = |v: &str| v.parse::<f64>().map_err(|_| err(format!("bad number `{v}`")));
            match k {
                "runlength_min_count" => {
                    cfg.runlength_min_count = v.parse().map_err(|_| err(format!("bad count `{v}`")))?
                }
                "line_threshold" => cfg.line_threshold = num(v)?,
                "min_line_fraction" => cfg.min_line_fraction = num(v)?,
                "skew_candidates" => {
                    cfg.skew_candidates = v.split(',').map(|a| num(a.trim())).collect::<Result<_>>()?
                }
                "ratio_accept" => cfg.ratio_accept = num(v)?,
                "height_tolerance" => cfg.height_tolerance = num(v)?,
                "merge_gap_fraction" => cfg.merge_gap_fraction = num(v)?,
                "min_box_fraction" => cfg.min_box_fraction = num(v)?,
                "strip_padding" => cfg.strip_padding = v.parse().map_err(|_| err(format!("bad count `{v}`")))?,
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "runlength_min_count={}", self.runlength_min_count);
        let _ = writeln!(s, "line_threshold={}", self.line_threshold);
        let _ = writeln!(s, "min_line_fraction={}", self.min_line_fraction);
        let angles: Vec<String> = self.skew_candidates.iter().map(|a| a.to_string()).collect();
        let _ = writeln!(s, "skew_candidates={}", angles.join(","));
        let _ = writeln!(s, "ratio_accept={}", self.ratio_accept);
        let _ = writeln!(s, "height_tolerance={}", self.height_tolerance);
        let _ = writeln!(s, "merge_gap_fraction={}", self.merge_gap_fraction);
        let _ = writeln!(s, "min_box_fraction={}", self.min_box_fraction);
        let _ = writeln!(s, "strip_padding={}", self.strip_padding);
        s
    }
}
