//! Region-restricted fidelity metrics, a pixel-space temporal consistency
//! score, and direction-aware min-max score aggregation.

use std::io::{Read, Write};
use std::path::Path;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imaging::{ssim_masked, BinaryMask};
use crate::scalar::Scalar;
use crate::video::{MaskVideo, VideoTensor};

/// PSNR reported when the compared pixels are identical.
pub const PSNR_CAP_DB: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    /// Mask = 1.
    Edited,
    /// Mask = 0.
    Preserved,
}

impl Region {
    fn select(self, mask: &BinaryMask) -> BinaryMask {
        match self {
            Region::Edited => mask.clone(),
            Region::Preserved => mask.complement(),
        }
    }
}

fn check_pair(a: &VideoTensor, b: &VideoTensor, mask: &MaskVideo) -> Result<()> {
    if a.dims() != b.dims() {
        return Err(Error::ShapeMismatch(format!(
            "compared videos {:?} and {:?}",
            a.dims(),
            b.dims()
        )));
    }
    a.check_mask(mask)
}

pub fn psnr_region<T: Scalar>(
    a: &VideoTensor,
    b: &VideoTensor,
    mask: &MaskVideo,
    region: Region,
) -> Result<T> {
    check_pair(a, b, mask)?;
    let want = match region {
        Region::Edited => 1,
        Region::Preserved => 0,
    };
    let c = a.channels();
    let mut sse = 0u64;
    let mut n = 0u64;
    for (i, m) in mask.frames().iter().enumerate() {
        let (fa, fb) = (a.frame(i).data(), b.frame(i).data());
        for (p, _) in m.data().iter().enumerate().filter(|(_, &v)| v == want) {
            for k in p * c..(p + 1) * c {
                let d = fa[k] as i64 - fb[k] as i64;
                sse += (d * d) as u64;
            }
            n += c as u64;
        }
    }
    if n == 0 {
        return Err(Error::DegenerateRegion);
    }
    Ok(psnr_from_sse(sse, n))
}

fn psnr_from_sse<T: Scalar>(sse: u64, n: u64) -> T {
    if sse == 0 {
        return T::lit(PSNR_CAP_DB);
    }
    let mse = T::lit(sse as f64) / T::lit(n as f64);
    let peak = T::lit(255.0 * 255.0);
    T::lit(10.0) * (peak / mse).log10()
}

/// Mean over frames of masked SSIM on the selected region. Frames whose
/// region is empty are skipped; an empty region overall is an error.
pub fn ssim_region<T: Scalar>(
    a: &VideoTensor,
    b: &VideoTensor,
    mask: &MaskVideo,
    region: Region,
) -> Result<T> {
    check_pair(a, b, mask)?;
    let mut sum = T::zero();
    let mut frames = 0usize;
    for (i, m) in mask.frames().iter().enumerate() {
        let sel = region.select(m);
        if sel.is_empty() {
            continue;
        }
        sum = sum + ssim_masked::<T>(a.frame(i), b.frame(i), Some(&sel))?;
        frames += 1;
    }
    if frames == 0 {
        return Err(Error::DegenerateRegion);
    }
    Ok(sum / T::from_count(frames))
}

/// Mean global SSIM between consecutive frames.
///
/// A pixel-space stand-in; published temporal consistency numbers come
/// from a learned feature extractor and are ingested instead.
pub fn temporal_consistency_pixel<T: Scalar>(video: &VideoTensor) -> Result<T> {
    if video.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "temporal consistency needs at least 2 frames, got {}",
            video.len()
        )));
    }
    let mut sum = T::zero();
    for t in 1..video.len() {
        sum = sum + ssim_masked::<T>(video.frame(t), video.frame(t - 1), None)?;
    }
    Ok(sum / T::from_count(video.len() - 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Higher,
    Lower,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricSpec {
    pub name: String,
    pub direction: Direction,
    #[serde(default = "yes", rename = "include")]
    pub include_in_avg: bool,
}

fn yes() -> bool {
    true
}

impl MetricSpec {
    /// Built-in conventions: FVD, ArtFID and CFSD are lower-better, the
    /// rest higher-better; CLIP-T is reported but not averaged.
    pub fn builtin(name: &str) -> Self {
        let key = name.trim().to_ascii_uppercase().replace(['_', ' '], "-");
        let direction = match key.as_str() {
            "FVD" | "ARTFID" | "CFSD" => Direction::Lower,
            _ => Direction::Higher,
        };
        MetricSpec {
            name: name.trim().to_string(),
            direction,
            include_in_avg: key != "CLIP-T",
        }
    }
}

/// Per-metric directions and inclusion, loaded from TOML:
///
/// ```toml
/// [[metric]]
/// name = "FVD"
/// direction = "lower"
/// include = true
/// ```
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricsConfig {
    #[serde(default, rename = "metric")]
    pub metrics: Vec<MetricSpec>,
}

impl MetricsConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Table(format!("metrics config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&s)
    }

    /// Configured spec for `name`, else the built-in convention.
    pub fn spec_for(&self, name: &str) -> MetricSpec {
        self.metrics
            .iter()
            .find(|m| m.name.eq_ignore_ascii_case(name.trim()))
            .cloned()
            .unwrap_or_else(|| MetricSpec::builtin(name))
    }
}

/// Methods x metrics. Cells may be missing only in non-averaged columns.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsTable<T> {
    methods: Vec<String>,
    columns: Vec<MetricSpec>,
    values: Vec<Vec<Option<T>>>,
}

fn is_missing(cell: &str) -> bool {
    matches!(cell.trim(), "" | "\\" | "-" | "NA" | "N/A" | "nan" | "NaN")
}

impl<T: Scalar> MetricsTable<T> {
    pub fn new(methods: Vec<String>, columns: Vec<MetricSpec>, values: Vec<Vec<Option<T>>>) -> Result<Self> {
        if values.len() != methods.len() {
            return Err(Error::Table(format!(
                "{} methods but {} rows",
                methods.len(),
                values.len()
            )));
        }
        for (m, row) in methods.iter().zip(&values) {
            if row.len() != columns.len() {
                return Err(Error::Table(format!(
                    "row `{m}` has {} cells, expected {}",
                    row.len(),
                    columns.len()
                )));
            }
            if let Some(v) = row.iter().flatten().find(|v| !v.is_finite()) {
                return Err(Error::Table(format!("row `{m}` has non-finite value {v}")));
            }
        }
        for (j, col) in columns.iter().enumerate() {
            if !col.include_in_avg {
                continue;
            }
            if let Some(i) = values.iter().position(|row| row[j].is_none()) {
                return Err(Error::Table(format!(
                    "missing `{}` value for method `{}`",
                    col.name, methods[i]
                )));
            }
        }
        Ok(Self {
            methods,
            columns,
            values,
        })
    }

    /// Parses CSV with a header row `method,<metric>,...`.
    pub fn from_csv<R: Read>(reader: R, config: &MetricsConfig) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let header = rdr.headers()?.clone();
        if header.len() < 2 {
            return Err(Error::Table("CSV needs a method column and at least one metric".into()));
        }
        let columns: Vec<MetricSpec> = header.iter().skip(1).map(|h| config.spec_for(h)).collect();
        let mut methods = Vec::new();
        let mut values = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            methods.push(rec.get(0).unwrap_or_default().to_string());
            let row = rec
                .iter()
                .skip(1)
                .enumerate()
                .map(|(j, cell)| {
                    if is_missing(cell) {
                        return Ok(None);
                    }
                    cell.parse::<f64>().map(|v| Some(T::lit(v))).map_err(|_| {
                        Error::Table(format!("bad `{}` value `{cell}`", columns[j].name))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            values.push(row);
        }
        Self::new(methods, columns, values)
    }

    pub fn load_csv(path: &Path, config: &MetricsConfig) -> Result<Self> {
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv(f, config)
    }

    pub fn methods(&self) -> &[String] {
        &self.methods
    }

    pub fn columns(&self) -> &[MetricSpec] {
        &self.columns
    }

    pub fn value(&self, method: usize, column: usize) -> Option<T> {
        self.values[method][column]
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name.eq_ignore_ascii_case(name))
    }

    pub fn method_index(&self, name: &str) -> Option<usize> {
        self.methods.iter().position(|m| m == name)
    }

    /// Sets a cell, appending the method row if needed. Unknown columns are
    /// ignored and reported as `false`.
    pub fn set(&mut self, method: &str, column: &str, value: T) -> bool {
        let Some(j) = self.column_index(column) else {
            return false;
        };
        let i = match self.method_index(method) {
            Some(i) => i,
            None => {
                self.methods.push(method.to_string());
                self.values.push(vec![None; self.columns.len()]);
                self.methods.len() - 1
            }
        };
        self.values[i][j] = Some(value);
        true
    }

    /// Re-checks invariants after in-place edits.
    pub fn validated(self) -> Result<Self> {
        Self::new(self.methods, self.columns, self.values)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizedScores<T> {
    pub methods: Vec<String>,
    pub scores: Vec<T>,
    /// Averaged columns.
    pub used: Vec<String>,
    /// Constant columns left out of the average.
    pub dropped: Vec<String>,
}

impl<T: Scalar> NormalizedScores<T> {
    pub fn score(&self, method: &str) -> Option<T> {
        self.methods.iter().position(|m| m == method).map(|i| self.scores[i])
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["method", "normalized_avg_score"])?;
        for (m, s) in self.methods.iter().zip(&self.scores) {
            w.write_record([m.as_str(), &format!("{:.6}", s.as_f64())])?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }
}

/// Min-max normalizes each averaged column (best = 1, worst = 0) and
/// averages them with equal weight.
pub fn normalized_avg_score<T: Scalar>(table: &MetricsTable<T>) -> Result<NormalizedScores<T>> {
    let n = table.methods.len();
    if n < 2 {
        return Err(Error::Table(format!("normalization needs >= 2 methods, got {n}")));
    }
    let mut totals = vec![T::zero(); n];
    let mut used = Vec::new();
    let mut dropped = Vec::new();
    for (j, col) in table.columns.iter().enumerate() {
        if !col.include_in_avg {
            continue;
        }
        let vals: Vec<T> = table.values.iter().map(|r| r[j].expect("validated")).collect();
        let lo = vals.iter().copied().fold(T::infinity(), T::min);
        let hi = vals.iter().copied().fold(T::neg_infinity(), T::max);
        let span = hi - lo;
        if span <= T::zero() {
            warn!("column `{}` is constant; dropped from the average", col.name);
            dropped.push(col.name.clone());
            continue;
        }
        for (t, &x) in totals.iter_mut().zip(&vals) {
            let norm = match col.direction {
                Direction::Higher => (x - lo) / span,
                Direction::Lower => (hi - x) / span,
            };
            *t = *t + norm;
        }
        used.push(col.name.clone());
    }
    if used.is_empty() {
        return Err(Error::DegenerateNormalization);
    }
    let k = T::from_count(used.len());
    Ok(NormalizedScores {
        methods: table.methods.clone(),
        scores: totals.into_iter().map(|t| t / k).collect(),
        used,
        dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::Frame;

    fn video(frames: Vec<Frame>) -> VideoTensor {
        VideoTensor::new(frames).unwrap()
    }

    fn textured(seed: usize) -> Frame {
        Frame::from_fn(12, 14, 3, |y, x, c| ((y * 17 + x * 29 + c * 7 + seed * 13) % 200) as u8).unwrap()
    }

    #[test]
    fn psnr_identical_is_capped() {
        let a = video(vec![textured(0), textured(1)]);
        let m = MaskVideo::filled(2, 12, 14, false).unwrap();
        assert_eq!(psnr_region::<f64>(&a, &a, &m, Region::Preserved).unwrap(), 100.0);
    }

    #[test]
    fn psnr_unit_offset() {
        let a = video(vec![textured(0)]);
        let m = MaskVideo::new(vec![BinaryMask::from_fn(12, 14, |y, _| y < 4).unwrap()]).unwrap();
        let mut f = a.frame(0).clone();
        for y in 0..12 {
            for x in 0..14 {
                for c in 0..3 {
                    if y < 4 {
                        f.set(y, x, c, 255 - f.get(y, x, c));
                    } else {
                        f.set(y, x, c, f.get(y, x, c) + 1);
                    }
                }
            }
        }
        let b = video(vec![f]);
        let p: f64 = psnr_region(&a, &b, &m, Region::Preserved).unwrap();
        assert!((p - 10.0 * (255.0f64 * 255.0).log10()).abs() < 1e-12);
        assert!((p - 48.13).abs() < 0.01);
    }

    #[test]
    fn psnr_empty_region_rejected() {
        let a = video(vec![textured(0)]);
        let m = MaskVideo::filled(1, 12, 14, true).unwrap();
        assert!(matches!(
            psnr_region::<f64>(&a, &a, &m, Region::Preserved),
            Err(Error::DegenerateRegion)
        ));
        assert!(ssim_region::<f64>(&a, &a, &m, Region::Preserved).is_err());
    }

    #[test]
    fn tc_of_static_video_is_one() {
        let v = video(vec![textured(3); 4]);
        assert_eq!(temporal_consistency_pixel::<f64>(&v).unwrap(), 1.0);
        assert!(temporal_consistency_pixel::<f64>(&video(vec![textured(3)])).is_err());
    }

    #[test]
    fn builtin_directions() {
        assert_eq!(MetricSpec::builtin("FVD").direction, Direction::Lower);
        assert_eq!(MetricSpec::builtin("ArtFID").direction, Direction::Lower);
        assert_eq!(MetricSpec::builtin("cfsd").direction, Direction::Lower);
        assert_eq!(MetricSpec::builtin("PSNR_P").direction, Direction::Higher);
        assert!(!MetricSpec::builtin("CLIP-T").include_in_avg);
        assert!(!MetricSpec::builtin("clip_t").include_in_avg);
    }

    #[test]
    fn config_overrides_builtin() {
        let cfg = MetricsConfig::from_toml_str(
            "[[metric]]\nname = \"TC\"\ndirection = \"lower\"\ninclude = false\n",
        )
        .unwrap();
        let s = cfg.spec_for("tc");
        assert_eq!(s.direction, Direction::Lower);
        assert!(!s.include_in_avg);
        assert_eq!(cfg.spec_for("FVD").direction, Direction::Lower);
    }

    #[test]
    fn dominance_gives_one_and_zero() {
        let csv = "method,PSNR,FVD\na,30,100\nb,20,200\n";
        let t = MetricsTable::<f64>::from_csv(csv.as_bytes(), &MetricsConfig::default()).unwrap();
        let s = normalized_avg_score(&t).unwrap();
        assert_eq!(s.scores, vec![1.0, 0.0]);
    }

    #[test]
    fn constant_column_dropped() {
        let csv = "method,PSNR,SSIM\na,30,0.9\nb,20,0.9\nc,25,0.9\n";
        let t = MetricsTable::<f64>::from_csv(csv.as_bytes(), &MetricsConfig::default()).unwrap();
        let s = normalized_avg_score(&t).unwrap();
        assert_eq!(s.dropped, vec!["SSIM".to_string()]);
        assert_eq!(s.scores, vec![1.0, 0.0, 0.5]);
        let csv = "method,SSIM\na,0.9\nb,0.9\n";
        let t = MetricsTable::<f64>::from_csv(csv.as_bytes(), &MetricsConfig::default()).unwrap();
        assert!(matches!(normalized_avg_score(&t), Err(Error::DegenerateNormalization)));
    }

    #[test]
    fn missing_cells() {
        let cfg = MetricsConfig::default();
        let ok = "method,PSNR,CLIP-T\na,30,\\\nb,20,12.0\n";
        assert!(MetricsTable::<f64>::from_csv(ok.as_bytes(), &cfg).is_ok());
        let bad = "method,PSNR,FVD\na,30,\nb,20,12.0\n";
        assert!(MetricsTable::<f64>::from_csv(bad.as_bytes(), &cfg).is_err());
        let one = "method,PSNR\na,30\n";
        let t = MetricsTable::<f64>::from_csv(one.as_bytes(), &cfg).unwrap();
        assert!(normalized_avg_score(&t).is_err());
    }

    #[test]
    fn set_appends_rows() {
        let csv = "method,PSNR,FVD\na,30,100\n";
        let mut t = MetricsTable::<f64>::from_csv(csv.as_bytes(), &MetricsConfig::default()).unwrap();
        assert!(t.set("b", "psnr", 20.0));
        assert!(!t.set("b", "nope", 1.0));
        assert!(t.clone().validated().is_err());
        t.set("b", "FVD", 300.0);
        let t = t.validated().unwrap();
        assert_eq!(normalized_avg_score(&t).unwrap().scores, vec![1.0, 0.0]);
    }
}
