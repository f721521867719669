//! Posture-dependent shoulder and elbow flexion strength.
//!
//! Strength is a gender-scaled polynomial in the shoulder flexion angle
//! `alpha_s` and the included elbow angle `alpha_e`, both in degrees. The
//! standard deviation is a fixed coefficient of variation of the mean. The
//! coefficients live in a small key/value data file with a trailing sha256
//! checksum line; the default file is compiled in.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exec::{self, Execution};

/// The coefficient file shipped with the crate.
pub const DEFAULT_COEFFICIENTS: &str = include_str!("../data/strength_coefficients.txt");
const DEFAULT_NAME: &str = "strength_coefficients.txt";
const SUPPORTED_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gender {
    #[default]
    Male,
    Female,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Joint {
    Shoulder,
    Elbow,
}

impl Joint {
    pub const ALL: [Joint; 2] = [Joint::Shoulder, Joint::Elbow];

    pub fn name(self) -> &'static str {
        match self {
            Joint::Shoulder => "shoulder",
            Joint::Elbow => "elbow",
        }
    }
}

/// Regression of one joint's flexion strength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    pub c0: f64,
    pub c_ae: f64,
    pub c_ae2: f64,
    pub c_as: f64,
    pub c_as2: f64,
    pub c_asae: f64,
}

impl Polynomial {
    pub fn eval(&self, alpha_s: f64, alpha_e: f64) -> f64 {
        self.c0
            + self.c_ae * alpha_e
            + self.c_ae2 * alpha_e * alpha_e
            + self.c_as * alpha_s
            + self.c_as2 * alpha_s * alpha_s
            + self.c_asae * alpha_s * alpha_e
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointRegression {
    pub poly: Polynomial,
    pub cv: f64,
    pub male_factor: f64,
    pub female_factor: f64,
}

impl JointRegression {
    fn factor(&self, gender: Gender) -> f64 {
        match gender {
            Gender::Male => self.male_factor,
            Gender::Female => self.female_factor,
        }
    }
}

/// Admissible angle box, degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleBox {
    pub alpha_s: (f64, f64),
    pub alpha_e: (f64, f64),
}

/// Strength regressions for both joints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrengthModel {
    pub version: u32,
    pub limits: AngleBox,
    pub shoulder: JointRegression,
    pub elbow: JointRegression,
}

/// Mean and standard deviation of a joint strength, N*m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrengthSample {
    pub mean: f64,
    pub sigma: f64,
}

impl StrengthSample {
    pub fn new(mean: f64, sigma: f64) -> Result<Self> {
        if !(mean > 0.0 && mean.is_finite()) {
            return Err(Error::domain(format!("mean strength must be > 0, got {mean}")));
        }
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::domain(format!("sigma must be >= 0, got {sigma}")));
        }
        Ok(StrengthSample { mean, sigma })
    }

    /// Strength at `z` standard deviations from the mean.
    pub fn at(&self, z: f64) -> Result<f64> {
        percentile_strength(self, z)
    }
}

/// `mean + z * sigma`; a nonpositive result is a nonphysical population tail.
pub fn percentile_strength(sample: &StrengthSample, z: f64) -> Result<f64> {
    if !z.is_finite() {
        return Err(Error::domain("population offset z must be finite"));
    }
    let v = sample.mean + z * sample.sigma;
    if v <= 0.0 {
        return Err(Error::domain(format!(
            "nonphysical population tail: mean {} + {z} sigma = {v} <= 0",
            sample.mean
        )));
    }
    Ok(v)
}

impl Default for StrengthModel {
    fn default() -> Self {
        StrengthModel::parse(DEFAULT_COEFFICIENTS, DEFAULT_NAME)
            .expect("shipped coefficient file is valid")
    }
}

impl StrengthModel {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        StrengthModel::parse(&text, &path.display().to_string())
    }

    /// Parses a coefficient file. `name` is used in diagnostics.
    pub fn parse(text: &str, name: &str) -> Result<Self> {
        let mut values: BTreeMap<String, (usize, f64)> = BTreeMap::new();
        let mut version = None;
        let mut checksum_seen = false;
        let mut offset = 0usize;

        for (i, raw) in text.split_inclusive('\n').enumerate() {
            let lineno = i + 1;
            let line = raw.trim();
            let start = offset;
            offset += raw.len();
            if checksum_seen {
                if line.is_empty() {
                    continue;
                }
                return Err(Error::data(name, lineno, "content after checksum line"));
            }
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::data(name, lineno, "expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "checksum" => {
                    let actual = sha256_hex(&text.as_bytes()[..start]);
                    if !value.eq_ignore_ascii_case(&actual) {
                        return Err(Error::data(
                            name,
                            lineno,
                            format!("checksum mismatch: file says {value}, content hashes to {actual}"),
                        ));
                    }
                    checksum_seen = true;
                }
                "version" => {
                    let v: u32 = value
                        .parse()
                        .map_err(|_| Error::data(name, lineno, "version must be an integer"))?;
                    if v != SUPPORTED_VERSION {
                        return Err(Error::data(
                            name,
                            lineno,
                            format!("unsupported version {v}, expected {SUPPORTED_VERSION}"),
                        ));
                    }
                    version = Some(v);
                }
                _ => {
                    let v: f64 = value.parse().map_err(|_| {
                        Error::data(name, lineno, format!("`{key}`: `{value}` is not a number"))
                    })?;
                    if values.insert(key.to_string(), (lineno, v)).is_some() {
                        return Err(Error::data(name, lineno, format!("duplicate key `{key}`")));
                    }
                }
            }
        }

        let last = text.lines().count();
        if !checksum_seen {
            return Err(Error::data(name, last, "missing checksum line"));
        }
        let version = version.ok_or_else(|| Error::data(name, last, "missing version"))?;

        let mut take = |key: &str| -> Result<f64> {
            values
                .remove(key)
                .map(|(_, v)| v)
                .ok_or_else(|| Error::data(name, last, format!("missing key `{key}`")))
        };
        let limits = AngleBox {
            alpha_s: (take("limits.alpha_s.min")?, take("limits.alpha_s.max")?),
            alpha_e: (take("limits.alpha_e.min")?, take("limits.alpha_e.max")?),
        };
        let mut regression = |joint: &str| -> Result<JointRegression> {
            let mut k = |field: &str| take(&format!("{joint}.{field}"));
            Ok(JointRegression {
                poly: Polynomial {
                    c0: k("c0")?,
                    c_ae: k("c_ae")?,
                    c_ae2: k("c_ae2")?,
                    c_as: k("c_as")?,
                    c_as2: k("c_as2")?,
                    c_asae: k("c_asae")?,
                },
                cv: k("cv")?,
                male_factor: k("factor.male")?,
                female_factor: k("factor.female")?,
            })
        };
        let shoulder = regression("shoulder")?;
        let elbow = regression("elbow")?;
        if let Some((key, (lineno, _))) = values.into_iter().next() {
            return Err(Error::data(name, lineno, format!("unknown key `{key}`")));
        }

        let model = StrengthModel {
            version,
            limits,
            shoulder,
            elbow,
        };
        model.validate(name)?;
        Ok(model)
    }

    fn validate(&self, name: &str) -> Result<()> {
        let (s0, s1) = self.limits.alpha_s;
        let (e0, e1) = self.limits.alpha_e;
        if !(s0 < s1 && e0 < e1) {
            return Err(Error::data(name, 0, "angle limits must satisfy min < max"));
        }
        for joint in Joint::ALL {
            let reg = self.regression(joint);
            if !(reg.cv >= 0.0) || !(reg.male_factor > 0.0) || !(reg.female_factor > 0.0) {
                return Err(Error::data(
                    name,
                    0,
                    format!("{}: cv must be >= 0 and factors > 0", joint.name()),
                ));
            }
            // The regression is at most quadratic in each angle, so checking
            // the corners and stationary points would suffice; a dense grid is
            // simpler and cheap.
            for i in 0..=48 {
                for j in 0..=48 {
                    let a_s = s0 + (s1 - s0) * i as f64 / 48.0;
                    let a_e = e0 + (e1 - e0) * j as f64 / 48.0;
                    if !(reg.poly.eval(a_s, a_e) > 0.0) {
                        return Err(Error::data(
                            name,
                            0,
                            format!(
                                "{} strength is not positive at ({a_s}, {a_e})",
                                joint.name()
                            ),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn regression(&self, joint: Joint) -> &JointRegression {
        match joint {
            Joint::Shoulder => &self.shoulder,
            Joint::Elbow => &self.elbow,
        }
    }

    fn check_angles(&self, alpha_s: f64, alpha_e: f64) -> Result<()> {
        let (s0, s1) = self.limits.alpha_s;
        if !(alpha_s >= s0 && alpha_s <= s1) {
            return Err(Error::JointLimit {
                joint: "shoulder".into(),
                value: alpha_s,
                min: s0,
                max: s1,
            });
        }
        let (e0, e1) = self.limits.alpha_e;
        if !(alpha_e >= e0 && alpha_e <= e1) {
            return Err(Error::JointLimit {
                joint: "elbow".into(),
                value: alpha_e,
                min: e0,
                max: e1,
            });
        }
        Ok(())
    }

    /// Mean and sigma of `joint` flexion strength at the given angles.
    pub fn strength(
        &self,
        joint: Joint,
        alpha_s: f64,
        alpha_e: f64,
        gender: Gender,
    ) -> Result<StrengthSample> {
        self.check_angles(alpha_s, alpha_e)?;
        let reg = self.regression(joint);
        let mean = reg.factor(gender) * reg.poly.eval(alpha_s, alpha_e);
        StrengthSample::new(mean, reg.cv * mean)
    }

    pub fn shoulder_flexion_strength(
        &self,
        alpha_s: f64,
        alpha_e: f64,
        gender: Gender,
    ) -> Result<StrengthSample> {
        self.strength(Joint::Shoulder, alpha_s, alpha_e, gender)
    }

    pub fn elbow_flexion_strength(
        &self,
        alpha_s: f64,
        alpha_e: f64,
        gender: Gender,
    ) -> Result<StrengthSample> {
        self.strength(Joint::Elbow, alpha_s, alpha_e, gender)
    }

    /// Evaluates `joint` over a row-major grid (outer `alpha_s`, inner
    /// `alpha_e`).
    pub fn strength_surface(
        &self,
        joint: Joint,
        gender: Gender,
        grid: &SurfaceGrid,
        exec: Execution,
    ) -> Result<Vec<SurfaceRow>> {
        let a_s = grid.alpha_s.values()?;
        let a_e = grid.alpha_e.values()?;
        if a_s.is_empty() || a_e.is_empty() {
            return Err(Error::domain("empty strength grid"));
        }
        let points: Vec<(f64, f64)> = a_s
            .iter()
            .flat_map(|&s| a_e.iter().map(move |&e| (s, e)))
            .collect();
        exec::try_map(exec, &points, |&(s, e)| {
            let sample = self.strength(joint, s, e, gender)?;
            Ok(SurfaceRow {
                alpha_s: s,
                alpha_e: e,
                minus_2sigma: sample.mean - 2.0 * sample.sigma,
                mean: sample.mean,
                plus_2sigma: sample.mean + 2.0 * sample.sigma,
            })
        })
    }
}

/// Inclusive range `start, start + step, ...` up to `stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Range {
    pub fn single(x: f64) -> Self {
        Range {
            start: x,
            stop: x,
            step: 1.0,
        }
    }

    /// Grid values. Points are computed as `start + i * step` so long ranges
    /// do not accumulate rounding drift; `stop` is included when it lies on
    /// the grid to within a small tolerance.
    pub fn values(&self) -> Result<Vec<f64>> {
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(Error::domain("range bounds must be finite"));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::domain("range step must be > 0"));
        }
        if self.stop < self.start {
            return Ok(Vec::new());
        }
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        Ok((0..=n).map(|i| self.start + i as f64 * self.step).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceGrid {
    pub alpha_s: Range,
    pub alpha_e: Range,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceRow {
    pub alpha_s: f64,
    pub alpha_e: f64,
    pub minus_2sigma: f64,
    pub mean: f64,
    pub plus_2sigma: f64,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}
