//! Modified Denavit-Hartenberg chain for a five-joint right arm.
//!
//! World frame 0 sits at the shoulder with x pointing forward, y lateral and z
//! up. At the zero posture the arm hangs straight down. Joints 1-3 are the
//! shoulder (flexion, abduction, rotation), joints 4-5 the elbow (flexion,
//! pronation); frames 3, 4 and 5 share the elbow as origin. A fixed terminal
//! transform places the hand frame at the end of the forearm with its z axis
//! pointing distally.

use std::f64::consts::FRAC_PI_2;
use std::path::Path;

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const JOINTS: usize = 5;

/// Anatomical names of the five joints.
pub const JOINT_NAMES: [&str; JOINTS] = [
    "shoulder flexion",
    "shoulder abduction",
    "shoulder rotation",
    "elbow flexion",
    "forearm pronation",
];

/// One modified DH row. Angles in radians, lengths in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DHRow {
    /// 0 for revolute. Only revolute joints are supported.
    pub sigma: u8,
    pub alpha: f64,
    pub d: f64,
    pub theta_offset: f64,
    pub r: f64,
}

impl DHRow {
    pub const fn revolute(alpha: f64, d: f64, theta_offset: f64, r: f64) -> Self {
        DHRow {
            sigma: 0,
            alpha,
            d,
            theta_offset,
            r,
        }
    }
}

/// Transform from frame `j-1` to frame `j` for joint value `q`, with
/// `theta = theta_offset + q`.
pub fn dh_transform(row: &DHRow, q: f64) -> Matrix4<f64> {
    let theta = row.theta_offset + q;
    let (st, ct) = theta.sin_cos();
    let (sa, ca) = row.alpha.sin_cos();
    Matrix4::new(
        ct, -st, 0.0, row.d,
        ca * st, ca * ct, -sa, -row.r * sa,
        sa * st, sa * ct, ca, row.r * ca,
        0.0, 0.0, 0.0, 1.0,
    )
}

pub fn rotation(t: &Matrix4<f64>) -> Matrix3<f64> {
    t.fixed_view::<3, 3>(0, 0).into_owned()
}

pub fn translation(t: &Matrix4<f64>) -> Vector3<f64> {
    t.fixed_view::<3, 1>(0, 3).into_owned()
}

/// Five DH rows, joint limits and the forearm length used for the hand frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmChain {
    pub rows: [DHRow; JOINTS],
    /// `(min, max)` per joint, radians.
    pub limits: [(f64, f64); JOINTS],
    pub upper_arm_length: f64,
    pub forearm_length: f64,
}

/// Default joint limits in degrees. Flexion is a negative rotation about the
/// joint axis, so shoulder flexion of up to 180 degrees maps to `q1 >= -180`.
pub const DEFAULT_LIMITS_DEG: [(f64, f64); JOINTS] = [
    (-180.0, 60.0),
    (-90.0, 90.0),
    (-90.0, 90.0),
    (-145.0, 0.0),
    (-90.0, 90.0),
];

impl ArmChain {
    /// The standard right-arm chain for the given segment lengths.
    pub fn right_arm(upper_arm_length: f64, forearm_length: f64) -> Result<Self> {
        let chain = ArmChain {
            rows: standard_rows(upper_arm_length),
            limits: DEFAULT_LIMITS_DEG.map(|(a, b)| (a.to_radians(), b.to_radians())),
            upper_arm_length,
            forearm_length,
        };
        chain.validate()?;
        Ok(chain)
    }

    fn validate(&self) -> Result<()> {
        if !(self.upper_arm_length > 0.0 && self.forearm_length > 0.0) {
            return Err(Error::domain("segment lengths must be > 0"));
        }
        for (i, (lo, hi)) in self.limits.iter().enumerate() {
            if !(lo < hi) {
                return Err(Error::domain(format!(
                    "joint {} limits must satisfy min < max",
                    i + 1
                )));
            }
        }
        if self.rows.iter().any(|r| r.sigma != 0) {
            return Err(Error::domain("only revolute joints (sigma = 0) are supported"));
        }
        Ok(())
    }

    /// Checks `q` against the joint limits.
    pub fn check_limits(&self, q: &[f64; JOINTS]) -> Result<()> {
        for (i, (&v, &(lo, hi))) in q.iter().zip(self.limits.iter()).enumerate() {
            if !v.is_finite() || v < lo - 1e-12 || v > hi + 1e-12 {
                return Err(Error::JointLimit {
                    joint: format!("q{} ({})", i + 1, JOINT_NAMES[i]),
                    value: v.to_degrees(),
                    min: lo.to_degrees(),
                    max: hi.to_degrees(),
                });
            }
        }
        Ok(())
    }

    /// Transform from frame 5 to the hand frame.
    pub fn hand_offset(&self) -> Matrix4<f64> {
        // Trans(0, 0, -h_f) * Rot(x, pi)
        Matrix4::new(
            1.0, 0.0, 0.0, 0.0,
            0.0, -1.0, 0.0, 0.0,
            0.0, 0.0, -1.0, -self.forearm_length,
            0.0, 0.0, 0.0, 1.0,
        )
    }

    /// Loads an arm definition file.
    ///
    /// One row per joint, whitespace separated:
    /// `sigma alpha d theta_offset r q_min q_max` (radians, meters). Numeric
    /// fields accept `pi`, `pi/N`, and `RL3` for the upper-arm length, each
    /// optionally negated. `#` starts a comment.
    pub fn load(path: &Path, upper_arm_length: f64, forearm_length: f64) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, &path.display().to_string(), upper_arm_length, forearm_length)
    }

    pub fn parse(
        text: &str,
        name: &str,
        upper_arm_length: f64,
        forearm_length: f64,
    ) -> Result<Self> {
        let mut rows = Vec::new();
        let mut limits = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 7 {
                return Err(Error::data(
                    name,
                    i + 1,
                    format!("expected 7 fields, found {}", fields.len()),
                ));
            }
            let sigma: u8 = fields[0]
                .parse()
                .map_err(|_| Error::data(name, i + 1, "sigma must be 0 or 1"))?;
            if sigma != 0 {
                return Err(Error::data(name, i + 1, "only revolute joints (sigma = 0) are supported"));
            }
            let mut v = [0.0; 6];
            for (slot, tok) in v.iter_mut().zip(&fields[1..]) {
                *slot = parse_token(tok, upper_arm_length)
                    .ok_or_else(|| Error::data(name, i + 1, format!("bad value `{tok}`")))?;
            }
            rows.push(DHRow::revolute(v[0], v[1], v[2], v[3]));
            limits.push((v[4], v[5]));
        }
        if rows.len() != JOINTS {
            return Err(Error::data(
                name,
                text.lines().count(),
                format!("expected {JOINTS} joint rows, found {}", rows.len()),
            ));
        }
        let chain = ArmChain {
            rows: rows.try_into().expect("length checked"),
            limits: limits.try_into().expect("length checked"),
            upper_arm_length,
            forearm_length,
        };
        chain.validate()?;
        Ok(chain)
    }
}

fn standard_rows(upper_arm_length: f64) -> [DHRow; JOINTS] {
    let h = FRAC_PI_2;
    [
        DHRow::revolute(-h, 0.0, -h, 0.0),
        DHRow::revolute(-h, 0.0, -h, 0.0),
        DHRow::revolute(-h, 0.0, -h, -upper_arm_length),
        DHRow::revolute(-h, 0.0, 0.0, 0.0),
        DHRow::revolute(h, 0.0, 0.0, 0.0),
    ]
}

fn parse_token(tok: &str, rl3: f64) -> Option<f64> {
    let (neg, body) = match tok.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, tok),
    };
    let v = if body == "RL3" {
        rl3
    } else if body == "pi" {
        std::f64::consts::PI
    } else if let Some(div) = body.strip_prefix("pi/") {
        std::f64::consts::PI / div.parse::<f64>().ok()?
    } else {
        return tok.parse().ok();
    };
    Some(if neg { -v } else { v })
}

/// World transforms of every frame plus named key points.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmPose {
    /// `frames[j]` is frame `j + 1` expressed in the world frame.
    pub frames: [Matrix4<f64>; JOINTS],
    pub hand_frame: Matrix4<f64>,
    pub shoulder: Vector3<f64>,
    pub elbow: Vector3<f64>,
    pub wrist: Vector3<f64>,
    /// Grip point; coincides with the wrist since the model has no wrist
    /// joints.
    pub hand: Vector3<f64>,
}

impl ArmPose {
    /// World position of a point given in hand-frame coordinates.
    pub fn hand_point(&self, offset: &Vector3<f64>) -> Vector3<f64> {
        let p = self.hand_frame * Vector4::new(offset.x, offset.y, offset.z, 1.0);
        Vector3::new(p.x, p.y, p.z)
    }

    /// Hand-frame coordinates of a world point.
    pub fn to_hand(&self, world: &Vector3<f64>) -> Vector3<f64> {
        rotation(&self.hand_frame).transpose() * (world - translation(&self.hand_frame))
    }

    /// Joint axis `j` (0-based) in world coordinates.
    pub fn axis(&self, j: usize) -> Vector3<f64> {
        rotation(&self.frames[j]).column(2).into_owned()
    }

    pub fn origin(&self, j: usize) -> Vector3<f64> {
        translation(&self.frames[j])
    }
}

/// Forward kinematics after checking joint limits.
pub fn forward_kinematics(chain: &ArmChain, q: &[f64; JOINTS]) -> Result<ArmPose> {
    chain.check_limits(q)?;
    Ok(forward_kinematics_unchecked(chain, q))
}

/// Forward kinematics without limit checks.
pub fn forward_kinematics_unchecked(chain: &ArmChain, q: &[f64; JOINTS]) -> ArmPose {
    let mut t = Matrix4::identity();
    let mut frames = [Matrix4::identity(); JOINTS];
    for (j, (row, &qj)) in chain.rows.iter().zip(q.iter()).enumerate() {
        t *= dh_transform(row, qj);
        frames[j] = t;
    }
    let hand_frame = t * chain.hand_offset();
    let hand = translation(&hand_frame);
    ArmPose {
        frames,
        hand_frame,
        shoulder: translation(&frames[0]),
        elbow: translation(&frames[2]),
        wrist: hand,
        hand,
    }
}

/// Sagittal posture: shoulder flexion and elbow flexion in degrees, all other
/// joints at zero.
pub fn sagittal_posture(shoulder_flexion_deg: f64, elbow_flexion_deg: f64) -> [f64; JOINTS] {
    [
        -shoulder_flexion_deg.to_radians(),
        0.0,
        0.0,
        -elbow_flexion_deg.to_radians(),
        0.0,
    ]
}
