//! Segment masses, lengths and inertias from body mass and stature.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::strength::Gender;

/// Arm mass as a fraction of body mass.
pub const ARM_MASS_FRACTION: f64 = 0.051;
pub const FOREARM_SHARE: f64 = 0.451;
pub const UPPER_ARM_SHARE: f64 = 0.549;
pub const FOREARM_LENGTH_FRACTION: f64 = 0.146;
pub const UPPER_ARM_LENGTH_FRACTION: f64 = 0.186;
pub const RADIUS_FRACTION: f64 = 0.125;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorProfile {
    /// Body mass, kg.
    pub mass: f64,
    /// Stature, m.
    pub height: f64,
    pub gender: Gender,
}

impl OperatorProfile {
    pub fn new(mass: f64, height: f64, gender: Gender) -> Result<Self> {
        let p = OperatorProfile {
            mass,
            height,
            gender,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(Error::domain(format!("body mass must be > 0, got {}", self.mass)));
        }
        if !(self.height > 0.0 && self.height.is_finite()) {
            return Err(Error::domain(format!("height must be > 0, got {}", self.height)));
        }
        Ok(())
    }
}

impl Default for OperatorProfile {
    fn default() -> Self {
        OperatorProfile {
            mass: 70.0,
            height: 1.70,
            gender: Gender::Male,
        }
    }
}

/// Uniform solid cylinder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub mass: f64,
    pub length: f64,
    pub radius: f64,
}

impl Segment {
    pub fn cylinder(mass: f64, length: f64) -> Self {
        Segment {
            mass,
            length,
            radius: RADIUS_FRACTION * length,
        }
    }

    pub fn axial_inertia(&self) -> f64 {
        0.5 * self.mass * self.radius * self.radius
    }

    pub fn transverse_inertia(&self) -> f64 {
        self.mass * (3.0 * self.radius * self.radius + self.length * self.length) / 12.0
    }

    /// Inertia about the center of mass with the cylinder axis along z.
    pub fn inertia(&self) -> Matrix3<f64> {
        let t = self.transverse_inertia();
        Matrix3::from_diagonal(&Vector3::new(t, t, self.axial_inertia()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentParams {
    pub upper_arm: Segment,
    /// Forearm and hand together.
    pub forearm: Segment,
}

pub fn segment_params(profile: &OperatorProfile) -> Result<SegmentParams> {
    profile.validate()?;
    let arm = ARM_MASS_FRACTION * profile.mass;
    Ok(SegmentParams {
        upper_arm: Segment::cylinder(UPPER_ARM_SHARE * arm, UPPER_ARM_LENGTH_FRACTION * profile.height),
        forearm: Segment::cylinder(FOREARM_SHARE * arm, FOREARM_LENGTH_FRACTION * profile.height),
    })
}
