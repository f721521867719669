//! Right-arm model: kinematic chain, segment parameters and joint torques.

pub mod anthropometry;
pub mod dynamics;
pub mod kinematics;

pub use anthropometry::{segment_params, OperatorProfile, Segment, SegmentParams};
pub use dynamics::{
    inverse_dynamics, link_inertias, static_joint_torques, ExternalWrench, LinkInertia, GRAVITY,
};
pub use kinematics::{
    dh_transform, forward_kinematics, sagittal_posture, ArmChain, ArmPose, DHRow, JOINTS,
    JOINT_NAMES,
};
