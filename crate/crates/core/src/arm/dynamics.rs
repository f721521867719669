//! Recursive Newton-Euler inverse dynamics on the arm chain.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::anthropometry::SegmentParams;
use super::kinematics::{dh_transform, rotation, translation, ArmChain, JOINTS};
use crate::error::{Error, Result};

pub const GRAVITY: f64 = 9.81;

/// Mass properties of one link, expressed in that link's frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkInertia {
    pub mass: f64,
    pub com: Vector3<f64>,
    /// About the center of mass.
    pub inertia: Matrix3<f64>,
}

impl LinkInertia {
    pub fn massless() -> Self {
        LinkInertia {
            mass: 0.0,
            com: Vector3::zeros(),
            inertia: Matrix3::zeros(),
        }
    }
}

/// Attaches the segments to the chain: the upper arm rides on link 3 (its
/// frame sits at the elbow with z pointing back to the shoulder), the forearm
/// on link 5 (z pointing back from the hand). Links 1, 2 and 4 are massless.
pub fn link_inertias(chain: &ArmChain, segments: &SegmentParams) -> [LinkInertia; JOINTS] {
    let mut links = [LinkInertia::massless(); JOINTS];
    links[2] = LinkInertia {
        mass: segments.upper_arm.mass,
        com: Vector3::new(0.0, 0.0, 0.5 * chain.upper_arm_length),
        inertia: segments.upper_arm.inertia(),
    };
    links[4] = LinkInertia {
        mass: segments.forearm.mass,
        com: Vector3::new(0.0, 0.0, -0.5 * chain.forearm_length),
        inertia: segments.forearm.inertia(),
    };
    links
}

/// A force acting on the hand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExternalWrench {
    /// Application point in hand-frame coordinates, m.
    pub point: [f64; 3],
    /// Force applied to the hand, world frame, N.
    pub force: [f64; 3],
    pub tag: String,
}

impl ExternalWrench {
    pub fn new(point: Vector3<f64>, force: Vector3<f64>, tag: impl Into<String>) -> Self {
        ExternalWrench {
            point: point.into(),
            force: force.into(),
            tag: tag.into(),
        }
    }

    /// Weight of a mass held at `point`.
    pub fn weight(mass: f64, point: Vector3<f64>, gravity: f64, tag: impl Into<String>) -> Self {
        Self::new(point, Vector3::new(0.0, 0.0, -mass * gravity), tag)
    }

    fn validate(&self) -> Result<()> {
        if self.point.iter().chain(self.force.iter()).all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::domain(format!("wrench `{}` has non-finite components", self.tag)))
        }
    }
}

/// Joint torques for the given motion state. Gravity acts along world -z.
///
/// Torques are the actuator torques about each joint's z axis needed to
/// produce the motion against gravity and the external wrenches.
pub fn inverse_dynamics(
    chain: &ArmChain,
    q: &[f64; JOINTS],
    qd: &[f64; JOINTS],
    qdd: &[f64; JOINTS],
    links: &[LinkInertia; JOINTS],
    wrenches: &[ExternalWrench],
    gravity: f64,
) -> Result<[f64; JOINTS]> {
    if q.iter().chain(qd).chain(qdd).any(|v| !v.is_finite()) || !gravity.is_finite() {
        return Err(Error::domain("non-finite joint state or gravity"));
    }
    for w in wrenches {
        w.validate()?;
    }

    let z = Vector3::z();
    let mut rot = [Matrix3::identity(); JOINTS];
    let mut pos = [Vector3::zeros(); JOINTS];
    for j in 0..JOINTS {
        let t = dh_transform(&chain.rows[j], q[j]);
        rot[j] = rotation(&t);
        pos[j] = translation(&t);
    }

    // Outward pass. The base is given an upward acceleration equal to
    // gravity, which accounts for every link's weight.
    let mut w = Vector3::zeros();
    let mut wd = Vector3::zeros();
    let mut vd = Vector3::new(0.0, 0.0, gravity);
    let mut world_rot = Matrix3::identity();
    let mut force = [Vector3::zeros(); JOINTS];
    let mut moment = [Vector3::zeros(); JOINTS];
    for j in 0..JOINTS {
        let rt = rot[j].transpose();
        let w_prev = w;
        vd = rt * (wd.cross(&pos[j]) + w_prev.cross(&w_prev.cross(&pos[j])) + vd);
        w = rt * w_prev + qd[j] * z;
        wd = rt * wd + (rt * w_prev).cross(&(qd[j] * z)) + qdd[j] * z;
        world_rot *= rot[j];

        let l = &links[j];
        let vc = wd.cross(&l.com) + w.cross(&w.cross(&l.com)) + vd;
        force[j] = l.mass * vc;
        moment[j] = l.inertia * wd + w.cross(&(l.inertia * w));
    }

    // External forces on the hand, moved into frame 5.
    let hand = chain.hand_offset();
    let hand_rot = rotation(&hand);
    let hand_pos = translation(&hand);
    let to_last = world_rot.transpose();
    let mut f_ext = Vector3::zeros();
    let mut n_ext = Vector3::zeros();
    for wr in wrenches {
        let p = hand_pos + hand_rot * Vector3::from(wr.point);
        let f = to_last * Vector3::from(wr.force);
        f_ext += f;
        n_ext += p.cross(&f);
    }

    // Inward pass.
    let mut tau = [0.0; JOINTS];
    let mut f_next = -f_ext;
    let mut n_next = -n_ext;
    for j in (0..JOINTS).rev() {
        let (f_child, n_child, p_child) = if j + 1 < JOINTS {
            (rot[j + 1] * f_next, rot[j + 1] * n_next, pos[j + 1])
        } else {
            (f_next, n_next, Vector3::zeros())
        };
        let f = f_child + force[j];
        let n = moment[j] + n_child + links[j].com.cross(&force[j]) + p_child.cross(&f_child);
        tau[j] = n.dot(&z);
        f_next = f;
        n_next = n;
    }
    Ok(tau)
}

/// Joint torques holding a static posture.
pub fn static_joint_torques(
    chain: &ArmChain,
    q: &[f64; JOINTS],
    links: &[LinkInertia; JOINTS],
    wrenches: &[ExternalWrench],
    gravity: f64,
) -> Result<[f64; JOINTS]> {
    let zero = [0.0; JOINTS];
    inverse_dynamics(chain, q, &zero, &zero, links, wrenches, gravity)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arm::anthropometry::{segment_params, OperatorProfile};
    use crate::arm::kinematics::{forward_kinematics, forward_kinematics_unchecked, sagittal_posture};
    use approx::assert_relative_eq;
    use nalgebra::Vector4;

    fn setup() -> (ArmChain, SegmentParams, [LinkInertia; JOINTS]) {
        let seg = segment_params(&OperatorProfile::default()).unwrap();
        let chain = ArmChain::right_arm(seg.upper_arm.length, seg.forearm.length).unwrap();
        let links = link_inertias(&chain, &seg);
        (chain, seg, links)
    }

    #[test]
    fn nothing_acting_gives_zero() {
        let (chain, _, links) = setup();
        let tau = static_joint_torques(&chain, &[-0.3, 0.2, 0.1, -1.0, 0.4], &links, &[], 0.0).unwrap();
        assert!(tau.iter().all(|t| t.abs() < 1e-12));
    }

    #[test]
    fn hand_point_mass_moment() {
        // Massless arm, 2.5 kg at a point with horizontal offset 0.3904 m.
        let (chain, _, _) = setup();
        let links = [LinkInertia::massless(); JOINTS];
        let q = sagittal_posture(30.0, 90.0);
        let pose = forward_kinematics(&chain, &q).unwrap();
        let dx = 0.3904 - pose.hand.x;
        let offset = pose.to_hand(&(pose.hand + Vector3::new(dx, 0.0, 0.0)));
        let w = ExternalWrench::weight(2.5, offset, GRAVITY, "mass");
        let tau = static_joint_torques(&chain, &q, &links, &[w], GRAVITY).unwrap();
        // Flexion is a negative rotation about +y, so holding a forward load
        // takes a negative torque.
        assert_relative_eq!(tau[0], -2.5 * 9.81 * 0.3904, epsilon = 1e-9);
        assert_relative_eq!(-tau[0], 9.575, epsilon = 5e-4);
    }

    #[test]
    fn accelerating_pronation_uses_axial_inertia() {
        let (chain, seg, links) = setup();
        let q = [-0.4, 0.1, 0.2, -1.2, 0.3];
        let mut qdd = [0.0; JOINTS];
        qdd[4] = 3.7;
        let tau = inverse_dynamics(&chain, &q, &[0.0; JOINTS], &qdd, &links, &[], 0.0).unwrap();
        assert_relative_eq!(tau[4], seg.forearm.axial_inertia() * 3.7, epsilon = 1e-9);
    }

    #[test]
    fn accelerating_elbow_uses_parallel_axis() {
        let (chain, seg, links) = setup();
        let q = [-0.4, 0.1, 0.2, -1.2, 0.3];
        let mut qdd = [0.0; JOINTS];
        qdd[3] = -2.1;
        let tau = inverse_dynamics(&chain, &q, &[0.0; JOINTS], &qdd, &links, &[], 0.0).unwrap();
        let half = 0.5 * seg.forearm.length;
        let i = seg.forearm.transverse_inertia() + seg.forearm.mass * half * half;
        assert_relative_eq!(tau[3], i * -2.1, epsilon = 1e-9);
    }

    #[test]
    fn closed_loop_does_no_net_work() {
        // Periodic motion in zero gravity: the actuators return all the
        // kinetic energy they put in.
        let (chain, _, links) = setup();
        let q0 = [-0.8, 0.1, 0.2, -1.2, 0.3];
        let amp = [0.3, 0.2, 0.25, 0.4, 0.5];
        let period = 2.0;
        let n = 20_000;
        let h = period / n as f64;
        let omega = 2.0 * std::f64::consts::PI / period;
        let power = |t: f64| {
            let mut q = [0.0; JOINTS];
            let mut qd = [0.0; JOINTS];
            let mut qdd = [0.0; JOINTS];
            for j in 0..JOINTS {
                let ph = omega * t + j as f64;
                q[j] = q0[j] + amp[j] * ph.sin();
                qd[j] = amp[j] * omega * ph.cos();
                qdd[j] = -amp[j] * omega * omega * ph.sin();
            }
            let tau = inverse_dynamics(&chain, &q, &qd, &qdd, &links, &[], 0.0).unwrap();
            tau.iter().zip(qd.iter()).map(|(a, b)| a * b).sum::<f64>()
        };
        let mut work = 0.0;
        let mut peak: f64 = 0.0;
        for i in 0..n {
            let p = power(i as f64 * h);
            peak = peak.max(p.abs());
            work += p * h;
        }
        assert!(work.abs() < 1e-9 * peak.max(1.0), "work {work}, peak power {peak}");
    }

    #[test]
    fn static_matches_cross_product_sum() {
        let (chain, seg, links) = setup();
        let q = [-0.6, 0.3, -0.2, -0.9, 0.7];
        let pose = forward_kinematics_unchecked(&chain, &q);
        let g = Vector3::new(0.0, 0.0, -GRAVITY);
        let wrenches = vec![
            ExternalWrench::weight(2.5, Vector3::new(0.0, 0.0, 0.02), GRAVITY, "machine"),
            ExternalWrench::new(Vector3::new(0.01, -0.03, 0.1), Vector3::new(-20.0, 5.0, 3.0), "push"),
        ];
        let com = |frame: usize, c: Vector3<f64>| {
            let p = pose.frames[frame] * Vector4::new(c.x, c.y, c.z, 1.0);
            Vector3::new(p.x, p.y, p.z)
        };
        let mut loads = vec![
            (com(2, links[2].com), seg.upper_arm.mass * g),
            (com(4, links[4].com), seg.forearm.mass * g),
        ];
        for w in &wrenches {
            loads.push((pose.hand_point(&Vector3::from(w.point)), Vector3::from(w.force)));
        }
        let tau = static_joint_torques(&chain, &q, &links, &wrenches, GRAVITY).unwrap();
        for j in 0..JOINTS {
            let o = pose.origin(j);
            let z = pose.axis(j);
            // Links proximal to joint j do not load it.
            let oracle: f64 = loads
                .iter()
                .enumerate()
                .filter(|(k, _)| j <= 2 || *k != 0)
                .map(|(_, (p, f))| -(p - o).cross(f).dot(&z))
                .sum();
            assert_relative_eq!(tau[j], oracle, epsilon = 1e-9);
        }
    }
}
