//! Working-posture evaluation: stress and discomfort indices, their weighted
//! combination, sagittal two-link inverse kinematics, the working-distance
//! sweep and Pareto filtering.

use std::path::Path;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::arm::dynamics::{static_joint_torques, ExternalWrench, LinkInertia};
use crate::arm::kinematics::{forward_kinematics, sagittal_posture, ArmChain, JOINTS};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::strength::{Gender, Joint, Range, StrengthModel};

/// The comfort file shipped with the crate.
pub const DEFAULT_COMFORT: &str = include_str!("../data/comfort.txt");
pub const DEFAULT_G: f64 = 1e6;

/// Comfort parameters of one joint, degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointComfort {
    pub joint: String,
    pub q_lower: f64,
    pub q_upper: f64,
    pub q_neutral: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComfortSpec {
    pub g: f64,
    pub joints: Vec<JointComfort>,
}

impl Default for ComfortSpec {
    fn default() -> Self {
        ComfortSpec::parse(DEFAULT_COMFORT, "comfort.txt").expect("shipped comfort file is valid")
    }
}

impl ComfortSpec {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Parses `G = <value>` followed by rows `joint q_lower q_upper q_neutral gamma`.
    pub fn parse(text: &str, name: &str) -> Result<Self> {
        let mut g = None;
        let mut joints = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some((key, value)) = line.split_once('=') {
                if key.trim() != "G" {
                    return Err(Error::data(name, i + 1, format!("unknown header `{}`", key.trim())));
                }
                let v: f64 = value
                    .trim()
                    .parse()
                    .map_err(|_| Error::data(name, i + 1, "G must be a number"))?;
                if !(v > 0.0) {
                    return Err(Error::data(name, i + 1, "G must be > 0"));
                }
                g = Some(v);
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 5 {
                return Err(Error::data(name, i + 1, format!("expected 5 fields, found {}", f.len())));
            }
            let mut v = [0.0; 4];
            for (slot, tok) in v.iter_mut().zip(&f[1..]) {
                *slot = tok
                    .parse()
                    .map_err(|_| Error::data(name, i + 1, format!("bad number `{tok}`")))?;
            }
            let jc = JointComfort {
                joint: f[0].to_string(),
                q_lower: v[0],
                q_upper: v[1],
                q_neutral: v[2],
                gamma: v[3],
            };
            if !(jc.q_lower < jc.q_neutral && jc.q_neutral < jc.q_upper) {
                return Err(Error::data(name, i + 1, "need q_lower < q_neutral < q_upper"));
            }
            if !(jc.gamma >= 0.0) {
                return Err(Error::data(name, i + 1, "gamma must be >= 0"));
            }
            joints.push(jc);
        }
        Ok(ComfortSpec {
            g: g.unwrap_or(DEFAULT_G),
            joints,
        })
    }

    pub fn joint(&self, name: &str) -> Result<&JointComfort> {
        self.joints
            .iter()
            .find(|j| j.joint == name)
            .ok_or_else(|| Error::domain(format!("comfort spec has no joint `{name}`")))
    }
}

/// Sum of squared torque-to-strength ratios.
pub fn stress_index(torques: &[f64], strengths: &[f64]) -> Result<f64> {
    if torques.len() != strengths.len() {
        return Err(Error::domain("torques and strengths differ in length"));
    }
    let mut acc = 0.0;
    for (t, s) in torques.iter().zip(strengths) {
        if !(*s > 0.0) {
            return Err(Error::domain(format!("strength must be > 0, got {s}")));
        }
        acc += (t / s) * (t / s);
    }
    Ok(acc)
}

/// Barrier term `(0.5 sin(5x + pi/2) + 1)^100` for a normalized distance `x`
/// from a limit.
pub fn barrier(x: f64) -> f64 {
    (0.5 * (5.0 * x + std::f64::consts::FRAC_PI_2).sin() + 1.0).powi(100)
}

/// Discomfort contribution of one joint at `q` degrees.
///
/// The barrier terms are not confined to the neighbourhood of their own limit:
/// near the opposite limit the argument approaches 5 and the term is about
/// 5.8e5. Near the middle of the range both barriers are negligible.
pub fn joint_discomfort(q: f64, jc: &JointComfort, g: f64) -> Result<f64> {
    let range = jc.q_upper - jc.q_lower;
    if range == 0.0 {
        return Err(Error::domain(format!("joint `{}` has q_upper = q_lower", jc.joint)));
    }
    let dq = (q - jc.q_neutral) / range;
    let qu = barrier((jc.q_upper - q) / range);
    let ql = barrier((q - jc.q_lower) / range);
    Ok(jc.gamma * dq * dq / g + qu + ql)
}

/// Discomfort of a posture given as one angle (degrees) per comfort joint.
pub fn discomfort_index(posture: &[f64], comfort: &ComfortSpec) -> Result<f64> {
    if posture.len() != comfort.joints.len() {
        return Err(Error::domain("posture and comfort table differ in length"));
    }
    posture
        .iter()
        .zip(&comfort.joints)
        .map(|(q, jc)| joint_discomfort(*q, jc, comfort.g))
        .sum()
}

/// `w1 * f_fatigue / max(f_fatigue) + w2 * f_discomfort / max(f_discomfort)`
/// with the maxima taken over `objectives`.
pub fn combined_objective(objectives: &[(f64, f64)], w1: f64, w2: f64) -> Result<Vec<f64>> {
    if objectives.is_empty() {
        return Err(Error::domain("no candidates to combine"));
    }
    let max_f = objectives.iter().map(|o| o.0).fold(f64::NEG_INFINITY, f64::max);
    let max_d = objectives.iter().map(|o| o.1).fold(f64::NEG_INFINITY, f64::max);
    if !(max_f > 0.0) {
        return Err(Error::Normalization("f_fatigue"));
    }
    if !(max_d > 0.0) {
        return Err(Error::Normalization("f_discomfort"));
    }
    Ok(objectives
        .iter()
        .map(|(f, d)| w1 * f / max_f + w2 * d / max_d)
        .collect())
}

/// Index of the smallest value; the first one wins ties.
pub fn argmin(values: &[f64]) -> Option<usize> {
    values
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, f64)>, (i, &v)| match best {
            Some((_, b)) if b <= v => best,
            _ => Some((i, v)),
        })
        .map(|(i, _)| i)
}

/// Indices of the points not dominated in both objectives, sorted by the first
/// objective ascending. Duplicate points are kept once (the earliest).
pub fn pareto_front(points: &[(f64, f64)]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        points[a]
            .0
            .total_cmp(&points[b].0)
            .then(points[a].1.total_cmp(&points[b].1))
            .then(a.cmp(&b))
    });
    let mut front = Vec::new();
    let mut best = f64::INFINITY;
    for i in order {
        if points[i].1 < best {
            best = points[i].1;
            front.push(i);
        }
    }
    front
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// Elbow flexed forward, below the shoulder-hand line.
    #[default]
    ElbowDown,
    ElbowUp,
}

/// Solves the planar arm for a hand target `(x, z)` in the sagittal plane
/// relative to the shoulder (x forward, z up). Returns `(q1, q4)` in radians.
pub fn ik_two_link(x: f64, z: f64, lu: f64, lf: f64, branch: Branch) -> Result<(f64, f64)> {
    if !(lu > 0.0 && lf > 0.0) {
        return Err(Error::domain("segment lengths must be > 0"));
    }
    let dist = x.hypot(z);
    let (lo, hi) = ((lu - lf).abs(), lu + lf);
    let tol = 1e-12 * hi;
    if !(dist >= lo - tol && dist <= hi + tol) {
        return Err(Error::Unreachable {
            distance: dist,
            min: lo,
            max: hi,
        });
    }
    let c = ((dist * dist - lu * lu - lf * lf) / (2.0 * lu * lf)).clamp(-1.0, 1.0);
    let flex = c.acos();
    // Angle of the target measured from straight down, positive forward.
    let heading = x.atan2(-z);
    let beta = (lf * flex.sin()).atan2(lu + lf * flex.cos());
    let (shoulder, elbow) = match branch {
        Branch::ElbowDown => (heading - beta, flex),
        Branch::ElbowUp => (heading + beta, -flex),
    };
    Ok((-shoulder, -elbow))
}

/// Fixed hand-to-drill-bit offset in the sagittal plane (x forward, z up), m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToolOffset {
    pub x: f64,
    pub z: f64,
}

/// Reference posture used to derive the default tool offset.
pub const REFERENCE_SHOULDER_DEG: f64 = 22.0;
pub const REFERENCE_ELBOW_DEG: f64 = 98.0;
pub const REFERENCE_DISTANCE: f64 = 0.53;

impl ToolOffset {
    /// Offset that puts the bit on a hole at distance `d` at shoulder height
    /// when the arm holds the given sagittal flexion angles.
    pub fn solve(chain: &ArmChain, shoulder_deg: f64, elbow_deg: f64, d: f64) -> Result<Self> {
        let pose = forward_kinematics(chain, &sagittal_posture(shoulder_deg, elbow_deg))?;
        Ok(ToolOffset {
            x: d - pose.hand.x,
            z: -pose.hand.z,
        })
    }

    pub fn reference(chain: &ArmChain) -> Result<Self> {
        Self::solve(chain, REFERENCE_SHOULDER_DEG, REFERENCE_ELBOW_DEG, REFERENCE_DISTANCE)
    }
}

/// Model pieces a sweep evaluates against.
#[derive(Debug, Clone, Copy)]
pub struct SweepModel<'a> {
    pub chain: &'a ArmChain,
    pub links: &'a [LinkInertia; JOINTS],
    pub strength: &'a StrengthModel,
    pub gender: Gender,
    pub comfort: &'a ComfortSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Hole distances, m.
    pub range: Range,
    pub weights: (f64, f64),
    pub tool_offset: ToolOffset,
    /// Machine mass carried by this arm, kg.
    pub machine_mass: f64,
    /// Machine center of mass beyond the grip along the forearm axis, m.
    pub machine_offset: f64,
    /// Horizontal push into the hole carried by this arm, N.
    pub push_force: f64,
    /// Population offset of the strengths in the stress index.
    pub z: f64,
    pub gravity: f64,
    pub branch: Branch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PostureCandidate {
    pub distance: f64,
    pub q: [f64; JOINTS],
    pub shoulder_flexion: f64,
    pub elbow_flexion: f64,
    /// Magnitudes of the shoulder flexion and elbow flexion torques, N*m.
    pub torques: [f64; 2],
    pub strengths: [f64; 2],
    pub shoulder_discomfort: f64,
    pub elbow_discomfort: f64,
    pub f_fatigue: f64,
    pub f_discomfort: f64,
    pub f_overall: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub candidates: Vec<PostureCandidate>,
    pub argmin: usize,
    /// Candidate indices on the Pareto front, by f_fatigue ascending.
    pub pareto: Vec<usize>,
    /// Grid distances with no admissible posture.
    pub skipped: Vec<f64>,
}

impl SweepResult {
    pub fn best(&self) -> &PostureCandidate {
        &self.candidates[self.argmin]
    }

    /// Argmin under different weights on the same candidates.
    pub fn argmin_for(&self, w1: f64, w2: f64) -> Result<usize> {
        let obj: Vec<(f64, f64)> = self.candidates.iter().map(|c| (c.f_fatigue, c.f_discomfort)).collect();
        let f = combined_objective(&obj, w1, w2)?;
        Ok(argmin(&f).expect("nonempty"))
    }
}

/// Evaluates the posture that puts the bit on a hole at distance `d`.
pub fn evaluate_distance(model: &SweepModel, cfg: &SweepConfig, d: f64) -> Result<PostureCandidate> {
    let chain = model.chain;
    let (q1, q4) = ik_two_link(
        d - cfg.tool_offset.x,
        -cfg.tool_offset.z,
        chain.upper_arm_length,
        chain.forearm_length,
        cfg.branch,
    )?;
    let q = [q1, 0.0, 0.0, q4, 0.0];
    let pose = forward_kinematics(chain, &q)?;
    let bit = pose.to_hand(&Vector3::new(d, 0.0, 0.0));
    let wrenches = [
        ExternalWrench::weight(
            cfg.machine_mass,
            Vector3::new(0.0, 0.0, cfg.machine_offset),
            cfg.gravity,
            "machine weight",
        ),
        ExternalWrench::new(bit, Vector3::new(-cfg.push_force, 0.0, 0.0), "push reaction"),
    ];
    let tau = static_joint_torques(chain, &q, model.links, &wrenches, cfg.gravity)?;

    let shoulder = -q1.to_degrees();
    let elbow = -q4.to_degrees();
    let included = 180.0 - elbow;
    let s_sh = model
        .strength
        .strength(Joint::Shoulder, shoulder, included, model.gender)?
        .at(cfg.z)?;
    let s_el = model
        .strength
        .strength(Joint::Elbow, shoulder, included, model.gender)?
        .at(cfg.z)?;
    let torques = [tau[0].abs(), tau[3].abs()];
    let strengths = [s_sh, s_el];
    let f_fatigue = stress_index(&torques, &strengths)?;
    let g = model.comfort.g;
    let sd = joint_discomfort(shoulder, model.comfort.joint("shoulder")?, g)?;
    let ed = joint_discomfort(elbow, model.comfort.joint("elbow")?, g)?;
    Ok(PostureCandidate {
        distance: d,
        q,
        shoulder_flexion: shoulder,
        elbow_flexion: elbow,
        torques,
        strengths,
        shoulder_discomfort: sd,
        elbow_discomfort: ed,
        f_fatigue,
        f_discomfort: sd + ed,
        f_overall: f64::NAN,
    })
}

/// Exhaustive grid search over hole distances.
///
/// Distances whose posture is unreachable or outside the joint or strength
/// limits are listed in `skipped`; an empty admissible set is an error.
pub fn sweep_distance(model: &SweepModel, cfg: &SweepConfig, exec: Execution) -> Result<SweepResult> {
    let grid = cfg.range.values()?;
    if grid.is_empty() {
        return Err(Error::domain("sweep range is empty"));
    }
    let evaluated = exec::map(exec, &grid, |&d| evaluate_distance(model, cfg, d));
    let mut candidates = Vec::with_capacity(grid.len());
    let mut skipped = Vec::new();
    for (d, r) in grid.iter().zip(evaluated) {
        match r {
            Ok(c) => candidates.push(c),
            Err(Error::Unreachable { .. } | Error::JointLimit { .. }) => skipped.push(*d),
            Err(e) => return Err(e),
        }
    }
    if candidates.is_empty() {
        return Err(Error::domain(format!(
            "no admissible posture in sweep range [{}, {}] m",
            cfg.range.start, cfg.range.stop
        )));
    }
    let obj: Vec<(f64, f64)> = candidates.iter().map(|c| (c.f_fatigue, c.f_discomfort)).collect();
    let f = combined_objective(&obj, cfg.weights.0, cfg.weights.1)?;
    for (c, v) in candidates.iter_mut().zip(&f) {
        c.f_overall = *v;
    }
    Ok(SweepResult {
        argmin: argmin(&f).expect("nonempty"),
        pareto: pareto_front(&obj),
        candidates,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arm::anthropometry::{segment_params, OperatorProfile};
    use crate::arm::dynamics::link_inertias;
    use crate::arm::kinematics::forward_kinematics_unchecked;
    use approx::assert_relative_eq;

    const LU: f64 = 0.186 * 1.70;
    const LF: f64 = 0.146 * 1.70;

    #[test]
    fn stress_values() {
        assert_eq!(stress_index(&[0.0, 0.0], &[75.620, 75.141]).unwrap(), 0.0);
        let s = stress_index(&[23.043, 7.394], &[75.620, 75.141]).unwrap();
        let oracle = (23.043f64 / 75.620).powi(2) + (7.394f64 / 75.141).powi(2);
        assert_relative_eq!(s, oracle, max_relative = 1e-15);
        assert!((s - 0.10254).abs() < 5e-5);
        let s3 = stress_index(&[3.0 * 23.043, 3.0 * 7.394], &[75.620, 75.141]).unwrap();
        assert_relative_eq!(s3, 9.0 * s, max_relative = 1e-12);
        assert!(stress_index(&[1.0], &[0.0]).is_err());
    }

    fn jc(lo: f64, hi: f64, n: f64) -> JointComfort {
        JointComfort {
            joint: "j".into(),
            q_lower: lo,
            q_upper: hi,
            q_neutral: n,
            gamma: 1.0,
        }
    }

    #[test]
    fn discomfort_at_limit_and_middle() {
        let j = jc(0.0, 100.0, 50.0);
        let at_upper = joint_discomfort(100.0, &j, DEFAULT_G).unwrap();
        assert_relative_eq!(at_upper, 1.5f64.powi(100), max_relative = 1e-9);
        assert!((at_upper - 4.07e17).abs() / 4.07e17 < 0.01);
        let mid = joint_discomfort(50.0, &j, DEFAULT_G).unwrap();
        let expected = 2.0 * (0.5 * (2.5 + std::f64::consts::FRAC_PI_2).sin() + 1.0).powi(100);
        assert_relative_eq!(mid, expected, max_relative = 1e-12);
        // Quoted elsewhere as roughly 6.5e-23; the exact value is 5.94e-23.
        assert!((expected / 2.0 - 5.94e-23).abs() < 0.01e-23, "{expected}");
        assert!((expected / 2.0 - 6.5e-23).abs() / 6.5e-23 < 0.1);
        assert!(joint_discomfort(5.0, &jc(1.0, 1.0, 1.0), DEFAULT_G).is_err());
    }

    #[test]
    fn discomfort_diverges_near_limits() {
        let j = jc(-60.0, 60.0, 0.0);
        let range = 120.0;
        let near_upper: Vec<f64> = (0..=20)
            .map(|i| 60.0 - range * 0.02 * (1.0 - i as f64 / 20.0))
            .map(|q| joint_discomfort(q, &j, DEFAULT_G).unwrap())
            .collect();
        assert!(near_upper.windows(2).all(|w| w[1] > w[0]));
        let near_lower: Vec<f64> = (0..=20)
            .map(|i| -60.0 + range * 0.02 * (1.0 - i as f64 / 20.0))
            .map(|q| joint_discomfort(q, &j, DEFAULT_G).unwrap())
            .collect();
        assert!(near_lower.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn combined_objective_properties() {
        assert_eq!(combined_objective(&[(0.3, 2.0)], 1.0, 1.0).unwrap(), vec![2.0]);
        let obj = [(0.3, 5.0), (0.1, 9.0), (0.5, 1.0), (0.2, 2.0)];
        let a = combined_objective(&obj, 1.0, 0.0).unwrap();
        assert_eq!(argmin(&a), Some(1));
        let b = combined_objective(&obj, 0.7, 0.2).unwrap();
        let c = combined_objective(&obj, 7.0, 2.0).unwrap();
        assert_eq!(argmin(&b), argmin(&c));
        let ones = combined_objective(&obj, 1.0, 1.0).unwrap();
        assert!(ones.iter().all(|v| *v > 0.0 && *v <= 2.0));
        assert_eq!(
            combined_objective(&[(0.0, 1.0), (0.0, 2.0)], 1.0, 1.0),
            Err(Error::Normalization("f_fatigue"))
        );
    }

    #[test]
    fn pareto_basics() {
        assert_eq!(pareto_front(&[(1.0, 1.0)]), vec![0]);
        assert_eq!(pareto_front(&[(2.0, 2.0), (1.0, 1.0)]), vec![1]);
        assert_eq!(pareto_front(&[(1.0, 1.0), (1.0, 1.0)]), vec![0]);
        let pts = [(3.0, 1.0), (1.0, 3.0), (2.0, 2.0), (2.5, 2.5), (1.0, 4.0)];
        assert_eq!(pareto_front(&pts), vec![1, 2, 0]);
    }

    #[test]
    fn ik_full_reach_is_straight() {
        let (q1, q4) = ik_two_link(LU + LF, 0.0, LU, LF, Branch::ElbowDown).unwrap();
        assert!(q4.abs() < 1e-6);
        assert_relative_eq!(q1, -std::f64::consts::FRAC_PI_2, epsilon = 1e-6);
    }

    #[test]
    fn ik_right_angle_target() {
        // Upper arm horizontal, forearm vertical.
        let (q1, q4) = ik_two_link(LU, LF, LU, LF, Branch::ElbowDown).unwrap();
        assert_relative_eq!(-q1.to_degrees(), 90.0, epsilon = 1e-9);
        assert_relative_eq!(180.0 + q4.to_degrees(), 90.0, epsilon = 1e-9);
    }

    #[test]
    fn ik_branches_reach_the_target() {
        let chain = ArmChain::right_arm(LU, LF).unwrap();
        for (x, z) in [(0.33, -0.17), (0.2, 0.1), (0.05, -0.5), (0.4, 0.2)] {
            for branch in [Branch::ElbowDown, Branch::ElbowUp] {
                let (q1, q4) = ik_two_link(x, z, LU, LF, branch).unwrap();
                let pose = forward_kinematics_unchecked(&chain, &[q1, 0.0, 0.0, q4, 0.0]);
                assert!((pose.hand - Vector3::new(x, 0.0, z)).norm() < 1e-9);
            }
        }
        let err = ik_two_link(1.0, 0.0, LU, LF, Branch::ElbowDown).unwrap_err();
        assert!(matches!(err, Error::Unreachable { .. }));
    }

    #[test]
    fn reference_tool_offset() {
        let chain = ArmChain::right_arm(LU, LF).unwrap();
        let off = ToolOffset::reference(&chain).unwrap();
        assert_relative_eq!(off.x, 0.19660, epsilon = 5e-5);
        assert_relative_eq!(off.z, 0.16908, epsilon = 5e-5);
        let (q1, q4) = ik_two_link(0.53 - off.x, -off.z, LU, LF, Branch::ElbowDown).unwrap();
        assert_relative_eq!(-q1.to_degrees(), 22.0, epsilon = 1e-9);
        assert_relative_eq!(-q4.to_degrees(), 98.0, epsilon = 1e-9);
    }

    fn sweep_fixture(range: Range, weights: (f64, f64)) -> SweepResult {
        let seg = segment_params(&OperatorProfile::default()).unwrap();
        let chain = ArmChain::right_arm(seg.upper_arm.length, seg.forearm.length).unwrap();
        let links = link_inertias(&chain, &seg);
        let strength = StrengthModel::default();
        let comfort = ComfortSpec::default();
        let model = SweepModel {
            chain: &chain,
            links: &links,
            strength: &strength,
            gender: Gender::Male,
            comfort: &comfort,
        };
        let cfg = SweepConfig {
            range,
            weights,
            tool_offset: ToolOffset::reference(&chain).unwrap(),
            machine_mass: 2.5,
            machine_offset: 0.02,
            push_force: 24.5,
            z: -2.0,
            gravity: 9.81,
            branch: Branch::ElbowDown,
        };
        sweep_distance(&model, &cfg, Execution::Parallel).unwrap()
    }

    #[test]
    fn step_larger_than_range_gives_one_candidate() {
        let r = sweep_fixture(Range { start: 0.5, stop: 0.55, step: 1.0 }, (1.0, 1.0));
        assert_eq!(r.candidates.len(), 1);
        assert_eq!(r.argmin, 0);
        assert_relative_eq!(r.best().f_overall, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn weighted_minimizers_are_pareto_optimal() {
        let r = sweep_fixture(Range { start: 0.41, stop: 0.62, step: 0.005 }, (1.0, 1.0));
        for k in 0..=20 {
            let w1 = k as f64 / 20.0;
            let i = r.argmin_for(w1, 1.0 - w1).unwrap();
            assert!(r.pareto.contains(&i), "w1 = {w1}: argmin {i} not on front");
        }
    }

    #[test]
    fn unreachable_distances_are_skipped() {
        let r = sweep_fixture(Range { start: 0.6, stop: 1.0, step: 0.05 }, (1.0, 1.0));
        assert!(!r.skipped.is_empty());
        assert!(r.candidates.iter().all(|c| c.distance < 1.0));
    }
}
