//! Scenario documents and their evaluation.
//!
//! A scenario is a TOML document describing the operator, the task, the tool
//! loads, one posture source (a fixed posture or a distance sweep) and one
//! strength source (the regression model or explicit values). Key names carry
//! their units (`_s`, `_kg`, `_m`, `_n`, `_nm`, `_deg`); times are seconds at
//! this boundary and minutes inside the fatigue model.

use std::path::{Path, PathBuf};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::arm::anthropometry::{segment_params, OperatorProfile, SegmentParams};
use crate::arm::dynamics::{link_inertias, static_joint_torques, ExternalWrench, LinkInertia};
use crate::arm::kinematics::{forward_kinematics, rotation, ArmChain, JOINTS};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::fatigue::{
    endurance_time, fatigue_index, holes_capacity, minutes, recovery_time_to_fraction,
    seconds, simulate_schedule, capacity_under_load, Endurance, FatigueParams, HoleCount,
    IndexMode, JointCapacity, TaskCycle,
};
use crate::posture::{
    sweep_distance, Branch, ComfortSpec, SweepConfig, SweepModel, SweepResult, ToolOffset,
};
use crate::report::{Cell, Report, Series, Table};
use crate::strength::{Gender, Joint, Range, StrengthModel, StrengthSample};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub operator: OperatorSection,
    pub task: TaskSection,
    pub loads: LoadSection,
    #[serde(default)]
    pub fatigue: FatigueSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub posture: Option<PostureSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    pub strength: StrengthSection,
    /// Population offsets in standard deviations.
    #[serde(default = "default_z")]
    pub population_z: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub files: Option<FilesSection>,
}

fn default_z() -> Vec<f64> {
    vec![-2.0, -1.0, 0.0, 1.0, 2.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSection {
    pub body_mass_kg: f64,
    pub height_m: f64,
    #[serde(default)]
    pub gender: Gender,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSection {
    pub work_duration_s: f64,
    #[serde(default)]
    pub rest_duration_s: f64,
    /// Time to finish one hole; defaults to the work duration.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hole_time_s: Option<f64>,
    #[serde(default = "default_cycles")]
    pub cycles: usize,
    #[serde(default = "default_fraction")]
    pub recovery_fraction: f64,
    #[serde(default = "default_sample_step")]
    pub sample_step_s: f64,
}

fn default_cycles() -> usize {
    10
}
fn default_fraction() -> f64 {
    0.99
}
fn default_sample_step() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PushDirection {
    /// Along the forearm axis, toward the tool.
    #[default]
    Forearm,
    /// Horizontal and forward.
    Horizontal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadSection {
    /// Machine masses to evaluate, whole tool, kg.
    pub machine_mass_kg: Vec<f64>,
    /// Push into the work piece, whole tool, N.
    pub push_force_n: f64,
    /// Split machine weight and push evenly between both arms.
    #[serde(default = "default_true")]
    pub per_arm_split: bool,
    /// Machine center of mass beyond the grip along the forearm axis.
    #[serde(default = "default_machine_offset")]
    pub machine_offset_m: f64,
    #[serde(default)]
    pub push_direction: PushDirection,
    /// Torques to use instead of computing them from the posture.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub injected_torques: Vec<InjectedTorque>,
}

fn default_true() -> bool {
    true
}
pub const DEFAULT_MACHINE_OFFSET: f64 = 0.020;
fn default_machine_offset() -> f64 {
    DEFAULT_MACHINE_OFFSET
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InjectedTorque {
    /// Whole-tool machine mass this entry applies to.
    pub machine_mass_kg: f64,
    pub shoulder_nm: f64,
    pub elbow_nm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FatigueSection {
    #[serde(default = "default_k")]
    pub k_per_min: f64,
    #[serde(default = "default_r")]
    pub r_per_min: f64,
    #[serde(default)]
    pub index_mode: IndexMode,
}

fn default_k() -> f64 {
    1.0
}
fn default_r() -> f64 {
    2.4
}

impl Default for FatigueSection {
    fn default() -> Self {
        FatigueSection {
            k_per_min: default_k(),
            r_per_min: default_r(),
            index_mode: IndexMode::Table,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PostureSection {
    pub shoulder_flexion_deg: f64,
    pub elbow_flexion_deg: f64,
    #[serde(default)]
    pub shoulder_abduction_deg: f64,
    #[serde(default)]
    pub shoulder_rotation_deg: f64,
    #[serde(default)]
    pub forearm_pronation_deg: f64,
}

impl PostureSection {
    /// Joint vector in radians. Flexion is a negative rotation about the
    /// joint axis.
    pub fn q(&self) -> [f64; JOINTS] {
        [
            -self.shoulder_flexion_deg.to_radians(),
            self.shoulder_abduction_deg.to_radians(),
            self.shoulder_rotation_deg.to_radians(),
            -self.elbow_flexion_deg.to_radians(),
            self.forearm_pronation_deg.to_radians(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub start_m: f64,
    pub stop_m: f64,
    #[serde(default = "default_sweep_step")]
    pub step_m: f64,
    #[serde(default = "default_weights")]
    pub weights: [f64; 2],
    /// Population offset of the strengths in the stress index.
    #[serde(default = "default_sweep_z")]
    pub z: f64,
    /// Hand-to-bit offset `[forward, up]`; derived from the reference
    /// posture when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tool_offset_m: Option<[f64; 2]>,
    #[serde(default)]
    pub branch: Branch,
}

fn default_sweep_step() -> f64 {
    0.005
}
fn default_weights() -> [f64; 2] {
    [1.0, 1.0]
}
fn default_sweep_z() -> f64 {
    -2.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrengthSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regression: Option<RegressionSource>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub explicit: Option<ExplicitStrength>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegressionSource {
    /// Coefficient file; the built-in table when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients_file: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitStrength {
    pub shoulder_mean_nm: f64,
    pub shoulder_sigma_nm: f64,
    pub elbow_mean_nm: f64,
    pub elbow_sigma_nm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilesSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arm_definition: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comfort: Option<String>,
}

/// Known keys, used to explain unknown ones that differ only in unit suffix.
const KNOWN_KEYS: &[&str] = &[
    "body_mass_kg", "height_m", "work_duration_s", "rest_duration_s", "hole_time_s",
    "sample_step_s", "machine_mass_kg", "push_force_n", "machine_offset_m", "shoulder_nm",
    "elbow_nm", "k_per_min", "r_per_min", "shoulder_flexion_deg", "elbow_flexion_deg",
    "shoulder_abduction_deg", "shoulder_rotation_deg", "forearm_pronation_deg", "start_m",
    "stop_m", "step_m", "tool_offset_m", "shoulder_mean_nm", "shoulder_sigma_nm",
    "elbow_mean_nm", "elbow_sigma_nm",
];

const UNIT_SUFFIXES: &[&str] = &[
    "kg", "g", "lb", "m", "cm", "mm", "in", "ft", "s", "ms", "min", "h", "n", "kn", "lbf",
    "nm", "deg", "rad", "per_min", "per_s",
];

fn unit_hint(message: &str) -> Option<String> {
    let start = message.find("unknown field `")? + "unknown field `".len();
    let field = &message[start..start + message[start..].find('`')?];
    let stem = |k: &str| -> String {
        for suffix in UNIT_SUFFIXES.iter().copied() {
            if let Some(s) = k.strip_suffix(&format!("_{suffix}")) {
                return s.to_string();
            }
        }
        k.to_string()
    };
    let s = stem(field);
    KNOWN_KEYS
        .iter()
        .find(|k| stem(k) == s && **k != field)
        .map(|k| format!("unit mismatch: `{field}` given, expected `{k}`"))
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let scenario: Scenario = toml::from_str(text).map_err(|e| {
        let msg = e.to_string();
        match unit_hint(&msg) {
            Some(hint) => Error::Scenario(format!("{hint}\n{msg}")),
            None => Error::Scenario(msg),
        }
    })?;
    scenario.validate()?;
    Ok(scenario)
}

/// Reads a scenario file. Relative data-file paths inside it resolve against
/// the file's directory.
pub fn load_scenario(path: &Path) -> Result<(Scenario, PathBuf)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let s = parse_scenario(&text)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((s, base))
}

fn bad(field: &str, why: &str) -> Error {
    Error::Scenario(format!("field `{field}`: {why}"))
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(bad(field, &format!("must be > 0, got {v}")))
    }
}

fn nonneg(field: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(bad(field, &format!("must be >= 0, got {v}")))
    }
}

impl Scenario {
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Scenario(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(bad(
                "schema_version",
                &format!("unsupported version {}, expected {SCHEMA_VERSION}", self.schema_version),
            ));
        }
        positive("operator.body_mass_kg", self.operator.body_mass_kg)?;
        positive("operator.height_m", self.operator.height_m)?;
        positive("task.work_duration_s", self.task.work_duration_s)?;
        nonneg("task.rest_duration_s", self.task.rest_duration_s)?;
        if let Some(h) = self.task.hole_time_s {
            positive("task.hole_time_s", h)?;
        }
        positive("task.sample_step_s", self.task.sample_step_s)?;
        let p = self.task.recovery_fraction;
        if !(p > 0.0 && p < 1.0) {
            return Err(bad("task.recovery_fraction", "must lie in (0, 1)"));
        }
        if self.loads.machine_mass_kg.is_empty() {
            return Err(bad("loads.machine_mass_kg", "needs at least one mass"));
        }
        for m in &self.loads.machine_mass_kg {
            nonneg("loads.machine_mass_kg", *m)?;
        }
        nonneg("loads.push_force_n", self.loads.push_force_n)?;
        if !self.loads.machine_offset_m.is_finite() {
            return Err(bad("loads.machine_offset_m", "must be finite"));
        }
        for t in &self.loads.injected_torques {
            nonneg("loads.injected_torques.shoulder_nm", t.shoulder_nm)?;
            nonneg("loads.injected_torques.elbow_nm", t.elbow_nm)?;
            if !self.loads.machine_mass_kg.contains(&t.machine_mass_kg) {
                return Err(bad(
                    "loads.injected_torques.machine_mass_kg",
                    &format!("{} kg is not one of loads.machine_mass_kg", t.machine_mass_kg),
                ));
            }
        }
        positive("fatigue.k_per_min", self.fatigue.k_per_min)?;
        positive("fatigue.r_per_min", self.fatigue.r_per_min)?;
        if self.population_z.is_empty() || self.population_z.iter().any(|z| !z.is_finite()) {
            return Err(bad("population_z", "needs at least one finite offset"));
        }

        match (&self.posture, &self.sweep) {
            (Some(_), Some(_)) | (None, None) => {
                return Err(Error::Scenario(
                    "exactly one posture source required: give either [posture] or [sweep]".into(),
                ))
            }
            _ => {}
        }
        match (&self.strength.regression, &self.strength.explicit) {
            (Some(_), Some(_)) | (None, None) => {
                return Err(Error::Scenario(
                    "exactly one strength source required: give either [strength.regression] or [strength.explicit]"
                        .into(),
                ))
            }
            _ => {}
        }
        if let Some(e) = &self.strength.explicit {
            positive("strength.explicit.shoulder_mean_nm", e.shoulder_mean_nm)?;
            positive("strength.explicit.elbow_mean_nm", e.elbow_mean_nm)?;
            nonneg("strength.explicit.shoulder_sigma_nm", e.shoulder_sigma_nm)?;
            nonneg("strength.explicit.elbow_sigma_nm", e.elbow_sigma_nm)?;
        }
        if let Some(sw) = &self.sweep {
            positive("sweep.step_m", sw.step_m)?;
            if !(sw.start_m.is_finite() && sw.stop_m.is_finite() && sw.start_m <= sw.stop_m) {
                return Err(bad("sweep", "need finite start_m <= stop_m"));
            }
            if !(sw.weights.iter().all(|w| *w >= 0.0 && w.is_finite()) && sw.weights.iter().sum::<f64>() > 0.0) {
                return Err(bad("sweep.weights", "must be >= 0 and not both zero"));
            }
            self.check_reach(sw)?;
        }
        Ok(())
    }

    fn check_reach(&self, sw: &SweepSection) -> Result<()> {
        let lu = crate::arm::anthropometry::UPPER_ARM_LENGTH_FRACTION * self.operator.height_m;
        let lf = crate::arm::anthropometry::FOREARM_LENGTH_FRACTION * self.operator.height_m;
        let (ox, oz) = match sw.tool_offset_m {
            Some([x, z]) => (x, z),
            None => {
                let chain = ArmChain::right_arm(lu, lf)?;
                let o = ToolOffset::reference(&chain)?;
                (o.x, o.z)
            }
        };
        let (lo, hi) = ((lu - lf).abs(), lu + lf);
        for (name, d) in [("sweep.start_m", sw.start_m), ("sweep.stop_m", sw.stop_m)] {
            let dist = (d - ox).hypot(oz);
            if dist < lo || dist > hi {
                return Err(bad(
                    name,
                    &format!(
                        "unreachable sweep range: hand target {dist:.4} m from the shoulder, reachable interval [{lo:.4}, {hi:.4}] m"
                    ),
                ));
            }
        }
        Ok(())
    }

    pub fn profile(&self) -> OperatorProfile {
        OperatorProfile {
            mass: self.operator.body_mass_kg,
            height: self.operator.height_m,
            gender: self.operator.gender,
        }
    }

    pub fn params(&self) -> FatigueParams {
        FatigueParams {
            k: self.fatigue.k_per_min,
            r: self.fatigue.r_per_min,
        }
    }

    fn split(&self) -> f64 {
        if self.loads.per_arm_split {
            0.5
        } else {
            1.0
        }
    }

    /// Machine mass carried by the modelled arm for each load case.
    pub fn arm_masses(&self) -> Vec<f64> {
        self.loads.machine_mass_kg.iter().map(|m| m * self.split()).collect()
    }

    pub fn arm_push(&self) -> f64 {
        self.loads.push_force_n * self.split()
    }

    pub fn hole_time_s(&self) -> f64 {
        self.task.hole_time_s.unwrap_or(self.task.work_duration_s)
    }
}

/// Everything derived from a scenario that the evaluations share.
pub struct Context {
    pub scenario: Scenario,
    pub segments: SegmentParams,
    pub chain: ArmChain,
    pub links: [LinkInertia; JOINTS],
    pub strength_model: StrengthModel,
    pub comfort: ComfortSpec,
    pub execution: Execution,
}

fn resolve(base: &Path, p: &str) -> PathBuf {
    let p = Path::new(p);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

impl Context {
    pub fn new(scenario: &Scenario, base: &Path, execution: Execution) -> Result<Self> {
        scenario.validate()?;
        let segments = segment_params(&scenario.profile())?;
        let (lu, lf) = (segments.upper_arm.length, segments.forearm.length);
        let files = scenario.files.as_ref();
        let chain = match files.and_then(|f| f.arm_definition.as_deref()) {
            Some(p) => ArmChain::load(&resolve(base, p), lu, lf)?,
            None => ArmChain::right_arm(lu, lf)?,
        };
        let comfort = match files.and_then(|f| f.comfort.as_deref()) {
            Some(p) => ComfortSpec::load(&resolve(base, p))?,
            None => ComfortSpec::default(),
        };
        let strength_model = match scenario
            .strength
            .regression
            .as_ref()
            .and_then(|r| r.coefficients_file.as_deref())
        {
            Some(p) => StrengthModel::load(&resolve(base, p))?,
            None => StrengthModel::default(),
        };
        let links = link_inertias(&chain, &segments);
        Ok(Context {
            scenario: scenario.clone(),
            segments,
            chain,
            links,
            strength_model,
            comfort,
            execution,
        })
    }

    fn sweep_model(&self) -> SweepModel<'_> {
        SweepModel {
            chain: &self.chain,
            links: &self.links,
            strength: &self.strength_model,
            gender: self.scenario.operator.gender,
            comfort: &self.comfort,
        }
    }

    /// Sweep configuration for the first load case.
    pub fn sweep_config(&self) -> Result<Option<SweepConfig>> {
        let Some(sw) = &self.scenario.sweep else {
            return Ok(None);
        };
        let tool_offset = match sw.tool_offset_m {
            Some([x, z]) => ToolOffset { x, z },
            None => ToolOffset::reference(&self.chain)?,
        };
        Ok(Some(SweepConfig {
            range: Range {
                start: sw.start_m,
                stop: sw.stop_m,
                step: sw.step_m,
            },
            weights: (sw.weights[0], sw.weights[1]),
            tool_offset,
            machine_mass: self.scenario.arm_masses()[0],
            machine_offset: self.scenario.loads.machine_offset_m,
            push_force: self.scenario.arm_push(),
            z: sw.z,
            gravity: crate::arm::dynamics::GRAVITY,
            branch: sw.branch,
        }))
    }

    pub fn sweep(&self) -> Result<Option<SweepResult>> {
        match self.sweep_config()? {
            Some(cfg) => Ok(Some(sweep_distance(&self.sweep_model(), &cfg, self.execution)?)),
            None => Ok(None),
        }
    }

    /// Working posture in radians: the fixed posture, or the sweep optimum.
    pub fn posture(&self) -> Result<[f64; JOINTS]> {
        if let Some(p) = &self.scenario.posture {
            return Ok(p.q());
        }
        let sweep = self.sweep()?.expect("validated: one posture source");
        Ok(sweep.best().q)
    }

    /// Signed static torques at every joint for an arm-carried machine mass.
    pub fn joint_torques(&self, q: &[f64; JOINTS], arm_mass: f64) -> Result<[f64; JOINTS]> {
        let pose = forward_kinematics(&self.chain, q)?;
        let g = crate::arm::dynamics::GRAVITY;
        let push = self.scenario.arm_push();
        let force = match self.scenario.loads.push_direction {
            PushDirection::Forearm => -push * rotation(&pose.hand_frame).column(2).into_owned(),
            PushDirection::Horizontal => Vector3::new(-push, 0.0, 0.0),
        };
        let wrenches = [
            ExternalWrench::weight(
                arm_mass,
                Vector3::new(0.0, 0.0, self.scenario.loads.machine_offset_m),
                g,
                "machine weight",
            ),
            ExternalWrench::new(Vector3::zeros(), force, "push reaction"),
        ];
        static_joint_torques(&self.chain, q, &self.links, &wrenches, g)
    }

    /// Load torques `(shoulder, elbow)` for each load case, N*m.
    pub fn load_torques(&self) -> Result<Vec<(f64, f64)>> {
        let s = &self.scenario;
        let mut q = None;
        let mut out = Vec::new();
        for (total, arm) in s.loads.machine_mass_kg.iter().zip(s.arm_masses()) {
            if let Some(t) = s.loads.injected_torques.iter().find(|t| t.machine_mass_kg == *total) {
                out.push((t.shoulder_nm, t.elbow_nm));
                continue;
            }
            let posture = match q {
                Some(p) => p,
                None => {
                    let p = self.posture()?;
                    q = Some(p);
                    p
                }
            };
            let tau = self.joint_torques(&posture, arm)?;
            out.push((tau[0].abs(), tau[3].abs()));
        }
        Ok(out)
    }

    /// Mean and sigma per joint.
    pub fn strengths(&self) -> Result<[StrengthSample; 2]> {
        if let Some(e) = &self.scenario.strength.explicit {
            return Ok([
                StrengthSample::new(e.shoulder_mean_nm, e.shoulder_sigma_nm)?,
                StrengthSample::new(e.elbow_mean_nm, e.elbow_sigma_nm)?,
            ]);
        }
        let q = self.posture()?;
        let alpha_s = -q[0].to_degrees();
        let alpha_e = 180.0 + q[3].to_degrees();
        let g = self.scenario.operator.gender;
        Ok([
            self.strength_model.strength(Joint::Shoulder, alpha_s, alpha_e, g)?,
            self.strength_model.strength(Joint::Elbow, alpha_s, alpha_e, g)?,
        ])
    }
}

/// One `(load, joint, z)` cell of the fatigue tables.
#[derive(Debug, Clone, PartialEq)]
pub struct FatigueCell {
    pub arm_mass: f64,
    pub joint: Joint,
    pub z: f64,
    pub gamma_max: f64,
    pub load: f64,
    pub endurance: Endurance,
    pub index: f64,
    /// Minutes; `None` when the fraction is unreachable.
    pub recovery: Option<f64>,
    pub holes: HoleCount,
}

/// Evaluates every `(load, joint, z)` cell in that lexicographic order.
pub fn fatigue_cells(ctx: &Context) -> Result<Vec<FatigueCell>> {
    let s = &ctx.scenario;
    let params = s.params();
    params.validate()?;
    let torques = ctx.load_torques()?;
    let strengths = ctx.strengths()?;
    let mut keys = Vec::new();
    for (li, arm) in s.arm_masses().iter().enumerate() {
        for (ji, joint) in Joint::ALL.iter().enumerate() {
            for z in &s.population_z {
                keys.push((li, *arm, ji, *joint, *z));
            }
        }
    }
    let work = minutes(s.task.work_duration_s);
    let hole = minutes(s.hole_time_s());
    let mode = s.fatigue.index_mode;
    exec::try_map(ctx.execution, &keys, |&(li, arm, ji, joint, z)| {
        let gmax = strengths[ji].at(z)?;
        let load = if ji == 0 { torques[li].0 } else { torques[li].1 };
        let endurance = endurance_time(gmax, load, &params)?;
        let index = fatigue_index(gmax, load, work, &params, mode)?;
        let recovery = if load > 0.0 {
            let g0 = capacity_under_load(gmax, gmax, load, work, &params)?;
            recovery_time_to_fraction(gmax, g0, s.task.recovery_fraction, &params).ok()
        } else {
            Some(0.0)
        };
        Ok(FatigueCell {
            arm_mass: arm,
            joint,
            z,
            gamma_max: gmax,
            load,
            endurance,
            index,
            recovery,
            holes: holes_capacity(gmax, load, hole, &params)?,
        })
    })
}

fn z_cell(z: f64) -> Cell {
    if z.fract() == 0.0 {
        Cell::Int(z as i64)
    } else {
        Cell::Fixed(z)
    }
}

/// Endurance, fatigue index, recovery and holes tables.
pub fn endurance_report(ctx: &Context) -> Result<Report> {
    let cells = fatigue_cells(ctx)?;
    let s = &ctx.scenario;
    let mut report = Report::default();
    let mut endurance = Table::new(
        "endurance",
        &["arm_machine_kg", "joint", "z", "gamma_max_nm", "load_nm", "endurance_s", "status"],
    );
    let mut index = Table::new(
        "fatigue_index",
        &["arm_machine_kg", "joint", "z", "work_s", "fatigue_index"],
    );
    let mut recovery = Table::new(
        "recovery",
        &["arm_machine_kg", "joint", "z", "work_s", "fraction", "recovery_s"],
    );
    for c in &cells {
        let key = || vec![Cell::Fixed(c.arm_mass), Cell::Text(c.joint.name().into()), z_cell(c.z)];
        let (t, status) = match c.endurance {
            Endurance::Limited(t) => (Cell::Fixed(seconds(t)), "ok"),
            Endurance::NoFatigueLimit => (Cell::Text("inf".into()), "no fatigue limit"),
            Endurance::Overexertion => {
                report.warnings.push(format!(
                    "overexertion: {} kg, {}, z = {}: load {:.3} N*m exceeds strength {:.3} N*m",
                    c.arm_mass,
                    c.joint.name(),
                    c.z,
                    c.load,
                    c.gamma_max
                ));
                (Cell::Fixed(0.0), "overexertion")
            }
        };
        let mut row = key();
        row.extend([Cell::Fixed(c.gamma_max), Cell::Fixed(c.load), t, Cell::Text(status.into())]);
        endurance.push(row);

        let mut row = key();
        row.extend([Cell::Fixed(s.task.work_duration_s), Cell::Fixed(c.index)]);
        index.push(row);

        let mut row = key();
        row.extend([
            Cell::Fixed(s.task.work_duration_s),
            Cell::Fixed(s.task.recovery_fraction),
            match c.recovery {
                Some(t) => Cell::Fixed(seconds(t)),
                None => Cell::Text("unreachable".into()),
            },
        ]);
        recovery.push(row);
    }

    let mut holes = Table::new("holes", &["arm_machine_kg", "z", "hole_s", "holes", "limiting_joint"]);
    for arm in s.arm_masses() {
        for z in &s.population_z {
            let here: Vec<&FatigueCell> = cells
                .iter()
                .filter(|c| c.arm_mass == arm && c.z == *z)
                .collect();
            let rank = |h: &HoleCount| h.count().unwrap_or(u64::MAX);
            let worst = here
                .iter()
                .min_by_key(|c| rank(&c.holes))
                .expect("two joints per load");
            holes.push(vec![
                Cell::Fixed(arm),
                z_cell(*z),
                Cell::Fixed(s.hole_time_s()),
                match worst.holes {
                    HoleCount::Unlimited => Cell::Text("unlimited".into()),
                    h => Cell::Int(h.count().unwrap_or(0) as i64),
                },
                Cell::Text(worst.joint.name().into()),
            ]);
        }
    }
    report.tables.extend([endurance, index, recovery, holes]);
    Ok(report)
}

/// Capacity trajectories of the work/rest plan for every load, joint and z.
pub fn schedule_report(ctx: &Context) -> Result<Report> {
    let s = &ctx.scenario;
    let params = s.params();
    let torques = ctx.load_torques()?;
    let strengths = ctx.strengths()?;
    let cycle_of = |load: f64| TaskCycle {
        work_duration: minutes(s.task.work_duration_s),
        rest_duration: minutes(s.task.rest_duration_s),
        load_torque: load,
        cycles: s.task.cycles,
    };
    let mut keys = Vec::new();
    for (li, arm) in s.arm_masses().iter().enumerate() {
        for (ji, joint) in Joint::ALL.iter().enumerate() {
            for z in &s.population_z {
                keys.push((li, *arm, ji, *joint, *z));
            }
        }
    }
    let step = minutes(s.task.sample_step_s);
    let trajectories = exec::try_map(ctx.execution, &keys, |&(li, _, ji, _, z)| {
        let gmax = strengths[ji].at(z)?;
        let load = if ji == 0 { torques[li].0 } else { torques[li].1 };
        simulate_schedule(JointCapacity::rested(gmax)?, &cycle_of(load), &params, s.fatigue.index_mode, step)
    })?;

    let mut report = Report::default();
    let mut summary = Table::new(
        "schedule",
        &["arm_machine_kg", "joint", "z", "cycle", "end_of_rest_nm"],
    );
    for ((_, arm, _, joint, z), traj) in keys.iter().zip(&trajectories) {
        for (i, g) in traj.end_of_rest.iter().enumerate() {
            summary.push(vec![
                Cell::Fixed(*arm),
                Cell::Text(joint.name().into()),
                z_cell(*z),
                Cell::Int(i as i64 + 1),
                Cell::Fixed(*g),
            ]);
        }
        if traj.cumulative_fatigue {
            report.warnings.push(format!(
                "cumulative fatigue: {arm} kg, {}, z = {z}: end-of-rest capacity declines cycle over cycle",
                joint.name()
            ));
        }
        if traj.overexertion {
            report.warnings.push(format!(
                "overexertion: {arm} kg, {}, z = {z}: capacity falls below the load during work",
                joint.name()
            ));
        }
    }
    report.tables.push(summary);
    for ((_, arm, _, joint, z), traj) in keys.iter().zip(trajectories) {
        report.series.push(Series {
            name: format!(
                "trajectory arm_machine_kg={} joint={} z={}",
                crate::report::fixed3(*arm),
                joint.name(),
                z
            ),
            x: "time_s".into(),
            y: "gamma_cem_nm".into(),
            points: traj.samples.iter().map(|p| (seconds(p.time), p.gamma_cem)).collect(),
        });
    }
    Ok(report)
}

/// Joint torques at the working posture for every load case.
pub fn torque_report(ctx: &Context) -> Result<Report> {
    let s = &ctx.scenario;
    let q = ctx.posture()?;
    let mut t = Table::new(
        "torques",
        &[
            "arm_machine_kg",
            "shoulder_flexion_deg",
            "elbow_flexion_deg",
            "tau1_nm",
            "tau2_nm",
            "tau3_nm",
            "tau4_nm",
            "tau5_nm",
            "shoulder_load_nm",
            "elbow_load_nm",
        ],
    );
    let mut prev: Option<(f64, [f64; JOINTS])> = None;
    let mut deltas = Table::new("torque_delta_per_kg", &["from_kg", "to_kg", "shoulder_nm_per_kg", "elbow_nm_per_kg"]);
    for arm in s.arm_masses() {
        let tau = ctx.joint_torques(&q, arm)?;
        let mut row = vec![
            Cell::Fixed(arm),
            Cell::Fixed(-q[0].to_degrees()),
            Cell::Fixed(-q[3].to_degrees()),
        ];
        row.extend(tau.iter().map(|v| Cell::Fixed(*v)));
        row.extend([Cell::Fixed(tau[0].abs()), Cell::Fixed(tau[3].abs())]);
        t.push(row);
        if let Some((m0, t0)) = prev {
            let dm = arm - m0;
            if dm != 0.0 {
                deltas.push(vec![
                    Cell::Fixed(m0),
                    Cell::Fixed(arm),
                    Cell::Fixed((tau[0].abs() - t0[0].abs()) / dm),
                    Cell::Fixed((tau[3].abs() - t0[3].abs()) / dm),
                ]);
            }
        }
        prev = Some((arm, tau));
    }
    let mut report = Report::default();
    report.tables.push(t);
    if !deltas.rows.is_empty() {
        report.tables.push(deltas);
    }
    Ok(report)
}

/// Strength at the working posture and the strength surface of both joints.
pub fn strength_report(ctx: &Context, grid_step_deg: f64) -> Result<Report> {
    let s = &ctx.scenario;
    let strengths = ctx.strengths()?;
    let mut point = Table::new("strength", &["joint", "z", "strength_nm"]);
    for (ji, joint) in Joint::ALL.iter().enumerate() {
        for z in &s.population_z {
            point.push(vec![
                Cell::Text(joint.name().into()),
                z_cell(*z),
                Cell::Fixed(strengths[ji].at(*z)?),
            ]);
        }
    }
    let mut report = Report::default();
    report.tables.push(point);
    if s.strength.regression.is_some() {
        let m = &ctx.strength_model;
        let grid = crate::strength::SurfaceGrid {
            alpha_s: Range {
                start: m.limits.alpha_s.0,
                stop: m.limits.alpha_s.1,
                step: grid_step_deg,
            },
            alpha_e: Range {
                start: m.limits.alpha_e.0,
                stop: m.limits.alpha_e.1,
                step: grid_step_deg,
            },
        };
        for joint in Joint::ALL {
            let rows = m.strength_surface(joint, s.operator.gender, &grid, ctx.execution)?;
            let mut t = Table::new(
                format!("strength_surface {}", joint.name()),
                &["alpha_s_deg", "alpha_e_deg", "minus_2sigma_nm", "mean_nm", "plus_2sigma_nm"],
            );
            for r in rows {
                t.push(vec![
                    Cell::Fixed(r.alpha_s),
                    Cell::Fixed(r.alpha_e),
                    Cell::Fixed(r.minus_2sigma),
                    Cell::Fixed(r.mean),
                    Cell::Fixed(r.plus_2sigma),
                ]);
            }
            report.tables.push(t);
        }
    }
    Ok(report)
}

/// Sweep table, optimum and Pareto set.
pub fn sweep_report(ctx: &Context) -> Result<Report> {
    let sweep = ctx
        .sweep()?
        .ok_or_else(|| Error::Scenario("optimize needs a [sweep] section".into()))?;
    let cfg = ctx.sweep_config()?.expect("sweep present");
    let mut t = Table::new(
        "sweep",
        &[
            "distance_m",
            "shoulder_flexion_deg",
            "elbow_flexion_deg",
            "shoulder_torque_nm",
            "elbow_torque_nm",
            "shoulder_strength_nm",
            "elbow_strength_nm",
            "f_fatigue",
            "shoulder_discomfort",
            "elbow_discomfort",
            "f_discomfort",
            "f_overall",
            "pareto",
            "argmin",
        ],
    );
    for (i, c) in sweep.candidates.iter().enumerate() {
        t.push(vec![
            Cell::Fixed(c.distance),
            Cell::Fixed(c.shoulder_flexion),
            Cell::Fixed(c.elbow_flexion),
            Cell::Fixed(c.torques[0]),
            Cell::Fixed(c.torques[1]),
            Cell::Fixed(c.strengths[0]),
            Cell::Fixed(c.strengths[1]),
            Cell::Sci(c.f_fatigue),
            Cell::Sci(c.shoulder_discomfort),
            Cell::Sci(c.elbow_discomfort),
            Cell::Sci(c.f_discomfort),
            Cell::Sci(c.f_overall),
            Cell::Flag(sweep.pareto.contains(&i)),
            Cell::Flag(i == sweep.argmin),
        ]);
    }
    let best = sweep.best();
    let mut opt = Table::new(
        "optimum",
        &["w1", "w2", "distance_m", "shoulder_flexion_deg", "elbow_flexion_deg", "f_overall"],
    );
    opt.push(vec![
        Cell::Fixed(cfg.weights.0),
        Cell::Fixed(cfg.weights.1),
        Cell::Fixed(best.distance),
        Cell::Fixed(best.shoulder_flexion),
        Cell::Fixed(best.elbow_flexion),
        Cell::Sci(best.f_overall),
    ]);
    let mut pareto = Table::new("pareto", &["distance_m", "f_fatigue", "f_discomfort"]);
    for &i in &sweep.pareto {
        let c = &sweep.candidates[i];
        pareto.push(vec![Cell::Fixed(c.distance), Cell::Sci(c.f_fatigue), Cell::Sci(c.f_discomfort)]);
    }
    let mut report = Report::default();
    if !sweep.skipped.is_empty() {
        report.warnings.push(format!(
            "{} sweep distances had no admissible posture and were skipped",
            sweep.skipped.len()
        ));
    }
    report.tables.extend([t, opt, pareto]);
    Ok(report)
}

/// Full report: fatigue tables, schedule series and, for sweep scenarios, the
/// sweep tables.
pub fn run_scenario(scenario: &Scenario, base: &Path, execution: Execution) -> Result<Report> {
    let ctx = Context::new(scenario, base, execution)?;
    let mut report = endurance_report(&ctx)?;
    report.extend(schedule_report(&ctx)?);
    if scenario.sweep.is_some() {
        report.extend(sweep_report(&ctx)?);
    }
    Ok(report)
}
