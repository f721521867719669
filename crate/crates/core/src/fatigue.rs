//! Joint-level fatigue and recovery model.
//!
//! Capacity `gamma_cem` of a joint decays under a load torque as
//!
//! ```text
//! d(gamma_cem)/dt = -k * load * gamma_cem / gamma_max
//! ```
//!
//! and recovers at rest as
//!
//! ```text
//! d(gamma_cem)/dt = R * (gamma_max - gamma_cem)
//! ```
//!
//! Both have closed-form solutions, which every operation here uses. Time is in
//! minutes internally (`k` and `R` are per-minute rates); callers that deal in
//! seconds convert with [`seconds`] / [`minutes`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SECONDS_PER_MINUTE: f64 = 60.0;

/// Converts seconds to minutes.
pub fn minutes(seconds: f64) -> f64 {
    seconds / SECONDS_PER_MINUTE
}

/// Converts minutes to seconds.
pub fn seconds(minutes: f64) -> f64 {
    minutes * SECONDS_PER_MINUTE
}

/// Fatigue and recovery rates, both per minute.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FatigueParams {
    pub k: f64,
    pub r: f64,
}

impl Default for FatigueParams {
    fn default() -> Self {
        FatigueParams { k: 1.0, r: 2.4 }
    }
}

impl FatigueParams {
    pub fn new(k: f64, r: f64) -> Result<Self> {
        let p = FatigueParams { k, r };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k > 0.0 && self.k.is_finite()) {
            return Err(Error::domain(format!("fatigue rate k must be > 0, got {}", self.k)));
        }
        if !(self.r > 0.0 && self.r.is_finite()) {
            return Err(Error::domain(format!("recovery rate R must be > 0, got {}", self.r)));
        }
        Ok(())
    }
}

/// Which definition of the fatigue index `U` to accumulate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IndexMode {
    /// `dU/dt = k * load / gamma_max`. Linear in time and load.
    #[default]
    Table,
    /// `dU/dt = gamma_max * load / gamma_cem(t)^2`, integrated along the
    /// decaying capacity.
    Literal,
}

/// Strength state of one joint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointCapacity {
    pub gamma_max: f64,
    pub gamma_cem: f64,
    pub fatigue_index: f64,
}

impl JointCapacity {
    /// A fully rested joint.
    pub fn rested(gamma_max: f64) -> Result<Self> {
        let c = JointCapacity {
            gamma_max,
            gamma_cem: gamma_max,
            fatigue_index: 0.0,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_max > 0.0 && self.gamma_max.is_finite()) {
            return Err(Error::domain(format!(
                "gamma_max must be > 0, got {}",
                self.gamma_max
            )));
        }
        if !(self.gamma_cem >= 0.0 && self.gamma_cem <= self.gamma_max) {
            return Err(Error::domain(format!(
                "gamma_cem {} must lie in [0, gamma_max = {}]",
                self.gamma_cem, self.gamma_max
            )));
        }
        if !(self.fatigue_index >= 0.0) {
            return Err(Error::domain("fatigue index must be >= 0"));
        }
        Ok(())
    }
}

/// One work/rest unit of a repetitive task. Durations are in minutes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaskCycle {
    pub work_duration: f64,
    pub rest_duration: f64,
    pub load_torque: f64,
    pub cycles: usize,
}

impl TaskCycle {
    pub fn validate(&self) -> Result<()> {
        if !(self.work_duration > 0.0 && self.work_duration.is_finite()) {
            return Err(Error::domain("work duration must be > 0"));
        }
        if !(self.rest_duration >= 0.0 && self.rest_duration.is_finite()) {
            return Err(Error::domain("rest duration must be >= 0"));
        }
        if !(self.load_torque >= 0.0 && self.load_torque.is_finite()) {
            return Err(Error::domain("load torque must be >= 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Work,
    Rest,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacitySample {
    /// Minutes since the start of the schedule.
    pub time: f64,
    pub gamma_cem: f64,
    pub fatigue_index: f64,
    pub phase: Phase,
}

/// Sampled capacity history of a schedule.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CapacityTrajectory {
    pub samples: Vec<CapacitySample>,
    /// Capacity at the end of each cycle's rest phase.
    pub end_of_rest: Vec<f64>,
    /// End-of-rest capacity dropped from one cycle to the next.
    pub cumulative_fatigue: bool,
    /// Capacity fell below the required load during some work phase.
    pub overexertion: bool,
}

/// Endurance time for a constant load.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Endurance {
    /// Minutes until capacity falls to the load.
    Limited(f64),
    /// The load is zero; capacity never decays.
    NoFatigueLimit,
    /// The load already exceeds the rested strength.
    Overexertion,
}

impl Endurance {
    /// Endurance in minutes; `None` when unbounded, zero on overexertion.
    pub fn minutes(&self) -> Option<f64> {
        match *self {
            Endurance::Limited(t) => Some(t),
            Endurance::NoFatigueLimit => None,
            Endurance::Overexertion => Some(0.0),
        }
    }
}

/// Whole holes achievable in continuous work.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HoleCount {
    Count(u64),
    Unlimited,
    Overexertion,
}

impl HoleCount {
    pub fn count(&self) -> Option<u64> {
        match *self {
            HoleCount::Count(n) => Some(n),
            HoleCount::Unlimited => None,
            HoleCount::Overexertion => Some(0),
        }
    }
}

fn check_strength(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be > 0, got {v}")))
    }
}

fn check_nonneg(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be >= 0, got {v}")))
    }
}

/// Capacity after holding `load` for `t` minutes, starting from `gamma_0`.
pub fn capacity_under_load(
    gamma_max: f64,
    gamma_0: f64,
    load: f64,
    t: f64,
    params: &FatigueParams,
) -> Result<f64> {
    check_strength("gamma_max", gamma_max)?;
    check_strength("gamma_0", gamma_0)?;
    if gamma_0 > gamma_max {
        return Err(Error::domain(format!(
            "gamma_0 {gamma_0} exceeds gamma_max {gamma_max}"
        )));
    }
    check_nonneg("load", load)?;
    check_nonneg("t", t)?;
    Ok(gamma_0 * (-params.k * load * t / gamma_max).exp())
}

/// Fatigue index accumulated by a rested joint holding `load` for `t` minutes.
pub fn fatigue_index(
    gamma_max: f64,
    load: f64,
    t: f64,
    params: &FatigueParams,
    mode: IndexMode,
) -> Result<f64> {
    check_strength("gamma_max", gamma_max)?;
    check_nonneg("load", load)?;
    check_nonneg("t", t)?;
    Ok(index_increment(gamma_max, gamma_max, load, t, params, mode))
}

/// Index accrued over `t` minutes of work starting at capacity `gamma_0`.
fn index_increment(
    gamma_max: f64,
    gamma_0: f64,
    load: f64,
    t: f64,
    params: &FatigueParams,
    mode: IndexMode,
) -> f64 {
    match mode {
        IndexMode::Table => params.k * load * t / gamma_max,
        IndexMode::Literal => {
            if load == 0.0 {
                return 0.0;
            }
            // gamma_cem(s) = gamma_0 exp(-a s), a = k load / gamma_max
            let a = params.k * load / gamma_max;
            let ratio = gamma_max / gamma_0;
            ratio * ratio * (2.0 * a * t).exp_m1() / (2.0 * params.k)
        }
    }
}

/// Time until a rested joint can no longer hold `load`.
pub fn endurance_time(gamma_max: f64, load: f64, params: &FatigueParams) -> Result<Endurance> {
    check_strength("gamma_max", gamma_max)?;
    if !load.is_finite() {
        return Err(Error::domain("load must be finite"));
    }
    if load <= 0.0 {
        return Ok(Endurance::NoFatigueLimit);
    }
    if load > gamma_max {
        return Ok(Endurance::Overexertion);
    }
    let ratio = gamma_max / load;
    Ok(Endurance::Limited(ratio * ratio.ln() / params.k))
}

/// Capacity after resting `t` minutes from `gamma_0`.
pub fn recover_capacity(
    gamma_max: f64,
    gamma_0: f64,
    t: f64,
    params: &FatigueParams,
) -> Result<f64> {
    check_strength("gamma_max", gamma_max)?;
    check_nonneg("gamma_0", gamma_0)?;
    check_nonneg("t", t)?;
    if gamma_0 > gamma_max {
        return Err(Error::domain(format!(
            "gamma_0 {gamma_0} exceeds gamma_max {gamma_max}"
        )));
    }
    Ok(gamma_max + (gamma_0 - gamma_max) * (-params.r * t).exp())
}

/// Rest time (minutes) for capacity to climb from `gamma_0` back to
/// `p * gamma_max`.
pub fn recovery_time_to_fraction(
    gamma_max: f64,
    gamma_0: f64,
    p: f64,
    params: &FatigueParams,
) -> Result<f64> {
    check_strength("gamma_max", gamma_max)?;
    check_nonneg("gamma_0", gamma_0)?;
    if gamma_0 > gamma_max {
        return Err(Error::domain(format!(
            "gamma_0 {gamma_0} exceeds gamma_max {gamma_max}"
        )));
    }
    if !p.is_finite() {
        return Err(Error::domain("fraction p must be finite"));
    }
    if p >= 1.0 {
        return Err(Error::UnreachableFraction(p));
    }
    if p * gamma_max <= gamma_0 {
        return Ok(0.0);
    }
    let deficit = gamma_max - gamma_0;
    Ok(-((1.0 - p) * gamma_max / deficit).ln() / params.r)
}

/// Round half up to an integer.
pub fn round_half_up(x: f64) -> f64 {
    (x + 0.5).floor()
}

/// Holes finished in continuous work at `t_hole` minutes per hole.
pub fn holes_capacity(
    gamma_max: f64,
    load: f64,
    t_hole: f64,
    params: &FatigueParams,
) -> Result<HoleCount> {
    if !(t_hole > 0.0 && t_hole.is_finite()) {
        return Err(Error::domain("time per hole must be > 0"));
    }
    Ok(match endurance_time(gamma_max, load, params)? {
        Endurance::Limited(t) => HoleCount::Count(round_half_up(t / t_hole) as u64),
        Endurance::NoFatigueLimit => HoleCount::Unlimited,
        Endurance::Overexertion => HoleCount::Overexertion,
    })
}

/// Simulates `cycle.cycles` repetitions of work followed by rest, sampling
/// every `step` minutes inside each phase and at every phase boundary.
pub fn simulate_schedule(
    capacity: JointCapacity,
    cycle: &TaskCycle,
    params: &FatigueParams,
    mode: IndexMode,
    step: f64,
) -> Result<CapacityTrajectory> {
    capacity.validate()?;
    cycle.validate()?;
    params.validate()?;
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::domain("sampling step must be > 0"));
    }

    let gmax = capacity.gamma_max;
    let load = cycle.load_torque;
    let mut traj = CapacityTrajectory::default();
    let mut t0 = 0.0;
    let mut g = capacity.gamma_cem;
    let mut u = capacity.fatigue_index;
    traj.samples.push(CapacitySample {
        time: 0.0,
        gamma_cem: g,
        fatigue_index: u,
        phase: Phase::Work,
    });

    for _ in 0..cycle.cycles {
        let g_start = g;
        let u_start = u;
        sample_phase(&mut traj.samples, t0, cycle.work_duration, step, Phase::Work, |s| {
            let gs = g_start * (-params.k * load * s / gmax).exp();
            let us = u_start + index_increment(gmax, g_start, load, s, params, mode);
            (gs, us)
        });
        t0 += cycle.work_duration;
        g = g_start * (-params.k * load * cycle.work_duration / gmax).exp();
        u = u_start + index_increment(gmax, g_start, load, cycle.work_duration, params, mode);
        if g < load {
            traj.overexertion = true;
        }

        if cycle.rest_duration > 0.0 {
            let g_rest = g;
            sample_phase(&mut traj.samples, t0, cycle.rest_duration, step, Phase::Rest, |s| {
                (gmax + (g_rest - gmax) * (-params.r * s).exp(), u)
            });
            t0 += cycle.rest_duration;
            g = gmax + (g_rest - gmax) * (-params.r * cycle.rest_duration).exp();
        }
        traj.end_of_rest.push(g);
    }

    traj.cumulative_fatigue = traj
        .end_of_rest
        .windows(2)
        .any(|w| w[1] < w[0] * (1.0 - 1e-12));
    Ok(traj)
}

fn sample_phase(
    out: &mut Vec<CapacitySample>,
    t0: f64,
    duration: f64,
    step: f64,
    phase: Phase,
    eval: impl Fn(f64) -> (f64, f64),
) {
    let n = (duration / step).floor() as usize;
    for i in 1..=n {
        let s = i as f64 * step;
        // Leave the boundary itself to the exact sample below.
        if duration - s <= step * 1e-9 {
            break;
        }
        let (g, u) = eval(s);
        out.push(CapacitySample {
            time: t0 + s,
            gamma_cem: g,
            fatigue_index: u,
            phase,
        });
    }
    let (g, u) = eval(duration);
    out.push(CapacitySample {
        time: t0 + duration,
        gamma_cem: g,
        fatigue_index: u,
        phase,
    });
}

/// Fixed-step RK4 integration of capacity under a time-varying load profile.
///
/// The load is sampled once per step at its midpoint and held for the step,
/// so piecewise-constant profiles switching on the step grid are integrated
/// without straddling a switch. Where the load is positive the fatigue
/// equation applies; where it is zero the joint recovers. Returns
/// `(time, gamma_cem)` pairs including `t = 0`.
pub fn integrate_load_profile(
    gamma_max: f64,
    gamma_0: f64,
    load: impl Fn(f64) -> f64,
    t_end: f64,
    step: f64,
    params: &FatigueParams,
) -> Result<Vec<(f64, f64)>> {
    check_strength("gamma_max", gamma_max)?;
    check_nonneg("gamma_0", gamma_0)?;
    if !(step > 0.0) || !(t_end >= 0.0) {
        return Err(Error::domain("integration needs step > 0 and t_end >= 0"));
    }
    let rhs = |l: f64, g: f64| {
        if l > 0.0 {
            -params.k * l * g / gamma_max
        } else {
            params.r * (gamma_max - g)
        }
    };
    let n = (t_end / step - 1e-9).ceil().max(0.0) as usize;
    let mut out = Vec::with_capacity(n + 1);
    let mut g = gamma_0;
    out.push((0.0, g));
    for i in 0..n {
        let t0 = i as f64 * step;
        let t1 = ((i + 1) as f64 * step).min(t_end);
        let h = t1 - t0;
        let l = load(0.5 * (t0 + t1));
        let k1 = rhs(l, g);
        let k2 = rhs(l, g + h * k1 / 2.0);
        let k3 = rhs(l, g + h * k2 / 2.0);
        let k4 = rhs(l, g + h * k3);
        g += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
        out.push((t1, g));
    }
    Ok(out)
}

pub const DEFAULT_RK4_STEP: f64 = 1e-3;
