//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::path::Path;
use std::time::Instant;

use armfatigue::arm::anthropometry::{segment_params, OperatorProfile};
use armfatigue::arm::dynamics::{link_inertias, static_joint_torques, ExternalWrench, GRAVITY};
use armfatigue::arm::kinematics::{forward_kinematics_unchecked, ArmChain, JOINTS};
use armfatigue::fatigue::{
    capacity_under_load, endurance_time, fatigue_index, integrate_load_profile, recover_capacity,
    recovery_time_to_fraction, seconds, FatigueParams, HoleCount, IndexMode,
};
use armfatigue::scenario::{fatigue_cells, load_scenario, parse_scenario, Context};
use armfatigue::strength::{Gender, Joint, StrengthModel};
use armfatigue::Execution;
use nalgebra::{Vector3, Vector4};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const Z: [f64; 5] = [-2.0, -1.0, 0.0, 1.0, 2.0];

// Printed endurance times [s] by (per-arm machine mass, joint), z = -2..+2.
const ENDURANCE: [(f64, Joint, [f64; 5]); 4] = [
    (2.5, Joint::Shoulder, [60.155, 140.125, 233.984, 338.456, 451.520]),
    (2.5, Joint::Elbow, [509.083, 936.582, 1413.831, 1928.300, 2472.535]),
    (3.5, Joint::Shoulder, [37.623, 100.198, 174.683, 258.268, 349.221]),
    (3.5, Joint::Elbow, [325.501, 621.517, 955.564, 1318.062, 1703.315]),
];

const INDEX: [(f64, Joint, [f64; 5]); 4] = [
    (2.5, Joint::Shoulder, [0.283, 0.198, 0.152, 0.124, 0.104]),
    (2.5, Joint::Elbow, [0.097, 0.065, 0.049, 0.039, 0.033]),
    (3.5, Joint::Shoulder, [0.330, 0.231, 0.178, 0.144, 0.122]),
    (3.5, Joint::Elbow, [0.127, 0.085, 0.064, 0.052, 0.043]),
];

// The recovery block is printed with its row labels shuffled; the values
// belong to these (load, joint) pairs.
const RECOVERY: [(f64, Joint, [f64; 5]); 4] = [
    (3.5, Joint::Shoulder, [83.542, 75.758, 69.815, 65.011, 60.981]),
    (3.5, Joint::Elbow, [61.945, 52.576, 45.774, 40.432, 36.033]),
    (2.5, Joint::Shoulder, [80.243, 72.301, 66.270, 61.412, 57.343]),
    (2.5, Joint::Elbow, [55.584, 46.101, 39.240, 33.863, 29.439]),
];

const HOLES: [(f64, [u64; 5]); 2] = [(2.5, [2, 5, 8, 11, 15]), (3.5, [1, 3, 6, 9, 11])];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn scenario_path(name: &str) -> String {
    format!("{}/../../scenarios/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn drilling_context() -> Context {
    let (s, base) = load_scenario(Path::new(&scenario_path("drilling.toml"))).unwrap();
    Context::new(&s, &base, Execution::Parallel).unwrap()
}

fn round3(x: f64) -> f64 {
    (x * 1000.0 + 0.5).floor() / 1000.0
}

fn endurance_reproduction() -> Outcome {
    let start = Instant::now();
    let ctx = drilling_context();
    let cells = fatigue_cells(&ctx).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let mut worst = 0.0f64;
    let mut n = 0;
    for (m, j, vals) in ENDURANCE {
        for (z, expected) in Z.iter().zip(vals) {
            let c = cells
                .iter()
                .find(|c| c.arm_mass == m && c.joint == j && c.z == *z)
                .unwrap();
            let t = seconds(c.endurance.minutes().unwrap());
            worst = worst.max((t - expected).abs());
            n += 1;
        }
    }
    outcome(
        n == 20 && worst <= 0.15 && elapsed < 1.0,
        format!("{n} entries, max |error| {worst:.4} s (tol 0.15), runtime {elapsed:.4} s"),
    )
}

fn index_reproduction() -> Outcome {
    let ctx = drilling_context();
    let cells = fatigue_cells(&ctx).unwrap();
    let mut worst = 0.0f64;
    let mut n = 0;
    for (m, j, vals) in INDEX {
        for (z, expected) in Z.iter().zip(vals) {
            let c = cells
                .iter()
                .find(|c| c.arm_mass == m && c.joint == j && c.z == *z)
                .unwrap();
            worst = worst.max((round3(c.index) - expected).abs());
            n += 1;
        }
    }
    outcome(
        n == 20 && worst <= 0.001 + 1e-12,
        format!("{n} entries, max |error| {worst:.4} (tol 0.001)"),
    )
}

fn recovery_reproduction() -> Outcome {
    let ctx = drilling_context();
    let cells = fatigue_cells(&ctx).unwrap();
    let mut worst = 0.0f64;
    let mut n = 0;
    for (m, j, vals) in RECOVERY {
        for (z, expected) in Z.iter().zip(vals) {
            let c = cells
                .iter()
                .find(|c| c.arm_mass == m && c.joint == j && c.z == *z)
                .unwrap();
            let t = seconds(c.recovery.unwrap());
            worst = worst.max((t - expected).abs());
            n += 1;
        }
    }
    outcome(
        n == 20 && worst <= 0.5,
        format!("{n} entries at p = 0.99, max |error| {worst:.4} s (tol 0.5)"),
    )
}

fn holes_reproduction() -> Outcome {
    let ctx = drilling_context();
    let cells = fatigue_cells(&ctx).unwrap();
    let mut exact = 0;
    let mut within_one = 0;
    let mut notes = Vec::new();
    for (m, vals) in HOLES {
        for (z, expected) in Z.iter().zip(vals) {
            let count = cells
                .iter()
                .filter(|c| c.arm_mass == m && c.z == *z)
                .map(|c| match c.holes {
                    HoleCount::Count(n) => n,
                    h => panic!("unexpected {h:?}"),
                })
                .min()
                .unwrap();
            if count == expected {
                exact += 1;
            } else {
                notes.push(format!("{m} kg z={z}: {count} vs printed {expected}"));
            }
            if count.abs_diff(expected) <= 1 {
                within_one += 1;
            }
        }
    }
    // Nine exact and the remaining one (3.5 kg, +2 sigma) within one hole.
    let pass = exact >= 9 && within_one == 10;
    outcome(pass, format!("{exact}/10 exact, {within_one}/10 within 1; {}", notes.join("; ")))
}

fn torque_reconstruction() -> Outcome {
    let seg = segment_params(&OperatorProfile::default()).unwrap();
    let text = std::fs::read_to_string(scenario_path("drilling_model.toml")).unwrap();
    let s = parse_scenario(&text).unwrap();
    let ctx = Context::new(&s, Path::new("."), Execution::Sequential).unwrap();
    let q = ctx.posture().unwrap();
    let t25 = ctx.joint_torques(&q, 2.5).unwrap();
    let t35 = ctx.joint_torques(&q, 3.5).unwrap();
    let (g1a, g4a, g1b, g4b) = (t25[0].abs(), t25[3].abs(), t35[0].abs(), t35[3].abs());
    let rel = |a: f64, b: f64| (a - b).abs() / b;
    let d1 = g1b - g1a;
    let d4 = g4b - g4a;
    let pass = rel(g1a, 23.043) <= 0.10
        && rel(g1b, 26.873) <= 0.10
        && rel(g4a, 7.394) <= 0.10
        && rel(g4b, 9.672) <= 0.10
        && (d1 - 3.830).abs() <= 0.01
        && (d4 - 2.278).abs() <= 0.25;
    outcome(
        pass && (seg.forearm.mass - 1.610).abs() < 5e-4,
        format!(
            "G1 {g1a:.3}/{g1b:.3} (23.043/26.873), G4 {g4a:.3}/{g4b:.3} (7.394/9.672), \
             per-kg delta shoulder {d1:.4} (3.830 +/- 0.01), elbow {d4:.4} (2.278 +/- 0.25)"
        ),
    )
}

fn strength_calibration() -> Outcome {
    let m = StrengthModel::default();
    let s = m.strength(Joint::Shoulder, 30.0, 90.0, Gender::Male).unwrap();
    let e = m.strength(Joint::Elbow, 30.0, 90.0, Gender::Male).unwrap();
    let rel = |a: f64, b: f64| (a - b).abs() / b;
    let pass = rel(s.mean, 75.620) <= 0.02
        && rel(e.mean, 75.141) <= 0.02
        && rel(s.sigma, 17.476) <= 0.06
        && rel(e.sigma, 18.470) <= 0.06;
    outcome(
        pass,
        format!(
            "at (30, 90): shoulder {:.3} +/- {:.3}, elbow {:.3} +/- {:.3}",
            s.mean, s.sigma, e.mean, e.sigma
        ),
    )
}

fn optimization_shape() -> Outcome {
    let (s, base) = load_scenario(Path::new(&scenario_path("sweep.toml"))).unwrap();
    let ctx = Context::new(&s, &base, Execution::Parallel).unwrap();
    let sweep = ctx.sweep().unwrap().unwrap();
    let c = &sweep.candidates;
    let d11 = c[sweep.argmin].distance;
    let i10 = sweep.argmin_for(1.0, 0.0).unwrap();
    let i01 = sweep.argmin_for(0.0, 1.0).unwrap();
    let (d10, d01) = (c[i10].distance, c[i01].distance);
    let on_front = sweep.pareto.contains(&i10) && sweep.pareto.contains(&i01) && sweep.pareto.contains(&sweep.argmin);
    let bracket = (d10.min(d01) <= d11 && d11 <= d10.max(d01)) && on_front;
    let pairs = (c.len() - 1) as f64;
    let elbow_trend = c.windows(2).filter(|w| w[1].elbow_discomfort <= w[0].elbow_discomfort).count() as f64 / pairs;
    let shoulder_trend =
        c.windows(2).filter(|w| w[1].shoulder_discomfort >= w[0].shoulder_discomfort).count() as f64 / pairs;
    let argmin_ok = (d11 - 0.53).abs() <= 0.03 + 1e-9;
    let trends_ok = elbow_trend >= 0.9 && shoulder_trend >= 0.9;
    outcome(
        argmin_ok && bracket && trends_ok,
        format!(
            "argmin(1,1) d = {d11:.3} m (0.53 +/- 0.03: {}), argmin(1,0) d = {d10:.3}, argmin(0,1) d = {d01:.3} \
             (bracketing on Pareto set: {}), elbow trend {:.0}%, shoulder trend {:.0}% (>= 90%: {})",
            pf(argmin_ok),
            pf(bracket),
            100.0 * elbow_trend,
            100.0 * shoulder_trend,
            pf(trends_ok)
        ),
    )
}

fn pf(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "FAIL"
    }
}

fn property_suites() -> Outcome {
    let start = Instant::now();
    let p = FatigueParams::default();
    let mut notes = Vec::new();
    let mut ok = true;

    // Closed form against RK4 over the strength and load ranges in use.
    let mut rk4_worst = 0.0f64;
    for gmax in [37.0, 40.668, 75.141, 75.620, 110.572, 112.081] {
        for load in [7.394, 9.672, 23.043, 26.873] {
            let path = integrate_load_profile(gmax, gmax, |t| if t < 0.5 { load } else { 0.0 }, 1.0, 1e-3, &p).unwrap();
            for &(t, g) in path.iter().step_by(50) {
                let exact = if t <= 0.5 {
                    capacity_under_load(gmax, gmax, load, t, &p).unwrap()
                } else {
                    let g0 = capacity_under_load(gmax, gmax, load, 0.5, &p).unwrap();
                    recover_capacity(gmax, g0, t - 0.5, &p).unwrap()
                };
                rk4_worst = rk4_worst.max((g - exact).abs() / exact);
            }
        }
    }
    ok &= rk4_worst <= 1e-6;
    notes.push(format!("rk4 rel {rk4_worst:.1e}"));

    // Inversion identities.
    let mut inv_worst = 0.0f64;
    for gmax in [40.668, 75.620, 110.572] {
        for load in [7.394, 26.873] {
            let t = endurance_time(gmax, load, &p).unwrap().minutes().unwrap();
            let g = capacity_under_load(gmax, gmax, load, t, &p).unwrap();
            inv_worst = inv_worst.max((g - load).abs() / load);
            let g0 = capacity_under_load(gmax, gmax, load, 0.5, &p).unwrap();
            for frac in [0.5, 0.9, 0.99] {
                let tr = recovery_time_to_fraction(gmax, g0, frac, &p).unwrap();
                let back = recover_capacity(gmax, g0, tr, &p).unwrap();
                let target = (frac * gmax).max(g0);
                inv_worst = inv_worst.max((back - target).abs() / target);
            }
        }
    }
    ok &= inv_worst <= 1e-9;
    notes.push(format!("inversion rel {inv_worst:.1e}"));

    // Moment-sum oracle on random postures.
    let seg = segment_params(&OperatorProfile::default()).unwrap();
    let chain = ArmChain::right_arm(seg.upper_arm.length, seg.forearm.length).unwrap();
    let links = link_inertias(&chain, &seg);
    let mut rng = StdRng::seed_from_u64(7);
    let mut torque_worst = 0.0f64;
    for _ in 0..1000 {
        let mut q = [0.0; JOINTS];
        for (j, v) in q.iter_mut().enumerate() {
            let (lo, hi) = chain.limits[j];
            *v = rng.random_range(lo..=hi);
        }
        let point = Vector3::new(rng.random_range(-0.1..0.1), rng.random_range(-0.1..0.1), rng.random_range(0.0..0.2));
        let force = Vector3::new(rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0));
        let wrenches = [
            ExternalWrench::weight(rng.random_range(0.0..5.0), Vector3::new(0.0, 0.0, 0.02), GRAVITY, "machine"),
            ExternalWrench::new(point, force, "push"),
        ];
        let tau = static_joint_torques(&chain, &q, &links, &wrenches, GRAVITY).unwrap();
        let pose = forward_kinematics_unchecked(&chain, &q);
        let at = |frame: usize, c: Vector3<f64>| {
            let v = pose.frames[frame] * Vector4::new(c.x, c.y, c.z, 1.0);
            Vector3::new(v.x, v.y, v.z)
        };
        let g = Vector3::new(0.0, 0.0, -GRAVITY);
        let upper = (at(2, links[2].com), links[2].mass * g);
        let mut distal = vec![(at(4, links[4].com), links[4].mass * g)];
        for w in &wrenches {
            distal.push((pose.hand_point(&Vector3::from(w.point)), Vector3::from(w.force)));
        }
        for j in 0..JOINTS {
            let (o, z) = (pose.origin(j), pose.axis(j));
            let moment = |(p, f): &(Vector3<f64>, Vector3<f64>)| -(p - o).cross(f).dot(&z);
            let mut oracle: f64 = distal.iter().map(moment).sum();
            if j <= 2 {
                oracle += moment(&upper);
            }
            torque_worst = torque_worst.max((tau[j] - oracle).abs());
        }
    }
    ok &= torque_worst <= 1e-9;
    notes.push(format!("torque oracle 1000 postures max {torque_worst:.1e} N*m"));

    // Scale invariance and monotonicity.
    let mut scale_ok = true;
    for c in [0.5, 3.0, 17.0] {
        let a = endurance_time(75.620, 23.043, &p).unwrap().minutes().unwrap();
        let b = endurance_time(c * 75.620, c * 23.043, &p).unwrap().minutes().unwrap();
        let ua = fatigue_index(75.620, 23.043, 0.5, &p, IndexMode::Table).unwrap();
        let ub = fatigue_index(c * 75.620, c * 23.043, 0.5, &p, IndexMode::Table).unwrap();
        scale_ok &= (a - b).abs() <= 1e-12 * a && (ua - ub).abs() <= 1e-12 * ua;
    }
    let loads: Vec<f64> = (1..50).map(|i| i as f64).collect();
    let ts: Vec<f64> = loads.iter().map(|l| endurance_time(60.0, *l, &p).unwrap().minutes().unwrap()).collect();
    scale_ok &= ts.windows(2).all(|w| w[1] < w[0]);
    let gs: Vec<f64> = (0..50).map(|i| 30.0 + i as f64).collect();
    let ts: Vec<f64> = gs.iter().map(|g| endurance_time(*g, 25.0, &p).unwrap().minutes().unwrap()).collect();
    scale_ok &= ts.windows(2).all(|w| w[1] > w[0]);
    ok &= scale_ok;
    notes.push(format!("scaling/monotonicity {}", pf(scale_ok)));

    // Scenario round trip.
    let mut rt_ok = true;
    for name in ["drilling.toml", "drilling_model.toml", "sweep.toml"] {
        let text = std::fs::read_to_string(scenario_path(name)).unwrap();
        let s = parse_scenario(&text).unwrap();
        rt_ok &= parse_scenario(&s.to_toml().unwrap()).unwrap() == s;
    }
    ok &= rt_ok;
    notes.push(format!("scenario round trip {}", pf(rt_ok)));

    let elapsed = start.elapsed().as_secs_f64();
    ok &= elapsed < 30.0;
    notes.push(format!("{elapsed:.2} s"));
    outcome(ok, notes.join(", "))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("endurance times", endurance_reproduction),
        ("fatigue indices", index_reproduction),
        ("recovery times", recovery_reproduction),
        ("hole counts", holes_reproduction),
        ("torque reconstruction", torque_reconstruction),
        ("strength calibration", strength_calibration),
        ("optimization shape", optimization_shape),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let r = check();
        if !r.pass {
            failed += 1;
        }
        println!("criterion {} {name}: {} - {}", i + 1, if r.pass { "PASS" } else { "FAIL" }, r.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
