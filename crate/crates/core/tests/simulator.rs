use pmn_core::controller::{Controller, ControllerParams, ControllerRegistry};
use pmn_core::model::{Edge, Target, TargetGraph};
use pmn_core::sim::{
    simulate, write_trace, AgentStart, EventKind, Form, NoiseConfig, NoiseModel, SimConfig, SimulationResult,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn target(id: u32, x: f64, r0: f64) -> Target {
    Target { id, position: [x, 0.0], a: 1.0, b: 10.0, r0 }
}

fn both(edges: &mut Vec<Edge>, i: usize, j: usize, rho: f64) {
    edges.push(Edge { from: i, to: j, rho, length: rho * 50.0, speed: 50.0 });
    edges.push(Edge { from: j, to: i, rho, length: rho * 50.0, speed: 50.0 });
}

fn line(rhos: &[f64]) -> TargetGraph {
    let mut x = 0.0;
    let mut targets = vec![target(1, 0.0, 0.5)];
    let mut edges = Vec::new();
    for (k, &rho) in rhos.iter().enumerate() {
        x += rho * 50.0;
        targets.push(target(k as u32 + 2, x, 0.5));
        both(&mut edges, k, k + 1, rho);
    }
    TargetGraph::new(targets, edges).unwrap()
}

fn controllers(name: &str, n: usize) -> Vec<Box<dyn Controller>> {
    let reg = ControllerRegistry::default();
    (0..n).map(|_| reg.build(name, &ControllerParams::default()).unwrap()).collect()
}

fn starts(targets: &[usize]) -> Vec<AgentStart> {
    targets.iter().enumerate().map(|(a, &t)| AgentStart { id: a as u32 + 1, target: t }).collect()
}

/// Forward-Euler integral of every target's uncertainty, driven only by the visit log.
fn dense_objective(g: &TargetGraph, res: &SimulationResult, dt: f64) -> f64 {
    let steps = (res.t_end / dt).round() as usize;
    let mut total = 0.0;
    for t in g.targets() {
        let stays: Vec<(f64, f64)> = res
            .visits
            .iter()
            .filter(|v| v.target == t.id)
            .map(|v| (v.arrive, v.depart.unwrap_or(f64::INFINITY)))
            .collect();
        let mut r = t.r0;
        let mut acc = 0.0;
        for k in 0..steps {
            let mid = (k as f64 + 0.5) * dt;
            let n = stays.iter().filter(|&&(a, d)| a <= mid && mid < d).count() as f64;
            let next = (r + (t.a - t.b * n) * dt).max(0.0);
            acc += 0.5 * (r + next) * dt;
            r = next;
        }
        total += acc;
    }
    total / res.t_end
}

#[test]
fn zero_agents_grow_linearly() {
    let g = TargetGraph::new(vec![target(1, 0.0, 0.5)], vec![]).unwrap();
    let res = simulate(&g, &[], vec![], &SimConfig::new(500.0, 250.0)).unwrap();
    assert!((res.j_t - 250.5).abs() < 1e-9);
    assert!(res.events.is_empty());
}

#[test]
fn single_agent_on_two_targets_matches_dense_integral() {
    let g = line(&[2.0]);
    let res = simulate(&g, &starts(&[0]), controllers("rhc", 1), &SimConfig::new(100.0, 50.0)).unwrap();
    let dense = dense_objective(&g, &res, 1e-4);
    assert!((res.j_t - dense).abs() <= 1e-3 * dense, "{} vs {dense}", res.j_t);
    assert!(res.visits.len() > 10);
    let seq = res.visit_sequence(1);
    assert!(seq.windows(2).all(|w| w[0] != w[1]));
}

#[test]
fn dwells_end_at_crossing_or_planned_time() {
    let g = line(&[2.0]);
    let res = simulate(&g, &starts(&[0]), controllers("rhc", 1), &SimConfig::new(100.0, 50.0)).unwrap();
    for e in res.events.iter().filter(|e| e.kind == EventKind::ActiveEnd || e.kind == EventKind::IdleEnd) {
        let planned = res.decisions.iter().any(|d| {
            let end = match d.form {
                Form::Active => d.time + d.u_i,
                Form::Idle => d.time + d.v_i,
                Form::Departure => return false,
            };
            d.agent == e.agent.unwrap() && (end - e.time).abs() < 1e-9
        });
        assert!(planned, "unplanned dwell end at {}", e.time);
    }
}

#[test]
fn breakpoints_replay_from_visits() {
    let g = line(&[2.0, 3.0, 1.5]);
    let cfg = SimConfig {
        noise: NoiseConfig { model: NoiseModel::Channel, m: 2.0, ..Default::default() },
        ..SimConfig::new(200.0, 100.0)
    };
    let res = simulate(&g, &starts(&[0, 3]), controllers("rhc", 2), &cfg).unwrap();
    for (i, t) in g.targets().iter().enumerate() {
        let pts = &res.breakpoints[i];
        let stays: Vec<(f64, f64)> = res
            .visits
            .iter()
            .filter(|v| v.target == t.id)
            .map(|v| (v.arrive, v.depart.unwrap_or(f64::INFINITY)))
            .collect();
        for w in pts.windows(2) {
            let ((t0, r0), (t1, r1)) = (w[0], w[1]);
            if t1 == t0 {
                continue;
            }
            let mid = 0.5 * (t0 + t1);
            let n = stays.iter().filter(|&&(a, d)| a <= mid && mid < d).count() as f64;
            let slope = if r0 <= 1e-12 && t.a - t.b * n < 0.0 { 0.0 } else { t.a - t.b * n };
            let expect = (r0 + slope * (t1 - t0)).max(0.0);
            assert!((expect - r1).abs() < 1e-9 * (1.0 + r1), "target {} at {t1}: {expect} vs {r1}", t.id);
        }
    }
}

#[test]
fn commitment_removes_target_from_other_agents() {
    // 1 - 2 - 3 with agents at 1 and 3: once one commits to 2, the other must not pick it.
    let g = line(&[1.0, 1.0]);
    let res = simulate(&g, &starts(&[0, 2]), controllers("rhc", 2), &SimConfig::new(60.0, 30.0)).unwrap();
    let k = res.decisions.iter().position(|d| d.transit.is_some()).expect("someone commits");
    let commit = &res.decisions[k];
    let j = commit.next.unwrap();
    let later: Vec<_> = res.decisions[k + 1..]
        .iter()
        .take_while(|d| d.time < commit.time + commit.transit.unwrap())
        .filter(|d| d.agent != commit.agent)
        .collect();
    assert!(!later.is_empty());
    for d in later {
        assert!(!d.candidates.contains(&j), "{d:?}");
    }
    assert_eq!(res.max_dwelling, 1);
    assert_eq!(res.max_committed, 1);
}

#[test]
fn runs_are_reproducible() {
    let g = line(&[2.0, 3.0, 1.5]);
    let cfg = SimConfig {
        seed: 11,
        noise: NoiseConfig { model: NoiseModel::StateShock, m: 5.0, lambda: 25.0, ..Default::default() },
        ..SimConfig::new(300.0, 150.0)
    };
    let trace = || {
        let res = simulate(&g, &starts(&[0, 2]), controllers("ex_rhc_alpha_beta", 2), &cfg).unwrap();
        let mut out = Vec::new();
        write_trace(&res, &mut out).unwrap();
        out
    };
    let a = trace();
    assert_eq!(a, trace());
    assert!(String::from_utf8(a).unwrap().starts_with("time,kind,agent,target,R_1,R_2,R_3,R_4\n"));
}

#[test]
fn speed_noise_scales_committed_transit() {
    let g = line(&[2.0]);
    let m = 0.5;
    let seed = 4;
    let cfg = SimConfig {
        seed,
        noise: NoiseConfig { model: NoiseModel::Speed, m, ..Default::default() },
        ..SimConfig::new(50.0, 25.0)
    };
    let res = simulate(&g, &starts(&[0]), controllers("rhc", 1), &cfg).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((2u64 << 32) | 1);
    let committed: Vec<f64> = res.decisions.iter().filter_map(|d| d.transit).collect();
    assert!(committed.len() > 3);
    for rho in committed {
        let zeta: f64 = 1.0 - m + 2.0 * m * rng.random::<f64>();
        assert!((rho - 100.0 / (50.0 * zeta.max(0.05))).abs() < 1e-12);
    }
}

#[test]
fn shocks_clamp_at_zero() {
    let g = line(&[2.0]);
    let cfg = SimConfig {
        seed: 2,
        noise: NoiseConfig { model: NoiseModel::StateShock, m: 50.0, lambda: 5.0, ..Default::default() },
        ..SimConfig::new(100.0, 50.0)
    };
    let res = simulate(&g, &starts(&[0]), controllers("rhc", 1), &cfg).unwrap();
    let shocks = res.events.iter().filter(|e| e.kind == EventKind::NoiseShock).count();
    assert!(shocks > 10);
    assert!(res.breakpoints.iter().flatten().all(|&(_, r)| r >= 0.0));
    assert!(res.breakpoints.iter().flatten().any(|&(t, r)| r == 0.0 && t > 0.0));
}

#[test]
fn zero_magnitude_noise_is_noiseless() {
    let g = line(&[2.0, 3.0]);
    let base = simulate(&g, &starts(&[1]), controllers("rhc", 1), &SimConfig::new(100.0, 50.0)).unwrap();
    for model in
        [NoiseModel::GrowthRate, NoiseModel::Speed, NoiseModel::Location, NoiseModel::StateShock, NoiseModel::Channel]
    {
        let cfg =
            SimConfig { noise: NoiseConfig { model, m: 0.0, ..Default::default() }, ..SimConfig::new(100.0, 50.0) };
        let res = simulate(&g, &starts(&[1]), controllers("rhc", 1), &cfg).unwrap();
        assert_eq!(res.events, base.events, "{model:?}");
    }
}

#[test]
fn every_noise_model_runs() {
    let g = line(&[2.0, 3.0, 1.5]);
    for (model, m) in [
        (NoiseModel::GrowthRate, 2.0),
        (NoiseModel::Speed, 0.6),
        (NoiseModel::Location, 3.0),
        (NoiseModel::StateShock, 10.0),
        (NoiseModel::Channel, 8.0),
    ] {
        let cfg = SimConfig {
            seed: 9,
            noise: NoiseConfig { model, m, ..Default::default() },
            ..SimConfig::new(200.0, 100.0)
        };
        let res = simulate(&g, &starts(&[0, 3]), controllers("rhc_alpha", 2), &cfg).unwrap();
        assert!(res.j_t.is_finite() && res.j_t > 0.0, "{model:?}");
        assert!(res.visits.len() > 4, "{model:?}");
        assert_eq!(res.max_committed, 1, "{model:?}");
    }
}

#[test]
fn colocated_agents_split_the_neighborhood() {
    let g = line(&[1.0, 1.0]);
    let res = simulate(&g, &starts(&[1, 1]), controllers("rhc", 2), &SimConfig::new(20.0, 10.0)).unwrap();
    let first: Vec<_> = res.decisions.iter().filter(|d| d.time == 0.0).collect();
    assert_eq!(first.iter().find(|d| d.agent == 1).unwrap().candidates, vec![1]);
    assert_eq!(first.iter().find(|d| d.agent == 2).unwrap().candidates, vec![3]);
}

#[test]
fn event_storm_guard_fires() {
    let g = line(&[2.0]);
    let cfg = SimConfig { max_events: 5, ..SimConfig::new(100.0, 50.0) };
    let err = simulate(&g, &starts(&[0]), controllers("rhc", 1), &cfg).unwrap_err();
    assert!(matches!(err, pmn_core::sim::SimError::Zeno { limit: 5, .. }));
}

#[test]
fn planned_horizons_respect_the_bound() {
    let g = line(&[2.0, 3.0, 1.5]);
    for name in ["rhc", "rhc_alpha", "ex_rhc_alpha_beta"] {
        let res = simulate(&g, &starts(&[0, 3]), controllers(name, 2), &SimConfig::new(200.0, 20.0)).unwrap();
        for d in res.decisions.iter().filter(|d| d.next.is_some()) {
            assert!(d.w <= d.horizon + 1e-9, "{name}: {d:?}");
        }
    }
}
