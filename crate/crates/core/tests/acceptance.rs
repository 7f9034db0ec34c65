//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs with `harness = false`.

use std::process::ExitCode;
use std::time::Instant;

use mechlab::characterization::{
    conjecture1_predicate, lower_bound_experiment, lp_residuals, median_fits_conjecture_scan,
    normalized_residual, orthogonality_residual, residual_via_finite_difference,
};
use mechlab::geometry::center_two_agent;
use mechlab::harness::{generate_profiles, median_counterexample, run_campaign, CampaignConfig};
use mechlab::mechanisms::eval_general_median;
use mechlab::properties::{
    check_output_at_agent_1d, check_strategyproofness, run_check, CheckConfig, Property, Verdict,
};
use mechlab::{MechanismSpec, Point, SpaceConfig};

type Outcome = Result<String, String>;
type Criterion = (&'static str, &'static str, fn() -> Outcome);

fn spec(s: &str) -> MechanismSpec {
    s.parse().expect("catalog spec")
}

fn e(m: usize) -> SpaceConfig {
    SpaceConfig::euclidean(m).expect("valid space")
}

fn cfg(num_profiles: usize) -> CheckConfig {
    CheckConfig { num_profiles, ..CheckConfig::default() }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Two-agent strategyproof mechanisms defined on `m`.
fn two_agent_catalog(m: usize) -> Vec<MechanismSpec> {
    let mut v = vec![spec("dictator:0"), spec("dictator:1"), spec("median")];
    if m == 2 {
        v.extend(
            [
                "c1:1,1", "c1:1,0", "c1:0,1", "c1:0,0", "c2:1", "c2:-1", "c2:0.5", "c2:2", "c3:1", "c3:-1",
                "c3:0.5", "c3:2",
            ]
            .map(spec),
        );
    }
    v
}

fn ac1() -> Outcome {
    let mut runs: Vec<(MechanismSpec, usize, Option<usize>)> = vec![(spec("dictator:0"), 2, None)];
    for n in [2, 3, 5] {
        for m in [1, 2, 3] {
            runs.push((spec("median"), m, Some(n)));
        }
    }
    for s in ["c1:1,1", "c1:1,0", "c1:0,1", "c1:0,0"] {
        runs.push((spec(s), 2, None));
    }
    for u in ["1", "-1", "0.5", "2"] {
        runs.push((spec(&format!("c2:{u}")), 2, None));
        runs.push((spec(&format!("c3:{u}")), 2, None));
    }
    for (mech, m, agents) in &runs {
        let c = CheckConfig { agents: *agents, ..cfg(10_000) };
        let r = check_strategyproofness(mech, &e(*m), &c).map_err(|e| e.to_string())?;
        ensure(r.verdict == Verdict::Pass, || {
            format!("{mech} (m={m}, n={agents:?}) manipulable: {:?}", r.witness)
        })?;
    }
    Ok(format!("{} configurations x 10^4 profiles, no witnesses", runs.len()))
}

fn ac2() -> Outcome {
    let space = e(2);
    let r = check_strategyproofness(&spec("midpoint"), &space, &cfg(100)).map_err(|e| e.to_string())?;
    ensure(r.verdict == Verdict::Fail, || "midpoint passed".into())?;
    let w = r.witness.as_ref().ok_or("no witness")?;
    let recorded = w.detail.magnitude();
    let replayed = r.replay(&space).map_err(|e| e.to_string())?.ok_or("no replay")?;
    ensure(replayed >= 0.1 && (replayed - recorded).abs() <= 1e-12, || {
        format!("gain recorded {recorded}, replayed {replayed}")
    })?;
    Ok(format!("violation at trial {}, replayed gain {replayed:.6}", r.trials))
}

fn ac3() -> Outcome {
    let mut checked = 0;
    let mut midpoint_min = f64::INFINITY;
    for m in [2, 3] {
        let space = e(m);
        let profiles: Vec<_> = generate_profiles(&space, 2, &cfg(10_000))
            .filter(|p| p.agent(0) != p.agent(1))
            .take(10_000)
            .collect();
        for p in &profiles {
            let (a, b) = (p.agent(0), p.agent(1));
            for mech in two_agent_catalog(m) {
                let w = mech.evaluate(p, &space).map_err(|e| e.to_string())?;
                let raw = orthogonality_residual(a, b, &w).map_err(|e| e.to_string())?;
                let r = normalized_residual(raw, a, b, &space).map_err(|e| e.to_string())?;
                ensure(r.abs() <= 1e-9, || format!("{mech} on {p:?}: normalized residual {r:e}"))?;
                checked += 1;
            }
            let w = spec("midpoint").evaluate(p, &space).map_err(|e| e.to_string())?;
            let raw = orthogonality_residual(a, b, &w).map_err(|e| e.to_string())?;
            let r = normalized_residual(raw, a, b, &space).map_err(|e| e.to_string())?.abs();
            ensure(r >= 0.125, || format!("midpoint on {p:?}: normalized residual {r}"))?;
            midpoint_min = midpoint_min.min(r);
        }
    }
    Ok(format!("{checked} outputs on the diameter sphere; midpoint residual >= {midpoint_min}"))
}

fn kinked(a: &Point, b: &Point, w: &Point) -> bool {
    let (x, y) = center_two_agent(a, b, w).expect("same dimension");
    x.coords().iter().zip(y.coords()).any(|(x, y)| (x - y).abs() < 1e-3 || (x + y).abs() < 1e-3)
}

fn ac4() -> Outcome {
    let mut worst_fd: f64 = 0.0;
    for (k, p) in [1.5, 3.0, 4.0].into_iter().enumerate() {
        let mut accepted = 0;
        let mut stream = generate_profiles(&e(3), 3, &CheckConfig { seed: 100 + k as u64, ..cfg(1) });
        while accepted < 1000 {
            let prof = stream.next().ok_or("stream ended")?;
            let m = accepted % 3 + 1;
            let cut = |i: usize| Point::new(prof.agent(i).coords()[..m].to_vec()).expect("finite");
            let (a, b, w) = (cut(0), cut(1), cut(2));
            if kinked(&a, &b, &w) {
                continue;
            }
            let space = SpaceConfig::new(m, p).map_err(|e| e.to_string())?;
            let exact = lp_residuals(&a, &b, &w, &space).map_err(|e| e.to_string())?;
            let fd = residual_via_finite_difference(&a, &b, &w, &space).map_err(|e| e.to_string())?;
            let err = (exact.r_g - fd.r_g).abs().max((exact.r_h - fd.r_h).abs());
            ensure(err <= 1e-5, || format!("p={p} ({a}, {b}, {w}): {exact:?} vs {fd:?}"))?;
            worst_fd = worst_fd.max(err);
            accepted += 1;
        }
    }
    let mut worst_p2: f64 = 0.0;
    let mut stream = generate_profiles(&e(3), 3, &CheckConfig { seed: 7, ..cfg(1) });
    for i in 0..1000 {
        let prof = stream.next().ok_or("stream ended")?;
        let m = i % 3 + 1;
        let cut = |j: usize| Point::new(prof.agent(j).coords()[..m].to_vec()).expect("finite");
        let (a, b, w) = (cut(0), cut(1), cut(2));
        let o = orthogonality_residual(&a, &b, &w).map_err(|e| e.to_string())?;
        let r = lp_residuals(&a, &b, &w, &e(m)).map_err(|e| e.to_string())?;
        let err = (r.r_g + o).abs().max((r.r_h + o).abs());
        ensure(err <= 1e-12, || format!("p=2 ({a}, {b}, {w}): {r:?} vs {}", -o))?;
        worst_p2 = worst_p2.max(err);
    }
    Ok(format!("max |closed form - finite difference| = {worst_fd:.2e}; p=2 gap {worst_p2:.1e}"))
}

fn ac5() -> Outcome {
    let c = CheckConfig { tolerance: 1e-9, ..cfg(10_000) };
    let mut runs = vec![(spec("dictator:0"), None)];
    runs.extend([2, 3, 5].map(|n| (spec("median"), Some(n))));
    for (mech, agents) in &runs {
        let r = check_output_at_agent_1d(mech, &CheckConfig { agents: *agents, ..c.clone() })
            .map_err(|e| e.to_string())?;
        ensure(r.verdict == Verdict::Pass, || format!("{mech} n={agents:?}: {:?}", r.witness))?;
    }
    let r = check_output_at_agent_1d(&spec("midpoint"), &c).map_err(|e| e.to_string())?;
    ensure(r.verdict == Verdict::Fail && r.witness.is_some(), || "midpoint stayed on agents".into())?;
    Ok(format!("{} mechanisms on agents; midpoint witness at trial {}", runs.len(), r.trials))
}

fn ac6() -> Outcome {
    let profile = median_counterexample();
    let w = eval_general_median(&profile);
    ensure(w.coords() == [0.0, 0.0, 0.0], || format!("median is {w}"))?;
    let o = conjecture1_predicate(&profile, &w).map_err(|e| e.to_string())?;
    ensure(!o.holds, || "predicate holds on the counterexample".into())?;
    let a = profile.agents();
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let d = a[i].sub(&w).dot(&a[j].sub(&w));
        ensure((d + 1.0).abs() <= 1e-12, || format!("<A{i}, A{j}> = {d}"))?;
    }
    let r = median_fits_conjecture_scan(2, &cfg(10_000)).map_err(|e| e.to_string())?;
    ensure(r.verdict == Verdict::Pass, || format!("m=2 witness {:?}", r.witness))?;
    Ok(format!("counterexample reproduced; m=2 scan clean over {} profiles", r.trials))
}

fn ac7() -> Outcome {
    let mut ratios = Vec::new();
    for s in ["dictator:0", "c1:1,1", "c2:1", "c3:1"] {
        let out = lower_bound_experiment(&spec(s), &e(2), &cfg(1000)).map_err(|e| e.to_string())?;
        ensure(out.stable(), || format!("{s}: stability broken {:?}", out.first_violation))?;
        let worst = out.worst.ok_or_else(|| format!("{s}: every output degenerate"))?;
        ensure(worst.ratio >= 1.99, || format!("{s}: ratio {}", worst.ratio))?;
        ratios.push(format!("{s} {:.4}", worst.ratio));
    }
    Ok(ratios.join(", "))
}

fn ac8() -> Outcome {
    let c = cfg(2000);
    let space = e(2);
    let catalog =
        ["dictator:0", "median", "c1:1,1", "c1:1,0", "c1:0,1", "c1:0,0", "c2:1", "c3:1", "midpoint"];
    let expect = |mech: &str, property: Property| -> Verdict {
        match (mech, property) {
            ("dictator:0", Property::Anonymity) => Verdict::Fail,
            (m, Property::RotationInvariance) if m.starts_with('c') || m == "median" => Verdict::Fail,
            _ => Verdict::Pass,
        }
    };
    let properties = [
        Property::Anonymity,
        Property::RotationInvariance,
        Property::Unanimity,
        Property::TranslationInvariance,
        Property::Scalability,
        Property::ContinuityLipschitz,
    ];
    let mut cells = 0;
    for mech in catalog {
        for property in properties {
            let r = run_check(property, &spec(mech), &space, &c).map_err(|e| e.to_string())?;
            let want = expect(mech, property);
            ensure(r.verdict == want, || format!("{mech} {property}: {} (expected {want})", r.verdict))?;
            if want == Verdict::Fail {
                let replayed = r.replay(&space).map_err(|e| e.to_string())?.ok_or("no witness")?;
                ensure(replayed > c.tolerance, || {
                    format!("{mech} {property}: witness replays to {replayed}")
                })?;
            }
            cells += 1;
        }
    }
    let r =
        run_check(Property::RotationInvariance, &spec("dictator:0"), &e(3), &c).map_err(|e| e.to_string())?;
    ensure(r.verdict == Verdict::Pass, || "dictator not rotation invariant in 3-D".into())?;
    Ok(format!("{} matrix cells as expected", cells + 1))
}

fn ac9() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("report.json");
    let mut config = CampaignConfig::catalog(e(2), CheckConfig::default());
    config.output_path = Some(path.clone());
    let mut runs = Vec::new();
    for _ in 0..2 {
        let report = run_campaign(&config).map_err(|e| e.to_string())?;
        ensure(report.as_expected(), || format!("unexpected verdicts {:?}", report.unexpected))?;
        runs.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    ensure(runs[0] == runs[1], || "report bytes differ between runs".into())?;
    Ok(format!("{} byte report reproduced", runs[0].len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("AC1", "strategyproof mechanisms resist misreports", ac1),
        ("AC2", "midpoint is manipulable with a replayable witness", ac2),
        ("AC3", "two-agent outputs lie on the diameter sphere", ac3),
        ("AC4", "L_p residuals agree with finite differences", ac4),
        ("AC5", "one-dimensional outputs sit on an agent", ac5),
        ("AC6", "three-dimensional median counterexample", ac6),
        ("AC7", "maximum-cost ratio reaches 2", ac7),
        ("AC8", "axiom matrix", ac8),
        ("AC9", "campaign reports are byte-identical", ac9),
    ];
    let mut failed = 0;
    for (id, name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("{id} PASS {name}: {detail} ({secs:.1}s)"),
            Err(why) => {
                failed += 1;
                println!("{id} FAIL {name}: {why} ({secs:.1}s)");
            }
        }
    }
    println!("{} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
