//! Runs every shipped scenario and prints one verdict per acceptance criterion.

use hypflow_cli::{run_scenario, ScenarioConfig, ScenarioKind, Summary};
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

const CRITERIA: [(u8, &str); 10] = [
    (1, "harmonic maps are stationary under heat flow"),
    (2, "LL energy dissipation identity"),
    (3, "LL flow converges to the heat-flow limit of its data"),
    (4, "heat towers along one LL run share their limit"),
    (5, "gauge identities and the LL tension field"),
    (6, "two routes to the connection coefficients agree"),
    (7, "maximum-principle decay of the heat velocity"),
    (8, "heat semigroup smoothing diagnostics"),
    (9, "damped wave scheme approaches LL as delta shrinks"),
    (10, "time integrals of the velocity are Cauchy"),
];

fn run(kind: ScenarioKind, root: &Path) -> (ScenarioKind, Result<Summary, String>, f64) {
    let start = Instant::now();
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let result = ScenarioConfig::from_path(&configs.join(format!("{}.json", kind.name())))
        .map_err(|e| e.to_string())
        .and_then(|cfg| run_scenario(&cfg, Some(&root.join(kind.name()))).map_err(|e| e.to_string()));
    (kind, result, start.elapsed().as_secs_f64())
}

fn main() -> ExitCode {
    // Ignore libtest-style arguments such as `--nocapture` or filters.
    let root = tempfile::tempdir().expect("temporary output directory");
    let results: Vec<_> = std::thread::scope(|scope| {
        let handles: Vec<_> = ScenarioKind::ALL
            .into_iter()
            .map(|k| {
                let dir = root.path();
                scope.spawn(move || run(k, dir))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("scenario thread")).collect()
    });

    for (kind, result, secs) in &results {
        let state = match result {
            Ok(s) if s.passed => "ok",
            Ok(_) => "failed properties",
            Err(_) => "error",
        };
        println!("scenario {:<16} {:>7.1} s  {state}", kind.name(), secs);
    }
    println!();

    let mut all = true;
    for (c, title) in CRITERIA {
        let mut lines = Vec::new();
        let mut pass = true;
        let mut covered = false;
        for (kind, result, _) in &results {
            if !kind.criteria().contains(&c) {
                continue;
            }
            covered = true;
            match result {
                Ok(sum) => {
                    for p in sum.properties.iter().filter(|p| p.criterion == c) {
                        pass &= p.pass;
                        lines.push(format!("    [{}] {}", kind.name(), p.line()));
                    }
                }
                Err(e) => {
                    pass = false;
                    lines.push(format!("    [{}] error: {e}", kind.name()));
                }
            }
        }
        pass &= covered && !lines.is_empty();
        all &= pass;
        println!("criterion {c}: {} ({title})", if pass { "PASS" } else { "FAIL" });
        for l in lines {
            println!("{l}");
        }
    }
    println!();
    println!("acceptance: {}", if all { "all criteria pass" } else { "some criteria fail" });
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
