use kpzlab_core::fmt17;
use kpzlab_core::verify::{verify, Budget, Condition, Tier, VerifyReport};
use serde_json::json;

use crate::args::{Format, VerifyArgs};
use crate::output::{text_csv, Report};

fn csv(report: &VerifyReport) -> String {
    let rows = report.criteria.iter().flat_map(|c| {
        c.checks.iter().map(move |check| {
            let (target, tolerance) = match check.condition {
                Condition::Within { target, tolerance } => (fmt17(target), fmt17(tolerance)),
                Condition::AtLeast { bound } => (fmt17(bound), String::new()),
            };
            vec![
                c.id.to_string(),
                c.title.clone(),
                check.label.clone(),
                fmt17(check.value),
                target,
                tolerance,
                check.passed.to_string(),
            ]
        })
    });
    text_csv(&["criterion", "title", "check", "value", "target", "tolerance", "passed"], rows)
}

/// Runs the selected criteria; the caller turns a failing report into exit code 3.
pub fn run(args: &VerifyArgs, seed: u64) -> (Report, bool) {
    let tier = Tier::from(args.tier);
    let budget = Budget::from(args.budget);
    let report = verify(tier, budget, seed);
    let passed = report.all_passed();
    let verdicts = report.criteria.iter().filter(|c| c.passed).count();
    let mut text = report.table();
    text.push_str(&format!("{verdicts}/{} criteria pass\n", report.criteria.len()));
    let parameters = json!({ "tier": tier, "budget": budget, "seed": seed });
    let monte_carlo = report.criteria.iter().any(|c| c.monte_carlo);
    let json = json!({ "passed": passed, "report": report, "parameters": parameters });
    let report = Report {
        command: format!("verify {}", json["parameters"]["tier"].as_str().unwrap_or_default()),
        seeds: if monte_carlo { vec![seed] } else { Vec::new() },
        parameters,
        csv: csv(&report),
        json,
        default_format: Format::Json,
        text: Some(text),
    };
    (report, passed)
}
