//! The JSON experiment pipeline, as used by the `meanval` binary.
//!
//! A config names an experiment kind, the function (in the expression
//! language), the measure, the renormalization and the stopping criteria.
//! Running one yields an exit code (0 converged / validated, 2 no strong
//! mean or oscillation, 3 iteration cap), a JSON report, and for mean-value
//! kinds a step-by-step history. The same seed always reproduces the same
//! bytes.

use meanval::config::{self, RunConfig};
use meanval::error::Result;

fn main() -> Result<()> {
    // A weak mean value: the function settles at 0.3 at infinity.
    let wmv = r#"{
        "kind": "wmv",
        "label": "settling-function",
        "seed": 42,
        "dim": 1,
        "function": ["0.3 + exp(-x0^2)"],
        "measure": {"type": "lebesgue"},
        "renorm": {"type": "geometric_cubes"},
        "criteria": {"eps": 1e-5, "n_max": 40}
    }"#;
    let outcome = config::run(&RunConfig::from_json(wmv)?)?;
    println!("wmv exit code: {}", outcome.exit_code);
    println!("report:\n{}\n", serde_json::to_string_pretty(&outcome.report).unwrap());

    let history = outcome.history.expect("wmv traces history");
    let mut csv = Vec::new();
    history.write_csv(&mut csv).expect("in-memory write");
    let text = String::from_utf8(csv).unwrap();
    println!("history.csv ({} rows):", history.len());
    for line in text.lines().take(4) {
        println!("  {line}");
    }
    println!("  ...\n");

    // A strong-mean check that fails honestly: sin has window-dependent
    // means, so the exit code is 2 and the families' limits are reported.
    let check = r#"{
        "kind": "mv_check",
        "seed": 1,
        "dim": 1,
        "function": ["sin(x0)"],
        "measure": {"type": "lebesgue"},
        "renorms": [{"type": "cubes"}, {"type": "halfwave_comb"}],
        "criteria": {"eps": 2e-4, "n_max": 160}
    }"#;
    let outcome = config::run(&RunConfig::from_json(check)?)?;
    println!("mv_check exit code: {} (no strong mean)", outcome.exit_code);
    println!(
        "family limits: {}",
        outcome.report["runs"]
            .as_array()
            .unwrap()
            .iter()
            .map(|r| format!("{} -> {:.5}", r["family"].as_str().unwrap(), r["value"][0].as_f64().unwrap()))
            .collect::<Vec<_>>()
            .join(", ")
    );

    // Determinism: rerunning a config bit-reproduces the history.
    let cfg = RunConfig::from_json(wmv)?;
    let (a, b) = (config::run(&cfg)?, config::run(&cfg)?);
    let dump = |o: &config::Outcome| {
        let mut v = Vec::new();
        o.history.as_ref().unwrap().write_csv(&mut v).unwrap();
        v
    };
    println!("\nsame seed, same bytes: {}", dump(&a) == dump(&b));
    Ok(())
}
