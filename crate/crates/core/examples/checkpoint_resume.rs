// Saving the state after every prime and picking a run up again.

use ratrecon::cli::suites::var_names;
use ratrecon::driver::{reconstruct, ExpressionBlackBox, RunConfig};
use ratrecon::parser::parse;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let state = dir.path().join("state.json");
    let src = "z1^3/(z2 - 98765432109876543210/3); (z1+z2)^4;";
    let bb = ExpressionBlackBox::new(2, parse(src, &var_names(2))?);

    let first = RunConfig {
        save_state: Some(state.clone()),
        ..RunConfig::default()
    };
    let (a, rep) = reconstruct(&bb, &first)?;
    println!("first run: {} probes, state {} bytes", rep.total_probes, std::fs::metadata(&state)?.len());

    let again = RunConfig {
        resume: Some(state),
        ..RunConfig::default()
    };
    let (b, _) = reconstruct(&bb, &again)?;
    assert_eq!(a, b);
    for f in &b {
        println!("{}", f.to_text(&var_names(2)));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
