// Inserting a replacement table into an expression of integrals and
// interpolating the coefficients of the masters that remain.

use std::fs;

use ratrecon::cli::insert::{interpolate_masters, master_coefficients, prepare, InsertConfig};
use ratrecon::driver::RunConfig;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let root = dir.path();
    fs::create_dir_all(root.join("config"))?;
    fs::create_dir_all(root.join("replacements"))?;
    fs::write(root.join("config/vars"), "s\nt\nd\n")?;
    fs::write(root.join("config/functions"), "F1\n")?;
    fs::write(root.join("config/skip_functions"), "F1[0,0,0,1]\n")?;
    fs::write(
        root.join("replacements/table"),
        "{F1[1,0,1,-2] -> F1[1,1,1,1]*2 + F1[0,0,0,1]*s,\n F1[1,1,0,0] -> F1[1,1,1,1]*(d-4)/(s+t)}\n",
    )?;
    fs::write(
        root.join("amplitude"),
        "F1[1,0,1,-2]*(s+t+d)/42 + F1[1,1,1,1]*(d-3) + F1[1,1,0,0]*(s+t)\n",
    )?;

    let cfg = InsertConfig::load(&root.join("config"))?;
    for (name, expr) in prepare(&cfg, &root.join("replacements"), &root.join("amplitude"), false)? {
        let masters = master_coefficients(&cfg, &expr);
        print!("out_{name}:\n{}", interpolate_masters(&cfg, &masters, &RunConfig::default(), None)?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
