// A master and two workers in one process, talking over loopback TCP.

use std::net::TcpListener;
use std::thread;

use ratrecon::cli::suites::var_names;
use ratrecon::distributed::{run_master, run_worker, MasterOptions, WorkerOptions};
use ratrecon::driver::{reconstruct, ExpressionBlackBox, RunConfig};
use ratrecon::parser::parse;

const SRC: &str = "(z1^2 - 3*z2*z3)/(z1 + z2^2 + 5); (z1 - 1)*(z3 + 2)^3;";

fn black_box() -> ExpressionBlackBox {
    ExpressionBlackBox::new(3, parse(SRC, &var_names(3)).unwrap())
}

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let listener = TcpListener::bind("127.0.0.1:0")?;
    let addr = listener.local_addr()?.to_string();
    let workers: Vec<_> = (0..2)
        .map(|_| {
            let addr = addr.clone();
            thread::spawn(move || run_worker(&black_box(), &addr, &WorkerOptions::default()).map(|s| s.requests))
        })
        .collect();
    let cfg = RunConfig {
        max_bunch_size: 8,
        ..RunConfig::default()
    };
    let opts = MasterOptions {
        min_workers: 2,
        ..MasterOptions::default()
    };
    let (fs, rep) = run_master(&black_box(), &cfg, listener, &opts)?;
    for w in workers {
        println!("worker served {} requests", w.join().unwrap()?);
    }
    let (local, _) = reconstruct(&black_box(), &cfg)?;
    assert_eq!(fs, local);
    for f in &fs {
        println!("{}", f.to_text(&var_names(3)));
    }
    println!("{} probes", rep.total_probes);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
