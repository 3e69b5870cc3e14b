//! One check per acceptance criterion. Every test prints a PASS or FAIL line
//! (bypassing the test harness's output capture) before asserting.

use std::collections::HashMap;
use std::io::Write;
use std::net::TcpListener;
use std::path::Path;
use std::thread;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ratrecon::cli::insert::{interpolate_masters, master_coefficients, prepare, InsertConfig};
use ratrecon::cli::result_text;
use ratrecon::cli::suites::{factor_suite, racing_suite, var_names, BenchFunction, FACTOR_EXAMPLE, HYBRID_EXAMPLE};
use ratrecon::distributed::{run_master, run_worker, MasterOptions, WorkerOptions};
use ratrecon::driver::{
    compute_bunch_size, gen_dense_poly, monomial_count, reconstruct, BlackBox, ExpressionBlackBox, PolyForm, RunConfig,
    RunReport, BUNCH_SIZES, GEN_VARS,
};
use ratrecon::factorscan::{scan_variable, scan_variable_in_field, FactorLift, FactorScanConfig};
use ratrecon::numtheory::{
    prime_sequence, rational_reconstruct_with, BigRational, FieldError, PrimeField, ReconstructionMode, PRIMES,
};
use ratrecon::parser::parse;
use ratrecon::polyinterp::{
    bot_find_degrees, gauss_solve, solve_shifted_vandermonde, BMState, DensePolyFF, RaceMode, RacerState, Status,
};
use ratrecon::ratinterp::{hybrid_racer_auto, FieldFnProbe, FnProbe, HybridConfig, RationalFunctionQ, Shift};

fn report(criterion: u32, name: &str, ok: bool, detail: &str) {
    let mut out = std::io::stdout().lock();
    let tag = if ok { "PASS" } else { "FAIL" };
    let _ = writeln!(out, "{tag} criterion {criterion:>2} ({name}): {detail}");
    let _ = out.flush();
    assert!(ok, "criterion {criterion} failed: {detail}");
}

fn black_box(src: &str, n: usize) -> ExpressionBlackBox {
    ExpressionBlackBox::new(n, parse(src, &var_names(n)).unwrap())
}

/// Compares `q` with the black box at random points modulo primes the runs
/// never reach.
fn agrees(bb: &dyn BlackBox, k: usize, q: &RationalFunctionQ) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce);
    for &p in &PRIMES[PRIMES.len() - 3..] {
        let f = PrimeField::new(p).unwrap();
        bb.prepare(f).unwrap();
        let mut hits = 0;
        while hits < 4 {
            let x: Vec<u64> = (0..bb.n_vars()).map(|_| rng.gen_range(1..p)).collect();
            if let (Ok(a), Ok(b)) = (bb.evaluate_function(f, k, &x), q.eval_ff(f, &x)) {
                if a != b {
                    return false;
                }
                hits += 1;
            }
        }
    }
    true
}

fn run_bench(f: &BenchFunction, cfg: &RunConfig) -> (usize, RunReport, bool) {
    let bb = black_box(&f.source, f.n_vars);
    let (q, rep) = reconstruct(&bb, cfg).unwrap();
    let exact = agrees(&bb, 0, &q[0]);
    (rep.total_probes, rep, exact)
}

fn no_factor_scan() -> RunConfig {
    RunConfig {
        enable_factor_scan: false,
        ..RunConfig::default()
    }
}

#[test]
fn criterion_01_ben_or_tiwari_worked_example() {
    let f = PrimeField::new(509).unwrap();
    let g = |z: u64| f.add(f.mul(z, z), 1);
    let probes: Vec<u64> = (1..=4).map(|i| g(f.pow(2, i))).collect();
    let mut bm = BMState::new(f);
    for &a in &probes {
        bm.update(a);
    }
    let aux = bm.aux_poly(0).unwrap();
    let degs = bot_find_degrees(&aux, 2, 16);
    let coefs = solve_shifted_vandermonde(f, &[0, 2], 2, &probes[..2]).unwrap();

    let mut racer = RacerState::new(f, 2, 1, None, RaceMode::Race);
    let poly = loop {
        let x = racer.next_point();
        if let Status::Done(p) = racer.update(g(x)).unwrap() {
            break p;
        }
    };
    let recovered = poly.terms().len() == 2 && poly.coeff(&[0]).value() == 1 && poly.coeff(&[2]).value() == 1;
    let ok = probes == [5, 17, 65, 257]
        && aux.coeffs() == [4, 504, 1]
        && degs == Some(vec![0, 2])
        && coefs == [1, 1]
        && recovered;
    report(
        1,
        "Ben-Or/Tiwari worked example",
        ok,
        &format!("probes {probes:?}, aux {:?}, degrees {degs:?}, coefficients {coefs:?}", aux.coeffs()),
    );
}

#[test]
fn criterion_02_factor_scan_worked_example() {
    let mixed = |f: PrimeField, x: &[u64]| -> Result<u64, FieldError> {
        let a = f.sub(x[0], 1);
        let b = f.sub(x[1], 2);
        let c = f.sub(f.mul(x[0], x[1]), 1);
        Ok(f.mul(a, f.mul(b, c)))
    };
    let t0 = Instant::now();
    let f = PrimeField::new(17).unwrap();
    let mut p = FieldFnProbe::new(f, 2, mixed);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let s = scan_variable_in_field(&mut p, 0, &[vec![5], vec![10]], 1, 16, &mut rng).unwrap();
    let poly = |c: &[u64]| DensePolyFF::new(f, c.to_vec());
    let samples_ok = s.samples[0].0.unit == 15
        && s.samples[0].0.factors == vec![(poly(&[10, 1]), 1), (poly(&[16, 1]), 1)]
        && s.samples[1].0.unit == 12
        && s.samples[1].0.factors == vec![(poly(&[5, 1]), 1), (poly(&[16, 1]), 1)];
    let common_ok = s.num_common == vec![(poly(&[16, 1]), 1)] && s.den_common.is_empty();

    let mut lift = FactorLift::new();
    lift.push(&s);
    let g = prime_sequence(0).unwrap();
    p = FieldFnProbe::new(g, 2, mixed);
    let s2 = scan_variable_in_field(&mut p, 0, &[vec![1234567], vec![7654321]], 1, 16, &mut rng).unwrap();
    lift.push(&s2);
    let z = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
    let z1 = lift.result().unwrap().unwrap();
    let v2 = scan_variable(&mut p, 1, &FactorScanConfig::default(), &mut rng).unwrap();
    let ok = samples_ok
        && common_ok
        && z1 == (z(&[-1, 1]), z(&[1]))
        && v2.num_factor == z(&[-2, 1])
        && v2.den_factor == z(&[1]);
    let ms = t0.elapsed().as_secs_f64() * 1e3;
    report(
        2,
        "factor scan worked example",
        ok,
        &format!("samples {samples_ok}, common 16+z1 {common_ok}, z1 factor {:?}, z2 factor {:?}, {ms:.1} ms", z1.0, v2.num_factor),
    );
}

#[test]
fn criterion_03_hybrid_racer_budget() {
    let bb = black_box(HYBRID_EXAMPLE, 2);
    let f = prime_sequence(0).unwrap();
    bb.prepare(f).unwrap();
    let mut p = FnProbe::new(f, 2, |x: &[u64]| bb.evaluate_function(f, 0, x));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let out = hybrid_racer_auto(&mut p, &Shift { s: vec![0, 2] }, &HybridConfig::default(), &mut rng).unwrap();
    let mut agree = true;
    for _ in 0..20 {
        let x: Vec<u64> = (0..2).map(|_| rng.gen_range(1..f.p())).collect();
        agree &= bb.evaluate_function(f, 0, &x) == out.function.eval(&x);
    }
    let (q, _) = reconstruct(&bb, &RunConfig::default()).unwrap();
    let text = q[0].to_text(&var_names(2));
    let ok = out.probes <= 30 && agree && text == "(z1*z2^3+z1^2*z2^2+z1^3*z2+z1^4+z2^5)/z2";
    report(
        3,
        "hybrid racer probe budget",
        ok,
        &format!("{} probes at shift (0,2) (limit 30), over Q: {text}", out.probes),
    );
}

#[test]
fn criterion_04_racing_vs_newton() {
    let f2 = &racing_suite()[1];
    let (race, _, race_exact) = run_bench(f2, &no_factor_scan());
    let newton_cfg = RunConfig {
        race_mode: RaceMode::NewtonOnly,
        ..no_factor_scan()
    };
    let (newton, _, newton_exact) = run_bench(f2, &newton_cfg);
    let ok = race <= 4000 && newton >= 50000 && race_exact && newton_exact;
    report(
        4,
        "racing vs dense gap",
        ok,
        &format!("f2 racing {race} probes (limit 4000), Newton-only {newton} (floor 50000), exact {race_exact}/{newton_exact}"),
    );
}

#[test]
fn criterion_05_hybrid_budget() {
    let suite = racing_suite();
    let (p1, _, e1) = run_bench(&suite[0], &no_factor_scan());
    let (p3, _, e3) = run_bench(&suite[2], &no_factor_scan());
    let ok = p1 <= 2000 && p3 <= 50000 && e1 && e3;
    report(
        5,
        "hybrid vs sparse-only gap",
        ok,
        &format!("f1 {p1} probes (limit 2000), f3 {p3} (limit 50000), exact {e1}/{e3}"),
    );
}

#[test]
fn criterion_06_factor_scan_payoff() {
    let suite = factor_suite();
    let (f4_on, rep, e_on) = run_bench(&suite[3], &RunConfig::default());
    let f4_scan = rep.functions[0].factor_scan_probes;
    let (f4_off, _, e_off) = run_bench(&suite[3], &no_factor_scan());
    let (_, rep1, e1) = run_bench(&suite[0], &RunConfig::default());
    let overhead = rep1.functions[0].factor_scan_probes;
    let ok = f4_on <= 6000 && f4_off >= 20000 && overhead <= 1500 && e_on && e_off && e1;
    report(
        6,
        "factor-scan payoff",
        ok,
        &format!(
            "f4 {f4_on} probes with scan ({f4_scan} for the scan, limit 6000), {f4_off} without (floor 20000); \
             f1 scan overhead {overhead} (limit 1500); exact {e_on}/{e_off}/{e1}"
        ),
    );
}

#[test]
fn criterion_07_parser_performance() {
    const EVALS: usize = 1000;
    const CHUNK: usize = 50;
    let names: Vec<String> = GEN_VARS.iter().map(|s| s.to_string()).collect();
    let src = gen_dense_poly(92, 1, PolyForm::Expanded);
    let prog = parse(&src, &names).unwrap().remove(0);
    let f = prime_sequence(0).unwrap();
    let pre = prog.precompute(f).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let points: Vec<Vec<u64>> = (0..EVALS).map(|_| (0..3).map(|_| rng.gen_range(1..f.p())).collect()).collect();
    // interleave chunks so load changes hit both sides alike
    let (mut plain_s, mut pre_s, mut same) = (0.0, 0.0, true);
    for chunk in points.chunks(CHUNK) {
        let t = Instant::now();
        let a: Vec<_> = chunk.iter().map(|p| prog.evaluate(f, p)).collect();
        plain_s += t.elapsed().as_secs_f64();
        let t = Instant::now();
        let b: Vec<_> = chunk.iter().map(|p| pre.evaluate(p)).collect();
        pre_s += t.elapsed().as_secs_f64();
        same &= a == b;
    }
    let mut bunch_ok = true;
    for w in [2usize, 4, 8, 16, 32, 64, 128] {
        let pts = &points[..w];
        let scalar: Vec<_> = pts.iter().map(|p| pre.evaluate(p)).collect();
        bunch_ok &= pre.evaluate_bunch(pts) == scalar;
        bunch_ok &= prog.evaluate_bunch(f, pts) == scalar;
    }
    let speedup = plain_s / pre_s;
    let ok = monomial_count(92) == 138415 && same && bunch_ok && speedup >= 2.0;
    report(
        7,
        "parser performance and equivalence",
        ok,
        &format!(
            "{EVALS} evaluations: plain {plain_s:.2} s, pre-evaluated {pre_s:.2} s, speedup {speedup:.1}x (floor 2); \
             identical {same}, bunches 2-128 identical {bunch_ok}"
        ),
    );
}

#[test]
fn criterion_08_bunch_size_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut bad = vec![];
    for _ in 0..1000 {
        let q = rng.gen_range(0..1_000_000usize);
        let t = rng.gen_range(1..=256usize);
        let b_max = BUNCH_SIZES[rng.gen_range(0..BUNCH_SIZES.len())];
        let p = if q < t { 0 } else { (q as f64 / t as f64).log2().floor() as u32 };
        let want = 2usize.pow(p).min(b_max);
        if compute_bunch_size(q, t, b_max) != want {
            bad.push((q, t, b_max));
        }
    }
    report(8, "bunch-size formula", bad.is_empty(), &format!("1000 cases, mismatches {bad:?}"));
}

fn random_nodes(rng: &mut ChaCha8Rng, f: PrimeField, t: usize) -> Vec<u64> {
    let mut v: Vec<u64> = vec![];
    while v.len() < t {
        let x = rng.gen_range(2..f.p());
        if !v.contains(&x) {
            v.push(x);
        }
    }
    v
}

#[test]
fn criterion_09_oracle_equivalences() {
    let f = prime_sequence(0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);

    // Berlekamp-Massey against the Hankel system of the same sequence
    let mut bm_ok = 0;
    for _ in 0..200 {
        let t = rng.gen_range(1..=8usize);
        let nodes = random_nodes(&mut rng, f, t);
        let cs: Vec<u64> = (0..t).map(|_| rng.gen_range(1..f.p())).collect();
        let a: Vec<u64> = (0..2 * t as u64)
            .map(|j| nodes.iter().zip(&cs).fold(0, |s, (&v, &c)| f.add(s, f.mul(c, f.pow(v, j)))))
            .collect();
        let mut bm = BMState::new(f);
        for &x in &a {
            bm.update(x);
        }
        let rows: Vec<Vec<u64>> = (t..2 * t).map(|j| (1..=t).map(|k| a[j - k]).collect()).collect();
        let rhs: Vec<u64> = (t..2 * t).map(|j| f.neg(a[j])).collect();
        let c = gauss_solve(f, rows, rhs).expect("nonsingular Hankel system");
        let mut want = vec![1];
        want.extend(c);
        while want.last() == Some(&0) {
            want.pop();
        }
        if bm.lambda().coeffs() == want.as_slice() {
            bm_ok += 1;
        }
    }

    // shifted Vandermonde against dense elimination
    let mut sv_ok = 0;
    for _ in 0..200 {
        let t = rng.gen_range(1..=16usize);
        let y = rng.gen_range(2..f.p());
        let mut degs: Vec<u32> = vec![];
        while degs.len() < t {
            let d = rng.gen_range(0..200u32);
            if !degs.contains(&d) {
                degs.push(d);
            }
        }
        let vals: Vec<u64> = (0..t).map(|_| rng.gen_range(0..f.p())).collect();
        let rows: Vec<Vec<u64>> = (1..=t as u64)
            .map(|j| degs.iter().map(|&d| f.pow(f.pow(y, d as u64), j)).collect())
            .collect();
        let dense = gauss_solve(f, rows, vals.clone());
        if dense.is_some() && solve_shifted_vandermonde(f, &degs, y, &vals).ok() == dense {
            sv_ok += 1;
        }
    }

    // rational reconstruction within Wang's bound
    let m: BigUint = PRIMES[..3].iter().map(|&p| BigUint::from(p)).product();
    let bound: BigUint = (&m / 2u32).sqrt();
    let mut rr_ok = 0;
    for _ in 0..10_000 {
        let num = BigInt::from(rng.gen_biguint_below(&bound)) * if rng.gen() { 1 } else { -1 };
        let den = BigInt::from(rng.gen_biguint_range(&BigUint::one(), &bound));
        let q = BigRational::new(num, den);
        let mi = BigInt::from(m.clone());
        let d_inv = q.denom().modinv(&mi).unwrap();
        let r = (q.numer() * d_inv).mod_floor_pos(&mi);
        if rational_reconstruct_with(&r, &m, ReconstructionMode::Wang) == Some(q) {
            rr_ok += 1;
        }
    }
    let ok = bm_ok == 200 && sv_ok == 200 && rr_ok == 10_000;
    report(
        9,
        "oracle equivalences",
        ok,
        &format!("BM/Hankel {bm_ok}/200, shifted Vandermonde {sv_ok}/200, rational reconstruction {rr_ok}/10000"),
    );
}

trait ModFloorPos {
    fn mod_floor_pos(&self, m: &BigInt) -> BigUint;
}

impl ModFloorPos for BigInt {
    fn mod_floor_pos(&self, m: &BigInt) -> BigUint {
        let r = ((self % m) + m) % m;
        r.to_biguint().unwrap()
    }
}

/// Local and distributed result files, and whether the doomed worker (if
/// any) really died.
fn distributed_text(src: &str, n: usize, fail_after: Option<usize>) -> (String, String, bool) {
    let names = var_names(n);
    let cfg = RunConfig {
        max_bunch_size: 4,
        seed: 11,
        ..RunConfig::default()
    };
    let bb = black_box(src, n);
    let (local, _) = reconstruct(&bb, &cfg).unwrap();
    let map: Vec<usize> = (0..local.len()).collect();

    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap().to_string();
    let workers: Vec<_> = [fail_after, None]
        .into_iter()
        .map(|fail| {
            let (addr, src) = (addr.clone(), src.to_string());
            thread::spawn(move || {
                let opts = WorkerOptions {
                    threads: 2,
                    max_bunch_size: 4,
                    connect_attempts: 3,
                    retry_delay: Duration::from_millis(20),
                    fail_after: fail,
                };
                run_worker(&black_box(&src, n), &addr, &opts).is_ok()
            })
        })
        .collect();
    let opts = MasterOptions {
        min_workers: 2,
        window: Some(2),
        ..MasterOptions::default()
    };
    let (remote, _) = run_master(&bb, &cfg, listener, &opts).unwrap();
    let clean: Vec<bool> = workers.into_iter().map(|w| w.join().unwrap()).collect();
    let killed = fail_after.is_none() || !clean[0];
    (result_text(&local, &names, &map), result_text(&remote, &names, &map), killed)
}

#[test]
fn criterion_10_distributed_neutrality() {
    let t0 = Instant::now();
    let mut lines = vec![];
    let mut ok = true;
    for (label, src) in [("hybrid example", HYBRID_EXAMPLE), ("factor example", FACTOR_EXAMPLE)] {
        for (mode, fail) in [("2 workers", None), ("one worker killed", Some(1))] {
            let (local, remote, killed) = distributed_text(src, 2, fail);
            ok &= local.as_bytes() == remote.as_bytes() && killed;
            lines.push(format!("{label}/{mode}: {}", if local == remote { "identical" } else { "DIFFERENT" }));
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    ok &= secs < 30.0;
    report(10, "distributed neutrality", ok, &format!("{}; {secs:.1} s", lines.join(", ")));
}

/// Coefficients as a map from exponent vector to rational.
type QMap = HashMap<Vec<u32>, BigRational>;

fn qmap(terms: &[(&[u32], i64, i64)]) -> QMap {
    terms
        .iter()
        .map(|&(e, n, d)| (e.to_vec(), BigRational::new(n.into(), d.into())))
        .filter(|(_, c)| !c.is_zero())
        .collect()
}

fn insertion_job(dir: &Path) {
    std::fs::create_dir_all(dir.join("config")).unwrap();
    std::fs::create_dir_all(dir.join("replacements")).unwrap();
    std::fs::write(dir.join("config/vars"), "s\nt\nd\n").unwrap();
    std::fs::write(dir.join("config/functions"), "F1\n").unwrap();
    std::fs::write(dir.join("config/skip_functions"), "").unwrap();
    std::fs::write(
        dir.join("replacements/table"),
        "{F1[1,0,1,-2] -> F1[1,1,1,1]*2 + F1[0,1,1,1]*(s-t)/5,\n F1[2,0,0,0] -> F1[0,1,1,1]*d}\n",
    )
    .unwrap();
    std::fs::write(dir.join("amplitude"), "F1[1,0,1,-2]*(s+t+d)/42 + F1[1,1,1,1]*(d-3)\n").unwrap();
}

#[test]
fn criterion_11_insertion() {
    let dir = tempfile::tempdir().unwrap();
    insertion_job(dir.path());
    let cfg = InsertConfig::load(&dir.path().join("config")).unwrap();
    let exprs = prepare(&cfg, &dir.path().join("replacements"), &dir.path().join("amplitude"), false).unwrap();
    let masters = master_coefficients(&cfg, &exprs[0].1);
    let vars = &cfg.vars;
    let mut got: HashMap<String, QMap> = HashMap::new();
    for (key, coef) in &masters {
        let bb = ExpressionBlackBox::new(3, parse(&format!("{coef};"), vars).unwrap());
        let (q, _) = reconstruct(&bb, &RunConfig::default()).unwrap();
        let q = &q[0];
        assert!(q.den.len() == 1 && q.den.values().all(|c| c.is_one()));
        got.insert(key.as_ref().unwrap().to_string(), q.num.clone().into_iter().collect());
    }
    // exact symbolic values: (s+t+d)/42*2 + (d-3) and (s+t+d)/42*(s-t)/5
    let (s, t, d, one): (&[u32], &[u32], &[u32], &[u32]) = (&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[0, 0, 0]);
    let mut want = HashMap::new();
    want.insert("F1[1,1,1,1]".to_string(), qmap(&[(s, 1, 21), (t, 1, 21), (d, 22, 21), (one, -3, 1)]));
    want.insert(
        "F1[0,1,1,1]".to_string(),
        qmap(&[
            (&[2, 0, 0], 1, 210),
            (&[0, 2, 0], -1, 210),
            (&[1, 0, 1], 1, 210),
            (&[0, 1, 1], -1, 210),
        ]),
    );
    let exact = got == want;
    let out = interpolate_masters(&cfg, &masters, &RunConfig::default(), None).unwrap();

    // linearity over random rule tables and expressions
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let f = prime_sequence(0).unwrap();
    let mut linear = 0;
    for _ in 0..50 {
        if linearity_case(&mut rng, f) {
            linear += 1;
        }
    }
    let ok = exact && linear == 50;
    report(
        11,
        "insertion correctness",
        ok,
        &format!("masters match the symbolic oracle: {exact}; linearity {linear}/50; output {:?}", out.trim()),
    );
}

fn random_coef(rng: &mut ChaCha8Rng) -> String {
    let v = ["s", "t", "d"][rng.gen_range(0..3)];
    match rng.gen_range(0..4) {
        0 => format!("{}", rng.gen_range(1..100)),
        1 => format!("({v}-{})/{}", rng.gen_range(1..9), rng.gen_range(1..9)),
        2 => format!("{v}^{}+{}", rng.gen_range(1..4), rng.gen_range(1..9)),
        _ => format!("{}/({v}+{})", rng.gen_range(1..9), rng.gen_range(1..9)),
    }
}

fn random_sum(rng: &mut ChaCha8Rng, heads: &[&str]) -> Vec<(Option<String>, String)> {
    (0..rng.gen_range(1..4))
        .map(|_| {
            let h = rng.gen_range(0..=heads.len());
            (heads.get(h).map(|s| s.to_string()), random_coef(rng))
        })
        .collect()
}

fn sum_text(terms: &[(Option<String>, String)], scale: &str) -> String {
    terms
        .iter()
        .map(|(h, c)| match h {
            Some(h) => format!("{h}*({c})*{scale}"),
            None => format!("({c})*{scale}"),
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

fn linearity_case(rng: &mut ChaCha8Rng, f: PrimeField) -> bool {
    use ratrecon::cli::insert::substitute;
    let heads = ["F1[0,0]", "F1[1,0]", "F1[0,1]", "F1[1,1]"];
    let cfg = InsertConfig {
        vars: ["s", "t", "d"].map(String::from).to_vec(),
        families: vec!["F1".into()],
        skip: Default::default(),
    };
    let mut arity = HashMap::new();
    let mut rules = std::collections::BTreeMap::new();
    for h in &heads[..2] {
        let body = sum_text(&random_sum(rng, &heads[2..]), "1");
        let head = cfg.parse_linear(h, &mut arity).unwrap().integrals().next().unwrap().clone();
        rules.insert(head, cfg.parse_linear(&body, &mut arity).unwrap());
    }
    let (e1, e2) = (random_sum(rng, &heads), random_sum(rng, &heads));
    let (c1, c2) = (random_coef(rng), random_coef(rng));
    let combined = format!("{} + {}", sum_text(&e1, &format!("({c1})")), sum_text(&e2, &format!("({c2})")));
    let lhs = substitute(&cfg.parse_linear(&combined, &mut arity).unwrap(), &rules);
    let mut rhs = ratrecon::cli::insert::LinearExpr::default();
    rhs.add_scaled(&substitute(&cfg.parse_linear(&sum_text(&e1, "1"), &mut arity).unwrap(), &rules), &c1);
    rhs.add_scaled(&substitute(&cfg.parse_linear(&sum_text(&e2, "1"), &mut arity).unwrap(), &rules), &c2);
    let pt: Vec<u64> = (0..3).map(|_| rng.gen_range(1..f.p())).collect();
    let eval = |text: Option<String>| -> Option<u64> {
        match text {
            None => Some(0),
            Some(t) => parse(&format!("{t};"), &cfg.vars).ok()?[0].evaluate(f, &pt).ok(),
        }
    };
    let keys: std::collections::BTreeSet<_> = lhs.terms.keys().chain(rhs.terms.keys()).cloned().collect();
    keys.iter().all(|k| {
        let (l, r) = (eval(lhs.coefficient(k)), eval(rhs.coefficient(k)));
        l.is_some() && l == r
    })
}
