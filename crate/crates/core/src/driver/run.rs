use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{BlackBox, Checkpoint, DriverError, FunctionProbe, ImageRecord, LocalSampler, RunConfig, Sampler};
use crate::factorscan::{full_scan, FactorScanConfig, FactorScanResult};
use crate::numtheory::PRIMES;
use crate::ratinterp::{
    hybrid_racer, lift_to_q, scan_for_shift, solve_with_structure, HybridConfig, Probe, RatError, RationalFunctionFF,
    RationalFunctionQ, Shift, Structure,
};

/// Probe tallies for one function.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionReport {
    /// Interpolation probes per prime, shift scan included.
    pub probes_per_prime: Vec<(u64, usize)>,
    pub factor_scan_probes: usize,
    pub shift_scan_probes: usize,
    pub verification_probes: usize,
    pub verification_prime: Option<u64>,
    pub unlucky_primes: Vec<u64>,
    pub shift: Option<Shift>,
    pub factor_scan: Option<FactorScanResult>,
}

impl FunctionReport {
    pub fn interpolation_probes(&self) -> usize {
        self.probes_per_prime.iter().map(|p| p.1).sum()
    }

    pub fn total_probes(&self) -> usize {
        self.interpolation_probes() + self.factor_scan_probes + self.verification_probes
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub functions: Vec<FunctionReport>,
    pub total_probes: usize,
    pub primes_used: Vec<u64>,
    pub wall_seconds: f64,
    pub cpu_seconds: f64,
}

impl RunReport {
    fn finish(functions: Vec<FunctionReport>, wall: f64, cpu: f64) -> Self {
        let mut primes: Vec<u64> = functions
            .iter()
            .flat_map(|f| f.probes_per_prime.iter().map(|p| p.0).chain(f.verification_prime))
            .collect();
        primes.sort_unstable_by(|a, b| b.cmp(a));
        primes.dedup();
        Self {
            total_probes: functions.iter().map(|f| f.total_probes()).sum(),
            functions,
            primes_used: primes,
            wall_seconds: wall,
            cpu_seconds: cpu,
        }
    }

    /// Same report without the machine dependent timings.
    pub fn without_timings(&self) -> Self {
        Self {
            wall_seconds: 0.0,
            cpu_seconds: 0.0,
            ..self.clone()
        }
    }
}

fn cpu_seconds() -> f64 {
    // SAFETY: getrusage only writes into the zeroed struct we hand it
    let mut u: libc::rusage = unsafe { std::mem::zeroed() };
    if unsafe { libc::getrusage(libc::RUSAGE_SELF, &mut u) } != 0 {
        return 0.0;
    }
    let t = |v: libc::timeval| v.tv_sec as f64 + v.tv_usec as f64 * 1e-6;
    t(u.ru_utime) + t(u.ru_stime)
}

/// Reconstructs every function of `bb` over the rationals.
pub fn reconstruct(bb: &dyn BlackBox, cfg: &RunConfig) -> Result<(Vec<RationalFunctionQ>, RunReport), DriverError> {
    cfg.validate()?;
    let sampler = LocalSampler::new(bb, cfg.n_threads, cfg.max_bunch_size);
    reconstruct_with(&sampler, bb.fingerprint(), cfg)
}

/// [`reconstruct`] over any probe source.
pub fn reconstruct_with(
    sampler: &dyn Sampler,
    fingerprint: Option<u64>,
    cfg: &RunConfig,
) -> Result<(Vec<RationalFunctionQ>, RunReport), DriverError> {
    cfg.validate()?;
    let (wall0, cpu0) = (Instant::now(), cpu_seconds());
    let n = sampler.n_vars();
    let nf = sampler.n_functions();
    let mut ckpt = match &cfg.resume {
        Some(path) => {
            let c = Checkpoint::load(path)?;
            c.check(fingerprint, n, nf)?;
            c
        }
        None => Checkpoint::new(fingerprint, n, nf, cfg.seed),
    };
    let mut out = Vec::with_capacity(nf);
    for k in 0..nf {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(k as u64);
        let mut job = Job {
            sampler,
            function: k,
            n_user: n,
            cfg,
            ckpt: &mut ckpt,
            rng: &mut rng,
        };
        match job.run()? {
            Some(q) => out.push(q),
            None => {
                let reports = ckpt.functions.iter().map(|f| f.report.clone()).collect();
                let wall = wall0.elapsed().as_secs_f64();
                return Err(DriverError::Exhausted {
                    function: k,
                    primes: cfg.max_primes,
                    report: Box::new(RunReport::finish(reports, wall, cpu_seconds() - cpu0)),
                });
            }
        }
    }
    let reports = ckpt.functions.into_iter().map(|f| f.report).collect();
    let report = RunReport::finish(reports, wall0.elapsed().as_secs_f64(), cpu_seconds() - cpu0);
    Ok((out, report))
}

/// Verification and lift failures tolerated before the skeleton is rebuilt.
const RESTART_AFTER: usize = 3;
const VERIFY_POINTS: usize = 10;

struct Job<'a, 'r> {
    sampler: &'a dyn Sampler,
    function: usize,
    n_user: usize,
    cfg: &'a RunConfig,
    ckpt: &'a mut Checkpoint,
    rng: &'r mut ChaCha8Rng,
}

impl Job<'_, '_> {
    fn state(&mut self) -> &mut super::FunctionCheckpoint {
        &mut self.ckpt.functions[self.function]
    }

    fn persist(&self) -> Result<(), DriverError> {
        match &self.cfg.save_state {
            Some(path) => self.ckpt.save(path),
            None => Ok(()),
        }
    }

    fn internal_vars(&self) -> usize {
        self.n_user.max(1)
    }

    fn images(&self) -> Result<Vec<(RationalFunctionFF, u64)>, DriverError> {
        let n = self.internal_vars();
        self.ckpt.functions[self.function]
            .images
            .iter()
            .map(|r| r.to_ff(n))
            .collect()
    }

    fn run(&mut self) -> Result<Option<RationalFunctionQ>, DriverError> {
        let k = self.function;
        if self.ckpt.functions[k].done {
            if let Some(q) = lift_to_q(&self.images()?).ok().flatten() {
                return Ok(Some(self.finalize(q)));
            }
            self.state().done = false;
        }
        if self.ckpt.functions[k].scan.is_none() {
            let scan = self.factor_scan();
            self.state().report.factor_scan = Some(scan.clone()).filter(|s| s.probes > 0);
            self.state().scan = Some(scan);
            self.persist()?;
        }
        let scan = self.ckpt.functions[k].scan.clone().unwrap();
        let with_bounds = scan.probes > 0 && self.n_user > 0;
        let hcfg = HybridConfig {
            eta: self.cfg.eta,
            mode: self.cfg.race_mode,
            max_retries: self.cfg.max_retries,
            num_bounds: with_bounds.then(|| scan.num_bounds()),
            den_bounds: with_bounds.then(|| scan.den_bounds()),
        };
        let last = self.cfg.max_primes.min(PRIMES.len());
        let mut failures = 0;
        let mut pi = self.ckpt.functions[k].next_prime;
        while pi < last {
            let mut probe = match FunctionProbe::reduced(self.sampler, k, pi, &scan) {
                Ok(p) => p,
                Err(e) => {
                    log::warn!("function {k}: skipping prime {}: {e}", PRIMES[pi]);
                    self.state().report.unlucky_primes.push(PRIMES[pi]);
                    pi += 1;
                    continue;
                }
            };
            let attempt = match self.ckpt.functions[k].structure.clone() {
                None => self.first_prime(&mut probe, &hcfg).map(|(f, s)| (f, Some(s))),
                Some(st) => solve_with_structure(&mut probe, &st, &hcfg, self.rng).map(|(f, _)| (f, None)),
            };
            let p = PRIMES[pi];
            self.state().report.probes_per_prime.push((p, probe.count()));
            pi += 1;
            self.state().next_prime = pi;
            match attempt {
                Ok((image, st)) => {
                    if let Some(st) = st {
                        self.state().structure = Some(st);
                    }
                    self.state().images.push(ImageRecord::new(pi - 1, &image));
                }
                Err(e) => {
                    log::warn!("function {k}: prime {p} unlucky: {e}");
                    self.state().report.unlucky_primes.push(p);
                    self.persist()?;
                    continue;
                }
            }
            self.persist()?;
            let q = match lift_to_q(&self.images()?) {
                Ok(Some(q)) => q,
                Ok(None) => continue,
                Err(e) => {
                    log::warn!("function {k}: image modulo {p} disagrees with earlier primes: {e}");
                    self.state().images.pop();
                    self.state().report.unlucky_primes.push(p);
                    failures += 1;
                    if failures >= RESTART_AFTER {
                        self.restart();
                        failures = 0;
                    }
                    continue;
                }
            };
            // one fresh prime confirms the lift
            while pi < last {
                match FunctionProbe::reduced(self.sampler, k, pi, &scan) {
                    Ok(mut vp) => {
                        let ok = verify(&mut vp, &q, self.rng, self.cfg.max_retries);
                        self.state().report.verification_probes += vp.count();
                        if ok {
                            self.state().report.verification_prime = Some(PRIMES[pi]);
                            self.state().done = true;
                            self.persist()?;
                            return Ok(Some(self.finalize(q)));
                        }
                        log::info!("function {k}: verification modulo {} failed, continuing", PRIMES[pi]);
                        failures += 1;
                        if failures >= RESTART_AFTER {
                            self.restart();
                            failures = 0;
                        }
                        break;
                    }
                    Err(_) => {
                        self.state().report.unlucky_primes.push(PRIMES[pi]);
                        pi += 1;
                    }
                }
            }
        }
        Ok(None)
    }

    fn restart(&mut self) {
        log::warn!("function {}: rebuilding the skeleton", self.function);
        let st = self.state();
        st.structure = None;
        st.images.clear();
    }

    fn factor_scan(&mut self) -> FactorScanResult {
        let n = self.n_user;
        if !self.cfg.enable_factor_scan || n == 0 {
            return FactorScanResult::trivial(n);
        }
        let fcfg = FactorScanConfig {
            eta: self.cfg.eta,
            max_retries: self.cfg.max_retries,
            max_primes: self.cfg.max_primes.min(PRIMES.len()),
            ..FactorScanConfig::default()
        };
        let mut probe = match FunctionProbe::plain(self.sampler, self.function, 0) {
            Ok(p) => p,
            Err(_) => return FactorScanResult::trivial(n),
        };
        let res = full_scan(&mut probe, &fcfg, self.rng);
        self.state().report.factor_scan_probes += probe.count();
        match res {
            Ok(s) => s,
            Err(e) => {
                log::info!("function {}: factor scan gave up: {e}", self.function);
                FactorScanResult::trivial(n)
            }
        }
    }

    fn first_prime(
        &mut self,
        probe: &mut FunctionProbe<'_>,
        hcfg: &HybridConfig,
    ) -> Result<(RationalFunctionFF, Structure), RatError> {
        let f = probe.field();
        let n = probe.n_vars();
        let anchors: Vec<u64> = (1..n).map(|_| self.rng.gen_range(2..f.p())).collect();
        let (shift, line) = if self.cfg.enable_shift_scan {
            let z: Vec<u64> = std::iter::once(1).chain(anchors.iter().copied()).collect();
            let before = probe.count();
            let sc = scan_for_shift(probe, &z, self.rng, self.cfg.eta, self.cfg.max_retries)?;
            self.state().report.shift_scan_probes += probe.count() - before;
            (sc.shift, sc.line)
        } else {
            let s = (0..n).map(|_| self.rng.gen_range(1..1u64 << 16)).collect();
            (Shift { s }, None)
        };
        self.state().report.shift = Some(shift.clone());
        let out = hybrid_racer(probe, &shift, &anchors, line, hcfg, self.rng)?;
        Ok((out.function, out.structure))
    }

    fn finalize(&self, q: RationalFunctionQ) -> RationalFunctionQ {
        if self.n_user == 0 {
            let strip = |p: &crate::ratinterp::QPoly| p.values().map(|c| (vec![], c.clone())).collect();
            return RationalFunctionQ {
                n_vars: 0,
                num: strip(&q.num),
                den: strip(&q.den),
            }
            .canonical();
        }
        let scan = self.ckpt.functions[self.function].scan.as_ref().unwrap();
        let q = q.permuted(&scan.ordering);
        if scan.has_factors() {
            q.with_factors(&scan.q_num(), &scan.q_den())
        } else {
            q.canonical()
        }
    }
}

/// Compares the lift with the black box at random points of a fresh prime.
fn verify(probe: &mut FunctionProbe<'_>, q: &RationalFunctionQ, rng: &mut ChaCha8Rng, max_retries: usize) -> bool {
    let f = probe.field();
    let Ok(qf) = q.to_ff(f) else { return false };
    let n = probe.n_vars();
    let (mut checked, mut bad) = (0, 0);
    while checked < VERIFY_POINTS {
        let pts: Vec<Vec<u64>> = (0..VERIFY_POINTS - checked)
            .map(|_| (0..n).map(|_| rng.gen_range(1..f.p())).collect())
            .collect();
        for (x, v) in pts.iter().zip(probe.probe(&pts)) {
            match (v, qf.eval(x)) {
                (Ok(a), Ok(b)) if a == b => checked += 1,
                (Ok(_), Ok(_)) => return false,
                _ => bad += 1,
            }
        }
        if bad > max_retries {
            return false;
        }
    }
    true
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::driver::{CountingBlackBox, ExpressionBlackBox};
    use crate::parser::parse;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn expr(src: &str, vars: &[&str]) -> ExpressionBlackBox {
        let n = names(vars);
        ExpressionBlackBox::new(n.len(), parse(src, &n).unwrap())
    }

    fn text(src: &str, vars: &[&str], cfg: &RunConfig) -> (Vec<String>, RunReport) {
        let bb = expr(src, vars);
        let (qs, rep) = reconstruct(&bb, cfg).unwrap();
        (qs.iter().map(|q| q.to_text(&names(vars))).collect(), rep)
    }

    #[test]
    fn worked_example() {
        let src = "(z1*z2^3 + z1^2*z2^2 + z1^3*z2 + z1^4 + z2^5)/z2;";
        let (t, rep) = text(src, &["z1", "z2"], &RunConfig::default());
        assert_eq!(t, ["(z1*z2^3+z1^2*z2^2+z1^3*z2+z1^4+z2^5)/z2"]);
        assert!(rep.functions[0].verification_probes >= VERIFY_POINTS);
    }

    #[test]
    fn factors_come_back() {
        let src = "(z1-1)*(z2-2)*(z1*z2-1)/(3*z1+z2^2+7)/(z2+5)^2;";
        for scan in [true, false] {
            let cfg = RunConfig {
                enable_factor_scan: scan,
                ..RunConfig::default()
            };
            let bb = expr(src, &["z1", "z2"]);
            let (qs, rep) = reconstruct(&bb, &cfg).unwrap();
            let f = crate::numtheory::prime_sequence(5).unwrap();
            for x in [[3u64, 4], [10, 11], [123, 456]] {
                assert_eq!(qs[0].eval_ff(f, &x).unwrap(), bb.evaluate_function(f, 0, &x).unwrap());
            }
            assert_eq!(rep.functions[0].factor_scan.is_some(), scan);
        }
    }

    #[test]
    fn zero_constant_and_no_variables() {
        let (t, _) = text("0; 7/3; x - x + 1; 1/(x+1) - 1/(x+1);", &["x"], &RunConfig::default());
        assert_eq!(t, ["0", "7/3", "1", "0"]);
        let (t, _) = text("1; -22/7;", &[], &RunConfig::default());
        assert_eq!(t, ["1", "-22/7"]);
    }

    #[test]
    fn big_coefficients_need_several_primes() {
        let src = "(123456789012345678901234567890*x^2 - y/98765432109876543210)/(x + 3*y^2);";
        let (t, rep) = text(src, &["x", "y"], &RunConfig::default());
        let bb = expr(&format!("{};", t[0]), &["x", "y"]);
        let orig = expr(src, &["x", "y"]);
        let f = crate::numtheory::prime_sequence(9).unwrap();
        assert_eq!(bb.evaluate_function(f, 0, &[5, 6]), orig.evaluate_function(f, 0, &[5, 6]));
        // 97-bit integer and a 67-bit denominator: two primes plus verification
        assert_eq!(rep.functions[0].probes_per_prime.len(), 2);
        assert_eq!(rep.primes_used.len(), 3);
    }

    #[test]
    fn deterministic_and_bunch_neutral() {
        let src = "(x^3*y + 4*y*z^2 - 2)/(x*z + y^2 + 1); (x+y+z)^3/(x-y);";
        let vars = ["x", "y", "z"];
        let (t1, r1) = text(src, &vars, &RunConfig::default());
        let (t2, r2) = text(src, &vars, &RunConfig::default());
        assert_eq!((&t1, r1.without_timings()), (&t2, r2.without_timings()));
        for (threads, b) in [(1, 8), (4, 128), (3, 2)] {
            let cfg = RunConfig {
                n_threads: threads,
                max_bunch_size: b,
                ..RunConfig::default()
            };
            let (t, r) = text(src, &vars, &cfg);
            assert_eq!(t, t1);
            assert_eq!(r.total_probes, r1.total_probes);
        }
    }

    #[test]
    fn report_matches_black_box_tally() {
        let bb = CountingBlackBox::new(expr("(x^2+y)/(x-3*y); x*y^2 + 5;", &["x", "y"]));
        let (_, rep) = reconstruct(&bb, &RunConfig::default()).unwrap();
        assert_eq!(rep.total_probes, bb.total());
        assert_eq!(rep.functions[1].total_probes(), bb.count(1));
    }

    #[test]
    fn checkpoint_resume() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("state.json");
        let src = "(x^2*y - 3)/(y + 1); x + 2*y;";
        let cfg = RunConfig {
            save_state: Some(path.clone()),
            ..RunConfig::default()
        };
        let (t, _) = text(src, &["x", "y"], &cfg);
        let snap = Checkpoint::load(&path).unwrap();
        assert!(snap.functions.iter().all(|f| f.done));
        let resumed = RunConfig {
            resume: Some(path.clone()),
            ..RunConfig::default()
        };
        let (t2, r2) = text(src, &["x", "y"], &resumed);
        assert_eq!(t2, t);
        assert_eq!(r2.total_probes, snap.functions.iter().map(|f| f.report.total_probes()).sum::<usize>());
        // half-finished: drop the second function's progress
        let mut half = snap.clone();
        half.functions[1] = Default::default();
        half.save(&path).unwrap();
        assert_eq!(text(src, &["x", "y"], &resumed).0, t);
        let other = expr("x;", &["x", "y"]);
        assert!(matches!(reconstruct(&other, &resumed), Err(DriverError::Checkpoint(_))));
    }
}
