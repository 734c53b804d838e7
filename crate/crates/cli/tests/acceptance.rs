//! Acceptance suite: one test per release criterion, each printing a
//! pass/fail line with its measured figures. Run with `--nocapture` to see
//! the lines for passing criteria too.

use std::time::{Duration, Instant};

use num_complex::Complex64 as C64;

use gaudin_cli::config::RunConfig;
use gaudin_cli::report::Verdict;
use gaudin_cli::suites;
use gaudin_core::bethe::{eigen_check, solve_bethe, BetheRootSet, EigReading, Kind, SolverConfig};
use gaudin_core::gaudin::{compare_hamiltonians, hamiltonian_from_transfer, GaudinSet};
use gaudin_core::params::ModelParams;
use gaudin_core::sampling::{draw_params, draw_spectral, rng_for, to_c64};
use gaudin_core::scalar::{
    intermediate_g, partition_bruteforce, partition_det, partition_recursive, relative_error,
    s11_bruteforce, s11_det, s22_bruteforce, s22_det,
};

fn desk() -> ModelParams {
    ModelParams::from_real(0.3, 0.7, 0.5, 0.2, 0.1, &[0.11, 0.23]).unwrap()
}

fn four_site() -> ModelParams {
    ModelParams::from_real(0.3, 0.7, 0.5, 0.2, 0.1, &[0.11, 0.23, 0.41, 0.59]).unwrap()
}

struct Criterion {
    number: usize,
    name: &'static str,
    budget: Duration,
    started: Instant,
}

impl Criterion {
    fn start(number: usize, name: &'static str, budget_secs: u64) -> Criterion {
        Criterion {
            number,
            name,
            budget: Duration::from_secs(budget_secs),
            started: Instant::now(),
        }
    }

    fn finish(self, pass: bool, detail: String) {
        let elapsed = self.started.elapsed();
        let verdict = if pass && elapsed <= self.budget {
            "PASS"
        } else {
            "FAIL"
        };
        println!(
            "criterion {} ({}): {} in {:.2}s — {}",
            self.number,
            self.name,
            verdict,
            elapsed.as_secs_f64(),
            detail
        );
        assert!(pass, "criterion {} failed: {}", self.number, detail);
        assert!(
            elapsed <= self.budget,
            "criterion {} overran its {}s budget: {:.2}s",
            self.number,
            self.budget.as_secs(),
            elapsed.as_secs_f64()
        );
    }
}

#[test]
fn criterion_1_algebraic_identities() {
    let c = Criterion::start(1, "algebraic identities", 60);
    let config = RunConfig::default();
    let records = suites::algebra_suite(&config).expect("algebra suite");
    let qybe = records
        .iter()
        .filter(|r| r.check_id.starts_with("algebra/qybe/"))
        .count();
    let commute = records
        .iter()
        .filter(|r| r.check_id.starts_with("algebra/transfer-commute/"))
        .count();
    let failures: Vec<&str> = records
        .iter()
        .filter(|r| r.verdict != Verdict::Pass)
        .map(|r| r.check_id.as_str())
        .collect();
    let worst_identity = records
        .iter()
        .filter(|r| {
            ["qybe", "unitarity", "re/", "dual-re"]
                .iter()
                .any(|k| r.check_id.contains(k))
        })
        .map(|r| r.measured)
        .fold(0.0f64, f64::max);
    let worst_commute = records
        .iter()
        .filter(|r| r.check_id.contains("transfer-commute"))
        .map(|r| r.measured)
        .fold(0.0f64, f64::max);
    c.finish(
        failures.is_empty() && qybe == 100 && commute == 15,
        format!(
            "{qybe} QYBE draws, {commute} commutator checks; worst identity residual \
             {worst_identity:.3e} (tol 1e-12), worst transfer commutator {worst_commute:.3e} \
             (tol 1e-11); failures: {failures:?}"
        ),
    );
}

#[test]
fn criterion_2_classical_limit() {
    let c = Criterion::start(2, "classical limit is linear in eta", 60);
    let p = desk();
    let u = C64::new(0.64, 0.0);
    let etas = [1e-2, 1e-3, 1e-4];
    let resid: Vec<f64> = etas
        .iter()
        .map(|&eta| {
            gaudin_core::vertex::classical_limit_residual(u, C64::new(eta, 0.0), &p)
                .expect("classical limit residual")
        })
        .collect();
    let s01 = (resid[0] / resid[1]).log10();
    let s12 = (resid[1] / resid[2]).log10();
    let ok = (s01 - 1.0).abs() <= 0.1 && (s12 - 1.0).abs() <= 0.1;
    c.finish(
        ok,
        format!(
            "residuals {resid:?} at etas {etas:?}; pairwise slopes {s01:.4}, {s12:.4} (1 +/- 0.1)"
        ),
    );
}

#[test]
fn criterion_3_gaudin_consistency() {
    let c = Criterion::start(
        3,
        "Gaudin two-construction agreement and commutativity",
        120,
    );
    let mut worst_agree: f64 = 0.0;
    let mut worst_comm: f64 = 0.0;
    for params in [desk(), four_site()] {
        let set = GaudinSet::build(&params).expect("gaudin set");
        worst_comm = worst_comm.max(set.max_pairwise_commutator_rel());
        for j in 1..=params.n_sites {
            let ht = hamiltonian_from_transfer(j, &params, params.tol.fd_step)
                .expect("transfer-derivative Hamiltonian");
            let cmp = compare_hamiltonians(&set.hams[j - 1], &ht);
            worst_agree = worst_agree.max(cmp.rel_distance_raw);
        }
    }
    // commutativity additionally on random draws
    for n in [2usize, 4] {
        for s in 0..2u64 {
            let params = draw_params(&mut rng_for(424242, n as u64 * 8 + s), n);
            let set = GaudinSet::build(&params).expect("gaudin set (drawn)");
            worst_comm = worst_comm.max(set.max_pairwise_commutator_rel());
        }
    }
    c.finish(
        worst_agree < 1e-5 && worst_comm < 1e-9,
        format!(
            "max construction distance {worst_agree:.3e} (tol 1e-5), \
             max relative commutator {worst_comm:.3e} (tol 1e-9), N in {{2, 4}}"
        ),
    );
}

#[test]
fn criterion_4_bethe_eigen_closure() {
    let c = Criterion::start(
        4,
        "Bethe roots and eigenvalue closure on the desk instance",
        60,
    );
    let p = desk();
    let cfg = SolverConfig::default();
    let mut worst_ba: f64 = 0.0;
    let mut worst_eigen: f64 = 0.0;
    let mut readings = Vec::new();
    let mut found = [0usize; 2];
    for (ki, kind) in [Kind::One, Kind::Two].into_iter().enumerate() {
        let out = solve_bethe(kind, &p, &cfg);
        found[ki] = out.sets.len();
        for set in &out.sets {
            worst_ba = worst_ba.max(set.residual_norm);
            let ec = eigen_check(kind, &set.roots, &p).expect("eigen check");
            worst_eigen = worst_eigen.max(ec.max_residual);
            readings.push((kind.index(), ec.reading, ec.shift_applied));
        }
    }
    let all_lambda_sum_raw = readings
        .iter()
        .all(|(_, r, shifted)| *r == EigReading::LambdaSum && !shifted);
    c.finish(
        found[0] >= 1
            && found[1] >= 1
            && worst_ba < 1e-11
            && worst_eigen < 1e-8
            && all_lambda_sum_raw,
        format!(
            "{}/{} root sets (kind 1/2); worst BA residual {worst_ba:.3e} (tol 1e-11); \
             worst eigen residual {worst_eigen:.3e} (tol 1e-8); \
             resolved reading: boundary-angle sum, raw (no identity shift)",
            found[0], found[1]
        ),
    );
}

#[test]
fn criterion_5_partition_triangle() {
    let c = Criterion::start(5, "partition determinant = recursion = brute force", 120);
    let mut worst_small: f64 = 0.0;
    let mut worst_six: f64 = 0.0;
    for n in [1usize, 2, 3, 4, 6] {
        for draw in 0..5u64 {
            let mut rng = rng_for(777, n as u64 * 32 + draw);
            let boundary = draw_params(&mut rng, 2);
            let zs = to_c64(&draw_spectral(&mut rng, n, &[]));
            let z_res: Vec<f64> = zs.iter().map(|z| z.re).collect();
            let ubar = to_c64(&draw_spectral(&mut rng, n, &z_res));
            for kind in [Kind::One, Kind::Two] {
                let det = partition_det(kind, &ubar, &zs, &boundary).expect("determinant");
                let rec = partition_recursive(kind, &ubar, &zs, &boundary).expect("recursion");
                let bf = partition_bruteforce(kind, &ubar, &zs, &boundary).expect("brute force");
                let worst_pair = relative_error(det.value, rec.value)
                    .max(relative_error(det.value, bf.value))
                    .max(relative_error(rec.value, bf.value));
                if n <= 4 {
                    worst_small = worst_small.max(worst_pair);
                } else {
                    worst_six = worst_six.max(worst_pair);
                }
            }
        }
    }
    c.finish(
        worst_small < 1e-10 && worst_six < 1e-8,
        format!(
            "5 seeded draws per size, both kinds; worst pairwise error {worst_small:.3e} \
             for N in {{1,2,3,4}} (tol 1e-10) and {worst_six:.3e} for N = 6 (tol 1e-8)"
        ),
    );
}

fn on_shell(kind: Kind, params: &ModelParams, starts: usize) -> BetheRootSet {
    let cfg = SolverConfig {
        starts,
        ..SolverConfig::default()
    };
    solve_bethe(kind, params, &cfg)
        .sets
        .into_iter()
        .next()
        .expect("no converged root set")
}

#[test]
fn criterion_6_scalar_product_determinants() {
    let c = Criterion::start(6, "S^{1,1} and S^{2,2} determinants against oracles", 120);
    let mut worst: f64 = 0.0;
    let mut worst_control: f64 = f64::INFINITY;
    for (params, starts) in [(desk(), 64), (four_site(), 512)] {
        let m = params.m_roots();
        for kind in [Kind::One, Kind::Two] {
            let roots = on_shell(kind, &params, starts);
            let mut rng = rng_for(9090, params.n_sites as u64 + kind.index() as u64);
            let avoid: Vec<f64> = params
                .z
                .iter()
                .map(|z| z.re)
                .chain(roots.roots.iter().map(|v| v.re))
                .collect();
            let u_list = to_c64(&draw_spectral(&mut rng, m, &avoid));
            let (det, pair) = match kind {
                Kind::One => (
                    s11_det(&u_list, &roots, &params).expect("s11 det"),
                    s11_bruteforce(&u_list, &roots.roots, &params).expect("s11 oracle"),
                ),
                Kind::Two => (
                    s22_det(&u_list, &roots, &params).expect("s22 det"),
                    s22_bruteforce(&u_list, &roots.roots, &params).expect("s22 oracle"),
                ),
            };
            let err = relative_error(det.value, pair.tilde.value);
            worst = worst.max(err).max(pair.route_disagreement());

            // negative control: perturb one root by 1e-3
            let mut loose = params.clone();
            loose.tol.tol_onshell = 1e3;
            let mut bad = roots.clone();
            bad.roots[0] += C64::new(1e-3, 0.0);
            let (det_bad, pair_bad) = match kind {
                Kind::One => (
                    s11_det(&u_list, &bad, &loose).expect("s11 det off-shell"),
                    s11_bruteforce(&u_list, &bad.roots, &loose).expect("s11 oracle off-shell"),
                ),
                Kind::Two => (
                    s22_det(&u_list, &bad, &loose).expect("s22 det off-shell"),
                    s22_bruteforce(&u_list, &bad.roots, &loose).expect("s22 oracle off-shell"),
                ),
            };
            let err_bad = relative_error(det_bad.value, pair_bad.tilde.value);
            worst_control = worst_control.min(err_bad / err.max(1e-14));
        }
    }
    c.finish(
        worst < 1e-8 && worst_control > 1e3,
        format!(
            "worst det-vs-oracle error {worst:.3e} (tol 1e-8) over M = 1 and M = 2, both kinds; \
             weakest off-shell degradation factor {worst_control:.3e} (must exceed 1e3)"
        ),
    );
}

#[test]
fn criterion_7_intermediate_function_pathway() {
    let c = Criterion::start(7, "intermediate-function recursion and endpoints", 60);
    let mut worst: f64 = 0.0;
    for (params, starts) in [(desk(), 64), (four_site(), 512)] {
        let m = params.m_roots();
        let roots = on_shell(Kind::One, &params, starts);
        let mut rng = rng_for(4646, params.n_sites as u64);
        let avoid: Vec<f64> = params
            .z
            .iter()
            .map(|z| z.re)
            .chain(roots.roots.iter().map(|v| v.re))
            .collect();
        let u_list = to_c64(&draw_spectral(&mut rng, m, &avoid));

        // G^(M) equals the brute-force scalar product
        let g_full = intermediate_g(&u_list, &[], &roots, &params).expect("G^(M)");
        let s = s11_bruteforce(&u_list, &roots.roots, &params).expect("s11 oracle");
        worst = worst.max(relative_error(g_full, s.tilde.value));

        // recursion: peel the last argument over its insertion site
        let mut total = C64::new(0.0, 0.0);
        for j in 1..=params.n_sites {
            let g_prev = intermediate_g(&u_list[..m - 1], &[j], &roots, &params).expect("G^(i-1)");
            let coeff = gaudin_core::bethe::c_coefficient(u_list[m - 1], params.z[j - 1], &params)
                .expect("tilde coefficient");
            total += coeff * g_prev;
        }
        worst = worst.max(relative_error(g_full, total));

        // G^(0) is the partition-type contraction on the pinned sites
        if m == 1 {
            for j in 1..=params.n_sites {
                let g0 = intermediate_g(&[], &[j], &roots, &params).expect("G^(0)");
                let part =
                    partition_bruteforce(Kind::Two, &roots.roots, &[params.z[j - 1]], &params)
                        .expect("G^(0) oracle");
                worst = worst.max(relative_error(g0, part.value));
            }
        } else {
            let g0 = intermediate_g(&[], &[1, 2], &roots, &params).expect("G^(0)");
            let part = partition_bruteforce(
                Kind::Two,
                &roots.roots,
                &[params.z[0], params.z[1]],
                &params,
            )
            .expect("G^(0) oracle");
            worst = worst.max(relative_error(g0, part.value));
        }
    }
    c.finish(
        worst < 1e-10,
        format!("worst identity error {worst:.3e} (tol 1e-10) at M = 1 and M = 2"),
    );
}

#[test]
fn criterion_8_determinism() {
    let c = Criterion::start(8, "byte-identical artifacts under a fixed seed", 120);
    let dir = std::env::temp_dir().join(format!("gaudin-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bin = env!("CARGO_BIN_EXE_gaudin");

    let run = |tag: &str| -> (Vec<u8>, Vec<u8>) {
        let roots = dir.join(format!("roots-{tag}.json"));
        let report = dir.join(format!("report-{tag}.jsonl"));
        let status = std::process::Command::new(bin)
            .args([
                "all",
                "--seed",
                "31",
                "--roots",
                roots.to_str().unwrap(),
                "--out",
                report.to_str().unwrap(),
                "--quiet",
            ])
            .status()
            .expect("running gaudin all");
        assert!(status.success(), "gaudin all exited with {status:?}");
        (
            std::fs::read(&roots).expect("roots file"),
            std::fs::read(&report).expect("report file"),
        )
    };
    let (roots_a, report_a) = run("a");
    let (roots_b, report_b) = run("b");
    let roots_same = roots_a == roots_b;
    let reports_same = report_a == report_b;
    let _ = std::fs::remove_dir_all(&dir);
    c.finish(
        roots_same && reports_same,
        format!(
            "two `all --seed 31` runs: roots files identical = {roots_same}, \
             report files identical = {reports_same} ({} bytes)",
            report_a.len()
        ),
    );
}
