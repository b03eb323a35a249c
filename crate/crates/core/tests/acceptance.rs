//! Acceptance criteria. Every test writes one `PASS`/`FAIL` line with its
//! measured margins straight to stderr, so the lines survive output capture.

mod common;

use std::io::Write;
use std::time::Instant;

use rand::Rng;
use sbm_spectral::censor::{partition_censor, CensorConfig};
use sbm_spectral::graph::{io as gio, sample_censor, sample_sbm, SbmParams};
use sbm_spectral::harness::{
    correction_suite_two, gamma_correctness, multi_stage_suite, projection_suite, run_experiment,
    verify_norm_bounds, ExperimentConfig,
};
use sbm_spectral::multiblock::{gamma_bound_multi, partition_multi};
use sbm_spectral::spectral::{
    spectral_norm, top_eigenspace, top_left_singular_space, EigenOptions, RowGram,
};
use sbm_spectral::twoblock::{gamma_bound_two, partition_two, spectral_partition_two, TwoBlockConfig};
use sbm_spectral::Clustering;

fn report(criterion: usize, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let line = format!("{verdict} criterion {criterion}: {detail}\n");
    std::io::stderr().write_all(line.as_bytes()).unwrap();
}

fn fmt_list(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| format!("{x:.3}")).collect();
    format!("[{}]", parts.join(", "))
}

#[test]
fn criterion_1_eigensolver_oracle() {
    let start = Instant::now();
    let opts = EigenOptions::default().with_tol(1e-13);
    let mut rng = common::rng(0xacce_0001);
    let mut worst_sin: f64 = 0.0;
    let mut worst_norm: f64 = 0.0;

    for _ in 0..100 {
        let n = rng.random_range(2..=64);
        let r = rng.random_range(1..=n.min(6) - 1);
        let (dense, sparse) = common::random_symmetric(n, &mut rng);
        let got = top_eigenspace(&sparse, r, &opts).unwrap();
        let want = common::top_eigvecs(&dense, r);
        worst_sin = worst_sin.max(common::sin_angle(&want, &common::to_matrix(&got.subspace)));
        let norm = spectral_norm(&sparse, 1e-13).unwrap();
        let oracle = common::spectral_norm(&dense);
        worst_norm = worst_norm.max((norm - oracle).abs() / oracle);
    }
    for _ in 0..50 {
        let rows = rng.random_range(4..=64);
        let cols = rng.random_range(4..=64);
        let r = rng.random_range(1..=3);
        let density = rng.random_range(0.2..0.6);
        let (dense, sparse) = common::random_bipartite(rows, cols, density, &mut rng);
        let got = top_left_singular_space(&sparse, r, &opts).unwrap();
        let (want, _) = common::top_left_singular(&dense, r);
        worst_sin = worst_sin.max(common::sin_angle(&want, &common::to_matrix(&got.subspace)));
        let norm = spectral_norm(&RowGram(&sparse), 1e-13).unwrap();
        let oracle = common::spectral_norm(&dense).powi(2);
        worst_norm = worst_norm.max((norm - oracle).abs() / oracle);
    }
    let seconds = start.elapsed().as_secs_f64();
    let pass = worst_sin < 1e-8 && worst_norm < 1e-8 && seconds < 10.0;
    report(
        1,
        pass,
        &format!("max sin = {worst_sin:.2e} (< 1e-8), max norm rel err = {worst_norm:.2e} (< 1e-8), {seconds:.2} s (< 10 s)"),
    );
    assert!(pass);
}

#[test]
fn criterion_2_gamma_oracle() {
    let mut rng = common::rng(0xacce_0002);
    let mut mismatches = 0;
    for _ in 0..500 {
        let k = rng.random_range(1..=5);
        let n = rng.random_range(k..=12);
        // Every true block is nonempty.
        let mut truth: Vec<usize> = (0..n).map(|v| if v < k { v } else { rng.random_range(0..k) }).collect();
        for i in (1..n).rev() {
            truth.swap(i, rng.random_range(0..=i));
        }
        let pred: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
        let got = gamma_correctness(&Clustering::new(pred.clone(), k).unwrap(), &Clustering::new(truth.clone(), k).unwrap())
            .unwrap()
            .gamma;
        if got != common::brute_force_gamma(&pred, &truth, k) {
            mismatches += 1;
        }
    }
    report(2, mismatches == 0, &format!("{mismatches} of 500 pairs differ from exhaustive minimization"));
    assert_eq!(mismatches, 0);
}

#[test]
fn criterion_3_two_block_end_to_end() {
    let params = SbmParams::two_block(7500, 10.0, 3.0).unwrap();
    let mut gammas = Vec::new();
    let mut full_graph = Vec::new();
    let mut slowest: f64 = 0.0;
    for seed in 0..10 {
        let (g, truth) = sample_sbm(&params, seed).unwrap();
        let start = Instant::now();
        let pred = partition_two(&g, 10.0, 3.0, seed).unwrap();
        slowest = slowest.max(start.elapsed().as_secs_f64());
        gammas.push(gamma_correctness(&pred, &truth).unwrap().gamma);
        // Diagnostic only: the spectral step alone on all edges (d = a + b).
        let cfg = TwoBlockConfig::new(10.0, 3.0).unwrap();
        let full = spectral_partition_two(&g, &cfg).unwrap();
        full_graph.push(gamma_correctness(&full, &truth).unwrap().gamma);
    }
    let ok = gammas.iter().filter(|&&g| g <= 0.15).count();
    let pass = ok >= 9 && slowest < 30.0;
    report(
        3,
        pass,
        &format!(
            "{ok}/10 trials with gamma <= 0.15 (need 9), gammas {}, slowest {slowest:.2} s (< 30 s); \
             diagnostic spectral step on the full graph: {}",
            fmt_list(&gammas),
            fmt_list(&full_graph)
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_4_multi_block_end_to_end() {
    let params = SbmParams::k_block(3000, 3, 22.0, 2.0).unwrap();
    let mut outcomes = Vec::new();
    let mut slowest: f64 = 0.0;
    for seed in 0..10 {
        let (g, truth) = sample_sbm(&params, seed).unwrap();
        let start = Instant::now();
        let result = partition_multi(&g, 22.0, 2.0, 3, seed);
        slowest = slowest.max(start.elapsed().as_secs_f64());
        outcomes.push(match result {
            Ok(pred) => format!("{:.3}", gamma_correctness(&pred, &truth).unwrap().gamma),
            Err(e) => format!("error ({e})"),
        });
    }
    let ok = outcomes.iter().filter(|s| s.parse::<f64>().is_ok_and(|g| g <= 0.15)).count();
    let pass = ok >= 8 && slowest < 30.0;
    report(
        4,
        pass,
        &format!("{ok}/10 trials with gamma <= 0.15 (need 8), outcomes [{}], slowest {slowest:.2} s (< 30 s)", outcomes.join("; ")),
    );
    assert!(pass);
}

#[test]
fn criterion_5_norm_bounds() {
    let params = SbmParams::two_block(4000, 30.0, 5.0).unwrap();
    let r = verify_norm_bounds(&params, 20, 0xacce_0005).unwrap();
    let delta_ok = r.trials.iter().filter(|t| t.delta_norm <= 1.0).count();
    let e_ok = r.trials.iter().all(|t| t.e_over_sqrt_d <= 10.0);
    let slack = r.min_davis_kahan_slack.unwrap_or(f64::NEG_INFINITY);
    let max_delta = r.trials.iter().map(|t| t.delta_norm).fold(0.0, f64::max);
    let pass = delta_ok >= 19 && e_ok && slack >= -1e-6;
    report(
        5,
        pass,
        &format!(
            "||Delta|| <= 1 in {delta_ok}/20 (max {max_delta:.3}), max ||E||/sqrt(d) = {:.3} (<= 10), \
             min Davis-Kahan slack = {slack:.4} (>= -1e-6)",
            r.max_e_over_sqrt_d
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_6_two_block_correction() {
    let params = SbmParams::two_block(4000, 50.0, 5.0).unwrap();
    let bound = gamma_bound_two(50.0, 5.0);
    let trials = correction_suite_two(&params, 50, 0.1, 0xacce_0006).unwrap();
    let limit = 3.0 * bound;
    let ok = trials.iter().filter(|t| t.output_gamma <= limit).count();
    let worst = trials.iter().map(|t| t.output_gamma).fold(0.0, f64::max);
    let pass = ok >= 45;
    report(
        6,
        pass,
        &format!("{ok}/50 trials with error <= 3 x {bound:.4} = {limit:.4} (need 45), worst post-correction gamma {worst:.4}"),
    );
    assert!(pass);
}

#[test]
fn criterion_7_multi_correction_and_merge() {
    let params = SbmParams::k_block(6000, 3, 60.0, 6.0).unwrap();
    let trials = multi_stage_suite(&params, 50, 0.1, 0xacce_0007).unwrap();
    let raw = gamma_bound_multi(60.0, 6.0, 3);
    let c_limit = 3.0 * trials[0].correction_bound;
    let m_limit = 3.0 * trials[0].merge_bound;
    let c_ok = trials.iter().filter(|t| t.correction_gamma <= c_limit).count();
    let m_ok = trials.iter().filter(|t| t.merge_gamma <= m_limit).count();
    let c_worst = trials.iter().map(|t| t.correction_gamma).fold(0.0, f64::max);
    let m_worst = trials.iter().map(|t| t.merge_gamma).fold(0.0, f64::max);
    let pass = c_ok >= 45 && m_ok >= 45;
    report(
        7,
        pass,
        &format!(
            "correction {c_ok}/50 within {c_limit:.4} (worst {c_worst:.4}), merge {m_ok}/50 within {m_limit:.4} (worst {m_worst:.4}), \
             need 45 each; unclamped bounds {:.4} and {:.4}",
            raw.correction, raw.merge
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_8_projection_property() {
    let params = SbmParams::k_block(6000, 3, 60.0, 6.0).unwrap();
    let trials = projection_suite(&params, 20, 0xacce_0008).unwrap();
    let ok = trials.iter().filter(|t| t.good_fraction >= 0.5).count();
    let fractions: Vec<f64> = trials.iter().map(|t| t.good_fraction).collect();
    let exact: usize = trials.iter().map(|t| t.good_exact_variance).sum();
    let columns: usize = trials.iter().map(|t| t.columns).sum();
    let max_noise = trials.iter().map(|t| t.max_projected_noise).fold(0.0, f64::max);
    let pass = ok >= 18;
    report(
        8,
        pass,
        &format!(
            "{ok}/20 trials with good fraction >= 1/2 (need 18), min fraction {:.3}, threshold {:.4}, max ||P_W e|| {max_noise:.4}; \
             with the exact entry variance {exact}/{columns} columns pass",
            fractions.iter().copied().fold(1.0, f64::min),
            trials[0].threshold
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_9_censor_end_to_end() {
    let n = 2000;
    let p = 30.0 / n as f64;
    let mut gammas = Vec::new();
    for seed in 0..10 {
        let inst = sample_censor(n, p, 0.1, seed).unwrap();
        let pred = partition_censor(&inst, &CensorConfig::default()).unwrap();
        gammas.push(gamma_correctness(&pred, &inst.truth()).unwrap().gamma);
    }
    let ok = gammas.iter().filter(|&&g| g <= 0.2).count();
    let pass = ok >= 8;
    report(9, pass, &format!("{ok}/10 trials with gamma <= 0.2 (need 8), gammas {}", fmt_list(&gammas)));
    assert!(pass);
}

fn clustering_bytes(c: &Clustering) -> Vec<u8> {
    let mut out = Vec::new();
    gio::write_clustering(c, &mut out).unwrap();
    out
}

fn experiment_bytes(toml: &str) -> (Vec<u8>, Vec<u8>) {
    let cfg = ExperimentConfig::from_toml_str(toml).unwrap();
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        run_experiment(&cfg, Some(d.path())).unwrap();
    }
    let read = |d: &tempfile::TempDir| std::fs::read(d.path().join("report.jsonl")).unwrap();
    (read(&dirs[0]), read(&dirs[1]))
}

#[test]
fn criterion_10_determinism() {
    let mut failures = Vec::new();

    let two = SbmParams::two_block(600, 30.0, 3.0).unwrap();
    let run_two = || {
        let (g, _) = sample_sbm(&two, 11).unwrap();
        clustering_bytes(&partition_two(&g, 30.0, 3.0, 11).unwrap())
    };
    if run_two() != run_two() {
        failures.push("partition_two");
    }

    let multi = SbmParams::k_block(3000, 3, 100.0, 5.0).unwrap();
    let run_multi = || {
        let (g, _) = sample_sbm(&multi, 1).unwrap();
        clustering_bytes(&partition_multi(&g, 100.0, 5.0, 3, 1).unwrap())
    };
    if run_multi() != run_multi() {
        failures.push("partition_multi");
    }

    let run_censor = || {
        let inst = sample_censor(500, 0.05, 0.1, 13).unwrap();
        clustering_bytes(&partition_censor(&inst, &CensorConfig::default()).unwrap())
    };
    if run_censor() != run_censor() {
        failures.push("partition_censor");
    }

    let configs = [
        ("two-block", "pipeline = \"two-block\"\ntrials = 3\nseed = 1\n[model]\nn = 400\na = 40.0\nb = 4.0\n"),
        ("multi-block", "pipeline = \"multi-block\"\ntrials = 2\nseed = 2\n[model]\nn = 1500\nk = 3\na = 100.0\nb = 5.0\n"),
        ("censor", "pipeline = \"censor\"\ntrials = 3\nseed = 3\n[model]\nn = 300\np = 0.1\nepsilon = 0.1\n"),
        ("norm-verify", "pipeline = \"norm-verify\"\ntrials = 2\nseed = 4\n[model]\nn = 300\na = 30.0\nb = 5.0\n"),
    ];
    for (name, toml) in configs {
        let (first, second) = experiment_bytes(toml);
        if first.is_empty() || first != second {
            failures.push(name);
        }
    }
    let pass = failures.is_empty();
    report(
        10,
        pass,
        &if pass {
            "3 pipelines and 4 experiment reports byte-identical across reruns".to_string()
        } else {
            format!("differing outputs: {}", failures.join(", "))
        },
    );
    assert!(pass);
}
