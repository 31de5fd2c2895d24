use erlang_loss::simulator::{ServiceDistribution, GENERATOR};
use erlang_loss::{erlang_b_int, simulate, simulate_many, OfferedLoad, SimConfig, SimReport};

fn load(v: f64) -> OfferedLoad {
    OfferedLoad::new(v).unwrap()
}

fn configs(n: u64, lambda: f64, arrivals: u64) -> Vec<SimConfig> {
    (1..=10)
        .map(|seed| SimConfig::new(n, load(lambda), seed).with_arrivals(arrivals))
        .collect()
}

fn within_three_batch_errors(runs: &[erlang_loss::SimResult], analytic: f64) -> usize {
    runs.iter()
        .filter(|r| (r.estimate - analytic).abs() < 3.0 * r.batch_std_error.unwrap())
        .count()
}

#[test]
fn estimates_match_the_formula() {
    for (n, lambda) in [(1, 1.0), (2, 1.0), (5, 3.0), (10, 10.0)] {
        let analytic = erlang_b_int(n, load(lambda)).value();
        let runs = simulate_many(&configs(n, lambda, 200_000)).unwrap();
        let within = within_three_batch_errors(&runs, analytic);
        assert!(within >= 9, "n={n} λ={lambda}: {within}/10");
        // and no systematic offset: the mean of ten runs sits close to the formula
        let mean = runs.iter().map(|r| r.estimate).sum::<f64>() / 10.0;
        let se = runs[0].batch_std_error.unwrap() / 10f64.sqrt();
        assert!((mean - analytic).abs() < 4.0 * se, "n={n} λ={lambda}: mean {mean}");
    }
}

#[test]
fn binomial_error_understates_the_spread_under_load() {
    // blocked calls cluster, so the seed-to-seed spread exceeds sqrt(p(1-p)/N)
    let runs = simulate_many(&configs(10, 10.0, 200_000)).unwrap();
    let est: Vec<f64> = runs.iter().map(|r| r.estimate).collect();
    let mean = est.iter().sum::<f64>() / 10.0;
    let sd = (est.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / 9.0).sqrt();
    let batch = runs.iter().map(|r| r.batch_std_error.unwrap()).sum::<f64>() / 10.0;
    assert!(batch > 1.4 * runs[0].std_error, "batch {batch} vs binomial {}", runs[0].std_error);
    assert!(sd > 1.2 * runs[0].std_error);
}

#[test]
fn extra_server_lowers_average_blocking() {
    for (n, lambda) in [(1, 1.0), (2, 1.0), (5, 3.0), (10, 10.0)] {
        let mean = |n| {
            let runs = simulate_many(&configs(n, lambda, 50_000)).unwrap();
            runs.iter().map(|r| r.estimate).sum::<f64>() / runs.len() as f64
        };
        assert!(mean(n + 1) < mean(n));
    }
}

#[test]
fn deterministic_service_gives_the_same_blocking() {
    let analytic = erlang_b_int(3, load(2.0)).value();
    let cfgs: Vec<_> = configs(3, 2.0, 200_000)
        .into_iter()
        .map(|c| c.with_service(ServiceDistribution::Deterministic))
        .collect();
    let runs = simulate_many(&cfgs).unwrap();
    let within = within_three_batch_errors(&runs, analytic);
    assert!(within >= 9, "{within}/10");
}

#[test]
fn runs_are_reproducible() {
    let cfg = SimConfig::new(4, load(3.5), 2024).with_arrivals(30_000);
    let a = simulate(&cfg).unwrap();
    let b = simulate(&cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
    assert_eq!(a.generator, GENERATOR);
}

#[test]
fn report_json_fields() {
    let cfg = SimConfig::new(0, load(1.0), 7).with_arrivals(100);
    let report = SimReport::new(&cfg, &simulate(&cfg).unwrap());
    let v = serde_json::to_value(&report).unwrap();
    for key in [
        "servers", "lambda", "arrivals", "seed", "blocked", "estimate", "std_error", "analytic",
        "z_score", "batch_std_error",
    ] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(v["estimate"], 1.0);
    assert_eq!(v["blocked"], 100);
}
