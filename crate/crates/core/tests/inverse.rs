use erlang_loss::properties::DEFAULT_LOADS;
use erlang_loss::{
    erlang_b_int, erlang_b_real, min_servers, solve_servers_real, solve_traffic, BlockingTarget,
    OfferedLoad, QuadratureConfig, SolveOptions,
};

fn load(v: f64) -> OfferedLoad {
    OfferedLoad::new(v).unwrap()
}

fn target(v: f64) -> BlockingTarget {
    BlockingTarget::new(v).unwrap()
}

#[test]
fn integer_servers_round_trip() {
    for lambda in DEFAULT_LOADS {
        for n in 0..=60u64 {
            let b = erlang_b_int(n, load(lambda)).value();
            assert_eq!(min_servers(load(lambda), target(b)).unwrap(), n, "n={n} λ={lambda}");
        }
    }
}

#[test]
fn real_servers_round_trip() {
    let (opts, quad) = (SolveOptions::default(), QuadratureConfig::default());
    for lambda in DEFAULT_LOADS {
        for k in 0..=40 {
            let x = 0.25 + 0.5 * k as f64;
            let b = erlang_b_real(x, load(lambda), &quad).unwrap().value();
            let back = solve_servers_real(load(lambda), target(b), &opts, &quad).unwrap();
            assert!((back - x).abs() <= 1e-6, "x={x} λ={lambda}: {back}");
        }
    }
}

#[test]
fn traffic_round_trip() {
    let opts = SolveOptions::default();
    for lambda in DEFAULT_LOADS {
        for n in 1..=40u64 {
            let b = erlang_b_int(n, load(lambda)).value();
            let back = solve_traffic(n, target(b), &opts).unwrap().value();
            assert!((back - lambda).abs() / lambda <= 1e-6, "n={n} λ={lambda}: {back}");
        }
    }
}

#[test]
fn blocking_increases_with_load() {
    // solve_traffic brackets on this
    for n in [1u64, 2, 5, 10, 40, 100] {
        let mut prev = 0.0;
        for k in 1..=400 {
            let b = erlang_b_int(n, load(0.05 * 1.03f64.powi(k))).value();
            assert!(b > prev, "n={n} k={k}");
            prev = b;
        }
    }
}

#[test]
fn server_count_grows_as_target_tightens() {
    let l = load(25.0);
    let mut prev = 0;
    for t in [0.5, 0.2, 0.1, 0.05, 0.01, 1e-3, 1e-6, 1e-12] {
        let n = min_servers(l, target(t)).unwrap();
        assert!(n >= prev);
        assert!(erlang_b_int(n, l).value() <= t);
        assert!(n == 0 || erlang_b_int(n - 1, l).value() > t);
        prev = n;
    }
}
