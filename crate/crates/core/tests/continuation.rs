use erlang_loss::properties::DEFAULT_LOADS;
use erlang_loss::{erlang_b_int, erlang_b_real, phi_real, second_difference, OfferedLoad, QuadratureConfig};

fn load(v: f64) -> OfferedLoad {
    OfferedLoad::new(v).unwrap()
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn unreduced() -> QuadratureConfig {
    QuadratureConfig {
        reduction_threshold: f64::INFINITY,
        ..Default::default()
    }
}

#[test]
fn agrees_with_integer_recursion() {
    let cfg = QuadratureConfig::default();
    for lambda in DEFAULT_LOADS {
        for n in 0..=50u64 {
            let exact = erlang_b_int(n, load(lambda));
            let real = erlang_b_real(n as f64, load(lambda), &cfg).unwrap();
            assert!(
                (real.ln_value() - exact.ln_value()).abs() <= 1e-10,
                "n={n} λ={lambda}: {} vs {}",
                real.value(),
                exact.value()
            );
        }
    }
}

#[test]
fn full_quadrature_agrees_with_integer_recursion() {
    // no recursion at all: the integral is taken at the integer argument itself
    let cfg = unreduced();
    for lambda in [0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0] {
        for n in 0..=20u64 {
            let exact = erlang_b_int(n, load(lambda)).value();
            let real = erlang_b_real(n as f64, load(lambda), &cfg).unwrap().value();
            assert!(rel_err(real, exact) <= 1e-10, "n={n} λ={lambda}: {real} vs {exact}");
        }
    }
}

#[test]
fn recursion_identity_at_real_arguments() {
    for cfg in [QuadratureConfig::default(), unreduced()] {
        for lambda in [0.5, 1.0, 3.7, 10.0, 50.0] {
            let l = load(lambda);
            for k in 0..=36 {
                let x = 0.27 * k as f64;
                let b0 = erlang_b_real(x, l, &cfg).unwrap().value();
                let b1 = erlang_b_real(x + 1.0, l, &cfg).unwrap().value();
                let step = lambda * b0 / (x + 1.0 + lambda * b0);
                assert!(rel_err(b1, step) <= 1e-9, "x={x} λ={lambda} threshold={}", cfg.reduction_threshold);
            }
        }
    }
}

#[test]
fn reduced_and_unreduced_evaluations_agree() {
    let l = load(4.0);
    for x in [0.3, 1.7, 2.5, 6.1] {
        let a = erlang_b_real(x, l, &QuadratureConfig::default()).unwrap().value();
        let b = erlang_b_real(x, l, &unreduced()).unwrap().value();
        assert!(rel_err(a, b) <= 1e-11, "x={x}");
    }
}

#[test]
fn strictly_decreasing_between_integers() {
    let cfg = QuadratureConfig::default();
    let l = load(2.0);
    let mut prev = 1.0;
    for k in 1..=40 {
        let b = erlang_b_real(0.1 * k as f64, l, &cfg).unwrap().value();
        assert!(b < prev && b > 0.0);
        prev = b;
    }
}

#[test]
fn phi_continuation_endpoints() {
    let cfg = QuadratureConfig::default();
    let l = load(3.0);
    assert_eq!(phi_real(-1.0, l, &cfg).unwrap().value(), 0.0);
    let p = phi_real(-0.5, l, &cfg).unwrap().value();
    assert!(p > 0.0 && p < 1.0);
    for n in 0..10 {
        let a = phi_real(n as f64, l, &cfg).unwrap().value();
        let b = erlang_loss::phi(n, l).unwrap().value();
        assert!(rel_err(a, b) <= 1e-12);
    }
    assert!(phi_real(-1.5, l, &cfg).is_err());
}

#[test]
fn second_difference_of_a_parabola() {
    let d = second_difference(|x| Ok::<_, ()>(x * x), 3.0, 0.5).unwrap();
    assert!((d - 0.5).abs() < 1e-14);
}

#[test]
fn rejects_bad_arguments() {
    let cfg = QuadratureConfig::default();
    assert!(erlang_b_real(-0.1, load(1.0), &cfg).is_err());
    assert!(erlang_b_real(f64::NAN, load(1.0), &cfg).is_err());
    let bad = QuadratureConfig {
        rel_tol: 0.0,
        ..cfg
    };
    assert!(erlang_b_real(0.5, load(1.0), &bad).is_err());
}
