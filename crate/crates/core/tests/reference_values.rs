//! Values frozen from a 40-digit evaluation (`tests/oracles/reference_values.py`).

#![allow(clippy::excessive_precision)]

use approx::assert_relative_eq;
use erlang_loss::{
    erlang_b_int, erlang_b_real, log_binomial, min_servers, phi_real, scaled_partial_sum,
    solve_servers_real, solve_traffic, BlockingTarget, OfferedLoad, QuadratureConfig,
    SolveOptions,
};

fn load(v: f64) -> OfferedLoad {
    OfferedLoad::new(v).unwrap()
}

fn target(v: f64) -> BlockingTarget {
    BlockingTarget::new(v).unwrap()
}

#[test]
fn poisson_scaled_sums() {
    // (n, λ, CDF, upper tail)
    let cases: &[(u64, f64, f64, f64)] = &[
        (0, 0.1, 0.904_837_418_035_959_6, 0.095_162_581_964_040_43),
        (1, 0.1, 0.995_321_159_839_555_5, 0.004_678_840_160_444_469_5),
        (5, 0.1, 0.999_999_998_725_101_3, 1.274_898_692_229_791_5e-9),
        (20, 0.1, 1.0, 1.779_118_242_341_984_9e-41),
        (100, 0.1, 1.0, 9.608_852_061_429_909e-262),
        (0, 1.0, 0.367_879_441_171_442_3, 0.632_120_558_828_557_7),
        (5, 1.0, 0.999_405_815_182_418_3, 5.941_848_175_816_93e-4),
        (20, 1.0, 1.0, 7.542_625_077_205_278e-21),
        (100, 1.0, 1.0, 3.941_475_890_637_520_1e-161),
        (0, 10.0, 4.539_992_976_248_485e-5, 0.999_954_600_070_237_5),
        (5, 10.0, 0.067_085_962_879_031_78, 0.932_914_037_120_968_2),
        (20, 10.0, 0.998_411_739_338_142, 0.001_588_260_661_858_048_2),
        (100, 10.0, 1.0, 5.339_405_460_719_71e-64),
        (0, 100.0, 3.720_075_976_020_836e-44, 1.0),
        (20, 100.0, 1.905_558_742_030_012e-22, 1.0),
        (100, 100.0, 0.526_562_198_529_998_5, 0.473_437_801_470_001_5),
    ];
    for &(n, lam, cdf, tail) in cases {
        let s = scaled_partial_sum(n, load(lam));
        assert_relative_eq!(s.value(), cdf, max_relative = 1e-13);
        assert_relative_eq!(s.tail(), tail, max_relative = 1e-13);
    }
}

#[test]
fn scaled_sums_far_outside_the_double_range() {
    let s = scaled_partial_sum(10, load(1000.0));
    assert_relative_eq!(s.ln_value(), -946.016_819_629_632_8, max_relative = 1e-14);
    assert_relative_eq!(
        scaled_partial_sum(100, load(1000.0)).value(),
        6.042_524_933_789_374e-293,
        max_relative = 1e-12
    );
}

#[test]
fn scaled_sum_at_one_hundred_thousand() {
    let s = scaled_partial_sum(100_000, load(1e5));
    assert!(s.value() > 0.0 && s.value() < 1.0);
    assert_relative_eq!(s.value(), 0.500_841_043_099_340_1, max_relative = 1e-12);
    assert_relative_eq!(
        scaled_partial_sum(99_000, load(1e5)).value(),
        7.742_008_294_447_389e-4,
        max_relative = 1e-11
    );
}

#[test]
fn binomial_logs() {
    assert_relative_eq!(log_binomial(1000, 500).unwrap(), 689.467_261_567_851_2, max_relative = 1e-13);
    assert_relative_eq!(log_binomial(1000, 999).unwrap(), 6.907_755_278_982_137, max_relative = 1e-13);
}

#[test]
fn integer_blocking() {
    let cases = [
        (10, 10.0, 0.214_582_343_107_347_34),
        (5, 3.0, 0.110_054_347_826_086_96),
        (200, 150.0, 1.503_866_038_716_371_5e-5),
    ];
    for (n, lam, b) in cases {
        assert_relative_eq!(erlang_b_int(n, load(lam)).value(), b, max_relative = 1e-13);
    }
}

#[test]
fn continuation_values() {
    let cfg = QuadratureConfig::default();
    let cases: &[(f64, f64, f64)] = &[
        (0.25, 0.1, 0.589_036_507_296_394_4),
        (0.25, 1.0, 0.856_642_590_689_382),
        (0.25, 10.0, 0.977_148_121_097_058),
        (0.25, 100.0, 0.997_524_573_517_936_4),
        (0.5, 0.1, 0.330_270_035_159_276_5),
        (0.5, 1.0, 0.725_196_777_358_348_6),
        (0.5, 10.0, 0.954_376_662_466_151_8),
        (0.5, 100.0, 0.995_049_265_775_312_8),
        (0.75, 0.1, 0.176_911_538_780_821_74),
        (0.75, 1.0, 0.606_207_440_416_718_7),
        (0.75, 10.0, 0.931_689_545_908_227_2),
        (0.75, 100.0, 0.992_574_077_618_304_4),
        (1.5, 0.1, 0.021_543_654_117_104_083),
        (1.5, 1.0, 0.325_902_313_331_259_14),
        (1.5, 10.0, 0.864_176_774_919_311_2),
        (1.5, 100.0, 0.985_149_239_241_824_5),
        (2.5, 0.1, 8.610_041_976_190_881e-4),
        (2.5, 1.0, 0.115_326_815_011_901_68),
        (2.5, 10.0, 0.775_619_088_794_859_3),
        (2.5, 100.0, 0.975_251_181_678_101_4),
        (7.3, 0.1, 4.886_044_428_892_82e-12),
        (7.3, 1.0, 3.963_644_528_113_896_4e-5),
        (7.3, 10.0, 0.387_287_009_442_359_05),
        (7.3, 100.0, 0.927_769_797_908_617_9),
        (15.9, 0.1, 7.204_007_632_695_77e-30),
        (15.9, 1.0, 2.326_532_536_839_981_6e-14),
        (15.9, 10.0, 0.023_481_542_211_825_91),
        (15.9, 100.0, 0.842_839_500_777_878_3),
    ];
    for &(x, lam, b) in cases {
        let got = erlang_b_real(x, load(lam), &cfg).unwrap().value();
        assert_relative_eq!(got, b, max_relative = 1e-12);
    }
    let b = erlang_b_real(0.5, load(1.0), &cfg).unwrap().value();
    assert!(b > 0.5 && b < 1.0);
    assert_relative_eq!(
        phi_real(0.5, load(1.0), &cfg).unwrap().value(),
        1.0 - 0.325_902_313_331_259_14,
        max_relative = 1e-12
    );
}

#[test]
fn dimensioning() {
    let opts = SolveOptions::default();
    let quad = QuadratureConfig::default();
    assert_eq!(min_servers(load(10.0), target(0.01)).unwrap(), 18);
    assert_eq!(min_servers(load(100.0), target(0.001)).unwrap(), 128);

    let x = solve_servers_real(load(1.0), target(0.35), &opts, &quad).unwrap();
    assert!(x > 1.0 && x < 2.0);
    assert!((x - 1.421_242_127_906_663_8).abs() <= 1e-9);

    let lam = solve_traffic(5, target(0.01), &opts).unwrap().value();
    assert_relative_eq!(lam, 1.360_786_796_662_545_8, max_relative = 1e-9);
    let lam = solve_traffic(30, target(0.02), &opts).unwrap().value();
    assert_relative_eq!(lam, 21.931_565_262_618_85, max_relative = 1e-9);
}
