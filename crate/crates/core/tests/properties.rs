use modcomp_core::fft::Fft;
use modcomp_core::grid::UniformGrid;
use modcomp_core::modnorm::{mod_norm, Exponent};
use modcomp_core::operators::{kohn_nirenberg_values, loss_index, CompositionMap, KnQuadrature};
use modcomp_core::signal::AnalyticSignal;
use modcomp_core::stft::{stft_point, TfGrid};
use modcomp_core::symbol::{symbol_eval, PerturbationMap};
use modcomp_core::ultradiff::{enumerate_partitions, FaaDiBruno};
use modcomp_core::weights::{SubadditiveWeight, TfWeight};
use modcomp_core::Complex64;
use proptest::prelude::*;

fn weight() -> impl Strategy<Value = SubadditiveWeight> {
    prop_oneof![
        (1.1f64..4.0).prop_map(|s| SubadditiveWeight::gevrey(s).unwrap()),
        (1.1f64..3.0).prop_map(|q| SubadditiveWeight::log_power(q).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fft_round_trip_and_parseval(values in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 64)) {
        let fft = Fft::new(64).unwrap();
        let x: Vec<Complex64> = values.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
        let mut y = x.clone();
        fft.forward(&mut y);
        let energy_x: f64 = x.iter().map(|v| v.norm_sqr()).sum();
        let energy_y: f64 = y.iter().map(|v| v.norm_sqr()).sum();
        prop_assert!((energy_y / 64.0 - energy_x).abs() <= 1e-12 * (1.0 + energy_x));
        fft.inverse(&mut y);
        for (a, b) in x.iter().zip(&y) {
            prop_assert!((a - b / 64.0).norm() < 1e-13);
        }
    }

    #[test]
    fn weights_are_subadditive(w in weight(), s in 0.0f64..1e4, t in 0.0f64..1e4) {
        prop_assert!(w.omega(s + t) <= (w.omega(s) + w.omega(t)) * (1.0 + 1e-12));
    }

    #[test]
    fn conjugate_search_matches_closed_form(s in 1.1f64..4.0, y in 0.0f64..60.0) {
        let w = SubadditiveWeight::gevrey(s).unwrap();
        let closed = w.young_closed_form(y).unwrap();
        let numeric = w.young_conjugate_numeric(y).unwrap();
        prop_assert!((closed - numeric).abs() <= 1e-8 * closed.abs().max(1.0));
    }

    #[test]
    fn conjugate_is_convex(w in weight(), y in 0.5f64..20.0, dy in 0.01f64..2.0) {
        let dy = dy.min(y);
        // Log-power maximisers beyond the search bound report divergence.
        let values: Result<Vec<f64>, _> = [y - dy, y, y + dy].iter().map(|&v| w.young_conjugate(v)).collect();
        prop_assume!(values.is_ok());
        let [lo, mid, hi] = <[f64; 3]>::try_from(values.unwrap()).unwrap();
        prop_assert!(2.0 * mid <= lo + hi + 1e-6 * mid.abs().max(1.0));
    }

    #[test]
    fn symbol_has_unit_modulus(a in -1.0f64..1.0, x in -20.0f64..20.0, y in -50.0f64..50.0) {
        let phi = PerturbationMap::sine(a);
        prop_assert!((symbol_eval(&phi, &[x], &[y]).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn stft_is_translation_covariant(a in -3.0f64..3.0, x in -2.0f64..2.0, xi in -2.0f64..2.0) {
        let f = AnalyticSignal::gaussian(1.0, 1.0, 0.2, 0.7);
        let g = AnalyticSignal::normalized_gaussian(1.0);
        let patch = UniformGrid::fft(6.0, 256).unwrap();
        let shifted = f.translated(a);
        let lhs = stft_point(|t| shifted.eval(t), &g, x + a, xi, &patch).norm();
        let rhs = stft_point(|t| f.eval(t), &g, x, xi, &patch).norm();
        prop_assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn unweighted_norm_is_shift_invariant(a in -3.0f64..3.0, beta in -2.0f64..2.0) {
        let grid = TfGrid::new(UniformGrid::new(10.0, 80).unwrap(), UniformGrid::fft(4.0, 128).unwrap()).unwrap();
        let g = AnalyticSignal::normalized_gaussian(1.0);
        let f = AnalyticSignal::normalized_gaussian(1.0);
        let base = mod_norm(&f, &g, &TfWeight::Unit, Exponent::Two, &grid).unwrap().norm;
        let moved = mod_norm(&f.tf_shift(a, beta), &g, &TfWeight::Unit, Exponent::Two, &grid).unwrap().norm;
        prop_assert!((base - moved).abs() < 1e-6 * base);
    }

    #[test]
    fn kohn_nirenberg_is_linear(c_re in -2.0f64..2.0, c_im in -2.0f64..2.0, a in -2.0f64..2.0, x in -4.0f64..4.0) {
        let psi = CompositionMap::perturbed_identity(PerturbationMap::sine(0.3)).unwrap();
        let f = AnalyticSignal::normalized_gaussian(1.0).tf_shift(a, 0.5);
        let c = Complex64::new(c_re, c_im);
        let q = KnQuadrature::default();
        let plain = kohn_nirenberg_values(&psi, &f, &[x], &q).unwrap()[0];
        let scaled = kohn_nirenberg_values(&psi, &f.scaled(c), &[x], &q).unwrap()[0];
        prop_assert!((scaled - c * plain).norm() < 1e-12 * (1.0 + plain.norm()));
    }

    #[test]
    fn loss_index_n_is_minimal(s in 0.0f64..5.0, b in 0.0f64..0.95, d in 1u32..4) {
        let idx = loss_index(s, b, d).unwrap();
        let need = 2.0 * (s + d as f64);
        prop_assert!((1.0 - b) * idx.n as f64 > need);
        prop_assert!((1.0 - b) * (idx.n as f64 - 1.0) <= need);
    }

    #[test]
    fn partition_weights_sum_to_power_of_two(n in 1usize..=25) {
        prop_assert_eq!(enumerate_partitions(n).unwrap().weight_sum(), 1u128 << (n - 1));
    }

    #[test]
    fn faa_di_bruno_of_linear_exponent(re in -2.0f64..2.0, im in -2.0f64..2.0, n in 1usize..12) {
        let c = Complex64::new(re, im);
        let mut h = vec![Complex64::new(0.0, 0.0); n + 1];
        h[1] = c;
        let value = FaaDiBruno::new(n).unwrap().exp_derivative(n, &h).unwrap();
        let expect = c.powu(n as u32);
        prop_assert!((value - expect).norm() <= 1e-12 * (1.0 + expect.norm()));
    }
}
