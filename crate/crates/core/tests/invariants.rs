use spats::channel::{convolve_evolve, convolve_grid, fokker_planck_evolve, ConvolutionSpec, FokkerPlanckSpec};
use spats::negativity::{is_radially_symmetric, pnw_numeric, pnw_spats_analytic};
use spats::states::{
    evolve_fock_diagonal, mean_photon, random_zero_vacuum_state, spats_weights, ChannelParams, DEFAULT_TAIL_TOL,
};
use spats::threshold::{threshold_numeric_spats, threshold_spats};
use spats::wigner::{
    default_extent, eval_fock_diagonal_wigner, eval_fock_wigner, eval_spats_wigner_evolved, eval_spats_wigner_initial,
    eval_thermal_wigner, sample_grid, GridSpec, PhasePoint,
};

fn ch(n: f64, gt: f64) -> ChannelParams {
    ChannelParams::new(n, gt).unwrap()
}

const SEEDS: [f64; 3] = [0.0, 3.0 / 7.0, 1.0];

#[test]
fn analytic_and_numeric_negativity_agree() {
    for bar_n in SEEDS {
        for n in [0.0, 0.5] {
            let gt_c = threshold_spats(n);
            let mut gt = 0.0;
            while gt <= gt_c {
                let c = ch(n, gt);
                let analytic = pnw_spats_analytic(&c, bar_n).volume;
                let f = |pt| eval_spats_wigner_evolved(pt, &c, bar_n);
                let numeric = pnw_numeric(&f, default_extent(bar_n, n), 64, 1e-8).unwrap().volume;
                assert!(
                    (analytic - numeric).abs() < 1e-5,
                    "n̄={bar_n} n={n} γt={gt}: {analytic} vs {numeric}"
                );
                gt += 0.1;
            }
        }
    }
}

#[test]
fn negativity_is_monotone_and_noise_ordered() {
    for bar_n in SEEDS {
        for n in [0.0, 0.5] {
            let gt_c = threshold_spats(n);
            let values: Vec<f64> = (0..50)
                .map(|k| pnw_spats_analytic(&ch(n, gt_c * k as f64 / 49.0), bar_n).volume)
                .collect();
            assert!(values.windows(2).all(|w| w[1] <= w[0]), "n̄={bar_n} n={n}");
        }
        let limit = threshold_spats(0.5);
        for k in 1..20 {
            let gt = limit * k as f64 / 20.0;
            let noisy = pnw_spats_analytic(&ch(0.5, gt), bar_n).volume;
            let quiet = pnw_spats_analytic(&ch(0.0, gt), bar_n).volume;
            assert!(noisy < quiet, "n̄={bar_n} γt={gt}");
        }
    }
}

#[test]
fn numeric_negativity_vanishes_past_threshold() {
    for bar_n in SEEDS {
        for n in [0.0, 0.5, 1.0] {
            let c = ch(n, threshold_spats(n) + 1e-3);
            let f = |pt| eval_spats_wigner_evolved(pt, &c, bar_n);
            let v = pnw_numeric(&f, default_extent(bar_n, n), 64, 1e-9).unwrap();
            assert_eq!(v.volume, 0.0);
        }
    }
}

#[test]
fn region_radius_brackets_the_sign_change() {
    for bar_n in SEEDS {
        for (n, gt) in [(0.0, 0.2), (0.5, 0.1), (1.0, 0.05)] {
            let c = ch(n, gt);
            let r = pnw_spats_analytic(&c, bar_n).region_radius.unwrap();
            for theta in [0.0, 1.1, 2.9] {
                let (s, co) = f64::sin_cos(theta);
                let inside = eval_spats_wigner_evolved(PhasePoint::new((r - 1e-6) * co, (r - 1e-6) * s), &c, bar_n);
                let outside = eval_spats_wigner_evolved(PhasePoint::new((r + 1e-6) * co, (r + 1e-6) * s), &c, bar_n);
                assert!(inside < 0.0 && outside >= 0.0);
            }
        }
    }
}

#[test]
fn threshold_is_seed_independent() {
    for n in [0.0, 0.5, 1.0, 2.0] {
        let roots: Vec<f64> = [0.0, 3.0 / 7.0, 1.0, 10.0]
            .iter()
            .map(|&b| threshold_numeric_spats(n, b, 1e-12).unwrap().gamma_t_c_numeric)
            .collect();
        for r in &roots {
            assert!((r - roots[0]).abs() < 1e-8);
        }
    }
}

#[test]
fn grid_is_non_negative_just_past_threshold() {
    for bar_n in [0.0, 3.0 / 7.0, 1.0, 5.0] {
        for n in [0.0, 0.5, 2.0] {
            let c = ch(n, 1.01 * threshold_spats(n));
            let g = sample_grid(
                |pt| eval_spats_wigner_evolved(pt, &c, bar_n),
                &GridSpec::default_for(bar_n, n).unwrap(),
            )
            .unwrap();
            assert!(g.min() >= -1e-10);
        }
    }
}

#[test]
fn finite_difference_conserves_mass() {
    let grid = GridSpec::square(6.0, 201).unwrap();
    for (bar_n, n) in [(1.0, 0.5), (0.0, 0.0)] {
        let g = sample_grid(|pt| eval_spats_wigner_initial(pt, bar_n), &grid).unwrap();
        let run = fokker_planck_evolve(&g, &ch(n, 1.0), &FokkerPlanckSpec::adi_for(&grid, n)).unwrap();
        assert!(run.mass_drift().abs() < 1e-3, "drift {}", run.mass_drift());
    }
}

#[test]
fn convolution_of_positive_input_is_positive() {
    let init = |pt| eval_thermal_wigner(pt, 0.7);
    let c = ch(0.3, 0.6);
    for k in 0..12 {
        let pt = PhasePoint::new(-4.0 + 0.7 * k as f64, 0.5 * (k as f64).sin());
        assert!(convolve_evolve(&init, &c, pt, &ConvolutionSpec::default()).unwrap() >= 0.0);
    }
}

#[test]
fn four_routes_agree_for_random_states() {
    // Fock-basis evolution against the convolution of the initial Laguerre series.
    let state = random_zero_vacuum_state(11, 6).unwrap();
    let c = ch(0.5, 0.25);
    let evolved = evolve_fock_diagonal(&state, &c, 1e-13).unwrap();
    let init = |pt| eval_fock_diagonal_wigner(pt, &state).unwrap();
    for pt in [
        PhasePoint::ORIGIN,
        PhasePoint::new(0.9, -0.3),
        PhasePoint::new(-1.7, 1.2),
    ] {
        let a = eval_fock_diagonal_wigner(pt, &evolved).unwrap();
        let b = convolve_evolve(&init, &c, pt, &ConvolutionSpec::default()).unwrap();
        assert!((a - b).abs() < 1e-8, "{a} vs {b}");
    }
    assert!((mean_photon(&evolved) - (0.5 + (mean_photon(&state) - 0.5) * (-0.25f64).exp())).abs() < 1e-9);
}

#[test]
fn spats_fock_route_matches_closed_form_across_channels() {
    for bar_n in [0.0, 3.0 / 7.0, 1.0] {
        let state = spats_weights(bar_n, DEFAULT_TAIL_TOL).unwrap();
        for (n, gt) in [(0.0, 0.5), (0.5, 0.3), (2.0, 1.2)] {
            let c = ch(n, gt);
            let evolved = evolve_fock_diagonal(&state, &c, 1e-13).unwrap();
            for k in 0..10 {
                let pt = PhasePoint::new(0.4 * k as f64, 0.1 * k as f64);
                let a = eval_fock_diagonal_wigner(pt, &evolved).unwrap();
                let b = eval_spats_wigner_evolved(pt, &c, bar_n);
                assert!((a - b).abs() < 1e-6);
            }
        }
    }
}

#[test]
fn generic_negativity_path_on_displaced_two_photon_state() {
    // Annulus volume of |2⟩: ½ ∫ L_2(x) e^{-x/2} dx between the roots 2 ± √2.
    let want = 0.36449462889356704;
    let shifted = |pt: PhasePoint| eval_fock_wigner(PhasePoint::new(pt.q - 0.6, pt.p + 0.4), 2).unwrap();
    assert!(!is_radially_symmetric(&shifted, 6.0));
    let v = pnw_numeric(&shifted, 6.0, 64, 1e-7).unwrap();
    assert!((v.volume - want).abs() < 1e-5, "{}", v.volume);
}

#[test]
fn convolution_preserves_normalization() {
    for (bar_n, n, gt) in [(0.0, 0.0, 0.5), (1.0, 0.5, 0.3)] {
        let c = ch(n, gt);
        let grid = GridSpec::square(default_extent(bar_n, n), 61).unwrap();
        let g = convolve_grid(
            &|pt| eval_spats_wigner_initial(pt, bar_n),
            &c,
            &grid,
            &ConvolutionSpec::default(),
        )
        .unwrap();
        assert!((g.integral() - 1.0).abs() < 1e-8, "{}", g.integral());
    }
}
