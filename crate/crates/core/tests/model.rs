mod common;

use afsa_beam::channel::{self, Scenario};
use afsa_beam::oracle::{BeamPair, Feedback, Oracle};
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_beam<R: Rng>(rng: &mut R, m: usize, n: usize, power: f64) -> BeamPair {
    let w: Vec<C> = (0..m).map(|_| random_c(rng)).collect();
    let norm = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    BeamPair {
        w: w.iter().map(|x| x * (power.sqrt() / norm)).collect(),
        xi: (0..n).map(|_| random_unit(rng)).collect(),
    }
}

#[test]
fn user_channel_matches_matrix_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..50 {
        let (m, n) = (rng.random_range(1..6), rng.random_range(1..9));
        let ch = random_channels(&mut rng, m, n);
        let xi: Vec<C> = (0..n).map(|_| random_unit(&mut rng)).collect();
        let h_u = channel::effective_channel(&ch, &xi).unwrap();
        let reference = user_row(&ch, &xi);
        let reference_alt = user_row_alt(&ch, &xi);
        let row: Vec<C> = h_u.iter().map(|h| h.conj()).collect();
        assert!(rel_err(&row, reference.as_slice()) < 1e-12);
        assert!(rel_err(&row, reference_alt.as_slice()) < 1e-12);
    }
}

#[test]
fn echo_matches_five_path_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..50 {
        let (m, n) = (rng.random_range(1..5), rng.random_range(1..7));
        let ch = random_channels(&mut rng, m, n);
        let rho = [(); 5].map(|_| random_c(&mut rng));
        let w: Vec<C> = (0..m).map(|_| random_c(&mut rng)).collect();
        let xi: Vec<C> = (0..n).map(|_| random_unit(&mut rng)).collect();
        let zeros = vec![C::new(0.0, 0.0); m];
        let y = channel::echo_signal(&ch, &rho, &w, &xi, &zeros).unwrap();
        assert!(rel_err(&y, echo(&ch, &rho, &w, &xi).as_slice()) < 1e-10);
    }
}

#[test]
fn each_echo_path_alone() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let ch = random_channels(&mut rng, 3, 4);
    let w: Vec<C> = (0..3).map(|_| random_c(&mut rng)).collect();
    let xi: Vec<C> = (0..4).map(|_| random_unit(&mut rng)).collect();
    let zeros = vec![C::new(0.0, 0.0); 3];
    for k in 0..5 {
        let mut rho = [C::new(0.0, 0.0); 5];
        rho[k] = C::new(0.7, -0.2);
        let y = channel::echo_signal(&ch, &rho, &w, &xi, &zeros).unwrap();
        assert!(rel_err(&y, echo(&ch, &rho, &w, &xi).as_slice()) < 1e-12, "path {k}");
    }
}

#[test]
fn oracle_measurements_match_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let scenario = Scenario::paper_geometry(3, 2, 2);
    let ch = channel::generate_channels(&scenario).unwrap();
    let mut oracle = Oracle::with_channels(scenario.clone(), ch.clone()).unwrap();
    for _ in 0..20 {
        let beam = random_beam(&mut rng, 3, 4, scenario.transmit_power);
        let y = echo(&ch, &scenario.rho, &beam.w, &beam.xi);
        let expected_echo: f64 = y.iter().map(|v| v.norm_sqr()).sum();
        let row = user_row(&ch, &beam.xi);
        let expected_user = (row * col(&beam.w))[0].norm_sqr() + scenario.user_noise_var;

        let echo = oracle.measure_echo_power(&beam).unwrap();
        let user = oracle.measure_user_power(&beam).unwrap();
        assert!((echo - expected_echo).abs() <= 1e-10 * expected_echo);
        assert!((user - expected_user).abs() <= 1e-10 * expected_user);
    }
    assert_eq!((oracle.echo_evals(), oracle.user_evals()), (20, 20));
}

#[test]
fn noisy_measurements_average_to_signal_plus_noise() {
    let mut scenario = Scenario::paper_geometry(2, 1, 2);
    scenario.user_noise_var = 1e-6;
    scenario.echo_noise_var = 1e-6;
    scenario.rng_seed = 9;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let beam = random_beam(&mut rng, 2, 2, 1.0);
    let quiet = Oracle::new(scenario.clone()).unwrap();
    let (echo, user) = quiet.true_metrics(&beam).unwrap();
    let mut noisy = Oracle::new(scenario).unwrap().with_measurement_noise(true);
    let trials = 20_000;
    let (mut e, mut u) = (0.0, 0.0);
    for _ in 0..trials {
        e += noisy.measure_echo_power(&beam).unwrap();
        u += noisy.measure_user_power(&beam).unwrap();
    }
    let (e, u) = (e / trials as f64, u / trials as f64);
    // echo noise adds M sigma^2 on average, user noise sigma^2 (already in `user`)
    assert!(
        (e - (echo + 2e-6)).abs() < 0.05 * (echo + 2e-6),
        "{e} vs {}",
        echo + 2e-6
    );
    assert!((u - user).abs() < 0.05 * user, "{u} vs {user}");
}
