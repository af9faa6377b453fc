//! The optimizers only see the `Feedback` trait. These tests drive them with a
//! synthetic landscape that has a known optimum and no channel model behind it.

use afsa_beam::afsa::{run_training, AfsaParams};
use afsa_beam::baselines::{run_aco, run_pso, AcoParams, PsoParams};
use afsa_beam::oracle::{BeamPair, Feedback};
use afsa_beam::search::{PowerWindow, TrainingResult};
use afsa_beam::Result;
use num_complex::Complex64;

/// Echo `|a^H w|^2 |mean(xi)|^2`, user power `|b^H w|^2`. Best echo is
/// `P |a|^2` at `w` parallel to `a` and all RIS phases equal.
struct Landscape {
    a: Vec<Complex64>,
    b: Vec<Complex64>,
    n: usize,
    power: f64,
    echo: u64,
    user: u64,
}

impl Landscape {
    fn new(m: usize, n: usize) -> Self {
        let a = (0..m)
            .map(|i| Complex64::from_polar(1.0 + i as f64 * 0.25, 0.7 * i as f64))
            .collect();
        let b = (0..m).map(|i| Complex64::from_polar(1.0, -1.3 * i as f64)).collect();
        Self {
            a,
            b,
            n,
            power: 2.0,
            echo: 0,
            user: 0,
        }
    }

    fn optimum(&self) -> f64 {
        self.power * self.a.iter().map(|x| x.norm_sqr()).sum::<f64>()
    }

    fn inner(v: &[Complex64], w: &[Complex64]) -> Complex64 {
        v.iter().zip(w).map(|(x, y)| x.conj() * y).sum()
    }
}

impl Feedback for Landscape {
    fn antennas(&self) -> usize {
        self.a.len()
    }
    fn ris_elements(&self) -> usize {
        self.n
    }
    fn transmit_power(&self) -> f64 {
        self.power
    }
    fn measure_echo_power(&mut self, beam: &BeamPair) -> Result<f64> {
        self.echo += 1;
        let mean: Complex64 = beam.xi.iter().sum::<Complex64>() / self.n as f64;
        Ok(Self::inner(&self.a, &beam.w).norm_sqr() * mean.norm_sqr())
    }
    fn measure_user_power(&mut self, beam: &BeamPair) -> Result<f64> {
        self.user += 1;
        Ok(Self::inner(&self.b, &beam.w).norm_sqr())
    }
    fn echo_evals(&self) -> u64 {
        self.echo
    }
    fn user_evals(&self) -> u64 {
        self.user
    }
}

type Runner = dyn Fn(&mut Landscape) -> TrainingResult;

fn afsa(window: PowerWindow, seed: u64) -> impl Fn(&mut Landscape) -> TrainingResult {
    move |o| {
        let mut p = AfsaParams::defaults(o.antennas(), o.ris_elements(), o.power);
        p.window = window;
        p.rng_seed = seed;
        run_training(&p, o).unwrap()
    }
}

fn pso(window: PowerWindow, seed: u64) -> impl Fn(&mut Landscape) -> TrainingResult {
    move |o| {
        run_pso(
            &PsoParams {
                window,
                rng_seed: seed,
                ..PsoParams::default()
            },
            o,
        )
        .unwrap()
    }
}

fn aco(window: PowerWindow, seed: u64) -> impl Fn(&mut Landscape) -> TrainingResult {
    move |o| {
        run_aco(
            &AcoParams {
                window,
                rng_seed: seed,
                ..AcoParams::default()
            },
            o,
        )
        .unwrap()
    }
}

fn check_run(name: &str, result: &TrainingResult, oracle: &Landscape, window: &PowerWindow) {
    let power: f64 = result.best_beam.w.iter().map(|x| x.norm_sqr()).sum();
    assert!(power <= oracle.power * (1.0 + 1e-12), "{name}: power {power}");
    assert!(
        result.best_beam.xi.iter().all(|x| (x.norm() - 1.0).abs() < 1e-12),
        "{name}"
    );
    assert!(
        result
            .trace
            .windows(2)
            .all(|p| p[1].global_fitness >= p[0].global_fitness),
        "{name}"
    );
    assert_eq!(
        result.trace.last().unwrap().global_fitness,
        result.best_fitness,
        "{name}"
    );
    assert_eq!(result.echo_evals, oracle.echo, "{name}");
    assert_eq!(result.user_evals, oracle.user, "{name}");
    if !result.never_feasible {
        let user = Landscape::inner(&oracle.b, &result.best_beam.w).norm_sqr();
        assert!(window.contains(user), "{name}: user power {user} outside window");
    }
}

#[test]
fn all_optimizers_approach_known_optimum() {
    let window = PowerWindow::unconstrained();
    let runs: [(&str, Box<Runner>); 3] = [
        ("afsa", Box::new(afsa(window, 3))),
        ("pso", Box::new(pso(window, 3))),
        ("aco", Box::new(aco(window, 3))),
    ];
    for (name, run) in runs {
        let mut oracle = Landscape::new(3, 4);
        let result = run(&mut oracle);
        check_run(name, &result, &oracle, &window);
        let ratio = result.best_fitness / oracle.optimum();
        assert!(ratio > 0.8 && ratio <= 1.0 + 1e-9, "{name}: reached {ratio} of optimum");
    }
}

#[test]
fn window_is_respected() {
    // |b^H w|^2 ranges over [0, 3P]; keep the lower part only
    let window = PowerWindow::new(0.5, 2.0).unwrap();
    for seed in 0..3 {
        for (name, run) in [
            ("afsa", Box::new(afsa(window, seed)) as Box<Runner>),
            ("pso", Box::new(pso(window, seed))),
            ("aco", Box::new(aco(window, seed))),
        ] {
            let mut oracle = Landscape::new(3, 4);
            let result = run(&mut oracle);
            assert!(!result.never_feasible, "{name}");
            check_run(name, &result, &oracle, &window);
        }
    }
}

#[test]
fn unreachable_window_reports_never_feasible() {
    let window = PowerWindow::new(100.0, 200.0).unwrap();
    for (name, run) in [
        ("afsa", Box::new(afsa(window, 1)) as Box<Runner>),
        ("pso", Box::new(pso(window, 1))),
        ("aco", Box::new(aco(window, 1))),
    ] {
        let mut oracle = Landscape::new(2, 3);
        let result = run(&mut oracle);
        assert!(result.never_feasible, "{name}");
        assert_eq!(result.best_fitness, f64::NEG_INFINITY, "{name}");
        assert_eq!(result.iterations_to_95(), result.trace.len(), "{name}");
    }
}

#[test]
fn baselines_stop_within_one_batch_of_budget() {
    let window = PowerWindow::unconstrained();
    for budget in [20, 57, 333, 1000] {
        let mut oracle = Landscape::new(2, 2);
        let r = run_pso(
            &PsoParams {
                window,
                echo_budget: Some(budget),
                ..PsoParams::default()
            },
            &mut oracle,
        )
        .unwrap();
        assert!(
            r.echo_evals <= budget && r.echo_evals + 20 > budget,
            "pso {budget}: {}",
            r.echo_evals
        );

        let mut oracle = Landscape::new(2, 2);
        let r = run_aco(
            &AcoParams {
                window,
                echo_budget: Some(budget),
                ..AcoParams::default()
            },
            &mut oracle,
        )
        .unwrap();
        // the 50-entry archive is always filled; the budget caps the ant batches after it
        let cap = budget.max(50);
        assert!(
            r.echo_evals <= cap && r.echo_evals + 20 > cap,
            "aco {budget}: {}",
            r.echo_evals
        );
    }
}

#[test]
fn same_seed_same_result() {
    let window = PowerWindow::new(0.5, 2.0).unwrap();
    for run in [
        Box::new(afsa(window, 8)) as Box<Runner>,
        Box::new(pso(window, 8)),
        Box::new(aco(window, 8)),
    ] {
        let (mut a, mut b) = (Landscape::new(3, 3), Landscape::new(3, 3));
        assert_eq!(run(&mut a), run(&mut b));
    }
}
