use pointproc_core::{
    fit_mle, log_likelihood, poisson_mle, simulate, Algorithm, FitConfig, ModelFamily, ModelSpec,
    ObservationWindow, PointPattern, SimConfig, TerminationReason,
};

fn sample(model: &ModelSpec, t_end: f64, seed: u64) -> PointPattern {
    let config = SimConfig::new(
        Algorithm::Inverse,
        ObservationWindow::new(t_end).unwrap(),
        seed,
    );
    simulate::simulate(model, &config).unwrap()
}

fn cases() -> Vec<(ModelSpec, f64, Vec<f64>)> {
    vec![
        (ModelSpec::hom_poisson(2.0).unwrap(), 50.0, vec![0.5]),
        (
            ModelSpec::piecewise_poisson(vec![10.0], vec![1.0, 3.0]).unwrap(),
            30.0,
            vec![2.0, 2.0],
        ),
        (
            ModelSpec::renewal_gamma(2.0, 4.0).unwrap(),
            100.0,
            vec![1.0, 1.0],
        ),
        (
            ModelSpec::renewal_gamma(0.5, 1.0).unwrap(),
            300.0,
            vec![1.0, 1.0],
        ),
        (
            ModelSpec::hawkes_exp(0.5, 0.9, 1.0).unwrap(),
            200.0,
            vec![1.0, 0.5, 2.0],
        ),
        (
            ModelSpec::self_correcting(1.0, 0.2).unwrap(),
            50.0,
            vec![0.5, 0.1],
        ),
        (
            ModelSpec::etas_exp(0.5, 0.2, 1.0, 1.0, 2.0).unwrap(),
            300.0,
            vec![0.3, 0.3, 0.5, 2.0, 1.0],
        ),
    ]
}

#[test]
fn fitted_parameters_are_local_maxima() {
    for (i, (model, t_end, init)) in cases().into_iter().enumerate() {
        let pattern = sample(&model, t_end, 300 + i as u64);
        let family = ModelFamily::of(&model);
        let fit = fit_mle(&family, &pattern, &FitConfig::new(init.clone())).unwrap();
        assert!(
            fit.converged,
            "{}: {:?}",
            model.tag(),
            fit.termination_reason
        );

        let start = log_likelihood(&family.build(&init).unwrap(), &pattern).unwrap();
        assert!(fit.log_likelihood >= start);
        assert_eq!(
            fit.log_likelihood,
            log_likelihood(&fit.model, &pattern).unwrap()
        );

        let best = fit.params();
        for k in 0..best.len() {
            for factor in [0.99, 1.01] {
                let mut p = best.clone();
                p[k] *= factor;
                let ll = log_likelihood(&family.build(&p).unwrap(), &pattern).unwrap();
                assert!(
                    ll <= fit.log_likelihood,
                    "{}: parameter {} x {factor} gives {ll} > {}",
                    model.tag(),
                    family.param_names()[k],
                    fit.log_likelihood
                );
            }
        }
    }
}

#[test]
fn poisson_fit_matches_closed_form_on_simulated_data() {
    let model = ModelSpec::hom_poisson(2.0).unwrap();
    for seed in 0..10 {
        let pattern = sample(&model, 50.0, seed);
        let fit = fit_mle(
            &ModelFamily::HomPoisson,
            &pattern,
            &FitConfig::new(vec![1.0]),
        )
        .unwrap();
        let exact = poisson_mle(&pattern);
        assert_eq!(exact, pattern.len() as f64 / 50.0);
        assert!((fit.params()[0] - exact).abs() <= 1e-6 * exact);
    }
}

#[test]
fn fits_are_deterministic() {
    let model = ModelSpec::hawkes_exp(0.5, 0.9, 1.0).unwrap();
    let pattern = sample(&model, 100.0, 1);
    let config = FitConfig::new(vec![1.0, 0.5, 2.0]);
    let a = fit_mle(&ModelFamily::HawkesExp, &pattern, &config).unwrap();
    let b = fit_mle(&ModelFamily::HawkesExp, &pattern, &config).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.termination_reason, TerminationReason::ToleranceMet);
}

#[test]
fn empty_pattern_drives_poisson_rate_down() {
    let pattern = PointPattern::from_times(&[], 10.0).unwrap();
    let fit = fit_mle(
        &ModelFamily::HomPoisson,
        &pattern,
        &FitConfig::new(vec![1.0]),
    )
    .unwrap();
    assert!(fit.params()[0] < 1e-3);
    assert!(fit.log_likelihood > -1e-2);
}
