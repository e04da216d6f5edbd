use gbsoft_core::bench::{generate, run_seed, train_linear, Encoding, ExperimentConfig};
use gbsoft_core::encoding::{encode_matrix, one_hot_matrix};
use gbsoft_core::loss::{reg_cce, softmax};
use gbsoft_core::solver::{class_distributions, DEFAULT_GRID};
use gbsoft_core::special::integrate;
use gbsoft_core::{ConfusionMatrix, GbParams, SolverConfig};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn gb_cdf_is_monotone_and_bounded(
        alpha in 0.2f64..5.0,
        u in 0.2f64..20.0,
        v in 0.2f64..20.0,
        x in 0.001f64..0.998,
        dx in 1e-4f64..1e-3,
    ) {
        let gb = GbParams::new(alpha, u, v).unwrap();
        let lo = gb.cdf(x).unwrap();
        let hi = gb.cdf(x + dx).unwrap();
        prop_assert!((0.0..=1.0).contains(&lo));
        prop_assert!(hi >= lo - 1e-14);
        prop_assert!(gb.pdf(x).unwrap() >= 0.0);
        let step = integrate(|t| gb.pdf(t).unwrap(), x, x + dx, 1e-13).unwrap().value;
        prop_assert!((hi - lo - step).abs() <= 1e-10, "{} vs {}", hi - lo, step);
    }

    #[test]
    fn gb_moments_are_ordered(alpha in 0.2f64..5.0, u in 0.2f64..20.0, v in 0.2f64..20.0) {
        let gb = GbParams::new(alpha, u, v).unwrap();
        let m1 = gb.moment(1).unwrap();
        let m2 = gb.moment(2).unwrap();
        prop_assert!(m1 > 0.0 && m1 < 1.0);
        prop_assert!(m2 < m1);
        prop_assert!(m2 >= m1 * m1 * (1.0 - 1e-12));
    }
}

#[test]
fn class_means_increase_across_the_grid() {
    for j in 3..=14 {
        for lambda in DEFAULT_GRID {
            for eta in DEFAULT_GRID {
                let set = class_distributions(&SolverConfig::new(j, lambda, eta).unwrap()).unwrap();
                let means: Vec<f64> = set.per_class().iter().map(GbParams::mean).collect();
                assert!(means.windows(2).all(|w| w[0] < w[1]), "J={j} {lambda} {eta}: {means:?}");
            }
        }
    }
}

#[test]
fn soft_labels_minimise_their_own_loss() {
    let labels = encode_matrix(&SolverConfig::new(6, 1.0, 1.0).unwrap()).unwrap();
    for k in 0..6 {
        let target = labels.row(k);
        let logits: Vec<f64> = target.iter().map(|q| q.ln()).collect();
        let best = reg_cce(&softmax(&logits), k, &labels);
        let one_hot = one_hot_matrix(6).unwrap();
        let hard = reg_cce(one_hot.row(k), k, &labels);
        assert!(best < hard, "class {k}: {best} vs {hard}");
    }
}

#[test]
fn trained_model_beats_chance() {
    let data = generate(5, 1500, 10, 0.1, 11).unwrap();
    let labels = encode_matrix(&SolverConfig::new(5, 1.0, 1.0).unwrap()).unwrap();
    let trained = train_linear(&data, &labels, 150, 0.1).unwrap();
    let all: Vec<usize> = (0..data.len()).collect();
    let predicted = trained.model.predict_all(&data, &all);
    let cm = ConfusionMatrix::from_labels(data.labels(), &predicted, 5).unwrap();
    assert!(cm.ccr() > 0.4, "ccr {}", cm.ccr());
    assert!(cm.qwk().unwrap() > 0.5);
}

#[test]
fn run_seed_is_deterministic() {
    let config = ExperimentConfig {
        samples: 600,
        epochs: 30,
        grid: vec![1.0],
        encodings: vec![Encoding::OneHot, Encoding::Gb],
        ..ExperimentConfig::default()
    };
    let a = run_seed(&config, 42).unwrap();
    let b = run_seed(&config, 42).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), 2);
    assert_eq!(a[1].lambda, Some(1.0));
    assert_eq!(a[0].lambda, None);
}
