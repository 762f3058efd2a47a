//! Harness behavior on reduced ensembles: control rows, forbidden regimes and
//! reproducibility.

use hdsim_core::harness::{gaussian_abs_moment, ExperimentConfig, MIN_PATHS};
use hdsim_core::{Error, Experiment, ModelParams, Verdict};

fn small(e: Experiment) -> ExperimentConfig {
    let mut cfg = e.default_config();
    cfg.n_paths = cfg.n_paths.min(400);
    cfg.level = cfg.level.min(12);
    if cfg.level_grid.is_some() {
        cfg.level_grid = Some(vec![8, 10, 12]);
    }
    cfg
}

#[test]
fn selection_zero_eps_row_is_exact() {
    let mut cfg = small(Experiment::Selection);
    cfg.eps_grid = Some(vec![0.2, 0.0]);
    let r = Experiment::Selection.run(&cfg).unwrap();
    let row = r.row("sup_distance[eps=0]").unwrap();
    assert_eq!(row.summary.mean, 0.0);
    assert!(r.row("sup_remainder_sq[eps=0]").unwrap().summary.mean < 1e-20);
}

#[test]
fn selection_converges_faster_away_from_zero() {
    let mut cfg = small(Experiment::Selection);
    cfg.params.x0 = 1.0;
    cfg.eps_grid = Some(vec![0.4, 0.05]);
    let r = Experiment::Selection.run(&cfg).unwrap();
    let coarse = r.row("sup_distance[eps=0.4]").unwrap().summary.mean;
    let fine = r.row("sup_distance[eps=0.05]").unwrap().summary.mean;
    assert!(fine * 2.0 < coarse, "{fine} vs {coarse}");
}

#[test]
fn selection_requires_a_grid() {
    let mut cfg = small(Experiment::Selection);
    cfg.eps_grid = None;
    assert!(matches!(Experiment::Selection.run(&cfg), Err(Error::Parameter(_))));
}

#[test]
fn bracket_control_row_is_exact() {
    let r = Experiment::Bracket.run(&small(Experiment::Bracket)).unwrap();
    let control = r.rows.iter().find(|row| row.param.starts_with("constant_control")).unwrap();
    assert!((control.summary.mean - 0.5).abs() < 1e-12);
    assert!(control.pass);
}

#[test]
fn skew_sign_law() {
    let mut cfg = small(Experiment::Skew);
    cfg.n_paths = 10_000;
    cfg.level = 8;
    let r = Experiment::Skew.run(&cfg).unwrap();
    assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
    assert_eq!(r.row("theta=1").unwrap().summary.mean, 1.0);
    assert!((r.row("theta=-0.5").unwrap().summary.mean - 0.25).abs() <= 0.017);
}

#[test]
fn skew_rejects_bad_inputs() {
    let mut cfg = small(Experiment::Skew);
    cfg.params.x0 = 0.5;
    assert!(matches!(Experiment::Skew.run(&cfg), Err(Error::Parameter(_))));
    let mut cfg = small(Experiment::Skew);
    cfg.theta_grid = Some(vec![1.5]);
    assert!(matches!(Experiment::Skew.run(&cfg), Err(Error::Parameter(_))));
}

#[test]
fn weak_construction_gaussian_case() {
    let mut cfg = small(Experiment::Weak);
    cfg.params = ModelParams::new(0.0, 0.7, 0.3).unwrap();
    cfg.n_paths = 1000;
    let r = Experiment::Weak.run(&cfg).unwrap();
    assert_eq!(r.verdict, Verdict::Pass, "{r:#?}");
}

#[test]
fn weak_construction_negative_alpha_residual() {
    let mut cfg = small(Experiment::Weak);
    cfg.params = ModelParams::new(-0.5, 0.5, 0.0).unwrap();
    cfg.n_paths = 100;
    cfg.level_grid = Some(vec![10, 12, 14, 16]);
    let r = Experiment::Weak.run(&cfg).unwrap();
    let medians: Vec<_> = r.rows.iter().filter_map(|row| row.median).collect();
    let trend = r.row("ito_residual:median_inversions").unwrap();
    assert!(trend.pass, "principal-value residual medians {medians:?}");
}

#[test]
fn uniqueness_refuses_zero_eps() {
    let mut cfg = small(Experiment::Uniqueness);
    cfg.params.eps = 0.0;
    assert!(matches!(Experiment::Uniqueness.run(&cfg), Err(Error::Parameter(_))));
}

#[test]
fn uniqueness_with_large_eps() {
    let mut cfg = small(Experiment::Uniqueness);
    cfg.params.eps = 2.0;
    cfg.n_paths = 200;
    let r = Experiment::Uniqueness.run(&cfg).unwrap();
    assert_eq!(r.verdict, Verdict::Pass, "{r:#?}");
}

#[test]
fn moments_reject_bad_order() {
    let mut cfg = small(Experiment::Moments);
    for a in [0.5, -1.0, 0.0] {
        cfg.moment_order = a;
        assert!(matches!(Experiment::Moments.run(&cfg), Err(Error::Parameter(_))));
    }
}

#[test]
fn moments_short_time_far_from_zero() {
    let mut cfg = small(Experiment::Moments);
    cfg.params.x0 = 5.0;
    cfg.n_paths = 1000;
    let r = Experiment::Moments.run(&cfg).unwrap();
    let row = r.rows.iter().find(|row| row.param.starts_with("moment[t=0.25,n=2000")).unwrap();
    let target = 5f64.powf(-0.5);
    assert!((row.summary.mean - target).abs() < 0.1 * target, "{row:?}");
}

#[test]
fn gaussian_moment_formula() {
    assert!((gaussian_abs_moment(1.0, -0.5) - 1.720_1).abs() < 1e-4);
    assert!((gaussian_abs_moment(2f64.sqrt(), -0.5) - 1.446_4).abs() < 1e-4);
    assert!((gaussian_abs_moment(1.0, 1.0) - (2.0 / std::f64::consts::PI).sqrt()).abs() < 1e-14);
}

#[test]
fn too_few_paths_is_a_parameter_error() {
    let mut cfg = small(Experiment::Bracket);
    cfg.n_paths = MIN_PATHS - 1;
    assert!(matches!(Experiment::Bracket.run(&cfg), Err(Error::Parameter(_))));
}

#[test]
fn reports_do_not_depend_on_worker_count() {
    for e in [Experiment::Selection, Experiment::Uniqueness] {
        let mut cfg = small(e);
        cfg.n_paths = 150;
        cfg.workers = 1;
        let mut a = e.run(&cfg).unwrap();
        cfg.workers = 3;
        let mut b = e.run(&cfg).unwrap();
        a.wall_time = 0.0;
        b.wall_time = 0.0;
        assert_eq!(a, b, "{e}");
    }
}
