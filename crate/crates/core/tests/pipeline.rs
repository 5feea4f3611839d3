//! Training and identification pipelines through the library API.

use std::path::{Path, PathBuf};

use gimbal::runner::{nn_controller, run_with, train_compensator, ScenarioConfig, TrainConfig};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn small_training() -> TrainConfig {
    let mut cfg = TrainConfig::load(&configs().join("train_nn.json")).unwrap();
    cfg.sweeps.truncate(1);
    cfg.sweeps[0].duration_s = 10.0;
    cfg.hidden = vec![10, 10];
    cfg.train.max_epochs = 15;
    cfg
}

#[test]
fn training_fits_the_sweep_and_loss_never_rises() {
    let out = train_compensator(&small_training(), &configs()).unwrap();
    let rel = out.val_relative_rms.unwrap();
    assert!(rel < 0.05, "validation error {rel}");
    for w in out.history.windows(2) {
        assert!(w[1].loss <= w[0].loss, "{:?}", out.history);
    }
    assert_eq!(out.logs.len(), 1);
}

#[test]
fn in_memory_model_drives_a_scenario() {
    let out = train_compensator(&small_training(), &configs()).unwrap();
    let path = configs().join("ref1_pid.json");
    let mut cfg = ScenarioConfig::load(&path).unwrap();
    cfg.duration_s = 1.0;
    let params = cfg.params.resolve(&configs()).unwrap();
    let ctrl = nn_controller(&cfg, out.model).unwrap();
    let run = run_with(&cfg, &params, ctrl).unwrap();
    assert_eq!(run.log.len(), 1001);
    assert!(run
        .log
        .rows
        .iter()
        .all(|r| r.u_a.is_finite() && r.u_e.is_finite()));
}

#[test]
fn seed_changes_the_model_but_not_the_data() {
    let mut cfg = small_training();
    cfg.train.max_epochs = 1;
    let a = train_compensator(&cfg, &configs()).unwrap();
    cfg.seed += 1;
    let b = train_compensator(&cfg, &configs()).unwrap();
    assert_eq!(
        a.logs[0].to_csv_string().unwrap(),
        b.logs[0].to_csv_string().unwrap()
    );
    assert_ne!(a.model.params(), b.model.params());
}
