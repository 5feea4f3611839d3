//! Train a small compensator network on a short sweep and report the loss
//! history. The shipped model comes from `configs/train_nn.json` via the CLI.

use std::path::Path;

use gimbal::runner::{train_compensator, TrainConfig};

fn main() -> gimbal::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut cfg = TrainConfig::load(&dir.join("train_nn.json"))?;
    cfg.sweeps.truncate(1);
    cfg.sweeps[0].duration_s = 10.0;
    cfg.hidden = vec![10, 10];
    cfg.train.max_epochs = 15;
    let out = train_compensator(&cfg, &dir)?;
    for h in &out.history {
        let val = h.val_loss.map_or("-".to_string(), |v| format!("{v:.3e}"));
        println!(
            "epoch {:>3}  loss {:.3e}  val {val}  lambda {:.0e}",
            h.epoch, h.loss, h.lambda
        );
    }
    if let Some(r) = out.val_relative_rms {
        println!("validation error: {:.2}% of target rms", r * 100.0);
    }
    Ok(())
}
