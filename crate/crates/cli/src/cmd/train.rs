use std::collections::HashMap;
use std::fs;

use advids_core::bundle::ModelBundle;
use advids_core::flow::{split_normal_only, Dataset, FeatureCodec, TrafficClass};
use advids_core::train::{self as trainer, TrainConfig, TrainError, CONFIG_KEYS};

use crate::data;
use crate::error::{CliError, CliResult};
use crate::TrainArgs;

pub fn train(args: &TrainArgs) -> CliResult<()> {
    let mut cfg = TrainConfig::default();
    let mut source: HashMap<&str, &str> = HashMap::new();
    if let Some(path) = &args.config {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        for key in cfg.apply_kv(&text)? {
            if let Some(k) = CONFIG_KEYS.iter().find(|k| **k == key) {
                source.insert(k, "config");
            }
        }
    }
    for (key, value) in args.overrides() {
        cfg.set(key, value)?;
        source.insert(key, "flag");
    }
    cfg.validate()?;
    eprintln!("config (flag > config file > default):");
    for key in CONFIG_KEYS {
        let from = source.get(key).copied().unwrap_or("default");
        eprintln!("  {key}={} [{from}]", cfg.get(key).unwrap_or_default());
    }

    let (normals, codec) = load_normals(args)?;
    println!("{} normal flows retained for training", normals.len());

    let trace_out = data::trace_path(&args.out);
    let models = match trainer::train(&normals, &cfg) {
        Ok(m) => m,
        Err(TrainError::NonFiniteLoss { epoch, trace }) => {
            data::write_atomic(&trace_out, |w| w.write_all(trace.to_csv().as_bytes()))?;
            return Err(CliError::new(
                "E_TRAIN",
                format!("non-finite loss in epoch {epoch}; trace kept at {}", trace_out.display()),
            ));
        }
        Err(e) => return Err(e.into()),
    };

    let trace = models.trace.clone();
    data::write_atomic(&trace_out, |w| w.write_all(trace.to_csv().as_bytes()))?;
    let mut bundle = ModelBundle::new(codec, models, cfg)?;
    if args.no_reconstructor {
        bundle = bundle.without_reconstructor();
    }
    bundle.save_atomic(&args.out)?;

    if let Some(last) = trace.last() {
        println!(
            "epochs {}  a_loss_real {:.6}  a_loss_fake {:.6}  recon_mse {:.6}",
            last.epoch, last.a_loss_real, last.a_loss_fake, last.recon_mse
        );
    }
    match trace.freeze_epoch() {
        Some(e) => println!("reconstructor frozen at epoch {e}"),
        None => println!("reconstructor never frozen"),
    }
    println!("trace digest {}", bundle.trace_digest_hex());
    println!("wrote {} and {}", args.out.display(), trace_out.display());
    Ok(())
}

fn load_normals(args: &TrainArgs) -> CliResult<(Dataset, FeatureCodec)> {
    if data::is_cache(&args.data)? {
        let (all, codec) = data::read_prepared(&args.data)?;
        let normals = all.filter_class(TrafficClass::Normal);
        if normals.len() < all.len() {
            eprintln!("dropped {} non-normal rows from the cache", all.len() - normals.len());
        }
        return Ok((normals, codec));
    }
    let parsed = data::read_csv(&args.data)?;
    let split = split_normal_only(parsed.flows);
    if split.has_no_normals() {
        return Err(CliError::new("E_NO_NORMALS", format!("{} contains no normal flows", args.data.display())));
    }
    if !split.held_out.is_empty() {
        eprintln!("dropped {} anomalous flows from the training file", split.held_out.len());
    }
    let codec = FeatureCodec::fit(&split.train_normals).map_err(|e| CliError::new("E_NO_NORMALS", e.to_string()))?;
    Ok((Dataset::encode(&codec, &split.train_normals), codec))
}
