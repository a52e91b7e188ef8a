use std::io::Read;
use std::path::Path;

use advids_core::bundle::{ModelBundle, BUNDLE_MAGIC};
use advids_core::flow::{Dataset, FeatureCodec, TrafficClass, CACHE_MAGIC, CODEC_MAGIC};
use advids_core::nn::{DenseNet, MODEL_MAGIC};

use crate::data;
use crate::error::{CliError, CliResult};

const BLOCKS: [&str; 3] = ["protocol_type", "service", "flag"];

pub fn inspect(path: &Path) -> CliResult<()> {
    let mut head = [0u8; 4];
    data::open(path)?.read_exact(&mut head).map_err(|_| unknown(path))?;
    let corrupt = |e: std::io::Error| CliError::new("E_FORMAT", format!("{}: {e}", path.display()));
    let mut r = data::open(path)?;
    match &head {
        h if h == BUNDLE_MAGIC => {
            let b = ModelBundle::read_from(&mut r)?;
            println!("kind=bundle");
            println!("format_version={}", b.format_version);
            describe_codec(&b.codec);
            describe_net("detector", &b.detector);
            match &b.reconstructor {
                Some(net) => describe_net("reconstructor", net),
                None => println!("reconstructor=none"),
            }
            println!("trace_digest={}", b.trace_digest_hex());
            for line in b.train_config.to_kv().lines() {
                println!("config.{line}");
            }
        }
        h if h == CACHE_MAGIC => {
            let ds = Dataset::read_cache(&mut r).map_err(corrupt)?;
            let count = |c| ds.tags().iter().filter(|t| **t == Some(c)).count();
            println!("kind=cache");
            println!("rows={}", ds.len());
            println!("dim={}", ds.dim());
            println!("normal={}", count(TrafficClass::Normal));
            println!("anomaly={}", count(TrafficClass::Anomaly));
            println!("unlabeled={}", ds.tags().iter().filter(|t| t.is_none()).count());
        }
        h if h == CODEC_MAGIC => {
            let codec = FeatureCodec::load(&mut r).map_err(corrupt)?;
            println!("kind=codec");
            describe_codec(&codec);
        }
        h if h == MODEL_MAGIC => {
            let net = DenseNet::<f32>::read_from(&mut r).map_err(corrupt)?;
            println!("kind=model");
            describe_net("net", &net);
        }
        _ => return Err(unknown(path)),
    }
    Ok(())
}

fn unknown(path: &Path) -> CliError {
    CliError::new("E_FORMAT", format!("{} is not a bundle, cache, codec or model file", path.display()))
}

fn describe_codec(codec: &FeatureCodec) {
    println!("codec.output_dim={}", codec.output_dim());
    for (k, name) in BLOCKS.iter().enumerate() {
        println!("codec.{name}_tokens={}", codec.vocab(k).len());
    }
}

fn describe_net(name: &str, net: &DenseNet<f32>) {
    let dims: Vec<String> = net.dims().iter().map(|d| d.to_string()).collect();
    let acts: Vec<&str> = net.layers().iter().map(|l| l.activation().name()).collect();
    println!("{name}.dims={}", dims.join("-"));
    println!("{name}.activations={}", acts.join(","));
    println!("{name}.params={}", net.param_count());
    println!("{name}.seed={}", net.seed());
}
