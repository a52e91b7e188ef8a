use std::path::Path;

use advids_core::eval::{bench_end_to_end, bench_latency, bench_throughput, read_lines, MIN_BENCH_FLOWS};

use super::load_detector;
use crate::data;
use crate::error::{CliError, CliResult};

pub fn bench(
    bundle: &Path,
    input: &Path,
    repetitions: usize,
    threads: Option<usize>,
    end_to_end: bool,
) -> CliResult<()> {
    let (_, detector) = load_detector(bundle, None)?;
    let flows = data::read_csv(input)?.flows;
    if flows.len() < MIN_BENCH_FLOWS {
        return Err(CliError::new(
            "E_TOO_FEW_FLOWS",
            format!("benchmark needs at least {MIN_BENCH_FLOWS} flows, {} has {}", input.display(), flows.len()),
        ));
    }

    let lat = bench_latency(&detector, &flows, repetitions)?;
    println!(
        "single thread: {:.3} us/flow (std {:.3} us), {:.0} flows/s over {} flows x {}",
        lat.mean_latency * 1e6,
        lat.std_latency * 1e6,
        lat.flows_per_second,
        lat.flows,
        lat.repetitions
    );
    let mut kv = vec![
        format!("flows={}", lat.flows),
        format!("repetitions={}", lat.repetitions),
        format!("latency_mean_us={:.3}", lat.mean_latency * 1e6),
        format!("latency_std_us={:.3}", lat.std_latency * 1e6),
        format!("flows_per_second={:.1}", lat.flows_per_second),
    ];

    if end_to_end {
        let lines = read_lines(data::open(input)?).map_err(|e| CliError::io(input, e))?;
        let e2e = bench_end_to_end(&detector, &lines, repetitions)?;
        println!(
            "with parsing:  {:.3} us/flow (std {:.3} us), {:.0} flows/s",
            e2e.mean_latency * 1e6,
            e2e.std_latency * 1e6,
            e2e.flows_per_second
        );
        kv.push(format!("e2e_latency_mean_us={:.3}", e2e.mean_latency * 1e6));
        kv.push(format!("e2e_latency_std_us={:.3}", e2e.std_latency * 1e6));
        kv.push(format!("e2e_flows_per_second={:.1}", e2e.flows_per_second));
    }

    if let Some(n) = threads {
        let one = bench_throughput(&detector, &flows, 1, repetitions)?;
        let many = bench_throughput(&detector, &flows, n, repetitions)?;
        println!(
            "throughput:    {:.0} flows/s on 1 thread, {:.0} flows/s on {} threads",
            one.flows_per_second, many.flows_per_second, many.threads
        );
        kv.push(format!("throughput_1_thread={:.1}", one.flows_per_second));
        kv.push(format!("threads={}", many.threads));
        kv.push(format!("throughput_n_threads={:.1}", many.flows_per_second));
    }

    println!();
    for line in kv {
        println!("{line}");
    }
    Ok(())
}
