use std::io::BufRead;
use std::thread;
use std::time::Instant;

use super::EvalError;
use crate::detect::Detector;
use crate::flow::RawFlow;

/// Fewer flows than this give unstable timing statistics.
pub const MIN_BENCH_FLOWS: usize = 1000;
const WARMUP_FLOWS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatencyReport {
    pub flows: usize,
    pub repetitions: usize,
    /// Seconds per flow.
    pub mean_latency: f64,
    pub std_latency: f64,
    pub flows_per_second: f64,
}

#[derive(Default)]
struct Welford {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn std(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.m2 / (self.n - 1) as f64).sqrt()
        }
    }
}

fn check(flows: usize, repetitions: usize) -> Result<(), EvalError> {
    if flows < MIN_BENCH_FLOWS {
        return Err(EvalError::TooFewFlows { found: flows, needed: MIN_BENCH_FLOWS });
    }
    if repetitions == 0 {
        return Err(EvalError::Infeasible("repetitions must be positive".into()));
    }
    Ok(())
}

fn report(stats: &Welford, flows: usize, repetitions: usize) -> LatencyReport {
    LatencyReport {
        flows,
        repetitions,
        mean_latency: stats.mean,
        std_latency: stats.std(),
        flows_per_second: 1.0 / stats.mean,
    }
}

/// Single-threaded wall clock of encode + score + classify per flow, after a warm-up
/// pass that is not counted.
pub fn bench_latency(detector: &Detector, flows: &[RawFlow], repetitions: usize) -> Result<LatencyReport, EvalError> {
    check(flows.len(), repetitions)?;
    let mut buf = Vec::new();
    for f in flows.iter().take(WARMUP_FLOWS) {
        std::hint::black_box(detector.verdict_with(f, &mut buf)?);
    }
    let mut stats = Welford::default();
    for _ in 0..repetitions {
        for f in flows {
            let start = Instant::now();
            std::hint::black_box(detector.verdict_with(std::hint::black_box(f), &mut buf)?);
            stats.push(start.elapsed().as_secs_f64());
        }
    }
    Ok(report(&stats, flows.len(), repetitions))
}

/// Like [`bench_latency`] but each timed unit also parses the CSV line.
pub fn bench_end_to_end(detector: &Detector, lines: &[String], repetitions: usize) -> Result<LatencyReport, EvalError> {
    check(lines.len(), repetitions)?;
    let mut buf = Vec::new();
    let mut stats = Welford::default();
    for rep in 0..=repetitions {
        for (i, line) in lines.iter().enumerate() {
            let start = Instant::now();
            let flow = RawFlow::parse_line(std::hint::black_box(line), i + 1)?;
            std::hint::black_box(detector.verdict_with(&flow, &mut buf)?);
            let t = start.elapsed().as_secs_f64();
            // repetition 0 is the warm-up
            if rep > 0 {
                stats.push(t);
            }
        }
    }
    Ok(report(&stats, lines.len(), repetitions))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThroughputReport {
    pub threads: usize,
    pub flows: usize,
    pub seconds: f64,
    pub flows_per_second: f64,
}

/// Aggregate rate with `threads` workers each classifying a contiguous share of `flows`,
/// `repetitions` times.
pub fn bench_throughput(
    detector: &Detector,
    flows: &[RawFlow],
    threads: usize,
    repetitions: usize,
) -> Result<ThroughputReport, EvalError> {
    check(flows.len(), repetitions)?;
    let threads = threads.max(1);
    let chunk = flows.len().div_ceil(threads);
    let mut buf = Vec::new();
    for f in flows.iter().take(WARMUP_FLOWS) {
        std::hint::black_box(detector.verdict_with(f, &mut buf)?);
    }
    let start = Instant::now();
    thread::scope(|s| -> Result<(), EvalError> {
        let handles: Vec<_> = flows
            .chunks(chunk)
            .map(|part| {
                s.spawn(move || -> Result<(), EvalError> {
                    let mut buf = Vec::new();
                    for _ in 0..repetitions {
                        for f in part {
                            std::hint::black_box(detector.verdict_with(f, &mut buf)?);
                        }
                    }
                    Ok(())
                })
            })
            .collect();
        for h in handles {
            h.join().expect("benchmark worker panicked")?;
        }
        Ok(())
    })?;
    let seconds = start.elapsed().as_secs_f64();
    let total = flows.len() * repetitions;
    Ok(ThroughputReport {
        threads,
        flows: total,
        seconds,
        flows_per_second: total as f64 / seconds,
    })
}

/// Reads all non-blank lines for end-to-end timing.
pub fn read_lines<R: BufRead>(r: R) -> std::io::Result<Vec<String>> {
    r.lines()
        .filter(|l| l.as_ref().map(|s| !s.trim().is_empty()).unwrap_or(true))
        .collect()
}
