use std::fmt::Write;

use super::{Confusion, LatencyReport, Metrics, ThroughputReport};

/// Evaluation results rendered as a table for people or as `key=value` lines for scripts.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub confusion: Confusion,
    pub metrics: Metrics,
    pub latency: Option<LatencyReport>,
    pub throughput: Option<ThroughputReport>,
}

fn pct(x: f64) -> String {
    format!("{:.2}%", x * 100.0)
}

impl EvalReport {
    pub fn new(confusion: Confusion, metrics: Metrics) -> Self {
        EvalReport { confusion, metrics, latency: None, throughput: None }
    }

    pub fn to_table(&self) -> String {
        let c = &self.confusion;
        let m = &self.metrics;
        let mut s = String::new();
        let _ = writeln!(s, "                 predicted anomaly  predicted normal");
        let _ = writeln!(s, "actual anomaly   {:>17}  {:>16}", c.tp, c.fn_);
        let _ = writeln!(s, "actual normal    {:>17}  {:>16}", c.fp, c.tn);
        let _ = writeln!(s);
        let _ = writeln!(s, "accuracy   {:>8}", pct(m.acc));
        let _ = writeln!(s, "precision  {:>8}", pct(m.pr));
        let _ = writeln!(s, "recall     {:>8}", pct(m.re));
        let _ = writeln!(s, "f-score    {:>8}", pct(m.fs));
        for w in &m.warnings {
            let _ = writeln!(s, "warning: {w}");
        }
        if let Some(l) = &self.latency {
            let _ = writeln!(
                s,
                "latency    {:.3} us/flow (std {:.3} us, {} flows x {})",
                l.mean_latency * 1e6,
                l.std_latency * 1e6,
                l.flows,
                l.repetitions
            );
            let _ = writeln!(s, "rate       {:.0} flows/s", l.flows_per_second);
        }
        if let Some(t) = &self.throughput {
            let _ = writeln!(s, "throughput {:.0} flows/s on {} threads", t.flows_per_second, t.threads);
        }
        s
    }

    pub fn to_kv(&self) -> String {
        let c = &self.confusion;
        let m = &self.metrics;
        let mut s = String::new();
        let _ = writeln!(s, "tp={}\nfp={}\ntn={}\nfn={}", c.tp, c.fp, c.tn, c.fn_);
        let _ = writeln!(s, "acc={:.2}\npr={:.2}\nre={:.2}\nfs={:.2}", m.acc * 100.0, m.pr * 100.0, m.re * 100.0, m.fs * 100.0);
        if let Some(l) = &self.latency {
            let _ = writeln!(
                s,
                "latency_mean_s={:.9}\nlatency_std_s={:.9}\nflows_per_second={:.1}",
                l.mean_latency, l.std_latency, l.flows_per_second
            );
        }
        if let Some(t) = &self.throughput {
            let _ = writeln!(s, "threads={}\nthroughput_flows_per_second={:.1}", t.threads, t.flows_per_second);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::metrics;

    #[test]
    fn kv_uses_two_decimal_percentages() {
        let c = Confusion { tp: 8, fp: 2, tn: 9, fn_: 1 };
        let r = EvalReport::new(c, metrics(&c).unwrap());
        let kv = r.to_kv();
        assert!(kv.contains("acc=85.00\n"));
        assert!(kv.contains("re=88.89\n"));
        assert!(kv.contains("fs=84.21\n"));
        assert!(r.to_table().contains("85.00%"));
    }
}
