//! Generated data for tests and benchmarks.
//!
//! [`clustered_normals`] / [`uniform_points`] build the two-feature toy problem.
//! [`KddLikeGenerator`] emits records in the NSL-KDD schema with the dataset's real
//! token vocabularies; its value distributions are coarse caricatures of normal and
//! attack traffic, good for exercising the pipeline and timing it, not for judging
//! detection quality.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::flow::schema::NUMERIC_COUNT;
use crate::flow::{Dataset, RawFlow, TrafficClass};

/// `n` points around `(center, center)` with per-axis standard deviation `spread`,
/// clamped to the unit square and tagged normal.
pub fn clustered_normals(n: usize, center: f32, spread: f32, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0f32, spread).expect("spread must be finite and non-negative");
    let mut out = Dataset::new(2);
    for _ in 0..n {
        let p = [
            (center + noise.sample(&mut rng)).clamp(0.0, 1.0),
            (center + noise.sample(&mut rng)).clamp(0.0, 1.0),
        ];
        out.push(&p, Some(TrafficClass::Normal));
    }
    out
}

/// `n` points uniform on `[0,1]^dim`, tagged by whether they fall outside the normal
/// cluster (`max |x_i - center| > radius` ⇒ anomaly).
pub fn uniform_points(n: usize, dim: usize, center: f32, radius: f32, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Dataset::new(dim);
    let mut row = vec![0.0f32; dim];
    for _ in 0..n {
        for v in row.iter_mut() {
            *v = rng.random::<f32>();
        }
        let inside = row.iter().all(|v| (v - center).abs() <= radius);
        let tag = if inside { TrafficClass::Normal } else { TrafficClass::Anomaly };
        out.push(&row, Some(tag));
    }
    out
}

pub const PROTOCOLS: [&str; 3] = ["tcp", "udp", "icmp"];

/// The 70 services that appear in KDDTrain+.
pub const SERVICES: [&str; 70] = [
    "aol", "auth", "bgp", "courier", "csnet_ns", "ctf", "daytime", "discard", "domain",
    "domain_u", "echo", "eco_i", "ecr_i", "efs", "exec", "finger", "ftp", "ftp_data", "gopher",
    "harvest", "hostnames", "http", "http_2784", "http_443", "http_8001", "imap4", "IRC",
    "iso_tsap", "klogin", "kshell", "ldap", "link", "login", "mtp", "name", "netbios_dgm",
    "netbios_ns", "netbios_ssn", "netstat", "nnsp", "nntp", "ntp_u", "other", "pm_dump", "pop_2",
    "pop_3", "printer", "private", "red_i", "remote_job", "rje", "shell", "smtp", "sql_net", "ssh",
    "sunrpc", "supdup", "systat", "telnet", "tftp_u", "tim_i", "time", "urh_i", "urp_i", "uucp",
    "uucp_path", "vmnet", "whois", "X11", "Z39_50",
];

pub const FLAGS: [&str; 11] = ["OTH", "REJ", "RSTO", "RSTOS0", "RSTR", "S0", "S1", "S2", "S3", "SF", "SH"];

const ATTACKS: [&str; 6] = ["neptune", "smurf", "satan", "ipsweep", "portsweep", "guess_passwd"];

/// Deterministic stream of NSL-KDD-shaped records.
pub struct KddLikeGenerator {
    rng: ChaCha8Rng,
}

// numeric[] offsets (feature column index minus 3 for columns after `flag`)
const SRC_BYTES: usize = 1;
const DST_BYTES: usize = 2;
const LOGGED_IN: usize = 8;
const COUNT: usize = 19;
const SRV_COUNT: usize = 20;
const SERROR_RATE: usize = 21;
const SRV_SERROR_RATE: usize = 22;
const REJ_RATE: usize = 23;
const SAME_SRV_RATE: usize = 25;
const DIFF_SRV_RATE: usize = 26;
const DST_HOST_COUNT: usize = 28;
const DST_HOST_SRV_COUNT: usize = 29;
const DST_HOST_SAME_SRV_RATE: usize = 30;
const DST_HOST_SERROR_RATE: usize = 34;

impl KddLikeGenerator {
    pub fn new(seed: u64) -> Self {
        KddLikeGenerator { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    fn rate(&mut self, around: f64) -> f64 {
        let v: f64 = around + self.rng.random_range(-0.1..0.1);
        (v.clamp(0.0, 1.0) * 100.0).round() / 100.0
    }

    pub fn normal(&mut self) -> RawFlow {
        let mut x = [0.0; NUMERIC_COUNT];
        let protocol = match self.rng.random_range(0..20) {
            0 => "icmp",
            1..=3 => "udp",
            _ => "tcp",
        };
        let service = if self.rng.random_bool(0.15) {
            SERVICES[self.rng.random_range(0..SERVICES.len())]
        } else {
            ["http", "smtp", "ftp_data", "domain_u", "private", "other"][self.rng.random_range(0..6)]
        };
        let flag = if self.rng.random_bool(0.1) {
            FLAGS[self.rng.random_range(0..FLAGS.len())]
        } else {
            "SF"
        };
        x[0] = if self.rng.random_bool(0.9) { 0.0 } else { self.rng.random_range(1..5000) as f64 };
        x[SRC_BYTES] = self.rng.random_range(100..2000) as f64;
        x[DST_BYTES] = self.rng.random_range(0..20000) as f64;
        x[LOGGED_IN] = 1.0;
        x[COUNT] = self.rng.random_range(1..20) as f64;
        x[SRV_COUNT] = self.rng.random_range(1..30) as f64;
        x[SAME_SRV_RATE] = self.rate(0.95);
        x[DIFF_SRV_RATE] = self.rate(0.03);
        x[DST_HOST_COUNT] = self.rng.random_range(1..256) as f64;
        x[DST_HOST_SRV_COUNT] = self.rng.random_range(100..256) as f64;
        x[DST_HOST_SAME_SRV_RATE] = self.rate(0.9);
        RawFlow {
            numeric: x,
            tokens: [protocol.into(), service.into(), flag.into()],
            label: "normal".into(),
            difficulty: self.rng.random_range(15..22),
        }
    }

    pub fn attack(&mut self) -> RawFlow {
        let mut x = [0.0; NUMERIC_COUNT];
        let kind = self.rng.random_range(0..ATTACKS.len());
        let (protocol, service, flag) = match kind {
            0 => ("tcp", "private", "S0"),
            1 => ("icmp", "ecr_i", "SF"),
            2 => ("tcp", "other", "REJ"),
            3 => ("icmp", "eco_i", "SF"),
            4 => ("tcp", "private", "RSTR"),
            _ => ("tcp", "telnet", "RSTO"),
        };
        match kind {
            0 => {
                x[COUNT] = self.rng.random_range(100..512) as f64;
                x[SERROR_RATE] = self.rate(1.0);
                x[SRV_SERROR_RATE] = self.rate(1.0);
                x[DST_HOST_SERROR_RATE] = self.rate(1.0);
                x[SAME_SRV_RATE] = self.rate(0.05);
            }
            1 => {
                x[SRC_BYTES] = if self.rng.random_bool(0.8) { 1032.0 } else { 520.0 };
                x[COUNT] = 511.0;
                x[SRV_COUNT] = 511.0;
                x[SAME_SRV_RATE] = 1.0;
                x[DST_HOST_SAME_SRV_RATE] = 1.0;
            }
            2 | 4 => {
                x[REJ_RATE] = self.rate(0.8);
                x[DIFF_SRV_RATE] = self.rate(0.7);
                x[COUNT] = self.rng.random_range(1..200) as f64;
            }
            3 => {
                x[SRC_BYTES] = 8.0;
                x[DIFF_SRV_RATE] = self.rate(0.9);
            }
            _ => {
                x[0] = self.rng.random_range(1..10) as f64;
                x[SRC_BYTES] = self.rng.random_range(100..200) as f64;
                x[LOGGED_IN] = 0.0;
                x[9] = self.rng.random_range(1..5) as f64; // num_failed_logins (offset 6+3)
            }
        }
        x[DST_HOST_COUNT] = 255.0;
        x[DST_HOST_SRV_COUNT] = self.rng.random_range(1..30) as f64;
        RawFlow {
            numeric: x,
            tokens: [protocol.into(), service.into(), flag.into()],
            label: ATTACKS[kind].into(),
            difficulty: self.rng.random_range(5..21),
        }
    }

    /// A training-style corpus: `n` normal flows that together cover every vocabulary token.
    pub fn training_normals(&mut self, n: usize) -> Vec<RawFlow> {
        let mut flows: Vec<RawFlow> = (0..n).map(|_| self.normal()).collect();
        let cover = PROTOCOLS.len().max(SERVICES.len()).max(FLAGS.len());
        for (i, f) in flows.iter_mut().take(cover).enumerate() {
            f.tokens = [
                PROTOCOLS[i % PROTOCOLS.len()].into(),
                SERVICES[i % SERVICES.len()].into(),
                FLAGS[i % FLAGS.len()].into(),
            ];
        }
        flows
    }

    /// A shuffled test-style corpus with the given class counts.
    pub fn mixed(&mut self, normals: usize, attacks: usize) -> Vec<RawFlow> {
        let mut flows: Vec<RawFlow> = (0..normals).map(|_| self.normal()).collect();
        flows.extend((0..attacks).map(|_| self.attack()));
        use rand::seq::SliceRandom;
        flows.shuffle(&mut self.rng);
        flows
    }
}

/// CSV text (no header) for a slice of records.
pub fn to_csv(flows: &[RawFlow]) -> String {
    let mut out = String::with_capacity(flows.len() * 160);
    for f in flows {
        out.push_str(&f.to_string());
        out.push('\n');
    }
    out
}
