//! Kernel timing. Each method gets two untimed warm-up runs, then the
//! median of the timed runs is reported. Kernels run single-threaded so
//! the numbers compare like for like.

use std::hint::black_box;
use std::io::Write;
use std::time::Instant;

use efdm::matching::{self, hist_match_binned, MatchContext};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::args::BenchArgs;
use crate::error::CliError;
use crate::report::{num, Table};

pub struct BenchReport {
    pub method: String,
    pub n: usize,
    pub runs: usize,
    /// Median wall-clock seconds per call.
    pub seconds: f64,
    /// Elements per second at the median.
    pub throughput: f64,
}

const WARMUPS: usize = 2;

/// Times each named method on one synthetic pair of vectors. The mixing
/// weight is pinned to 0.5 so efdmix timings do not depend on Beta draws.
pub fn measure(
    n: usize,
    methods: &[String],
    runs: usize,
    seed: u64,
    bins: Option<usize>,
) -> Result<Vec<BenchReport>, CliError> {
    if n < 1024 {
        return Err(CliError::Usage(format!(
            "bench needs at least 1024 elements, got {n}"
        )));
    }
    if runs < 5 {
        return Err(CliError::Usage(format!(
            "bench needs at least 5 timed runs, got {runs}"
        )));
    }

    let mut gen = ChaCha8Rng::seed_from_u64(seed);
    let x: Vec<f64> = (0..n).map(|_| gen.random::<f64>()).collect();
    let y: Vec<f64> = (0..n).map(|_| gen.random::<f64>()).collect();

    let mut reports = Vec::with_capacity(methods.len());
    for name in methods {
        let method = matching::method_by_name(name)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        let binned = bins.filter(|_| name == "hm");
        let label = match binned {
            Some(b) => format!("hm-binned({b})"),
            None => name.clone(),
        };

        let mut call_rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let mut call = || -> Result<Vec<f64>, CliError> {
            match binned {
                Some(b) => Ok(hist_match_binned(&x, &y, b)?),
                None => {
                    let ctx = &mut MatchContext::new(&mut call_rng).with_lambda(0.5);
                    Ok(method.apply(&x, &y, ctx)?.values)
                }
            }
        };

        for _ in 0..WARMUPS {
            black_box(call()?);
        }
        let mut times = Vec::with_capacity(runs);
        for _ in 0..runs {
            let start = Instant::now();
            black_box(call()?);
            times.push(start.elapsed().as_secs_f64());
        }
        let seconds = median(&mut times);
        reports.push(BenchReport {
            method: label,
            n,
            runs,
            seconds,
            throughput: n as f64 / seconds,
        });
    }
    Ok(reports)
}

fn median(times: &mut [f64]) -> f64 {
    times.sort_unstable_by(f64::total_cmp);
    let mid = times.len() / 2;
    if times.len() % 2 == 1 {
        times[mid]
    } else {
        (times[mid - 1] + times[mid]) / 2.0
    }
}

pub fn run(args: &BenchArgs) -> Result<(), CliError> {
    let n = args.n as usize;
    let runs = args.runs as usize;
    let bins = args.bins.map(|b| b as usize);
    let reports = measure(n, &args.methods, runs, args.seed, bins)?;

    let mut table = Table::new(["method", "n", "runs", "median_s", "elems_per_s"]);
    for r in &reports {
        table.push_row([
            r.method.clone(),
            r.n.to_string(),
            r.runs.to_string(),
            num(r.seconds, args.csv),
            num(r.throughput, args.csv),
        ]);
    }
    let mut out = std::io::stdout().lock();
    table.write(&mut out, args.csv)?;
    writeln!(
        std::io::stderr(),
        "timed {} method(s) on {} elements: median of {} runs after {} warm-ups",
        reports.len(),
        n,
        runs,
        WARMUPS
    )?;
    Ok(())
}
