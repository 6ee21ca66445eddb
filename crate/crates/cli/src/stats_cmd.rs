//! Per-channel statistics of a tensor or image. The input kind is sniffed
//! from the file bytes, so .npy tensors and PNG/PPM images both work
//! without a format flag.

use std::io::Write;

use efdm::stats::{equivalent_percent, standardized_linf, summarize};
use efdm::tensorops::read_tensor_from;

use crate::args::StatsArgs;
use crate::error::CliError;
use crate::image_cmd::{channels_of, require_rgb8};
use crate::report::{num, Table};

const NPY_MAGIC: &[u8] = b"\x93NUMPY";
const HIST_BINS: usize = 64;

struct ChannelRow {
    batch: usize,
    channel: usize,
    values: Vec<f64>,
}

fn load_rows(args: &StatsArgs) -> Result<Vec<ChannelRow>, CliError> {
    let bytes = std::fs::read(&args.input)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.input.display())))?;
    let mut rows = Vec::new();
    if bytes.starts_with(NPY_MAGIC) {
        let t = read_tensor_from(&bytes)
            .map_err(|e| CliError::Io(format!("{}: {e}", args.input.display())))?;
        let s = t.shape();
        for b in 0..s.batch {
            for c in 0..s.channels {
                rows.push(ChannelRow {
                    batch: b,
                    channel: c,
                    values: t.row(b, c).to_vec(),
                });
            }
        }
    } else {
        let img = image::load_from_memory(&bytes)
            .map_err(|e| CliError::Io(format!("{}: {e}", args.input.display())))?;
        let rgb = require_rgb8(img, &args.input)?;
        for (c, values) in channels_of(&rgb).into_iter().enumerate() {
            rows.push(ChannelRow {
                batch: 0,
                channel: c,
                values,
            });
        }
    }
    Ok(rows)
}

/// Fixed-width histogram over [min, max]; a constant sample lands entirely
/// in the first bin.
fn histogram(values: &[f64], bins: usize) -> Vec<(f64, f64, usize)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in values {
        let idx = if width == 0.0 {
            0
        } else {
            (((v - lo) / width) as usize).min(bins - 1)
        };
        counts[idx] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(i, n)| (lo + i as f64 * width, lo + (i + 1) as f64 * width, n))
        .collect()
}

pub fn run(args: &StatsArgs) -> Result<(), CliError> {
    let rows = load_rows(args)?;

    let linf_header = if args.standardized_linf {
        "linf_std"
    } else {
        "linf"
    };
    let mut summary = Table::new([
        "b",
        "c",
        "n",
        "mean",
        "std",
        "skewness",
        "kurtosis",
        linf_header,
        "equivalent_percent",
    ]);
    for row in &rows {
        let s = summarize(&row.values)?;
        let linf = if args.standardized_linf {
            standardized_linf(&row.values)?
        } else {
            s.linf
        };
        summary.push_row([
            row.batch.to_string(),
            row.channel.to_string(),
            s.n.to_string(),
            num(s.mean, args.csv),
            num(s.std, args.csv),
            num(s.skewness, args.csv),
            num(s.kurtosis, args.csv),
            num(linf, args.csv),
            num(equivalent_percent(&row.values)?, args.csv),
        ]);
    }

    let mut hist = Table::new(["b", "c", "bin", "lo", "hi", "count"]);
    for row in &rows {
        for (i, (lo, hi, count)) in histogram(&row.values, HIST_BINS).iter().enumerate() {
            hist.push_row([
                row.batch.to_string(),
                row.channel.to_string(),
                i.to_string(),
                num(*lo, args.csv),
                num(*hi, args.csv),
                count.to_string(),
            ]);
        }
    }

    let mut stdout = std::io::stdout().lock();
    summary.write(&mut stdout, args.csv)?;
    writeln!(stdout)?;
    hist.write(&mut stdout, args.csv)?;
    writeln!(
        std::io::stderr(),
        "{}: {} channel row(s), {} histogram bins each",
        args.input.display(),
        rows.len(),
        HIST_BINS
    )?;
    Ok(())
}
