//! Tensor pipeline: reads rank-4 NPY tensors, matches each (batch, channel)
//! row of the content tensor to the style tensor, writes the result, and
//! prints per-row before/after statistics.

use std::io::Write;
use std::path::Path;

use efdm::matching::{combined_loss, content_loss_with, style_loss_with, LossReduction};
use efdm::stats::{ks_distance, summarize};
use efdm::tensorops::{
    apply_channelwise, read_tensor, resample_sorted, write_tensor, FeatureTensor,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::args::TensorArgs;
use crate::error::CliError;
use crate::report::{num, Table};

fn read(path: &Path) -> Result<FeatureTensor, CliError> {
    read_tensor(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn run(args: &TensorArgs) -> Result<(), CliError> {
    let cfg = args.flags.config()?;
    let x = read(&args.x)?;
    let y = read(&args.y)?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let out = apply_channelwise(&x, &y, &cfg, &mut rng, args.resample)?;
    write_tensor(&args.out, &out.tensor)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.out.display())))?;

    let mut table = Table::new([
        "b", "c", "n", "lambda", "mean_pre", "mean_post", "std_pre", "std_post", "skew_pre",
        "skew_post", "kurt_pre", "kurt_post", "linf_pre", "linf_post", "ks_pre", "ks_post",
    ]);
    for rec in &out.rows {
        let xr = x.row(rec.batch, rec.channel);
        let or = out.tensor.row(rec.batch, rec.channel);
        let yr = y.row(rec.batch, rec.channel);
        let pre = summarize(xr)?;
        let post = summarize(or)?;
        let ks_pre = ks_distance(xr, yr)?;
        let ks_post = ks_distance(or, yr)?;
        table.push_row([
            rec.batch.to_string(),
            rec.channel.to_string(),
            pre.n.to_string(),
            rec.lambda_used.map_or(String::new(), |l| num(l, args.csv)),
            num(pre.mean, args.csv),
            num(post.mean, args.csv),
            num(pre.std, args.csv),
            num(post.std, args.csv),
            num(pre.skewness, args.csv),
            num(post.skewness, args.csv),
            num(pre.kurtosis, args.csv),
            num(post.kurtosis, args.csv),
            num(pre.linf, args.csv),
            num(post.linf, args.csv),
            num(ks_pre, args.csv),
            num(ks_post, args.csv),
        ]);
    }
    let mut stdout = std::io::stdout().lock();
    table.write(&mut stdout, args.csv)?;
    writeln!(
        std::io::stderr(),
        "wrote {}: shape {}, dtype {}, method {}",
        args.out.display(),
        out.tensor.shape(),
        out.tensor.dtype(),
        cfg.method.name()
    )?;

    if let Some(omega) = args.omega {
        let reduction = if args.mse {
            LossReduction::MeanSquared
        } else {
            LossReduction::Norm
        };
        let content_term = content_loss_with(out.tensor.data(), x.data(), reduction)?;

        let shape = x.shape();
        let mut stylized_layers: Vec<&[f64]> = Vec::new();
        let mut style_rows: Vec<Vec<f64>> = Vec::new();
        for b in 0..shape.batch {
            for c in 0..shape.channels {
                stylized_layers.push(out.tensor.row(b, c));
                let yr = y.row(b, c);
                style_rows.push(if yr.len() == shape.plane() {
                    yr.to_vec()
                } else {
                    resample_sorted(yr, shape.plane())?
                });
            }
        }
        let style_layers: Vec<&[f64]> = style_rows.iter().map(Vec::as_slice).collect();
        let style_term =
            style_loss_with(&stylized_layers, &style_layers, cfg.tie_break, reduction)?;
        let combined = combined_loss(content_term, style_term, omega)?;

        writeln!(stdout)?;
        let mut losses = Table::new(["metric", "value"]);
        losses.push_row(["content".to_string(), num(content_term, args.csv)]);
        losses.push_row(["style".to_string(), num(style_term, args.csv)]);
        losses.push_row(["combined".to_string(), num(combined, args.csv)]);
        losses.write(&mut stdout, args.csv)?;
    }
    Ok(())
}
