//! Image pipeline: loads 8-bit RGB images, matches each channel's pixel
//! distribution to the style images, and writes the result as PNG. Styles
//! of a different size are quantile-resampled to the content's pixel count.

use std::io::Write;
use std::path::Path;

use efdm::matching::{
    combined_loss, content_loss_with, efdm_with_order, efdmix_with_order, hist_match,
    moment_match, sample_lambda, sort_permutation, style_loss_with, LambdaSpec, LossReduction,
    MatchConfig, MatchError, Method, MomentMode, SpatialLayout,
};
use efdm::tensorops::resample_sorted;
use image::{DynamicImage, ImageFormat, ImageReader, RgbImage};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::args::ImageArgs;
use crate::error::CliError;
use crate::report::{num, Table};

pub(crate) fn require_rgb8(img: DynamicImage, path: &Path) -> Result<RgbImage, CliError> {
    match img {
        DynamicImage::ImageRgb8(rgb) => Ok(rgb),
        other => Err(CliError::Io(format!(
            "{}: expected an 8-bit RGB image, got {:?}",
            path.display(),
            other.color()
        ))),
    }
}

pub(crate) fn load_rgb8(path: &Path) -> Result<RgbImage, CliError> {
    let reader = ImageReader::open(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let img = reader
        .decode()
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    require_rgb8(img, path)
}

/// Splits an image into per-channel f64 vectors in row-major pixel order.
pub(crate) fn channels_of(img: &RgbImage) -> [Vec<f64>; 3] {
    let n = img.width() as usize * img.height() as usize;
    let mut ch = [
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    ];
    for p in img.pixels() {
        ch[0].push(p[0] as f64);
        ch[1].push(p[1] as f64);
        ch[2].push(p[2] as f64);
    }
    ch
}

fn validate_weights(weights: &[f64], styles: usize) -> Result<(), CliError> {
    if weights.len() != styles {
        return Err(MatchError::WeightCount {
            styles,
            weights: weights.len(),
        }
        .into());
    }
    for &w in weights {
        if !w.is_finite() || w < 0.0 {
            return Err(MatchError::NegativeWeight(w).into());
        }
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(MatchError::WeightSum(sum).into());
    }
    Ok(())
}

/// Matches one content channel against every style channel and blends the
/// results with the style weights. Sort-based methods compute the content
/// ordering once and reuse it across styles.
#[allow(clippy::too_many_arguments)]
fn match_channel(
    x: &[f64],
    styles: &[Vec<f64>],
    weights: &[f64],
    cfg: &MatchConfig,
    layout: SpatialLayout,
    lambda: Option<f64>,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<f64>, CliError> {
    let order = match cfg.method {
        Method::Efdm | Method::Efdmix => {
            Some(sort_permutation(x, cfg.tie_break, Some(layout), rng)?)
        }
        _ => None,
    };
    let mut acc = vec![0.0f64; x.len()];
    for (y, &w) in styles.iter().zip(weights) {
        let vals = match cfg.method {
            Method::Efdm => efdm_with_order(x, y, order.as_ref().unwrap())?,
            Method::Efdmix => {
                efdmix_with_order(x, y, order.as_ref().unwrap(), lambda.unwrap())?
            }
            Method::MomentMean => moment_match(x, y, MomentMode::Mean, cfg.epsilon)?.values,
            Method::MomentStd => moment_match(x, y, MomentMode::Std, cfg.epsilon)?.values,
            Method::MomentBoth => moment_match(x, y, MomentMode::Both, cfg.epsilon)?.values,
            Method::HistMatch => hist_match(x, y)?.values,
        };
        for (a, v) in acc.iter_mut().zip(&vals) {
            *a += w * v;
        }
    }
    Ok(acc)
}

pub fn run(args: &ImageArgs) -> Result<(), CliError> {
    let cfg = args.flags.config()?;
    let content = load_rgb8(&args.content)?;
    let styles: Vec<RgbImage> = args
        .styles
        .iter()
        .map(|p| load_rgb8(p))
        .collect::<Result<_, _>>()?;

    let k = styles.len();
    let weights: Vec<f64> = if args.weights.is_empty() {
        vec![1.0 / k as f64; k]
    } else {
        args.weights.clone()
    };
    validate_weights(&weights, k)?;

    let (w, h) = (content.width(), content.height());
    let n = w as usize * h as usize;
    let layout = SpatialLayout::new(h as usize, w as usize);
    let content_ch = channels_of(&content);

    // Resample style channels whose pixel count differs from the content's.
    let mut style_ch: Vec<[Vec<f64>; 3]> = Vec::with_capacity(k);
    for s in &styles {
        let raw = channels_of(s);
        let mut fit: [Vec<f64>; 3] = [Vec::new(), Vec::new(), Vec::new()];
        for (dst, src) in fit.iter_mut().zip(raw) {
            *dst = if src.len() == n {
                src
            } else {
                resample_sorted(&src, n)?
            };
        }
        style_ch.push(fit);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    // One mixing weight per image, resolved before any ordering work so the
    // draw does not depend on the tie-break strategy.
    let lambda = if cfg.method == Method::Efdmix {
        Some(match cfg.lambda {
            LambdaSpec::Fixed(l) => l,
            LambdaSpec::Sampled => sample_lambda(cfg.alpha, &mut rng)?,
        })
    } else {
        None
    };

    let mut out_ch: Vec<Vec<f64>> = Vec::with_capacity(3);
    for c in 0..3 {
        let per_style: Vec<Vec<f64>> = style_ch.iter().map(|s| s[c].clone()).collect();
        out_ch.push(match_channel(
            &content_ch[c],
            &per_style,
            &weights,
            &cfg,
            layout,
            lambda,
            &mut rng,
        )?);
    }

    let mut buf = Vec::with_capacity(n * 3);
    for i in 0..n {
        for ch in &out_ch {
            buf.push(ch[i].clamp(0.0, 255.0).round_ties_even() as u8);
        }
    }
    let out_img = RgbImage::from_raw(w, h, buf)
        .expect("buffer length matches dimensions");
    out_img
        .save_with_format(&args.out, ImageFormat::Png)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.out.display())))?;

    let mut diag = format!(
        "wrote {} ({w}x{h}), method {}, {} style(s)",
        args.out.display(),
        cfg.method.name(),
        k
    );
    if let Some(l) = lambda {
        diag.push_str(&format!(", lambda {l}"));
    }
    writeln!(std::io::stderr(), "{diag}")?;

    if let Some(omega) = args.omega {
        let reduction = if args.mse {
            LossReduction::MeanSquared
        } else {
            LossReduction::Norm
        };
        let flat_out: Vec<f64> = out_ch.iter().flatten().copied().collect();
        let flat_content: Vec<f64> = content_ch.iter().flatten().copied().collect();
        let content_term = content_loss_with(&flat_out, &flat_content, reduction)?;
        let mut style_term = 0.0;
        for (s, &wt) in style_ch.iter().zip(&weights) {
            style_term += wt * style_loss_with(&out_ch, s, cfg.tie_break, reduction)?;
        }
        let combined = combined_loss(content_term, style_term, omega)?;

        let mut table = Table::new(["metric", "value"]);
        table.push_row(["content".to_string(), num(content_term, args.csv)]);
        table.push_row(["style".to_string(), num(style_term, args.csv)]);
        table.push_row(["combined".to_string(), num(combined, args.csv)]);
        table.write(&mut std::io::stdout().lock(), args.csv)?;
    }
    Ok(())
}
