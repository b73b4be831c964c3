//! Minimal SVG line plots for the CSV output: a convenience view, no
//! styling guarantees.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};

use crate::cli::PlotArgs;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 56.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

pub fn run_plot(args: &PlotArgs) -> anyhow::Result<()> {
    let text = std::fs::read_to_string(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    let header: Vec<String> = lines
        .next()
        .context("empty CSV")?
        .split(',')
        .map(|s| s.trim().to_string())
        .collect();
    let mut data: Vec<Vec<f64>> = vec![Vec::new(); header.len()];
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != header.len() {
            bail!("ragged CSV row: '{line}'");
        }
        for (col, field) in fields.iter().enumerate() {
            data[col].push(field.trim().parse().with_context(|| format!("parsing '{field}'"))?);
        }
    }
    if data[0].is_empty() {
        bail!("CSV has no data rows");
    }

    let col_index = |name: &str| -> anyhow::Result<usize> {
        header
            .iter()
            .position(|h| h == name)
            .with_context(|| format!("no column '{name}' in {:?}", header))
    };
    let x_col = match &args.x {
        Some(name) => col_index(name)?,
        None => 0,
    };
    let y_cols: Vec<usize> = if args.y.is_empty() {
        (0..header.len()).filter(|&c| c != x_col).collect()
    } else {
        args.y
            .iter()
            .map(|n| col_index(n))
            .collect::<anyhow::Result<_>>()?
    };
    if y_cols.is_empty() {
        bail!("nothing to plot");
    }

    let xs = &data[x_col];
    let (xmin, xmax) = min_max(xs);
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for &c in &y_cols {
        let (lo, hi) = min_max(&data[c]);
        ymin = ymin.min(lo);
        ymax = ymax.max(hi);
    }
    if ymin == ymax {
        ymin -= 0.5;
        ymax += 0.5;
    }

    let sx = |x: f64| MARGIN + (x - xmin) / (xmax - xmin).max(f64::MIN_POSITIVE) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - ymin) / (ymax - ymin) * (HEIGHT - 2.0 * MARGIN);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    ));
    // Axes.
    svg.push_str(&format!(
        "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>\n",
        m = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN,
        t = MARGIN
    ));
    for frac in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let xv = xmin + frac * (xmax - xmin);
        let yv = ymin + frac * (ymax - ymin);
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"middle\">{:.3}</text>\n",
            sx(xv),
            HEIGHT - MARGIN + 16.0,
            xv
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"end\">{:.3}</text>\n",
            MARGIN - 6.0,
            sy(yv) + 4.0,
            yv
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
        WIDTH / 2.0,
        HEIGHT - 12.0,
        header[x_col]
    ));
    for (k, &c) in y_cols.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let points: Vec<String> = xs
            .iter()
            .zip(&data[c])
            .map(|(&x, &y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            points.join(" ")
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\" fill=\"{color}\">{}</text>\n",
            WIDTH - MARGIN + 4.0,
            MARGIN + 16.0 * k as f64,
            header[c]
        ));
    }
    svg.push_str("</svg>\n");

    let out = args
        .out
        .clone()
        .unwrap_or_else(|| default_svg_path(&args.input));
    std::fs::write(&out, svg).with_context(|| format!("writing {}", out.display()))?;
    eprintln!("plot: {} -> {}", args.input.display(), out.display());
    Ok(())
}

fn default_svg_path(input: &Path) -> PathBuf {
    input.with_extension("svg")
}

fn min_max(v: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &x in v {
        lo = lo.min(x);
        hi = hi.max(x);
    }
    (lo, hi)
}
