use std::fs::File;
use std::io::{BufWriter, Write};

use fmoment::gaps::{self, SamplingFit};
use fmoment::ingest::{self, SegmentationConfig};
use fmoment::intermittency::{self, Bootstrap, CouplingParams};
use fmoment::moments::{f2_unlike_sign_estimate, fq_binned_estimate};
use fmoment::synth::{self, Generated};
use fmoment::Sign;
use serde_json::Value;

use crate::args::{Cli, Command, Format, GapsArgs, MomentsArgs, OutputArgs, PredictArgs, ScanArgs, SynthArgs};
use crate::input::{self, Data};
use crate::report::{write_points, AnalysisReport, Points, Table};
use crate::{CliError, CliResult};

pub fn run(cli: &Cli) -> CliResult<String> {
    let (report, format) = match &cli.command {
        Command::Moments(a) => (moments(a)?, a.output.format),
        Command::Scan(a) => (scan(a)?, a.output.format),
        Command::Gaps(a) => (gaps(a)?, a.output.format),
        Command::Predict(a) => (predict(a)?, a.output.format),
        Command::Synth(a) => (synth(a)?, a.format),
    };
    report.check_finite()?;
    Ok(match format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    })
}

fn echo_output(report: &mut AnalysisReport, out: &OutputArgs) {
    report.config("format", out.format.name());
    report.config(
        "emit_points",
        out.emit_points.as_ref().map_or(Value::Null, |p| Value::from(p.display().to_string())),
    );
}

fn segmentations(window: usize, bins: &[usize]) -> CliResult<Vec<SegmentationConfig>> {
    if bins.is_empty() {
        return Err(CliError::Usage("--bins needs at least one value".into()));
    }
    bins.iter().map(|&m| Ok(SegmentationConfig::new(window, m)?)).collect()
}

fn count_input_signs(data: &Data, requested: Vec<Sign>, report: &mut AnalysisReport) -> Vec<Sign> {
    if data.is_counts() && requested.contains(&Sign::Neg) {
        report.warn("count input has no negative channel; reporting the positive channel only");
        return vec![Sign::Pos];
    }
    requested
}

fn moments(a: &MomentsArgs) -> CliResult<AnalysisReport> {
    let mut report = AnalysisReport::new("moments");
    let data = input::load(&a.input, &mut report)?;
    let window = data.resolve_window(a.window)?;
    if a.q < 2 {
        return Err(CliError::Usage(format!("--q must be at least 2, got {}", a.q)));
    }
    report.config("window", window);
    report.config("bins", a.bins.clone());
    report.config("q_max", a.q);
    report.config("sign", a.sign.name());
    echo_output(&mut report, &a.output);

    let cfgs = segmentations(window, &a.bins)?;
    let signs = data.signs()?;
    let channels = count_input_signs(&data, a.sign.signs(), &mut report);
    let unlike = !data.is_counts() && a.sign == crate::args::SignMode::Both;

    let mut table = Table::new("moments", &["n_bins", "q", "channel", "f_q", "std_err", "n_events"]);
    let mut plots: Vec<Points> = Vec::new();
    let mut plot = |name: String, m: usize, v: f64| match plots.iter_mut().find(|p| p.name == name) {
        Some(p) => p.points.push((m as f64, v)),
        None => plots.push(Points { name, x_label: "n_bins".into(), y_label: "f_q".into(), points: vec![(m as f64, v)] }),
    };
    for cfg in &cfgs {
        let ws = input::windows(&data, signs.as_ref(), *cfg)?;
        let m = cfg.n_bins();
        for q in 2..=a.q {
            for &sign in &channels {
                let est = fq_binned_estimate(&ws, sign, q)?;
                table.push(vec![m.into(), q.into(), sign.name().into(), est.value.into(), est.std_err.into(), est.n_events.into()]);
                plot(format!("moments_{sign}_q{q}"), m, est.value);
            }
            if unlike && q == 2 {
                let est = f2_unlike_sign_estimate(&ws)?;
                table.push(vec![m.into(), q.into(), "unlike".into(), est.value.into(), est.std_err.into(), est.n_events.into()]);
                plot("moments_unlike_q2".into(), m, est.value);
            }
        }
    }
    report.results.push(table);
    if let Some(dir) = &a.output.emit_points {
        write_points(dir, &plots)?;
    }
    Ok(report)
}

fn scan(a: &ScanArgs) -> CliResult<AnalysisReport> {
    if a.bins.len() < 2 {
        return Err(CliError::Usage("need ≥2 segmentations (pass at least two --bins values)".into()));
    }
    if a.bins.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::Usage("--bins must be strictly increasing".into()));
    }
    if a.q < 2 {
        return Err(CliError::Usage(format!("--q must be at least 2, got {}", a.q)));
    }
    if !(a.d.is_finite() && a.d > 0.0) {
        return Err(CliError::Usage(format!("--d must be positive, got {}", a.d)));
    }
    let mut report = AnalysisReport::new("scan");
    let data = input::load(&a.input, &mut report)?;
    let window = data.resolve_window(a.window)?;
    report.config("window", window);
    report.config("bins", a.bins.clone());
    report.config("q", a.q);
    report.config("d", a.d);
    report.config("sign", a.sign.sign().name());
    report.config("bootstrap", a.bootstrap);
    echo_output(&mut report, &a.output);

    let sign = a.sign.sign();
    if data.is_counts() && sign == Sign::Neg {
        return Err(CliError::Usage("count input has no negative channel".into()));
    }
    let cfgs = segmentations(window, &a.bins)?;
    let signs = data.signs()?;
    let levels = cfgs
        .iter()
        .map(|cfg| Ok((cfg.n_bins(), input::windows(&data, signs.as_ref(), *cfg)?)))
        .collect::<CliResult<Vec<_>>>()?;
    let points = if a.bootstrap > 0 {
        let b = Bootstrap { resamples: a.bootstrap, seed: a.input.seed };
        intermittency::scan_bins_with_bootstrap(&levels, sign, a.q, b)?
    } else {
        intermittency::scan_bins(&levels, sign, a.q)?
    };

    let mut cols = vec!["n_bins", "f_q", "std_err"];
    if a.bootstrap > 0 {
        cols.push("bootstrap_err");
    }
    let mut table = Table::new("points", &cols);
    for p in &points {
        let mut row = vec![p.n_bins.into(), p.f_q.into(), p.std_err.into()];
        if let Some(b) = p.bootstrap_err {
            row.push(b.into());
        }
        table.push(row);
    }
    report.results.push(table);

    let fit = intermittency::fit_scaling(&points, a.q, a.d).map_err(|e| CliError::Runtime(e.to_string()))?;
    for m in &fit.excluded {
        report.warn(format!("point at n_bins={m} has F_q <= 0 and was excluded from the fit"));
    }
    let mut fit_table = Table::new(
        "fit",
        &["q", "d", "slope_phi", "slope_stderr", "intercept", "dq", "residual_rms", "n_points", "weighted"],
    );
    fit_table.push(vec![
        fit.q.into(),
        fit.d.into(),
        fit.slope_phi.into(),
        fit.slope_stderr.into(),
        fit.intercept.into(),
        fit.dq.into(),
        fit.residual_rms.into(),
        fit.n_points.into(),
        fit.weighted.into(),
    ]);
    report.results.push(fit_table);

    if let Some(dir) = &a.output.emit_points {
        let pts = points.iter().map(|p| (p.n_bins as f64, p.f_q)).collect();
        write_points(
            dir,
            &[Points { name: format!("scan_{sign}_q{}", a.q), x_label: "n_bins".into(), y_label: "f_q".into(), points: pts }],
        )?;
    }
    Ok(report)
}

fn gaps(a: &GapsArgs) -> CliResult<AnalysisReport> {
    if a.resample.is_empty() || a.resample.contains(&0) {
        return Err(CliError::Usage("--resample factors must be positive".into()));
    }
    let base = a.resample[0];
    if let Some(f) = a.resample.iter().find(|&&f| !f.is_multiple_of(base)) {
        return Err(CliError::Usage(format!("resample factor {f} is not a multiple of {base}")));
    }
    let mut report = AnalysisReport::new("gaps");
    let data = input::load(&a.input, &mut report)?;
    report.config("sign", a.sign.name());
    report.config("method", a.method.method().to_string());
    report.config("resample", a.resample.clone());
    report.config("min_fit_count", gaps::MIN_FIT_COUNT);
    echo_output(&mut report, &a.output);

    let series = data.prices()?;
    let method = a.method.method();
    let mut fits: Vec<(Sign, Vec<SamplingFit>)> = Vec::new();
    for sign in a.sign.signs() {
        let per_factor = a
            .resample
            .iter()
            .map(|&k| gaps::gap_fit_at(&series, k, sign, method))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        fits.push((sign, per_factor));
    }

    let mut fit_table = Table::new(
        "fits",
        &["factor", "unit_seconds", "sign", "method", "rho", "rho_stderr", "amplitude", "n_runs", "n_bins_used"],
    );
    let mut hist_table = Table::new("histogram", &["factor", "sign", "gap", "count", "probability"]);
    let mut plots = Vec::new();
    for (sign, per_factor) in &fits {
        for f in per_factor {
            fit_table.push(vec![
                f.factor.into(),
                f.unit.into(),
                sign.name().into(),
                method.to_string().into(),
                f.fit.rho.into(),
                f.fit.rho_stderr.into(),
                f.fit.amplitude.into(),
                f.fit.total_runs.into(),
                f.fit.n_bins_used.into(),
            ]);
            for (g, c, p) in f.histogram.rows() {
                hist_table.push(vec![f.factor.into(), sign.name().into(), g.into(), c.into(), p.into()]);
            }
            plots.push(Points {
                name: format!("gaps_{sign}_k{}", f.factor),
                x_label: "gap".into(),
                y_label: "probability".into(),
                points: f.histogram.rows().map(|(g, _, p)| (g as f64, p)).collect(),
            });
        }
    }
    report.results.push(fit_table);
    report.results.push(hist_table);

    if a.resample.len() > 1 {
        let mut cmp = Table::new(
            "consistency",
            &["sign", "factor_a", "factor_b", "rho_a", "rho_b", "ratio", "ratio_stderr", "z_score"],
        );
        for (sign, per_factor) in &fits {
            for other in &per_factor[1..] {
                let r = gaps::compare_fits(per_factor[0].clone(), other.clone());
                cmp.push(vec![
                    sign.name().into(),
                    r.a.factor.into(),
                    r.b.factor.into(),
                    r.a.fit.rho.into(),
                    r.b.fit.rho.into(),
                    r.ratio.into(),
                    r.ratio_stderr.into(),
                    r.z_score.into(),
                ]);
            }
        }
        report.results.push(cmp);
    }
    if let Some(dir) = &a.output.emit_points {
        write_points(dir, &plots)?;
    }
    Ok(report)
}

fn predict(a: &PredictArgs) -> CliResult<AnalysisReport> {
    let params = CouplingParams::new(a.alpha_s, a.c_a)?;
    if a.q.is_empty() || a.q.contains(&0) {
        return Err(CliError::Usage("--q values must be positive".into()));
    }
    let mut report = AnalysisReport::new("predict");
    report.config("alpha_s", a.alpha_s);
    report.config("c_a", a.c_a);
    report.config("q", a.q.clone());
    echo_output(&mut report, &a.output);

    let mut coupling = Table::new("coupling", &["alpha_s", "c_a", "gamma0"]);
    coupling.push(vec![a.alpha_s.into(), a.c_a.into(), params.gamma0().into()]);
    report.results.push(coupling);
    let mut table = Table::new("predictions", &["q", "dq"]);
    let mut pts = Vec::new();
    for &q in &a.q {
        let dq = intermittency::dq_prediction(&params, q)?;
        table.push(vec![q.into(), dq.into()]);
        pts.push((q as f64, dq));
    }
    report.results.push(table);
    if let Some(dir) = &a.output.emit_points {
        write_points(dir, &[Points { name: "dq_prediction".into(), x_label: "q".into(), y_label: "dq".into(), points: pts }])?;
    }
    Ok(report)
}

fn synth(a: &SynthArgs) -> CliResult<AnalysisReport> {
    let spec = input::parse_spec(&a.synth, a.seed)?;
    let mut report = AnalysisReport::new("synth");
    report.config("synth", spec.to_string());
    report.config("seed", a.seed);
    report.config("rng", format!("{}-v{}", fmoment::rng::RNG_ALGORITHM, fmoment::rng::RNG_VERSION));
    report.config("output", a.output.display().to_string());
    report.config("format", a.format.name());

    let io_err = |e: std::io::Error| CliError::Runtime(format!("{}: {e}", a.output.display()));
    let mut out = BufWriter::new(File::create(&a.output).map_err(io_err)?);
    let rows = match synth::generate(&spec)? {
        Generated::Prices(p) => {
            ingest::write_price_csv(&p, &mut out).map_err(io_err)?;
            p.len()
        }
        Generated::Signs(s) => {
            let p = ingest::integrate_signs(&s);
            ingest::write_price_csv(&p, &mut out).map_err(io_err)?;
            p.len()
        }
        Generated::Counts(c) => {
            writeln!(out, "timestamp,count").map_err(io_err)?;
            for (i, n) in c.iter().enumerate() {
                writeln!(out, "{},{n}", i as i64 * spec.unit).map_err(io_err)?;
            }
            c.len()
        }
        Generated::Cascades(cs) => {
            // Intensities of all realizations back to back, in the price schema.
            writeln!(out, "timestamp,price").map_err(io_err)?;
            let mut i = 0i64;
            for c in &cs {
                for x in &c.intensity {
                    writeln!(out, "{},{x}", i * spec.unit).map_err(io_err)?;
                    i += 1;
                }
            }
            i as usize
        }
    };
    out.flush().map_err(io_err)?;
    let mut table = Table::new("output", &["kind", "rows"]);
    table.push(vec![spec.kind_name().into(), rows.into()]);
    report.results.push(table);
    Ok(report)
}
