//! Resolves `--input` / `--synth` into analysable data.

use fmoment::ingest::{self, CsvConfig, HeaderMode, PriceSeries, SegmentationConfig, SignSeries};
use fmoment::moments::EventWindow;
use fmoment::synth::{self, Generated, GeneratorKind, GeneratorSpec};
use serde_json::Value;

use crate::args::InputArgs;
use crate::report::AnalysisReport;
use crate::{CliError, CliResult};

pub enum Data {
    Prices(PriceSeries),
    Signs(SignSeries),
    /// Per-tick counts, one vector per independent realization.
    Counts { realizations: Vec<Vec<u32>>, default_window: Option<usize> },
}

pub fn parse_spec(text: &str, seed: u64) -> CliResult<GeneratorSpec> {
    let mut spec: GeneratorSpec = text.parse().map_err(|e: fmoment::Error| CliError::Usage(e.to_string()))?;
    spec.seed = seed;
    Ok(spec)
}

/// Loads the input and echoes its resolved description into the report.
pub fn load(args: &InputArgs, report: &mut AnalysisReport) -> CliResult<Data> {
    report.config("seed", args.seed);
    if let Some(path) = &args.input {
        let delimiter = u8::try_from(args.delimiter)
            .map_err(|_| CliError::Usage(format!("delimiter `{}` is not a single byte", args.delimiter)))?;
        report.config("input", path.display().to_string());
        report.config("delimiter", args.delimiter.to_string());
        let cfg = CsvConfig { delimiter, header: HeaderMode::Auto };
        let series = ingest::load_price_csv(path, &cfg).map_err(|e| CliError::Runtime(e.to_string()))?;
        report.config("unit_seconds", series.unit());
        return Ok(Data::Prices(series));
    }
    let text = args.synth.as_deref().expect("clap requires --input or --synth");
    let spec = parse_spec(text, args.seed)?;
    report.config("synth", spec.to_string());
    report.config("rng", Value::from(format!("{}-v{}", fmoment::rng::RNG_ALGORITHM, fmoment::rng::RNG_VERSION)));
    let levels = match spec.kind {
        GeneratorKind::Cascade { levels, .. } => Some(levels),
        _ => None,
    };
    Ok(match synth::generate(&spec)? {
        Generated::Prices(p) => Data::Prices(p),
        Generated::Signs(s) => Data::Signs(s),
        Generated::Counts(c) => Data::Counts {
            realizations: vec![c.into_iter().map(|x| x.min(u32::MAX as u64) as u32).collect()],
            default_window: None,
        },
        Generated::Cascades(cs) => Data::Counts {
            realizations: cs.into_iter().map(|c| c.counts).collect(),
            default_window: levels.map(|l| 1usize << l),
        },
    })
}

impl Data {
    pub fn is_counts(&self) -> bool {
        matches!(self, Data::Counts { .. })
    }

    pub fn signs(&self) -> CliResult<Option<SignSeries>> {
        Ok(match self {
            Data::Prices(p) => Some(ingest::to_signs(p)?),
            Data::Signs(s) => Some(s.clone()),
            Data::Counts { .. } => None,
        })
    }

    pub fn resolve_window(&self, window: Option<usize>) -> CliResult<usize> {
        match (window, self) {
            (Some(w), _) => Ok(w),
            (None, Data::Counts { default_window: Some(w), .. }) => Ok(*w),
            (None, _) => Err(CliError::Usage("--window is required for this input".into())),
        }
    }

    pub fn prices(&self) -> CliResult<PriceSeries> {
        match self {
            Data::Prices(p) => Ok(p.clone()),
            Data::Signs(s) => Ok(ingest::integrate_signs(s)),
            Data::Counts { .. } => Err(CliError::Usage("gap analysis needs a price or sign series".into())),
        }
    }
}

/// Windows at one segmentation; `signs` is the precomputed sign series for
/// price and sign inputs.
pub fn windows(data: &Data, signs: Option<&SignSeries>, cfg: SegmentationConfig) -> CliResult<Vec<EventWindow>> {
    let ws = match (data, signs) {
        (Data::Counts { realizations, .. }, _) => {
            let mut out = Vec::new();
            for r in realizations {
                out.extend(ingest::segment_counts(r, cfg)?);
            }
            out
        }
        (_, Some(s)) => ingest::segment(s, cfg)?,
        (_, None) => unreachable!("sign series resolved for price and sign inputs"),
    };
    if ws.is_empty() {
        return Err(CliError::Runtime(format!("no complete {}-tick windows in the input", cfg.window_len())));
    }
    Ok(ws)
}
