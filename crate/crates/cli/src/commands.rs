use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use deltadiv::classical::{
    bregman, f_divergence, jensen_shannon, kl, kl_symmetrized, renyi, renyi_max, total_variation,
    ConvexGenerator,
};
use deltadiv::delta::{delta_divergence, delta_max, delta_star, DeltaBreakdown};
use deltadiv::experiments::{
    format_float, metric_violation_search, run_scatter, write_scatter, MeasureColumn,
    MeasureSelection, OutputFormat, ScatterOptions, ThresholdSweep,
};
use deltadiv::simplex::DiscreteDistribution;

use crate::manifest::RunManifest;
use crate::{parse_log_base, require_seed, AppError, Cli, Command, FormatArg, SamplerArgs};

pub fn run(cli: &Cli) -> Result<(), AppError> {
    match &cli.command {
        Command::Compute {
            p,
            q,
            measure,
            verbose,
        } => compute(cli, p, q, measure, *verbose),
        Command::Sample(args) => sample(cli, args),
        Command::Experiment(args) => experiment(cli, args),
        Command::Sweep {
            sampler,
            measure,
            ref_threshold,
            thresholds,
        } => sweep(cli, sampler, measure, *ref_threshold, thresholds),
        Command::MetricSearch { classes, triples } => metric_search(cli, *classes, *triples),
    }
}

// ---------------------------------------------------------------------------
// shared helpers

fn open_output(out: &Option<PathBuf>) -> Result<Box<dyn Write>, AppError> {
    match out {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| AppError::Failure(format!("cannot create {}: {e}", path.display())))?;
            Ok(Box::new(BufWriter::new(file)))
        }
        None => Ok(Box::new(BufWriter::new(std::io::stdout()))),
    }
}

fn float_value(v: f64) -> Value {
    if v.is_finite() {
        serde_json::Number::from_f64(v)
            .map(Value::Number)
            .unwrap_or(Value::Null)
    } else {
        Value::String(format_float(v))
    }
}

fn probs_value(d: &DiscreteDistribution) -> Value {
    Value::Array(d.probs().iter().map(|&p| float_value(p)).collect())
}

fn probs_plain(d: &DiscreteDistribution) -> String {
    let fields: Vec<String> = d.probs().iter().map(|&p| format_float(p)).collect();
    fields.join(",")
}

fn workers_of(cli: &Cli) -> Result<usize, AppError> {
    if cli.workers == 0 {
        return Err(AppError::Usage("--workers must be at least 1".to_string()));
    }
    Ok(cli.workers)
}

// ---------------------------------------------------------------------------
// compute

/// A measure requested on the command line.
enum MeasureRequest {
    Kl,
    KlSym,
    Js,
    Tv,
    Delta,
    DeltaStar,
    DeltaMax,
    Renyi(f64),
    RenyiMax,
    FDiv(String),
    Bregman(String),
}

impl MeasureRequest {
    fn parse(token: &str) -> Result<Self, AppError> {
        if let Some(alpha) = token.strip_prefix("renyi:") {
            if alpha == "inf" {
                return Ok(Self::RenyiMax);
            }
            let alpha: f64 = alpha
                .parse()
                .map_err(|_| AppError::Usage(format!("invalid renyi order `{alpha}`")))?;
            return Ok(Self::Renyi(alpha));
        }
        if let Some(name) = token.strip_prefix("f-div:") {
            return Ok(Self::FDiv(name.to_string()));
        }
        if let Some(name) = token.strip_prefix("bregman:") {
            return Ok(Self::Bregman(name.to_string()));
        }
        match token {
            "kl" => Ok(Self::Kl),
            "kl-sym" => Ok(Self::KlSym),
            "js" => Ok(Self::Js),
            "tv" => Ok(Self::Tv),
            "delta" => Ok(Self::Delta),
            "delta-star" => Ok(Self::DeltaStar),
            "delta-max" => Ok(Self::DeltaMax),
            other => Err(AppError::Usage(format!("unknown measure `{other}`"))),
        }
    }

    fn display_name(&self) -> String {
        match self {
            Self::Kl => "kl".to_string(),
            Self::KlSym => "kl-sym".to_string(),
            Self::Js => "js".to_string(),
            Self::Tv => "tv".to_string(),
            Self::Delta => "delta".to_string(),
            Self::DeltaStar => "delta-star".to_string(),
            Self::DeltaMax => "delta-max".to_string(),
            Self::Renyi(alpha) => format!("renyi:{alpha}"),
            Self::RenyiMax => "renyi:inf".to_string(),
            Self::FDiv(name) => format!("f-div:{name}"),
            Self::Bregman(name) => format!("bregman:{name}"),
        }
    }
}

fn parse_measures(raw: &str) -> Result<Vec<MeasureRequest>, AppError> {
    if raw == "all" {
        return Ok(vec![
            MeasureRequest::Kl,
            MeasureRequest::KlSym,
            MeasureRequest::Js,
            MeasureRequest::Tv,
            MeasureRequest::Delta,
            MeasureRequest::DeltaStar,
            MeasureRequest::DeltaMax,
        ]);
    }
    raw.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(MeasureRequest::parse)
        .collect()
}

/// Parse a distribution from a comma-separated decimal string, or from a JSON
/// array of numbers when the argument is `@path`.
fn parse_distribution(raw: &str, flag: &str) -> Result<DiscreteDistribution, AppError> {
    let values: Vec<f64> = if let Some(path) = raw.strip_prefix('@') {
        let text = std::fs::read_to_string(path)
            .map_err(|e| AppError::Failure(format!("cannot read {path}: {e}")))?;
        serde_json::from_str(&text)
            .map_err(|e| AppError::Failure(format!("{path} is not a JSON array of numbers: {e}")))?
    } else {
        raw.split(',')
            .enumerate()
            .map(|(i, token)| {
                token.trim().parse::<f64>().map_err(|_| {
                    AppError::Failure(format!(
                        "could not parse `{}` at position {} in {flag}",
                        token.trim(),
                        i
                    ))
                })
            })
            .collect::<Result<_, _>>()?
    };
    DiscreteDistribution::validate(&values)
        .map_err(|e| AppError::Failure(format!("{flag}: {e}")))
}

fn breakdown_value(b: &DeltaBreakdown) -> Value {
    json!({
        "value": float_value(b.value),
        "case": b.case.as_str(),
        "a": float_value(b.a),
        "b": float_value(b.b),
        "pim": float_value(b.pim),
        "group_clutter": float_value(b.group_clutter),
        "omega": b.pair.omega,
        "omega_tilde": b.pair.omega_tilde,
        "labels_agree": b.pair.labels_agree,
    })
}

fn compute(cli: &Cli, p: &str, q: &str, measure: &str, verbose: bool) -> Result<(), AppError> {
    match cli.format {
        None | Some(FormatArg::Json) => {}
        Some(_) => {
            return Err(AppError::Usage(
                "compute prints plain text or --format json".to_string(),
            ))
        }
    }
    let log_base = parse_log_base(&cli.log_base_kl)?;
    let p = parse_distribution(p, "--p")?;
    let q = parse_distribution(q, "--q")?;
    let requests = parse_measures(measure)?;
    if requests.is_empty() {
        return Err(AppError::Usage("no measures selected".to_string()));
    }

    let mut values: Vec<(String, f64)> = Vec::with_capacity(requests.len());
    let mut breakdown: Option<DeltaBreakdown> = None;
    for request in &requests {
        let value = match request {
            MeasureRequest::Kl => kl(&p, &q, log_base)?.value,
            MeasureRequest::KlSym => kl_symmetrized(&p, &q, log_base)?.value,
            MeasureRequest::Js => jensen_shannon(&p, &q, 2.0)?.value,
            MeasureRequest::Tv => total_variation(&p, &q)?.value,
            MeasureRequest::Delta => {
                let b = delta_divergence(&p, &q)?;
                let value = b.value;
                breakdown = Some(b);
                value
            }
            MeasureRequest::DeltaStar => delta_star(&p, &q)?.value,
            MeasureRequest::DeltaMax => delta_max(&p, &q)?.value,
            MeasureRequest::Renyi(alpha) => renyi(&p, &q, *alpha, log_base)?.value,
            MeasureRequest::RenyiMax => renyi_max(&p, &q, log_base)?.value,
            MeasureRequest::FDiv(name) => {
                let gen = ConvexGenerator::by_name(name)
                    .map_err(|e| AppError::Usage(e.to_string()))?;
                f_divergence(&p, &q, &gen)?.value
            }
            MeasureRequest::Bregman(name) => {
                let gen = ConvexGenerator::by_name(name)
                    .map_err(|e| AppError::Usage(e.to_string()))?;
                bregman(&p, &q, &gen)?.value
            }
        };
        values.push((request.display_name(), value));
    }

    let mut out = open_output(&cli.out)?;
    if cli.format == Some(FormatArg::Json) {
        let mut measures = serde_json::Map::new();
        for (name, value) in &values {
            measures.insert(name.clone(), float_value(*value));
        }
        let mut root = serde_json::Map::new();
        root.insert("measures".to_string(), Value::Object(measures));
        if verbose {
            if let Some(b) = &breakdown {
                root.insert("breakdown".to_string(), breakdown_value(b));
            }
        }
        writeln!(out, "{}", Value::Object(root)).map_err(io_failure)?;
    } else {
        for (name, value) in &values {
            writeln!(out, "{name} {}", format_float(*value)).map_err(io_failure)?;
        }
        if verbose {
            if let Some(b) = &breakdown {
                writeln!(out, "delta.case {}", b.case.as_str()).map_err(io_failure)?;
                writeln!(out, "delta.a {}", format_float(b.a)).map_err(io_failure)?;
                writeln!(out, "delta.b {}", format_float(b.b)).map_err(io_failure)?;
                writeln!(out, "delta.pim {}", format_float(b.pim)).map_err(io_failure)?;
                writeln!(out, "delta.group_clutter {}", format_float(b.group_clutter))
                    .map_err(io_failure)?;
                writeln!(out, "delta.omega {}", b.pair.omega).map_err(io_failure)?;
                writeln!(out, "delta.omega_tilde {}", b.pair.omega_tilde).map_err(io_failure)?;
                writeln!(out, "delta.labels_agree {}", b.pair.labels_agree).map_err(io_failure)?;
            }
        }
    }
    out.flush().map_err(io_failure)?;
    Ok(())
}

fn io_failure(e: std::io::Error) -> AppError {
    AppError::Failure(format!("write failed: {e}"))
}

// ---------------------------------------------------------------------------
// sample

fn sample(cli: &Cli, args: &SamplerArgs) -> Result<(), AppError> {
    let seed = require_seed(cli)?;
    let config = args.to_config(seed)?;
    let format = match cli.format {
        None | Some(FormatArg::Csv) => FormatArg::Csv,
        Some(FormatArg::Jsonl) => FormatArg::Jsonl,
        Some(FormatArg::Json) => {
            return Err(AppError::Usage(
                "sample emits row streams: use csv or jsonl".to_string(),
            ))
        }
    };
    let sampler = deltadiv::sampling::PairSampler::new(config.clone())?;
    let mut out = open_output(&cli.out)?;

    if format == FormatArg::Csv {
        let mut header = vec!["sample_id".to_string()];
        header.extend((0..config.classes).map(|i| format!("p_{i}")));
        header.extend((0..config.classes).map(|i| format!("q_{i}")));
        writeln!(out, "{}", header.join(",")).map_err(io_failure)?;
        for k in 0..config.count {
            let (p, q) = sampler.pair(k)?;
            writeln!(out, "{k},{},{}", probs_plain(&p), probs_plain(&q)).map_err(io_failure)?;
        }
    } else {
        for k in 0..config.count {
            let (p, q) = sampler.pair(k)?;
            let line = json!({
                "sample_id": k,
                "p": probs_value(&p),
                "q": probs_value(&q),
            });
            writeln!(out, "{line}").map_err(io_failure)?;
        }
    }
    out.flush().map_err(io_failure)?;
    if let Some(path) = &cli.out {
        println!("rows={} out={}", config.count, path.display());
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// experiment

/// Passes bytes through while hashing them, so the checksum covers exactly
/// what lands in the output file.
struct HashingWriter<W: Write> {
    inner: W,
    hasher: Sha256,
    bytes: u64,
}

impl<W: Write> HashingWriter<W> {
    fn new(inner: W) -> Self {
        Self {
            inner,
            hasher: Sha256::new(),
            bytes: 0,
        }
    }

    fn finish(mut self) -> std::io::Result<(String, u64)> {
        self.inner.flush()?;
        let digest = self.hasher.finalize();
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        Ok((hex, self.bytes))
    }
}

impl<W: Write> Write for HashingWriter<W> {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        let written = self.inner.write(buf)?;
        self.hasher.update(&buf[..written]);
        self.bytes += written as u64;
        Ok(written)
    }

    fn flush(&mut self) -> std::io::Result<()> {
        self.inner.flush()
    }
}

fn config_echo(cli: &Cli, args: &SamplerArgs, seed: u64, format: &str) -> BTreeMap<String, Value> {
    let mut map = BTreeMap::new();
    map.insert("classes".to_string(), json!(args.classes));
    map.insert(
        "mode".to_string(),
        json!(match args.mode {
            crate::ModeArg::Unconstrained => "unconstrained",
            crate::ModeArg::DominantValue => "dominant-value",
            crate::ModeArg::DominantDiff => "dominant-diff",
        }),
    );
    map.insert("mu".to_string(), json!(args.mu));
    map.insert(
        "p_mu".to_string(),
        args.p_mu.map(float_value).unwrap_or(Value::Null),
    );
    map.insert(
        "diff".to_string(),
        args.diff.map(float_value).unwrap_or(Value::Null),
    );
    map.insert("count".to_string(), json!(args.count));
    map.insert("both_dominant".to_string(), json!(args.both_dominant));
    map.insert("seed".to_string(), json!(seed));
    map.insert("format".to_string(), json!(format));
    map.insert("workers".to_string(), json!(cli.workers));
    map.insert("log_base_kl".to_string(), json!(cli.log_base_kl));
    map
}

fn experiment(cli: &Cli, args: &SamplerArgs) -> Result<(), AppError> {
    let seed = require_seed(cli)?;
    let config = args.to_config(seed)?;
    let workers = workers_of(cli)?;
    let log_base_kl = parse_log_base(&cli.log_base_kl)?;
    let out_path = cli.out.clone().ok_or_else(|| {
        AppError::Usage("experiment requires --out (a manifest is written next to it)".to_string())
    })?;
    let (format, format_name) = match cli.format {
        None | Some(FormatArg::Csv) => (OutputFormat::Csv, "csv"),
        Some(FormatArg::Jsonl) => (OutputFormat::JsonLines, "jsonl"),
        Some(FormatArg::Json) => {
            return Err(AppError::Usage(
                "experiment emits row streams: use csv or jsonl".to_string(),
            ))
        }
    };

    let opts = ScatterOptions {
        selection: MeasureSelection::all(),
        log_base_kl,
        workers,
    };

    let started_at = chrono::Utc::now();
    let timer = Instant::now();
    let file = File::create(&out_path)
        .map_err(|e| AppError::Failure(format!("cannot create {}: {e}", out_path.display())))?;
    let mut writer = HashingWriter::new(BufWriter::new(file));
    let rows = write_scatter(&config, &opts, format, &mut writer)?;
    let (sha256, bytes) = writer.finish().map_err(io_failure)?;
    let elapsed = timer.elapsed();
    let finished_at = chrono::Utc::now();

    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        command: "experiment".to_string(),
        seed,
        config: config_echo(cli, args, seed, format_name),
        started_at: started_at.to_rfc3339(),
        finished_at: finished_at.to_rfc3339(),
        rows,
        output_bytes: bytes,
        output_path: out_path.display().to_string(),
        output_sha256: sha256.clone(),
    };
    let manifest_path = PathBuf::from(format!("{}.manifest.json", out_path.display()));
    manifest
        .write(&manifest_path)
        .map_err(|e| AppError::Failure(format!("cannot write manifest: {e}")))?;

    println!(
        "rows={rows} elapsed_ms={} out={} manifest={} sha256={sha256}",
        elapsed.as_millis(),
        out_path.display(),
        manifest_path.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// sweep

fn sweep(
    cli: &Cli,
    args: &SamplerArgs,
    measure: &str,
    ref_threshold: f64,
    thresholds: &[f64],
) -> Result<(), AppError> {
    let seed = require_seed(cli)?;
    let config = args.to_config(seed)?;
    let workers = workers_of(cli)?;
    let log_base_kl = parse_log_base(&cli.log_base_kl)?;
    if thresholds.is_empty() {
        return Err(AppError::Usage("--thresholds must not be empty".to_string()));
    }
    let column = MeasureColumn::parse(measure).map_err(|e| AppError::Usage(e.to_string()))?;
    let mut sweep = ThresholdSweep::new(column, ref_threshold, thresholds)
        .map_err(|e| AppError::Usage(e.to_string()))?;

    let selection = MeasureSelection {
        kl: matches!(column, MeasureColumn::DKl),
        kl_sym: matches!(column, MeasureColumn::DKlSym),
        js: matches!(column, MeasureColumn::DJs),
        tv: matches!(column, MeasureColumn::DTv),
        delta_star: matches!(column, MeasureColumn::DeltaStar),
        delta_max: matches!(column, MeasureColumn::DeltaMax),
    };
    let opts = ScatterOptions {
        selection,
        log_base_kl,
        workers,
    };
    run_scatter(&config, &opts, |record| {
        sweep.push(record);
        Ok(())
    })?;
    let reports = sweep.finish()?;

    let mut out = open_output(&cli.out)?;
    match cli.format {
        None | Some(FormatArg::Csv) => {
            writeln!(
                out,
                "measure,reference_measure,reference_threshold,threshold,false_positive_rate,false_negative_rate,sample_count"
            )
            .map_err(io_failure)?;
            for r in &reports {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    r.measure_name,
                    r.reference_measure,
                    format_float(ref_threshold),
                    format_float(r.threshold),
                    format_float(r.false_positive_rate),
                    format_float(r.false_negative_rate),
                    r.sample_count
                )
                .map_err(io_failure)?;
            }
        }
        Some(FormatArg::Json) | Some(FormatArg::Jsonl) => {
            let objects: Vec<Value> = reports
                .iter()
                .map(|r| {
                    json!({
                        "measure": r.measure_name,
                        "reference_measure": r.reference_measure,
                        "reference_threshold": float_value(ref_threshold),
                        "threshold": float_value(r.threshold),
                        "false_positive_rate": float_value(r.false_positive_rate),
                        "false_negative_rate": float_value(r.false_negative_rate),
                        "sample_count": r.sample_count,
                    })
                })
                .collect();
            if cli.format == Some(FormatArg::Json) {
                writeln!(out, "{}", Value::Array(objects)).map_err(io_failure)?;
            } else {
                for object in objects {
                    writeln!(out, "{object}").map_err(io_failure)?;
                }
            }
        }
    }
    out.flush().map_err(io_failure)?;
    if let Some(path) = &cli.out {
        println!(
            "thresholds={} rows={} out={}",
            reports.len(),
            reports.first().map(|r| r.sample_count).unwrap_or(0),
            path.display()
        );
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// metric-search

fn metric_search(cli: &Cli, classes: usize, triples: u64) -> Result<(), AppError> {
    let seed = require_seed(cli)?;
    if classes < 2 {
        return Err(AppError::Usage("--classes must be at least 2".to_string()));
    }
    match cli.format {
        None | Some(FormatArg::Json) => {}
        Some(_) => {
            return Err(AppError::Usage(
                "metric-search prints plain text or --format json".to_string(),
            ))
        }
    }
    let hit = metric_violation_search(classes, triples, seed)?;
    let mut out = open_output(&cli.out)?;
    if cli.format == Some(FormatArg::Json) {
        let value = match &hit {
            Some(v) => json!({
                "found": true,
                "triple_index": v.triple_index,
                "direct": float_value(v.direct),
                "via": float_value(v.via),
                "margin": float_value(v.margin),
                "p": probs_value(&v.p),
                "q": probs_value(&v.q),
                "r": probs_value(&v.r),
            }),
            None => json!({ "found": false, "triples": triples }),
        };
        writeln!(out, "{value}").map_err(io_failure)?;
    } else {
        match &hit {
            Some(v) => {
                writeln!(
                    out,
                    "violation at triple {}: delta(p,r) = {} exceeds delta(p,q) + delta(q,r) = {} by {}",
                    v.triple_index,
                    format_float(v.direct),
                    format_float(v.via),
                    format_float(v.margin)
                )
                .map_err(io_failure)?;
                writeln!(out, "p {}", probs_plain(&v.p)).map_err(io_failure)?;
                writeln!(out, "q {}", probs_plain(&v.q)).map_err(io_failure)?;
                writeln!(out, "r {}", probs_plain(&v.r)).map_err(io_failure)?;
            }
            None => {
                writeln!(out, "no violation found in {triples} triples").map_err(io_failure)?;
            }
        }
    }
    out.flush().map_err(io_failure)?;
    Ok(())
}
