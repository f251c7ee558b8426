//! Scatter experiments over sampled posterior pairs.
//!
//! [`run_scatter`] evaluates the full measure panel on every sampled pair and
//! emits one [`ScatterRecord`] per pair, in sample order, streaming (records
//! are never accumulated in memory by the harness itself). Output is
//! byte-reproducible: floats serialize with 17 significant digits, `+inf`
//! serializes as `inf`, and a run's bytes depend only on its config, not on
//! the worker count.
//!
//! Downstream analyses: [`threshold_sweep`] measures the false-positive /
//! false-negative trade-off of any panel column against congruence ground
//! truth defined by a Delta divergence threshold; [`bin_by_delta`] summarizes
//! comparator measures per Delta bin; [`metric_violation_search`] hunts for
//! triangle-inequality violations.

use std::io::Write;

use rayon::prelude::*;

use crate::classical::{jensen_shannon, kl, kl_symmetrized, total_variation};
use crate::delta::{clutter_terms, delta_divergence, delta_max, delta_star, DeltaCase};
use crate::error::{Error, Result};
use crate::sampling::{stream_rng, PairSampler, SamplerConfig};
use crate::simplex::DiscreteDistribution;

/// Plot ceiling used by consumers of K-L columns; values above it are still
/// emitted, only flagged by plot emitters.
pub const DEFAULT_PLOT_CEILING: f64 = 8.0;

/// Default bin width for [`bin_by_delta`].
pub const DEFAULT_BIN_WIDTH: f64 = 0.01;

/// Records are computed in chunks of this size when running with workers.
const PARALLEL_CHUNK: u64 = 8192;

/// One sampled pair's full measure panel; one row per plotted point.
///
/// Field names double as the CSV column names, in declaration order.
/// Measures excluded by the [`MeasureSelection`] hold `NaN` and serialize as
/// `nan`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatterRecord {
    pub sample_id: u64,
    pub m: usize,
    /// `|p_mu - q_mu|` for the constrained class, or `|p_omega - q_omega|`
    /// when unconstrained.
    pub dom_diff: f64,
    pub d_kl: f64,
    pub d_kl_sym: f64,
    pub d_js: f64,
    pub d_tv: f64,
    pub d_delta: f64,
    pub delta_star: f64,
    pub delta_max: f64,
    pub case_tag: DeltaCase,
    pub clutter_tv: f64,
    pub clutter_delta: f64,
    pub a_term: f64,
    pub b_term: f64,
    pub log_base_kl: f64,
}

pub const CSV_HEADER: [&str; 16] = [
    "sample_id",
    "m",
    "dom_diff",
    "d_kl",
    "d_kl_sym",
    "d_js",
    "d_tv",
    "d_delta",
    "delta_star",
    "delta_max",
    "case_tag",
    "clutter_tv",
    "clutter_delta",
    "a_term",
    "b_term",
    "log_base_kl",
];

/// 17-significant-digit decimal serialization; `+inf`/`-inf`/`NaN` become
/// `inf`/`-inf`/`nan`.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v:.16e}")
    }
}

impl ScatterRecord {
    fn csv_fields(&self) -> [String; 16] {
        [
            self.sample_id.to_string(),
            self.m.to_string(),
            format_float(self.dom_diff),
            format_float(self.d_kl),
            format_float(self.d_kl_sym),
            format_float(self.d_js),
            format_float(self.d_tv),
            format_float(self.d_delta),
            format_float(self.delta_star),
            format_float(self.delta_max),
            self.case_tag.as_str().to_string(),
            format_float(self.clutter_tv),
            format_float(self.clutter_delta),
            format_float(self.a_term),
            format_float(self.b_term),
            format_float(self.log_base_kl),
        ]
    }

    fn json_line(&self) -> String {
        fn num(v: f64) -> String {
            if v.is_finite() {
                format!("{v:.16e}")
            } else {
                format!("\"{}\"", format_float(v))
            }
        }
        format!(
            concat!(
                "{{\"sample_id\":{},\"m\":{},\"dom_diff\":{},\"d_kl\":{},\"d_kl_sym\":{},",
                "\"d_js\":{},\"d_tv\":{},\"d_delta\":{},\"delta_star\":{},\"delta_max\":{},",
                "\"case_tag\":\"{}\",\"clutter_tv\":{},\"clutter_delta\":{},\"a_term\":{},",
                "\"b_term\":{},\"log_base_kl\":{}}}"
            ),
            self.sample_id,
            self.m,
            num(self.dom_diff),
            num(self.d_kl),
            num(self.d_kl_sym),
            num(self.d_js),
            num(self.d_tv),
            num(self.d_delta),
            num(self.delta_star),
            num(self.delta_max),
            self.case_tag.as_str(),
            num(self.clutter_tv),
            num(self.clutter_delta),
            num(self.a_term),
            num(self.b_term),
            num(self.log_base_kl),
        )
    }
}

/// Which comparator measures to evaluate per pair. The Delta panel
/// (`d_delta`, case tag, clutters, `a_term`, `b_term`) is always computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeasureSelection {
    pub kl: bool,
    pub kl_sym: bool,
    pub js: bool,
    pub tv: bool,
    pub delta_star: bool,
    pub delta_max: bool,
}

impl MeasureSelection {
    pub fn all() -> Self {
        Self {
            kl: true,
            kl_sym: true,
            js: true,
            tv: true,
            delta_star: true,
            delta_max: true,
        }
    }
}

impl Default for MeasureSelection {
    fn default() -> Self {
        Self::all()
    }
}

/// Harness options: measure selection, K-L log base, worker count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterOptions {
    pub selection: MeasureSelection,
    pub log_base_kl: f64,
    pub workers: usize,
}

impl Default for ScatterOptions {
    fn default() -> Self {
        Self {
            selection: MeasureSelection::all(),
            log_base_kl: std::f64::consts::E,
            workers: 1,
        }
    }
}

fn compute_record(
    sampler: &PairSampler,
    selection: &MeasureSelection,
    log_base_kl: f64,
    sample_id: u64,
) -> Result<ScatterRecord> {
    let (p, q) = sampler.pair(sample_id)?;
    let breakdown = delta_divergence(&p, &q)?;
    let (clutter_delta, clutter_tv) = clutter_terms(&p, &q, &breakdown.pair);

    let constrained = sampler.config().mode.constrained_class();
    let anchor = constrained.unwrap_or(breakdown.pair.omega);
    let dom_diff = (p.probs()[anchor] - q.probs()[anchor]).abs();

    let d_kl = if selection.kl {
        kl(&p, &q, log_base_kl)?.value
    } else {
        f64::NAN
    };
    let d_kl_sym = if selection.kl_sym {
        kl_symmetrized(&p, &q, log_base_kl)?.value
    } else {
        f64::NAN
    };
    let d_js = if selection.js {
        jensen_shannon(&p, &q, 2.0)?.value
    } else {
        f64::NAN
    };
    let d_tv = if selection.tv {
        total_variation(&p, &q)?.value
    } else {
        f64::NAN
    };
    let star = if selection.delta_star {
        delta_star(&p, &q)?.value
    } else {
        f64::NAN
    };
    let max = if selection.delta_max {
        delta_max(&p, &q)?.value
    } else {
        f64::NAN
    };

    let record = ScatterRecord {
        sample_id,
        m: p.classes(),
        dom_diff,
        d_kl,
        d_kl_sym,
        d_js,
        d_tv,
        d_delta: breakdown.value,
        delta_star: star,
        delta_max: max,
        case_tag: breakdown.case,
        clutter_tv,
        clutter_delta,
        a_term: breakdown.a,
        b_term: breakdown.b,
        log_base_kl,
    };

    // per-row relations, enforced during the run
    if !record.d_tv.is_nan() {
        assert!(
            record.d_delta <= record.d_tv + 1e-12,
            "row {sample_id}: d_delta {} above d_tv {}",
            record.d_delta,
            record.d_tv
        );
    }
    assert!(
        record.clutter_delta <= record.clutter_tv + 1e-12,
        "row {sample_id}: clutter_delta {} above clutter_tv {}",
        record.clutter_delta,
        record.clutter_tv
    );
    if !record.delta_star.is_nan() {
        assert!(
            record.delta_star <= record.d_delta + 1e-12
                && record.d_delta <= 2.0 * record.delta_star + 1e-12,
            "row {sample_id}: delta_star {} vs d_delta {}",
            record.delta_star,
            record.d_delta
        );
    }
    Ok(record)
}

/// Evaluate the panel on every sampled pair and hand each record to `emit`,
/// in sample order. With `workers > 1` records are computed in parallel
/// chunks; emission order and content are identical for any worker count.
pub fn run_scatter<F>(config: &SamplerConfig, opts: &ScatterOptions, mut emit: F) -> Result<u64>
where
    F: FnMut(&ScatterRecord) -> Result<()>,
{
    let sampler = PairSampler::new(config.clone())?;
    let selection = opts.selection;
    if opts.workers <= 1 {
        for k in 0..config.count {
            let record = compute_record(&sampler, &selection, opts.log_base_kl, k)?;
            emit(&record)?;
        }
        return Ok(config.count);
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| Error::WriteFailure(std::io::Error::other(e)))?;
    let mut start = 0u64;
    while start < config.count {
        let end = (start + PARALLEL_CHUNK).min(config.count);
        let chunk: Vec<Result<ScatterRecord>> = pool.install(|| {
            (start..end)
                .into_par_iter()
                .map(|k| compute_record(&sampler, &selection, opts.log_base_kl, k))
                .collect()
        });
        for record in chunk {
            emit(&record?)?;
        }
        start = end;
    }
    Ok(config.count)
}

/// Serialization format for scatter output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    JsonLines,
}

/// Run the experiment and serialize it to `out`. Returns the row count.
pub fn write_scatter<W: Write>(
    config: &SamplerConfig,
    opts: &ScatterOptions,
    format: OutputFormat,
    out: W,
) -> Result<u64> {
    match format {
        OutputFormat::Csv => {
            let mut writer = csv::Writer::from_writer(out);
            writer
                .write_record(CSV_HEADER)
                .map_err(|e| Error::WriteFailure(std::io::Error::other(e)))?;
            let rows = run_scatter(config, opts, |record| {
                writer
                    .write_record(record.csv_fields())
                    .map_err(|e| Error::WriteFailure(std::io::Error::other(e)))
            })?;
            writer
                .flush()
                .map_err(Error::WriteFailure)?;
            Ok(rows)
        }
        OutputFormat::JsonLines => {
            let mut out = out;
            let rows = run_scatter(config, opts, |record| {
                writeln!(out, "{}", record.json_line()).map_err(Error::WriteFailure)
            })?;
            out.flush().map_err(Error::WriteFailure)?;
            Ok(rows)
        }
    }
}

/// A panel column usable in sweeps and binned summaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureColumn {
    DKl,
    DKlSym,
    DJs,
    DTv,
    DDelta,
    DeltaStar,
    DeltaMax,
}

impl MeasureColumn {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "d_kl" | "kl" => Ok(Self::DKl),
            "d_kl_sym" | "kl-sym" => Ok(Self::DKlSym),
            "d_js" | "js" => Ok(Self::DJs),
            "d_tv" | "tv" => Ok(Self::DTv),
            "d_delta" | "delta" => Ok(Self::DDelta),
            "delta_star" | "delta-star" => Ok(Self::DeltaStar),
            "delta_max" | "delta-max" => Ok(Self::DeltaMax),
            other => Err(Error::UnknownMeasure {
                name: other.to_string(),
            }),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::DKl => "d_kl",
            Self::DKlSym => "d_kl_sym",
            Self::DJs => "d_js",
            Self::DTv => "d_tv",
            Self::DDelta => "d_delta",
            Self::DeltaStar => "delta_star",
            Self::DeltaMax => "delta_max",
        }
    }

    pub fn of(self, record: &ScatterRecord) -> f64 {
        match self {
            Self::DKl => record.d_kl,
            Self::DKlSym => record.d_kl_sym,
            Self::DJs => record.d_js,
            Self::DTv => record.d_tv,
            Self::DDelta => record.d_delta,
            Self::DeltaStar => record.delta_star,
            Self::DeltaMax => record.delta_max,
        }
    }
}

/// False-positive / false-negative rates of flagging incongruence with
/// `measure > threshold`, against ground truth `d_delta > reference`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdReport {
    pub threshold: f64,
    pub measure_name: &'static str,
    pub reference_measure: &'static str,
    pub false_positive_rate: f64,
    pub false_negative_rate: f64,
    pub sample_count: u64,
}

/// Streaming accumulator behind [`threshold_sweep`].
#[derive(Debug, Clone)]
pub struct ThresholdSweep {
    measure: MeasureColumn,
    reference_threshold: f64,
    thresholds: Vec<f64>,
    false_positives: Vec<u64>,
    false_negatives: Vec<u64>,
    total: u64,
}

impl ThresholdSweep {
    pub fn new(
        measure: MeasureColumn,
        reference_threshold: f64,
        thresholds: &[f64],
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&reference_threshold) {
            return Err(Error::OutOfRange {
                value: reference_threshold,
            });
        }
        Ok(Self {
            measure,
            reference_threshold,
            thresholds: thresholds.to_vec(),
            false_positives: vec![0; thresholds.len()],
            false_negatives: vec![0; thresholds.len()],
            total: 0,
        })
    }

    pub fn push(&mut self, record: &ScatterRecord) {
        let incongruent = record.d_delta > self.reference_threshold;
        let value = self.measure.of(record);
        for (i, &t) in self.thresholds.iter().enumerate() {
            let flagged = value > t;
            if flagged && !incongruent {
                self.false_positives[i] += 1;
            }
            if !flagged && incongruent {
                self.false_negatives[i] += 1;
            }
        }
        self.total += 1;
    }

    pub fn finish(self) -> Result<Vec<ThresholdReport>> {
        if self.total == 0 {
            return Err(Error::EmptyInput);
        }
        let n = self.total as f64;
        Ok(self
            .thresholds
            .iter()
            .enumerate()
            .map(|(i, &threshold)| ThresholdReport {
                threshold,
                measure_name: self.measure.name(),
                reference_measure: MeasureColumn::DDelta.name(),
                false_positive_rate: self.false_positives[i] as f64 / n,
                false_negative_rate: self.false_negatives[i] as f64 / n,
                sample_count: self.total,
            })
            .collect())
    }
}

/// Label every record congruent/incongruent by `d_delta` against
/// `reference_threshold`, then report FP/FN rates of `measure > t` for each
/// candidate `t`. Rates are fractions of the full record count.
pub fn threshold_sweep(
    records: &[ScatterRecord],
    measure: MeasureColumn,
    reference_threshold: f64,
    thresholds: &[f64],
) -> Result<Vec<ThresholdReport>> {
    let mut sweep = ThresholdSweep::new(measure, reference_threshold, thresholds)?;
    for record in records {
        sweep.push(record);
    }
    sweep.finish()
}

/// Running min / max / mean of one comparator within a Delta bin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremeStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, Copy)]
struct ExtremeAccum {
    min: f64,
    max: f64,
    sum: f64,
}

impl ExtremeAccum {
    fn new() -> Self {
        Self {
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
            sum: 0.0,
        }
    }

    fn push(&mut self, v: f64) {
        self.min = self.min.min(v);
        self.max = self.max.max(v);
        self.sum += v;
    }

    fn finish(self, count: u64) -> ExtremeStats {
        ExtremeStats {
            min: self.min,
            max: self.max,
            mean: self.sum / count as f64,
        }
    }
}

/// Per-bin summary of the comparator measures.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaBinSummary {
    pub lo: f64,
    pub hi: f64,
    pub count: u64,
    pub d_tv: ExtremeStats,
    pub d_kl: ExtremeStats,
    pub delta_star: ExtremeStats,
    pub delta_max: ExtremeStats,
}

/// Streaming accumulator behind [`bin_by_delta`].
#[derive(Debug, Clone)]
pub struct DeltaBinner {
    width: f64,
    counts: Vec<u64>,
    tv: Vec<ExtremeAccum>,
    kl: Vec<ExtremeAccum>,
    star: Vec<ExtremeAccum>,
    max: Vec<ExtremeAccum>,
}

impl DeltaBinner {
    pub fn new(width: f64) -> Result<Self> {
        if !(width > 0.0 && width <= 1.0) {
            return Err(Error::OutOfRange { value: width });
        }
        let bins = (1.0 / width).ceil() as usize;
        Ok(Self {
            width,
            counts: vec![0; bins],
            tv: vec![ExtremeAccum::new(); bins],
            kl: vec![ExtremeAccum::new(); bins],
            star: vec![ExtremeAccum::new(); bins],
            max: vec![ExtremeAccum::new(); bins],
        })
    }

    pub fn push(&mut self, record: &ScatterRecord) {
        let idx = ((record.d_delta / self.width) as usize).min(self.counts.len() - 1);
        self.counts[idx] += 1;
        self.tv[idx].push(record.d_tv);
        self.kl[idx].push(record.d_kl);
        self.star[idx].push(record.delta_star);
        self.max[idx].push(record.delta_max);
    }

    /// Nonempty bins in ascending order.
    pub fn finish(self) -> Result<Vec<DeltaBinSummary>> {
        if self.counts.iter().all(|&c| c == 0) {
            return Err(Error::EmptyInput);
        }
        Ok(self
            .counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &count)| DeltaBinSummary {
                lo: i as f64 * self.width,
                hi: (i as f64 + 1.0) * self.width,
                count,
                d_tv: self.tv[i].finish(count),
                d_kl: self.kl[i].finish(count),
                delta_star: self.star[i].finish(count),
                delta_max: self.max[i].finish(count),
            })
            .collect())
    }
}

/// Bin records by `d_delta` and summarize the comparator measures per bin.
pub fn bin_by_delta(records: &[ScatterRecord], bin_width: f64) -> Result<Vec<DeltaBinSummary>> {
    let mut binner = DeltaBinner::new(bin_width)?;
    for record in records {
        binner.push(record);
    }
    binner.finish()
}

/// A sampled triple violating the Delta triangle inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleViolation {
    pub triple_index: u64,
    pub p: DiscreteDistribution,
    pub q: DiscreteDistribution,
    pub r: DiscreteDistribution,
    /// `delta(p, r)`
    pub direct: f64,
    /// `delta(p, q) + delta(q, r)`
    pub via: f64,
    pub margin: f64,
}

/// Sample `triples` triples `(p, q, r)` and return the first one with
/// `delta(p, r) > delta(p, q) + delta(q, r) + 1e-12`, or `None`.
///
/// For `m = 2` Delta divergence coincides with total variation, which is a
/// metric, so the search comes back empty; for `m >= 3` merging different
/// nondominant sets per pair breaks the triangle inequality and random
/// search finds witnesses quickly.
pub fn metric_violation_search(
    m: usize,
    triples: u64,
    seed: u64,
) -> Result<Option<TriangleViolation>> {
    if m < 2 {
        return Err(Error::TooFewClasses { classes: m });
    }
    use crate::sampling::sample_simplex;
    for k in 0..triples {
        let mut rng = stream_rng(seed, k);
        let p = sample_simplex(m, &mut rng);
        let q = sample_simplex(m, &mut rng);
        let r = sample_simplex(m, &mut rng);
        let direct = delta_divergence(&p, &r)?.value;
        let via = delta_divergence(&p, &q)?.value + delta_divergence(&q, &r)?.value;
        if direct > via + 1e-12 {
            return Ok(Some(TriangleViolation {
                triple_index: k,
                p,
                q,
                r,
                direct,
                via,
                margin: direct - via,
            }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_run(m: usize, count: u64, seed: u64) -> Vec<ScatterRecord> {
        let config = SamplerConfig::unconstrained(m, count, seed);
        let mut records = Vec::new();
        run_scatter(&config, &ScatterOptions::default(), |r| {
            records.push(r.clone());
            Ok(())
        })
        .unwrap();
        records
    }

    #[test]
    fn identical_configs_emit_identical_csv_bytes() {
        let config = SamplerConfig::unconstrained(6, 500, 42);
        let opts = ScatterOptions::default();
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_scatter(&config, &opts, OutputFormat::Csv, &mut a).unwrap();
        write_scatter(&config, &opts, OutputFormat::Csv, &mut b).unwrap();
        assert_eq!(a, b);
        assert!(!a.is_empty());
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let config = SamplerConfig::unconstrained(4, 2_000, 7);
        let serial = ScatterOptions::default();
        let parallel = ScatterOptions {
            workers: 4,
            ..Default::default()
        };
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_scatter(&config, &serial, OutputFormat::Csv, &mut a).unwrap();
        write_scatter(&config, &parallel, OutputFormat::Csv, &mut b).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn row_count_matches_config_exactly() {
        let config = SamplerConfig::unconstrained(3, 1234, 5);
        let mut rows = 0u64;
        let emitted = run_scatter(&config, &ScatterOptions::default(), |_| {
            rows += 1;
            Ok(())
        })
        .unwrap();
        assert_eq!(rows, 1234);
        assert_eq!(emitted, 1234);
    }

    #[test]
    fn two_class_rows_have_delta_equal_tv() {
        for record in small_run(2, 2_000, 11) {
            assert!((record.d_delta - record.d_tv).abs() < 1e-12);
        }
    }

    #[test]
    fn csv_header_and_float_format() {
        let config = SamplerConfig::unconstrained(2, 1, 3);
        let mut buf = Vec::new();
        write_scatter(
            &config,
            &ScatterOptions::default(),
            OutputFormat::Csv,
            &mut buf,
        )
        .unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
        let row = lines.next().unwrap();
        assert_eq!(row.split(',').count(), CSV_HEADER.len());
        assert_eq!(format_float(f64::INFINITY), "inf");
        assert_eq!(format_float(0.5), "5.0000000000000000e-1");
        let round_trip: f64 = format_float(0.1).parse().unwrap();
        assert_eq!(round_trip, 0.1);
    }

    #[test]
    fn jsonl_marks_infinities_as_strings() {
        // a pair with a support violation so d_kl is infinite
        let record = ScatterRecord {
            sample_id: 0,
            m: 2,
            dom_diff: 1.0,
            d_kl: f64::INFINITY,
            d_kl_sym: f64::INFINITY,
            d_js: 1.0,
            d_tv: 1.0,
            d_delta: 1.0,
            delta_star: 1.0,
            delta_max: 0.5,
            case_tag: DeltaCase::DisagreeBothNonnegative,
            clutter_tv: 0.0,
            clutter_delta: 0.0,
            a_term: 1.0,
            b_term: 1.0,
            log_base_kl: std::f64::consts::E,
        };
        let line = record.json_line();
        assert!(line.contains("\"d_kl\":\"inf\""));
        assert!(line.contains("\"case_tag\":\"disagree-both-nonnegative\""));
    }

    #[test]
    fn sweep_at_reference_threshold_is_error_free_for_delta() {
        let records = small_run(6, 5_000, 21);
        let reports =
            threshold_sweep(&records, MeasureColumn::DDelta, 0.3, &[0.3]).unwrap();
        assert_eq!(reports[0].false_positive_rate, 0.0);
        assert_eq!(reports[0].false_negative_rate, 0.0);
        assert_eq!(reports[0].sample_count, 5_000);
    }

    #[test]
    fn sweep_rejects_empty_and_bad_reference() {
        assert!(matches!(
            threshold_sweep(&[], MeasureColumn::DKl, 0.3, &[1.0]),
            Err(Error::EmptyInput)
        ));
        let records = small_run(3, 10, 2);
        assert!(matches!(
            threshold_sweep(&records, MeasureColumn::DKl, 1.5, &[1.0]),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn measure_column_parsing() {
        assert_eq!(MeasureColumn::parse("d_kl").unwrap(), MeasureColumn::DKl);
        assert_eq!(MeasureColumn::parse("tv").unwrap(), MeasureColumn::DTv);
        assert!(matches!(
            MeasureColumn::parse("nope"),
            Err(Error::UnknownMeasure { .. })
        ));
    }

    #[test]
    fn binning_respects_sandwich_per_bin() {
        let records = small_run(6, 20_000, 33);
        let bins = bin_by_delta(&records, DEFAULT_BIN_WIDTH).unwrap();
        assert!(!bins.is_empty());
        let total: u64 = bins.iter().map(|b| b.count).sum();
        assert_eq!(total, 20_000);
        for bin in &bins {
            assert!(bin.delta_star.max <= bin.hi + DEFAULT_BIN_WIDTH);
            assert!(bin.d_tv.max <= 1.0);
        }
    }

    #[test]
    fn binning_rejects_empty_input_and_bad_width() {
        assert!(matches!(bin_by_delta(&[], 0.01), Err(Error::EmptyInput)));
        let records = small_run(3, 10, 2);
        assert!(matches!(
            bin_by_delta(&records, 0.0),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn violation_search_finds_none_for_two_classes() {
        let hit = metric_violation_search(2, 20_000, 3).unwrap();
        assert!(hit.is_none());
    }

    #[test]
    fn violation_search_finds_a_witness_for_three_classes() {
        let hit = metric_violation_search(3, 1_000_000, 3).unwrap().unwrap();
        assert!(hit.margin > 1e-9);
        assert!(hit.direct > hit.via);
    }

    #[test]
    fn regression_violation_triple() {
        // archived witness: an agreement leg hides a large tail move for free
        let p = DiscreteDistribution::validate(&[0.6, 0.2, 0.2]).unwrap();
        let q = DiscreteDistribution::validate(&[0.6, 0.4, 0.0]).unwrap();
        let r = DiscreteDistribution::validate(&[0.45, 0.55, 0.0]).unwrap();
        let direct = delta_divergence(&p, &r).unwrap().value;
        let leg_one = delta_divergence(&p, &q).unwrap().value;
        let leg_two = delta_divergence(&q, &r).unwrap().value;
        assert_eq!(leg_one, 0.0);
        assert!((leg_two - 0.15).abs() < 1e-15);
        assert!((direct - 0.35).abs() < 1e-15);
        assert!(direct > leg_one + leg_two + 0.19);
    }
}
