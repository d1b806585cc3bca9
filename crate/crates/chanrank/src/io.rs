//! Wire formats and reports: observations CSV, reference-ranking CSV, curve
//! sample CSV, and the rank/baseline reports in text and JSON form.
//!
//! Occupancy travels as a percentage (`occupancy_pct`, 0-100) and is stored
//! as a fraction in core types. Emission picks the percentage so that
//! dividing it by 100 reproduces the stored fraction bit for bit, which
//! keeps emit-then-parse round trips exact.

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::ces::{CesParams, ChannelObservation, RankedChannel};
use crate::error::{Error, Result};
use crate::utility::{UtilityCurve, UtilityValue};

pub const OBSERVATIONS_HEADER: &str = "frequency_ghz,snr_db,occupancy_pct";
pub const REFERENCE_HEADER: &str = "index,rank";

fn field<'a>(record: &'a csv::StringRecord, idx: usize, name: &str, line: u64) -> Result<&'a str> {
    record.get(idx).ok_or_else(|| Error::Parse {
        line,
        message: format!("missing column {name}"),
    })
}

fn numeric_field(record: &csv::StringRecord, idx: usize, name: &str, line: u64) -> Result<f64> {
    let raw = field(record, idx, name, line)?;
    raw.trim().parse::<f64>().map_err(|_| Error::Parse {
        line,
        message: format!("column {name}: invalid number {raw:?}"),
    })
}

fn integer_field(record: &csv::StringRecord, idx: usize, name: &str, line: u64) -> Result<usize> {
    let raw = field(record, idx, name, line)?;
    raw.trim().parse::<usize>().map_err(|_| Error::Parse {
        line,
        message: format!("column {name}: invalid integer {raw:?}"),
    })
}

fn record_line(record: &csv::StringRecord) -> u64 {
    record.position().map(|p| p.line()).unwrap_or(0)
}

fn read_records(input: &str, header: &str) -> Result<Vec<csv::StringRecord>> {
    let expected: Vec<&str> = header.split(',').collect();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(input.as_bytes());
    let mut records = reader.records();
    let first = match records.next() {
        Some(r) => r.map_err(|e| Error::Parse {
            line: 1,
            message: e.to_string(),
        })?,
        None => {
            return Err(Error::Parse {
                line: 1,
                message: format!("missing header {header:?}"),
            })
        }
    };
    if first.iter().map(str::trim).ne(expected.iter().copied()) {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header {header:?}"),
        });
    }
    let mut rows = Vec::new();
    for record in records {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map(|p| p.line()).unwrap_or(0),
            message: e.to_string(),
        })?;
        if record.len() != expected.len() {
            return Err(Error::Parse {
                line: record_line(&record),
                message: format!(
                    "expected {} columns, found {}",
                    expected.len(),
                    record.len()
                ),
            });
        }
        rows.push(record);
    }
    Ok(rows)
}

/// Parse an observations CSV (`frequency_ghz,snr_db,occupancy_pct`).
///
/// The parse is all-or-nothing; the first malformed row aborts with its line
/// number. A header-only file yields an empty list.
pub fn parse_observations(input: &str) -> Result<Vec<ChannelObservation>> {
    read_records(input, OBSERVATIONS_HEADER)?
        .iter()
        .map(|record| {
            let line = record_line(record);
            let frequency = numeric_field(record, 0, "frequency_ghz", line)?;
            let snr = numeric_field(record, 1, "snr_db", line)?;
            let pct = numeric_field(record, 2, "occupancy_pct", line)?;
            if !pct.is_finite() || !(0.0..=100.0).contains(&pct) {
                return Err(Error::Parse {
                    line,
                    message: format!("column occupancy_pct: {pct} outside [0, 100]"),
                });
            }
            ChannelObservation::new(frequency, snr, pct / 100.0).map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })
        })
        .collect()
}

/// The percentage whose division by 100 reproduces `fraction` exactly.
///
/// Every fraction that itself came from parsing a percentage has such a
/// preimage. Fractions from other sources (a simulator estimate, say) may
/// not; those fall back to the nearest product, which lands within one ulp
/// on the first parse and is exact from then on.
fn occupancy_as_percent(fraction: f64) -> f64 {
    let candidate = fraction * 100.0;
    let mut preimages = Vec::new();
    let (mut lo, mut hi) = (candidate, candidate);
    for _ in 0..8 {
        if lo / 100.0 == fraction {
            preimages.push(lo);
        }
        if hi != lo && hi / 100.0 == fraction {
            preimages.push(hi);
        }
        lo = lo.next_down();
        hi = hi.next_up();
    }
    // several neighboring floats may all divide back exactly; prefer the one
    // that prints shortest ("14" over "14.000000000000002")
    preimages
        .into_iter()
        .min_by_key(|q| (format!("{q}").len(), (q - candidate).abs().to_bits()))
        .unwrap_or(candidate)
}

/// Serialize observations in the CSV schema [`parse_observations`] ingests.
pub fn emit_observations(observations: &[ChannelObservation]) -> String {
    let mut out = String::with_capacity(32 * (observations.len() + 1));
    out.push_str(OBSERVATIONS_HEADER);
    out.push('\n');
    for obs in observations {
        out.push_str(&format!(
            "{},{},{}\n",
            obs.frequency_ghz(),
            obs.snr_db(),
            occupancy_as_percent(obs.occupancy())
        ));
    }
    out
}

/// Parse a reference ranking CSV (`index,rank`): observation index (0-based
/// into the observations list) paired with its reference rank (>= 1).
pub fn parse_reference_ranking(input: &str) -> Result<Vec<(usize, usize)>> {
    read_records(input, REFERENCE_HEADER)?
        .iter()
        .map(|record| {
            let line = record_line(record);
            let index = integer_field(record, 0, "index", line)?;
            let rank = integer_field(record, 1, "rank", line)?;
            if rank == 0 {
                return Err(Error::Parse {
                    line,
                    message: "column rank: ranks start at 1".into(),
                });
            }
            Ok((index, rank))
        })
        .collect()
}

/// Format with six significant digits, the resolution of the curve CSVs.
fn sig6(value: f64) -> String {
    if value == 0.0 {
        return "0".into();
    }
    format!("{value:.5e}")
}

/// Serialize curve samples as `input,utility` rows.
pub fn emit_curve_samples(samples: &[(f64, UtilityValue)]) -> String {
    let mut out = String::from("input,utility\n");
    for (x, u) in samples {
        out.push_str(&format!("{},{}\n", x, sig6(u.value())));
    }
    out
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Everything needed to reproduce a report, minus the input file itself.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportMeta {
    pub curve_family: String,
    pub alpha_snr: f64,
    pub alpha_occ: f64,
    pub snr_midpoint: f64,
    pub occ_midpoint: f64,
    pub max_utility: f64,
    pub snr_input_max: f64,
    pub sigma: f64,
    pub w_snr: f64,
    pub w_occ: f64,
    pub timestamp_unix: u64,
    pub input_digest: String,
}

impl ReportMeta {
    pub fn new(
        snr_curve: &UtilityCurve,
        occ_curve: &UtilityCurve,
        params: &CesParams,
        timestamp_unix: u64,
        input_digest: String,
    ) -> Self {
        Self {
            curve_family: snr_curve.family().name().to_string(),
            alpha_snr: snr_curve.alpha(),
            alpha_occ: occ_curve.alpha(),
            snr_midpoint: snr_curve.midpoint(),
            occ_midpoint: occ_curve.midpoint(),
            max_utility: snr_curve.max_utility(),
            snr_input_max: snr_curve.input_max(),
            sigma: params.sigma(),
            w_snr: params.w_snr(),
            w_occ: params.w_occ(),
            timestamp_unix,
            input_digest,
        }
    }

    fn render_lines(&self, title: &str) -> String {
        format!(
            "# {title}\n\
             # curve_family: {}\n\
             # alpha_snr: {}\n\
             # alpha_occ: {}\n\
             # snr_midpoint: {}\n\
             # occ_midpoint: {}\n\
             # max_utility: {}\n\
             # snr_input_max: {}\n\
             # sigma: {}\n\
             # w_snr: {}\n\
             # w_occ: {}\n\
             # timestamp_unix: {}\n\
             # input_digest: {}\n",
            self.curve_family,
            self.alpha_snr,
            self.alpha_occ,
            self.snr_midpoint,
            self.occ_midpoint,
            self.max_utility,
            self.snr_input_max,
            self.sigma,
            self.w_snr,
            self.w_occ,
            self.timestamp_unix,
            self.input_digest,
        )
    }
}

/// One row of the utility ranking report. Component utilities and the
/// combined value are displayed on the 0-100 scale; `combined` keeps the
/// full-precision normalized value for machine consumers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankReportRow {
    pub rank: usize,
    pub frequency_ghz: f64,
    pub snr_db: f64,
    pub occupancy_pct: f64,
    pub u_snr_display: f64,
    pub u_occ_display: f64,
    pub combined_display: u32,
    pub combined: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankReport {
    pub metadata: ReportMeta,
    pub rows: Vec<RankReportRow>,
}

fn display_pct(fraction: f64) -> f64 {
    occupancy_as_percent(fraction)
}

/// Round half away from zero to an integer display value, the convention of
/// the 0-100 combined-utility column.
fn display_combined(combined: f64) -> u32 {
    (combined * 100.0).round() as u32
}

impl RankReport {
    pub fn from_ranked(ranked: &[RankedChannel], metadata: ReportMeta) -> Self {
        let rows = ranked
            .iter()
            .map(|c| RankReportRow {
                rank: c.rank,
                frequency_ghz: c.observation.frequency_ghz(),
                snr_db: c.observation.snr_db(),
                occupancy_pct: display_pct(c.observation.occupancy()),
                u_snr_display: c.u_snr.value() * 100.0,
                u_occ_display: c.u_occ.value() * 100.0,
                combined_display: display_combined(c.combined),
                combined: c.combined,
            })
            .collect();
        Self { metadata, rows }
    }

    pub fn render_text(&self) -> String {
        let mut out = self.metadata.render_lines("utility-based channel ranking");
        out.push_str(&format!(
            "{:>4}  {:>13}  {:>7}  {:>13}  {:>7}  {:>7}  {:>8}\n",
            "rank", "frequency_ghz", "snr_db", "occupancy_pct", "u_snr", "u_occ", "combined"
        ));
        for row in &self.rows {
            out.push_str(&format!(
                "{:>4}  {:>13}  {:>7}  {:>13}  {:>7.2}  {:>7.2}  {:>8}\n",
                row.rank,
                row.frequency_ghz,
                row.snr_db,
                row.occupancy_pct,
                row.u_snr_display,
                row.u_occ_display,
                row.combined_display
            ));
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self)
            .map_err(|e| Error::Parameter(format!("report serialization: {e}")))
    }
}

/// One row of the occupancy-baseline report: occupancy order plus the rank
/// the utility-based method assigns to the same channel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BaselineReportRow {
    pub position: usize,
    pub frequency_ghz: f64,
    pub snr_db: f64,
    pub occupancy_pct: f64,
    pub utility_rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BaselineReport {
    pub metadata: ReportMeta,
    pub rows: Vec<BaselineReportRow>,
}

impl BaselineReport {
    /// `baseline` in occupancy order; `utility_rank_by_index` maps an
    /// observation's input index to its utility-based rank.
    pub fn from_rankings(
        baseline: &[RankedChannel],
        utility_rank_by_index: &[usize],
        metadata: ReportMeta,
    ) -> Self {
        let rows = baseline
            .iter()
            .map(|c| BaselineReportRow {
                position: c.rank,
                frequency_ghz: c.observation.frequency_ghz(),
                snr_db: c.observation.snr_db(),
                occupancy_pct: display_pct(c.observation.occupancy()),
                utility_rank: utility_rank_by_index[c.input_index],
            })
            .collect();
        Self { metadata, rows }
    }

    pub fn render_text(&self) -> String {
        let mut out = self
            .metadata
            .render_lines("occupancy-based channel selection");
        out.push_str(&format!(
            "{:>8}  {:>13}  {:>7}  {:>13}  {:>12}\n",
            "position", "frequency_ghz", "snr_db", "occupancy_pct", "utility_rank"
        ));
        for row in &self.rows {
            out.push_str(&format!(
                "{:>8}  {:>13}  {:>7}  {:>13}  {:>12}\n",
                row.position, row.frequency_ghz, row.snr_db, row.occupancy_pct, row.utility_rank
            ));
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self)
            .map_err(|e| Error::Parameter(format!("report serialization: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ces::{
        default_ces_params, default_occupancy_curve, default_snr_curve, rank_channels,
    };
    use proptest::prelude::*;

    #[test]
    fn parses_published_row() {
        let obs = parse_observations("frequency_ghz,snr_db,occupancy_pct\n2.462,12,1\n").unwrap();
        assert_eq!(obs.len(), 1);
        assert_eq!(obs[0].frequency_ghz(), 2.462);
        assert_eq!(obs[0].snr_db(), 12.0);
        assert_eq!(obs[0].occupancy(), 0.01);
    }

    #[test]
    fn header_only_yields_empty_list() {
        let obs = parse_observations("frequency_ghz,snr_db,occupancy_pct\n").unwrap();
        assert!(obs.is_empty());
    }

    #[test]
    fn rejects_out_of_range_occupancy() {
        let err =
            parse_observations("frequency_ghz,snr_db,occupancy_pct\n2.462,12,101\n").unwrap_err();
        match err {
            Error::Parse { line, message } => {
                assert_eq!(line, 2);
                assert!(message.contains("occupancy_pct"), "{message}");
            }
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn reports_line_of_first_bad_row() {
        let input = "frequency_ghz,snr_db,occupancy_pct\n2.4,1,5\n2.5,abc,5\n2.6,2,5\n";
        let err = parse_observations(input).unwrap_err();
        match err {
            Error::Parse { line, message } => {
                assert_eq!(line, 3);
                assert!(message.contains("snr_db"), "{message}");
            }
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn rejects_missing_column_and_bad_header() {
        let err = parse_observations("frequency_ghz,snr_db,occupancy_pct\n2.4,1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse_observations("freq,snr,occ\n2.4,1,5\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
        let err = parse_observations("").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
    }

    #[test]
    fn percent_emission_inverts_parsed_values_exactly() {
        for k in 0..=10_000u32 {
            let fraction = (k as f64 / 100.0) / 100.0;
            let pct = occupancy_as_percent(fraction);
            assert_eq!(pct / 100.0, fraction, "k={k}");
            assert!((0.0..=100.0).contains(&pct));
        }
    }

    #[test]
    fn percent_emission_settles_after_one_parse() {
        // fractions like 7/10000 have no exact percent preimage; one
        // emit+parse may move them a single ulp, after which they are fixed
        for k in 0..=10_000u32 {
            let fraction = k as f64 / 10_000.0;
            let settled = occupancy_as_percent(fraction) / 100.0;
            assert!((settled - fraction).abs() <= fraction * f64::EPSILON);
            assert_eq!(occupancy_as_percent(settled) / 100.0, settled, "k={k}");
        }
    }

    #[test]
    fn reference_ranking_parses_and_validates() {
        let reference = parse_reference_ranking("index,rank\n0,1\n3,2\n").unwrap();
        assert_eq!(reference, vec![(0, 1), (3, 2)]);
        assert!(matches!(
            parse_reference_ranking("index,rank\n0,0\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_reference_ranking("index,rank\n-1,1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_reference_ranking("index,rank\n0,1.5\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn curve_samples_use_six_significant_digits() {
        let u = UtilityValue::new(0.0000020611536181902036).unwrap();
        let csv = emit_curve_samples(&[(-20.0, u)]);
        assert_eq!(csv, "input,utility\n-20,2.06115e-6\n");
    }

    #[test]
    fn digest_matches_known_vector() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    fn sample_report() -> (RankReport, ReportMeta) {
        let obs = parse_observations(
            "frequency_ghz,snr_db,occupancy_pct\n2.462,12,1\n2.437,8,1\n5.765,-17,1\n",
        )
        .unwrap();
        let ranked = rank_channels(
            &obs,
            &default_snr_curve(),
            &default_occupancy_curve(),
            &default_ces_params(),
        )
        .unwrap();
        let meta = ReportMeta::new(
            &default_snr_curve(),
            &default_occupancy_curve(),
            &default_ces_params(),
            1_700_000_000,
            sha256_hex(b"input"),
        );
        (RankReport::from_ranked(&ranked, meta.clone()), meta)
    }

    #[test]
    fn text_and_json_agree_on_order_and_integers() {
        let (report, _) = sample_report();
        let json: serde_json::Value = serde_json::from_str(&report.to_json().unwrap()).unwrap();
        let rows = json["rows"].as_array().unwrap();
        assert_eq!(rows.len(), report.rows.len());
        let text = report.render_text();
        for (i, row) in report.rows.iter().enumerate() {
            assert_eq!(rows[i]["rank"].as_u64().unwrap() as usize, row.rank);
            assert_eq!(
                rows[i]["combined_display"].as_u64().unwrap() as u32,
                row.combined_display
            );
            assert!(text.contains(&format!("{}", row.frequency_ghz)));
        }
    }

    #[test]
    fn reports_differ_only_in_timestamp() {
        let (report, meta) = sample_report();
        let mut later = meta;
        later.timestamp_unix += 60;
        let again = RankReport {
            metadata: later,
            rows: report.rows.clone(),
        };
        let strip = |s: &str| {
            s.lines()
                .filter(|l| !l.contains("timestamp"))
                .collect::<Vec<_>>()
                .join("\n")
        };
        assert_eq!(strip(&report.render_text()), strip(&again.render_text()));
        assert_eq!(
            strip(&report.to_json().unwrap()),
            strip(&again.to_json().unwrap())
        );
    }

    proptest! {
        #[test]
        fn emit_parse_round_trip(
            rows in proptest::collection::vec(
                (0.1f64..10.0, -40.0f64..40.0, 0.0f64..=100.0),
                0..20,
            )
        ) {
            // occupancies as a parse would produce them: pct / 100
            let observations: Vec<ChannelObservation> = rows
                .iter()
                .map(|&(f, s, pct)| ChannelObservation::new(f, s, pct / 100.0).unwrap())
                .collect();
            let text = emit_observations(&observations);
            let parsed = parse_observations(&text).unwrap();
            prop_assert_eq!(&parsed, &observations);
            // and the text form is a fixed point
            prop_assert_eq!(emit_observations(&parsed), text);
        }
    }
}
