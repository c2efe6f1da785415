//! CSV reports with a header row.

use std::io::Write;

use crate::error::Result;
use crate::eval::{BinReport, ScoreReport};
use crate::runner::SweepRow;

pub const SCORE_COLUMNS: [&str; 9] = [
    "precision",
    "recall",
    "f1",
    "aer",
    "n_pred",
    "n_sure",
    "n_pred_sure",
    "n_pred_possible",
    "empty",
];

fn score_fields(r: &ScoreReport) -> Vec<String> {
    vec![
        r.precision.to_string(),
        r.recall.to_string(),
        r.f1.to_string(),
        r.aer.to_string(),
        r.counts.predicted.to_string(),
        r.counts.sure.to_string(),
        r.counts.predicted_sure.to_string(),
        r.counts.predicted_possible.to_string(),
        r.empty.to_string(),
    ]
}

fn write_table<W: Write>(
    out: W,
    leading: &[&str],
    rows: impl Iterator<Item = (Vec<String>, ScoreReport)>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let header: Vec<&str> = leading.iter().copied().chain(SCORE_COLUMNS).collect();
    w.write_record(&header)?;
    for (mut lead, report) in rows {
        lead.extend(score_fields(&report));
        w.write_record(&lead)?;
    }
    w.flush()?;
    Ok(())
}

/// One labelled row per report, e.g. a single corpus score.
pub fn write_scores<W: Write>(out: W, rows: &[(String, ScoreReport)]) -> Result<()> {
    write_table(
        out,
        &["name"],
        rows.iter().map(|(name, r)| (vec![name.clone()], *r)),
    )
}

pub fn write_bins<W: Write>(out: W, rows: &[BinReport]) -> Result<()> {
    write_table(
        out,
        &["bin"],
        rows.iter().map(|b| (vec![b.bin.clone()], b.report)),
    )
}

pub fn write_sweep<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    write_table(
        out,
        &[
            "axis",
            "value",
            "method",
            "n_max",
            "alpha",
            "kappa",
            "dist",
            "null",
            "null_percentile",
            "level",
        ],
        rows.iter().map(|r| {
            let c = &r.cfg;
            (
                vec![
                    r.axis.to_string(),
                    r.value.clone(),
                    c.method.to_string(),
                    c.n_max.to_string(),
                    c.alpha.to_string(),
                    c.kappa.to_string(),
                    c.dist_enabled.to_string(),
                    c.null_enabled.to_string(),
                    c.null_percentile.to_string(),
                    r.level.to_string(),
                ],
                r.report,
            )
        }),
    )
}
