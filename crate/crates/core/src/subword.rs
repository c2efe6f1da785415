//! Subword-level support: span construction and subword-to-word conversion.

use crate::alignment::AlignmentSet;
use crate::error::{Error, Result};
use crate::pair::WordSpans;

/// How a tokenizer reported the grouping of subwords into words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpanHints {
    /// Number of subwords in each word.
    PieceCounts(Vec<usize>),
    /// Word index of every subword (non-decreasing, contiguous from 0).
    WordIds(Vec<usize>),
    /// Explicit `(start, end)` ranges.
    Ranges(Vec<(usize, usize)>),
    /// Continuation pieces carry this prefix, e.g. `"##"` for wordpiece.
    ContinuationPrefix(String),
}

/// Validates and normalizes tokenizer output into [`WordSpans`].
///
/// `word_tokens` is only used for its length; `subword_tokens` is also read
/// for [`SpanHints::ContinuationPrefix`].
pub fn build_word_spans<W: AsRef<str>, S: AsRef<str>>(
    word_tokens: &[W],
    subword_tokens: &[S],
    hints: &SpanHints,
) -> Result<WordSpans> {
    let n_sub = subword_tokens.len();
    let ranges: Vec<(usize, usize)> = match hints {
        SpanHints::Ranges(r) => r.clone(),
        SpanHints::PieceCounts(counts) => {
            let mut start = 0;
            counts
                .iter()
                .map(|&c| {
                    let r = (start, start + c);
                    start += c;
                    r
                })
                .collect()
        }
        SpanHints::WordIds(ids) => {
            if ids.len() != n_sub {
                return Err(Error::InvalidSpans {
                    index: ids.len().min(n_sub),
                    reason: format!("{} word ids for {n_sub} subwords", ids.len()),
                });
            }
            let mut out: Vec<(usize, usize)> = Vec::new();
            for (k, &w) in ids.iter().enumerate() {
                let n = out.len();
                match out.last_mut() {
                    Some(last) if w + 1 == n => last.1 = k + 1,
                    _ if w == n => out.push((k, k + 1)),
                    _ => {
                        return Err(Error::InvalidSpans {
                            index: k,
                            reason: format!("word id {w} out of order"),
                        })
                    }
                }
            }
            out
        }
        SpanHints::ContinuationPrefix(prefix) => {
            let mut out: Vec<(usize, usize)> = Vec::new();
            for (k, tok) in subword_tokens.iter().enumerate() {
                let cont = !prefix.is_empty() && tok.as_ref().starts_with(prefix.as_str());
                match out.last_mut() {
                    Some(last) if cont => last.1 = k + 1,
                    None if cont => {
                        return Err(Error::InvalidSpans {
                            index: k,
                            reason: "sentence starts with a continuation piece".into(),
                        })
                    }
                    _ => out.push((k, k + 1)),
                }
            }
            out
        }
    };
    let spans = WordSpans::new(ranges.into_iter().map(|(s, e)| s..e).collect(), n_sub)?;
    if spans.word_count() != word_tokens.len() {
        return Err(Error::InvalidSpans {
            index: n_sub,
            reason: format!(
                "{} spans for {} words",
                spans.word_count(),
                word_tokens.len()
            ),
        });
    }
    Ok(spans)
}

/// Two words are aligned if any of their subwords are aligned.
pub fn convert_subword_to_word(
    sub: &AlignmentSet,
    src_spans: &WordSpans,
    tgt_spans: &WordSpans,
) -> Result<AlignmentSet> {
    let src_map = src_spans.word_of_subword();
    let tgt_map = tgt_spans.word_of_subword();
    let mut out = AlignmentSet::new(src_spans.word_count(), tgt_spans.word_count());
    for (i, j) in sub.iter() {
        let ws = *src_map.get(i).ok_or(Error::UncoveredSubword { index: i })?;
        let wt = *tgt_map.get(j).ok_or(Error::UncoveredSubword { index: j })?;
        out.insert(ws, wt)?;
    }
    Ok(out)
}
