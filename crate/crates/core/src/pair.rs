//! Tokenized sentence pairs and word-to-subword span maps.

use std::ops::Range;

use crate::error::{Error, Result};

/// One half-open `[start, end)` range of subword indices per word.
///
/// Spans are non-empty, sorted, disjoint and cover `0..subword_count` exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordSpans {
    spans: Vec<Range<usize>>,
}

impl WordSpans {
    /// Validates `spans` against a sentence of `subword_count` subwords.
    pub fn new(spans: Vec<Range<usize>>, subword_count: usize) -> Result<Self> {
        let mut expected = 0;
        for span in &spans {
            if span.end <= span.start {
                return Err(Error::InvalidSpans {
                    index: span.start,
                    reason: format!("empty span {}..{}", span.start, span.end),
                });
            }
            if span.start < expected {
                return Err(Error::InvalidSpans {
                    index: span.start,
                    reason: "span overlaps the previous word".into(),
                });
            }
            if span.start > expected {
                return Err(Error::InvalidSpans {
                    index: expected,
                    reason: "subword not covered by any word".into(),
                });
            }
            expected = span.end;
        }
        if expected != subword_count {
            let reason = if expected > subword_count {
                format!("spans run past the {subword_count} subwords")
            } else {
                "trailing subwords not covered by any word".into()
            };
            return Err(Error::InvalidSpans {
                index: expected.min(subword_count),
                reason,
            });
        }
        Ok(Self { spans })
    }

    /// The 1:1 map, one subword per word.
    pub fn identity(n: usize) -> Self {
        Self {
            spans: (0..n).map(|k| k..k + 1).collect(),
        }
    }

    pub fn word_count(&self) -> usize {
        self.spans.len()
    }

    pub fn subword_count(&self) -> usize {
        self.spans.last().map_or(0, |s| s.end)
    }

    pub fn get(&self, word: usize) -> Option<&Range<usize>> {
        self.spans.get(word)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Range<usize>> {
        self.spans.iter()
    }

    pub fn as_slice(&self) -> &[Range<usize>] {
        &self.spans
    }

    /// Word index of every subword, in subword order.
    pub fn word_of_subword(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.subword_count());
        for (w, span) in self.spans.iter().enumerate() {
            out.extend(std::iter::repeat_n(w, span.len()));
        }
        out
    }
}

/// Token sequences of a source/target sentence pair, with optional span maps
/// when the tokens are subwords.
#[derive(Clone, Debug, PartialEq)]
pub struct TokenizedSentencePair {
    pub pair_id: String,
    pub src_tokens: Vec<String>,
    pub tgt_tokens: Vec<String>,
    pub src_word_spans: Option<WordSpans>,
    pub tgt_word_spans: Option<WordSpans>,
}

impl TokenizedSentencePair {
    pub fn new(
        pair_id: impl Into<String>,
        src_tokens: Vec<String>,
        tgt_tokens: Vec<String>,
    ) -> Result<Self> {
        let pair = Self {
            pair_id: pair_id.into(),
            src_tokens,
            tgt_tokens,
            src_word_spans: None,
            tgt_word_spans: None,
        };
        pair.validate()?;
        Ok(pair)
    }

    pub fn with_spans(mut self, src: WordSpans, tgt: WordSpans) -> Result<Self> {
        self.src_word_spans = Some(src);
        self.tgt_word_spans = Some(tgt);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let sides = [
            (&self.src_tokens, &self.src_word_spans, "source"),
            (&self.tgt_tokens, &self.tgt_word_spans, "target"),
        ];
        for (tokens, spans, side) in sides {
            if tokens.is_empty() {
                return Err(Error::Sentence {
                    id: self.pair_id.clone(),
                    reason: format!("{side} sentence has no tokens"),
                });
            }
            if let Some(spans) = spans {
                if spans.subword_count() != tokens.len() {
                    return Err(Error::Sentence {
                        id: self.pair_id.clone(),
                        reason: format!(
                            "{side} spans cover {} subwords but there are {} tokens",
                            spans.subword_count(),
                            tokens.len()
                        ),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn src_len(&self) -> usize {
        self.src_tokens.len()
    }

    pub fn tgt_len(&self) -> usize {
        self.tgt_tokens.len()
    }
}
