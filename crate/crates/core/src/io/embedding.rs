//! Embedding files: per-sentence token lists, optional word spans and an
//! `l x d` matrix of `f32` values.
//!
//! Binary layout (canonical, all integers `u32` little-endian):
//!
//! ```text
//! header:  b"EMBF" version dim level(u8: 0 = word, 1 = subword)
//! record:  id_len id_bytes
//!          n_tokens { tok_len tok_bytes } * n_tokens
//!          [subword only] n_words { start end } * n_words
//!          f32 LE values, n_tokens * dim, row-major
//! ```
//!
//! Text layout (debugging form, same content):
//!
//! ```text
//! EMBF-TEXT 1 <dim> <word|subword>
//! sentence <id> <n_tokens>
//! tokens <tok> <tok> ...
//! spans 0:1 1:3              (subword only)
//! <dim values>               (one line per token)
//! ```
//!
//! Ids and tokens must not contain whitespace in the text form.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::pair::WordSpans;
use crate::similarity::EmbeddingMatrix;

pub const BINARY_MAGIC: &[u8; 4] = b"EMBF";
pub const TEXT_MAGIC: &str = "EMBF-TEXT";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Level {
    #[default]
    Word,
    Subword,
}

impl Level {
    pub fn as_str(self) -> &'static str {
        match self {
            Level::Word => "word",
            Level::Subword => "subword",
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "word" => Ok(Level::Word),
            "subword" => Ok(Level::Subword),
            other => Err(Error::Format(format!("unknown level `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Encoding {
    Binary,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EmbeddingHeader {
    pub version: u32,
    pub dim: usize,
    pub level: Level,
}

impl EmbeddingHeader {
    pub fn new(dim: usize, level: Level) -> Self {
        Self {
            version: FORMAT_VERSION,
            dim,
            level,
        }
    }
}

/// One sentence of an embedding file.
#[derive(Clone, Debug, PartialEq)]
pub struct SentenceEmbedding {
    pub id: String,
    pub tokens: Vec<String>,
    /// Present exactly when the file level is subword.
    pub spans: Option<WordSpans>,
    pub matrix: EmbeddingMatrix<f32>,
}

impl SentenceEmbedding {
    fn check(&self, header: &EmbeddingHeader) -> Result<()> {
        let fail = |reason: String| Error::Sentence {
            id: self.id.clone(),
            reason,
        };
        if self.matrix.dim() != header.dim {
            return Err(fail(format!(
                "dim {} but the file declares {}",
                self.matrix.dim(),
                header.dim
            )));
        }
        if self.matrix.rows() != self.tokens.len() {
            return Err(fail(format!(
                "{} tokens but {} matrix rows",
                self.tokens.len(),
                self.matrix.rows()
            )));
        }
        match (&self.spans, header.level) {
            (None, Level::Word) => {}
            (Some(s), Level::Subword) if s.subword_count() == self.tokens.len() => {}
            (Some(_), Level::Subword) => return Err(fail("spans do not cover the tokens".into())),
            (Some(_), Level::Word) => return Err(fail("word-level file with spans".into())),
            (None, Level::Subword) => return Err(fail("subword-level file without spans".into())),
        }
        Ok(())
    }

    /// Word-level token strings: the tokens themselves at word level, or the
    /// subword pieces of each span joined together at subword level.
    pub fn words(&self) -> Vec<String> {
        match &self.spans {
            None => self.tokens.clone(),
            Some(spans) => spans
                .iter()
                .map(|r| {
                    self.tokens[r.clone()]
                        .iter()
                        .map(|t| t.strip_prefix("##").unwrap_or(t))
                        .collect::<String>()
                })
                .collect(),
        }
    }
}

/// Whole-file contents.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingCorpus {
    pub header: EmbeddingHeader,
    pub sentences: Vec<SentenceEmbedding>,
}

impl EmbeddingCorpus {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let reader = EmbeddingReader::open(path)?;
        let header = reader.header();
        let sentences = reader.collect::<Result<Vec<_>>>()?;
        Ok(Self { header, sentences })
    }

    pub fn save(&self, path: impl AsRef<Path>, encoding: Encoding) -> Result<()> {
        let file = BufWriter::new(File::create(path)?);
        let mut w = EmbeddingWriter::new(file, self.header, encoding)?;
        for s in &self.sentences {
            w.write(s)?;
        }
        w.finish()?;
        Ok(())
    }
}

enum Source<R> {
    Binary(R),
    Text {
        lines: std::io::Lines<R>,
        line: usize,
    },
}

/// Streaming reader; detects the encoding from the first bytes.
pub struct EmbeddingReader<R> {
    header: EmbeddingHeader,
    source: Source<R>,
    done: bool,
    last_id: Option<String>,
}

impl EmbeddingReader<BufReader<File>> {
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        Self::new(BufReader::new(File::open(path)?))
    }
}

impl<R: BufRead> EmbeddingReader<R> {
    pub fn new(mut reader: R) -> Result<Self> {
        let head = reader.fill_buf()?;
        if head.starts_with(BINARY_MAGIC) && !head.starts_with(TEXT_MAGIC.as_bytes()) {
            let mut magic = [0u8; 4];
            reader.read_exact(&mut magic)?;
            let version = read_u32(&mut reader)?.ok_or_else(truncated_header)?;
            let dim = read_u32(&mut reader)?.ok_or_else(truncated_header)? as usize;
            let mut level = [0u8; 1];
            reader
                .read_exact(&mut level)
                .map_err(|_| truncated_header())?;
            let level = match level[0] {
                0 => Level::Word,
                1 => Level::Subword,
                b => return Err(Error::Format(format!("unknown level byte {b}"))),
            };
            let header = check_header(version, dim, level)?;
            Ok(Self {
                header,
                source: Source::Binary(reader),
                done: false,
                last_id: None,
            })
        } else {
            let mut lines = reader.lines();
            let first = lines
                .next()
                .transpose()?
                .ok_or_else(|| Error::Format("empty file, missing header".into()))?;
            let f: Vec<&str> = first.split_whitespace().collect();
            if f.len() != 4 || f[0] != TEXT_MAGIC {
                return Err(Error::Format(format!("bad header line `{first}`")));
            }
            let version = f[1]
                .parse()
                .map_err(|_| Error::Format(format!("bad version `{}`", f[1])))?;
            let dim = f[2]
                .parse()
                .map_err(|_| Error::Format(format!("bad dim `{}`", f[2])))?;
            let header = check_header(version, dim, f[3].parse()?)?;
            Ok(Self {
                header,
                source: Source::Text { lines, line: 1 },
                done: false,
                last_id: None,
            })
        }
    }

    pub fn header(&self) -> EmbeddingHeader {
        self.header
    }

    fn next_binary(
        reader: &mut R,
        header: &EmbeddingHeader,
        last_id: &mut Option<String>,
    ) -> Result<Option<SentenceEmbedding>> {
        let Some(id_len) = read_u32(reader)? else {
            return Ok(None);
        };
        let after = last_id.clone().unwrap_or_else(|| "<start>".into());
        let truncated =
            |what: &str| Error::Format(format!("truncated record after `{after}` ({what})"));
        let id = read_string(reader, id_len as usize).map_err(|_| truncated("id"))?;
        *last_id = Some(id.clone());
        let fail = |reason: &str| Error::Sentence {
            id: id.clone(),
            reason: reason.to_string(),
        };
        let n = read_u32(reader)?.ok_or_else(|| fail("truncated record"))? as usize;
        let mut tokens = Vec::with_capacity(n);
        for _ in 0..n {
            let len = read_u32(reader)?.ok_or_else(|| fail("truncated record"))?;
            tokens.push(read_string(reader, len as usize).map_err(|_| fail("truncated record"))?);
        }
        let spans = if header.level == Level::Subword {
            let words = read_u32(reader)?.ok_or_else(|| fail("truncated record"))? as usize;
            let mut ranges = Vec::with_capacity(words);
            for _ in 0..words {
                let s = read_u32(reader)?.ok_or_else(|| fail("truncated record"))? as usize;
                let e = read_u32(reader)?.ok_or_else(|| fail("truncated record"))? as usize;
                ranges.push(s..e);
            }
            Some(WordSpans::new(ranges, n).map_err(|e| fail(&e.to_string()))?)
        } else {
            None
        };
        let count = n * header.dim;
        let mut bytes = vec![0u8; count * 4];
        reader
            .read_exact(&mut bytes)
            .map_err(|_| fail("truncated record"))?;
        let values = bytes
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        finish_record(id, tokens, spans, n, header, values).map(Some)
    }

    fn next_text(
        lines: &mut std::io::Lines<R>,
        line: &mut usize,
        header: &EmbeddingHeader,
    ) -> Result<Option<SentenceEmbedding>> {
        fn next_nonblank<R: BufRead>(
            lines: &mut std::io::Lines<R>,
            line: &mut usize,
        ) -> Result<Option<String>> {
            loop {
                let Some(l) = lines.next().transpose()? else {
                    return Ok(None);
                };
                *line += 1;
                if !l.trim().is_empty() {
                    return Ok(Some(l));
                }
            }
        }
        let mut next = || next_nonblank(lines, line);
        let Some(head) = next()? else {
            return Ok(None);
        };
        let f: Vec<&str> = head.split_whitespace().collect();
        if f.len() != 3 || f[0] != "sentence" {
            return Err(Error::Format(format!(
                "expected `sentence <id> <n>`, got `{head}`"
            )));
        }
        let id = f[1].to_string();
        let fail = |reason: String| Error::Sentence {
            id: id.clone(),
            reason,
        };
        let n: usize = f[2]
            .parse()
            .map_err(|_| fail(format!("bad token count `{}`", f[2])))?;
        let tok_line = next()?.ok_or_else(|| fail("truncated record".into()))?;
        let mut it = tok_line.split_whitespace();
        if it.next() != Some("tokens") {
            return Err(fail("expected a `tokens` line".into()));
        }
        let tokens: Vec<String> = it.map(String::from).collect();
        if tokens.len() != n {
            return Err(fail(format!("declared {n} tokens, found {}", tokens.len())));
        }
        let spans = if header.level == Level::Subword {
            let span_line = next()?.ok_or_else(|| fail("truncated record".into()))?;
            let mut it = span_line.split_whitespace();
            if it.next() != Some("spans") {
                return Err(fail("expected a `spans` line".into()));
            }
            let ranges = it
                .map(|item| {
                    let (s, e) = item
                        .split_once(':')
                        .ok_or_else(|| fail(format!("bad span `{item}`")))?;
                    let s: usize = s.parse().map_err(|_| fail(format!("bad span `{item}`")))?;
                    let e: usize = e.parse().map_err(|_| fail(format!("bad span `{item}`")))?;
                    Ok(s..e)
                })
                .collect::<Result<Vec<_>>>()?;
            Some(WordSpans::new(ranges, n).map_err(|e| fail(e.to_string()))?)
        } else {
            None
        };
        let mut values = Vec::with_capacity(n * header.dim);
        for _ in 0..n {
            let row = next_nonblank(lines, line)?.ok_or_else(|| fail("truncated record".into()))?;
            let line = *line;
            let before = values.len();
            for item in row.split_whitespace() {
                values.push(
                    item.parse::<f32>()
                        .map_err(|_| fail(format!("bad number `{item}` on line {line}")))?,
                );
            }
            if values.len() - before != header.dim {
                return Err(fail(format!(
                    "row of {} values on line {line}, file dim is {}",
                    values.len() - before,
                    header.dim
                )));
            }
        }
        finish_record(id, tokens, spans, n, header, values).map(Some)
    }
}

impl<R: BufRead> Iterator for EmbeddingReader<R> {
    type Item = Result<SentenceEmbedding>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let header = self.header;
        let out = match &mut self.source {
            Source::Binary(r) => Self::next_binary(r, &header, &mut self.last_id),
            Source::Text { lines, line } => Self::next_text(lines, line, &header),
        };
        match out {
            Ok(Some(s)) => Some(Ok(s)),
            Ok(None) => {
                self.done = true;
                None
            }
            Err(e) => {
                self.done = true;
                Some(Err(e))
            }
        }
    }
}

fn truncated_header() -> Error {
    Error::Format("truncated header".into())
}

fn check_header(version: u32, dim: usize, level: Level) -> Result<EmbeddingHeader> {
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    if dim == 0 {
        return Err(Error::Format("dim must be positive".into()));
    }
    Ok(EmbeddingHeader {
        version,
        dim,
        level,
    })
}

fn finish_record(
    id: String,
    tokens: Vec<String>,
    spans: Option<WordSpans>,
    n: usize,
    header: &EmbeddingHeader,
    values: Vec<f32>,
) -> Result<SentenceEmbedding> {
    let matrix =
        EmbeddingMatrix::from_flat(n, header.dim, values).map_err(|e| Error::Sentence {
            id: id.clone(),
            reason: e.to_string(),
        })?;
    Ok(SentenceEmbedding {
        id,
        tokens,
        spans,
        matrix,
    })
}

/// `Ok(None)` on clean end of input.
fn read_u32<R: Read>(r: &mut R) -> Result<Option<u32>> {
    let mut buf = [0u8; 4];
    let mut got = 0;
    while got < 4 {
        match r.read(&mut buf[got..])? {
            0 if got == 0 => return Ok(None),
            0 => return Err(Error::Format("truncated integer".into())),
            k => got += k,
        }
    }
    Ok(Some(u32::from_le_bytes(buf)))
}

fn read_string<R: Read>(r: &mut R, len: usize) -> Result<String> {
    let mut buf = vec![0u8; len];
    r.read_exact(&mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Format(e.to_string()))
}

pub struct EmbeddingWriter<W: Write> {
    out: W,
    header: EmbeddingHeader,
    encoding: Encoding,
}

impl<W: Write> EmbeddingWriter<W> {
    pub fn new(mut out: W, header: EmbeddingHeader, encoding: Encoding) -> Result<Self> {
        check_header(header.version, header.dim, header.level)?;
        match encoding {
            Encoding::Binary => {
                out.write_all(BINARY_MAGIC)?;
                out.write_all(&header.version.to_le_bytes())?;
                out.write_all(&u32_of(header.dim)?.to_le_bytes())?;
                out.write_all(&[match header.level {
                    Level::Word => 0,
                    Level::Subword => 1,
                }])?;
            }
            Encoding::Text => {
                writeln!(
                    out,
                    "{TEXT_MAGIC} {} {} {}",
                    header.version, header.dim, header.level
                )?;
            }
        }
        Ok(Self {
            out,
            header,
            encoding,
        })
    }

    pub fn write(&mut self, s: &SentenceEmbedding) -> Result<()> {
        s.check(&self.header)?;
        match self.encoding {
            Encoding::Binary => self.write_binary(s),
            Encoding::Text => self.write_text(s),
        }
    }

    fn write_binary(&mut self, s: &SentenceEmbedding) -> Result<()> {
        let o = &mut self.out;
        o.write_all(&u32_of(s.id.len())?.to_le_bytes())?;
        o.write_all(s.id.as_bytes())?;
        o.write_all(&u32_of(s.tokens.len())?.to_le_bytes())?;
        for t in &s.tokens {
            o.write_all(&u32_of(t.len())?.to_le_bytes())?;
            o.write_all(t.as_bytes())?;
        }
        if let Some(spans) = &s.spans {
            o.write_all(&u32_of(spans.word_count())?.to_le_bytes())?;
            for r in spans.iter() {
                o.write_all(&u32_of(r.start)?.to_le_bytes())?;
                o.write_all(&u32_of(r.end)?.to_le_bytes())?;
            }
        }
        for v in s.matrix.view().iter() {
            o.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    fn write_text(&mut self, s: &SentenceEmbedding) -> Result<()> {
        let bad_ws = |t: &str| t.is_empty() || t.chars().any(char::is_whitespace);
        if bad_ws(&s.id) || s.tokens.iter().any(|t| bad_ws(t)) {
            return Err(Error::Sentence {
                id: s.id.clone(),
                reason: "ids and tokens must be non-empty and whitespace-free in text form".into(),
            });
        }
        let o = &mut self.out;
        writeln!(o, "sentence {} {}", s.id, s.tokens.len())?;
        writeln!(o, "tokens {}", s.tokens.join(" "))?;
        if let Some(spans) = &s.spans {
            let items: Vec<String> = spans
                .iter()
                .map(|r| format!("{}:{}", r.start, r.end))
                .collect();
            writeln!(o, "spans {}", items.join(" "))?;
        }
        for row in s.matrix.view().outer_iter() {
            let items: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(o, "{}", items.join(" "))?;
        }
        Ok(())
    }

    pub fn finish(mut self) -> Result<W> {
        self.out.flush()?;
        Ok(self.out)
    }
}

fn u32_of(x: usize) -> Result<u32> {
    u32::try_from(x).map_err(|_| Error::Format(format!("{x} does not fit in u32")))
}
