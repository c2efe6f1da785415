//! Pharaoh alignment files: one line per sentence pair, whitespace-separated
//! `i-j` items (sure) and `ipj` items (possible only).

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::alignment::{AlignmentSet, Edge};
use crate::error::{Error, Result};
use crate::eval::GoldAlignment;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeKind {
    Sure,
    Possible,
}

fn check_base(base: usize) -> Result<()> {
    if base > 1 {
        return Err(Error::InvalidConfig(format!(
            "index base must be 0 or 1, got {base}"
        )));
    }
    Ok(())
}

fn parse_item(item: &str, base: usize, line: usize) -> Result<(Edge, EdgeKind)> {
    let bad = |why: &str| Error::Parse {
        line,
        reason: format!("malformed item `{item}`: {why}"),
    };
    let (a, b, kind) = if let Some((a, b)) = item.split_once('-') {
        (a, b, EdgeKind::Sure)
    } else if let Some((a, b)) = item.split_once('p') {
        (a, b, EdgeKind::Possible)
    } else {
        return Err(bad("expected `i-j` or `ipj`"));
    };
    let parse = |s: &str| -> Result<usize> {
        let v: usize = s.parse().map_err(|_| bad("not an index"))?;
        v.checked_sub(base).ok_or_else(|| bad("index below base"))
    };
    Ok(((parse(a)?, parse(b)?), kind))
}

/// Parses one line; `line` is the 1-based line number used in errors.
pub fn parse_line(text: &str, base: usize, line: usize) -> Result<Vec<(Edge, EdgeKind)>> {
    check_base(base)?;
    text.split_whitespace()
        .map(|item| parse_item(item, base, line))
        .collect()
}

/// Reads gold alignments. Empty lines give an empty gold for that pair.
pub fn read_gold<R: BufRead>(reader: R, base: usize) -> Result<Vec<GoldAlignment>> {
    check_base(base)?;
    let mut out = Vec::new();
    for (k, line) in reader.lines().enumerate() {
        let mut gold = GoldAlignment::default();
        for (e, kind) in parse_line(&line?, base, k + 1)? {
            match kind {
                EdgeKind::Sure => gold.add_sure(e),
                EdgeKind::Possible => gold.add_possible(e),
            }
        }
        out.push(gold);
    }
    Ok(out)
}

pub fn read_gold_path(path: impl AsRef<Path>, base: usize) -> Result<Vec<GoldAlignment>> {
    read_gold(BufReader::new(File::open(path)?), base)
}

/// Reads plain alignments; `p` items are kept as ordinary edges. Dimensions
/// are the smallest that hold each line's edges.
pub fn read_alignments<R: BufRead>(reader: R, base: usize) -> Result<Vec<AlignmentSet>> {
    check_base(base)?;
    reader
        .lines()
        .enumerate()
        .map(|(k, line)| {
            let items = parse_line(&line?, base, k + 1)?;
            Ok(AlignmentSet::from_edges_inferred(
                items.into_iter().map(|(e, _)| e),
            ))
        })
        .collect()
}

pub fn read_alignments_path(path: impl AsRef<Path>, base: usize) -> Result<Vec<AlignmentSet>> {
    read_alignments(BufReader::new(File::open(path)?), base)
}

/// Writes one 0-based, row-major line per alignment.
pub fn write_alignments<'a, W, I>(mut out: W, alignments: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a AlignmentSet>,
{
    for a in alignments {
        writeln!(out, "{a}")?;
    }
    out.flush()?;
    Ok(())
}

/// Writes gold alignments, possible-only edges as `ipj`.
pub fn write_gold<'a, W, I>(mut out: W, golds: I, base: usize) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a GoldAlignment>,
{
    check_base(base)?;
    for g in golds {
        let items: Vec<String> = g
            .possible()
            .iter()
            .map(|&(i, j)| {
                let sep = if g.sure().contains(&(i, j)) { '-' } else { 'p' };
                format!("{}{sep}{}", i + base, j + base)
            })
            .collect();
        writeln!(out, "{}", items.join(" "))?;
    }
    out.flush()?;
    Ok(())
}
