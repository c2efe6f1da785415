//! Plain whitespace-tokenized text, tag and frequency files.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};

/// One token list per line.
pub fn read_tokenized<R: BufRead>(reader: R) -> Result<Vec<Vec<String>>> {
    reader
        .lines()
        .map(|l| Ok(l?.split_whitespace().map(String::from).collect()))
        .collect()
}

pub fn read_tokenized_path(path: impl AsRef<Path>) -> Result<Vec<Vec<String>>> {
    read_tokenized(BufReader::new(File::open(path)?))
}

/// `word count` per line. Repeated words have their counts summed; blank
/// lines are skipped.
pub fn read_frequencies<R: BufRead>(reader: R) -> Result<HashMap<String, u64>> {
    let mut out = HashMap::new();
    for (k, line) in reader.lines().enumerate() {
        let line = line?;
        let f: Vec<&str> = line.split_whitespace().collect();
        match f.as_slice() {
            [] => {}
            [word, count] => {
                let c: u64 = count.parse().map_err(|_| Error::Parse {
                    line: k + 1,
                    reason: format!("bad count `{count}`"),
                })?;
                *out.entry(word.to_string()).or_insert(0) += c;
            }
            _ => {
                return Err(Error::Parse {
                    line: k + 1,
                    reason: "expected `word count`".into(),
                })
            }
        }
    }
    Ok(out)
}

pub fn read_frequencies_path(path: impl AsRef<Path>) -> Result<HashMap<String, u64>> {
    read_frequencies(BufReader::new(File::open(path)?))
}
