use std::fs;
use std::io::{self, Read};
use std::path::Path;

use anyhow::{bail, Context, Result};
use m2s_core::{parse_wcnf_str, wcnf_to_ising, InstanceJson, IsingInstance, Wcnf};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum InputFormat {
    Auto,
    Json,
    Wcnf,
}

pub struct Loaded {
    pub inst: IsingInstance,
    /// Present when the input was a weighted CNF.
    pub wcnf: Option<Wcnf>,
}

pub fn read_text(path: &str) -> Result<String> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).context("reading standard input")?;
        Ok(s)
    } else {
        fs::read_to_string(Path::new(path)).with_context(|| format!("reading {path}"))
    }
}

pub fn load(path: &str, format: InputFormat) -> Result<Loaded> {
    let text = read_text(path)?;
    let format = match format {
        InputFormat::Auto if text.trim_start().starts_with('{') => InputFormat::Json,
        InputFormat::Auto => InputFormat::Wcnf,
        f => f,
    };
    match format {
        InputFormat::Json => {
            let doc: InstanceJson = serde_json::from_str(&text).context("parsing instance JSON")?;
            Ok(Loaded {
                inst: IsingInstance::from_json(&doc)?,
                wcnf: None,
            })
        }
        InputFormat::Wcnf => {
            let w = parse_wcnf_str(&text)?;
            if w.tautologies_dropped > 0 {
                eprintln!("warning: dropped {} tautological clauses", w.tautologies_dropped);
            }
            Ok(Loaded {
                inst: wcnf_to_ising(&w)?,
                wcnf: Some(w),
            })
        }
        InputFormat::Auto => unreachable!("resolved above"),
    }
}

/// SHA-256 of the canonical JSON form.
pub fn digest(inst: &IsingInstance) -> String {
    let canon = serde_json::to_string(&inst.to_json()).expect("instance serializes");
    hex::encode(Sha256::digest(canon.as_bytes()))
}

/// Integers separated by commas or whitespace.
pub fn parse_int_list(text: &str) -> Result<Vec<i64>> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<i64>().with_context(|| format!("bad integer {t:?}")))
        .collect()
}

pub fn parse_index_list(text: &str) -> Result<Vec<usize>> {
    parse_int_list(text)?
        .into_iter()
        .map(|v| {
            if v < 0 {
                bail!("negative index {v}");
            }
            Ok(v as usize)
        })
        .collect()
}
