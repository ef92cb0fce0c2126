//! Litmus tests: per-core instruction lists plus the proposed outcome.
//!
//! ```text
//! test sb mcm SC expect forbidden
//! i1: 0 W x 1
//! i2: 0 R y 0
//! i3: 1 W y 1
//! i4: 1 R x 0
//! ```
//!
//! The value on a read is the value the outcome requires it to return.
//! All locations start at 0.

use std::collections::BTreeSet;
use std::fmt::{self, Write};

use serde::Serialize;
use thiserror::Error;

use crate::dsl::FenceFlavor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InstrKind {
    Read,
    Write,
    Fence(FenceFlavor),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LitmusInstruction {
    pub id: String,
    pub core: u32,
    pub po_index: u32,
    pub kind: InstrKind,
    pub address: Option<String>,
    pub data: Option<i64>,
}

impl LitmusInstruction {
    pub fn is_read(&self) -> bool {
        self.kind == InstrKind::Read
    }

    pub fn is_write(&self) -> bool {
        self.kind == InstrKind::Write
    }

    /// Whether this is a read taking its value from the initial state.
    pub fn reads_initial(&self) -> bool {
        self.is_read() && self.data == Some(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Expectation {
    Forbidden,
    Permitted,
}

impl fmt::Display for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Expectation::Forbidden => "forbidden",
            Expectation::Permitted => "permitted",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Mcm {
    SC,
    TSO,
    RVWMO,
}

impl fmt::Display for Mcm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mcm::SC => "SC",
            Mcm::TSO => "TSO",
            Mcm::RVWMO => "RVWMO",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LitmusTest {
    pub name: String,
    pub mcm: Mcm,
    pub expected: Expectation,
    pub instructions: Vec<LitmusInstruction>,
}

impl LitmusTest {
    pub fn num_cores(&self) -> u32 {
        self.instructions.iter().map(|i| i.core + 1).max().unwrap_or(0)
    }

    pub fn core_instructions(&self, core: u32) -> impl Iterator<Item = &LitmusInstruction> {
        self.instructions.iter().filter(move |i| i.core == core)
    }

    /// Locations in order of first mention.
    pub fn addresses(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for a in self.instructions.iter().filter_map(|i| i.address.as_ref()) {
            if !out.contains(a) {
                out.push(a.clone());
            }
        }
        out
    }

    /// Every value mentioned, plus the initial value 0.
    pub fn values(&self) -> BTreeSet<i64> {
        let mut out: BTreeSet<i64> = self.instructions.iter().filter_map(|i| i.data).collect();
        out.insert(0);
        out
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LitmusError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("read `{id}` expects value {value} at `{address}` but no write produces it")]
    UnproducedValue {
        id: String,
        address: String,
        value: i64,
    },
}

fn syntax(line: usize, msg: impl Into<String>) -> LitmusError {
    LitmusError::Syntax {
        line,
        msg: msg.into(),
    }
}

pub fn parse_litmus(text: &str) -> Result<LitmusTest, LitmusError> {
    let mut header: Option<(String, Mcm, Expectation)> = None;
    let mut instructions: Vec<LitmusInstruction> = Vec::new();

    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.split('%').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        if header.is_none() {
            match words.as_slice() {
                ["test", name, "mcm", mcm, "expect", exp] => {
                    let mcm = match *mcm {
                        "SC" => Mcm::SC,
                        "TSO" => Mcm::TSO,
                        "RVWMO" => Mcm::RVWMO,
                        other => return Err(syntax(line_no, format!("unknown model `{other}`"))),
                    };
                    let exp = match *exp {
                        "forbidden" => Expectation::Forbidden,
                        "permitted" => Expectation::Permitted,
                        other => {
                            return Err(syntax(line_no, format!("unknown expectation `{other}`")))
                        }
                    };
                    header = Some((name.to_string(), mcm, exp));
                    continue;
                }
                _ => {
                    return Err(syntax(
                        line_no,
                        "expected `test <name> mcm <SC|TSO|RVWMO> expect <forbidden|permitted>`",
                    ))
                }
            }
        }

        let Some(id) = words[0].strip_suffix(':') else {
            return Err(syntax(line_no, "expected `<id>:`"));
        };
        if id.is_empty() || instructions.iter().any(|i| i.id == id) {
            return Err(syntax(line_no, format!("missing or duplicate instruction id `{id}`")));
        }
        let core: u32 = words
            .get(1)
            .and_then(|c| c.parse().ok())
            .ok_or_else(|| syntax(line_no, "expected core index"))?;
        let op = *words.get(2).ok_or_else(|| syntax(line_no, "expected R, W or F.<flavor>"))?;
        let kind = match op {
            "R" => InstrKind::Read,
            "W" => InstrKind::Write,
            f => match f.strip_prefix("F.").and_then(FenceFlavor::parse) {
                Some(fl) => InstrKind::Fence(fl),
                None => return Err(syntax(line_no, format!("unknown operation `{f}`"))),
            },
        };
        let (address, data) = match kind {
            InstrKind::Fence(_) => {
                if words.len() != 3 {
                    return Err(syntax(line_no, "fences take no address or value"));
                }
                (None, None)
            }
            _ => {
                if words.len() != 5 {
                    return Err(syntax(line_no, "expected `<addr> <value>`"));
                }
                let v: i64 = words[4]
                    .parse()
                    .map_err(|_| syntax(line_no, format!("bad value `{}`", words[4])))?;
                (Some(words[3].to_string()), Some(v))
            }
        };
        let po_index = instructions.iter().filter(|i| i.core == core).count() as u32;
        instructions.push(LitmusInstruction {
            id: id.to_string(),
            core,
            po_index,
            kind,
            address,
            data,
        });
    }

    let Some((name, mcm, expected)) = header else {
        return Err(syntax(0, "missing test header"));
    };
    for r in instructions.iter().filter(|i| i.is_read()) {
        let (addr, v) = (r.address.as_ref().unwrap(), r.data.unwrap());
        let produced = v == 0
            || instructions
                .iter()
                .any(|w| w.is_write() && w.address.as_ref() == Some(addr) && w.data == Some(v));
        if !produced {
            return Err(LitmusError::UnproducedValue {
                id: r.id.clone(),
                address: addr.clone(),
                value: v,
            });
        }
    }
    Ok(LitmusTest {
        name,
        mcm,
        expected,
        instructions,
    })
}

pub fn print_litmus(test: &LitmusTest) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "test {} mcm {} expect {}",
        test.name, test.mcm, test.expected
    );
    for i in &test.instructions {
        let _ = write!(out, "{}: {} ", i.id, i.core);
        match i.kind {
            InstrKind::Read => out.push('R'),
            InstrKind::Write => out.push('W'),
            InstrKind::Fence(fl) => {
                let _ = write!(out, "F.{fl}");
            }
        }
        if let (Some(a), Some(v)) = (&i.address, i.data) {
            let _ = write!(out, " {a} {v}");
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReadFact {
    pub id: String,
    pub from_initial: bool,
    pub data: i64,
}

/// Per-read facts used when grounding `DataFromInitialState`. A read of 0
/// is taken to read the initial state, whether or not some write stores 0.
pub fn derived_read_facts(test: &LitmusTest) -> Vec<ReadFact> {
    test.instructions
        .iter()
        .filter(|i| i.is_read())
        .map(|i| ReadFact {
            id: i.id.clone(),
            from_initial: i.reads_initial(),
            data: i.data.unwrap_or(0),
        })
        .collect()
}
