//! Line-delimited run log: per-generation nondominated solutions and archive insertions.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `subproblem_id` of records describing archive (UEA) entries.
pub const ARCHIVE_SENTINEL: i64 = -1;

pub const FIELD_HEADER: &str = "run_id,generation,eval_index,subproblem_id,x,f,v,feasible";

#[derive(Debug, Clone, PartialEq)]
pub struct RunLogRecord<T> {
    pub run_id: u64,
    pub generation: u64,
    pub eval_index: u64,
    /// Subproblem index for population snapshots, [`ARCHIVE_SENTINEL`] for archive entries.
    pub subproblem_id: i64,
    pub x: Vec<T>,
    pub f: Vec<T>,
    pub v: T,
    pub feasible: bool,
}

impl<T> RunLogRecord<T> {
    pub fn is_archive(&self) -> bool {
        self.subproblem_id == ARCHIVE_SENTINEL
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunLog<T> {
    /// `key=value` tags carried on the format line, e.g. the scaling reference set.
    pub tags: Vec<(String, String)>,
    pub records: Vec<RunLogRecord<T>>,
}

fn join<T: Scalar>(v: &[T], out: &mut String) {
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            out.push(';');
        }
        out.push_str(&x.to_exact_string());
    }
}

fn split_vec<T: Scalar>(s: &str, line: usize) -> Result<Vec<T>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(';')
        .map(|t| {
            t.parse::<T>()
                .map_err(|_| Error::parse(line, format!("bad number `{t}`")))
        })
        .collect()
}

impl<T: Scalar> RunLog<T> {
    pub fn new() -> Self {
        Self {
            tags: Vec::new(),
            records: Vec::new(),
        }
    }

    pub fn tag(&self, key: &str) -> Option<&str> {
        self.tags.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn archive_records(&self) -> impl Iterator<Item = &RunLogRecord<T>> {
        self.records.iter().filter(|r| r.is_archive())
    }

    pub fn population_records(&self) -> impl Iterator<Item = &RunLogRecord<T>> {
        self.records.iter().filter(|r| !r.is_archive())
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        let mut head = String::from("# moead-runlog v1");
        for (k, v) in &self.tags {
            head.push(' ');
            head.push_str(k);
            head.push('=');
            head.push_str(v);
        }
        writeln!(w, "{head}")?;
        writeln!(w, "{FIELD_HEADER}")?;
        let mut line = String::with_capacity(256);
        for r in &self.records {
            line.clear();
            line.push_str(&format!(
                "{},{},{},{},",
                r.run_id, r.generation, r.eval_index, r.subproblem_id
            ));
            join(&r.x, &mut line);
            line.push(',');
            join(&r.f, &mut line);
            line.push(',');
            line.push_str(&r.v.to_exact_string());
            line.push_str(if r.feasible { ",true\n" } else { ",false\n" });
            w.write_all(line.as_bytes())?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<Self> {
        let mut log = Self::new();
        let mut lines = r.lines();
        let first = lines.next().ok_or_else(|| Error::parse(1, "empty run log"))??;
        let mut tokens = first.split_whitespace();
        if tokens.next() != Some("#") || tokens.next() != Some("moead-runlog") || tokens.next() != Some("v1") {
            return Err(Error::parse(1, "expected `# moead-runlog v1`"));
        }
        for t in tokens {
            let (k, v) = t
                .split_once('=')
                .ok_or_else(|| Error::parse(1, format!("bad tag `{t}`")))?;
            log.tags.push((k.to_string(), v.to_string()));
        }
        let header = lines.next().ok_or_else(|| Error::parse(2, "missing field header"))??;
        if header != FIELD_HEADER {
            return Err(Error::parse(2, "unexpected field header"));
        }
        for (i, line) in lines.enumerate() {
            let no = i + 3;
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 8 {
                return Err(Error::parse(no, format!("expected 8 fields, got {}", fields.len())));
            }
            let int = |s: &str| {
                s.parse::<u64>()
                    .map_err(|_| Error::parse(no, format!("bad integer `{s}`")))
            };
            log.records.push(RunLogRecord {
                run_id: int(fields[0])?,
                generation: int(fields[1])?,
                eval_index: int(fields[2])?,
                subproblem_id: fields[3]
                    .parse()
                    .map_err(|_| Error::parse(no, format!("bad subproblem id `{}`", fields[3])))?,
                x: split_vec(fields[4], no)?,
                f: split_vec(fields[5], no)?,
                v: fields[6]
                    .parse()
                    .map_err(|_| Error::parse(no, format!("bad violation `{}`", fields[6])))?,
                feasible: match fields[7] {
                    "true" => true,
                    "false" => false,
                    s => return Err(Error::parse(no, format!("bad feasibility flag `{s}`"))),
                },
            });
        }
        Ok(log)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::read_from(text.as_bytes())
    }
}
