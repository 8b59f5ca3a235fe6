use std::fmt;
use std::io::{self, BufRead, Write};

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{LabError, Result};
use crate::hypothesis::{Cylinder, Hypothesis, Point, Sample};

/// Which part of the construction emitted a restriction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Origin {
    FirstType,
    BlockEquality(usize),
    BlockValue(usize),
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::FirstType => write!(f, "first-type"),
            Origin::BlockEquality(i) => write!(f, "block-{i}-equality"),
            Origin::BlockValue(i) => write!(f, "block-{i}-value"),
        }
    }
}

impl std::str::FromStr for Origin {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        if s == "first-type" {
            return Ok(Origin::FirstType);
        }
        let bad = || LabError::Parse(format!("unknown restriction origin {s:?}"));
        let rest = s.strip_prefix("block-").ok_or_else(bad)?;
        let (i, kind) = rest.split_once('-').ok_or_else(bad)?;
        let i: usize = i.parse().map_err(|_| bad())?;
        match kind {
            "equality" => Ok(Origin::BlockEquality(i)),
            "value" => Ok(Origin::BlockValue(i)),
            _ => Err(bad()),
        }
    }
}

impl Serialize for Origin {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Origin {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

/// One forbidden cylinder: no function in the class agrees with `forbid`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Restriction {
    pub forbid: Sample,
    pub origin: Origin,
}

impl Restriction {
    pub fn new(forbid: Sample, origin: Origin) -> Self {
        Restriction { forbid, origin }
    }

    /// `f(a) = f(b)`, as the two cylinders it forbids.
    pub fn equality(a: Point, b: Point, origin: Origin) -> [Restriction; 2] {
        [
            Restriction::new(Sample::from_pairs([(a, false), (b, true)]), origin),
            Restriction::new(Sample::from_pairs([(a, true), (b, false)]), origin),
        ]
    }

    pub fn cylinder(&self) -> Cylinder {
        Cylinder::new(self.forbid.clone())
    }

    /// Whether `f` lies in the forbidden cylinder. Points beyond `f` count
    /// as disagreement.
    pub fn hits(&self, f: &Hypothesis) -> bool {
        self.forbid.iter().all(|&(x, b)| x < f.len() && f.get(x) == b)
    }
}

/// An append-only list of forbidden cylinders. The class it represents is
/// every function avoiding all of them, so it only shrinks as the stream grows.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RestrictionStream {
    emitted: Vec<Restriction>,
}

impl RestrictionStream {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, r: Restriction) {
        self.emitted.push(r);
    }

    pub fn append(&mut self, other: RestrictionStream) {
        self.emitted.extend(other.emitted);
    }

    pub fn len(&self) -> usize {
        self.emitted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.emitted.is_empty()
    }

    pub fn restrictions(&self) -> &[Restriction] {
        &self.emitted
    }

    pub fn cylinders(&self) -> Vec<Cylinder> {
        self.emitted.iter().map(Restriction::cylinder).collect()
    }

    /// The first restriction `f` violates, if any.
    pub fn first_violation(&self, f: &Hypothesis) -> Option<&Restriction> {
        self.emitted.iter().find(|r| r.hits(f))
    }

    pub fn admits(&self, f: &Hypothesis) -> bool {
        self.first_violation(f).is_none()
    }

    /// One JSON object per line: `{"forbid": [[x,b],...], "origin": ...}`.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> io::Result<()> {
        for r in &self.emitted {
            serde_json::to_writer(&mut w, r)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("json is utf-8")
    }

    pub fn read_jsonl<R: BufRead>(r: R) -> Result<Self> {
        let mut stream = RestrictionStream::new();
        for (i, line) in r.lines().enumerate() {
            let line = line.map_err(|e| LabError::Parse(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let rest: Restriction = serde_json::from_str(&line)
                .map_err(|e| LabError::Parse(format!("stream line {}: {e}", i + 1)))?;
            stream.push(rest);
        }
        Ok(stream)
    }
}
