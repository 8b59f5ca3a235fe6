//! Points, samples, explicit finite hypothesis classes and cylinders.
//!
//! A class over the naturals is represented by its restriction to a domain
//! prefix `{0, .., domain_size - 1}`. Hypotheses are bit vectors over that
//! prefix and a class keeps them sorted and deduplicated, so two classes with
//! the same functions compare equal.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};
use smallvec::smallvec;

use crate::bits::{words_for, Subset, Words};
use crate::error::{LabError, Result};

/// A domain element.
pub type Point = usize;

/// A label. `true` is 1.
pub type Bit = bool;

#[inline]
pub(crate) fn bit_char(b: Bit) -> char {
    if b {
        '1'
    } else {
        '0'
    }
}

/// An ordered list of labeled points. Repeated points are allowed, including
/// with conflicting labels; such a sample is consistent with no function.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sample(Vec<(Point, Bit)>);

impl Sample {
    pub fn new() -> Self {
        Sample(Vec::new())
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Point, Bit)>) -> Self {
        Sample(pairs.into_iter().collect())
    }

    pub fn pairs(&self) -> &[(Point, Bit)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, x: Point, b: Bit) {
        self.0.push((x, b));
    }

    pub fn pop(&mut self) -> Option<(Point, Bit)> {
        self.0.pop()
    }

    /// A copy of this sample with one more pair appended.
    pub fn with(&self, x: Point, b: Bit) -> Sample {
        let mut s = self.clone();
        s.push(x, b);
        s
    }

    pub fn prefix(&self, len: usize) -> Sample {
        Sample(self.0[..len].to_vec())
    }

    pub fn concat(&self, other: &Sample) -> Sample {
        let mut s = self.clone();
        s.0.extend_from_slice(&other.0);
        s
    }

    pub fn max_point(&self) -> Option<Point> {
        self.0.iter().map(|&(x, _)| x).max()
    }

    /// False iff some point carries both labels.
    pub fn is_self_consistent(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &(x, b))| {
            self.0[..i].iter().all(|&(x2, b2)| x2 != x || b2 == b)
        })
    }

    pub fn check_domain(&self, domain_size: usize) -> Result<()> {
        match self.0.iter().find(|&&(x, _)| x >= domain_size) {
            Some(&(point, _)) => Err(LabError::Domain { point, domain_size }),
            None => Ok(()),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Point, Bit)> {
        self.0.iter()
    }
}

impl fmt::Display for Sample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, (x, b)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "({},{})", x, bit_char(*b))?;
        }
        write!(f, "]")
    }
}

impl Serialize for Sample {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
        for &(x, b) in &self.0 {
            seq.serialize_element(&(x, u8::from(b)))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Sample {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw: Vec<(Point, u8)> = Vec::deserialize(deserializer)?;
        raw.into_iter()
            .map(|(x, y)| match y {
                0 => Ok((x, false)),
                1 => Ok((x, true)),
                other => Err(de::Error::custom(format!("label {other} is not 0 or 1"))),
            })
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(Sample)
    }
}

/// A total bit function on `{0, .., len - 1}`.
#[derive(Clone, Debug)]
pub struct Hypothesis {
    len: usize,
    words: Words,
}

impl Hypothesis {
    pub fn zeros(len: usize) -> Self {
        Hypothesis {
            len,
            words: smallvec![0; words_for(len)],
        }
    }

    pub fn from_bits(bits: &[Bit]) -> Self {
        let mut h = Self::zeros(bits.len());
        for (x, &b) in bits.iter().enumerate() {
            h.set(x, b);
        }
        h
    }

    /// The function whose `x`-th value is bit `x` of `mask` (point 0 is the low bit).
    pub fn from_mask(len: usize, mask: u64) -> Self {
        assert!(len <= 64);
        let mut h = Self::zeros(len);
        if len > 0 {
            h.words[0] = if len == 64 { mask } else { mask & ((1u64 << len) - 1) };
        }
        h
    }

    /// Parses `"0110"`; the first character is the value at point 0.
    pub fn parse(s: &str) -> Result<Self> {
        let mut h = Self::zeros(s.chars().count());
        for (x, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => h.set(x, true),
                other => {
                    return Err(LabError::Parse(format!(
                        "hypothesis {s:?} contains {other:?}, expected 0 or 1"
                    )))
                }
            }
        }
        Ok(h)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, x: Point) -> Bit {
        debug_assert!(x < self.len);
        self.words[x / 64] >> (x % 64) & 1 == 1
    }

    pub fn try_get(&self, x: Point) -> Result<Bit> {
        if x < self.len {
            Ok(self.get(x))
        } else {
            Err(LabError::Domain {
                point: x,
                domain_size: self.len,
            })
        }
    }

    #[inline]
    pub fn set(&mut self, x: Point, b: Bit) {
        assert!(x < self.len, "point {x} outside hypothesis of length {}", self.len);
        let mask = 1u64 << (x % 64);
        if b {
            self.words[x / 64] |= mask;
        } else {
            self.words[x / 64] &= !mask;
        }
    }

    pub fn bits(&self) -> impl Iterator<Item = Bit> + '_ {
        (0..self.len).map(|x| self.get(x))
    }

    pub fn ones(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.len).filter(|&x| self.get(x))
    }

    /// Unchecked consistency: every pair must be in range.
    #[inline]
    pub(crate) fn agrees(&self, s: &Sample) -> bool {
        s.iter().all(|&(x, b)| self.get(x) == b)
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits() {
            write!(f, "{}", bit_char(b))?;
        }
        Ok(())
    }
}

impl PartialEq for Hypothesis {
    fn eq(&self, other: &Self) -> bool {
        self.len == other.len && self.words == other.words
    }
}

impl Eq for Hypothesis {}

impl Hash for Hypothesis {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.len.hash(state);
        self.words.hash(state);
    }
}

impl Ord for Hypothesis {
    /// Lexicographic on the bit string, point 0 first.
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.words.iter().zip(other.words.iter()) {
            match a.reverse_bits().cmp(&b.reverse_bits()) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.len.cmp(&other.len)
    }
}

impl PartialOrd for Hypothesis {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Serialize for Hypothesis {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Hypothesis {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Hypothesis::parse(&s).map_err(de::Error::custom)
    }
}

/// An explicit finite hypothesis class.
///
/// Besides the sorted hypothesis list the class keeps, for every point and
/// label, the subset of hypotheses taking that label there. Version spaces
/// are intersections of these columns.
#[derive(Clone, Debug)]
pub struct FiniteClass {
    domain_size: usize,
    hypotheses: Vec<Hypothesis>,
    columns: Vec<[Subset; 2]>,
}

impl PartialEq for FiniteClass {
    fn eq(&self, other: &Self) -> bool {
        self.domain_size == other.domain_size && self.hypotheses == other.hypotheses
    }
}

impl Eq for FiniteClass {}

impl Hash for FiniteClass {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.domain_size.hash(state);
        self.hypotheses.hash(state);
    }
}

impl FiniteClass {
    /// Builds a class, silently merging duplicate hypotheses.
    pub fn new(domain_size: usize, hypotheses: impl IntoIterator<Item = Hypothesis>) -> Result<Self> {
        if domain_size == 0 {
            return Err(LabError::Structural("domain_size must be positive".into()));
        }
        let mut hypotheses: Vec<Hypothesis> = hypotheses.into_iter().collect();
        if let Some(bad) = hypotheses.iter().find(|h| h.len() != domain_size) {
            return Err(LabError::Structural(format!(
                "hypothesis {bad} has length {}, class domain_size is {domain_size}",
                bad.len()
            )));
        }
        hypotheses.sort();
        hypotheses.dedup();
        Ok(Self::from_canonical(domain_size, hypotheses))
    }

    fn from_canonical(domain_size: usize, hypotheses: Vec<Hypothesis>) -> Self {
        let n = hypotheses.len();
        let mut columns = vec![[Subset::empty(n), Subset::empty(n)]; domain_size];
        for (i, h) in hypotheses.iter().enumerate() {
            for (x, col) in columns.iter_mut().enumerate() {
                col[usize::from(h.get(x))].insert(i);
            }
        }
        FiniteClass {
            domain_size,
            hypotheses,
            columns,
        }
    }

    /// Convenience constructor from bit strings of equal length.
    pub fn from_strs(domain_size: usize, strs: &[&str]) -> Result<Self> {
        let hs = strs
            .iter()
            .map(|s| Hypothesis::parse(s))
            .collect::<Result<Vec<_>>>()?;
        Self::new(domain_size, hs)
    }

    pub fn empty(domain_size: usize) -> Result<Self> {
        Self::new(domain_size, [])
    }

    /// All `2^domain_size` functions.
    pub fn all_functions(domain_size: usize) -> Result<Self> {
        if domain_size > 20 {
            return Err(LabError::ResourceGuard {
                what: "materializing every function".into(),
                needed: 1u128 << domain_size,
                cap: 1 << 20,
            });
        }
        Self::new(
            domain_size,
            (0..1u64 << domain_size).map(|m| Hypothesis::from_mask(domain_size, m)),
        )
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn hypotheses(&self) -> &[Hypothesis] {
        &self.hypotheses
    }

    pub fn len(&self) -> usize {
        self.hypotheses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hypotheses.is_empty()
    }

    pub fn contains(&self, f: &Hypothesis) -> bool {
        self.hypotheses.binary_search(f).is_ok()
    }

    /// Hypotheses taking label `b` at `x`. Unchecked: `x` must be in the domain.
    #[inline]
    pub fn column(&self, x: Point, b: Bit) -> &Subset {
        &self.columns[x][usize::from(b)]
    }

    pub fn full_subset(&self) -> Subset {
        Subset::full(self.len())
    }

    pub fn check_point(&self, x: Point) -> Result<()> {
        if x < self.domain_size {
            Ok(())
        } else {
            Err(LabError::Domain {
                point: x,
                domain_size: self.domain_size,
            })
        }
    }

    /// Indices of the hypotheses consistent with `s`.
    pub fn version_space(&self, s: &Sample) -> Result<Subset> {
        s.check_domain(self.domain_size)?;
        Ok(self.version_space_unchecked(s))
    }

    #[inline]
    pub(crate) fn version_space_unchecked(&self, s: &Sample) -> Subset {
        let mut v = self.full_subset();
        for &(x, b) in s.iter() {
            v.and_assign(self.column(x, b));
            if v.is_empty() {
                break;
            }
        }
        v
    }

    /// Realizability without domain checks, for hot loops.
    #[inline]
    pub(crate) fn realizes_unchecked(&self, s: &Sample) -> bool {
        !self.version_space_unchecked(s).is_empty()
    }

    /// The first hypothesis consistent with `s`, if any.
    pub fn realizer(&self, s: &Sample) -> Result<Option<&Hypothesis>> {
        Ok(self.version_space(s)?.first().map(|i| &self.hypotheses[i]))
    }

    pub fn sub_class(&self, subset: &Subset) -> FiniteClass {
        let hs = subset.iter().map(|i| self.hypotheses[i].clone()).collect();
        Self::from_canonical(self.domain_size, hs)
    }

    /// Restriction of every hypothesis to the first `len` points.
    pub fn truncate(&self, len: usize) -> Result<FiniteClass> {
        if len > self.domain_size {
            return Err(LabError::Structural(format!(
                "cannot truncate a class on {} points to {len}",
                self.domain_size
            )));
        }
        let hs = self.hypotheses.iter().map(|h| {
            let bits: Vec<Bit> = h.bits().take(len).collect();
            Hypothesis::from_bits(&bits)
        });
        FiniteClass::new(len, hs)
    }

    pub fn to_json(&self) -> ClassFile {
        ClassFile {
            domain_size: self.domain_size,
            hypotheses: self.hypotheses.iter().map(ToString::to_string).collect(),
        }
    }

    /// Parses the class file format; duplicate hypotheses are rejected.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: ClassFile = serde_json::from_str(text)?;
        file.into_class()
    }
}

impl fmt::Display for FiniteClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, h) in self.hypotheses.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{h}")?;
        }
        write!(f, "}}")
    }
}

/// On-disk class format: `{"domain_size": N, "hypotheses": ["0101", ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassFile {
    pub domain_size: usize,
    pub hypotheses: Vec<String>,
}

impl ClassFile {
    pub fn into_class(self) -> Result<FiniteClass> {
        let mut parsed = Vec::with_capacity(self.hypotheses.len());
        for s in &self.hypotheses {
            let h = Hypothesis::parse(s)?;
            if h.len() != self.domain_size {
                return Err(LabError::Parse(format!(
                    "hypothesis {s:?} has {} characters, expected {}",
                    h.len(),
                    self.domain_size
                )));
            }
            parsed.push(h);
        }
        let mut sorted = parsed.clone();
        sorted.sort();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(LabError::Parse(format!("duplicate hypothesis {}", w[0])));
        }
        FiniteClass::new(self.domain_size, parsed).map_err(|e| LabError::Parse(e.to_string()))
    }
}

/// The set of all total functions consistent with a sample.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cylinder {
    pub sample: Sample,
}

impl Cylinder {
    pub fn new(sample: Sample) -> Self {
        Cylinder { sample }
    }

    /// A conflicting inducing sample gives the empty cylinder.
    pub fn is_empty_set(&self) -> bool {
        !self.sample.is_self_consistent()
    }

    pub fn contains(&self, f: &Hypothesis) -> Result<bool> {
        consistent(f, &self.sample)
    }
}

/// Whether `f` agrees with every pair of `s`.
pub fn consistent(f: &Hypothesis, s: &Sample) -> Result<bool> {
    s.check_domain(f.len())?;
    Ok(f.agrees(s))
}

/// Whether some hypothesis of `h` is consistent with `s`. The empty class
/// realizes nothing, not even the empty sample.
pub fn realizable(h: &FiniteClass, s: &Sample) -> Result<bool> {
    Ok(!h.version_space(s)?.is_empty())
}

/// `{f in h : f(x) = b}`.
pub fn restrict(h: &FiniteClass, x: Point, b: Bit) -> Result<FiniteClass> {
    h.check_point(x)?;
    Ok(h.sub_class(h.column(x, b)))
}

pub fn cylinder_nonempty_within(c: &Cylinder, domain_size: usize) -> Result<bool> {
    c.sample.check_domain(domain_size)?;
    Ok(!c.is_empty_set())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(s: &str) -> Hypothesis {
        Hypothesis::parse(s).unwrap()
    }

    fn s(pairs: &[(Point, u8)]) -> Sample {
        Sample::from_pairs(pairs.iter().map(|&(x, y)| (x, y == 1)))
    }

    fn class(n: usize, strs: &[&str]) -> FiniteClass {
        FiniteClass::from_strs(n, strs).unwrap()
    }

    #[test]
    fn consistent_examples() {
        assert!(consistent(&h("010"), &s(&[(1, 1)])).unwrap());
        assert!(!consistent(&h("010"), &s(&[(1, 1), (2, 1)])).unwrap());
        assert!(consistent(&h("010"), &Sample::new()).unwrap());
        assert!(matches!(
            consistent(&h("010"), &s(&[(3, 0)])),
            Err(LabError::Domain { point: 3, domain_size: 3 })
        ));
    }

    #[test]
    fn realizable_examples() {
        let c = class(3, &["000", "111"]);
        assert!(realizable(&c, &s(&[(0, 1), (2, 1)])).unwrap());
        assert!(!realizable(&c, &s(&[(0, 1), (2, 0)])).unwrap());
        let empty = FiniteClass::empty(3).unwrap();
        assert!(!realizable(&empty, &Sample::new()).unwrap());
        assert!(realizable(&c, &Sample::new()).unwrap());
        assert!(realizable(&c, &s(&[(5, 0)])).is_err());
    }

    #[test]
    fn restrict_examples() {
        let c = class(3, &["000", "111", "101"]);
        assert_eq!(restrict(&c, 1, false).unwrap(), class(3, &["000", "101"]));
        let c2 = class(3, &["000", "111"]);
        assert_eq!(restrict(&c2, 0, true).unwrap(), class(3, &["111"]));
        for x in 0..3 {
            let r = restrict(&restrict(&c, x, false).unwrap(), x, true).unwrap();
            assert!(r.is_empty());
        }
        assert!(restrict(&c, 3, true).is_err());
    }

    #[test]
    fn cylinder_examples() {
        assert!(!cylinder_nonempty_within(&Cylinder::new(s(&[(0, 1), (0, 0)])), 2).unwrap());
        assert!(cylinder_nonempty_within(&Cylinder::new(s(&[(0, 1)])), 2).unwrap());
        assert!(cylinder_nonempty_within(&Cylinder::new(Sample::new()), 1).unwrap());
        assert!(cylinder_nonempty_within(&Cylinder::new(s(&[(4, 1)])), 2).is_err());
    }

    #[test]
    fn class_is_canonical() {
        let a = class(3, &["111", "000", "111"]);
        let b = class(3, &["000", "111"]);
        assert_eq!(a, b);
        assert_eq!(a.hypotheses()[0].to_string(), "000");
        assert!(FiniteClass::from_strs(3, &["00"]).is_err());
    }

    #[test]
    fn hypothesis_order_is_lexicographic() {
        let mut v = [h("100"), h("010"), h("001"), h("000")];
        v.sort();
        let strs: Vec<String> = v.iter().map(ToString::to_string).collect();
        assert_eq!(strs, ["000", "001", "010", "100"]);
        let long_a = Hypothesis::parse(&format!("{}1", "0".repeat(70))).unwrap();
        let long_b = Hypothesis::parse(&format!("1{}", "0".repeat(70))).unwrap();
        assert!(long_a < long_b);
        assert_eq!(long_a.to_string().len(), 71);
        assert!(long_a.get(70));
    }

    #[test]
    fn class_file_roundtrip_and_duplicates() {
        let text = r#"{"domain_size": 3, "hypotheses": ["000", "111"]}"#;
        let c = FiniteClass::from_json_str(text).unwrap();
        assert_eq!(c, class(3, &["000", "111"]));
        let again = serde_json::to_string(&c.to_json()).unwrap();
        assert_eq!(FiniteClass::from_json_str(&again).unwrap(), c);

        let dup = r#"{"domain_size": 3, "hypotheses": ["000", "000"]}"#;
        assert!(matches!(FiniteClass::from_json_str(dup), Err(LabError::Parse(_))));
        let short = r#"{"domain_size": 3, "hypotheses": ["00"]}"#;
        assert!(matches!(FiniteClass::from_json_str(short), Err(LabError::Parse(_))));
        let junk = r#"{"domain_size": 2, "hypotheses": ["0a"]}"#;
        assert!(FiniteClass::from_json_str(junk).is_err());
    }

    #[test]
    fn sample_json() {
        let smp: Sample = serde_json::from_str("[[0,1],[3,0]]").unwrap();
        assert_eq!(smp, s(&[(0, 1), (3, 0)]));
        assert_eq!(serde_json::to_string(&smp).unwrap(), "[[0,1],[3,0]]");
        assert!(serde_json::from_str::<Sample>("[[0,2]]").is_err());
    }

    #[test]
    fn self_consistency() {
        assert!(s(&[(0, 1), (1, 0), (0, 1)]).is_self_consistent());
        assert!(!s(&[(0, 1), (1, 0), (0, 0)]).is_self_consistent());
    }
}
