//! Marking labels and small helpers for finite label sets.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// A marking label. Ordinary markings are small positive integers; the
/// gluing leg `*` is the largest representable label so it always sorts last.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(pub u32);

pub type LabelSet = BTreeSet<Label>;

impl Label {
    pub const STAR: Label = Label(u32::MAX);

    pub fn is_star(self) -> bool {
        self == Label::STAR
    }

    /// Largest label not in `used`, counting down from `*`.
    pub fn fresh(used: &LabelSet) -> Label {
        let mut l = u32::MAX;
        while used.contains(&Label(l)) {
            l -= 1;
        }
        Label(l)
    }
}

impl From<u32> for Label {
    fn from(v: u32) -> Self {
        Label(v)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_star() {
            write!(f, "*")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        if s == "*" {
            return Ok(Label::STAR);
        }
        s.parse::<u32>()
            .map(Label)
            .map_err(|_| Error::Parse(format!("bad label {s:?}")))
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.is_star() {
            s.serialize_str("*")
        } else {
            s.serialize_u32(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u32),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(n) => Ok(Label(n)),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// The label set {1, ..., n}.
pub fn range_labels(n: usize) -> LabelSet {
    (1..=n as u32).map(Label).collect()
}

/// All subsets of `set` with exactly `k` elements, in lexicographic order.
pub fn subsets_of_size(set: &LabelSet, k: usize) -> Vec<LabelSet> {
    fn go(items: &[Label], k: usize, cur: &mut Vec<Label>, out: &mut Vec<LabelSet>) {
        if cur.len() == k {
            out.push(cur.iter().copied().collect());
            return;
        }
        let need = k - cur.len();
        for i in 0..items.len() {
            if items.len() - i < need {
                break;
            }
            cur.push(items[i]);
            go(&items[i + 1..], k, cur, out);
            cur.pop();
        }
    }
    let items: Vec<Label> = set.iter().copied().collect();
    let mut out = Vec::new();
    go(&items, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// All subsets of `set` (2^|set| of them).
pub fn all_subsets(set: &LabelSet) -> Vec<LabelSet> {
    let items: Vec<Label> = set.iter().copied().collect();
    (0u64..1 << items.len())
        .map(|mask| {
            items
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, l)| *l)
                .collect()
        })
        .collect()
}

/// Formats a label set as `{1,2,*}`.
pub fn fmt_set(set: &LabelSet) -> String {
    let inner: Vec<String> = set.iter().map(|l| l.to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_counts() {
        let s = range_labels(6);
        for k in 0..=7 {
            let expected = match k {
                0 => 1,
                1 => 6,
                2 => 15,
                3 => 20,
                4 => 15,
                5 => 6,
                6 => 1,
                _ => 0,
            };
            let subs = subsets_of_size(&s, k);
            assert_eq!(subs.len(), expected, "k = {k}");
            assert!(subs.iter().all(|x| x.len() == k));
        }
        assert_eq!(all_subsets(&s).len(), 64);
    }

    #[test]
    fn star_sorts_last_and_round_trips() {
        assert!(Label(7) < Label::STAR);
        assert_eq!("*".parse::<Label>().unwrap(), Label::STAR);
        assert_eq!(Label::STAR.to_string(), "*");
        let used: LabelSet = [Label::STAR].into_iter().collect();
        assert_eq!(Label::fresh(&used), Label(u32::MAX - 1));
    }
}
