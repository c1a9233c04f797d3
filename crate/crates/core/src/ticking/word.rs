use std::cmp::Ordering;
use std::fmt;

use crate::net::Label;

/// A finite word over transition labels.
///
/// Words are ordered shortlex: shorter words first, then lexicographically.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<Label>);

impl Word {
    pub fn eps() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Label] {
        &self.0
    }

    /// `self · a`.
    pub fn append(&self, a: &Label) -> Word {
        let mut v = self.0.clone();
        v.push(a.clone());
        Word(v)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        Word(v)
    }

    /// A word of single-character letters, one per char.
    pub fn from_chars(s: &str) -> Word {
        Word(s.chars().map(|c| Label::new(c.to_string())).collect())
    }

    pub fn from_letters<'a>(letters: impl IntoIterator<Item = &'a str>) -> Word {
        Word(letters.into_iter().map(Label::from).collect())
    }

    /// Letters concatenated if each is a single character, else joined by `.`;
    /// the empty word renders as the empty string.
    pub fn to_text(&self) -> String {
        if self.0.iter().all(|l| l.as_str().chars().count() == 1) {
            self.0.iter().map(Label::as_str).collect()
        } else {
            self.0
                .iter()
                .map(Label::as_str)
                .collect::<Vec<_>>()
                .join(".")
        }
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            f.write_str("ε")
        } else {
            f.write_str(&self.to_text())
        }
    }
}
