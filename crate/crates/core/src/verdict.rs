use std::fmt;

/// Outcome of a structural check: valid iff no violation was recorded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict<V> {
    pub violations: Vec<V>,
}

impl<V> Default for Verdict<V> {
    fn default() -> Self {
        Verdict {
            violations: Vec::new(),
        }
    }
}

impl<V> Verdict<V> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, v: V) {
        self.violations.push(v);
    }

    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn extend(&mut self, other: impl IntoIterator<Item = V>) {
        self.violations.extend(other);
    }

    pub fn map<W>(self, f: impl FnMut(V) -> W) -> Verdict<W> {
        Verdict {
            violations: self.violations.into_iter().map(f).collect(),
        }
    }
}

impl<V: fmt::Display> fmt::Display for Verdict<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}
