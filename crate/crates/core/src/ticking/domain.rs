use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use super::Word;
use crate::mcnet::ComponentAutomaton;
use crate::net::{Label, PlaceId, TransId};

/// Largest number of words a finite-equation domain may enumerate.
pub const MAX_ENUMERATED_WORDS: usize = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DomainError {
    #[error("word `{word}` is longer than the bound {max}")]
    WordTooLong { word: Word, max: usize },
    #[error("letter `{0}` is not in the alphabet")]
    LetterOutsideAlphabet(Label),
    #[error("word `{0}` is not a run of the automaton")]
    NotARun(Word),
    #[error("transition `{0}` of the automaton is not sequential")]
    NotSequential(TransId),
    #[error("place `{place}` has two outgoing transitions labeled `{label}`")]
    Nondeterministic { place: PlaceId, label: Label },
    #[error("{words} words up to the bound exceed the enumeration limit")]
    TooLarge { words: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DomainKind {
    /// Every word is alone in its class.
    Free,
    /// Runs are equivalent iff they have the same length and end in the same place.
    TrellisOf(ComponentAutomaton),
    /// The suffix-stable equivalence generated by `equations`, decided on
    /// words up to `max_word_len`.
    FiniteEquations {
        equations: Vec<(Word, Word)>,
        max_word_len: usize,
    },
}

#[derive(Clone, Debug)]
enum Inner {
    Free,
    Trellis(Dfa),
    Finite(HashMap<Word, Word>),
}

#[derive(Clone, Debug)]
struct Dfa {
    states: Vec<PlaceId>,
    init: usize,
    delta: Vec<BTreeMap<Label, usize>>,
}

/// A set of word classes over an alphabet, with a canonical member per class.
#[derive(Clone, Debug)]
pub struct TickingDomain {
    alphabet: BTreeSet<Label>,
    kind: DomainKind,
    inner: Inner,
}

impl PartialEq for TickingDomain {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet == other.alphabet && self.kind == other.kind
    }
}

impl Eq for TickingDomain {}

impl TickingDomain {
    pub fn free(alphabet: impl IntoIterator<Item = Label>) -> Self {
        TickingDomain {
            alphabet: alphabet.into_iter().collect(),
            kind: DomainKind::Free,
            inner: Inner::Free,
        }
    }

    /// The length-and-target domain of a sequential automaton.
    pub fn trellis(automaton: ComponentAutomaton) -> Result<Self, DomainError> {
        let net = &automaton.net;
        let states: Vec<PlaceId> = net.places().cloned().collect();
        let index: BTreeMap<&PlaceId, usize> =
            states.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let mut delta = vec![BTreeMap::new(); states.len()];
        let mut alphabet = BTreeSet::new();
        for (id, t) in net.transitions() {
            if t.pre.len() != 1 || t.post.len() != 1 {
                return Err(DomainError::NotSequential(id.clone()));
            }
            let from = index[t.pre.iter().next().unwrap()];
            let to = index[t.post.iter().next().unwrap()];
            if delta[from].insert(t.label.clone(), to).is_some() {
                return Err(DomainError::Nondeterministic {
                    place: states[from].clone(),
                    label: t.label.clone(),
                });
            }
            alphabet.insert(t.label.clone());
        }
        let init = index[automaton.initial_place()];
        Ok(TickingDomain {
            alphabet,
            kind: DomainKind::TrellisOf(automaton),
            inner: Inner::Trellis(Dfa {
                states,
                init,
                delta,
            }),
        })
    }

    /// Closes `equations` under suffix extension over all words up to
    /// `max_word_len` and fixes the shortlex-least member of each class.
    pub fn finite(
        alphabet: impl IntoIterator<Item = Label>,
        equations: Vec<(Word, Word)>,
        max_word_len: usize,
    ) -> Result<Self, DomainError> {
        let alphabet: BTreeSet<Label> = alphabet.into_iter().collect();
        let letters: Vec<Label> = alphabet.iter().cloned().collect();

        let mut count = 0usize;
        let mut layer = 1usize;
        for _ in 0..=max_word_len {
            count = count.saturating_add(layer);
            layer = layer.saturating_mul(letters.len().max(1));
        }
        if count > MAX_ENUMERATED_WORDS {
            return Err(DomainError::TooLarge { words: count });
        }

        let mut words = vec![Word::eps()];
        let mut start = 0;
        for _ in 0..max_word_len {
            let end = words.len();
            for i in start..end {
                for a in &letters {
                    words.push(words[i].append(a));
                }
            }
            start = end;
        }
        let index: HashMap<Word, usize> = words
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, w)| (w, i))
            .collect();
        let child: Vec<Vec<Option<usize>>> = words
            .iter()
            .map(|w| {
                letters
                    .iter()
                    .map(|a| index.get(&w.append(a)).copied())
                    .collect()
            })
            .collect();

        let mut uf = UnionFind::new(words.len());
        for (l, r) in &equations {
            for w in [l, r] {
                check_letters(&alphabet, w)?;
                if w.len() > max_word_len {
                    return Err(DomainError::WordTooLong {
                        word: w.clone(),
                        max: max_word_len,
                    });
                }
            }
            uf.union(index[l], index[r]);
        }
        let mut changed = true;
        while changed {
            changed = false;
            for i in 0..words.len() {
                let r = uf.find(i);
                if r == i {
                    continue;
                }
                for (&ci, &cr) in child[i].iter().zip(&child[r]) {
                    if let (Some(ci), Some(cr)) = (ci, cr) {
                        changed |= uf.union(ci, cr);
                    }
                }
            }
        }
        let canon = (0..words.len())
            .map(|i| (words[i].clone(), words[uf.find(i)].clone()))
            .collect();
        Ok(TickingDomain {
            alphabet,
            kind: DomainKind::FiniteEquations {
                equations,
                max_word_len,
            },
            inner: Inner::Finite(canon),
        })
    }

    pub fn alphabet(&self) -> &BTreeSet<Label> {
        &self.alphabet
    }

    pub fn kind(&self) -> &DomainKind {
        &self.kind
    }

    /// Word-length bound of a finite-equation domain.
    pub fn max_word_len(&self) -> Option<usize> {
        match &self.kind {
            DomainKind::FiniteEquations { max_word_len, .. } => Some(*max_word_len),
            _ => None,
        }
    }

    /// The shortlex-least member of the class of `w`.
    pub fn canonical(&self, w: &Word) -> Result<Word, DomainError> {
        check_letters(&self.alphabet, w)?;
        match &self.inner {
            Inner::Free => Ok(w.clone()),
            Inner::Finite(canon) => canon
                .get(w)
                .cloned()
                .ok_or_else(|| DomainError::WordTooLong {
                    word: w.clone(),
                    max: self.max_word_len().unwrap_or(0),
                }),
            Inner::Trellis(dfa) => {
                let target = dfa.run(w).ok_or_else(|| DomainError::NotARun(w.clone()))?;
                Ok(dfa.least_run(w.len(), target))
            }
        }
    }

    pub fn same_class(&self, u: &Word, v: &Word) -> Result<bool, DomainError> {
        Ok(self.canonical(u)? == self.canonical(v)?)
    }

    /// Length and final place of a run in a trellis domain.
    pub fn trellis_class(&self, w: &Word) -> Result<Option<(usize, PlaceId)>, DomainError> {
        check_letters(&self.alphabet, w)?;
        match &self.inner {
            Inner::Trellis(dfa) => {
                let q = dfa.run(w).ok_or_else(|| DomainError::NotARun(w.clone()))?;
                Ok(Some((w.len(), dfa.states[q].clone())))
            }
            _ => Ok(None),
        }
    }

    /// Every word up to `len` over the alphabet, in shortlex order.
    pub fn words_up_to(&self, len: usize) -> Vec<Word> {
        let mut words = vec![Word::eps()];
        let mut start = 0;
        for _ in 0..len {
            let end = words.len();
            for i in start..end {
                for a in &self.alphabet {
                    words.push(words[i].append(a));
                }
            }
            start = end;
        }
        words
    }

    /// Classes of a finite-equation domain, keyed by representative.
    pub fn classes(&self) -> Option<BTreeMap<Word, BTreeSet<Word>>> {
        match &self.inner {
            Inner::Finite(canon) => {
                let mut out: BTreeMap<Word, BTreeSet<Word>> = BTreeMap::new();
                for (w, r) in canon {
                    out.entry(r.clone()).or_default().insert(w.clone());
                }
                Some(out)
            }
            _ => None,
        }
    }

    /// Text form that [`TickingDomain::parse_word`] reads back: letters are
    /// joined by `.` whenever some letter of the alphabet is longer than one
    /// character.
    pub fn render_word(&self, w: &Word) -> String {
        if self
            .alphabet
            .iter()
            .all(|a| a.as_str().chars().count() == 1)
        {
            w.to_text()
        } else {
            w.letters()
                .iter()
                .map(Label::as_str)
                .collect::<Vec<_>>()
                .join(".")
        }
    }

    /// Parses a word written by [`TickingDomain::render_word`].
    pub fn parse_word(&self, s: &str) -> Result<Word, DomainError> {
        let w = if s.is_empty() {
            Word::eps()
        } else if s.contains('.') {
            Word(s.split('.').map(Label::from).collect())
        } else if self.alphabet.contains(s) && s.chars().count() > 1 {
            Word(vec![Label::from(s)])
        } else {
            Word::from_chars(s)
        };
        check_letters(&self.alphabet, &w)?;
        Ok(w)
    }
}

fn check_letters(alphabet: &BTreeSet<Label>, w: &Word) -> Result<(), DomainError> {
    match w.letters().iter().find(|a| !alphabet.contains(*a)) {
        Some(a) => Err(DomainError::LetterOutsideAlphabet(a.clone())),
        None => Ok(()),
    }
}

impl Dfa {
    fn run(&self, w: &Word) -> Option<usize> {
        let mut q = self.init;
        for a in w.letters() {
            q = *self.delta[q].get(a)?;
        }
        Some(q)
    }

    /// Lexicographically least run of length `n` from the initial state to `target`.
    fn least_run(&self, n: usize, target: usize) -> Word {
        let mut back = vec![BTreeSet::from([target])];
        for k in 0..n {
            let next: BTreeSet<usize> = (0..self.states.len())
                .filter(|&s| self.delta[s].values().any(|q| back[k].contains(q)))
                .collect();
            back.push(next);
        }
        let mut q = self.init;
        let mut letters = Vec::with_capacity(n);
        for i in 0..n {
            let rem = n - i - 1;
            let (a, next) = self.delta[q]
                .iter()
                .find(|(_, r)| back[rem].contains(*r))
                .expect("a run of this length exists");
            letters.push(a.clone());
            q = *next;
        }
        Word(letters)
    }
}

/// Union-find whose roots are always the least index of their class.
struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut i: usize) -> usize {
        let mut root = i;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[i] != root {
            let next = self.parent[i];
            self.parent[i] = root;
            i = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}
