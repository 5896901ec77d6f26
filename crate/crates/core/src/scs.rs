//! Shortest common supersequences.
//!
//! [`exact_scs`] runs a shortest-path dynamic program over the lattice of
//! position vectors (one coordinate per input string). A move emits one
//! symbol and advances every string whose next symbol it is. Among all
//! shortest supersequences the lexicographically smallest one is returned,
//! where symbols compare by their `Ord` order.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// Default cap on the number of lattice states.
pub const DEFAULT_STATE_BUDGET: usize = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScsMode {
    Exact,
    /// Majority merge. Always a common supersequence, not always shortest.
    Heuristic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScsOptions {
    pub mode: ScsMode,
    pub state_budget: usize,
}

impl Default for ScsOptions {
    fn default() -> Self {
        ScsOptions {
            mode: ScsMode::Exact,
            state_budget: DEFAULT_STATE_BUDGET,
        }
    }
}

impl ScsOptions {
    pub fn solve<S: Ord + Clone>(&self, strings: &[Vec<S>]) -> Result<Vec<S>> {
        match self.mode {
            ScsMode::Exact => exact_scs_with_budget(strings, self.state_budget),
            ScsMode::Heuristic => Ok(majority_merge(strings)),
        }
    }
}

/// True iff `sub` can be obtained from `sup` by deleting symbols.
pub fn is_supersequence<S: PartialEq>(sup: &[S], sub: &[S]) -> bool {
    let mut it = sup.iter();
    sub.iter().all(|s| it.any(|x| x == s))
}

pub fn is_common_supersequence<S: PartialEq>(sup: &[S], strings: &[Vec<S>]) -> bool {
    strings.iter().all(|s| is_supersequence(sup, s))
}

/// Dense symbol indices in `Ord` order.
struct Encoded<S> {
    alphabet: Vec<S>,
    strings: Vec<Vec<usize>>,
}

fn encode<S: Ord + Clone>(strings: &[Vec<S>]) -> Encoded<S> {
    let alphabet: Vec<S> = strings
        .iter()
        .flatten()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let strings = strings
        .iter()
        .map(|s| {
            s.iter()
                .map(|x| alphabet.binary_search(x).expect("symbol collected above"))
                .collect()
        })
        .collect();
    Encoded { alphabet, strings }
}

struct Lattice {
    strings: Vec<Vec<usize>>,
    strides: Vec<usize>,
    /// Remaining SCS length from each state.
    dist: Vec<u32>,
}

impl Lattice {
    fn build(strings: Vec<Vec<usize>>, budget: usize) -> Result<Self> {
        let mut strides = Vec::with_capacity(strings.len());
        let mut total: usize = 1;
        for s in &strings {
            strides.push(total);
            total = total
                .checked_mul(s.len() + 1)
                .filter(|&t| t <= budget)
                .ok_or_else(|| {
                    Error::Capacity(format!(
                        "exact SCS needs more than {budget} lattice states; use heuristic mode"
                    ))
                })?;
        }
        let mut lattice = Lattice {
            strings,
            strides,
            dist: vec![0; total],
        };
        let mut pos = vec![0usize; lattice.strings.len()];
        for idx in (0..total - 1).rev() {
            lattice.decode(idx, &mut pos);
            let mut best = u32::MAX;
            for c in lattice.heads(&pos) {
                let next = lattice.advance(idx, &pos, c);
                best = best.min(lattice.dist[next]);
            }
            lattice.dist[idx] = best + 1;
        }
        Ok(lattice)
    }

    fn decode(&self, mut idx: usize, pos: &mut [usize]) {
        for (i, s) in self.strings.iter().enumerate() {
            pos[i] = idx % (s.len() + 1);
            idx /= s.len() + 1;
        }
    }

    /// Distinct next symbols of unfinished strings, ascending.
    fn heads(&self, pos: &[usize]) -> Vec<usize> {
        let mut h: Vec<usize> = self
            .strings
            .iter()
            .zip(pos)
            .filter_map(|(s, &p)| s.get(p).copied())
            .collect();
        h.sort_unstable();
        h.dedup();
        h
    }

    fn advance(&self, idx: usize, pos: &[usize], c: usize) -> usize {
        let mut next = idx;
        for (i, s) in self.strings.iter().enumerate() {
            if s.get(pos[i]) == Some(&c) {
                next += self.strides[i];
            }
        }
        next
    }

    fn walk(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.dist[0] as usize);
        let mut pos = vec![0usize; self.strings.len()];
        let mut idx = 0;
        while self.dist[idx] > 0 {
            self.decode(idx, &mut pos);
            let c = self
                .heads(&pos)
                .into_iter()
                .find(|&c| self.dist[self.advance(idx, &pos, c)] + 1 == self.dist[idx])
                .expect("some move realizes the distance");
            idx = self.advance(idx, &pos, c);
            out.push(c);
        }
        out
    }
}

/// Lexicographically smallest shortest common supersequence.
pub fn exact_scs<S: Ord + Clone>(strings: &[Vec<S>]) -> Result<Vec<S>> {
    exact_scs_with_budget(strings, DEFAULT_STATE_BUDGET)
}

pub fn exact_scs_with_budget<S: Ord + Clone>(strings: &[Vec<S>], budget: usize) -> Result<Vec<S>> {
    let enc = encode(strings);
    let lattice = Lattice::build(enc.strings, budget)?;
    Ok(lattice
        .walk()
        .into_iter()
        .map(|c| enc.alphabet[c].clone())
        .collect())
}

pub fn scs_length<S: Ord + Clone>(strings: &[Vec<S>]) -> Result<usize> {
    scs_length_with_budget(strings, DEFAULT_STATE_BUDGET)
}

pub fn scs_length_with_budget<S: Ord + Clone>(strings: &[Vec<S>], budget: usize) -> Result<usize> {
    let enc = encode(strings);
    Ok(Lattice::build(enc.strings, budget)?.dist[0] as usize)
}

/// Greedy majority merge: emit the symbol heading the most remaining
/// strings (smallest symbol on ties) and consume it from each of them.
pub fn majority_merge<S: Ord + Clone>(strings: &[Vec<S>]) -> Vec<S> {
    let enc = encode(strings);
    let mut pos = vec![0usize; enc.strings.len()];
    let mut counts = vec![0usize; enc.alphabet.len()];
    let mut out = Vec::new();
    loop {
        counts.iter_mut().for_each(|c| *c = 0);
        let mut any = false;
        for (s, &p) in enc.strings.iter().zip(&pos) {
            if let Some(&c) = s.get(p) {
                counts[c] += 1;
                any = true;
            }
        }
        if !any {
            break;
        }
        // max_by_key keeps the last maximum; iterate in reverse for the first
        let best = (0..counts.len())
            .rev()
            .max_by_key(|&c| counts[c])
            .expect("non-empty alphabet");
        for (s, p) in enc.strings.iter().zip(pos.iter_mut()) {
            if s.get(*p) == Some(&best) {
                *p += 1;
            }
        }
        out.push(enc.alphabet[best].clone());
    }
    out
}

/// Brute-force reference: the first common supersequence in the order of
/// increasing length, then lexicographic order, or `None` if none has
/// length at most `max_len`.
///
/// Candidates are enumerated depth-first. A symbol that heads no unfinished
/// string is never tried, since deleting it from a common supersequence
/// leaves a shorter one. Meant for alphabets of at most six symbols.
pub fn exhaustive_scs_oracle<S: Ord + Clone>(strings: &[Vec<S>], max_len: usize) -> Option<Vec<S>> {
    fn search(
        strings: &[Vec<usize>],
        alphabet_len: usize,
        prefix: &mut Vec<usize>,
        pos: &mut Vec<usize>,
        budget: usize,
    ) -> bool {
        let remaining = strings
            .iter()
            .zip(pos.iter())
            .map(|(s, &p)| s.len() - p)
            .max()
            .unwrap_or(0);
        if remaining == 0 {
            return true;
        }
        if remaining > budget {
            return false;
        }
        for c in 0..alphabet_len {
            let saved = pos.clone();
            let mut useful = false;
            for (s, p) in strings.iter().zip(pos.iter_mut()) {
                if s.get(*p) == Some(&c) {
                    *p += 1;
                    useful = true;
                }
            }
            if useful {
                prefix.push(c);
                if search(strings, alphabet_len, prefix, pos, budget - 1) {
                    return true;
                }
                prefix.pop();
            }
            *pos = saved;
        }
        false
    }

    let enc = encode(strings);
    for len in 0..=max_len {
        let mut prefix = Vec::new();
        let mut pos = vec![0; enc.strings.len()];
        if search(&enc.strings, enc.alphabet.len(), &mut prefix, &mut pos, len) {
            return Some(prefix.into_iter().map(|c| enc.alphabet[c].clone()).collect());
        }
    }
    None
}
