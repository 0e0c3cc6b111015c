//! Dyck words, strict Dyck words and marked Dyck words.

use std::fmt;

use super::graph::{cycle_decomposition, quotient_graph};
use super::partition::SetPartition;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Step {
    Up,
    MarkedUp,
    Down,
}

/// A word over `{U, U′, D}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MarkedDyckWord {
    steps: Vec<Step>,
}

impl MarkedDyckWord {
    pub fn new(steps: Vec<Step>) -> Self {
        Self { steps }
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn marks(&self) -> usize {
        self.steps.iter().filter(|&&s| s == Step::MarkedUp).count()
    }

    /// Unmarked word is a Dyck word and no marked up-step starts at height 0.
    pub fn is_valid(&self) -> bool {
        let mut h: i64 = 0;
        for &s in &self.steps {
            match s {
                Step::Up => h += 1,
                Step::MarkedUp => {
                    if h == 0 {
                        return false;
                    }
                    h += 1;
                }
                Step::Down => {
                    h -= 1;
                    if h < 0 {
                        return false;
                    }
                }
            }
        }
        h == 0
    }
}

impl fmt::Display for MarkedDyckWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            f.write_str(match s {
                Step::Up => "U",
                Step::MarkedUp => "U'",
                Step::Down => "D",
            })?;
        }
        Ok(())
    }
}

/// All Dyck words of semi-length `s`, lexicographic with `U < D`.
pub fn dyck_words(s: usize) -> Vec<Vec<Step>> {
    fn go(up: usize, down: usize, cur: &mut Vec<Step>, out: &mut Vec<Vec<Step>>) {
        if up == 0 && down == 0 {
            out.push(cur.clone());
            return;
        }
        if up > 0 {
            cur.push(Step::Up);
            go(up - 1, down, cur, out);
            cur.pop();
        }
        if down > up {
            cur.push(Step::Down);
            go(up, down - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(s, s, &mut Vec::with_capacity(2 * s), &mut out);
    out
}

/// Dyck words of semi-length `s >= 1` that touch height 0 only at the ends.
pub fn strict_dyck_words(s: usize) -> Vec<Vec<Step>> {
    if s == 0 {
        return Vec::new();
    }
    dyck_words(s - 1)
        .into_iter()
        .map(|inner| {
            let mut w = Vec::with_capacity(2 * s);
            w.push(Step::Up);
            w.extend(inner);
            w.push(Step::Down);
            w
        })
        .collect()
}

/// `MD(k, t)`: marked Dyck words of length `k` with `t - k/2 - 1` marked
/// up-steps, none starting at height 0. Empty for odd `k` or `t` outside
/// `k/2+1..=k`.
pub fn enumerate_marked_dyck(k: usize, t: usize) -> Vec<MarkedDyckWord> {
    if k % 2 == 1 || t < k / 2 + 1 || t > k {
        return Vec::new();
    }
    let marks = t - k / 2 - 1;

    fn go(
        remaining: usize,
        height: usize,
        marks_left: usize,
        cur: &mut Vec<Step>,
        out: &mut Vec<MarkedDyckWord>,
    ) {
        if remaining == 0 {
            if height == 0 && marks_left == 0 {
                out.push(MarkedDyckWord::new(cur.clone()));
            }
            return;
        }
        // need `height` downs to finish
        if height + 1 <= remaining - 1 {
            cur.push(Step::Up);
            go(remaining - 1, height + 1, marks_left, cur, out);
            cur.pop();
            if height > 0 && marks_left > 0 {
                cur.push(Step::MarkedUp);
                go(remaining - 1, height + 1, marks_left - 1, cur, out);
                cur.pop();
            }
        }
        if height > 0 {
            cur.push(Step::Down);
            go(remaining - 1, height - 1, marks_left, cur, out);
            cur.pop();
        }
    }

    let mut out = Vec::new();
    go(k, 0, marks, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Edge sets of the simple even cycles of `G_π` when `π ∈ EC(k, t)`.
pub fn even_cactus_cycles(pi: &SetPartition) -> Option<Vec<Vec<usize>>> {
    if pi.has_loop() || pi.is_crossing() {
        return None;
    }
    let dec = cycle_decomposition(&quotient_graph(pi)).ok()?;
    if !dec.is_cactus || dec.components.iter().any(|c| c.len() % 2 == 1) {
        return None;
    }
    Some(dec.components)
}

/// `MD(π)`: each simple cycle of `G_π` (edges in index order) receives a
/// strict Dyck word with every up-step after the first marked.
pub fn md_of_partition(pi: &SetPartition) -> Result<Vec<MarkedDyckWord>> {
    let cycles = even_cactus_cycles(pi).ok_or_else(|| Error::NotEvenCactus(pi.to_string()))?;
    let options: Vec<Vec<Vec<Step>>> = cycles
        .iter()
        .map(|c| {
            strict_dyck_words(c.len() / 2)
                .into_iter()
                .map(|mut w| {
                    for s in w.iter_mut().skip(1) {
                        if *s == Step::Up {
                            *s = Step::MarkedUp;
                        }
                    }
                    w
                })
                .collect()
        })
        .collect();

    let k = pi.k();
    let mut out = Vec::new();
    let mut choice = vec![0usize; cycles.len()];
    loop {
        let mut word = vec![Step::Down; k];
        for (ci, cycle) in cycles.iter().enumerate() {
            let w = &options[ci][choice[ci]];
            for (pos, &edge) in cycle.iter().enumerate() {
                word[edge] = w[pos];
            }
        }
        out.push(MarkedDyckWord::new(word));
        // odometer over the per-cycle choices
        let mut i = 0;
        loop {
            if i == cycles.len() {
                return Ok(out);
            }
            choice[i] += 1;
            if choice[i] < options[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}
