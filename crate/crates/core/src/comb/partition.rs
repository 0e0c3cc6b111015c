//! Set partitions of `{0, …, k-1}` as restricted growth strings.

use std::fmt;

use crate::error::{invalid, Result};

/// A partition of `k` positions into `t` blocks.
///
/// `assignment[i]` is the block id of position `i`; ids are `0..t` and appear
/// for the first time in increasing order (restricted growth string), so
/// every partition has exactly one representation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    assignment: Vec<u8>,
    t: usize,
}

impl SetPartition {
    /// Validates a restricted growth string.
    pub fn from_rgs(assignment: Vec<u8>) -> Result<Self> {
        let mut next = 0u8;
        for (i, &b) in assignment.iter().enumerate() {
            if b > next {
                return Err(invalid(format!(
                    "position {i}: block id {b} skips ahead of {next}"
                )));
            }
            if b == next {
                next = next
                    .checked_add(1)
                    .ok_or_else(|| invalid("more than 255 blocks"))?;
            }
        }
        Ok(Self {
            t: next as usize,
            assignment,
        })
    }

    /// Builds the canonical form of an arbitrary labelling of positions.
    pub fn from_labels<T: PartialEq + Copy>(labels: &[T]) -> Self {
        let mut seen: Vec<T> = Vec::new();
        let assignment = labels
            .iter()
            .map(|l| match seen.iter().position(|s| s == l) {
                Some(id) => id as u8,
                None => {
                    seen.push(*l);
                    (seen.len() - 1) as u8
                }
            })
            .collect();
        Self {
            assignment,
            t: seen.len(),
        }
    }

    /// Builds a partition of `0..k` from explicit blocks (0-based positions).
    pub fn from_blocks(k: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut labels = vec![usize::MAX; k];
        for (id, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(invalid("empty block"));
            }
            for &x in block {
                if x >= k {
                    return Err(invalid(format!("position {x} outside 0..{k}")));
                }
                if labels[x] != usize::MAX {
                    return Err(invalid(format!("position {x} appears in two blocks")));
                }
                labels[x] = id;
            }
        }
        if let Some(x) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(invalid(format!("position {x} is not covered")));
        }
        Ok(Self::from_labels(&labels))
    }

    pub fn k(&self) -> usize {
        self.assignment.len()
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn assignment(&self) -> &[u8] {
        &self.assignment
    }

    #[inline]
    pub fn block_of(&self, i: usize) -> usize {
        self.assignment[i] as usize
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.t];
        for (i, &b) in self.assignment.iter().enumerate() {
            out[b as usize].push(i);
        }
        out
    }

    /// True if some cyclically adjacent positions share a block, i.e. the
    /// quotient graph has a loop.
    pub fn has_loop(&self) -> bool {
        let k = self.k();
        (0..k).any(|j| self.assignment[j] == self.assignment[(j + 1) % k])
    }

    /// True iff blocks `A ≠ B` interleave as `a1 < b1 < a2 < b2`.
    pub fn is_crossing(&self) -> bool {
        let k = self.k();
        let mut last = vec![0usize; self.t];
        for (i, &b) in self.assignment.iter().enumerate() {
            last[b as usize] = i;
        }
        let mut seen = vec![false; self.t];
        // stack of blocks that are open: seen and with a later occurrence
        let mut open: Vec<usize> = Vec::with_capacity(self.t);
        for i in 0..k {
            let b = self.block_of(i);
            if seen[b] {
                if open.last() != Some(&b) {
                    return true;
                }
                if last[b] == i {
                    open.pop();
                }
            } else {
                seen[b] = true;
                if last[b] != i {
                    open.push(b);
                }
            }
        }
        false
    }

    /// The partition `π'` with `π'(i) = π(i - shift)` (indices mod `k`).
    pub fn rotate(&self, shift: usize) -> Self {
        let k = self.k();
        let labels: Vec<u8> = (0..k)
            .map(|i| self.assignment[(i + k - shift % k) % k])
            .collect();
        Self::from_labels(&labels)
    }

    /// Merges blocks according to `grouping`, which maps each block id of
    /// `self` to a group label.
    pub fn coarsen(&self, grouping: &[u8]) -> Self {
        debug_assert_eq!(grouping.len(), self.t);
        let labels: Vec<u8> = self
            .assignment
            .iter()
            .map(|&b| grouping[b as usize])
            .collect();
        Self::from_labels(&labels)
    }
}

impl fmt::Display for SetPartition {
    /// Blocks with 1-based positions, e.g. `{1,3}{2,4}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for block in self.blocks() {
            write!(f, "{{")?;
            for (i, x) in block.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", x + 1)?;
            }
            write!(f, "}}")?;
        }
        Ok(())
    }
}

/// Lexicographic stream of restricted growth strings of length `k` with
/// exactly `t` distinct values.
#[derive(Debug, Clone)]
pub struct Partitions {
    current: Vec<u8>,
    t: usize,
    done: bool,
}

impl Partitions {
    fn new(k: usize, t: usize) -> Self {
        if t == 0 || t > k || t > 255 {
            return Self {
                current: Vec::new(),
                t,
                done: true,
            };
        }
        let mut current = vec![0u8; k];
        fill_suffix(&mut current, 0, 0, t);
        Self {
            current,
            t,
            done: false,
        }
    }

    fn advance(&mut self) -> bool {
        let k = self.current.len();
        let t = self.t;
        let mut prefix_max = vec![0u8; k];
        let mut m = 0u8;
        for i in 0..k {
            prefix_max[i] = m;
            m = m.max(self.current[i]);
        }
        for i in (1..k).rev() {
            let cand = self.current[i] as usize + 1;
            let pm = prefix_max[i] as usize;
            if cand > pm + 1 || cand > t - 1 {
                continue;
            }
            let new_max = pm.max(cand);
            if t - 1 - new_max > k - 1 - i {
                continue;
            }
            self.current[i] = cand as u8;
            fill_suffix(&mut self.current, i + 1, new_max, t);
            return true;
        }
        false
    }
}

/// Smallest completion of `rgs[..from]` (whose max is `max`) reaching `t`
/// blocks: zeros, then the missing ids in increasing order at the end.
fn fill_suffix(rgs: &mut [u8], from: usize, max: usize, t: usize) {
    let k = rgs.len();
    let missing = if from == 0 { t } else { t - 1 - max };
    let zeros_end = k - missing;
    for slot in rgs.iter_mut().take(zeros_end).skip(from) {
        *slot = 0;
    }
    let start = if from == 0 { 0 } else { max + 1 };
    for (offset, slot) in rgs[zeros_end..].iter_mut().enumerate() {
        *slot = (start + offset) as u8;
    }
}

impl Iterator for Partitions {
    type Item = SetPartition;

    fn next(&mut self) -> Option<SetPartition> {
        if self.done {
            return None;
        }
        let out = SetPartition {
            assignment: self.current.clone(),
            t: self.t,
        };
        if !self.advance() {
            self.done = true;
        }
        Some(out)
    }
}

/// Every partition of `0..k` into exactly `t` blocks, in lexicographic
/// restricted-growth order.
pub fn enumerate_partitions(k: usize, t: usize) -> Partitions {
    Partitions::new(k, t)
}

/// Every partition of `0..k`, grouped by number of blocks.
pub fn all_partitions(k: usize) -> impl Iterator<Item = SetPartition> {
    (1..=k).flat_map(move |t| enumerate_partitions(k, t))
}
