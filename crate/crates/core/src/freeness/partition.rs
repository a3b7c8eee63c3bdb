use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Default largest `n` accepted by [`enumerate_nc`]; `|NC(12)| = 208012`.
pub const DEFAULT_NC_CAP: usize = 12;

/// A non-crossing partition of `{0, …, n−1}`; blocks sorted, listed by least element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NCPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl NCPartition {
    /// Validates and normalizes a partition given as a list of blocks.
    pub fn new(n: usize, mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        for b in &mut blocks {
            if b.is_empty() {
                return Err(Error::Structural("empty block".into()));
            }
            b.sort_unstable();
            for &i in b.iter() {
                if i >= n || seen[i] {
                    return Err(Error::Structural("blocks must partition 0..n".into()));
                }
                seen[i] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Structural("blocks must cover 0..n".into()));
        }
        blocks.sort();
        let p = NCPartition { n, blocks };
        if !p.is_noncrossing() {
            return Err(Error::Structural("partition is crossing".into()));
        }
        Ok(p)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// No `a < b < c < d` with `a, c` in one block and `b, d` in another.
    pub fn is_noncrossing(&self) -> bool {
        let mut label = vec![0usize; self.n];
        for (k, b) in self.blocks.iter().enumerate() {
            for &i in b {
                label[i] = k;
            }
        }
        for a in 0..self.n {
            for b in a + 1..self.n {
                if label[b] == label[a] {
                    continue;
                }
                for c in b + 1..self.n {
                    if label[c] != label[a] {
                        continue;
                    }
                    if (c + 1..self.n).any(|d| label[d] == label[b]) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

pub fn catalan(n: usize) -> u64 {
    let mut c: u64 = 1;
    for k in 0..n as u64 {
        c = c * 2 * (2 * k + 1) / (k + 2);
    }
    c
}

/// All non-crossing partitions of `n` points (`1 ≤ n ≤ 12`), in a fixed order.
pub fn enumerate_nc(n: usize) -> Result<Arc<Vec<NCPartition>>> {
    enumerate_nc_capped(n, DEFAULT_NC_CAP)
}

pub fn enumerate_nc_capped(n: usize, cap: usize) -> Result<Arc<Vec<NCPartition>>> {
    if n == 0 {
        return Err(Error::Domain("NC(n) needs n ≥ 1".into()));
    }
    if n > cap {
        return Err(Error::Resource { what: "non-crossing partition size", requested: n, cap });
    }
    #[cfg(feature = "std")]
    {
        use std::collections::BTreeMap;
        use std::sync::{OnceLock, RwLock};
        static CACHE: OnceLock<RwLock<BTreeMap<usize, Arc<Vec<NCPartition>>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| RwLock::new(BTreeMap::new()));
        if let Some(hit) = cache.read().ok().and_then(|m| m.get(&n).cloned()) {
            return Ok(hit);
        }
        let built = Arc::new(build(n));
        if let Ok(mut m) = cache.write() {
            m.entry(n).or_insert_with(|| built.clone());
        }
        Ok(built)
    }
    #[cfg(not(feature = "std"))]
    {
        Ok(Arc::new(build(n)))
    }
}

fn build(n: usize) -> Vec<NCPartition> {
    gen_interval(0, n)
        .into_iter()
        .map(|mut blocks| {
            blocks.sort();
            NCPartition { n, blocks }
        })
        .collect()
}

/// NC partitions of the interval `[lo, hi)`: choose the block of `lo`, then
/// fill each gap independently.
fn gen_interval(lo: usize, hi: usize) -> Vec<Vec<Vec<usize>>> {
    if lo >= hi {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut stack: Vec<Vec<usize>> = vec![vec![lo]];
    while let Some(block) = stack.pop() {
        let last = *block.last().expect("nonempty");
        // Close the block here: gaps between consecutive elements, then the tail.
        let mut pieces: Vec<Vec<Vec<Vec<usize>>>> = vec![vec![vec![block.clone()]]];
        for w in block.windows(2) {
            pieces.push(gen_interval(w[0] + 1, w[1]));
        }
        pieces.push(gen_interval(last + 1, hi));
        let mut combos: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
        for choices in &pieces {
            let mut next = Vec::with_capacity(combos.len() * choices.len());
            for c in &combos {
                for ch in choices {
                    let mut v = c.clone();
                    v.extend(ch.iter().cloned());
                    next.push(v);
                }
            }
            combos = next;
        }
        out.extend(combos);
        for nxt in (last + 1..hi).rev() {
            let mut b = block.clone();
            b.push(nxt);
            stack.push(b);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalan_counts() {
        assert_eq!(enumerate_nc(1).unwrap().len(), 1);
        assert_eq!(enumerate_nc(3).unwrap().len(), 5);
        assert_eq!(enumerate_nc(4).unwrap().len(), 14);
        for n in 1..=10 {
            assert_eq!(enumerate_nc(n).unwrap().len() as u64, catalan(n), "n = {n}");
        }
    }

    #[test]
    fn all_enumerated_are_distinct_and_noncrossing() {
        let parts = enumerate_nc(6).unwrap();
        assert!(parts.iter().all(NCPartition::is_noncrossing));
        let mut sorted: Vec<_> = parts.iter().cloned().collect();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), parts.len());
    }

    #[test]
    fn crossing_is_rejected() {
        assert!(NCPartition::new(4, vec![vec![0, 2], vec![1, 3]]).is_err());
        assert!(NCPartition::new(4, vec![vec![0, 3], vec![1, 2]]).is_ok());
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(enumerate_nc(13), Err(Error::Resource { requested: 13, cap: 12, .. })));
        assert_eq!(enumerate_nc_capped(3, 2).unwrap_err(), Error::Resource { what: "non-crossing partition size", requested: 3, cap: 2 });
    }
}
