use crate::error::{arg_err, HeisError, Result};

/// Largest sector dimension any builder will enumerate.
pub const MAX_SECTOR_DIM: usize = 4_000_000;

/// Binomial coefficient, `None` on overflow. `C(n, k) = 0` for `k > n`.
pub fn binomial(n: usize, k: usize) -> Option<usize> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return None;
        }
    }
    Some(acc as usize)
}

/// Ranked enumeration of the `n`-element subsets of `{0..v-1}`.
///
/// Subsets are sorted ascending and ranked colexicographically:
/// `rank(x_0 < x_1 < ...) = sum_i C(x_i, i + 1)`.
#[derive(Clone, Debug)]
pub struct MagnonBasis {
    n: usize,
    v: usize,
    dim: usize,
    // table[k][x] = C(x, k)
    table: Vec<Vec<usize>>,
}

impl MagnonBasis {
    pub fn new(v: usize, n: usize) -> Result<Self> {
        if n > v {
            return arg_err(format!("magnon number {n} exceeds the vertex count {v}"));
        }
        let dim = binomial(v, n)
            .filter(|&d| d <= MAX_SECTOR_DIM)
            .ok_or_else(|| HeisError::Size(format!("sector C({v},{n}) exceeds {MAX_SECTOR_DIM} states")))?;
        let table = (0..=n)
            .map(|k| (0..=v).map(|x| binomial(x, k).unwrap_or(usize::MAX)).collect())
            .collect();
        Ok(MagnonBasis { n, v, dim, table })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertex_count(&self) -> usize {
        self.v
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Rank of a strictly increasing subset.
    pub fn rank(&self, subset: &[usize]) -> usize {
        debug_assert_eq!(subset.len(), self.n);
        debug_assert!(subset.windows(2).all(|w| w[0] < w[1]));
        subset.iter().enumerate().map(|(i, &x)| self.table[i + 1][x]).sum()
    }

    /// Rank of an arbitrary-order set of distinct vertices.
    pub fn rank_unsorted(&self, subset: &[usize]) -> usize {
        let mut s = subset.to_vec();
        s.sort_unstable();
        self.rank(&s)
    }

    pub fn unrank(&self, mut r: usize) -> Vec<usize> {
        let mut out = vec![0; self.n];
        let mut hi = self.v;
        for k in (1..=self.n).rev() {
            // largest x < hi with C(x, k) <= r
            let row = &self.table[k];
            let x = row[..hi].partition_point(|&c| c <= r) - 1;
            out[k - 1] = x;
            r -= row[x];
            hi = x;
        }
        out
    }

    /// All subsets in rank order.
    pub fn subsets(&self) -> SubsetIter {
        SubsetIter { current: (0..self.n).collect(), v: self.v, remaining: self.dim }
    }
}

/// Colexicographic successor iteration over fixed-size subsets.
pub struct SubsetIter {
    current: Vec<usize>,
    v: usize,
    remaining: usize,
}

impl Iterator for SubsetIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let out = self.current.clone();
        let n = self.current.len();
        let mut i = 0;
        while i < n {
            let limit = if i + 1 < n { self.current[i + 1] } else { self.v };
            if self.current[i] + 1 < limit {
                self.current[i] += 1;
                for (j, c) in self.current[..i].iter_mut().enumerate() {
                    *c = j;
                }
                break;
            }
            i += 1;
        }
        Some(out)
    }
}
