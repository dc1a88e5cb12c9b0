//! Small `F_2` linear algebra on bit vectors.

/// Row-echelon basis of a subspace of `F_2^128`, rows with distinct leading bits.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct F2Echelon {
    rows: Vec<u128>,
}

fn lead(v: u128) -> u32 {
    127 - v.leading_zeros()
}

impl F2Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn spanned_by(vs: impl IntoIterator<Item = u128>) -> Self {
        let mut e = Self::new();
        for v in vs {
            e.insert(v);
        }
        e
    }

    /// Reduction modulo the span; linear in `v`, zero exactly on the span.
    pub fn reduce(&self, mut v: u128) -> u128 {
        for &r in &self.rows {
            if v >> lead(r) & 1 == 1 {
                v ^= r;
            }
        }
        v
    }

    pub fn insert(&mut self, v: u128) -> bool {
        let v = self.reduce(v);
        if v == 0 {
            return false;
        }
        let pos = self.rows.partition_point(|&r| lead(r) > lead(v));
        self.rows.insert(pos, v);
        true
    }

    pub fn contains(&self, v: u128) -> bool {
        self.reduce(v) == 0
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[u128] {
        &self.rows
    }

    /// All `2^dim` elements, sorted.
    pub fn elements(&self) -> Vec<u128> {
        let mut out = vec![0u128];
        for &r in &self.rows {
            let n = out.len();
            for i in 0..n {
                out.push(out[i] ^ r);
            }
        }
        out.sort_unstable();
        out
    }
}

/// Basis of `{x in F_2^n : sum_j x_j cols[j] = 0}`, `n = cols.len() <= 64`.
pub fn kernel(cols: &[u128]) -> Vec<u64> {
    assert!(cols.len() <= 64);
    let mut pivots: Vec<(u128, u64)> = Vec::new();
    let mut out = Vec::new();
    for (j, &c) in cols.iter().enumerate() {
        let mut v = c;
        let mut combo = 1u64 << j;
        for &(r, rc) in &pivots {
            if v >> lead(r) & 1 == 1 {
                v ^= r;
                combo ^= rc;
            }
        }
        if v == 0 {
            out.push(combo);
        } else {
            let pos = pivots.partition_point(|&(r, _)| lead(r) > lead(v));
            pivots.insert(pos, (v, combo));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_matches_brute_force() {
        let cols = [0b011u128, 0b101, 0b110, 0b000, 0b011];
        let k = F2Echelon::spanned_by(kernel(&cols).into_iter().map(u128::from));
        for x in 0u64..32 {
            let s = (0..5).filter(|j| x >> j & 1 == 1).fold(0u128, |a, j| a ^ cols[j]);
            assert_eq!(s == 0, k.contains(x as u128), "x = {x:b}");
        }
    }

    #[test]
    fn reduce_is_linear() {
        let e = F2Echelon::spanned_by([0b1100u128, 0b0110, 0b1111]);
        for a in 0u128..16 {
            for b in 0u128..16 {
                assert_eq!(e.reduce(a ^ b), e.reduce(a) ^ e.reduce(b));
            }
        }
        assert_eq!(e.elements().len(), 8);
    }
}
