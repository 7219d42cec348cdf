//! Lexicographic subset enumeration and small binomial coefficients.
//!
//! Every module in the workspace indexes subsets of users through the
//! enumeration fixed here: `ksubsets(n, k)` lists the k-element subsets of
//! `{1, …, n}` as sorted vectors in lexicographic order, and `subset_rank`
//! inverts the listing. Message index `m` downstream always means "the m-th
//! subset in this order", so the order is a cross-crate contract.

/// Binomial coefficient `C(n, k)` computed multiplicatively in `u64`.
///
/// Desk-scale inputs only (n ≤ ~60); panics on overflow in debug builds and
/// is exact for everything this workspace enumerates.
#[must_use]
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for j in 0..k {
        acc = acc * (n - j) / (j + 1);
    }
    acc
}

/// All k-element subsets of `{1, …, n}` in lexicographic order.
///
/// Members of each subset are sorted ascending; the outer order is
/// lexicographic over those sorted tuples, e.g. for `n = 4, k = 2`:
/// `{1,2}, {1,3}, {1,4}, {2,3}, {2,4}, {3,4}`.
#[must_use]
pub fn ksubsets(n: u32, k: u32) -> Vec<Vec<u32>> {
    let (n, k) = (n as usize, k as usize);
    let mut out = Vec::with_capacity(binomial(n as u64, k as u64) as usize);
    if k == 0 {
        out.push(Vec::new());
        return out;
    }
    if k > n {
        return out;
    }
    let mut cur: Vec<u32> = (1..=k as u32).collect();
    loop {
        out.push(cur.clone());
        // Advance to the lexicographic successor.
        let mut i = k;
        while i > 0 && cur[i - 1] == (n - k + i) as u32 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        cur[i - 1] += 1;
        for j in i..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
    out
}

/// Rank of a sorted k-subset of `{1, …, n}` in the `ksubsets(n, k)` order.
///
/// Inverse of indexing into `ksubsets(n, k)`: the combinatorial number
/// system with respect to lexicographic order.
#[must_use]
pub fn subset_rank(n: u32, subset: &[u32]) -> usize {
    let k = subset.len() as u64;
    let mut rank: u64 = 0;
    let mut prev = 0u32;
    for (pos, &member) in subset.iter().enumerate() {
        // Count subsets that branch off below `member` at this position.
        for skipped in (prev + 1)..member {
            rank += binomial((n - skipped) as u64, k - 1 - pos as u64);
        }
        prev = member;
    }
    rank as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_small_table() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(10, 4), 210);
        assert_eq!(binomial(9, 2), 36);
        assert_eq!(binomial(4, 0), 1);
        assert_eq!(binomial(3, 5), 0);
    }

    #[test]
    fn ksubsets_lexicographic_order_n4_k2() {
        let subs = ksubsets(4, 2);
        let expect = vec![
            vec![1, 2],
            vec![1, 3],
            vec![1, 4],
            vec![2, 3],
            vec![2, 4],
            vec![3, 4],
        ];
        assert_eq!(subs, expect, "lex order is a cross-module contract");
    }

    #[test]
    fn ksubsets_counts_match_binomial() {
        for n in 1..=8u32 {
            for k in 0..=n {
                assert_eq!(
                    ksubsets(n, k).len() as u64,
                    binomial(n as u64, k as u64),
                    "count mismatch at n={n} k={k}"
                );
            }
        }
    }

    #[test]
    fn subset_rank_inverts_enumeration() {
        for n in 1..=8u32 {
            for k in 1..=n {
                for (i, s) in ksubsets(n, k).iter().enumerate() {
                    assert_eq!(subset_rank(n, s), i, "rank mismatch for {s:?}");
                }
            }
        }
    }
}
