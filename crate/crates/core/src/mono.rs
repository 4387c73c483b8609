//! Multi-index enumeration and memoized monomial products of commuting
//! matrix families. Shared by the verification routines.

use std::collections::HashMap;

use crate::matrix::CMatrix;

/// All nonnegative multi-indices of length `k` with total degree at most
/// `order`, in graded lexicographic order (degree ascending, then lex).
pub(crate) fn graded_indices(k: usize, order: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for total in 0..=order {
        let mut cur = vec![0u32; k];
        fill(&mut out, &mut cur, 0, total as u32);
    }
    out
}

fn fill(out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>, pos: usize, remaining: u32) {
    if pos + 1 == cur.len() {
        cur[pos] = remaining;
        out.push(cur.clone());
        return;
    }
    for v in 0..=remaining {
        cur[pos] = v;
        fill(out, cur, pos + 1, remaining - v);
    }
}

/// All signed multi-indices of length `k` with `Σ|m_i| ≤ order`, graded by
/// total variation then lexicographic.
pub(crate) fn signed_indices(k: usize, order: usize) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = Vec::new();
    let mut cur = vec![0i64; k];
    fill_signed(&mut out, &mut cur, 0, order as i64);
    out.sort_by_key(|m| (m.iter().map(|x| x.unsigned_abs()).sum::<u64>(), m.clone()));
    out
}

fn fill_signed(out: &mut Vec<Vec<i64>>, cur: &mut Vec<i64>, pos: usize, budget: i64) {
    if pos == cur.len() {
        out.push(cur.clone());
        return;
    }
    for v in -budget..=budget {
        cur[pos] = v;
        fill_signed(out, cur, pos + 1, budget - v.abs());
    }
}

/// Products `M_1^{a_1} ··· M_k^{a_k}` for every multi-index of total degree
/// at most `order`, each built from its predecessor with one multiply.
pub(crate) struct MonomialTable {
    products: HashMap<Vec<u32>, CMatrix>,
}

impl MonomialTable {
    pub(crate) fn build(mats: &[CMatrix], order: usize) -> Self {
        let k = mats.len();
        let dim = mats.first().map_or(0, CMatrix::rows);
        let mut products: HashMap<Vec<u32>, CMatrix> = HashMap::new();
        for alpha in graded_indices(k, order) {
            let value = match alpha.iter().position(|&e| e > 0) {
                None => CMatrix::identity(dim),
                Some(i) => {
                    let mut prev = alpha.clone();
                    prev[i] -= 1;
                    products[&prev].mul(&mats[i])
                }
            };
            products.insert(alpha, value);
        }
        Self { products }
    }

    pub(crate) fn get(&self, alpha: &[u32]) -> &CMatrix {
        &self.products[alpha]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::cr;

    #[test]
    fn graded_order_k2() {
        let idx = graded_indices(2, 2);
        assert_eq!(
            idx,
            vec![
                vec![0, 0],
                vec![0, 1],
                vec![1, 0],
                vec![0, 2],
                vec![1, 1],
                vec![2, 0]
            ]
        );
    }

    #[test]
    fn signed_counts_match_formula() {
        // number of integer points with |m|_1 <= N in Z^k
        for (k, order, expect) in [(1usize, 3usize, 7usize), (2, 2, 13), (3, 1, 7)] {
            assert_eq!(signed_indices(k, order).len(), expect);
        }
    }

    #[test]
    fn table_matches_direct_powers() {
        let a = CMatrix::from_rows(&[vec![cr(2.0), cr(1.0)], vec![cr(0.0), cr(1.0)]]);
        let b = CMatrix::identity(2).scale_re(3.0);
        let table = MonomialTable::build(&[a.clone(), b.clone()], 3);
        let direct = a.pow(2).mul(&b.pow(1));
        assert!(table.get(&[2, 1]).sub(&direct).fro_norm() < 1e-12);
    }
}
