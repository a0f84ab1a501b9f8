//! Pointwise exterior algebra on canonically stored components, generic over
//! [`Real`] so that the same code runs on dual numbers.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::determinant_generic;
use crate::math::Real;

/// Increasing multi-indices of length `degree` drawn from `0..dim`,
/// lexicographically ordered.
pub fn index_sets(dim: usize, degree: usize) -> Vec<Vec<usize>> {
    if degree > dim {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..degree).collect();
    loop {
        out.push(cur.clone());
        // advance to the next combination
        let mut i = degree;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < dim - degree + i {
                cur[i] += 1;
                for j in i + 1..degree {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Sort `idx` and return the permutation sign; `None` on a repeated index.
pub fn sort_with_sign(idx: &[usize]) -> Option<(Vec<usize>, f64)> {
    let mut v = idx.to_vec();
    let mut sign = 1.0;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, sign))
}

/// Component layout of a rank-`rank` bundle-valued `degree`-form: slot
/// `set * rank + a`, plus the lookup tables used by the contractions.
#[derive(Clone, Debug, PartialEq)]
pub struct Layout {
    pub dim: usize,
    pub degree: usize,
    pub rank: usize,
    pub sets: Vec<Vec<usize>>,
    /// `interior[i][J]` = position and sign of `(i, J)` among the degree-`p`
    /// sets, for each degree-`(p−1)` set `J`.
    interior: Vec<Vec<Option<(usize, f64)>>>,
}

impl Layout {
    pub fn new(dim: usize, degree: usize, rank: usize) -> Self {
        let sets = index_sets(dim, degree);
        let interior = if degree == 0 {
            Vec::new()
        } else {
            let lower = index_sets(dim, degree - 1);
            (0..dim)
                .map(|i| {
                    lower
                        .iter()
                        .map(|j| {
                            let mut full = vec![i];
                            full.extend_from_slice(j);
                            sort_with_sign(&full).map(|(s, sg)| (sets.binary_search(&s).expect("set"), sg))
                        })
                        .collect()
                })
                .collect()
        };
        Self { dim, degree, rank, sets, interior }
    }

    pub fn len(&self) -> usize {
        self.sets.len() * self.rank
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Position of a sorted set.
    pub fn position(&self, sorted: &[usize]) -> Option<usize> {
        self.sets.binary_search_by(|s| s.as_slice().cmp(sorted)).ok()
    }

    /// Value of `ω_{idx}^a` for an arbitrary index tuple.
    pub fn get<T: Real>(&self, comps: &[T], idx: &[usize], a: usize) -> T {
        match sort_with_sign(idx) {
            None => T::zero(),
            Some((s, sign)) => {
                let k = self.position(&s).expect("index in range");
                comps[k * self.rank + a] * T::from_f64(sign)
            }
        }
    }

    pub fn lower(&self) -> Layout {
        Layout::new(self.dim, self.degree.saturating_sub(1), self.rank)
    }

    /// `i_{∂_i} ω` stored in the degree-`(p−1)` layout; empty when `p = 0`.
    pub fn interior_basis<T: Real>(&self, i: usize, comps: &[T]) -> Vec<T> {
        if self.degree == 0 {
            return Vec::new();
        }
        let table = &self.interior[i];
        let mut out = vec![T::zero(); table.len() * self.rank];
        for (jpos, entry) in table.iter().enumerate() {
            if let Some((k, sign)) = *entry {
                for a in 0..self.rank {
                    out[jpos * self.rank + a] = comps[k * self.rank + a] * T::from_f64(sign);
                }
            }
        }
        out
    }

    /// Induced inner product with `g^{-1}` supplied row-major.
    pub fn inner<T: Real>(&self, ginv: &[T], a: &[T], b: &[T]) -> T {
        let m = self.dim;
        let p = self.degree;
        let mut total = T::zero();
        let mut minor = vec![T::zero(); p * p];
        for (ii, si) in self.sets.iter().enumerate() {
            for (jj, sj) in self.sets.iter().enumerate() {
                let fiber = (0..self.rank).fold(T::zero(), |acc, r| acc + a[ii * self.rank + r] * b[jj * self.rank + r]);
                let det = if p == 0 {
                    T::one()
                } else {
                    for x in 0..p {
                        for y in 0..p {
                            minor[x * p + y] = ginv[si[x] * m + sj[y]];
                        }
                    }
                    determinant_generic(p, &minor)
                };
                total = total + det * fiber;
            }
        }
        total
    }

    /// `(ω⊙ω)_{ij} = ⟨i_{∂_i}ω, i_{∂_j}ω⟩`, row-major `m × m`.
    pub fn odot<T: Real>(&self, ginv: &[T], comps: &[T]) -> Vec<T> {
        let m = self.dim;
        let mut out = vec![T::zero(); m * m];
        if self.degree == 0 {
            return out;
        }
        let lower = self.lower();
        let contracted: Vec<Vec<T>> = (0..m).map(|i| self.interior_basis(i, comps)).collect();
        for i in 0..m {
            for j in i..m {
                let v = lower.inner(ginv, &contracted[i], &contracted[j]);
                out[i * m + j] = v;
                out[j * m + i] = v;
            }
        }
        out
    }

    /// `S = ½|ω|² g − ω⊙ω`, row-major.
    pub fn stress<T: Real>(&self, g: &[T], ginv: &[T], comps: &[T]) -> Vec<T> {
        let half_norm = self.inner(ginv, comps, comps) * T::from_f64(0.5);
        let od = self.odot(ginv, comps);
        g.iter().zip(&od).map(|(gij, oij)| half_norm * *gij - *oij).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_in_order() {
        assert_eq!(index_sets(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(index_sets(3, 0), vec![Vec::<usize>::new()]);
        assert!(index_sets(2, 3).is_empty());
        assert_eq!(index_sets(5, 3).len(), 10);
    }

    #[test]
    fn permutation_signs() {
        assert_eq!(sort_with_sign(&[2, 0, 1]), Some((vec![0, 1, 2], 1.0)));
        assert_eq!(sort_with_sign(&[1, 0]), Some((vec![0, 1], -1.0)));
        assert_eq!(sort_with_sign(&[1, 1]), None);
    }
}
