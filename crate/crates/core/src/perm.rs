//! Site permutations with reduced words in adjacent transpositions.

use std::fmt;

use crate::error::{Error, Result};

/// Permutation of tensor slots, stored in one-line notation (0-based).
/// `apply(i)` is the image of slot `i`. Composition is function
/// composition: `(a.compose(b)).apply(i) == a.apply(b.apply(i))`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SitePermutation {
    map: Vec<usize>,
}

impl SitePermutation {
    pub fn identity(n: usize) -> Self {
        SitePermutation {
            map: (0..n).collect(),
        }
    }

    /// Adjacent transposition swapping slots `i` and `i + 1`.
    pub fn transposition(n: usize, i: usize) -> Self {
        assert!(i + 1 < n, "transposition out of range");
        let mut map: Vec<usize> = (0..n).collect();
        map.swap(i, i + 1);
        SitePermutation { map }
    }

    pub fn from_one_line(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &v in &map {
            if v >= n || seen[v] {
                return Err(Error::Spec(format!(
                    "not a permutation of 0..{}: {:?}",
                    n, map
                )));
            }
            seen[v] = true;
        }
        Ok(SitePermutation { map })
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn one_line(&self) -> &[usize] {
        &self.map
    }

    pub fn inverse(&self) -> Self {
        let mut map = vec![0usize; self.map.len()];
        for (i, &v) in self.map.iter().enumerate() {
            map[v] = i;
        }
        SitePermutation { map }
    }

    /// `self` after `other`: applies `other` first.
    pub fn compose(&self, other: &SitePermutation) -> Self {
        assert_eq!(self.len(), other.len());
        SitePermutation {
            map: (0..self.len()).map(|i| self.apply(other.apply(i))).collect(),
        }
    }

    pub fn num_inversions(&self) -> usize {
        let n = self.len();
        let mut count = 0;
        for i in 0..n {
            for j in i + 1..n {
                if self.map[i] > self.map[j] {
                    count += 1;
                }
            }
        }
        count
    }

    /// One reduced word `w` such that
    /// `self == s_{w[0]} . s_{w[1]} . ... . s_{w[m-1]}`
    /// (function composition, rightmost letter applied first).
    pub fn reduced_word(&self) -> Vec<usize> {
        let mut line = self.map.clone();
        let mut word = Vec::with_capacity(self.num_inversions());
        // Right-multiplying by s_j swaps positions j, j+1 of the one-line
        // form and shortens the permutation iff line[j] > line[j+1].
        loop {
            let mut descent = None;
            for j in 0..line.len().saturating_sub(1) {
                if line[j] > line[j + 1] {
                    descent = Some(j);
                    break;
                }
            }
            match descent {
                Some(j) => {
                    line.swap(j, j + 1);
                    word.push(j);
                }
                None => break,
            }
        }
        word.reverse();
        word
    }

    /// All reduced words for this permutation (exponential; intended for
    /// small symmetric groups).
    pub fn all_reduced_words(&self) -> Vec<Vec<usize>> {
        fn recurse(line: &mut Vec<usize>) -> Vec<Vec<usize>> {
            let descents: Vec<usize> = (0..line.len() - 1)
                .filter(|&j| line[j] > line[j + 1])
                .collect();
            if descents.is_empty() {
                return vec![vec![]];
            }
            let mut words = Vec::new();
            for j in descents {
                line.swap(j, j + 1);
                for mut w in recurse(line) {
                    w.push(j);
                    words.push(w);
                }
                line.swap(j, j + 1);
            }
            words
        }
        let mut line = self.map.clone();
        recurse(&mut line)
    }

    /// Composes a word of adjacent transpositions, rightmost applied first.
    pub fn from_word(n: usize, word: &[usize]) -> Self {
        let mut acc = SitePermutation::identity(n);
        for &j in word {
            acc = acc.compose(&SitePermutation::transposition(n, j));
        }
        acc
    }

    pub fn all(n: usize) -> Vec<SitePermutation> {
        fn recurse(prefix: &mut Vec<usize>, remaining: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if remaining.is_empty() {
                out.push(prefix.clone());
                return;
            }
            for k in 0..remaining.len() {
                let v = remaining.remove(k);
                prefix.push(v);
                recurse(prefix, remaining, out);
                prefix.pop();
                remaining.insert(k, v);
            }
        }
        let mut lines = Vec::new();
        recurse(&mut Vec::new(), &mut (0..n).collect(), &mut lines);
        lines
            .into_iter()
            .map(|map| SitePermutation { map })
            .collect()
    }
}

impl fmt::Debug for SitePermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // 1-based for readability
        let line: Vec<String> = self.map.iter().map(|v| (v + 1).to_string()).collect();
        write!(f, "[{}]", line.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduced_word_round_trips() {
        for perm in SitePermutation::all(4) {
            let word = perm.reduced_word();
            assert_eq!(word.len(), perm.num_inversions());
            assert_eq!(SitePermutation::from_word(4, &word), perm);
        }
    }

    #[test]
    fn all_reduced_words_agree() {
        for perm in SitePermutation::all(4) {
            let words = perm.all_reduced_words();
            assert!(!words.is_empty());
            for w in &words {
                assert_eq!(w.len(), perm.num_inversions());
                assert_eq!(&SitePermutation::from_word(4, w), &perm);
            }
        }
        // longest element of S3 has exactly the two words (0,1,0), (1,0,1)
        let longest = SitePermutation::from_one_line(vec![2, 1, 0]).unwrap();
        let mut words = longest.all_reduced_words();
        words.sort();
        assert_eq!(words, vec![vec![0, 1, 0], vec![1, 0, 1]]);
    }

    #[test]
    fn compose_and_inverse() {
        let a = SitePermutation::from_one_line(vec![1, 2, 0]).unwrap();
        let b = SitePermutation::transposition(3, 1);
        let ab = a.compose(&b);
        for i in 0..3 {
            assert_eq!(ab.apply(i), a.apply(b.apply(i)));
        }
        assert!(a.compose(&a.inverse()).is_identity());
    }

    #[test]
    fn rejects_non_permutation() {
        assert!(SitePermutation::from_one_line(vec![0, 0, 1]).is_err());
        assert!(SitePermutation::from_one_line(vec![0, 3, 1]).is_err());
    }

    #[test]
    fn enumerates_symmetric_group() {
        assert_eq!(SitePermutation::all(1).len(), 1);
        assert_eq!(SitePermutation::all(3).len(), 6);
        assert_eq!(SitePermutation::all(4).len(), 24);
    }
}
