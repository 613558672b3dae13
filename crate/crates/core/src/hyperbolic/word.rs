//! Words in generators a₁…a_g: letter +k is a_k, −k is a_k⁻¹.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word {
    pub letters: Vec<i32>,
}

impl Word {
    pub fn new(letters: Vec<i32>) -> Result<Self> {
        if letters.contains(&0) {
            return Err(Error::domain("letter 0 is not a generator"));
        }
        Ok(Self { letters })
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        self.letters.windows(2).all(|w| w[0] != -w[1])
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        self.is_reduced()
            && match (self.letters.first(), self.letters.last()) {
                (Some(a), Some(b)) => self.letters.len() == 1 || *a != -*b,
                _ => true,
            }
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| -l).collect(),
        }
    }

    pub fn concat(&self, o: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&o.letters);
        Word { letters }.reduce()
    }

    /// Free reduction.
    pub fn reduce(&self) -> Word {
        let mut out: Vec<i32> = Vec::with_capacity(self.letters.len());
        for &l in &self.letters {
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word { letters: out }
    }

    /// Free reduction including cancellation across the wrap.
    pub fn cyclic_reduce(&self) -> Word {
        let r = self.reduce().letters;
        let (mut i, mut j) = (0usize, r.len());
        while j >= i + 2 && r[i] == -r[j - 1] {
            i += 1;
            j -= 1;
        }
        Word {
            letters: r[i..j].to_vec(),
        }
    }

    pub fn rotate(&self, k: usize) -> Word {
        let n = self.letters.len();
        if n == 0 {
            return self.clone();
        }
        let mut letters = self.letters[k % n..].to_vec();
        letters.extend_from_slice(&self.letters[..k % n]);
        Word { letters }
    }

    /// Lexicographically least rotation.
    pub fn min_rotation(&self) -> Word {
        (0..self.letters.len().max(1))
            .map(|k| self.rotate(k))
            .min()
            .unwrap_or_default()
    }

    /// Smallest p dividing the length with w = (w[..p])^{len/p}.
    pub fn period(&self) -> usize {
        let n = self.letters.len();
        (1..=n)
            .find(|&p| n % p == 0 && (p..n).all(|i| self.letters[i] == self.letters[i - p]))
            .unwrap_or(0)
    }

    /// Not a proper power (k ≥ 2) of a shorter word. Meaningful for
    /// cyclically reduced words.
    pub fn is_primitive(&self) -> bool {
        !self.letters.is_empty() && self.period() == self.letters.len()
    }

    /// (root, k) with w = root^k.
    pub fn root(&self) -> (Word, usize) {
        let p = self.period();
        if p == 0 {
            return (self.clone(), 1);
        }
        (
            Word {
                letters: self.letters[..p].to_vec(),
            },
            self.letters.len() / p,
        )
    }

    pub fn max_generator(&self) -> usize {
        self.letters.iter().map(|l| l.unsigned_abs() as usize).max().unwrap_or(0)
    }
}

impl Default for Word {
    fn default() -> Self {
        Word { letters: Vec::new() }
    }
}

/// In a free group: are all cyclic shifts of `w` different elements?
/// Requires `w` cyclically reduced and primitive.
pub fn cyclic_shifts_distinct(w: &Word) -> Result<bool> {
    if w.is_empty() || !w.is_cyclically_reduced() {
        return Err(Error::domain("word must be nonempty and cyclically reduced"));
    }
    if !w.is_primitive() {
        return Err(Error::domain("word is a proper power"));
    }
    // rotations of a cyclically reduced word are reduced, hence distinct
    // elements exactly when they are distinct letter sequences
    let mut rots: Vec<Word> = (0..w.len()).map(|k| w.rotate(k)).collect();
    rots.sort();
    rots.dedup();
    Ok(rots.len() == w.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(v: &[i32]) -> Word {
        Word::new(v.to_vec()).unwrap()
    }

    #[test]
    fn wrap_cancellation() {
        assert_eq!(w(&[1, 2, -1]).cyclic_reduce(), w(&[2]));
        assert_eq!(w(&[1, 2, -2, 3, -1]).cyclic_reduce(), w(&[3]));
        assert_eq!(w(&[1, -1]).cyclic_reduce(), w(&[]));
        assert_eq!(w(&[2, 2]).cyclic_reduce(), w(&[2, 2]));
    }

    #[test]
    fn powers() {
        let ab2 = w(&[1, 2, 1, 2]);
        assert!(!ab2.is_primitive());
        assert_eq!(ab2.root(), (w(&[1, 2]), 2));
        assert!(w(&[1, 2, 1, -2]).is_primitive());
    }

    #[test]
    fn shifts() {
        assert!(cyclic_shifts_distinct(&w(&[1, 2])).unwrap());
        assert!(cyclic_shifts_distinct(&w(&[1, 2, 1, 2])).is_err());
        assert!(cyclic_shifts_distinct(&w(&[1, 2, -1])).is_err());
    }

    #[test]
    fn min_rotation_canonical() {
        assert_eq!(w(&[2, 1, -2, -1]).min_rotation(), w(&[-2, -1, 2, 1]));
        assert_eq!(w(&[3, 1, 2]).min_rotation(), w(&[1, 2, 3]));
    }
}
