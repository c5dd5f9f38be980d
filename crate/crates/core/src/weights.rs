//! Weight vectors κ ∈ ℕ₀^{n−1} and reduced partitions.
//!
//! A weight κ = (κ₁, …, κ_{n−1}) indexes the degenerate Schur polynomial S_κ.
//! Its partition has parts λ_j = κ₁ + … + κ_{n−j}, so λ_n = 0 and
//! |λ| = ‖κ‖ = Σ (n − j) κ_j.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub const MIN_RANK: usize = 2;
pub const MAX_RANK: usize = 6;
/// Largest |κ| accepted from user input.
pub const MAX_WEIGHT: u32 = 16;

fn check_rank(n: usize) -> Result<()> {
    if (MIN_RANK..=MAX_RANK).contains(&n) {
        Ok(())
    } else {
        Err(Error::RankOutOfRange(n))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeightVector {
    n: usize,
    parts: Vec<u32>,
}

impl WeightVector {
    /// Validated constructor for user-facing weights (2 ≤ n ≤ 6, |κ| ≤ 16).
    pub fn new(n: usize, parts: Vec<u32>) -> Result<Self> {
        let w = Self::new_unbounded(n, parts)?;
        let size = w.abs();
        if size > MAX_WEIGHT {
            return Err(Error::WeightTooLarge {
                size,
                max: MAX_WEIGHT,
            });
        }
        Ok(w)
    }

    /// Like [`WeightVector::new`] but without the |κ| cap. Products and
    /// Plancherel series legitimately produce larger weights.
    pub fn new_unbounded(n: usize, parts: Vec<u32>) -> Result<Self> {
        check_rank(n)?;
        if parts.len() != n - 1 {
            return Err(Error::WeightLength {
                n,
                expected: n - 1,
                found: parts.len(),
            });
        }
        Ok(Self { n, parts })
    }

    pub fn zero(n: usize) -> Result<Self> {
        Self::new(n, vec![0; n.saturating_sub(1)])
    }

    /// Reads a weight such as `"1,0"`. The rank is the number of entries
    /// plus one unless `n` is given.
    pub fn parse(s: &str, n: Option<usize>) -> Result<Self> {
        let parts = s
            .split(',')
            .map(|t| {
                let t = t.trim();
                t.parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad weight entry {t:?} in {s:?}")))
            })
            .collect::<Result<Vec<u32>>>()?;
        let n = n.unwrap_or(parts.len() + 1);
        Self::new(n, parts)
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(|&k| k == 0)
    }

    /// |κ| = Σ κ_j.
    pub fn abs(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// ‖κ‖ = Σ (n − j) κ_j.
    pub fn wnorm(&self) -> u32 {
        self.parts
            .iter()
            .enumerate()
            .map(|(i, &k)| (self.n - 1 - i) as u32 * k)
            .sum()
    }

    /// `(|κ|, ‖κ‖)`.
    pub fn norms(&self) -> (u32, u32) {
        (self.abs(), self.wnorm())
    }

    /// κ^ι = (κ_{n−1}, …, κ₁).
    pub fn involute(&self) -> Self {
        let mut parts = self.parts.clone();
        parts.reverse();
        Self { n: self.n, parts }
    }

    pub fn is_self_dual(&self) -> bool {
        self.parts.iter().eq(self.parts.iter().rev())
    }

    pub fn to_partition(&self) -> Partition {
        let mut lambda = vec![0u32; self.n];
        let mut acc = 0;
        // λ_j = κ_1 + … + κ_{n−j}; fill from the bottom row up.
        for j in (0..self.n - 1).rev() {
            acc += self.parts[self.n - 2 - j];
            lambda[j] = acc;
        }
        Partition {
            parts: lambda,
        }
    }

    /// Inverse of [`WeightVector::to_partition`]; full columns are ignored.
    pub fn from_partition(lambda: &Partition) -> Result<Self> {
        let n = lambda.rank();
        check_rank(n)?;
        let l = &lambda.parts;
        let parts = (1..n).map(|j| l[n - j - 1] - l[n - j]).collect();
        Ok(Self { n, parts })
    }

    pub fn ensure_rank(&self, n: usize) -> Result<()> {
        if self.n == n {
            Ok(())
        } else {
            Err(Error::RankMismatch {
                expected: n,
                found: self.n,
            })
        }
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(|k| k.to_string()).collect();
        f.write_str(&s.join(","))
    }
}

impl FromStr for WeightVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s, None)
    }
}

impl Serialize for WeightVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for WeightVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A weakly decreasing sequence of exactly n nonnegative parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidPartition("no parts".into()));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidPartition(format!(
                "{parts:?} is not weakly decreasing"
            )));
        }
        Ok(Self { parts })
    }

    pub fn rank(&self) -> usize {
        self.parts.len()
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn size(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn is_reduced(&self) -> bool {
        self.parts.last() == Some(&0)
    }

    /// Removes the full columns: returns (λ − λ_n, λ_n).
    pub fn reduce(&self) -> (Partition, u32) {
        let last = *self.parts.last().expect("partition has at least one part");
        let parts = self.parts.iter().map(|&p| p - last).collect();
        (Partition { parts }, last)
    }
}

/// All weights of rank `n` with |κ| ≤ `max_abs`, in lexicographic order.
pub fn weights_up_to(n: usize, max_abs: u32) -> Result<Vec<WeightVector>> {
    check_rank(n)?;
    let mut out = Vec::new();
    let mut cur = vec![0u32; n - 1];
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, n: usize, out: &mut Vec<WeightVector>) {
        if i == cur.len() {
            out.push(WeightVector {
                n,
                parts: cur.clone(),
            });
            return;
        }
        for k in 0..=left {
            cur[i] = k;
            rec(i + 1, left - k, cur, n, out);
        }
        cur[i] = 0;
    }
    rec(0, max_abs, &mut cur, n, &mut out);
    Ok(out)
}

/// All weights of rank `n` with ‖κ‖ ≤ `max_wnorm`, in lexicographic order.
pub fn weights_with_wnorm_up_to(n: usize, max_wnorm: u32) -> Result<Vec<WeightVector>> {
    check_rank(n)?;
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, n: usize, out: &mut Vec<WeightVector>) {
        if i == cur.len() {
            out.push(WeightVector {
                n,
                parts: cur.clone(),
            });
            return;
        }
        let coeff = (n - 1 - i) as u32;
        for k in 0..=left / coeff {
            cur[i] = k;
            rec(i + 1, left - k * coeff, cur, n, out);
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    rec(0, max_wnorm, &mut vec![0; n - 1], n, &mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(parts: &[u32]) -> WeightVector {
        WeightVector::new(parts.len() + 1, parts.to_vec()).unwrap()
    }

    #[test]
    fn norms_examples() {
        assert_eq!(w(&[0, 0]).norms(), (0, 0));
        assert_eq!(w(&[1, 0]).norms(), (1, 2));
        assert_eq!(w(&[1, 1, 1]).norms(), (3, 6));
    }

    #[test]
    fn involute_examples() {
        assert_eq!(w(&[1, 0]).involute(), w(&[0, 1]));
        assert_eq!(w(&[1, 1]).involute(), w(&[1, 1]));
        assert_eq!(w(&[2, 0, 1]).involute(), w(&[1, 0, 2]));
        assert!(w(&[1, 1]).is_self_dual());
    }

    #[test]
    fn to_partition_examples() {
        assert_eq!(w(&[1, 0]).to_partition().parts(), &[1, 1, 0]);
        assert_eq!(w(&[1, 1]).to_partition().parts(), &[2, 1, 0]);
        let l = w(&[3]).to_partition();
        assert_eq!(l.parts(), &[3, 0]);
        assert_eq!(l.size(), 3);
    }

    #[test]
    fn reduce_partition_examples() {
        let (r, c) = Partition::new(vec![2, 1, 1]).unwrap().reduce();
        assert_eq!((r.parts(), c), (&[1, 0, 0][..], 1));
        let (r, c) = Partition::new(vec![0, 0, 0]).unwrap().reduce();
        assert_eq!((r.parts(), c), (&[0, 0, 0][..], 0));
        let (r, c) = Partition::new(vec![3, 3, 3]).unwrap().reduce();
        assert_eq!((r.parts(), c), (&[0, 0, 0][..], 3));
        assert!(r.is_reduced());
    }

    #[test]
    fn construction_guards() {
        assert!(matches!(
            WeightVector::new(7, vec![0; 6]),
            Err(Error::RankOutOfRange(7))
        ));
        assert!(matches!(
            WeightVector::new(1, vec![]),
            Err(Error::RankOutOfRange(1))
        ));
        assert!(matches!(
            WeightVector::new(3, vec![1]),
            Err(Error::WeightLength { .. })
        ));
        assert!(matches!(
            WeightVector::new(2, vec![17]),
            Err(Error::WeightTooLarge { size: 17, .. })
        ));
        assert!(WeightVector::new_unbounded(2, vec![17]).is_ok());
        assert!(Partition::new(vec![1, 2]).is_err());
    }

    #[test]
    fn parsing() {
        assert_eq!(WeightVector::parse("1,0", None).unwrap(), w(&[1, 0]));
        assert_eq!(WeightVector::parse(" 2 , 1 ", None).unwrap(), w(&[2, 1]));
        assert!(WeightVector::parse("1,x", None).is_err());
        assert!(WeightVector::parse("1,0", Some(4)).is_err());
        assert_eq!(w(&[2, 0, 1]).to_string(), "2,0,1");
        let json = serde_json::to_string(&w(&[1, 1])).unwrap();
        assert_eq!(json, "\"1,1\"");
        let back: WeightVector = serde_json::from_str(&json).unwrap();
        assert_eq!(back, w(&[1, 1]));
    }

    #[test]
    fn enumeration_counts() {
        // C(max+n-1, n-1) weights with |κ| ≤ max.
        assert_eq!(weights_up_to(3, 4).unwrap().len(), 15);
        assert_eq!(weights_up_to(4, 3).unwrap().len(), 20);
        // 2κ₁ + κ₂ ≤ 6: 7 + 5 + 3 + 1.
        assert_eq!(weights_with_wnorm_up_to(3, 6).unwrap().len(), 16);
        for n in 2..=5 {
            let direct = weights_with_wnorm_up_to(n, 7).unwrap();
            let filtered: Vec<_> = weights_up_to(n, 7)
                .unwrap()
                .into_iter()
                .filter(|w| w.wnorm() <= 7)
                .collect();
            assert_eq!(direct, filtered);
        }
    }

    #[test]
    fn weight_consistency_and_round_trip() {
        for n in 2..=6 {
            for k in weights_up_to(n, if n <= 4 { 12 } else { 8 }).unwrap() {
                let lambda = k.to_partition();
                assert_eq!(lambda.size(), k.wnorm());
                assert!(lambda.is_reduced());
                assert_eq!(WeightVector::from_partition(&lambda).unwrap(), k);
                let (a, wn) = k.norms();
                assert!(a <= wn && wn <= (n as u32 - 1) * a);
                let inv = k.involute();
                assert_eq!(inv.involute(), k);
                assert_eq!(inv.wnorm(), n as u32 * a - wn);
            }
        }
    }

    #[test]
    fn involute_is_complement_partition() {
        // λ(κ^ι) = (λ₁ − λ_n, λ₁ − λ_{n−1}, …, λ₁ − λ₁).
        for n in 2..=6 {
            for k in weights_up_to(n, 8).unwrap() {
                let l = k.to_partition();
                let p = l.parts();
                let comp: Vec<u32> = (0..n).map(|i| p[0] - p[n - 1 - i]).collect();
                let (comp, _) = Partition::new(comp).unwrap().reduce();
                assert_eq!(k.involute().to_partition(), comp);
            }
        }
    }
}
