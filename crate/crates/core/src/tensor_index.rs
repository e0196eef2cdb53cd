//! Mixed-radix index algebra for n-partite tensor-product bases.
//!
//! A basis label is a digit vector (i_1, ..., i_n) with 0 <= i_k <= d_k - 1,
//! party 1 being the most significant digit. Its 1-based linear index is
//!
//! ```text
//! i = sum_{k=1}^{n-1} i_k * (d_{k+1} d_{k+2} ... d_n) + i_n + 1
//! ```
//!
//! (empty trailing product = 1). All public APIs use this 1-based convention;
//! digit vectors stay 0-based.

use std::collections::BTreeSet;

use crate::{Error, Result};

/// Largest supported total dimension (12 qubits). Everything is dense.
pub const MAX_TOTAL_DIM: usize = 4096;

/// Per-party level counts d_1..d_n of an n-partite system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsystemDims {
    dims: Vec<usize>,
    strides: Vec<usize>,
    total: usize,
}

impl SubsystemDims {
    /// Requires n >= 2 parties, every d_l >= 2, and d_1...d_n <= [`MAX_TOTAL_DIM`].
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::InvalidDims(format!(
                "need at least 2 parties, got {}",
                dims.len()
            )));
        }
        if let Some(&d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidDims(format!(
                "every party needs at least 2 levels, got {d}"
            )));
        }
        let mut total = 1usize;
        for &d in &dims {
            total = total
                .checked_mul(d)
                .filter(|&t| t <= MAX_TOTAL_DIM)
                .ok_or_else(|| {
                    Error::InvalidDims(format!(
                        "total dimension exceeds the supported maximum {MAX_TOTAL_DIM}"
                    ))
                })?;
        }
        let n = dims.len();
        // strides[k] = product of the dims after position k; empty product = 1
        let mut strides = vec![1usize; n];
        for k in (0..n - 1).rev() {
            strides[k] = strides[k + 1] * dims[k + 1];
        }
        Ok(Self {
            dims,
            strides,
            total,
        })
    }

    /// n qubits.
    pub fn qubits(n: usize) -> Result<Self> {
        Self::new(vec![2; n])
    }

    /// Party count n.
    pub fn n(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Level count of party l (1-based).
    pub fn dim(&self, party: usize) -> usize {
        self.dims[party - 1]
    }

    /// Total dimension D = d_1 d_2 ... d_n.
    pub fn total(&self) -> usize {
        self.total
    }

    pub fn all_qubits(&self) -> bool {
        self.dims.iter().all(|&d| d == 2)
    }

    /// Positional weight of the 0-based digit position k.
    pub(crate) fn stride(&self, k: usize) -> usize {
        self.strides[k]
    }
}

/// Digit vector (i_1, ..., i_n) of an n-partite basis label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiIndex {
    digits: Vec<usize>,
}

impl MultiIndex {
    pub fn new(digits: Vec<usize>) -> Self {
        Self { digits }
    }

    pub fn digits(&self) -> &[usize] {
        &self.digits
    }
}

/// A split of the parties {1..n} into two nonempty complementary groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    left: BTreeSet<usize>,
    n: usize,
}

impl Bipartition {
    /// `left` is the set of 1-based party labels on one side; the other side
    /// is its complement in {1..n}. Both sides must be nonempty.
    pub fn new(left: impl IntoIterator<Item = usize>, n: usize) -> Result<Self> {
        let left: BTreeSet<usize> = left.into_iter().collect();
        if n < 2 {
            return Err(Error::InvalidBipartition(format!(
                "need at least 2 parties, got {n}"
            )));
        }
        if left.is_empty() {
            return Err(Error::InvalidBipartition(
                "left side must be nonempty".into(),
            ));
        }
        if let Some(&p) = left.iter().find(|&&p| p < 1 || p > n) {
            return Err(Error::InvalidBipartition(format!(
                "party {p} outside 1..={n}"
            )));
        }
        if left.len() == n {
            return Err(Error::InvalidBipartition(
                "right side must be nonempty".into(),
            ));
        }
        Ok(Self { left, n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Left-side party labels, ascending.
    pub fn left(&self) -> impl Iterator<Item = usize> + '_ {
        self.left.iter().copied()
    }

    /// Right-side party labels, ascending.
    pub fn right(&self) -> impl Iterator<Item = usize> + '_ {
        (1..=self.n).filter(move |p| !self.left.contains(p))
    }

    pub fn contains_left(&self, party: usize) -> bool {
        self.left.contains(&party)
    }

    /// "1,3|2" style label for reports.
    pub fn label(&self) -> String {
        let join = |it: &mut dyn Iterator<Item = usize>| {
            it.map(|p| p.to_string()).collect::<Vec<_>>().join(",")
        };
        format!("{}|{}", join(&mut self.left()), join(&mut self.right()))
    }
}

/// 1-based linear index of a multi-index.
pub fn linear_index(m: &MultiIndex, dims: &SubsystemDims) -> Result<usize> {
    if m.digits().len() != dims.n() {
        return Err(Error::InvalidIndex(format!(
            "multi-index has {} digits, dimensions have {} parties",
            m.digits().len(),
            dims.n()
        )));
    }
    let mut idx = 0usize;
    for (k, (&digit, &d)) in m.digits().iter().zip(dims.dims()).enumerate() {
        if digit >= d {
            return Err(Error::InvalidIndex(format!(
                "digit i_{} = {digit} out of radix {d}",
                k + 1
            )));
        }
        idx += digit * dims.stride(k);
    }
    Ok(idx + 1)
}

/// Digit vector of a 1-based linear index; inverse of [`linear_index`].
pub fn decompose_index(i: usize, dims: &SubsystemDims) -> Result<MultiIndex> {
    if i < 1 || i > dims.total() {
        return Err(Error::InvalidIndex(format!(
            "index {i} out of range 1..={}",
            dims.total()
        )));
    }
    let mut rem = i - 1;
    let digits = (0..dims.n())
        .map(|k| {
            let q = rem / dims.stride(k);
            rem %= dims.stride(k);
            q
        })
        .collect();
    Ok(MultiIndex::new(digits))
}

/// Anti-diagonal partner D - i + 1 of a 1-based index. Involution; equals
/// the index of the digit-wise complemented label (i_k -> d_k - 1 - i_k).
pub fn mirror_index(i: usize, total: usize) -> Result<usize> {
    if i < 1 || i > total {
        return Err(Error::InvalidIndex(format!(
            "index {i} out of range 1..={total}"
        )));
    }
    Ok(total - i + 1)
}

/// The corner set A: linear indices of all labels whose digits are each
/// extreme (i_k = 0 or d_k - 1), excluding the all-zero and all-max labels.
/// Exactly 2^n - 2 entries, sorted ascending.
pub fn corner_indices(dims: &SubsystemDims) -> Vec<usize> {
    let n = dims.n();
    let mut out = Vec::with_capacity((1usize << n) - 2);
    // bit k of the mask = party k+1 sits at its top level instead of 0;
    // mask 0 (all zeros) and mask 2^n - 1 (all max) are the excluded labels
    for mask in 1..(1usize << n) - 1 {
        let mut idx = 0usize;
        for k in 0..n {
            if mask & (1 << k) != 0 {
                idx += (dims.dims()[k] - 1) * dims.stride(k);
            }
        }
        out.push(idx + 1);
    }
    out.sort_unstable();
    out
}

/// Linear indices of the n single-excitation qubit labels |0..010..0>,
/// ordered by the excited party: entry i-1 is 2^(n-i) + 1.
pub fn single_excitation_indices(n: usize) -> Vec<usize> {
    debug_assert!(n >= 2, "qubit system needs n >= 2");
    (1..=n).map(|i| (1usize << (n - i)) + 1).collect()
}

/// Linear index 2^(n-i) + 2^(n-j) + 1 of the qubit label with excitations at
/// the two distinct parties i and j.
pub fn pair_excitation_index(i: usize, j: usize, n: usize) -> Result<usize> {
    if i == j {
        return Err(Error::InvalidPair { i, j });
    }
    if i < 1 || i > n || j < 1 || j > n {
        return Err(Error::InvalidIndex(format!(
            "excitation parties ({i}, {j}) out of range 1..={n}"
        )));
    }
    Ok((1usize << (n - i)) + (1usize << (n - j)) + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dims(d: &[usize]) -> SubsystemDims {
        SubsystemDims::new(d.to_vec()).unwrap()
    }

    fn lin(digits: &[usize], d: &[usize]) -> usize {
        linear_index(&MultiIndex::new(digits.to_vec()), &dims(d)).unwrap()
    }

    #[test]
    fn linear_index_endpoints() {
        assert_eq!(lin(&[0, 0, 0], &[2, 2, 2]), 1);
        assert_eq!(lin(&[1, 1, 1], &[2, 2, 2]), 8);
    }

    #[test]
    fn linear_index_positional_arithmetic() {
        // 2*9 + 1*3 + 0 + 1 = 22; cross-checked below by full enumeration
        assert_eq!(lin(&[2, 1, 0], &[3, 3, 3]), 22);

        // lexicographic enumeration of all 27 labels must hit 1..=27 in order
        let d = dims(&[3, 3, 3]);
        let mut expected = 1;
        for i1 in 0..3 {
            for i2 in 0..3 {
                for i3 in 0..3 {
                    let got = linear_index(&MultiIndex::new(vec![i1, i2, i3]), &d).unwrap();
                    assert_eq!(got, expected);
                    expected += 1;
                }
            }
        }
    }

    #[test]
    fn linear_index_rejects_bad_digits() {
        let d = dims(&[2, 2, 2]);
        assert!(matches!(
            linear_index(&MultiIndex::new(vec![0, 2, 0]), &d),
            Err(Error::InvalidIndex(_))
        ));
        assert!(matches!(
            linear_index(&MultiIndex::new(vec![0, 0]), &d),
            Err(Error::InvalidIndex(_))
        ));
    }

    #[test]
    fn decompose_inverts_linear_index() {
        let d = dims(&[2, 3, 4]);
        for i in 1..=d.total() {
            let m = decompose_index(i, &d).unwrap();
            assert_eq!(linear_index(&m, &d).unwrap(), i);
        }
        assert!(decompose_index(0, &d).is_err());
        assert!(decompose_index(25, &d).is_err());
    }

    #[test]
    fn mirror_examples() {
        assert_eq!(mirror_index(2, 8).unwrap(), 7);
        assert_eq!(mirror_index(1, 8).unwrap(), 8);
        // odd total has a fixed point in the middle
        assert_eq!(mirror_index(14, 27).unwrap(), 14);
        assert!(mirror_index(0, 8).is_err());
        assert!(mirror_index(9, 8).is_err());
    }

    #[test]
    fn mirror_is_digit_complement() {
        let d = dims(&[3, 2, 4]);
        for i in 1..=d.total() {
            let m = decompose_index(i, &d).unwrap();
            let complemented: Vec<usize> = m
                .digits()
                .iter()
                .zip(d.dims())
                .map(|(&digit, &dk)| dk - 1 - digit)
                .collect();
            let via_complement = linear_index(&MultiIndex::new(complemented), &d).unwrap();
            assert_eq!(mirror_index(i, d.total()).unwrap(), via_complement);
        }
    }

    #[test]
    fn corner_set_qubits() {
        let a = corner_indices(&dims(&[2, 2, 2]));
        assert_eq!(a, vec![2, 3, 4, 5, 6, 7]);
    }

    #[test]
    fn corner_set_qutrits() {
        // brute force: decode every label, keep all-extreme digits, drop the
        // two global extremes
        let d = dims(&[3, 3, 3]);
        let brute: Vec<usize> = (2..d.total())
            .filter(|&i| {
                decompose_index(i, &d)
                    .unwrap()
                    .digits()
                    .iter()
                    .zip(d.dims())
                    .all(|(&digit, &dk)| digit == 0 || digit == dk - 1)
            })
            .collect();
        assert_eq!(brute, vec![3, 7, 9, 19, 21, 25]);
        assert_eq!(corner_indices(&d), brute);
    }

    #[test]
    fn corner_set_mixed_dims() {
        assert_eq!(corner_indices(&dims(&[2, 3])), vec![3, 4]);
    }

    #[test]
    fn corner_set_size_and_mirror_closure() {
        for d in [
            dims(&[2, 2]),
            dims(&[2, 2, 2, 2]),
            dims(&[3, 3, 3]),
            dims(&[2, 3, 4]),
            dims(&[5, 2]),
        ] {
            let a = corner_indices(&d);
            assert_eq!(a.len(), (1 << d.n()) - 2);
            for &i in &a {
                let m = mirror_index(i, d.total()).unwrap();
                assert!(a.binary_search(&m).is_ok(), "mirror of {i} not in A");
                assert_ne!(m, i, "corner set may not contain a mirror fixed point");
            }
        }
    }

    #[test]
    fn single_excitation_examples() {
        assert_eq!(single_excitation_indices(3), vec![5, 3, 2]);
        assert_eq!(single_excitation_indices(2), vec![3, 2]);
        // n = 4: enumerate weight-1 bitstrings by decoding every label
        let d = dims(&[2, 2, 2, 2]);
        let mut weight1: Vec<usize> = (1..=d.total())
            .filter(|&i| {
                decompose_index(i, &d)
                    .unwrap()
                    .digits()
                    .iter()
                    .sum::<usize>()
                    == 1
            })
            .collect();
        weight1.sort_unstable_by(|a, b| b.cmp(a));
        assert_eq!(single_excitation_indices(4), weight1);
        assert_eq!(single_excitation_indices(4), vec![9, 5, 3, 2]);
    }

    #[test]
    fn pair_excitation_examples() {
        // |110> and |101> via the digit route
        assert_eq!(lin(&[1, 1, 0], &[2, 2, 2]), 7);
        assert_eq!(pair_excitation_index(2, 1, 3).unwrap(), 7);
        assert_eq!(lin(&[1, 0, 1], &[2, 2, 2]), 6);
        assert_eq!(pair_excitation_index(3, 1, 3).unwrap(), 6);
        assert_eq!(pair_excitation_index(2, 1, 2).unwrap(), 4);
        assert!(matches!(
            pair_excitation_index(2, 2, 3),
            Err(Error::InvalidPair { .. })
        ));
        assert!(pair_excitation_index(4, 1, 3).is_err());
    }

    #[test]
    fn dims_validation() {
        assert!(SubsystemDims::new(vec![2]).is_err());
        assert!(SubsystemDims::new(vec![2, 1]).is_err());
        assert!(SubsystemDims::qubits(12).is_ok());
        assert!(SubsystemDims::qubits(13).is_err());
        let d = dims(&[2, 3, 4]);
        assert_eq!(d.total(), 24);
        assert_eq!(d.dim(2), 3);
        assert!(!d.all_qubits());
        assert!(dims(&[2, 2]).all_qubits());
    }

    #[test]
    fn bipartition_validation() {
        let b = Bipartition::new([1, 3], 4).unwrap();
        assert_eq!(b.left().collect::<Vec<_>>(), vec![1, 3]);
        assert_eq!(b.right().collect::<Vec<_>>(), vec![2, 4]);
        assert_eq!(b.label(), "1,3|2,4");
        assert!(b.contains_left(3));
        assert!(!b.contains_left(2));

        assert!(Bipartition::new([], 3).is_err());
        assert!(Bipartition::new([1, 2, 3], 3).is_err());
        assert!(Bipartition::new([0], 3).is_err());
        assert!(Bipartition::new([4], 3).is_err());
    }
}
