//! Cyclic channel pseudo-parities.
//!
//! The pseudo-parity of a `K`-channel model factorizes as `R = P * r` where
//! `P` is the spatial reflection `x -> -x` and `r` is a `K x K` permutation
//! matrix that rotates the channels. Only the permutation carries any
//! information once `P^2 = I` is fixed, so everything here works on channel
//! indices and the reflection is tracked as a single flag in [`PseudoParity`].
//!
//! Indices are 0-based throughout the API. The permutation matrix of a
//! permutation `sigma` has `r[i][j] = 1` iff `i = sigma(j)`.

use std::fmt;

use crate::error::{invalid, Error, Result};

/// A bijection of `{0, .., n-1}` stored by its images.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self {
            images: (0..n).collect(),
        }
    }

    /// Builds a permutation from `images[j] = sigma(j)`.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(invalid(format!("{images:?} is not a permutation of 0..{n}")));
            }
            seen[i] = true;
        }
        Ok(Self { images })
    }

    /// Same as [`Permutation::from_images`] but with 1-based images.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        if images.iter().any(|&i| i == 0) {
            return Err(invalid("1-based permutation contains 0"));
        }
        Self::from_images(images.iter().map(|&i| i - 1).collect())
    }

    /// Cyclic shift `j -> j + shift (mod n)`.
    pub fn cyclic_shift(n: usize, shift: usize) -> Self {
        Self {
            images: (0..n).map(|j| (j + shift) % n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    #[inline]
    pub fn apply(&self, j: usize) -> usize {
        self.images[j]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// `self ∘ other`, i.e. `other` is applied first. Matches the product of
    /// the permutation matrices `M(self) * M(other)`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.len() != other.len() {
            return Err(Error::ChannelMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(Permutation {
            images: other.images.iter().map(|&j| self.images[j]).collect(),
        })
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.len()];
        for (j, &i) in self.images.iter().enumerate() {
            images[i] = j;
        }
        Permutation { images }
    }

    pub fn pow(&self, exponent: usize) -> Permutation {
        let mut out = Permutation::identity(self.len());
        for _ in 0..exponent {
            out = self.compose(&out).expect("same length");
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(j, &i)| i == j)
    }

    pub fn is_involution(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(j, &i)| self.images[i] == j)
    }

    /// Dense 0/1 permutation matrix, row-major: `m[i][j] = 1` iff `i = sigma(j)`.
    pub fn matrix(&self) -> Vec<Vec<u8>> {
        let n = self.len();
        let mut m = vec![vec![0u8; n]; n];
        for (j, &i) in self.images.iter().enumerate() {
            m[i][j] = 1;
        }
        m
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (j, i) in self.images.iter().enumerate() {
            if j > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}->{}", j + 1, i + 1)?;
        }
        write!(f, ")")
    }
}

/// The channel rotation `r_(K,L)`: the `L`-fold cyclic shift of `K` channels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GeneralizedParity {
    k: usize,
    l: usize,
    perm: Permutation,
}

impl GeneralizedParity {
    /// `r_(K,L)`. `L = 0` gives the identity, i.e. the diagonal pseudo-metric.
    pub fn new(k: usize, l: usize) -> Result<Self> {
        if k == 0 {
            return Err(invalid("channel count K must be at least 1"));
        }
        if l >= k {
            return Err(invalid(format!("rotation index L = {l} outside [0, {k})")));
        }
        Ok(Self {
            k,
            l,
            perm: Permutation::cyclic_shift(k, l),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn permutation(&self) -> &Permutation {
        &self.perm
    }

    /// Product `r_a * r_b`; the rotation indices add modulo `K`.
    pub fn compose(&self, other: &GeneralizedParity) -> Result<GeneralizedParity> {
        if self.k != other.k {
            return Err(Error::ChannelMismatch {
                expected: self.k,
                found: other.k,
            });
        }
        Ok(GeneralizedParity {
            k: self.k,
            l: (self.l + other.l) % self.k,
            perm: self.perm.compose(&other.perm)?,
        })
    }

    pub fn pow(&self, exponent: usize) -> GeneralizedParity {
        GeneralizedParity {
            k: self.k,
            l: (self.l * exponent) % self.k,
            perm: self.perm.pow(exponent),
        }
    }

    /// Symmetric permutation matrix. True for `L = 0` and for `L = K/2` at even `K`.
    pub fn is_hermitian(&self) -> bool {
        self.perm.is_involution()
    }

    /// `r_(K,K-L) = r_(K,L)^T`.
    pub fn adjoint(&self) -> GeneralizedParity {
        GeneralizedParity {
            k: self.k,
            l: (self.k - self.l) % self.k,
            perm: self.perm.inverse(),
        }
    }

    pub fn matrix(&self) -> Vec<Vec<u8>> {
        self.perm.matrix()
    }
}

impl fmt::Display for GeneralizedParity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r_({},{}) {}", self.k, self.l, self.perm)
    }
}

/// `make_parity(K, L)`.
pub fn make_parity(k: usize, l: usize) -> Result<GeneralizedParity> {
    GeneralizedParity::new(k, l)
}

/// Full pseudo-parity `P^e * r` with the spatial reflection power `e` kept mod 2.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PseudoParity {
    pub channels: GeneralizedParity,
    pub spatial: bool,
}

impl PseudoParity {
    /// `R_(K,L) = P * r_(K,L)`.
    pub fn new(k: usize, l: usize) -> Result<Self> {
        Ok(Self {
            channels: GeneralizedParity::new(k, l)?,
            spatial: true,
        })
    }

    pub fn compose(&self, other: &PseudoParity) -> Result<PseudoParity> {
        Ok(PseudoParity {
            channels: self.channels.compose(&other.channels)?,
            spatial: self.spatial ^ other.spatial,
        })
    }

    pub fn pow(&self, exponent: usize) -> PseudoParity {
        PseudoParity {
            channels: self.channels.pow(exponent),
            spatial: self.spatial && exponent % 2 == 1,
        }
    }

    pub fn is_identity(&self) -> bool {
        !self.spatial && self.channels.permutation().is_identity()
    }
}
