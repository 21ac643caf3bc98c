//! Interleaved circulant NHT matrices over exact integers.
//!
//! A generator `g = [g0, …, g(n-1)]` defines a `2n × 2n` circulant whose first
//! row is `[g0, 0, g1, 0, …, g(n-1), 0]`; row `r` is that row rotated right by
//! `r`. Because the zeros interleave, `N·Nᵀ` has the sum of squares on the
//! diagonal, zero at every odd circular shift, and the circular lag sum
//! `S(k) = Σⱼ g(j)·g((j+k) mod n)` at even shift `2k`. Every statement about
//! the full Gram matrix therefore reduces to `n` exact integers.

use num_bigint::BigUint;
use num_traits::Zero;
use std::collections::BTreeMap;

use crate::arith::{self, big_mod, Modulus};
use crate::error::{NhtError, Result};

/// The nonzero half of an NHT first row.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GeneratorSequence {
    values: Vec<BigUint>,
}

impl GeneratorSequence {
    pub fn new(values: Vec<BigUint>) -> Result<Self> {
        if values.len() < 2 {
            return Err(NhtError::InvalidGenerator(format!(
                "length {} is below 2",
                values.len()
            )));
        }
        if values.iter().all(Zero::is_zero) {
            return Err(NhtError::InvalidGenerator("all values are zero".into()));
        }
        Ok(Self { values })
    }

    pub fn from_u64s(values: &[u64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| BigUint::from(v)).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[BigUint] {
        &self.values
    }

    /// `c·g`, exact.
    pub fn scaled(&self, c: &BigUint) -> Result<Self> {
        Self::new(self.values.iter().map(|v| v * c).collect())
    }
}

/// A generator reduced modulo `q`; every value lies in `[0, q)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ResidueSequence {
    values: Vec<u64>,
    modulus: Modulus,
}

impl ResidueSequence {
    pub fn new(values: Vec<u64>, modulus: Modulus) -> Result<Self> {
        if values.len() < 2 {
            return Err(NhtError::InvalidGenerator(format!(
                "length {} is below 2",
                values.len()
            )));
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, &v)| v >= modulus.get())
        {
            return Err(NhtError::ResidueOutOfRange {
                index,
                value,
                modulus: modulus.get(),
            });
        }
        Ok(Self { values, modulus })
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `w·s mod q`.
    pub fn scaled(&self, w: u64) -> Self {
        let q = self.modulus;
        Self {
            values: self.values.iter().map(|&v| q.mul(v, w)).collect(),
            modulus: q,
        }
    }

    /// The residues read back as an exact-integer generator.
    pub fn to_generator(&self) -> Result<GeneratorSequence> {
        GeneratorSequence::from_u64s(&self.values)
    }

    /// Block length of the transform this sequence defines.
    pub fn block_len(&self) -> usize {
        2 * self.values.len()
    }

    // Entry of the first row of the interleaved circulant.
    fn first_row_entry(&self, position: usize) -> u64 {
        if position.is_multiple_of(2) {
            self.values[position / 2]
        } else {
            0
        }
    }
}

/// A `2n × 2n` circulant with the generator interleaved with zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CirculantNht {
    generator: GeneratorSequence,
}

impl CirculantNht {
    pub fn generator(&self) -> &GeneratorSequence {
        &self.generator
    }

    pub fn dimension(&self) -> usize {
        2 * self.generator.len()
    }

    pub fn first_row(&self) -> Vec<BigUint> {
        self.generator
            .values()
            .iter()
            .flat_map(|v| [v.clone(), BigUint::zero()])
            .collect()
    }

    pub fn entry(&self, row: usize, col: usize) -> BigUint {
        let dim = self.dimension();
        let shift = (col + dim - row % dim) % dim;
        if shift.is_multiple_of(2) {
            self.generator.values()[shift / 2].clone()
        } else {
            BigUint::zero()
        }
    }

    pub fn rows(&self) -> Vec<Vec<BigUint>> {
        let dim = self.dimension();
        (0..dim)
            .map(|r| (0..dim).map(|c| self.entry(r, c)).collect())
            .collect()
    }
}

pub fn build_circulant(g: &GeneratorSequence) -> CirculantNht {
    CirculantNht {
        generator: g.clone(),
    }
}

/// Diagonal and circular lag sums of `N·Nᵀ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GramSummary {
    pub diagonal: BigUint,
    /// `lag_sums[k - 1] = S(k)` for `k = 1..n-1`.
    pub lag_sums: Vec<BigUint>,
}

impl GramSummary {
    /// `S(k)`; `k = 0` gives the diagonal and `k` is taken modulo `n`.
    pub fn lag_sum(&self, k: usize) -> &BigUint {
        let n = self.lag_sums.len() + 1;
        match k % n {
            0 => &self.diagonal,
            k => &self.lag_sums[k - 1],
        }
    }

    pub fn n(&self) -> usize {
        self.lag_sums.len() + 1
    }
}

pub fn gram_lag_sums(g: &GeneratorSequence) -> GramSummary {
    let v = g.values();
    let n = v.len();
    let lag = |k: usize| -> BigUint { (0..n).map(|j| &v[j] * &v[(j + k) % n]).sum() };
    GramSummary {
        diagonal: lag(0),
        lag_sums: (1..n).map(lag).collect(),
    }
}

/// Full `N·Nᵀ` by explicit matrix multiplication.
pub fn matrix_gram(g: &GeneratorSequence) -> Vec<Vec<BigUint>> {
    let rows = build_circulant(g).rows();
    let dim = rows.len();
    let mut transpose = vec![vec![BigUint::zero(); dim]; dim];
    for (i, row) in rows.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            transpose[j][i] = x.clone();
        }
    }
    (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| (0..dim).map(|k| &rows[i][k] * &transpose[k][j]).sum())
                .collect()
        })
        .collect()
}

/// gcd of every lag sum; 0 when all of them vanish.
pub fn discover_modulus(gram: &GramSummary) -> BigUint {
    gram.lag_sums
        .iter()
        .fold(BigUint::zero(), |acc, s| arith::gcd_big(&acc, s))
}

pub fn diagonal_residue(g: &GeneratorSequence, q: Modulus) -> u64 {
    let squares: BigUint = g.values().iter().map(|v| v * v).sum();
    big_mod(&squares, q)
}

/// Scale `w` with `w²·r ≡ 1 (mod q)`, the smaller of the two when both exist.
///
/// `None` when `r⁻¹` is a quadratic non-residue. The modulus must be prime.
pub fn normalizer(r: u64, q: Modulus) -> Result<Option<u64>> {
    if !arith::is_prime(q.get()) {
        return Err(NhtError::CompositeModulus(q.get()));
    }
    let inv = arith::mod_inverse(r, q)?;
    Ok(arith::sqrt_mod_prime(inv, q)?.map(|(lo, _)| lo))
}

pub fn reduce_mod(g: &GeneratorSequence, q: Modulus) -> ResidueSequence {
    ResidueSequence {
        values: g.values().iter().map(|v| big_mod(v, q)).collect(),
        modulus: q,
    }
}

fn check_block(s: &ResidueSequence, block: &[u64]) -> Result<()> {
    if block.len() != s.block_len() {
        return Err(NhtError::Shape {
            expected: s.block_len(),
            actual: block.len(),
        });
    }
    if let Some((index, &value)) = block
        .iter()
        .enumerate()
        .find(|(_, &v)| v >= s.modulus.get())
    {
        return Err(NhtError::ResidueOutOfRange {
            index,
            value,
            modulus: s.modulus.get(),
        });
    }
    Ok(())
}

/// `G = N·F mod q`.
pub fn forward_transform(s: &ResidueSequence, block: &[u64]) -> Result<Vec<u64>> {
    check_block(s, block)?;
    let q = s.modulus;
    let dim = block.len();
    Ok((0..dim)
        .map(|row| {
            block.iter().enumerate().fold(0, |acc, (col, &f)| {
                let n_rc = s.first_row_entry((col + dim - row) % dim);
                q.add(acc, q.mul(n_rc, f))
            })
        })
        .collect())
}

/// `F = r⁻¹·Nᵀ·G mod q`, where `r` is the diagonal residue of `N·Nᵀ`.
pub fn inverse_transform(
    s: &ResidueSequence,
    block: &[u64],
    diagonal_residue: u64,
) -> Result<Vec<u64>> {
    check_block(s, block)?;
    let q = s.modulus;
    let r_inv = arith::mod_inverse(diagonal_residue, q)?;
    let dim = block.len();
    Ok((0..dim)
        .map(|row| {
            let acc = block.iter().enumerate().fold(0, |acc, (col, &g)| {
                let nt_rc = s.first_row_entry((row + dim - col) % dim);
                q.add(acc, q.mul(nt_rc, g))
            });
            q.mul(acc, r_inv)
        })
        .collect())
}

/// How far `N·Nᵀ mod q` is from a multiple of the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrthogonalityReport {
    pub modulus: Modulus,
    pub diagonal_residue: u64,
    /// Lag `k` → `S(k) mod q`, for `k = 1..n-1`.
    pub offdiag_residues: BTreeMap<usize, u64>,
    /// Present only for a prime modulus and an invertible, square-class diagonal.
    pub normalizer: Option<u64>,
    pub is_exact_identity: bool,
}

impl OrthogonalityReport {
    /// Lags whose residue is nonzero, with the residue.
    pub fn offending_lags(&self) -> Vec<(usize, u64)> {
        self.offdiag_residues
            .iter()
            .filter(|(_, &r)| r != 0)
            .map(|(&k, &r)| (k, r))
            .collect()
    }

    pub fn is_orthogonal(&self) -> bool {
        self.offdiag_residues.values().all(|&r| r == 0)
    }
}

pub fn orthogonality_report(g: &GeneratorSequence, q: Modulus) -> OrthogonalityReport {
    let gram = gram_lag_sums(g);
    let diagonal_residue = big_mod(&gram.diagonal, q);
    let offdiag_residues: BTreeMap<usize, u64> = gram
        .lag_sums
        .iter()
        .enumerate()
        .map(|(i, s)| (i + 1, big_mod(s, q)))
        .collect();
    let is_exact_identity = diagonal_residue == 1 && offdiag_residues.values().all(|&r| r == 0);
    let normalizer = if diagonal_residue == 1 {
        Some(1)
    } else {
        normalizer(diagonal_residue, q).ok().flatten()
    };
    OrthogonalityReport {
        modulus: q,
        diagonal_residue,
        offdiag_residues,
        normalizer,
        is_exact_identity,
    }
}
