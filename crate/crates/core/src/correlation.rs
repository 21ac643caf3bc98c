//! Modular circular correlation of residue sequences.
//!
//! Correlations are periodic: index `j + k` wraps modulo the sequence length.
//! Raw sums are exact integers; residues reduce them modulo the chosen
//! modulus, optionally multiplied by the modular inverse of the length.

use num_bigint::BigUint;
use num_rational::Ratio;
use std::fmt;
use std::str::FromStr;

use crate::arith::{self, big_mod, Modulus};
use crate::error::{NhtError, Result};
use crate::nht::ResidueSequence;

/// How the `1/N` factor of a correlation is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Convention {
    /// `C(k) = S(k) mod q`; the `1/N` factor is dropped.
    Raw,
    /// `C(k) = N⁻¹·S(k) mod q`.
    Scaled,
}

impl Convention {
    pub const ALL: [Convention; 2] = [Convention::Raw, Convention::Scaled];

    pub fn as_str(self) -> &'static str {
        match self {
            Convention::Raw => "raw",
            Convention::Scaled => "scaled",
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Convention {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "raw" => Ok(Convention::Raw),
            "scaled" => Ok(Convention::Scaled),
            other => Err(format!("unknown convention '{other}'")),
        }
    }
}

/// Per-lag correlation values for one run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrelationSeries {
    pub modulus: Modulus,
    pub convention: Convention,
    /// Exact `Σⱼ a(j)·b((j+k) mod N)` for `k = 0..N`.
    pub raw_sums: Vec<BigUint>,
    pub residues: Vec<u64>,
}

impl CorrelationSeries {
    pub fn len(&self) -> usize {
        self.residues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }

    /// `residue(k) / q`, in `[0, 1)`.
    pub fn normalized(&self, k: usize) -> f64 {
        self.residues[k] as f64 / self.modulus.get() as f64
    }
}

pub fn circular_autocorr(s: &ResidueSequence, conv: Convention) -> Result<CorrelationSeries> {
    circular_crosscorr(s.values(), s.values(), s.modulus(), conv)
}

/// Cross-correlation of `a` against `b`, both reduced modulo `q` first.
pub fn circular_crosscorr(
    a: &[u64],
    b: &[u64],
    q: Modulus,
    conv: Convention,
) -> Result<CorrelationSeries> {
    if a.len() != b.len() {
        return Err(NhtError::Shape {
            expected: a.len(),
            actual: b.len(),
        });
    }
    let n = a.len();
    let scale = match conv {
        Convention::Raw => 1,
        Convention::Scaled => {
            arith::mod_inverse(n as u64, q).map_err(|_| NhtError::Convention {
                length: n,
                modulus: q.get(),
            })?
        }
    };
    let a: Vec<u64> = a.iter().map(|&v| q.reduce(v)).collect();
    let b: Vec<u64> = b.iter().map(|&v| q.reduce(v)).collect();

    let raw_sums: Vec<BigUint> = (0..n)
        .map(|k| {
            (0..n)
                .map(|j| BigUint::from(a[j] as u128 * b[(j + k) % n] as u128))
                .sum()
        })
        .collect();
    let residues = raw_sums
        .iter()
        .map(|s| q.mul(big_mod(s, q), scale))
        .collect();
    Ok(CorrelationSeries {
        modulus: q,
        convention: conv,
        raw_sums,
        residues,
    })
}

/// Exact rational in `[0, 1)`.
pub type Expectation = Ratio<u128>;

/// `Σₖ C(k) / (N·q)`.
pub fn expectation_measure(series: &CorrelationSeries) -> Expectation {
    let total: u128 = series.residues.iter().map(|&r| r as u128).sum();
    Ratio::new(total, series.len() as u128 * series.modulus.get() as u128)
}

/// `e` rounded half-up to hundredths, e.g. `0.8749 → 87`.
pub fn hundredths(e: &Expectation) -> u128 {
    (e.numer() * 200 + e.denom()) / (2 * e.denom())
}

pub fn to_f64(e: &Expectation) -> f64 {
    *e.numer() as f64 / *e.denom() as f64
}

/// `|a - b|`.
pub fn abs_diff(a: &Expectation, b: &Expectation) -> Expectation {
    if a >= b {
        a - b
    } else {
        b - a
    }
}

/// Band in which `E(i,j) + E(j,i)` counts as complementary.
pub const COMPLEMENTARY_BAND: (u128, u128) = (95, 105);

/// One ordered pair of a cross-correlation table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairTableRow {
    /// 1-based index of the sequence whose modulus is used.
    pub source: usize,
    /// 1-based index of the shifted sequence.
    pub target: usize,
    pub modulus: Modulus,
    pub expectation: Expectation,
    pub complementary: bool,
}

/// Expectation of every ordered pair `(i, j)`, `i ≠ j`, taken modulo the
/// modulus of sequence `i`. Rows come out sorted by `(i, j)`.
pub fn pair_table(seqs: &[ResidueSequence], conv: Convention) -> Result<Vec<PairTableRow>> {
    if seqs.len() < 2 {
        return Ok(Vec::new());
    }
    let mut rows = Vec::with_capacity(seqs.len() * (seqs.len() - 1));
    for (i, a) in seqs.iter().enumerate() {
        for (j, b) in seqs.iter().enumerate() {
            if i == j {
                continue;
            }
            let series = circular_crosscorr(a.values(), b.values(), a.modulus(), conv)?;
            rows.push(PairTableRow {
                source: i + 1,
                target: j + 1,
                modulus: a.modulus(),
                expectation: expectation_measure(&series),
                complementary: false,
            });
        }
    }
    let (lo, hi) = COMPLEMENTARY_BAND;
    let band = Ratio::new(lo, 100)..=Ratio::new(hi, 100);
    let lookup: Vec<Expectation> = rows.iter().map(|r| r.expectation).collect();
    let index = |i: usize, j: usize| {
        rows.iter()
            .position(|r| r.source == i && r.target == j)
            .expect("every ordered pair is present")
    };
    let flags: Vec<bool> = rows
        .iter()
        .map(|r| {
            let sum = r.expectation + lookup[index(r.target, r.source)];
            band.contains(&sum)
        })
        .collect();
    for (row, flag) in rows.iter_mut().zip(flags) {
        row.complementary = flag;
    }
    Ok(rows)
}

/// A published expectation to compare against, in hundredths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TargetValue {
    pub source: usize,
    pub target: usize,
    pub hundredths: u128,
}

impl TargetValue {
    pub fn value(&self) -> Expectation {
        Ratio::new(self.hundredths, 100)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Deviation {
    pub source: usize,
    pub target: usize,
    pub expected: Expectation,
    pub computed: Expectation,
    pub deviation: Expectation,
}

/// How one convention compares against a set of targets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeviationProfile {
    pub convention: Convention,
    /// `Err` holds the reason the convention could not be evaluated.
    pub outcome: std::result::Result<Vec<Deviation>, String>,
}

impl DeviationProfile {
    pub fn max_deviation(&self) -> Option<Expectation> {
        self.outcome
            .as_ref()
            .ok()
            .and_then(|d| d.iter().map(|d| d.deviation).max())
    }

    pub fn all_within(&self, tolerance: Expectation) -> bool {
        self.max_deviation().is_some_and(|m| m <= tolerance)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConventionResolution {
    pub chosen: Convention,
    pub profiles: Vec<DeviationProfile>,
}

impl ConventionResolution {
    pub fn chosen_profile(&self) -> &DeviationProfile {
        self.profile(self.chosen)
    }

    pub fn profile(&self, conv: Convention) -> &DeviationProfile {
        self.profiles
            .iter()
            .find(|p| p.convention == conv)
            .expect("a profile exists for every convention")
    }

    pub fn rejected(&self) -> impl Iterator<Item = &DeviationProfile> {
        self.profiles.iter().filter(|p| p.convention != self.chosen)
    }
}

pub fn deviation_profile(
    fixtures: &[ResidueSequence],
    targets: &[TargetValue],
    conv: Convention,
) -> DeviationProfile {
    let outcome = pair_table(fixtures, conv)
        .map_err(|e| e.to_string())
        .and_then(|rows| {
            targets
                .iter()
                .map(|t| {
                    let row = rows
                        .iter()
                        .find(|r| r.source == t.source && r.target == t.target)
                        .ok_or_else(|| format!("no pair ({}, {}) in table", t.source, t.target))?;
                    Ok(Deviation {
                        source: t.source,
                        target: t.target,
                        expected: t.value(),
                        computed: row.expectation,
                        deviation: abs_diff(&t.value(), &row.expectation),
                    })
                })
                .collect()
        });
    DeviationProfile {
        convention: conv,
        outcome,
    }
}

/// Picks the convention whose pair table lies closest (by maximum absolute
/// deviation) to `targets`. Ties go to [`Convention::Raw`].
pub fn resolve_convention(
    fixtures: &[ResidueSequence],
    targets: &[TargetValue],
) -> ConventionResolution {
    let profiles: Vec<DeviationProfile> = Convention::ALL
        .iter()
        .map(|&c| deviation_profile(fixtures, targets, c))
        .collect();
    // ALL lists Raw first, so min_by_key keeps it on a tie.
    let chosen = profiles
        .iter()
        .filter_map(|p| p.max_deviation().map(|m| (p.convention, m)))
        .min_by_key(|&(_, m)| m)
        .map_or(Convention::Raw, |(c, _)| c);
    ConventionResolution { chosen, profiles }
}
