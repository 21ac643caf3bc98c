//! Published sequences and cross-correlation expectations.

use crate::arith::Modulus;
use crate::correlation::TargetValue;
use crate::io::format::SequenceFile;
use crate::nht::ResidueSequence;
use crate::search;

pub struct Fixture {
    pub name: &'static str,
    pub values: [u64; 16],
    pub modulus: u64,
    /// Whether the sequence appears in the published plots.
    pub plotted: bool,
}

pub const TABLE1: [Fixture; 6] = [
    Fixture {
        name: "example1",
        values: [
            911, 1821, 3642, 1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024, 2048, 4096,
        ],
        modulus: 7283,
        plotted: true,
    },
    Fixture {
        name: "example2",
        values: [
            12747, 3642, 7284, 14568, 7285, 14570, 7289, 14578, 7305, 14610, 7369, 14738, 7625,
            15250, 8649, 17298,
        ],
        modulus: 21851,
        plotted: true,
    },
    Fixture {
        name: "example3",
        values: [
            3, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024, 2048, 975, 1950, 779, 1558,
        ],
        modulus: 3121,
        plotted: true,
    },
    Fixture {
        name: "example4",
        values: [
            2, 2, 4, 8, 16, 32, 64, 128, 256, 181, 31, 62, 124, 248, 165, 330,
        ],
        modulus: 331,
        plotted: true,
    },
    Fixture {
        name: "example5",
        values: [11, 2, 4, 8, 16, 32, 17, 34, 21, 42, 37, 27, 7, 14, 28, 9],
        modulus: 47,
        plotted: false,
    },
    Fixture {
        name: "example6",
        values: [
            13, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024, 61, 122, 244, 488, 976,
        ],
        modulus: 1987,
        plotted: false,
    },
];

/// Seeds whose 16-value doubling chains reduce to examples 4, 3, 5 and 6.
pub const CHAIN_SEEDS: [u64; 4] = [2, 3, 11, 13];

const fn target(source: usize, target: usize, hundredths: u128) -> TargetValue {
    TargetValue {
        source,
        target,
        hundredths,
    }
}

/// Expectations for every ordered pair of examples 1–4, in published order.
pub const TABLE2: [TargetValue; 12] = [
    target(1, 2, 87),
    target(2, 1, 45),
    target(1, 3, 73),
    target(3, 1, 27),
    target(1, 4, 49),
    target(4, 1, 25),
    target(2, 3, 47),
    target(3, 2, 50),
    target(2, 4, 37),
    target(4, 2, 74),
    target(3, 4, 31),
    target(4, 3, 28),
];

impl Fixture {
    pub fn residues(&self) -> ResidueSequence {
        ResidueSequence::new(
            self.values.to_vec(),
            Modulus::new(self.modulus).expect("fixture moduli are at least 2"),
        )
        .expect("fixture values lie below their modulus")
    }

    pub fn file(&self) -> SequenceFile {
        SequenceFile::from_residues(self.name, &self.residues())
    }
}

pub fn table1_residues() -> Vec<ResidueSequence> {
    TABLE1.iter().map(Fixture::residues).collect()
}

/// Examples 1–4, the sequences cross-correlated in the published table.
pub fn table2_residues() -> Vec<ResidueSequence> {
    TABLE1[..4].iter().map(Fixture::residues).collect()
}

/// Every fixture name accepted by [`lookup`].
pub fn names() -> Vec<String> {
    TABLE1
        .iter()
        .map(|f| f.name.to_string())
        .chain(CHAIN_SEEDS.iter().map(|s| format!("chain{s}")))
        .collect()
}

/// `example1`..`example6`, or `chain2`, `chain3`, `chain11`, `chain13` for
/// the unreduced 16-value doubling chains.
pub fn lookup(name: &str) -> Option<SequenceFile> {
    if let Some(f) = TABLE1.iter().find(|f| f.name == name) {
        return Some(f.file());
    }
    let seed: u64 = name.strip_prefix("chain")?.parse().ok()?;
    if !CHAIN_SEEDS.contains(&seed) {
        return None;
    }
    let chain = search::doubling_chain(seed, 16).expect("16-value chain");
    Some(SequenceFile {
        name: name.to_string(),
        n: 16,
        values: chain
            .values()
            .iter()
            .map(|v| u64::try_from(v).expect("16-value chain fits in 64 bits"))
            .collect(),
        modulus: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_name_resolves() {
        for name in names() {
            let f = lookup(&name).unwrap();
            assert_eq!(f.name, name);
            assert_eq!(f.n, 16);
        }
        assert!(lookup("example7").is_none());
        assert!(lookup("chain5").is_none());
    }

    #[test]
    fn example1_fixture() {
        let f = lookup("example1").unwrap();
        assert_eq!(f.modulus, Some(7283));
        assert_eq!(f.values, TABLE1[0].values);
    }

    #[test]
    fn chains_are_unreduced() {
        let f = lookup("chain3").unwrap();
        assert_eq!(f.modulus, None);
        assert_eq!(f.values[15], 32768);
    }
}
