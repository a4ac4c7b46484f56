//! Monotone access structures, represented by their basis: the antichain of
//! minimal authorized subsets over participants `1..=n`.
//!
//! Builders exist for threshold, hierarchical (conjunctive and disjunctive)
//! and compartmented structures. All builders enumerate candidate subsets
//! directly, pruned by the subset size minimal elements must have; desk-scale
//! participant counts are the target, the per-subset cost of the scheme
//! itself is what dominates.

use std::fmt;

use itertools::Itertools;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AccessError {
    #[error("participant index must be at least 1")]
    ZeroParticipant,
    #[error("participant {id} is out of range for n = {n}")]
    ParticipantOutOfRange { id: u16, n: u16 },
    #[error("subset of participants must not be empty")]
    EmptySubset,
    #[error("duplicate participant {0} in subset")]
    DuplicateParticipant(u16),
    #[error("family of subsets must not be empty")]
    EmptyFamily,
    #[error("not an antichain: {contained} is a proper subset of {containing} (run minimize to normalize)")]
    NotAntichain { contained: String, containing: String },
    #[error("duplicate subset {0} in basis")]
    DuplicateSubset(String),
    #[error("access structure has no authorized subsets")]
    EmptyStructure,
    #[error("threshold {t_plus_1} out of range 1..={n}")]
    ThresholdOutOfRange { t_plus_1: u16, n: u16 },
    #[error("participant {0} appears in more than one level or compartment")]
    OverlappingParts(u16),
    #[error("participant {id} of 1..={n} is not assigned to any level or compartment")]
    UncoveredParticipant { id: u16, n: u16 },
    #[error("expected {expected} thresholds for {expected} parts, got {got}")]
    ThresholdCountMismatch { expected: usize, got: usize },
    #[error("level thresholds must be positive and strictly increasing")]
    ThresholdsNotIncreasing,
    #[error("compartment {0} is empty")]
    EmptyCompartment(usize),
    #[error("compartment threshold {t_i} exceeds compartment size {size}")]
    CompartmentThresholdTooLarge { t_i: u16, size: usize },
    #[error("overall threshold {t} must be at least 1 and at least the sum {sum} of compartment thresholds")]
    OverallThresholdTooSmall { t: u16, sum: u16 },
    #[error("overall threshold {t} exceeds participant count {n}")]
    OverallThresholdTooLarge { t: u16, n: u16 },
    #[error("malformed subset key {0:?}")]
    MalformedKey(String),
}

/// 1-based participant index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParticipantId(u16);

impl ParticipantId {
    pub fn new(index: u16) -> Result<Self, AccessError> {
        if index == 0 {
            return Err(AccessError::ZeroParticipant);
        }
        Ok(ParticipantId(index))
    }

    pub fn index(self) -> u16 {
        self.0
    }
}

impl fmt::Display for ParticipantId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A non-empty set of participants, kept in ascending order (the canonical
/// form). Construction sorts its input and rejects duplicates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subset(Vec<ParticipantId>);

impl Subset {
    pub fn new(members: impl IntoIterator<Item = u16>) -> Result<Self, AccessError> {
        let mut ids = members
            .into_iter()
            .map(ParticipantId::new)
            .collect::<Result<Vec<_>, _>>()?;
        if ids.is_empty() {
            return Err(AccessError::EmptySubset);
        }
        ids.sort_unstable();
        for pair in ids.windows(2) {
            if pair[0] == pair[1] {
                return Err(AccessError::DuplicateParticipant(pair[0].index()));
            }
        }
        Ok(Subset(ids))
    }

    pub fn members(&self) -> &[ParticipantId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty() // construction rejects empty subsets
    }

    pub fn contains(&self, id: ParticipantId) -> bool {
        self.0.binary_search(&id).is_ok()
    }

    pub fn is_subset_of(&self, other: &Subset) -> bool {
        self.0.iter().all(|id| other.contains(*id))
    }

    pub fn max_id(&self) -> u16 {
        self.0.last().expect("subset is non-empty").index()
    }

    /// Canonical key: ascending decimal indices joined by `,`, e.g. `"1,3,5"`.
    /// The separator keeps keys unambiguous once indices reach two digits.
    pub fn key(&self) -> String {
        self.0.iter().map(|id| id.to_string()).join(",")
    }

    /// Parses a canonical key back into a subset.
    pub fn parse_key(key: &str) -> Result<Self, AccessError> {
        let ids = key
            .split(',')
            .map(|part| {
                part.parse::<u16>()
                    .map_err(|_| AccessError::MalformedKey(key.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let subset = Subset::new(ids)?;
        if subset.key() != key {
            // non-canonical order or formatting
            return Err(AccessError::MalformedKey(key.to_string()));
        }
        Ok(subset)
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.key())
    }
}

fn check_in_range(subset: &Subset, n: u16) -> Result<(), AccessError> {
    if subset.max_id() > n {
        return Err(AccessError::ParticipantOutOfRange {
            id: subset.max_id(),
            n,
        });
    }
    Ok(())
}

/// The basis of a monotone access structure: the inclusion-minimal authorized
/// subsets, held in lexicographic order. The full structure is the monotone
/// closure (all supersets) of these.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccessStructureBasis {
    n: u16,
    minimal_subsets: Vec<Subset>,
}

impl AccessStructureBasis {
    /// Builds a basis from subsets that must already form an antichain.
    /// A family that is not an antichain is rejected rather than repaired;
    /// [`AccessStructureBasis::minimize`] is the explicit normalization path.
    pub fn new(n: u16, mut subsets: Vec<Subset>) -> Result<Self, AccessError> {
        if subsets.is_empty() {
            return Err(AccessError::EmptyStructure);
        }
        for s in &subsets {
            check_in_range(s, n)?;
        }
        subsets.sort();
        for pair in subsets.windows(2) {
            if pair[0] == pair[1] {
                return Err(AccessError::DuplicateSubset(pair[0].to_string()));
            }
        }
        for a in &subsets {
            for b in &subsets {
                if a != b && a.is_subset_of(b) {
                    return Err(AccessError::NotAntichain {
                        contained: a.to_string(),
                        containing: b.to_string(),
                    });
                }
            }
        }
        Ok(AccessStructureBasis {
            n,
            minimal_subsets: subsets,
        })
    }

    /// Reduces an arbitrary family to its antichain of inclusion-minimal
    /// elements, deduplicated and canonically ordered.
    pub fn minimize(family: &[Subset], n: u16) -> Result<Self, AccessError> {
        if family.is_empty() {
            return Err(AccessError::EmptyFamily);
        }
        for s in family {
            check_in_range(s, n)?;
        }
        let mut unique: Vec<Subset> = family.to_vec();
        unique.sort();
        unique.dedup();
        let minimal: Vec<Subset> = unique
            .iter()
            .filter(|a| !unique.iter().any(|b| b != *a && b.is_subset_of(a)))
            .cloned()
            .collect();
        AccessStructureBasis::new(n, minimal)
    }

    /// The `(t+1, n)` threshold basis: every subset of size exactly `t+1`.
    pub fn threshold(t_plus_1: u16, n: u16) -> Result<Self, AccessError> {
        if t_plus_1 < 1 || t_plus_1 > n {
            return Err(AccessError::ThresholdOutOfRange { t_plus_1, n });
        }
        let subsets: Vec<Subset> = (1..=n)
            .combinations(t_plus_1 as usize)
            .map(|ids| Subset::new(ids).expect("combinations are valid subsets"))
            .collect();
        AccessStructureBasis::new(n, subsets)
    }

    /// Basis of a hierarchical threshold structure.
    ///
    /// Conjunctive mode requires, for every level `i`, at least `k_i`
    /// participants drawn from levels `1..=i` combined; disjunctive mode
    /// requires that for at least one level. In conjunctive mode every
    /// minimal subset has size exactly `k_m`: a larger authorized subset can
    /// always drop a member of its deepest occupied level, and a smaller one
    /// fails the final cumulative threshold.
    pub fn hierarchical(spec: &HierarchicalSpec) -> Result<Self, AccessError> {
        let n = spec.n;
        let level_of = spec.part_index_by_id();
        let m = spec.levels.len();
        match spec.mode {
            HierarchicalMode::Conjunctive => {
                let k_m = *spec.thresholds.last().expect("validated non-empty");
                if k_m > n {
                    return Err(AccessError::EmptyStructure);
                }
                let subsets: Vec<Subset> = (1..=n)
                    .combinations(k_m as usize)
                    .filter(|ids| {
                        let mut per_level = vec![0u16; m];
                        for id in ids {
                            per_level[level_of[*id as usize]] += 1;
                        }
                        let mut cumulative = 0u16;
                        spec.thresholds.iter().enumerate().all(|(i, k_i)| {
                            cumulative += per_level[i];
                            cumulative >= *k_i
                        })
                    })
                    .map(|ids| Subset::new(ids).expect("combinations are valid subsets"))
                    .collect();
                if subsets.is_empty() {
                    return Err(AccessError::EmptyStructure);
                }
                AccessStructureBasis::new(n, subsets)
            }
            HierarchicalMode::Disjunctive => {
                // Minimal subsets satisfying condition i alone are exactly the
                // k_i-sized subsets of the cumulative union; minimize across
                // conditions.
                let mut family: Vec<Subset> = Vec::new();
                let mut cumulative: Vec<u16> = Vec::new();
                for (i, level) in spec.levels.iter().enumerate() {
                    cumulative.extend(level.iter().map(|id| id.index()));
                    cumulative.sort_unstable();
                    let k_i = spec.thresholds[i] as usize;
                    if k_i <= cumulative.len() {
                        family.extend(
                            cumulative
                                .iter()
                                .copied()
                                .combinations(k_i)
                                .map(|ids| Subset::new(ids).expect("valid subset")),
                        );
                    }
                }
                if family.is_empty() {
                    return Err(AccessError::EmptyStructure);
                }
                AccessStructureBasis::minimize(&family, n)
            }
        }
    }

    /// Basis of a compartmented structure: at least `t_i` members from each
    /// compartment and at least `t` overall. Minimal subsets have size
    /// exactly `t`, since `t >= sum(t_i)` lets any surplus member be dropped.
    pub fn compartment(spec: &CompartmentSpec) -> Result<Self, AccessError> {
        let n = spec.n;
        let comp_of = spec.part_index_by_id();
        let m = spec.compartments.len();
        let subsets: Vec<Subset> = (1..=n)
            .combinations(spec.overall as usize)
            .filter(|ids| {
                let mut per_comp = vec![0u16; m];
                for id in ids {
                    per_comp[comp_of[*id as usize]] += 1;
                }
                per_comp
                    .iter()
                    .zip(&spec.per_thresholds)
                    .all(|(have, need)| have >= need)
            })
            .map(|ids| Subset::new(ids).expect("combinations are valid subsets"))
            .collect();
        if subsets.is_empty() {
            return Err(AccessError::EmptyStructure);
        }
        AccessStructureBasis::new(n, subsets)
    }

    pub fn n(&self) -> u16 {
        self.n
    }

    pub fn minimal_subsets(&self) -> &[Subset] {
        &self.minimal_subsets
    }

    pub fn len(&self) -> usize {
        self.minimal_subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.minimal_subsets.is_empty() // construction rejects empty bases
    }

    /// True iff `s` contains some minimal authorized subset, i.e. `s` lies in
    /// the monotone closure of the basis.
    pub fn is_authorized(&self, s: &Subset) -> Result<bool, AccessError> {
        check_in_range(s, self.n)?;
        Ok(self.minimal_subsets.iter().any(|min| min.is_subset_of(s)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HierarchicalMode {
    Conjunctive,
    Disjunctive,
}

/// An ordered partition of `1..=n` into levels with strictly increasing
/// cumulative thresholds `k_1 < k_2 < ... < k_m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HierarchicalSpec {
    n: u16,
    levels: Vec<Vec<ParticipantId>>,
    thresholds: Vec<u16>,
    mode: HierarchicalMode,
}

impl HierarchicalSpec {
    pub fn new(
        n: u16,
        levels: Vec<Vec<u16>>,
        thresholds: Vec<u16>,
        mode: HierarchicalMode,
    ) -> Result<Self, AccessError> {
        let levels = validate_partition(n, &levels, true)?;
        if thresholds.len() != levels.len() {
            return Err(AccessError::ThresholdCountMismatch {
                expected: levels.len(),
                got: thresholds.len(),
            });
        }
        if thresholds[0] == 0 || thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(AccessError::ThresholdsNotIncreasing);
        }
        Ok(HierarchicalSpec {
            n,
            levels,
            thresholds,
            mode,
        })
    }

    pub fn n(&self) -> u16 {
        self.n
    }

    pub fn levels(&self) -> &[Vec<ParticipantId>] {
        &self.levels
    }

    pub fn thresholds(&self) -> &[u16] {
        &self.thresholds
    }

    pub fn mode(&self) -> HierarchicalMode {
        self.mode
    }

    /// Soft validation findings. Empty levels are accepted but unusual, so
    /// they are reported here rather than rejected.
    pub fn warnings(&self) -> Vec<String> {
        self.levels
            .iter()
            .enumerate()
            .filter(|(_, level)| level.is_empty())
            .map(|(i, _)| format!("level {} is empty", i + 1))
            .collect()
    }

    fn part_index_by_id(&self) -> Vec<usize> {
        part_index_by_id(self.n, &self.levels)
    }
}

/// An ordered partition of `1..=n` into compartments with per-compartment
/// thresholds `t_i` and an overall threshold `t >= sum(t_i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompartmentSpec {
    n: u16,
    compartments: Vec<Vec<ParticipantId>>,
    per_thresholds: Vec<u16>,
    overall: u16,
}

impl CompartmentSpec {
    pub fn new(
        n: u16,
        compartments: Vec<Vec<u16>>,
        per_thresholds: Vec<u16>,
        overall: u16,
    ) -> Result<Self, AccessError> {
        let compartments = validate_partition(n, &compartments, false)?;
        if per_thresholds.len() != compartments.len() {
            return Err(AccessError::ThresholdCountMismatch {
                expected: compartments.len(),
                got: per_thresholds.len(),
            });
        }
        for (t_i, comp) in per_thresholds.iter().zip(&compartments) {
            if usize::from(*t_i) > comp.len() {
                return Err(AccessError::CompartmentThresholdTooLarge {
                    t_i: *t_i,
                    size: comp.len(),
                });
            }
        }
        let sum: u16 = per_thresholds.iter().sum();
        if overall < sum || overall == 0 {
            return Err(AccessError::OverallThresholdTooSmall { t: overall, sum });
        }
        if overall > n {
            return Err(AccessError::OverallThresholdTooLarge { t: overall, n });
        }
        Ok(CompartmentSpec {
            n,
            compartments,
            per_thresholds,
            overall,
        })
    }

    pub fn n(&self) -> u16 {
        self.n
    }

    pub fn compartments(&self) -> &[Vec<ParticipantId>] {
        &self.compartments
    }

    pub fn per_thresholds(&self) -> &[u16] {
        &self.per_thresholds
    }

    pub fn overall(&self) -> u16 {
        self.overall
    }

    fn part_index_by_id(&self) -> Vec<usize> {
        part_index_by_id(self.n, &self.compartments)
    }
}

/// Checks that `parts` are pairwise disjoint and together cover `1..=n`.
fn validate_partition(
    n: u16,
    parts: &[Vec<u16>],
    allow_empty: bool,
) -> Result<Vec<Vec<ParticipantId>>, AccessError> {
    let mut seen = vec![false; n as usize + 1];
    let mut out = Vec::with_capacity(parts.len());
    for (i, part) in parts.iter().enumerate() {
        if part.is_empty() && !allow_empty {
            return Err(AccessError::EmptyCompartment(i + 1));
        }
        let mut ids = Vec::with_capacity(part.len());
        for &raw in part {
            let id = ParticipantId::new(raw)?;
            if id.index() > n {
                return Err(AccessError::ParticipantOutOfRange { id: id.index(), n });
            }
            if seen[id.index() as usize] {
                return Err(AccessError::OverlappingParts(id.index()));
            }
            seen[id.index() as usize] = true;
            ids.push(id);
        }
        ids.sort_unstable();
        out.push(ids);
    }
    for id in 1..=n {
        if !seen[id as usize] {
            return Err(AccessError::UncoveredParticipant { id, n });
        }
    }
    Ok(out)
}

fn part_index_by_id(n: u16, parts: &[Vec<ParticipantId>]) -> Vec<usize> {
    let mut index = vec![usize::MAX; n as usize + 1];
    for (i, part) in parts.iter().enumerate() {
        for id in part {
            index[id.index() as usize] = i;
        }
    }
    index
}
