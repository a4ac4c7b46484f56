//! Hash-based secret sharing over a public control area.
//!
//! The dealer hands every participant an independent random share of digest
//! length. For each minimal authorized subset the concatenation of its
//! members' shares (in participant order) is hashed, and the public control
//! area stores the XOR of that digest with the secret. Any minimal authorized
//! subset recovers the secret with one hash and one XOR; the control area by
//! itself pins down nothing about the shares.
//!
//! Shares and the secret have exactly the digest length, so the scheme is
//! ideal; all heavy lifting is the hash function. Refreshing re-deals fresh
//! shares around the same secret, and hash commitments to the individual
//! shares make the scheme verifiable.

use std::collections::BTreeMap;

use rand::{CryptoRng, RngCore};
use rayon::prelude::*;
use sha2::{Digest, Sha256, Sha512};
use thiserror::Error;

use crate::access::{AccessStructureBasis, ParticipantId, Subset};

/// Prefix byte for share commitments. Commitments must not reuse the plain
/// scheme hash: with a singleton minimal subset, an unprefixed commitment to
/// that share would equal the subset digest and the control value would then
/// reveal the secret.
const COMMITMENT_PREFIX: u8 = 0x02;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HssError {
    #[error("unknown hash algorithm {0:?}")]
    UnknownAlgorithm(String),
    #[error("truncation must be a whole number of bytes between 8 and 32 bits, got {0}")]
    InvalidTruncation(u32),
    #[error("digest length {got} does not match {algorithm} (native {native} bytes)")]
    DigestLengthMismatch {
        algorithm: String,
        native: usize,
        got: usize,
    },
    #[error("fixed secret must be {expected} bytes, got {got}")]
    BadSecretLength { expected: usize, got: usize },
    #[error("share for participant {participant} must be {expected} bytes, got {got}")]
    WrongShareLength {
        participant: u16,
        expected: usize,
        got: usize,
    },
    #[error("missing share for participant {0}")]
    MissingShare(u16),
    #[error("share for participant {0} does not belong to the subset")]
    UnexpectedShare(u16),
    #[error("duplicate share for participant {0}")]
    DuplicateShare(u16),
    #[error("no control entry for key {0:?}: the subset is not a minimal authorized subset (reduce a larger authorized set to a contained basis element first)")]
    UnknownControlKey(String),
    #[error("subset is not authorized")]
    NotAuthorized,
    #[error("control area carries no commitments")]
    CommitmentsAbsent,
    #[error("no commitment recorded for participant {0}")]
    MissingCommitment(u16),
    #[error("commitment for participant {participant} must be {expected} bytes, got {got}")]
    WrongCommitmentLength {
        participant: u16,
        expected: usize,
        got: usize,
    },
    #[error("scheme version would overflow")]
    VersionOverflow,
    #[error("control value for key {key:?} must be {expected} bytes, got {got}")]
    WrongControlLength {
        key: String,
        expected: usize,
        got: usize,
    },
    #[error(transparent)]
    Access(#[from] crate::access::AccessError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HashAlgorithm {
    Sha256,
    Sha512,
}

impl HashAlgorithm {
    pub fn id(self) -> &'static str {
        match self {
            HashAlgorithm::Sha256 => "sha-256",
            HashAlgorithm::Sha512 => "sha-512",
        }
    }

    pub fn from_id(id: &str) -> Result<Self, HssError> {
        match id {
            "sha-256" => Ok(HashAlgorithm::Sha256),
            "sha-512" => Ok(HashAlgorithm::Sha512),
            other => Err(HssError::UnknownAlgorithm(other.to_string())),
        }
    }

    pub fn native_digest_len(self) -> usize {
        match self {
            HashAlgorithm::Sha256 => 32,
            HashAlgorithm::Sha512 => 64,
        }
    }

    fn digest(self, data: &[u8]) -> Vec<u8> {
        match self {
            HashAlgorithm::Sha256 => Sha256::digest(data).to_vec(),
            HashAlgorithm::Sha512 => Sha512::digest(data).to_vec(),
        }
    }
}

/// The hash a scheme runs on. The algorithm is pluggable, and for demo-scale
/// experiments the digest may be truncated to a few bytes; real schemes leave
/// `truncation_bits` unset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HashSpec {
    algorithm: HashAlgorithm,
    truncation_bits: Option<u32>,
}

impl HashSpec {
    pub fn sha256() -> Self {
        HashSpec {
            algorithm: HashAlgorithm::Sha256,
            truncation_bits: None,
        }
    }

    pub fn new(algorithm: HashAlgorithm) -> Self {
        HashSpec {
            algorithm,
            truncation_bits: None,
        }
    }

    /// A truncated variant for demo-scale schemes. Shares are byte strings,
    /// so the width must be a whole number of bytes, at most 32 bits.
    pub fn truncated(algorithm: HashAlgorithm, bits: u32) -> Result<Self, HssError> {
        if !(8..=32).contains(&bits) || !bits.is_multiple_of(8) {
            return Err(HssError::InvalidTruncation(bits));
        }
        Ok(HashSpec {
            algorithm,
            truncation_bits: Some(bits),
        })
    }

    /// Reconstructs a spec from an algorithm id and the digest length
    /// recorded alongside it (shorter than native means truncated).
    pub fn from_parts(id: &str, digest_len: usize) -> Result<Self, HssError> {
        let algorithm = HashAlgorithm::from_id(id)?;
        let native = algorithm.native_digest_len();
        if digest_len == native {
            Ok(HashSpec::new(algorithm))
        } else if digest_len < native {
            HashSpec::truncated(algorithm, (digest_len * 8) as u32)
        } else {
            Err(HssError::DigestLengthMismatch {
                algorithm: id.to_string(),
                native,
                got: digest_len,
            })
        }
    }

    pub fn algorithm(&self) -> HashAlgorithm {
        self.algorithm
    }

    pub fn algorithm_id(&self) -> &'static str {
        self.algorithm.id()
    }

    pub fn truncation_bits(&self) -> Option<u32> {
        self.truncation_bits
    }

    /// Digest length in bytes; this is the share and secret length `L`.
    pub fn digest_len(&self) -> usize {
        match self.truncation_bits {
            Some(bits) => bits as usize / 8,
            None => self.algorithm.native_digest_len(),
        }
    }

    pub fn digest(&self, data: &[u8]) -> Vec<u8> {
        let mut out = self.algorithm.digest(data);
        out.truncate(self.digest_len());
        out
    }

    fn commit(&self, share_bytes: &[u8]) -> Vec<u8> {
        let mut buf = Vec::with_capacity(1 + share_bytes.len());
        buf.push(COMMITMENT_PREFIX);
        buf.extend_from_slice(share_bytes);
        self.digest(&buf)
    }
}

impl Default for HashSpec {
    fn default() -> Self {
        HashSpec::sha256()
    }
}

/// Best-effort zeroization that the optimizer is not allowed to elide.
pub(crate) fn wipe(bytes: &mut [u8]) {
    for b in bytes.iter_mut() {
        // SAFETY: `b` is a valid &mut u8.
        unsafe { std::ptr::write_volatile(b, 0) };
    }
    std::sync::atomic::compiler_fence(std::sync::atomic::Ordering::SeqCst);
}

/// A participant's private share: a random byte string of digest length.
/// The buffer is zeroized on drop (best effort; earlier copies made by the
/// allocator are out of reach).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Share {
    participant: ParticipantId,
    bytes: Vec<u8>,
}

impl Share {
    pub fn new(participant: ParticipantId, bytes: Vec<u8>) -> Self {
        Share {
            participant,
            bytes,
        }
    }

    pub fn participant(&self) -> ParticipantId {
        self.participant
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn len(&self) -> usize {
        self.bytes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bytes.is_empty()
    }
}

impl Drop for Share {
    fn drop(&mut self) {
        wipe(&mut self.bytes);
    }
}

/// The secret: a digest-length byte string. Zeroized on drop like [`Share`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SecretDigest(Vec<u8>);

impl SecretDigest {
    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        SecretDigest(bytes)
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }
}

impl Drop for SecretDigest {
    fn drop(&mut self) {
        wipe(&mut self.0);
    }
}

/// One public control value: the subset key and the XOR mask that herds the
/// subset's digest to the secret.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ControlEntry {
    key: String,
    value: Vec<u8>,
}

impl ControlEntry {
    pub fn key(&self) -> &str {
        &self.key
    }

    pub fn value(&self) -> &[u8] {
        &self.value
    }
}

/// Everything public: scheme metadata, the basis, one control value per
/// minimal authorized subset, and optionally a commitment per share.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicControlArea {
    version: u32,
    hash_spec: HashSpec,
    basis: AccessStructureBasis,
    entries: BTreeMap<String, ControlEntry>,
    commitments: Option<BTreeMap<ParticipantId, Vec<u8>>>,
}

impl PublicControlArea {
    /// Assembles a control area from parts, checking completeness: exactly
    /// one entry per basis element and digest-length values throughout.
    pub fn from_parts(
        version: u32,
        hash_spec: HashSpec,
        basis: AccessStructureBasis,
        values: Vec<(String, Vec<u8>)>,
        commitments: Option<BTreeMap<ParticipantId, Vec<u8>>>,
    ) -> Result<Self, HssError> {
        let digest_len = hash_spec.digest_len();
        let mut entries = BTreeMap::new();
        for (key, value) in values {
            if value.len() != digest_len {
                return Err(HssError::WrongControlLength {
                    key,
                    expected: digest_len,
                    got: value.len(),
                });
            }
            if entries
                .insert(key.clone(), ControlEntry { key: key.clone(), value })
                .is_some()
            {
                return Err(HssError::UnknownControlKey(key));
            }
        }
        if entries.len() != basis.len() {
            return Err(HssError::UnknownControlKey(format!(
                "{} entries for {} basis elements",
                entries.len(),
                basis.len()
            )));
        }
        for subset in basis.minimal_subsets() {
            if !entries.contains_key(&subset.key()) {
                return Err(HssError::UnknownControlKey(subset.key()));
            }
        }
        let mut area = PublicControlArea {
            version,
            hash_spec,
            basis,
            entries,
            commitments: None,
        };
        if let Some(map) = commitments {
            area.attach_commitments(map)?;
        }
        Ok(area)
    }

    pub fn version(&self) -> u32 {
        self.version
    }

    pub fn hash_spec(&self) -> &HashSpec {
        &self.hash_spec
    }

    pub fn n(&self) -> u16 {
        self.basis.n()
    }

    pub fn digest_len(&self) -> usize {
        self.hash_spec.digest_len()
    }

    pub fn basis(&self) -> &AccessStructureBasis {
        &self.basis
    }

    pub fn entries(&self) -> impl Iterator<Item = &ControlEntry> {
        self.basis
            .minimal_subsets()
            .iter()
            .map(|s| &self.entries[&s.key()])
    }

    pub fn entry(&self, key: &str) -> Option<&ControlEntry> {
        self.entries.get(key)
    }

    pub fn commitments(&self) -> Option<&BTreeMap<ParticipantId, Vec<u8>>> {
        self.commitments.as_ref()
    }

    /// Stores one commitment per participant `1..=n`.
    pub fn attach_commitments(
        &mut self,
        map: BTreeMap<ParticipantId, Vec<u8>>,
    ) -> Result<(), HssError> {
        let digest_len = self.digest_len();
        for id in 1..=self.n() {
            let pid = ParticipantId::new(id)?;
            let value = map.get(&pid).ok_or(HssError::MissingCommitment(id))?;
            if value.len() != digest_len {
                return Err(HssError::WrongCommitmentLength {
                    participant: id,
                    expected: digest_len,
                    got: value.len(),
                });
            }
        }
        if map.len() != usize::from(self.n()) {
            let extra = map
                .keys()
                .find(|pid| pid.index() > self.n())
                .map(|pid| pid.index())
                .unwrap_or(0);
            return Err(HssError::UnexpectedShare(extra));
        }
        self.commitments = Some(map);
        Ok(())
    }
}

/// Where the dealer's secret came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SecretSource {
    /// Caller-supplied secret.
    Fixed,
    /// No secret was supplied, so it was set to the first subset's digest.
    /// The first control value is then all zeros, which publicly reveals
    /// that the secret equals that digest — callers should surface this.
    DerivedFromFirstSubset,
}

/// The dealer's complete output. The secret and shares are to be delivered
/// out of band and then destroyed; both are zeroized when this is dropped.
#[derive(Debug, Clone)]
pub struct DealerOutput {
    shares: Vec<Share>,
    public: PublicControlArea,
    secret: SecretDigest,
    secret_source: SecretSource,
}

impl DealerOutput {
    pub fn shares(&self) -> &[Share] {
        &self.shares
    }

    pub fn share_for(&self, participant: ParticipantId) -> Option<&Share> {
        self.shares
            .iter()
            .find(|s| s.participant() == participant)
    }

    pub fn public(&self) -> &PublicControlArea {
        &self.public
    }

    pub fn secret(&self) -> &SecretDigest {
        &self.secret
    }

    pub fn secret_source(&self) -> SecretSource {
        self.secret_source
    }
}

fn xor(a: &[u8], b: &[u8]) -> Vec<u8> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x ^ y).collect()
}

/// Concatenates the subset's shares in ascending participant order. Input
/// order does not matter, but the shares must be exactly the subset's
/// members, each of length `digest_len`.
pub fn private_message(
    shares: &[Share],
    subset: &Subset,
    digest_len: usize,
) -> Result<Vec<u8>, HssError> {
    let mut by_participant: Vec<&Share> = shares.iter().collect();
    by_participant.sort_by_key(|s| s.participant());
    for pair in by_participant.windows(2) {
        if pair[0].participant() == pair[1].participant() {
            return Err(HssError::DuplicateShare(pair[0].participant().index()));
        }
    }
    for share in &by_participant {
        if !subset.contains(share.participant()) {
            return Err(HssError::UnexpectedShare(share.participant().index()));
        }
    }
    if by_participant.len() != subset.len() {
        let missing = subset
            .members()
            .iter()
            .find(|id| !by_participant.iter().any(|s| s.participant() == **id))
            .expect("some member lacks a share");
        return Err(HssError::MissingShare(missing.index()));
    }
    let mut message = Vec::with_capacity(subset.len() * digest_len);
    for share in by_participant {
        if share.len() != digest_len {
            return Err(HssError::WrongShareLength {
                participant: share.participant().index(),
                expected: digest_len,
                got: share.len(),
            });
        }
        message.extend_from_slice(share.bytes());
    }
    Ok(message)
}

/// Dealer setup: draws one uniform random share per participant, then herds
/// every minimal authorized subset's digest to the secret via public XOR
/// control values. Without a fixed secret, the secret becomes the first
/// subset's digest (making that control value all zeros — see
/// [`SecretSource::DerivedFromFirstSubset`]).
pub fn setup<R: RngCore + CryptoRng>(
    basis: &AccessStructureBasis,
    hash: &HashSpec,
    fixed_secret: Option<&[u8]>,
    rng: &mut R,
) -> Result<DealerOutput, HssError> {
    setup_at_version(basis, hash, fixed_secret, 1, rng)
}

fn setup_at_version<R: RngCore + CryptoRng>(
    basis: &AccessStructureBasis,
    hash: &HashSpec,
    fixed_secret: Option<&[u8]>,
    version: u32,
    rng: &mut R,
) -> Result<DealerOutput, HssError> {
    let digest_len = hash.digest_len();
    if let Some(secret) = fixed_secret {
        if secret.len() != digest_len {
            return Err(HssError::BadSecretLength {
                expected: digest_len,
                got: secret.len(),
            });
        }
    }

    let shares: Vec<Share> = (1..=basis.n())
        .map(|id| {
            let mut bytes = vec![0u8; digest_len];
            rng.fill_bytes(&mut bytes);
            Ok(Share::new(ParticipantId::new(id)?, bytes))
        })
        .collect::<Result<_, HssError>>()?;

    // Per-subset hashing is pure and consumes no randomness, so it can run
    // in parallel; the collected order follows the basis regardless.
    let subset_digests: Vec<Vec<u8>> = basis
        .minimal_subsets()
        .par_iter()
        .map(|subset| {
            let mut message = Vec::with_capacity(subset.len() * digest_len);
            for id in subset.members() {
                message.extend_from_slice(shares[usize::from(id.index()) - 1].bytes());
            }
            hash.digest(&message)
        })
        .collect();

    let (secret_bytes, secret_source) = match fixed_secret {
        Some(secret) => (secret.to_vec(), SecretSource::Fixed),
        None => (
            subset_digests[0].clone(),
            SecretSource::DerivedFromFirstSubset,
        ),
    };

    let values: Vec<(String, Vec<u8>)> = basis
        .minimal_subsets()
        .iter()
        .zip(&subset_digests)
        .map(|(subset, digest)| (subset.key(), xor(digest, &secret_bytes)))
        .collect();

    let public = PublicControlArea::from_parts(version, hash.clone(), basis.clone(), values, None)?;
    Ok(DealerOutput {
        shares,
        public,
        secret: SecretDigest::from_bytes(secret_bytes),
        secret_source,
    })
}

/// Recovers the secret for an exact minimal authorized subset: hash the
/// concatenated shares and XOR with the subset's control value. Callers
/// holding a larger authorized set reduce it first via [`reduce_to_basis`].
pub fn recover(
    shares: &[Share],
    subset: &Subset,
    public: &PublicControlArea,
) -> Result<SecretDigest, HssError> {
    let entry = public
        .entry(&subset.key())
        .ok_or_else(|| HssError::UnknownControlKey(subset.key()))?;
    let message = private_message(shares, subset, public.digest_len())?;
    let digest = public.hash_spec().digest(&message);
    Ok(SecretDigest::from_bytes(xor(&digest, entry.value())))
}

/// Picks the lexicographically first basis element contained in `s`.
pub fn reduce_to_basis(
    s: &Subset,
    basis: &AccessStructureBasis,
) -> Result<Subset, HssError> {
    basis
        .minimal_subsets()
        .iter()
        .find(|min| min.is_subset_of(s))
        .cloned()
        .ok_or(HssError::NotAuthorized)
}

/// Proactive refresh: recover the secret through one authorized subset, then
/// re-deal fresh shares around the same secret. The version increments and,
/// when the old area carried commitments, new ones are published for the
/// fresh shares.
pub fn refresh<R: RngCore + CryptoRng>(
    public: &PublicControlArea,
    recovering_shares: &[Share],
    recovering_subset: &Subset,
    rng: &mut R,
) -> Result<DealerOutput, HssError> {
    let secret = recover(recovering_shares, recovering_subset, public)?;
    let version = public
        .version()
        .checked_add(1)
        .ok_or(HssError::VersionOverflow)?;
    let mut out = setup_at_version(
        public.basis(),
        public.hash_spec(),
        Some(secret.as_bytes()),
        version,
        rng,
    )?;
    if public.commitments().is_some() {
        let map = commit_shares(out.shares(), public.hash_spec())?;
        out.public.attach_commitments(map)?;
    }
    Ok(out)
}

/// Commits to each share with a domain-separated hash (`0x02 || share`),
/// suitable for publication in the control area.
pub fn commit_shares(
    shares: &[Share],
    hash: &HashSpec,
) -> Result<BTreeMap<ParticipantId, Vec<u8>>, HssError> {
    let mut map = BTreeMap::new();
    for share in shares {
        if map
            .insert(share.participant(), hash.commit(share.bytes()))
            .is_some()
        {
            return Err(HssError::DuplicateShare(share.participant().index()));
        }
    }
    Ok(map)
}

/// Checks a share against its published commitment. Absent commitments are
/// an error, not a failed verification.
pub fn verify_share(share: &Share, public: &PublicControlArea) -> Result<bool, HssError> {
    let commitments = public.commitments().ok_or(HssError::CommitmentsAbsent)?;
    let expected = commitments
        .get(&share.participant())
        .ok_or(HssError::MissingCommitment(share.participant().index()))?;
    Ok(&public.hash_spec().commit(share.bytes()) == expected)
}
