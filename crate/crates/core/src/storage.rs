//! JSON persistence for the control area and share files.
//!
//! Emission is canonical — fixed field order, lowercase hex, entries keyed
//! in basis order — so `emit(parse(emit(x)))` reproduces the exact bytes.
//! A random `scheme_id` on both file kinds binds shares to the control area
//! they were dealt against; the version field gates refresh generations.

use std::collections::BTreeMap;

use rand::{CryptoRng, RngCore};
use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::access::{AccessStructureBasis, ParticipantId, Subset};
use crate::hss::{HashSpec, PublicControlArea, Share};

#[derive(Debug, Error)]
pub enum StorageError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("field {field} holds invalid hex: {source}")]
    BadHex {
        field: String,
        source: hex::FromHexError,
    },
    #[error("field {field} must decode to {expected} bytes, got {got}")]
    WrongHexLength {
        field: String,
        expected: usize,
        got: usize,
    },
    #[error("version must be at least 1")]
    VersionZero,
    #[error("duplicate key {0:?}")]
    DuplicateKey(String),
    #[error("entry keys do not match the basis: {0}")]
    EntryKeyMismatch(String),
    #[error("commitment keys must be participant indices 1..={n}: {key:?}")]
    BadCommitmentKey { key: String, n: u16 },
    #[error("expected one commitment per participant, got {got} for n={n}")]
    CommitmentCountMismatch { got: usize, n: u16 },
    #[error(transparent)]
    Access(#[from] crate::access::AccessError),
    #[error(transparent)]
    Hss(#[from] crate::hss::HssError),
}

/// A JSON object whose key order is significant. Serialization preserves
/// the stored order; deserialization preserves file order and rejects
/// duplicate keys.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OrderedHexMap(Vec<(String, String)>);

impl OrderedHexMap {
    pub fn new(pairs: Vec<(String, String)>) -> Self {
        OrderedHexMap(pairs)
    }

    pub fn pairs(&self) -> &[(String, String)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

impl Serialize for OrderedHexMap {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for OrderedHexMap {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct OrderedVisitor;

        impl<'de> Visitor<'de> for OrderedVisitor {
            type Value = OrderedHexMap;

            fn expecting(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                f.write_str("an object of hex strings")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<Self::Value, A::Error> {
                let mut pairs: Vec<(String, String)> = Vec::new();
                while let Some((key, value)) = access.next_entry::<String, String>()? {
                    if pairs.iter().any(|(k, _)| *k == key) {
                        return Err(serde::de::Error::custom(format!(
                            "duplicate key {key:?}"
                        )));
                    }
                    pairs.push((key, value));
                }
                Ok(OrderedHexMap(pairs))
            }
        }

        deserializer.deserialize_map(OrderedVisitor)
    }
}

/// The persisted public control area.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ControlAreaFile {
    pub version: u32,
    pub hash: String,
    pub n: u16,
    pub digest_len: usize,
    pub basis: Vec<Vec<u16>>,
    pub entries: OrderedHexMap,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub commitments: Option<OrderedHexMap>,
    pub scheme_id: String,
}

impl ControlAreaFile {
    pub fn from_public(public: &PublicControlArea, scheme_id: &str) -> Self {
        let entries = OrderedHexMap::new(
            public
                .entries()
                .map(|e| (e.key().to_string(), hex::encode(e.value())))
                .collect(),
        );
        let commitments = public.commitments().map(|map| {
            OrderedHexMap::new(
                map.iter()
                    .map(|(pid, value)| (pid.index().to_string(), hex::encode(value)))
                    .collect(),
            )
        });
        ControlAreaFile {
            version: public.version(),
            hash: public.hash_spec().algorithm_id().to_string(),
            n: public.n(),
            digest_len: public.digest_len(),
            basis: public
                .basis()
                .minimal_subsets()
                .iter()
                .map(|s| s.members().iter().map(|p| p.index()).collect())
                .collect(),
            entries,
            commitments,
            scheme_id: scheme_id.to_string(),
        }
    }

    /// Validates the file and rebuilds the in-memory control area.
    pub fn to_public(&self) -> Result<PublicControlArea, StorageError> {
        if self.version == 0 {
            return Err(StorageError::VersionZero);
        }
        let hash_spec = HashSpec::from_parts(&self.hash, self.digest_len)?;
        let subsets = self
            .basis
            .iter()
            .map(|ids| Subset::new(ids.iter().copied()))
            .collect::<Result<Vec<_>, _>>()?;
        let basis = AccessStructureBasis::new(self.n, subsets)?;

        if self.entries.len() != basis.len() {
            return Err(StorageError::EntryKeyMismatch(format!(
                "{} entries for {} basis elements",
                self.entries.len(),
                basis.len()
            )));
        }
        let mut values = Vec::with_capacity(self.entries.len());
        for (key, hex_value) in self.entries.pairs() {
            let subset = Subset::parse_key(key)
                .map_err(|_| StorageError::EntryKeyMismatch(format!("bad key {key:?}")))?;
            if basis.minimal_subsets().binary_search(&subset).is_err() {
                return Err(StorageError::EntryKeyMismatch(format!(
                    "key {key:?} is not a basis element"
                )));
            }
            values.push((
                key.clone(),
                decode_hex(&format!("entries.{key}"), hex_value, self.digest_len)?,
            ));
        }

        let commitments = match &self.commitments {
            None => None,
            Some(map) => {
                if map.len() != usize::from(self.n) {
                    return Err(StorageError::CommitmentCountMismatch {
                        got: map.len(),
                        n: self.n,
                    });
                }
                let mut out = BTreeMap::new();
                for (key, hex_value) in map.pairs() {
                    let index: u16 = key.parse().map_err(|_| StorageError::BadCommitmentKey {
                        key: key.clone(),
                        n: self.n,
                    })?;
                    if index == 0 || index > self.n {
                        return Err(StorageError::BadCommitmentKey {
                            key: key.clone(),
                            n: self.n,
                        });
                    }
                    let pid = ParticipantId::new(index)?;
                    let value =
                        decode_hex(&format!("commitments.{key}"), hex_value, self.digest_len)?;
                    if out.insert(pid, value).is_some() {
                        return Err(StorageError::DuplicateKey(key.clone()));
                    }
                }
                Some(out)
            }
        };

        Ok(PublicControlArea::from_parts(
            self.version,
            hash_spec,
            basis,
            values,
            commitments,
        )?)
    }

    /// Canonical emission: pretty-printed with a trailing newline.
    pub fn emit(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("serializable");
        out.push('\n');
        out
    }

    pub fn parse(text: &str) -> Result<Self, StorageError> {
        Ok(serde_json::from_str(text)?)
    }
}

/// One participant's persisted share.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShareFile {
    pub participant: u16,
    pub version: u32,
    pub share: String,
    pub scheme_id: String,
}

impl ShareFile {
    pub fn from_share(share: &Share, version: u32, scheme_id: &str) -> Self {
        ShareFile {
            participant: share.participant().index(),
            version,
            share: hex::encode(share.bytes()),
            scheme_id: scheme_id.to_string(),
        }
    }

    pub fn to_share(&self, digest_len: usize) -> Result<Share, StorageError> {
        let bytes = decode_hex("share", &self.share, digest_len)?;
        Ok(Share::new(ParticipantId::new(self.participant)?, bytes))
    }

    pub fn emit(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("serializable");
        out.push('\n');
        out
    }

    pub fn parse(text: &str) -> Result<Self, StorageError> {
        Ok(serde_json::from_str(text)?)
    }
}

fn decode_hex(field: &str, value: &str, expected: usize) -> Result<Vec<u8>, StorageError> {
    if value.chars().any(|c| c.is_ascii_uppercase()) {
        return Err(StorageError::BadHex {
            field: field.to_string(),
            source: hex::FromHexError::InvalidHexCharacter { c: 'A', index: 0 },
        });
    }
    let bytes = hex::decode(value).map_err(|source| StorageError::BadHex {
        field: field.to_string(),
        source,
    })?;
    if bytes.len() != expected {
        return Err(StorageError::WrongHexLength {
            field: field.to_string(),
            expected,
            got: bytes.len(),
        });
    }
    Ok(bytes)
}

/// A fresh random 128-bit scheme id as lowercase hex.
pub fn new_scheme_id<R: RngCore + CryptoRng>(rng: &mut R) -> String {
    let mut bytes = [0u8; 16];
    rng.fill_bytes(&mut bytes);
    hex::encode(bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hss::{commit_shares, setup, HashSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn sample_file(with_commitments: bool) -> (ControlAreaFile, Vec<ShareFile>) {
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        let basis = AccessStructureBasis::threshold(2, 3).unwrap();
        let hash = HashSpec::sha256();
        let out = setup(&basis, &hash, None, &mut rng).unwrap();
        if with_commitments {
            let map = commit_shares(out.shares(), &hash).unwrap();
            // attach via a fresh public area copy
            let mut public = out.public().clone();
            public.attach_commitments(map).unwrap();
            let scheme_id = new_scheme_id(&mut rng);
            let ca = ControlAreaFile::from_public(&public, &scheme_id);
            let shares = out
                .shares()
                .iter()
                .map(|s| ShareFile::from_share(s, public.version(), &scheme_id))
                .collect();
            return (ca, shares);
        }
        let scheme_id = new_scheme_id(&mut rng);
        let ca = ControlAreaFile::from_public(out.public(), &scheme_id);
        let shares = out
            .shares()
            .iter()
            .map(|s| ShareFile::from_share(s, out.public().version(), &scheme_id))
            .collect();
        out.shares(); // keep dealer output alive to here
        (ca, shares)
    }

    #[test]
    fn control_area_roundtrip_is_byte_exact() {
        for with_commitments in [false, true] {
            let (file, _) = sample_file(with_commitments);
            let emitted = file.emit();
            let reparsed = ControlAreaFile::parse(&emitted).unwrap();
            assert_eq!(reparsed, file);
            assert_eq!(reparsed.emit(), emitted);
            // and the in-memory form survives
            let public = reparsed.to_public().unwrap();
            assert_eq!(
                ControlAreaFile::from_public(&public, &file.scheme_id).emit(),
                emitted
            );
        }
    }

    #[test]
    fn entries_follow_basis_order_not_string_order() {
        let mut rng = ChaCha20Rng::seed_from_u64(10);
        let basis = AccessStructureBasis::threshold(2, 12).unwrap();
        let out = setup(&basis, &HashSpec::sha256(), None, &mut rng).unwrap();
        let file = ControlAreaFile::from_public(out.public(), "00");
        let keys: Vec<&str> = file.entries.pairs().iter().map(|(k, _)| k.as_str()).collect();
        // subset-lexicographic: "1,10" then "1,11", ... well before "2,3"
        assert_eq!(keys[0], "1,2");
        let pos_1_10 = keys.iter().position(|k| *k == "1,10").unwrap();
        let pos_2_3 = keys.iter().position(|k| *k == "2,3").unwrap();
        assert!(pos_1_10 < pos_2_3);
        assert!(file.emit().contains("\"1,10\""));
    }

    #[test]
    fn share_file_roundtrip() {
        let (_, shares) = sample_file(false);
        for file in shares {
            let emitted = file.emit();
            let reparsed = ShareFile::parse(&emitted).unwrap();
            assert_eq!(reparsed, file);
            assert_eq!(reparsed.emit(), emitted);
            let share = reparsed.to_share(32).unwrap();
            assert_eq!(hex::encode(share.bytes()), file.share);
        }
    }

    #[test]
    fn parse_rejects_bad_hex_and_lengths() {
        let (file, shares) = sample_file(false);
        let mut mangled = file.clone();
        mangled.entries = OrderedHexMap::new(
            file.entries
                .pairs()
                .iter()
                .map(|(k, v)| (k.clone(), v[..v.len() - 2].to_string()))
                .collect(),
        );
        assert!(matches!(
            mangled.to_public().unwrap_err(),
            StorageError::WrongHexLength { .. }
        ));

        let mut upper = shares[0].clone();
        upper.share = upper.share.to_uppercase();
        assert!(matches!(
            upper.to_share(32).unwrap_err(),
            StorageError::BadHex { .. }
        ));

        let mut short = shares[0].clone();
        short.share.truncate(10);
        assert!(short.to_share(32).is_err());
    }

    #[test]
    fn parse_rejects_key_mismatch_and_version_zero() {
        let (file, _) = sample_file(false);
        let mut missing = file.clone();
        let mut pairs = missing.entries.pairs().to_vec();
        pairs[0].0 = "1,9".to_string(); // not a basis element (n=3)
        missing.entries = OrderedHexMap::new(pairs);
        assert!(matches!(
            missing.to_public().unwrap_err(),
            StorageError::EntryKeyMismatch(_)
        ));

        let mut zero = file.clone();
        zero.version = 0;
        assert!(matches!(
            zero.to_public().unwrap_err(),
            StorageError::VersionZero
        ));
    }

    #[test]
    fn parse_rejects_duplicate_entry_keys() {
        let (file, _) = sample_file(false);
        let text = file.emit();
        // duplicate the first entry line
        let dup = text.replacen(
            "\"entries\": {",
            &format!(
                "\"entries\": {{\n    \"1,2\": \"{}\",",
                "00".repeat(32)
            ),
            1,
        );
        assert!(ControlAreaFile::parse(&dup).is_err());
    }

    #[test]
    fn commitment_validation() {
        let (file, _) = sample_file(true);
        let commitments = file.commitments.clone().unwrap();

        let mut wrong_count = file.clone();
        wrong_count.commitments = Some(OrderedHexMap::new(
            commitments.pairs()[..2].to_vec(),
        ));
        assert!(matches!(
            wrong_count.to_public().unwrap_err(),
            StorageError::CommitmentCountMismatch { .. }
        ));

        let mut bad_key = file.clone();
        let mut pairs = commitments.pairs().to_vec();
        pairs[0].0 = "0".to_string();
        bad_key.commitments = Some(OrderedHexMap::new(pairs));
        assert!(matches!(
            bad_key.to_public().unwrap_err(),
            StorageError::BadCommitmentKey { .. }
        ));
    }

    #[test]
    fn scheme_ids_are_seed_deterministic() {
        let mut a = ChaCha20Rng::seed_from_u64(5);
        let mut b = ChaCha20Rng::seed_from_u64(5);
        let id_a = new_scheme_id(&mut a);
        assert_eq!(id_a, new_scheme_id(&mut b));
        assert_eq!(id_a.len(), 32);
        assert!(id_a.chars().all(|c| c.is_ascii_hexdigit() && !c.is_ascii_uppercase()));
    }
}
