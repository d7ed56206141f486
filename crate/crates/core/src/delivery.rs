//! The delivery phase.
//!
//! For the generalized combinatorial topology the server emits, per level
//! `l` and copy index `k`, one XOR of `C(t+l, l)` subfiles for every
//! `(t+l)`-subset of caches; every targeted user cancels the interference
//! from its caches and recovers exactly its missing subfiles. For arbitrary
//! connectivities a greedy clique cover over the side-information structure
//! provides a heuristic upper bound.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::caching::{PlacedLibrary, SubfileId};
use crate::combinatorics::{ratio, subsets, subsets_of, BigUint, CacheSubset, Rational};
use crate::topology::{build_combinatorial, CombProfile, Connectivity, UserId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DeliveryError {
    #[error("demand has no entry for user {user}")]
    DemandIncomplete { user: UserId },
    #[error("topology mismatch: {0}")]
    TopologyMismatch(String),
    #[error("file id {file} outside library range [1, {file_count}]")]
    UnknownFile { file: u32, file_count: u32 },
    #[error("cannot decode subfile {subfile}: {reason}")]
    DecodeFailure { subfile: SubfileId, reason: String },
    #[error("malformed demand file: {0}")]
    Malformed(String),
}

/// One requested file per user.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DemandVector {
    assignments: BTreeMap<UserId, u32>,
}

impl DemandVector {
    /// Builds a demand covering exactly the users of `conn`.
    pub fn new(
        conn: &Connectivity,
        assignments: BTreeMap<UserId, u32>,
    ) -> Result<Self, DeliveryError> {
        let users = conn.users();
        if let Some(extra) = assignments.keys().find(|u| !users.contains(u)) {
            return Err(DeliveryError::TopologyMismatch(format!(
                "demand names user {extra} absent from the connectivity"
            )));
        }
        for user in &users {
            if !assignments.contains_key(user) {
                return Err(DeliveryError::DemandIncomplete { user: user.clone() });
            }
        }
        Ok(DemandVector { assignments })
    }

    /// The worst-case default: user i requests file i in canonical user
    /// order. Requires a library with at least `K` files.
    pub fn canonical_distinct(conn: &Connectivity) -> Self {
        let assignments = conn
            .users()
            .into_iter()
            .zip(1u32..)
            .collect::<BTreeMap<_, _>>();
        DemandVector { assignments }
    }

    /// A uniformly random assignment of distinct files to users.
    pub fn random_distinct(
        conn: &Connectivity,
        file_count: u32,
        rng: &mut impl Rng,
    ) -> Result<Self, DeliveryError> {
        let users = conn.users();
        if (file_count as u64) < users.len() as u64 {
            return Err(DeliveryError::TopologyMismatch(format!(
                "{} users need at least as many files, library has {file_count}",
                users.len()
            )));
        }
        let mut ids: Vec<u32> = (1..=file_count).collect();
        ids.shuffle(rng);
        Ok(DemandVector {
            assignments: users.into_iter().zip(ids).collect(),
        })
    }

    /// A uniformly random assignment, repetitions allowed.
    pub fn random(conn: &Connectivity, file_count: u32, rng: &mut impl Rng) -> Self {
        DemandVector {
            assignments: conn
                .users()
                .into_iter()
                .map(|u| (u, rng.random_range(1..=file_count)))
                .collect(),
        }
    }

    pub fn file_for(&self, user: &UserId) -> Result<u32, DeliveryError> {
        self.assignments
            .get(user)
            .copied()
            .ok_or_else(|| DeliveryError::DemandIncomplete { user: user.clone() })
    }

    /// True when every user requests a different file.
    pub fn is_distinct(&self) -> bool {
        let mut seen: Vec<u32> = self.assignments.values().copied().collect();
        seen.sort_unstable();
        seen.windows(2).all(|w| w[0] != w[1])
    }

    pub fn entries(&self) -> impl Iterator<Item = (&UserId, u32)> {
        self.assignments.iter().map(|(u, &f)| (u, f))
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn max_file_id(&self) -> u32 {
        self.assignments.values().copied().max().unwrap_or(0)
    }

    /// JSON map from user keys to file ids, e.g. `{"1,2#1": 3}`.
    pub fn to_json_string(&self) -> String {
        let map: BTreeMap<String, u32> = self
            .assignments
            .iter()
            .map(|(u, &f)| (u.key(), f))
            .collect();
        serde_json::to_string_pretty(&map).expect("demand serializes")
    }

    /// Parses the JSON map and validates coverage against `conn`.
    pub fn from_json_str(conn: &Connectivity, s: &str) -> Result<Self, DeliveryError> {
        let map: BTreeMap<String, u32> =
            serde_json::from_str(s).map_err(|e| DeliveryError::Malformed(e.to_string()))?;
        let mut assignments = BTreeMap::new();
        for (key, file) in map {
            let user = UserId::parse_key(&key)
                .ok_or_else(|| DeliveryError::Malformed(format!("bad user key {key:?}")))?;
            if file == 0 {
                return Err(DeliveryError::Malformed(format!(
                    "file id for {key} must be positive"
                )));
            }
            assignments.insert(user, file);
        }
        DemandVector::new(conn, assignments)
    }
}

/// Identification of one comb-scheme message: the level it serves, the copy
/// index within the level, and the `(t+level)`-subset it spans.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CombTag {
    pub level: u32,
    pub copy: u64,
    pub span: CacheSubset,
}

/// One XORed-in subfile together with the user it serves.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Constituent {
    pub user: UserId,
    pub subfile: SubfileId,
}

/// One broadcast message: the XOR of its constituent subfiles.
/// `comb` is present for messages of the combinatorial scheme and absent for
/// greedy clique-cover messages.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MulticastMessage {
    pub comb: Option<CombTag>,
    pub constituents: Vec<Constituent>,
    pub payload: Vec<u8>,
}

/// The full transmission: messages in canonical order (level ascending, copy
/// ascending, span lexicographic for the comb scheme; construction order for
/// the greedy cover).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TransmissionSet {
    messages: Vec<MulticastMessage>,
    lambda_caches: u32,
    t: u32,
    file_bits: u64,
    subfile_bits: u64,
}

impl TransmissionSet {
    pub fn messages(&self) -> &[MulticastMessage] {
        &self.messages
    }

    pub fn message_count(&self) -> usize {
        self.messages.len()
    }

    pub fn total_bits(&self) -> u64 {
        self.messages.iter().map(|m| m.payload.len() as u64 * 8).sum()
    }

    pub fn file_bits(&self) -> u64 {
        self.file_bits
    }

    pub fn subfile_bits(&self) -> u64 {
        self.subfile_bits
    }

    /// Exact load: transmitted bits over file bits.
    pub fn load(&self) -> Rational {
        measured_load(self, self.file_bits)
    }

    /// JSON manifest: per message the level/copy/span tag (null for greedy
    /// messages), constituent ids, payload hash and blob offset.
    pub fn manifest_json(&self) -> String {
        let messages: Vec<serde_json::Value> = self
            .messages
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let mut hasher = Sha256::new();
                hasher.update(&m.payload);
                let digest = hasher.finalize();
                let mut hex = String::with_capacity(64);
                for b in digest {
                    let _ = write!(hex, "{b:02x}");
                }
                serde_json::json!({
                    "level": m.comb.as_ref().map(|c| c.level),
                    "k": m.comb.as_ref().map(|c| c.copy),
                    "span": m.comb.as_ref().map(|c| c.span.as_slice().to_vec()),
                    "constituents": m.constituents.iter().map(|c| serde_json::json!({
                        "user": c.user.key(),
                        "file": c.subfile.file,
                        "mask": c.subfile.mask.as_slice().to_vec(),
                    })).collect::<Vec<_>>(),
                    "payload_sha256": hex,
                    "offset_bytes": i * (self.subfile_bits as usize / 8),
                    "bits": m.payload.len() * 8,
                })
            })
            .collect();
        serde_json::to_string_pretty(&serde_json::json!({
            "lambda_caches": self.lambda_caches,
            "t": self.t,
            "file_bits": self.file_bits,
            "subfile_bits": self.subfile_bits,
            "message_count": self.messages.len(),
            "total_bits": self.total_bits(),
            "messages": messages,
        }))
        .expect("manifest serializes")
    }

    /// Fault-injection hook: XORs `bytes` into one message payload, so the
    /// payload no longer matches its constituent list. Decode verification
    /// must catch the mutation.
    pub fn corrupt_message_payload(&mut self, index: usize, bytes: &[u8]) {
        xor_into(&mut self.messages[index].payload, bytes);
    }

    /// All payloads concatenated in message order.
    pub fn payload_blob(&self) -> Vec<u8> {
        let mut blob = Vec::with_capacity(self.messages.len() * (self.subfile_bits as usize / 8));
        for m in &self.messages {
            blob.extend_from_slice(&m.payload);
        }
        blob
    }
}

/// Exact measured load: transmitted bits divided by the file size.
pub fn measured_load(tx: &TransmissionSet, file_bits: u64) -> Rational {
    ratio(BigUint::from(tx.total_bits()), BigUint::from(file_bits))
}

fn xor_into(dst: &mut [u8], src: &[u8]) {
    debug_assert_eq!(dst.len(), src.len());
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

fn validate_demand_files(
    placed: &PlacedLibrary,
    demand: &DemandVector,
) -> Result<(), DeliveryError> {
    let file_count = placed.library().file_count();
    for (_, file) in demand.entries() {
        if file == 0 || file > file_count {
            return Err(DeliveryError::UnknownFile { file, file_count });
        }
    }
    Ok(())
}

/// Runs the multicast delivery for the generalized combinatorial topology.
///
/// For every level `l` in `[0, lambda - t]`, copy `k` in `[1, K_l]` and
/// `(t+l)`-subset `S` of the caches, one message XORs the subfiles
/// `W(d(U_k), S \ U)` over all `l`-subsets `U` of `S`. Users connected to
/// more than `lambda - t` caches already hold the whole library, so no
/// level beyond `lambda - t` transmits.
pub fn comb_deliver(
    placed: &PlacedLibrary,
    profile: &CombProfile,
    demand: &DemandVector,
) -> Result<TransmissionSet, DeliveryError> {
    if profile.lambda_caches() != placed.lambda_caches() {
        return Err(DeliveryError::TopologyMismatch(format!(
            "profile is for {} caches, placement for {}",
            profile.lambda_caches(),
            placed.lambda_caches()
        )));
    }
    let conn = build_combinatorial(profile);
    // Re-validating against the profile's own user set turns a demand built
    // for a different (non-combinatorial) connectivity into a typed error.
    let demand = DemandVector::new(&conn, demand.entries().map(|(u, f)| (u.clone(), f)).collect())?;
    validate_demand_files(placed, &demand)?;

    let lambda_caches = placed.lambda_caches();
    let t = placed.t();
    let mut messages = Vec::new();
    for level in 0..=(lambda_caches - t) {
        for copy in 1..=profile.level_count(level) {
            for span in subsets(lambda_caches, t + level) {
                let mut payload = vec![0u8; (placed.subfile_bits() / 8) as usize];
                let mut constituents = Vec::new();
                for caches in subsets_of(span.as_slice(), level as usize) {
                    let user = UserId::new(caches.clone(), copy);
                    let file = demand.file_for(&user)?;
                    let subfile = SubfileId::new(file, span.difference(&caches));
                    xor_into(&mut payload, placed.subfile(&subfile));
                    constituents.push(Constituent { user, subfile });
                }
                messages.push(MulticastMessage {
                    comb: Some(CombTag {
                        level,
                        copy,
                        span,
                    }),
                    constituents,
                    payload,
                });
            }
        }
    }
    // Canonical order: level asc, copy asc, span lex. The loops emit copy
    // before span, so sort once here.
    messages.sort_by(|a, b| {
        let ta = a.comb.as_ref().expect("comb messages");
        let tb = b.comb.as_ref().expect("comb messages");
        (ta.level, ta.copy, &ta.span).cmp(&(tb.level, tb.copy, &tb.span))
    });
    Ok(TransmissionSet {
        messages,
        lambda_caches,
        t,
        file_bits: placed.file_bits(),
        subfile_bits: placed.subfile_bits(),
    })
}

/// Reconstructs the user's requested file, bit-exactly, from its caches plus
/// the transmission. Every missing subfile is recovered by XOR-cancelling
/// the interference of its message, reading each interfering subfile from
/// the user's caches; nothing is ever copied out of the answer.
pub fn decode(
    placed: &PlacedLibrary,
    user: &UserId,
    demand: &DemandVector,
    tx: &TransmissionSet,
) -> Result<Vec<u8>, DeliveryError> {
    let file = demand.file_for(user)?;
    validate_demand_files(placed, demand)?;
    let level = user.caches.len() as u32;

    // Index comb messages by (level, copy, span).
    let mut by_tag: BTreeMap<(u32, u64, &CacheSubset), &MulticastMessage> = BTreeMap::new();
    for m in tx.messages() {
        if let Some(tag) = &m.comb {
            by_tag.insert((tag.level, tag.copy, &tag.span), m);
        }
    }

    let mut recovered: BTreeMap<CacheSubset, Vec<u8>> = BTreeMap::new();
    for mask in placed.missing_masks(user) {
        let target = SubfileId::new(file, mask.clone());
        let span = mask.union(&user.caches);
        let message = by_tag
            .get(&(level, user.index, &span))
            .ok_or_else(|| DeliveryError::DecodeFailure {
                subfile: target.clone(),
                reason: format!("no message spans {span} at level {level} copy {}", user.index),
            })?;
        let mut value = message.payload.clone();
        let mut found_target = false;
        for c in &message.constituents {
            if c.user == *user && c.subfile == target {
                found_target = true;
                continue;
            }
            if !placed.is_accessible(user, &c.subfile) {
                return Err(DeliveryError::DecodeFailure {
                    subfile: target,
                    reason: format!("interference {} is not cached by the user", c.subfile),
                });
            }
            xor_into(&mut value, placed.subfile(&c.subfile));
        }
        if !found_target {
            return Err(DeliveryError::DecodeFailure {
                subfile: target,
                reason: "message does not carry the wanted subfile".into(),
            });
        }
        recovered.insert(mask, value);
    }

    // Assemble: cached subfiles straight from the caches, the rest from the
    // recovered map, in mask order.
    let mut out = Vec::with_capacity((placed.file_bits() / 8) as usize);
    for mask in placed.masks() {
        if mask.intersects(&user.caches) {
            out.extend_from_slice(placed.subfile(&SubfileId::new(file, mask.clone())));
        } else {
            out.extend_from_slice(&recovered[mask]);
        }
    }
    Ok(out)
}

/// Greedy clique-cover delivery for an arbitrary connectivity: repeatedly
/// XORs a maximal set of pairwise mutually cached missing subfiles. A
/// heuristic upper bound only; ties break on lexicographic subfile order.
pub fn greedy_deliver(
    placed: &PlacedLibrary,
    conn: &Connectivity,
    demand: &DemandVector,
) -> Result<TransmissionSet, DeliveryError> {
    let demand = DemandVector::new(conn, demand.entries().map(|(u, f)| (u.clone(), f)).collect())?;
    validate_demand_files(placed, &demand)?;

    struct Want {
        user: UserId,
        subfile: SubfileId,
    }
    let mut wants = Vec::new();
    for user in conn.users() {
        let file = demand.file_for(&user)?;
        for mask in placed.missing_masks(&user) {
            wants.push(Want {
                user: user.clone(),
                subfile: SubfileId::new(file, mask),
            });
        }
    }
    wants.sort_by(|a, b| (&a.subfile, &a.user).cmp(&(&b.subfile, &b.user)));

    // Two wants may share one transmission iff each user caches the other's
    // mask and the payloads differ (equal subfiles would cancel).
    let compatible = |a: &Want, b: &Want| {
        a.subfile != b.subfile
            && a.subfile.mask.intersects(&b.user.caches)
            && b.subfile.mask.intersects(&a.user.caches)
    };

    let mut covered = vec![false; wants.len()];
    let mut messages = Vec::new();
    for first in 0..wants.len() {
        if covered[first] {
            continue;
        }
        let mut clique = vec![first];
        for candidate in first + 1..wants.len() {
            if covered[candidate] {
                continue;
            }
            if clique
                .iter()
                .all(|&m| compatible(&wants[m], &wants[candidate]))
            {
                clique.push(candidate);
            }
        }
        let mut payload = vec![0u8; (placed.subfile_bits() / 8) as usize];
        let mut constituents = Vec::new();
        for &i in &clique {
            covered[i] = true;
            xor_into(&mut payload, placed.subfile(&wants[i].subfile));
            constituents.push(Constituent {
                user: wants[i].user.clone(),
                subfile: wants[i].subfile.clone(),
            });
        }
        messages.push(MulticastMessage {
            comb: None,
            constituents,
            payload,
        });
    }

    let tx = TransmissionSet {
        messages,
        lambda_caches: placed.lambda_caches(),
        t: placed.t(),
        file_bits: placed.file_bits(),
        subfile_bits: placed.subfile_bits(),
    };
    verify_clique_cover(placed, &tx)?;
    Ok(tx)
}

/// Decode-equivalent cancellation check for a clique cover: every
/// constituent must be recoverable by its user from the message alone plus
/// the user's caches.
fn verify_clique_cover(placed: &PlacedLibrary, tx: &TransmissionSet) -> Result<(), DeliveryError> {
    for m in tx.messages() {
        for target in &m.constituents {
            let mut value = m.payload.clone();
            for other in &m.constituents {
                if std::ptr::eq(other, target) {
                    continue;
                }
                if !placed.is_accessible(&target.user, &other.subfile) {
                    return Err(DeliveryError::DecodeFailure {
                        subfile: target.subfile.clone(),
                        reason: format!(
                            "user {} cannot cancel {}",
                            target.user, other.subfile
                        ),
                    });
                }
                xor_into(&mut value, placed.subfile(&other.subfile));
            }
            if value != placed.subfile(&target.subfile) {
                return Err(DeliveryError::DecodeFailure {
                    subfile: target.subfile.clone(),
                    reason: "cancellation does not reproduce the subfile".into(),
                });
            }
        }
    }
    Ok(())
}
