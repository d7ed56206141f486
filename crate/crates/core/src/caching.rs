//! The placement phase.
//!
//! Every file is split into `C(lambda, t)` equal non-overlapping subfiles,
//! one per t-subset of caches, and cache `l` stores the subfiles whose index
//! contains `l` (the MAN placement). Placement takes no connectivity
//! argument: the same filled caches serve any topology.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use num_traits::ToPrimitive;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::combinatorics::{binomial_u, subsets, CacheSubset};
use crate::topology::UserId;

#[derive(Debug, Error)]
pub enum PlacementError {
    #[error(
        "file size {file_bits} bits is not divisible into {subfile_count} byte-aligned \
         subfiles; smallest compatible size is {suggested} bits"
    )]
    IndivisibleFileSize {
        file_bits: u64,
        subfile_count: u64,
        suggested: u64,
    },
    #[error("file size must be a whole number of non-zero bytes, got {bits} bits")]
    NotByteAligned { bits: u64 },
    #[error("library files differ in size: {first} vs {other} bits")]
    UnevenFileSizes { first: u64, other: u64 },
    #[error("library holds no files")]
    EmptyLibrary,
    #[error("cache parameter t={t} outside [0, {lambda_caches}]")]
    InvalidT { t: u32, lambda_caches: u32 },
    #[error("failed to read library: {0}")]
    Io(#[from] std::io::Error),
}

/// The server's library: `N` files of equal bit size, ids 1-based.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Library {
    bits_per_file: u64,
    files: Vec<Vec<u8>>,
}

impl Library {
    pub fn new(files: Vec<Vec<u8>>) -> Result<Self, PlacementError> {
        let first = files.first().ok_or(PlacementError::EmptyLibrary)?;
        let bits_per_file = first.len() as u64 * 8;
        if bits_per_file == 0 {
            return Err(PlacementError::NotByteAligned { bits: 0 });
        }
        for f in &files {
            if f.len() as u64 * 8 != bits_per_file {
                return Err(PlacementError::UnevenFileSizes {
                    first: bits_per_file,
                    other: f.len() as u64 * 8,
                });
            }
        }
        Ok(Library {
            bits_per_file,
            files,
        })
    }

    /// Deterministic pseudo-random library: `file_count` files of
    /// `bits_per_file` bits generated from the 64-bit seed.
    pub fn synthetic(
        file_count: u64,
        bits_per_file: u64,
        seed: u64,
    ) -> Result<Self, PlacementError> {
        if bits_per_file == 0 || bits_per_file % 8 != 0 {
            return Err(PlacementError::NotByteAligned {
                bits: bits_per_file,
            });
        }
        if file_count == 0 {
            return Err(PlacementError::EmptyLibrary);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bytes = (bits_per_file / 8) as usize;
        let files = (0..file_count)
            .map(|_| {
                let mut buf = vec![0u8; bytes];
                rng.fill_bytes(&mut buf);
                buf
            })
            .collect();
        Library::new(files)
    }

    /// Loads every regular file of a directory, in file-name order, as one
    /// library file each. All files must have the same size.
    pub fn from_dir(dir: &Path) -> Result<Self, PlacementError> {
        let mut names: Vec<_> = std::fs::read_dir(dir)?
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .filter(|e| e.path().is_file())
            .map(|e| e.path())
            .collect();
        names.sort();
        let mut files = Vec::new();
        for path in names {
            files.push(std::fs::read(&path)?);
        }
        Library::new(files)
    }

    pub fn file_count(&self) -> u32 {
        self.files.len() as u32
    }

    pub fn bits_per_file(&self) -> u64 {
        self.bits_per_file
    }

    /// File contents by 1-based id. Panics if `id` is out of `[1, N]`.
    pub fn file(&self, id: u32) -> &[u8] {
        assert!(
            id >= 1 && id <= self.file_count(),
            "file id {id} outside [1, {}]",
            self.file_count()
        );
        &self.files[(id - 1) as usize]
    }
}

/// One subfile: file id plus the t-subset of caches that store it.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct SubfileId {
    pub file: u32,
    pub mask: CacheSubset,
}

impl SubfileId {
    pub fn new(file: u32, mask: CacheSubset) -> Self {
        SubfileId { file, mask }
    }
}

impl fmt::Display for SubfileId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W{}@{}", self.file, self.mask)
    }
}

/// Smallest file size in bits, at least `min_bits`, that splits into
/// `C(lambda, t)` byte-aligned subfiles.
pub fn suggest_file_bits(lambda_caches: u32, t: u32, min_bits: u64) -> u64 {
    let parts = binomial_u(lambda_caches as u64, t as u64)
        .to_u64()
        .expect("subfile count fits u64");
    let unit = 8 * parts;
    let k = min_bits.div_ceil(unit).max(1);
    k * unit
}

fn check_divisible(file_bits: u64, lambda_caches: u32, t: u32) -> Result<u64, PlacementError> {
    if t > lambda_caches {
        return Err(PlacementError::InvalidT { t, lambda_caches });
    }
    let subfile_count = binomial_u(lambda_caches as u64, t as u64)
        .to_u64()
        .expect("subfile count fits u64");
    if file_bits == 0 || file_bits % (8 * subfile_count) != 0 {
        return Err(PlacementError::IndivisibleFileSize {
            file_bits,
            subfile_count,
            suggested: suggest_file_bits(lambda_caches, t, file_bits),
        });
    }
    Ok(subfile_count)
}

/// Splits one file into `C(lambda, t)` equal contiguous subfiles: the i-th
/// lexicographic t-subset receives the i-th slice. Fails loudly rather than
/// pad when the size is incompatible.
pub fn split_file(
    file: &[u8],
    lambda_caches: u32,
    t: u32,
) -> Result<Vec<(CacheSubset, Vec<u8>)>, PlacementError> {
    let subfile_count = check_divisible(file.len() as u64 * 8, lambda_caches, t)? as usize;
    let bytes = file.len() / subfile_count;
    Ok(subsets(lambda_caches, t)
        .into_iter()
        .enumerate()
        .map(|(i, mask)| (mask, file[i * bytes..(i + 1) * bytes].to_vec()))
        .collect())
}

/// The library after MAN placement at parameter `t`: per-file subfile
/// partition plus per-cache contents. Subfile payloads stay contiguous in
/// the original file buffers; the mask's lexicographic rank indexes them.
#[derive(Clone, Debug)]
pub struct PlacedLibrary {
    library: Library,
    lambda_caches: u32,
    t: u32,
    masks: Vec<CacheSubset>,
    subfile_bytes: usize,
}

impl PlacedLibrary {
    pub fn library(&self) -> &Library {
        &self.library
    }

    pub fn lambda_caches(&self) -> u32 {
        self.lambda_caches
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    /// The t-subset masks in lexicographic (split) order.
    pub fn masks(&self) -> &[CacheSubset] {
        &self.masks
    }

    pub fn subfile_bits(&self) -> u64 {
        self.subfile_bytes as u64 * 8
    }

    pub fn file_bits(&self) -> u64 {
        self.library.bits_per_file()
    }

    fn mask_rank(&self, mask: &CacheSubset) -> usize {
        self.masks
            .binary_search(mask)
            .unwrap_or_else(|_| panic!("mask {mask} is not a size-{} subset", self.t))
    }

    /// Payload slice of one subfile. Panics on an invalid id; ids built from
    /// `masks()` and library file ids are always valid.
    pub fn subfile(&self, id: &SubfileId) -> &[u8] {
        let rank = self.mask_rank(&id.mask);
        let file = self.library.file(id.file);
        &file[rank * self.subfile_bytes..(rank + 1) * self.subfile_bytes]
    }

    /// Everything cache `cache` stores: the subfiles of every file whose
    /// mask contains the cache.
    pub fn cache_contents(&self, cache: u32) -> Vec<SubfileId> {
        let mut out = Vec::new();
        for file in 1..=self.library.file_count() {
            for mask in &self.masks {
                if mask.contains(cache) {
                    out.push(SubfileId::new(file, mask.clone()));
                }
            }
        }
        out
    }

    pub fn cache_bits(&self, cache: u32) -> u64 {
        self.cache_contents(cache).len() as u64 * self.subfile_bits()
    }

    /// Can `user` read this subfile from its caches?
    pub fn is_accessible(&self, user: &UserId, id: &SubfileId) -> bool {
        id.mask.intersects(&user.caches)
    }

    /// Union of the user's cache contents: all subfiles whose mask meets the
    /// user's cache set. Empty for a cacheless user.
    pub fn accessible_subfiles(&self, user: &UserId) -> BTreeSet<SubfileId> {
        let mut out = BTreeSet::new();
        for file in 1..=self.library.file_count() {
            for mask in &self.masks {
                if mask.intersects(&user.caches) {
                    out.insert(SubfileId::new(file, mask.clone()));
                }
            }
        }
        out
    }

    /// The t-subsets the user cannot reach: masks disjoint from its caches.
    pub fn missing_masks(&self, user: &UserId) -> Vec<CacheSubset> {
        self.masks
            .iter()
            .filter(|m| m.is_disjoint(&user.caches))
            .cloned()
            .collect()
    }
}

/// Runs the MAN placement: validates the subfile partition for every file
/// and freezes the t-subset index. Cache `l` then holds exactly the subfiles
/// whose mask contains `l`, i.e. `t N / lambda` files worth of bits.
pub fn man_place(library: Library, lambda_caches: u32, t: u32) -> Result<PlacedLibrary, PlacementError> {
    let subfile_count = check_divisible(library.bits_per_file(), lambda_caches, t)?;
    let subfile_bytes = (library.bits_per_file() / 8 / subfile_count) as usize;
    Ok(PlacedLibrary {
        library,
        lambda_caches,
        t,
        masks: subsets(lambda_caches, t),
        subfile_bytes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn split_two_halves() {
        let file: Vec<u8> = vec![0xAA, 0xBB];
        let parts = split_file(&file, 2, 1).unwrap();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0], (CacheSubset::new([1]), vec![0xAA]));
        assert_eq!(parts[1], (CacheSubset::new([2]), vec![0xBB]));
    }

    #[test]
    fn split_six_subfiles() {
        let file: Vec<u8> = (0..6).collect();
        let parts = split_file(&file, 4, 2).unwrap();
        assert_eq!(parts.len(), 6);
        for (_, payload) in &parts {
            assert_eq!(payload.len(), 1);
        }
        let rejoined: Vec<u8> = parts.iter().flat_map(|(_, p)| p.clone()).collect();
        assert_eq!(rejoined, file);
    }

    #[test]
    fn split_t_zero_is_whole_file() {
        let file: Vec<u8> = vec![1, 2, 3];
        let parts = split_file(&file, 4, 0).unwrap();
        assert_eq!(parts, vec![(CacheSubset::empty(), file)]);
    }

    #[test]
    fn indivisible_size_reports_suggestion() {
        let file: Vec<u8> = vec![0; 5]; // 40 bits, C(4,2)=6 subfiles
        match split_file(&file, 4, 2) {
            Err(PlacementError::IndivisibleFileSize {
                file_bits,
                subfile_count,
                suggested,
            }) => {
                assert_eq!(file_bits, 40);
                assert_eq!(subfile_count, 6);
                assert_eq!(suggested, 48);
            }
            other => panic!("expected IndivisibleFileSize, got {other:?}"),
        }
    }

    #[test]
    fn suggest_rounds_up_to_byte_aligned_partition() {
        assert_eq!(suggest_file_bits(4, 2, 1), 48);
        assert_eq!(suggest_file_bits(4, 2, 48), 48);
        assert_eq!(suggest_file_bits(4, 2, 49), 96);
        assert_eq!(suggest_file_bits(2, 0, 0), 8);
    }

    #[test]
    fn placement_budget_per_cache() {
        // lambda=4, t=2, N=6: each cache holds 6*C(3,1)=18 subfiles, M=3 files.
        let lib = Library::synthetic(6, 48, 7).unwrap();
        let placed = man_place(lib, 4, 2).unwrap();
        for cache in 1..=4 {
            assert_eq!(placed.cache_contents(cache).len(), 18);
            // t*N/lambda*B = 2*6/4*48 = 144 bits
            assert_eq!(placed.cache_bits(cache), 144);
        }
    }

    #[test]
    fn placement_degenerate_t() {
        let lib = Library::synthetic(2, 8, 1).unwrap();
        let placed = man_place(lib.clone(), 3, 0).unwrap();
        for cache in 1..=3 {
            assert!(placed.cache_contents(cache).is_empty());
        }
        let placed = man_place(lib, 3, 3).unwrap();
        for cache in 1..=3 {
            // every cache holds every subfile: M = N
            assert_eq!(placed.cache_bits(cache), 2 * 8);
        }
    }

    #[test]
    fn accessible_subfiles_examples() {
        let lib = Library::synthetic(1, 48, 3).unwrap();
        let placed = man_place(lib, 4, 2).unwrap();

        let cacheless = UserId::new(CacheSubset::empty(), 1);
        assert!(placed.accessible_subfiles(&cacheless).is_empty());

        // User on {1,2} misses only the {3,4} mask: C(lambda-2, t)=C(2,2)=1.
        let user = UserId::new(CacheSubset::new([1, 2]), 1);
        assert_eq!(placed.accessible_subfiles(&user).len(), 5);
        assert_eq!(placed.missing_masks(&user), vec![CacheSubset::new([3, 4])]);

        // A user on more than lambda - t caches reaches the whole library.
        let wide = UserId::new(CacheSubset::new([1, 2, 3]), 1);
        assert_eq!(placed.accessible_subfiles(&wide).len(), 6);
        assert!(placed.missing_masks(&wide).is_empty());
    }

    #[test]
    fn synthetic_is_deterministic() {
        let a = Library::synthetic(3, 64, 42).unwrap();
        let b = Library::synthetic(3, 64, 42).unwrap();
        assert_eq!(a, b);
        let c = Library::synthetic(3, 64, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn library_from_dir_requires_equal_sizes() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("b.bin"), [1u8, 2]).unwrap();
        std::fs::write(dir.path().join("a.bin"), [9u8, 8]).unwrap();
        let lib = Library::from_dir(dir.path()).unwrap();
        assert_eq!(lib.file_count(), 2);
        assert_eq!(lib.file(1), &[9, 8]); // name order: a.bin first
        std::fs::write(dir.path().join("c.bin"), [1u8]).unwrap();
        assert!(matches!(
            Library::from_dir(dir.path()),
            Err(PlacementError::UnevenFileSizes { .. })
        ));
    }

    proptest! {
        #[test]
        fn split_concatenation_reconstructs_file(
            lambda_caches in 1u32..=5,
            t_raw in 0u32..=5,
            scale in 1usize..=3,
            seed in any::<u64>(),
        ) {
            let t = t_raw.min(lambda_caches);
            let bits = suggest_file_bits(lambda_caches, t, (scale as u64) * 8);
            let lib = Library::synthetic(1, bits, seed).unwrap();
            let file = lib.file(1).to_vec();
            let parts = split_file(&file, lambda_caches, t).unwrap();
            let rejoined: Vec<u8> = parts.iter().flat_map(|(_, p)| p.clone()).collect();
            prop_assert_eq!(rejoined, file);
        }

        #[test]
        fn miss_count_is_complement_binomial(
            lambda_caches in 1u32..=5,
            t_raw in 0u32..=5,
            level in 0u32..=5,
        ) {
            let t = t_raw.min(lambda_caches);
            let level = level.min(lambda_caches);
            let bits = suggest_file_bits(lambda_caches, t, 8);
            let lib = Library::synthetic(1, bits, 0).unwrap();
            let placed = man_place(lib, lambda_caches, t).unwrap();
            let user = UserId::new(CacheSubset::new(1..=level), 1);
            let expected = binomial_u((lambda_caches - level) as u64, t as u64);
            prop_assert_eq!(
                num_bigint::BigUint::from(placed.missing_masks(&user).len()),
                expected
            );
        }
    }
}
