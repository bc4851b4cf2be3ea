//! On-disk cache: a JSON manifest describing the geometry the artifacts were
//! computed from, plus one checksummed binary block per artifact.
//!
//! Block layout (little endian): magic `P3CB`, format version (u32), word
//! count (u64), then the payload as u32 words.

use std::collections::BTreeMap;
use std::fs;
use std::io::{Cursor, Read, Write};
use std::path::{Path, PathBuf};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::{Plane, Triangle};
use crate::group::{Matrix, Psu3};
use crate::perm::Bsgs;

/// Bumping this invalidates every cached artifact.
pub const CACHE_FORMAT_VERSION: u32 = 1;

const MAGIC: &[u8; 4] = b"P3CB";
const MANIFEST: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtifactEntry {
    pub file: String,
    pub sha256: String,
    pub words: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub n: u32,
    pub q: u64,
    /// Field moduli, base to sextic, in hex.
    pub moduli: Vec<String>,
    /// Generator matrices, rows separated by `;`, entries in hex.
    pub generator_matrices: Vec<String>,
    pub base_points: Vec<u32>,
    pub artifacts: BTreeMap<String, ArtifactEntry>,
}

impl Manifest {
    pub fn for_group(group: &Psu3) -> Manifest {
        Manifest {
            format_version: CACHE_FORMAT_VERSION,
            n: group.n(),
            q: group.q(),
            moduli: group.tower().specs().iter().map(|s| s.modulus.to_hex()).collect(),
            generator_matrices: group.generators().iter().map(|g| matrix_hex(&g.matrix)).collect(),
            base_points: group.perm_group().bsgs().base(),
            artifacts: BTreeMap::new(),
        }
    }

    fn same_source(&self, other: &Manifest) -> bool {
        self.format_version == other.format_version
            && self.n == other.n
            && self.q == other.q
            && self.moduli == other.moduli
            && self.generator_matrices == other.generator_matrices
            && self.base_points == other.base_points
    }
}

fn matrix_hex(m: &Matrix) -> String {
    m.iter()
        .map(|row| row.iter().map(|x| format!("{x:x}")).collect::<Vec<_>>().join(","))
        .collect::<Vec<_>>()
        .join(";")
}

#[derive(Debug)]
pub struct Cache {
    dir: PathBuf,
    manifest: Manifest,
}

impl Cache {
    /// Opens (or creates) the cache in `dir` for `group`. A manifest written
    /// for a different format version or geometry is discarded together with
    /// its artifacts; the returned notice says so.
    pub fn open(dir: &Path, group: &Psu3) -> Result<(Cache, Option<String>)> {
        fs::create_dir_all(dir)?;
        let expected = Manifest::for_group(group);
        let path = dir.join(MANIFEST);
        let mut notice = None;
        let manifest = match fs::read(&path) {
            Ok(bytes) => match serde_json::from_slice::<Manifest>(&bytes) {
                Ok(m) if m.same_source(&expected) => m,
                Ok(m) => {
                    notice = Some(format!(
                        "cache in {} was written for format {} / n = {} or another geometry; rebuilding",
                        dir.display(),
                        m.format_version,
                        m.n
                    ));
                    for a in m.artifacts.values() {
                        let _ = fs::remove_file(dir.join(&a.file));
                    }
                    expected
                }
                Err(e) => {
                    notice = Some(format!("unreadable cache manifest ({e}); rebuilding"));
                    expected
                }
            },
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => expected,
            Err(e) => return Err(e.into()),
        };
        let cache = Cache {
            dir: dir.to_path_buf(),
            manifest,
        };
        cache.write_manifest()?;
        Ok((cache, notice))
    }

    pub fn manifest(&self) -> &Manifest {
        &self.manifest
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// The payload of artifact `name`, `None` if it was never stored.
    pub fn load(&self, name: &str) -> Result<Option<Vec<u32>>> {
        let Some(entry) = self.manifest.artifacts.get(name) else {
            return Ok(None);
        };
        let bytes = fs::read(self.dir.join(&entry.file))?;
        if hex::encode(Sha256::digest(&bytes)) != entry.sha256 {
            return Err(Error::Cache(format!("checksum mismatch for artifact {name}")));
        }
        let words = decode_block(&bytes)?;
        if words.len() as u64 != entry.words {
            return Err(Error::Cache(format!("artifact {name} has the wrong length")));
        }
        Ok(Some(words))
    }

    pub fn store(&mut self, name: &str, words: &[u32]) -> Result<()> {
        let bytes = encode_block(words)?;
        let file = format!("{name}.bin");
        let tmp = self.dir.join(format!("{file}.tmp"));
        fs::File::create(&tmp)?.write_all(&bytes)?;
        fs::rename(&tmp, self.dir.join(&file))?;
        self.manifest.artifacts.insert(
            name.to_string(),
            ArtifactEntry {
                file,
                sha256: hex::encode(Sha256::digest(&bytes)),
                words: words.len() as u64,
            },
        );
        self.write_manifest()
    }

    fn write_manifest(&self) -> Result<()> {
        let tmp = self.dir.join(format!("{MANIFEST}.tmp"));
        fs::write(&tmp, serde_json::to_vec_pretty(&self.manifest)?)?;
        fs::rename(&tmp, self.dir.join(MANIFEST))?;
        Ok(())
    }
}

pub fn encode_block(words: &[u32]) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(16 + 4 * words.len());
    out.extend_from_slice(MAGIC);
    out.write_u32::<LittleEndian>(CACHE_FORMAT_VERSION)?;
    out.write_u64::<LittleEndian>(words.len() as u64)?;
    for &w in words {
        out.write_u32::<LittleEndian>(w)?;
    }
    Ok(out)
}

pub fn decode_block(bytes: &[u8]) -> Result<Vec<u32>> {
    let mut r = Cursor::new(bytes);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(|_| Error::Cache("truncated block".into()))?;
    if &magic != MAGIC {
        return Err(Error::Cache("bad block magic".into()));
    }
    let version = r.read_u32::<LittleEndian>()?;
    if version != CACHE_FORMAT_VERSION {
        return Err(Error::Cache(format!("block format {version}, expected {CACHE_FORMAT_VERSION}")));
    }
    let len = r.read_u64::<LittleEndian>()?;
    if bytes.len() as u64 != 16 + 4 * len {
        return Err(Error::Cache("block length does not match its header".into()));
    }
    (0..len)
        .map(|_| r.read_u32::<LittleEndian>().map_err(Error::from))
        .collect()
}

/// `[count, len_1, items_1.., len_2, items_2.., ...]`.
pub fn encode_sets(sets: &[Vec<u32>]) -> Vec<u32> {
    let mut out = vec![sets.len() as u32];
    for s in sets {
        out.push(s.len() as u32);
        out.extend_from_slice(s);
    }
    out
}

pub fn decode_sets(words: &[u32]) -> Result<Vec<Vec<u32>>> {
    let bad = || Error::Cache("malformed set list".into());
    let (&count, mut rest) = words.split_first().ok_or_else(bad)?;
    let mut out = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let (&len, tail) = rest.split_first().ok_or_else(bad)?;
        if tail.len() < len as usize {
            return Err(bad());
        }
        out.push(tail[..len as usize].to_vec());
        rest = &tail[len as usize..];
    }
    if !rest.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

/// Curve points and self-polar triangles, as plane indices.
pub fn encode_geometry(plane: &Plane, self_polar: &[Triangle]) -> Vec<u32> {
    let tris: Vec<Vec<u32>> = self_polar.iter().map(|t| t.vertices.to_vec()).collect();
    let mut out = encode_sets(&[plane.curve().to_vec()]);
    out.extend(encode_sets(&tris));
    out
}

/// Base followed by the images of the strong generators.
pub fn encode_bsgs(bsgs: &Bsgs) -> Vec<u32> {
    let mut lists = vec![bsgs.base()];
    lists.extend(bsgs.strong_generators().iter().map(|g| g.images().to_vec()));
    encode_sets(&lists)
}

/// Digest of a sequence of fingerprints, for round-trip comparisons.
pub fn fingerprint_digest<'a>(digests: impl IntoIterator<Item = &'a str>) -> String {
    let mut h = Sha256::new();
    for d in digests {
        h.update(d.as_bytes());
        h.update(b"\n");
    }
    hex::encode(h.finalize())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_round_trip() {
        let words = vec![0, 1, u32::MAX, 17];
        let bytes = encode_block(&words).unwrap();
        assert_eq!(decode_block(&bytes).unwrap(), words);
        let mut bad = bytes.clone();
        bad[4] = 99;
        assert!(decode_block(&bad).is_err());
        assert!(decode_block(&bytes[..bytes.len() - 1]).is_err());
    }

    #[test]
    fn sets_round_trip() {
        let sets = vec![vec![], vec![3, 1], vec![7]];
        assert_eq!(decode_sets(&encode_sets(&sets)).unwrap(), sets);
        assert!(decode_sets(&[2, 1, 5]).is_err());
    }
}
