//! Append-only store of class group structures, one JSON object per line.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{class_group, ClassGroupMethod, ClassGroupStructure};

pub const CACHE_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct CacheRecord {
    disc: i64,
    divisors: Vec<u64>,
    method: ClassGroupMethod,
    version: u32,
}

#[derive(Debug)]
pub struct ClassGroupCache {
    path: PathBuf,
    index: BTreeMap<i64, ClassGroupStructure>,
    file: File,
}

impl ClassGroupCache {
    /// Opens (creating if needed) the store at `path`. A corrupt final line
    /// is cut off with a warning; a corrupt line elsewhere is an error.
    pub fn open(path: &Path) -> Result<Self> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let mut index = BTreeMap::new();
        if path.exists() {
            let mut reader = BufReader::new(File::open(path)?);
            let mut offset = 0u64;
            let mut line_no = 0u64;
            let mut buf = String::new();
            let mut bad: Option<(u64, u64)> = None;
            loop {
                buf.clear();
                let n = reader.read_line(&mut buf)?;
                if n == 0 {
                    break;
                }
                line_no += 1;
                if let Some((line, _)) = bad {
                    return Err(Error::CorruptCache(line));
                }
                let complete = buf.ends_with('\n');
                match serde_json::from_str::<CacheRecord>(buf.trim_end()) {
                    Ok(rec) if complete => {
                        if rec.version != CACHE_VERSION {
                            return Err(Error::VersionMismatch { found: rec.version, expected: CACHE_VERSION });
                        }
                        let structure = ClassGroupStructure::new(rec.divisors, rec.method, rec.disc > 0)
                            .map_err(|_| Error::CorruptCache(line_no))?;
                        index.insert(rec.disc, structure);
                    }
                    _ => bad = Some((line_no, offset)),
                }
                offset += n as u64;
            }
            if let Some((line, at)) = bad {
                log::warn!("truncating corrupt trailing line {line} of {}", path.display());
                OpenOptions::new().write(true).open(path)?.set_len(at)?;
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(ClassGroupCache { path: path.to_path_buf(), index, file })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn get(&self, disc: i64) -> Option<&ClassGroupStructure> {
        self.index.get(&disc)
    }

    /// Appends one record. Each record goes out in a single write.
    pub fn insert(&mut self, disc: i64, structure: &ClassGroupStructure) -> Result<()> {
        if self.index.contains_key(&disc) {
            return Ok(());
        }
        let rec = CacheRecord {
            disc,
            divisors: structure.divisors.clone(),
            method: structure.method,
            version: CACHE_VERSION,
        };
        let mut line = serde_json::to_string(&rec).expect("record serializes");
        line.push('\n');
        self.file.write_all(line.as_bytes())?;
        self.file.flush()?;
        self.index.insert(disc, structure.clone());
        Ok(())
    }

    pub fn get_or_compute(&mut self, disc: i64, cap: u64) -> Result<ClassGroupStructure> {
        if let Some(s) = self.get(disc) {
            return Ok(s.clone());
        }
        let s = class_group(disc, cap)?;
        self.insert(disc, &s)?;
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::DEFAULT_CLASS_GROUP_CAP;

    fn lines(path: &Path) -> usize {
        std::fs::read_to_string(path).unwrap().lines().count()
    }

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.jsonl");
        let s = class_group(-23, 1000).unwrap();
        {
            let mut c = ClassGroupCache::open(&path).unwrap();
            assert_eq!(c.get_or_compute(-23, DEFAULT_CLASS_GROUP_CAP).unwrap(), s);
            assert_eq!(lines(&path), 1);
            c.get_or_compute(-23, DEFAULT_CLASS_GROUP_CAP).unwrap();
            assert_eq!(lines(&path), 1);
        }
        let c = ClassGroupCache::open(&path).unwrap();
        assert_eq!(c.get(-23), Some(&s));
        assert_eq!(c.len(), 1);
    }

    #[test]
    fn truncates_corrupt_tail() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.jsonl");
        let good = "{\"disc\":-23,\"divisors\":[3],\"method\":\"definite-reduction\",\"version\":1}\n";
        std::fs::write(&path, format!("{good}{{\"disc\":-4,\"divi")).unwrap();
        let mut c = ClassGroupCache::open(&path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), good);
        c.get_or_compute(-4, DEFAULT_CLASS_GROUP_CAP).unwrap();
        assert_eq!(lines(&path), 2);
        assert_eq!(ClassGroupCache::open(&path).unwrap().len(), 2);
    }

    #[test]
    fn corrupt_middle_line_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.jsonl");
        let good = "{\"disc\":-23,\"divisors\":[3],\"method\":\"definite-reduction\",\"version\":1}\n";
        std::fs::write(&path, format!("garbage\n{good}")).unwrap();
        assert!(matches!(ClassGroupCache::open(&path), Err(Error::CorruptCache(1))));
    }

    #[test]
    fn version_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.jsonl");
        std::fs::write(&path, "{\"disc\":-23,\"divisors\":[3],\"method\":\"definite-reduction\",\"version\":7}\n").unwrap();
        assert!(matches!(ClassGroupCache::open(&path), Err(Error::VersionMismatch { found: 7, expected: 1 })));
    }
}
