//! On-disk slice cache: `{root}/{family}/{n}/{v}_{e}_{s}.{ext}`. Files are
//! written to a temporary name and renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use graphcx::{ComplexSlice, Family, FamilyTag, SliceKey, SliceStore};

use crate::CliError;

pub struct Cache {
    root: PathBuf,
}

/// The `s` field of a file name. Oriented and directed slices without a
/// fixed source count use `all`.
fn s_field(key: &SliceKey) -> String {
    match key.tag.family {
        Family::Hairy(s) | Family::Sourced(s) => s.to_string(),
        _ => key.sources.map_or_else(|| "all".to_string(), |s| s.to_string()),
    }
}

fn parse_name(family: &str, n: i64, stem: &str) -> Option<SliceKey> {
    let mut parts = stem.split('_');
    let v: usize = parts.next()?.parse().ok()?;
    let e: usize = parts.next()?.parse().ok()?;
    let s = parts.next()?;
    if parts.next().is_some() {
        return None;
    }
    let fixed: Option<usize> = if s == "all" { None } else { Some(s.parse().ok()?) };
    let fam = match family {
        "directed" => Family::Directed,
        "oriented" => Family::Oriented,
        "sourced" => Family::Sourced(fixed?),
        "hairy" => Family::Hairy(fixed?),
        _ => return None,
    };
    let tag = FamilyTag::new(fam, n);
    Some(match (fam, fixed) {
        (Family::Directed | Family::Oriented, Some(s)) => SliceKey::with_sources(tag, v, e, s),
        _ => SliceKey::new(tag, v, e),
    })
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().and_then(|x| x.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let mut f = fs::File::create(&tmp)?;
    f.write_all(contents)?;
    f.sync_all()?;
    fs::rename(&tmp, path)?;
    Ok(())
}

impl Cache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Cache { root: root.into() }
    }

    pub fn dir(&self, family: &str, n: i64) -> PathBuf {
        self.root.join(family).join(n.to_string())
    }

    pub fn path(&self, key: &SliceKey, ext: &str) -> PathBuf {
        self.dir(key.tag.family.name(), key.tag.n)
            .join(format!("{}_{}_{}.{ext}", key.v, key.e, s_field(key)))
    }

    /// Loads every cached basis of the given family name and parameter.
    pub fn load(&self, store: &SliceStore, family: &str, n: i64) -> Result<usize, CliError> {
        let dir = self.dir(family, n);
        let Ok(entries) = fs::read_dir(&dir) else {
            return Ok(0);
        };
        let mut loaded = 0;
        for entry in entries {
            let path = entry?.path();
            let Some(name) = path.file_name().and_then(|x| x.to_str()) else { continue };
            let Some(stem) = name.strip_suffix(".basis.jsonl") else { continue };
            let Some(key) = parse_name(family, n, stem) else { continue };
            if !store.contains(&key) {
                let slice = ComplexSlice::from_jsonl(key, &fs::read_to_string(&path)?)?;
                store.insert(slice);
                loaded += 1;
            }
        }
        Ok(loaded)
    }

    /// Writes the basis of every slice in the store that is not yet on disk.
    pub fn save(&self, store: &SliceStore) -> Result<usize, CliError> {
        let mut written = 0;
        for slice in store.snapshot() {
            let path = self.path(&slice.key, "basis.jsonl");
            if !path.exists() {
                write_atomic(&path, slice.to_jsonl().as_bytes())?;
                written += 1;
            }
        }
        Ok(written)
    }
}
