use std::fmt;
use std::path::Path;

use crate::error::SynthError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    Bonafide,
    Spoof,
}

impl Label {
    pub fn as_str(&self) -> &'static str {
        match self {
            Label::Bonafide => "bonafide",
            Label::Spoof => "spoof",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subset {
    Train,
    Dev,
    Eval,
}

impl Subset {
    pub fn as_str(&self) -> &'static str {
        match self {
            Subset::Train => "train",
            Subset::Dev => "dev",
            Subset::Eval => "eval",
        }
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One corpus clip. `path` is relative to the manifest's directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub path: String,
    pub label: Label,
    pub subset: Subset,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DatasetManifest {
    pub entries: Vec<ManifestEntry>,
}

impl DatasetManifest {
    pub fn subset(&self, s: Subset) -> Vec<&ManifestEntry> {
        self.entries.iter().filter(|e| e.subset == s).collect()
    }
}

pub fn save_manifest(m: &DatasetManifest, path: &Path) -> Result<(), SynthError> {
    let mut out = String::from("path,label,subset\n");
    for e in &m.entries {
        out.push_str(&format!("{},{},{}\n", e.path, e.label, e.subset));
    }
    std::fs::write(path, out).map_err(|e| SynthError::Io {
        path: path.display().to_string(),
        source: e,
    })
}

/// Parses and validates a manifest. Every complaint carries the 1-based line
/// number of the offending row; referenced files must exist next to the
/// manifest.
pub fn load_manifest(path: &Path) -> Result<DatasetManifest, SynthError> {
    let text = std::fs::read_to_string(path).map_err(|e| SynthError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, "path,label,subset")) => {}
        Some((_, other)) => {
            return Err(SynthError::BadManifest {
                detail: format!("line 1: expected header path,label,subset, got {other:?}"),
            })
        }
        None => {
            return Err(SynthError::BadManifest {
                detail: "empty file".into(),
            })
        }
    }
    let mut entries = Vec::new();
    let mut problems = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (idx, line) in lines {
        let row = idx + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            problems.push(format!("row {row}: expected 3 fields, got {}", fields.len()));
            continue;
        }
        let label = match fields[1] {
            "bonafide" => Label::Bonafide,
            "spoof" => Label::Spoof,
            other => {
                problems.push(format!("row {row}: unknown label {other:?}"));
                continue;
            }
        };
        let subset = match fields[2] {
            "train" => Subset::Train,
            "dev" => Subset::Dev,
            "eval" => Subset::Eval,
            other => {
                problems.push(format!("row {row}: unknown subset {other:?}"));
                continue;
            }
        };
        if !seen.insert(fields[0].to_string()) {
            problems.push(format!("row {row}: duplicate path {:?}", fields[0]));
            continue;
        }
        if !base.join(fields[0]).exists() {
            problems.push(format!("row {row}: missing file {:?}", fields[0]));
            continue;
        }
        entries.push(ManifestEntry {
            path: fields[0].to_string(),
            label,
            subset,
        });
    }
    if !problems.is_empty() {
        return Err(SynthError::BadManifest {
            detail: problems.join("; "),
        });
    }
    if entries.is_empty() {
        return Err(SynthError::BadManifest {
            detail: "no entries".into(),
        });
    }
    Ok(DatasetManifest { entries })
}
