//! In-memory graph store with optional file persistence.

use std::collections::HashMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use crate::document::{parse_graph, serialize_graph, GraphDocument};

#[derive(Debug, Default)]
pub struct Store {
    docs: HashMap<String, GraphDocument>,
    dir: Option<PathBuf>,
}

fn valid_id(id: &str) -> bool {
    !id.is_empty()
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

impl Store {
    pub fn in_memory() -> Store {
        Store::default()
    }

    /// Loads every `<id>.json` under `dir`, creating it if missing.
    pub fn open(dir: impl AsRef<Path>) -> io::Result<Store> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir)?;
        let mut docs = HashMap::new();
        for entry in fs::read_dir(&dir)? {
            let path = entry?.path();
            if path.extension().is_none_or(|e| e != "json") {
                continue;
            }
            let Some(id) = path
                .file_stem()
                .and_then(|s| s.to_str())
                .filter(|s| valid_id(s))
            else {
                continue;
            };
            let bytes = fs::read(&path)?;
            let doc = parse_graph(&bytes).map_err(|e| {
                io::Error::new(
                    io::ErrorKind::InvalidData,
                    format!("{}: {e}", path.display()),
                )
            })?;
            docs.insert(id.to_string(), doc);
        }
        Ok(Store {
            docs,
            dir: Some(dir),
        })
    }

    pub fn get(&self, id: &str) -> Option<&GraphDocument> {
        self.docs.get(id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.docs.contains_key(id)
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    /// Returns whether `id` was new.
    pub fn put(&mut self, id: &str, doc: GraphDocument) -> io::Result<bool> {
        if !valid_id(id) {
            return Err(io::Error::new(
                io::ErrorKind::InvalidInput,
                format!("invalid graph id `{id}`"),
            ));
        }
        if let Some(dir) = &self.dir {
            let tmp = dir.join(format!(".{id}.json.tmp"));
            fs::write(&tmp, serialize_graph(&doc))?;
            fs::rename(&tmp, dir.join(format!("{id}.json")))?;
        }
        Ok(self.docs.insert(id.to_string(), doc).is_none())
    }
}
