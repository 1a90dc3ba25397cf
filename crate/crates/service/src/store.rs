//! On-disk layout under the data directory:
//!
//! ```text
//! index.json
//! ontologies/<id>/enriched.ttl
//! ontologies/<id>/base.ttl          (optional)
//! ontologies/<id>/manifest.json     (optional)
//! ontologies/<id>/decisions.jsonl
//! ontologies/<id>/finalization.json (after finalize)
//! ```

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use chrono::{DateTime, Utc};
use ontoqual_core::onto::{apply_manifest, build_view, enrichment_diff, parse_manifest, ItemKind, OntologyView};
use ontoqual_core::rdf::parse_turtle;
use ontoqual_core::validation::{parse_log, write_log, DecisionLogEntry, FinalizationResult, ValidationError};
use serde::{Deserialize, Serialize};

use crate::error::{ApiError, StoreError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnrichmentSource {
    Diff,
    Manifest,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OntologyMeta {
    pub id: String,
    pub name: String,
    pub uploaded_at: DateTime<Utc>,
    pub enrichment: EnrichmentSource,
    pub triples: usize,
    pub enriched_items: usize,
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct Index {
    next_id: u64,
    ontologies: Vec<OntologyMeta>,
}

/// Raw upload contents.
pub struct Upload {
    pub name: String,
    pub enriched: String,
    pub base: Option<String>,
    pub manifest: Option<String>,
}

pub struct Ontology {
    pub meta: OntologyMeta,
    pub view: OntologyView,
    /// Enriched item key to kind.
    pub items: BTreeMap<String, ItemKind>,
    log: Mutex<Log>,
}

struct Log {
    file: File,
    entries: Vec<DecisionLogEntry>,
}

impl Ontology {
    /// Appends and syncs one entry before returning.
    pub fn append(&self, entry: DecisionLogEntry) -> Result<(), StoreError> {
        let mut log = self.log.lock().expect("log lock");
        let line = entry.to_json_line() + "\n";
        log.file
            .write_all(line.as_bytes())
            .and_then(|_| log.file.sync_data())
            .map_err(StoreError::io(format!("decision log of {}", self.meta.id)))?;
        log.entries.push(entry);
        Ok(())
    }

    /// Copy of the log as it is now.
    pub fn snapshot(&self) -> Vec<DecisionLogEntry> {
        self.log.lock().expect("log lock").entries.clone()
    }
}

pub struct Store {
    dir: PathBuf,
    index: Mutex<Index>,
    ontologies: RwLock<BTreeMap<String, Arc<Ontology>>>,
}

/// Builds the flagged view; errors map to the upload's HTTP status.
fn analyse(upload: &Upload) -> Result<(OntologyView, EnrichmentSource, usize), ApiError> {
    let enriched = parse_turtle(&upload.enriched, None).map_err(|e| ApiError::turtle("enriched", &e))?;
    let triples = enriched.len();
    let view = build_view(enriched);
    if let Some(manifest) = &upload.manifest {
        let iris = parse_manifest(manifest).map_err(|e| ApiError::bad_request(e.to_string()))?;
        let view = apply_manifest(&view, &iris).map_err(|e| ApiError::bad_request(e.to_string()))?;
        return Ok((view, EnrichmentSource::Manifest, triples));
    }
    if let Some(base) = &upload.base {
        let base = parse_turtle(base, None).map_err(|e| ApiError::turtle("base", &e))?;
        return Ok((enrichment_diff(&build_view(base), &view), EnrichmentSource::Diff, triples));
    }
    Err(ApiError::new(
        axum::http::StatusCode::UNPROCESSABLE_ENTITY,
        "either a base ontology or a manifest is required to identify enriched elements",
    ))
}

fn enriched_items(view: &OntologyView) -> BTreeMap<String, ItemKind> {
    view.validation_items(true).into_iter().map(|i| (i.item_key, i.item_kind)).collect()
}

fn write_atomic(path: &Path, body: &[u8]) -> Result<(), StoreError> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, body).map_err(StoreError::io(&tmp))?;
    fs::rename(&tmp, path).map_err(StoreError::io(path))
}

fn read_optional(path: &Path) -> Result<Option<String>, StoreError> {
    match fs::read_to_string(path) {
        Ok(s) => Ok(Some(s)),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(StoreError::Io { path: path.to_owned(), source: e }),
    }
}

/// Reads a decision log. A torn final line (a write that was never
/// acknowledged) is dropped and the file rewritten without it.
fn replay(path: &Path) -> Result<Vec<DecisionLogEntry>, StoreError> {
    let Some(text) = read_optional(path)? else {
        return Ok(Vec::new());
    };
    let corrupt = |e: ValidationError| StoreError::Corrupt { path: path.to_owned(), message: e.to_string() };
    let torn = !text.is_empty() && !text.ends_with('\n');
    let complete = if torn { &text[..text.rfind('\n').map_or(0, |i| i + 1)] } else { text.as_str() };
    let mut entries = parse_log(complete).map_err(corrupt)?;
    if torn {
        match serde_json::from_str(&text[complete.len()..]) {
            Ok(entry) => entries.push(entry),
            Err(_) => tracing::warn!("{}: dropping incomplete final entry", path.display()),
        }
        fs::write(path, write_log(&entries)).map_err(StoreError::io(path))?;
    }
    Ok(entries)
}

fn open_log(path: &Path, entries: Vec<DecisionLogEntry>) -> Result<Mutex<Log>, StoreError> {
    let file = OpenOptions::new().create(true).append(true).open(path).map_err(StoreError::io(path))?;
    Ok(Mutex::new(Log { file, entries }))
}

impl Store {
    /// Opens `dir`, creating it when missing, and replays every decision log.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Store, StoreError> {
        let dir = dir.into();
        fs::create_dir_all(dir.join("ontologies")).map_err(StoreError::io(&dir))?;
        let index_path = dir.join("index.json");
        let index: Index = match read_optional(&index_path)? {
            Some(text) => serde_json::from_str(&text)
                .map_err(|e| StoreError::Corrupt { path: index_path.clone(), message: e.to_string() })?,
            None => Index::default(),
        };
        let mut ontologies = BTreeMap::new();
        for meta in &index.ontologies {
            let folder = dir.join("ontologies").join(&meta.id);
            let read = |name: &str| read_optional(&folder.join(name));
            let upload = Upload {
                name: meta.name.clone(),
                enriched: read("enriched.ttl")?.ok_or_else(|| StoreError::Corrupt {
                    path: folder.join("enriched.ttl"),
                    message: "missing".into(),
                })?,
                base: read("base.ttl")?,
                manifest: read("manifest.json")?,
            };
            let (view, _, _) = analyse(&upload)
                .map_err(|e| StoreError::Corrupt { path: folder.clone(), message: e.message().to_owned() })?;
            let log_path = folder.join("decisions.jsonl");
            let entries = replay(&log_path)?;
            tracing::info!("loaded ontology {} with {} logged decisions", meta.id, entries.len());
            let items = enriched_items(&view);
            let ontology = Ontology { meta: meta.clone(), view, items, log: open_log(&log_path, entries)? };
            ontologies.insert(meta.id.clone(), Arc::new(ontology));
        }
        Ok(Store { dir, index: Mutex::new(index), ontologies: RwLock::new(ontologies) })
    }

    fn folder(&self, id: &str) -> PathBuf {
        self.dir.join("ontologies").join(id)
    }

    fn save_index(&self, index: &Index) -> Result<(), StoreError> {
        let body = serde_json::to_vec_pretty(index).expect("index serializes");
        write_atomic(&self.dir.join("index.json"), &body)
    }

    pub fn create(&self, upload: Upload) -> Result<OntologyMeta, ApiError> {
        let (view, enrichment, triples) = analyse(&upload)?;
        let items = enriched_items(&view);
        let mut index = self.index.lock().expect("index lock");
        index.next_id += 1;
        let id = format!("o{:04}", index.next_id);
        let meta = OntologyMeta {
            id: id.clone(),
            name: upload.name.clone(),
            uploaded_at: Utc::now(),
            enrichment,
            triples,
            enriched_items: items.len(),
        };
        let folder = self.folder(&id);
        fs::create_dir_all(&folder).map_err(StoreError::io(&folder))?;
        let write = |name: &str, body: &str| fs::write(folder.join(name), body).map_err(StoreError::io(folder.join(name)));
        write("enriched.ttl", &upload.enriched)?;
        if let Some(base) = &upload.base {
            write("base.ttl", base)?;
        }
        if let Some(manifest) = &upload.manifest {
            write("manifest.json", manifest)?;
        }
        let log = open_log(&folder.join("decisions.jsonl"), Vec::new())?;
        index.ontologies.push(meta.clone());
        self.save_index(&index)?;
        let ontology = Ontology { meta: meta.clone(), view, items, log };
        self.ontologies.write().expect("ontology lock").insert(id, Arc::new(ontology));
        Ok(meta)
    }

    pub fn list(&self) -> Vec<OntologyMeta> {
        self.ontologies.read().expect("ontology lock").values().map(|o| o.meta.clone()).collect()
    }

    pub fn get(&self, id: &str) -> Option<Arc<Ontology>> {
        self.ontologies.read().expect("ontology lock").get(id).cloned()
    }

    /// Removes the ontology and everything stored with it.
    pub fn delete(&self, id: &str) -> Result<bool, StoreError> {
        let mut index = self.index.lock().expect("index lock");
        if self.ontologies.write().expect("ontology lock").remove(id).is_none() {
            return Ok(false);
        }
        index.ontologies.retain(|m| m.id != id);
        self.save_index(&index)?;
        let folder = self.folder(id);
        fs::remove_dir_all(&folder).map_err(StoreError::io(folder))?;
        Ok(true)
    }

    pub fn save_finalization(&self, id: &str, result: &FinalizationResult) -> Result<(), StoreError> {
        write_atomic(&self.folder(id).join("finalization.json"), result.to_json().as_bytes())
    }

    pub fn finalization(&self, id: &str) -> Result<Option<FinalizationResult>, StoreError> {
        let path = self.folder(id).join("finalization.json");
        read_optional(&path)?
            .map(|text| serde_json::from_str(&text).map_err(|e| StoreError::Corrupt { path, message: e.to_string() }))
            .transpose()
    }
}
