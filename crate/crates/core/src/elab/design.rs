//! Design bundles: a root module definition plus every module type it
//! (transitively) instantiates, found by file name on a search path.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use thiserror::Error;

use crate::dsl::{parse_axiom_file, parse_module_definition, ModuleDef, ParseError};

#[derive(Debug, Error)]
pub enum DesignError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error("no definition file `{0}.mdef` on the search path")]
    UnknownModuleType(String),
    #[error("{path}: declares `{found}` but was loaded for `{expected}`")]
    NameMismatch {
        path: String,
        expected: String,
        found: String,
    },
    #[error("`{0}` is not an interface")]
    NotAnInterface(String),
}

/// Where module files come from. Implemented for directories on disk and
/// for in-memory maps used in tests.
pub trait SourceProvider {
    /// Returns `(display path, contents)` for a file name like `Core.mdef`.
    fn fetch(&self, file_name: &str) -> Result<Option<(String, String)>, DesignError>;
}

/// Searches directories in order; the first hit wins.
#[derive(Debug, Clone)]
pub struct SearchPath {
    pub dirs: Vec<PathBuf>,
}

impl SourceProvider for SearchPath {
    fn fetch(&self, file_name: &str) -> Result<Option<(String, String)>, DesignError> {
        for d in &self.dirs {
            let p = d.join(file_name);
            if p.is_file() {
                let text = fs::read_to_string(&p).map_err(|source| DesignError::Io {
                    path: p.display().to_string(),
                    source,
                })?;
                return Ok(Some((p.display().to_string(), text)));
            }
        }
        Ok(None)
    }
}

impl SourceProvider for BTreeMap<String, String> {
    fn fetch(&self, file_name: &str) -> Result<Option<(String, String)>, DesignError> {
        Ok(self.get(file_name).map(|t| (file_name.to_string(), t.clone())))
    }
}

/// A loaded set of module types keyed by name.
#[derive(Debug, Clone)]
pub struct Design {
    pub root: String,
    pub defs: BTreeMap<String, Arc<ModuleDef>>,
}

impl Design {
    /// Loads `root_file` and every module type it reaches. Include
    /// directories are searched before the root file's own directory, so
    /// they can shadow individual files.
    pub fn load(root_file: &Path, includes: &[PathBuf]) -> Result<Design, DesignError> {
        let text = fs::read_to_string(root_file).map_err(|source| DesignError::Io {
            path: root_file.display().to_string(),
            source,
        })?;
        let search = Self::search_path(root_file, includes);
        let root = parse_module_definition(&text).map_err(|source| DesignError::Parse {
            path: root_file.display().to_string(),
            source,
        })?;
        Self::from_root_def(root, &search)
    }

    /// Include directories followed by the root file's directory.
    pub fn search_path(root_file: &Path, includes: &[PathBuf]) -> SearchPath {
        let mut dirs = includes.to_vec();
        dirs.push(
            root_file
                .parent()
                .filter(|p| !p.as_os_str().is_empty())
                .map(Path::to_path_buf)
                .unwrap_or_else(|| PathBuf::from(".")),
        );
        SearchPath { dirs }
    }

    /// Loads the module type `root` and everything it reaches from `src`.
    pub fn from_provider(root: &str, src: &dyn SourceProvider) -> Result<Design, DesignError> {
        let def = load_def(root, src)?;
        let mut design = Design {
            root: root.to_string(),
            defs: BTreeMap::new(),
        };
        design.insert_closure(def, src)?;
        Ok(design)
    }

    fn from_root_def(root: ModuleDef, src: &dyn SourceProvider) -> Result<Design, DesignError> {
        let mut root = root;
        attach_axioms(&mut root, src)?;
        let mut design = Design {
            root: root.name.clone(),
            defs: BTreeMap::new(),
        };
        design.insert_closure(root, src)?;
        Ok(design)
    }

    fn insert_closure(&mut self, def: ModuleDef, src: &dyn SourceProvider) -> Result<(), DesignError> {
        let mut pending = vec![def];
        while let Some(def) = pending.pop() {
            if self.defs.contains_key(&def.name) {
                continue;
            }
            for s in &def.submodules {
                if !self.defs.contains_key(&s.module_type)
                    && !pending.iter().any(|p| p.name == s.module_type)
                {
                    pending.push(load_def(&s.module_type, src)?);
                }
            }
            self.defs.insert(def.name.clone(), Arc::new(def));
        }
        Ok(())
    }

    /// Loads an interface type that the root does not instantiate.
    pub fn load_interface(&mut self, name: &str, src: &dyn SourceProvider) -> Result<Arc<ModuleDef>, DesignError> {
        let def = match self.defs.get(name) {
            Some(d) => d.clone(),
            None => {
                let d = Arc::new(load_def(name, src)?);
                self.defs.insert(name.to_string(), d.clone());
                d
            }
        };
        if !def.is_interface {
            return Err(DesignError::NotAnInterface(name.to_string()));
        }
        Ok(def)
    }

    pub fn root_def(&self) -> &Arc<ModuleDef> {
        &self.defs[&self.root]
    }

    pub fn get(&self, name: &str) -> Option<&Arc<ModuleDef>> {
        self.defs.get(name)
    }
}

fn load_def(name: &str, src: &dyn SourceProvider) -> Result<ModuleDef, DesignError> {
    let (path, text) = src
        .fetch(&format!("{name}.mdef"))?
        .ok_or_else(|| DesignError::UnknownModuleType(name.to_string()))?;
    let mut def = parse_module_definition(&text).map_err(|source| DesignError::Parse {
        path: path.clone(),
        source,
    })?;
    if def.name != name {
        return Err(DesignError::NameMismatch {
            path,
            expected: name.to_string(),
            found: def.name,
        });
    }
    attach_axioms(&mut def, src)?;
    Ok(def)
}

/// Finds `<Name>.uax` (modules) or `<Name>.iface` (interfaces). A missing
/// file leaves the module without events or axioms.
fn attach_axioms(def: &mut ModuleDef, src: &dyn SourceProvider) -> Result<(), DesignError> {
    let ext = if def.is_interface { "iface" } else { "uax" };
    if let Some((path, text)) = src.fetch(&format!("{}.{ext}", def.name))? {
        let file = parse_axiom_file(&text).map_err(|source| DesignError::Parse {
            path: path.clone(),
            source,
        })?;
        if file.module_type != def.name {
            return Err(DesignError::NameMismatch {
                path,
                expected: def.name.clone(),
                found: file.module_type,
            });
        }
        def.attach_axiom_file(file);
    }
    Ok(())
}
