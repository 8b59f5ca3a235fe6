use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use littlestone_lab::{FaultKind, LabError, OracleFault};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Why a command stopped, and the exit status it maps to.
#[derive(Debug)]
pub enum Failure {
    Lab(LabError),
    Io { path: PathBuf, error: std::io::Error },
    Usage(String),
}

impl From<LabError> for Failure {
    fn from(e: LabError) -> Self {
        Failure::Lab(e)
    }
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Lab(LabError::Oracle(_) | LabError::Precondition(_)) => 2,
            Failure::Lab(LabError::ResourceGuard { .. }) => 3,
            _ => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Failure::Lab(LabError::Oracle(_)) => "oracle_fault",
            Failure::Lab(LabError::Precondition(_)) => "precondition",
            Failure::Lab(LabError::ResourceGuard { .. }) => "resource_guard",
            Failure::Lab(LabError::Config(_)) => "config",
            Failure::Lab(_) | Failure::Usage(_) => "parse",
            Failure::Io { .. } => "io",
        }
    }

    pub fn message(&self) -> String {
        match self {
            Failure::Lab(e) => e.to_string(),
            Failure::Io { path, error } => format!("{}: {error}", path.display()),
            Failure::Usage(m) => m.clone(),
        }
    }

    fn fault(&self) -> Option<&OracleFault> {
        match self {
            Failure::Lab(LabError::Oracle(f)) => Some(f),
            _ => None,
        }
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'static str,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    fault: Option<&'a OracleFault>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fault_kind: Option<FaultKind>,
}

pub fn error_body(f: &Failure) -> Value {
    serde_json::to_value(ErrorBody {
        kind: f.kind(),
        message: f.message(),
        fault: f.fault(),
        fault_kind: f.fault().map(|x| x.kind),
    })
    .expect("error body serializes")
}

/// Everything a report's digest covers: the verb, its non-path options, and
/// the bytes of every input file in the order read.
pub struct Inputs {
    verb: &'static str,
    params: Value,
    hasher: Sha256,
}

impl Inputs {
    pub fn new<P: Serialize>(verb: &'static str, params: &P) -> Self {
        let params = serde_json::to_value(params).expect("options serialize");
        let mut hasher = Sha256::new();
        hasher.update(verb.as_bytes());
        hasher.update([0]);
        hasher.update(params.to_string().as_bytes());
        Inputs { verb, params, hasher }
    }

    pub fn read(&mut self, path: &Path) -> Result<String, Failure> {
        let text = fs::read_to_string(path).map_err(|error| Failure::Io {
            path: path.to_path_buf(),
            error,
        })?;
        self.hasher.update((text.len() as u64).to_le_bytes());
        self.hasher.update(text.as_bytes());
        Ok(text)
    }

    pub fn envelope(&self, status: &str, body: Value) -> Value {
        serde_json::json!({
            "tool": "llab",
            "version": VERSION,
            "verb": self.verb,
            "options": self.params,
            "input_digest": hex::encode(self.hasher.clone().finalize()),
            "status": status,
            "report": body,
        })
    }
}

/// Writes through a temporary file in the same directory and renames it into
/// place, so readers never see a partial report.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let io = |error| Failure::Io {
        path: path.to_path_buf(),
        error,
    };
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| Failure::Usage(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    let mut f = fs::File::create(&tmp).map_err(io)?;
    f.write_all(bytes).map_err(io)?;
    f.sync_all().map_err(io)?;
    drop(f);
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io(e)
    })
}

pub fn to_pretty(v: &Value) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(v).expect("json");
    out.push(b'\n');
    out
}
