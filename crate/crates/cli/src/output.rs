use std::io::Write;
use std::path::Path;

use serde::Serialize;
use tempfile::NamedTempFile;

use crate::{Failure, EXIT_CONFIG};

pub struct OutFile {
    pub name: &'static str,
    pub bytes: Vec<u8>,
}

pub fn json<T: Serialize>(name: &'static str, value: &T) -> Result<OutFile, Failure> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| Failure {
        code: EXIT_CONFIG,
        message: format!("serializing {name}: {e}"),
    })?;
    bytes.push(b'\n');
    Ok(OutFile { name, bytes })
}

pub fn text(name: &'static str, body: String) -> OutFile {
    OutFile {
        name,
        bytes: body.into_bytes(),
    }
}

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure {
        code: EXIT_CONFIG,
        message: format!("cannot write {}: {e}", path.display()),
    }
}

/// Writes every file through a temporary file in `dir` and a rename, so a reader never
/// sees a partial file.
pub fn write_all(dir: &Path, files: &[OutFile]) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
    for f in files {
        let target = dir.join(f.name);
        let mut tmp = NamedTempFile::new_in(dir).map_err(|e| io_failure(&target, e))?;
        tmp.write_all(&f.bytes).map_err(|e| io_failure(&target, e))?;
        tmp.as_file().sync_all().map_err(|e| io_failure(&target, e))?;
        tmp.persist(&target).map_err(|e| io_failure(&target, e.error))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn writes_and_replaces() {
        let dir = tempfile::tempdir().unwrap();
        write_all(dir.path(), &[text("a.txt", "one".into())]).unwrap();
        write_all(dir.path(), &[text("a.txt", "two".into())]).unwrap();
        assert_eq!(std::fs::read_to_string(dir.path().join("a.txt")).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
