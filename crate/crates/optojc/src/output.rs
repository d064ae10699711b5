//! All-or-nothing writes of a run's output files.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{HarnessError, Result};

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// `<prefix><suffix>`; a prefix ending in a separator names a directory.
pub fn target_path(prefix: &str, suffix: &str) -> PathBuf {
    PathBuf::from(format!("{prefix}{suffix}"))
}

/// Writes every file to a hidden temporary sibling, then renames them all.
/// On any failure the temporaries are removed and no target is touched.
pub fn write_all(prefix: &str, files: &[(String, String)]) -> Result<Vec<PathBuf>> {
    let targets: Vec<PathBuf> = files.iter().map(|(s, _)| target_path(prefix, s)).collect();
    let temps: Vec<PathBuf> = targets
        .iter()
        .map(|t| {
            let name = t
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            t.with_file_name(format!(".{name}.{}.partial", std::process::id()))
        })
        .collect();

    let staged = (|| -> Result<()> {
        for (tmp, (_, body)) in temps.iter().zip(files) {
            if let Some(dir) = tmp.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(io_err(dir))?;
            }
            let mut f = fs::File::create(tmp).map_err(io_err(tmp))?;
            f.write_all(body.as_bytes()).map_err(io_err(tmp))?;
            f.sync_all().map_err(io_err(tmp))?;
        }
        Ok(())
    })();
    if let Err(e) = staged {
        cleanup(&temps);
        return Err(e);
    }
    for (i, (tmp, target)) in temps.iter().zip(&targets).enumerate() {
        if let Err(source) = fs::rename(tmp, target) {
            cleanup(&temps[i..]);
            for done in &targets[..i] {
                let _ = fs::remove_file(done);
            }
            return Err(HarnessError::Io {
                path: target.display().to_string(),
                source,
            });
        }
    }
    Ok(targets)
}

fn cleanup(paths: &[PathBuf]) {
    for p in paths {
        let _ = fs::remove_file(p);
    }
}
