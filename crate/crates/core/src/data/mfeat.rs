use std::fs;
use std::path::{Path, PathBuf};

use super::{parse_rows, MultiViewDataset, View};
use crate::error::{Error, Result};

/// File suffix and feature count of each view, in load order.
pub const MFEAT_VIEWS: [(&str, usize); 6] = [
    ("fou", 76),
    ("fac", 216),
    ("kar", 64),
    ("pix", 240),
    ("zer", 47),
    ("mor", 6),
];

const ROWS: usize = 2000;
const PER_CLASS: usize = 200;

/// `$QMVKL_MFEAT_DIR`, else `data/mfeat` under the workspace root.
pub fn default_mfeat_dir() -> PathBuf {
    if let Some(dir) = std::env::var_os("QMVKL_MFEAT_DIR") {
        return PathBuf::from(dir);
    }
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/mfeat")
}

/// Loads the six `mfeat-*` files from `dir`. Labels are the digit of each
/// 200-row block.
pub fn load_mfeat(dir: &Path) -> Result<MultiViewDataset> {
    let mut views = Vec::with_capacity(MFEAT_VIEWS.len());
    for (suffix, dim) in MFEAT_VIEWS {
        let path = dir.join(format!("mfeat-{suffix}"));
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let rows = parse_rows(&text, &path)?;
        if rows.len() != ROWS {
            return Err(Error::format(
                &path,
                format!("expected {ROWS} rows, found {}", rows.len()),
            ));
        }
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != dim) {
            return Err(Error::format(
                &path,
                format!("row {}: expected {dim} columns, found {}", i + 1, r.len()),
            ));
        }
        views.push(View::new(suffix.to_ascii_uppercase(), rows)?);
    }
    let labels = (0..ROWS).map(|i| (i / PER_CLASS) as i64).collect();
    MultiViewDataset::new(views, labels, 10, dir.display().to_string())
}
