//! Dataset loading, preprocessing, splitting and synthetic generation.

mod mfeat;
mod pca;
mod scale;
mod split;
mod synth;

pub use mfeat::{default_mfeat_dir, load_mfeat, MFEAT_VIEWS};
pub use pca::{pca_reduce, PcaTransform};
pub use scale::{scale_features, ScaleTransform};
pub use split::{balanced_split, binarize_labels, SplitSpec};
pub use synth::{synthesize_dataset, SynthSpec};

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// One feature view: `N` rows of equal dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct View {
    pub name: String,
    pub rows: Vec<Vec<f64>>,
}

impl View {
    pub fn new(name: impl Into<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        for (row, r) in rows.iter().enumerate() {
            if r.len() != d {
                return Err(Error::Ragged {
                    row,
                    expected: d,
                    found: r.len(),
                });
            }
        }
        Ok(Self {
            name: name.into(),
            rows,
        })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn select(&self, indices: &[usize]) -> Vec<Vec<f64>> {
        indices.iter().map(|&i| self.rows[i].clone()).collect()
    }
}

/// Views over a shared set of instances with integer class labels.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiViewDataset {
    views: Vec<View>,
    labels: Vec<i64>,
    num_classes: usize,
    provenance: String,
}

impl MultiViewDataset {
    /// Labels must lie in `0..num_classes`.
    pub fn new(
        views: Vec<View>,
        labels: Vec<i64>,
        num_classes: usize,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        if let Some(&bad) = labels.iter().find(|&&l| l < 0 || l as usize >= num_classes) {
            return Err(Error::InvalidLabel(bad));
        }
        if views.is_empty() {
            return Err(Error::EmptyInput);
        }
        for v in &views {
            if v.len() != labels.len() {
                return Err(Error::DimensionMismatch {
                    expected: labels.len(),
                    found: v.len(),
                });
            }
        }
        Ok(Self {
            views,
            labels,
            num_classes,
            provenance: provenance.into(),
        })
    }

    pub fn views(&self) -> &[View] {
        &self.views
    }

    pub fn view(&self, name: &str) -> Option<&View> {
        self.views.iter().find(|v| v.name.eq_ignore_ascii_case(name))
    }

    pub fn labels(&self) -> &[i64] {
        &self.labels
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    /// Classes below `num_classes / 2` map to −1, the rest to +1 (for
    /// digits this is 0–4 versus 5–9).
    pub fn binary_labels(&self) -> Vec<i8> {
        let half = (self.num_classes / 2) as i64;
        self.labels.iter().map(|&l| if l < half { -1 } else { 1 }).collect()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn num_views(&self) -> usize {
        self.views.len()
    }

    pub fn names(&self) -> Vec<String> {
        self.views.iter().map(|v| v.name.clone()).collect()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.views.iter().map(View::dim).collect()
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// Keeps only the named views, in the given order.
    pub fn with_views(&self, names: &[String]) -> Result<Self> {
        let views = names
            .iter()
            .map(|n| {
                self.view(n)
                    .cloned()
                    .ok_or_else(|| Error::InvalidConfig(format!("unknown view {n:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(views, self.labels.clone(), self.num_classes, self.provenance.clone())
    }
}

/// Writes `<name>.txt` per view (header `N d`, then rows) and `labels.txt`.
pub fn write_dataset(views: &[View], labels: &[i64], dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for v in views {
        let path = dir.join(format!("{}.txt", v.name.to_ascii_lowercase()));
        let mut out = format!("{} {}\n", v.len(), v.dim());
        for r in &v.rows {
            let line: Vec<String> = r.iter().map(|x| format!("{x:.16e}")).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        write_file(&path, &out)?;
    }
    let mut out = format!("{}\n", labels.len());
    for l in labels {
        out.push_str(&format!("{l}\n"));
    }
    write_file(&dir.join("labels.txt"), &out)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}

/// Reads whitespace-separated numeric rows.
pub(crate) fn parse_rows(text: &str, path: &Path) -> Result<Vec<Vec<f64>>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.split_whitespace()
                .map(|t| {
                    t.parse::<f64>()
                        .map_err(|_| Error::format(path, format!("line {}: bad number {t:?}", i + 1)))
                })
                .collect()
        })
        .collect()
}
