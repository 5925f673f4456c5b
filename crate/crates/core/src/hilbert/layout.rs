use std::fmt;

use crate::error::{Error, Result};
use crate::tolerance;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subsystem {
    pub label: String,
    pub dim: usize,
}

/// Ordered list of labeled subsystems. The first subsystem is the most
/// significant digit of a joint basis index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubsystemLayout {
    systems: Vec<Subsystem>,
    total: usize,
}

impl SubsystemLayout {
    /// Builds a layout under the configured dimension cap (see [`tolerance::max_dim`]).
    pub fn new<I, S>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        Self::with_cap(entries, tolerance::max_dim())
    }

    pub fn with_cap<I, S>(entries: I, cap: usize) -> Result<Self>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let mut systems: Vec<Subsystem> = Vec::new();
        let mut total: usize = 1;
        for (label, dim) in entries {
            let label = label.into();
            if dim == 0 {
                return Err(Error::ZeroDimension(label));
            }
            if systems.iter().any(|s| s.label == label) {
                return Err(Error::LabelClash(label));
            }
            total = total
                .checked_mul(dim)
                .filter(|&t| t <= cap)
                .ok_or(Error::DimensionCap {
                    dim: total.saturating_mul(dim),
                    cap,
                })?;
            systems.push(Subsystem { label, dim });
        }
        Ok(SubsystemLayout { systems, total })
    }

    pub fn single(label: impl Into<String>, dim: usize) -> Result<Self> {
        Self::new([(label.into(), dim)])
    }

    pub fn total_dim(&self) -> usize {
        self.total
    }

    pub fn len(&self) -> usize {
        self.systems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.systems.is_empty()
    }

    pub fn systems(&self) -> &[Subsystem] {
        &self.systems
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.systems.iter().map(|s| s.label.as_str())
    }

    pub fn contains(&self, label: &str) -> bool {
        self.systems.iter().any(|s| s.label == label)
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.systems
            .iter()
            .position(|s| s.label == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn dim(&self, label: &str) -> Result<usize> {
        Ok(self.systems[self.position(label)?].dim)
    }

    /// Product of the dimensions of the given labels.
    pub fn dim_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<usize> {
        labels
            .iter()
            .try_fold(1usize, |acc, l| Ok(acc * self.dim(l.as_ref())?))
    }

    /// Concatenation; fails on a shared label.
    pub fn concat(&self, other: &SubsystemLayout) -> Result<Self> {
        Self::new(
            self.systems
                .iter()
                .chain(&other.systems)
                .map(|s| (s.label.clone(), s.dim)),
        )
    }

    /// Sub-layout with the given labels, in the given order.
    pub fn select<S: AsRef<str>>(&self, labels: &[S]) -> Result<Self> {
        let entries = labels
            .iter()
            .map(|l| Ok((l.as_ref().to_string(), self.dim(l.as_ref())?)))
            .collect::<Result<Vec<_>>>()?;
        Self::with_cap(entries, usize::MAX)
    }

    /// Labels not in `labels`, in layout order.
    pub fn complement<S: AsRef<str>>(&self, labels: &[S]) -> Vec<String> {
        self.labels()
            .filter(|l| !labels.iter().any(|k| k.as_ref() == *l))
            .map(str::to_string)
            .collect()
    }

    /// The given labels rearranged into layout order.
    pub fn in_layout_order<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<String>> {
        for l in labels {
            self.position(l.as_ref())?;
        }
        Ok(self
            .labels()
            .filter(|l| labels.iter().any(|k| k.as_ref() == *l))
            .map(str::to_string)
            .collect())
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.systems.len()];
        for i in (0..self.systems.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.systems[i + 1].dim;
        }
        strides
    }

    /// For every basis index of the sub-space spanned by `labels` (taken in
    /// the given order, first label most significant), the contribution of
    /// those digits to the joint index.
    pub(crate) fn offsets<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<usize>> {
        let strides = self.strides();
        let mut seen: Vec<usize> = Vec::with_capacity(labels.len());
        let mut offsets = vec![0usize];
        for l in labels {
            let pos = self.position(l.as_ref())?;
            if seen.contains(&pos) {
                return Err(Error::LabelClash(l.as_ref().to_string()));
            }
            seen.push(pos);
            let (dim, stride) = (self.systems[pos].dim, strides[pos]);
            offsets = offsets
                .iter()
                .flat_map(|&o| (0..dim).map(move |d| o + d * stride))
                .collect();
        }
        Ok(offsets)
    }

    /// Joint index of a basis state given one digit per subsystem.
    pub fn index_of(&self, digits: &[usize]) -> Result<usize> {
        if digits.len() != self.systems.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} digits for {} subsystems",
                digits.len(),
                self.systems.len()
            )));
        }
        let mut index = 0;
        for (d, s) in digits.iter().zip(&self.systems) {
            if *d >= s.dim {
                return Err(Error::DimensionMismatch(format!(
                    "digit {d} out of range for `{}` (dim {})",
                    s.label, s.dim
                )));
            }
            index = index * s.dim + d;
        }
        Ok(index)
    }

    /// Inverse of [`index_of`](Self::index_of).
    pub fn digits_of(&self, mut index: usize) -> Vec<usize> {
        let mut digits = vec![0; self.systems.len()];
        for (i, s) in self.systems.iter().enumerate().rev() {
            digits[i] = index % s.dim;
            index /= s.dim;
        }
        digits
    }
}

impl fmt::Display for SubsystemLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .systems
            .iter()
            .map(|s| format!("{}[{}]", s.label, s.dim))
            .collect();
        write!(f, "{}", parts.join(" ⊗ "))
    }
}
