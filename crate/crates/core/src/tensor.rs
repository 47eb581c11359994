//! Dense tensors with a single documented index linearization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::TensorFormat;

/// A dense tensor of some format. Entries are stored flat in row-major
/// order over the dims: the last index moves fastest, so
/// `idx(i_1, ..., i_k) = ((i_1 * d_2 + i_2) * d_3 + i_3) ...`.
/// Every operation in the crate uses this one bijection.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseTensor<T> {
    format: TensorFormat,
    entries: Vec<T>,
}

impl<T> DenseTensor<T> {
    pub fn new(format: TensorFormat, entries: Vec<T>) -> Result<Self> {
        if entries.len() != format.volume() {
            return Err(Error::EntryCount {
                got: entries.len(),
                expected: format.volume(),
            });
        }
        Ok(DenseTensor { format, entries })
    }

    pub fn format(&self) -> &TensorFormat {
        &self.format
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    /// Flat position of a multi-index.
    pub fn linear_index(&self, index: &[usize]) -> usize {
        let dims = self.format.dims();
        debug_assert_eq!(index.len(), dims.len());
        let mut idx = 0usize;
        for (i, &d) in index.iter().zip(dims) {
            debug_assert!(*i < d);
            idx = idx * d + i;
        }
        idx
    }

    pub fn get(&self, index: &[usize]) -> &T {
        &self.entries[self.linear_index(index)]
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> DenseTensor<U> {
        DenseTensor {
            format: self.format.clone(),
            entries: self.entries.iter().map(f).collect(),
        }
    }
}

/// Iterates over all multi-indices of a dims vector in linear order.
pub fn multi_indices(dims: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let total: usize = dims.iter().product();
    let k = dims.len();
    (0..total).map(move |mut flat| {
        let mut idx = vec![0usize; k];
        for pos in (0..k).rev() {
            idx[pos] = flat % dims[pos];
            flat /= dims[pos];
        }
        idx
    })
}

/// On-disk JSON schema: `{"dims": [...], "entries": [...]}` with entries in
/// the linearization above.
#[derive(Serialize, Deserialize)]
pub struct TensorFile {
    pub dims: Vec<usize>,
    pub entries: Vec<serde_json::Number>,
}

impl TensorFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Io(format!("bad tensor file: {e}")))
    }

    pub fn to_f64(&self) -> Result<DenseTensor<f64>> {
        let format = TensorFormat::new(self.dims.clone())?;
        let entries = self
            .entries
            .iter()
            .map(|n| {
                n.as_f64()
                    .ok_or_else(|| Error::Io(format!("entry {n} is not a float")))
            })
            .collect::<Result<Vec<_>>>()?;
        DenseTensor::new(format, entries)
    }

    pub fn to_i64(&self) -> Result<DenseTensor<i64>> {
        let format = TensorFormat::new(self.dims.clone())?;
        let entries = self
            .entries
            .iter()
            .map(|n| {
                n.as_i64()
                    .ok_or_else(|| Error::Io(format!("entry {n} is not an integer")))
            })
            .collect::<Result<Vec<_>>>()?;
        DenseTensor::new(format, entries)
    }

    pub fn from_i64(tensor: &DenseTensor<i64>) -> Self {
        TensorFile {
            dims: tensor.format().dims().to_vec(),
            entries: tensor.entries().iter().map(|&x| x.into()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linearization_is_row_major() {
        let fmt = TensorFormat::new(vec![2, 3, 2]).unwrap();
        let t = DenseTensor::new(fmt, (0..12i64).collect()).unwrap();
        assert_eq!(*t.get(&[0, 0, 0]), 0);
        assert_eq!(*t.get(&[0, 0, 1]), 1);
        assert_eq!(*t.get(&[0, 1, 0]), 2);
        assert_eq!(*t.get(&[1, 0, 0]), 6);
        assert_eq!(*t.get(&[1, 2, 1]), 11);
    }

    #[test]
    fn multi_indices_cover_everything() {
        let dims = [2usize, 3, 2];
        let fmt = TensorFormat::new(dims.to_vec()).unwrap();
        let t = DenseTensor::new(fmt, (0..12i64).collect()).unwrap();
        for (flat, idx) in multi_indices(&dims).enumerate() {
            assert_eq!(t.linear_index(&idx), flat);
        }
    }

    #[test]
    fn entry_count_guard() {
        let fmt = TensorFormat::new(vec![2, 2]).unwrap();
        assert!(matches!(
            DenseTensor::new(fmt, vec![1i64, 2, 3]),
            Err(Error::EntryCount { got: 3, expected: 4 })
        ));
    }

    #[test]
    fn tensor_file_round_trip() {
        let fmt = TensorFormat::new(vec![2, 2]).unwrap();
        let t = DenseTensor::new(fmt, vec![1i64, -2, 3, 4]).unwrap();
        let text = serde_json::to_string(&TensorFile::from_i64(&t)).unwrap();
        let back = TensorFile::parse(&text).unwrap().to_i64().unwrap();
        assert_eq!(back, t);
        // floats load through the f64 reader but not the integer one
        let f = TensorFile::parse(r#"{"dims":[2,2],"entries":[0.5,1,2,3]}"#).unwrap();
        assert!(f.to_i64().is_err());
        assert!(f.to_f64().is_ok());
    }
}
