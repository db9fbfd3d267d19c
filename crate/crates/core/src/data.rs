use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DataError {
    #[error("column {column} has {len} rows, expected {n}")]
    RaggedColumns { column: usize, len: usize, n: usize },
    #[error("{names} column names for {p} columns")]
    NameCount { names: usize, p: usize },
    #[error("dataset has no columns")]
    NoColumns,
}

/// An `n x p` observation matrix stored column-major, with column names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    n: usize,
    p: usize,
    values: Vec<f64>,
    names: Vec<String>,
}

impl Dataset {
    pub fn from_columns(columns: Vec<Vec<f64>>) -> Result<Self, DataError> {
        let p = columns.len();
        let names = (0..p).map(|j| format!("X{j}")).collect();
        Self::with_names(columns, names)
    }

    pub fn with_names(columns: Vec<Vec<f64>>, names: Vec<String>) -> Result<Self, DataError> {
        let p = columns.len();
        if p == 0 {
            return Err(DataError::NoColumns);
        }
        if names.len() != p {
            return Err(DataError::NameCount {
                names: names.len(),
                p,
            });
        }
        let n = columns[0].len();
        let mut values = Vec::with_capacity(n * p);
        for (j, col) in columns.into_iter().enumerate() {
            if col.len() != n {
                return Err(DataError::RaggedColumns {
                    column: j,
                    len: col.len(),
                    n,
                });
            }
            values.extend(col);
        }
        Ok(Dataset {
            n,
            p,
            values,
            names,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.values[j * self.n..(j + 1) * self.n]
    }

    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.values[col * self.n + row]
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// A new dataset holding the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Dataset {
        let mut values = Vec::with_capacity(rows.len() * self.p);
        for j in 0..self.p {
            let col = self.column(j);
            values.extend(rows.iter().map(|&r| col[r]));
        }
        Dataset {
            n: rows.len(),
            p: self.p,
            values,
            names: self.names.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn columns_and_rows() {
        let d = Dataset::from_columns(vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
        assert_eq!((d.n(), d.p()), (3, 2));
        assert_eq!(d.column(1), &[4.0, 5.0, 6.0]);
        assert_eq!(d.names(), &["X0", "X1"]);
        let s = d.select_rows(&[2, 0]);
        assert_eq!(s.column(0), &[3.0, 1.0]);
        assert_eq!(s.value(1, 1), 4.0);
    }

    #[test]
    fn rejects_ragged() {
        assert!(matches!(
            Dataset::from_columns(vec![vec![1.0], vec![1.0, 2.0]]),
            Err(DataError::RaggedColumns { column: 1, .. })
        ));
        assert_eq!(Dataset::from_columns(vec![]), Err(DataError::NoColumns));
    }
}
