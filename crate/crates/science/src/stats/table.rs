use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Row 1 is (a, b), row 2 is (c, d).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table2x2 {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
}

impl Table2x2 {
    pub fn new(a: u64, b: u64, c: u64, d: u64) -> Result<Self> {
        let t = Table2x2 { a, b, c, d };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n() == 0 {
            return Err(Error::validation("table", "all cells are zero"));
        }
        Ok(())
    }

    pub fn n(&self) -> u64 {
        self.a + self.b + self.c + self.d
    }

    pub fn transpose(&self) -> Self {
        Table2x2 { b: self.c, c: self.b, ..*self }
    }

    pub fn swap_rows(&self) -> Self {
        Table2x2 { a: self.c, b: self.d, c: self.a, d: self.b }
    }

    pub fn to_rxc(&self) -> TableRxC {
        TableRxC {
            rows: 2,
            cols: 2,
            counts: vec![self.a, self.b, self.c, self.d],
        }
    }
}

/// Row-major R×C grid of counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<u64>>", into = "Vec<Vec<u64>>")]
pub struct TableRxC {
    rows: usize,
    cols: usize,
    counts: Vec<u64>,
}

impl TableRxC {
    pub fn new(grid: Vec<Vec<u64>>) -> Result<Self> {
        let rows = grid.len();
        let cols = grid.first().map_or(0, Vec::len);
        if rows < 2 || cols < 2 {
            return Err(Error::validation("table", "needs at least 2 rows and 2 columns"));
        }
        if grid.iter().any(|r| r.len() != cols) {
            return Err(Error::validation("table", "rows differ in length"));
        }
        let counts: Vec<u64> = grid.into_iter().flatten().collect();
        if counts.iter().all(|&c| c == 0) {
            return Err(Error::validation("table", "all cells are zero"));
        }
        Ok(TableRxC { rows, cols, counts })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.counts[i * self.cols + j]
    }

    pub fn n(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn row_totals(&self) -> Vec<u64> {
        self.counts.chunks(self.cols).map(|r| r.iter().sum()).collect()
    }

    pub fn col_totals(&self) -> Vec<u64> {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.get(i, j)).sum())
            .collect()
    }

    pub fn scaled(&self, k: u64) -> Self {
        TableRxC {
            counts: self.counts.iter().map(|c| c * k).collect(),
            ..self.clone()
        }
    }

    pub fn to_grid(&self) -> Vec<Vec<u64>> {
        self.counts.chunks(self.cols).map(<[u64]>::to_vec).collect()
    }
}

impl TryFrom<Vec<Vec<u64>>> for TableRxC {
    type Error = Error;

    fn try_from(grid: Vec<Vec<u64>>) -> Result<Self> {
        TableRxC::new(grid)
    }
}

impl From<TableRxC> for Vec<Vec<u64>> {
    fn from(t: TableRxC) -> Self {
        t.to_grid()
    }
}
