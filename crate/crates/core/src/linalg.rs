//! Exact Gaussian elimination over `F_p`.
//!
//! `p = 2` runs on bit-packed rows, XOR-ing 64 columns per word. Other
//! primes use a dense `u32` path. Both produce the reduced row echelon form
//! with leftmost pivots, and the kernel basis derived from it is the
//! standard one: one vector per free column `f`, with a 1 in position `f`.

use crate::field::Fp;

/// A dense matrix over `F_2` with bit-packed rows.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Gf2Matrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64).max(1);
        Gf2Matrix { rows, cols, words, data: vec![0; rows * words] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        (self.data[r * self.words + c / 64] >> (c % 64)) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, bit: bool) {
        let w = &mut self.data[r * self.words + c / 64];
        if bit {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.words..(r + 1) * self.words]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.words {
            self.data.swap(a * self.words + w, b * self.words + w);
        }
    }

    fn xor_row_into(&mut self, src: usize, dst: usize) {
        let (s, d) = (src * self.words, dst * self.words);
        for w in 0..self.words {
            let v = self.data[s + w];
            self.data[d + w] ^= v;
        }
    }

    /// Reduces `self` in place to RREF and returns the pivot columns.
    pub fn reduce(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| self.get(i, c)) else {
                continue;
            };
            self.swap_rows(r, p);
            for i in 0..self.rows {
                if i != r && self.get(i, c) {
                    self.xor_row_into(r, i);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().reduce().len()
    }

    /// Kernel basis as bit vectors of length `cols`.
    pub fn kernel_basis(&self) -> Vec<Vec<u64>> {
        let mut m = self.clone();
        let pivots = m.reduce();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = vec![0u64; self.words];
                v[f / 64] |= 1 << (f % 64);
                for (r, &pc) in pivots.iter().enumerate() {
                    if (m.row(r)[f / 64] >> (f % 64)) & 1 == 1 {
                        v[pc / 64] |= 1 << (pc % 64);
                    }
                }
                v
            })
            .collect()
    }
}

/// A dense matrix over `F_p`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matrix {
    field: Fp,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub reduced: Matrix,
    pub pivots: Vec<usize>,
}

impl Matrix {
    pub fn zeros(field: Fp, rows: usize, cols: usize) -> Self {
        Matrix { field, rows, cols, data: vec![0; rows * cols] }
    }

    /// Builds a matrix from rows of equal length, reducing entries mod `p`.
    pub fn from_rows(field: Fp, cols: usize, rows: &[Vec<u32>]) -> Self {
        let mut m = Matrix::zeros(field, rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged matrix row {r}");
            for (c, &x) in row.iter().enumerate() {
                m.data[r * cols + c] = x % field.modulus();
            }
        }
        m
    }

    pub fn identity(field: Fp, k: usize) -> Self {
        let mut m = Matrix::zeros(field, k, k);
        for i in 0..k {
            m.set(i, i, 1);
        }
        m
    }

    pub fn field(&self) -> Fp {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, x: u32) {
        self.data[r * self.cols + c] = x % self.field.modulus();
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    /// `self · v`.
    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(0u32, |acc, (&a, &b)| self.field.add(acc, self.field.mul(a, b)))
            })
            .collect()
    }

    fn to_gf2(&self) -> Gf2Matrix {
        let mut g = Gf2Matrix::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) == 1 {
                    g.set(r, c, true);
                }
            }
        }
        g
    }

    fn from_gf2(g: &Gf2Matrix) -> Self {
        let mut m = Matrix::zeros(Fp::TWO, g.rows, g.cols);
        for r in 0..g.rows {
            for c in 0..g.cols {
                if g.get(r, c) {
                    m.data[r * g.cols + c] = 1;
                }
            }
        }
        m
    }

    pub fn rref(&self) -> Echelon {
        if self.field.is_binary() {
            let mut g = self.to_gf2();
            let pivots = g.reduce();
            return Echelon { reduced: Matrix::from_gf2(&g), pivots };
        }
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| m.get(i, c) != 0) else {
                continue;
            };
            if p != r {
                for k in 0..m.cols {
                    m.data.swap(r * m.cols + k, p * m.cols + k);
                }
            }
            let inv = f.inv(m.get(r, c));
            for k in 0..m.cols {
                let x = m.get(r, k);
                m.data[r * m.cols + k] = f.mul(x, inv);
            }
            for i in 0..m.rows {
                let factor = m.get(i, c);
                if i == r || factor == 0 {
                    continue;
                }
                for k in 0..m.cols {
                    let x = f.sub(m.get(i, k), f.mul(factor, m.get(r, k)));
                    m.data[i * m.cols + k] = x;
                }
            }
            pivots.push(c);
            r += 1;
        }
        Echelon { reduced: m, pivots }
    }

    pub fn rank(&self) -> usize {
        if self.field.is_binary() {
            return self.to_gf2().rank();
        }
        self.rref().pivots.len()
    }

    /// Basis of `{v : self · v = 0}`, one vector per free column in
    /// increasing column order.
    pub fn kernel_basis(&self) -> Vec<Vec<u32>> {
        if self.field.is_binary() {
            return self
                .to_gf2()
                .kernel_basis()
                .into_iter()
                .map(|bits| (0..self.cols).map(|c| ((bits[c / 64] >> (c % 64)) & 1) as u32).collect())
                .collect();
        }
        let f = self.field;
        let Echelon { reduced, pivots } = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![0u32; self.cols];
                v[free] = 1;
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = f.neg(reduced.get(r, free));
                }
                v
            })
            .collect()
    }
}
