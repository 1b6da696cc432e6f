//! Dense exact linear algebra over Q and over Q(ζ_N).

use num_traits::Zero;

use super::{CycloError, CycloNum, Rational};

/// Solve a square rational system by Gaussian elimination; None if singular.
pub fn solve_rational(mut m: Vec<Vec<Rational>>, mut rhs: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        rhs.swap(col, piv);
        let inv = Rational::from_integer(1.into()) / &m[col][col];
        for j in col..n {
            m[col][j] = &m[col][j] * &inv;
        }
        rhs[col] = &rhs[col] * &inv;
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for j in col..n {
                    let t = &f * &m[col][j];
                    m[r][j] -= t;
                }
                let t = &f * &rhs[col];
                rhs[r] -= t;
            }
        }
    }
    Some(rhs)
}

/// A dense rows×cols matrix of cyclotomic numbers.
#[derive(Clone, Debug, PartialEq)]
pub struct CycloMatrix {
    rows: usize,
    cols: usize,
    order: u32,
    entries: Vec<CycloNum>,
}

/// Rough size of an entry, used to prefer cheap pivots.
fn weight(c: &CycloNum) -> usize {
    let s = c.to_string();
    s.len()
}

impl CycloMatrix {
    pub fn zeros(order: u32, rows: usize, cols: usize) -> CycloMatrix {
        CycloMatrix { rows, cols, order, entries: vec![CycloNum::zero(order); rows * cols] }
    }

    pub fn identity(order: u32, n: usize) -> CycloMatrix {
        let mut m = CycloMatrix::zeros(order, n, n);
        for i in 0..n {
            m.set(i, i, CycloNum::one(order));
        }
        m
    }

    pub fn from_fn(order: u32, rows: usize, cols: usize, f: impl Fn(usize, usize) -> CycloNum) -> CycloMatrix {
        let mut m = CycloMatrix::zeros(order, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &CycloNum {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: CycloNum) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn mul(&self, other: &CycloMatrix) -> Result<CycloMatrix, CycloError> {
        if self.cols != other.rows {
            return Err(CycloError::Dimension(format!("{}x{} * {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        let mut out = CycloMatrix::zeros(self.order, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j) + &(a * b);
                        out.set(i, j, v);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Row-reduce in place; returns the pivot columns.
    fn eliminate(&mut self, aug: &mut [Vec<CycloNum>]) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let best = (r..self.rows)
                .filter(|&i| !self.get(i, c).is_zero())
                .min_by_key(|&i| weight(self.get(i, c)));
            let Some(p) = best else { continue };
            if p != r {
                for j in 0..self.cols {
                    self.entries.swap(p * self.cols + j, r * self.cols + j);
                }
                aug.swap(p, r);
            }
            let inv = self.get(r, c).inverse().expect("pivot is nonzero");
            for j in 0..self.cols {
                let v = self.get(r, j) * &inv;
                self.set(r, j, v);
            }
            for v in aug[r].iter_mut() {
                *v = &*v * &inv;
            }
            for i in 0..self.rows {
                if i == r || self.get(i, c).is_zero() {
                    continue;
                }
                let f = self.get(i, c).clone();
                for j in 0..self.cols {
                    if !self.get(r, j).is_zero() {
                        let v = self.get(i, j) - &(&f * self.get(r, j));
                        self.set(i, j, v);
                    }
                }
                let (head, tail) = aug.split_at_mut(i.max(r));
                let (src, dst) = if i < r { (&tail[0], &mut head[i]) } else { (&head[r], &mut tail[0]) };
                for (d, s) in dst.iter_mut().zip(src.iter()) {
                    *d = &*d - &(&f * s);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut aug = vec![Vec::new(); self.rows];
        m.eliminate(&mut aug).len()
    }

    /// Some solution of A·x = rhs, or None if the system is inconsistent.
    pub fn solve(&self, rhs: &[CycloNum]) -> Result<Option<Vec<CycloNum>>, CycloError> {
        if rhs.len() != self.rows {
            return Err(CycloError::Dimension(format!("rhs length {} vs {} rows", rhs.len(), self.rows)));
        }
        let mut m = self.clone();
        let mut aug: Vec<Vec<CycloNum>> = rhs.iter().map(|v| vec![v.clone()]).collect();
        let pivots = m.eliminate(&mut aug);
        for row in aug.iter().skip(pivots.len()) {
            if !row[0].is_zero() {
                return Ok(None);
            }
        }
        let mut x = vec![CycloNum::zero(self.order); self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug[r][0].clone();
        }
        Ok(Some(x))
    }

    pub fn invert(&self) -> Result<CycloMatrix, CycloError> {
        if self.rows != self.cols {
            return Err(CycloError::Dimension("invert needs a square matrix".into()));
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut aug: Vec<Vec<CycloNum>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { CycloNum::one(self.order) } else { CycloNum::zero(self.order) }).collect())
            .collect();
        if m.eliminate(&mut aug).len() < n {
            return Err(CycloError::Singular);
        }
        Ok(CycloMatrix::from_fn(self.order, n, n, |i, j| aug[i][j].clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_solves_trivially() {
        let id = CycloMatrix::identity(8, 3);
        let rhs = vec![CycloNum::root(8, 1), CycloNum::from_int(8, 2), CycloNum::zero(8)];
        assert_eq!(id.solve(&rhs).unwrap().unwrap(), rhs);
    }

    #[test]
    fn dft_of_idempotents_is_invertible() {
        for n in 2..7u32 {
            let m = CycloMatrix::from_fn(n, n as usize, n as usize, |i, j| CycloNum::root(n, (i * j) as i64));
            assert_eq!(m.rank(), n as usize);
            let inv = m.invert().unwrap();
            assert_eq!(inv.mul(&m).unwrap(), CycloMatrix::identity(n, n as usize));
        }
    }

    #[test]
    fn zero_matrix_inconsistent() {
        let z = CycloMatrix::zeros(4, 2, 2);
        assert_eq!(z.solve(&[CycloNum::one(4), CycloNum::zero(4)]).unwrap(), None);
        assert_eq!(z.rank(), 0);
        assert_eq!(z.invert(), Err(CycloError::Singular));
    }

    #[test]
    fn rank_deficient() {
        let m = CycloMatrix::from_fn(6, 3, 3, |i, j| CycloNum::root(6, (i + j) as i64));
        assert_eq!(m.rank(), 1);
    }
}
