//! Dense two-phase simplex over exact rationals, Bland's rule throughout.
//!
//! Solves `max c.x  s.t.  A x <= b, x >= 0`. Only meant for the small systems
//! produced by polarization search.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum LpOutcome {
    Optimal { x: Vec<BigRational>, value: BigRational },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<BigRational>>,
    basis: Vec<usize>,
    obj: Vec<BigRational>,
    width: usize,
    banned: Option<usize>,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col].clone();
        for x in self.rows[row].iter_mut() {
            *x /= &p;
        }
        let pivot_row = self.rows[row].clone();
        for (i, r) in self.rows.iter_mut().enumerate() {
            if i == row || r[col].is_zero() {
                continue;
            }
            let f = r[col].clone();
            for (x, y) in r.iter_mut().zip(&pivot_row) {
                *x -= &f * y;
            }
        }
        if !self.obj[col].is_zero() {
            let f = self.obj[col].clone();
            for (x, y) in self.obj.iter_mut().zip(&pivot_row) {
                *x -= &f * y;
            }
        }
        self.basis[row] = col;
    }

    /// Runs simplex iterations; false when unbounded.
    fn optimize(&mut self) -> bool {
        loop {
            let entering = (0..self.width).find(|&j| Some(j) != self.banned && self.obj[j].is_negative());
            let Some(col) = entering else {
                return true;
            };
            let mut leave: Option<(usize, BigRational)> = None;
            for (i, r) in self.rows.iter().enumerate() {
                if !r[col].is_positive() {
                    continue;
                }
                let ratio = &r[self.width] / &r[col];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((row, _)) => self.pivot(row, col),
                None => return false,
            }
        }
    }
}

pub(crate) fn maximize(a: &[Vec<BigRational>], b: &[BigRational], c: &[BigRational]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    // columns: originals, slacks, auxiliary x0
    let aux = n + m;
    let width = n + m + 1;
    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        let mut r = vec![BigRational::zero(); width + 1];
        r[..n].clone_from_slice(&a[i]);
        r[n + i] = BigRational::one();
        r[aux] = -BigRational::one();
        r[width] = b[i].clone();
        rows.push(r);
    }
    let mut t = Tableau { rows, basis: (n..n + m).collect(), obj: vec![BigRational::zero(); width + 1], width, banned: None };

    let most_negative = (0..m).filter(|&i| b[i].is_negative()).min_by(|&i, &j| b[i].cmp(&b[j]));
    if let Some(row) = most_negative {
        // phase one: maximize -x0
        t.obj[aux] = BigRational::one();
        t.pivot(row, aux);
        t.optimize();
        if t.obj[width].is_negative() {
            return LpOutcome::Infeasible;
        }
        if let Some(i) = t.basis.iter().position(|&v| v == aux) {
            match (0..width).find(|&j| j != aux && !t.rows[i][j].is_zero()) {
                Some(j) => t.pivot(i, j),
                None => {
                    t.rows.remove(i);
                    t.basis.remove(i);
                }
            }
        }
    }
    t.banned = Some(aux);
    for r in t.rows.iter_mut() {
        r[aux] = BigRational::zero();
    }
    t.obj = vec![BigRational::zero(); width + 1];
    for j in 0..n {
        t.obj[j] = -c[j].clone();
    }
    for i in 0..t.rows.len() {
        let bv = t.basis[i];
        if !t.obj[bv].is_zero() {
            let f = t.obj[bv].clone();
            let row = t.rows[i].clone();
            for (x, y) in t.obj.iter_mut().zip(&row) {
                *x -= &f * y;
            }
        }
    }
    if !t.optimize() {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![BigRational::zero(); n];
    for (i, &bv) in t.basis.iter().enumerate() {
        if bv < n {
            x[bv] = t.rows[i][width].clone();
        }
    }
    LpOutcome::Optimal { x, value: t.obj[width].clone() }
}

pub(crate) fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}
