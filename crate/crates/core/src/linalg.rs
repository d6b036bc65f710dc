//! Exact linear algebra over the rationals.

use num::{BigInt, BigRational, Integer, One, Signed, Zero};

use crate::error::{Error, Result};

fn bits(x: &BigInt) -> u64 {
    x.bits()
}

/// Solves `A x = b` for a square rational system by fraction-free
/// (Bareiss) elimination. Each row is first scaled to integers; the pivot
/// in every column is the nonzero entry of smallest bit length.
pub fn solve(a: &[Vec<BigRational>], b: &[BigRational]) -> Result<Vec<BigRational>> {
    let n = a.len();
    assert_eq!(b.len(), n);
    let mut m: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for (row, rhs) in a.iter().zip(b) {
        assert_eq!(row.len(), n, "matrix must be square");
        let lcm = row
            .iter()
            .chain(std::iter::once(rhs))
            .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        m.push(
            row.iter()
                .chain(std::iter::once(rhs))
                .map(|q| q.numer() * (&lcm / q.denom()))
                .collect(),
        );
    }
    let mut prev = BigInt::one();
    for k in 0..n {
        let pivot = (k..n)
            .filter(|&i| !m[i][k].is_zero())
            .min_by_key(|&i| (bits(&m[i][k]), i))
            .ok_or_else(|| Error::Singular("a dense system".into()))?;
        m.swap(k, pivot);
        for i in k + 1..n {
            for j in k + 1..=n {
                let v = (&m[k][k] * &m[i][j] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let mut x = vec![BigRational::zero(); n];
    for i in (0..n).rev() {
        let mut acc = BigRational::from_integer(m[i][n].clone());
        for j in i + 1..n {
            acc -= BigRational::from_integer(m[i][j].clone()) * &x[j];
        }
        x[i] = acc / BigRational::from_integer(m[i][i].clone());
    }
    Ok(x)
}

/// Outcome of a positive-semidefiniteness check.
#[derive(Clone, Debug, PartialEq)]
pub enum PsdResult {
    /// `P A Pᵀ = L D Lᵀ` with every entry of `D` nonnegative. `order[k]` is
    /// the row of `A` eliminated at step `k`; steps stop once the remaining
    /// Schur complement is zero.
    Psd {
        order: Vec<usize>,
        l: Vec<Vec<BigRational>>,
        d: Vec<BigRational>,
    },
    /// A vector with `xᵀ A x < 0`, and that value.
    Violation {
        vector: Vec<BigRational>,
        value: BigRational,
    },
}

impl PsdResult {
    pub fn is_psd(&self) -> bool {
        matches!(self, PsdResult::Psd { .. })
    }
}

pub fn quadratic_form(a: &[Vec<BigRational>], x: &[BigRational]) -> BigRational {
    let mut total = BigRational::zero();
    for (i, row) in a.iter().enumerate() {
        if x[i].is_zero() {
            continue;
        }
        for (j, v) in row.iter().enumerate() {
            if !x[j].is_zero() {
                total += &x[i] * v * &x[j];
            }
        }
    }
    total
}

/// Exact `LDLᵀ` with diagonal pivoting (largest remaining diagonal first).
/// Returns either the factorization or a vector `x = L^{-T}[0; y]` on which
/// the form is negative.
pub fn ldl_psd(a: &[Vec<BigRational>]) -> Result<PsdResult> {
    let n = a.len();
    for (i, row) in a.iter().enumerate() {
        if row.len() != n {
            return Err(Error::input("matrix must be square"));
        }
        for j in 0..i {
            if row[j] != a[j][i] {
                return Err(Error::input("matrix must be symmetric"));
            }
        }
    }
    // Schur complement over the not yet eliminated indices
    let mut s: Vec<Vec<BigRational>> = a.to_vec();
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut order: Vec<usize> = Vec::new();
    // l_cols[k][i] = L entry (row i, column k) in original indexing
    let mut l_cols: Vec<Vec<BigRational>> = Vec::new();
    let mut d: Vec<BigRational> = Vec::new();

    loop {
        let best = remaining
            .iter()
            .copied()
            .max_by(|&i, &j| s[i][i].cmp(&s[j][j]).then(j.cmp(&i)));
        let Some(p) = best else { break };
        if s[p][p].is_positive() {
            let piv = s[p][p].clone();
            let mut col = vec![BigRational::zero(); n];
            col[p] = BigRational::one();
            for &i in &remaining {
                if i != p {
                    col[i] = &s[i][p] / &piv;
                }
            }
            remaining.retain(|&i| i != p);
            for &i in &remaining {
                for &j in &remaining {
                    let delta = &col[i] * &s[p][j];
                    s[i][j] -= delta;
                }
            }
            order.push(p);
            l_cols.push(col);
            d.push(piv);
            continue;
        }
        // every remaining diagonal is ≤ 0
        let mut y = vec![BigRational::zero(); n];
        if s[p][p].is_negative() {
            y[p] = BigRational::one();
        } else if let Some((i, j)) = remaining
            .iter()
            .flat_map(|&i| remaining.iter().map(move |&j| (i, j)))
            .find(|&(i, j)| i < j && !s[i][j].is_zero())
        {
            y[i] = BigRational::one();
            y[j] = if s[i][j].is_positive() {
                -BigRational::one()
            } else {
                BigRational::one()
            };
        } else {
            break;
        }
        // back out the eliminated coordinates: x_k = -Σ_{later} L[later][k] x_later
        let mut x = y;
        for k in (0..order.len()).rev() {
            let pk = order[k];
            let mut acc = BigRational::zero();
            for i in 0..n {
                if i != pk && !l_cols[k][i].is_zero() && !order[..k].contains(&i) {
                    acc += &l_cols[k][i] * &x[i];
                }
            }
            x[pk] = -acc;
        }
        let value = quadratic_form(a, &x);
        if !value.is_negative() {
            return Err(Error::Internal("violating vector is not negative".into()));
        }
        return Ok(PsdResult::Violation { vector: x, value });
    }
    let l = (0..order.len())
        .map(|r| (0..order.len()).map(|c| l_cols[c][order[r]].clone()).collect())
        .collect();
    Ok(PsdResult::Psd { order, l, d })
}
