use std::fmt;

use crate::error::{AlgebraError, Result};
use crate::scalar::PRat;

/// Finitely generated module over Z_(p): a free part and cyclic p-power
/// torsion summands.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianGroupShape {
    pub free_rank: usize,
    /// Orders of the cyclic torsion summands, ascending, each a power of p.
    pub torsion: Vec<u64>,
}

impl AbelianGroupShape {
    pub fn free(rank: usize) -> AbelianGroupShape {
        AbelianGroupShape { free_rank: rank, torsion: Vec::new() }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn torsion_order(&self) -> Result<u64> {
        self.torsion.iter().try_fold(1u64, |acc, q| {
            acc.checked_mul(*q)
                .ok_or_else(|| AlgebraError::Domain("torsion order overflows".into()))
        })
    }
}

impl fmt::Display for AbelianGroupShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        for q in &self.torsion {
            parts.push(format!("Z/{q}"));
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Diagonal form of a relation matrix over Z_(p). Unit factors are dropped:
/// each nonzero diagonal entry is recorded by its p-power part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithNormalForm {
    pub prime: u32,
    /// p^(valuation) for each nonzero diagonal entry, ascending.
    pub diagonal: Vec<u64>,
    pub rank: usize,
    pub rows: usize,
    pub cols: usize,
}

impl SmithNormalForm {
    /// The cokernel of the relation matrix acting on Z_(p)^cols by rows.
    pub fn cokernel(&self) -> AbelianGroupShape {
        AbelianGroupShape {
            free_rank: self.cols - self.rank,
            torsion: self.diagonal.iter().copied().filter(|q| *q > 1).collect(),
        }
    }

    /// True when the rows span the full lattice Z_(p)^cols.
    pub fn spans_lattice(&self) -> bool {
        self.rank == self.cols && self.diagonal.iter().all(|q| *q == 1)
    }
}

fn checked_p_pow(prime: u32, e: i64) -> Result<u64> {
    let e = u32::try_from(e)
        .map_err(|_| AlgebraError::Domain(format!("valuation {e} out of range")))?;
    (prime as u64)
        .checked_pow(e)
        .ok_or_else(|| AlgebraError::Domain(format!("p^{e} overflows for p = {prime}")))
}

/// Diagonalize a relation matrix over the local ring Z_(p). Every entry must
/// lie in Z_(p). Row and column operations pick a pivot of minimal p-adic
/// valuation, so the diagonal valuations come out ascending and each diagonal
/// entry divides the next.
pub fn smith_decompose(prime: u32, cols: usize, rows: &[Vec<PRat>]) -> Result<SmithNormalForm> {
    crate::scalar::require_prime(prime)?;
    let mut m: Vec<Vec<PRat>> = Vec::with_capacity(rows.len());
    for row in rows {
        if row.len() != cols {
            return Err(AlgebraError::Structural(format!(
                "relation row has {} entries, expected {cols}",
                row.len()
            )));
        }
        for c in row {
            if !c.is_zero() && !c.is_p_local() {
                return Err(AlgebraError::Domain(format!(
                    "matrix entry {c} does not lie in Z_({prime})"
                )));
            }
        }
        m.push(row.clone());
    }

    let nrows = m.len();
    let mut diagonal = Vec::new();
    let mut r = 0usize;
    while r < nrows.min(cols) {
        let mut pivot: Option<(usize, usize, i64)> = None;
        for i in r..nrows {
            for j in r..cols {
                if let Some(v) = m[i][j].p_valuation() {
                    if pivot.map_or(true, |(_, _, pv)| v < pv) {
                        pivot = Some((i, j, v));
                    }
                }
            }
        }
        let Some((pi, pj, pval)) = pivot else { break };
        m.swap(r, pi);
        for row in m.iter_mut() {
            row.swap(r, pj);
        }
        let pivot_entry = m[r][r].clone();
        for i in (r + 1)..nrows {
            if m[i][r].is_zero() {
                continue;
            }
            let factor = &m[i][r] / &pivot_entry;
            for j in r..cols {
                let delta = &factor * &m[r][j];
                m[i][j] = &m[i][j] - &delta;
            }
        }
        for j in (r + 1)..cols {
            if m[r][j].is_zero() {
                continue;
            }
            let factor = &m[r][j] / &pivot_entry;
            for i in r..nrows {
                let delta = &factor * &m[i][r];
                m[i][j] = &m[i][j] - &delta;
            }
        }
        diagonal.push(checked_p_pow(prime, pval)?);
        r += 1;
    }

    Ok(SmithNormalForm { prime, diagonal, rank: r, rows: nrows, cols })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(prime: u32, rows: &[&[i64]]) -> Vec<Vec<PRat>> {
        rows.iter()
            .map(|r| r.iter().map(|&n| PRat::from_int(prime, n)).collect())
            .collect()
    }

    #[test]
    fn single_relation_rows() {
        let snf = smith_decompose(2, 2, &mat(2, &[&[2, 0]])).unwrap();
        assert_eq!(snf.cokernel(), AbelianGroupShape { free_rank: 1, torsion: vec![2] });

        let snf = smith_decompose(2, 2, &mat(2, &[&[1, -2]])).unwrap();
        assert_eq!(snf.cokernel(), AbelianGroupShape::free(1));

        let snf = smith_decompose(2, 2, &mat(2, &[&[0, -2]])).unwrap();
        assert_eq!(snf.cokernel(), AbelianGroupShape { free_rank: 1, torsion: vec![2] });
    }

    #[test]
    fn empty_and_zero_matrices() {
        let snf = smith_decompose(3, 3, &[]).unwrap();
        assert_eq!(snf.cokernel(), AbelianGroupShape::free(3));
        assert!(!snf.spans_lattice());

        let snf = smith_decompose(3, 2, &mat(3, &[&[0, 0], &[0, 0]])).unwrap();
        assert_eq!(snf.rank, 0);
        assert_eq!(snf.cokernel(), AbelianGroupShape::free(2));
    }

    #[test]
    fn diagonal_valuations_ascend() {
        let snf = smith_decompose(2, 3, &mat(2, &[&[4, 0, 0], &[0, 1, 0], &[0, 0, 8]])).unwrap();
        assert_eq!(snf.diagonal, vec![1, 4, 8]);
        assert_eq!(snf.cokernel(), AbelianGroupShape { free_rank: 0, torsion: vec![4, 8] });
    }

    #[test]
    fn mixing_rows_does_not_change_the_cokernel() {
        let a = mat(2, &[&[2, 4], &[6, 8]]);
        let b = mat(2, &[&[2, 4], &[8, 12]]);
        let sa = smith_decompose(2, 2, &a).unwrap();
        let sb = smith_decompose(2, 2, &b).unwrap();
        assert_eq!(sa.cokernel(), sb.cokernel());
        assert_eq!(sa.cokernel(), AbelianGroupShape { free_rank: 0, torsion: vec![2, 4] });
    }

    #[test]
    fn units_off_the_prime_are_ignored() {
        let snf = smith_decompose(2, 2, &mat(2, &[&[3, 0], &[0, 10]])).unwrap();
        assert_eq!(snf.diagonal, vec![1, 2]);
        assert_eq!(snf.cokernel(), AbelianGroupShape { free_rank: 0, torsion: vec![2] });
    }

    #[test]
    fn lattice_span_detection() {
        let snf = smith_decompose(2, 2, &mat(2, &[&[3, 1], &[1, 0], &[5, 7]])).unwrap();
        assert!(snf.spans_lattice());
        let snf = smith_decompose(2, 2, &mat(2, &[&[2, 0], &[0, 1]])).unwrap();
        assert!(!snf.spans_lattice());
    }

    #[test]
    fn non_local_entries_are_rejected() {
        let bad = vec![vec![PRat::ratio(2, 1, 2), PRat::zero(2)]];
        assert!(smith_decompose(2, 2, &bad).is_err());
    }

    #[test]
    fn torsion_order_multiplies_out() {
        let shape = AbelianGroupShape { free_rank: 1, torsion: vec![2, 4] };
        assert_eq!(shape.torsion_order().unwrap(), 8);
        assert_eq!(shape.to_string(), "Z + Z/2 + Z/4");
        assert_eq!(AbelianGroupShape::free(0).to_string(), "0");
    }
}
