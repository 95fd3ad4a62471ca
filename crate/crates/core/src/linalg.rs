//! Sparse Gauss-Jordan elimination over the cyclotomic scalars.

use std::collections::BTreeMap;

use crate::scalars::Cyc;

pub type Row = BTreeMap<usize, Cyc>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    /// Row `row` reduces to `0 = c` with `c != 0`.
    #[error("inconsistent equation at row {row}")]
    Inconsistent { row: usize },
}

/// Solution set `particular + span(kernel)` of `A x = b`.
#[derive(Debug, Clone)]
pub struct Solution {
    pub particular: Vec<Cyc>,
    pub kernel: Vec<Vec<Cyc>>,
    /// Columns without a pivot; one kernel vector per free column.
    pub free_columns: Vec<usize>,
}

impl Solution {
    pub fn is_unique(&self) -> bool {
        self.free_columns.is_empty()
    }
}

fn pivot_cost(c: &Cyc) -> usize {
    c.raw_terms().len()
}

/// Solves `rows * x = rhs` exactly. `rows[i]` is the sparse row `i`.
pub fn solve(rows: &[Row], rhs: &[Cyc], ncols: usize) -> Result<Solution, LinalgError> {
    assert_eq!(rows.len(), rhs.len());
    let mut work: Vec<(Row, Cyc, usize)> = rows
        .iter()
        .zip(rhs)
        .enumerate()
        .map(|(i, (r, b))| {
            let r: Row = r.iter().filter(|(_, c)| !c.is_zero()).map(|(k, c)| (*k, c.clone())).collect();
            (r, b.clone(), i)
        })
        .collect();
    // pivot rows, keyed by pivot column, kept fully reduced against each other
    let mut pivots: BTreeMap<usize, (Row, Cyc)> = BTreeMap::new();
    while let Some((mut r, mut b, orig)) = work.pop() {
        // eliminate existing pivots
        loop {
            let hit = r.keys().find(|k| pivots.contains_key(k)).copied();
            let Some(col) = hit else { break };
            let f = r.remove(&col).unwrap();
            let (pr, pb) = &pivots[&col];
            for (k, v) in pr {
                if *k == col {
                    continue;
                }
                let nv = r.get(k).cloned().unwrap_or_default().add_ref(&-(&f * v));
                if nv.is_zero() {
                    r.remove(k);
                } else {
                    r.insert(*k, nv);
                }
            }
            b = b.add_ref(&-(&f * pb));
        }
        if r.is_empty() {
            if !b.is_zero() {
                return Err(LinalgError::Inconsistent { row: orig });
            }
            continue;
        }
        let col = *r.iter().min_by_key(|(k, c)| (pivot_cost(c), **k)).unwrap().0;
        let inv = r[&col].inv().expect("pivot is nonzero");
        let r: Row = r.into_iter().map(|(k, c)| (k, if k == col { Cyc::one() } else { &c * &inv })).collect();
        let b = &b * &inv;
        // back-substitute into existing pivots
        for (_, (pr, pb)) in pivots.iter_mut() {
            if let Some(f) = pr.remove(&col) {
                for (k, v) in &r {
                    if *k == col {
                        continue;
                    }
                    let nv = pr.get(k).cloned().unwrap_or_default().add_ref(&-(&f * v));
                    if nv.is_zero() {
                        pr.remove(k);
                    } else {
                        pr.insert(*k, nv);
                    }
                }
                *pb = pb.add_ref(&-(&f * &b));
            }
        }
        pivots.insert(col, (r, b));
    }
    let mut particular = vec![Cyc::zero(); ncols];
    for (col, (_, b)) in &pivots {
        particular[*col] = b.clone();
    }
    let free_columns: Vec<usize> = (0..ncols).filter(|c| !pivots.contains_key(c)).collect();
    let kernel = free_columns
        .iter()
        .map(|&f| {
            let mut v = vec![Cyc::zero(); ncols];
            v[f] = Cyc::one();
            for (col, (r, _)) in &pivots {
                if let Some(c) = r.get(&f) {
                    v[*col] = -c;
                }
            }
            v
        })
        .collect();
    Ok(Solution { particular, kernel, free_columns })
}

/// `rows * x`.
pub fn apply(rows: &[Row], x: &[Cyc]) -> Vec<Cyc> {
    rows.iter()
        .map(|r| {
            let mut acc = Cyc::zero();
            for (k, c) in r {
                acc += &(c * &x[*k]);
            }
            acc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(v: &[(usize, Cyc)]) -> Row {
        v.iter().cloned().collect()
    }

    #[test]
    fn unique_solution_over_cyclotomics() {
        let z = Cyc::root(3, 1).unwrap();
        let rows = vec![row(&[(0, Cyc::one()), (1, z.clone())]), row(&[(0, Cyc::one()), (1, Cyc::from_int(-1))])];
        let rhs = vec![Cyc::one(), Cyc::zero()];
        let s = solve(&rows, &rhs, 2).unwrap();
        assert!(s.is_unique());
        assert_eq!(apply(&rows, &s.particular), rhs);
    }

    #[test]
    fn kernel_and_inconsistency() {
        let rows = vec![row(&[(0, Cyc::one()), (1, Cyc::one())]), row(&[(0, Cyc::from_int(2)), (1, Cyc::from_int(2))])];
        let s = solve(&rows, &[Cyc::one(), Cyc::from_int(2)], 3).unwrap();
        assert_eq!(s.free_columns.len(), 2);
        for k in &s.kernel {
            assert!(apply(&rows, k).iter().all(|c| c.is_zero()));
        }
        let err = solve(&rows, &[Cyc::one(), Cyc::one()], 2).unwrap_err();
        assert!(matches!(err, LinalgError::Inconsistent { .. }));
    }
}
