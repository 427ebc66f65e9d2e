use super::ConicProblem;

/// Outcome of scanning the equality system for redundancy.
#[derive(Debug, Clone, PartialEq)]
pub enum EqualityScan {
    /// Indices of a maximal linearly independent subset of rows.
    Independent(Vec<usize>),
    /// The system has no solution; carries the residual of a contradictory row.
    Inconsistent(f64),
}

const PIVOT_TOL: f64 = 1e-9;

/// Gaussian elimination with partial pivoting on `[E | g]`.
pub fn scan_equalities(p: &ConicProblem) -> EqualityScan {
    let rows = p.eq_rows.len();
    let n = p.num_vars();
    if rows == 0 {
        return EqualityScan::Independent(vec![]);
    }
    let mut a = vec![vec![0.0; n + 1]; rows];
    for (r, row) in p.eq_rows.iter().enumerate() {
        for &(v, c) in row {
            a[r][v] += c;
        }
        a[r][n] = p.eq_rhs[r];
    }
    let scale: Vec<f64> = a.iter().map(|r| r[..n].iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE)).collect();
    for (r, s) in a.iter_mut().zip(&scale) {
        r.iter_mut().for_each(|v| *v /= s);
    }
    let mut order: Vec<usize> = (0..rows).collect();
    let mut rank = 0;
    for col in 0..n {
        if rank == rows {
            break;
        }
        let (best, val) = (rank..rows).map(|r| (r, a[r][col].abs())).fold((rank, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if val <= PIVOT_TOL {
            continue;
        }
        a.swap(rank, best);
        order.swap(rank, best);
        let pivot = a[rank].clone();
        for row in a.iter_mut().skip(rank + 1) {
            let f = row[col] / pivot[col];
            if f != 0.0 {
                for (x, pv) in row.iter_mut().zip(&pivot).skip(col) {
                    *x -= f * pv;
                }
            }
        }
        rank += 1;
    }
    for row in &a[rank..] {
        if row[n].abs() > 1e-7 {
            return EqualityScan::Inconsistent(row[n].abs());
        }
    }
    let mut keep = order[..rank].to_vec();
    keep.sort_unstable();
    EqualityScan::Independent(keep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn drops_duplicate_and_detects_contradiction() {
        let mut p = ConicProblem::new();
        let a = p.add_var("a", 0.0);
        let b = p.add_var("b", 0.0);
        p.add_equality(vec![(a, 1.0), (b, 1.0)], 1.0);
        p.add_equality(vec![(a, 2.0), (b, 2.0)], 2.0);
        p.add_equality(vec![(a, 1.0)], 0.5);
        assert_eq!(scan_equalities(&p), EqualityScan::Independent(vec![0, 2]));
        p.add_equality(vec![(b, 1.0)], 0.7);
        assert!(matches!(scan_equalities(&p), EqualityScan::Inconsistent(_)));
    }
}
