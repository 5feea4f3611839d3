//! Dense LU factorisation with partial pivoting for the fixed-size joint system.

use nalgebra::{SMatrix, SVector};

use crate::error::{GimbalError, Result};

/// Relative pivot threshold: a pivot below `PIVOT_TOL * max_row_norm` is singular.
pub const PIVOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct Lu<const N: usize> {
    lu: SMatrix<f64, N, N>,
    perm: [usize; N],
    /// Ratio of the largest to the smallest pivot magnitude.
    pub condition_estimate: f64,
}

impl<const N: usize> Lu<N> {
    pub fn factor(a: &SMatrix<f64, N, N>) -> Result<Self> {
        let scale = (0..N)
            .map(|i| a.row(i).iter().map(|x| x * x).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        let threshold = PIVOT_TOL * scale;
        let mut lu = *a;
        let mut perm: [usize; N] = std::array::from_fn(|i| i);
        let mut max_pivot: f64 = 0.0;
        let mut min_pivot = f64::INFINITY;

        for k in 0..N {
            let (p, pivot) = (k..N)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold(
                    (k, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
            if !(pivot >= threshold) || pivot == 0.0 {
                return Err(GimbalError::SingularSystem {
                    pivot,
                    threshold,
                    condition: if pivot > 0.0 {
                        max_pivot.max(pivot) / pivot
                    } else {
                        f64::INFINITY
                    },
                });
            }
            max_pivot = max_pivot.max(pivot);
            min_pivot = min_pivot.min(pivot);
            if p != k {
                lu.swap_rows(p, k);
                perm.swap(p, k);
            }
            let d = lu[(k, k)];
            for i in (k + 1)..N {
                let f = lu[(i, k)] / d;
                lu[(i, k)] = f;
                if f != 0.0 {
                    for j in (k + 1)..N {
                        lu[(i, j)] -= f * lu[(k, j)];
                    }
                }
            }
        }
        Ok(Self {
            lu,
            perm,
            condition_estimate: max_pivot / min_pivot,
        })
    }

    pub fn solve(&self, b: &SVector<f64, N>) -> SVector<f64, N> {
        let mut x = SVector::<f64, N>::from_fn(|i, _| b[self.perm[i]]);
        for i in 0..N {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..N).rev() {
            let mut s = x[i];
            for j in (i + 1)..N {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        x
    }
}

pub fn solve<const N: usize>(
    a: &SMatrix<f64, N, N>,
    b: &SVector<f64, N>,
) -> Result<SVector<f64, N>> {
    Ok(Lu::factor(a)?.solve(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Matrix3, Vector3};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn solves_random_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let a = SMatrix::<f64, 12, 12>::from_fn(|_, _| rng.gen_range(-1.0..1.0));
            let x = SVector::<f64, 12>::from_fn(|_, _| rng.gen_range(-1.0..1.0));
            let b = a * x;
            let got = solve(&a, &b).unwrap();
            assert!((got - x).amax() < 1e-9);
        }
    }

    #[test]
    fn needs_pivoting() {
        let a = Matrix3::new(0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 2.0);
        let x = solve(&a, &Vector3::new(3.0, 4.0, 6.0)).unwrap();
        assert_eq!(x, Vector3::new(4.0, 3.0, 3.0));
    }

    #[test]
    fn flags_singular() {
        let a = Matrix3::new(1.0, 2.0, 3.0, 2.0, 4.0, 6.0, 0.0, 1.0, 1.0);
        match Lu::factor(&a) {
            Err(GimbalError::SingularSystem { condition, .. }) => assert!(condition > 1e10),
            other => panic!("expected singular, got {other:?}"),
        }
    }
}
