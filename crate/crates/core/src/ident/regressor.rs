//! The 37-term disturbance regressor: eight basis signals, their 28 unordered
//! pairwise products, and a bias. This enumeration is shared by the plant's
//! coefficient-driven disturbance and by the least-squares fit.

use crate::kinematics::GimbalState;

pub const N_BASIS: usize = 8;
pub const N_PAIRS: usize = N_BASIS * (N_BASIS - 1) / 2;
pub const N_TERMS: usize = N_BASIS + N_PAIRS + 1;
pub const BIAS: usize = N_TERMS - 1;

/// Enumeration version recorded alongside fitted coefficients.
pub const REGRESSOR_VERSION: u32 = 1;

pub const BASIS_NAMES: [&str; N_BASIS] = [
    "theta_m_dot",
    "theta_m",
    "psi_a_dot",
    "psi_a",
    "psi_a^2",
    "psi_a_dot^2",
    "theta_m^2",
    "theta_m_dot^2",
];

/// Indices into the basis, for readable term placement.
pub mod b {
    pub const THETA_DOT: usize = 0;
    pub const THETA: usize = 1;
    pub const PSI_DOT: usize = 2;
    pub const PSI: usize = 3;
    pub const PSI_SQ: usize = 4;
    pub const PSI_DOT_SQ: usize = 5;
    pub const THETA_SQ: usize = 6;
    pub const THETA_DOT_SQ: usize = 7;
}

pub fn basis(s: &GimbalState) -> [f64; N_BASIS] {
    [
        s.theta_m_dot,
        s.theta_m,
        s.psi_a_dot,
        s.psi_a,
        s.psi_a * s.psi_a,
        s.psi_a_dot * s.psi_a_dot,
        s.theta_m * s.theta_m,
        s.theta_m_dot * s.theta_m_dot,
    ]
}

/// Column of the product of basis signals `i` and `j` (`i != j`).
pub fn pair_index(i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    assert!(
        j < N_BASIS && i != j,
        "pair ({i}, {j}) is not a regressor term"
    );
    N_BASIS + (0..i).map(|k| N_BASIS - 1 - k).sum::<usize>() + (j - i - 1)
}

/// All 37 regressor values for one state.
pub fn features(s: &GimbalState) -> [f64; N_TERMS] {
    let x = basis(s);
    let mut out = [0.0; N_TERMS];
    out[..N_BASIS].copy_from_slice(&x);
    let mut k = N_BASIS;
    for i in 0..N_BASIS {
        for j in (i + 1)..N_BASIS {
            out[k] = x[i] * x[j];
            k += 1;
        }
    }
    out[BIAS] = 1.0;
    out
}

pub fn term_names() -> Vec<String> {
    let mut names: Vec<String> = BASIS_NAMES.iter().map(|s| s.to_string()).collect();
    for i in 0..N_BASIS {
        for j in (i + 1)..N_BASIS {
            names.push(format!("{}*{}", BASIS_NAMES[i], BASIS_NAMES[j]));
        }
    }
    names.push("1".into());
    names
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(N_PAIRS, 28);
        assert_eq!(N_TERMS, 37);
        assert_eq!(term_names().len(), 37);
    }

    #[test]
    fn pair_indices_are_a_bijection() {
        let mut seen = [false; N_TERMS];
        for i in 0..N_BASIS {
            for j in (i + 1)..N_BASIS {
                let k = pair_index(i, j);
                assert!(!seen[k]);
                seen[k] = true;
                assert_eq!(pair_index(j, i), k);
            }
        }
        assert_eq!(seen.iter().filter(|v| **v).count(), 28);
        assert!(seen[..N_BASIS].iter().all(|v| !v));
    }

    #[test]
    fn last_pairs_are_squared_rate_products() {
        let names = term_names();
        assert_eq!(names[0], "theta_m_dot");
        assert_eq!(names[1], "theta_m");
        assert_eq!(names[33], "psi_a_dot^2*theta_m^2");
        assert_eq!(names[34], "psi_a_dot^2*theta_m_dot^2");
        assert_eq!(names[35], "theta_m^2*theta_m_dot^2");
    }

    #[test]
    fn origin_is_bias_only() {
        let f = features(&GimbalState::default());
        assert_eq!(f[BIAS], 1.0);
        assert!(f[..BIAS].iter().all(|v| *v == 0.0));
    }

    #[test]
    fn yaw_rate_only() {
        let f = features(&GimbalState::new(0.0, 0.0, 2.0, 0.0));
        assert_eq!(f[b::PSI_DOT], 2.0);
        assert_eq!(f[b::PSI_DOT_SQ], 4.0);
        // the only surviving product is psi_dot * psi_dot^2
        for k in N_BASIS..BIAS {
            let expect = if k == pair_index(b::PSI_DOT, b::PSI_DOT_SQ) {
                8.0
            } else {
                0.0
            };
            assert_eq!(f[k], expect, "term {k}");
        }
    }
}
