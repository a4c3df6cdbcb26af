//! The four entropy families and the trace-distance functionals used to
//! bound quadratic Holevo quantities.
//!
//! All logarithms are natural. Entropies depend only on the non-zero
//! spectrum, with `0·log 0 = 0` and `0^q = 0`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, clip_spectrum};
use crate::states::DensityMatrix;

/// Inside `|q - 1| < Q_ONE_WINDOW` Rényi and Tsallis evaluate the von Neumann limit.
pub const Q_ONE_WINDOW: f64 = 1e-6;

/// Eigenvalues at or below this are roundoff on a zero eigenvalue and are
/// left out of the sums. Without it `Tr ρ^q` for `q < 1` picks up `~1e-7`
/// from the null space of a nearly pure conditional state.
pub const SPECTRUM_FLOOR: f64 = 1e-12;

/// Which entropy function `S_K` to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum EntropyKind {
    /// `-Tr ρ log ρ`.
    VonNeumann,
    /// `log Tr ρ^q / (1 - q)`; concave only for `0 < q ≤ 1`, and anything
    /// outside that range needs `allow_nonconcave`.
    Renyi {
        q: f64,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        allow_nonconcave: bool,
    },
    /// `(Tr ρ^q - 1)/(1 - q)`, `q > 0`.
    Tsallis { q: f64 },
    /// `1 - Tr ρ²`.
    Quadratic,
}

impl EntropyKind {
    pub const fn renyi(q: f64) -> Self {
        EntropyKind::Renyi {
            q,
            allow_nonconcave: false,
        }
    }

    /// Rényi entropy outside the concave range.
    pub const fn renyi_nonconcave(q: f64) -> Self {
        EntropyKind::Renyi {
            q,
            allow_nonconcave: true,
        }
    }

    pub const fn tsallis(q: f64) -> Self {
        EntropyKind::Tsallis { q }
    }

    pub fn q(&self) -> Option<f64> {
        match *self {
            EntropyKind::Renyi { q, .. } | EntropyKind::Tsallis { q } => Some(q),
            EntropyKind::Quadratic => Some(2.0),
            EntropyKind::VonNeumann => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            EntropyKind::Renyi {
                q,
                allow_nonconcave,
            } => {
                if !(q > 0.0 && q.is_finite()) {
                    return Err(Error::InvalidExponent(format!(
                        "Renyi requires q > 0, got {q}"
                    )));
                }
                if q > 1.0 && !allow_nonconcave {
                    return Err(Error::InvalidExponent(format!(
                        "Renyi is concave only for 0 < q <= 1, got {q} (pass allow_nonconcave to override)"
                    )));
                }
                Ok(())
            }
            EntropyKind::Tsallis { q } if !(q > 0.0 && q.is_finite()) => Err(
                Error::InvalidExponent(format!("Tsallis requires q > 0, got {q}")),
            ),
            _ => Ok(()),
        }
    }

    /// Concave within its validated range (everything except non-concave Rényi).
    pub fn is_concave(&self) -> bool {
        !matches!(*self, EntropyKind::Renyi { q, .. } if q > 1.0)
    }

    /// Tsallis and Rényi are subadditive only for `q ≥ 1`.
    pub fn is_subadditive(&self) -> bool {
        match *self {
            EntropyKind::VonNeumann | EntropyKind::Quadratic => true,
            EntropyKind::Tsallis { q } => q >= 1.0 - Q_ONE_WINDOW,
            EntropyKind::Renyi { q, .. } => (q - 1.0).abs() < Q_ONE_WINDOW,
        }
    }
}

impl fmt::Display for EntropyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            EntropyKind::VonNeumann => write!(f, "von Neumann"),
            EntropyKind::Renyi { q, .. } => write!(f, "Renyi(q={q})"),
            EntropyKind::Tsallis { q } => write!(f, "Tsallis(q={q})"),
            EntropyKind::Quadratic => write!(f, "quadratic"),
        }
    }
}

fn von_neumann(values: &[f64]) -> f64 {
    -values
        .iter()
        .filter(|&&l| l > SPECTRUM_FLOOR)
        .map(|&l| l * l.ln())
        .sum::<f64>()
}

fn power_sum(values: &[f64], q: f64) -> f64 {
    values
        .iter()
        .filter(|&&l| l > SPECTRUM_FLOOR)
        .map(|&l| l.powf(q))
        .sum()
}

/// Entropy of a probability spectrum. Values in `[-1e-10, 0)` are clipped;
/// anything more negative is an error.
pub fn entropy_of_spectrum(kind: EntropyKind, spectrum: &[f64]) -> Result<f64> {
    kind.validate()?;
    let mut values = spectrum.to_vec();
    clip_spectrum(&mut values)?;
    Ok(match kind {
        EntropyKind::VonNeumann => von_neumann(&values),
        EntropyKind::Quadratic => 1.0 - values.iter().map(|l| l * l).sum::<f64>(),
        EntropyKind::Tsallis { q } => {
            if (q - 1.0).abs() < Q_ONE_WINDOW {
                von_neumann(&values)
            } else {
                (power_sum(&values, q) - 1.0) / (1.0 - q)
            }
        }
        EntropyKind::Renyi { q, .. } => {
            if (q - 1.0).abs() < Q_ONE_WINDOW {
                von_neumann(&values)
            } else {
                power_sum(&values, q).ln() / (1.0 - q)
            }
        }
    })
}

/// `S_K(ρ)`.
pub fn entropy(kind: EntropyKind, rho: &DensityMatrix) -> Result<f64> {
    kind.validate()?;
    entropy_of_spectrum(kind, &rho.eigenvalues()?)
}

fn same_dims(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::dims(format!(
            "states of dim {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    Ok(())
}

/// `D_HS(ρ, σ) = Tr[(ρ - σ)²]`, the squared Hilbert–Schmidt distance.
pub fn hs_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_dims(rho, sigma)?;
    let diff = rho.matrix() - sigma.matrix();
    Ok(diff.as_slice().iter().map(|z| z.norm_sqr()).sum())
}

/// `Tr|ρ - σ|^q` for `q ≥ 1`.
pub fn schatten_q_distance(rho: &DensityMatrix, sigma: &DensityMatrix, q: f64) -> Result<f64> {
    same_dims(rho, sigma)?;
    linalg::schatten_q(&(rho.matrix() - sigma.matrix()), q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ComplexMatrix;
    use crate::states::{named, random_density, random_pure, Rng};
    use num_complex::Complex64;
    use std::f64::consts::LN_2;

    const KINDS: [EntropyKind; 5] = [
        EntropyKind::VonNeumann,
        EntropyKind::Quadratic,
        EntropyKind::tsallis(2.5),
        EntropyKind::tsallis(0.5),
        EntropyKind::renyi(0.5),
    ];

    #[test]
    fn pure_states_have_zero_entropy() {
        let mut rng = Rng::new(1);
        let psi = random_pure(&[3], &mut rng).unwrap();
        for kind in KINDS {
            assert!(entropy(kind, &psi).unwrap().abs() < 1e-12, "{kind}");
        }
    }

    #[test]
    fn golden_values() {
        let half = DensityMatrix::maximally_mixed(vec![2]);
        assert!((entropy(EntropyKind::VonNeumann, &half).unwrap() - LN_2).abs() < 1e-15);
        assert!((entropy(EntropyKind::Quadratic, &half).unwrap() - 0.5).abs() < 1e-15);
        let d = DensityMatrix::diagonal(vec![2], &[0.75, 0.25]).unwrap();
        assert!((entropy(EntropyKind::tsallis(2.0), &d).unwrap() - 0.375).abs() < 1e-15);
        // Rényi of a uniform spectrum is log d for every q.
        assert!((entropy(EntropyKind::renyi(0.3), &half).unwrap() - LN_2).abs() < 1e-14);
    }

    #[test]
    fn exponent_validation() {
        let half = DensityMatrix::maximally_mixed(vec![2]);
        assert!(matches!(
            entropy(EntropyKind::renyi(2.0), &half),
            Err(Error::InvalidExponent(_))
        ));
        assert!(entropy(EntropyKind::renyi_nonconcave(2.0), &half).is_ok());
        assert!(matches!(
            entropy(EntropyKind::tsallis(0.0), &half),
            Err(Error::InvalidExponent(_))
        ));
        assert!(matches!(
            entropy(EntropyKind::tsallis(-1.0), &half),
            Err(Error::InvalidExponent(_))
        ));
        assert!(matches!(
            entropy(EntropyKind::renyi(f64::NAN), &half),
            Err(Error::InvalidExponent(_))
        ));
    }

    #[test]
    fn q_to_one_limit_matches_symmetric_extrapolation() {
        let mut rng = Rng::new(2);
        for _ in 0..20 {
            let rho = random_density(&[3], 3, &mut rng).unwrap();
            let vn = entropy(EntropyKind::VonNeumann, &rho).unwrap();
            // Oracle: symmetric average at q = 1 ± h cancels the first-order term.
            let h = 1e-3;
            for family in [
                EntropyKind::tsallis as fn(f64) -> EntropyKind,
                EntropyKind::renyi_nonconcave,
            ] {
                let up = entropy(family(1.0 + h), &rho).unwrap();
                let down = entropy(family(1.0 - h), &rho).unwrap();
                let extrapolated = 0.5 * (up + down);
                for q in [1.0 + 1e-9, 1.0 - 1e-9] {
                    let v = entropy(family(q), &rho).unwrap();
                    assert!((v - vn).abs() < 1e-6);
                    assert!((v - extrapolated).abs() < 1e-5, "{v} vs {extrapolated}");
                }
                // Just outside the switch the quotient is still continuous.
                let outside = entropy(family(1.0 + 2e-6), &rho).unwrap();
                assert!((outside - vn).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn tsallis_two_is_quadratic() {
        let mut rng = Rng::new(3);
        let rho = random_density(&[4], 3, &mut rng).unwrap();
        let t = entropy(EntropyKind::tsallis(2.0), &rho).unwrap();
        let qd = entropy(EntropyKind::Quadratic, &rho).unwrap();
        assert!((t - qd).abs() < 1e-14);
    }

    #[test]
    fn negative_spectrum_is_rejected() {
        assert!(matches!(
            entropy_of_spectrum(EntropyKind::VonNeumann, &[1.1, -0.1]),
            Err(Error::Domain(_))
        ));
        let v = entropy_of_spectrum(EntropyKind::VonNeumann, &[1.0, -1e-12]).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn distance_examples() {
        let mut rng = Rng::new(4);
        let rho = random_density(&[2], 2, &mut rng).unwrap();
        assert_eq!(hs_distance(&rho, &rho).unwrap(), 0.0);

        let zero = DensityMatrix::diagonal(vec![2], &[1.0, 0.0]).unwrap();
        let one = DensityMatrix::diagonal(vec![2], &[0.0, 1.0]).unwrap();
        assert!((hs_distance(&zero, &one).unwrap() - 2.0).abs() < 1e-15);
        for q in [1.0, 1.5, 2.0, 3.0] {
            assert!((schatten_q_distance(&zero, &one, q).unwrap() - 2.0).abs() < 1e-14);
        }
        let half = DensityMatrix::maximally_mixed(vec![2]);
        assert!((hs_distance(&zero, &half).unwrap() - 0.5).abs() < 1e-15);

        let sigma = random_density(&[2], 2, &mut rng).unwrap();
        let a = hs_distance(&rho, &sigma).unwrap();
        let b = schatten_q_distance(&rho, &sigma, 2.0).unwrap();
        assert!((a - b).abs() < 1e-14);

        assert!(hs_distance(&zero, &named::bell()).is_err());
    }

    #[test]
    fn pure_state_distance_depends_on_overlap() {
        // Oracle: ρ − σ for pure states has eigenvalues ±√(1−c), c = |⟨φ|ψ⟩|².
        let theta: f64 = 0.7;
        let phi = DensityMatrix::pure(
            vec![2],
            &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        )
        .unwrap();
        let psi = DensityMatrix::pure(
            vec![2],
            &[
                Complex64::new(theta.cos(), 0.0),
                Complex64::new(0.0, theta.sin()),
            ],
        )
        .unwrap();
        let c = theta.cos().powi(2);
        for q in [1.0, 1.5, 2.0, 2.5, 3.0] {
            let expected = 2.0 * (1.0 - c).powf(q / 2.0);
            let got = schatten_q_distance(&phi, &psi, q).unwrap();
            assert!((got - expected).abs() < 1e-14, "q={q}");
        }
    }

    #[test]
    fn padding_with_zero_eigenvalues_is_invisible() {
        let mut rng = Rng::new(5);
        let rho = random_density(&[2], 2, &mut rng).unwrap();
        let padded = ComplexMatrix::from_fn(3, 3, |i, j| {
            if i < 2 && j < 2 {
                rho.matrix()[(i, j)]
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let padded = DensityMatrix::new(vec![3], padded).unwrap();
        for kind in KINDS {
            let a = entropy(kind, &rho).unwrap();
            let b = entropy(kind, &padded).unwrap();
            assert!((a - b).abs() < 1e-10, "{kind}");
        }
    }

    #[test]
    fn kind_serialization() {
        let s = serde_json::to_string(&EntropyKind::tsallis(2.5)).unwrap();
        assert_eq!(s, r#"{"family":"tsallis","q":2.5}"#);
        let back: EntropyKind = serde_json::from_str(&s).unwrap();
        assert_eq!(back, EntropyKind::tsallis(2.5));
        let r: EntropyKind = serde_json::from_str(r#"{"family":"renyi","q":0.5}"#).unwrap();
        assert_eq!(r, EntropyKind::renyi(0.5));
    }
}
