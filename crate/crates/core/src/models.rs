//! Reduced normal-form coefficients whose sign decides the bifurcation type.

use serde::{Deserialize, Serialize};

use crate::distributions::Distribution;
use crate::error::{Error, Result};
use crate::mellin::{MellinFactor, ProductExpression};
use crate::pce::{project, ProjectOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubcriticalWhen {
    Positive,
    Negative,
}

impl SubcriticalWhen {
    /// Strict sign test; a zero coefficient is never counted as subcritical.
    pub fn is_subcritical(self, x: f64) -> bool {
        match self {
            SubcriticalWhen::Positive => x > 0.0,
            SubcriticalWhen::Negative => x < 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BifurcationModel {
    /// `X = ζ / (θ (1 + ζ))` from the reduced Lorenz system.
    Lorenz,
    /// `r₁ r₂`, the cubic coefficient of `u̇ = -r₁r₂u³ - au - a²u`.
    PitchforkProduct,
    /// Sign proxy `s(β, α)` of the Watt governor's first Lyapunov coefficient.
    WattGovernor,
}

impl BifurcationModel {
    pub const ALL: [BifurcationModel; 3] = [
        BifurcationModel::Lorenz,
        BifurcationModel::PitchforkProduct,
        BifurcationModel::WattGovernor,
    ];

    pub fn by_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == name)
            .ok_or_else(|| Error::Config(format!("unknown model `{name}` (known: lorenz, pitchfork_product, watt_governor)")))
    }

    pub fn name(self) -> &'static str {
        match self {
            BifurcationModel::Lorenz => "lorenz",
            BifurcationModel::PitchforkProduct => "pitchfork_product",
            BifurcationModel::WattGovernor => "watt_governor",
        }
    }

    /// Input names in evaluation order.
    pub fn inputs(self) -> &'static [&'static str] {
        match self {
            BifurcationModel::Lorenz => &["zeta", "theta"],
            BifurcationModel::PitchforkProduct => &["r1", "r2"],
            BifurcationModel::WattGovernor => &["beta", "alpha"],
        }
    }

    pub fn dim(self) -> usize {
        self.inputs().len()
    }

    pub fn subcritical_when(self) -> SubcriticalWhen {
        match self {
            BifurcationModel::Lorenz | BifurcationModel::PitchforkProduct => SubcriticalWhen::Negative,
            BifurcationModel::WattGovernor => SubcriticalWhen::Positive,
        }
    }

    pub fn is_subcritical(self, x: f64) -> bool {
        self.subcritical_when().is_subcritical(x)
    }

    /// Evaluates the coefficient without checks; NaN/inf propagate.
    pub fn eval_unchecked(self, r: &[f64]) -> f64 {
        match self {
            BifurcationModel::Lorenz => r[0] / (r[1] * (1.0 + r[0])),
            BifurcationModel::PitchforkProduct => r[0] * r[1],
            BifurcationModel::WattGovernor => watt_governor_sign(r[0], r[1]),
        }
    }

    pub fn eval(self, r: &[f64]) -> Result<f64> {
        if r.len() != self.dim() {
            return Err(Error::domain("model eval", format!("{} expects {} inputs, got {}", self.name(), self.dim(), r.len())));
        }
        match self {
            BifurcationModel::Lorenz => lorenz_reduced(r[0], r[1]),
            _ => Ok(self.eval_unchecked(r)),
        }
    }

    /// Whether [`Self::mellin_decomposition`] returns a product form.
    pub fn has_product_form(self) -> bool {
        self != BifurcationModel::WattGovernor
    }

    /// Product form of the coefficient for Mellin moment evaluation, if any.
    ///
    /// Lorenz splits as `(ζ/(1+ζ)) · θ⁻¹`, with the first factor expanded in
    /// `germ` at degree `pce.degree`; the pitchfork product is `r₁ · r₂`.
    pub fn mellin_decomposition(
        self,
        inputs: &[Distribution],
        germ: &Distribution,
        pce: ProjectOptions,
    ) -> Option<Result<ProductExpression>> {
        if inputs.len() != self.dim() {
            return Some(Err(Error::domain("mellin decomposition", "wrong number of inputs")));
        }
        match self {
            BifurcationModel::Lorenz => Some((|| {
                let (zeta, theta) = (&inputs[0], &inputs[1]);
                if zeta.support().0 <= -1.0 {
                    return Err(Error::Singularity {
                        model: self.name().into(),
                        detail: format!("zeta = -1 lies in the support of {zeta}"),
                    });
                }
                let ratio = project(|z| z / (1.0 + z), zeta, germ, pce)?.collect_powers();
                ProductExpression::new(
                    vec![MellinFactor::pce(ratio), MellinFactor::dist(*theta).inverse()],
                    1.0,
                )
            })()),
            BifurcationModel::PitchforkProduct => Some(ProductExpression::new(
                vec![MellinFactor::dist(inputs[0]), MellinFactor::dist(inputs[1])],
                1.0,
            )),
            BifurcationModel::WattGovernor => None,
        }
    }
}

impl std::str::FromStr for BifurcationModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::by_name(s)
    }
}

pub fn lorenz_reduced(r1: f64, r2: f64) -> Result<f64> {
    if r1 == -1.0 {
        return Err(Error::Singularity {
            model: "lorenz".into(),
            detail: "zeta = -1".into(),
        });
    }
    if !(r2 > 0.0) {
        return Err(Error::domain("lorenz_reduced", format!("theta = {r2} must be positive")));
    }
    Ok(r1 / (r2 * (1.0 + r1)))
}

pub fn pitchfork_product(r1: f64, r2: f64) -> f64 {
    r1 * r2
}

/// `s(β, α) = -(3 + (α² - 5)β² + α⁴β⁶)`; positive means subcritical Hopf.
pub fn watt_governor_sign(beta: f64, alpha: f64) -> f64 {
    let (a2, b2) = (alpha * alpha, beta * beta);
    -(3.0 + (a2 - 5.0) * b2 + a2 * a2 * b2 * b2 * b2)
}

/// Full first Lyapunov coefficient of the Watt governor.
pub fn watt_governor_lyapunov(beta: f64, alpha: f64) -> f64 {
    let (a2, b2) = (alpha * alpha, beta * beta);
    let b4 = b2 * b2;
    let poly = 3.0 + (a2 - 5.0) * b2 + a2 * a2 * b4 * b2;
    let num = alpha * beta.powf(1.5) * (1.0 - b2) * poly;
    let den = (1.0 - b2 + a2 * b4) * (1.0 - b2 + 4.0 * a2 * b4);
    -0.5 * num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mellin::mellin_eval;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn direct_values() {
        assert_eq!(lorenz_reduced(1.0, 1.0).unwrap(), 0.5);
        assert_eq!(lorenz_reduced(0.0, 3.7).unwrap(), 0.0);
        assert!(matches!(lorenz_reduced(-1.0, 1.0), Err(Error::Singularity { .. })));
        assert_eq!(pitchfork_product(2.0, 3.0), 6.0);
        assert_eq!(watt_governor_sign(1.0, 1.0), 0.0);
        assert!((watt_governor_sign(0.5, 0.5) + 1.8135).abs() < 1e-4);
        assert_eq!(watt_governor_sign(0.0, 2.0), -3.0);
        assert_eq!(watt_governor_lyapunov(0.5, 0.0), 0.0);
    }

    #[test]
    fn registry() {
        for m in BifurcationModel::ALL {
            assert_eq!(BifurcationModel::by_name(m.name()).unwrap(), m);
            assert_eq!(serde_json::to_string(&m).unwrap(), format!("\"{}\"", m.name()));
        }
        assert!(BifurcationModel::by_name("hindmarsh_rose").is_err());
        assert!(BifurcationModel::Lorenz.is_subcritical(-1e-9));
        assert!(!BifurcationModel::Lorenz.is_subcritical(0.0));
        assert!(BifurcationModel::WattGovernor.is_subcritical(0.1));
        assert!(!BifurcationModel::WattGovernor.is_subcritical(-0.0));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn lyapunov_sign_follows_proxy(beta in 1e-3f64..0.999, alpha in 1e-3f64..10.0) {
            let l = watt_governor_lyapunov(beta, alpha);
            let s = watt_governor_sign(beta, alpha);
            let (b2, a2) = (beta * beta, alpha * alpha);
            prop_assert!(l.is_finite());
            prop_assert!((1.0 - b2 + a2 * b2 * b2) * (1.0 - b2 + 4.0 * a2 * b2 * b2) > 0.0);
            if s.abs() > 1e-12 {
                prop_assert_eq!(l > 0.0, s > 0.0);
            }
        }
    }

    #[test]
    fn lorenz_decomposition_table2() {
        let inputs = [Distribution::beta(2.0, 2.0).unwrap(), Distribution::gamma(8.0, 1.0).unwrap()];
        let germ = Distribution::uniform(0.0, 1.0).unwrap();
        let e = BifurcationModel::Lorenz
            .mellin_decomposition(&inputs, &germ, ProjectOptions::default())
            .unwrap()
            .unwrap();
        assert!(e.has_pce());
        let want = [4.55e-2, 2.66e-3, 1.99e-4, 1.94e-5, 2.60e-6];
        for (k, w) in want.iter().enumerate() {
            let m = mellin_eval(&e, k as i64 + 2).unwrap();
            assert!(((m - w) / w).abs() < 0.02, "mu_{} = {m}", k + 1);
        }
    }

    #[test]
    fn pitchfork_decomposition_is_exact() {
        let inputs = [Distribution::uniform(-1.0, 3.0).unwrap(), Distribution::gamma(3.0, 1.0).unwrap()];
        let germ = Distribution::uniform(0.0, 1.0).unwrap();
        let e = BifurcationModel::PitchforkProduct
            .mellin_decomposition(&inputs, &germ, ProjectOptions::default())
            .unwrap()
            .unwrap();
        // E[r1 r2] = 1 · 3, E[(r1 r2)^2] = 7/3 · 12
        assert_relative_eq!(mellin_eval(&e, 2).unwrap(), 3.0, max_relative = 1e-14);
        assert_relative_eq!(mellin_eval(&e, 3).unwrap(), 28.0, max_relative = 1e-14);
        assert!(BifurcationModel::WattGovernor
            .mellin_decomposition(&inputs, &germ, ProjectOptions::default())
            .is_none());
    }

    #[test]
    fn lorenz_singular_support_rejected() {
        let inputs = [Distribution::uniform(-2.0, 1.0).unwrap(), Distribution::gamma(8.0, 1.0).unwrap()];
        let germ = Distribution::uniform(0.0, 1.0).unwrap();
        let r = BifurcationModel::Lorenz.mellin_decomposition(&inputs, &germ, ProjectOptions::default());
        assert!(matches!(r, Some(Err(Error::Singularity { .. }))));
    }
}
