//! Input germs: surfaces and curves through a base point of the Siegel
//! upper half space H2, their differentials, and the null-curve test.
//!
//! Tangent vectors of H2 are identified with binary quadratics by
//! W -> W11 X^2 + 2 W12 XY + W22 Y^2, so the middle quadratic coordinate
//! carries a factor 2 relative to the matrix entry.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::GaussianRational;
use crate::series::{BiSeries, SeriesMatrix, UniSeries, Var};

/// A point of H2: 2x2 complex symmetric matrix with positive definite
/// imaginary part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiegelPoint {
    pub z11: GaussianRational,
    pub z12: GaussianRational,
    pub z22: GaussianRational,
}

impl SiegelPoint {
    /// iI, the standard base point.
    pub fn i_identity() -> Self {
        SiegelPoint {
            z11: GaussianRational::i(),
            z12: GaussianRational::zero(),
            z22: GaussianRational::i(),
        }
    }

    /// Leading-principal-minor test on Im Z, exact.
    pub fn is_siegel_point(&self) -> bool {
        let y11 = &self.z11.im;
        let y12 = &self.z12.im;
        let y22 = &self.z22.im;
        use num_traits::Signed;
        y11.is_positive() && (&(y11 * y22) - &(y12 * y12)).is_positive()
    }
}

/// The three matrix components of a germ, as offsets from the base point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comps<S> {
    pub z11: S,
    pub z12: S,
    pub z22: S,
}

/// A surface germ phi: B -> H2, stored as three series in (u1, u2) with
/// zero constant term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceGerm {
    pub base: SiegelPoint,
    pub order: usize,
    pub comps: Comps<BiSeries>,
}

/// A curve germ t -> s(t) in H2, three series in t with zero constant term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveGerm {
    pub base: SiegelPoint,
    pub order: usize,
    pub comps: Comps<UniSeries>,
}

/// Either kind of germ, distinguished by the `kind` field in JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Germ {
    Surface(SurfaceGerm),
    Curve(CurveGerm),
}

impl SurfaceGerm {
    /// dphi as a 3x2 matrix: rows are the (X^2, XY, Y^2) coordinates of the
    /// image quadratic, columns the partials along u1 and u2.
    pub fn differential(&self) -> SeriesMatrix {
        let two = GaussianRational::from_int(2);
        let row = |s: &BiSeries, double: bool| -> Vec<BiSeries> {
            [Var::U1, Var::U2]
                .iter()
                .map(|&v| {
                    let d = s.diff(v);
                    if double {
                        d.scale(&two)
                    } else {
                        d
                    }
                })
                .collect()
        };
        SeriesMatrix::from_rows(vec![
            row(&self.comps.z11, false),
            row(&self.comps.z12, true),
            row(&self.comps.z22, false),
        ])
    }

    /// Rank-2 check of the differential at the origin.
    pub fn is_immersed(&self) -> bool {
        let m = self.differential().at_origin();
        let minor = |r1: usize, r2: usize| {
            &(&m[r1][0] * &m[r2][1]) - &(&m[r1][1] * &m[r2][0])
        };
        !minor(0, 1).is_zero() || !minor(0, 2).is_zero() || !minor(1, 2).is_zero()
    }

    pub fn truncate(&self, order: usize) -> Self {
        SurfaceGerm {
            base: self.base.clone(),
            order,
            comps: Comps {
                z11: self.comps.z11.truncate(order),
                z12: self.comps.z12.truncate(order),
                z22: self.comps.z22.truncate(order),
            },
        }
    }
}

impl CurveGerm {
    /// Promote to the cylinder submersion phi(u1, u2) = s(u1). This makes
    /// the second base direction the kernel of dphi, as the zeta recipe
    /// needs.
    pub fn to_cylinder(&self) -> Comps<BiSeries> {
        Comps {
            z11: self.comps.z11.to_biseries(Var::U1),
            z12: self.comps.z12.to_biseries(Var::U1),
            z22: self.comps.z22.to_biseries(Var::U1),
        }
    }

    /// dphi of the cylinder: first column is the tangent quadratic of the
    /// curve, second column identically zero.
    pub fn differential(&self) -> SeriesMatrix {
        let two = GaussianRational::from_int(2);
        let zero = || BiSeries::zero(self.order.saturating_sub(1));
        let d = |s: &UniSeries| s.diff().to_biseries(Var::U1);
        SeriesMatrix::from_rows(vec![
            vec![d(&self.comps.z11), zero()],
            vec![d(&self.comps.z12).scale(&two), zero()],
            vec![d(&self.comps.z22), zero()],
        ])
    }

    /// The tangent quadratic Q(t) = s11' X^2 + 2 s12' XY + s22' Y^2 as
    /// series coordinates (xx, xy, yy).
    pub fn tangent_quadratic(&self) -> [BiSeries; 3] {
        let d = self.differential();
        [d.get(0, 0).clone(), d.get(1, 0).clone(), d.get(2, 0).clone()]
    }

    pub fn is_immersed(&self) -> bool {
        !self.comps.z11.coeff(1).is_zero()
            || !self.comps.z12.coeff(1).is_zero()
            || !self.comps.z22.coeff(1).is_zero()
    }

    /// True iff the discriminant of the tangent quadratic vanishes
    /// identically as a series, i.e. the tangent direction stays on the
    /// conic of perfect squares.
    pub fn is_null_curve(&self) -> Result<bool> {
        if !self.is_immersed() {
            return Err(Error::NotImmersed);
        }
        let [xx, xy, yy] = self.tangent_quadratic();
        let four = BiSeries::constant(GaussianRational::from_int(4));
        let disc = &(&xy * &xy) - &(&four * &(&xx * &yy));
        Ok(disc.is_zero())
    }

    pub fn truncate(&self, order: usize) -> Self {
        let cut = |s: &UniSeries| {
            UniSeries::from_terms(
                order,
                &s.terms().map(|(&i, c)| (i, c.clone())).collect::<Vec<_>>(),
            )
        };
        CurveGerm {
            base: self.base.clone(),
            order,
            comps: Comps {
                z11: cut(&self.comps.z11),
                z12: cut(&self.comps.z12),
                z22: cut(&self.comps.z22),
            },
        }
    }
}

/// Outcome of the structural checks on a germ; failures are entries, not
/// errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub failures: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn validate_germ(germ: &Germ) -> ValidationReport {
    let mut failures = Vec::new();
    let (base, order) = match germ {
        Germ::Surface(g) => (&g.base, g.order),
        Germ::Curve(g) => (&g.base, g.order),
    };
    if !base.is_siegel_point() {
        failures.push("base point is not in the Siegel upper half space".to_string());
    }
    if order < 2 {
        failures.push(format!("truncation order {order} is below the minimum 2"));
    }
    match germ {
        Germ::Surface(g) => {
            for (name, s) in [
                ("z11", &g.comps.z11),
                ("z12", &g.comps.z12),
                ("z22", &g.comps.z22),
            ] {
                if !s.constant_term().is_zero() {
                    failures.push(format!("component {name} has a nonzero constant term"));
                }
                if s.order() < g.order {
                    failures.push(format!(
                        "component {name} is only valid to order {} < {}",
                        s.order(),
                        g.order
                    ));
                }
            }
            if !g.is_immersed() {
                failures.push("differential does not have rank 2 at the origin".to_string());
            }
        }
        Germ::Curve(g) => {
            for (name, s) in [
                ("z11", &g.comps.z11),
                ("z12", &g.comps.z12),
                ("z22", &g.comps.z22),
            ] {
                if !s.coeff(0).is_zero() {
                    failures.push(format!("component {name} has a nonzero constant term"));
                }
                if s.order() < g.order {
                    failures.push(format!(
                        "component {name} is only valid to order {} < {}",
                        s.order(),
                        g.order
                    ));
                }
            }
            if !g.is_immersed() {
                failures.push("curve is not immersed: s'(0) = 0".to_string());
            }
        }
    }
    ValidationReport { failures }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::ORDER_INF;

    fn g(n: i64) -> GaussianRational {
        GaussianRational::from_int(n)
    }

    /// The worked linear model phi = (u1, 0, u2) over iI.
    pub fn linear_surface(order: usize) -> SurfaceGerm {
        SurfaceGerm {
            base: SiegelPoint::i_identity(),
            order,
            comps: Comps {
                z11: BiSeries::var(Var::U1, order),
                z12: BiSeries::zero(order),
                z22: BiSeries::var(Var::U2, order),
            },
        }
    }

    #[test]
    fn siegel_membership() {
        assert!(SiegelPoint::i_identity().is_siegel_point());
        let neg = SiegelPoint {
            z11: -GaussianRational::i(),
            z12: GaussianRational::zero(),
            z22: GaussianRational::i(),
        };
        assert!(!neg.is_siegel_point());
        let indef = SiegelPoint {
            z11: GaussianRational::i(),
            z12: &g(2) * &GaussianRational::i(),
            z22: GaussianRational::i(),
        };
        assert!(!indef.is_siegel_point());
    }

    #[test]
    fn linear_surface_differential() {
        let d = linear_surface(8).differential();
        let m = d.at_origin();
        // columns are the coefficient vectors of X^2 and Y^2
        assert_eq!(m[0][0], g(1));
        assert_eq!(m[1][0], g(0));
        assert_eq!(m[2][0], g(0));
        assert_eq!(m[0][1], g(0));
        assert_eq!(m[1][1], g(0));
        assert_eq!(m[2][1], g(1));
        assert!(linear_surface(8).is_immersed());
    }

    #[test]
    fn curve_differential_doubles_middle_entry() {
        // s(t) = (t, t^2, t^3/3) gives tangent column (1, 4t, t^2)
        let third = GaussianRational::from_parts(1, 3, 0, 1);
        let curve = CurveGerm {
            base: SiegelPoint::i_identity(),
            order: 8,
            comps: Comps {
                z11: UniSeries::from_terms(8, &[(1, g(1))]),
                z12: UniSeries::from_terms(8, &[(2, g(1))]),
                z22: UniSeries::from_terms(8, &[(3, third)]),
            },
        };
        let [xx, xy, yy] = curve.tangent_quadratic();
        assert_eq!(xx, BiSeries::constant(g(1)));
        assert_eq!(xy, BiSeries::monomial(1, 0, g(4), 7));
        assert_eq!(yy, BiSeries::monomial(2, 0, g(1), 7));
        // disc = 16t^2 - 4t^2, not identically zero
        assert!(!curve.is_null_curve().unwrap());
    }

    #[test]
    fn null_curve_examples() {
        // s'(t)-quadratic (X + tY)^2: s(t) = (t, t^2/2, t^3/3)
        let half = GaussianRational::from_parts(1, 2, 0, 1);
        let third = GaussianRational::from_parts(1, 3, 0, 1);
        let null = CurveGerm {
            base: SiegelPoint::i_identity(),
            order: 8,
            comps: Comps {
                z11: UniSeries::from_terms(8, &[(1, g(1))]),
                z12: UniSeries::from_terms(8, &[(2, half.clone())]),
                z22: UniSeries::from_terms(8, &[(3, third)]),
            },
        };
        assert!(null.is_null_curve().unwrap());

        // constant direction (1, 0, 0): Q = X^2
        let constant = CurveGerm {
            base: SiegelPoint::i_identity(),
            order: 8,
            comps: Comps {
                z11: UniSeries::from_terms(8, &[(1, g(1))]),
                z12: UniSeries::zero(8),
                z22: UniSeries::zero(8),
            },
        };
        assert!(constant.is_null_curve().unwrap());

        // s'(0)-quadratic = XY
        let not_null = CurveGerm {
            base: SiegelPoint::i_identity(),
            order: 8,
            comps: Comps {
                z11: UniSeries::zero(8),
                z12: UniSeries::from_terms(8, &[(1, half)]),
                z22: UniSeries::zero(8),
            },
        };
        assert!(!not_null.is_null_curve().unwrap());

        let flat = CurveGerm {
            base: SiegelPoint::i_identity(),
            order: 8,
            comps: Comps {
                z11: UniSeries::zero(8),
                z12: UniSeries::zero(8),
                z22: UniSeries::zero(8),
            },
        };
        assert_eq!(flat.is_null_curve().unwrap_err(), Error::NotImmersed);
    }

    #[test]
    fn validation_report_entries() {
        let good = Germ::Surface(linear_surface(8));
        assert!(validate_germ(&good).passed());

        let mut flat = linear_surface(8);
        flat.comps.z11 = BiSeries::zero(8);
        flat.comps.z22 = BiSeries::zero(8);
        let report = validate_germ(&Germ::Surface(flat));
        assert!(report.failures.iter().any(|f| f.contains("rank 2")));

        let mut bad_base = linear_surface(8);
        bad_base.base.z11 = -GaussianRational::i();
        let report = validate_germ(&Germ::Surface(bad_base));
        assert!(report.failures.iter().any(|f| f.contains("Siegel")));
    }

    #[test]
    fn germ_json_round_trip() {
        let germ = Germ::Surface(linear_surface(4));
        let json = serde_json::to_string(&germ).unwrap();
        assert!(json.contains("\"kind\":\"surface\""));
        let back: Germ = serde_json::from_str(&json).unwrap();
        assert_eq!(back, germ);
        let _ = ORDER_INF;
    }
}
