//! The constructive certification pipeline: fiber lifting, coframe
//! building, coframe closing through the CK solver, the cubic-section
//! solve, and independent re-verification of the emitted certificate.

use serde::{Deserialize, Serialize};

use crate::ck::{ck_solve, CKSystem};
use crate::cubic::{
    xi_of, FiberModule, SeriesCubic, GL2, PARAMETER_CANDIDATES,
};
use crate::error::{Error, Result};
use crate::exact::GaussianRational;
use crate::germ::{validate_germ, CurveGerm, Germ, SurfaceGerm};
use crate::series::{BiSeries, SeriesMatrix, UniSeries, Var, ORDER_INF};

/// Two pointwise independent V-valued coframes on the base, as 2x2 series
/// matrices: column k is the image of d/du_k in (d/dX, d/dY) coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct CoframePair {
    pub theta: SeriesMatrix,
    pub theta_tilde: SeriesMatrix,
}

/// Deterministic choices made during a build, recorded for reproducibility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildChoices {
    /// Free-parameter pairs used for the two fiber lifts (surface case).
    pub lift_params: Option<[(i64, i64); 2]>,
    /// Base chart used while closing the coframe (columns = new basis
    /// directions in old coordinates).
    pub chart: GL2,
}

/// The machine-checkable witness that a germ is a Lagrangian locus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagrangianCertificate {
    pub kind: String,
    pub germ: Germ,
    /// The closed coframe.
    pub vartheta: SeriesMatrix,
    /// The cubic-form-valued section with alpha^psi(vartheta(w)) = dphi(w).
    pub psi: SeriesCubic,
    #[serde(rename = "F")]
    pub f: BiSeries,
    #[serde(rename = "Ftilde")]
    pub f_tilde: BiSeries,
    pub q: SeriesCubic,
    pub qtilde: Option<SeriesCubic>,
    /// Potentials of the two rows of vartheta (affine coordinates).
    pub affine_coords: [BiSeries; 2],
    /// Rows of d(vartheta); exactly zero up to the certified order.
    pub residual_closedness: Vec<BiSeries>,
    /// Entries of alpha^psi(vartheta) - dphi; exactly zero up to the
    /// certified order.
    pub residual_cubic_condition: Vec<BiSeries>,
    /// Jet order to which both residuals are certified. The identities are
    /// jet-level statements; no domain of validity is claimed.
    pub certified_order: usize,
    pub choices: BuildChoices,
    /// Set when chi_hat of psi vanishes at the origin to positive order,
    /// i.e. nondegeneracy of psi could degenerate beyond the jet.
    pub psi_degeneracy_warning: bool,
}

/// Outcome of the independent verifier; one entry per criterion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<(String, bool)>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }
}

/// Pluecker triple of the column span of a 3x2 matrix of quadratic
/// coordinates, in the basis (X^2^Y^2, X^2^XY, Y^2^XY).
pub fn pluecker_of_columns(d: &SeriesMatrix) -> (BiSeries, BiSeries, BiSeries) {
    let p = &(d.get(0, 0) * d.get(2, 1)) - &(d.get(2, 0) * d.get(0, 1));
    let q = &(d.get(0, 0) * d.get(1, 1)) - &(d.get(1, 0) * d.get(0, 1));
    let r = &(d.get(2, 0) * d.get(1, 1)) - &(d.get(1, 0) * d.get(2, 1));
    (p, q, r)
}

/// Two independent nondegenerate lifts of the differential's image plane
/// into the space of cubics, with the parameter pairs that produced them.
pub fn lift_fiber_sections(
    d: &SeriesMatrix,
) -> Result<(SeriesCubic, SeriesCubic, [(i64, i64); 2])> {
    let (p, q, r) = pluecker_of_columns(d);
    let module = FiberModule::from_pluecker(&p, &q, &r)?;
    let mut found: Vec<((i64, i64), SeriesCubic)> = Vec::new();
    for &(s, t) in PARAMETER_CANDIDATES.iter() {
        let f = module.element(s, t);
        if !f.is_nondegenerate_at_origin() {
            continue;
        }
        if let Some(((s0, t0), _)) = found.first() {
            if s0 * t - t0 * s == 0 {
                continue;
            }
        }
        found.push(((s, t), f));
        if found.len() == 2 {
            let params = [found[0].0, found[1].0];
            let mut it = found.into_iter();
            return Ok((it.next().unwrap().1, it.next().unwrap().1, params));
        }
    }
    Err(Error::DegenerateFiber)
}

fn independent_at_origin(a: &SeriesMatrix, b: &SeriesMatrix) -> bool {
    let av: Vec<GaussianRational> = a.at_origin().into_iter().flatten().collect();
    let bv: Vec<GaussianRational> = b.at_origin().into_iter().flatten().collect();
    for i in 0..av.len() {
        for j in (i + 1)..av.len() {
            if !(&(&av[i] * &bv[j]) - &(&av[j] * &bv[i])).is_zero() {
                return true;
            }
        }
    }
    false
}

/// theta = xi^q, theta_tilde = xi^{qtilde}, both solved against dphi.
pub fn build_coframes_surface(
    d: &SeriesMatrix,
    q: &SeriesCubic,
    qtilde: &SeriesCubic,
) -> Result<CoframePair> {
    let theta = xi_of(q, d)?;
    let theta_tilde = xi_of(qtilde, d)?;
    if !theta.det2().is_unit() || !theta_tilde.det2().is_unit() {
        return Err(Error::SingularAtOrigin);
    }
    if !independent_at_origin(&theta, &theta_tilde) {
        return Err(Error::NotAnIsomorphism);
    }
    Ok(CoframePair { theta, theta_tilde })
}

/// Cylinder lift of a null curve: the perfect-square tangent quadratic is
/// written as unit * l^2 for a linear form l, and q = l^3 is the section
/// of the degeneracy cone with kappa(q) = [Q]. Returns q and the zeta
/// coframe pair.
pub fn build_coframes_curve(g: &CurveGerm) -> Result<(SeriesCubic, CoframePair)> {
    if !g.is_null_curve()? {
        return Err(Error::NotNullCurve);
    }
    let [xx, xy, yy] = g.tangent_quadratic();
    let half = BiSeries::constant(GaussianRational::from_parts(1, 2, 0, 1));
    // l with l^2 = (unit) * Q; nullity makes Q a perfect square
    let (lx, ly) = if xx.is_unit() {
        (xx.clone(), &half * &xy)
    } else if yy.is_unit() {
        (&half * &xy, yy.clone())
    } else {
        // Q(0) would have to be a multiple of XY, which is not a square
        return Err(Error::NotNullCurve);
    };
    let three = BiSeries::constant(GaussianRational::from_int(3));
    let q = SeriesCubic::new(
        &(&lx * &lx) * &lx,
        &(&ly * &ly) * &ly,
        &three * &(&(&lx * &lx) * &ly),
        &three * &(&lx * &(&ly * &ly)),
    );
    let d = g.differential();
    let (zeta, zeta_tilde) = crate::cubic::zeta_pair(&q, &d)?;
    Ok((q, CoframePair { theta: zeta, theta_tilde: zeta_tilde }))
}

/// Directions tried for the new u1-axis when the pairing determinant of
/// the raw coframes is singular at the origin.
const CHART_CANDIDATES: [(i64, i64); 10] =
    [(1, 0), (0, 1), (1, 1), (1, -1), (1, 2), (2, 1), (1, -2), (2, -1), (1, 3), (3, 1)];

fn chart_matrix(v: (i64, i64)) -> ([[GaussianRational; 2]; 2], GL2) {
    // second basis direction: whichever coordinate axis keeps the chart
    // invertible
    let w = if v.1 != 0 { (1, 0) } else { (0, 1) };
    let m = [
        [GaussianRational::from_int(v.0), GaussianRational::from_int(w.0)],
        [GaussianRational::from_int(v.1), GaussianRational::from_int(w.1)],
    ];
    (m.clone(), GL2::new(m).expect("chart candidates are invertible"))
}

fn scalar_inverse_2x2(m: &[[GaussianRational; 2]; 2]) -> [[GaussianRational; 2]; 2] {
    let det = &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0]);
    let inv = det.inv().expect("chart is invertible");
    [
        [&m[1][1] * &inv, &(-&m[0][1]) * &inv],
        [&(-&m[1][0]) * &inv, &m[0][0] * &inv],
    ]
}

fn apply_chart(m: &SeriesMatrix, c: &[[GaussianRational; 2]; 2]) -> SeriesMatrix {
    // columns transform by C, entries by the substitution u = C u'
    let c_const = SeriesMatrix::from_rows(vec![
        vec![BiSeries::constant(c[0][0].clone()), BiSeries::constant(c[0][1].clone())],
        vec![BiSeries::constant(c[1][0].clone()), BiSeries::constant(c[1][1].clone())],
    ]);
    m.substitute_linear(c).mul(&c_const)
}

/// Outcome of closing a coframe pair.
#[derive(Debug, Clone)]
pub struct ClosedCoframe {
    pub f: BiSeries,
    pub f_tilde: BiSeries,
    pub vartheta: SeriesMatrix,
    pub chart: GL2,
}

/// Find F, Ftilde with F(0)=1, Ftilde(0)=0 making F theta + Ftilde
/// theta_tilde closed, via the CK system the closedness conditions reduce
/// to once the pairing determinant is a unit. The solve runs in an
/// admissible chart and the result is transported back, so all returned
/// series live in the original base coordinates.
pub fn close_coframe(pair: &CoframePair, order: usize) -> Result<ClosedCoframe> {
    // chart search: need theta(v), theta_tilde(v) independent at the origin
    let mut chosen = None;
    for &v in CHART_CANDIDATES.iter() {
        let (c, gl) = chart_matrix(v);
        let col = |m: &SeriesMatrix| {
            [
                &m.get(0, 0).scale(&c[0][0]) + &m.get(0, 1).scale(&c[1][0]),
                &m.get(1, 0).scale(&c[0][0]) + &m.get(1, 1).scale(&c[1][0]),
            ]
        };
        let a = col(&pair.theta);
        let b = col(&pair.theta_tilde);
        let det = &(&a[0] * &b[1]) - &(&a[1] * &b[0]);
        if det.is_unit() {
            chosen = Some((c, gl));
            break;
        }
    }
    let (c, chart) = chosen.ok_or(Error::NoAdmissibleChart)?;
    let identity_chart = c[0][0] == GaussianRational::one()
        && c[1][1] == GaussianRational::one()
        && c[0][1].is_zero()
        && c[1][0].is_zero();

    let (theta_n, theta_tn) = if identity_chart {
        (pair.theta.clone(), pair.theta_tilde.clone())
    } else {
        (apply_chart(&pair.theta, &c), apply_chart(&pair.theta_tilde, &c))
    };

    // component functions in the chart coordinates
    let f = theta_n.get(0, 0);
    let g = theta_n.get(0, 1);
    let h = theta_n.get(1, 0);
    let j = theta_n.get(1, 1);
    let ft = theta_tn.get(0, 0);
    let gt = theta_tn.get(0, 1);
    let ht = theta_tn.get(1, 0);
    let jt = theta_tn.get(1, 1);

    let pairing = SeriesMatrix::from_rows(vec![
        vec![f.clone(), ft.clone()],
        vec![h.clone(), ht.clone()],
    ]);
    if !pairing.det2().is_unit() {
        return Err(Error::E0ConditionFails);
    }
    let pairing_inv = pairing.inverse()?;
    let a_mat = pairing_inv.mul(&SeriesMatrix::from_rows(vec![
        vec![g.clone(), gt.clone()],
        vec![j.clone(), jt.clone()],
    ]));
    let curl = |num: &BiSeries, den: &BiSeries| &num.diff(Var::U1) - &den.diff(Var::U2);
    let b_mat = pairing_inv.mul(&SeriesMatrix::from_rows(vec![
        vec![curl(g, f), curl(gt, ft)],
        vec![curl(j, h), curl(jt, ht)],
    ]));
    let sys = CKSystem {
        a: a_mat,
        b: b_mat,
        init: vec![
            UniSeries::constant(GaussianRational::one()),
            UniSeries::constant(GaussianRational::zero()),
        ],
        order,
    };
    let sol = ck_solve(&sys)?;
    let (f_new, ft_new) = (sol.u[0].clone(), sol.u[1].clone());

    let (big_f, big_ft) = if identity_chart {
        (f_new, ft_new)
    } else {
        let cinv = scalar_inverse_2x2(&c);
        (f_new.substitute_linear(&cinv), ft_new.substitute_linear(&cinv))
    };
    let vartheta = pair
        .theta
        .scale_series(&big_f)
        .add(&pair.theta_tilde.scale_series(&big_ft));
    if !vartheta.det2().is_unit() {
        return Err(Error::SingularAtOrigin);
    }
    Ok(ClosedCoframe { f: big_f, f_tilde: big_ft, vartheta, chart })
}

/// Rows of d(vartheta): for a row (A, B) of the matrix (1-form
/// A du1 + B du2), the exterior derivative is (dB/du1 - dA/du2) du1^du2.
pub fn closedness_residual(vartheta: &SeriesMatrix) -> Vec<BiSeries> {
    (0..vartheta.rows())
        .map(|k| &vartheta.get(k, 1).diff(Var::U1) - &vartheta.get(k, 0).diff(Var::U2))
        .collect()
}

/// The six-equation solve for (h, htilde) and the resulting cubic section
/// psi = h q + htilde qtilde.
pub fn solve_cubic_section(
    q: &SeriesCubic,
    qtilde: &SeriesCubic,
    vartheta: &SeriesMatrix,
    d: &SeriesMatrix,
) -> Result<(BiSeries, BiSeries, SeriesCubic)> {
    let lhs_q = q.alpha_matrix().mul(vartheta); // 3x2
    let lhs_qt = qtilde.alpha_matrix().mul(vartheta);
    let mut rows = Vec::with_capacity(6);
    let mut rhs = Vec::with_capacity(6);
    for k in 0..2 {
        for coord in 0..3 {
            rows.push(vec![lhs_q.get(coord, k).clone(), lhs_qt.get(coord, k).clone()]);
            rhs.push(vec![d.get(coord, k).clone()]);
        }
    }
    let sol = SeriesMatrix::linear_solve(
        &SeriesMatrix::from_rows(rows),
        &SeriesMatrix::from_rows(rhs),
    )?;
    let (h, ht) = (sol.get(0, 0).clone(), sol.get(1, 0).clone());
    let psi = q.scale(&h).add(&qtilde.scale(&ht));
    Ok((h, ht, psi))
}

/// Entries of alpha^psi(vartheta) - dphi as a flat list (row-major over
/// the 3x2 layout).
pub fn cubic_condition_residual(
    psi: &SeriesCubic,
    vartheta: &SeriesMatrix,
    d: &SeriesMatrix,
) -> Vec<BiSeries> {
    let lhs = psi.alpha_matrix().mul(vartheta);
    let diff = lhs.sub(d);
    (0..3)
        .flat_map(|r| (0..2).map(move |c| (r, c)))
        .map(|(r, c)| diff.get(r, c).clone())
        .collect()
}

/// Potentials x^k with dx^k = row k of a closed coframe, zero constant
/// term, by term-wise integration.
pub fn affine_coordinates(vartheta: &SeriesMatrix, certified: usize) -> Result<[BiSeries; 2]> {
    let mut out = Vec::with_capacity(2);
    for k in 0..2 {
        let a = vartheta.get(k, 0);
        let b = vartheta.get(k, 1);
        let closed = &b.diff(Var::U1) - &a.diff(Var::U2);
        if !closed.is_zero_to(certified.saturating_sub(1).min(closed.order())) {
            return Err(Error::NotClosed);
        }
        let p = a.integrate(Var::U1);
        let remainder = b - &p.diff(Var::U2);
        // closedness forces the remainder to depend on u2 only
        let pure_u2 = BiSeries::from_terms(
            remainder.order(),
            &remainder
                .terms()
                .filter(|(&(i, _), _)| i == 0)
                .map(|(&(i, j), c)| (i, j, c.clone()))
                .collect::<Vec<_>>(),
        );
        out.push(&p + &pure_u2.integrate(Var::U2));
    }
    Ok([out[0].clone(), out[1].clone()])
}

fn min_finite_order(series: &[BiSeries], cap: usize) -> usize {
    series
        .iter()
        .map(|s| s.order())
        .fold(cap, |acc, o| acc.min(o))
}

fn chi_hat_vanishes_at_origin_only_to_positive_order(psi: &SeriesCubic) -> bool {
    let (p, q, r) = psi.chi_hat();
    !(p.is_unit() || q.is_unit() || r.is_unit())
}

/// Build and self-check a certificate for a surface germ. Every surface
/// germ passes; a nonzero residual here indicates an internal error.
pub fn surface_certificate(g: &SurfaceGerm) -> Result<LagrangianCertificate> {
    let report = validate_germ(&Germ::Surface(g.clone()));
    if !report.passed() {
        return Err(Error::InvalidGerm(report.failures.join("; ")));
    }
    let d = g.differential();
    let (q, qtilde, params) = lift_fiber_sections(&d)?;
    let pair = build_coframes_surface(&d, &q, &qtilde)?;
    let closed = close_coframe(&pair, g.order)?;
    let (_, _, psi) = solve_cubic_section(&q, &qtilde, &closed.vartheta, &d)?;
    finish_certificate(
        "surface",
        Germ::Surface(g.clone()),
        g.order,
        d,
        closed,
        psi,
        q,
        Some(qtilde),
        BuildChoices { lift_params: Some(params), chart: GL2::identity() },
    )
}

/// Build and self-check a certificate for a curve germ; rejects non-null
/// curves with [`Error::NotNullCurve`].
pub fn curve_certificate(g: &CurveGerm) -> Result<LagrangianCertificate> {
    let report = validate_germ(&Germ::Curve(g.clone()));
    if !report.passed() {
        return Err(Error::InvalidGerm(report.failures.join("; ")));
    }
    let (q, pair) = build_coframes_curve(g)?;
    let d = g.differential();
    let closed = close_coframe(&pair, g.order)?;
    let denom = &closed.f + &closed.f_tilde;
    if !denom.is_unit() {
        return Err(Error::E0ConditionFails);
    }
    let psi = q.scale(&denom.invert()?);
    finish_certificate(
        "curve",
        Germ::Curve(g.clone()),
        g.order,
        d,
        closed,
        psi,
        q,
        None,
        BuildChoices { lift_params: None, chart: GL2::identity() },
    )
}

#[allow(clippy::too_many_arguments)]
fn finish_certificate(
    kind: &str,
    germ: Germ,
    order: usize,
    d: SeriesMatrix,
    closed: ClosedCoframe,
    psi: SeriesCubic,
    q: SeriesCubic,
    qtilde: Option<SeriesCubic>,
    mut choices: BuildChoices,
) -> Result<LagrangianCertificate> {
    choices.chart = closed.chart.clone();
    let res_closed = closedness_residual(&closed.vartheta);
    let res_cubic = cubic_condition_residual(&psi, &closed.vartheta, &d);
    let certified = min_finite_order(&res_closed, order).min(min_finite_order(&res_cubic, order));
    for s in res_closed.iter().chain(res_cubic.iter()) {
        if !s.is_zero_to(certified) {
            return Err(Error::VerificationFailed(format!(
                "internal: residual nonzero at order <= {certified}"
            )));
        }
    }
    // the surface construction needs psi in the nondegenerate locus; the
    // curve construction deliberately lands on the cone (psi a perfect cube)
    if kind == "surface" && !psi.is_nondegenerate_at_origin() {
        return Err(Error::VerificationFailed(
            "internal: psi degenerate at the origin".to_string(),
        ));
    }
    let affine = affine_coordinates(&closed.vartheta, certified)?;
    let cap = |s: &BiSeries| s.truncate(order.min(s.order()));
    Ok(LagrangianCertificate {
        kind: kind.to_string(),
        germ,
        vartheta: closed.vartheta.map(cap),
        psi: psi.truncate(order),
        f: cap(&closed.f),
        f_tilde: cap(&closed.f_tilde),
        q: q.truncate(order),
        qtilde: qtilde.map(|qt| qt.truncate(order)),
        affine_coords: [cap(&affine[0]), cap(&affine[1])],
        residual_closedness: res_closed.iter().map(|s| s.truncate(certified)).collect(),
        residual_cubic_condition: res_cubic.iter().map(|s| s.truncate(certified)).collect(),
        certified_order: certified,
        choices,
        psi_degeneracy_warning: kind == "surface"
            && chi_hat_vanishes_at_origin_only_to_positive_order(&psi),
    })
}

/// Re-check a certificate against its germ from scratch. Pure function of
/// the pair; shares no state with the builder.
pub fn verify_certificate(cert: &LagrangianCertificate) -> VerificationReport {
    let mut checks = Vec::new();
    let certified = cert.certified_order;

    let d = match &cert.germ {
        Germ::Surface(g) => g.differential(),
        Germ::Curve(g) => g.differential(),
    };

    checks.push((
        "coframe invertible at origin".to_string(),
        cert.vartheta.rows() == 2
            && cert.vartheta.cols() == 2
            && cert.vartheta.det2().is_unit(),
    ));

    let res_closed = closedness_residual(&cert.vartheta);
    checks.push((
        "coframe closed to certified order".to_string(),
        res_closed.iter().all(|s| s.is_zero_to(certified.min(s.order()))),
    ));

    let res_cubic = cubic_condition_residual(&cert.psi, &cert.vartheta, &d);
    checks.push((
        "cubic condition to certified order".to_string(),
        res_cubic.iter().all(|s| s.is_zero_to(certified.min(s.order()))),
    ));

    checks.push((
        "initial values F(0)=1, Ftilde(0)=0".to_string(),
        cert.f.constant_term() == GaussianRational::one()
            && cert.f_tilde.constant_term().is_zero(),
    ));

    if matches!(cert.germ, Germ::Surface(_)) {
        checks.push((
            "psi nondegenerate at origin".to_string(),
            cert.psi.is_nondegenerate_at_origin(),
        ));
    } else {
        // the curve construction lands on the degeneracy cone
        checks.push((
            "psi on the cone at origin".to_string(),
            cert.psi.at_origin().is_degenerate().unwrap_or(false),
        ));
    }

    if matches!(cert.germ, Germ::Curve(_)) {
        checks.push((
            "F + Ftilde is a unit".to_string(),
            (&cert.f + &cert.f_tilde).is_unit(),
        ));
    }

    let affine_ok = (0..2).all(|k| {
        let x = &cert.affine_coords[k];
        let dx1 = x.diff(Var::U1);
        let dx2 = x.diff(Var::U2);
        let e1 = &dx1 - cert.vartheta.get(k, 0);
        let e2 = &dx2 - cert.vartheta.get(k, 1);
        e1.is_zero_to(certified.min(e1.order())) && e2.is_zero_to(certified.min(e2.order()))
    });
    checks.push(("affine coordinates integrate the coframe".to_string(), affine_ok));

    // the stored residuals must agree with the recomputed ones
    let stored_match = cert
        .residual_closedness
        .iter()
        .zip(res_closed.iter())
        .all(|(a, b)| a == b)
        && cert
            .residual_cubic_condition
            .iter()
            .zip(res_cubic.iter())
            .all(|(a, b)| a == b);
    checks.push(("stored residuals match recomputation".to_string(), stored_match));

    VerificationReport { checks }
}

/// Convenience dispatch used by the CLI.
pub fn certify(germ: &Germ) -> Result<LagrangianCertificate> {
    match germ {
        Germ::Surface(g) => surface_certificate(g),
        Germ::Curve(g) => curve_certificate(g),
    }
}

/// Default truncation order when none is requested.
pub const DEFAULT_ORDER: usize = 8;

/// Used by tests that need a guaranteed-finite order cap.
pub fn finite(order: usize, fallback: usize) -> usize {
    if order == ORDER_INF {
        fallback
    } else {
        order
    }
}
