//! Binary quadratic and cubic forms on a 2-dimensional space V, the alpha
//! homomorphism Sym3 V* -> Hom(V, Sym2 V*), the degeneracy cone and its
//! kappa map, Pluecker coordinates of the image-plane map, fibers of that
//! map, the xi / zeta tangent-map constructions, the GL2 action, and the
//! conformal discriminant.
//!
//! All constructions are written over a coefficient ring that is either
//! Q(i) itself or the truncated series ring; the solve-based operations
//! run over series and scalar inputs are embedded as constants.
//!
//! Coefficient conventions are fixed once and for all:
//!   cubic  f = a X^3 + b Y^3 + c X^2 Y + e X Y^2   (tuple order a, b, c, e)
//!   quadratic Q = qxx X^2 + qxy XY + qyy Y^2
//!   Pluecker basis of wedge^2 Sym2 V*: (X^2^Y^2, X^2^XY, Y^2^XY).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::GaussianRational;
use crate::series::{BiSeries, SeriesMatrix, ORDER_INF};

/// Coefficient ring abstraction: Q(i) or the truncated series ring.
pub trait Coeff: Clone + PartialEq + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(n: i64) -> Self;
    fn from_scalar(c: &GaussianRational) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
    /// Invertibility in the ring: nonzero for scalars, unit constant term
    /// for series.
    fn is_unit(&self) -> bool;
    fn inv(&self) -> Result<Self>;
}

impl Coeff for GaussianRational {
    fn zero() -> Self {
        GaussianRational::zero()
    }
    fn one() -> Self {
        GaussianRational::one()
    }
    fn from_int(n: i64) -> Self {
        GaussianRational::from_int(n)
    }
    fn from_scalar(c: &GaussianRational) -> Self {
        c.clone()
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        GaussianRational::is_zero(self)
    }
    fn is_unit(&self) -> bool {
        !GaussianRational::is_zero(self)
    }
    fn inv(&self) -> Result<Self> {
        GaussianRational::inv(self)
    }
}

impl Coeff for BiSeries {
    fn zero() -> Self {
        BiSeries::zero(ORDER_INF)
    }
    fn one() -> Self {
        BiSeries::one()
    }
    fn from_int(n: i64) -> Self {
        BiSeries::constant(GaussianRational::from_int(n))
    }
    fn from_scalar(c: &GaussianRational) -> Self {
        BiSeries::constant(c.clone())
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        BiSeries::is_zero(self)
    }
    fn is_unit(&self) -> bool {
        BiSeries::is_unit(self)
    }
    fn inv(&self) -> Result<Self> {
        self.invert()
    }
}

/// Element of Sym2 V*: Q = qxx X^2 + qxy XY + qyy Y^2. `qxy` is the full
/// XY-coefficient, not its half.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryQuadratic<R> {
    #[serde(rename = "xx")]
    pub qxx: R,
    #[serde(rename = "xy")]
    pub qxy: R,
    #[serde(rename = "yy")]
    pub qyy: R,
}

impl<R: Coeff> BinaryQuadratic<R> {
    pub fn new(qxx: R, qxy: R, qyy: R) -> Self {
        BinaryQuadratic { qxx, qxy, qyy }
    }

    pub fn zero() -> Self {
        BinaryQuadratic::new(R::zero(), R::zero(), R::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.qxx.is_zero() && self.qxy.is_zero() && self.qyy.is_zero()
    }

    pub fn coeffs(&self) -> [&R; 3] {
        [&self.qxx, &self.qxy, &self.qyy]
    }

    /// The conformal discriminant qxy^2 - 4 qxx qyy; zero iff the quadratic
    /// is a perfect square (or zero).
    pub fn discriminant(&self) -> R {
        self.qxy
            .mul(&self.qxy)
            .sub(&R::from_int(4).mul(&self.qxx.mul(&self.qyy)))
    }
}

/// Element of Sym3 V*: f = a X^3 + b Y^3 + c X^2 Y + e X Y^2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryCubic<R> {
    pub a: R,
    pub b: R,
    pub c: R,
    pub e: R,
}

pub type ScalarCubic = BinaryCubic<GaussianRational>;
pub type ScalarQuadratic = BinaryQuadratic<GaussianRational>;
pub type SeriesCubic = BinaryCubic<BiSeries>;
pub type SeriesQuadratic = BinaryQuadratic<BiSeries>;

/// Orbit classification of nonzero binary cubics under GL(V).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orbit {
    /// Three distinct roots; orbit of X^3 + Y^3.
    SmoothOrbit,
    /// Exactly one repeated root; orbit of X^2 Y.
    NodalOrbit,
    /// Perfect cube of a linear form (the cone over the third Veronese).
    Degenerate,
}

impl<R: Coeff> BinaryCubic<R> {
    pub fn new(a: R, b: R, c: R, e: R) -> Self {
        BinaryCubic { a, b, c, e }
    }

    pub fn zero() -> Self {
        BinaryCubic::new(R::zero(), R::zero(), R::zero(), R::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero() && self.c.is_zero() && self.e.is_zero()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        BinaryCubic::new(
            self.a.add(&rhs.a),
            self.b.add(&rhs.b),
            self.c.add(&rhs.c),
            self.e.add(&rhs.e),
        )
    }

    pub fn scale(&self, s: &R) -> Self {
        BinaryCubic::new(self.a.mul(s), self.b.mul(s), self.c.mul(s), self.e.mul(s))
    }

    /// df/dX = 3a X^2 + 2c XY + e Y^2.
    pub fn diff_x(&self) -> BinaryQuadratic<R> {
        BinaryQuadratic::new(
            R::from_int(3).mul(&self.a),
            R::from_int(2).mul(&self.c),
            self.e.clone(),
        )
    }

    /// df/dY = c X^2 + 2e XY + 3b Y^2.
    pub fn diff_y(&self) -> BinaryQuadratic<R> {
        BinaryQuadratic::new(
            self.c.clone(),
            R::from_int(2).mul(&self.e),
            R::from_int(3).mul(&self.b),
        )
    }

    /// alpha^f(v) = v_X df/dX + v_Y df/dY = 3 f(v, ., .).
    pub fn alpha_apply(&self, v: &[R; 2]) -> BinaryQuadratic<R> {
        let dx = self.diff_x();
        let dy = self.diff_y();
        BinaryQuadratic::new(
            dx.qxx.mul(&v[0]).add(&dy.qxx.mul(&v[1])),
            dx.qxy.mul(&v[0]).add(&dy.qxy.mul(&v[1])),
            dx.qyy.mul(&v[0]).add(&dy.qyy.mul(&v[1])),
        )
    }

    /// Pluecker triple of df/dX ^ df/dY:
    /// (p, q, r) = (9ab - ce, 6ae - 2c^2, 2e^2 - 6bc).
    pub fn chi_hat(&self) -> (R, R, R) {
        let p = R::from_int(9).mul(&self.a.mul(&self.b)).sub(&self.c.mul(&self.e));
        let q = R::from_int(6)
            .mul(&self.a.mul(&self.e))
            .sub(&R::from_int(2).mul(&self.c.mul(&self.c)));
        let r = R::from_int(2)
            .mul(&self.e.mul(&self.e))
            .sub(&R::from_int(6).mul(&self.b.mul(&self.c)));
        (p, q, r)
    }

    /// Ker(alpha^f) != 0, i.e. f is a perfect cube of a linear form; decided
    /// by the vanishing of the wedge of the two partials.
    pub fn is_degenerate(&self) -> Result<bool> {
        if self.is_zero() {
            return Err(Error::ZeroCubic);
        }
        let (p, q, r) = self.chi_hat();
        Ok(p.is_zero() && q.is_zero() && r.is_zero())
    }

    /// Generator of Im(alpha^f) for degenerate f, normalized so the first
    /// invertible coefficient in (xx, xy, yy) order is 1. The result is a
    /// perfect square.
    pub fn kappa(&self) -> Result<BinaryQuadratic<R>> {
        if !self.is_degenerate()? {
            return Err(Error::NotDegenerate);
        }
        for gen in [self.diff_x(), self.diff_y()] {
            if let Some(lead) = gen.coeffs().iter().find(|c| c.is_unit()) {
                let inv = lead.inv()?;
                return Ok(BinaryQuadratic::new(
                    gen.qxx.mul(&inv),
                    gen.qxy.mul(&inv),
                    gen.qyy.mul(&inv),
                ));
            }
        }
        Err(Error::NotAUnit)
    }
}

impl ScalarCubic {
    pub fn from_ints(a: i64, b: i64, c: i64, e: i64) -> Self {
        BinaryCubic::new(
            GaussianRational::from_int(a),
            GaussianRational::from_int(b),
            GaussianRational::from_int(c),
            GaussianRational::from_int(e),
        )
    }

    pub fn to_series(&self) -> SeriesCubic {
        BinaryCubic::new(
            BiSeries::constant(self.a.clone()),
            BiSeries::constant(self.b.clone()),
            BiSeries::constant(self.c.clone()),
            BiSeries::constant(self.e.clone()),
        )
    }

    /// Discriminant of the binary cubic; zero iff f has a repeated
    /// projective root. For f = a X^3 + c X^2 Y + e X Y^2 + b Y^3:
    /// 18abce - 4c^3 b + c^2 e^2 - 4a e^3 - 27 a^2 b^2.
    pub fn cubic_discriminant(&self) -> GaussianRational {
        let (a, b, c, e) = (&self.a, &self.b, &self.c, &self.e);
        let g = GaussianRational::from_int;
        &(&(&(&(&g(18) * &(&(a * c) * &(e * b))) - &(&g(4) * &(&(c * c) * &(c * b))))
            + &(&(c * c) * &(e * e)))
            - &(&g(4) * &(a * &(&(e * e) * e))))
            - &(&g(27) * &(&(a * a) * &(b * b)))
    }

    /// Orbit of a nonzero cubic under GL(V): degenerate cubics form the
    /// Veronese cone; among nondegenerate ones the discriminant separates
    /// the three-distinct-roots orbit from the double-root orbit.
    pub fn classify_orbit(&self) -> Result<Orbit> {
        if self.is_degenerate()? {
            return Ok(Orbit::Degenerate);
        }
        if self.cubic_discriminant().is_zero() {
            Ok(Orbit::NodalOrbit)
        } else {
            Ok(Orbit::SmoothOrbit)
        }
    }

    /// Gradients of the Pluecker coordinates (p, q, r) in (a, b, c, e).
    pub fn chi_jacobian(&self) -> [[GaussianRational; 4]; 3] {
        let g = GaussianRational::from_int;
        let (a, b, c, e) = (&self.a, &self.b, &self.c, &self.e);
        [
            [&g(9) * b, &g(9) * a, -e, -c],
            [&g(6) * e, GaussianRational::zero(), &g(-4) * c, &g(6) * a],
            [GaussianRational::zero(), &g(-6) * c, &g(-6) * b, &g(4) * e],
        ]
    }
}

impl SeriesCubic {
    /// Matrix of alpha^f in the bases (d/dX, d/dY) of V and (X^2, XY, Y^2)
    /// of Sym2 V*: columns are alpha^f(d/dX) and alpha^f(d/dY).
    pub fn alpha_matrix(&self) -> SeriesMatrix {
        let dx = self.diff_x();
        let dy = self.diff_y();
        SeriesMatrix::from_rows(vec![
            vec![dx.qxx, dy.qxx],
            vec![dx.qxy, dy.qxy],
            vec![dx.qyy, dy.qyy],
        ])
    }

    pub fn at_origin(&self) -> ScalarCubic {
        BinaryCubic::new(
            self.a.constant_term(),
            self.b.constant_term(),
            self.c.constant_term(),
            self.e.constant_term(),
        )
    }

    /// Nondegeneracy of the value at the base point.
    pub fn is_nondegenerate_at_origin(&self) -> bool {
        let f0 = self.at_origin();
        !f0.is_zero() && !f0.is_degenerate().unwrap_or(true)
    }

    pub fn truncate(&self, order: usize) -> Self {
        BinaryCubic::new(
            self.a.truncate(order),
            self.b.truncate(order),
            self.c.truncate(order),
            self.e.truncate(order),
        )
    }
}

/// Invertible scalar 2x2 matrix acting on V* by substitution of (X, Y).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GL2 {
    pub entries: [[GaussianRational; 2]; 2],
}

impl GL2 {
    pub fn new(entries: [[GaussianRational; 2]; 2]) -> Result<Self> {
        let g = GL2 { entries };
        if g.det().is_zero() {
            return Err(Error::SingularGroupElement);
        }
        Ok(g)
    }

    pub fn from_ints(m: [[i64; 2]; 2]) -> Result<Self> {
        Self::new(m.map(|row| row.map(GaussianRational::from_int)))
    }

    pub fn identity() -> Self {
        Self::from_ints([[1, 0], [0, 1]]).unwrap()
    }

    pub fn det(&self) -> GaussianRational {
        let m = &self.entries;
        &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0])
    }
}

/// Substitution action on cubics: (g.f)(X, Y) = f(pX + qY, rX + sY) where
/// g = [[p, q], [r, s]].
pub fn gl2_act<R: Coeff>(g: &GL2, f: &BinaryCubic<R>) -> Result<BinaryCubic<R>> {
    if g.det().is_zero() {
        return Err(Error::SingularGroupElement);
    }
    let p = R::from_scalar(&g.entries[0][0]);
    let q = R::from_scalar(&g.entries[0][1]);
    let r = R::from_scalar(&g.entries[1][0]);
    let s = R::from_scalar(&g.entries[1][1]);
    let three = R::from_int(3);
    let two = R::from_int(2);

    let p2 = p.mul(&p);
    let q2 = q.mul(&q);
    let r2 = r.mul(&r);
    let s2 = s.mul(&s);

    // expansions of L1^3, L2^3, L1^2 L2, L1 L2^2 with L1 = pX+qY, L2 = rX+sY
    let a = self_sum(&[
        f.a.mul(&p2.mul(&p)),
        f.b.mul(&r2.mul(&r)),
        f.c.mul(&p2.mul(&r)),
        f.e.mul(&p.mul(&r2)),
    ]);
    let b = self_sum(&[
        f.a.mul(&q2.mul(&q)),
        f.b.mul(&s2.mul(&s)),
        f.c.mul(&q2.mul(&s)),
        f.e.mul(&q.mul(&s2)),
    ]);
    let c = self_sum(&[
        f.a.mul(&three.mul(&p2.mul(&q))),
        f.b.mul(&three.mul(&r2.mul(&s))),
        f.c.mul(&p2.mul(&s).add(&two.mul(&p.mul(&q.mul(&r))))),
        f.e.mul(&two.mul(&p.mul(&r.mul(&s))).add(&q.mul(&r2))),
    ]);
    let e = self_sum(&[
        f.a.mul(&three.mul(&p.mul(&q2))),
        f.b.mul(&three.mul(&r.mul(&s2))),
        f.c.mul(&two.mul(&p.mul(&q.mul(&s))).add(&q2.mul(&r))),
        f.e.mul(&p.mul(&s2).add(&two.mul(&q.mul(&r.mul(&s))))),
    ]);
    Ok(BinaryCubic::new(a, b, c, e))
}

fn self_sum<R: Coeff>(terms: &[R]) -> R {
    terms.iter().fold(R::zero(), |acc, t| acc.add(t))
}

/// Induced action of g on the Pluecker basis (X^2^Y^2, X^2^XY, Y^2^XY):
/// the 3x3 matrix of wedge-squared substitution on quadratics. Used to
/// state the equivariance of chi_hat.
pub fn wedge_action(g: &GL2) -> [[GaussianRational; 3]; 3] {
    // substitution matrix on (X^2, XY, Y^2)
    let m = &g.entries;
    let (p, q, r, s) = (&m[0][0], &m[0][1], &m[1][0], &m[1][1]);
    let two = GaussianRational::from_int(2);
    // columns: images of X^2, XY, Y^2
    let sub = [
        [p * p, p * r, r * r],
        [&two * &(p * q), &(p * s) + &(q * r), &two * &(r * s)],
        [q * q, q * s, s * s],
    ];
    // basis pairs in Pluecker order: (X^2,Y^2), (X^2,XY), (Y^2,XY)
    let pairs = [(0usize, 2usize), (0, 1), (2, 1)];
    let mut out = [
        [GaussianRational::zero(), GaussianRational::zero(), GaussianRational::zero()],
        [GaussianRational::zero(), GaussianRational::zero(), GaussianRational::zero()],
        [GaussianRational::zero(), GaussianRational::zero(), GaussianRational::zero()],
    ];
    for (col, &(i, j)) in pairs.iter().enumerate() {
        // wedge of the images of basis quadratics i and j
        for (row, &(k, l)) in pairs.iter().enumerate() {
            let v = &(&sub[k][i] * &sub[l][j]) - &(&sub[l][i] * &sub[k][j]);
            out[row][col] = v;
        }
    }
    out
}

/// A 2-plane in Sym2 V* given by an ordered basis, with its Pluecker triple.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPlane<R> {
    pub span: [BinaryQuadratic<R>; 2],
    pub pluecker: (R, R, R),
}

impl<R: Coeff> TwoPlane<R> {
    pub fn new(q1: BinaryQuadratic<R>, q2: BinaryQuadratic<R>) -> Result<Self> {
        let p = q1.qxx.mul(&q2.qyy).sub(&q1.qyy.mul(&q2.qxx));
        let q = q1.qxx.mul(&q2.qxy).sub(&q1.qxy.mul(&q2.qxx));
        let r = q1.qyy.mul(&q2.qxy).sub(&q1.qxy.mul(&q2.qyy));
        if !p.is_unit() && !q.is_unit() && !r.is_unit() {
            return Err(Error::RankDeficientAtOrigin);
        }
        Ok(TwoPlane { span: [q1, q2], pluecker: (p, q, r) })
    }
}

/// Deterministic free-parameter pairs tried by the fiber constructions.
pub const PARAMETER_CANDIDATES: [(i64, i64); 14] = [
    (1, 0),
    (0, 1),
    (1, 1),
    (1, -1),
    (2, 1),
    (1, 2),
    (2, -1),
    (1, -2),
    (3, 1),
    (1, 3),
    (3, -1),
    (1, -3),
    (3, 2),
    (2, 3),
];

/// The rank-2 solution module of the fiber condition over a 2-plane with
/// Pluecker triple (p, q, r): cubics f with both partials inside the plane.
/// In coordinates (a, b, c, e) the two linear conditions are
///   -3r a - 2p c + q e = 0   and   3q b - r c - 2p e = 0.
pub struct FiberModule {
    /// Basis of the solution module: cubic for free parameters (1,0), (0,1).
    pub basis: [SeriesCubic; 2],
}

impl FiberModule {
    pub fn from_pluecker(p: &BiSeries, q: &BiSeries, r: &BiSeries) -> Result<Self> {
        let g = |n: i64| BiSeries::constant(GaussianRational::from_int(n));
        // rows of the 2x4 system in variables (a, b, c, e)
        let m = SeriesMatrix::from_rows(vec![
            vec![&g(-3) * r, g(0), &g(-2) * p, q.clone()],
            vec![g(0), &g(3) * q, -r, &g(-2) * p],
        ]);
        // find a pivot column pair whose 2x2 minor is a unit at the origin
        let mut pivots = None;
        'outer: for j1 in 0..4 {
            for j2 in (j1 + 1)..4 {
                let det = &(m.get(0, j1) * m.get(1, j2)) - &(m.get(0, j2) * m.get(1, j1));
                if det.is_unit() {
                    pivots = Some((j1, j2));
                    break 'outer;
                }
            }
        }
        let (j1, j2) = pivots.ok_or(Error::SolutionSpaceNotRank2)?;
        let free: Vec<usize> = (0..4).filter(|j| *j != j1 && *j != j2).collect();
        let pivot_block = SeriesMatrix::from_rows(vec![
            vec![m.get(0, j1).clone(), m.get(0, j2).clone()],
            vec![m.get(1, j1).clone(), m.get(1, j2).clone()],
        ]);
        let mut basis = Vec::with_capacity(2);
        for &jf in &free {
            let rhs = SeriesMatrix::from_rows(vec![
                vec![-m.get(0, jf)],
                vec![-m.get(1, jf)],
            ]);
            let sol = SeriesMatrix::linear_solve(&pivot_block, &rhs)?;
            let mut coords = vec![BiSeries::zero(ORDER_INF); 4];
            coords[jf] = BiSeries::one();
            coords[j1] = sol.get(0, 0).clone();
            coords[j2] = sol.get(1, 0).clone();
            basis.push(BinaryCubic::new(
                coords[0].clone(),
                coords[1].clone(),
                coords[2].clone(),
                coords[3].clone(),
            ));
        }
        Ok(FiberModule { basis: [basis[0].clone(), basis[1].clone()] })
    }

    /// Cubic for the free-parameter pair (s, t).
    pub fn element(&self, s: i64, t: i64) -> SeriesCubic {
        let s = BiSeries::constant(GaussianRational::from_int(s));
        let t = BiSeries::constant(GaussianRational::from_int(t));
        self.basis[0].scale(&s).add(&self.basis[1].scale(&t))
    }
}

/// Two linearly independent nondegenerate cubics in the fiber of chi over
/// the plane, drawn from the deterministic parameter list.
pub fn fiber_basis_series(
    p: &BiSeries,
    q: &BiSeries,
    r: &BiSeries,
) -> Result<(SeriesCubic, SeriesCubic)> {
    let module = FiberModule::from_pluecker(p, q, r)?;
    let mut found: Vec<((i64, i64), SeriesCubic)> = Vec::new();
    for &(s, t) in PARAMETER_CANDIDATES.iter() {
        let f = module.element(s, t);
        if !f.is_nondegenerate_at_origin() {
            continue;
        }
        if let Some(((s0, t0), _)) = found.first() {
            if s0 * t - t0 * s == 0 {
                continue; // proportional parameters give proportional cubics
            }
        }
        found.push(((s, t), f));
        if found.len() == 2 {
            let mut it = found.into_iter();
            return Ok((it.next().unwrap().1, it.next().unwrap().1));
        }
    }
    Err(Error::DegenerateFiber)
}

/// Scalar fiber basis over a constant 2-plane.
pub fn fiber_basis(plane: &TwoPlane<GaussianRational>) -> Result<(ScalarCubic, ScalarCubic)> {
    let (p, q, r) = &plane.pluecker;
    let (f, ft) = fiber_basis_series(
        &BiSeries::constant(p.clone()),
        &BiSeries::constant(q.clone()),
        &BiSeries::constant(r.clone()),
    )?;
    Ok((f.at_origin(), ft.at_origin()))
}

/// The unique tangent map xi with alpha^f o xi = phi, where phi is the
/// 3x2 matrix of a homomorphism W -> Sym2 V* in quadratic coordinates.
pub fn xi_of(f: &SeriesCubic, phi: &SeriesMatrix) -> Result<SeriesMatrix> {
    SeriesMatrix::linear_solve(&f.alpha_matrix(), phi)
}

/// Scalar wrapper around [`xi_of`].
pub fn xi_of_scalar(
    f: &ScalarCubic,
    phi: &[[GaussianRational; 2]; 3],
) -> Result<[[GaussianRational; 2]; 2]> {
    let phi_m = SeriesMatrix::from_rows(
        phi.iter()
            .map(|row| row.iter().map(|c| BiSeries::constant(c.clone())).collect())
            .collect(),
    );
    let xi = xi_of(&f.to_series(), &phi_m)?;
    Ok([
        [xi.get(0, 0).constant_term(), xi.get(0, 1).constant_term()],
        [xi.get(1, 0).constant_term(), xi.get(1, 1).constant_term()],
    ])
}

/// The unique (b, btilde) with xi^{b f + bt ft} = a xi^f + at xi^{ft},
/// solved as the six-equation linear system
/// b alpha^f(M w_k) + bt alpha^{ft}(M w_k) = phi(w_k), M = a xi^f + at xi^{ft}.
pub fn combine_xi(
    f: &SeriesCubic,
    ftilde: &SeriesCubic,
    a: &BiSeries,
    atilde: &BiSeries,
    phi: &SeriesMatrix,
) -> Result<(BiSeries, BiSeries)> {
    let xi_f = xi_of(f, phi)?;
    let xi_ft = xi_of(ftilde, phi)?;
    let m = xi_f.scale_series(a).add(&xi_ft.scale_series(atilde));
    if !m.det2().is_unit() {
        return Err(Error::NotAnIsomorphism);
    }
    let lhs_f = f.alpha_matrix().mul(&m); // 3x2
    let lhs_ft = ftilde.alpha_matrix().mul(&m);
    let mut rows = Vec::with_capacity(6);
    let mut rhs = Vec::with_capacity(6);
    for k in 0..2 {
        for coord in 0..3 {
            rows.push(vec![lhs_f.get(coord, k).clone(), lhs_ft.get(coord, k).clone()]);
            rhs.push(vec![phi.get(coord, k).clone()]);
        }
    }
    let sol = SeriesMatrix::linear_solve(
        &SeriesMatrix::from_rows(rows),
        &SeriesMatrix::from_rows(rhs),
    )?;
    Ok((sol.get(0, 0).clone(), sol.get(1, 0).clone()))
}

/// Scalar wrapper around [`combine_xi`].
pub fn combine_xi_scalar(
    f: &ScalarCubic,
    ftilde: &ScalarCubic,
    a: &GaussianRational,
    atilde: &GaussianRational,
    phi: &[[GaussianRational; 2]; 3],
) -> Result<(GaussianRational, GaussianRational)> {
    let phi_m = SeriesMatrix::from_rows(
        phi.iter()
            .map(|row| row.iter().map(|c| BiSeries::constant(c.clone())).collect())
            .collect(),
    );
    let (b, bt) = combine_xi(
        &f.to_series(),
        &ftilde.to_series(),
        &BiSeries::constant(a.clone()),
        &BiSeries::constant(atilde.clone()),
        &phi_m,
    )?;
    Ok((b.constant_term(), bt.constant_term()))
}

/// The zeta construction for a degenerate cubic: given phi of rank 1 whose
/// image line is kappa(f) and which kills exactly one column direction,
/// produce two independent tangent maps zeta, zetatilde with
/// alpha^f(zeta(w)) = phi(w) = alpha^f(zetatilde(w)).
///
/// The returned matrices use the same column convention as phi. In the
/// column killed by phi they carry v1 (resp. 2 v1) spanning Ker alpha^f;
/// in the other column both carry c v2 with c alpha^f(v2) = phi there.
pub fn zeta_pair(
    f: &SeriesCubic,
    phi: &SeriesMatrix,
) -> Result<(SeriesMatrix, SeriesMatrix)> {
    if f.is_zero() || !f.is_degenerate()? {
        return Err(Error::NotDegenerate);
    }
    if phi.rows() != 3 || phi.cols() != 2 {
        return Err(Error::DimensionMismatch("phi must be 3x2".into()));
    }
    let col_is_zero = |k: usize| (0..3).all(|r| phi.get(r, k).is_zero());
    let k_zero = match (col_is_zero(0), col_is_zero(1)) {
        (true, false) => 0usize,
        (false, true) => 1usize,
        _ => return Err(Error::RankMismatch),
    };
    let k_img = 1 - k_zero;

    // v1 spans Ker alpha^f. For f = s (lam X + mu Y)^3 the kernel direction
    // is (mu, -lam); recovered from the coefficients via whichever of a, b
    // is a unit, then normalized so its first unit coordinate is 1.
    let three = BiSeries::constant(GaussianRational::from_int(3));
    let raw_v1: [BiSeries; 2] = if f.a.is_unit() {
        [f.c.clone(), -&(&three * &f.a)]
    } else if f.b.is_unit() {
        [&three * &f.b, -&f.e]
    } else {
        return Err(Error::RankMismatch); // f vanishes at the origin
    };
    let lead = if raw_v1[0].is_unit() { &raw_v1[0] } else { &raw_v1[1] };
    let inv = lead.invert()?;
    let v1 = [&raw_v1[0] * &inv, &raw_v1[1] * &inv];

    // complement direction
    let v2: [BiSeries; 2] = if v1[0].is_unit() {
        [BiSeries::zero(ORDER_INF), BiSeries::one()]
    } else {
        [BiSeries::one(), BiSeries::zero(ORDER_INF)]
    };

    // c alpha^f(v2) = phi(. , k_img), solved on a unit coordinate and
    // checked on the rest
    let img = f.alpha_apply(&v2);
    let img_coords = [img.qxx.clone(), img.qxy.clone(), img.qyy.clone()];
    let lead_idx = img_coords
        .iter()
        .position(|c| c.is_unit())
        .ok_or(Error::RankMismatch)?;
    let c = phi.get(lead_idx, k_img) * &img_coords[lead_idx].invert()?;
    for (idx, coord) in img_coords.iter().enumerate() {
        if &c * coord != *phi.get(idx, k_img) {
            return Err(Error::WrongKappaImage);
        }
    }

    let cv2 = [&v2[0] * &c, &v2[1] * &c];
    let two = BiSeries::constant(GaussianRational::from_int(2));
    let mut zeta = SeriesMatrix::zero(2, 2, ORDER_INF);
    let mut zeta_t = SeriesMatrix::zero(2, 2, ORDER_INF);
    for row in 0..2 {
        *zeta.get_mut(row, k_zero) = v1[row].clone();
        *zeta_t.get_mut(row, k_zero) = &two * &v1[row];
        *zeta.get_mut(row, k_img) = cv2[row].clone();
        *zeta_t.get_mut(row, k_img) = cv2[row].clone();
    }
    Ok((zeta, zeta_t))
}
