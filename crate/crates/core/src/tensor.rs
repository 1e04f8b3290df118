//! Small 2D surface tensors.
//!
//! Symmetric second-order tensors are stored as triples `(11, 22, 12)`; the
//! off-diagonal entry appears twice in every full contraction, which is the
//! only place the factor 2 is applied (`Sym2::dot`, `T4::contract`). Rank-4
//! tensors are dense `2×2×2×2` arrays with no assumed major symmetry.
//!
//! Everything is generic over [`Real`] so the same constitutive code runs on
//! plain `f64` and on first-order [`Jet`]s in the thickness coordinate.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

pub trait Real:
    Copy
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
{
    fn cst(v: f64) -> Self;
    fn val(self) -> f64;
    fn exp(self) -> Self;
    fn sqrt(self) -> Self;
    fn scale(self, k: f64) -> Self {
        self * Self::cst(k)
    }
    fn zero() -> Self {
        Self::cst(0.0)
    }
}

impl Real for f64 {
    fn cst(v: f64) -> Self {
        v
    }
    fn val(self) -> f64 {
        self
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
}

/// Value and first derivative with respect to one parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub d: f64,
}

impl Jet {
    pub fn new(v: f64, d: f64) -> Self {
        Jet { v, d }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet::new(self.v + o.v, self.d + o.d)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        Jet::new(self.v - o.v, self.d - o.d)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet::new(self.v * o.v, self.v * o.d + self.d * o.v)
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, o: Jet) -> Jet {
        let q = self.v / o.v;
        Jet::new(q, (self.d - q * o.d) / o.v)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet::new(-self.v, -self.d)
    }
}

impl AddAssign for Jet {
    fn add_assign(&mut self, o: Jet) {
        self.v += o.v;
        self.d += o.d;
    }
}

impl Real for Jet {
    fn cst(v: f64) -> Self {
        Jet::new(v, 0.0)
    }
    fn val(self) -> f64 {
        self.v
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        Jet::new(e, self.d * e)
    }
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        Jet::new(s, 0.5 * self.d / s)
    }
}

/// Symmetric 2×2 tensor stored as `[11, 22, 12]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sym2<S = f64>(pub [S; 3]);

/// Voigt slot of the index pair `(i, j)`.
#[inline]
pub fn voigt(i: usize, j: usize) -> usize {
    if i == j {
        i
    } else {
        2
    }
}

/// Index pairs of the three Voigt slots.
pub const VOIGT_PAIRS: [(usize, usize); 3] = [(0, 0), (1, 1), (0, 1)];

impl<S: Real> Sym2<S> {
    pub fn new(s11: S, s22: S, s12: S) -> Self {
        Sym2([s11, s22, s12])
    }
    pub fn zero() -> Self {
        Sym2([S::zero(); 3])
    }
    pub fn identity() -> Self {
        Sym2([S::cst(1.0), S::cst(1.0), S::zero()])
    }
    pub fn from_fn(mut f: impl FnMut(usize, usize) -> S) -> Self {
        Sym2([f(0, 0), f(1, 1), f(0, 1)])
    }
    #[inline]
    pub fn at(&self, i: usize, j: usize) -> S {
        self.0[voigt(i, j)]
    }
    pub fn det(&self) -> S {
        self.0[0] * self.0[1] - self.0[2] * self.0[2]
    }
    pub fn inverse(&self) -> Self {
        let d = self.det();
        Sym2([self.0[1] / d, self.0[0] / d, -self.0[2] / d])
    }
    /// Full contraction `X^αβ Y_αβ`.
    pub fn dot(&self, o: &Self) -> S {
        self.0[0] * o.0[0] + self.0[1] * o.0[1] + S::cst(2.0) * self.0[2] * o.0[2]
    }
    pub fn scale(&self, k: S) -> Self {
        Sym2([self.0[0] * k, self.0[1] * k, self.0[2] * k])
    }
    pub fn map(&self, f: impl Fn(S) -> S) -> Self {
        Sym2([f(self.0[0]), f(self.0[1]), f(self.0[2])])
    }
    /// `X Y Z` as 2×2 products, symmetric when `X = Zᵀ` and `Y` symmetric.
    pub fn sandwich(x: &Self, y: &Self, z: &Self) -> Self {
        Sym2::from_fn(|i, j| {
            let mut s = S::zero();
            for k in 0..2 {
                for l in 0..2 {
                    s += x.at(i, k) * y.at(k, l) * z.at(l, j);
                }
            }
            s
        })
    }
    pub fn norm(&self) -> f64 {
        let v: Vec<f64> = self.0.iter().map(|x| x.val()).collect();
        (v[0] * v[0] + v[1] * v[1] + 2.0 * v[2] * v[2]).sqrt()
    }
}

impl<S: Real> Add for Sym2<S> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Sym2([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl<S: Real> Sub for Sym2<S> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Sym2([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl<S: Real> Neg for Sym2<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Sym2([-self.0[0], -self.0[1], -self.0[2]])
    }
}

impl<S: Real> AddAssign for Sym2<S> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sym2<Jet> {
    pub fn value(&self) -> Sym2 {
        Sym2(self.0.map(|j| j.v))
    }
    pub fn slope(&self) -> Sym2 {
        Sym2(self.0.map(|j| j.d))
    }
    pub fn jet(v: &Sym2, d: &Sym2) -> Self {
        Sym2([0, 1, 2].map(|k| Jet::new(v.0[k], d.0[k])))
    }
}

/// General 2×2 matrix, used for mixed tensors such as `b^α_β`.
pub type Mat2 = [[f64; 2]; 2];

/// Dense rank-4 tensor `T^{ijkl}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct T4<S = f64>(pub [S; 16]);

#[inline]
fn idx(i: usize, j: usize, k: usize, l: usize) -> usize {
    ((i * 2 + j) * 2 + k) * 2 + l
}

impl<S: Real> T4<S> {
    pub fn zero() -> Self {
        T4([S::zero(); 16])
    }
    pub fn from_fn(mut f: impl FnMut(usize, usize, usize, usize) -> S) -> Self {
        let mut t = [S::zero(); 16];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        t[idx(i, j, k, l)] = f(i, j, k, l);
                    }
                }
            }
        }
        T4(t)
    }
    #[inline]
    pub fn at(&self, i: usize, j: usize, k: usize, l: usize) -> S {
        self.0[idx(i, j, k, l)]
    }
    /// `X^ij Y^kl`.
    pub fn outer(x: &Sym2<S>, y: &Sym2<S>) -> Self {
        T4::from_fn(|i, j, k, l| x.at(i, j) * y.at(k, l))
    }
    /// `½ (X^ik Y^jl + X^il Y^jk)`.
    pub fn sym_prod(x: &Sym2<S>, y: &Sym2<S>) -> Self {
        T4::from_fn(|i, j, k, l| S::cst(0.5) * (x.at(i, k) * y.at(j, l) + x.at(i, l) * y.at(j, k)))
    }
    pub fn scale(&self, k: S) -> Self {
        T4(self.0.map(|x| x * k))
    }
    /// `T^{ijkl} X_kl` over all four `kl` combinations.
    pub fn contract(&self, x: &Sym2<S>) -> Sym2<S> {
        Sym2::from_fn(|i, j| {
            let mut s = S::zero();
            for k in 0..2 {
                for l in 0..2 {
                    s += self.at(i, j, k, l) * x.at(k, l);
                }
            }
            s
        })
    }
    pub fn transpose(&self) -> Self {
        T4::from_fn(|i, j, k, l| self.at(k, l, i, j))
    }
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x.val() * x.val()).sum::<f64>().sqrt()
    }
}

impl<S: Real> Add for T4<S> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut t = self.0;
        for (a, b) in t.iter_mut().zip(o.0.iter()) {
            *a += *b;
        }
        T4(t)
    }
}

impl<S: Real> Sub for T4<S> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + o.scale(S::cst(-1.0))
    }
}

impl<S: Real> Neg for T4<S> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(S::cst(-1.0))
    }
}

impl<S: Real> AddAssign for T4<S> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl T4<Jet> {
    pub fn value(&self) -> T4 {
        T4(self.0.map(|j| j.v))
    }
    pub fn slope(&self) -> T4 {
        T4(self.0.map(|j| j.d))
    }
}

impl Mul<f64> for Sym2 {
    type Output = Sym2;
    fn mul(self, k: f64) -> Sym2 {
        self.scale(k)
    }
}

impl Mul<f64> for T4 {
    type Output = T4;
    fn mul(self, k: f64) -> T4 {
        self.scale(k)
    }
}
