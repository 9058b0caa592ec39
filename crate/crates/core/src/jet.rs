//! Truncated bivariate Taylor jets in `(r, theta)`.
//!
//! A [`Jet`] carries a value together with every partial derivative up to a
//! declared order (at most [`MAX_ORDER`]). Arithmetic on jets is exact
//! forward-mode differentiation: composing catalog formulas out of jets yields
//! the derivatives to machine precision, and every downstream quantity
//! (metric components, Christoffel symbols, curvature, spin coefficients) is
//! carried as a jet so that frame derivatives of it are available without
//! finite differencing.
//!
//! Coefficients are stored as Taylor coefficients `c_ij` of `dr^i dtheta^j`,
//! so the partial derivative `d^(i+j) f / dr^i dtheta^j` equals `i! j! c_ij`.

use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_ORDER: u8 = 3;
const NCOEF: usize = 10;

/// `(i, j)` exponents of each stored coefficient, graded by total degree.
const POWERS: [(usize, usize); NCOEF] = [
    (0, 0),
    (1, 0),
    (0, 1),
    (2, 0),
    (1, 1),
    (0, 2),
    (3, 0),
    (2, 1),
    (1, 2),
    (0, 3),
];

/// Number of coefficients present at each truncation order.
const NCOEF_AT: [usize; 4] = [1, 3, 6, 10];

/// Number of product-table entries whose output degree is at most the order.
const MUL_END: [usize; 4] = [1, 5, 15, 35];

const fn idx(i: usize, j: usize) -> usize {
    let n = i + j;
    n * (n + 1) / 2 + j
}

const fn build_mul_table() -> [(u8, u8, u8); 35] {
    let mut t = [(0u8, 0u8, 0u8); 35];
    let mut n = 0;
    let mut deg = 0;
    while deg <= 3 {
        let mut a = 0;
        while a < NCOEF {
            let mut b = 0;
            while b < NCOEF {
                let (ia, ja) = POWERS[a];
                let (ib, jb) = POWERS[b];
                if ia + ja + ib + jb == deg {
                    t[n] = (a as u8, b as u8, idx(ia + ib, ja + jb) as u8);
                    n += 1;
                }
                b += 1;
            }
            a += 1;
        }
        deg += 1;
    }
    t
}

const MUL_TABLE: [(u8, u8, u8); 35] = build_mul_table();

fn factorial(n: usize) -> f64 {
    [1.0, 1.0, 2.0, 6.0][n]
}

/// Value and partial derivatives of a scalar function of `(r, theta)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    c: [f64; NCOEF],
    order: u8,
}

/// The jet type exposed by scalar fields.
pub type ScalarJet = Jet;

impl Default for Jet {
    fn default() -> Self {
        Jet::constant(0.0)
    }
}

impl Jet {
    /// An exact constant (carries the maximal order).
    pub fn constant(v: f64) -> Self {
        Self::constant_with_order(v, MAX_ORDER)
    }

    pub fn constant_with_order(v: f64, order: u8) -> Self {
        let mut c = [0.0; NCOEF];
        c[0] = v;
        Jet { c, order: order.min(MAX_ORDER) }
    }

    pub fn zero(order: u8) -> Self {
        Self::constant_with_order(0.0, order)
    }

    /// The coordinate function `r` expanded at `r0`.
    pub fn var_r(r0: f64, order: u8) -> Self {
        let mut j = Self::constant_with_order(r0, order);
        if j.order >= 1 {
            j.c[1] = 1.0;
        }
        j
    }

    /// The coordinate function `theta` expanded at `theta0`.
    pub fn var_theta(theta0: f64, order: u8) -> Self {
        let mut j = Self::constant_with_order(theta0, order);
        if j.order >= 1 {
            j.c[2] = 1.0;
        }
        j
    }

    /// Build a jet from partial derivatives listed in graded order:
    /// `f, f_r, f_theta, f_rr, f_rtheta, f_thetatheta, f_rrr, f_rrtheta, f_rthetatheta, f_thetathetatheta`.
    /// The slice length fixes the order (1, 3, 6 or 10 entries).
    pub fn from_partials(partials: &[f64]) -> Result<Self> {
        let order = match partials.len() {
            1 => 0,
            3 => 1,
            6 => 2,
            10 => 3,
            n => {
                return Err(Error::BadParams(format!(
                    "jet needs 1, 3, 6 or 10 partials, got {n}"
                )))
            }
        };
        let mut c = [0.0; NCOEF];
        for (k, &p) in partials.iter().enumerate() {
            let (i, j) = POWERS[k];
            c[k] = p / (factorial(i) * factorial(j));
        }
        Ok(Jet { c, order })
    }

    /// Jet of a function of `r` alone, from `f, f', f'', f'''` (as many as the order needs).
    pub fn from_r_derivatives(derivs: &[f64], order: u8) -> Self {
        let order = order.min(MAX_ORDER).min(derivs.len().saturating_sub(1) as u8);
        let mut c = [0.0; NCOEF];
        for i in 0..=order as usize {
            c[idx(i, 0)] = derivs[i] / factorial(i);
        }
        Jet { c, order }
    }

    /// Jet of a function of `theta` alone.
    pub fn from_theta_derivatives(derivs: &[f64], order: u8) -> Self {
        let order = order.min(MAX_ORDER).min(derivs.len().saturating_sub(1) as u8);
        let mut c = [0.0; NCOEF];
        for j in 0..=order as usize {
            c[idx(0, j)] = derivs[j] / factorial(j);
        }
        Jet { c, order }
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.c[0]
    }

    #[inline]
    pub fn order(&self) -> u8 {
        self.order
    }

    /// `d^(i+j) f / dr^i dtheta^j`; asking beyond the jet's order is an error.
    pub fn partial(&self, i: usize, j: usize) -> Result<f64> {
        let n = i + j;
        if n > self.order as usize {
            return Err(Error::JetOrder {
                requested: n as u8,
                available: self.order,
            });
        }
        Ok(self.c[idx(i, j)] * factorial(i) * factorial(j))
    }

    pub fn d_r(&self) -> Result<f64> {
        self.partial(1, 0)
    }
    pub fn d_theta(&self) -> Result<f64> {
        self.partial(0, 1)
    }
    pub fn d_rr(&self) -> Result<f64> {
        self.partial(2, 0)
    }
    pub fn d_rtheta(&self) -> Result<f64> {
        self.partial(1, 1)
    }
    pub fn d_thetatheta(&self) -> Result<f64> {
        self.partial(0, 2)
    }
    pub fn d_rrr(&self) -> Result<f64> {
        self.partial(3, 0)
    }

    /// Drop every coefficient above `order`.
    pub fn truncate(&self, order: u8) -> Self {
        let order = order.min(self.order);
        let mut c = self.c;
        for v in c.iter_mut().skip(NCOEF_AT[order as usize]) {
            *v = 0.0;
        }
        Jet { c, order }
    }

    /// Partial derivative along coordinate `axis` of `(t, r, theta)`.
    ///
    /// Every field in this crate is independent of `t`, so axis 0 gives zero.
    pub fn diff(&self, axis: usize) -> Result<Self> {
        if self.order == 0 {
            return Err(Error::JetOrder {
                requested: 1,
                available: 0,
            });
        }
        let order = self.order - 1;
        let mut c = [0.0; NCOEF];
        match axis {
            0 => {}
            1 => {
                for k in 0..NCOEF_AT[order as usize] {
                    let (i, j) = POWERS[k];
                    c[k] = (i + 1) as f64 * self.c[idx(i + 1, j)];
                }
            }
            2 => {
                for k in 0..NCOEF_AT[order as usize] {
                    let (i, j) = POWERS[k];
                    c[k] = (j + 1) as f64 * self.c[idx(i, j + 1)];
                }
            }
            _ => panic!("axis {axis} out of range"),
        }
        Ok(Jet { c, order })
    }

    pub fn dr(&self) -> Result<Self> {
        self.diff(1)
    }

    pub fn dtheta(&self) -> Result<Self> {
        self.diff(2)
    }

    /// `f(self)` given `f(a), f'(a), f''(a), f'''(a)` at `a = self.value()`.
    pub fn compose(&self, d: [f64; 4]) -> Self {
        let mut u = *self;
        u.c[0] = 0.0;
        let mut out = Jet::constant_with_order(d[0], self.order);
        if self.order == 0 {
            return out;
        }
        let u2 = u * u;
        let u3 = u2 * u;
        for k in 1..NCOEF {
            out.c[k] = d[1] * u.c[k] + 0.5 * d[2] * u2.c[k] + d[3] / 6.0 * u3.c[k];
        }
        out
    }

    pub fn recip(&self) -> Self {
        let a = self.value();
        let i = 1.0 / a;
        self.compose([i, -i * i, 2.0 * i * i * i, -6.0 * i * i * i * i])
    }

    pub fn sqr(&self) -> Self {
        *self * *self
    }

    pub fn powi(&self, n: i32) -> Self {
        let a = self.value();
        let nf = n as f64;
        self.compose([
            a.powi(n),
            nf * a.powi(n - 1),
            nf * (nf - 1.0) * a.powi(n - 2),
            nf * (nf - 1.0) * (nf - 2.0) * a.powi(n - 3),
        ])
    }

    pub fn sqrt(&self) -> Self {
        let a = self.value();
        let s = a.sqrt();
        self.compose([s, 0.5 / s, -0.25 / (s * a), 0.375 / (s * a * a)])
    }

    pub fn exp(&self) -> Self {
        let e = self.value().exp();
        self.compose([e, e, e, e])
    }

    pub fn ln(&self) -> Self {
        let a = self.value();
        self.compose([a.ln(), 1.0 / a, -1.0 / (a * a), 2.0 / (a * a * a)])
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.value().sin_cos();
        self.compose([s, c, -s, -c])
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.value().sin_cos();
        self.compose([c, -s, -c, s])
    }

    pub fn tan(&self) -> Self {
        let t = self.value().tan();
        let sec2 = 1.0 + t * t;
        self.compose([t, sec2, 2.0 * t * sec2, 2.0 * sec2 * (1.0 + 3.0 * t * t)])
    }

    pub fn sinh(&self) -> Self {
        let a = self.value();
        let (s, c) = (a.sinh(), a.cosh());
        self.compose([s, c, s, c])
    }

    pub fn cosh(&self) -> Self {
        let a = self.value();
        let (s, c) = (a.sinh(), a.cosh());
        self.compose([c, s, c, s])
    }

    pub fn tanh(&self) -> Self {
        let t = self.value().tanh();
        let s = 1.0 - t * t;
        self.compose([t, s, -2.0 * t * s, s * (6.0 * t * t - 2.0)])
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|v| v.is_finite())
    }

    /// Largest absolute coefficient, used for residual reporting.
    pub fn max_abs(&self) -> f64 {
        self.c[..NCOEF_AT[self.order as usize]]
            .iter()
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        let order = self.order.min(o.order);
        let mut c = [0.0; NCOEF];
        for (k, v) in c.iter_mut().enumerate().take(NCOEF_AT[order as usize]) {
            *v = self.c[k] + o.c[k];
        }
        Jet { c, order }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(mut self) -> Jet {
        for v in self.c.iter_mut() {
            *v = -*v;
        }
        self
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let order = self.order.min(o.order);
        let mut c = [0.0; NCOEF];
        for &(a, b, out) in &MUL_TABLE[..MUL_END[order as usize]] {
            c[out as usize] += self.c[a as usize] * o.c[b as usize];
        }
        Jet { c, order }
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, o: f64) -> Jet {
        self.c[0] += o;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, o: f64) -> Jet {
        self.c[0] -= o;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(mut self, o: f64) -> Jet {
        for v in self.c.iter_mut() {
            *v *= o;
        }
        self
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(self, o: f64) -> Jet {
        self * (1.0 / o)
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        o * self
    }
}

impl Add<Jet> for f64 {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        o + self
    }
}

impl Sub<Jet> for f64 {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        -o + self
    }
}

impl AddAssign for Jet {
    fn add_assign(&mut self, o: Jet) {
        *self = *self + o;
    }
}

impl SubAssign for Jet {
    fn sub_assign(&mut self, o: Jet) {
        *self = *self - o;
    }
}

impl MulAssign<f64> for Jet {
    fn mul_assign(&mut self, o: f64) {
        *self = *self * o;
    }
}

impl std::iter::Sum for Jet {
    fn sum<I: Iterator<Item = Jet>>(iter: I) -> Jet {
        iter.fold(Jet::constant(0.0), |a, b| a + b)
    }
}

/// Complex-valued jet stored as a pair of real jets.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct CJet {
    pub re: Jet,
    pub im: Jet,
}

impl CJet {
    pub fn new(re: Jet, im: Jet) -> Self {
        CJet { re, im }
    }

    pub fn real(re: Jet) -> Self {
        CJet {
            re,
            im: Jet::zero(re.order()),
        }
    }

    pub fn constant(z: Complex64) -> Self {
        CJet {
            re: Jet::constant(z.re),
            im: Jet::constant(z.im),
        }
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }

    pub fn order(&self) -> u8 {
        self.re.order().min(self.im.order())
    }

    pub fn conj(&self) -> Self {
        CJet {
            re: self.re,
            im: -self.im,
        }
    }

    pub fn diff(&self, axis: usize) -> Result<Self> {
        Ok(CJet {
            re: self.re.diff(axis)?,
            im: self.im.diff(axis)?,
        })
    }

    pub fn scale(&self, z: Complex64) -> Self {
        CJet {
            re: self.re * z.re - self.im * z.im,
            im: self.re * z.im + self.im * z.re,
        }
    }

    pub fn norm_sqr(&self) -> Jet {
        self.re * self.re + self.im * self.im
    }
}

impl Add for CJet {
    type Output = CJet;
    fn add(self, o: CJet) -> CJet {
        CJet {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }
}

impl Sub for CJet {
    type Output = CJet;
    fn sub(self, o: CJet) -> CJet {
        CJet {
            re: self.re - o.re,
            im: self.im - o.im,
        }
    }
}

impl Neg for CJet {
    type Output = CJet;
    fn neg(self) -> CJet {
        CJet {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Mul for CJet {
    type Output = CJet;
    fn mul(self, o: CJet) -> CJet {
        CJet {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
}

impl Mul<Jet> for CJet {
    type Output = CJet;
    fn mul(self, o: Jet) -> CJet {
        CJet {
            re: self.re * o,
            im: self.im * o,
        }
    }
}

impl Mul<f64> for CJet {
    type Output = CJet;
    fn mul(self, o: f64) -> CJet {
        CJet {
            re: self.re * o,
            im: self.im * o,
        }
    }
}

impl Mul<Complex64> for CJet {
    type Output = CJet;
    fn mul(self, o: Complex64) -> CJet {
        self.scale(o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn product_rule_matches_hand_expansion() {
        // f = r^2 theta, exact partials at (2, 3)
        let r = Jet::var_r(2.0, 3);
        let t = Jet::var_theta(3.0, 3);
        let f = r * r * t;
        assert_eq!(f.value(), 12.0);
        assert_eq!(f.d_r().unwrap(), 12.0);
        assert_eq!(f.d_theta().unwrap(), 4.0);
        assert_eq!(f.d_rr().unwrap(), 6.0);
        assert_eq!(f.d_rtheta().unwrap(), 4.0);
        assert_eq!(f.d_thetatheta().unwrap(), 0.0);
        assert_eq!(f.partial(2, 1).unwrap(), 2.0);
        assert_eq!(f.d_rrr().unwrap(), 0.0);
    }

    #[test]
    fn elementary_functions_third_derivatives() {
        let x0 = 0.7;
        let r = Jet::var_r(x0, 3);
        let checks: [(Jet, [f64; 4]); 5] = [
            (r.sin(), [x0.sin(), x0.cos(), -x0.sin(), -x0.cos()]),
            (r.exp(), [x0.exp(); 4]),
            (r.cosh(), [x0.cosh(), x0.sinh(), x0.cosh(), x0.sinh()]),
            (
                r.recip(),
                [1.0 / x0, -1.0 / x0.powi(2), 2.0 / x0.powi(3), -6.0 / x0.powi(4)],
            ),
            (
                r.tan(),
                {
                    let t = x0.tan();
                    let s = 1.0 + t * t;
                    [t, s, 2.0 * t * s, 2.0 * s * (1.0 + 3.0 * t * t)]
                },
            ),
        ];
        for (jet, d) in checks {
            for (k, want) in d.iter().enumerate() {
                assert!(close(jet.partial(k, 0).unwrap(), *want, 1e-14));
            }
        }
    }

    #[test]
    fn mixed_chain_rule() {
        // f = sin(r * theta): f_rtheta = cos(rt) - rt sin(rt)
        let (r0, t0) = (0.4, 1.3);
        let f = (Jet::var_r(r0, 3) * Jet::var_theta(t0, 3)).sin();
        let x = r0 * t0;
        assert!(close(f.d_rtheta().unwrap(), x.cos() - x * x.sin(), 1e-14));
        // f_rrtheta = -2 t sin(rt) - r t^2 cos(rt)
        let want = -2.0 * t0 * x.sin() - r0 * t0 * t0 * x.cos();
        assert!(close(f.partial(2, 1).unwrap(), want, 1e-14));
    }

    #[test]
    fn derivative_above_order_is_an_error() {
        let j = Jet::var_r(1.0, 1);
        assert!(j.d_rr().is_err());
        assert!(j.dr().unwrap().dr().is_err());
        assert_eq!(
            Jet::constant_with_order(1.0, 0).diff(1),
            Err(Error::JetOrder {
                requested: 1,
                available: 0
            })
        );
    }

    #[test]
    fn diff_lowers_order() {
        let f = Jet::var_r(0.3, 3).sin() * Jet::var_theta(0.2, 3).cos();
        let fr = f.dr().unwrap();
        assert_eq!(fr.order(), 2);
        assert!(close(fr.d_rr().unwrap(), f.d_rrr().unwrap(), 1e-15));
        assert!(close(
            f.dtheta().unwrap().dr().unwrap().value(),
            f.d_rtheta().unwrap(),
            1e-15
        ));
    }

    #[test]
    fn from_partials_round_trip() {
        let p = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0];
        let j = Jet::from_partials(&p).unwrap();
        let back: Vec<f64> = POWERS.iter().map(|&(i, k)| j.partial(i, k).unwrap()).collect();
        assert_eq!(back, p.to_vec());
        assert!(Jet::from_partials(&[1.0, 2.0]).is_err());
    }
}
