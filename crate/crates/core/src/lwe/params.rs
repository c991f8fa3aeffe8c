use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::{FromPrimitive, Signed, ToPrimitive};

use super::gauss::Noise;
use crate::arith::{factorial, is_probable_prime, lagrange_cleared, next_prime, Modulus};
use crate::codec::{Reader, Writer};
use crate::error::{Error, Result};
use crate::shamir::subsets;

/// Float slack keeping `alpha` strictly inside its bound after rounding.
const ALPHA_SLACK: f64 = 1e-9;

/// Validated parameters of the lattice function.
///
/// `h = w * l` input bits in `w` blocks of `l = floor(lg p)` bits. The
/// threshold combiner works with integers scaled by `eta = (n!)^3`; `gamma`
/// is the worst-case `sum_v |eta * L_v|` over `t`-subsets of `[n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LweParams {
    pub(crate) d: usize,
    pub(crate) q: Arc<Modulus>,
    pub(crate) p: u64,
    pub(crate) h: usize,
    pub(crate) l: usize,
    pub(crate) w: usize,
    pub(crate) alpha: f64,
    pub(crate) n: u64,
    pub(crate) t: usize,
    pub(crate) eta: BigUint,
    pub(crate) gamma: BigUint,
    pub(crate) g_stat: BigUint,
    pub(crate) lossiness: usize,
    pub(crate) noise: Noise,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InconsistentParams(msg.into())
}

fn to_f64(v: &BigUint) -> f64 {
    v.to_f64().unwrap_or(f64::INFINITY)
}

/// `max_S sum_{v in S} |eta * L_v(0)|` over `t`-subsets `S` of `[n]`.
pub fn worst_case_gamma(n: u64, t: usize) -> Result<BigUint> {
    let eta = factorial(n).pow(3);
    let mut best = BigUint::from(0u8);
    for subset in subsets(n, t) {
        let sl = lagrange_cleared(&subset, 0, n)?;
        let scaled = sl
            .rescaled(&eta)
            .ok_or_else(|| Error::BoundViolation("eta not a multiple of the scale".into()))?;
        let sum: BigInt = scaled.iter().map(Signed::abs).sum();
        best = best.max(sum.to_biguint().expect("absolute sum"));
    }
    Ok(best)
}

struct Shape {
    l: usize,
    w: usize,
    eta: BigUint,
    gamma: BigUint,
    g_stat: BigUint,
}

fn shape(d: usize, h: usize, p: u64, n: u64, t: usize) -> Result<Shape> {
    if t < 2 || t as u64 > n {
        return Err(Error::BadThreshold { n, t });
    }
    if d == 0 {
        return Err(bad("d must be positive"));
    }
    if p < 3 || !is_probable_prime(&BigUint::from(p)) {
        return Err(bad(format!("p = {p} must be an odd prime")));
    }
    if p <= n {
        return Err(bad(format!("p = {p} must exceed n = {n} so eta is invertible")));
    }
    let l = (u64::BITS - 1 - p.leading_zeros()) as usize;
    if h == 0 || !h.is_multiple_of(l) {
        return Err(bad(format!("h = w*l fails: h = {h}, l = {l}")));
    }
    let eta = factorial(n).pow(3);
    let gamma = worst_case_gamma(n, t)?;
    let g_stat = (&gamma * &gamma).max(BigUint::from(h));
    Ok(Shape {
        l,
        w: h / l,
        eta,
        gamma,
        g_stat,
    })
}

impl LweParams {
    /// Derives `(q, alpha)` from the noise-budget inequalities:
    /// `alpha = 1/(16 p (h + g))` with `g = max(h, gamma^2)`, and `q` the
    /// next prime at or above `max(4p(h + gamma), 2 sqrt(d) / alpha)`.
    pub fn from_shape(d: usize, h: usize, p: u64, n: u64, t: usize) -> Result<Arc<Self>> {
        let s = shape(d, h, p, n, t)?;
        let budget = 16.0 * p as f64 * (h as f64 + to_f64(&s.g_stat));
        let alpha = 1.0 / budget / (1.0 + ALPHA_SLACK);
        let q_noise = BigUint::from_f64((2.0 * (d as f64).sqrt() / alpha).ceil())
            .ok_or_else(|| bad("2 sqrt(d)/alpha not representable"))?
            + 1u8;
        let q_sum = BigUint::from(4 * p) * (BigUint::from(h) + &s.gamma);
        let q = next_prime(&q_noise.max(q_sum));
        Self::assemble(d, h, p, n, t, Modulus::new(q)?, alpha, s)
    }

    /// Validates an explicit modulus and Gaussian parameter.
    pub fn with_modulus(
        d: usize,
        h: usize,
        p: u64,
        n: u64,
        t: usize,
        q: Arc<Modulus>,
        alpha: f64,
    ) -> Result<Arc<Self>> {
        let s = shape(d, h, p, n, t)?;
        Self::assemble(d, h, p, n, t, q, alpha, s)
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        d: usize,
        h: usize,
        p: u64,
        n: u64,
        t: usize,
        q: Arc<Modulus>,
        alpha: f64,
        s: Shape,
    ) -> Result<Arc<Self>> {
        let params = Self {
            d,
            q,
            p,
            h,
            l: s.l,
            w: s.w,
            alpha,
            n,
            t,
            eta: s.eta,
            gamma: s.gamma,
            g_stat: s.g_stat,
            lossiness: h,
            noise: Noise::Gaussian { alpha },
        };
        params.validate()?;
        Ok(Arc::new(params))
    }

    /// Checks every invariant, naming the first one that fails.
    pub fn validate(&self) -> Result<()> {
        let p = BigUint::from(self.p);
        let h = BigUint::from(self.h);
        if self.h != self.w * self.l {
            return Err(bad("h = w*l fails"));
        }
        if (1u128 << self.l) > u128::from(self.p) {
            return Err(bad("2^l <= p fails"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(bad(format!("alpha = {} outside (0, 1)", self.alpha)));
        }
        if self.q.value() < &(BigUint::from(4u8) * &p * (&h + &self.gamma)) {
            return Err(bad(format!(
                "q >= 4p(h+gamma) fails: q = {}, gamma = {}",
                self.q.value(),
                self.gamma
            )));
        }
        if self.g_stat < (&self.gamma * &self.gamma).max(h.clone()) {
            return Err(bad("g >= max(h, gamma^2) fails"));
        }
        let budget = 16.0 * self.p as f64 * (self.h as f64 + to_f64(&self.g_stat));
        if self.alpha * budget > 1.0 {
            return Err(bad(format!(
                "alpha <= 1/(16p(h+g)) fails: alpha = {:e}, bound = {:e}",
                self.alpha,
                1.0 / budget
            )));
        }
        if to_f64(self.q.value()) < 2.0 * (self.d as f64).sqrt() / self.alpha {
            return Err(bad(format!(
                "q >= 2 sqrt(d)/alpha fails: q = {}, bound = {:e}",
                self.q.value(),
                2.0 * (self.d as f64).sqrt() / self.alpha
            )));
        }
        if self.lossiness > self.h {
            return Err(bad("lossiness exceeds h"));
        }
        Ok(())
    }

    /// Same parameters with a different error source.
    pub fn with_noise(&self, noise: Noise) -> Arc<Self> {
        Arc::new(Self {
            noise,
            ..self.clone()
        })
    }

    /// Same parameters with a configured lossiness (at most `h`).
    pub fn with_lossiness(&self, k: usize) -> Result<Arc<Self>> {
        let out = Self {
            lossiness: k,
            ..self.clone()
        };
        out.validate()?;
        Ok(Arc::new(out))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn q(&self) -> &Arc<Modulus> {
        &self.q
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn w(&self) -> usize {
        self.w
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn eta(&self) -> &BigUint {
        &self.eta
    }

    pub fn gamma(&self) -> &BigUint {
        &self.gamma
    }

    pub fn g_stat(&self) -> &BigUint {
        &self.g_stat
    }

    pub fn lossiness(&self) -> usize {
        self.lossiness
    }

    pub fn noise(&self) -> Noise {
        self.noise
    }

    pub(crate) fn write(&self, w: &mut Writer) {
        w.len(self.d);
        w.uint(self.q.value());
        w.u64(self.p);
        w.len(self.h);
        w.len(self.l);
        w.len(self.w);
        w.u64(self.n);
        w.len(self.t);
        w.f64(self.alpha);
        w.uint(&self.eta);
        w.uint(&self.gamma);
        w.uint(&self.g_stat);
        w.len(self.lossiness);
    }

    pub(crate) fn read(r: &mut Reader<'_>) -> Result<Arc<Self>> {
        let d = r.len()?;
        let q = r.uint()?;
        let p = r.u64()?;
        let h = r.len()?;
        let l = r.len()?;
        let w = r.len()?;
        let n = r.u64()?;
        let t = r.len()?;
        let alpha = r.f64()?;
        let eta = r.uint()?;
        let gamma = r.uint()?;
        let g_stat = r.uint()?;
        let lossiness = r.len()?;
        let decode = |e: Error| Error::Decode(format!("parameters: {e}"));
        let q = Modulus::new(q).map_err(decode)?;
        let s = shape(d, h, p, n, t).map_err(decode)?;
        if (s.l, s.w, &s.eta, &s.gamma) != (l, w, &eta, &gamma) {
            return Err(Error::Decode("parameters: derived values disagree".into()));
        }
        let params = Self {
            d,
            q,
            p,
            h,
            l,
            w,
            alpha,
            n,
            t,
            eta,
            gamma,
            g_stat,
            lossiness,
            noise: Noise::Gaussian { alpha },
        };
        params.validate().map_err(decode)?;
        Ok(Arc::new(params))
    }
}

/// Parameters from growth exponents: `h = ceil(d^c3)` rounded down to a
/// multiple of `l`, `p` the next prime at or above `h^c1`, and the modulus
/// required to stay below `p * h^c2`.
pub fn lwe_params(d: usize, c1: f64, c2: f64, c3: f64, n: u64, t: usize) -> Result<Arc<LweParams>> {
    if c3 <= 1.0 || c1 <= 0.0 {
        return Err(bad(format!("need c3 > 1 and c1 > 0, got c1 = {c1}, c3 = {c3}")));
    }
    let h0 = (d as f64).powf(c3).ceil();
    let p_min = BigUint::from_f64(h0.powf(c1).ceil()).ok_or_else(|| bad("h^c1 not representable"))?;
    let p = next_prime(&p_min)
        .to_u64()
        .ok_or_else(|| bad("p exceeds 64 bits"))?;
    let l = (u64::BITS - 1 - p.leading_zeros()) as usize;
    let h0 = h0 as usize;
    let h = h0 - h0 % l;
    let params = LweParams::from_shape(d, h, p, n, t)?;
    let cap = p as f64 * (h as f64).powf(c2);
    if to_f64(params.q.value()) > cap {
        return Err(bad(format!(
            "q <= p*h^c2 fails: q = {}, cap = {cap:e}",
            params.q.value()
        )));
    }
    Ok(params)
}
