//! Seeded random umbrae with small rational moments.
//!
//! Moments are drawn uniformly with numerator in `[-9, 9]` and denominator in
//! `{1, 2, 3, 4}`; `a_0 = 1`. ChaCha8 keeps streams identical across platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::poly::{ratio, Poly, Rational};
use crate::umbra::{AtomId, Workspace};

pub struct UmbraSampler {
    rng: ChaCha8Rng,
}

impl UmbraSampler {
    pub fn new(seed: u64) -> UmbraSampler {
        UmbraSampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rational(&mut self) -> Rational {
        let num = self.rng.gen_range(-9..=9);
        let den = self.rng.gen_range(1..=4);
        ratio(num, den)
    }

    pub fn nonzero_rational(&mut self) -> Rational {
        loop {
            let r = self.rational();
            if r != ratio(0, 1) {
                return r;
            }
        }
    }

    pub fn index(&mut self, upper: usize) -> usize {
        self.rng.gen_range(0..upper)
    }

    /// `m_0 = 1` followed by `order` random moments.
    pub fn moments(&mut self, order: usize) -> Vec<Poly> {
        let mut out = vec![Poly::one()];
        out.extend((0..order).map(|_| Poly::constant(self.rational())));
        out
    }

    /// Like [`moments`](Self::moments) but with `a_1 != 0`.
    pub fn moments_invertible(&mut self, order: usize) -> Vec<Poly> {
        let mut out = self.moments(order);
        if order >= 1 {
            out[1] = Poly::constant(self.nonzero_rational());
        }
        out
    }

    /// Like [`moments`](Self::moments) but with `a_1 = 1`.
    pub fn moments_normalized(&mut self, order: usize) -> Vec<Poly> {
        let mut out = self.moments(order);
        if order >= 1 {
            out[1] = Poly::one();
        }
        out
    }

    pub fn define(&mut self, ws: &mut Workspace, name: &str) -> Result<AtomId> {
        let m = self.moments(ws.order());
        ws.define_umbra(name, m)
    }

    pub fn define_invertible(&mut self, ws: &mut Workspace, name: &str) -> Result<AtomId> {
        let m = self.moments_invertible(ws.order());
        ws.define_umbra(name, m)
    }
}
