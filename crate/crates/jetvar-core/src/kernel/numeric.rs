use std::collections::HashMap;

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::expr::{Atom, ElemKind, Expr, Func, Sym, Var};

/// Number of sample points used by the numeric zero test.
pub const SAMPLES: usize = 16;
/// Relative tolerance of the numeric zero test.
pub const TOLERANCE: f64 = 1e-9;
const SEED: u64 = 0x6a65_7476_6172;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeroReport {
    /// The canonical form is the empty sum.
    Exact,
    /// Nonzero canonical form that vanishes numerically at every sample.
    Probable { samples: usize },
    NonZero,
}

impl ZeroReport {
    pub fn is_zero(&self) -> bool {
        !matches!(self, ZeroReport::NonZero)
    }
}

pub fn is_zero(e: &Expr) -> bool {
    zero_report(e).is_zero()
}

/// Exact when possible; sampling when elementary or root atoms may hide a
/// cancellation.
pub fn zero_report(e: &Expr) -> ZeroReport {
    if e.is_zero_exact() {
        return ZeroReport::Exact;
    }
    if !e.has_transcendental() {
        return ZeroReport::NonZero;
    }
    // Odd words are independent Grassmann generators: test each cofactor.
    let groups = e.collect_by(|_| false, true);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut samples = 0;
    let mut attempts = 0;
    while samples < SAMPLES {
        attempts += 1;
        if attempts > 50 * SAMPLES {
            return ZeroReport::NonZero;
        }
        let mut point = Point::new(&mut rng);
        let mut ok = true;
        for cof in groups.values() {
            match eval_with_scale(cof, &mut point) {
                None => {
                    ok = false;
                    break;
                }
                Some((v, scale)) => {
                    if v.abs() > TOLERANCE * scale.max(1.0) {
                        return ZeroReport::NonZero;
                    }
                }
            }
        }
        if ok {
            samples += 1;
        }
    }
    ZeroReport::Probable { samples }
}

/// A random assignment of values to base coordinates, jets and functions.
pub struct Point<'a> {
    rng: &'a mut ChaCha8Rng,
    base: HashMap<u8, f64>,
    jets: HashMap<Var, f64>,
    funcs: HashMap<Func, f64>,
}

impl<'a> Point<'a> {
    pub fn new(rng: &'a mut ChaCha8Rng) -> Self {
        Point { rng, base: HashMap::new(), jets: HashMap::new(), funcs: HashMap::new() }
    }

    fn draw(rng: &mut ChaCha8Rng) -> f64 {
        rng.gen_range(0.25..1.25)
    }

    fn value(&mut self, s: &Sym) -> Option<f64> {
        let rng = &mut *self.rng;
        match s {
            Sym::Base(l) => Some(*self.base.entry(*l).or_insert_with(|| Self::draw(rng))),
            Sym::Jet(v) => Some(*self.jets.entry(*v).or_insert_with(|| Self::draw(rng))),
            Sym::Atom(Atom::Func(f)) => Some(*self.funcs.entry(f.clone()).or_insert_with(|| Self::draw(rng))),
            Sym::Atom(Atom::Elem(kind, arg)) => {
                let a = self.eval(arg)?;
                let v = match kind {
                    ElemKind::Sin => a.sin(),
                    ElemKind::Cos => a.cos(),
                    ElemKind::Exp => a.exp(),
                    ElemKind::Ln => a.ln(),
                };
                v.is_finite().then_some(v)
            }
            Sym::Atom(Atom::Root(b, den)) => {
                let a = self.eval(b)?;
                let v = if *den == 1 {
                    a
                } else if a < 0.0 && den % 2 == 1 {
                    -(-a).powf(1.0 / *den as f64)
                } else {
                    a.powf(1.0 / *den as f64)
                };
                v.is_finite().then_some(v)
            }
        }
    }

    /// Floating value at this point; None if an odd factor is present or the
    /// value is undefined.
    pub fn eval(&mut self, e: &Expr) -> Option<f64> {
        eval_with_scale(e, self).map(|(v, _)| v)
    }
}

fn eval_with_scale(e: &Expr, point: &mut Point<'_>) -> Option<(f64, f64)> {
    let mut total = 0.0;
    let mut scale = 0.0;
    for (m, c) in e.terms() {
        if !m.odd_factors().is_empty() {
            return None;
        }
        let mut t = c.to_f64()?;
        for (s, p) in m.even_factors() {
            let v = point.value(s)?;
            t *= v.powi(*p);
        }
        if !t.is_finite() {
            return None;
        }
        total += t;
        scale += t.abs();
    }
    Some((total, scale))
}
