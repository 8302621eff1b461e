use crate::error::{Error, Result};
use crate::kernel::Expr;

use super::form::Form;
use super::vector_field::VectorField;

/// Interior product u⌋φ with the graded rule
/// u⌋(φ∧σ) = (u⌋φ)∧σ + (−1)^{|φ|+[φ][u]} φ∧(u⌋σ).
pub fn interior(u: &VectorField, phi: &Form) -> Result<Form> {
    if !phi.is_empty() && phi.terms().all(|(b, _)| b.degree() == 0) {
        return Err(Error::DegreeError("interior product of a function".into()));
    }
    contract(u, phi)
}

fn contract(u: &VectorField, phi: &Form) -> Result<Form> {
    let mut out = Form::zero();
    for (b, c) in phi.terms() {
        if b.degree() == 0 {
            continue;
        }
        let c = if u.odd {
            let (e, o) = c.split_parity();
            &e - &o
        } else {
            c.clone()
        };
        let s = b.dx.len();
        // horizontal factors: prefix has no odd elements
        for j in 0..s {
            let w = &u.base[b.dx[j] as usize];
            if w.is_empty() {
                continue;
            }
            let mut dx = b.dx.clone();
            dx.remove(j);
            let coeff = if j % 2 == 1 { -(&c * w) } else { &c * w };
            out += Form::from_parts(coeff, dx, b.theta.clone());
        }
        let mut prefix_odd = false;
        for j in 0..b.theta.len() {
            let v = b.theta[j];
            let w = theta_contraction(u, &v)?;
            if !w.is_empty() {
                let mut theta = b.theta.clone();
                theta.remove(j);
                let neg = ((s + j) % 2 == 1) ^ (prefix_odd && v.odd);
                let coeff = if neg { -(&c * &w) } else { &c * &w };
                out += Form::from_parts(coeff, b.dx.clone(), theta);
            }
            prefix_odd ^= v.odd;
        }
    }
    Ok(out)
}

/// u⌋θ_v = u_v − (−1)^{[y][u]} y_{v+μ} u^μ.
fn theta_contraction(u: &VectorField, v: &crate::kernel::Var) -> Result<Expr> {
    let mut w = u.component(v)?;
    for (mu, um) in u.base.iter().enumerate() {
        if um.is_empty() {
            continue;
        }
        let t = &Expr::var(v.plus(mu)) * um;
        if v.odd && u.odd {
            w += t;
        } else {
            w -= t;
        }
    }
    Ok(w)
}

/// Lie derivative by the Cartan formula u⌋dφ + d(u⌋φ).
pub fn lie_derivative(u: &VectorField, phi: &Form) -> Result<Form> {
    let n = u.n();
    Ok(contract(u, &phi.d(n))? + contract(u, phi)?.d(n))
}
