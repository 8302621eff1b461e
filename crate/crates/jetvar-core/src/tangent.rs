//! Tangent-valued forms on Y and the Frölicher–Nijenhuis bracket.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::kernel::{int, partial_base, partial_var, rat, Expr, JetContext};

/// φ = (1/r!) φ^μ_{ν₁…ν_r} dz^{ν₁}∧…∧dz^{ν_r} ⊗ ∂_μ over the coordinates
/// z = (x^λ, y^i) of Y. Only strictly increasing index tuples are stored;
/// the stored value is the full antisymmetric component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TangentValuedForm {
    pub n: usize,
    pub m: usize,
    pub degree: usize,
    comps: BTreeMap<(Vec<u8>, u8), Expr>,
}

fn permutation_sign(idx: &[u8]) -> Option<(Vec<u8>, bool)> {
    let mut v = idx.to_vec();
    let mut neg = false;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            neg = !neg;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, neg))
}

fn permutations(k: usize) -> Vec<(Vec<usize>, bool)> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, k: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in 0..k {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, k, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], k, &mut out);
    out.into_iter()
        .map(|p| {
            let mut inv = 0;
            for a in 0..k {
                for b in a + 1..k {
                    if p[a] > p[b] {
                        inv += 1;
                    }
                }
            }
            (p, inv % 2 == 1)
        })
        .collect()
}

fn combinations(n: usize, k: usize) -> Vec<Vec<u8>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i as u8);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn factorial(k: usize) -> i64 {
    (1..=k as i64).product()
}

impl TangentValuedForm {
    pub fn zero(ctx: &JetContext, degree: usize) -> Self {
        TangentValuedForm { n: ctx.n, m: ctx.m(), degree, comps: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.n + self.m
    }

    /// Vector field u^μ∂_μ on Y.
    pub fn vector_field(ctx: &JetContext, comps: &[Expr]) -> Self {
        let mut out = TangentValuedForm::zero(ctx, 0);
        for (mu, c) in comps.iter().enumerate() {
            out.set(&[], mu, c.clone());
        }
        out
    }

    /// Canonical form θ_Y = dz^ν⊗∂_ν.
    pub fn canonical(ctx: &JetContext) -> Self {
        let mut out = TangentValuedForm::zero(ctx, 1);
        for nu in 0..out.dim() {
            out.set(&[nu], nu, Expr::one());
        }
        out
    }

    /// Connection Γ = dx^λ⊗(∂_λ + Γ^i_λ∂_i), with `gamma[i][λ]`.
    pub fn connection(ctx: &JetContext, gamma: &[Vec<Expr>]) -> Self {
        let mut out = TangentValuedForm::zero(ctx, 1);
        for l in 0..ctx.n {
            out.set(&[l], l, Expr::one());
            for (i, row) in gamma.iter().enumerate() {
                out.set(&[l], ctx.n + i, row[l].clone());
            }
        }
        out
    }

    /// Soldering form σ = σ^i_λ dx^λ⊗∂_i, with `sigma[i][λ]`.
    pub fn soldering(ctx: &JetContext, sigma: &[Vec<Expr>]) -> Self {
        let mut out = TangentValuedForm::zero(ctx, 1);
        for l in 0..ctx.n {
            for (i, row) in sigma.iter().enumerate() {
                out.set(&[l], ctx.n + i, row[l].clone());
            }
        }
        out
    }

    /// Sets the full component φ^μ_K; K may be unsorted.
    pub fn set(&mut self, k: &[usize], mu: usize, value: Expr) {
        assert_eq!(k.len(), self.degree, "index count must equal the degree");
        let idx: Vec<u8> = k.iter().map(|&a| a as u8).collect();
        let Some((sorted, neg)) = permutation_sign(&idx) else { return };
        let key = (sorted, mu as u8);
        let v = if neg { -value } else { value };
        if v.is_empty() {
            self.comps.remove(&key);
        } else {
            self.comps.insert(key, v);
        }
    }

    /// Full component φ^μ_K for any index order.
    pub fn get(&self, k: &[usize], mu: usize) -> Expr {
        let idx: Vec<u8> = k.iter().map(|&a| a as u8).collect();
        match permutation_sign(&idx) {
            None => Expr::zero(),
            Some((sorted, neg)) => {
                let v = self.comps.get(&(sorted, mu as u8)).cloned().unwrap_or_default();
                if neg {
                    -v
                } else {
                    v
                }
            }
        }
    }

    pub fn components(&self) -> impl Iterator<Item = (&Vec<u8>, usize, &Expr)> {
        self.comps.iter().map(|((k, mu), e)| (k, *mu as usize, e))
    }

    pub fn is_zero(&self) -> bool {
        self.comps.values().all(crate::kernel::is_zero)
    }

    fn partial(&self, ctx: &JetContext, e: &Expr, nu: usize) -> Expr {
        if nu < self.n {
            partial_base(e, nu)
        } else {
            partial_var(e, &ctx.var0(nu - self.n))
        }
    }

    pub fn scale(&self, q: &crate::kernel::Rational) -> Self {
        let mut out = self.clone();
        for v in out.comps.values_mut() {
            *v = v.scale(q);
        }
        out.comps.retain(|_, v| !v.is_empty());
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.degree, other.degree);
        let mut out = self.clone();
        for (k, v) in &other.comps {
            let e = out.comps.entry(k.clone()).or_default();
            *e += v;
            if e.is_empty() {
                out.comps.remove(k);
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&int(-1)))
    }

    /// Frölicher–Nijenhuis bracket by full antisymmetrization of the
    /// four-term coordinate expression.
    pub fn fn_bracket(&self, ctx: &JetContext, sigma: &Self) -> Result<Self> {
        let (r, s) = (self.degree, sigma.degree);
        let dim = self.dim();
        if r + s > dim {
            return Err(Error::DegreeOverflow { r, s, dim });
        }
        // cache ∂_ν of every stored component
        let mut dphi: BTreeMap<(Vec<u8>, u8, u8), Expr> = BTreeMap::new();
        let mut dsig: BTreeMap<(Vec<u8>, u8, u8), Expr> = BTreeMap::new();
        for ((k, mu), e) in &self.comps {
            for nu in 0..dim {
                let d = self.partial(ctx, e, nu);
                if !d.is_empty() {
                    dphi.insert((k.clone(), *mu, nu as u8), d);
                }
            }
        }
        for ((k, mu), e) in &sigma.comps {
            for nu in 0..dim {
                let d = self.partial(ctx, e, nu);
                if !d.is_empty() {
                    dsig.insert((k.clone(), *mu, nu as u8), d);
                }
            }
        }
        let dget = |cache: &BTreeMap<(Vec<u8>, u8, u8), Expr>, k: &[usize], mu: usize, nu: usize| -> Expr {
            let idx: Vec<u8> = k.iter().map(|&a| a as u8).collect();
            match permutation_sign(&idx) {
                None => Expr::zero(),
                Some((sorted, neg)) => {
                    let v = cache.get(&(sorted, mu as u8, nu as u8)).cloned().unwrap_or_default();
                    if neg {
                        -v
                    } else {
                        v
                    }
                }
            }
        };
        let four_term = |l: &[usize], mu: usize| -> Expr {
            let (lp, ls) = l.split_at(r);
            let mut a = Expr::zero();
            for nu in 0..dim {
                let p = self.get(lp, nu);
                if !p.is_empty() {
                    a += &p * &dget(&dsig, ls, mu, nu);
                }
                let q = sigma.get(ls, nu);
                if !q.is_empty() {
                    a -= &q * &dget(&dphi, lp, mu, nu);
                }
                if r > 0 {
                    let mut k = lp[..r - 1].to_vec();
                    k.push(nu);
                    let p = self.get(&k, mu);
                    if !p.is_empty() {
                        a -= (&p * &dget(&dsig, ls, nu, lp[r - 1])).scale(&int(r as i64));
                    }
                }
                if s > 0 {
                    let mut k = vec![nu];
                    k.extend_from_slice(&ls[1..]);
                    let q = sigma.get(&k, mu);
                    if !q.is_empty() {
                        a += (&q * &dget(&dphi, lp, nu, ls[0])).scale(&int(s as i64));
                    }
                }
            }
            a
        };
        let perms = permutations(r + s);
        let norm = rat(1, factorial(r) * factorial(s));
        let mut out = TangentValuedForm { n: self.n, m: self.m, degree: r + s, comps: BTreeMap::new() };
        for k in combinations(dim, r + s) {
            let k: Vec<usize> = k.iter().map(|&a| a as usize).collect();
            for mu in 0..dim {
                let mut total = Expr::zero();
                for (p, neg) in &perms {
                    let l: Vec<usize> = p.iter().map(|&i| k[i]).collect();
                    let a = four_term(&l, mu);
                    if *neg {
                        total -= a;
                    } else {
                        total += a;
                    }
                }
                out.set(&k, mu, total.scale(&norm));
            }
        }
        Ok(out)
    }

    /// Nijenhuis differential d_θσ = [θ, σ]_FN.
    pub fn nijenhuis_differential(&self, ctx: &JetContext, sigma: &Self) -> Result<Self> {
        self.fn_bracket(ctx, sigma)
    }
}
