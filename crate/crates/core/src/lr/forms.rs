use std::collections::HashMap;

use num_traits::Zero;

use super::algebroid::LieRinehart;
use super::base::RModule;
use crate::linalg::{add_scaled, zero_vec, Rational, Vector};

/// Strictly increasing `p`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, p: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < p - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if p <= n {
        go(0, n, p, &mut Vec::new(), &mut out);
    }
    out
}

/// Sorts `v` and returns the sign of the sorting permutation, or `None`
/// when an index repeats.
pub fn sort_with_sign(v: &[usize]) -> Option<(Vec<usize>, i32)> {
    let mut w = v.to_vec();
    let mut sign = 1;
    for i in 1..w.len() {
        let mut j = i;
        while j > 0 && w[j - 1] > w[j] {
            w.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if w.windows(2).any(|p| p[0] == p[1]) {
        None
    } else {
        Some((w, sign))
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Basis bookkeeping for alternating `p`-forms on a free module of rank
/// `rank` with values in a space of dimension `fiber_dim`.
#[derive(Debug, Clone)]
pub struct FormSpace {
    pub rank: usize,
    pub degree: usize,
    pub fiber_dim: usize,
    tuples: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

impl FormSpace {
    pub fn new(rank: usize, degree: usize, fiber_dim: usize) -> Self {
        let tuples = subsets(rank, degree);
        let index = tuples.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
        FormSpace { rank, degree, fiber_dim, tuples, index }
    }

    pub fn dim(&self) -> usize {
        self.tuples.len() * self.fiber_dim
    }

    pub fn tuples(&self) -> &[Vec<usize>] {
        &self.tuples
    }

    pub fn tuple_index(&self, t: &[usize]) -> usize {
        self.index[t]
    }

    /// Offset of the fiber block belonging to a sorted tuple.
    pub fn offset(&self, t: &[usize]) -> usize {
        self.index[t] * self.fiber_dim
    }

    /// Sign and block offset for an arbitrary index tuple, `None` if it repeats.
    pub fn signed_offset(&self, t: &[usize]) -> Option<(i32, usize)> {
        let (s, sign) = sort_with_sign(t)?;
        Some((sign, self.offset(&s)))
    }
}

/// The space of `M`-valued `p`-forms on `B`.
pub fn form_space(b: &LieRinehart, m: &RModule, p: usize) -> FormSpace {
    FormSpace::new(b.rank, p, m.dim)
}

/// An alternating form stored by its values on increasing tuples of
/// generators; `values` is laid out as in [`FormSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct Cochain {
    pub rank: usize,
    pub degree: usize,
    pub fiber_dim: usize,
    pub values: Vector,
}

impl Cochain {
    pub fn zero(rank: usize, degree: usize, fiber_dim: usize) -> Self {
        let dim = binomial(rank, degree) * fiber_dim;
        Cochain { rank, degree, fiber_dim, values: zero_vec(dim) }
    }

    pub fn from_values(rank: usize, degree: usize, fiber_dim: usize, values: Vector) -> Self {
        assert_eq!(values.len(), binomial(rank, degree) * fiber_dim);
        Cochain { rank, degree, fiber_dim, values }
    }

    pub fn space(&self) -> FormSpace {
        FormSpace::new(self.rank, self.degree, self.fiber_dim)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    /// Value on generators `e_{t_1}, ..., e_{t_p}` in any order.
    pub fn on_generators(&self, t: &[usize]) -> Vector {
        let sp = self.space();
        match sp.signed_offset(t) {
            None => zero_vec(self.fiber_dim),
            Some((sign, off)) => {
                let v = &self.values[off..off + self.fiber_dim];
                if sign > 0 {
                    v.to_vec()
                } else {
                    v.iter().map(|x| -x).collect()
                }
            }
        }
    }

    /// Sets the value on a tuple of generators in any order.
    pub fn set_on_generators(&mut self, t: &[usize], value: &[Rational]) {
        let sp = self.space();
        let (sign, off) = sp.signed_offset(t).expect("repeated index");
        for (k, x) in value.iter().enumerate() {
            self.values[off + k] = if sign > 0 { x.clone() } else { -x.clone() };
        }
    }

    /// Evaluates on arbitrary elements of `B`, extending alternating and
    /// `R`-multilinearly with `m` providing the action of `R` on values.
    pub fn eval(&self, b: &LieRinehart, m: &RModule, args: &[Vector]) -> Vector {
        assert_eq!(args.len(), self.degree);
        let d = b.base_dim();
        let mut out = zero_vec(self.fiber_dim);
        let mut idx = Vec::with_capacity(args.len());
        let mut unit = b.base.unit.clone();
        expand(self, b, m, args, d, &mut idx, &mut unit, &Rational::from_integer(1.into()), &mut out);
        out
    }

    pub fn add(&self, other: &Cochain) -> Cochain {
        let mut c = self.clone();
        add_scaled(&mut c.values, &Rational::from_integer(1.into()), &other.values);
        c
    }

    pub fn scale(&self, s: &Rational) -> Cochain {
        Cochain { values: self.values.iter().map(|x| x * s).collect(), ..self.clone() }
    }
}

#[allow(clippy::too_many_arguments)]
fn expand(
    xi: &Cochain,
    b: &LieRinehart,
    m: &RModule,
    args: &[Vector],
    d: usize,
    idx: &mut Vec<usize>,
    coeff_r: &mut Vector,
    scalar: &Rational,
    out: &mut Vector,
) {
    let k = idx.len();
    if k == args.len() {
        let v = xi.on_generators(idx);
        let w = m.act(coeff_r).mul_vec(&v);
        add_scaled(out, scalar, &w);
        return;
    }
    for (pos, x) in args[k].iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        let (i, c) = (pos / d, pos % d);
        if idx.contains(&i) {
            continue;
        }
        let saved = coeff_r.clone();
        *coeff_r = b.base.mul(coeff_r, &b.base.basis_vec(c));
        idx.push(i);
        expand(xi, b, m, args, d, idx, coeff_r, &(scalar * x), out);
        idx.pop();
        *coeff_r = saved;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::q;
    use crate::lr::base::BaseAlgebra;

    #[test]
    fn form_space_dimensions() {
        let b = LieRinehart::abelian(&BaseAlgebra::rationals(), 3);
        let m = RModule::trivial(1);
        assert_eq!(form_space(&b, &m, 0).dim(), 1);
        assert_eq!(form_space(&b, &m, 2).dim(), 3);
        assert_eq!(form_space(&b, &m, 4).dim(), 0);
        let m2 = RModule::trivial(2);
        assert_eq!(form_space(&b, &m2, 1).dim(), 6);
    }

    #[test]
    fn sorting_sign() {
        assert_eq!(sort_with_sign(&[2, 0, 1]), Some((vec![0, 1, 2], 1)));
        assert_eq!(sort_with_sign(&[1, 0]), Some((vec![0, 1], -1)));
        assert_eq!(sort_with_sign(&[1, 1]), None);
    }

    #[test]
    fn evaluation_is_alternating_and_r_linear() {
        let r = BaseAlgebra::dual_numbers();
        let b = LieRinehart::abelian(&r, 2);
        let m = RModule::free(&r, 1);
        let mut xi = Cochain::zero(2, 2, 2);
        xi.set_on_generators(&[0, 1], &[q(1), q(3)]);
        let e0 = b.generator(0);
        let e1 = b.generator(1);
        assert_eq!(xi.eval(&b, &m, &[e1.clone(), e0.clone()]), vec![q(-1), q(-3)]);
        // x e0: coordinate 0*2+1
        let xe0 = vec![q(0), q(1), q(0), q(0)];
        assert_eq!(xi.eval(&b, &m, &[xe0, e1]), vec![q(0), q(1)]);
    }
}
