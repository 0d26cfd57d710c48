use super::SpectralError;
use crate::extension::ExtensionStructure;
use crate::linalg::{add_scaled, q, solve_linear, unit_vec, zero_vec, MatrixQ, Rational, Vector};
use crate::lr::{
    binomial, ce_differential, sort_with_sign, subsets, Cochain, Connection, FirstOrderOp, FormSpace, RModule,
};

/// A section `s: B -> A`, stored as `σ = s - s_0` with `s_0` the canonical
/// section of the `B ⊕ L` layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Splitting {
    /// `L`-valued 1-form on `B`.
    pub sigma: Cochain,
}

impl Splitting {
    pub fn canonical(e: &ExtensionStructure) -> Self {
        Splitting { sigma: Cochain::zero(e.b.rank, 1, e.l.dim()) }
    }

    /// From the images of the generators of `B` in `A`.
    pub fn from_section(e: &ExtensionStructure, images: &[Vector]) -> Result<Self, SpectralError> {
        let proj = e.projection();
        let nb = e.b_block();
        let mut sigma = Cochain::zero(e.b.rank, 1, e.l.dim());
        for (g, x) in images.iter().enumerate() {
            if proj.mul_vec(x) != e.b.generator(g) {
                return Err(SpectralError::NotASection);
            }
            sigma.set_on_generators(&[g], &x[nb..]);
        }
        Ok(Splitting { sigma })
    }

    /// `s(e_g)` in `A`.
    pub fn image(&self, e: &ExtensionStructure, g: usize) -> Vector {
        let mut v = e.total.generator(g);
        add_scaled(&mut v, &q(1), &e.injection().mul_vec(&self.sigma.on_generators(&[g])));
        v
    }

    /// `s + φ`.
    pub fn shifted(&self, phi: &Cochain) -> Self {
        Splitting { sigma: self.sigma.add(phi) }
    }
}

/// Coefficient module of the de Rham complex: `R` with the anchor action.
pub fn coefficients(e: &ExtensionStructure) -> RModule {
    RModule::free(&e.b.base, 1)
}

/// `Ω^r_L(R)` as an `R`-module.
pub fn n_module(e: &ExtensionStructure, r: usize) -> RModule {
    let m = coefficients(e);
    let t = binomial(e.l.rank, r);
    RModule {
        base: m.base.clone(),
        dim: t * m.dim,
        action: m.action.iter().map(|a| super::kron_identity(t, a)).collect(),
    }
}

/// `dim C^{m,r} = dim Ω^m_B ⊗ Ω^r_L`.
pub fn bigraded_dim(e: &ExtensionStructure, m: usize, r: usize) -> usize {
    binomial(e.b.rank, m) * n_module(e, r).dim
}

fn l_cochain(e: &ExtensionStructure, r: usize, u: &[Rational]) -> Cochain {
    Cochain::from_values(e.l.rank, r, e.b.base_dim(), u.to_vec())
}

/// Components `s(ξ)^{m,k-m}`, `m = 0..=k`, each an `Ω^{k-m}_L`-valued
/// `m`-form on `B`.
pub fn split_form(e: &ExtensionStructure, s: &Splitting, xi: &Cochain) -> Vec<Cochain> {
    let k = xi.degree;
    let mm = coefficients(e);
    let d = e.b.base_dim();
    let images: Vec<Vector> = (0..e.b.rank).map(|g| s.image(e, g)).collect();
    let inj = e.injection();
    (0..=k)
        .map(|m| {
            let r = k - m;
            let nr = n_module(e, r).dim;
            let mut out = Cochain::zero(e.b.rank, m, nr);
            for bt in subsets(e.b.rank, m) {
                let mut val = zero_vec(nr);
                for (li, lt) in subsets(e.l.rank, r).iter().enumerate() {
                    let mut args: Vec<Vector> = bt.iter().map(|&g| images[g].clone()).collect();
                    args.extend(lt.iter().map(|&h| inj.mul_vec(&e.l.generator(h))));
                    let v = xi.eval(&e.total, &mm, &args);
                    val[li * d..(li + 1) * d].clone_from_slice(&v);
                }
                out.set_on_generators(&bt, &val);
            }
            out
        })
        .collect()
}

/// Offsets of the components `m = 0..=k` inside the stacked split vector.
pub fn split_offsets(e: &ExtensionStructure, k: usize) -> Vec<usize> {
    let mut offs = vec![0];
    for m in 0..=k {
        let last = *offs.last().expect("nonempty");
        offs.push(last + bigraded_dim(e, m, k - m));
    }
    offs
}

/// Matrix of `ξ ↦ (s(ξ)^{0,k}, ..., s(ξ)^{k,0})`.
pub fn split_matrix(e: &ExtensionStructure, s: &Splitting, k: usize) -> MatrixQ {
    let n = FormSpace::new(e.total.rank, k, e.b.base_dim()).dim();
    let cols: Vec<Vector> = (0..n)
        .map(|j| {
            let xi = Cochain::from_values(e.total.rank, k, e.b.base_dim(), unit_vec(n, j));
            split_form(e, s, &xi).into_iter().flat_map(|c| c.values).collect()
        })
        .collect();
    let rows = *split_offsets(e, k).last().expect("nonempty");
    MatrixQ::from_columns(rows, &cols)
}

/// Inverse of [`split_form`].
pub fn reassemble(e: &ExtensionStructure, s: &Splitting, k: usize, comps: &[Cochain]) -> Option<Cochain> {
    let v: Vector = comps.iter().flat_map(|c| c.values.iter().cloned()).collect();
    let x = solve_linear(&split_matrix(e, s, k), &v)?;
    Some(Cochain::from_values(e.total.rank, k, e.b.base_dim(), x))
}

/// `d_L` applied in the `L` slots: `C^{m,r} -> C^{m,r+1}`.
pub fn d_l(e: &ExtensionStructure, m: usize, r: usize) -> MatrixQ {
    let conn = Connection::anchor_action(&e.l);
    let dl = ce_differential(&e.l, &conn, &coefficients(e), r).expect("shapes agree");
    super::kron_identity(binomial(e.b.rank, m), &dl)
}

/// The `B`-connection on `Ω^r_L(R)`:
/// `(α_s(b)·η)(l_1..l_r) = s(b)·η(l_1..l_r) - Σ_i η(.., [s(b), l_i], ..)`.
pub fn alpha_connection(e: &ExtensionStructure, s: &Splitting, r: usize) -> Connection {
    let mm = coefficients(e);
    let d = e.b.base_dim();
    let nb = e.b_block();
    let a_conn = Connection::anchor_action(&e.total);
    let inj = e.injection();
    let nr = n_module(e, r);
    let ltuples = subsets(e.l.rank, r);
    let ops = (0..e.b.rank)
        .map(|g| {
            let sg = s.image(e, g);
            let act = a_conn.operator_of(&e.total, &mm, &sg);
            let brackets: Vec<Vector> = (0..e.l.rank)
                .map(|h| e.total.bracket_of(&sg, &inj.mul_vec(&e.l.generator(h)))[nb..].to_vec())
                .collect();
            let cols: Vec<Vector> = (0..nr.dim)
                .map(|j| {
                    let eta = l_cochain(e, r, &unit_vec(nr.dim, j));
                    let mut out = zero_vec(nr.dim);
                    for (li, lt) in ltuples.iter().enumerate() {
                        let mut v = act.mul_vec(&eta.on_generators(lt));
                        for i in 0..r {
                            let args: Vec<Vector> = lt
                                .iter()
                                .enumerate()
                                .map(|(k, &h)| if k == i { brackets[h].clone() } else { e.l.generator(h) })
                                .collect();
                            add_scaled(&mut v, &q(-1), &eta.eval(&e.l, &mm, &args));
                        }
                        out[li * d..(li + 1) * d].clone_from_slice(&v);
                    }
                    out
                })
                .collect();
            FirstOrderOp { matrix: MatrixQ::from_columns(nr.dim, &cols), symbol: e.b.anchor_of(&e.b.generator(g)) }
        })
        .collect();
    Connection { ops }
}

/// `d_{α_s}: C^{m,r} -> C^{m+1,r}`.
pub fn d_alpha_split(e: &ExtensionStructure, s: &Splitting, m: usize, r: usize) -> MatrixQ {
    ce_differential(&e.b, &alpha_connection(e, s, r), &n_module(e, r), m).expect("shapes agree")
}

/// `ρ_s(b_i, b_j) = [s b_i, s b_j] - s[b_i, b_j]`.
pub fn rho_of(e: &ExtensionStructure, s: &Splitting) -> Cochain {
    let nb = e.b_block();
    let d = e.b.base_dim();
    let mut rho = Cochain::zero(e.b.rank, 2, e.l.dim());
    for t in subsets(e.b.rank, 2) {
        let br = e.total.bracket_of(&s.image(e, t[0]), &s.image(e, t[1]));
        let bb = e.b.generator_bracket(t[0], t[1]);
        // s is R-linear: s(Σ r_{gc} e_g) = Σ r_{gc} s(e_g)
        let mut sb = zero_vec(e.total.dim());
        for (k, x) in bb.iter().enumerate() {
            if x != &q(0) {
                let img = s.image(e, k / d);
                let scaled = scale_by_base(e, &img, k % d);
                add_scaled(&mut sb, x, &scaled);
            }
        }
        let diff: Vector = br.iter().zip(&sb).map(|(a, b)| a - b).collect();
        rho.set_on_generators(&t, &diff[nb..]);
    }
    rho
}

fn scale_by_base(e: &ExtensionStructure, v: &[Rational], c: usize) -> Vector {
    let d = e.b.base_dim();
    let mult = e.b.base.mult_matrix(&e.b.base.basis_vec(c));
    let mut out = zero_vec(v.len());
    for g in 0..v.len() / d {
        let w = mult.mul_vec(&v[g * d..(g + 1) * d]);
        out[g * d..(g + 1) * d].clone_from_slice(&w);
    }
    out
}

/// Shuffle sign of listing the positions `rest` before the positions `chosen`.
fn shuffle_sign(rest: &[usize], chosen: &[usize]) -> Rational {
    let mut all = rest.to_vec();
    all.extend_from_slice(chosen);
    let (_, s) = sort_with_sign(&all).expect("distinct positions");
    q(s as i64)
}

/// Inserts values built from `consumed` arguments in `B` into the first `L`
/// slots: `C^{m,r} -> C^{m+consumed, r-produced}`.
fn insertion(
    e: &ExtensionStructure,
    m: usize,
    r: usize,
    consumed: usize,
    produced: usize,
    values: impl Fn(&[usize]) -> Vec<Vector>,
) -> MatrixQ {
    let mm = coefficients(e);
    let d = e.b.base_dim();
    let src_n = n_module(e, r).dim;
    let src = FormSpace::new(e.b.rank, m, src_n);
    let Some(r2) = r.checked_sub(produced) else {
        return MatrixQ::zeros(0, src.dim());
    };
    let tgt_n = n_module(e, r2).dim;
    let tgt = FormSpace::new(e.b.rank, m + consumed, tgt_n);
    let mut out = MatrixQ::zeros(tgt.dim(), src.dim());
    if m + consumed > e.b.rank {
        return out;
    }
    let ltuples = subsets(e.l.rank, r2);
    for t in subsets(e.b.rank, m + consumed) {
        for chosen in subsets(t.len(), consumed) {
            let rest: Vec<usize> = (0..t.len()).filter(|i| !chosen.contains(i)).collect();
            let sign = shuffle_sign(&rest, &chosen);
            let rest_gens: Vec<usize> = rest.iter().map(|&i| t[i]).collect();
            let chosen_gens: Vec<usize> = chosen.iter().map(|&i| t[i]).collect();
            let inserted = values(&chosen_gens);
            for (li, lt) in ltuples.iter().enumerate() {
                let mut args = inserted.clone();
                args.extend(lt.iter().map(|&h| e.l.generator(h)));
                // the linear map N_r -> R, u ↦ u(args)
                let cols: Vec<Vector> =
                    (0..src_n).map(|j| l_cochain(e, r, &unit_vec(src_n, j)).eval(&e.l, &mm, &args)).collect();
                let block = MatrixQ::from_columns(d, &cols).scale(&sign);
                out.add_block(tgt.offset(&t) + li * d, src.offset(&rest_gens), &block);
            }
        }
    }
    out
}

/// `∧^a φ ⌣: C^{m,r} -> C^{m+a,r-a}` for an `L`-valued 1-form `φ` on `B`.
pub fn wedge_phi(e: &ExtensionStructure, phi: &Cochain, a: usize, m: usize, r: usize) -> MatrixQ {
    if a > r {
        return MatrixQ::zeros(0, bigraded_dim(e, m, r));
    }
    insertion(e, m, r, a, a, |gens| gens.iter().map(|&g| phi.on_generators(&[g])).collect())
}

/// `ρ ⌣: C^{m,r} -> C^{m+2,r-1}` for an `L`-valued 2-form `ρ` on `B`.
pub fn cup_rho(e: &ExtensionStructure, rho: &Cochain, m: usize, r: usize) -> MatrixQ {
    if r == 0 {
        return MatrixQ::zeros(0, bigraded_dim(e, m, r));
    }
    insertion(e, m, r, 2, 1, |gens| vec![rho.on_generators(gens)])
}
