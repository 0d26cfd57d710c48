use super::{half, Coupling, ExtensionError, LiftingPair};
use crate::linalg::{is_zero_vec, q, solve_linear, unit_vec, MatrixQ, Subquotient, Vector};
use crate::lr::{
    ad_form, ce_differential, cohomology, curvature, graded_bracket, shift_connection, subsets, Cochain, Connection,
};

/// Lifts the coupling: each outer representative is replaced by the chosen
/// representative of its class in `Out_D(L)`, then `ρ` is solved from
/// `ad_ρ = F_α`.
pub fn lift_coupling(c: &Coupling) -> Result<LiftingPair, ExtensionError> {
    let subs = &c.subobjects;
    let ops = c
        .outer
        .iter()
        .map(|op| {
            let coords = subs.out_d.class_of(&subs.flatten_op(op)).expect("representative lies in Der_D");
            subs.to_op(&subs.out_d.lift(&coords))
        })
        .collect();
    let alpha = Connection { ops };
    let rho = solve_rho(c, &alpha)?;
    Ok(LiftingPair { alpha, rho })
}

/// Some `ρ` with `ad_ρ = F_α`.
pub fn solve_rho(c: &Coupling, alpha: &Connection) -> Result<Cochain, ExtensionError> {
    let n = c.l.dim();
    let ad_cols: Vec<Vector> = (0..n).map(|k| c.l.ad_matrix(&unit_vec(n, k)).flatten()).collect();
    let ad = MatrixQ::from_columns(n * n, &ad_cols);
    let f = curvature(&c.b, alpha, &c.l_module());
    let mut rho = Cochain::zero(c.b.rank, 2, n);
    for t in subsets(c.b.rank, 2) {
        let x = solve_linear(&ad, &f.on_generators(&t)).ok_or(ExtensionError::NoRhoSolution)?;
        rho.set_on_generators(&t, &x);
    }
    Ok(rho)
}

/// `λ = d_α ρ`, returned in center coordinates.
pub fn obstruction_cochain(c: &Coupling, pair: &LiftingPair) -> Result<Cochain, ExtensionError> {
    let lambda = c.d_alpha(&pair.alpha, &pair.rho);
    let z = c.to_center(&lambda)?;
    debug_assert!(c.d_center(&pair.alpha, &z).is_zero());
    Ok(z)
}

/// `(α + ad_φ, ρ + d_α φ + ½[φ, φ])`.
pub fn change_lifting_pair(c: &Coupling, pair: &LiftingPair, phi: &Cochain) -> LiftingPair {
    let alpha = shift_connection(&c.l, &pair.alpha, phi);
    let rho = pair.rho.add(&c.d_alpha(&pair.alpha, phi)).add(&graded_bracket(&c.l, phi, phi).scale(&half()));
    LiftingPair { alpha, rho }
}

/// `d_{α'} η - d_α η - [φ, η]` for `α' = α + ad_φ`.
pub fn differential_shift_check(
    c: &Coupling,
    alpha: &Connection,
    alpha_shifted: &Connection,
    phi: &Cochain,
    eta: &Cochain,
) -> Cochain {
    let d1 = c.d_alpha(alpha_shifted, eta);
    let d0 = c.d_alpha(alpha, eta);
    d1.add(&d0.scale(&q(-1))).add(&graded_bracket(&c.l, phi, eta).scale(&q(-1)))
}

#[derive(Debug, Clone)]
pub struct ObstructionClass {
    /// The obstruction cochain of the chosen lift, in center coordinates.
    pub lambda: Cochain,
    pub pair: LiftingPair,
    pub h3: Subquotient,
    /// Coordinates of the class in the representative basis of `h3`.
    pub coords: Vector,
    /// A center-valued 2-form `w` with `d_ᾱ w = λ` when the class vanishes.
    pub witness: Option<Cochain>,
    /// Whether recomputation with a perturbed lifting pair gave the same class.
    pub independent_of_pair: bool,
}

impl ObstructionClass {
    pub fn is_zero(&self) -> bool {
        is_zero_vec(&self.coords)
    }
}

pub fn obstruction_class(c: &Coupling) -> Result<ObstructionClass, ExtensionError> {
    obstruction_class_of(c, lift_coupling(c)?)
}

/// The obstruction class computed from a given lifting pair.
pub fn obstruction_class_of(c: &Coupling, pair: LiftingPair) -> Result<ObstructionClass, ExtensionError> {
    let lambda = obstruction_cochain(c, &pair)?;
    let zc = c.center_connection(&pair.alpha);
    let zm = c.center_module();
    let h3 = cohomology(&c.b, &zc, zm, 3)?;
    let coords = h3.class_of(&lambda.values).expect("obstruction cochain is closed");

    let witness = if is_zero_vec(&coords) {
        let d2 = ce_differential(&c.b, &zc, zm, 2)?;
        solve_linear(&d2, &lambda.values).map(|w| Cochain::from_values(c.b.rank, 2, zm.dim, w))
    } else {
        None
    };

    let perturbed = perturb(c, &pair);
    let lambda2 = obstruction_cochain(c, &perturbed)?;
    let independent_of_pair = h3.class_of(&lambda2.values).as_ref() == Some(&coords);

    Ok(ObstructionClass { lambda, pair, h3, coords, witness, independent_of_pair })
}

/// A different lifting pair of the same coupling: shifted by a fixed 1-form
/// and with a central 2-form added to `ρ`.
fn perturb(c: &Coupling, pair: &LiftingPair) -> LiftingPair {
    let nl = c.l.dim();
    let mut phi = Cochain::zero(c.b.rank, 1, nl);
    for i in 0..c.b.rank {
        if nl > 0 {
            phi.set_on_generators(&[i], &unit_vec(nl, (i + 1) % nl));
        }
    }
    let mut p = change_lifting_pair(c, pair, &phi);
    let zdim = c.subobjects.center.dim();
    if zdim > 0 && c.b.rank >= 2 {
        let mut z = Cochain::zero(c.b.rank, 2, zdim);
        z.values[0] = q(1);
        p.rho = p.rho.add(&c.embed_center(&z));
    }
    debug_assert!(ad_form(&c.l, &p.rho) == curvature(&c.b, &p.alpha, &c.l_module()));
    p
}
