//! The PIC norm, BV–PIC equivalence constants, norm transport along
//! homeomorphisms, and disjoint-union direct sums.

use crate::curve::{is_projectable, pvar};
use crate::error::{Error, Result};
use crate::func::PlaneFunction;
use crate::geom::{classify_pair, PairContact};
use crate::mosaic::{sides_max, PicSet};
use crate::picgraph::{pushforward, HomeoMap};
use crate::variation::{var_lower, NormBracket, SearchBudget};

/// ‖f‖_PIC = ‖f‖_∞ over the sample grid plus the sum of pvar over the
/// component curves. All reported norms are grid-resolution values.
pub fn pic_norm(f: &PlaneFunction, ps: &PicSet) -> Result<f64> {
    for (i, c) in ps.curves().iter().enumerate() {
        if !is_projectable(c)? {
            return Err(Error::NotProjectable(format!(
                "curve {i} is not projectable; refine the PIC set first"
            )));
        }
    }
    let sup = f.sup_norm(&ps.all_samples())?;
    let mut total = sup;
    for c in ps.curves() {
        total += pvar(f, c)?;
    }
    Ok(total)
}

/// The equivalence constants for a PIC decomposition with M curves and
/// side-count statistic S: ‖f‖_BV ≤ K_σ·‖f‖_PIC with K_σ = M + 2(M−1)S, and
/// ‖f‖_PIC ≤ 2M·‖f‖_BV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivalenceConstants {
    /// curve count
    pub m: usize,
    /// maximum polygon side count S(𝓜)
    pub s: usize,
    /// factor in ‖f‖_PIC ≤ 2M·‖f‖_BV
    pub upper_factor: f64,
    /// K_σ = M + 2(M−1)·S
    pub k_sigma: f64,
}

impl EquivalenceConstants {
    pub fn from_counts(m: usize, s: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Empty("equivalence constants of empty decomposition".into()));
        }
        let k_sigma = m as f64 + 2.0 * (m as f64 - 1.0) * s as f64;
        Ok(EquivalenceConstants { m, s, upper_factor: 2.0 * m as f64, k_sigma })
    }
}

/// Constants for the decomposition actually in use (no optimization over
/// decompositions is attempted; the best constant is not known).
pub fn equivalence_constants(ps: &PicSet) -> Result<EquivalenceConstants> {
    EquivalenceConstants::from_counts(ps.curves().len(), sides_max(ps.mosaic())?)
}

/// Certified bracket for ‖f‖_BV = ‖f‖_∞ + var(f,σ): the lower side from the
/// variation search over the sample grid, the upper side through the PIC
/// route ‖f‖_BV ≤ K_σ·‖f‖_PIC.
pub fn bv_bracket(f: &PlaneFunction, ps: &PicSet, budget: &SearchBudget) -> Result<NormBracket> {
    bv_bracket_with_hints(f, ps, budget, &[])
}

/// [`bv_bracket`] with extra candidate domains for the lower-variation
/// search. Each hint is a point list on σ (e.g. a hand-authored list from a
/// spec file); the search runs once per hint domain, and each hint is also
/// scored verbatim, so a known good witness list certifies its own bound.
pub fn bv_bracket_with_hints(
    f: &PlaneFunction,
    ps: &PicSet,
    budget: &SearchBudget,
    hints: &[crate::variation::PointList],
) -> Result<NormBracket> {
    let samples = ps.all_samples();
    let sup = f.sup_norm(&samples)?;
    let mut vl = var_lower(f, &samples, budget)?;
    for hint in hints {
        let hinted = var_lower(f, hint.points(), budget)?;
        if hinted.value > vl.value {
            vl = hinted;
        }
    }
    let constants = equivalence_constants(ps)?;
    let upper = constants.k_sigma * pic_norm(f, ps)?;
    NormBracket::new(
        sup + vl.value,
        upper,
        vl.witness,
        format!("K_sigma ({}) * pic_norm", constants.k_sigma),
    )
}

/// |‖f‖_PIC(σ) − ‖Φ(f)‖_PIC(τ)| for Φ(f) = f∘h⁻¹. Exactly 0 on matched
/// sample grids by construction; the contract is ≤ 1e−9·(1+‖f‖_PIC(σ)).
pub fn transport_norm_check(hm: &HomeoMap, f: &PlaneFunction) -> Result<f64> {
    let n_sigma = pic_norm(f, &hm.matched.sigma)?;
    let phi = pushforward(hm, f)?;
    let n_tau = pic_norm(&phi, &hm.matched.tau)?;
    Ok((n_sigma - n_tau).abs())
}

fn check_disjoint(ps_p: &PicSet, ps_q: &PicSet) -> Result<()> {
    for (i, p) in ps_p.mosaic().polygons().iter().enumerate() {
        for (j, q) in ps_q.mosaic().polygons().iter().enumerate() {
            if !matches!(classify_pair(p, q), PairContact::Disjoint) {
                return Err(Error::NotSeparated(format!(
                    "polygon {i} of the first set meets polygon {j} of the second"
                )));
            }
        }
    }
    Ok(())
}

/// The map J: restrict `f` to the two components of a disjoint union.
pub fn direct_sum_split(
    f: &PlaneFunction,
    ps_p: &PicSet,
    ps_q: &PicSet,
) -> Result<(PlaneFunction, PlaneFunction)> {
    check_disjoint(ps_p, ps_q)?;
    let restrict = |ps: &PicSet| -> Result<PlaneFunction> {
        let pts = ps.all_samples();
        let vals = f.eval_all(&pts)?;
        PlaneFunction::from_samples(pts.into_iter().zip(vals).collect())
    };
    Ok((restrict(ps_p)?, restrict(ps_q)?))
}

/// J⁻¹: assemble a function on the disjoint union from pieces on the parts.
pub fn direct_sum_join(
    f_p: &PlaneFunction,
    ps_p: &PicSet,
    f_q: &PlaneFunction,
    ps_q: &PicSet,
) -> Result<PlaneFunction> {
    check_disjoint(ps_p, ps_q)?;
    let mut entries = Vec::new();
    for (ps, f) in [(ps_p, f_p), (ps_q, f_q)] {
        let pts = ps.all_samples();
        let vals = f.eval_all(&pts)?;
        entries.extend(pts.into_iter().zip(vals));
    }
    PlaneFunction::from_samples(entries)
}
