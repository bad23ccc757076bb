//! Tensor L∞-algebras `A ⊗ L`, Maurer–Cartan elements, twisting, connected
//! covers and mapping-space models `(A ⊗ L)^τ⟨0⟩`.
//!
//! Everything is in suspended form. On `σ(a ⊗ x)` the tensor operations are
//! `b_1 = d_A ⊗ 1 + (-1)^{|a|} 1 ⊗ b_1` and, for `m ≥ 2`,
//! `b_m(a_1⊗x_1, …) = (-1)^{Σ|a_i| + Σ_{i<j} sd(x_i)|a_j|} a_1⋯a_m ⊗ b_m(x_1, …)`.
//! A Maurer–Cartan element is a degree-one (shifted degree zero) `τ` with
//! `Σ_m b_m(τ, …, τ)/m! = 0`, and the twist is
//! `b^τ_i(x) = Σ_k b_{k+i}(τ^k, x)/k!`. For a dgla these read
//! `dτ - ½[τ,τ] = 0` and `b^τ_1 = d - [τ, -]`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{One, Zero};

use crate::barcobar::CeAlgebra;
use crate::exactlin::{axpy, kernel_basis, q, CoordinateSystem, Scalar, SparseVec, Vector};
use crate::freecga::{CdgaMorphism, CdgaPresentation, CgaElement, FreeCga, Generator};
use crate::graded::{BasisElement, CheckReport, DegreeWindow, GradedSlice};
use crate::ooinfty::{basis_vec, FdAlgebra, FreeToFdMap, Kind, OoStructure};
use crate::{Error, Result};

fn factorial(m: usize) -> Scalar {
    (1..=m as i64).fold(Scalar::one(), |a, k| a * q(k))
}

#[derive(Clone, Debug)]
pub struct TensorLinfty {
    pub structure: OoStructure,
    /// `(algebra index, Lie index)` of each basis element.
    pub pairs: Vec<(usize, usize)>,
    pub index: HashMap<(usize, usize), usize>,
    /// False when some operation left the window and was dropped.
    pub closed: bool,
}

impl TensorLinfty {
    pub fn element(&self, terms: &[((usize, usize), Scalar)]) -> SparseVec {
        let mut v = SparseVec::new();
        for (p, c) in terms {
            if let Some(&i) = self.index.get(p) {
                axpy(&mut v, c, &basis_vec(i));
            }
        }
        v
    }
}

/// `A ⊗ L` on the pairs whose degree lies in `window` (all pairs when `None`).
pub fn tensor_linfty(a: &FdAlgebra, l: &OoStructure, window: Option<DegreeWindow>) -> Result<TensorLinfty> {
    if l.kind != Kind::Lie {
        return Err(Error::Precondition("tensor product needs an L-infinity structure".into()));
    }
    if !a.is_connected() {
        return Err(Error::Precondition(format!("{} is not connected", a.name)));
    }
    let mut elems = Vec::new();
    let mut pairs = Vec::new();
    let mut index = HashMap::new();
    for i in 0..a.dim() {
        for j in 0..l.dim() {
            let deg = a.space.degree(i) + l.space.degree(j);
            if window.map_or(true, |w| w.contains(deg)) {
                index.insert((i, j), pairs.len());
                pairs.push((i, j));
                let al = a.space.label(i);
                let label = if i == a.unit { l.space.label(j).to_string() } else { format!("{al}⊗{}", l.space.label(j)) };
                elems.push(BasisElement::new(label, deg, a.space.weight(i) + l.space.weight(j)));
            }
        }
    }
    let win = window.unwrap_or_else(|| {
        let lo = elems.iter().map(|e| e.degree).min().unwrap_or(0);
        let hi = elems.iter().map(|e| e.degree).max().unwrap_or(0);
        DegreeWindow { min: lo, max: hi }
    });
    let space = GradedSlice::new(elems, win)?;
    let mut s = OoStructure::new(Kind::Lie, space, l.arity_bound);
    s.complete = l.complete;
    let mut closed = true;
    let adeg = |i: usize| a.space.degree(i);
    let put = |acc: &mut SparseVec, ai: usize, lv: &SparseVec, coef: &Scalar, closed: &mut bool| {
        for (&j, c) in lv {
            match index.get(&(ai, j)) {
                Some(&k) => axpy(acc, &(coef * c), &basis_vec(k)),
                None => *closed = false,
            }
        }
    };
    // b_1.
    for (k, &(i, j)) in pairs.iter().enumerate() {
        let mut v = SparseVec::new();
        for (&ai, c) in &a.apply_d(&basis_vec(i)) {
            put(&mut v, ai, &basis_vec(j), c, &mut closed);
        }
        let lb = l.eval_basis(1, &[j]);
        let sgn = if adeg(i).rem_euclid(2) == 1 { -Scalar::one() } else { Scalar::one() };
        put(&mut v, i, &lb, &sgn, &mut closed);
        s.op_mut(1).set(vec![k], v);
    }
    // Higher operations, tuple by tuple of the Lie factor.
    for (&m, op) in &l.ops {
        if m < 2 {
            continue;
        }
        let mut out: BTreeMap<Vec<usize>, SparseVec> = BTreeMap::new();
        for (lt, lv) in &op.values {
            // Algebra tuples with nonzero product.
            let mut stack: Vec<(Vec<usize>, SparseVec)> = vec![(Vec::new(), a.one())];
            while let Some((at, prod)) = stack.pop() {
                if at.len() == m {
                    let mut e: i32 = at.iter().map(|&i| adeg(i)).sum();
                    for x in 0..m {
                        for y in x + 1..m {
                            e += l.sd(lt[x]) * adeg(at[y]);
                        }
                    }
                    let tuple: Option<Vec<usize>> = at.iter().zip(lt).map(|(&ai, &lj)| index.get(&(ai, lj)).copied()).collect();
                    let Some(tuple) = tuple else { continue };
                    let mut v = SparseVec::new();
                    let sgn = if e.rem_euclid(2) == 1 { -Scalar::one() } else { Scalar::one() };
                    for (&ai, c) in &prod {
                        put(&mut v, ai, lv, &(&sgn * c), &mut closed);
                    }
                    let slot = out.entry(tuple).or_default();
                    axpy(slot, &Scalar::one(), &v);
                    continue;
                }
                for ai in 0..a.dim() {
                    let next = a.mul(&prod, &basis_vec(ai));
                    if !next.is_empty() {
                        let mut t = at.clone();
                        t.push(ai);
                        stack.push((t, next));
                    }
                }
            }
        }
        for (t, v) in out {
            s.op_mut(m).set(t, v);
        }
    }
    Ok(TensorLinfty { structure: s, pairs, index, closed })
}

#[derive(Clone, Debug, PartialEq)]
pub struct McElement {
    pub tau: SparseVec,
    pub weight_zero: bool,
}

fn series_certified(s: &OoStructure) -> bool {
    s.complete || s.ops_vanish_above(s.arity_bound)
}

/// `Σ_m b_m(τ^m)/m!`.
pub fn curvature(s: &OoStructure, tau: &SparseVec) -> SparseVec {
    let mut out = SparseVec::new();
    for (&m, op) in &s.ops {
        if op.is_zero() {
            continue;
        }
        let args: Vec<&SparseVec> = vec![tau; m];
        let v = op.eval(&args);
        axpy(&mut out, &(Scalar::one() / factorial(m)), &v);
    }
    out
}

pub fn verify_mc(s: &OoStructure, tau: &SparseVec) -> Result<McElement> {
    if s.kind != Kind::Lie {
        return Err(Error::Precondition("MC elements live in L-infinity structures".into()));
    }
    if let Some(&i) = tau.keys().find(|&&i| s.space.degree(i) != 1) {
        return Err(Error::BidegreeViolation(format!("tau has a component on {} of degree {}", s.space.label(i), s.space.degree(i))));
    }
    if !series_certified(s) {
        return Err(Error::InsufficientSlack(format!("operations above arity {} are not known to vanish", s.arity_bound)));
    }
    let c = curvature(s, tau);
    if let Some((&i, x)) = c.iter().next() {
        return Err(Error::Verification(format!("MC equation fails: coefficient {x} on {}", s.space.label(i))));
    }
    let weight_zero = tau.keys().all(|&i| s.space.weight(i) == 0);
    Ok(McElement { tau: tau.clone(), weight_zero })
}

/// `τ = Σ_j φ(c_j) ⊗ x_j` for a cdga map `φ: 𝒜_CE(L) → A`.
pub fn mc_from_cdga_map(t: &TensorLinfty, ce: &CeAlgebra, phi: &FreeToFdMap) -> Result<McElement> {
    let r = phi.check();
    if r.get("chain_map") != Some(true) || r.get("degree") != Some(true) {
        return Err(Error::Verification(format!("not a cdga map: {}", r.witness.unwrap_or_default())));
    }
    let mut terms = Vec::new();
    for (j, &g) in ce.generator_of.iter().enumerate() {
        for (&ai, c) in &phi.images[g] {
            terms.push(((ai, j), -c.clone()));
        }
    }
    let tau = t.element(&terms);
    let mut m = verify_mc(&t.structure, &tau)?;
    m.weight_zero = r.get("weight_preserving") == Some(true);
    Ok(m)
}

/// Inverse of [`mc_from_cdga_map`].
pub fn phi_from_mc(t: &TensorLinfty, ce: &CeAlgebra, a: &FdAlgebra, tau: &McElement) -> FreeToFdMap {
    let mut images = vec![SparseVec::new(); ce.presentation.gens().len()];
    for (&k, c) in &tau.tau {
        let (ai, j) = t.pairs[k];
        axpy(&mut images[ce.generator_of[j]], &-c.clone(), &basis_vec(ai));
    }
    FreeToFdMap { source: ce.presentation.clone(), target: a.clone(), images }
}

/// Tuples of length `i` in canonical (sorted) form with an occupied output bidegree.
fn sorted_tuples(s: &OoStructure, i: usize) -> Vec<Vec<usize>> {
    s.relevant_tuples(i, 1)
}

pub fn twist(s: &OoStructure, tau: &McElement) -> Result<OoStructure> {
    if !series_certified(s) {
        return Err(Error::InsufficientSlack("the twisting series is not certified to stop".into()));
    }
    let mut out = OoStructure::new(Kind::Lie, s.space.clone(), s.arity_bound);
    out.complete = s.complete;
    if tau.tau.is_empty() {
        out.ops = s.ops.clone();
        return Ok(out);
    }
    let top = s.max_nonzero_arity();
    for i in 1..=top {
        for t in sorted_tuples(s, i) {
            let mut acc = SparseVec::new();
            for k in 0..=(top - i) {
                let m = k + i;
                if s.op_is_zero(m) {
                    continue;
                }
                let basis: Vec<SparseVec> = t.iter().map(|&x| basis_vec(x)).collect();
                let mut args: Vec<&SparseVec> = vec![&tau.tau; k];
                args.extend(basis.iter());
                let v = s.eval(m, &args);
                axpy(&mut acc, &(Scalar::one() / factorial(k)), &v);
            }
            if !acc.is_empty() {
                out.set_symmetric(i, &t, acc);
            }
        }
    }
    Ok(out)
}

/// `L⟨n⟩`: degrees below `n`, the cycles of `b_1` in degree `n`, nothing above.
pub fn connected_cover(s: &OoStructure, n: i32) -> Result<OoStructure> {
    let dim = s.dim();
    let d = s.b1_matrix();
    let mut elems: Vec<BasisElement> = Vec::new();
    let mut vecs: Vec<SparseVec> = Vec::new();
    for i in 0..dim {
        if s.space.degree(i) < n {
            elems.push(s.space.element(i).clone());
            vecs.push(basis_vec(i));
        }
    }
    let weights: BTreeSet<i32> = s.space.basis().iter().filter(|b| b.degree == n).map(|b| b.weight).collect();
    for p in weights {
        let here = s.space.block_indices(n, p);
        let above = s.space.block_indices(n + 1, p);
        let local = d.select(&above, &here);
        for (c, v) in kernel_basis(&local).into_iter().enumerate() {
            let mut sv = SparseVec::new();
            for (k, x) in v.into_iter().enumerate() {
                if !x.is_zero() {
                    sv.insert(here[k], x);
                }
            }
            let lead = *sv.keys().next().unwrap();
            let label = if here.len() == 1 { s.space.label(lead).to_string() } else { format!("z{n}_{p}_{}", c + 1) };
            elems.push(BasisElement::new(label, n, p));
            vecs.push(sv);
        }
    }
    let hi = if elems.iter().any(|e| e.degree == n) { n } else { elems.iter().map(|e| e.degree).max().unwrap_or(n).min(n) };
    let lo = elems.iter().map(|e| e.degree).min().unwrap_or(hi).min(hi);
    let space = GradedSlice::new(elems, DegreeWindow { min: lo, max: hi })?;
    let nd = space.dim();
    let dense: Vec<Vector> = vecs.iter().map(|v| crate::exactlin::sparse_to_dense(v, dim)).collect();
    let cs = CoordinateSystem::new(dim, dense);
    let mut out = OoStructure::new(Kind::Lie, space, s.arity_bound);
    out.complete = s.complete;
    for (&m, op) in &s.ops {
        if op.is_zero() {
            continue;
        }
        for t in out.relevant_tuples(m, 1).into_iter().chain(if m == 1 { Vec::new() } else { Vec::new() }) {
            let args: Vec<&SparseVec> = t.iter().map(|&x| &vecs[x]).collect();
            let v = s.eval(m, &args);
            if v.is_empty() {
                continue;
            }
            let dv = crate::exactlin::sparse_to_dense(&v, dim);
            let c = cs.coords(&dv).ok_or_else(|| Error::Verification(format!("b{m} leaves the cover on {:?}", out.labels(&t))))?;
            let sv = crate::exactlin::dense_to_sparse(&c);
            out.set_symmetric(m, &t, sv);
        }
        // Tuples whose output bidegree is absent from the cover must vanish.
        for t in crate::ooinfty::all_tuples(nd, m).into_iter().filter(|t| t.windows(2).all(|w| w[0] <= w[1])) {
            if out.op(m).and_then(|o| o.get(&t)).is_some() {
                continue;
            }
            let args: Vec<&SparseVec> = t.iter().map(|&x| &vecs[x]).collect();
            if !s.eval(m, &args).is_empty() {
                return Err(Error::Verification(format!("b{m} leaves the cover on {:?}", out.labels(&t))));
            }
        }
    }
    Ok(out)
}

/// `(A ⊗ L)^τ⟨0⟩`.
pub fn mapping_space_model(a: &FdAlgebra, l: &OoStructure, tau: &McElement) -> Result<OoStructure> {
    if !tau.weight_zero {
        return Err(Error::Precondition("tau must have weight zero".into()));
    }
    let t = tensor_linfty(a, l, None)?;
    let tw = twist(&t.structure, tau)?;
    connected_cover(&tw, 0)
}

/// Minimal L∞ model of `ℂP^m`: `x` in `(-1, -2)`, `y` in `(-2m, -2m-2)` and
/// `b_{m+1}(x, …, x) = -(m+1)! y`, so that its CE algebra is `Λ(c_x, c_y)`
/// with `d c_y = c_x^{m+1}`.
pub fn cp_minimal_linfty(m: usize) -> OoStructure {
    let mi = m as i32;
    let space = GradedSlice::new(vec![BasisElement::new("x", -1, -2), BasisElement::new("y", -2 * mi, -2 * mi - 2)], DegreeWindow { min: -2 * mi, max: -1 }).unwrap();
    let mut s = OoStructure::new(Kind::Lie, space, m + 1);
    s.op_mut(m + 1).set(vec![0; m + 1], crate::ooinfty::sv(&[(1, -factorial(m + 1))]));
    s.complete = true;
    s
}

/// The embedding `ℂP^k → ℂP^{k+n}` modelled by the projection of cohomology.
#[derive(Clone, Debug)]
pub struct EmbeddingExample {
    pub source: FdAlgebra,
    pub target: OoStructure,
    pub tensor: TensorLinfty,
    pub ce: CeAlgebra,
    pub phi: FreeToFdMap,
    pub tau: McElement,
    pub model: OoStructure,
}

pub fn cp_embedding_example(k: usize, n: usize) -> Result<EmbeddingExample> {
    let a = FdAlgebra::truncated_polynomial(&format!("CP{k}"), k, 2, 2);
    let l = cp_minimal_linfty(k + n);
    let ce = crate::barcobar::ce_algebra(&l, DegreeWindow { min: 0, max: 4 * (k + n) as i32 + 4 })?;
    let mut images = vec![SparseVec::new(); ce.presentation.gens().len()];
    images[ce.generator_of[0]] = basis_vec(a.space.index_of("u").unwrap());
    let phi = FreeToFdMap { source: ce.presentation.clone(), target: a.clone(), images };
    let tensor = tensor_linfty(&a, &l, None)?;
    let tau = mc_from_cdga_map(&tensor, &ce, &phi)?;
    let model = mapping_space_model(&a, &l, &tau)?;
    Ok(EmbeddingExample { source: a, target: l, tensor, ce, phi, tau, model })
}

/// `Λ(z, y_n, …, y_{n+k})`, `dz = 0`, `d y_r = z^{r+1}`, `w(z) = 2`, `w(y_r) = 2r + 2`.
pub fn mapping_algebra(n: usize, k: usize, window_max: i32) -> CdgaPresentation {
    let mut gens = vec![Generator::new("z", 2, 2)];
    for r in n..=n + k {
        gens.push(Generator::new(format!("y{r}"), 2 * r as i32 + 1, 2 * r as i32 + 2));
    }
    let alg = FreeCga::new(gens).unwrap();
    let z = alg.gen(alg.index_of("z").unwrap());
    let mut d = BTreeMap::new();
    for r in n..=n + k {
        d.insert(format!("y{r}"), alg.pow(&z, r as u32 + 1));
    }
    let gens = alg.gens().to_vec();
    CdgaPresentation::new(format!("map({n},{k})"), gens, &d, DegreeWindow { min: 0, max: window_max }).unwrap()
}

/// `Λ(z, y_n, w_{n+1}, …, w_{n+k})` with `d y_n = z^{n+1}` and `dw = 0`.
pub fn formal_mapping_algebra(n: usize, k: usize, window_max: i32) -> CdgaPresentation {
    let mut gens = vec![Generator::new("z", 2, 2), Generator::new(format!("y{n}"), 2 * n as i32 + 1, 2 * n as i32 + 2)];
    for r in n + 1..=n + k {
        gens.push(Generator::new(format!("w{r}"), 2 * r as i32 + 1, 2 * r as i32 + 2));
    }
    let alg = FreeCga::new(gens).unwrap();
    let z = alg.gen(alg.index_of("z").unwrap());
    let mut d = BTreeMap::new();
    d.insert(format!("y{n}"), alg.pow(&z, n as u32 + 1));
    let gens = alg.gens().to_vec();
    CdgaPresentation::new(format!("formal({n},{k})"), gens, &d, DegreeWindow { min: 0, max: window_max }).unwrap()
}

/// `φ(y_{n+i}) = w_{n+i} + z^i y_n` and `ψ(w_{n+i}) = y_{n+i} - z^i y_n`.
pub fn formality_maps(n: usize, k: usize, window_max: i32) -> Result<(CdgaMorphism, CdgaMorphism)> {
    let src = mapping_algebra(n, k, window_max);
    let tgt = formal_mapping_algebra(n, k, window_max);
    let (sa, ta) = (&src.algebra, &tgt.algebra);
    let g = |a: &FreeCga, nm: &str| a.gen(a.index_of(nm).unwrap());
    let mut phi = BTreeMap::new();
    phi.insert("z".to_string(), g(ta, "z"));
    phi.insert(format!("y{n}"), g(ta, &format!("y{n}")));
    let mut psi = BTreeMap::new();
    psi.insert("z".to_string(), g(sa, "z"));
    psi.insert(format!("y{n}"), g(sa, &format!("y{n}")));
    for i in 1..=k {
        let r = n + i;
        let zt = ta.pow(&g(ta, "z"), i as u32);
        phi.insert(format!("y{r}"), g(ta, &format!("w{r}")).add(&ta.mul(&zt, &g(ta, &format!("y{n}")))));
        let zs = sa.pow(&g(sa, "z"), i as u32);
        psi.insert(format!("w{r}"), g(sa, &format!("y{r}")).sub(&sa.mul(&zs, &g(sa, &format!("y{n}")))));
    }
    Ok((CdgaMorphism::new(src.clone(), tgt.clone(), &phi)?, CdgaMorphism::new(tgt, src, &psi)?))
}

/// Both maps are cdga maps and `ψ ∘ φ`, `φ ∘ ψ` are the identity on generators.
pub fn formality_check(n: usize, k: usize) -> Result<CheckReport> {
    let (phi, psi) = formality_maps(n, k, 4 * (n + k) as i32 + 8)?;
    let mut r = CheckReport::new(format!("formality maps ({n},{k})"));
    r.merge(phi.check());
    r.merge(psi.check());
    r.record("psi_phi_identity", psi.compose(&phi).is_identity_on_generators(), "psi after phi is not the identity");
    r.record("phi_psi_identity", phi.compose(&psi).is_identity_on_generators(), "phi after psi is not the identity");
    Ok(r)
}

/// Homotopy of `Λ(z, y_n, …, y_{n+k})` as Lie degrees and weights.
pub fn mapping_homotopy(n: usize, k: usize) -> BTreeMap<(i32, i32), usize> {
    let mut out = BTreeMap::new();
    out.insert((-1, -2), 1);
    for r in n..=n + k {
        *out.entry((-2 * r as i32, -(2 * r as i32 + 2))).or_insert(0) += 1;
    }
    out
}

/// A generator-level cdga element, for building maps by hand.
pub fn gen_element(a: &FreeCga, name: &str) -> Option<CgaElement> {
    a.index_of(name).map(|i| a.gen(i))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ooinfty::sv;

    fn s3() -> FdAlgebra {
        FdAlgebra::truncated_polynomial("S3", 1, 3, 3)
    }

    #[test]
    fn unit_tensor_is_a_copy() {
        let l = cp_minimal_linfty(2);
        let q1 = FdAlgebra::truncated_polynomial("pt", 0, 2, 2);
        let t = tensor_linfty(&q1, &l, None).unwrap();
        for m in 1..=3 {
            for tup in crate::ooinfty::all_tuples(2, m) {
                assert_eq!(t.structure.eval_basis(m, &tup), l.eval_basis(m, &tup));
            }
        }
    }

    #[test]
    fn tensor_relations_with_odd_factors() {
        // H*(S^3) ⊗ (CP^2 model) has odd elements on both sides of the interchange.
        let l = cp_minimal_linfty(2);
        let t = tensor_linfty(&s3(), &l, None).unwrap();
        assert!(t.closed);
        assert!(t.structure.check_relations(5).passed, "{:?}", t.structure.check_relations(5));
        let cp1 = FdAlgebra::truncated_polynomial("CP1", 1, 2, 2);
        let big = crate::barcobar::dgla_good_truncation(&crate::barcobar::quillen_dgla(&cp1.tensor(&s3()), DegreeWindow { min: -8, max: -1 }).unwrap().presentation, 5).unwrap();
        let t = tensor_linfty(&s3(), &big.structure, None).unwrap();
        assert!(t.structure.check_relations(3).passed, "{:?}", t.structure.check_relations(3));
    }

    #[test]
    fn interchange_sign() {
        // b_2(1⊗x, e⊗x) with |e| odd.
        let a = s3();
        let space = GradedSlice::new(vec![BasisElement::new("x", -1, 0), BasisElement::new("y", -2, 0)], DegreeWindow { min: -2, max: -1 }).unwrap();
        let mut l = OoStructure::new(Kind::Lie, space, 2);
        l.set_symmetric(2, &[0, 0], sv(&[(1, q(1))]));
        l.complete = true;
        let t = tensor_linfty(&a, &l, None).unwrap();
        let one_x = t.index[&(a.unit, 0)];
        let e_x = t.index[&(1, 0)];
        let v = t.structure.eval_basis(2, &[one_x, e_x]);
        let target = t.index[&(1, 1)];
        // Σ|a_i| = 3 and sd(x) is even, so both orders give −1.
        assert_eq!(v, sv(&[(target, q(-1))]));
        let w = t.structure.eval_basis(2, &[e_x, one_x]);
        assert_eq!(w, sv(&[(target, q(-1))]));
    }

    #[test]
    fn zero_is_mc_and_twist_is_identity() {
        let l = cp_minimal_linfty(2);
        let a = FdAlgebra::truncated_polynomial("CP1", 1, 2, 2);
        let t = tensor_linfty(&a, &l, None).unwrap();
        let m = verify_mc(&t.structure, &SparseVec::new()).unwrap();
        assert!(m.weight_zero);
        assert_eq!(twist(&t.structure, &m).unwrap().ops, t.structure.ops);
    }

    #[test]
    fn embedding_example() {
        for (k, n) in [(1, 1), (1, 2), (2, 1)] {
            let ex = cp_embedding_example(k, n).unwrap();
            assert!(ex.tau.weight_zero);
            assert!(ex.model.check_relations(4).passed);
            let back = phi_from_mc(&ex.tensor, &ex.ce, &ex.source, &ex.tau);
            assert_eq!(back.images, ex.phi.images);
            let h = ex.model.cohomology();
            let got: BTreeMap<(i32, i32), usize> = h.dims.into_iter().filter(|(_, v)| *v > 0).collect();
            assert_eq!(got, mapping_homotopy(n, k));
        }
    }

    #[test]
    fn mc_from_dgla_map() {
        // A degree-one element built from a map into H*(S^2)⊗H*(S^2) solves the dgla equation.
        let s2 = FdAlgebra::truncated_polynomial("S2", 1, 2, 2);
        let a = s2.tensor(&s2);
        let l = crate::barcobar::quillen_dgla(&s2, DegreeWindow { min: -6, max: -1 }).unwrap();
        let tr = crate::barcobar::dgla_good_truncation(&l.presentation, 4).unwrap();
        let ce = crate::barcobar::ce_algebra(&tr.structure, DegreeWindow { min: 0, max: 8 }).unwrap();
        let t = tensor_linfty(&a, &tr.structure, None).unwrap();
        // c_v ↦ u⊗1 squares to zero, so the other generators may go to zero.
        let mut images = vec![SparseVec::new(); ce.presentation.gens().len()];
        let u1 = a.space.index_of("u⊗1").unwrap();
        let v = tr.structure.space.index_of("s_u").unwrap();
        images[ce.generator_of[v]] = sv(&[(u1, q(1))]);
        let phi = FreeToFdMap { source: ce.presentation.clone(), target: a.clone(), images };
        let m = mc_from_cdga_map(&t, &ce, &phi).unwrap();
        assert!(m.weight_zero);
        let tw = twist(&t.structure, &m).unwrap();
        assert!(tw.check_relations(3).passed);
    }

    #[test]
    fn non_solution_is_rejected() {
        let ex = cp_embedding_example(1, 1).unwrap();
        let s = FdAlgebra::truncated_polynomial("S2", 1, 2, 2);
        let l = crate::barcobar::quillen_dgla(&s, DegreeWindow { min: -6, max: -1 }).unwrap();
        let tr = crate::barcobar::dgla_good_truncation(&l.presentation, 4).unwrap();
        let t = tensor_linfty(&s.tensor(&s), &tr.structure, None).unwrap();
        let i = t.structure.space.index_of("u⊗1⊗s_u").unwrap_or_else(|| (0..t.structure.dim()).find(|&i| t.structure.space.degree(i) == 1).unwrap());
        let j = (0..t.structure.dim()).find(|&j| j != i && t.structure.space.degree(j) == 1 && t.structure.space.label(j).contains("1⊗u")).unwrap();
        let bad = sv(&[(i, q(1)), (j, q(1))]);
        assert!(verify_mc(&t.structure, &bad).is_err());
        assert!(ex.model.dim() > 0);
    }

    #[test]
    fn cover_kernel() {
        // x in degree 0 with b_1 x = y in degree 1; a second degree-0 cycle z.
        let space = GradedSlice::new(vec![BasisElement::new("w", -1, 0), BasisElement::new("x", 0, 0), BasisElement::new("z", 0, 0), BasisElement::new("y", 1, 0)], DegreeWindow { min: -1, max: 1 }).unwrap();
        let mut s = OoStructure::new(Kind::Lie, space, 2);
        s.op_mut(1).set(vec![1], sv(&[(3, q(1))]));
        s.complete = true;
        let c = connected_cover(&s, 0).unwrap();
        assert_eq!(c.space.dims().get(&(0, 0)), Some(&1));
        assert_eq!(c.dim(), 2);
        let same = connected_cover(&s, 5).unwrap();
        assert_eq!(same.dim(), 4);
    }

    #[test]
    fn formality_maps_compose() {
        for (n, k) in [(1, 1), (2, 1), (1, 2)] {
            let r = formality_check(n, k).unwrap();
            assert!(r.passed, "{r:?}");
        }
    }
}
