//! Weight-graded Sullivan minimal models, weight assignments, positivity and
//! (α, k)-segmentation.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{Signed, ToPrimitive, Zero};

use crate::exactlin::{independent_subset, kernel_basis, q, solve, Scalar, SparseMatrix, SparseVec, Vector};
use crate::freecga::{CdgaPresentation, CgaElement, FreeCga, Generator};
use crate::freelie::{DglaPresentation, LieBasis};
use crate::graded::{CheckReport, DegreeWindow};
use crate::ooinfty::{FdAlgebra, FreeToFdMap, OoStructure};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct MinimalModel {
    pub model: CdgaPresentation,
    /// Weight-preserving quasi-isomorphism through `max_degree`.
    pub map: FreeToFdMap,
    pub max_degree: i32,
}

impl MinimalModel {
    pub fn check(&self) -> Result<CheckReport> {
        let mut r = CheckReport::new(format!("minimal model of {}", self.map.target.name));
        r.merge(self.model.check());
        r.record("minimal", self.model.is_minimal(), "differential has a linear term");
        r.merge(self.map.check());
        let iso = self.map.quasi_iso_report(DegreeWindow { min: 0, max: self.max_degree })?;
        r.record("quasi_isomorphism", iso.is_ok(), &iso.err().unwrap_or_default());
        Ok(r)
    }
}

struct Builder {
    gens: Vec<Generator>,
    d: Vec<BTreeMap<Vec<String>, Scalar>>,
    images: Vec<SparseVec>,
}

impl Builder {
    fn build(&self, target: &FdAlgebra, window: DegreeWindow) -> (CdgaPresentation, FreeToFdMap) {
        let alg = FreeCga::new(self.gens.clone()).expect("generator names are unique");
        let mut d = vec![CgaElement::zero(); alg.ngens()];
        let mut images = vec![SparseVec::new(); alg.ngens()];
        for (k, g) in self.gens.iter().enumerate() {
            let i = alg.index_of(&g.name).unwrap();
            for (word, c) in &self.d[k] {
                let mut e = alg.constant(c.clone());
                for nm in word {
                    e = alg.mul(&e, &alg.gen(alg.index_of(nm).unwrap()));
                }
                d[i].add_scaled(&Scalar::from_integer(1.into()), &e);
            }
            images[i] = self.images[k].clone();
        }
        let p = CdgaPresentation::from_parts(format!("M({})", target.name), alg, d, window);
        let f = FreeToFdMap { source: p.clone(), target: target.clone(), images };
        (p, f)
    }
}

/// Name-level copy of an element, stable under regenerating the algebra.
fn by_names(alg: &FreeCga, e: &CgaElement) -> BTreeMap<Vec<String>, Scalar> {
    let mut out = BTreeMap::new();
    for (m, c) in &e.terms {
        let mut w = Vec::new();
        for (i, &k) in m.iter().enumerate() {
            for _ in 0..k {
                w.push(alg.gens()[i].name.clone());
            }
        }
        out.insert(w, c.clone());
    }
    out
}

fn mono_image(f: &FreeToFdMap, basis: &crate::freecga::MonomialBasis, v: &[Scalar]) -> Vector {
    let mut out = vec![Scalar::zero(); f.target.dim()];
    for (j, c) in v.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        for (k, x) in f.apply(&CgaElement::from_mono(basis.monos[j].clone(), Scalar::from_integer(1.into()))) {
            out[k] += c * x;
        }
    }
    out
}

/// Degreewise minimal model of a finite algebra with `H^0 = ℚ`, `H^1 = 0`.
pub fn minimal_model_of_fd(t: &FdAlgebra, max_degree: i32) -> Result<MinimalModel> {
    let tc = t.complex();
    let h = tc.cohomology(DegreeWindow { min: 0, max: 1 });
    if h.degree_dim(0) != 1 || h.degree_dim(1) != 0 {
        return Err(Error::Precondition(format!("{} is not simply connected: H^0 has dim {}, H^1 has dim {}", t.name, h.degree_dim(0), h.degree_dim(1))));
    }
    let window = DegreeWindow { min: 0, max: max_degree + 1 };
    let mut b = Builder { gens: Vec::new(), d: Vec::new(), images: Vec::new() };
    let mut counter: HashMap<(i32, i32), usize> = HashMap::new();
    let mut fresh = |n: i32, p: i32| {
        let c = counter.entry((n, p)).or_insert(0);
        *c += 1;
        format!("v{n}_{p}_{}", *c)
    };
    let tdim = t.dim();
    let weights_of = |n: i32, cx: &crate::graded::GradedComplex| -> BTreeSet<i32> { cx.space.basis().iter().filter(|e| e.degree == n).map(|e| e.weight).collect() };
    let embed_t = |local: Vector, idx: &[usize]| -> SparseVec {
        let mut v = SparseVec::new();
        for (k, x) in local.into_iter().enumerate() {
            if !x.is_zero() {
                v.insert(idx[k], x);
            }
        }
        v
    };
    for n in 2..=max_degree {
        // Surjectivity in degree n.
        let (p0, f0) = b.build(t, window);
        let (basis, cx) = p0.complex(n - 1, n + 2);
        for p in weights_of(n, &tc) {
            let tb = tc.block(n, p);
            let mut span: Vec<Vector> = tb.coboundaries.clone();
            if !cx.space.block_indices(n, p).is_empty() {
                for z in cx.block(n, p).cocycles {
                    span.push(mono_image(&f0, &basis, &z));
                }
            }
            let mut rank = independent_subset(&span).len();
            for z in &tb.cocycles {
                span.push(z.clone());
                let r = independent_subset(&span).len();
                if r > rank {
                    rank = r;
                    b.gens.push(Generator::new(fresh(n, p), n, p));
                    b.d.push(BTreeMap::new());
                    b.images.push(crate::exactlin::dense_to_sparse(z));
                } else {
                    span.pop();
                }
            }
        }
        // Injectivity in degree n + 1.
        let (p1, f1) = b.build(t, window);
        let (basis, cx) = p1.complex(n - 1, n + 2);
        for p in weights_of(n + 1, &cx) {
            let blk = cx.block(n + 1, p);
            if blk.cocycles.is_empty() {
                continue;
            }
            let tb = tc.block(n + 1, p);
            let imgs: Vec<Vector> = blk.cocycles.iter().map(|z| mono_image(&f1, &basis, z)).collect();
            let mut cols = imgs.clone();
            cols.extend(tb.coboundaries.iter().cloned());
            let m = SparseMatrix::from_columns(tdim, &cols);
            let mdim = cx.space.dim();
            let ker: Vec<Vector> = kernel_basis(&m)
                .into_iter()
                .map(|c| {
                    let mut v = vec![Scalar::zero(); mdim];
                    for (i, z) in blk.cocycles.iter().enumerate() {
                        if !c[i].is_zero() {
                            for (x, y) in v.iter_mut().zip(z) {
                                *x += &c[i] * y;
                            }
                        }
                    }
                    v
                })
                .collect();
            let mut span = blk.coboundaries.clone();
            let mut rank = independent_subset(&span).len();
            let here = tc.space.block_indices(n, p);
            let above = tc.space.block_indices(n + 1, p);
            let dt = tc.d.select(&above, &here);
            for z in ker {
                span.push(z.clone());
                let rk = independent_subset(&span).len();
                if rk == rank {
                    span.pop();
                    continue;
                }
                rank = rk;
                let fz = mono_image(&f1, &basis, &z);
                let rhs: Vector = above.iter().map(|&i| fz[i].clone()).collect();
                let pre = solve(&dt, &rhs).ok_or_else(|| Error::Verification("kernel class is not a boundary in the target".into()))?;
                let dz = basis.element(&z);
                b.gens.push(Generator::new(fresh(n, p), n, p));
                b.d.push(by_names(&p1.algebra, &dz));
                b.images.push(embed_t(pre, &here));
            }
        }
    }
    let (model, map) = b.build(t, window);
    Ok(MinimalModel { model, map, max_degree })
}

/// Minimal model of a free CDGA via its good truncation above `max_degree`.
pub fn minimal_model(p: &CdgaPresentation, max_degree: i32) -> Result<MinimalModel> {
    if !p.is_simply_connected() {
        return Err(Error::Precondition(format!("{} is not simply connected", p.name)));
    }
    let (fd, _) = FdAlgebra::good_truncation(p, max_degree + 1)?;
    minimal_model_of_fd(&fd, max_degree)
}

pub fn assign_formality_weights(h: &FdAlgebra) -> Result<FdAlgebra> {
    h.assign_formality_weights()
}

/// Weights `w(v) = |v| - 1` on a Sullivan algebra with quadratic
/// differential: the dual of the rule `w(x) = |x|` on homotopy.
pub fn assign_coformality_weights(p: &CdgaPresentation) -> Result<CdgaPresentation> {
    let gens: Vec<Generator> = p.gens().iter().map(|g| Generator::new(g.name.clone(), g.degree, g.degree - 1)).collect();
    let alg = FreeCga::new(gens)?;
    let out = CdgaPresentation::from_parts(p.name.clone(), alg, p.d.clone(), p.window);
    let r = out.check();
    if r.get("bidegree") != Some(true) {
        return Err(Error::Precondition(format!("{} has a non-quadratic differential; coformality weights do not apply", p.name)));
    }
    Ok(out)
}

/// Weights `w(x) = |x|` on a free dgla with zero differential.
pub fn assign_coformality_weights_lie(p: &DglaPresentation) -> Result<DglaPresentation> {
    if p.d.iter().any(|e| !e.is_zero()) {
        return Err(Error::Precondition(format!("{} has nonzero differential", p.name)));
    }
    let gens: Vec<Generator> = p.gens().iter().map(|g| Generator::new(g.name.clone(), g.degree, g.degree)).collect();
    let lie = crate::freelie::FreeLie::new(gens)?;
    Ok(DglaPresentation::from_parts(p.name.clone(), lie, p.d.clone(), p.window))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Positive,
    Negative,
    Neither,
    /// Nothing outside degree zero.
    Empty,
}

impl Sign {
    pub fn name(self) -> &'static str {
        match self {
            Sign::Positive => "positive",
            Sign::Negative => "negative",
            Sign::Neither => "neither",
            Sign::Empty => "empty",
        }
    }
}

/// Classifies `(degree, weight)` pairs away from degree zero.
pub fn classify(items: impl IntoIterator<Item = (i32, i32)>) -> Sign {
    let (mut pos, mut neg, mut any) = (true, true, false);
    for (n, p) in items {
        if n == 0 {
            continue;
        }
        any = true;
        pos &= p > 0;
        neg &= p < 0;
    }
    match (any, pos, neg) {
        (false, _, _) => Sign::Empty,
        (_, true, _) => Sign::Positive,
        (_, _, true) => Sign::Negative,
        _ => Sign::Neither,
    }
}

#[derive(Clone, Debug)]
pub struct PositivityReport {
    pub generators: Sign,
    pub cohomology: Sign,
    pub window: DegreeWindow,
}

fn support(dims: &BTreeMap<(i32, i32), usize>) -> Vec<(i32, i32)> {
    dims.iter().filter(|(_, &k)| k > 0).map(|(&b, _)| b).collect()
}

pub fn positivity_cdga(p: &CdgaPresentation, window: DegreeWindow) -> Result<PositivityReport> {
    let (_, h) = p.cohomology(window)?;
    Ok(PositivityReport { generators: classify(p.gens().iter().map(|g| (g.degree, g.weight))), cohomology: classify(support(&h.dims)), window })
}

pub fn positivity_dgla(p: &DglaPresentation, window: DegreeWindow) -> Result<PositivityReport> {
    let (_, h) = p.cohomology(window)?;
    Ok(PositivityReport { generators: classify(p.gens().iter().map(|g| (g.degree, g.weight))), cohomology: classify(support(&h.dims)), window })
}

pub fn positivity_structure(s: &OoStructure) -> PositivityReport {
    let h = s.cohomology();
    PositivityReport { generators: classify(s.space.basis().iter().map(|b| (b.degree, b.weight))), cohomology: classify(support(&h.dims)), window: s.space.window() }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SegmentationReport {
    pub alpha: Option<Scalar>,
    pub k: Option<u64>,
    pub support: Vec<(i32, i32)>,
    pub passed: bool,
    pub reason: Option<String>,
}

fn min_k(sup: &[(i32, i32)], alpha: &Scalar) -> std::result::Result<u64, String> {
    let mut k = 0i64;
    for &(n, p) in sup {
        let pw = q(p as i64);
        if pw < alpha * q(n as i64) {
            return Err(format!("class at ({n},{p}) has weight below {alpha} times its degree"));
        }
        let need = (pw / alpha - q(n as i64)).ceil().to_integer().to_i64().unwrap();
        k = k.max(need);
    }
    Ok(k as u64)
}

/// Least `k` for a given `α`, or the best `(α, k)` over the support ratios
/// `p / n` when `alpha` is `None`.
pub fn segmentation(dims: &BTreeMap<(i32, i32), usize>, alpha: Option<Scalar>) -> SegmentationReport {
    let sup: Vec<(i32, i32)> = support(dims).into_iter().filter(|&(n, _)| n > 0).collect();
    let fail = |alpha: Option<Scalar>, why: String| SegmentationReport { alpha, k: None, support: sup.clone(), passed: false, reason: Some(why) };
    match alpha {
        Some(a) => {
            if !a.is_positive() {
                return fail(Some(a), "alpha must be positive".into());
            }
            match min_k(&sup, &a) {
                Ok(k) => SegmentationReport { alpha: Some(a), k: Some(k), support: sup.clone(), passed: true, reason: None },
                Err(e) => fail(Some(a), e),
            }
        }
        None => {
            if sup.is_empty() {
                return SegmentationReport { alpha: Some(q(1)), k: Some(0), support: sup, passed: true, reason: None };
            }
            let cands: BTreeSet<Scalar> = sup.iter().map(|&(n, p)| Scalar::new((p as i64).into(), (n as i64).into())).filter(|a| a.is_positive()).collect();
            let mut best: Option<(u64, Scalar)> = None;
            for a in cands {
                if let Ok(k) = min_k(&sup, &a) {
                    if best.as_ref().map_or(true, |(bk, _)| k < *bk) {
                        best = Some((k, a));
                    }
                }
            }
            match best {
                Some((k, a)) => SegmentationReport { alpha: Some(a), k: Some(k), support: sup.clone(), passed: true, reason: None },
                None => fail(None, "no positive alpha bounds the support from below".into()),
            }
        }
    }
}

/// Whether `(α, k)` holds for `dims`.
pub fn is_segmented(dims: &BTreeMap<(i32, i32), usize>, alpha: &Scalar, k: u64) -> bool {
    let r = segmentation(dims, Some(alpha.clone()));
    r.passed && r.k.unwrap() <= k
}

/// `w(x) < |x|` on generators and on every basis element in `window`.
pub fn inequality_report(items: impl IntoIterator<Item = (String, i32, i32)>) -> CheckReport {
    let mut r = CheckReport::new("weight below degree");
    let mut ok = true;
    for (label, n, p) in items {
        if p >= n {
            ok = false;
            r.fail_once("weight_below_degree", format!("{label} has weight {p} and degree {n}"));
        }
    }
    if ok {
        r.pass("weight_below_degree");
    }
    r
}

pub fn weight_degree_inequality_cdga(p: &CdgaPresentation, window: DegreeWindow) -> CheckReport {
    let a = &p.algebra;
    let mut items: Vec<(String, i32, i32)> = p.gens().iter().map(|g| (g.name.clone(), g.degree, g.weight)).collect();
    for m in a.monomials(window.min.max(1), window.max) {
        items.push((a.mono_label(&m), a.mono_degree(&m), a.mono_weight(&m)));
    }
    inequality_report(items)
}

pub fn weight_degree_inequality_dgla(p: &DglaPresentation, window: DegreeWindow) -> CheckReport {
    let mut items: Vec<(String, i32, i32)> = p.gens().iter().map(|g| (g.name.clone(), g.degree, g.weight)).collect();
    let b = LieBasis::new(&p.lie, window.min, window.max.min(-1));
    items.extend(b.slice.basis().iter().map(|e| (e.label.clone(), e.degree, e.weight)));
    inequality_report(items)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cp(k: usize) -> FdAlgebra {
        FdAlgebra::truncated_polynomial(&format!("CP{k}"), k, 2, 2)
    }

    #[test]
    fn s2_model() {
        let m = minimal_model_of_fd(&cp(1), 7).unwrap();
        let g: Vec<(i32, i32)> = m.model.gens().iter().map(|g| (g.degree, g.weight)).collect();
        assert_eq!(g, vec![(2, 2), (3, 4)]);
        assert!(m.check().unwrap().passed);
        let a = &m.model.algebra;
        let sq = a.pow(&a.gen(0), 2);
        let (mono, _) = sq.terms.iter().next().unwrap();
        assert_eq!(m.model.d[1].terms.len(), 1);
        assert!(!m.model.d[1].coeff(mono).is_zero());
    }

    #[test]
    fn cp2_model() {
        let m = minimal_model_of_fd(&cp(2), 9).unwrap();
        let g: Vec<(i32, i32)> = m.model.gens().iter().map(|g| (g.degree, g.weight)).collect();
        assert_eq!(g, vec![(2, 2), (5, 6)]);
        assert!(m.check().unwrap().passed);
        let a = &m.model.algebra;
        assert_eq!(a.bidegree(&m.model.d[1]), Some((6, 6)));
    }

    #[test]
    fn idempotent_on_minimal() {
        let m = minimal_model_of_fd(&cp(2), 9).unwrap();
        let again = minimal_model(&m.model, 8).unwrap();
        assert_eq!(again.model.generator_dims(), minimal_model(&again.model, 7).unwrap().model.generator_dims());
        assert_eq!(again.model.generator_dims().len(), 2);
    }

    #[test]
    fn wedge_model_has_nonquadratic_free_part() {
        // S^2 ∨ S^2: infinitely many generators, the low ones are checked.
        let basis = vec![
            crate::graded::BasisElement::new("1", 0, 0),
            crate::graded::BasisElement::new("a", 2, 2),
            crate::graded::BasisElement::new("b", 2, 2),
        ];
        let w = FdAlgebra::from_table("S2vS2", basis, "1", &[], &[], true).unwrap();
        let m = minimal_model_of_fd(&w, 5).unwrap();
        assert!(m.check().unwrap().passed);
        let dims = m.model.generator_dims();
        assert_eq!(dims.get(&(2, 2)), Some(&2));
        assert_eq!(dims.get(&(3, 4)), Some(&3));
    }

    #[test]
    fn rejects_non_simply_connected() {
        let a = FdAlgebra::truncated_polynomial("S1", 1, 1, 1);
        assert!(minimal_model_of_fd(&a, 4).is_err());
    }

    #[test]
    fn segmentation_rules() {
        let pure: BTreeMap<(i32, i32), usize> = [((0, 0), 1), ((2, 2), 1), ((4, 4), 1)].into();
        let r = segmentation(&pure, None);
        assert_eq!((r.alpha, r.k), (Some(q(1)), Some(0)));
        let mixed: BTreeMap<(i32, i32), usize> = [((2, 2), 1), ((3, 5), 1)].into();
        assert_eq!(segmentation(&mixed, Some(q(1))).k, Some(2));
        assert!(is_segmented(&mixed, &q(1), 3));
        let bad: BTreeMap<(i32, i32), usize> = [((2, -2), 1)].into();
        assert!(!segmentation(&bad, None).passed);
    }

    #[test]
    fn positivity() {
        let m = minimal_model_of_fd(&cp(2), 9).unwrap();
        let r = positivity_cdga(&m.model, DegreeWindow { min: 0, max: 8 }).unwrap();
        assert_eq!((r.generators, r.cohomology), (Sign::Positive, Sign::Positive));
        assert_eq!(classify([(2, 2), (3, -1)]), Sign::Neither);
        let l = crate::barcobar::quillen_dgla(&cp(2), DegreeWindow { min: -10, max: -1 }).unwrap();
        let r = positivity_dgla(&l.presentation, DegreeWindow { min: -8, max: -1 }).unwrap();
        assert_eq!((r.generators, r.cohomology), (Sign::Negative, Sign::Negative));
        assert!(weight_degree_inequality_dgla(&l.presentation, DegreeWindow { min: -8, max: -1 }).passed);
    }

    #[test]
    fn inequality_boundary_case() {
        let m = minimal_model_of_fd(&cp(1), 5).unwrap();
        assert!(!weight_degree_inequality_cdga(&m.model, DegreeWindow { min: 0, max: 4 }).passed);
        let c = assign_coformality_weights(&m.model).unwrap();
        assert!(weight_degree_inequality_cdga(&c, DegreeWindow { min: 0, max: 6 }).passed);
    }
}
