//! Chevalley–Eilenberg algebras, the Quillen construction, and the two
//! adjunction maps `q_a`, `q_ℓ` checked on degree windows.
//!
//! A dgla is made finite by the good truncation `L / (L^{<-N} ⊕ B^{-N})`,
//! which is a quasi-isomorphism in degrees `≥ -N`. Strict dglas become
//! L∞-structures with `b_1 = d` and `b_2(x, y) = (-1)^{|x|}[x, y]`.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use crate::exactlin::{axpy, complement_indices, independent_subset, inverse, q, Scalar, SparseMatrix, SparseVec, Vector};
use crate::freecga::{CdgaPresentation, CgaElement, FreeCga, Generator};
use crate::freelie::{is_lyndon, DglaPresentation, FreeLie, LieBasis, LieElement};
use crate::graded::{BasisElement, CheckReport, DegreeWindow, GradedSlice};
use crate::ooinfty::{iso_report, FdAlgebra, FreeToFdMap, Kind, OoStructure};
use crate::{Error, Result};

/// A dgla made finite in degrees `[-N, -1]`.
#[derive(Clone, Debug)]
pub struct DglaTruncation {
    pub presentation: DglaPresentation,
    pub top: i32,
    pub basis: LieBasis,
    pub structure: OoStructure,
    /// Lie basis index of each quotient basis element.
    pub kept: Vec<usize>,
    proj: Vec<SparseVec>,
}

impl DglaTruncation {
    /// Image of a Lie element in the quotient.
    pub fn project(&self, e: &LieElement) -> Result<SparseVec> {
        let c = self.basis.coords(&self.presentation.lie, e, true)?;
        let mut out = SparseVec::new();
        for (i, x) in c {
            axpy(&mut out, &x, &self.proj[i]);
        }
        Ok(out)
    }
}

pub fn dgla_good_truncation(p: &DglaPresentation, n: i32) -> Result<DglaTruncation> {
    if n < 1 {
        return Err(Error::InvalidWindow(format!("truncation depth {n} must be positive")));
    }
    if p.window.min > -n - 1 {
        return Err(Error::InsufficientSlack(format!("good truncation at {} needs {} valid from {}", -n, p.name, -n - 1)));
    }
    let lie = &p.lie;
    let basis = LieBasis::new(lie, -n, -1);
    let below = LieBasis::new(lie, -n - 1, -n - 1);
    let len = basis.len();
    let mut proj: Vec<SparseVec> = vec![SparseVec::new(); len];
    let mut kept = Vec::new();
    let mut elems = Vec::new();
    let mut top_blocks: Vec<(i32, usize, usize)> = Vec::new();
    for (k, b) in basis.blocks.iter().enumerate() {
        if b.degree == -n {
            top_blocks.push((b.weight, basis.offsets[k], b.dim()));
        }
    }
    let mut top_keep: HashMap<usize, ()> = HashMap::new();
    let mut top_cols: HashMap<usize, Vec<(usize, Scalar)>> = HashMap::new();
    for &(w, off, r) in &top_blocks {
        let mut bvecs: Vec<Vector> = Vec::new();
        if let Some(bb) = below.block(-n - 1, w) {
            for e in &bb.elements {
                let de = p.differential(e);
                let c = basis.coords(lie, &de, false)?;
                let mut v = vec![Scalar::zero(); r];
                for (i, x) in c {
                    v[i - off] = x;
                }
                bvecs.push(v);
            }
        }
        let indep: Vec<Vector> = independent_subset(&bvecs).into_iter().map(|j| bvecs[j].clone()).collect();
        let rr = complement_indices(&indep, r);
        let mut cols: Vec<Vector> = rr.iter().map(|&j| crate::exactlin::unit_vec(r, j)).collect();
        cols.extend(indep.iter().cloned());
        let inv = inverse(&SparseMatrix::from_columns(r, &cols)).expect("representatives and boundaries span");
        for &j in &rr {
            top_keep.insert(off + j, ());
        }
        for t in 0..r {
            let mut col = Vec::new();
            for (row, &j) in rr.iter().enumerate() {
                let x = inv.get(row, t);
                if !x.is_zero() {
                    col.push((off + j, x));
                }
            }
            top_cols.insert(off + t, col);
        }
    }
    let mut qindex: HashMap<usize, usize> = HashMap::new();
    for i in 0..len {
        if basis.slice.degree(i) > -n || top_keep.contains_key(&i) {
            qindex.insert(i, kept.len());
            kept.push(i);
            let b = basis.slice.element(i);
            elems.push(BasisElement::new(b.label.clone(), b.degree, b.weight));
        }
    }
    for i in 0..len {
        if basis.slice.degree(i) > -n {
            proj[i].insert(qindex[&i], Scalar::one());
        } else {
            for (j, x) in &top_cols[&i] {
                proj[i].insert(qindex[j], x.clone());
            }
        }
    }
    let space = GradedSlice::new(elems, DegreeWindow { min: -n, max: -1 })?;
    let mut t = DglaTruncation { presentation: p.clone(), top: n, basis, structure: OoStructure::new(Kind::Lie, space, 2), kept, proj };
    let dimq = t.kept.len();
    let reps: Vec<LieElement> = t.kept.iter().map(|&i| t.basis.element(i)).collect();
    let mut s = OoStructure::new(Kind::Lie, t.structure.space.clone(), 2);
    for (a, e) in reps.iter().enumerate() {
        let de = p.differential(e);
        let v = t.project(&de)?;
        s.op_mut(1).set(vec![a], v);
    }
    for a in 0..dimq {
        for b in 0..dimq {
            let da = s.space.degree(a);
            if da + s.space.degree(b) < -n {
                continue;
            }
            let br = lie.bracket(&reps[a], &reps[b]);
            let mut v = t.project(&br)?;
            if da.rem_euclid(2) == 1 {
                v = v.into_iter().map(|(k, c)| (k, -c)).collect();
            }
            s.op_mut(2).set(vec![a, b], v);
        }
    }
    s.complete = true;
    t.structure = s;
    Ok(t)
}

/// Generator name carrying a basis label when it is a plain identifier.
fn dual_name(prefix: &str, label: &str, j: usize, used: &mut HashMap<String, usize>) -> String {
    let clean: String = label.chars().filter(|c| c.is_ascii_alphanumeric() || *c == '_').collect();
    let base = if clean.is_empty() || clean.len() + 2 < label.len() { format!("{prefix}{j}") } else { format!("{prefix}{clean}") };
    let cnt = used.entry(base.clone()).or_insert(0);
    *cnt += 1;
    if *cnt == 1 {
        base
    } else {
        format!("{base}_{}", *cnt - 1)
    }
}

#[derive(Clone, Debug)]
pub struct CeAlgebra {
    pub presentation: CdgaPresentation,
    /// CGA generator index of the dual of each basis element of `L`.
    pub generator_of: Vec<usize>,
    pub source: OoStructure,
}

fn factorial(m: usize) -> Scalar {
    (1..=m as i64).fold(Scalar::one(), |a, k| a * q(k))
}

/// CE algebra of an L∞-structure in non-positive degrees. Generators `c_x`
/// have degree `1 - |x|` and weight `-w(x)`.
pub fn ce_algebra(l: &OoStructure, window: DegreeWindow) -> Result<CeAlgebra> {
    if l.kind != Kind::Lie {
        return Err(Error::Precondition("CE algebra needs an L-infinity structure".into()));
    }
    let dim = l.dim();
    if let Some(i) = (0..dim).find(|&i| l.space.degree(i) > 0) {
        return Err(Error::Precondition(format!("{} has positive degree", l.space.label(i))));
    }
    if !(l.complete || l.ops_vanish_above(l.arity_bound)) {
        return Err(Error::InsufficientSlack(format!("operations above arity {} are unknown; the differential does not close", l.arity_bound)));
    }
    let mut used = HashMap::new();
    let names: Vec<String> = (0..dim).map(|j| dual_name("c_", l.space.label(j), j, &mut used)).collect();
    let gens: Vec<Generator> = (0..dim).map(|j| Generator::new(names[j].clone(), 1 - l.space.degree(j), -l.space.weight(j))).collect();
    let alg = FreeCga::new(gens)?;
    let gen_of: Vec<usize> = names.iter().map(|nm| alg.index_of(nm).unwrap()).collect();
    let xi_deg: Vec<i32> = (0..dim).map(|j| 1 - l.space.degree(j)).collect();
    let mut d = vec![CgaElement::zero(); dim];
    for (&m, op) in &l.ops {
        let fm = factorial(m);
        for (t, v) in &op.values {
            let mut e: i32 = t.iter().map(|&j| xi_deg[j]).sum();
            for a in 0..t.len() {
                for b in a + 1..t.len() {
                    e += l.sd(t[a]) * xi_deg[t[b]];
                }
            }
            let mut c = -Scalar::one() / &fm;
            if e.rem_euclid(2) == 1 {
                c = -c;
            }
            let mut mono = alg.one();
            for &j in t {
                mono = alg.mul(&mono, &alg.gen(gen_of[j]));
            }
            if mono.is_zero() {
                continue;
            }
            for (&k, x) in v {
                d[gen_of[k]].add_scaled(&(&c * x), &mono);
            }
        }
    }
    let pres = CdgaPresentation::from_parts("CE", alg, d, window);
    Ok(CeAlgebra { presentation: pres, generator_of: gen_of, source: l.clone() })
}

/// CE algebra of a free dgla through its good truncation at `-n`.
pub fn ce_of_dgla(p: &DglaPresentation, n: i32, window: DegreeWindow) -> Result<(DglaTruncation, CeAlgebra)> {
    let t = dgla_good_truncation(p, n)?;
    let mut ce = ce_algebra(&t.structure, window)?;
    ce.presentation.name = format!("CE({})", p.name);
    Ok((t, ce))
}

#[derive(Clone, Debug)]
pub struct QuillenDgla {
    pub presentation: DglaPresentation,
    /// Algebra basis index of each Lie generator.
    pub source: Vec<usize>,
}

/// Free dgla on `s^{-1}` of the dual of the augmentation ideal. Needs a
/// connected algebra with `A^1 = 0`.
pub fn quillen_dgla(a: &FdAlgebra, window: DegreeWindow) -> Result<QuillenDgla> {
    if !a.is_connected() {
        return Err(Error::Precondition(format!("{} is not connected", a.name)));
    }
    let red = a.reduced_indices();
    if let Some(&i) = red.iter().find(|&&i| a.space.degree(i) < 2) {
        return Err(Error::Precondition(format!("{} has {} in degree {}; the Quillen construction needs A^1 = 0", a.name, a.space.label(i), a.space.degree(i))));
    }
    let mut used = HashMap::new();
    let names: Vec<String> = red.iter().map(|&i| dual_name("s_", a.space.label(i), i, &mut used)).collect();
    let gens: Vec<Generator> = red.iter().zip(&names).map(|(&i, nm)| Generator::new(nm.clone(), 1 - a.space.degree(i), -a.space.weight(i))).collect();
    let lie = FreeLie::new(gens)?;
    let gen_of: HashMap<usize, u16> = red.iter().zip(&names).map(|(&i, nm)| (i, lie.index_of(nm).unwrap() as u16)).collect();
    let mut d = vec![LieElement::zero(); red.len()];
    let half = Scalar::new(1.into(), 2.into());
    let deg = |i: usize| a.space.degree(i);
    // Linear part from d_A.
    for &j in &red {
        for (&k, c) in &a.apply_d(&crate::ooinfty::basis_vec(j)) {
            if let Some(&gk) = gen_of.get(&k) {
                let s = if (deg(k) + 1).rem_euclid(2) == 1 { -c.clone() } else { c.clone() };
                d[gk as usize].add_term(vec![gen_of[&j]], s);
            }
        }
    }
    // Quadratic part from the product.
    for &j in &red {
        for &l in &red {
            let prod = a.product(j, l);
            if prod.is_empty() {
                continue;
            }
            let (vj, vl) = (lie.gen(gen_of[&j] as usize), lie.gen(gen_of[&l] as usize));
            let br = lie.bracket(&vj, &vl);
            let e = deg(j) * deg(l) + deg(j) + deg(l) + (1 - deg(j));
            for (&k, c) in &prod {
                let Some(&gk) = gen_of.get(&k) else { continue };
                let mut s = &half * c;
                if (e + deg(k) + 1).rem_euclid(2) == 1 {
                    s = -s;
                }
                d[gk as usize].add_scaled(&s, &br);
            }
        }
    }
    let mut source = vec![0; red.len()];
    for (&i, &g) in &gen_of {
        source[g as usize] = i;
    }
    Ok(QuillenDgla { presentation: DglaPresentation::from_parts(format!("L({})", a.name), lie, d, window), source })
}

/// Bracket in a finite Lie algebra stored as an L∞-structure.
fn finite_bracket(s: &OoStructure, x: &SparseVec, y: &SparseVec) -> SparseVec {
    let mut out = SparseVec::new();
    for (&i, a) in x {
        for (&j, b) in y {
            let v = s.eval_basis(2, &[i, j]);
            if v.is_empty() {
                continue;
            }
            let mut c = a * b;
            if s.space.degree(i).rem_euclid(2) == 1 {
                c = -c;
            }
            axpy(&mut out, &c, &v);
        }
    }
    out
}

/// Matrix of the dgla map `𝕃W → g` determined by generator images, on the
/// Lyndon basis `basis`.
pub fn lie_hom_matrix(lie: &FreeLie, basis: &LieBasis, images: &[SparseVec], target: &OoStructure) -> SparseMatrix {
    let mut memo: HashMap<Vec<u16>, SparseVec> = HashMap::new();
    fn word_image(lie: &FreeLie, w: &[u16], images: &[SparseVec], target: &OoStructure, memo: &mut HashMap<Vec<u16>, SparseVec>) -> SparseVec {
        if let Some(v) = memo.get(w) {
            return v.clone();
        }
        let v = if w.len() == 1 {
            images[w[0] as usize].clone()
        } else {
            let split = (1..w.len()).find(|&i| is_lyndon(&w[i..])).unwrap();
            let u = word_image(lie, &w[..split], images, target, memo);
            let x = word_image(lie, &w[split..], images, target, memo);
            finite_bracket(target, &u, &x)
        };
        memo.insert(w.to_vec(), v.clone());
        v
    }
    let mut cols = Vec::with_capacity(basis.len());
    for b in &basis.blocks {
        for lw in &b.words {
            let v = if lw.square {
                let h = word_image(lie, &lw.word[..lw.word.len() / 2], images, target, &mut memo);
                finite_bracket(target, &h, &h)
            } else {
                word_image(lie, &lw.word, images, target, &mut memo)
            };
            cols.push(v);
        }
    }
    SparseMatrix::from_sparse_columns(target.dim(), &cols)
}

/// `q_a: 𝒜_CE(𝓛(A)) → A` through the truncation of `𝓛(A)` at `-(max+1)`,
/// checked as a cdga map and an isomorphism on cohomology in `window`.
pub fn q_a_check(a: &FdAlgebra, window: DegreeWindow) -> Result<CheckReport> {
    let n = window.max + 1;
    let lw = DegreeWindow { min: -n - 1, max: -1 };
    let ql = quillen_dgla(a, lw)?;
    let (t, ce) = ce_of_dgla(&ql.presentation, n, DegreeWindow { min: 0, max: window.max + 1 })?;
    let mut images = vec![SparseVec::new(); ce.presentation.gens().len()];
    for (qi, &bi) in t.kept.iter().enumerate() {
        let lw = &t.basis.blocks.iter().flat_map(|b| b.words.iter()).nth(bi).unwrap();
        if lw.length == 1 && !lw.square {
            let ai = ql.source[lw.word[0] as usize];
            images[ce.generator_of[qi]] = crate::ooinfty::basis_vec(ai);
        }
    }
    let f = FreeToFdMap { source: ce.presentation.clone(), target: a.clone(), images };
    let mut r = CheckReport::new(format!("q_a for {}", a.name));
    r.merge(ce.presentation.check());
    r.merge(f.check());
    let wt = r.checks.iter().any(|(nm, ok)| nm.ends_with(": weight_preserving") && *ok);
    r.record("weight_preserving_map", wt, "q_a changes weights");
    let iso = f.quasi_iso_report(window)?;
    r.record("cohomology_iso", iso.is_ok(), &iso.err().unwrap_or_default());
    Ok(r)
}

/// `q_ℓ: 𝓛(𝒜_CE(L)) → L`, with `L` truncated at `-(1 - window.min)` and the
/// CE algebra truncated three degrees above that.
pub fn q_l_check(p: &DglaPresentation, window: DegreeWindow) -> Result<CheckReport> {
    if window.max > -1 {
        return Err(Error::InvalidWindow(format!("{window} must lie in negative degrees")));
    }
    let n = 1 - window.min;
    let dtop = n + 3;
    let (t, ce) = ce_of_dgla(p, n, DegreeWindow { min: 0, max: dtop + 1 })?;
    let (c, trunc) = FdAlgebra::good_truncation(&ce.presentation, dtop)?;
    let ql = quillen_dgla(&c, DegreeWindow { min: -n - 1, max: -1 })?;
    // Which kept monomial is a single CE generator.
    let mut single: HashMap<usize, usize> = HashMap::new();
    for (ci, mono) in trunc.kept.iter().enumerate() {
        if mono.iter().map(|&e| e as u32).sum::<u32>() == 1 {
            let g = mono.iter().position(|&e| e == 1).unwrap();
            if let Some(qi) = ce.generator_of.iter().position(|&x| x == g) {
                single.insert(ci, qi);
            }
        }
    }
    let lie = &ql.presentation.lie;
    let images: Vec<SparseVec> = ql
        .source
        .iter()
        .map(|ci| single.get(ci).map(|&qi| crate::ooinfty::basis_vec(qi)).unwrap_or_default())
        .collect();
    let (lo, hi) = ql.presentation.cohomology_range(window)?;
    let (basis, cx) = ql.presentation.complex(lo, hi)?;
    let f = lie_hom_matrix(lie, &basis, &images, &t.structure);
    let tgt = t.structure.complex();
    let mut r = CheckReport::new(format!("q_l for {}", p.name));
    r.merge(ql.presentation.check());
    let mut chain = true;
    let fd = f.mul(&cx.d);
    let df = tgt.d.mul(&f);
    for j in 0..basis.len() {
        if cx.space.degree(j) < hi && fd.column(j) != df.column(j) {
            chain = false;
            r.fail_once("chain_map", format!("q d != d q on {}", cx.space.label(j)));
            break;
        }
    }
    if chain {
        r.pass("chain_map");
    }
    let wt = f.entries().all(|(i, j, _)| tgt.space.weight(i) == cx.space.weight(j));
    r.record("weight_preserving_map", wt, "q_l changes weights");
    let classes = tgt.cohomology(window).total_dim();
    r.record("nonempty_window", classes > 0, "no cohomology in the window");
    let iso = iso_report(&cx, &tgt, &f, Some(window));
    r.record("cohomology_iso", iso.is_ok(), &iso.err().unwrap_or_default());
    Ok(r)
}

/// Both adjunction maps on an algebra input: `q_a` on `A` and `q_ℓ` on `𝓛(A)`.
pub fn counit_checks(a: &FdAlgebra, cdga_window: DegreeWindow, lie_window: DegreeWindow) -> Result<CheckReport> {
    let mut r = q_a_check(a, cdga_window)?;
    let ql = quillen_dgla(a, DegreeWindow { min: lie_window.min - 2, max: -1 })?;
    let mut l = q_l_check(&ql.presentation, lie_window)?;
    l.subject = format!("q_l for {}", ql.presentation.name);
    r.merge(l);
    Ok(r)
}

/// Weights of the cohomology of a report, degree by degree.
pub fn weights_by_degree(dims: &BTreeMap<(i32, i32), usize>) -> BTreeMap<i32, Vec<i32>> {
    let mut out: BTreeMap<i32, Vec<i32>> = BTreeMap::new();
    for (&(n, p), &k) in dims {
        if k > 0 {
            out.entry(n).or_default().push(p);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freelie::LieElement;

    fn cp(k: usize) -> FdAlgebra {
        FdAlgebra::truncated_polynomial(&format!("CP{k}"), k, 2, 2)
    }

    #[test]
    fn quillen_cpk_exact() {
        for k in 1..=3 {
            let l = quillen_dgla(&cp(k), DegreeWindow { min: -12, max: -1 }).unwrap();
            let p = &l.presentation;
            assert!(p.check().passed, "{:?}", p.check());
            let lie = &p.lie;
            let v: Vec<usize> = (1..=k).map(|i| lie.index_of(&if i == 1 { "s_u".to_string() } else { format!("s_u{i}") }).unwrap()).collect();
            for i in 1..=k {
                let g = &lie.gens()[v[i - 1]];
                assert_eq!((g.degree, g.weight), (1 - 2 * i as i32, -2 * i as i32));
                let mut want = LieElement::zero();
                for a in 1..i {
                    let br = lie.bracket(&lie.gen(v[a - 1]), &lie.gen(v[i - a - 1]));
                    want.add_scaled(&Scalar::new(1.into(), 2.into()), &br);
                }
                assert_eq!(p.d[v[i - 1]], want, "d v{i}");
            }
        }
    }

    #[test]
    fn ce_of_cp2_model() {
        let l = quillen_dgla(&cp(2), DegreeWindow { min: -12, max: -1 }).unwrap();
        let (_, ce) = ce_of_dgla(&l.presentation, 8, DegreeWindow { min: 0, max: 9 }).unwrap();
        assert!(ce.presentation.check().passed, "{:?}", ce.presentation.check());
        let (_, h) = ce.presentation.cohomology(DegreeWindow { min: 0, max: 7 }).unwrap();
        assert_eq!(h.betti(), vec![(0, 1), (1, 0), (2, 1), (3, 0), (4, 1), (5, 0), (6, 0), (7, 0)]);
    }

    #[test]
    fn abelian_ce() {
        let s = GradedSlice::new(vec![BasisElement::new("x", -1, -2)], DegreeWindow { min: -1, max: -1 }).unwrap();
        let mut o = OoStructure::new(Kind::Lie, s, 2);
        o.complete = true;
        let ce = ce_algebra(&o, DegreeWindow { min: 0, max: 10 }).unwrap();
        assert_eq!(ce.presentation.gens().len(), 1);
        assert_eq!(ce.presentation.gens()[0].degree, 2);
        assert!(ce.presentation.d[0].is_zero());
    }

    #[test]
    fn ce_with_l3() {
        // x in degree -1, z in degree -4 with l_3(x, x, x) = z: CE gets a cubic term.
        let s = GradedSlice::new(vec![BasisElement::new("x", -1, -1), BasisElement::new("z", -4, -3)], DegreeWindow { min: -4, max: -1 }).unwrap();
        let mut o = OoStructure::new(Kind::Lie, s, 3);
        o.op_mut(3).set(vec![0, 0, 0], crate::ooinfty::sv(&[(1, q(1))]));
        o.complete = true;
        assert!(o.check_relations(5).passed);
        let ce = ce_algebra(&o, DegreeWindow { min: 0, max: 10 }).unwrap();
        assert!(ce.presentation.check().passed);
        let dz = &ce.presentation.d[ce.generator_of[1]];
        assert!(!dz.is_zero());
        assert_eq!(ce.presentation.algebra.bidegree(dz), Some((6, 3)));
    }

    #[test]
    fn quillen_of_nonformal_truncation() {
        // A truncation with nonzero d exercises the linear part against the quadratic one.
        use crate::freecga::{CgaElement, FreeCga, Generator};
        let a = FreeCga::new(vec![Generator::new("e2", 2, 2), Generator::new("e3", 3, 4)]).unwrap();
        let d = vec![CgaElement::zero(), a.pow(&a.gen(0), 2)];
        let p = CdgaPresentation::from_parts("S2", a, d, DegreeWindow { min: 0, max: 10 });
        let (fd, _) = FdAlgebra::good_truncation(&p, 7).unwrap();
        let l = quillen_dgla(&fd, DegreeWindow { min: -8, max: -1 }).unwrap();
        assert!(l.presentation.check().passed, "{:?}", l.presentation.check());
        let (_, h) = l.presentation.cohomology(DegreeWindow { min: -4, max: -1 }).unwrap();
        assert_eq!(h.degree_dim(-1), 1);
        assert_eq!(h.degree_dim(-2), 1);
        assert_eq!(h.degree_dim(-3), 0);
    }

    #[test]
    fn truncation_keeps_cohomology() {
        let l = quillen_dgla(&cp(2), DegreeWindow { min: -12, max: -1 }).unwrap();
        let t = dgla_good_truncation(&l.presentation, 6).unwrap();
        assert!(t.structure.check_relations(3).passed);
        let h = t.structure.cohomology();
        let (_, want) = l.presentation.cohomology(DegreeWindow { min: -6, max: -1 }).unwrap();
        assert_eq!(h.dims.iter().filter(|(_, &k)| k > 0).collect::<Vec<_>>(), want.dims.iter().filter(|(_, &k)| k > 0).collect::<Vec<_>>());
    }

    #[test]
    fn counits_s2() {
        let s2 = cp(1);
        let r = q_a_check(&s2, DegreeWindow { min: 0, max: 6 }).unwrap();
        assert!(r.passed, "{r:?}");
        let l = quillen_dgla(&s2, DegreeWindow { min: -10, max: -1 }).unwrap();
        let r = q_l_check(&l.presentation, DegreeWindow { min: -4, max: -1 }).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn counits_cp2() {
        let r = q_a_check(&cp(2), DegreeWindow { min: 0, max: 6 }).unwrap();
        assert!(r.passed, "{r:?}");
        let l = quillen_dgla(&cp(2), DegreeWindow { min: -10, max: -1 }).unwrap();
        let r = q_l_check(&l.presentation, DegreeWindow { min: -5, max: -1 }).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn rejects_disconnected() {
        let a = FdAlgebra::truncated_polynomial("odd", 1, 1, 1);
        assert!(quillen_dgla(&a, DegreeWindow { min: -4, max: -1 }).is_err());
    }
}
