//! Named example objects, seeded random instances, and the invariant suite
//! run over all of them.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::autloop::{baut_model, cyclic_loop_model, der_cdga, free_loop_model, loop_checks, Input};
use crate::barcobar::{ce_algebra, dgla_good_truncation, quillen_dgla};
use crate::exactlin::{q, Scalar};
use crate::freecga::{CdgaPresentation, CgaElement, FreeCga, Generator};
use crate::freelie::{DglaPresentation, FreeLie};
use crate::graded::{CheckReport, DegreeWindow};
use crate::mapping::{cp_embedding_example, cp_minimal_linfty, mapping_algebra, tensor_linfty};
use crate::ooinfty::{FdAlgebra, OoStructure};
use crate::sullivan::segmentation;
use crate::transfer::{build_retract_with, minimal_of_fd, transfer_structure};
use crate::Result;

pub fn sphere_cohomology(n: i32) -> FdAlgebra {
    FdAlgebra::truncated_polynomial(&format!("S{n}"), 1, n, n)
}

pub fn cp_cohomology(k: usize) -> FdAlgebra {
    FdAlgebra::truncated_polynomial(&format!("CP{k}"), k, 2, 2)
}

/// `Λ(x, y)`, `dy = x^{k+1}`, `|x| = 2`, formality weights: the minimal model of `ℂP^k`.
pub fn cp_model(k: usize, window_max: i32) -> CdgaPresentation {
    let top = 2 * k as i32 + 1;
    let a = FreeCga::new(vec![Generator::new("x", 2, 2), Generator::new(format!("y{top}"), top, top + 1)]).unwrap();
    let d = vec![CgaElement::zero(), a.pow(&a.gen(0), k as u32 + 1)];
    CdgaPresentation::from_parts(format!("CP{k}"), a, d, DegreeWindow { min: 0, max: window_max })
}

/// `Λ(e2, e3)`, `d e3 = e2^2`.
pub fn s2_model(window_max: i32) -> CdgaPresentation {
    let a = FreeCga::new(vec![Generator::new("e2", 2, 2), Generator::new("e3", 3, 4)]).unwrap();
    let d = vec![CgaElement::zero(), a.pow(&a.gen(0), 2)];
    CdgaPresentation::from_parts("S2", a, d, DegreeWindow { min: 0, max: window_max })
}

/// `𝕃(v)` with `|v| = -1`, `w(v) = -2`.
pub fn s2_lie(window_min: i32) -> DglaPresentation {
    let lie = FreeLie::new(vec![Generator::new("v", -1, -2)]).unwrap();
    DglaPresentation::from_parts("LS2", lie, vec![Default::default()], DegreeWindow { min: window_min, max: -1 })
}

pub fn quillen_cp(k: usize, window_min: i32) -> Result<DglaPresentation> {
    Ok(quillen_dgla(&cp_cohomology(k), DegreeWindow { min: window_min, max: -1 })?.presentation)
}

/// `Λ(e2, e5)`'s cohomology and the CP² examples used by several checks.
pub fn cdga_corpus() -> Vec<CdgaPresentation> {
    let mut out = vec![s2_model(12), cp_model(2, 14), cp_model(3, 16)];
    for (n, k) in [(1, 1), (2, 1), (1, 2)] {
        out.push(mapping_algebra(n, k, 16));
    }
    out
}

pub fn fd_corpus() -> Vec<FdAlgebra> {
    let s2 = sphere_cohomology(2);
    let s3 = sphere_cohomology(3);
    vec![s2.clone(), s3.clone(), cp_cohomology(2), cp_cohomology(3), s2.tensor(&s2), s2.tensor(&s3)]
}

/// Every named object, as reports of its own invariants.
pub fn invariant_suite() -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for p in cdga_corpus() {
        let mut r = p.check();
        r.merge(koszul_confluence(&p.algebra, 10));
        out.push(r);
        let (fd, _) = FdAlgebra::good_truncation(&p, 10)?;
        out.push(structure_report(&format!("{} truncation", p.name), &fd.to_oo(), 3));
        for m in [free_loop_model(&p)?, cyclic_loop_model(&p)?] {
            out.push(loop_checks(&p, &m, 8));
        }
    }
    for a in fd_corpus() {
        let mut r = a.check();
        r.merge(structure_report(&a.name, &a.to_oo(), 3));
        out.push(r);
        let m = minimal_of_fd(&a, 4);
        out.push(structure_report(&format!("minimal model of {}", a.name), &m.structure, 4));
        out.push(m.inclusion.check_morphism(3));
        if a.is_connected() && a.reduced_indices().iter().all(|&i| a.space.degree(i) >= 2) {
            let l = quillen_dgla(&a, DegreeWindow { min: -8, max: -1 })?;
            let mut r = l.presentation.check();
            r.merge(lie_antisymmetry(&l.presentation.lie, -6));
            out.push(r);
            let t = dgla_good_truncation(&l.presentation, 6)?;
            out.push(structure_report(&format!("truncated Quillen model of {}", a.name), &t.structure, 3));
        }
    }
    for k in 1..=3 {
        let l = cp_minimal_linfty(k);
        out.push(structure_report(&format!("L-infinity model of CP{k}"), &l, k + 2));
        let ce = ce_algebra(&l, DegreeWindow { min: 0, max: 4 * k as i32 + 4 })?;
        out.push(ce.presentation.check());
    }
    for (k, n) in [(1, 1), (1, 2), (2, 1)] {
        let ex = cp_embedding_example(k, n)?;
        out.push(structure_report(&format!("tensor CP{k} x CP{}", k + n), &ex.tensor.structure, 4));
        out.push(structure_report(&format!("mapping model CP{k} -> CP{}", k + n), &ex.model, 4));
    }
    let t = tensor_linfty(&sphere_cohomology(3), &cp_minimal_linfty(2), None)?;
    out.push(structure_report("tensor S3 x CP2", &t.structure, 4));
    for p in [s2_model(12), cp_model(2, 14)] {
        out.push(der_cdga(&p, DegreeWindow { min: -7, max: 0 })?.check());
        let b = baut_model(Input::Cdga(&p), DegreeWindow { min: -6, max: -1 })?;
        out.push(structure_report(&format!("Der<-1> of {}", p.name), &b.structure, 3));
    }
    Ok(out)
}

/// Relations and weight blocks of an ∞-structure.
pub fn structure_report(name: &str, s: &OoStructure, arity: usize) -> CheckReport {
    let mut r = CheckReport::new(name.to_string());
    r.merge(s.check_relations(arity));
    r
}

/// Graded commutativity and associativity of normal forms: `ab = (-1)^{|a||b|} ba`
/// for monomials, `(xy)z = x(yz)` for generators, up to degree `hi`.
pub fn koszul_confluence(a: &FreeCga, hi: i32) -> CheckReport {
    let mut r = CheckReport::new("koszul signs");
    let monos = a.monomials(0, hi);
    let mut comm = true;
    for (i, m) in monos.iter().enumerate() {
        for n in &monos[i..] {
            if a.mono_degree(m) + a.mono_degree(n) > hi {
                continue;
            }
            let x = CgaElement::from_mono(m.clone(), q(1));
            let y = CgaElement::from_mono(n.clone(), q(1));
            let s = if (a.mono_degree(m) * a.mono_degree(n)).rem_euclid(2) == 1 { q(-1) } else { q(1) };
            comm &= a.mul(&x, &y) == a.mul(&y, &x).scale(&s);
        }
    }
    r.record("graded_commutativity", comm, "normal forms disagree after a transposition");
    let mut assoc = true;
    for i in 0..a.ngens() {
        for j in 0..a.ngens() {
            for k in 0..a.ngens() {
                let (x, y, z) = (a.gen(i), a.gen(j), a.gen(k));
                assoc &= a.mul(&a.mul(&x, &y), &z) == a.mul(&x, &a.mul(&y, &z));
                let w = a.normalize_word(&[i, j, k]);
                assoc &= w == a.mul(&a.mul(&x, &y), &z);
            }
        }
    }
    r.record("associativity", assoc, "word normalization depends on bracketing");
    r
}

/// `[x, y] = -(-1)^{|x||y|} [y, x]` on Lie basis elements down to degree `lo`.
pub fn lie_antisymmetry(lie: &FreeLie, lo: i32) -> CheckReport {
    let mut r = CheckReport::new("lie antisymmetry");
    let basis = crate::freelie::LieBasis::new(lie, lo, -1);
    let mut ok = true;
    for i in 0..basis.len() {
        for j in 0..basis.len() {
            let (di, dj) = (basis.slice.degree(i), basis.slice.degree(j));
            if di + dj < lo {
                continue;
            }
            let (x, y) = (basis.element(i), basis.element(j));
            let s = if (di * dj).rem_euclid(2) == 1 { q(1) } else { q(-1) };
            ok &= lie.bracket(&x, &y) == lie.bracket(&y, &x).scale(&s);
        }
    }
    r.record("antisymmetry", ok, "bracket is not graded antisymmetric");
    r
}

/// A seeded random minimal Sullivan algebra with weights `α·deg + j`,
/// `0 ≤ j ≤ spread`: each `dv` is a random cocycle in the algebra on the
/// earlier generators.
pub fn random_sullivan<R: Rng>(rng: &mut R, alpha: i32, spread: i32, window_max: i32) -> CdgaPresentation {
    let n = rng.gen_range(2..=4);
    let mut degs: Vec<i32> = (0..n).map(|_| rng.gen_range(2..=6)).collect();
    degs.sort();
    let gens: Vec<Generator> = degs.iter().enumerate().map(|(i, &d)| Generator::new(format!("g{}_{d}", i + 1), d, alpha * d + rng.gen_range(0..=spread))).collect();
    let alg = FreeCga::new(gens.clone()).unwrap();
    let mut d = vec![CgaElement::zero(); alg.ngens()];
    for v in 0..alg.ngens() {
        let (dv, wv) = (alg.gens()[v].degree + 1, alg.gens()[v].weight);
        // Cocycles of the subalgebra on generators before `v` at (dv, wv).
        let prev: Vec<Generator> = alg.gens()[..v].to_vec();
        if prev.is_empty() {
            continue;
        }
        // Earlier differentials only involve earlier generators.
        let trim = |e: &CgaElement| {
            let mut t = CgaElement::zero();
            for (m, c) in &e.terms {
                t.add_term(m[..v].to_vec(), c.clone());
            }
            t
        };
        let sub = CdgaPresentation::from_parts("sub", FreeCga::new(prev).unwrap(), d[..v].iter().map(trim).collect(), DegreeWindow { min: 0, max: window_max + 2 });
        let (basis, cx) = sub.complex(dv, dv + 1);
        let block = cx.block(dv, wv);
        let mut e = CgaElement::zero();
        for z in &block.cocycles {
            let c: i64 = rng.gen_range(-2..=2);
            if c != 0 {
                e.add_scaled(&q(c), &basis.element(z));
            }
        }
        let img = sub.algebra.apply_hom(&(0..v).map(|i| alg.gen(i)).collect::<Vec<_>>(), &alg, &e);
        d[v] = img;
    }
    CdgaPresentation::from_parts("random", alg, d, DegreeWindow { min: 0, max: window_max + 2 })
}

/// A random instance whose truncated cohomology is `(α, k)`-segmented with `k ≤ 2`.
#[derive(Clone, Debug)]
pub struct SegmentedInstance {
    pub seed: u64,
    pub presentation: CdgaPresentation,
    pub algebra: FdAlgebra,
    pub alpha: Scalar,
    pub k: u64,
}

pub fn segmented_instances(count: usize, seed: u64, top: i32) -> Result<Vec<SegmentedInstance>> {
    let mut out = Vec::new();
    let mut s = seed;
    while out.len() < count {
        s += 1;
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let alpha = rng.gen_range(1..=2);
        let spread = rng.gen_range(0..=2);
        let p = random_sullivan(&mut rng, alpha, spread, top);
        let (fd, _) = FdAlgebra::good_truncation(&p, top)?;
        if fd.space.dims().values().any(|&d| d > 6) {
            continue;
        }
        let h = fd.complex().cohomology(fd.space.window());
        let seg = segmentation(&h.dims, Some(q(alpha as i64)));
        match seg.k {
            Some(k) if seg.passed && k <= 2 => out.push(SegmentedInstance { seed: s, presentation: p, algebra: fd, alpha: q(alpha as i64), k }),
            _ => continue,
        }
    }
    Ok(out)
}

/// A random retract instance: a truncated random Sullivan algebra or a
/// truncated Quillen model, with a randomly perturbed retract.
pub fn random_retract_structure(seed: u64) -> Result<OoStructure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alpha = rng.gen_range(1..=2);
    let p = random_sullivan(&mut rng, alpha, 1, 8);
    let (fd, _) = FdAlgebra::good_truncation(&p, 8)?;
    if seed % 2 == 0 {
        return Ok(fd.to_oo());
    }
    let l = quillen_dgla(&fd, DegreeWindow { min: -6, max: -1 }).or_else(|_| quillen_dgla(&cp_cohomology(2), DegreeWindow { min: -6, max: -1 }))?;
    Ok(dgla_good_truncation(&l.presentation, 4)?.structure)
}

/// Relations, morphism relations and weights for one random retract.
pub fn random_retract_report(seed: u64) -> Result<CheckReport> {
    let big = random_retract_structure(seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let r = build_retract_with(&big.complex(), Some(&mut rng));
    let (s, i) = transfer_structure(&big, &r, 5);
    let mut rep = CheckReport::new(format!("random retract {seed}"));
    rep.merge(r.check());
    rep.merge(s.check_relations(5));
    rep.merge(i.check_morphism(4));
    rep.record("weight_preserving", s.weight_preserving() && i.check_morphism(1).passed, "a transferred operation changes weight");
    Ok(rep)
}

/// `(degree, weight) → dim` of the nonzero entries.
pub fn nonzero(dims: &BTreeMap<(i32, i32), usize>) -> BTreeMap<(i32, i32), usize> {
    dims.iter().filter(|(_, &v)| v > 0).map(|(&k, &v)| (k, v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_sullivan_is_a_cdga() {
        for s in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let p = random_sullivan(&mut rng, 1, 1, 10);
            assert!(p.check().passed, "{}", p);
            assert!(p.is_minimal());
        }
    }

    #[test]
    fn segmented_instances_are_segmented() {
        let v = segmented_instances(5, 0, 10).unwrap();
        assert_eq!(v.len(), 5);
        assert!(v.iter().all(|i| i.k <= 2));
    }

    #[test]
    fn one_random_retract() {
        assert!(random_retract_report(1).unwrap().passed);
        assert!(random_retract_report(2).unwrap().passed);
    }

    #[test]
    fn confluence_on_mapping_algebra() {
        assert!(koszul_confluence(&mapping_algebra(1, 1, 10).algebra, 10).passed);
        assert!(lie_antisymmetry(&quillen_cp(2, -6).unwrap().lie, -6).passed);
    }
}

