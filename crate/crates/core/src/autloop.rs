//! Derivation dglas, homotopy automorphism models, free and cyclic loop
//! models, and PBW dimension counts for universal enveloping algebras.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use crate::exactlin::{q, Scalar, SparseVec};
use crate::freecga::{CdgaPresentation, CgaElement, FreeCga, Generator, Mono};
use crate::freelie::{DglaPresentation, LieBasis, LieElement};
use crate::graded::{BasisElement, CheckReport, CohomologyReport, DegreeWindow, GradedSlice};
use crate::mapping::connected_cover;
use crate::ooinfty::{Kind, OoStructure};
use crate::sullivan::{classify, Sign};
use crate::{Error, Result};

fn sign(odd: bool) -> Scalar {
    if odd {
        -Scalar::one()
    } else {
        Scalar::one()
    }
}

/// `Der(ΛV)` or `Der(𝕃W)` on the elementary derivations `v_i ↦ basis element`
/// whose degree lies in the window.
#[derive(Clone, Debug)]
pub struct DerivationSlice {
    pub structure: OoStructure,
    /// Generator moved by each basis derivation.
    pub source: Vec<usize>,
    pub window: DegreeWindow,
}

impl DerivationSlice {
    pub fn check(&self) -> CheckReport {
        let mut r = CheckReport::new(format!("derivations of window {}", self.window));
        let s = &self.structure;
        r.merge(s.check_bidegrees());
        // Terms leaving the window are dropped, so only tuples all of whose
        // partial sums (and their differentials) stay inside are tested.
        let w = self.window;
        let interior = |t: &[usize]| {
            (1..1u32 << t.len()).all(|mask| {
                let n: i32 = t.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &i)| s.space.degree(i)).sum();
                n >= w.min && n < w.max
            })
        };
        for n in 1..=3 {
            let bad = s.relevant_tuples(n, 2).into_iter().find(|t| interior(t) && !s.relation(t).is_empty());
            let msg = bad.map(|t| format!("relation at arity {n} fails on {:?}", s.labels(&t))).unwrap_or_default();
            r.record(&format!("relation_{n}"), msg.is_empty(), &msg);
        }
        r
    }
}

fn assemble(name: &str, elems: Vec<BasisElement>, window: DegreeWindow, bracket: impl Fn(usize, usize) -> SparseVec, diff: impl Fn(usize) -> SparseVec) -> Result<OoStructure> {
    let space = GradedSlice::new(elems, window)?;
    let n = space.dim();
    let mut s = OoStructure::new(Kind::Lie, space, 2);
    s.complete = true;
    for i in 0..n {
        let v = diff(i);
        if !v.is_empty() {
            s.op_mut(1).set(vec![i], v);
        }
    }
    for i in 0..n {
        for j in i..n {
            let di = s.space.degree(i);
            if !window.contains(di + s.space.degree(j)) {
                continue;
            }
            // b_2(x, y) = (-1)^{|x|} [x, y].
            let mut v = bracket(i, j);
            if di.rem_euclid(2) == 1 {
                v = v.into_iter().map(|(k, c)| (k, -c)).collect();
            }
            if !v.is_empty() {
                s.set_symmetric(2, &[i, j], v);
            }
        }
    }
    let _ = name;
    Ok(s)
}

/// `Der(ΛV)` with bracket `θ∘η - (-1)^{|θ||η|} η∘θ` and differential `[d, -]`.
pub fn der_cdga(p: &CdgaPresentation, window: DegreeWindow) -> Result<DerivationSlice> {
    if !p.is_minimal() {
        return Err(Error::Precondition(format!("{} is not minimal", p.name)));
    }
    let a = &p.algebra;
    let gens = a.gens();
    let top = gens.iter().map(|g| g.degree).max().unwrap_or(0) + window.max;
    let monos = a.monomials(0, top.max(0));
    let mut elems = Vec::new();
    let mut entries: Vec<(usize, Mono)> = Vec::new();
    let mut index: HashMap<(usize, Mono), usize> = HashMap::new();
    for (i, g) in gens.iter().enumerate() {
        for m in &monos {
            let n = a.mono_degree(m) - g.degree;
            if window.contains(n) {
                elems.push(BasisElement::new(format!("{}->{}", g.name, a.mono_label(m)), n, a.mono_weight(m) - g.weight));
                entries.push((i, m.clone()));
            }
        }
    }
    // The slice reorders elements; look them up by label afterwards.
    let labels: Vec<String> = elems.iter().map(|e| e.label.clone()).collect();
    let probe = GradedSlice::new(elems.clone(), window)?;
    let order: Vec<usize> = labels.iter().map(|l| probe.index_of(l).unwrap()).collect();
    let mut values: Vec<Vec<CgaElement>> = vec![Vec::new(); entries.len()];
    let mut degree = vec![0; entries.len()];
    let mut source = vec![0; entries.len()];
    for (k, (i, m)) in entries.iter().enumerate() {
        let pos = order[k];
        index.insert((*i, m.clone()), pos);
        let mut v = vec![CgaElement::zero(); gens.len()];
        v[*i] = CgaElement::from_mono(m.clone(), Scalar::one());
        values[pos] = v;
        degree[pos] = probe.degree(pos);
        source[pos] = *i;
    }
    let decompose = |vals: &[CgaElement]| -> SparseVec {
        let mut out = SparseVec::new();
        for (i, e) in vals.iter().enumerate() {
            for (m, c) in &e.terms {
                if let Some(&k) = index.get(&(i, m.clone())) {
                    let slot = out.entry(k).or_insert_with(Scalar::zero);
                    *slot += c;
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    };
    let compose = |theta: usize, eta: usize| -> Vec<CgaElement> { values[eta].iter().map(|e| a.apply_derivation(&values[theta], degree[theta], e)).collect() };
    let bracket = |x: usize, y: usize| {
        let s = sign((degree[x] * degree[y]).rem_euclid(2) == 1);
        let xy = compose(x, y);
        let yx = compose(y, x);
        let v: Vec<CgaElement> = xy.iter().zip(&yx).map(|(u, w)| u.sub(&w.scale(&s))).collect();
        decompose(&v)
    };
    let diff = |x: usize| {
        let s = sign(degree[x].rem_euclid(2) == 1);
        let v: Vec<CgaElement> = (0..gens.len()).map(|i| p.differential(&values[x][i]).sub(&a.apply_derivation(&values[x], degree[x], &p.d[i]).scale(&s))).collect();
        decompose(&v)
    };
    let structure = assemble(&p.name, elems, window, bracket, diff)?;
    Ok(DerivationSlice { structure, source, window })
}

/// `Der(𝕃W)`, same conventions as [`der_cdga`].
pub fn der_dgla(p: &DglaPresentation, window: DegreeWindow) -> Result<DerivationSlice> {
    let lie = &p.lie;
    let gens = lie.gens();
    let lo = gens.iter().map(|g| g.degree).min().unwrap_or(-1) + 2 * window.min.min(0) - 1;
    let hi = gens.iter().map(|g| g.degree).max().unwrap_or(-1) + window.max.max(0);
    let basis = LieBasis::new(lie, lo, hi.min(-1));
    let mut elems = Vec::new();
    let mut entries = Vec::new();
    for (i, g) in gens.iter().enumerate() {
        for k in 0..basis.len() {
            let n = basis.slice.degree(k) - g.degree;
            if window.contains(n) {
                elems.push(BasisElement::new(format!("{}->{}", g.name, basis.slice.label(k)), n, basis.slice.weight(k) - g.weight));
                entries.push((i, k));
            }
        }
    }
    let labels: Vec<String> = elems.iter().map(|e| e.label.clone()).collect();
    let probe = GradedSlice::new(elems.clone(), window)?;
    let mut index = HashMap::new();
    let mut values: Vec<Vec<LieElement>> = vec![Vec::new(); entries.len()];
    let mut degree = vec![0; entries.len()];
    let mut source = vec![0; entries.len()];
    for (k, &(i, b)) in entries.iter().enumerate() {
        let pos = probe.index_of(&labels[k]).unwrap();
        index.insert((i, b), pos);
        let mut v = vec![LieElement::zero(); gens.len()];
        v[i] = basis.element(b);
        values[pos] = v;
        degree[pos] = probe.degree(pos);
        source[pos] = i;
    }
    let decompose = |vals: &[LieElement]| -> Result<SparseVec> {
        let mut out = SparseVec::new();
        for (i, e) in vals.iter().enumerate() {
            for (b, c) in basis.coords(lie, e, true)? {
                if let Some(&k) = index.get(&(i, b)) {
                    let slot = out.entry(k).or_insert_with(Scalar::zero);
                    *slot += c;
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        Ok(out)
    };
    let compose = |theta: usize, eta: usize| -> Vec<LieElement> { values[eta].iter().map(|e| lie.apply_derivation(&values[theta], degree[theta], e)).collect() };
    let bracket = |x: usize, y: usize| {
        let s = sign((degree[x] * degree[y]).rem_euclid(2) == 1);
        let v: Vec<LieElement> = compose(x, y).iter().zip(&compose(y, x)).map(|(u, w)| u.sub(&w.scale(&s))).collect();
        decompose(&v).expect("derivation values stay in the Lie basis")
    };
    let diff = |x: usize| {
        let s = sign(degree[x].rem_euclid(2) == 1);
        let v: Vec<LieElement> = (0..gens.len()).map(|i| p.differential(&values[x][i]).sub(&lie.apply_derivation(&values[x], degree[x], &p.d[i]).scale(&s))).collect();
        decompose(&v).expect("derivation values stay in the Lie basis")
    };
    let structure = assemble(&p.name, elems, window, bracket, diff)?;
    Ok(DerivationSlice { structure, source, window })
}

#[derive(Clone, Debug)]
pub struct BautModel {
    pub structure: OoStructure,
    pub cohomology: CohomologyReport,
    pub window: DegreeWindow,
}

impl BautModel {
    pub fn weight_sign(&self) -> Sign {
        classify(self.cohomology.dims.iter().filter(|(_, &v)| v > 0).map(|(&k, _)| k))
    }

    /// Degrees `n` whose cohomology weights leave `[2n - d + 2, n]`.
    pub fn interval_violations(&self, d: i32) -> Vec<(i32, i32)> {
        self.cohomology.dims.iter().filter(|(&(n, p), &v)| v > 0 && (p < 2 * n - d + 2 || p > n)).map(|(&k, _)| k).collect()
    }
}

pub enum Input<'a> {
    Cdga(&'a CdgaPresentation),
    Dgla(&'a DglaPresentation),
}

/// `Der⟨-1⟩` with its cohomology in `window` (clipped to degrees ≤ -1).
pub fn baut_model(p: Input, window: DegreeWindow) -> Result<BautModel> {
    let top = window.max.min(-1);
    if window.min > top {
        return Err(Error::InvalidWindow(format!("{window} has no degree below 0")));
    }
    let build = DegreeWindow { min: window.min - 1, max: 0 };
    let der = match p {
        Input::Cdga(c) => {
            if !c.is_simply_connected() {
                return Err(Error::Precondition(format!("{} is not simply connected", c.name)));
            }
            der_cdga(c, build)?
        }
        Input::Dgla(l) => {
            if l.gens().iter().any(|g| g.degree > -1) {
                return Err(Error::Precondition(format!("{} has generators in degree ≥ 0", l.name)));
            }
            der_dgla(l, build)?
        }
    };
    let structure = connected_cover(&der.structure, -1)?;
    let out = DegreeWindow { min: window.min, max: top };
    let cohomology = structure.complex().cohomology(out);
    Ok(BautModel { structure, cohomology, window: out })
}

fn bar_name(name: &str) -> String {
    format!("s{name}")
}

/// `Λ(V ⊕ s⁻¹V)` with the derivation `β(v) = s⁻¹v`, `β(s⁻¹v) = 0`, plus the map `V → Λ(V ⊕ s⁻¹V)`.
fn doubled(p: &CdgaPresentation, extra: Option<Generator>) -> Result<(FreeCga, Vec<CgaElement>, Vec<CgaElement>)> {
    if !p.is_minimal() || !p.is_simply_connected() {
        return Err(Error::Precondition(format!("{} must be minimal and simply connected", p.name)));
    }
    let mut gens = Vec::new();
    for g in p.gens() {
        gens.push(g.clone());
        gens.push(Generator::new(bar_name(&g.name), g.degree - 1, g.weight));
    }
    gens.extend(extra);
    let big = FreeCga::new(gens)?;
    let incl: Vec<CgaElement> = p.gens().iter().map(|g| big.gen(big.index_of(&g.name).unwrap())).collect();
    let mut beta = vec![CgaElement::zero(); big.ngens()];
    for g in p.gens() {
        beta[big.index_of(&g.name).unwrap()] = big.gen(big.index_of(&bar_name(&g.name)).unwrap());
    }
    Ok((big, incl, beta))
}

/// `(Λ(V ⊕ s⁻¹V), δ)`, `δv = dv`, `δ(s⁻¹v) = -β(dv)`, `w(s⁻¹v) = w(v)`.
pub fn free_loop_model(p: &CdgaPresentation) -> Result<CdgaPresentation> {
    let (big, incl, beta) = doubled(p, None)?;
    let mut d = BTreeMap::new();
    for (i, g) in p.gens().iter().enumerate() {
        let dv = p.algebra.apply_hom(&incl, &big, &p.d[i]);
        d.insert(bar_name(&g.name), big.apply_derivation(&beta, -1, &dv).neg());
        d.insert(g.name.clone(), dv);
    }
    let window = DegreeWindow { min: 0, max: p.window.max - 1 };
    CdgaPresentation::new(format!("L{}", p.name), big.gens().to_vec(), &d, window)
}

/// `(Λ(V ⊕ s⁻¹V ⊕ ℚα), 𝒟)`, `𝒟v = dv + α·s⁻¹v`, `𝒟(s⁻¹v) = -β(dv)`, `𝒟α = 0`,
/// `|α| = 2`, `w(α) = 0`.
pub fn cyclic_loop_model(p: &CdgaPresentation) -> Result<CdgaPresentation> {
    let (big, incl, beta) = doubled(p, Some(Generator::new("alpha", 2, 0)))?;
    let alpha = big.gen(big.index_of("alpha").unwrap());
    let mut d = BTreeMap::new();
    for (i, g) in p.gens().iter().enumerate() {
        let dv = p.algebra.apply_hom(&incl, &big, &p.d[i]);
        d.insert(bar_name(&g.name), big.apply_derivation(&beta, -1, &dv).neg());
        let bar = big.gen(big.index_of(&bar_name(&g.name)).unwrap());
        d.insert(g.name.clone(), dv.add(&big.mul(&alpha, &bar)));
    }
    let window = DegreeWindow { min: 0, max: p.window.max - 1 };
    CdgaPresentation::new(format!("C{}", p.name), big.gens().to_vec(), &d, window)
}

/// Loop-model checks: `δ² = 0` through `max_degree`, weights of `s⁻¹v` and `α`.
pub fn loop_checks(p: &CdgaPresentation, model: &CdgaPresentation, max_degree: i32) -> CheckReport {
    let mut r = CheckReport::new(format!("loop model {}", model.name));
    let (basis, cx) = model.complex(0, max_degree + 1);
    let dd = cx.d.mul(&cx.d);
    let _ = basis;
    r.record("d_squared", dd.is_zero(), "the differential does not square to zero");
    let mut weights = true;
    for g in p.gens() {
        let k = model.algebra.index_of(&bar_name(&g.name));
        weights &= k.map_or(false, |k| model.gens()[k].weight == g.weight && model.gens()[k].degree == g.degree - 1);
    }
    if let Some(k) = model.algebra.index_of("alpha") {
        weights &= model.gens()[k].weight == 0 && model.gens()[k].degree == 2;
    }
    r.record("generator_weights", weights, "w(s⁻¹v) != w(v) or w(alpha) != 0");
    r.merge(model.check());
    r
}

/// PBW dimensions of `UL`: polynomial on the even part, exterior on the odd
/// part, for a slice in negative degrees. Counts degrees `window.min..=0`.
pub fn universal_enveloping_dims(dims: &BTreeMap<(i32, i32), usize>, window: DegreeWindow) -> Result<BTreeMap<(i32, i32), u64>> {
    if let Some((&(n, _), _)) = dims.iter().find(|(&(n, _), &v)| v > 0 && n >= 0) {
        return Err(Error::Precondition(format!("UL needs negative degrees, found degree {n}")));
    }
    let lo = window.min;
    let mut series: BTreeMap<(i32, i32), u64> = BTreeMap::new();
    series.insert((0, 0), 1);
    for (&(n, p), &v) in dims {
        for _ in 0..v {
            let mut next: BTreeMap<(i32, i32), u64> = BTreeMap::new();
            let odd = n.rem_euclid(2) == 1;
            for (&(a, b), &c) in &series {
                let mut k = 0;
                loop {
                    let deg = a + k * n;
                    if deg < lo || (odd && k > 1) {
                        break;
                    }
                    *next.entry((deg, b + k * p)).or_insert(0) += c;
                    k += 1;
                }
            }
            series = next;
        }
    }
    series.retain(|&(n, _), _| n <= window.max);
    Ok(series)
}

/// Weights of `UL` in positive word length are negative whenever those of `L` are.
pub fn ul_negative(series: &BTreeMap<(i32, i32), u64>) -> bool {
    series.iter().all(|(&(n, p), &c)| c == 0 || (n, p) == (0, 0) || p < 0)
}

pub fn coefficient(n: i64) -> Scalar {
    q(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freelie::FreeLie;

    fn s2() -> CdgaPresentation {
        let a = FreeCga::new(vec![Generator::new("e2", 2, 2), Generator::new("e3", 3, 4)]).unwrap();
        let mut d = BTreeMap::new();
        d.insert("e3".to_string(), a.pow(&a.gen(0), 2));
        CdgaPresentation::new("S2", a.gens().to_vec(), &d, DegreeWindow { min: 0, max: 12 }).unwrap()
    }

    fn cp2() -> CdgaPresentation {
        let a = FreeCga::new(vec![Generator::new("e2", 2, 2), Generator::new("e5", 5, 6)]).unwrap();
        let mut d = BTreeMap::new();
        d.insert("e5".to_string(), a.pow(&a.gen(0), 3));
        CdgaPresentation::new("CP2", a.gens().to_vec(), &d, DegreeWindow { min: 0, max: 12 }).unwrap()
    }

    #[test]
    fn der_of_s2() {
        let d = der_cdga(&s2(), DegreeWindow { min: -4, max: 0 }).unwrap();
        assert!(d.check().passed, "{:?}", d.check());
        let b = baut_model(Input::Cdga(&s2()), DegreeWindow { min: -6, max: -1 }).unwrap();
        let h: Vec<_> = b.cohomology.dims.iter().filter(|(_, &v)| v > 0).map(|(&k, &v)| (k, v)).collect();
        assert_eq!(h, vec![((-3, -4), 1)]);
        assert_eq!(b.weight_sign(), Sign::Negative);
    }

    #[test]
    fn zero_differential_has_zero_boundary() {
        let a = FreeCga::new(vec![Generator::new("x", 3, 3)]).unwrap();
        let p = CdgaPresentation::new("S3", a.gens().to_vec(), &BTreeMap::new(), DegreeWindow { min: 0, max: 8 }).unwrap();
        let d = der_cdga(&p, DegreeWindow { min: -3, max: 0 }).unwrap();
        assert!(d.structure.op_is_zero(1));
    }

    #[test]
    fn cp2_interval() {
        let b = baut_model(Input::Cdga(&cp2()), DegreeWindow { min: -6, max: -1 }).unwrap();
        assert_eq!(b.weight_sign(), Sign::Negative);
        assert!(b.interval_violations(4).is_empty(), "{:?}", b.cohomology.dims);
        let d = der_cdga(&cp2(), DegreeWindow { min: -7, max: 0 }).unwrap();
        assert!(d.check().passed);
    }

    #[test]
    fn lie_side_s2() {
        let lie = FreeLie::new(vec![Generator::new("v", -1, -2)]).unwrap();
        let p = DglaPresentation::from_parts("LS2", lie, vec![LieElement::zero()], DegreeWindow { min: -10, max: -1 });
        let d = der_dgla(&p, DegreeWindow { min: -4, max: 0 }).unwrap();
        assert!(d.check().passed);
        let b = baut_model(Input::Dgla(&p), DegreeWindow { min: -6, max: -1 }).unwrap();
        assert_eq!(b.weight_sign(), Sign::Negative);
    }

    #[test]
    fn free_loop_s2() {
        let l = free_loop_model(&s2()).unwrap();
        assert!(loop_checks(&s2(), &l, 8).passed);
        let e2 = l.algebra.gen(l.algebra.index_of("e2").unwrap());
        let se2 = l.algebra.gen(l.algebra.index_of("se2").unwrap());
        let want = l.algebra.mul(&e2, &se2).scale(&q(-2));
        assert_eq!(l.d[l.algebra.index_of("se3").unwrap()], want);
        let c = cyclic_loop_model(&s2()).unwrap();
        assert!(loop_checks(&s2(), &c, 8).passed);
        assert!(c.d[c.algebra.index_of("alpha").unwrap()].is_zero());
    }

    #[test]
    fn even_sphere_building_block() {
        let a = FreeCga::new(vec![Generator::new("e2", 2, 2)]).unwrap();
        let p = CdgaPresentation::new("K", a.gens().to_vec(), &BTreeMap::new(), DegreeWindow { min: 0, max: 8 }).unwrap();
        let l = free_loop_model(&p).unwrap();
        assert!(l.d.iter().all(|e| e.is_zero()));
        let c = cyclic_loop_model(&p).unwrap();
        let k = c.algebra.index_of("e2").unwrap();
        let want = c.algebra.mul(&c.algebra.gen(c.algebra.index_of("alpha").unwrap()), &c.algebra.gen(c.algebra.index_of("se2").unwrap()));
        assert_eq!(c.d[k], want);
    }

    #[test]
    fn pbw() {
        let w = DegreeWindow { min: -8, max: 0 };
        let even = universal_enveloping_dims(&BTreeMap::from([((-2, -2), 1)]), w).unwrap();
        assert_eq!(even.len(), 5);
        assert!(even.iter().all(|(&(n, p), &c)| n == p && c == 1));
        let odd = universal_enveloping_dims(&BTreeMap::from([((-1, -2), 1)]), w).unwrap();
        assert_eq!(odd, BTreeMap::from([((-1, -2), 1), ((0, 0), 1)]));
        // H(𝕃(v)) for S²: v in (-1,-2), [v,v] in (-2,-4); UL = Λ(v) ⊗ ℚ[[v,v]].
        let s = universal_enveloping_dims(&BTreeMap::from([((-1, -2), 1), ((-2, -4), 1)]), w).unwrap();
        for n in -6..=0 {
            assert_eq!(s.get(&(n, 2 * n)), Some(&1));
        }
        assert!(ul_negative(&s));
    }
}
