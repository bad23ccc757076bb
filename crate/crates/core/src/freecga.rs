//! Free graded-commutative algebras on weight-graded generators.
//!
//! A monomial is an exponent vector over the generators in canonical order
//! (degree ascending, then name). Odd generators square to zero. Moving a
//! homogeneous `x` past `y` costs `(-1)^{|x||y|}`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::exactlin::{q, Scalar, SparseMatrix};
use crate::graded::{BasisElement, CheckReport, CohomologyReport, DegreeWindow, GradedComplex, GradedSlice, LinearMapSlice};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Generator {
    pub name: String,
    pub degree: i32,
    pub weight: i32,
}

impl Generator {
    pub fn new(name: impl Into<String>, degree: i32, weight: i32) -> Self {
        Generator { name: name.into(), degree, weight }
    }
}

/// Sorts generators into canonical order.
pub fn canonical_order(gens: &mut [Generator]) {
    gens.sort_by(|a, b| (a.degree, &a.name).cmp(&(b.degree, &b.name)));
}

pub type Mono = Vec<u16>;

/// Linear combination of monomials. Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CgaElement {
    pub terms: BTreeMap<Mono, Scalar>,
}

impl CgaElement {
    pub fn zero() -> Self {
        CgaElement::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn from_mono(m: Mono, c: Scalar) -> Self {
        let mut e = CgaElement::zero();
        e.add_term(m, c);
        e
    }

    pub fn add_term(&mut self, m: Mono, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m.clone()).or_insert_with(Scalar::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn add_scaled(&mut self, c: &Scalar, other: &CgaElement) {
        for (m, x) in &other.terms {
            self.add_term(m.clone(), c * x);
        }
    }

    pub fn add(&self, other: &CgaElement) -> CgaElement {
        let mut out = self.clone();
        out.add_scaled(&Scalar::one(), other);
        out
    }

    pub fn sub(&self, other: &CgaElement) -> CgaElement {
        let mut out = self.clone();
        out.add_scaled(&-Scalar::one(), other);
        out
    }

    pub fn scale(&self, c: &Scalar) -> CgaElement {
        let mut out = CgaElement::zero();
        out.add_scaled(c, self);
        out
    }

    pub fn neg(&self) -> CgaElement {
        self.scale(&-Scalar::one())
    }

    pub fn coeff(&self, m: &Mono) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }
}

/// The free graded-commutative algebra on an ordered generator list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeCga {
    gens: Vec<Generator>,
}

impl FreeCga {
    /// Generators are put in canonical order. Degrees must be positive so
    /// that every degree is finite-dimensional.
    pub fn new(mut gens: Vec<Generator>) -> Result<Self> {
        canonical_order(&mut gens);
        for w in gens.windows(2) {
            if w[0].name == w[1].name {
                return Err(Error::DuplicateName(w[0].name.clone()));
            }
        }
        let mut names = std::collections::HashSet::new();
        for g in &gens {
            if !names.insert(g.name.clone()) {
                return Err(Error::DuplicateName(g.name.clone()));
            }
            if g.degree < 1 {
                return Err(Error::Precondition(format!("generator {} has degree {} < 1", g.name, g.degree)));
            }
        }
        Ok(FreeCga { gens })
    }

    pub fn gens(&self) -> &[Generator] {
        &self.gens
    }

    pub fn ngens(&self) -> usize {
        self.gens.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.gens.iter().position(|g| g.name == name)
    }

    pub fn is_odd(&self, i: usize) -> bool {
        self.gens[i].degree.rem_euclid(2) == 1
    }

    pub fn unit_mono(&self) -> Mono {
        vec![0; self.gens.len()]
    }

    pub fn one(&self) -> CgaElement {
        CgaElement::from_mono(self.unit_mono(), Scalar::one())
    }

    pub fn constant(&self, c: Scalar) -> CgaElement {
        CgaElement::from_mono(self.unit_mono(), c)
    }

    pub fn gen_mono(&self, i: usize) -> Mono {
        let mut m = self.unit_mono();
        m[i] = 1;
        m
    }

    pub fn gen(&self, i: usize) -> CgaElement {
        CgaElement::from_mono(self.gen_mono(i), Scalar::one())
    }

    pub fn mono_degree(&self, m: &Mono) -> i32 {
        m.iter().zip(&self.gens).map(|(&e, g)| e as i32 * g.degree).sum()
    }

    pub fn mono_weight(&self, m: &Mono) -> i32 {
        m.iter().zip(&self.gens).map(|(&e, g)| e as i32 * g.weight).sum()
    }

    pub fn mono_length(&self, m: &Mono) -> u32 {
        m.iter().map(|&e| e as u32).sum()
    }

    /// `(degree, weight)` if homogeneous and nonzero.
    pub fn bidegree(&self, e: &CgaElement) -> Option<(i32, i32)> {
        let mut it = e.terms.keys().map(|m| (self.mono_degree(m), self.mono_weight(m)));
        let first = it.next()?;
        it.all(|b| b == first).then_some(first)
    }

    /// Signed product of monomials, `None` when an odd generator repeats.
    pub fn mono_mul(&self, a: &Mono, b: &Mono) -> Option<(bool, Mono)> {
        // Sign counts pairs (i odd in a, j odd in b, i > j).
        let mut odd_a_above: u32 = (0..a.len()).filter(|&i| a[i] > 0 && self.is_odd(i)).count() as u32;
        let mut negative = false;
        let mut out = a.clone();
        for j in 0..b.len() {
            let odd = self.is_odd(j);
            if odd && a[j] > 0 {
                odd_a_above -= 1;
            }
            if b[j] == 0 {
                continue;
            }
            if odd {
                if a[j] > 0 {
                    return None;
                }
                if odd_a_above % 2 == 1 {
                    negative = !negative;
                }
            }
            out[j] += b[j];
        }
        Some((negative, out))
    }

    pub fn mul(&self, a: &CgaElement, b: &CgaElement) -> CgaElement {
        let mut out = CgaElement::zero();
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                if let Some((neg, m)) = self.mono_mul(ma, mb) {
                    let c = ca * cb;
                    out.add_term(m, if neg { -c } else { c });
                }
            }
        }
        out
    }

    pub fn pow(&self, a: &CgaElement, k: u32) -> CgaElement {
        let mut out = self.one();
        for _ in 0..k {
            out = self.mul(&out, a);
        }
        out
    }

    /// Normalizes an arbitrary word of generator indices by sorting with
    /// Koszul signs. Independent of `mono_mul`, used as a cross-check.
    pub fn normalize_word(&self, word: &[usize]) -> CgaElement {
        let mut w = word.to_vec();
        let mut negative = false;
        // Bubble sort: each adjacent swap of x, y multiplies by (-1)^{|x||y|}.
        for i in 0..w.len() {
            for j in 0..w.len().saturating_sub(1 + i) {
                if w[j] > w[j + 1] {
                    if self.is_odd(w[j]) && self.is_odd(w[j + 1]) {
                        negative = !negative;
                    }
                    w.swap(j, j + 1);
                }
            }
        }
        let mut m = self.unit_mono();
        for &g in &w {
            if self.is_odd(g) && m[g] > 0 {
                return CgaElement::zero();
            }
            m[g] += 1;
        }
        CgaElement::from_mono(m, if negative { -Scalar::one() } else { Scalar::one() })
    }

    /// Applies the derivation of degree `theta_degree` whose value on
    /// generator `i` is `values[i]`.
    ///
    /// `θ(x_1⋯x_k) = Σ_i (-1)^{|θ|(|x_1|+⋯+|x_{i-1}|)} x_1⋯θ(x_i)⋯x_k`.
    pub fn apply_derivation(&self, values: &[CgaElement], theta_degree: i32, e: &CgaElement) -> CgaElement {
        let mut out = CgaElement::zero();
        for (m, c) in &e.terms {
            let t = self.derive_mono(values, theta_degree, m);
            out.add_scaled(c, &t);
        }
        out
    }

    pub fn derive_mono(&self, values: &[CgaElement], theta_degree: i32, m: &Mono) -> CgaElement {
        let mut out = CgaElement::zero();
        let theta_odd = theta_degree.rem_euclid(2) == 1;
        for i in 0..m.len() {
            if m[i] == 0 || values[i].is_zero() {
                continue;
            }
            let mut left = self.unit_mono();
            let mut right = self.unit_mono();
            left[..i].copy_from_slice(&m[..i]);
            right[i + 1..].copy_from_slice(&m[i + 1..]);
            let mut mid = self.unit_mono();
            mid[i] = m[i] - 1;
            let left_deg = self.mono_degree(&left) + self.mono_degree(&mid);
            let mut term = CgaElement::from_mono(left, Scalar::one());
            term = self.mul(&term, &CgaElement::from_mono(mid, Scalar::one()));
            term = self.mul(&term, &values[i]);
            term = self.mul(&term, &CgaElement::from_mono(right, Scalar::one()));
            let mut c = q(m[i] as i64);
            if theta_odd && left_deg.rem_euclid(2) == 1 {
                c = -c;
            }
            out.add_scaled(&c, &term);
        }
        out
    }

    /// Algebra map sending generator `i` to `images[i]` (in `target`).
    pub fn apply_hom(&self, images: &[CgaElement], target: &FreeCga, e: &CgaElement) -> CgaElement {
        let mut out = CgaElement::zero();
        for (m, c) in &e.terms {
            let mut t = target.one();
            for (i, &k) in m.iter().enumerate() {
                for _ in 0..k {
                    t = target.mul(&t, &images[i]);
                }
                if t.is_zero() {
                    break;
                }
            }
            out.add_scaled(c, &t);
        }
        out
    }

    /// All monomials with degree in `[lo, hi]`, sorted by (degree, weight, exponents).
    pub fn monomials(&self, lo: i32, hi: i32) -> Vec<Mono> {
        let mut out = Vec::new();
        let mut cur = self.unit_mono();
        self.enumerate(0, 0, hi, &mut cur, &mut |m, d| {
            if d >= lo {
                out.push(m.clone());
            }
        });
        out.sort_by_key(|m| (self.mono_degree(m), self.mono_weight(m), std::cmp::Reverse(m.clone())));
        out
    }

    fn enumerate(&self, i: usize, deg: i32, hi: i32, cur: &mut Mono, f: &mut impl FnMut(&Mono, i32)) {
        if i == self.gens.len() {
            f(cur, deg);
            return;
        }
        let g = &self.gens[i];
        let max_e = if self.is_odd(i) { 1 } else { ((hi - deg) / g.degree).max(0) as u16 };
        for e in 0..=max_e {
            let d = deg + e as i32 * g.degree;
            if d > hi {
                break;
            }
            cur[i] = e;
            self.enumerate(i + 1, d, hi, cur, f);
        }
        cur[i] = 0;
    }

    pub fn mono_label(&self, m: &Mono) -> String {
        let mut parts = Vec::new();
        for (i, &e) in m.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(self.gens[i].name.clone()),
                _ => parts.push(format!("{}^{}", self.gens[i].name, e)),
            }
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }

    pub fn format(&self, e: &CgaElement) -> String {
        format_terms(e.terms.iter().map(|(m, c)| (self.mono_label(m), c)))
    }

    /// Monomial basis of degrees `[lo, hi]` as a slice plus an index.
    pub fn basis(&self, lo: i32, hi: i32) -> MonomialBasis {
        let monos = self.monomials(lo, hi);
        let elems = monos
            .iter()
            .map(|m| BasisElement::new(self.mono_label(m), self.mono_degree(m), self.mono_weight(m)))
            .collect();
        let window = DegreeWindow { min: lo.min(hi), max: hi.max(lo) };
        let slice = GradedSlice::new(elems, window).expect("monomial labels are unique");
        let index = monos.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        MonomialBasis { monos, index, slice }
    }
}

pub(crate) fn format_terms<'a>(terms: impl Iterator<Item = (String, &'a Scalar)>) -> String {
    let mut out = String::new();
    for (label, c) in terms {
        let neg = c.is_negative();
        let a = c.abs();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if label == "1" {
            out.push_str(&a.to_string());
        } else if a.is_one() {
            out.push_str(&label);
        } else {
            out.push_str(&format!("{a}*{label}"));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

#[derive(Clone, Debug)]
pub struct MonomialBasis {
    pub monos: Vec<Mono>,
    pub index: HashMap<Mono, usize>,
    pub slice: GradedSlice,
}

impl MonomialBasis {
    pub fn len(&self) -> usize {
        self.monos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monos.is_empty()
    }

    /// Coordinates of `e`; monomials outside the basis are an error.
    pub fn coords(&self, e: &CgaElement) -> Option<crate::exactlin::SparseVec> {
        let mut v = crate::exactlin::SparseVec::new();
        for (m, c) in &e.terms {
            v.insert(*self.index.get(m)?, c.clone());
        }
        Some(v)
    }

    /// Coordinates dropping monomials outside the basis.
    pub fn coords_truncated(&self, e: &CgaElement) -> crate::exactlin::SparseVec {
        e.terms.iter().filter_map(|(m, c)| self.index.get(m).map(|&i| (i, c.clone()))).collect()
    }

    pub fn element(&self, v: &[Scalar]) -> CgaElement {
        let mut e = CgaElement::zero();
        for (i, c) in v.iter().enumerate() {
            e.add_term(self.monos[i].clone(), c.clone());
        }
        e
    }
}

/// A free CDGA `(ΛV, d)` valid in the degrees of `window`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CdgaPresentation {
    pub name: String,
    pub algebra: FreeCga,
    /// `d` on generators, in canonical generator order.
    pub d: Vec<CgaElement>,
    pub window: DegreeWindow,
}

impl CdgaPresentation {
    /// `d` is given by generator name; missing entries are zero.
    pub fn new(name: impl Into<String>, gens: Vec<Generator>, d: &BTreeMap<String, CgaElement>, window: DegreeWindow) -> Result<Self> {
        let algebra = FreeCga::new(gens)?;
        for k in d.keys() {
            if algebra.index_of(k).is_none() {
                return Err(Error::UnknownName(k.clone()));
            }
        }
        let dv = algebra.gens.iter().map(|g| d.get(&g.name).cloned().unwrap_or_default()).collect();
        Ok(CdgaPresentation { name: name.into(), algebra, d: dv, window })
    }

    /// Build directly from an algebra and `d` values in its generator order.
    pub fn from_parts(name: impl Into<String>, algebra: FreeCga, d: Vec<CgaElement>, window: DegreeWindow) -> Self {
        assert_eq!(d.len(), algebra.ngens());
        CdgaPresentation { name: name.into(), algebra, d, window }
    }

    pub fn gens(&self) -> &[Generator] {
        self.algebra.gens()
    }

    pub fn differential(&self, e: &CgaElement) -> CgaElement {
        self.algebra.apply_derivation(&self.d, 1, e)
    }

    pub fn check(&self) -> CheckReport {
        let mut r = CheckReport::new(format!("cdga {}", self.name));
        let a = &self.algebra;
        let mut bidegree_ok = true;
        for (i, g) in a.gens.iter().enumerate() {
            for m in self.d[i].terms.keys() {
                let (n, p) = (a.mono_degree(m), a.mono_weight(m));
                if n != g.degree + 1 || p != g.weight {
                    bidegree_ok = false;
                    r.fail_once(
                        "bidegree",
                        format!("d {} has term {} of bidegree ({n},{p}), expected ({},{})", g.name, a.mono_label(m), g.degree + 1, g.weight),
                    );
                }
            }
        }
        if bidegree_ok {
            r.pass("bidegree");
        }
        let mut dd_ok = true;
        for (i, g) in a.gens.iter().enumerate() {
            let dd = self.differential(&self.d[i]);
            if !dd.is_zero() {
                dd_ok = false;
                r.fail_once("d_squared", format!("d^2 {} = {}", g.name, a.format(&dd)));
            }
        }
        if dd_ok {
            r.pass("d_squared");
        }
        r
    }

    /// True when no `d v` has a linear term.
    pub fn is_minimal(&self) -> bool {
        self.d.iter().all(|e| e.terms.keys().all(|m| self.algebra.mono_length(m) >= 2))
    }

    pub fn is_simply_connected(&self) -> bool {
        self.gens().iter().all(|g| g.degree >= 2)
    }

    /// Materialized cochain complex on monomials of degrees `[lo, hi]`;
    /// `d` out of degree `hi` is dropped.
    pub fn complex(&self, lo: i32, hi: i32) -> (MonomialBasis, GradedComplex) {
        let basis = self.algebra.basis(lo, hi);
        let n = basis.len();
        let mut trip = Vec::new();
        for (j, m) in basis.monos.iter().enumerate() {
            if self.algebra.mono_degree(m) >= hi {
                continue;
            }
            let dm = self.algebra.derive_mono(&self.d, 1, m);
            for (mm, c) in &dm.terms {
                let i = basis.index[mm];
                trip.push((i, j, c.clone()));
            }
        }
        let d = SparseMatrix::from_triplets(n, n, trip);
        let cx = GradedComplex::new(basis.slice.clone(), d).expect("differential preserves bidegree");
        (basis, cx)
    }

    /// Checks the slack rule and returns the materialized range.
    pub fn cohomology_range(&self, window: DegreeWindow) -> Result<(i32, i32)> {
        if window.max + 1 > self.window.max {
            return Err(Error::InsufficientSlack(format!(
                "cohomology in {window} needs degree {} but {} is valid only in {}",
                window.max + 1,
                self.name,
                self.window
            )));
        }
        if window.min - 1 >= 0 && window.min - 1 < self.window.min {
            return Err(Error::InsufficientSlack(format!("cohomology in {window} needs degree {}", window.min - 1)));
        }
        Ok(((window.min - 1).max(0), window.max + 1))
    }

    pub fn cohomology(&self, window: DegreeWindow) -> Result<(MonomialBasis, CohomologyReport)> {
        let (lo, hi) = self.cohomology_range(window)?;
        let (basis, cx) = self.complex(lo, hi);
        let rep = cx.cohomology(window);
        Ok((basis, rep))
    }

    /// `LinearMapSlice` of the derivation given on generators, on monomials of
    /// degrees `[lo, hi]` (target truncated to the same range).
    pub fn extend_derivation(&self, values: &BTreeMap<String, CgaElement>, deg_shift: i32, wt_shift: i32, lo: i32, hi: i32) -> Result<LinearMapSlice> {
        let a = &self.algebra;
        let mut vals = vec![CgaElement::zero(); a.ngens()];
        for (k, v) in values {
            let i = a.index_of(k).ok_or_else(|| Error::UnknownName(k.clone()))?;
            let g = &a.gens[i];
            for m in v.terms.keys() {
                if a.mono_degree(m) != g.degree + deg_shift || a.mono_weight(m) != g.weight + wt_shift {
                    return Err(Error::BidegreeViolation(format!("value on {} has term {}", g.name, a.mono_label(m))));
                }
            }
            vals[i] = v.clone();
        }
        let src = a.basis(lo, hi);
        let tgt = a.basis(lo + deg_shift.min(0), hi + deg_shift.max(0));
        let mut trip = Vec::new();
        for (j, m) in src.monos.iter().enumerate() {
            let t = a.derive_mono(&vals, deg_shift, m);
            for (mm, c) in &t.terms {
                trip.push((tgt.index[mm], j, c.clone()));
            }
        }
        let mat = SparseMatrix::from_triplets(tgt.len(), src.len(), trip);
        LinearMapSlice::new(src.slice, tgt.slice, mat, deg_shift, wt_shift)
    }

    /// Expression rendering of `d` on every generator.
    pub fn describe(&self) -> Vec<(String, String)> {
        self.gens().iter().zip(&self.d).map(|(g, e)| (g.name.clone(), self.algebra.format(e))).collect()
    }

    /// Generator dimension table.
    pub fn generator_dims(&self) -> BTreeMap<(i32, i32), usize> {
        let mut out = BTreeMap::new();
        for g in self.gens() {
            *out.entry((g.degree, g.weight)).or_insert(0) += 1;
        }
        out
    }
}

impl fmt::Display for CdgaPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "cdga {} {{", self.name)?;
        for g in self.gens() {
            writeln!(f, "  gen {} : deg {}, wt {};", g.name, g.degree, g.weight)?;
        }
        for (n, e) in self.describe() {
            if e != "0" {
                writeln!(f, "  d {n} = {e};")?;
            }
        }
        write!(f, "}}")
    }
}

/// A map of free CDGAs given on generators.
#[derive(Clone, Debug)]
pub struct CdgaMorphism {
    pub source: CdgaPresentation,
    pub target: CdgaPresentation,
    pub images: Vec<CgaElement>,
}

impl CdgaMorphism {
    pub fn new(source: CdgaPresentation, target: CdgaPresentation, images: &BTreeMap<String, CgaElement>) -> Result<Self> {
        let mut imgs = vec![CgaElement::zero(); source.algebra.ngens()];
        for (k, v) in images {
            let i = source.algebra.index_of(k).ok_or_else(|| Error::UnknownName(k.clone()))?;
            imgs[i] = v.clone();
        }
        Ok(CdgaMorphism { source, target, images: imgs })
    }

    pub fn apply(&self, e: &CgaElement) -> CgaElement {
        self.source.algebra.apply_hom(&self.images, &self.target.algebra, e)
    }

    /// Degree and weight preservation plus `f d = d f` on generators.
    pub fn check(&self) -> CheckReport {
        let mut r = CheckReport::new(format!("map {} -> {}", self.source.name, self.target.name));
        let (sa, ta) = (&self.source.algebra, &self.target.algebra);
        let mut ok = true;
        let mut weight_ok = true;
        for (i, g) in sa.gens().iter().enumerate() {
            for m in self.images[i].terms.keys() {
                if ta.mono_degree(m) != g.degree {
                    ok = false;
                    r.fail_once("degree", format!("image of {} has term {} of wrong degree", g.name, ta.mono_label(m)));
                }
                if ta.mono_weight(m) != g.weight {
                    weight_ok = false;
                }
            }
        }
        if ok {
            r.pass("degree");
        }
        r.record("weight_preserving", weight_ok, "image weight differs from generator weight");
        let mut chain_ok = true;
        for (i, g) in sa.gens().iter().enumerate() {
            let lhs = self.apply(&self.source.d[i]);
            let rhs = self.target.differential(&self.images[i]);
            if lhs != rhs {
                chain_ok = false;
                r.fail_once("chain_map", format!("f(d {}) = {} but d f({}) = {}", g.name, ta.format(&lhs), g.name, ta.format(&rhs)));
            }
        }
        if chain_ok {
            r.pass("chain_map");
        }
        r
    }

    pub fn compose(&self, first: &CdgaMorphism) -> CdgaMorphism {
        let images = first.images.iter().map(|e| self.apply(e)).collect();
        CdgaMorphism { source: first.source.clone(), target: self.target.clone(), images }
    }

    pub fn is_identity_on_generators(&self) -> bool {
        self.source.algebra == self.target.algebra && (0..self.images.len()).all(|i| self.images[i] == self.source.algebra.gen(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::frac;

    fn alg(gs: &[(&str, i32, i32)]) -> FreeCga {
        FreeCga::new(gs.iter().map(|&(n, d, w)| Generator::new(n, d, w)).collect()).unwrap()
    }

    fn s2() -> CdgaPresentation {
        let a = alg(&[("e2", 2, 2), ("e3", 3, 4)]);
        let d = vec![CgaElement::zero(), a.pow(&a.gen(0), 2)];
        CdgaPresentation::from_parts("S2", a, d, DegreeWindow { min: 0, max: 9 })
    }

    #[test]
    fn unit_and_signs() {
        let a = alg(&[("x", 3, 1), ("y", 3, 2), ("u", 2, 2)]);
        let (u, x, y) = (a.gen(0), a.gen(1), a.gen(2));
        assert_eq!(a.mul(&a.one(), &x), x);
        assert_eq!(a.mul(&x, &y), a.mul(&y, &x).neg());
        assert!(a.mul(&x, &x).is_zero());
        let u3 = a.mul(&u, &a.mul(&u, &u));
        assert_eq!(a.bidegree(&u3), Some((6, 6)));
        assert_eq!(a.mul(&u, &x), a.mul(&x, &u));
    }

    #[test]
    fn confluence_matches_product() {
        let a = alg(&[("u", 2, 2), ("x", 3, 1), ("y", 3, 2), ("z", 5, 3)]);
        let words: Vec<Vec<usize>> = vec![vec![3, 1, 2, 0], vec![2, 1], vec![3, 0, 2, 0, 1], vec![1, 3, 1]];
        for w in words {
            let mut prod = a.one();
            for &g in &w {
                prod = a.mul(&prod, &a.gen(g));
            }
            assert_eq!(prod, a.normalize_word(&w), "word {w:?}");
        }
    }

    #[test]
    fn leibniz_s2() {
        let p = s2();
        let a = &p.algebra;
        let e2e3 = a.mul(&a.gen(0), &a.gen(1));
        assert_eq!(p.differential(&e2e3), a.pow(&a.gen(0), 3));
        assert!(p.check().passed);
    }

    #[test]
    fn s2_cohomology() {
        let p = s2();
        let (_, h) = p.cohomology(DegreeWindow { min: 0, max: 7 }).unwrap();
        let betti: Vec<usize> = h.betti().into_iter().map(|(_, b)| b).collect();
        assert_eq!(betti, vec![1, 0, 1, 0, 0, 0, 0, 0]);
        assert_eq!(h.dim(2, 2), 1);
        assert!(p.cohomology(DegreeWindow { min: 0, max: 9 }).is_err());
    }

    #[test]
    fn failing_presentation() {
        // d e2 = e3 and d e3 = e2^2: d^2 e2 = e2^2 != 0.
        let a = alg(&[("e2", 2, 2), ("e3", 3, 2)]);
        let d = vec![a.gen(1), a.pow(&a.gen(0), 2)];
        let p = CdgaPresentation::from_parts("bad", a, d, DegreeWindow { min: 0, max: 8 });
        let r = p.check();
        assert!(!r.passed);
        assert!(r.witness.unwrap().contains("e2"));
    }

    #[test]
    fn segmented_mapping_algebra_checks() {
        let a = alg(&[("z", 2, 2), ("y1", 3, 4), ("y2", 5, 6)]);
        let z = a.gen(0);
        let d = vec![CgaElement::zero(), a.pow(&z, 2), a.pow(&z, 3)];
        let p = CdgaPresentation::from_parts("map11", a, d, DegreeWindow { min: 0, max: 12 });
        assert!(p.check().passed);
    }

    #[test]
    fn beta_derivation() {
        // Λ(v, s^-1 v) with |v| = 2; β(v) = s^-1 v, β(s^-1 v) = 0.
        let a = alg(&[("v", 2, 2), ("sv", 1, 2)]);
        let sv = a.index_of("sv").unwrap();
        let p = CdgaPresentation::from_parts("L", a.clone(), vec![CgaElement::zero(); 2], DegreeWindow { min: 0, max: 8 });
        let vals: BTreeMap<String, CgaElement> = [("v".to_string(), a.gen(sv))].into_iter().collect();
        let beta = p.extend_derivation(&vals, -1, 0, 0, 8).unwrap();
        assert_eq!((beta.degree_shift, beta.weight_shift), (-1, 0));
        let mut vs = vec![CgaElement::zero(); 2];
        vs[a.index_of("v").unwrap()] = a.gen(sv);
        for m in a.monomials(0, 8) {
            let once = a.derive_mono(&vs, -1, &m);
            assert!(a.apply_derivation(&vs, -1, &once).is_zero());
        }
        let zero = p.extend_derivation(&BTreeMap::new(), -1, 0, 0, 8).unwrap();
        assert!(zero.matrix.is_zero());
    }

    #[test]
    fn morphism_check() {
        let p = s2();
        let id: BTreeMap<String, CgaElement> = [("e2".to_string(), p.algebra.gen(0)), ("e3".to_string(), p.algebra.gen(1))].into_iter().collect();
        let f = CdgaMorphism::new(p.clone(), p.clone(), &id).unwrap();
        assert!(f.check().passed);
        assert!(f.is_identity_on_generators());
        let half: BTreeMap<String, CgaElement> =
            [("e2".to_string(), p.algebra.gen(0).scale(&frac(1, 2))), ("e3".to_string(), p.algebra.gen(1))].into_iter().collect();
        assert!(!CdgaMorphism::new(p.clone(), p, &half).unwrap().check().passed);
    }
}
