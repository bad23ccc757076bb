//! Bigraded (degree, weight) slices, linear maps between them, and windowed
//! cohomology of finite bigraded complexes.
//!
//! Cohomological conventions throughout: differentials raise degree by one and
//! preserve weight. The suspension `s` raises degree by one, so `s^{-1}V` in
//! degree `n` is `V` in degree `n + 1`.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use crate::exactlin::{complement_indices, kernel_basis, rank, zero_vec, CoordinateSystem, SparseMatrix, Vector};
use crate::Error;

/// Closed degree interval `[min, max]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DegreeWindow {
    pub min: i32,
    pub max: i32,
}

impl DegreeWindow {
    pub fn new(min: i32, max: i32) -> Result<Self, Error> {
        if min > max {
            return Err(Error::InvalidWindow(format!("{min}..{max}")));
        }
        Ok(DegreeWindow { min, max })
    }

    pub fn contains(&self, n: i32) -> bool {
        self.min <= n && n <= self.max
    }

    pub fn degrees(&self) -> impl Iterator<Item = i32> {
        self.min..=self.max
    }

    /// Window grown by `k` on both ends.
    pub fn widened(&self, k: i32) -> DegreeWindow {
        DegreeWindow { min: self.min - k, max: self.max + k }
    }

    pub fn contains_window(&self, other: &DegreeWindow) -> bool {
        self.min <= other.min && other.max <= self.max
    }

    pub fn negated(&self) -> DegreeWindow {
        DegreeWindow { min: -self.max, max: -self.min }
    }
}

impl fmt::Display for DegreeWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.min, self.max)
    }
}

impl std::str::FromStr for DegreeWindow {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let (a, b) = s.split_once("..").ok_or_else(|| Error::InvalidWindow(s.to_string()))?;
        let a = a.trim().parse().map_err(|_| Error::InvalidWindow(s.to_string()))?;
        let b = b.trim().parse().map_err(|_| Error::InvalidWindow(s.to_string()))?;
        DegreeWindow::new(a, b)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisElement {
    pub label: String,
    pub degree: i32,
    pub weight: i32,
}

impl BasisElement {
    pub fn new(label: impl Into<String>, degree: i32, weight: i32) -> Self {
        BasisElement { label: label.into(), degree, weight }
    }
}

/// A finite-dimensional bigraded vector space with a chosen basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSlice {
    basis: Vec<BasisElement>,
    window: DegreeWindow,
}

const DUAL_MARK: &str = "^v";

impl GradedSlice {
    pub fn new(basis: Vec<BasisElement>, window: DegreeWindow) -> Result<Self, Error> {
        let mut seen = HashSet::new();
        for b in &basis {
            if !seen.insert(b.label.as_str()) {
                return Err(Error::DuplicateName(b.label.clone()));
            }
            if !window.contains(b.degree) {
                return Err(Error::OutsideWindow { label: b.label.clone(), degree: b.degree, window });
            }
        }
        Ok(GradedSlice { basis, window })
    }

    /// Slice with the tightest window containing its basis (`0..0` if empty).
    pub fn from_basis(basis: Vec<BasisElement>) -> Result<Self, Error> {
        let min = basis.iter().map(|b| b.degree).min().unwrap_or(0);
        let max = basis.iter().map(|b| b.degree).max().unwrap_or(0);
        Self::new(basis, DegreeWindow { min, max })
    }

    pub fn empty(window: DegreeWindow) -> Self {
        GradedSlice { basis: Vec::new(), window }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn element(&self, i: usize) -> &BasisElement {
        &self.basis[i]
    }

    pub fn degree(&self, i: usize) -> i32 {
        self.basis[i].degree
    }

    pub fn weight(&self, i: usize) -> i32 {
        self.basis[i].weight
    }

    pub fn label(&self, i: usize) -> &str {
        &self.basis[i].label
    }

    pub fn window(&self) -> DegreeWindow {
        self.window
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.label == label)
    }

    /// Dimension table per (degree, weight).
    pub fn dims(&self) -> BTreeMap<(i32, i32), usize> {
        let mut out = BTreeMap::new();
        for b in &self.basis {
            *out.entry((b.degree, b.weight)).or_insert(0) += 1;
        }
        out
    }

    pub fn bidegrees(&self) -> BTreeSet<(i32, i32)> {
        self.basis.iter().map(|b| (b.degree, b.weight)).collect()
    }

    pub fn block_indices(&self, degree: i32, weight: i32) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.basis[i].degree == degree && self.basis[i].weight == weight).collect()
    }

    pub fn degree_indices(&self, degree: i32) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.basis[i].degree == degree).collect()
    }

    /// `s^k` applied to every basis element: degree `n` becomes `n + k`.
    pub fn shift(&self, k: i32) -> GradedSlice {
        if k == 0 {
            return self.clone();
        }
        let basis = self
            .basis
            .iter()
            .map(|b| BasisElement::new(shift_label(&b.label, k), b.degree + k, b.weight))
            .collect();
        GradedSlice { basis, window: DegreeWindow { min: self.window.min + k, max: self.window.max + k } }
    }

    /// Dual slice: `(n, p)` becomes `(-n, -p)`.
    pub fn dualize(&self) -> GradedSlice {
        let basis = self
            .basis
            .iter()
            .map(|b| {
                let label = match b.label.strip_suffix(DUAL_MARK) {
                    Some(orig) => orig.to_string(),
                    None => format!("{}{}", b.label, DUAL_MARK),
                };
                BasisElement::new(label, -b.degree, -b.weight)
            })
            .collect();
        GradedSlice { basis, window: self.window.negated() }
    }

    /// Pairs `a_i ⊗ b_j` whose degree lies in `window`.
    pub fn tensor(a: &GradedSlice, b: &GradedSlice, window: DegreeWindow) -> GradedSlice {
        let mut basis = Vec::new();
        for x in &a.basis {
            for y in &b.basis {
                let n = x.degree + y.degree;
                if window.contains(n) {
                    basis.push(BasisElement::new(format!("{}⊗{}", x.label, y.label), n, x.weight + y.weight));
                }
            }
        }
        GradedSlice { basis, window }
    }
}

fn shift_label(label: &str, k: i32) -> String {
    match k {
        1 => format!("s({label})"),
        -1 => format!("s^-1({label})"),
        _ => format!("s^{k}({label})"),
    }
}

/// A linear map of fixed degree and weight shift between slices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearMapSlice {
    pub source: GradedSlice,
    pub target: GradedSlice,
    /// `target.dim() × source.dim()`.
    pub matrix: SparseMatrix,
    pub degree_shift: i32,
    pub weight_shift: i32,
}

impl LinearMapSlice {
    pub fn new(source: GradedSlice, target: GradedSlice, matrix: SparseMatrix, degree_shift: i32, weight_shift: i32) -> Result<Self, Error> {
        assert_eq!((matrix.rows(), matrix.cols()), (target.dim(), source.dim()));
        for (r, c, _) in matrix.entries() {
            let (s, t) = (source.element(c), target.element(r));
            if t.degree != s.degree + degree_shift || t.weight != s.weight + weight_shift {
                return Err(Error::BidegreeViolation(format!(
                    "entry {} -> {} does not have shift ({degree_shift},{weight_shift})",
                    s.label, t.label
                )));
            }
        }
        Ok(LinearMapSlice { source, target, matrix, degree_shift, weight_shift })
    }

    pub fn zero(source: GradedSlice, target: GradedSlice, degree_shift: i32, weight_shift: i32) -> Self {
        let matrix = SparseMatrix::zeros(target.dim(), source.dim());
        LinearMapSlice { source, target, matrix, degree_shift, weight_shift }
    }

    /// The block from `(degree, weight)` of the source.
    pub fn block(&self, degree: i32, weight: i32) -> SparseMatrix {
        let cols = self.source.block_indices(degree, weight);
        let rows = self.target.block_indices(degree + self.degree_shift, weight + self.weight_shift);
        self.matrix.select(&rows, &cols)
    }

    pub fn apply(&self, v: &[crate::exactlin::Scalar]) -> Vector {
        self.matrix.mul_vec(v)
    }

    pub fn compose(&self, first: &LinearMapSlice) -> LinearMapSlice {
        LinearMapSlice {
            source: first.source.clone(),
            target: self.target.clone(),
            matrix: self.matrix.mul(&first.matrix),
            degree_shift: self.degree_shift + first.degree_shift,
            weight_shift: self.weight_shift + first.weight_shift,
        }
    }
}

/// Per-(degree, weight) cohomology dimensions and representative cocycles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyReport {
    pub window: DegreeWindow,
    pub dims: BTreeMap<(i32, i32), usize>,
    /// Cocycles in ambient coordinates, one list per nonzero block.
    pub representatives: BTreeMap<(i32, i32), Vec<Vector>>,
}

impl CohomologyReport {
    pub fn dim(&self, degree: i32, weight: i32) -> usize {
        self.dims.get(&(degree, weight)).copied().unwrap_or(0)
    }

    pub fn degree_dim(&self, degree: i32) -> usize {
        self.dims.iter().filter(|((n, _), _)| *n == degree).map(|(_, d)| *d).sum()
    }

    /// Betti numbers for every degree of the window.
    pub fn betti(&self) -> Vec<(i32, usize)> {
        self.window.degrees().map(|n| (n, self.degree_dim(n))).collect()
    }

    pub fn support(&self) -> Vec<(i32, i32)> {
        self.dims.iter().filter(|(_, &d)| d > 0).map(|(&k, _)| k).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.values().sum()
    }

    /// Weights occurring in degree `n`.
    pub fn weights_in_degree(&self, n: i32) -> Vec<i32> {
        self.dims.iter().filter(|((d, _), &k)| *d == n && k > 0).map(|((_, w), _)| *w).collect()
    }
}

/// A finite bigraded cochain complex with a weight-preserving differential of
/// degree one.
#[derive(Clone, Debug)]
pub struct GradedComplex {
    pub space: GradedSlice,
    pub d: SparseMatrix,
}

impl GradedComplex {
    pub fn new(space: GradedSlice, d: SparseMatrix) -> Result<Self, Error> {
        LinearMapSlice::new(space.clone(), space.clone(), d.clone(), 1, 0)?;
        Ok(GradedComplex { space, d })
    }

    pub fn d_squared_is_zero(&self) -> bool {
        self.d.mul(&self.d).is_zero()
    }

    /// Block data at `(n, p)`: cocycle basis, coboundary basis and
    /// representatives completing coboundaries to cocycles, all in ambient
    /// coordinates.
    pub fn block(&self, n: i32, p: i32) -> CohomologyBlock {
        let dim = self.space.dim();
        let here = self.space.block_indices(n, p);
        let below = self.space.block_indices(n - 1, p);
        let above = self.space.block_indices(n + 1, p);
        let d_out = self.d.select(&above, &here);
        let kernel_local = kernel_basis(&d_out);
        let embed = |local: &Vector, idx: &[usize]| {
            let mut v = zero_vec(dim);
            for (k, &i) in idx.iter().enumerate() {
                v[i] = local[k].clone();
            }
            v
        };
        let d_in = self.d.select(&here, &below);
        let image_cols: Vec<Vector> = d_in.columns();
        let image_local: Vec<Vector> = {
            let pivots = crate::exactlin::independent_subset(&image_cols);
            pivots.iter().map(|&j| image_cols[j].clone()).collect()
        };
        // Representatives: complete the image inside the kernel.
        let reps_local = if kernel_local.is_empty() {
            Vec::new()
        } else {
            let kcs = CoordinateSystem::new(here.len(), kernel_local.clone());
            let img_in_k: Vec<Vector> = image_local.iter().map(|v| kcs.coords(v).expect("image inside kernel")).collect();
            complement_indices(&img_in_k, kernel_local.len()).into_iter().map(|j| kernel_local[j].clone()).collect()
        };
        CohomologyBlock {
            cocycles: kernel_local.iter().map(|v| embed(v, &here)).collect(),
            coboundaries: image_local.iter().map(|v| embed(v, &here)).collect(),
            representatives: reps_local.iter().map(|v| embed(v, &here)).collect(),
        }
    }

    pub fn cohomology(&self, window: DegreeWindow) -> CohomologyReport {
        let mut dims = BTreeMap::new();
        let mut representatives = BTreeMap::new();
        for (n, p) in self.space.bidegrees() {
            if !window.contains(n) {
                continue;
            }
            let blk = self.block(n, p);
            if !blk.representatives.is_empty() {
                dims.insert((n, p), blk.representatives.len());
                representatives.insert((n, p), blk.representatives);
            }
        }
        CohomologyReport { window, dims, representatives }
    }

    /// Dimension count only.
    pub fn cohomology_dims(&self, window: DegreeWindow) -> BTreeMap<(i32, i32), usize> {
        let mut dims = BTreeMap::new();
        for (n, p) in self.space.bidegrees() {
            if !window.contains(n) {
                continue;
            }
            let here = self.space.block_indices(n, p);
            let below = self.space.block_indices(n - 1, p);
            let above = self.space.block_indices(n + 1, p);
            let z = here.len() - rank(&self.d.select(&above, &here));
            let b = rank(&self.d.select(&here, &below));
            if z > b {
                dims.insert((n, p), z - b);
            }
        }
        dims
    }
}

#[derive(Clone, Debug)]
pub struct CohomologyBlock {
    pub cocycles: Vec<Vector>,
    pub coboundaries: Vec<Vector>,
    pub representatives: Vec<Vector>,
}

/// Outcome of a verification: named checks plus the first failure witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub subject: String,
    pub passed: bool,
    pub checks: Vec<(String, bool)>,
    pub witness: Option<String>,
}

impl CheckReport {
    pub fn new(subject: impl Into<String>) -> Self {
        CheckReport { subject: subject.into(), passed: true, checks: Vec::new(), witness: None }
    }

    pub fn pass(&mut self, name: &str) {
        self.checks.push((name.to_string(), true));
    }

    /// Records a failure; only the first witness and one entry per name are kept.
    pub fn fail_once(&mut self, name: &str, witness: String) {
        self.passed = false;
        if !self.checks.iter().any(|(n, ok)| n == name && !ok) {
            self.checks.push((name.to_string(), false));
        }
        if self.witness.is_none() {
            self.witness = Some(witness);
        }
    }

    pub fn record(&mut self, name: &str, ok: bool, witness: &str) {
        if ok {
            self.pass(name);
        } else {
            self.fail_once(name, witness.to_string());
        }
    }

    /// Informational entry that does not affect `passed`.
    pub fn note(&mut self, name: &str, value: bool) {
        self.checks.push((name.to_string(), value));
    }

    pub fn merge(&mut self, other: CheckReport) {
        for (n, ok) in other.checks {
            self.checks.push((format!("{}: {}", other.subject, n), ok));
        }
        if !other.passed {
            self.passed = false;
            if self.witness.is_none() {
                self.witness = other.witness;
            }
        }
    }

    pub fn get(&self, name: &str) -> Option<bool> {
        self.checks.iter().find(|(n, _)| n == name).map(|(_, ok)| *ok)
    }
}

/// Renders a vector as a linear combination of labels.
pub fn format_combination(labels: &[&str], v: &[crate::exactlin::Scalar]) -> String {
    use num_traits::{One, Signed, Zero};
    let mut out = String::new();
    for (i, c) in v.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let a = c.abs();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if !a.is_one() {
            out.push_str(&format!("{a}*"));
        }
        out.push_str(labels[i]);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::q;

    fn slice(items: &[(&str, i32, i32)]) -> GradedSlice {
        GradedSlice::from_basis(items.iter().map(|&(l, d, w)| BasisElement::new(l, d, w)).collect()).unwrap()
    }

    #[test]
    fn shifts() {
        let s = slice(&[("x", 2, 2)]);
        assert_eq!(s.shift(0), s);
        // s^{-1} lowers degree by one: (s^{-1}V)^n = V^{n+1}.
        assert_eq!(s.shift(-1).degree(0), 1);
        assert_eq!(s.shift(-1).weight(0), 2);
        let back = s.shift(1).shift(-1);
        assert_eq!(back.basis()[0].degree, 2);
        assert_eq!(back.dims(), s.dims());
    }

    #[test]
    fn duals() {
        let s = slice(&[("x", 2, 2), ("y", 3, 4)]);
        assert_eq!(s.dualize().dualize(), s);
        let d = s.dualize();
        assert_eq!((d.degree(0), d.weight(0)), (-2, -2));
        let e = GradedSlice::empty(DegreeWindow::new(0, 3).unwrap());
        assert!(e.dualize().is_empty());
    }

    #[test]
    fn tensors() {
        let unit = slice(&[("1", 0, 0)]);
        let s = slice(&[("x", 2, 2), ("y", 3, 4)]);
        let w = DegreeWindow::new(-10, 10).unwrap();
        assert_eq!(GradedSlice::tensor(&unit, &s, w).dims(), s.dims());
        let t = GradedSlice::tensor(&slice(&[("u", 2, 2)]), &slice(&[("v", -1, -2)]), w);
        assert_eq!((t.degree(0), t.weight(0)), (1, 0));
        let empty = GradedSlice::empty(w);
        assert!(GradedSlice::tensor(&s, &empty, w).is_empty());
    }

    #[test]
    fn tensor_dims_are_convolution() {
        let a = slice(&[("a0", 0, 0), ("a1", 2, 2), ("a2", 2, 3), ("a3", 3, 3)]);
        let b = slice(&[("b0", -1, -2), ("b1", -2, -4), ("b2", -1, -1)]);
        let w = DegreeWindow::new(-1, 1).unwrap();
        let t = GradedSlice::tensor(&a, &b, w);
        let (da, db) = (a.dims(), b.dims());
        for n in -1..=1 {
            for p in -6..=6 {
                let mut expected = 0;
                for (&(i, qq), &x) in &da {
                    expected += x * db.get(&(n - i, p - qq)).copied().unwrap_or(0);
                }
                assert_eq!(t.dims().get(&(n, p)).copied().unwrap_or(0), expected);
            }
        }
    }

    #[test]
    fn window_parse() {
        let w: DegreeWindow = "-6..0".parse().unwrap();
        assert_eq!(w, DegreeWindow { min: -6, max: 0 });
        assert!("3..1".parse::<DegreeWindow>().is_err());
    }

    #[test]
    fn complex_cohomology() {
        // x -> y in the same weight, z alone.
        let s = slice(&[("x", 0, 1), ("y", 1, 1), ("z", 1, 2)]);
        let d = SparseMatrix::from_triplets(3, 3, vec![(1, 0, q(1))]);
        let c = GradedComplex::new(s, d).unwrap();
        let h = c.cohomology(DegreeWindow::new(0, 1).unwrap());
        assert_eq!(h.dims, [((1, 2), 1)].into_iter().collect());
    }

    #[test]
    fn rejects_bad_shift() {
        let s = slice(&[("x", 0, 1), ("y", 1, 2)]);
        let d = SparseMatrix::from_triplets(2, 2, vec![(1, 0, q(1))]);
        assert!(GradedComplex::new(s, d).is_err());
    }
}
