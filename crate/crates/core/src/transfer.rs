//! Homotopy retracts onto cohomology and transfer of ∞-structures.
//!
//! With `F_1 = i` and, for `n ≥ 2`,
//! `G_n = Σ_{k≥2} Σ b_k(F_{n_1}, …, F_{n_k})` (compositions for planar
//! kinds, set partitions with Koszul signs for L∞), the transferred
//! operations are `b'_n = p G_n` and the ∞-inclusion is `F_n = -h G_n`.
//! These are the tree formulas in recursive form; the side conditions
//! `hi = 0`, `ph = 0`, `h² = 0` are built in.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{One, Zero};
use rand::Rng;

use crate::exactlin::{axpy, complement_indices, inverse, q, Scalar, SparseMatrix, SparseVec, Vector};
use crate::freecga::CdgaPresentation;
use crate::freelie::DglaPresentation;
use crate::graded::{BasisElement, CheckReport, DegreeWindow, GradedComplex, GradedSlice};
use crate::ooinfty::{compositions, partition_sign, set_partitions, FdAlgebra, MultiMap, OoMorphism, OoStructure};
use crate::{Error, Result};

/// `(A, d) ⇄ (H, 0)` with `p i = id`, `id - i p = d h + h d`.
#[derive(Clone, Debug)]
pub struct HomotopyRetract {
    pub big: GradedComplex,
    pub small: GradedSlice,
    /// `big × small`.
    pub i: SparseMatrix,
    /// `small × big`.
    pub p: SparseMatrix,
    /// `big × big`, degree −1.
    pub h: SparseMatrix,
}

impl HomotopyRetract {
    pub fn check(&self) -> CheckReport {
        let mut r = CheckReport::new("homotopy retract");
        let d = &self.big.d;
        let n = self.big.space.dim();
        let m = self.small.dim();
        r.record("p_i_identity", self.p.mul(&self.i) == SparseMatrix::identity(m), "p i != id");
        let lhs = SparseMatrix::identity(n).sub(&self.i.mul(&self.p));
        let rhs = d.mul(&self.h).add(&self.h.mul(d));
        r.record("homotopy_identity", lhs == rhs, "id - ip != dh + hd");
        r.record("i_chain", d.mul(&self.i).is_zero(), "d i != 0");
        r.record("p_chain", self.p.mul(d).is_zero(), "p d != 0");
        r.record("h_i_zero", self.h.mul(&self.i).is_zero(), "h i != 0");
        r.record("p_h_zero", self.p.mul(&self.h).is_zero(), "p h != 0");
        r.record("h_squared_zero", self.h.mul(&self.h).is_zero(), "h^2 != 0");
        let wt = |mat: &SparseMatrix, src: &GradedSlice, tgt: &GradedSlice, shift: i32| mat.entries().all(|(a, b, _)| tgt.weight(a) == src.weight(b) && tgt.degree(a) == src.degree(b) + shift);
        let ok = wt(&self.i, &self.small, &self.big.space, 0) && wt(&self.p, &self.big.space, &self.small, 0) && wt(&self.h, &self.big.space, &self.big.space, -1);
        r.record("weight_preserving", ok, "retract data leaves its bidegree");
        r
    }
}

/// Deterministic retract onto cohomology.
pub fn build_retract(c: &GradedComplex) -> HomotopyRetract {
    build_retract_with(c, None::<&mut rand_chacha::ChaCha8Rng>)
}

/// Retract with optional random perturbation of the chosen complements and
/// representatives (still a valid retract with side conditions).
pub fn build_retract_with<R: Rng>(c: &GradedComplex, mut rng: Option<&mut R>) -> HomotopyRetract {
    let space = &c.space;
    let n = space.dim();
    let weights: BTreeSet<i32> = space.basis().iter().map(|b| b.weight).collect();
    let mut small_elems: Vec<BasisElement> = Vec::new();
    let mut i_cols: Vec<Vector> = Vec::new();
    let mut p_rows: Vec<(usize, Vector)> = Vec::new();
    let mut h_trip: Vec<(usize, usize, Scalar)> = Vec::new();
    let mut used_labels: HashMap<String, usize> = HashMap::new();
    for &w in &weights {
        let degrees: BTreeSet<i32> = space.basis().iter().filter(|b| b.weight == w).map(|b| b.degree).collect();
        // Complement C^{n-1} from the previous degree, as ambient vectors.
        let mut prev_c: Vec<Vector> = Vec::new();
        let mut prev_deg = i32::MIN;
        for &deg in &degrees {
            if deg != prev_deg + 1 {
                prev_c.clear();
            }
            let here = space.block_indices(deg, w);
            let above = space.block_indices(deg + 1, w);
            let dl = c.d.select(&above, &here);
            let z_local = crate::exactlin::kernel_basis(&dl);
            let embed = |v: &Vector| {
                let mut out = vec![Scalar::zero(); n];
                for (k, &ix) in here.iter().enumerate() {
                    out[ix] = v[k].clone();
                }
                out
            };
            let restrict = |v: &Vector| -> Vector { here.iter().map(|&ix| v[ix].clone()).collect() };
            let b_local: Vec<Vector> = prev_c.iter().map(|cv| restrict(&c.d.mul_vec(cv))).collect();
            // Representatives of Z / B, in Z coordinates then ambient.
            let mut h_local: Vec<Vector> = Vec::new();
            if !z_local.is_empty() {
                let zcs = crate::exactlin::CoordinateSystem::new(here.len(), z_local.clone());
                let b_in_z: Vec<Vector> = b_local.iter().map(|b| zcs.coords(b).expect("boundaries are cocycles")).collect();
                for j in complement_indices(&b_in_z, z_local.len()) {
                    let mut v = z_local[j].clone();
                    if let Some(r) = rng.as_deref_mut() {
                        for b in &b_local {
                            let k: i64 = r.gen_range(-2..=2);
                            for (x, y) in v.iter_mut().zip(b) {
                                *x += q(k) * y;
                            }
                        }
                    }
                    h_local.push(v);
                }
            }
            // Complement of Z inside the block.
            let mut c_local: Vec<Vector> = Vec::new();
            for j in complement_indices(&z_local, here.len()) {
                let mut v = vec![Scalar::zero(); here.len()];
                v[j] = Scalar::one();
                if let Some(r) = rng.as_deref_mut() {
                    for z in &z_local {
                        let k: i64 = r.gen_range(-1..=1);
                        for (x, y) in v.iter_mut().zip(z) {
                            *x += q(k) * y;
                        }
                    }
                }
                c_local.push(v);
            }
            let cols: Vec<Vector> = b_local.iter().chain(h_local.iter()).chain(c_local.iter()).cloned().collect();
            assert_eq!(cols.len(), here.len(), "B + H + C spans the block");
            let m = SparseMatrix::from_columns(here.len(), &cols);
            let inv = inverse(&m).expect("B + H + C is a basis");
            let nb = b_local.len();
            let start = small_elems.len();
            for (k, hv) in h_local.iter().enumerate() {
                let amb = embed(hv);
                let lead = amb.iter().position(|x| !x.is_zero()).expect("nonzero class");
                let base = format!("[{}]", space.label(lead));
                let cnt = used_labels.entry(base.clone()).or_insert(0);
                let label = if *cnt == 0 { base.clone() } else { format!("{base}_{cnt}") };
                *cnt += 1;
                small_elems.push(BasisElement::new(label, deg, w));
                i_cols.push(amb);
                // p: H-coordinate rows of the inverse.
                let row = inv.row(nb + k);
                let mut pr = vec![Scalar::zero(); n];
                for (col, x) in row {
                    pr[here[*col]] = x.clone();
                }
                p_rows.push((start + k, pr));
            }
            // h(d c_j) = c_j: B-coordinates then the previous complement.
            for (j, cv) in prev_c.iter().enumerate() {
                for (col, x) in inv.row(j) {
                    let src = here[*col];
                    for (t, y) in cv.iter().enumerate() {
                        if !y.is_zero() {
                            h_trip.push((t, src, x * y));
                        }
                    }
                }
            }
            prev_c = c_local.iter().map(embed).collect();
            prev_deg = deg;
        }
    }
    // Order the small basis canonically by (degree, weight).
    let mut order: Vec<usize> = (0..small_elems.len()).collect();
    order.sort_by_key(|&k| (small_elems[k].degree, small_elems[k].weight, k));
    let small = GradedSlice::from_basis(order.iter().map(|&k| small_elems[k].clone()).collect()).expect("labels unique");
    let small = if small.is_empty() { GradedSlice::empty(space.window()) } else { small };
    let i = SparseMatrix::from_columns(n, &order.iter().map(|&k| i_cols[k].clone()).collect::<Vec<_>>());
    let mut p_dense: Vec<Vector> = vec![Vec::new(); order.len()];
    for (pos, &k) in order.iter().enumerate() {
        p_dense[pos] = p_rows.iter().find(|(s, _)| *s == k).unwrap().1.clone();
    }
    let p = if p_dense.is_empty() { SparseMatrix::zeros(0, n) } else { SparseMatrix::from_dense(&p_dense) };
    let i = if order.is_empty() { SparseMatrix::zeros(n, 0) } else { i };
    let h = SparseMatrix::from_triplets(n, n, h_trip);
    HomotopyRetract { big: c.clone(), small, i, p, h }
}

/// Transfers `big` along `r`, returning the minimal structure on `r.small`
/// and the ∞-inclusion.
pub fn transfer_structure(big: &OoStructure, r: &HomotopyRetract, arity_bound: usize) -> (OoStructure, OoMorphism) {
    let small_dim = r.small.dim();
    let mut small = OoStructure::new(big.kind, r.small.clone(), arity_bound);
    let planar = big.kind.planar();
    let big_bideg: BTreeSet<(i32, i32)> = (0..big.dim()).map(|i| (big.sd(i), big.space.weight(i))).collect();
    let sds: Vec<i32> = (0..small_dim).map(|i| r.small.degree(i) - 1).collect();
    let wts: Vec<i32> = (0..small_dim).map(|i| r.small.weight(i)).collect();
    let i_cols = r.i.sparse_columns();
    let mut memo: HashMap<Vec<usize>, SparseVec> = HashMap::new();
    for (k, col) in i_cols.iter().enumerate() {
        memo.insert(vec![k], col.clone());
    }
    let mut morph = OoMorphism::new(small.clone(), big.clone(), arity_bound);
    {
        let c1 = morph.component_mut(1);
        for (k, col) in i_cols.iter().enumerate() {
            c1.set(vec![k], col.clone());
        }
    }
    let max_big_arity = big.max_nonzero_arity();
    // Keys of nonzero F_c by length; F_1 = i is nonzero on every basis element.
    let mut support: Vec<Vec<Vec<usize>>> = vec![Vec::new(); arity_bound + 1];
    support[1] = (0..small_dim).map(|k| vec![k]).collect();
    for n in 2..=arity_bound {
        let mut bn = MultiMap::default();
        let mut fnm = MultiMap::default();
        // Planar structures: only tuples split by some composition into pieces
        // with nonzero F can contribute. Symmetric ones: sorted tuples only,
        // the rest follows by graded symmetry.
        let candidates: Vec<Vec<usize>> = if planar {
            let mut set = BTreeSet::new();
            for comp in compositions(n) {
                let k = comp.len();
                if k < 2 || k > max_big_arity || big.op_is_zero(k) {
                    continue;
                }
                let mut partial: Vec<Vec<usize>> = vec![Vec::new()];
                for &c in &comp {
                    let mut next = Vec::new();
                    for p in &partial {
                        for s in &support[c] {
                            let mut t = p.clone();
                            t.extend_from_slice(s);
                            next.push(t);
                        }
                    }
                    partial = next;
                }
                set.extend(partial);
            }
            set.into_iter().collect()
        } else {
            let mut out = Vec::new();
            sorted_tuples(small_dim, n, &mut |t: &[usize]| out.push(t.to_vec()));
            out
        };
        for t in candidates {
            let t = &t[..];
            let sd: i32 = t.iter().map(|&i| sds[i]).sum();
            let w: i32 = t.iter().map(|&i| wts[i]).sum();
            if !big_bideg.contains(&(sd + 1, w)) {
                continue;
            }
            let mut g = SparseVec::new();
            if planar {
                for comp in compositions(n) {
                    let k = comp.len();
                    if k < 2 || k > max_big_arity || big.op_is_zero(k) {
                        continue;
                    }
                    let mut pos = 0;
                    let mut args: Vec<&SparseVec> = Vec::with_capacity(k);
                    let mut zero = false;
                    for &c in &comp {
                        match memo.get(&t[pos..pos + c]) {
                            Some(v) => args.push(v),
                            None => {
                                zero = true;
                                break;
                            }
                        }
                        pos += c;
                    }
                    if zero {
                        continue;
                    }
                    axpy(&mut g, &Scalar::one(), &big.eval(k, &args));
                }
            } else {
                for blocks in set_partitions(n) {
                    let k = blocks.len();
                    if k < 2 || k > max_big_arity || big.op_is_zero(k) {
                        continue;
                    }
                    let mut args: Vec<&SparseVec> = Vec::with_capacity(k);
                    let mut zero = false;
                    for b in &blocks {
                        let sub: Vec<usize> = b.iter().map(|&x| t[x]).collect();
                        match memo.get(&sub) {
                            Some(v) => args.push(v),
                            None => {
                                zero = true;
                                break;
                            }
                        }
                    }
                    if zero {
                        continue;
                    }
                    let neg = partition_sign(|i| sds[i], t, &blocks);
                    let c = if neg { -Scalar::one() } else { Scalar::one() };
                    axpy(&mut g, &c, &big.eval(k, &args));
                }
            }
            if g.is_empty() {
                continue;
            }
            let pg = r.p.mul_sparse(&g);
            let hg: SparseVec = r.h.mul_sparse(&g).into_iter().map(|(k, c)| (k, -c)).collect();
            let tsd: Vec<i32> = t.iter().map(|&i| sds[i]).collect();
            if planar {
                bn.set(t.to_vec(), pg);
                if !hg.is_empty() {
                    fnm.set(t.to_vec(), hg.clone());
                }
            } else {
                bn.set_symmetric(&tsd, t, pg);
                if !hg.is_empty() {
                    fnm.set_symmetric(&tsd, t, hg.clone());
                }
            }
            if !hg.is_empty() {
                memo.insert(t.to_vec(), hg);
                support[n].push(t.to_vec());
            }
        }
        small.ops.insert(n, bn);
        morph.components.insert(n, fnm);
    }
    small.complete = small.ops_vanish_above(arity_bound);
    morph.source = small.clone();
    (small, morph)
}

/// Non-decreasing tuples of length `n` over `0..dim`.
fn sorted_tuples(dim: usize, n: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(dim: usize, n: usize, t: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if t.len() == n {
            f(t);
            return;
        }
        let lo = t.last().copied().unwrap_or(0);
        for k in lo..dim {
            t.push(k);
            rec(dim, n, t, f);
            t.pop();
        }
    }
    rec(dim, n, &mut Vec::with_capacity(n), f)
}

/// Minimal model with its ∞-quasi-isomorphism, plus the retract used.
#[derive(Clone, Debug)]
pub struct MinimalModel {
    pub structure: OoStructure,
    pub inclusion: OoMorphism,
    pub retract: HomotopyRetract,
    pub big: OoStructure,
}

pub fn minimal_from_structure(big: &OoStructure, arity_bound: usize) -> MinimalModel {
    let retract = build_retract(&big.complex());
    let (structure, inclusion) = transfer_structure(big, &retract, arity_bound);
    MinimalModel { structure, inclusion, retract, big: big.clone() }
}

/// Minimal C∞ model of an algebra given by structure constants.
pub fn minimal_of_fd(a: &FdAlgebra, arity_bound: usize) -> MinimalModel {
    minimal_from_structure(&a.to_oo(), arity_bound)
}

/// Minimal C∞ model of a free CDGA, exact in degrees `≤ window.max`.
pub fn minimal_of_cdga(p: &CdgaPresentation, window: DegreeWindow, arity_bound: usize) -> Result<MinimalModel> {
    let (fd, _) = FdAlgebra::good_truncation(p, window.max)?;
    Ok(minimal_of_fd(&fd, arity_bound))
}

/// Minimal L∞ model of a free dgla, exact in degrees `≥ window.min`.
pub fn minimal_of_dgla(p: &DglaPresentation, window: DegreeWindow, arity_bound: usize) -> Result<MinimalModel> {
    let l = crate::barcobar::dgla_good_truncation(p, -window.min)?;
    Ok(minimal_from_structure(&l.structure, arity_bound))
}

/// Outcome of the segmentation-implies-vanishing check.
#[derive(Clone, Debug)]
pub struct VanishingReport {
    pub alpha: Scalar,
    pub k: usize,
    pub checked_up_to: usize,
    pub nonzero_above: Vec<usize>,
    /// Tuples of arity `> k + 2` whose output bidegree is occupied; the
    /// weight argument says there are none.
    pub weight_argument_violations: u64,
    pub passed: bool,
}

pub fn vanishing_from_segmentation(s: &OoStructure, alpha: &Scalar, k: usize) -> Result<VanishingReport> {
    if !s.is_minimal() {
        return Err(Error::Precondition("structure is not minimal".into()));
    }
    for i in 0..s.dim() {
        let (n, p) = (s.space.degree(i), s.space.weight(i));
        let lo = alpha * q(n as i64);
        let hi = alpha * q(n as i64 + k as i64);
        let pw = q(p as i64);
        if pw < lo || pw > hi {
            return Err(Error::Precondition(format!("class {} at ({n},{p}) is not ({alpha},{k})-segmented", s.space.label(i))));
        }
    }
    let nonzero_above = s.vanishing_above(k + 2);
    let present: BTreeSet<(i32, i32)> = (0..s.dim()).map(|i| (s.space.degree(i), s.space.weight(i))).collect();
    // Count ordered m-tuples by the bidegree of their output.
    let mut one: BTreeMap<(i32, i32), u64> = BTreeMap::new();
    for i in 0..s.dim() {
        *one.entry((s.space.degree(i) - 1, s.space.weight(i))).or_insert(0) += 1;
    }
    let mut sums = one.clone();
    let mut viol = 0u64;
    for m in 2..=s.arity_bound {
        let mut next: BTreeMap<(i32, i32), u64> = BTreeMap::new();
        for (&(a, b), &c) in &sums {
            for (&(x, y), &e) in &one {
                *next.entry((a + x, b + y)).or_insert(0) += c * e;
            }
        }
        sums = next;
        if m >= k + 3 {
            viol += sums.iter().filter(|((sd, w), _)| present.contains(&(sd + 2, *w))).map(|(_, c)| c).sum::<u64>();
        }
    }
    Ok(VanishingReport { alpha: alpha.clone(), k, checked_up_to: s.arity_bound, passed: nonzero_above.is_empty() && viol == 0, nonzero_above, weight_argument_violations: viol })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freecga::{CgaElement, FreeCga, Generator};
    use rand::SeedableRng;

    fn s2() -> CdgaPresentation {
        let a = FreeCga::new(vec![Generator::new("e2", 2, 2), Generator::new("e3", 3, 4)]).unwrap();
        let d = vec![CgaElement::zero(), a.pow(&a.gen(0), 2)];
        CdgaPresentation::from_parts("S2", a, d, DegreeWindow { min: 0, max: 12 })
    }

    #[test]
    fn zero_differential_retract() {
        let h = FdAlgebra::truncated_polynomial("CP2", 2, 2, 2);
        let r = build_retract(&h.complex());
        assert!(r.check().passed);
        assert_eq!(r.i, SparseMatrix::identity(3));
        assert!(r.h.is_zero());
        let m = minimal_of_fd(&h, 5);
        assert!(m.structure.vanishing_above(2).is_empty());
    }

    #[test]
    fn s2_retract_and_transfer() {
        let (fd, _) = FdAlgebra::good_truncation(&s2(), 7).unwrap();
        let r = build_retract(&fd.complex());
        assert!(r.check().passed, "{:?}", r.check());
        assert_eq!(r.small.dim(), 2);
        let m = minimal_of_fd(&fd, 5);
        assert!(m.structure.check_relations(5).passed);
        assert!(m.inclusion.check_morphism(4).passed, "{:?}", m.inclusion.check_morphism(4));
        assert!(m.structure.op_is_zero(3));
    }

    #[test]
    fn random_retract_still_valid() {
        let (fd, _) = FdAlgebra::good_truncation(&s2(), 9).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let r = build_retract_with(&fd.complex(), Some(&mut rng));
        assert!(r.check().passed, "{:?}", r.check());
    }

    #[test]
    fn mapping_algebra_n1_k1() {
        // Λ(z, y1, y2), dz = 0, dy_r = z^{r+1}.
        let a = FreeCga::new(vec![Generator::new("z", 2, 2), Generator::new("y1", 3, 4), Generator::new("y2", 5, 6)]).unwrap();
        let z = a.gen(0);
        let d = vec![CgaElement::zero(), a.pow(&z, 2), a.pow(&z, 3)];
        let p = CdgaPresentation::from_parts("M11", a, d, DegreeWindow { min: 0, max: 13 });
        let m = minimal_of_cdga(&p, DegreeWindow { min: 0, max: 12 }, 6).unwrap();
        let r = m.structure.check_relations(4);
        assert!(r.passed, "{r:?}");
        for k in 4..=6 {
            assert!(m.structure.op_is_zero(k), "mu_{k}");
        }
        let v = vanishing_from_segmentation(&m.structure, &q(1), 1).unwrap();
        assert!(v.passed);
    }
}
