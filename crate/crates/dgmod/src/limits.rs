//! Finite directed systems of modules, their colimits as coequalizers, stage
//! factorization, the ring-case factorization of maps from finitely presented
//! modules through finitely generated frees, and a bounded search recognizing
//! finitely generated semi-free modules.

use std::collections::BTreeMap;

use crate::duality::bidual_map;
use crate::field::Field;
use crate::graded::{GradedMap, HomLayout, TensorLayout};
use crate::matrix::Matrix;
use crate::module::{
    direct_sum_modules, dual, dual_map, free_module, hom_module_set, kernel_module, map_from_free,
    tensor_a, tensor_map_right, DGModule, ModuleError, ModuleMap, Side,
};
use crate::report::ValidationReport;

/// A diagram over a finite poset on indices 0..n in topological order: every
/// relation i < j carries a transition map, closed under composition.
pub struct DirectedSystem {
    pub stages: Vec<DGModule>,
    pub transitions: BTreeMap<(usize, usize), ModuleMap>,
}

impl DirectedSystem {
    pub fn new(
        stages: Vec<DGModule>,
        transitions: BTreeMap<(usize, usize), ModuleMap>,
    ) -> Result<DirectedSystem, ModuleError> {
        let d = DirectedSystem { stages, transitions };
        let rep = d.validate();
        if rep.all_pass() {
            Ok(d)
        } else {
            Err(ModuleError::Invalid(rep))
        }
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        i == j || self.transitions.contains_key(&(i, j))
    }

    pub fn validate(&self) -> ValidationReport {
        let mut rep = ValidationReport::default();
        if self.stages.is_empty() {
            rep.push_fail("stage-count", "a directed system needs at least one stage".into());
            return rep;
        }
        rep.push_pass("stage-count");

        let mut endpoints = None;
        for (&(i, j), t) in &self.transitions {
            if i >= j || j >= self.stages.len() {
                endpoints = Some(format!("transition ({i},{j}) is not increasing in range"));
                break;
            }
            if t.source != self.stages[i] || t.target != self.stages[j] {
                endpoints = Some(format!("transition ({i},{j}) endpoints differ from the stages"));
                break;
            }
            if !t.is_valid() {
                endpoints = Some(format!("transition ({i},{j}) is not a module map"));
                break;
            }
        }
        rep.record("transition-endpoints", endpoints);

        let mut compat = None;
        'outer: for (&(i, j), tij) in &self.transitions {
            for (&(j2, k), tjk) in &self.transitions {
                if j2 != j {
                    continue;
                }
                match self.transitions.get(&(i, k)) {
                    None => {
                        compat = Some(format!("missing composite transition ({i},{k})"));
                        break 'outer;
                    }
                    Some(tik) => {
                        if tjk.compose(tij).map != tik.map {
                            compat = Some(format!(
                                "t({j},{k}) . t({i},{j}) differs from t({i},{k})"
                            ));
                            break 'outer;
                        }
                    }
                }
            }
        }
        rep.record("transition-compatibility", compat);

        let mut directed = None;
        'pairs: for i in 0..self.stages.len() {
            for j in 0..self.stages.len() {
                if !(0..self.stages.len()).any(|k| self.leq(i, k) && self.leq(j, k)) {
                    directed = Some(format!("stages {i} and {j} have no upper bound"));
                    break 'pairs;
                }
            }
        }
        rep.record("directedness", directed);
        rep
    }
}

/// Degreewise identity inclusions of the parts into their direct sum.
fn block_inclusions(parts: &[&DGModule], sum: &DGModule) -> Vec<ModuleMap> {
    let field = sum.field();
    let degrees: Vec<i64> = sum.carrier.support().collect();
    let mut out = Vec::with_capacity(parts.len());
    let mut offsets: BTreeMap<i64, usize> = degrees.iter().map(|&n| (n, 0usize)).collect();
    for part in parts {
        let mut comps = BTreeMap::new();
        for &n in &degrees {
            let cols = part.carrier.dim(n);
            if cols == 0 {
                continue;
            }
            let off = offsets[&n];
            let mut m = Matrix::zeros(field, sum.carrier.dim(n), cols);
            for c in 0..cols {
                m.set(off + c, c, field.one());
            }
            comps.insert(n, m);
            *offsets.get_mut(&n).unwrap() = off + cols;
        }
        let map = GradedMap::new(part.carrier.clone(), sum.carrier.clone(), 0, comps)
            .expect("block inclusion shape");
        out.push(ModuleMap { source: (*part).clone(), target: sum.clone(), map });
    }
    out
}

pub struct Colimit {
    pub module: DGModule,
    pub injections: Vec<ModuleMap>,
}

/// The colimit as the coequalizer of the transition relations: the direct sum
/// of the stages modulo iota_i(x) - iota_j(t_ij x) for every transition.
pub fn colimit(d: &DirectedSystem) -> Colimit {
    let parts: Vec<&DGModule> = d.stages.iter().collect();
    let sum = direct_sum_modules(&parts);
    let incls = block_inclusions(&parts, &sum);
    if d.transitions.is_empty() {
        return Colimit { module: sum, injections: incls };
    }
    let rel_parts: Vec<&DGModule> = d.transitions.keys().map(|&(i, _)| &d.stages[i]).collect();
    let rel_sum = direct_sum_modules(&rel_parts);
    let field = sum.field();
    let mut comps = BTreeMap::new();
    for n in rel_sum.carrier.support() {
        let mut m = Matrix::zeros(field, sum.carrier.dim(n), rel_sum.carrier.dim(n));
        let mut off = 0usize;
        for (&(i, j), t) in &d.transitions {
            let block = incls[i]
                .map
                .comp(n)
                .add(&incls[j].map.comp(n).mul(&t.map.comp(n)).neg());
            for c in 0..block.cols {
                for r in 0..block.rows {
                    m.set(r, off + c, block.get(r, c).clone());
                }
            }
            off += block.cols;
        }
        if !m.is_zero() {
            comps.insert(n, m);
        }
    }
    let rel_map = GradedMap::new(rel_sum.carrier.clone(), sum.carrier.clone(), 0, comps)
        .expect("relation map shape");
    let rel = ModuleMap { source: rel_sum, target: sum.clone(), map: rel_map };
    let (q, proj, _section) = crate::module::cokernel_module(&rel);
    let injections = incls.iter().map(|inc| proj.compose(inc)).collect();
    Colimit { module: q, injections }
}

/// A factorization u = w . v through an intermediate module, with the stage
/// index recorded when the intermediate is a stage of a directed system.
pub struct Factorization {
    pub stage: Option<usize>,
    pub through: DGModule,
    pub v: ModuleMap,
    pub w: ModuleMap,
}

impl Factorization {
    /// Exact recheck: both legs are module maps and w . v equals u.
    pub fn certifies(&self, u: &ModuleMap) -> bool {
        self.v.is_valid() && self.w.is_valid() && self.w.compose(&self.v).map == u.map
    }
}

/// Factors u : P -> colim(d) through the earliest stage (in index order)
/// admitting a module map v with iota_j . v = u. The candidate v is found by
/// solving for coefficients over the basis of module maps P -> stage_j.
pub fn factor_through_stage(
    u: &ModuleMap,
    d: &DirectedSystem,
    c: &Colimit,
) -> Option<Factorization> {
    let field = u.source.field();
    let hl = HomLayout::new(&u.source.carrier, &c.module.carrier);
    let target: Matrix = hl.to_vector(&u.map);
    for (j, stage) in d.stages.iter().enumerate() {
        let basis = hom_module_set(&u.source, stage);
        if basis.is_empty() {
            if u.map.is_zero() {
                return Some(Factorization {
                    stage: Some(j),
                    through: stage.clone(),
                    v: ModuleMap::zero(&u.source, stage),
                    w: c.injections[j].clone(),
                });
            }
            continue;
        }
        let mut m = Matrix::zeros(field, target.rows, basis.len());
        for (b, f) in basis.iter().enumerate() {
            let col = hl.to_vector(&c.injections[j].map.compose(&f.map));
            for r in 0..col.rows {
                m.set(r, b, col.get(r, 0).clone());
            }
        }
        if let Some(coeffs) = m.solve_right(&target) {
            let mut v = GradedMap::zero(u.source.carrier.clone(), stage.carrier.clone(), 0);
            for (b, f) in basis.iter().enumerate() {
                let cb = coeffs.get(b, 0);
                if !field.is_zero(cb) {
                    v = v.add(&f.map.scale(cb));
                }
            }
            return Some(Factorization {
                stage: Some(j),
                through: stage.clone(),
                v: ModuleMap { source: u.source.clone(), target: stage.clone(), map: v },
                w: c.injections[j].clone(),
            });
        }
    }
    None
}

/// A finite presentation L1 -> L0 ->> P by finitely generated free modules.
pub struct Presentation {
    pub f: ModuleMap,
    pub g: ModuleMap,
}

impl Presentation {
    pub fn validate(&self) -> ValidationReport {
        let mut rep = ValidationReport::default();
        rep.record(
            "free-stages",
            (self.f.source.free_gens.is_none() || self.f.target.free_gens.is_none())
                .then(|| "both presentation stages must be free by construction".into()),
        );
        rep.record(
            "composable",
            (self.f.target != self.g.source)
                .then(|| "middle modules of the presentation differ".into()),
        );
        rep.record(
            "module-maps",
            (!self.f.is_valid() || !self.g.is_valid())
                .then(|| "presentation legs must be module maps".into()),
        );
        if !rep.all_pass() {
            return rep;
        }
        rep.record("epi", (!self.g.is_surjective()).then(|| "g is not surjective".into()));
        rep.record(
            "complex",
            (!self.g.compose(&self.f).map.is_zero()).then(|| "g . f is nonzero".into()),
        );
        let mut exact = None;
        for n in self.g.source.carrier.support() {
            let want = self.g.source.carrier.dim(n) - self.g.map.comp(n).rank();
            let have = self.f.map.comp(n).rank();
            if want != have {
                exact = Some(format!("degree {n}: rank f = {have}, dim ker g = {want}"));
                break;
            }
        }
        rep.record("exact", exact);
        rep
    }
}

/// Factors u : P -> M, with P finitely presented and M flat, through a
/// finitely generated free module. Ring case: the algebra must be concentrated
/// in degree 0, as must all modules involved. The free middle is constructed
/// as the linear dual of a free cover of ker(f^*); failure of the lift used in
/// its construction is a certificate that M is not flat, and is reported as an
/// error naming the failing test.
pub fn lazard_factorize(u: &ModuleMap, pres: &Presentation) -> Result<Factorization, ModuleError> {
    let a = u.source.algebra.clone();
    if !a.is_degree_zero() {
        return Err(ModuleError::Usage(
            "lazard_factorize supports the ring case only: the algebra must be concentrated in degree 0".into(),
        ));
    }
    let rep = pres.validate();
    if !rep.all_pass() {
        return Err(ModuleError::Invalid(rep));
    }
    if u.source != pres.g.target {
        return Err(ModuleError::Usage("u must start at the presented module".into()));
    }
    if u.source.side != Side::Left {
        return Err(ModuleError::Usage("lazard_factorize expects left modules".into()));
    }
    if !u.is_valid() {
        return Err(ModuleError::Usage("u is not a module map".into()));
    }
    for x in [&u.source.carrier, &u.target.carrier] {
        if x.support().any(|n| n != 0) {
            return Err(ModuleError::Usage(
                "ring-case inputs must be concentrated in degree 0".into(),
            ));
        }
    }
    let field = u.source.field();
    let l0 = &pres.g.source;
    let l1 = &pres.f.source;
    let m = &u.target;
    let acx = &a.carrier;
    let a0 = acx.dim(0);

    // duals of the presentation and the kernel K of f^* inside L0^*
    let (beta0, d0, d00) = bidual_map(l0);
    let d1 = dual(l1);
    let fstar = dual_map(&pres.f, &d1, &d0);
    let (kmod, kincl) = kernel_module(&fstar);
    let kdim = kmod.carrier.dim(0);

    // free cover of K by one generator per basis vector
    let rank = kdim.max(1);
    let lp = free_module(&a, &vec![0; rank], Side::Right);
    let images: Vec<Matrix> = (0..rank)
        .map(|j| {
            let mut e = Matrix::zeros(field, kdim, 1);
            if j < kdim {
                e.set(j, 0, field.one());
            }
            e
        })
        .collect();
    let phi = map_from_free(&lp, &kmod, &images);
    let kphi = kincl.compose(&phi);

    // the element of L0^* (x)_A M corresponding to u . g
    let h = u.compose(&pres.g);
    let t0 = tensor_a(&d0.module, m);
    let hl0a = HomLayout::new(&l0.carrier, acx);
    let d0dim = d0.module.carrier.dim(0);
    let tlay0 = TensorLayout::new(&d0.module.carrier, &m.carrier);
    let mut wtilde = Matrix::zeros(field, t0.complex.dim(0), 1);
    let ngen = l0.free_gens.as_ref().expect("L0 is free").len();
    let unit = a.unit_column();
    for j in 0..ngen {
        // dual basis functional of the j-th generator: the identity block
        let mut ej = Matrix::zeros(field, a0, l0.carrier.dim(0));
        for r in 0..a0 {
            ej.set(r, j * a0 + r, field.one());
        }
        let ej_map = GradedMap::new(l0.carrier.clone(), acx.clone(), 0, BTreeMap::from([(0, ej)]))
            .expect("dual basis shape");
        let cj = d0
            .incl
            .comp(0)
            .solve_right(&hl0a.to_vector(&ej_map))
            .expect("dual basis functionals are A-linear");
        // image of the j-th generator under u . g
        let mut gen = Matrix::zeros(field, l0.carrier.dim(0), 1);
        for r in 0..a0 {
            gen.set(j * a0 + r, 0, unit.get(r, 0).clone());
        }
        let hj = h.map.comp(0).mul(&gen);
        let mut v = Matrix::zeros(field, tlay0.dim(0), 1);
        for fi in 0..d0dim {
            for mj in 0..m.carrier.dim(0) {
                let prod = field.mul(cj.get(fi, 0), hj.get(mj, 0));
                if !field.is_zero(&prod) {
                    v.set(tlay0.index(0, 0, fi, mj), 0, prod);
                }
            }
        }
        wtilde = wtilde.add(&t0.proj.comp(0).mul(&v));
    }

    // lift through the free cover tensored with M; flatness of M is exactly
    // what makes this solvable
    let tl = tensor_a(&lp, m);
    let cmap = tensor_map_right(&kphi, m, &tl, &t0);
    let lifted = cmap.comp(0).solve_right(&wtilde).ok_or_else(|| {
        ModuleError::Usage(format!(
            "target module is not flat: the canonical element does not lift through the rank-{rank} free cover of ker(f^*) tensored with the target"
        ))
    })?;

    // w : L = (L')^* -> M from the lifted tensor
    let dl = dual(&lp);
    let lmod = dl.module.clone();
    let lifted_full = tl.section.comp(0).mul(&lifted);
    let tlayl = TensorLayout::new(&lp.carrier, &m.carrier);
    let hlpa = HomLayout::new(&lp.carrier, acx);
    let lp0 = lp.carrier.dim(0);
    let m0 = m.carrier.dim(0);
    let lam = m.left().comp(0);
    let mlay = TensorLayout::new(acx, &m.carrier);
    let mut wmat = Matrix::zeros(field, m0, lmod.carrier.dim(0));
    for i in 0..lmod.carrier.dim(0) {
        let mut e = Matrix::zeros(field, lmod.carrier.dim(0), 1);
        e.set(i, 0, field.one());
        let psi = hlpa.from_vector(&dl.incl.comp(0).mul(&e), 0);
        let psi0 = psi.comp(0);
        let mut acc = Matrix::zeros(field, m0, 1);
        for k in 0..lp0 {
            for j in 0..m0 {
                let coeff = lifted_full.get(tlayl.index(0, 0, k, j), 0);
                if field.is_zero(coeff) {
                    continue;
                }
                let mut tv = Matrix::zeros(field, mlay.dim(0), 1);
                for r in 0..a0 {
                    tv.set(mlay.index(0, 0, r, j), 0, psi0.get(r, k).clone());
                }
                acc = acc.add(&lam.mul(&tv).scale(coeff));
            }
        }
        for r in 0..m0 {
            wmat.set(r, i, acc.get(r, 0).clone());
        }
    }
    let wmap = GradedMap::new(lmod.carrier.clone(), m.carrier.clone(), 0, BTreeMap::from([(0, wmat)]))
        .expect("w shape");
    let w = ModuleMap::new(lmod.clone(), m.clone(), wmap)
        .expect("evaluation against a tensor element is A-linear");

    // v' = (k . phi)^* . beta : L0 -> L, which kills im(f) and descends along g
    let vprime = dual_map(&kphi, &dl, &d00).compose(&beta0);
    let g0 = pres.g.map.comp(0);
    let v0 = g0
        .transpose()
        .solve_right(&vprime.map.comp(0).transpose())
        .expect("v' kills ker g, so it descends along the epi")
        .transpose();
    let vmap = GradedMap::new(
        u.source.carrier.clone(),
        lmod.carrier.clone(),
        0,
        BTreeMap::from([(0, v0)]),
    )
    .expect("v shape");
    let v = ModuleMap::new(u.source.clone(), lmod.clone(), vmap)
        .expect("descent of a module map along an epi");

    let fact = Factorization { stage: None, through: lmod, v, w };
    if !fact.certifies(u) {
        return Err(ModuleError::Usage("internal: factorization failed certification".into()));
    }
    Ok(fact)
}

#[derive(Debug, PartialEq)]
pub enum SemifreeVerdict {
    /// Generator degrees of the filtration quotients, bottom-up; each step is
    /// certified by an injective module map from a shifted free rank-1 module.
    Found(Vec<i64>),
    /// The bounded search is sound for `Found` only; this is inconclusive.
    NotFoundWithinBounds,
}

/// Bounded search for a finite semi-free filtration: repeatedly split off a
/// free rank-1 submodule generated by a cycle and recurse on the quotient.
pub fn recognize_fg_semifree(
    x: &DGModule,
    degree_bound: i64,
    length_bound: usize,
) -> SemifreeVerdict {
    assert!(x.side != Side::Bi, "filtration search works one side at a time");
    match search(x, degree_bound, length_bound) {
        Some(degs) => SemifreeVerdict::Found(degs),
        None => SemifreeVerdict::NotFoundWithinBounds,
    }
}

fn search(q: &DGModule, degree_bound: i64, length: usize) -> Option<Vec<i64>> {
    let atotal = q.algebra.total_dim();
    let qtotal = q.carrier.total_dim();
    if qtotal == 0 {
        return Some(vec![]);
    }
    if length == 0 || qtotal < atotal || qtotal % atotal != 0 {
        return None;
    }
    let field = q.field();
    for i in -degree_bound..=degree_bound {
        let cyc = q.carrier.cycles(i);
        if cyc.cols == 0 {
            continue;
        }
        for z in candidate_cycles(field, &cyc) {
            let free1 = free_module(&q.algebra, &[i], q.side);
            let mz = map_from_free(&free1, q, &[z]);
            if !mz.is_valid() || !mz.is_injective() {
                continue;
            }
            let (q2, _, _) = crate::module::cokernel_module(&mz);
            if let Some(mut rest) = search(&q2, degree_bound, length - 1) {
                let mut out = vec![i];
                out.append(&mut rest);
                return Some(out);
            }
        }
    }
    None
}

/// Nonzero elements of the span of the columns of `cyc`: exhaustive over small
/// prime fields, small integer coefficients over Q, capped either way.
fn candidate_cycles(field: Field, cyc: &Matrix) -> Vec<Matrix> {
    let d = cyc.cols as u32;
    let mut out = Vec::new();
    let radix: u64 = match field {
        Field::Prime(p) => p as u64,
        _ => 3,
    };
    let total = radix.saturating_pow(d).min(4096);
    for code in 1..total {
        let mut rest = code;
        let mut v = Matrix::zeros(field, cyc.rows, 1);
        for c in 0..d {
            let digit = (rest % radix) as i64;
            rest /= radix;
            let coeff = match field {
                Field::Prime(_) => field.from_i64(digit),
                _ => field.from_i64(digit - 1), // -1, 0, 1 over Q
            };
            if !field.is_zero(&coeff) {
                v = v.add(&cyc.column(c as usize).scale(&coeff));
            }
        }
        if !v.is_zero() {
            out.push(v);
        }
    }
    out
}
