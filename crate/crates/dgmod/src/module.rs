//! Left/right/bi-modules over a DG-algebra and the structural functors between
//! them: tensor-over-A as a coequalizer, hom-over-A as an equalizer, duals,
//! evaluation and the nu comparison map.
//!
//! Sign conventions (derived from the swap-based routes through the closed
//! structure, guarded by the validation tests):
//!   - left action on a shifted module: a . s(x) = (-1)^{|a| i} s(a x) for Sigma^i
//!   - evaluation X (x) [X,Z] -> Z: x (x) f |-> (-1)^{|x||f|} f(x)
//!   - right action on hom: (f . a)(x) = (-1)^{|a||x|} f(x) . a
//!   - left action on mirror hom: (a . f)(y) = a . f(y) (no sign)
//!   - nu: (f (x) x') |-> (x |-> (-1)^{|x||x'|} f(x) (x) x')

use crate::algebra::DGAlgebra;
use crate::field::{Field, Scalar};
use crate::graded::{
    assoc_iso, cokernel_quotient, kernel_subcomplex, tensor_base, tensor_map, GradedComplex,
    GradedMap, HomLayout, TensorLayout,
};
use crate::matrix::Matrix;
use crate::report::ValidationReport;
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
    Bi,
}

#[derive(Debug, thiserror::Error)]
pub enum ModuleError {
    #[error("module axioms failed:\n{0}")]
    Invalid(ValidationReport),
    #[error("operation requires {0}")]
    Usage(String),
}

/// A DG-module with explicit action matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct DGModule {
    pub algebra: Arc<DGAlgebra>,
    pub side: Side,
    pub carrier: GradedComplex,
    /// A (x) X -> X, present for Left and Bi.
    pub left_action: Option<GradedMap>,
    /// X (x) A -> X, present for Right and Bi.
    pub right_action: Option<GradedMap>,
    /// generator degrees when the module is finitely generated free by
    /// construction (a direct sum of shifts of A)
    pub free_gens: Option<Vec<i64>>,
}

impl DGModule {
    pub fn new(
        algebra: Arc<DGAlgebra>,
        side: Side,
        carrier: GradedComplex,
        left_action: Option<GradedMap>,
        right_action: Option<GradedMap>,
    ) -> Result<DGModule, ModuleError> {
        let m = DGModule { algebra, side, carrier, left_action, right_action, free_gens: None };
        let rep = m.validate();
        if rep.all_pass() {
            Ok(m)
        } else {
            Err(ModuleError::Invalid(rep))
        }
    }

    pub fn field(&self) -> Field {
        self.carrier.field
    }

    pub fn left(&self) -> &GradedMap {
        self.left_action.as_ref().expect("left action present")
    }

    pub fn right(&self) -> &GradedMap {
        self.right_action.as_ref().expect("right action present")
    }

    pub fn has_left(&self) -> bool {
        self.left_action.is_some()
    }

    pub fn has_right(&self) -> bool {
        self.right_action.is_some()
    }

    /// Validates the module axioms; failures carry degree/shape witnesses.
    pub fn validate(&self) -> ValidationReport {
        let mut rep = ValidationReport::default();
        let a = &self.algebra;
        let x = &self.carrier;
        match self.side {
            Side::Left => {
                if !self.has_left() || self.has_right() {
                    rep.push_fail("actions-present", "left module needs exactly a left action".into());
                    return rep;
                }
            }
            Side::Right => {
                if !self.has_right() || self.has_left() {
                    rep.push_fail("actions-present", "right module needs exactly a right action".into());
                    return rep;
                }
            }
            Side::Bi => {
                if !self.has_left() || !self.has_right() {
                    rep.push_fail("actions-present", "bimodule needs both actions".into());
                    return rep;
                }
            }
        }
        rep.push_pass("actions-present");

        if let Some(l) = &self.left_action {
            let ax = tensor_base(&a.carrier, x);
            if l.degree != 0 || l.source.dims() != ax.dims() || l.target.dims() != x.dims() {
                rep.push_fail("left-action-shape", "expected degree-0 map A(x)X -> X".into());
                return rep;
            }
            rep.record(
                "left-leibniz",
                if l.is_chain_map() { None } else { Some("left action is not a chain map".into()) },
            );
            // unitality: lambda . (unit (x) id) = left unitor
            let unit_tensor = tensor_map(&a.unit, &GradedMap::identity(x));
            let got = l.compose(&unit_tensor);
            let want = crate::graded::left_unitor(x);
            rep.record(
                "left-unitality",
                if got == want { None } else { Some("1.x != x".into()) },
            );
            // associativity: lambda . (mult (x) id) = lambda . (id (x) lambda) . assoc
            let lhs = l.compose(&tensor_map(&a.mult, &GradedMap::identity(x)));
            let assoc = assoc_iso(&a.carrier, &a.carrier, x);
            let rhs = l
                .compose(&tensor_map(&GradedMap::identity(&a.carrier), l))
                .compose(&assoc);
            rep.record(
                "left-associativity",
                if lhs == rhs { None } else { Some("(ab).x != a.(b.x)".into()) },
            );
        }
        if let Some(r) = &self.right_action {
            let xa = tensor_base(x, &a.carrier);
            if r.degree != 0 || r.source.dims() != xa.dims() || r.target.dims() != x.dims() {
                rep.push_fail("right-action-shape", "expected degree-0 map X(x)A -> X".into());
                return rep;
            }
            rep.record(
                "right-leibniz",
                if r.is_chain_map() { None } else { Some("right action is not a chain map".into()) },
            );
            let tensor_unit = tensor_map(&GradedMap::identity(x), &a.unit);
            let got = r.compose(&tensor_unit);
            let want = crate::graded::right_unitor(x);
            rep.record(
                "right-unitality",
                if got == want { None } else { Some("x.1 != x".into()) },
            );
            let assoc = assoc_iso(x, &a.carrier, &a.carrier);
            let lhs = r.compose(&tensor_map(r, &GradedMap::identity(&a.carrier)));
            let rhs = r
                .compose(&tensor_map(&GradedMap::identity(x), &a.mult))
                .compose(&assoc);
            rep.record(
                "right-associativity",
                if lhs == rhs { None } else { Some("(x.a).b != x.(ab)".into()) },
            );
        }
        if let (Some(l), Some(r)) = (&self.left_action, &self.right_action) {
            // (a.x).b = a.(x.b) as maps (A(x)X)(x)A -> X
            let lhs = r.compose(&tensor_map(l, &GradedMap::identity(&a.carrier)));
            let assoc = assoc_iso(&a.carrier, x, &a.carrier);
            let rhs = l
                .compose(&tensor_map(&GradedMap::identity(&a.carrier), r))
                .compose(&assoc);
            rep.record(
                "actions-commute",
                if lhs == rhs { None } else { Some("left and right actions do not commute".into()) },
            );
        }
        rep
    }
}

/// The algebra as a module over itself.
pub fn algebra_as_module(a: &Arc<DGAlgebra>, side: Side) -> DGModule {
    let left = matches!(side, Side::Left | Side::Bi).then(|| a.mult.clone());
    let right = matches!(side, Side::Right | Side::Bi).then(|| a.mult.clone());
    DGModule {
        algebra: a.clone(),
        side,
        carrier: a.carrier.clone(),
        left_action: left,
        right_action: right,
        free_gens: Some(vec![0]),
    }
}

/// Shift of a module; the left action picks up the sign (-1)^{|a| i}.
pub fn shift_module(x: &DGModule, i: i64) -> DGModule {
    let field = x.field();
    let carrier = x.carrier.shift(i);
    let a = &x.algebra.carrier;
    let left_action = x.left_action.as_ref().map(|l| {
        let layout = TensorLayout::new(a, &carrier);
        let src = tensor_base(a, &carrier);
        let mut comps = BTreeMap::new();
        for n in src.support() {
            let mut m = Matrix::zeros(field, carrier.dim(n), src.dim(n));
            let old_layout = TensorLayout::new(a, &x.carrier);
            for (p, q, _) in layout.blocks(n) {
                // block A_p (x) (Sigma^i X)_q = A_p (x) X_{q-i}
                let old = l.comp(p + q - i); // lands in X_{p+q-i} = (Sigma^i X)_{p+q}
                let sign_neg = (p * i).rem_euclid(2) == 1;
                for row in 0..old.rows {
                    for ai in 0..a.dim(p) {
                        for xj in 0..x.carrier.dim(q - i) {
                            let col_old = old_layout.index(p + q - i, p, ai, xj);
                            let v = old.get(row, col_old);
                            if field.is_zero(v) {
                                continue;
                            }
                            let col_new = layout.index(n, p, ai, xj);
                            let v = if sign_neg { field.neg(v) } else { v.clone() };
                            m.set(row, col_new, field.add(m.get(row, col_new), &v));
                        }
                    }
                }
            }
            if !m.is_zero() {
                comps.insert(n, m);
            }
        }
        GradedMap::new(src, carrier.clone(), 0, comps).expect("shifted action shape")
    });
    let right_action = x.right_action.as_ref().map(|r| {
        // (s x) . a = s(x . a), no sign
        let layout = TensorLayout::new(&carrier, a);
        let src = tensor_base(&carrier, a);
        let mut comps = BTreeMap::new();
        for n in src.support() {
            let mut m = Matrix::zeros(field, carrier.dim(n), src.dim(n));
            let old_layout = TensorLayout::new(&x.carrier, a);
            for (p, q, _) in layout.blocks(n) {
                // block (Sigma^i X)_p (x) A_q = X_{p-i} (x) A_q
                let old = r.comp(p + q - i);
                for row in 0..old.rows {
                    for xi in 0..x.carrier.dim(p - i) {
                        for aj in 0..a.dim(q) {
                            let col_old = old_layout.index(p + q - i, p - i, xi, aj);
                            let v = old.get(row, col_old);
                            if field.is_zero(v) {
                                continue;
                            }
                            let col_new = layout.index(n, p, xi, aj);
                            m.set(row, col_new, field.add(m.get(row, col_new), v));
                        }
                    }
                }
            }
            if !m.is_zero() {
                comps.insert(n, m);
            }
        }
        GradedMap::new(src, carrier.clone(), 0, comps).expect("shifted action shape")
    });
    DGModule {
        algebra: x.algebra.clone(),
        side: x.side,
        carrier,
        left_action,
        right_action,
        free_gens: x.free_gens.as_ref().map(|g| g.iter().map(|&d| d + i).collect()),
    }
}

/// Direct sum with block-diagonal actions.
pub fn direct_sum_modules(parts: &[&DGModule]) -> DGModule {
    assert!(!parts.is_empty());
    let field = parts[0].field();
    let algebra = parts[0].algebra.clone();
    let side = parts[0].side;
    for p in parts {
        assert_eq!(p.side, side, "direct sum requires equal sides");
        assert_eq!(p.algebra.carrier, algebra.carrier, "direct sum requires one algebra");
    }
    let carriers: Vec<&GradedComplex> = parts.iter().map(|p| &p.carrier).collect();
    let carrier = GradedComplex::direct_sum(&carriers);
    let a = &algebra.carrier;

    let sum_action = |get: &dyn Fn(&DGModule) -> &GradedMap, left: bool| -> GradedMap {
        let (src, layout) = if left {
            (tensor_base(a, &carrier), TensorLayout::new(a, &carrier))
        } else {
            (tensor_base(&carrier, a), TensorLayout::new(&carrier, a))
        };
        let mut comps = BTreeMap::new();
        for n in src.support() {
            let mut m = Matrix::zeros(field, carrier.dim(n), src.dim(n));
            for (p, q, _) in layout.blocks(n) {
                // offsets of each summand inside carrier degree buckets
                let (adeg, xdeg) = if left { (p, q) } else { (q, p) };
                let mut xoff = 0usize; // offset in X_{xdeg}
                let mut tgt_off = 0usize; // offset in carrier_{n}
                for part in parts {
                    let act = get(part);
                    let pl = if left {
                        TensorLayout::new(a, &part.carrier)
                    } else {
                        TensorLayout::new(&part.carrier, a)
                    };
                    let old = act.comp(n);
                    for row in 0..old.rows {
                        for ai in 0..a.dim(adeg) {
                            for xj in 0..part.carrier.dim(xdeg) {
                                let col_old = if left {
                                    pl.index(n, adeg, ai, xj)
                                } else {
                                    pl.index(n, xdeg, xj, ai)
                                };
                                let v = old.get(row, col_old);
                                if field.is_zero(v) {
                                    continue;
                                }
                                let col_new = if left {
                                    layout.index(n, p, ai, xoff + xj)
                                } else {
                                    layout.index(n, p, xoff + xj, ai)
                                };
                                m.set(tgt_off + row, col_new, field.add(m.get(tgt_off + row, col_new), v));
                            }
                        }
                    }
                    xoff += part.carrier.dim(xdeg);
                    tgt_off += part.carrier.dim(n);
                }
            }
            if !m.is_zero() {
                comps.insert(n, m);
            }
        }
        GradedMap::new(src, carrier.clone(), 0, comps).expect("sum action shape")
    };

    let left_action = parts[0]
        .left_action
        .as_ref()
        .map(|_| sum_action(&|p: &DGModule| p.left(), true));
    let right_action = parts[0]
        .right_action
        .as_ref()
        .map(|_| sum_action(&|p: &DGModule| p.right(), false));
    let free_gens = parts
        .iter()
        .map(|p| p.free_gens.clone())
        .collect::<Option<Vec<_>>>()
        .map(|gs| gs.concat());
    DGModule { algebra, side, carrier, left_action, right_action, free_gens }
}

/// Finite direct sum of shifts of A, flagged free by construction.
pub fn free_module(a: &Arc<DGAlgebra>, degrees: &[i64], side: Side) -> DGModule {
    assert!(!degrees.is_empty(), "free module needs at least one generator");
    let base = algebra_as_module(a, side);
    let shifted: Vec<DGModule> = degrees.iter().map(|&i| shift_module(&base, i)).collect();
    let refs: Vec<&DGModule> = shifted.iter().collect();
    direct_sum_modules(&refs)
}

/// The one-dimensional module on which the first degree-0 basis element of A
/// (the unit, in all catalog presentations) acts as the identity and every
/// other basis element acts by zero. Only a module when those elements span an
/// ideal (local algebras such as dual numbers or exterior algebras); callers
/// should validate.
pub fn residue_module(a: &Arc<DGAlgebra>, side: Side) -> DGModule {
    let field = a.field();
    let carrier = GradedComplex::unit_object(field);
    let build = |left: bool| {
        let src = if left {
            tensor_base(&a.carrier, &carrier)
        } else {
            tensor_base(&carrier, &a.carrier)
        };
        let mut m = Matrix::zeros(field, 1, src.dim(0));
        m.set(0, 0, field.one());
        let mut comps = BTreeMap::new();
        comps.insert(0, m);
        GradedMap::new(src, carrier.clone(), 0, comps).expect("residue action shape")
    };
    DGModule {
        algebra: a.clone(),
        side,
        carrier: carrier.clone(),
        left_action: matches!(side, Side::Left | Side::Bi).then(|| build(true)),
        right_action: matches!(side, Side::Right | Side::Bi).then(|| build(false)),
        free_gens: None,
    }
}

/// Searches the span of hom_module_set(X, Y) for an isomorphism: exhaustive
/// coefficient enumeration over small prime fields, seeded random sampling
/// otherwise. A `false` from the sampling path is not a proof of absence, but
/// on the desk-scale inputs used here the basis is tiny and enumeration runs.
pub fn module_iso_exists(x: &DGModule, y: &DGModule) -> bool {
    if x.carrier.dims() != y.carrier.dims() {
        return false;
    }
    if x.carrier.total_dim() == 0 {
        return true;
    }
    let basis = hom_module_set(x, y);
    if basis.is_empty() {
        return false;
    }
    let field = x.field();
    let combo_is_iso = |coeffs: &[Scalar]| -> bool {
        let mut acc = GradedMap::zero(x.carrier.clone(), y.carrier.clone(), 0);
        for (c, f) in coeffs.iter().zip(&basis) {
            if !field.is_zero(c) {
                acc = acc.add(&f.map.scale(c));
            }
        }
        acc.is_isomorphism()
    };
    let d = basis.len() as u32;
    if let Field::Prime(p) = field {
        if (p as f64).powi(d as i32) <= 65536.0 {
            let total = (p as u64).pow(d);
            for code in 1..total {
                let mut rest = code;
                let coeffs: Vec<Scalar> = (0..d)
                    .map(|_| {
                        let digit = rest % p;
                        rest /= p;
                        field.from_i64(digit as i64)
                    })
                    .collect();
                if combo_is_iso(&coeffs) {
                    return true;
                }
            }
            return false;
        }
    }
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x1505);
    for _ in 0..500 {
        let coeffs: Vec<Scalar> = (0..d).map(|_| field.from_i64(rng.gen_range(-3i64..=3))).collect();
        if combo_is_iso(&coeffs) {
            return true;
        }
    }
    false
}

/// A map of modules: degree-0 chain map commuting with the action(s).
#[derive(Debug, Clone, PartialEq)]
pub struct ModuleMap {
    pub source: DGModule,
    pub target: DGModule,
    pub map: GradedMap,
}

impl ModuleMap {
    pub fn new(source: DGModule, target: DGModule, map: GradedMap) -> Result<ModuleMap, ModuleError> {
        let m = ModuleMap { source, target, map };
        if !m.is_valid() {
            return Err(ModuleError::Usage("not a module map".into()));
        }
        Ok(m)
    }

    pub fn identity(x: &DGModule) -> ModuleMap {
        ModuleMap { source: x.clone(), target: x.clone(), map: GradedMap::identity(&x.carrier) }
    }

    pub fn zero(source: &DGModule, target: &DGModule) -> ModuleMap {
        ModuleMap {
            source: source.clone(),
            target: target.clone(),
            map: GradedMap::zero(source.carrier.clone(), target.carrier.clone(), 0),
        }
    }

    pub fn is_valid(&self) -> bool {
        if self.map.degree != 0 || !self.map.is_chain_map() {
            return false;
        }
        if let (Some(ls), Some(lt)) = (&self.source.left_action, &self.target.left_action) {
            let ida = GradedMap::identity(&self.source.algebra.carrier);
            if self.map.compose(ls) != lt.compose(&tensor_map(&ida, &self.map)) {
                return false;
            }
        }
        if let (Some(rs), Some(rt)) = (&self.source.right_action, &self.target.right_action) {
            let ida = GradedMap::identity(&self.source.algebra.carrier);
            if self.map.compose(rs) != rt.compose(&tensor_map(&self.map, &ida)) {
                return false;
            }
        }
        true
    }

    pub fn compose(&self, other: &ModuleMap) -> ModuleMap {
        ModuleMap {
            source: other.source.clone(),
            target: self.target.clone(),
            map: self.map.compose(&other.map),
        }
    }

    pub fn is_injective(&self) -> bool {
        self.map.is_injective()
    }

    pub fn is_surjective(&self) -> bool {
        self.map.is_surjective()
    }

    pub fn is_isomorphism(&self) -> bool {
        self.map.is_isomorphism()
    }
}

/// Basis of the k-space of module maps X -> Y.
pub fn hom_module_set(x: &DGModule, y: &DGModule) -> Vec<ModuleMap> {
    assert_eq!(x.side, y.side, "hom_module_set requires equal sides");
    assert_eq!(x.algebra.carrier, y.algebra.carrier, "hom_module_set requires one algebra");
    let field = x.field();
    let h = HomLayout::new(&x.carrier, &y.carrier);
    let hdim = h.dim(0);
    if hdim == 0 {
        return Vec::new();
    }
    // constraints: chain map + A-linearity on each action
    let mut rows: Vec<Matrix> = Vec::new();
    let hcomplex = h.complex();
    rows.push(hcomplex.d(0));
    let ida = GradedMap::identity(&x.algebra.carrier);
    if x.has_left() {
        let target_layout = HomLayout::new(&tensor_base(&x.algebra.carrier, &x.carrier), &y.carrier);
        let mut c = Matrix::zeros(field, target_layout.dim(0), hdim);
        for col in 0..hdim {
            let mut e = Matrix::zeros(field, hdim, 1);
            e.set(col, 0, field.one());
            let f = h.from_vector(&e, 0);
            let g = f.compose(x.left()).sub(&y.left().compose(&tensor_map(&ida, &f)));
            let v = target_layout.to_vector(&g);
            for r in 0..v.rows {
                c.set(r, col, v.get(r, 0).clone());
            }
        }
        rows.push(c);
    }
    if x.has_right() {
        let target_layout = HomLayout::new(&tensor_base(&x.carrier, &x.algebra.carrier), &y.carrier);
        let mut c = Matrix::zeros(field, target_layout.dim(0), hdim);
        for col in 0..hdim {
            let mut e = Matrix::zeros(field, hdim, 1);
            e.set(col, 0, field.one());
            let f = h.from_vector(&e, 0);
            let g = f.compose(x.right()).sub(&y.right().compose(&tensor_map(&f, &ida)));
            let v = target_layout.to_vector(&g);
            for r in 0..v.rows {
                c.set(r, col, v.get(r, 0).clone());
            }
        }
        rows.push(c);
    }
    let mut constraint = rows[0].clone();
    for r in rows.iter().skip(1) {
        constraint = constraint.vstack(r);
    }
    let k = constraint.kernel_basis();
    (0..k.cols)
        .map(|j| ModuleMap {
            source: x.clone(),
            target: y.clone(),
            map: h.from_vector(&k.column(j), 0),
        })
        .collect()
}

/// Matrix of a linear map between hom-sets written in `hom_module_set` bases:
/// columns express g . f . h for each basis f. Used via closures below.
pub(crate) fn coords_in_basis(space: &[ModuleMap], v: &GradedMap) -> Option<Matrix> {
    if space.is_empty() {
        return v.is_zero().then(|| Matrix::zeros(v.source.field, 0, 1));
    }
    let h = HomLayout::new(&v.source, &v.target);
    let dim = h.dim(0);
    let field = v.source.field;
    let mut basis = Matrix::zeros(field, dim, space.len());
    for (j, f) in space.iter().enumerate() {
        let col = h.to_vector(&f.map);
        for r in 0..dim {
            basis.set(r, j, col.get(r, 0).clone());
        }
    }
    basis.solve_right(&h.to_vector(v))
}

/// Y (x)_A X as the coequalizer of Y (x) A (x) X => Y (x) X, with the residual
/// actions when an argument is a bimodule.
pub struct TensorOverA {
    pub complex: GradedComplex,
    /// projection from the underlying Y (x) X
    pub proj: GradedMap,
    /// a degreewise k-linear section of `proj`
    pub section: GradedMap,
    /// present when a residual action exists (bimodule argument)
    pub module: Option<DGModule>,
}

pub fn tensor_a(y: &DGModule, x: &DGModule) -> TensorOverA {
    assert!(y.has_right(), "first tensor argument must carry a right action");
    assert!(x.has_left(), "second tensor argument must carry a left action");
    assert_eq!(y.algebra.carrier, x.algebra.carrier, "algebra mismatch in tensor");
    let a = &y.algebra.carrier;
    let idx = GradedMap::identity(&x.carrier);
    let idy = GradedMap::identity(&y.carrier);
    // relations: (y.a)(x)x - y(x)(a.x) as a map (Y(x)A)(x)X -> Y(x)X
    let r1 = tensor_map(y.right(), &idx);
    let assoc = assoc_iso(&y.carrier, a, &x.carrier);
    let r2 = tensor_map(&idy, x.left()).compose(&assoc);
    let rel = r1.sub(&r2);
    let (q, proj, section) = cokernel_quotient(&rel);

    let mut module = None;
    let algebra = y.algebra.clone();
    let has_left = y.has_left();
    let has_right = x.has_right();
    if has_left || has_right {
        let ida = GradedMap::identity(a);
        let left_action = has_left.then(|| {
            // A (x) Q -> Q: lift, act on the Y factor, project
            let assoc = assoc_iso(a, &y.carrier, &x.carrier);
            let inv = invert_iso(&assoc);
            let act = tensor_map(y.left(), &idx).compose(&inv);
            proj.compose(&act).compose(&tensor_map(&ida, &section))
        });
        let right_action = has_right.then(|| {
            let assoc = assoc_iso(&y.carrier, &x.carrier, a);
            let act = tensor_map(&idy, x.right()).compose(&assoc);
            proj.compose(&act).compose(&tensor_map(&section, &ida))
        });
        let side = match (has_left, has_right) {
            (true, true) => Side::Bi,
            (true, false) => Side::Left,
            (false, true) => Side::Right,
            _ => unreachable!(),
        };
        module = Some(DGModule {
            algebra,
            side,
            carrier: q.clone(),
            left_action,
            right_action,
            free_gens: None,
        });
    }
    TensorOverA { complex: q, proj, section, module }
}

/// Inverts a degreewise isomorphism.
pub fn invert_iso(f: &GradedMap) -> GradedMap {
    let mut comps = BTreeMap::new();
    for n in f.source.degree_range() {
        if f.source.dim(n) == 0 && f.target.dim(n) == 0 {
            continue;
        }
        let m = f.comp(n).inverse().expect("degreewise isomorphism");
        if !m.is_zero() {
            comps.insert(n, m);
        }
    }
    GradedMap::new(f.target.clone(), f.source.clone(), -f.degree, comps).expect("inverse shape")
}

/// The induced map tensor_a(f, X) on quotients for f : Y -> Y' of right modules.
pub fn tensor_map_right(f: &ModuleMap, x: &DGModule, src: &TensorOverA, tgt: &TensorOverA) -> GradedMap {
    let idx = GradedMap::identity(&x.carrier);
    tgt.proj.compose(&tensor_map(&f.map, &idx)).compose(&src.section)
}

/// The induced map tensor_a(Y, g) for g : X -> X' of left modules.
pub fn tensor_map_left(y: &DGModule, g: &ModuleMap, src: &TensorOverA, tgt: &TensorOverA) -> GradedMap {
    let idy = GradedMap::identity(&y.carrier);
    tgt.proj.compose(&tensor_map(&idy, &g.map)).compose(&src.section)
}

/// {}_A[X, X'] as the equalizer of [X,X'] => [A (x) X, X'], with the residual
/// right action when X' is a bimodule (and mirror version for right modules).
pub struct HomOverA {
    pub complex: GradedComplex,
    /// inclusion into the full hom complex [X, X']
    pub incl: GradedMap,
    pub module: Option<DGModule>,
}

pub fn hom_a(x: &DGModule, x2: &DGModule) -> HomOverA {
    assert_eq!(x.algebra.carrier, x2.algebra.carrier, "algebra mismatch in hom");
    let mirror = match (x.has_left(), x2.has_left(), x.has_right(), x2.has_right()) {
        (true, true, _, _) => false,
        (false, _, true, true) => true,
        _ => panic!("hom_a needs two left modules or two right modules"),
    };
    let field = x.field();
    let a = &x.algebra.carrier;
    let h = HomLayout::new(&x.carrier, &x2.carrier);
    let hcomplex = h.complex();
    let ida = GradedMap::identity(a);
    let tgt_layout = if mirror {
        HomLayout::new(&tensor_base(&x.carrier, a), &x2.carrier)
    } else {
        HomLayout::new(&tensor_base(a, &x.carrier), &x2.carrier)
    };
    // the difference operator as a chain map of hom complexes
    let mut comps = BTreeMap::new();
    for n in hcomplex.degree_range() {
        let dim = h.dim(n);
        if dim == 0 {
            continue;
        }
        let mut m = Matrix::zeros(field, tgt_layout.dim(n), dim);
        for col in 0..dim {
            let mut e = Matrix::zeros(field, dim, 1);
            e.set(col, 0, field.one());
            let f = h.from_vector(&e, n);
            let g = if mirror {
                // f(y.a) - f(y).a : tensor_map(f, id) carries no sign
                f.compose(x.right()).sub(&x2.right().compose(&tensor_map(&f, &ida)))
            } else {
                // f(a.x) - (-1)^{|f||a|} a.f(x): the sign lives in tensor_map(id, f)
                f.compose(x.left()).sub(&x2.left().compose(&tensor_map(&ida, &f)))
            };
            let v = tgt_layout.to_vector(&g);
            for r in 0..v.rows {
                m.set(r, col, v.get(r, 0).clone());
            }
        }
        comps.insert(n, m);
    }
    let op = GradedMap::new(hcomplex.clone(), tgt_layout.complex(), 0, comps).expect("equalizer operator shape");
    let (k, incl) = kernel_subcomplex(&op);

    // residual action from a bimodule target
    let mut module = None;
    let algebra = x.algebra.clone();
    if !mirror && x2.has_right() {
        // right action: (f.a)(v) = (-1)^{|a||v|} f(v).a
        let right_action = hom_value_action(&k, &incl, &h, a, x2.right(), true);
        module = Some(DGModule {
            algebra,
            side: Side::Right,
            carrier: k.clone(),
            left_action: None,
            right_action: Some(right_action),
            free_gens: None,
        });
    } else if mirror && x2.has_left() {
        // left action: (a.f)(v) = a.f(v), no sign
        let left_action = hom_value_action(&k, &incl, &h, a, x2.left(), false);
        module = Some(DGModule {
            algebra,
            side: Side::Left,
            carrier: k.clone(),
            left_action: Some(left_action),
            right_action: None,
            free_gens: None,
        });
    }
    HomOverA { complex: k, incl, module }
}

/// Builds the action of A on an equalizer subcomplex of a hom complex by acting
/// on values. `on_right`: (f.a)(v) = (-1)^{|a||v|} f(v).a as a map K (x) A -> K;
/// otherwise (a.f)(v) = a.f(v) as A (x) K -> K.
fn hom_value_action(
    k: &GradedComplex,
    incl: &GradedMap,
    h: &HomLayout,
    a: &GradedComplex,
    value_action: &GradedMap,
    on_right: bool,
) -> GradedMap {
    let field = k.field;
    let (src, layout) = if on_right {
        (tensor_base(k, a), TensorLayout::new(k, a))
    } else {
        (tensor_base(a, k), TensorLayout::new(a, k))
    };
    let algebra_carrier = a.clone();
    let mut comps = BTreeMap::new();
    for m_deg in src.support() {
        let mut m = Matrix::zeros(field, k.dim(m_deg), src.dim(m_deg));
        for (p, q, _) in layout.blocks(m_deg) {
            let (kdeg, adeg) = if on_right { (p, q) } else { (q, p) };
            for ki in 0..k.dim(kdeg) {
                for aj in 0..algebra_carrier.dim(adeg) {
                    // lift the K basis vector into a graded map f of degree kdeg
                    let mut e = Matrix::zeros(field, k.dim(kdeg), 1);
                    e.set(ki, 0, field.one());
                    let fv = incl.comp(kdeg).mul(&e);
                    let f = h.from_vector(&fv, kdeg);
                    // g = action of a on f, degree kdeg + adeg
                    let g = act_on_values(&f, &algebra_carrier, adeg, aj, value_action, on_right);
                    let gv = h.to_vector(&g);
                    let coords = incl
                        .comp(m_deg)
                        .solve_right(&gv)
                        .expect("action preserves the equalizer");
                    let col = if on_right {
                        layout.index(m_deg, p, ki, aj)
                    } else {
                        layout.index(m_deg, p, aj, ki)
                    };
                    for r in 0..coords.rows {
                        m.set(r, col, field.add(m.get(r, col), coords.get(r, 0)));
                    }
                }
            }
        }
        if !m.is_zero() {
            comps.insert(m_deg, m);
        }
    }
    GradedMap::new(src, k.clone(), 0, comps).expect("hom action shape")
}

/// (f.a) or (a.f) on values: g(v) = +/- f(v).a (or a.f(v)).
pub(crate) fn act_on_values(
    f: &GradedMap,
    a: &GradedComplex,
    adeg: i64,
    apos: usize,
    value_action: &GradedMap,
    on_right: bool,
) -> GradedMap {
    let field = f.source.field;
    let z = &f.target;
    let x = &f.source;
    let value_layout = if on_right {
        TensorLayout::new(z, a)
    } else {
        TensorLayout::new(a, z)
    };
    let mut comps = BTreeMap::new();
    for p in x.support() {
        let fp = f.comp(p); // X_p -> Z_{p + |f|}
        if fp.rows == 0 || fp.cols == 0 {
            continue;
        }
        let zdeg = p + f.degree;
        let out_deg = zdeg + adeg;
        let rows = value_action.target.dim(out_deg);
        if rows == 0 {
            continue;
        }
        let mut m = Matrix::zeros(field, rows, fp.cols);
        // embed f(v) (x) a (or a (x) f(v)) and apply the value action block
        let act = value_action.comp(zdeg + adeg);
        let sign_neg = on_right && (adeg * p).rem_euclid(2) == 1;
        for vcol in 0..fp.cols {
            for zi in 0..fp.rows {
                let c = fp.get(zi, vcol);
                if field.is_zero(c) {
                    continue;
                }
                // column index of z_i (x) a (resp. a (x) z_i) in the action source
                let col = if on_right {
                    value_layout.index(out_deg, zdeg, zi, apos)
                } else {
                    value_layout.index(out_deg, adeg, apos, zi)
                };
                for r in 0..rows {
                    let v = act.get(r, col);
                    if field.is_zero(v) {
                        continue;
                    }
                    let mut term = field.mul(c, v);
                    if sign_neg {
                        term = field.neg(&term);
                    }
                    m.set(r, vcol, field.add(m.get(r, vcol), &term));
                }
            }
        }
        if !m.is_zero() {
            comps.insert(p, m);
        }
    }
    GradedMap::new(x.clone(), value_action.target.clone(), f.degree + adeg, comps)
        .expect("value action shape")
}

/// The module map out of a free module determined by generator images.
/// `images[j]` is a coordinate column in the target at degree `free_gens[j]`.
/// For a left module the generator relation sigma^d(a) = (-1)^{|a| d} a.g
/// contributes the sign; the right-module case is sign-free.
pub fn map_from_free(free: &DGModule, target: &DGModule, images: &[Matrix]) -> ModuleMap {
    let gens = free.free_gens.as_ref().expect("source must be free by construction");
    assert_eq!(gens.len(), images.len(), "one image per generator");
    let field = free.field();
    let a = &free.algebra.carrier;
    let left = free.side != Side::Right;
    let mut comps = BTreeMap::new();
    for n in free.carrier.support() {
        let mut m = Matrix::zeros(field, target.carrier.dim(n), free.carrier.dim(n));
        let mut off = 0usize;
        for (j, &d) in gens.iter().enumerate() {
            let adeg = n - d;
            let img = &images[j];
            assert_eq!(img.rows, target.carrier.dim(d), "image lives in target degree {d}");
            for ai in 0..a.dim(adeg) {
                // value of the map on sigma^d(a_i): +/- a_i . img (or img . a_i)
                let col = if left {
                    let act = target.left();
                    let layout = TensorLayout::new(a, &target.carrier);
                    let mut v = Matrix::zeros(field, layout.dim(n), 1);
                    for r in 0..img.rows {
                        v.set(layout.index(n, adeg, ai, r), 0, img.get(r, 0).clone());
                    }
                    let mut out = act.comp(n).mul(&v);
                    if (adeg * d).rem_euclid(2) == 1 {
                        out = out.neg();
                    }
                    out
                } else {
                    let act = target.right();
                    let layout = TensorLayout::new(&target.carrier, a);
                    let mut v = Matrix::zeros(field, layout.dim(n), 1);
                    for r in 0..img.rows {
                        v.set(layout.index(n, d, r, ai), 0, img.get(r, 0).clone());
                    }
                    act.comp(n).mul(&v)
                };
                for r in 0..col.rows {
                    m.set(r, off + ai, col.get(r, 0).clone());
                }
            }
            off += a.dim(adeg);
        }
        if !m.is_zero() {
            comps.insert(n, m);
        }
    }
    let map = GradedMap::new(free.carrier.clone(), target.carrier.clone(), 0, comps)
        .expect("free map shape");
    ModuleMap { source: free.clone(), target: target.clone(), map }
}

/// Contravariant functoriality of duals: psi |-> psi . f, as a map between the
/// precomputed duals of the endpoints.
pub fn dual_map(f: &ModuleMap, dual_source: &DualModule, dual_target: &DualModule) -> ModuleMap {
    let field = f.source.field();
    let a = &f.source.algebra.carrier;
    let h_src = HomLayout::new(&f.source.carrier, a);
    let h_tgt = HomLayout::new(&f.target.carrier, a);
    let dt = &dual_target.module.carrier;
    let ds = &dual_source.module.carrier;
    let mut comps = BTreeMap::new();
    for n in dt.support() {
        let dim = dt.dim(n);
        if dim == 0 {
            continue;
        }
        let mut m = Matrix::zeros(field, ds.dim(n), dim);
        for j in 0..dim {
            let mut e = Matrix::zeros(field, dim, 1);
            e.set(j, 0, field.one());
            let psi = h_tgt.from_vector(&dual_target.incl.comp(n).mul(&e), n);
            let pulled = psi.compose(&f.map);
            let coords = dual_source
                .incl
                .comp(n)
                .solve_right(&h_src.to_vector(&pulled))
                .expect("pullback along a module map is A-linear");
            for r in 0..coords.rows {
                m.set(r, j, coords.get(r, 0).clone());
            }
        }
        if !m.is_zero() {
            comps.insert(n, m);
        }
    }
    let map = GradedMap::new(dt.clone(), ds.clone(), 0, comps).expect("dual map shape");
    ModuleMap {
        source: dual_target.module.clone(),
        target: dual_source.module.clone(),
        map,
    }
}

/// Kernel of a module map, with the restricted action(s) and the inclusion.
pub fn kernel_module(f: &ModuleMap) -> (DGModule, ModuleMap) {
    let (k, incl) = kernel_subcomplex(&f.map);
    let a = &f.source.algebra.carrier;
    let restrict = |act: &GradedMap, left: bool| -> GradedMap {
        let (src, big) = if left {
            (tensor_base(a, &k), tensor_map(&GradedMap::identity(a), &incl))
        } else {
            (tensor_base(&k, a), tensor_map(&incl, &GradedMap::identity(a)))
        };
        let into_x = act.compose(&big);
        let mut comps = BTreeMap::new();
        for n in src.support() {
            let b = into_x.comp(n);
            let m = incl
                .comp(n)
                .solve_right(&b)
                .expect("action preserves the kernel of a module map");
            if !m.is_zero() {
                comps.insert(n, m);
            }
        }
        GradedMap::new(src, k.clone(), 0, comps).expect("kernel action shape")
    };
    let module = DGModule {
        algebra: f.source.algebra.clone(),
        side: f.source.side,
        carrier: k.clone(),
        left_action: f.source.left_action.as_ref().map(|l| restrict(l, true)),
        right_action: f.source.right_action.as_ref().map(|r| restrict(r, false)),
        free_gens: None,
    };
    let incl = ModuleMap { source: module.clone(), target: f.source.clone(), map: incl };
    (module, incl)
}

/// Cokernel of a module map, with the descended action(s), the projection,
/// and a degreewise k-linear section.
pub fn cokernel_module(f: &ModuleMap) -> (DGModule, ModuleMap, GradedMap) {
    let (q, proj, section) = cokernel_quotient(&f.map);
    let a = &f.source.algebra.carrier;
    let descend = |act: &GradedMap, left: bool| -> GradedMap {
        let lift = if left {
            tensor_map(&GradedMap::identity(a), &section)
        } else {
            tensor_map(&section, &GradedMap::identity(a))
        };
        proj.compose(act).compose(&lift)
    };
    let module = DGModule {
        algebra: f.source.algebra.clone(),
        side: f.source.side,
        carrier: q,
        left_action: f.target.left_action.as_ref().map(|l| descend(l, true)),
        right_action: f.target.right_action.as_ref().map(|r| descend(r, false)),
        free_gens: None,
    };
    let proj = ModuleMap { source: f.target.clone(), target: module.clone(), map: proj };
    (module, proj, section)
}

/// The mapping cone of a module map as a module: carrier cone(f) with the
/// block-diagonal action of Y (+) Sigma X, plus the inclusion of Y and the
/// projection onto Sigma X, all module maps.
pub fn cone_module(f: &ModuleMap) -> (DGModule, ModuleMap, ModuleMap) {
    let (cone, incl, proj) = crate::graded::cone_sequence(&f.map).expect("cone of a degree-0 map");
    let sx = shift_module(&f.source, 1);
    let sum = direct_sum_modules(&[&f.target, &sx]);
    let retarget = |act: &GradedMap, left: bool| -> GradedMap {
        let src = if left {
            tensor_base(&f.source.algebra.carrier, &cone)
        } else {
            tensor_base(&cone, &f.source.algebra.carrier)
        };
        act.retarget(src, cone.clone())
    };
    let module = DGModule {
        algebra: f.source.algebra.clone(),
        side: f.source.side,
        carrier: cone.clone(),
        left_action: sum.left_action.as_ref().map(|a| retarget(a, true)),
        right_action: sum.right_action.as_ref().map(|a| retarget(a, false)),
        free_gens: None,
    };
    let incl = ModuleMap {
        source: f.target.clone(),
        target: module.clone(),
        map: incl,
    };
    let proj_map = proj.retarget(cone.clone(), sx.carrier.clone());
    let proj = ModuleMap { source: module.clone(), target: sx, map: proj_map };
    (module, incl, proj)
}

/// X (x)_1 S for a complex S: the module structure comes from X alone.
pub fn tensor_with_complex(x: &DGModule, s: &GradedComplex) -> DGModule {
    let a = &x.algebra.carrier;
    let carrier = tensor_base(&x.carrier, s);
    let ids = GradedMap::identity(s);
    let left_action = x.left_action.as_ref().map(|l| {
        let assoc = assoc_iso(a, &x.carrier, s);
        tensor_map(l, &ids).compose(&invert_iso(&assoc))
    });
    let right_action = x.right_action.as_ref().map(|r| {
        // (x (x) s).a = (-1)^{|s||a|} (x.a) (x) s: route through the swap-free
        // rebracketing (X (x) S) (x) A -> X (x) (S (x) A) -> X (x) (A (x) S)
        let assoc = assoc_iso(&x.carrier, s, a);
        let swap = crate::graded::swap_iso(s, a);
        let idx = GradedMap::identity(&x.carrier);
        let back = invert_iso(&assoc_iso(&x.carrier, a, s));
        tensor_map(r, &ids)
            .compose(&back)
            .compose(&tensor_map(&idx, &swap))
            .compose(&assoc)
    });
    DGModule {
        algebra: x.algebra.clone(),
        side: x.side,
        carrier,
        left_action,
        right_action,
        free_gens: None,
    }
}

/// X* = hom_A(X, A) with the residual action from the bimodule A, plus the
/// inclusion into the full hom complex [X, A] used to evaluate dual vectors.
pub struct DualModule {
    pub module: DGModule,
    pub incl: GradedMap,
}

pub fn dual(x: &DGModule) -> DualModule {
    let abi = algebra_as_module(&x.algebra, Side::Bi);
    let h = hom_a(x, &abi);
    DualModule { module: h.module.expect("A is a bimodule"), incl: h.incl }
}

/// The counit ε : X (x) X* -> A, x (x) f |-> (-1)^{|x||f|} f(x).
pub fn evaluation_map(x: &DGModule, d: &DualModule) -> GradedMap {
    let field = x.field();
    let a = &x.algebra.carrier;
    let xs = &d.module.carrier;
    let h = HomLayout::new(&x.carrier, a);
    let layout = TensorLayout::new(&x.carrier, xs);
    let src = layout.complex();
    let mut comps = BTreeMap::new();
    for n in src.support() {
        let rows = a.dim(n);
        let mut m = Matrix::zeros(field, rows, src.dim(n));
        for (p, q, _) in layout.blocks(n) {
            let sign_neg = (p * q).rem_euclid(2) == 1;
            for fi in 0..xs.dim(q) {
                let mut e = Matrix::zeros(field, xs.dim(q), 1);
                e.set(fi, 0, field.one());
                let f = h.from_vector(&d.incl.comp(q).mul(&e), q);
                let fp = f.comp(p); // X_p -> A_{p+q} = A_n
                for xj in 0..x.carrier.dim(p) {
                    let col = layout.index(n, p, xj, fi);
                    for r in 0..rows {
                        let v = fp.get(r, xj);
                        if field.is_zero(v) {
                            continue;
                        }
                        let v = if sign_neg { field.neg(v) } else { v.clone() };
                        m.set(r, col, field.add(m.get(r, col), &v));
                    }
                }
            }
        }
        if !m.is_zero() {
            comps.insert(n, m);
        }
    }
    GradedMap::new(src, a.clone(), 0, comps).expect("evaluation shape")
}

/// ν : hom_A(X,Z) (x)_A X' -> hom_A(X, Z (x)_A X') induced by evaluation:
/// class of f (x) x' goes to (v |-> (-1)^{|v||x'|} class of f(v) (x) x').
pub struct NuMap {
    /// hom_A(X,Z) (x)_A X'
    pub source: TensorOverA,
    /// hom_A(X, Z (x)_A X')
    pub target: HomOverA,
    pub map: GradedMap,
}

pub fn nu_map(x: &DGModule, z: &DGModule, x2: &DGModule) -> NuMap {
    assert_eq!(z.side, Side::Bi, "nu needs a bimodule middle argument");
    assert!(x.has_left() && x2.has_left(), "nu is implemented for left modules");
    let field = x.field();
    let hz = hom_a(x, z);
    let hz_mod = hz.module.as_ref().expect("bimodule target gives a right action");
    let zx = tensor_a(z, x2);
    let zx_mod = zx.module.as_ref().expect("bimodule factor gives a left action");
    let zx_left = if zx_mod.side == Side::Left {
        zx_mod.clone()
    } else {
        DGModule {
            algebra: zx_mod.algebra.clone(),
            side: Side::Left,
            carrier: zx_mod.carrier.clone(),
            left_action: zx_mod.left_action.clone(),
            right_action: None,
            free_gens: None,
        }
    };
    let source = tensor_a(hz_mod, x2);
    let target = hom_a(x, &zx_left);
    let h = HomLayout::new(&x.carrier, &z.carrier);
    let hzx = HomLayout::new(&x.carrier, &zx.complex);
    let src_layout = TensorLayout::new(&hz.complex, &x2.carrier);
    let mut comps = BTreeMap::new();
    for n in source.complex.support() {
        let dim = source.complex.dim(n);
        let mut m = Matrix::zeros(field, target.complex.dim(n), dim);
        for col in 0..dim {
            let mut e = Matrix::zeros(field, dim, 1);
            e.set(col, 0, field.one());
            let lift = source.section.comp(n).mul(&e); // coords in hom_A(X,Z) (x) X'
            let mut gv = Matrix::zeros(field, hzx.dim(n), 1);
            for (p, q, _) in src_layout.blocks(n) {
                for fi in 0..hz.complex.dim(p) {
                    for xj in 0..x2.carrier.dim(q) {
                        let c = lift.get(src_layout.index(n, p, fi, xj), 0);
                        if field.is_zero(c) {
                            continue;
                        }
                        let mut ef = Matrix::zeros(field, hz.complex.dim(p), 1);
                        ef.set(fi, 0, field.one());
                        let f = h.from_vector(&hz.incl.comp(p).mul(&ef), p);
                        let g = act_on_values(&f, &x2.carrier, q, xj, &zx.proj, true);
                        let gvec = hzx.to_vector(&g);
                        for r in 0..gv.rows {
                            let term = field.mul(c, gvec.get(r, 0));
                            gv.set(r, 0, field.add(gv.get(r, 0), &term));
                        }
                    }
                }
            }
            let coords = target
                .incl
                .comp(n)
                .solve_right(&gv)
                .expect("nu lands in the A-linear subcomplex");
            for r in 0..coords.rows {
                m.set(r, col, coords.get(r, 0).clone());
            }
        }
        if !m.is_zero() {
            comps.insert(n, m);
        }
    }
    let map = GradedMap::new(source.complex.clone(), target.complex.clone(), 0, comps)
        .expect("nu shape");
    NuMap { source, target, map }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::builtin_catalog;

    fn arc(name: &str) -> Arc<DGAlgebra> {
        Arc::new(builtin_catalog(name).unwrap())
    }

    #[test]
    fn algebra_over_itself_validates() {
        for name in ["unit", "dual_numbers(2)", "exterior(2)", "cone_dga(2)", "upper_triangular(3)", "matrix2(2)"] {
            let a = arc(name);
            for side in [Side::Left, Side::Right, Side::Bi] {
                let m = algebra_as_module(&a, side);
                let rep = m.validate();
                assert!(rep.all_pass(), "{name} {side:?}:\n{rep}");
            }
        }
    }

    #[test]
    fn unitality_defect_reported() {
        let a = arc("dual_numbers(2)");
        let mut m = algebra_as_module(&a, Side::Left);
        // corrupt the action: zero map
        let src = m.left().source.clone();
        m.left_action = Some(GradedMap::zero(src, m.carrier.clone(), 0));
        let rep = m.validate();
        assert!(!rep.all_pass());
        assert!(rep.checks.iter().any(|c| c.name == "left-unitality" && !c.pass));
    }

    #[test]
    fn residue_field_module_over_dual_numbers() {
        // k = A/(x): 1-dim, action a.1 = eps(a)
        let a = arc("dual_numbers(2)");
        let k = residue_module(&a, Side::Left);
        assert!(k.validate().all_pass());
    }

    #[test]
    fn shifted_and_summed_free_modules_validate() {
        for name in ["exterior(2)", "cone_dga(2)", "dual_numbers(3)"] {
            let a = arc(name);
            for side in [Side::Left, Side::Right] {
                let f = free_module(&a, &[0, 1], side);
                let rep = f.validate();
                assert!(rep.all_pass(), "{name} {side:?}:\n{rep}");
            }
        }
    }

    #[test]
    fn free_module_dims_exterior() {
        let a = arc("exterior(2)");
        let f = free_module(&a, &[0, 1], Side::Left);
        assert_eq!(f.carrier.dim(0), 1);
        assert_eq!(f.carrier.dim(1), 2);
        assert_eq!(f.carrier.dim(2), 1);
    }

    #[test]
    fn hom_module_set_unit_algebra() {
        let a = arc("unit");
        let m = algebra_as_module(&a, Side::Left);
        assert_eq!(hom_module_set(&m, &m).len(), 1);
    }

    #[test]
    fn hom_module_set_socle_inclusion() {
        // Hom(k, A) over dual numbers is 1-dimensional (the socle inclusion)
        let a = arc("dual_numbers(2)");
        let k = residue_module(&a, Side::Left);
        let m = algebra_as_module(&a, Side::Left);
        let maps = hom_module_set(&k, &m);
        assert_eq!(maps.len(), 1);
        assert!(maps[0].is_valid());
    }

    #[test]
    fn hom_module_set_regular_equals_z0() {
        // Hom_A(A, X) = Z_0(X): over exterior(2) with X = free [0,1]
        let a = arc("exterior(2)");
        let m = algebra_as_module(&a, Side::Left);
        let x = free_module(&a, &[0, 1], Side::Left);
        let maps = hom_module_set(&m, &x);
        assert_eq!(maps.len(), x.carrier.cycles(0).cols);
    }

    #[test]
    fn tensor_unit_law() {
        for name in ["dual_numbers(2)", "exterior(2)", "cone_dga(2)"] {
            let a = arc(name);
            let abi = algebra_as_module(&a, Side::Bi);
            let x = free_module(&a, &[0, 1], Side::Left);
            let t = tensor_a(&abi, &x);
            // the action descends to an isomorphism A (x)_A X = X
            let to_x = x.left().compose(&t.section);
            assert!(to_x.is_chain_map());
            assert!(to_x.is_isomorphism(), "A (x)_A X = X fails for {name}");
            let module = t.module.as_ref().unwrap();
            assert!(module.validate().all_pass());
        }
    }

    #[test]
    fn tensor_classical_oracle_dual_numbers() {
        // over A = k[x]/x^2: k (x)_A k = k (classical computation)
        let a = arc("dual_numbers(2)");
        let k_left = residue_module(&a, Side::Left);
        let k_right = residue_module(&a, Side::Right);
        let t = tensor_a(&k_right, &k_left);
        assert_eq!(t.complex.total_dim(), 1);
        // and A (x)_A k = k
        let abi = algebra_as_module(&a, Side::Bi);
        let t2 = tensor_a(&abi, &k_left);
        assert_eq!(t2.complex.total_dim(), 1);
    }

    #[test]
    fn hom_a_unit_law() {
        // {}_A[A, X] = X as complexes
        for name in ["dual_numbers(2)", "exterior(2)"] {
            let a = arc(name);
            let m = algebra_as_module(&a, Side::Left);
            let x = free_module(&a, &[0, 1], Side::Left);
            let h = hom_a(&m, &x);
            assert_eq!(h.complex.dims(), x.carrier.dims(), "hom unit law fails for {name}");
            assert_eq!(h.complex.homology(), x.carrier.homology());
        }
    }

    #[test]
    fn hom_a_z0_matches_module_maps() {
        let a = arc("exterior(2)");
        let x = free_module(&a, &[0, 1], Side::Left);
        let y = free_module(&a, &[0], Side::Left);
        let h = hom_a(&x, &y);
        assert_eq!(h.complex.cycles(0).cols, hom_module_set(&x, &y).len());
        let k = residue_module(&arc("dual_numbers(2)"), Side::Left);
        let m = algebra_as_module(&arc("dual_numbers(2)"), Side::Left);
        // different algebra instance, same content: rebuild with the same Arc
        let a2 = k.algebra.clone();
        let m = DGModule { algebra: a2, ..m };
        let h2 = hom_a(&k, &m);
        assert_eq!(h2.complex.cycles(0).cols, hom_module_set(&k, &m).len());
    }

    #[test]
    fn hom_a_over_unit_reduces_to_hom_base() {
        let a = arc("unit");
        let x = free_module(&a, &[0, 1], Side::Left);
        let y = free_module(&a, &[0], Side::Left);
        let h = hom_a(&x, &y);
        let base = crate::graded::hom_base(&x.carrier, &y.carrier);
        assert_eq!(h.complex.dims(), base.dims());
    }

    #[test]
    fn dual_of_algebra_is_algebra() {
        for name in ["dual_numbers(2)", "exterior(2)", "cone_dga(2)"] {
            let a = arc(name);
            let m = algebra_as_module(&a, Side::Left);
            let abi = algebra_as_module(&a, Side::Bi);
            let h = hom_a(&m, &abi);
            let dual = h.module.as_ref().unwrap();
            assert!(dual.validate().all_pass(), "dual action invalid for {name}");
            assert_eq!(dual.carrier.dims(), a.carrier.dims(), "A* = A dims for {name}");
            // find an isomorphism of right modules
            let ar = algebra_as_module(&a, Side::Right);
            assert!(module_iso_exists(dual, &ar), "A* = A as right modules for {name}");
        }
    }

    #[test]
    fn dual_of_shifted_free_is_negated_shift() {
        let a = arc("exterior(2)");
        for i in [-1i64, 0, 1, 2] {
            let x = free_module(&a, &[i], Side::Left);
            let d = dual(&x);
            assert_eq!(d.module.side, Side::Right);
            assert_eq!(d.module.carrier.dims(), a.carrier.shift(-i).dims(), "i = {i}");
            assert!(d.module.validate().all_pass());
        }
        let x = free_module(&a, &[0, 1], Side::Left);
        let d = dual(&x);
        let want = GradedComplex::direct_sum(&[&a.carrier, &a.carrier.shift(-1)]);
        assert_eq!(d.module.carrier.dims(), want.dims());
    }

    #[test]
    fn dual_of_residue_is_socle() {
        let a = arc("dual_numbers(2)");
        let k = residue_module(&a, Side::Left);
        let d = dual(&k);
        assert_eq!(d.module.carrier.total_dim(), 1);
        assert_eq!(d.module.carrier.dim(0), 1);
        // x acts by zero on the socle
        let rho = d.module.right();
        let layout = TensorLayout::new(&d.module.carrier, &a.carrier);
        let col = layout.index(0, 0, 0, 1); // f (x) x
        assert!(rho.comp(0).column(col).is_zero());
    }

    #[test]
    fn evaluation_on_algebra_is_multiplication() {
        for name in ["dual_numbers(2)", "exterior(2)", "cone_dga(2)", "dual_numbers(3)"] {
            let a = arc(name);
            let m = algebra_as_module(&a, Side::Left);
            let d = dual(&m);
            let eps = evaluation_map(&m, &d);
            assert!(eps.is_chain_map(), "{name}: evaluation not a chain map");
            // j : A -> A*, a |-> id . a, is an iso of right modules turning
            // evaluation into multiplication
            let field = a.field();
            let hl = HomLayout::new(&a.carrier, &a.carrier);
            let idv = hl.to_vector(&GradedMap::identity(&a.carrier));
            let f1 = d.incl.comp(0).solve_right(&idv).unwrap();
            let xs = &d.module.carrier;
            let layout = TensorLayout::new(xs, &a.carrier);
            let mut comps = BTreeMap::new();
            for q in a.carrier.support() {
                let mut jq = Matrix::zeros(field, xs.dim(q), a.carrier.dim(q));
                for aj in 0..a.carrier.dim(q) {
                    let mut v = Matrix::zeros(field, layout.dim(q), 1);
                    for fi in 0..f1.rows {
                        v.set(layout.index(q, 0, fi, aj), 0, f1.get(fi, 0).clone());
                    }
                    let out = d.module.right().comp(q).mul(&v);
                    for r in 0..out.rows {
                        jq.set(r, aj, out.get(r, 0).clone());
                    }
                }
                comps.insert(q, jq);
            }
            let j = GradedMap::new(a.carrier.clone(), xs.clone(), 0, comps).unwrap();
            assert!(j.is_isomorphism(), "{name}: A !~ A* via id.a");
            let ida = GradedMap::identity(&a.carrier);
            let got = eps.compose(&tensor_map(&ida, &j));
            assert_eq!(got, a.mult, "{name}: evaluation != multiplication");
        }
    }

    #[test]
    fn evaluation_chain_map_on_free_modules() {
        let a = arc("cone_dga(2)");
        let x = free_module(&a, &[0, 1], Side::Left);
        let d = dual(&x);
        let eps = evaluation_map(&x, &d);
        assert!(eps.is_chain_map());
    }

    #[test]
    fn nu_iso_on_regular_module() {
        for name in ["dual_numbers(2)", "exterior(2)"] {
            let a = arc(name);
            let x = algebra_as_module(&a, Side::Left);
            let z = algebra_as_module(&a, Side::Bi);
            let x2 = free_module(&a, &[0, 1], Side::Left);
            let nu = nu_map(&x, &z, &x2);
            assert!(nu.map.is_chain_map(), "{name}: nu not a chain map");
            assert!(nu.map.is_isomorphism(), "{name}: nu not iso on A");
        }
    }

    #[test]
    fn nu_fails_on_residue_module() {
        let a = arc("dual_numbers(2)");
        let k = residue_module(&a, Side::Left);
        let z = algebra_as_module(&a, Side::Bi);
        let nu = nu_map(&k, &z, &k);
        assert!(nu.map.is_chain_map());
        assert!(!nu.map.is_isomorphism());
    }

    #[test]
    fn free_gens_flag_propagates() {
        let a = arc("exterior(2)");
        let f = free_module(&a, &[0, 2], Side::Left);
        assert_eq!(f.free_gens.as_deref(), Some(&[0, 2][..]));
        let s = shift_module(&f, 1);
        assert_eq!(s.free_gens.as_deref(), Some(&[1, 3][..]));
        assert!(tensor_a(&algebra_as_module(&a, Side::Bi), &f)
            .module
            .unwrap()
            .free_gens
            .is_none());
    }

    #[test]
    fn tensor_right_exactness_dimension_bookkeeping() {
        // surjection A -> k over dual numbers stays surjective after (-) (x)_A k
        let a = arc("dual_numbers(2)");
        let ar = algebra_as_module(&a, Side::Right);
        let kr = residue_module(&a, Side::Right);
        let kl = residue_module(&a, Side::Left);
        let maps = hom_module_set(&ar, &kr);
        let p = maps.iter().find(|f| f.is_surjective()).unwrap();
        let src = tensor_a(&ar, &kl);
        let tgt = tensor_a(&kr, &kl);
        let induced = tensor_map_right(p, &kl, &src, &tgt);
        assert!(induced.is_surjective());
    }
}
