//! Worked example corpora: named algebras with a zoo of modules whose
//! dualizability status is known in advance, plus battery data for the
//! relative flatness checks, and a theorem suite that re-verifies the
//! structural laws on every corpus with a deterministic report.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::algebra::{
    builtin_catalog, category_algebra, from_graded_ring, from_ring, CategoryPresentation,
    DGAlgebra,
};
use crate::duality::{bidual_map, check_condition_2, check_condition_7, is_dualizable, triangle_holds};
use crate::ext::{acyclic_witness_module, ext1, is_semi_flat, ShortExactSequence};
use crate::field::Field;
use crate::graded::{left_unitor, GradedComplex, GradedMap, TensorLayout};
use crate::matrix::Matrix;
use crate::module::{
    algebra_as_module, cone_module, cokernel_module, free_module, hom_module_set, kernel_module,
    map_from_free, residue_module, shift_module, tensor_a, DGModule, ModuleError, ModuleMap, Side,
};
use crate::report::ValidationReport;

pub struct NamedModule {
    pub name: String,
    pub module: DGModule,
    /// expected dualizability, fixed when the corpus was frozen
    pub dualizable: bool,
}

pub struct Corpus {
    pub name: String,
    pub algebra: Arc<DGAlgebra>,
    pub modules: Vec<NamedModule>,
    pub ses_battery: Vec<ShortExactSequence>,
    pub acyclic_battery: Vec<DGModule>,
    /// object idempotents when the algebra is a category algebra
    pub idempotents: Vec<usize>,
}

pub const CORPUS_NAMES: [&str; 7] = [
    "ring/dual_numbers_F2",
    "ring/truncated_F3",
    "graded/kx3_F2",
    "dg/exterior_F2",
    "dg/cone_dga_F2",
    "ch/dual_numbers_F2",
    "functor/arrow_category_F3",
];

pub fn corpus_names() -> &'static [&'static str] {
    &CORPUS_NAMES
}

/// F_3[x]/x^3 in degree 0.
pub fn truncated_f3() -> Arc<DGAlgebra> {
    let field = Field::Prime(3);
    let one = field.one();
    let mult = vec![
        (0, 0, 0, one.clone()),
        (0, 1, 1, one.clone()),
        (1, 0, 1, one.clone()),
        (0, 2, 2, one.clone()),
        (2, 0, 2, one.clone()),
        (1, 1, 2, one.clone()),
    ];
    let labels = vec!["1".into(), "x".into(), "x2".into()];
    Arc::new(from_ring(field, labels, mult, vec![(0, one)]).unwrap())
}

/// F_2[x]/x^3 with |x| = 2 and zero differential.
pub fn kx3_graded_f2() -> Arc<DGAlgebra> {
    let field = Field::Prime(2);
    let one = field.one();
    let basis = BTreeMap::from([
        (0, vec!["1".to_string()]),
        (2, vec!["x".to_string()]),
        (4, vec!["x2".to_string()]),
    ]);
    let mult = vec![
        (0, 0, 0, one.clone()),
        (0, 1, 1, one.clone()),
        (1, 0, 1, one.clone()),
        (0, 2, 2, one.clone()),
        (2, 0, 2, one.clone()),
        (1, 1, 2, one.clone()),
    ];
    Arc::new(from_graded_ring(field, basis, mult, vec![(0, one)]).unwrap())
}

/// The one-dimensional algebra over F_2; its modules are plain complexes.
pub fn unit_f2() -> Arc<DGAlgebra> {
    let field = Field::Prime(2);
    let one = field.one();
    Arc::new(from_ring(field, vec!["1".into()], vec![(0, 0, 0, one.clone())], vec![(0, one)]).unwrap())
}

/// The arrow category 0 -> 1 over F_3 as a category algebra, with its object
/// idempotents.
pub fn arrow_category_f3() -> (Arc<DGAlgebra>, Vec<usize>) {
    let field = Field::Prime(3);
    let one = field.one();
    let pres = CategoryPresentation {
        field,
        objects: 2,
        hom_basis: BTreeMap::from([
            ((0, 0), vec!["id0".to_string()]),
            ((0, 1), vec!["a".to_string()]),
            ((1, 1), vec!["id1".to_string()]),
        ]),
        identities: BTreeMap::from([(0, 0), (1, 0)]),
        compose: vec![
            ((0, 0, 0), (0, 0, 0), vec![(0, one.clone())]), // id0 . id0
            ((1, 1, 0), (1, 1, 0), vec![(0, one.clone())]), // id1 . id1
            ((0, 1, 0), (0, 0, 0), vec![(0, one.clone())]), // a . id0 = a
            ((1, 1, 0), (0, 1, 0), vec![(0, one)]),         // id1 . a = a
        ],
    };
    let ca = category_algebra(&pres).unwrap();
    (Arc::new(ca.algebra), ca.idempotents)
}

/// Column of the g-th algebra basis element in A_0 coordinates.
fn basis_column(a: &Arc<DGAlgebra>, g: usize) -> Matrix {
    let field = a.field();
    let mut col = Matrix::zeros(field, a.carrier.dim(0), 1);
    col.set(g, 0, field.one());
    col
}

/// Degree and position-in-bucket of a global basis index.
fn bucket_position(a: &DGAlgebra, g: usize) -> (i64, usize) {
    let d = a.index().degree_of(g);
    let offset: usize = a.carrier.support().filter(|&n| n < d).map(|n| a.carrier.dim(n)).sum();
    (d, g - offset)
}

/// The canonical short exact sequence of right modules built from left
/// multiplication by the first non-unit basis cycle x: the kernel of
/// x . (-) : Sigma^{|x|} A -> A, its inclusion, and the quotient.
fn principal_ses(a: &Arc<DGAlgebra>) -> ShortExactSequence {
    let field = a.field();
    // a cycle, so that left multiplication by it is a chain map
    let g = (1..a.total_dim()).find(|&g| {
        let (d, pos) = bucket_position(a, g);
        let dm = a.carrier.d(d);
        (0..dm.rows).all(|r| field.is_zero(dm.get(r, pos)))
    });
    let afree = algebra_as_module(a, Side::Right);
    let f = match g {
        Some(g) => {
            let (d, pos) = bucket_position(a, g);
            let mut img = Matrix::zeros(field, a.carrier.dim(d), 1);
            img.set(pos, 0, field.one());
            let src = free_module(a, &[d], Side::Right);
            map_from_free(&src, &afree, &[img])
        }
        // no non-unit basis cycle (e.g. a contractible algebra): fall back to
        // the trivial sequence A = A -> 0
        None => ModuleMap::zero(&afree, &afree),
    };
    let (_k, kincl) = kernel_module(&f);
    let (_q, proj, _section) = cokernel_module(&kincl);
    ShortExactSequence { incl: kincl, proj }
}

/// A complex as a module over the one-dimensional algebra.
fn complex_module(a: &Arc<DGAlgebra>, carrier: GradedComplex) -> DGModule {
    let action = left_unitor(&carrier);
    DGModule {
        algebra: a.clone(),
        side: Side::Left,
        carrier,
        left_action: Some(action),
        right_action: None,
        free_gens: None,
    }
}

fn named(name: &str, module: DGModule, dualizable: bool) -> NamedModule {
    NamedModule { name: name.to_string(), module, dualizable }
}

/// Standard module zoo shared by the commutative corpora.
fn standard_modules(a: &Arc<DGAlgebra>, with_residue: bool) -> Vec<NamedModule> {
    let regular = algebra_as_module(a, Side::Left);
    let (cone, _, _) = cone_module(&ModuleMap::identity(&regular));
    let mut out = vec![
        named("regular", regular.clone(), true),
        named("free_rank2", free_module(a, &[0, 0], Side::Left), true),
        named("shift_regular", shift_module(&regular, 1), true),
        named("cone_identity", cone, true),
    ];
    if with_residue {
        out.push(named("residue", residue_module(a, Side::Left), false));
    }
    out
}

pub fn corpus(name: &str) -> Result<Corpus, ModuleError> {
    match name {
        "ring/dual_numbers_F2" => {
            let a = Arc::new(builtin_catalog("dual_numbers(2)").expect("catalog"));
            Ok(Corpus {
                name: name.into(),
                modules: standard_modules(&a, true),
                ses_battery: vec![principal_ses(&a)],
                acyclic_battery: vec![acyclic_witness_module(&a)],
                idempotents: vec![],
                algebra: a,
            })
        }
        "ring/truncated_F3" => {
            let a = truncated_f3();
            Ok(Corpus {
                name: name.into(),
                modules: standard_modules(&a, true),
                ses_battery: vec![principal_ses(&a)],
                acyclic_battery: vec![],
                idempotents: vec![],
                algebra: a,
            })
        }
        "graded/kx3_F2" => {
            let a = kx3_graded_f2();
            let mut modules = standard_modules(&a, true);
            modules.push(named("free_0_2", free_module(&a, &[0, 2], Side::Left), true));
            Ok(Corpus {
                name: name.into(),
                modules,
                ses_battery: vec![principal_ses(&a)],
                acyclic_battery: vec![],
                idempotents: vec![],
                algebra: a,
            })
        }
        "dg/exterior_F2" => {
            let a = Arc::new(builtin_catalog("exterior(2)").expect("catalog"));
            Ok(Corpus {
                name: name.into(),
                modules: standard_modules(&a, true),
                ses_battery: vec![principal_ses(&a)],
                acyclic_battery: vec![acyclic_witness_module(&a)],
                idempotents: vec![],
                algebra: a,
            })
        }
        "dg/cone_dga_F2" => {
            let a = Arc::new(builtin_catalog("cone_dga(2)").expect("catalog"));
            Ok(Corpus {
                name: name.into(),
                modules: standard_modules(&a, false),
                ses_battery: vec![principal_ses(&a)],
                acyclic_battery: vec![algebra_as_module(&a, Side::Right)],
                idempotents: vec![],
                algebra: a,
            })
        }
        "ch/dual_numbers_F2" => {
            let a = unit_f2();
            let field = a.field();
            // the underlying complex of the dual numbers: two classes in degree 0
            let flat2 = GradedComplex::new(field, BTreeMap::from([(0, 2)]), BTreeMap::new())
                .expect("complex shape");
            let contractible = GradedComplex::new(
                field,
                BTreeMap::from([(0, 1), (1, 1)]),
                BTreeMap::from([(1, Matrix::from_i64(field, &[&[1]]))]),
            )
            .expect("complex shape");
            let regular = algebra_as_module(&a, Side::Left);
            let modules = vec![
                named("unit_object", regular.clone(), true),
                named("underlying_dual_numbers", complex_module(&a, flat2), true),
                named("two_term_contractible", complex_module(&a, contractible.clone()), true),
                named("shift_unit", shift_module(&regular, 1), true),
            ];
            // 0 -> 1 -> cone -> Sigma 1 -> 0 in Ch, as right modules
            let sub = algebra_as_module(&a, Side::Right);
            let mid = {
                let (cone, _, _) = cone_module(&ModuleMap::identity(&sub));
                cone
            };
            let quot = shift_module(&sub, 1);
            let incl_map = GradedMap::new(
                sub.carrier.clone(),
                mid.carrier.clone(),
                0,
                BTreeMap::from([(0, Matrix::from_i64(field, &[&[1]]))]),
            )
            .expect("inclusion shape");
            let proj_map = GradedMap::new(
                mid.carrier.clone(),
                quot.carrier.clone(),
                0,
                BTreeMap::from([(1, Matrix::from_i64(field, &[&[1]]))]),
            )
            .expect("projection shape");
            let ses = ShortExactSequence {
                incl: ModuleMap::new(sub, mid.clone(), incl_map)?,
                proj: ModuleMap::new(mid.clone(), quot, proj_map)?,
            };
            let mut acyclic = mid;
            acyclic.side = Side::Right;
            Ok(Corpus {
                name: name.into(),
                modules,
                ses_battery: vec![ses],
                acyclic_battery: vec![acyclic],
                idempotents: vec![],
                algebra: a,
            })
        }
        "functor/arrow_category_F3" => {
            let (a, idem) = arrow_category_f3();
            let field = a.field();
            let unit = a.unit_column();
            let representable = |x: usize| -> (DGModule, GradedMap) {
                // A e_x = ker of right multiplication by 1 - e_x
                let mut img = unit.clone();
                let e = idem[x];
                let v = field.add(img.get(e, 0), &field.neg(&field.one()));
                img.set(e, 0, v);
                let afree = algebra_as_module(&a, Side::Left);
                let f = map_from_free(&afree, &afree, &[img]);
                let (p, incl) = kernel_module(&f);
                (p, incl.map)
            };
            let (p0, incl0) = representable(0);
            let (p1, _incl1) = representable(1);
            // the simple at object 0 is P_0 modulo the image of a : P_1 -> P_0
            let arrow_col = basis_column(&a, 1); // global index of the arrow "a"
            let coords = incl0
                .comp(0)
                .solve_right(&arrow_col)
                .expect("the arrow lies in the source representable");
            let to_p0 = GradedMap::new(
                p1.carrier.clone(),
                p0.carrier.clone(),
                0,
                BTreeMap::from([(0, coords)]),
            )
            .expect("arrow action shape");
            let arrow_map = ModuleMap::new(p1.clone(), p0.clone(), to_p0)?;
            let (s0, _, _) = cokernel_module(&arrow_map);
            let modules = vec![
                named("regular", algebra_as_module(&a, Side::Left), true),
                named("representable_0", p0, true),
                named("representable_1", p1, true),
                named("simple_0", s0, false),
            ];
            Ok(Corpus {
                name: name.into(),
                modules,
                ses_battery: vec![principal_ses(&a)],
                acyclic_battery: vec![],
                idempotents: idem,
                algebra: a,
            })
        }
        other => Err(ModuleError::Usage(format!(
            "unknown corpus {other:?}; available: {}",
            CORPUS_NAMES.join(", ")
        ))),
    }
}

pub struct SuiteReport {
    pub corpus: String,
    pub report: ValidationReport,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.report.all_pass()
    }

    pub fn render(&self) -> String {
        format!(
            "theorem suite: {}\n{}result: {}\n",
            self.corpus,
            self.report,
            if self.pass() { "pass" } else { "fail" }
        )
    }
}

/// Dimension of e_g . G, the evaluation of a module-as-functor at the object
/// with idempotent g.
fn evaluation_dim(g: usize, m: &DGModule) -> usize {
    let a = &m.algebra.carrier;
    let layout = TensorLayout::new(a, &m.carrier);
    let mut total = 0;
    for n in m.carrier.support() {
        let act = m.left().comp(n);
        let dim = m.carrier.dim(n);
        let mut op = Matrix::zeros(m.field(), dim, dim);
        for v in 0..dim {
            let mut e = Matrix::zeros(m.field(), layout.dim(n), 1);
            e.set(layout.index(n, 0, g, v), 0, m.field().one());
            let col = act.mul(&e);
            for r in 0..dim {
                op.set(r, v, col.get(r, 0).clone());
            }
        }
        total += op.rank();
    }
    total
}

/// Re-verifies the structural laws on a corpus: validation, the agreement of
/// the dualizability conditions with each other and with the frozen
/// expectations, triangle and biduality identities, battery-relative
/// semi-flatness of the dualizable members, projectivity of identity cones,
/// the tensor unit law, and (for category algebras) the representable
/// evaluation dimensions.
pub fn run_theorem_suite(c: &Corpus) -> SuiteReport {
    let mut rep = ValidationReport::default();

    let mut bad = None;
    for nm in &c.modules {
        let r = nm.module.validate();
        if !r.all_pass() {
            bad = Some(format!("{}: {}", nm.name, r.first_failure().unwrap().name));
            break;
        }
    }
    rep.record("modules-validate", bad);

    let verdicts: Vec<_> = c.modules.iter().map(|nm| is_dualizable(&nm.module)).collect();

    let mut bad = None;
    for (nm, v) in c.modules.iter().zip(&verdicts) {
        if v.dualizable != nm.dualizable {
            bad = Some(format!("{}: got {}, expected {}", nm.name, v.dualizable, nm.dualizable));
            break;
        }
    }
    rep.record("dualizability-matches-expectation", bad);

    let mut bad = None;
    for (nm, v) in c.modules.iter().zip(&verdicts) {
        let c2 = check_condition_2(&nm.module);
        let c7 = check_condition_7(&nm.module);
        if c2 != v.dualizable || c7 != v.dualizable {
            bad = Some(format!(
                "{}: coevaluation {}, endomorphism criterion {}, tensor-hom criterion {}",
                nm.name, v.dualizable, c2, c7
            ));
            break;
        }
    }
    rep.record("dualizability-conditions-agree", bad);

    let mut bad = None;
    for (nm, v) in c.modules.iter().zip(&verdicts) {
        if let Some(w) = &v.witness {
            if !triangle_holds(&nm.module, w) {
                bad = Some(format!("{}: witness fails the triangle identity", nm.name));
                break;
            }
        }
    }
    rep.record("coevaluation-triangle", bad);

    let mut bad = None;
    for (nm, v) in c.modules.iter().zip(&verdicts) {
        if v.dualizable && !bidual_map(&nm.module).0.is_isomorphism() {
            bad = Some(format!("{}: bidual map is not an isomorphism", nm.name));
            break;
        }
    }
    rep.record("biduality-iso-on-dualizable", bad);

    let mut bad = None;
    for (nm, v) in c.modules.iter().zip(&verdicts) {
        if !v.dualizable {
            continue;
        }
        match is_semi_flat(&nm.module, &c.ses_battery, &c.acyclic_battery) {
            Ok(verdict) if verdict.pass() => {}
            Ok(verdict) => {
                bad = Some(format!("{}: {}", nm.name, verdict.witness.unwrap_or_default()));
                break;
            }
            Err(e) => {
                bad = Some(format!("{}: battery rejected: {e}", nm.name));
                break;
            }
        }
    }
    rep.record("dualizable-modules-are-semi-flat", bad);

    let regular = algebra_as_module(&c.algebra, Side::Left);
    let (cone_id, _, _) = cone_module(&ModuleMap::identity(&regular));
    let mut bad = None;
    for nm in &c.modules {
        let e = ext1(&cone_id, &nm.module);
        if e != 0 {
            bad = Some(format!("{}: ext^1 from the identity cone has dimension {e}", nm.name));
            break;
        }
    }
    rep.record("identity-cones-are-projective", bad);

    let abi = algebra_as_module(&c.algebra, Side::Bi);
    let mut bad = None;
    for nm in &c.modules {
        let t = tensor_a(&abi, &nm.module);
        let ok = nm
            .module
            .carrier
            .support()
            .chain(t.complex.support())
            .all(|n| t.complex.dim(n) == nm.module.carrier.dim(n));
        if !ok {
            bad = Some(format!("{}: A (x)_A X has the wrong dimensions", nm.name));
            break;
        }
    }
    rep.record("tensor-unit-law", bad);

    if !c.idempotents.is_empty() {
        let mut bad = None;
        'outer: for (x, &g) in c.idempotents.iter().enumerate() {
            let px = &c
                .modules
                .iter()
                .find(|nm| nm.name == format!("representable_{x}"))
                .expect("representables present")
                .module;
            for nm in &c.modules {
                let hom_dim = hom_module_set(px, &nm.module).len();
                let eval_dim = evaluation_dim(g, &nm.module);
                if hom_dim != eval_dim {
                    bad = Some(format!(
                        "object {x}, module {}: hom dimension {hom_dim}, evaluation dimension {eval_dim}",
                        nm.name
                    ));
                    break 'outer;
                }
            }
        }
        rep.record("representables-compute-evaluation", bad);
    }

    SuiteReport { corpus: c.name.clone(), report: rep }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_corpora_build_and_validate() {
        for name in corpus_names() {
            let c = corpus(name).unwrap();
            assert!(!c.modules.is_empty(), "{name} has modules");
            for nm in &c.modules {
                assert!(nm.module.validate().all_pass(), "{name}/{}", nm.name);
            }
            for (i, s) in c.ses_battery.iter().enumerate() {
                assert!(s.validate().all_pass(), "{name} battery sequence {i}");
            }
            for e in &c.acyclic_battery {
                assert!(e.carrier.is_acyclic(), "{name} acyclic battery");
            }
        }
    }

    #[test]
    fn unknown_corpus_is_an_error() {
        assert!(corpus("ring/unknown").is_err());
    }

    #[test]
    fn arrow_category_dimensions() {
        let c = corpus("functor/arrow_category_F3").unwrap();
        assert_eq!(c.algebra.total_dim(), 3);
        let dims: BTreeMap<&str, usize> = c
            .modules
            .iter()
            .map(|nm| (nm.name.as_str(), nm.module.carrier.total_dim()))
            .collect();
        assert_eq!(dims["regular"], 3);
        assert_eq!(dims["representable_0"], 2);
        assert_eq!(dims["representable_1"], 1);
        assert_eq!(dims["simple_0"], 1);
    }

    #[test]
    fn theorem_suite_passes_everywhere() {
        for name in corpus_names() {
            let c = corpus(name).unwrap();
            let r = run_theorem_suite(&c);
            assert!(r.pass(), "suite failed on {name}:\n{}", r.render());
        }
    }

    #[test]
    fn suite_report_is_deterministic() {
        let c = corpus("ring/dual_numbers_F2").unwrap();
        let r1 = run_theorem_suite(&c).render();
        let c2 = corpus("ring/dual_numbers_F2").unwrap();
        let r2 = run_theorem_suite(&c2).render();
        assert_eq!(r1, r2);
        assert!(r1.starts_with("theorem suite: ring/dual_numbers_F2\n"));
        assert!(r1.ends_with("result: pass\n"));
    }
}
