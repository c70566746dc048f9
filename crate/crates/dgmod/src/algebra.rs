//! Monoid objects in Ch(k): DG-algebras given by structure constants on an
//! explicit graded basis, with axiom validation and the builtin example catalog.

use crate::field::{Field, Scalar};
use crate::graded::{tensor_base, GradedComplex, GradedMap, TensorLayout};
use crate::matrix::Matrix;
use crate::report::ValidationReport;
use std::collections::BTreeMap;

#[derive(Debug, thiserror::Error)]
pub enum AlgebraError {
    #[error("axiom validation failed:\n{0}")]
    Invalid(ValidationReport),
    #[error("unknown catalog name: {0}")]
    UnknownCatalog(String),
    #[error("bad presentation: {0}")]
    BadPresentation(String),
    #[error(transparent)]
    Field(#[from] crate::field::FieldError),
}

/// Raw algebra data as it arrives from a file or a builder; may violate axioms.
/// Basis indices are global: degrees ascending, positions within a degree in order.
#[derive(Debug, Clone)]
pub struct AlgebraPresentation {
    pub field: Field,
    pub basis: BTreeMap<i64, Vec<String>>,
    /// e_i * e_j = sum of c * e_k, sparse triples (i, j, k, c).
    pub mult: Vec<(usize, usize, usize, Scalar)>,
    /// 1 = sum of c * e_k.
    pub unit: Vec<(usize, Scalar)>,
    /// d e_j = sum of c * e_i, sparse pairs (i, j, c).
    pub diff: Vec<(usize, usize, Scalar)>,
}

/// Global-index bookkeeping shared by algebras and modules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisIndex {
    offsets: BTreeMap<i64, usize>,
    degrees: Vec<i64>, // degree of each global index
}

impl BasisIndex {
    pub fn new(dims: &BTreeMap<i64, usize>) -> BasisIndex {
        let mut offsets = BTreeMap::new();
        let mut degrees = Vec::new();
        let mut off = 0;
        for (&n, &d) in dims {
            offsets.insert(n, off);
            off += d;
            for _ in 0..d {
                degrees.push(n);
            }
        }
        BasisIndex { offsets, degrees }
    }

    pub fn total(&self) -> usize {
        self.degrees.len()
    }

    pub fn degree_of(&self, g: usize) -> i64 {
        self.degrees[g]
    }

    pub fn split(&self, g: usize) -> (i64, usize) {
        let n = self.degrees[g];
        (n, g - self.offsets[&n])
    }

    pub fn global(&self, degree: i64, pos: usize) -> usize {
        self.offsets[&degree] + pos
    }

    pub fn offset(&self, degree: i64) -> Option<usize> {
        self.offsets.get(&degree).copied()
    }
}

impl AlgebraPresentation {
    pub fn dims(&self) -> BTreeMap<i64, usize> {
        self.basis.iter().map(|(&n, v)| (n, v.len())).filter(|&(_, d)| d > 0).collect()
    }

    pub fn index(&self) -> BasisIndex {
        BasisIndex::new(&self.dims())
    }

    fn total_dim(&self) -> usize {
        self.basis.values().map(|v| v.len()).sum()
    }

    /// Product of two global coordinate vectors via the structure constants.
    fn product(&self, u: &[Scalar], v: &[Scalar]) -> Vec<Scalar> {
        let f = self.field;
        let mut out = vec![f.zero(); self.total_dim()];
        for &(i, j, k, ref c) in &self.mult {
            let term = f.mul(&f.mul(&u[i], &v[j]), c);
            out[k] = f.add(&out[k], &term);
        }
        out
    }

    fn unit_vector(&self) -> Vec<Scalar> {
        let f = self.field;
        let mut out = vec![f.zero(); self.total_dim()];
        for &(k, ref c) in &self.unit {
            out[k] = f.add(&out[k], c);
        }
        out
    }

    fn diff_vector(&self, u: &[Scalar]) -> Vec<Scalar> {
        let f = self.field;
        let mut out = vec![f.zero(); self.total_dim()];
        for &(i, j, ref c) in &self.diff {
            let term = f.mul(&u[j], c);
            out[i] = f.add(&out[i], &term);
        }
        out
    }

    fn basis_vec(&self, g: usize) -> Vec<Scalar> {
        let f = self.field;
        let mut v = vec![f.zero(); self.total_dim()];
        v[g] = f.one();
        v
    }

    /// Checks degree homogeneity of the structure data (a shape error, reported
    /// before the axioms).
    fn degree_consistent(&self) -> Option<String> {
        let idx = self.index();
        for &(i, j, k, _) in &self.mult {
            if i >= idx.total() || j >= idx.total() || k >= idx.total() {
                return Some(format!("mult entry ({i},{j},{k}) out of range"));
            }
            if idx.degree_of(i) + idx.degree_of(j) != idx.degree_of(k) {
                return Some(format!("mult entry ({i},{j},{k}) not degree-homogeneous"));
            }
        }
        for &(k, _) in &self.unit {
            if k >= idx.total() || idx.degree_of(k) != 0 {
                return Some(format!("unit entry {k} not in degree 0"));
            }
        }
        for &(i, j, _) in &self.diff {
            if i >= idx.total() || j >= idx.total() {
                return Some(format!("diff entry ({i},{j}) out of range"));
            }
            if idx.degree_of(i) != idx.degree_of(j) - 1 {
                return Some(format!("diff entry ({i},{j}) does not lower degree by 1"));
            }
        }
        None
    }

    /// Validates monoid + Leibniz + d^2 = 0; failures carry basis-index witnesses.
    pub fn validate(&self) -> ValidationReport {
        let mut rep = ValidationReport::default();
        if let Some(w) = self.degree_consistent() {
            rep.push_fail("degree-consistency", w);
            return rep;
        }
        rep.push_pass("degree-consistency");
        let f = self.field;
        let idx = self.index();
        let n = idx.total();
        let eq = |u: &[Scalar], v: &[Scalar]| u.iter().zip(v).all(|(a, b)| f.is_zero(&f.sub(a, b)));

        // d^2 = 0
        let mut w = None;
        for g in 0..n {
            let dd = self.diff_vector(&self.diff_vector(&self.basis_vec(g)));
            if dd.iter().any(|c| !f.is_zero(c)) {
                w = Some(format!("d^2(e_{g}) != 0"));
                break;
            }
        }
        rep.record("d-squared", w);

        // associativity
        let mut w = None;
        'assoc: for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let lhs = self.product(&self.product(&self.basis_vec(i), &self.basis_vec(j)), &self.basis_vec(k));
                    let rhs = self.product(&self.basis_vec(i), &self.product(&self.basis_vec(j), &self.basis_vec(k)));
                    if !eq(&lhs, &rhs) {
                        w = Some(format!("(e_{i} e_{j}) e_{k} != e_{i} (e_{j} e_{k})"));
                        break 'assoc;
                    }
                }
            }
        }
        rep.record("associativity", w);

        // unit laws
        let one = self.unit_vector();
        let mut w = None;
        for g in 0..n {
            let e = self.basis_vec(g);
            if !eq(&self.product(&one, &e), &e) || !eq(&self.product(&e, &one), &e) {
                w = Some(format!("unit law fails at e_{g}"));
                break;
            }
        }
        rep.record("unit-laws", w);

        // Leibniz: d(ab) = d(a) b + (-1)^{|a|} a d(b)
        let mut w = None;
        'leib: for i in 0..n {
            for j in 0..n {
                let a = self.basis_vec(i);
                let b = self.basis_vec(j);
                let lhs = self.diff_vector(&self.product(&a, &b));
                let da_b = self.product(&self.diff_vector(&a), &b);
                let mut a_db = self.product(&a, &self.diff_vector(&b));
                if idx.degree_of(i).rem_euclid(2) == 1 {
                    a_db = a_db.iter().map(|c| f.neg(c)).collect();
                }
                let rhs: Vec<Scalar> = da_b.iter().zip(&a_db).map(|(x, y)| f.add(x, y)).collect();
                if !eq(&lhs, &rhs) {
                    w = Some(format!("Leibniz fails on (e_{i}, e_{j})"));
                    break 'leib;
                }
            }
        }
        rep.record("leibniz", w);
        rep
    }

    pub fn build(&self) -> Result<DGAlgebra, AlgebraError> {
        let rep = self.validate();
        if !rep.all_pass() {
            return Err(AlgebraError::Invalid(rep));
        }
        let field = self.field;
        let dims = self.dims();
        let idx = BasisIndex::new(&dims);
        // differential matrices per degree
        let mut diff: BTreeMap<i64, Matrix> = BTreeMap::new();
        let dim_at = |n: i64| dims.get(&n).copied().unwrap_or(0);
        for (&n, _) in &dims {
            let m = Matrix::zeros(field, dim_at(n - 1), dim_at(n));
            diff.insert(n, m);
        }
        for &(i, j, ref c) in &self.diff {
            let (nj, pj) = idx.split(j);
            let (_, pi) = idx.split(i);
            let m = diff.get_mut(&nj).unwrap();
            m.set(pi, pj, field.add(m.get(pi, pj), c));
        }
        let carrier = GradedComplex::new(field, dims.clone(), diff).expect("d^2 validated");

        // multiplication as a graded map (A (x) A) -> A
        let layout = TensorLayout::new(&carrier, &carrier);
        let aa = tensor_base(&carrier, &carrier);
        let mut mult_comps: BTreeMap<i64, Matrix> = BTreeMap::new();
        for n in aa.support() {
            mult_comps.insert(n, Matrix::zeros(field, carrier.dim(n), aa.dim(n)));
        }
        for &(i, j, k, ref c) in &self.mult {
            let (ni, pi) = idx.split(i);
            let (nj, pj) = idx.split(j);
            let (nk, pk) = idx.split(k);
            let col = layout.index(ni + nj, ni, pi, pj);
            let m = mult_comps.get_mut(&nk).unwrap();
            m.set(pk, col, field.add(m.get(pk, col), c));
        }
        let mult = GradedMap::new(aa, carrier.clone(), 0, mult_comps).expect("mult shape");

        // unit map 1 -> A
        let one = GradedComplex::unit_object(field);
        let mut u = Matrix::zeros(field, carrier.dim(0), 1);
        for &(k, ref c) in &self.unit {
            let (_, pk) = idx.split(k);
            u.set(pk, 0, field.add(u.get(pk, 0), c));
        }
        let mut unit_comps = BTreeMap::new();
        unit_comps.insert(0, u);
        let unit = GradedMap::new(one, carrier.clone(), 0, unit_comps).expect("unit shape");

        Ok(DGAlgebra {
            carrier,
            mult,
            unit,
            labels: self.basis.clone(),
            index: idx,
        })
    }
}

/// A validated DG-algebra: a monoid object in Ch(k).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DGAlgebra {
    pub carrier: GradedComplex,
    /// A (x) A -> A, degree 0 chain map.
    pub mult: GradedMap,
    /// 1 -> A.
    pub unit: GradedMap,
    pub labels: BTreeMap<i64, Vec<String>>,
    index: BasisIndex,
}

impl DGAlgebra {
    pub fn field(&self) -> Field {
        self.carrier.field
    }

    pub fn index(&self) -> &BasisIndex {
        &self.index
    }

    pub fn total_dim(&self) -> usize {
        self.carrier.total_dim()
    }

    /// The unit element as a column vector in A_0 coordinates.
    pub fn unit_column(&self) -> Matrix {
        self.unit.comp(0)
    }

    pub fn is_degree_zero(&self) -> bool {
        self.carrier.support().all(|n| n == 0)
    }
}

/// Ring concentrated in degree 0, zero differential.
pub fn from_ring(
    field: Field,
    labels: Vec<String>,
    mult: Vec<(usize, usize, usize, Scalar)>,
    unit: Vec<(usize, Scalar)>,
) -> Result<DGAlgebra, AlgebraError> {
    let mut basis = BTreeMap::new();
    basis.insert(0, labels);
    AlgebraPresentation { field, basis, mult, unit, diff: vec![] }.build()
}

/// Graded ring: nonzero degrees allowed, zero differential.
pub fn from_graded_ring(
    field: Field,
    basis: BTreeMap<i64, Vec<String>>,
    mult: Vec<(usize, usize, usize, Scalar)>,
    unit: Vec<(usize, Scalar)>,
) -> Result<DGAlgebra, AlgebraError> {
    AlgebraPresentation { field, basis, mult, unit, diff: vec![] }.build()
}

/// A small k-linear category by hom bases and composition tables. The algebra is
/// the direct sum of all hom spaces with the convolution product f*g = f.g on
/// composable pairs; identities sum to the unit. Left modules over the result
/// correspond to additive functors, with evaluation at x given by e_x * (-).
pub struct CategoryPresentation {
    pub field: Field,
    pub objects: usize,
    /// hom_basis[(x, y)] = labels of a basis of arrows x -> y.
    pub hom_basis: BTreeMap<(usize, usize), Vec<String>>,
    /// identity arrow of x, as a position in hom_basis[(x, x)].
    pub identities: BTreeMap<usize, usize>,
    /// ((y, z, a), (x, y, b)) -> coefficients of the composite in hom_basis[(x, z)].
    pub compose: Vec<((usize, usize, usize), (usize, usize, usize), Vec<(usize, Scalar)>)>,
}

/// A category algebra together with its object idempotents e_x (global indices).
pub struct CategoryAlgebra {
    pub algebra: DGAlgebra,
    pub idempotents: Vec<usize>,
    /// global index of each arrow: (src, tgt, pos) -> index
    pub arrow_index: BTreeMap<(usize, usize, usize), usize>,
}

pub fn category_algebra(pres: &CategoryPresentation) -> Result<CategoryAlgebra, AlgebraError> {
    let field = pres.field;
    let mut labels = Vec::new();
    let mut arrow_index = BTreeMap::new();
    for (&(x, y), arrows) in &pres.hom_basis {
        for (p, l) in arrows.iter().enumerate() {
            arrow_index.insert((x, y, p), labels.len());
            labels.push(format!("{l}[{x}->{y}]"));
        }
    }
    let mut mult = Vec::new();
    for (yz, xy, out) in &pres.compose {
        let &(y1, z, a) = yz;
        let &(x, y2, b) = xy;
        if y1 != y2 {
            return Err(AlgebraError::BadPresentation(format!(
                "composition rule pairs non-composable arrows ({y1} vs {y2})"
            )));
        }
        let i = *arrow_index.get(&(y1, z, a)).ok_or_else(|| {
            AlgebraError::BadPresentation(format!("unknown arrow ({y1},{z},{a})"))
        })?;
        let j = *arrow_index.get(&(x, y2, b)).ok_or_else(|| {
            AlgebraError::BadPresentation(format!("unknown arrow ({x},{y2},{b})"))
        })?;
        for &(cpos, ref coeff) in out {
            let k = *arrow_index.get(&(x, z, cpos)).ok_or_else(|| {
                AlgebraError::BadPresentation(format!("unknown composite arrow ({x},{z},{cpos})"))
            })?;
            mult.push((i, j, k, coeff.clone()));
        }
    }
    let mut unit = Vec::new();
    let mut idempotents = Vec::new();
    for x in 0..pres.objects {
        let &pos = pres.identities.get(&x).ok_or_else(|| {
            AlgebraError::BadPresentation(format!("missing identity for object {x}"))
        })?;
        let g = *arrow_index.get(&(x, x, pos)).ok_or_else(|| {
            AlgebraError::BadPresentation(format!("identity of {x} not in hom({x},{x})"))
        })?;
        idempotents.push(g);
        unit.push((g, field.one()));
    }
    let algebra = from_ring(field, labels, mult, unit)?;
    Ok(CategoryAlgebra { algebra, idempotents, arrow_index })
}

/// The builtin example zoo. Names: `unit`, `dual_numbers(p)`, `exterior(p)`,
/// `cone_dga(p)`, `upper_triangular(p)`, `matrix2(p)`.
pub fn builtin_catalog(name: &str) -> Result<DGAlgebra, AlgebraError> {
    if name == "unit" {
        return from_ring(
            Field::Rationals,
            vec!["1".into()],
            vec![(0, 0, 0, Field::Rationals.one())],
            vec![(0, Field::Rationals.one())],
        );
    }
    let (kind, p) = parse_catalog_name(name).ok_or_else(|| AlgebraError::UnknownCatalog(name.into()))?;
    let f = Field::prime(p)?;
    let one = f.one();
    match kind {
        "dual_numbers" => from_ring(
            f,
            vec!["1".into(), "x".into()],
            vec![
                (0, 0, 0, one.clone()),
                (0, 1, 1, one.clone()),
                (1, 0, 1, one.clone()),
            ],
            vec![(0, one)],
        ),
        "exterior" => {
            let mut basis = BTreeMap::new();
            basis.insert(0, vec!["1".to_string()]);
            basis.insert(1, vec!["x".to_string()]);
            // global: 0 = 1 (deg 0), 1 = x (deg 1)
            from_graded_ring(
                f,
                basis,
                vec![
                    (0, 0, 0, one.clone()),
                    (0, 1, 1, one.clone()),
                    (1, 0, 1, one.clone()),
                ],
                vec![(0, one)],
            )
        }
        "cone_dga" => {
            let mut basis = BTreeMap::new();
            basis.insert(0, vec!["1".to_string()]);
            basis.insert(1, vec!["e".to_string()]);
            AlgebraPresentation {
                field: f,
                basis,
                mult: vec![
                    (0, 0, 0, one.clone()),
                    (0, 1, 1, one.clone()),
                    (1, 0, 1, one.clone()),
                ],
                unit: vec![(0, one.clone())],
                diff: vec![(0, 1, one)], // d e = 1
            }
            .build()
        }
        "upper_triangular" => {
            // basis: e11, e22, e12 (arrow from the first idempotent to the second)
            let labels = vec!["e11".into(), "e22".into(), "e12".into()];
            let mut mult = Vec::new();
            // e11 e11 = e11, e22 e22 = e22
            mult.push((0, 0, 0, one.clone()));
            mult.push((1, 1, 1, one.clone()));
            // e12 = e11 e12 = e12 e22
            mult.push((0, 2, 2, one.clone()));
            mult.push((2, 1, 2, one.clone()));
            from_ring(f, labels, mult, vec![(0, one.clone()), (1, one)])
        }
        "matrix2" => {
            // matrix units e11, e12, e21, e22; e_ij e_kl = delta_jk e_il
            let labels = vec!["e11".into(), "e12".into(), "e21".into(), "e22".into()];
            let idx = |i: usize, j: usize| (i - 1) * 2 + (j - 1);
            let mut mult = Vec::new();
            for i in 1..=2 {
                for j in 1..=2 {
                    for k in 1..=2 {
                        for l in 1..=2 {
                            if j == k {
                                mult.push((idx(i, j), idx(k, l), idx(i, l), one.clone()));
                            }
                        }
                    }
                }
            }
            from_ring(f, labels, mult, vec![(idx(1, 1), one.clone()), (idx(2, 2), one)])
        }
        _ => Err(AlgebraError::UnknownCatalog(name.into())),
    }
}

fn parse_catalog_name(name: &str) -> Option<(&str, u64)> {
    let open = name.find('(')?;
    if !name.ends_with(')') {
        return None;
    }
    let kind = &name[..open];
    let p: u64 = name[open + 1..name.len() - 1].parse().ok()?;
    Some((kind, p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_field_as_dga_passes() {
        let a = builtin_catalog("unit").unwrap();
        assert_eq!(a.total_dim(), 1);
        assert!(a.mult.is_chain_map());
    }

    #[test]
    fn associativity_defect_reported_with_witness() {
        // a*a = b, b*a = a, a*b = 0: then (a a) a = a but a (a a) = 0
        let f = Field::prime(2).unwrap();
        let mut basis = BTreeMap::new();
        basis.insert(0, vec!["1".to_string(), "a".to_string(), "b".to_string()]);
        let pres = AlgebraPresentation {
            field: f,
            basis,
            mult: vec![
                (0, 0, 0, f.one()),
                (0, 1, 1, f.one()),
                (1, 0, 1, f.one()),
                (0, 2, 2, f.one()),
                (2, 0, 2, f.one()),
                (1, 1, 2, f.one()), // a^2 = b
                (2, 1, 1, f.one()), // b a = a
            ],
            unit: vec![(0, f.one())],
            diff: vec![],
        };
        let rep = pres.validate();
        assert!(!rep.all_pass());
        let fail = rep.first_failure().unwrap();
        assert_eq!(fail.name, "associativity");
        assert!(fail.witness.as_deref().unwrap().contains("e_1"));
    }

    #[test]
    fn exterior_algebra_validates() {
        // hand-checked table: 1*1=1, 1*x=x=x*1, x*x=0, dx=0
        let a = builtin_catalog("exterior(2)").unwrap();
        assert_eq!(a.carrier.dim(0), 1);
        assert_eq!(a.carrier.dim(1), 1);
        assert!(a.mult.is_chain_map());
        let mut expect = BTreeMap::new();
        expect.insert(0, 1);
        expect.insert(1, 1);
        assert_eq!(a.carrier.homology(), expect);
    }

    #[test]
    fn cone_dga_is_contractible() {
        let a = builtin_catalog("cone_dga(2)").unwrap();
        assert!(a.carrier.homology().is_empty());
        assert!(a.mult.is_chain_map(), "Leibniz as chain-map property");
    }

    #[test]
    fn dual_numbers_table() {
        let a = builtin_catalog("dual_numbers(3)").unwrap();
        assert_eq!(a.total_dim(), 2);
        assert!(a.is_degree_zero());
    }

    #[test]
    fn matrix2_validates() {
        let a = builtin_catalog("matrix2(2)").unwrap();
        assert_eq!(a.total_dim(), 4);
    }

    #[test]
    fn graded_ring_truncated_polynomial() {
        // k[x]/x^3 with |x| = 2
        let f = Field::prime(2).unwrap();
        let a = truncated_poly_deg2(f);
        assert_eq!(a.carrier.dim(0), 1);
        assert_eq!(a.carrier.dim(2), 1);
        assert_eq!(a.carrier.dim(4), 1);
    }

    pub(crate) fn truncated_poly_deg2(f: Field) -> DGAlgebra {
        let mut basis = BTreeMap::new();
        basis.insert(0, vec!["1".to_string()]);
        basis.insert(2, vec!["x".to_string()]);
        basis.insert(4, vec!["x2".to_string()]);
        from_graded_ring(
            f,
            basis,
            vec![
                (0, 0, 0, f.one()),
                (0, 1, 1, f.one()),
                (1, 0, 1, f.one()),
                (0, 2, 2, f.one()),
                (2, 0, 2, f.one()),
                (1, 1, 2, f.one()),
            ],
            vec![(0, f.one())],
        )
        .unwrap()
    }

    #[test]
    fn category_algebra_arrow_category() {
        // two objects, one arrow x -> y: upper-triangular 3-dim algebra
        let f = Field::prime(3).unwrap();
        let mut hom_basis = BTreeMap::new();
        hom_basis.insert((0, 0), vec!["id_x".to_string()]);
        hom_basis.insert((1, 1), vec!["id_y".to_string()]);
        hom_basis.insert((0, 1), vec!["a".to_string()]);
        let mut identities = BTreeMap::new();
        identities.insert(0, 0);
        identities.insert(1, 0);
        let compose = vec![
            ((0, 0, 0), (0, 0, 0), vec![(0, f.one())]), // id_x id_x
            ((1, 1, 0), (1, 1, 0), vec![(0, f.one())]), // id_y id_y
            ((0, 1, 0), (0, 0, 0), vec![(0, f.one())]), // a . id_x = a
            ((1, 1, 0), (0, 1, 0), vec![(0, f.one())]), // id_y . a = a
        ];
        let pres = CategoryPresentation { field: f, objects: 2, hom_basis, identities, compose };
        let ca = category_algebra(&pres).unwrap();
        assert_eq!(ca.algebra.total_dim(), 3);
        assert_eq!(ca.idempotents.len(), 2);
        // orthogonal idempotents summing to 1, by multiplication
        let pres_back = &ca.algebra;
        let unit = pres_back.unit_column();
        let mut sum = Matrix::zeros(f, unit.rows, 1);
        for &g in &ca.idempotents {
            let (_, p) = pres_back.index().split(g);
            sum.set(p, 0, f.add(sum.get(p, 0), &f.one()));
        }
        assert_eq!(sum, unit);
    }

    #[test]
    fn unknown_catalog_name_rejected() {
        assert!(builtin_catalog("nope(2)").is_err());
        assert!(builtin_catalog("dual_numbers(4)").is_err());
    }
}
