//! Exact-rational derivation of the diffusive (`a = 0`) projection vectors
//! as a power series in the coupling `gamma`, and an order-by-order checker.
//!
//! Everything is computed for one representative element `j`; the other
//! projection vectors are its periodic translates.

use std::fmt;

use num_rational::BigRational;
use serde_json::{json, Value};

use crate::error::{HolifdError, Result};
use crate::polyfield::{JsonScalar, PiecewiseField, Polynomial};
use crate::scalar::{format_rational, Scalar};
use crate::subgrid::tangent_vector_generic;

type Q = BigRational;
type Field = PiecewiseField<Q>;

/// Number of elements of the periodic lattice used for derivations.
pub const DERIVATION_ELEMENTS: usize = 16;

/// Highest order available without the stretch flag.
pub const SUPPORTED_ORDER: usize = 2;

/// Diffusive adjoint problem: `J^dagger z = z_xx`, dual operator
/// `D z = z_t + J^dagger z` with `z_t = 0`, and at every edge the adjoint
/// conditions `[z_x] = 0` and `(1 - gamma) h mean(z_x) = gamma [z]`.
#[derive(Clone, Debug, PartialEq)]
pub struct AdjointProblem {
    m: usize,
    h: Q,
}

impl AdjointProblem {
    pub fn new(m: usize, h: Q) -> Result<Self> {
        if m < 8 {
            return Err(HolifdError::InvalidConfig(format!("derivation lattice needs at least 8 elements, got {m}")));
        }
        if h <= Q::zero() {
            return Err(HolifdError::InvalidConfig("element width must be positive".into()));
        }
        Ok(Self { m, h })
    }

    pub fn diffusive() -> Self {
        Self { m: DERIVATION_ELEMENTS, h: Q::one() }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn h(&self) -> &Q {
        &self.h
    }

    /// The representative element.
    pub fn centre(&self) -> usize {
        self.m / 2
    }

    pub fn adjoint(&self, z: &Field) -> Field {
        z.diff().diff()
    }

    pub fn dual(&self, z: &Field) -> Field {
        self.adjoint(z)
    }

    /// `[z_x]` at the edge between `edge` and `edge + 1`.
    pub fn flux_jump(&self, z: &Field, edge: usize) -> Q {
        z.diff().jump(edge)
    }

    /// `(1 - gamma) h mean(z_x) - gamma [z]` at the edge between `edge` and `edge + 1`.
    pub fn coupling_defect(&self, z: &Field, edge: usize, gamma: &Q) -> Q {
        (Q::one() - gamma.clone()) * self.h.clone() * z.diff().mean(edge) - gamma.clone() * z.jump(edge)
    }

    fn offset(&self, i: usize) -> i64 {
        let m = self.m as i64;
        let d = (i as i64 - self.centre() as i64).rem_euclid(m);
        if d >= m / 2 {
            d - m
        } else {
            d
        }
    }

    fn element(&self, offset: i64) -> usize {
        (self.centre() as i64 + offset).rem_euclid(self.m as i64) as usize
    }

    fn zero_field(&self) -> Field {
        Field::new(self.m, self.h.clone())
    }
}

/// Tangent vector of the representative element expanded in `gamma`:
/// `e_j = sum_n gamma^n e^(n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentSeries {
    problem: AdjointProblem,
    terms: Vec<Field>,
}

impl TangentSeries {
    pub fn new(problem: AdjointProblem, terms: Vec<Field>) -> Self {
        Self { problem, terms }
    }

    /// Expands the subgrid tangent vector at the zero state in `gamma`.
    /// It is affine in `gamma`, which is checked at `gamma = 1/2`.
    pub fn from_subgrid(problem: AdjointProblem) -> Result<Self> {
        let u = vec![Q::zero(); problem.m];
        let (j, h, a) = (problem.centre(), problem.h.clone(), Q::zero());
        let at = |g: Q| tangent_vector_generic(&u, j, &a, &g, &h);
        let e0 = at(Q::zero());
        let e1 = at(Q::one()).sub(&e0)?;
        let half = Q::from_ratio(1, 2);
        if at(half.clone()) != e0.add(&e1.scale(&half))? {
            return Err(HolifdError::Derivation {
                order: 1,
                constraint: "tangent vector is not affine in gamma".into(),
            });
        }
        Ok(Self { problem, terms: vec![e0, e1] })
    }

    pub fn problem(&self) -> &AdjointProblem {
        &self.problem
    }

    pub fn terms(&self) -> &[Field] {
        &self.terms
    }

    /// `e^(n)` of element `centre + offset`; zero beyond the stored terms.
    pub fn translate(&self, n: usize, offset: i64) -> Field {
        self.terms.get(n).map(|t| t.shift(offset)).unwrap_or_else(|| self.problem.zero_field())
    }
}

/// Projection vector of the representative element as `sum_n gamma^n z^(n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaSeries {
    problem: AdjointProblem,
    terms: Vec<Field>,
}

impl GammaSeries {
    pub fn new(problem: AdjointProblem, terms: Vec<Field>) -> Self {
        Self { problem, terms }
    }

    /// The closed-form three-point series `chi_j + gamma z^(1)`.
    pub fn closed_form_order_two(problem: AdjointProblem) -> Self {
        let q = |p: i64, d: i64| Q::from_ratio(p, d);
        let c = problem.centre();
        let mut z1 = problem.zero_field();
        z1.set_piece(c, Polynomial::from_coeffs_unchecked(vec![q(1, 6), q(0, 1), q(-1, 1)]));
        z1.set_piece(problem.element(-1), Polynomial::from_coeffs_unchecked(vec![q(-1, 12), q(1, 2), q(1, 2)]));
        z1.set_piece(problem.element(1), Polynomial::from_coeffs_unchecked(vec![q(-1, 12), q(-1, 2), q(1, 2)]));
        let z0 = Field::characteristic(problem.m, problem.h.clone(), c);
        Self { problem, terms: vec![z0, z1] }
    }

    pub fn problem(&self) -> &AdjointProblem {
        &self.problem
    }

    /// Number of terms, i.e. the truncation order `l` with errors `O(gamma^l)`.
    pub fn order(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[Field] {
        &self.terms
    }

    pub fn term(&self, n: usize) -> Option<&Field> {
        self.terms.get(n)
    }

    pub fn term_or_zero(&self, n: usize) -> Field {
        self.terms.get(n).cloned().unwrap_or_else(|| self.problem.zero_field())
    }

    /// `z^(n)` of element `centre + offset`.
    pub fn translate(&self, n: usize, offset: i64) -> Field {
        self.term_or_zero(n).shift(offset)
    }

    pub fn evaluate(&self, gamma: &Q) -> Field {
        self.terms
            .iter()
            .rev()
            .fold(self.problem.zero_field(), |acc, t| acc.scale(gamma).add(t).expect("same lattice"))
    }

    /// Piece of `z^(n)` on element `centre + offset`.
    pub fn piece(&self, n: usize, offset: i64) -> Polynomial<Q> {
        self.term_or_zero(n).piece_or_zero(self.problem.element(offset))
    }

    pub fn to_json(&self) -> Value {
        let c = Some(self.problem.centre());
        json!({
            "order": self.order(),
            "h": self.problem.h.to_json(),
            "terms": self.terms.iter().map(|t| t.to_json_relative(c)).collect::<Vec<_>>(),
            "gamma_one": self.evaluate(&Q::one()).to_json_relative(c),
        })
    }

    /// Rows `order, offset, c0, c1, ...` of every nonzero piece, followed by
    /// the sum at `gamma = 1`.
    pub fn coefficient_table(&self) -> String {
        let mut rows: Vec<(String, i64, Vec<String>)> = Vec::new();
        let fmt_piece = |p: &Polynomial<Q>| p.coeffs().iter().map(format_rational).collect::<Vec<_>>();
        for (n, t) in self.terms.iter().enumerate() {
            for (j, p) in t.pieces() {
                rows.push((n.to_string(), self.problem.offset(j), fmt_piece(p)));
            }
        }
        for (j, p) in self.evaluate(&Q::one()).pieces() {
            rows.push(("sum".into(), self.problem.offset(j), fmt_piece(p)));
        }
        rows.sort_by_key(|(n, k, _)| (n == "sum", n.clone(), *k));
        let width = rows.iter().map(|r| r.2.len()).max().unwrap_or(1);
        let mut out = format!("{:<6}{:>7}", "order", "offset");
        for d in 0..width {
            out += &format!("{:>12}", format!("xi^{d}"));
        }
        out.push('\n');
        for (n, k, coeffs) in rows {
            out += &format!("{n:<6}{k:>7}");
            for d in 0..width {
                out += &format!("{:>12}", coeffs.get(d).map(String::as_str).unwrap_or("0"));
            }
            out.push('\n');
        }
        out
    }

    /// Samples the partial sums `z^(0) + ... + z^(n)` at `gamma = 1` over
    /// the support, one column per truncation. Rows are `(x - x_j) / h`
    /// followed by the column values.
    pub fn figure_data(&self, samples_per_element: usize) -> Vec<Vec<f64>> {
        let reach = self.order() as i64;
        let mut partial = self.problem.zero_field();
        let sums: Vec<PiecewiseField<f64>> = self
            .terms
            .iter()
            .map(|t| {
                partial = partial.add(t).expect("same lattice");
                partial.to_f64()
            })
            .collect();
        let mut rows = Vec::new();
        for k in -reach..=reach {
            let j = self.problem.element(k);
            for i in 0..=samples_per_element {
                let xi = -0.5 + i as f64 / samples_per_element as f64;
                let mut row = vec![k as f64 + xi];
                row.extend(sums.iter().map(|s| s.piece(j).map(|p| p.eval(&xi)).unwrap_or(0.0)));
                rows.push(row);
            }
        }
        rows
    }
}

/// Derives the projection-vector series through `gamma^(order - 1)`.
pub fn derive_projectors(order: usize, e: &TangentSeries) -> Result<GammaSeries> {
    derive_projectors_with(order, e, false)
}

/// As [`derive_projectors`]; `allow_stretch` unlocks `order = 3`
/// (five-element stencil), which has no closed form to compare against.
pub fn derive_projectors_with(order: usize, e: &TangentSeries, allow_stretch: bool) -> Result<GammaSeries> {
    let cap = if allow_stretch { SUPPORTED_ORDER + 1 } else { SUPPORTED_ORDER };
    if order == 0 || order > cap {
        return Err(HolifdError::InvalidConfig(format!("derivation order must be in 1..={cap}, got {order}")));
    }
    let problem = e.problem.clone();
    let z0 = Field::characteristic(problem.m, problem.h.clone(), problem.centre());
    let mut series = GammaSeries::new(problem, vec![z0]);
    for n in 1..order {
        let next = solve_order(&series, e, n)?;
        series.terms.push(next);
    }
    Ok(series)
}

/// `sum_{p+q+r=n, p<n} sum_i <D z^(p), e_i^(q)> z_i^(r)`, the part of the
/// order-`n` dual equation that does not involve `z^(n)`.
fn forcing(series: &GammaSeries, e: &TangentSeries, n: usize) -> Result<Field> {
    let problem = &series.problem;
    let mut total = problem.zero_field();
    for p in 0..n {
        let dz = problem.dual(&series.term_or_zero(p));
        if dz.is_zero() {
            continue;
        }
        for q in 0..=(n - p) {
            let r = n - p - q;
            if r == n {
                continue;
            }
            for i in 0..problem.m {
                let offset = problem.offset(i);
                let c = dz.inner(&e.translate(q, offset))?;
                if !c.is_zero() {
                    total = total.add(&series.translate(r, offset).scale(&c))?;
                }
            }
        }
    }
    Ok(total)
}

fn coupling_order_defect(problem: &AdjointProblem, previous: &Field, current: &Field, edge: usize) -> Q {
    let h = problem.h.clone();
    previous.jump(edge) - (h.clone() * current.diff().mean(edge) - h * previous.diff().mean(edge))
}

/// `sum_{p+q=n} <z^(p), e_i^(q)> - delta_{n0} delta_{ij}` with `z^(n)` replaced by `current`.
fn normalisation_order_defect(
    series: &GammaSeries,
    e: &TangentSeries,
    n: usize,
    current: &Field,
    offset: i64,
) -> Result<Q> {
    let mut acc = current.inner(&e.translate(0, offset))?;
    for p in 0..n {
        acc += series.term_or_zero(p).inner(&e.translate(n - p, offset))?;
    }
    if n == 0 && offset == 0 {
        acc -= Q::one();
    }
    Ok(acc)
}

struct Row {
    coeffs: Vec<Q>,
    constant: Q,
    label: String,
}

/// Solves `sum_k coeffs_k x_k + constant = 0` exactly. Free unknowns are set
/// to zero; an inconsistent row is reported by its label.
fn solve_exact(rows: Vec<Row>, unknowns: usize) -> std::result::Result<Vec<Q>, String> {
    let mut pivots: Vec<(usize, Row)> = Vec::new();
    for mut row in rows {
        for (col, prow) in &pivots {
            let f = row.coeffs[*col].clone();
            if f.is_zero() {
                continue;
            }
            for k in 0..unknowns {
                row.coeffs[k] = row.coeffs[k].clone() - f.clone() * prow.coeffs[k].clone();
            }
            row.constant = row.constant.clone() - f * prow.constant.clone();
        }
        let Some(col) = row.coeffs.iter().position(|c| !c.is_zero()) else {
            if !row.constant.is_zero() {
                return Err(row.label);
            }
            continue;
        };
        let inv = Q::one() / row.coeffs[col].clone();
        row.coeffs.iter_mut().for_each(|c| *c = c.clone() * inv.clone());
        row.constant = row.constant.clone() * inv;
        for (_, prow) in pivots.iter_mut() {
            let f = prow.coeffs[col].clone();
            if f.is_zero() {
                continue;
            }
            for k in 0..unknowns {
                prow.coeffs[k] = prow.coeffs[k].clone() - f.clone() * row.coeffs[k].clone();
            }
            prow.constant = prow.constant.clone() - f * row.constant.clone();
        }
        pivots.push((col, row));
    }
    let mut x = vec![Q::zero(); unknowns];
    for (col, row) in pivots {
        x[col] = -row.constant;
    }
    Ok(x)
}

fn solve_order(series: &GammaSeries, e: &TangentSeries, n: usize) -> Result<Field> {
    let problem = &series.problem;
    let fail = |constraint: String| HolifdError::Derivation { order: n, constraint };
    let f = forcing(series, e, n)?;
    for (j, p) in f.pieces() {
        let offset = problem.offset(j);
        if offset.unsigned_abs() as usize > n {
            return Err(fail(format!("forcing reaches element offset {offset} outside the stencil")));
        }
        if !p.integral().is_zero() {
            return Err(fail(format!("solvability: forcing has nonzero average on element offset {offset}")));
        }
    }

    let h2 = problem.h.clone() * problem.h.clone();
    let mut particular = problem.zero_field();
    for (j, p) in f.pieces() {
        particular.set_piece(j, p.antiderivative().antiderivative().scale(&h2));
    }
    let elements: Vec<usize> = (-(n as i64)..=n as i64).map(|k| problem.element(k)).collect();
    let basis: Vec<Field> = elements
        .iter()
        .flat_map(|&j| {
            (0..3).map(move |d| {
                let mut b = problem.zero_field();
                b.set_piece(j, Polynomial::monomial(Q::one(), d));
                b
            })
        })
        .collect();

    let previous = series.term_or_zero(n - 1);
    let zero = problem.zero_field();
    let mut rows = Vec::new();
    let mut push = |label: String, functional: &dyn Fn(&Field) -> Result<Q>| -> Result<()> {
        let base = functional(&zero)?;
        let constant = functional(&particular)?;
        let coeffs = basis.iter().map(|b| Ok(functional(b)? - base.clone())).collect::<Result<Vec<_>>>()?;
        rows.push(Row { coeffs, constant, label });
        Ok(())
    };
    for edge in 0..problem.m {
        let k = problem.offset(edge);
        push(format!("flux continuity at edge {k}|{}", k + 1), &|w| Ok(problem.flux_jump(w, edge)))?;
        push(format!("coupling condition at edge {k}|{}", k + 1), &|w| {
            Ok(coupling_order_defect(problem, &previous, w, edge))
        })?;
    }
    for i in 0..problem.m {
        let k = problem.offset(i);
        push(format!("normalisation against e at offset {k}"), &|w| {
            normalisation_order_defect(series, e, n, w, k)
        })?;
    }
    let x = solve_exact(rows, basis.len()).map_err(fail)?;

    let mut z = particular;
    for (b, c) in basis.iter().zip(&x) {
        if !c.is_zero() {
            z = z.add(&b.scale(c))?;
        }
    }
    let mut candidate = series.clone();
    candidate.terms.push(z.clone());
    if let Some(k) = (0..problem.m).find(|&i| !dual_residual(&candidate, e, n, i).map(|p| p.is_zero()).unwrap_or(false)) {
        return Err(fail(format!("dual equation not satisfied on element offset {}", problem.offset(k))));
    }
    Ok(z)
}

/// Order-`n` piece on element `i` of `D z - sum_i <D z, e_i> z_i`.
fn dual_residual(series: &GammaSeries, e: &TangentSeries, n: usize, element: usize) -> Result<Polynomial<Q>> {
    let problem = &series.problem;
    let own = problem.dual(&series.term_or_zero(n));
    let lowest = problem.dual(&series.term_or_zero(0));
    let mut total = forcing(series, e, n)?;
    for i in 0..problem.m {
        let offset = problem.offset(i);
        let c = own.inner(&e.translate(0, offset))?;
        if !c.is_zero() {
            total = total.add(&series.translate(0, offset).scale(&c))?;
        }
        if n > 0 {
            let c = lowest.inner(&e.translate(0, offset))?;
            if !c.is_zero() {
                total = total.add(&series.translate(n, offset).scale(&c))?;
            }
        }
    }
    Ok(own.piece_or_zero(element).sub(&total.piece_or_zero(element)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CheckKind {
    /// `[z^(n)_x]` at an edge.
    FluxJump,
    /// `[z^(n-1)] - h mean(z^(n)_x) + h mean(z^(n-1)_x)` at an edge.
    Coupling,
    /// `sum_{p+q=n} <z^(p), e_i^(q)> - delta` against one tangent vector.
    Normalisation,
    /// Order-`n` piece of the projected dual residual on one element.
    DualResidual,
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CheckKind::FluxJump => "flux jump",
            CheckKind::Coupling => "coupling",
            CheckKind::Normalisation => "normalisation",
            CheckKind::DualResidual => "dual residual",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Defect {
    Scalar(Q),
    Polynomial(Polynomial<Q>),
}

impl Defect {
    pub fn is_zero(&self) -> bool {
        match self {
            Defect::Scalar(q) => q.is_zero(),
            Defect::Polynomial(p) => p.is_zero(),
        }
    }

    pub fn as_scalar(&self) -> Option<&Q> {
        match self {
            Defect::Scalar(q) => Some(q),
            Defect::Polynomial(_) => None,
        }
    }
}

impl fmt::Display for Defect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Defect::Scalar(q) => f.write_str(&format_rational(q)),
            Defect::Polynomial(p) => {
                let terms: Vec<String> = p
                    .coeffs()
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(k, c)| format!("({}) xi^{k}", format_rational(c)))
                    .collect();
                f.write_str(&terms.join(" + "))
            }
        }
    }
}

/// One check. `location` is an element offset from `j`, or for edge checks
/// the offset of the element to the left of the edge.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckEntry {
    pub order: usize,
    pub kind: CheckKind,
    pub location: i64,
    pub defect: Defect,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerificationReport {
    entries: Vec<CheckEntry>,
}

impl VerificationReport {
    pub fn entries(&self) -> &[CheckEntry] {
        &self.entries
    }

    pub fn defects(&self) -> impl Iterator<Item = &CheckEntry> {
        self.entries.iter().filter(|c| !c.defect.is_zero())
    }

    pub fn is_exact(&self) -> bool {
        self.defects().next().is_none()
    }

    pub fn get(&self, order: usize, kind: CheckKind, location: i64) -> Option<&Defect> {
        self.entries
            .iter()
            .find(|c| c.order == order && c.kind == kind && c.location == location)
            .map(|c| &c.defect)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            return writeln!(f, "all {} checks exact", self.entries.len());
        }
        for c in self.defects() {
            writeln!(f, "order {} {} at {}: {}", c.order, c.kind, c.location, c.defect)?;
        }
        Ok(())
    }
}

/// Checks the series order by order through `gamma^max_order`; terms
/// beyond those stored count as zero.
pub fn verify_projector(z: &GammaSeries, e: &TangentSeries, max_order: usize) -> Result<VerificationReport> {
    let problem = &z.problem;
    let mut entries = Vec::new();
    for n in 0..=max_order {
        let current = z.term_or_zero(n);
        let previous = if n == 0 { problem.zero_field() } else { z.term_or_zero(n - 1) };
        for edge in 0..problem.m {
            let location = problem.offset(edge);
            entries.push(CheckEntry {
                order: n,
                kind: CheckKind::FluxJump,
                location,
                defect: Defect::Scalar(problem.flux_jump(&current, edge)),
            });
            entries.push(CheckEntry {
                order: n,
                kind: CheckKind::Coupling,
                location,
                defect: Defect::Scalar(coupling_order_defect(problem, &previous, &current, edge)),
            });
        }
        for i in 0..problem.m {
            let location = problem.offset(i);
            entries.push(CheckEntry {
                order: n,
                kind: CheckKind::Normalisation,
                location,
                defect: Defect::Scalar(normalisation_order_defect(z, e, n, &current, location)?),
            });
        }
        for i in 0..problem.m {
            entries.push(CheckEntry {
                order: n,
                kind: CheckKind::DualResidual,
                location: problem.offset(i),
                defect: Defect::Polynomial(dual_residual(z, e, n, i)?),
            });
        }
    }
    entries.sort_by_key(|c| (c.order, c.kind, c.location));
    Ok(VerificationReport { entries })
}
