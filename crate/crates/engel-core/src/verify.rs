//! Structured check drivers behind the command-line workbench.
//!
//! Every driver re-runs one verification family and returns a
//! [`CheckReport`]: named computed values, the applied tolerance, and a
//! pass / flag / fail outcome per entry.  Flags mark findings that are
//! reported rather than gated (contested table cells, the adjudicated
//! inversion constant); failures are reserved for broken identities.
//!
//! The drivers are deterministic: all randomness comes from the seeded
//! generator in [`VerifyConfig`], and parallel work is reduced in a fixed
//! order, so serializing the same report twice gives identical bytes.

use nalgebra::DVector;
use num_complex::Complex;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::deltaops::{delta_table, DeltaOps, DeltaPath};
use crate::error::{Error, Result};
use crate::fields::{
    in_generator_span, left_invariant_generators, right_invariant_generators, verify_gradation,
    verify_left_invariance, verify_right_invariance, PolyDiffOp,
};
use crate::gauss4::GaussPoly4;
use crate::gft::{plancherel_ratio, GroupFourier};
use crate::grid::Grid1D;
use crate::group::{jacobian_left_translation, GroupElement};
use crate::heisenberg::{weyl_quantize, weyl_roundtrip_check, LambdaSymbol};
use crate::operator::GridOperator;
use crate::poly::Poly4;
use crate::quad::panel_rule;
use crate::rep::{one_parameter_subgroup, RepParams};
use crate::scalar::Scalar;
use crate::symbols::{quantize, quantize_composed, seminorm, QuadratureSpec, SeminormSpec, SymbolField};
use crate::wavepacket::Wavepacket;
use crate::Rational;

type C = Complex<f64>;

/// Per-entry verdict.  `Flag` marks a reported (non-gating) finding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Flag,
    Fail,
}

/// One labeled number inside an entry.
#[derive(Clone, Debug, Serialize)]
pub struct NamedValue {
    pub name: String,
    pub value: f64,
}

/// One verified identity (or reported finding) inside a check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckEntry {
    pub name: String,
    /// The mathematical identity or quantity the entry verifies.
    pub reference: String,
    pub computed: Vec<NamedValue>,
    pub tolerance: f64,
    pub outcome: Outcome,
    pub note: String,
}

/// Report of one check: the worst entry outcome wins.
#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub outcome: Outcome,
    pub entries: Vec<CheckEntry>,
}

/// Tabular side output (per-panel contributions, seminorm samples, ...).
#[derive(Clone, Debug)]
pub struct CsvTable {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// A check report together with its optional tables.
#[derive(Clone, Debug)]
pub struct CheckOutput {
    pub report: CheckReport,
    pub tables: Vec<CsvTable>,
}

/// Per-check tolerance overrides; `None` keeps the documented default.
#[derive(Clone, Debug, Default)]
pub struct Tolerances {
    pub group: Option<f64>,
    pub fields: Option<f64>,
    pub rep: Option<f64>,
    pub gft: Option<f64>,
    pub plancherel: Option<f64>,
    pub diffops: Option<f64>,
    pub delta_table: Option<f64>,
    pub seminorm: Option<f64>,
    pub quantize: Option<f64>,
    pub heisenberg: Option<f64>,
}

/// Shared configuration for all drivers.
#[derive(Clone, Debug)]
pub struct VerifyConfig {
    /// Grid size for the transform comparisons (floor 256 where a check
    /// needs that resolution).
    pub grid_n: usize,
    /// Grid half-width.
    pub grid_l: f64,
    /// Smallest `|lambda|` drawn when sampling representation parameters.
    pub lambda_min: f64,
    /// `|lambda|` cap for the quantization quadrature and parameter samples.
    pub lambda_max: f64,
    /// `|mu|` cap for sampled representation parameters.
    pub mu_max: f64,
    /// Panels per half-axis in `lambda` quadratures.
    pub panels: usize,
    /// Seed for every randomized sample set.
    pub seed: u64,
    pub tol: Tolerances,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            grid_n: 256,
            grid_l: 12.0,
            lambda_min: 0.3,
            lambda_max: 8.0,
            mu_max: 2.0,
            panels: 6,
            seed: 7,
            tol: Tolerances::default(),
        }
    }
}

/// Names accepted by [`run_check`], in the canonical execution order.
pub const CHECK_NAMES: [&str; 10] = [
    "verify-group",
    "verify-fields",
    "rep-check",
    "gft-check",
    "plancherel",
    "diffops",
    "delta-table",
    "seminorm",
    "quantize-check",
    "heisenberg-check",
];

/// Dispatches one check by its command name.
pub fn run_check(name: &str, cfg: &VerifyConfig) -> Result<CheckOutput> {
    match name {
        "verify-group" => group_check(cfg),
        "verify-fields" => fields_check(cfg),
        "rep-check" => rep_check(cfg),
        "gft-check" => gft_check(cfg),
        "plancherel" => plancherel_check(cfg),
        "diffops" => diffops_check(cfg),
        "delta-table" => delta_table_check(cfg),
        "seminorm" => seminorm_check(cfg),
        "quantize-check" => quantize_check(cfg),
        "heisenberg-check" => heisenberg_check(cfg),
        other => Err(Error::InvalidConfig(format!("unknown check `{other}`"))),
    }
}

fn nv(name: &str, value: f64) -> NamedValue {
    NamedValue {
        name: name.into(),
        value,
    }
}

fn gate(residual: f64, tolerance: f64) -> Outcome {
    if residual.is_finite() && residual <= tolerance {
        Outcome::Pass
    } else {
        Outcome::Fail
    }
}

fn entry(
    name: &str,
    reference: &str,
    computed: Vec<NamedValue>,
    tolerance: f64,
    outcome: Outcome,
    note: impl Into<String>,
) -> CheckEntry {
    CheckEntry {
        name: name.into(),
        reference: reference.into(),
        computed,
        tolerance,
        outcome,
        note: note.into(),
    }
}

fn finish(check: &str, entries: Vec<CheckEntry>, tables: Vec<CsvTable>) -> CheckOutput {
    let outcome = entries
        .iter()
        .map(|e| e.outcome)
        .max()
        .unwrap_or(Outcome::Pass);
    CheckOutput {
        report: CheckReport {
            check: check.into(),
            outcome,
            entries,
        },
        tables,
    }
}

// ---------------------------------------------------------------------------
// verify-group: exact rational group algebra
// ---------------------------------------------------------------------------

fn rational_points() -> Vec<GroupElement<Rational>> {
    vec![
        GroupElement::identity(),
        GroupElement::from_ratios([(1, 2), (-2, 3), (3, 7), (-1, 5)]),
        GroupElement::from_ratios([(-5, 4), (7, 6), (0, 1), (2, 9)]),
        GroupElement::from_ratios([(3, 1), (-1, 8), (-4, 3), (5, 2)]),
        GroupElement::from_ratios([(0, 1), (9, 5), (1, 6), (-7, 4)]),
    ]
}

fn q_gap(a: &GroupElement<Rational>, b: &GroupElement<Rational>) -> f64 {
    let mut worst = Rational::zero();
    for k in 0..4 {
        let d = (&a.coords[k] - &b.coords[k]).abs();
        if d > worst {
            worst = d;
        }
    }
    worst.to_f64().unwrap_or(f64::INFINITY)
}

/// Group axioms, translation Jacobians and dilations in exact arithmetic.
pub fn group_check(cfg: &VerifyConfig) -> Result<CheckOutput> {
    let tol = cfg.tol.group.unwrap_or(0.0);
    let points = rational_points();
    let e = GroupElement::<Rational>::identity();
    let mut entries = Vec::new();

    let mut assoc = 0.0f64;
    for x in &points {
        for y in &points {
            for z in &points {
                let left = x.multiply(y).multiply(z);
                let right = x.multiply(&y.multiply(z));
                assoc = assoc.max(q_gap(&left, &right));
            }
        }
    }
    entries.push(entry(
        "associativity",
        "(x o y) o z = x o (y o z) for the polynomial group law",
        vec![nv("max_residual", assoc), nv("triples", points.len().pow(3) as f64)],
        tol,
        gate(assoc, tol),
        "exact rational arithmetic, zero tolerance",
    ));

    let mut ident = 0.0f64;
    for x in &points {
        ident = ident.max(q_gap(&e.multiply(x), x));
        ident = ident.max(q_gap(&x.multiply(&e), x));
    }
    entries.push(entry(
        "identity-element",
        "the origin is a two-sided identity",
        vec![nv("max_residual", ident)],
        tol,
        gate(ident, tol),
        "",
    ));

    let mut inv = 0.0f64;
    for x in &points {
        inv = inv.max(q_gap(&x.multiply(&x.inverse()), &e));
        inv = inv.max(q_gap(&x.inverse().multiply(x), &e));
    }
    entries.push(entry(
        "inverses",
        "x o x^{-1} = x^{-1} o x = identity",
        vec![nv("max_residual", inv)],
        tol,
        gate(inv, tol),
        "",
    ));

    // The group law is affine in the right factor; its Jacobian is unit
    // lower triangular, so both Haar measures are the Lebesgue measure.
    let mut affine = 0.0f64;
    let mut shape = 0.0f64;
    for x in &points {
        let m = jacobian_left_translation(x);
        for (i, row) in m.iter().enumerate() {
            for (j, mij) in row.iter().enumerate() {
                if (j > i && !mij.is_zero()) || (j == i && !(mij - Rational::from_int(1)).is_zero())
                {
                    shape = 1.0;
                }
            }
        }
        for y in &points {
            let prod = x.multiply(y);
            for i in 0..4 {
                let mut expect = x.coords[i].clone();
                for j in 0..4 {
                    expect = expect + &m[i][j] * &y.coords[j];
                }
                affine = affine.max((&prod.coords[i] - &expect).abs().to_f64().unwrap_or(f64::INFINITY));
            }
        }
    }
    entries.push(entry(
        "translation-jacobian",
        "x o y is affine in y with unit lower-triangular Jacobian (unimodularity)",
        vec![nv("max_affine_residual", affine), nv("triangularity_defect", shape)],
        tol,
        gate(affine.max(shape), tol),
        "determinant one by triangular shape; Haar measure = Lebesgue measure",
    ));

    let ratios = [
        Rational::from_ratio(2, 1),
        Rational::from_ratio(1, 2),
        Rational::from_ratio(3, 5),
    ];
    let mut dil = 0.0f64;
    let mut tower = 0.0f64;
    for r in &ratios {
        for x in &points {
            for y in &points {
                dil = dil.max(q_gap(
                    &x.multiply(y).dilate(r),
                    &x.dilate(r).multiply(&y.dilate(r)),
                ));
            }
            for s in &ratios {
                tower = tower.max(q_gap(&x.dilate(r).dilate(s), &x.dilate(&(r * s))));
            }
        }
    }
    entries.push(entry(
        "dilations",
        "coordinate dilations with weights (1, 1, 2, 3) are automorphisms",
        vec![nv("max_homomorphism_residual", dil), nv("max_semigroup_residual", tower)],
        tol,
        gate(dil.max(tower), tol),
        "",
    ));

    Ok(finish("verify-group", entries, Vec::new()))
}

// ---------------------------------------------------------------------------
// verify-fields: exact vector-field algebra
// ---------------------------------------------------------------------------

/// Invariance, bracket table, gradation and the lower central series, all as
/// polynomial identities over the rationals.
pub fn fields_check(cfg: &VerifyConfig) -> Result<CheckOutput> {
    let tol = cfg.tol.fields.unwrap_or(0.0);
    let lefts = left_invariant_generators::<Rational>();
    let rights = right_invariant_generators::<Rational>();
    let mut entries = Vec::new();

    let embed = |e: crate::fields::FieldError| Error::InvalidConfig(e.to_string());
    let mut left_bad = 0.0f64;
    for op in &lefts {
        if !verify_left_invariance(op).map_err(embed)?.is_invariant() {
            left_bad += 1.0;
        }
    }
    entries.push(entry(
        "left-invariance",
        "X_1..X_4 commute with all left translations",
        vec![nv("non_invariant_fields", left_bad)],
        tol,
        gate(left_bad, tol),
        "coefficient polynomials compared against the push-forward identity",
    ));

    let mut right_bad = 0.0f64;
    for op in &rights {
        if !verify_right_invariance(op).map_err(embed)?.is_invariant() {
            right_bad += 1.0;
        }
    }
    entries.push(entry(
        "right-invariance",
        "the mirrored generators commute with all right translations",
        vec![nv("non_invariant_fields", right_bad)],
        tol,
        gate(right_bad, tol),
        "",
    ));

    // Bracket table: [X1, X2] = X3 and [X1, X3] = X4 are the only nonzero
    // generator brackets; left- and right-invariant fields always commute.
    let minus_one = Rational::from_int(-1);
    let mut table_defects = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            let br = lefts[i].bracket(&lefts[j]);
            let want: PolyDiffOp<Rational> = match (i, j) {
                (0, 1) => lefts[2].clone(),
                (1, 0) => lefts[2].scale(&minus_one),
                (0, 2) => lefts[3].clone(),
                (2, 0) => lefts[3].scale(&minus_one),
                _ => PolyDiffOp::new(),
            };
            if br != want {
                table_defects += 1.0;
            }
        }
    }
    let mut cross_defects = 0.0f64;
    for left in &lefts {
        for right in &rights {
            if !left.bracket(right).is_zero() {
                cross_defects += 1.0;
            }
        }
    }
    entries.push(entry(
        "bracket-table",
        "[X1, X2] = X3, [X1, X3] = X4, all other generator brackets vanish",
        vec![nv("table_defects", table_defects), nv("left_right_cross_defects", cross_defects)],
        tol,
        gate(table_defects.max(cross_defects), tol),
        "includes commutation of the left-invariant with the right-invariant frame",
    ));

    let grad = verify_gradation::<Rational>();
    let grad_defect = if grad.is_valid() { 0.0 } else { 1.0 };
    let mut computed = vec![
        nv("nilpotency_step", grad.step as f64),
        nv("hormander_rank", grad.hormander_rank as f64),
        nv("stratified", if grad.stratified { 1.0 } else { 0.0 }),
    ];
    for (k, dim) in grad.series_dims.iter().enumerate() {
        computed.push(nv(&format!("series_dim_{}", k + 1), *dim as f64));
    }
    entries.push(entry(
        "gradation",
        "lower central series has dimensions (4, 2, 1); strata bracket as [V_i, V_j] in V_{i+j}",
        computed,
        tol,
        gate(grad_defect, tol),
        "step-3 stratification; X_1, X_2 and their brackets span the algebra",
    ));

    // Every generator bracket stays inside the constant-coefficient span.
    let mut span_defects = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            if in_generator_span(&lefts[i].bracket(&lefts[j])).is_none() {
                span_defects += 1.0;
            }
        }
    }
    entries.push(entry(
        "bracket-closure",
        "generator brackets expand exactly in the X_1..X_4 basis",
        vec![nv("span_defects", span_defects)],
        tol,
        gate(span_defects, tol),
        "",
    ));

    Ok(finish("verify-fields", entries, Vec::new()))
}

// ---------------------------------------------------------------------------
// rep-check: representation homomorphism, unitarity, generators
// ---------------------------------------------------------------------------

/// Randomized closed-form audit of `pi_{lambda, mu}` plus the generator
/// consistency order check.
pub fn rep_check(cfg: &VerifyConfig) -> Result<CheckOutput> {
    let tol = cfg.tol.rep.unwrap_or(1e-10);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let lam_lo = cfg.lambda_min.max(0.05);
    let lam_hi = cfg.lambda_max.min(4.0).max(lam_lo + 0.5);
    let samples = 100usize;

    let mut hom = 0.0f64;
    let mut unit = 0.0f64;
    let mut adjoint = 0.0f64;
    for _ in 0..samples {
        let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        let lambda = sign * rng.gen_range(lam_lo..lam_hi);
        let mu = if cfg.mu_max > 0.0 {
            rng.gen_range(-cfg.mu_max..cfg.mu_max)
        } else {
            0.0
        };
        let pi = RepParams::new(lambda, mu)?;
        let mut rand4 = || -> [f64; 4] { std::array::from_fn(|_| rng.gen_range(-1.5..1.5)) };
        let x = GroupElement::new(rand4());
        let y = GroupElement::new(rand4());
        let center = rng.gen_range(-1.0..1.0);
        let h = Wavepacket::coherent(center, rng.gen_range(0.7..1.3), rng.gen_range(-1.5..1.5));
        let xy = x.multiply(&y);
        // Evaluate near the translated packet center, where the modulus is
        // of order one and the relative error is well conditioned.
        let u = center - xy.coords[0] + rng.gen_range(-0.5..0.5);
        let staged = pi.apply(&x, &pi.apply(&y, &h)).eval(u);
        let direct = pi.apply(&xy, &h).eval(u);
        hom = hom.max((staged - direct).norm() / direct.norm());

        let g = pi.apply(&x, &h);
        unit = unit.max((g.norm_sq() - h.norm_sq()).abs() / h.norm_sq());
        let k = Wavepacket::coherent(-0.2, 1.1, 0.4);
        let lhs = g.inner(&k);
        let rhs = h.inner(&pi.apply(&x.inverse(), &k));
        adjoint = adjoint.max((lhs - rhs).norm() / (h.norm_sq() * k.norm_sq()).sqrt());
    }
    let mut entries = vec![
        entry(
            "homomorphism",
            "pi(x) pi(y) = pi(x o y) pointwise on coherent packets",
            vec![nv("max_relative_residual", hom), nv("samples", samples as f64)],
            tol,
            gate(hom, tol),
            "seeded random parameters, group elements and evaluation points",
        ),
        entry(
            "unitarity",
            "norm preservation and the adjoint relation pi(x)^* = pi(x^{-1})",
            vec![nv("max_norm_residual", unit), nv("max_adjoint_residual", adjoint)],
            tol,
            gate(unit.max(adjoint), tol),
            "",
        ),
    ];

    // Consistency order of the generator finite differences: halving the
    // step must divide the error by about four.
    let grid = Grid1D::<f64>::new(128, 12.0);
    let pi = RepParams::new(1.4, -0.8)?;
    let h = Wavepacket::coherent(0.3, 0.9, -0.7);
    let mut ratio_dev = 0.0f64;
    let mut fine_err = 0.0f64;
    let mut computed = Vec::new();
    for i in 0..4 {
        let gen = pi.generator(&grid, i).apply(&h.sample(&grid));
        let err_at = |t: f64| {
            let plus = pi.apply(&one_parameter_subgroup(i, t), &h).sample(&grid);
            let minus = pi.apply(&one_parameter_subgroup(i, -t), &h).sample(&grid);
            let fd = (plus - minus) / C::new(2.0 * t, 0.0);
            (&fd - &gen).norm() / gen.norm()
        };
        let coarse = err_at(2e-3);
        let fine = err_at(1e-3);
        let ratio = coarse / fine;
        computed.push(nv(&format!("halving_ratio_X{}", i + 1), ratio));
        ratio_dev = ratio_dev.max((ratio - 4.0).abs());
        fine_err = fine_err.max(fine);
    }
    computed.push(nv("max_relative_error_at_1e-3", fine_err));
    entries.push(entry(
        "generator-consistency",
        "central differences of t -> pi(exp(t X_i)) converge to the stated generators at order two",
        computed,
        0.8,
        gate(ratio_dev, 0.8),
        "step-halving ratio must stay within 20 percent of four",
    ));

    let grid = Grid1D::<f64>::new(256, 14.0);
    let v = Wavepacket::coherent(0.3, 0.9, -0.7).sample(&grid);
    let d: Vec<GridOperator<f64>> = (0..4).map(|i| pi.generator(&grid, i)).collect();
    let c12 = d[1].commutator(&d[0])?.apply(&v);
    let r12 = (&c12 - &d[2].apply(&v)).norm() / v.norm();
    let c13 = d[2].commutator(&d[0])?.apply(&v);
    let r13 = (&c13 - &d[3].apply(&v)).norm() / v.norm();
    let bracket_res = r12.max(r13);
    entries.push(entry(
        "generator-brackets",
        "the infinitesimal generators reproduce the bracket table on localized vectors",
        vec![nv("x1_x2_residual", r12), nv("x1_x3_residual", r13)],
        1e-9,
        gate(bracket_res, 1e-9),
        "",
    ));

    Ok(finish("rep-check", entries, Vec::new()))
}

// ---------------------------------------------------------------------------
// gft-check: kernel, symbol and the defining group integral
// ---------------------------------------------------------------------------

fn gft_sample() -> GaussPoly4<f64> {
    GaussPoly4::product_gaussian(
        [
            C::new(0.5, 0.0),
            C::new(0.45, 0.0),
            C::new(0.55, 0.0),
            C::new(0.5, 0.0),
        ],
        [0.2, -0.1, 0.1, 0.0],
        [0.3, -0.2, 0.1, 0.2],
    )
}

/// Kernel and symbol realizations of `pi_{lambda, mu}(f)` against each other
/// and against the defining group integral.
pub fn gft_check(cfg: &VerifyConfig) -> Result<CheckOutput> {
    let tol = cfg.tol.gft.unwrap_or(1e-6);
    let f = gft_sample();
    let pins = [(1.0, 0.0), (2.0, 3.0), (-1.0, 1.0)];
    let mut entries = Vec::new();

    let grid = Grid1D::<f64>::new(cfg.grid_n.max(256), cfg.grid_l.max(14.0));
    let packet = Wavepacket::coherent(-0.4, 0.9, 0.7).sample(&grid);
    let mut worst_symbol = 0.0f64;
    let mut computed = Vec::new();
    for &(lambda, mu) in &pins {
        let gf = GroupFourier::new(&f, RepParams::new(lambda, mu)?);
        let a = gf.to_operator(&grid).apply(&packet);
        let b = gf.to_operator_via_symbol(&grid).apply(&packet);
        let gap = (&a - &b).norm() / a.norm();
        computed.push(nv(&format!("relative_gap_lambda_{lambda}_mu_{mu}"), gap));
        worst_symbol = worst_symbol.max(gap);
    }
    entries.push(entry(
        "symbol-vs-kernel",
        "the frequency-symbol realization equals the convolution-kernel realization",
        computed,
        tol,
        gate(worst_symbol, tol),
        format!("grid size {}, half-width {}", grid.len(), grid.half_width()),
    ));

    // Defining integral: pi(f) h (u) = int f(x) (pi(x^{-1}) h)(u) dx by
    // brute-force quadrature over the group, against the kernel's action.
    // Nine panels per axis: the inverse's phase oscillates at frequencies
    // up to lambda x_1^2 / 2 where f is still non-negligible.
    let rule = panel_rule(-9.0f64, 9.0, 9, 12);
    // The kernel side is one-dimensional and cheap; at lambda = 2 the
    // kernel varies on a scale of a few tenths, so use narrow panels.
    let vrule = panel_rule(-12.0f64, 12.0, 24, 12);
    let h = Wavepacket::coherent(0.2, 1.1, -0.6);
    let u = -0.8;
    let mut worst_int = 0.0f64;
    let mut computed = Vec::new();
    for &(lambda, mu) in &pins {
        let pi = RepParams::new(lambda, mu)?;
        let gf = GroupFourier::new(&f, pi);
        let partials: Vec<C> = rule
            .par_iter()
            .map(|&(x1, w1)| {
                let mut acc = C::new(0.0, 0.0);
                for &(x2, w2) in &rule {
                    for &(x3, w3) in &rule {
                        let mut inner = C::new(0.0, 0.0);
                        for &(x4, w4) in &rule {
                            let x = GroupElement::new([x1, x2, x3, x4]);
                            let value = pi.apply(&x.inverse(), &h).eval(u);
                            inner += f.eval([x1, x2, x3, x4]) * value * w4;
                        }
                        acc += inner * (w2 * w3);
                    }
                }
                acc * w1
            })
            .collect();
        let direct = partials.iter().fold(C::new(0.0, 0.0), |a, b| a + b);
        let mut through_kernel = C::new(0.0, 0.0);
        for &(v, w) in &vrule {
            through_kernel += gf.kernel(u, v) * h.eval(v) * w;
        }
        let diff = (direct - through_kernel).norm() / through_kernel.norm();
        computed.push(nv(&format!("relative_residual_lambda_{lambda}_mu_{mu}"), diff));
        worst_int = worst_int.max(diff);
    }
    entries.push(entry(
        "kernel-vs-group-integral",
        "the closed-form kernel action equals the defining integral of the transform",
        computed,
        tol,
        gate(worst_int, tol),
        "pins the first kernel slot (u - v), the frequency slots and the constant at once",
    ));

    let gf = GroupFourier::new(&f, RepParams::new(0.9, 0.4)?);
    let xirule = panel_rule(-40.0f64, 40.0, 20, 12);
    let mut worst_fourier = 0.0f64;
    for (u, v) in [(0.4, -0.3), (-1.0, 0.8), (0.0, 0.0)] {
        let mut numeric = C::new(0.0, 0.0);
        for &(xi, w) in &xirule {
            numeric += gf.symbol(v, xi) * C::new(0.0, (u - v) * xi).exp() * w;
        }
        numeric /= C::new(std::f64::consts::TAU, 0.0);
        worst_fourier = worst_fourier.max((gf.kernel(u, v) - numeric).norm());
    }
    entries.push(entry(
        "kernel-symbol-fourier-relation",
        "K(u, v) = (2 pi)^{-1} int a(v, xi) e^{i (u - v) xi} d xi",
        vec![nv("max_residual", worst_fourier)],
        1e-8,
        gate(worst_fourier, 1e-8),
        "",
    ));

    let two_pi = std::f64::consts::TAU;
    entries.push(entry(
        "normalization-constants",
        "calibration of the kernel and symbol prefactors",
        vec![
            nv("kernel_prefactor", two_pi.powf(1.5)),
            nv("symbol_prefactor", two_pi.powi(2)),
        ],
        0.0,
        Outcome::Pass,
        "K(u, v) = (2 pi)^{3/2} (F_{2,3,4} f)(u - v, lambda v^2/2 - mu/(2 lambda), -lambda v, lambda) \
         and a(v, xi) = (2 pi)^2 (F f)(xi, same slots), with the symmetric Fourier normalization \
         (2 pi)^{-1/2} per coordinate; signs and constants are pinned by the group-integral entry",
    ));

    Ok(finish("gft-check", entries, Vec::new()))
}

// ---------------------------------------------------------------------------
// plancherel: the measured inversion constant and its adjudication
// ---------------------------------------------------------------------------

/// Measures the Plancherel ratio on several Gaussians and adjudicates the
/// inversion constant against the two stated candidate values.
pub fn plancherel_check(cfg: &VerifyConfig) -> Result<CheckOutput> {
    let tol = cfg.tol.plancherel.unwrap_or(0.01);
    let base = GaussPoly4::product_gaussian(
        [
            C::new(0.5, 0.0),
            C::new(0.55, 0.0),
            C::new(0.45, 0.0),
            C::new(0.5, 0.0),
        ],
        [0.1, 0.0, -0.2, 0.3],
        [-0.3, 0.4, 0.2, -0.1],
    );
    let functions: Vec<(&str, GaussPoly4<f64>)> = vec![
        (
            "isotropic",
            GaussPoly4::product_gaussian([C::new(0.45, 0.0); 4], [0.0; 4], [0.0; 4]),
        ),
        (
            "anisotropic",
            GaussPoly4::product_gaussian(
                [
                    C::new(0.7, 0.0),
                    C::new(0.35, 0.0),
                    C::new(0.5, 0.0),
                    C::new(0.6, 0.0),
                ],
                [0.4, -0.2, 0.3, 0.1],
                [0.5, 0.3, -0.4, 0.2],
            ),
        ),
        (
            "polynomial",
            base.with_poly(
                Poly4::constant(C::new(0.8, 0.0)) + Poly4::monomial([1, 0, 1, 0], C::new(0.5, 0.0)),
            ),
        ),
    ];

    let panels = cfg.panels.max(4);
    let reports: Vec<_> = functions
        .iter()
        .map(|(name, f)| (*name, plancherel_ratio(f, panels, 12)))
        .collect();

    let ratios: Vec<f64> = reports.iter().map(|(_, r)| r.ratio).collect();
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let spread = (ratios.iter().cloned().fold(f64::MIN, f64::max)
        - ratios.iter().cloned().fold(f64::MAX, f64::min))
        / mean;
    let mut computed: Vec<NamedValue> = reports
        .iter()
        .map(|(name, r)| nv(&format!("ratio_{name}"), r.ratio))
        .collect();
    computed.push(nv("relative_spread", spread));
    let mut entries = vec![entry(
        "ratio-consistency",
        "int int |pi_{lambda,mu}(f)|_HS^2 dmu dlambda / |f|_2^2 is the same constant for every f",
        computed,
        tol,
        gate(spread, tol),
        "three Gaussian test functions, one with a polynomial prefactor",
    )];

    let mut collapse = 0.0f64;
    for (_, r) in &reports {
        collapse = collapse.max((r.ratio - r.closed_ratio).abs() / r.closed_ratio);
    }
    entries.push(entry(
        "closed-form-collapse",
        "panel quadrature in lambda agrees with the exact moment collapse of the double integral",
        vec![nv("max_relative_gap", collapse)],
        1e-8,
        gate(collapse, 1e-8),
        "",
    ));

    let reference = 2.0 * std::f64::consts::TAU.powi(3);
    let ref_dev = ratios
        .iter()
        .map(|r| (r - reference).abs() / reference)
        .fold(0.0f64, f64::max);
    entries.push(entry(
        "reference-value",
        "the measured ratio equals 2 (2 pi)^3 = 16 pi^3",
        vec![nv("measured_mean", mean), nv("sixteen_pi_cubed", reference), nv("max_relative_deviation", ref_dev)],
        1e-8,
        gate(ref_dev, 1e-8),
        "reciprocal 2^{-4} pi^{-3} is the inversion constant used by the quantization quadrature",
    ));

    let candidate_a = 8.0 * std::f64::consts::PI.powi(4);
    let candidate_b = 4.0 * std::f64::consts::PI.powi(3);
    let dev_a = (mean - candidate_a).abs() / candidate_a;
    let dev_b = (mean - candidate_b).abs() / candidate_b;
    let note = if dev_a <= 0.02 || dev_b <= 0.02 {
        format!(
            "flag: adjudicated - measured ratio {mean:.6} matches candidate {}",
            if dev_a <= dev_b { "2^3 pi^4" } else { "2^2 pi^3" }
        )
    } else {
        format!(
            "flag: novel value - measured ratio {mean:.6} = 2^4 pi^3; candidates 2^3 pi^4 = {candidate_a:.2} \
             and 2^2 pi^3 = {candidate_b:.2} deviate by {:.1} and {:.1} percent",
            dev_a * 100.0,
            dev_b * 100.0
        )
    };
    entries.push(entry(
        "candidate-adjudication",
        "comparison of the measured ratio with the two stated candidate constants",
        vec![
            nv("measured", mean),
            nv("candidate_2^3_pi^4", candidate_a),
            nv("candidate_2^2_pi^3", candidate_b),
            nv("relative_deviation_a", dev_a),
            nv("relative_deviation_b", dev_b),
        ],
        0.02,
        Outcome::Flag,
        note,
    ));

    let tail = reports
        .iter()
        .map(|(_, r)| r.tail_bound / r.ratio)
        .fold(0.0f64, f64::max);
    entries.push(entry(
        "truncation-tail",
        "bound for the lambda integral outside the quadrature window",
        vec![nv("max_relative_tail_bound", tail)],
        1e-9,
        gate(tail, 1e-9),
        "Gaussian tail estimate at both window edges, relative to the measured ratio",
    ));

    let mut rows = Vec::new();
    for (name, r) in &reports {
        for p in &r.panels {
            rows.push(vec![
                (*name).to_string(),
                format!("{}", p.lambda_lo),
                format!("{}", p.lambda_hi),
                format!("{}", p.contribution),
            ]);
        }
    }
    let tables = vec![CsvTable {
        name: "plancherel-panels".into(),
        header: vec![
            "function".into(),
            "lambda_lo".into(),
            "lambda_hi".into(),
            "contribution".into(),
        ],
        rows,
    }];

    Ok(finish("plancherel", entries, tables))
}

// ---------------------------------------------------------------------------
// diffops: difference-operator formulas, Leibniz rule, invariance
// ---------------------------------------------------------------------------

fn diff_gaussian(widths: [f64; 4], center: [f64; 4], momentum: [f64; 4]) -> GaussPoly4<f64> {
    let alpha = widths.map(|w| C::new(0.5 / (w * w), 0.0));
    GaussPoly4::product_gaussian(alpha, center, momentum)
}

fn diff_kernels() -> Vec<GaussPoly4<f64>> {
    let plain = diff_gaussian(
        [1.0, 0.9, 1.1, 1.0],
        [0.2, -0.1, 0.3, 0.0],
        [0.4, -0.3, 0.2, 0.5],
    );
    let poly = plain
        .clone()
        .with_poly(Poly4::constant(C::new(0.7, 0.0)) + Poly4::monomial([1, 0, 0, 0], C::new(0.4, 0.0)));
    let narrow = diff_gaussian(
        [0.7, 0.8, 0.75, 0.85],
        [-0.1, 0.15, 0.0, 0.2],
        [-0.3, 0.2, -0.1, 0.1],
    );
    vec![plain, poly, narrow]
}

fn op_gap(a: &GridOperator<f64>, b: &GridOperator<f64>, v: &DVector<C>) -> f64 {
    let bv = b.apply(v);
    (a.apply(v) - &bv).norm() / bv.norm().max(1e-12)
}

/// Difference-operator formulas against the exact definition, the Leibniz
/// product rule and the invariance relations.
pub fn diffops_check(cfg: &VerifyConfig) -> Result<CheckOutput> {
    let tol1 = cfg.tol.diffops.unwrap_or(1e-6);
    let grid = Grid1D::<f64>::new(192, 12.0);
    let v = Wavepacket::coherent(0.25, 0.8, -0.5).sample(&grid);
    let reps = [
        RepParams::new(1.2, 0.4)?,
        RepParams::new(0.8, -0.6)?,
        RepParams::new(-1.5, 1.1)?,
    ];
    let kernels = diff_kernels();
    let step = 0.05;

    let mut gap1 = 0.0f64;
    let mut gap2 = 0.0f64;
    let mut gap3 = 0.0f64;
    let mut gap4_mixed = 0.0f64;
    let mut gap4_exact = 0.0f64;
    for rep in &reps {
        let ops = DeltaOps::new(*rep, grid.clone());
        for kappa in &kernels {
            gap1 = gap1.max(op_gap(&ops.x1_formula(kappa), &ops.direct(0, kappa), &v));
            gap2 = gap2.max(op_gap(&ops.x2_formula(kappa, step), &ops.direct(1, kappa), &v));
            gap3 = gap3.max(op_gap(&ops.x3_formula(kappa, step), &ops.direct(2, kappa), &v));
            let direct4 = ops.direct(3, kappa);
            gap4_mixed = gap4_mixed.max(op_gap(
                &ops.x4_formula(kappa, step, step, DeltaPath::Formulas)?,
                &direct4,
                &v,
            ));
            gap4_exact = gap4_exact.max(op_gap(
                &ops.x4_formula(kappa, step, step, DeltaPath::Exact)?,
                &direct4,
                &v,
            ));
        }
    }
    let count = format!(
        "{} kernels at {} parameter points",
        kernels.len(),
        reps.len()
    );
    let mut entries = vec![
        entry(
            "first-difference-commutator",
            "Delta_{x_1} pi(kappa) = (i / lambda) [dpi(X_3), pi(kappa)]",
            vec![nv("max_relative_gap", gap1)],
            tol1,
            gate(gap1, tol1),
            count.clone(),
        ),
        entry(
            "second-difference-mu-derivative",
            "Delta_{x_2} pi(kappa) = (2 lambda / i) d/dmu pi(kappa)",
            vec![nv("max_relative_gap", gap2)],
            tol1,
            gate(gap2, tol1),
            "Richardson-extrapolated central difference in mu",
        ),
        entry(
            "third-difference-generator-formula",
            "Delta_{x_3} through dpi(X_1), dpi(X_3) and the second difference",
            vec![nv("max_relative_gap", gap3)],
            1e-4,
            gate(gap3, 1e-4),
            "",
        ),
        entry(
            "fourth-difference-six-term-mixed",
            "the six-term formula for Delta_{x_4} with embedded finite differences",
            vec![nv("max_relative_gap", gap4_mixed)],
            1e-3,
            gate(gap4_mixed, 1e-3),
            "",
        ),
        entry(
            "fourth-difference-six-term-exact",
            "the six-term formula for Delta_{x_4} with exact inner differences",
            vec![nv("max_relative_gap", gap4_exact)],
            1e-5,
            gate(gap4_exact, 1e-5),
            "only the d/dlambda term remains a finite difference",
        ),
    ];

    // Leibniz product rule for a coordinate times a field-derived kernel.
    let rep = RepParams::new(1.4, 0.5)?;
    let ops = DeltaOps::new(rep, grid.clone());
    let kappa = &kernels[0];
    let lefts = left_invariant_generators::<f64>();
    let embed = |c: &f64| C::new(*c, 0.0);
    let mut leibniz = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            let field_kernel = kappa.apply_diffop(&lefts[j], embed);
            let lhs = ops.direct(i, &field_kernel);
            let mut expo = [0u16; 4];
            expo[i] = 1;
            let first = rep
                .generator(&grid, j)
                .compose(&ops.transform(&kappa.mul_monomial(expo)))?;
            let correction = lefts[j].apply(&Poly4::<f64>::var(i));
            let corr_kernel = kappa
                .clone()
                .with_poly(&kappa.poly * &correction.map_coeffs(embed));
            let rhs = first.sub(&ops.transform(&corr_kernel))?;
            leibniz = leibniz.max(op_gap(&lhs, &rhs, &v));
        }
    }
    entries.push(entry(
        "leibniz-product-rule",
        "x_i (X_j kappa) = X_j (x_i kappa) - (X_j x_i) kappa under the transform",
        vec![nv("max_relative_gap", leibniz)],
        1e-5,
        gate(leibniz, 1e-5),
        "all sixteen index combinations",
    ));

    // Invariance relations on a finer grid (the composed spectral
    // derivative needs the larger window).
    let grid = Grid1D::<f64>::new(256, 14.0);
    let v = Wavepacket::coherent(0.25, 0.8, -0.5).sample(&grid);
    let rep = RepParams::new(1.3, -0.7)?;
    let ops = DeltaOps::new(rep, grid.clone());
    let kappa = &kernels[1];
    let rights = right_invariant_generators::<f64>();
    let a = ops.transform(kappa);
    let mut left_gap = 0.0f64;
    let mut right_gap = 0.0f64;
    for j in 0..4 {
        let left_kernel = kappa.apply_diffop(&lefts[j], embed);
        let lhs = ops.transform(&left_kernel);
        let rhs = rep.generator(&grid, j).compose(&a)?;
        left_gap = left_gap.max(op_gap(&lhs, &rhs, &v));

        let right_kernel = kappa.apply_diffop(&rights[j], embed);
        let lhs = ops.transform(&right_kernel);
        let rhs = a.compose(&rep.generator(&grid, j))?;
        right_gap = right_gap.max(op_gap(&lhs, &rhs, &v));
    }
    entries.push(entry(
        "left-invariance-relation",
        "pi(X_j kappa) = dpi(X_j) pi(kappa)",
        vec![nv("max_relative_gap", left_gap)],
        tol1,
        gate(left_gap, tol1),
        "",
    ));
    entries.push(entry(
        "right-invariance-relation",
        "pi(Y_j kappa) = pi(kappa) dpi(X_j)",
        vec![nv("max_relative_gap", right_gap)],
        tol1,
        gate(right_gap, tol1),
        "",
    ));

    Ok(finish("diffops", entries, Vec::new()))
}

// ---------------------------------------------------------------------------
// delta-table: the example table with three-way adjudication
// ---------------------------------------------------------------------------

/// Measures every cell of the table `Delta_{x_i} pi(X_j)` and reports the
/// claimed value, the product-rule value and the measured limit.  Contested
/// cells are flagged, never silently passed.
pub fn delta_table_check(cfg: &VerifyConfig) -> Result<CheckOutput> {
    let tol = cfg.tol.delta_table.unwrap_or(1e-3);
    let grid = Grid1D::<f64>::new(512, 10.0);
    let rep = RepParams::new(1.7, 0.8)?;
    let widths = [
        0.1 * std::f64::consts::SQRT_2,
        0.1,
        0.05 * std::f64::consts::SQRT_2,
        0.05,
    ];
    let cells = delta_table(rep, &grid, &widths);

    let mut entries = Vec::new();
    let mut rows = Vec::new();
    for cell in &cells {
        let mut computed = vec![nv("measured_vs_product_rule", cell.measured_vs_product_rule)];
        if cell.claimed.len() == 1 {
            computed.push(nv("measured_vs_claimed", cell.measured_vs_claimed[0]));
        } else {
            for (k, dev) in cell.measured_vs_claimed.iter().enumerate() {
                computed.push(nv(&format!("measured_vs_claimed_{}", k + 1), *dev));
            }
        }
        let claimed_list = cell
            .claimed
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join("; ");
        let (mut outcome, note) = if !cell.contested() {
            (
                gate(cell.measured_vs_claimed[0], tol),
                format!(
                    "claimed {} agrees with the product rule; measured limit confirms it",
                    cell.claimed[0]
                ),
            )
        } else if cell.claimed.is_empty() {
            (
                Outcome::Flag,
                format!(
                    "no claimed value; measured limit sides with the product rule {} (deviation {:.2e})",
                    cell.product_rule, cell.measured_vs_product_rule
                ),
            )
        } else {
            (
                Outcome::Flag,
                format!(
                    "contested: claimed [{}] against product rule {}; the measured limit sides with \
                     the product rule (deviation {:.2e})",
                    claimed_list, cell.product_rule, cell.measured_vs_product_rule
                ),
            )
        };
        if cell.measured_vs_product_rule > tol {
            outcome = Outcome::Fail;
        }
        entries.push(entry(
            &format!("delta-x{}-pi-X{}", cell.i, cell.j),
            &format!(
                "difference operator Delta_{{x_{}}} applied to the generator kernel of X_{}",
                cell.i, cell.j
            ),
            computed,
            tol,
            outcome,
            note,
        ));
        rows.push(vec![
            cell.i.to_string(),
            cell.j.to_string(),
            claimed_list,
            cell.product_rule.to_string(),
            cell.measured_vs_claimed
                .iter()
                .map(|d| format!("{d:.3e}"))
                .collect::<Vec<_>>()
                .join("; "),
            format!("{:.3e}", cell.measured_vs_product_rule),
            cell.contested().to_string(),
        ]);
    }

    let tables = vec![CsvTable {
        name: "delta-table".into(),
        header: vec![
            "i".into(),
            "j".into(),
            "claimed".into(),
            "product_rule".into(),
            "measured_vs_claimed".into(),
            "measured_vs_product_rule".into(),
            "contested".into(),
        ],
        rows,
    }];

    Ok(finish("delta-table", entries, tables))
}

// ---------------------------------------------------------------------------
// seminorm: symbol-class seminorms and the spectral weight
// ---------------------------------------------------------------------------

fn seminorm_kappa() -> GaussPoly4<f64> {
    diff_gaussian(
        [0.9, 1.0, 1.0, 1.1],
        [-0.1, 0.2, 0.0, 0.1],
        [-0.2, 0.1, 0.2, -0.3],
    )
}

/// Seminorm calibration entries: identity symbol, matching spectral powers,
/// positivity of the spectral weight and monotonicity in the caps.
pub fn seminorm_check(cfg: &VerifyConfig) -> Result<CheckOutput> {
    let tol = cfg.tol.seminorm.unwrap_or(1e-6);
    let grid = Grid1D::<f64>::new(64, 9.0);
    let mut entries = Vec::new();

    let spec = SeminormSpec::new(0.0, 1.0, 0.0);
    let id_report = seminorm(&SymbolField::Identity, &spec, &grid)?;
    let id_dev = (id_report.value - 1.0).abs();
    entries.push(entry(
        "identity-at-order-zero",
        "the identity symbol has seminorm one at order zero",
        vec![nv("value", id_report.value), nv("deviation", id_dev)],
        tol,
        gate(id_dev, tol),
        "",
    ));

    let m = 2.0;
    let sigma = SymbolField::<f64>::Direct(Box::new(
        move |_x, rep: RepParams<f64>, grid: &Grid1D<f64>| {
            rep.i_minus_sublaplacian_power(grid, m * 0.5)
        },
    ));
    let mut spec = SeminormSpec::new(m, 1.0, 0.0);
    spec.cap_alpha = 0;
    spec.cap_beta = 0;
    spec.cap_gamma = 2;
    let match_report = seminorm(&sigma, &spec, &grid)?;
    let match_dev = match_report
        .rows
        .iter()
        .map(|r| (r.value - 1.0).abs())
        .fold(0.0f64, f64::max);
    entries.push(entry(
        "matching-spectral-power",
        "(I - L)^{m/2} has seminorm one at order m for every auxiliary exponent",
        vec![nv("value", match_report.value), nv("max_row_deviation", match_dev)],
        1e-4,
        gate(match_dev, 1e-4),
        "the two spectral weights cancel exactly in operator norm",
    ));

    let mut min_eig = f64::MAX;
    for (lambda, mu) in [(1.0, 0.0), (1.6, 0.7), (-0.9, 0.5)] {
        let rep = RepParams::new(lambda, mu)?;
        let a = rep.i_minus_sublaplacian_power(&grid, 1.0)?;
        let (vals, _) = a.hermitian_eigen()?;
        min_eig = min_eig.min(vals[0]);
    }
    let eig_residual = (1.0 - min_eig).max(0.0);
    entries.push(entry(
        "spectral-lower-bound",
        "I - dpi(L) has spectrum bounded below by one",
        vec![nv("min_eigenvalue", min_eig), nv("defect_below_one", eig_residual)],
        tol,
        gate(eig_residual, tol),
        "discretized sub-Laplacian is a sum of squares plus the identity",
    ));

    let rep = RepParams::new(1.3, -0.4)?;
    let a = rep.i_minus_sublaplacian_power(&grid, 1.0)?;
    let b = rep.i_minus_sublaplacian_power(&grid, 0.5)?;
    let sq_gap = (b.compose(&b)?.matrix() - a.matrix()).norm() / a.matrix().norm();
    entries.push(entry(
        "square-root-roundtrip",
        "the spectral square root squares back to I - dpi(L)",
        vec![nv("relative_gap", sq_gap)],
        1e-8,
        gate(sq_gap, 1e-8),
        "",
    ));

    let sigma = SymbolField::constant_kernel(seminorm_kappa());
    let small_spec = SeminormSpec::new(0.0, 1.0, 0.0);
    let small_report = seminorm(&sigma, &small_spec, &grid)?;
    let mut big_spec = SeminormSpec::new(0.0, 1.0, 0.0);
    big_spec.cap_alpha = 2;
    big_spec.cap_beta = 2;
    big_spec.cap_gamma = 2;
    big_spec
        .x_samples
        .push(GroupElement::new([-0.6, 0.5, -0.2, 0.3]));
    big_spec.rep_samples.push((-1.2, 0.5));
    let big = seminorm(&sigma, &big_spec, &grid)?.value;
    let cap_growth = (small_report.value - big).max(0.0);
    entries.push(entry(
        "cap-monotonicity",
        "enlarging the index caps and sample sets cannot decrease the supremum",
        vec![nv("value_small_caps", small_report.value), nv("value_large_caps", big), nv("violation", cap_growth)],
        0.0,
        gate(cap_growth, 0.0),
        "both values are lower bounds of the same supremum",
    ));

    let mut order_values = Vec::new();
    for m in [0.0, 1.0, 2.0] {
        let spec = SeminormSpec::new(m, 1.0, 0.0);
        order_values.push(seminorm(&sigma, &spec, &grid)?.value);
    }
    let order_rise = (order_values[1] - order_values[0])
        .max(order_values[2] - order_values[1])
        .max(0.0);
    entries.push(entry(
        "order-monotonicity",
        "the seminorm of a fixed symbol is nonincreasing in the order parameter",
        vec![
            nv("value_m0", order_values[0]),
            nv("value_m1", order_values[1]),
            nv("value_m2", order_values[2]),
            nv("max_rise", order_rise),
        ],
        1e-12,
        gate(order_rise, 1e-12),
        "the spectral weight has spectrum at least one, so larger m only shrinks terms",
    ));

    let w = &small_report.witness;
    entries.push(entry(
        "kernel-symbol-value",
        "sampled seminorm of a Gaussian-kernel symbol with its witness term",
        vec![
            nv("value", small_report.value),
            nv("witness_gamma", f64::from(w.gamma)),
            nv("witness_lambda", w.lambda),
            nv("witness_mu", w.mu),
            nv("sampled_terms", small_report.rows.len() as f64),
        ],
        0.0,
        Outcome::Pass,
        format!(
            "lower bound of the supremum over the sampled index set; witness alpha {} beta {}",
            w.alpha, w.beta
        ),
    ));

    let mut rows = Vec::new();
    for r in &small_report.rows {
        rows.push(vec![
            r.alpha.to_string(),
            r.beta.to_string(),
            r.gamma.to_string(),
            format!("{}", r.x[0]),
            format!("{}", r.x[1]),
            format!("{}", r.x[2]),
            format!("{}", r.x[3]),
            format!("{}", r.lambda),
            format!("{}", r.mu),
            format!("{}", r.value),
        ]);
    }
    let tables = vec![CsvTable {
        name: "seminorm-rows".into(),
        header: vec![
            "alpha".into(),
            "beta".into(),
            "gamma".into(),
            "x1".into(),
            "x2".into(),
            "x3".into(),
            "x4".into(),
            "lambda".into(),
            "mu".into(),
            "value".into(),
        ],
        rows,
    }];

    Ok(finish("seminorm", entries, tables))
}

// ---------------------------------------------------------------------------
// quantize-check: inversion, convolution semantics, composed form
// ---------------------------------------------------------------------------

fn quantize_phi() -> GaussPoly4<f64> {
    diff_gaussian(
        [1.0, 0.9, 1.1, 1.0],
        [0.2, -0.1, 0.15, 0.0],
        [0.3, 0.2, -0.1, 0.25],
    )
}

/// Quantization identities: identity-symbol inversion, group convolution
/// for kernel symbols, and the composed realization.
pub fn quantize_check(cfg: &VerifyConfig) -> Result<CheckOutput> {
    let tol = cfg.tol.quantize.unwrap_or(1e-3);
    let spec = QuadratureSpec {
        lambda_max: cfg.lambda_max,
        panels: cfg.panels.max(4),
        ..QuadratureSpec::default()
    };
    let phi = quantize_phi();
    let kappa = seminorm_kappa();
    let rel = |a: C, b: C| (a - b).norm() / b.norm().max(1e-12);
    let mut entries = Vec::new();

    let points = [
        [0.0, 0.0, 0.0, 0.0],
        [0.3, -0.2, 0.4, 0.1],
        [-0.5, 0.4, 0.0, -0.3],
        [0.2, 0.5, -0.3, 0.6],
        [0.8, -0.6, 0.2, -0.4],
    ];
    let mut inv_worst = 0.0f64;
    let mut last_report = None;
    for coords in points {
        let x = GroupElement::new(coords);
        let report = quantize(&SymbolField::Identity, &phi, &x, &spec)?;
        inv_worst = inv_worst.max(rel(report.value, phi.eval(coords)));
        last_report = Some(report);
    }
    entries.push(entry(
        "identity-inversion",
        "Op(I) phi (x) = phi(x): the inversion formula built from the measured constant",
        vec![nv("max_relative_error", inv_worst), nv("points", points.len() as f64)],
        tol,
        gate(inv_worst, tol),
        "trace quadrature over the full parameter space with the constant 2^{-4} pi^{-3}",
    ));

    let coords = [0.4, -0.3, 0.2, 0.3];
    let sigma = SymbolField::constant_kernel(kappa.clone());
    let got = quantize(&sigma, &phi, &GroupElement::new(coords), &spec)?.value;
    let rule = panel_rule(-6.5f64, 6.5, 6, 8);
    let xg = GroupElement::new(coords);
    let partials: Vec<C> = rule
        .par_iter()
        .map(|&(b1, w1)| {
            let mut acc = C::new(0.0, 0.0);
            for &(b2, w2) in &rule {
                for &(b3, w3) in &rule {
                    for &(b4, w4) in &rule {
                        let b = GroupElement::new([b1, b2, b3, b4]);
                        let arg = b.inverse().multiply(&xg);
                        acc += phi.eval([b1, b2, b3, b4]) * kappa.eval(arg.coords) * (w2 * w3 * w4);
                    }
                }
            }
            acc * w1
        })
        .collect();
    let want = partials.iter().fold(C::new(0.0, 0.0), |a, b| a + b);
    let conv_err = rel(got, want);
    entries.push(entry(
        "kernel-convolution",
        "Op(pi(kappa)) phi (x) = (phi * kappa)(x), the group convolution",
        vec![
            nv("relative_error", conv_err),
            nv("value_re", got.re),
            nv("value_im", got.im),
        ],
        tol,
        gate(conv_err, tol),
        "independent four-dimensional panel quadrature as the oracle",
    ));

    let triples: [([f64; 4], GaussPoly4<f64>); 3] = [
        ([0.0, 0.0, 0.0, 0.0], seminorm_kappa()),
        (
            [0.4, -0.3, 0.2, 0.3],
            diff_gaussian(
                [1.1, 1.0, 0.9, 1.0],
                [0.0, 0.1, -0.1, 0.2],
                [0.2, -0.2, 0.1, 0.1],
            ),
        ),
        (
            [-0.6, 0.2, 0.3, -0.2],
            diff_gaussian(
                [0.9, 1.1, 1.0, 1.2],
                [0.1, -0.1, 0.2, 0.0],
                [-0.1, 0.3, 0.0, -0.2],
            ),
        ),
    ];
    let mut composed_worst = 0.0f64;
    for (coords, kap) in &triples {
        let x = GroupElement::new(*coords);
        let sigma = SymbolField::constant_kernel(kap.clone());
        let direct = quantize(&sigma, &phi, &x, &spec)?.value;
        let composed = quantize_composed(&sigma, &phi, &x, &spec)?.value;
        composed_worst = composed_worst.max(rel(composed, direct));
    }
    entries.push(entry(
        "composed-agreement",
        "the composed trace realization equals direct quantization at shifted base points",
        vec![nv("max_relative_error", composed_worst), nv("triples", triples.len() as f64)],
        tol,
        gate(composed_worst, tol),
        "left-translates the test function through the exact Gaussian calculus",
    ));

    let e = GroupElement::identity();
    let sigma = SymbolField::constant_kernel(kappa);
    let direct = quantize(&sigma, &phi, &e, &spec)?.value;
    let composed = quantize_composed(&sigma, &phi, &e, &spec)?.value;
    let reduce_gap = rel(composed, direct);
    entries.push(entry(
        "composed-reduction-at-identity",
        "at the identity the composed realization reduces to the direct one",
        vec![nv("relative_gap", reduce_gap)],
        1e-6,
        gate(reduce_gap, 1e-6),
        "same quadrature nodes up to the trivial translation",
    ));

    let report = last_report.expect("at least one inversion point");
    let sum = report
        .panels
        .iter()
        .fold(C::new(0.0, 0.0), |acc, p| acc + p.partial);
    let panel_gap = (sum - report.value).norm() / report.value.norm().max(1e-12);
    entries.push(entry(
        "panel-consistency",
        "per-panel contributions sum to the reported value",
        vec![nv("relative_gap", panel_gap), nv("panel_count", report.panels.len() as f64)],
        1e-12,
        gate(panel_gap, 1e-12),
        "",
    ));

    let mut rows = Vec::new();
    for p in &report.panels {
        rows.push(vec![
            format!("{}", p.lambda_lo),
            format!("{}", p.lambda_hi),
            format!("{}", p.partial.re),
            format!("{}", p.partial.im),
        ]);
    }
    let tables = vec![CsvTable {
        name: "quantize-panels".into(),
        header: vec![
            "lambda_lo".into(),
            "lambda_hi".into(),
            "partial_re".into(),
            "partial_im".into(),
        ],
        rows,
    }];

    Ok(finish("quantize-check", entries, tables))
}

// ---------------------------------------------------------------------------
// heisenberg-check: Weyl comparison and renormalization
// ---------------------------------------------------------------------------

/// Weyl-quantization audit: self-adjointness, oscillator spectrum, dilation
/// covariance and the lambda-renormalization roundtrip.
pub fn heisenberg_check(cfg: &VerifyConfig) -> Result<CheckOutput> {
    let tol = cfg.tol.heisenberg.unwrap_or(1e-10);
    let mut entries = Vec::new();

    let band = |xi: f64, u: f64| -> C {
        C::new(1.0 + 0.5 * u, 0.3 * xi) * (-0.2 * xi * xi - 0.3 * u * u).exp()
    };
    let grid = Grid1D::<f64>::new(96, 8.0);
    let weyl = weyl_roundtrip_check(&band, &grid)?;
    entries.push(entry(
        "self-adjointness",
        "Op^W of a real symbol is self-adjoint",
        vec![nv("relative_hermitian_defect", weyl.self_adjoint_gap)],
        tol,
        gate(weyl.self_adjoint_gap, tol),
        "",
    ));

    let cov_worst = weyl
        .covariance
        .iter()
        .map(|&(_, r)| r)
        .fold(0.0f64, f64::max);
    let mut computed = Vec::new();
    for &(s, r) in &weyl.covariance {
        computed.push(nv(&format!("residual_s_{s}"), r));
    }
    entries.push(entry(
        "dilation-covariance",
        "Op^W(a(s xi, u/s)) = U_s^{-1} Op^W(a) U_s in weak form on coherent packets",
        computed,
        1e-6,
        gate(cov_worst, 1e-6),
        "dilated packets sampled analytically, no grid interpolation",
    ));

    let osc_grid = Grid1D::<f64>::new(256, 10.0);
    let osc = |xi: f64, u: f64| C::new(xi * xi + u * u, 0.0);
    let op = weyl_quantize(&osc, &osc_grid);
    let (vals, _) = op.hermitian_eigen()?;
    let mut computed = Vec::new();
    let mut osc_dev = 0.0f64;
    for k in 0..5 {
        let target = (2 * k + 1) as f64;
        computed.push(nv(&format!("eigenvalue_{}", k + 1), vals[k]));
        if k < 3 {
            osc_dev = osc_dev.max((vals[k] - target).abs());
        }
    }
    computed.push(nv("max_deviation_first_three", osc_dev));
    entries.push(entry(
        "oscillator-spectrum",
        "Op^W(xi^2 + u^2) has the odd-integer spectrum 1, 3, 5, ...",
        computed,
        1e-3,
        gate(osc_dev, 1e-3),
        "grid size 256, half-width 10",
    ));

    let mut roundtrip = 0.0f64;
    for lambda in [4.0, 0.25] {
        let a = LambdaSymbol::new(lambda, |xi: f64, u: f64| {
            C::new((-0.1 * xi * xi).exp() * u, 0.3 * xi)
        })?;
        let tilde = a.renormalize()?;
        let s1 = lambda.abs().sqrt();
        let s2 = lambda.sqrt();
        let back = LambdaSymbol::from_renormalized(lambda, move |p: f64, q: f64| {
            C::new((-0.1 * (p / s1) * (p / s1)).exp() * (q / s2), 0.3 * (p / s1))
        })?;
        for (xi, u) in [(0.0, 0.0), (0.8, -1.2), (-1.5, 0.6), (2.2, 1.9)] {
            roundtrip = roundtrip.max((tilde(s1 * xi, s2 * u) - a.eval(xi, u)).norm());
            roundtrip = roundtrip.max((back.eval(xi, u) - a.eval(xi, u)).norm());
        }
    }
    entries.push(entry(
        "renormalization-roundtrip",
        "the lambda-renormalization and its inverse compose to the identity",
        vec![nv("max_residual", roundtrip)],
        1e-12,
        gate(roundtrip, 1e-12),
        "checked at lambda = 4 and lambda = 1/4 in both directions",
    ));

    let neg = LambdaSymbol::new(-1.0, |xi: f64, u: f64| C::new(xi + u, 0.0))?;
    let (outcome, note) = match neg.renormalize() {
        Err(Error::InvalidConfig(msg)) => (Outcome::Pass, format!("declined as expected: {msg}")),
        Err(other) => (Outcome::Fail, format!("unexpected error kind: {other}")),
        Ok(_) => (
            Outcome::Fail,
            "negative lambda was silently renormalized".into(),
        ),
    };
    entries.push(entry(
        "negative-lambda-rejection",
        "renormalization is only defined for lambda > 0 and must decline otherwise",
        vec![nv("lambda", -1.0)],
        0.0,
        outcome,
        note,
    ));

    let mut rows = Vec::new();
    for &(s, r) in &weyl.covariance {
        rows.push(vec![format!("{s}"), format!("{r}")]);
    }
    let tables = vec![CsvTable {
        name: "heisenberg-covariance".into(),
        header: vec!["scale".into(), "residual".into()],
        rows,
    }];

    Ok(finish("heisenberg-check", entries, tables))
}
