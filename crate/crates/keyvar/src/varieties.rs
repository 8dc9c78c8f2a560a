//! Equation systems of the key variety family: the nine-equation affine
//! variety, its s33 = 1 slice, the Pfaffian (Tom) format, the two-equation
//! image variety of the double projection, chart parametrizations, and exact
//! point sampling.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::grading::WeightSystem;
use crate::matrix::SymMatrix;
use crate::poly::{int, Polynomial, VariableUniverse};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VarietyError {
    #[error("unknown chart `{0}`")]
    UnknownChart(String),
    #[error("no signed matching between sub-Pfaffians and equations")]
    NoMatching,
    #[error("rescale factor must be nonzero")]
    ZeroRescale,
    #[error("group element must be invertible")]
    SingularGroupElement,
    #[error(transparent)]
    Poly(#[from] crate::poly::PolyError),
}

/// Exact rational point, keyed by coordinate name.
pub type Point = BTreeMap<String, BigRational>;

/// A named, ordered system of equations over one universe.
#[derive(Debug, Clone)]
pub struct KeyVarietyPresentation {
    pub name: String,
    pub universe: Arc<VariableUniverse>,
    pub equations: Vec<(String, Polynomial)>,
}

impl KeyVarietyPresentation {
    pub fn equation(&self, label: &str) -> Option<&Polynomial> {
        self.equations
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, p)| p)
    }

    /// Evaluates every equation at the point; `None` entries mean exact zero.
    pub fn residuals(&self, point: &Point) -> Result<Vec<BigRational>, VarietyError> {
        self.equations
            .iter()
            .map(|(_, p)| p.evaluate(point).map_err(Into::into))
            .collect()
    }

    pub fn vanishes_at(&self, point: &Point) -> Result<bool, VarietyError> {
        Ok(self.residuals(point)?.iter().all(|v| v.is_zero()))
    }
}

fn pvar(uni: &Arc<VariableUniverse>, name: &str) -> Polynomial {
    Polynomial::var(uni, name).expect("base coordinate")
}

/// The skew matrix built from the q coordinates.
pub fn skew_matrix_a(uni: &Arc<VariableUniverse>) -> SymMatrix {
    let q = |n: &str| pvar(uni, n);
    SymMatrix::skew_from_upper(uni, 3, &[q("q3").neg(), q("q2"), q("q1").neg()])
}

/// The symmetric coefficient matrix with entries s11..s33.
pub fn symmetric_s(uni: &Arc<VariableUniverse>) -> SymMatrix {
    let names = [
        ["s11", "s12", "s13"],
        ["s12", "s22", "s23"],
        ["s13", "s23", "s33"],
    ];
    SymMatrix::from_fn(3, 3, |i, j| pvar(uni, names[i][j]))
}

fn vec3(uni: &Arc<VariableUniverse>, names: [&str; 3]) -> Vec<Polynomial> {
    names.iter().map(|n| pvar(uni, n)).collect()
}

/// The four eliminant polynomials: (F1,F2,F3) = (rI - AS) A t and
/// F4 = -(r^2 + q^T S_adj q).
pub fn build_f(uni: &Arc<VariableUniverse>) -> [Polynomial; 4] {
    let a = skew_matrix_a(uni);
    let s = symmetric_s(uni);
    let r = pvar(uni, "r");
    let t = vec3(uni, ["t1", "t2", "t3"]);
    let q = vec3(uni, ["q1", "q2", "q3"]);

    let at = a.mat_vec(&t);
    let asm = a.mat_mul(&s);
    let as_at = asm.mat_vec(&at);
    let f123: Vec<Polynomial> = (0..3)
        .map(|i| r.mul(&at[i]).sub(&as_at[i]))
        .collect();

    let sdag = s.adjoint().expect("3x3");
    let sdag_q = sdag.mat_vec(&q);
    let mut qsq = Polynomial::zero(uni);
    for i in 0..3 {
        qsq = qsq.add(&q[i].mul(&sdag_q[i]));
    }
    let f4 = r.mul(&r).add(&qsq).neg();
    [f123[0].clone(), f123[1].clone(), f123[2].clone(), f4]
}

/// The nine defining equations E1..E9 over the 18-coordinate universe.
pub fn build_sigma14() -> KeyVarietyPresentation {
    let uni = VariableUniverse::sigma();
    build_sigma14_over(&uni)
}

/// Same system over a universe that may carry extra parameter symbols.
pub fn build_sigma14_over(uni: &Arc<VariableUniverse>) -> KeyVarietyPresentation {
    let a = skew_matrix_a(uni);
    let s = symmetric_s(uni);
    let r = pvar(uni, "r");
    let u = pvar(uni, "u");
    let p4 = pvar(uni, "p4");
    let p = vec3(uni, ["p1", "p2", "p3"]);
    let q = vec3(uni, ["q1", "q2", "q3"]);
    let t = vec3(uni, ["t1", "t2", "t3"]);

    let mut equations = Vec::with_capacity(9);

    // E1: p . q
    let mut e1 = Polynomial::zero(uni);
    for i in 0..3 {
        e1 = e1.add(&p[i].mul(&q[i]));
    }
    equations.push(("E1".to_string(), e1));

    // E2..E4: rows of (rI + AS) p + p4 A t
    let asm = a.mat_mul(&s);
    let asp = asm.mat_vec(&p);
    let at = a.mat_vec(&t);
    for i in 0..3 {
        let row = r.mul(&p[i]).add(&asp[i]).add(&p4.mul(&at[i]));
        equations.push((format!("E{}", i + 2), row));
    }

    // E5: p^T S p + p4 p . t
    let sp = s.mat_vec(&p);
    let mut e5 = Polynomial::zero(uni);
    for i in 0..3 {
        e5 = e5.add(&p[i].mul(&sp[i]));
        e5 = e5.add(&p4.mul(&p[i]).mul(&t[i]));
    }
    equations.push(("E5".to_string(), e5));

    // E6..E9: u p_i - F_i and u p4 - F4
    let f = build_f(uni);
    for i in 0..3 {
        equations.push((format!("E{}", i + 6), u.mul(&p[i]).sub(&f[i])));
    }
    equations.push(("E9".to_string(), u.mul(&p4).sub(&f[3])));

    KeyVarietyPresentation {
        name: "Sigma14".to_string(),
        universe: uni.clone(),
        equations,
    }
}

/// The s33 = 1 slice of the nine-equation system.
pub fn specialize_s33(pres: &KeyVarietyPresentation) -> KeyVarietyPresentation {
    let uni = &pres.universe;
    let mut map = BTreeMap::new();
    map.insert("s33".to_string(), Polynomial::one(uni));
    let equations = pres
        .equations
        .iter()
        .map(|(l, p)| (l.clone(), p.substitute(&map).expect("s33 in universe")))
        .collect();
    KeyVarietyPresentation {
        name: "Sigma13".to_string(),
        universe: uni.clone(),
        equations,
    }
}

pub fn build_sigma13() -> KeyVarietyPresentation {
    specialize_s33(&build_sigma14())
}

/// The 5x5 skew matrix whose 4x4 Pfaffians cut out the Pfaffian-format model.
pub fn build_tom_matrix(uni: &Arc<VariableUniverse>) -> SymMatrix {
    let v = |n: &str| pvar(uni, n);
    // a25, a35, a45 from the s-matrix rows and p4 t.
    let a25 = v("s13")
        .mul(&v("p1"))
        .add(&v("s23").mul(&v("p2")))
        .add(&v("s33").mul(&v("p3")))
        .add(&v("p4").mul(&v("t3")));
    let a35 = v("s12")
        .mul(&v("p1"))
        .add(&v("s22").mul(&v("p2")))
        .add(&v("s23").mul(&v("p3")))
        .neg()
        .sub(&v("p4").mul(&v("t2")));
    let a45 = v("s11")
        .mul(&v("p1"))
        .add(&v("s12").mul(&v("p2")))
        .add(&v("s13").mul(&v("p3")))
        .add(&v("p4").mul(&v("t1")));
    // Upper triangle rows: (12,13,14,15),(23,24,25),(34,35),(45)
    SymMatrix::skew_from_upper(
        uni,
        5,
        &[
            v("q3"),
            v("q2").neg(),
            v("q1"),
            v("r"),
            v("p1"),
            v("p2"),
            a25,
            v("p3"),
            a35,
            a45,
        ],
    )
}

/// The 5x5 skew matrix presenting the q1 = 1 slice by its 4x4 Pfaffians.
pub fn build_q1_matrix(uni: &Arc<VariableUniverse>) -> SymMatrix {
    let v = |n: &str| pvar(uni, n);
    // c := s23 - q2 s13 - q3 s12 + q2 q3 s11
    let c = v("s23")
        .sub(&v("q2").mul(&v("s13")))
        .sub(&v("q3").mul(&v("s12")))
        .add(&v("q2").mul(&v("q3")).mul(&v("s11")));
    let m12 = v("u").neg();
    let m13 = v("r").sub(&c);
    let m14 = v("s33")
        .neg()
        .add(&v("q3").mul(&v("s13")).scale(&int(2)))
        .sub(&v("q3").mul(&v("q3")).mul(&v("s11")));
    let m15 = v("t3").neg().add(&v("q3").mul(&v("t1")));
    let m23 = v("s22")
        .sub(&v("q2").mul(&v("s12")).scale(&int(2)))
        .add(&v("q2").mul(&v("q2")).mul(&v("s11")));
    let m24 = v("r").add(&c);
    let m25 = v("t2").sub(&v("q2").mul(&v("t1")));
    let m34 = v("p4");
    let m35 = v("p3").neg();
    let m45 = v("p2");
    SymMatrix::skew_from_upper(uni, 5, &[m12, m13, m14, m15, m23, m24, m25, m34, m35, m45])
}

/// A perfect signed matching between the five sub-Pfaffians of the Pfaffian
/// format matrix and the equations E1..E5.
pub fn pfaffian_correspondence() -> Result<Vec<(usize, String, i64)>, VarietyError> {
    let uni = VariableUniverse::sigma();
    let tom = build_tom_matrix(&uni);
    let pres = build_sigma14();
    pfaffian_correspondence_of(&tom, &pres.equations[0..5])
}

pub fn pfaffian_correspondence_of(
    m: &SymMatrix,
    equations: &[(String, Polynomial)],
) -> Result<Vec<(usize, String, i64)>, VarietyError> {
    let pfs = m.sub_pfaffians_5().map_err(|_| VarietyError::NoMatching)?;
    let mut used = vec![false; equations.len()];
    let mut out = Vec::with_capacity(5);
    for (i, pf) in pfs.iter().enumerate() {
        let mut found = None;
        for (j, (label, eq)) in equations.iter().enumerate() {
            if used[j] {
                continue;
            }
            if pf == eq {
                found = Some((label.clone(), 1));
            } else if pf.neg() == *eq {
                found = Some((label.clone(), -1));
            }
            if found.is_some() {
                used[j] = true;
                break;
            }
        }
        match found {
            Some((label, sign)) => out.push((i + 1, label, sign)),
            None => return Err(VarietyError::NoMatching),
        }
    }
    Ok(out)
}

/// The two-equation image of the double projection, over the base universe.
pub fn build_xi() -> KeyVarietyPresentation {
    let uni = VariableUniverse::sigma();
    let f = build_f(&uni);
    let u = pvar(&uni, "u");
    let equations = vec![
        ("X1".to_string(), u.mul(&pvar(&uni, "p2")).sub(&f[1])),
        ("X2".to_string(), u.mul(&pvar(&uni, "p4")).sub(&f[3])),
    ];
    KeyVarietyPresentation {
        name: "Xi".to_string(),
        universe: uni,
        equations,
    }
}

/// Checks that the two projected equations rewrite exactly as the stated
/// combinations of the 2x2 minors of the primed 2x4 matrix (with s33 = 1).
pub fn verify_xi_rewrite() -> Result<bool, VarietyError> {
    let uni = VariableUniverse::sigma();
    let v = |n: &str| pvar(&uni, n);
    let one = Polynomial::one(&uni);

    let rp = v("r").sub(&v("s12").mul(&v("q3")).sub(&v("s23").mul(&v("q1"))));
    let q1p = v("q1").sub(&v("s13").mul(&v("q3")));
    let s11p = v("s11").neg().add(&v("s13").mul(&v("s13")));
    let t1p = v("s13").mul(&v("t3")).sub(&v("t1"));
    let s12p = v("s12").sub(&v("s13").mul(&v("s23"))).scale(&int(2));

    // 2x4 matrix rows.
    let top = [
        q1p.clone(),
        rp.clone(),
        s11p.mul(&v("q3")),
        s11p.mul(&v("q2")),
    ];
    let bot = [v("q3"), v("q2"), q1p, rp];
    let delta = |i: usize, j: usize| top[i].mul(&bot[j]).sub(&top[j].mul(&bot[i]));

    let rhs1 = t1p
        .mul(&delta(0, 1))
        .add(&v("t2").mul(&delta(0, 2)))
        .sub(&v("t3").mul(&delta(1, 2)));
    let rhs2 = s12p
        .mul(&delta(0, 1))
        .sub(&v("s22").mul(&delta(0, 2)))
        .add(&v("s23").mul(&delta(1, 2)).scale(&int(2)))
        .sub(&delta(1, 3));

    let f = build_f(&uni);
    let mut s33_one = BTreeMap::new();
    s33_one.insert("s33".to_string(), one);
    let f2 = f[1].substitute(&s33_one)?;
    let f4 = f[3].substitute(&s33_one)?;

    Ok(f2 == rhs1 && f4 == rhs2)
}

/// One solved chart of the nine-equation variety.
#[derive(Debug, Clone)]
pub struct ChartParametrization {
    pub id: String,
    /// Coordinate set to 1 on the chart slice.
    pub normalized: String,
    /// Eliminated coordinates with their solved right-hand sides.
    pub solved: Vec<(String, Polynomial)>,
    /// The remaining free coordinates.
    pub free: Vec<String>,
}

impl ChartParametrization {
    /// The full substitution map including the normalization.
    pub fn substitution(&self, uni: &Arc<VariableUniverse>) -> BTreeMap<String, Polynomial> {
        let mut map = BTreeMap::new();
        map.insert(self.normalized.clone(), Polynomial::one(uni));
        for (name, rhs) in &self.solved {
            map.insert(name.clone(), rhs.clone());
        }
        map
    }
}

const P1_CHART_SOLVED: [(&str, &str); 4] = [
    ("q1", "-p2*q2 - p3*q3"),
    (
        "r",
        "q3*s12 - q2*s13 + p2*q3*s22 - p2*q2*s23 + p3*q3*s23 - p3*q2*s33 + p4*q3*t2 - p4*q2*t3",
    ),
    (
        "u",
        "q3^2*s22*t1 - 2*q2*q3*s23*t1 + q2^2*s33*t1 - 2*q3^2*s12*t2 + 2*q2*q3*s13*t2 - p2*q3^2*s22*t2 - 2*p3*q3^2*s23*t2 + p2*q2^2*s33*t2 + 2*p3*q2*q3*s33*t2 - p4*q3^2*t2^2 + 2*q2*q3*s12*t3 - 2*q2^2*s13*t3 + 2*p2*q2*q3*s22*t3 + p3*q3^2*s22*t3 - 2*p2*q2^2*s23*t3 - p3*q2^2*s33*t3 + 2*p4*q2*q3*t2*t3 - p4*q2^2*t3^2",
    ),
    (
        "s11",
        "-2*p2*s12 - 2*p3*s13 - p2^2*s22 - 2*p2*p3*s23 - p3^2*s33 - p4*t1 - p2*p4*t2 - p3*p4*t3",
    ),
];

const P2_CHART_SOLVED: [(&str, &str); 4] = [
    ("q2", "-p1*q1 - p3*q3"),
    (
        "r",
        "p3*q1*s33 - p1*q3*s11 - q3*s12 + p1*q1*s13 - p3*q3*s13 + q1*s23 - p4*q3*t1 + p4*q1*t3",
    ),
    (
        "u",
        "p1*q1^2*s33*t1 + 2*p3*q1*q3*s33*t1 - p1*q3^2*s11*t1 - 2*q3^2*s12*t1 - 2*p3*q3^2*s13*t1 + 2*q1*q3*s23*t1 - p4*q3^2*t1^2 + q1^2*s33*t2 + q3^2*s11*t2 - 2*q1*q3*s13*t2 - p3*q1^2*s33*t3 + 2*p1*q1*q3*s11*t3 + p3*q3^2*s11*t3 + 2*q1*q3*s12*t3 - 2*p1*q1^2*s13*t3 - 2*q1^2*s23*t3 + 2*p4*q1*q3*t1*t3 - p4*q1^2*t3^2",
    ),
    (
        "s22",
        "-p3^2*s33 - p1^2*s11 - 2*p1*s12 - 2*p1*p3*s13 - 2*p3*s23 - p1*p4*t1 - p4*t2 - p3*p4*t3",
    ),
];

const U_CHART_SOLVED: [(&str, &str); 4] = [
    (
        "p1",
        "q3^2*s22*t1 - 2*q2*q3*s23*t1 + q2^2*s33*t1 - q3*r*t2 - q3^2*s12*t2 + q2*q3*s13*t2 + q1*q3*s23*t2 - q1*q2*s33*t2 + q2*r*t3 + q2*q3*s12*t3 - q2^2*s13*t3 - q1*q3*s22*t3 + q1*q2*s23*t3",
    ),
    (
        "p2",
        "q3*r*t1 - q3^2*s12*t1 + q2*q3*s13*t1 + q1*q3*s23*t1 - q1*q2*s33*t1 + q3^2*s11*t2 - 2*q1*q3*s13*t2 + q1^2*s33*t2 - q1*r*t3 - q2*q3*s11*t3 + q1*q3*s12*t3 + q1*q2*s13*t3 - q1^2*s23*t3",
    ),
    (
        "p3",
        "-q2*r*t1 + q2*q3*s12*t1 - q2^2*s13*t1 - q1*q3*s22*t1 + q1*q2*s23*t1 + q1*r*t2 - q2*q3*s11*t2 + q1*q3*s12*t2 + q1*q2*s13*t2 - q1^2*s23*t2 + q2^2*s11*t3 - 2*q1*q2*s12*t3 + q1^2*s22*t3",
    ),
    (
        "p4",
        "-r^2 + q3^2*s12^2 - 2*q2*q3*s12*s13 + q2^2*s13^2 - q3^2*s11*s22 + 2*q1*q3*s13*s22 + 2*q2*q3*s11*s23 - 2*q1*q3*s12*s23 - 2*q1*q2*s13*s23 + q1^2*s23^2 - q2^2*s11*s33 + 2*q1*q2*s12*s33 - q1^2*s22*s33",
    ),
];

/// The solved chart parametrizations transcribed from the chart analysis.
pub fn chart(id: &str) -> Result<ChartParametrization, VarietyError> {
    let uni = VariableUniverse::sigma();
    let (normalized, table): (&str, &[(&str, &str)]) = match id {
        "p1" => ("p1", &P1_CHART_SOLVED),
        "p2" => ("p2", &P2_CHART_SOLVED),
        "u" => ("u", &U_CHART_SOLVED),
        other => return Err(VarietyError::UnknownChart(other.to_string())),
    };
    let solved: Vec<(String, Polynomial)> = table
        .iter()
        .map(|(n, rhs)| Ok((n.to_string(), Polynomial::parse(&uni, rhs)?)))
        .collect::<Result<_, VarietyError>>()?;
    let taken: Vec<&str> = std::iter::once(normalized)
        .chain(table.iter().map(|(n, _)| *n))
        .collect();
    let free = uni
        .names()
        .iter()
        .filter(|n| !taken.contains(&n.as_str()))
        .cloned()
        .collect();
    Ok(ChartParametrization {
        id: id.to_string(),
        normalized: normalized.to_string(),
        solved,
        free,
    })
}

/// Symbolic zero test: all equations vanish identically on the chart slice.
pub fn verify_chart_identity(
    pres: &KeyVarietyPresentation,
    chart: &ChartParametrization,
) -> Result<bool, VarietyError> {
    let map = chart.substitution(&pres.universe);
    for (_, eq) in &pres.equations {
        if !eq.substitute(&map)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Draws a small rational: numerator in [-9, 9], denominator in {1, 2, 3}.
pub fn small_rational(rng: &mut ChaCha8Rng) -> BigRational {
    let n: i64 = rng.gen_range(-9..=9);
    let d: i64 = rng.gen_range(1..=3);
    crate::poly::rat(n, d)
}

pub fn small_nonzero_rational(rng: &mut ChaCha8Rng) -> BigRational {
    loop {
        let v = small_rational(rng);
        if !v.is_zero() {
            return v;
        }
    }
}

/// Seed-deterministic exact point on the variety through a chart: free
/// coordinates get small rationals, solved ones are computed, and the
/// normalized coordinate is 1.
pub fn chart_sample(chart: &ChartParametrization, seed: u64) -> Point {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    chart_sample_with(chart, &mut rng, None)
}

/// As `chart_sample`; when `s33_value` is set the coordinate s33 is pinned
/// (value 1 gives points on the s33 = 1 slice).
pub fn chart_sample_with(
    chart: &ChartParametrization,
    rng: &mut ChaCha8Rng,
    s33_value: Option<BigRational>,
) -> Point {
    let mut point: Point = BTreeMap::new();
    for name in &chart.free {
        point.insert(name.clone(), small_rational(rng));
    }
    if let Some(v) = &s33_value {
        if chart.free.iter().any(|n| n == "s33") {
            point.insert("s33".to_string(), v.clone());
        }
    }
    point.insert(chart.normalized.clone(), BigRational::one());
    for (name, rhs) in &chart.solved {
        let v = rhs.evaluate(&point).expect("free coordinates cover RHS");
        point.insert(name.clone(), v);
    }
    point
}

/// Applies the one-parameter coordinate rescaling x -> lambda^w(x) x.
pub fn torus_rescale(
    point: &Point,
    ws: &WeightSystem,
    lambda: &BigRational,
) -> Result<Point, VarietyError> {
    if lambda.is_zero() {
        return Err(VarietyError::ZeroRescale);
    }
    let mut out = Point::new();
    for (name, value) in point {
        let w = ws.weight_of(name).unwrap_or(0);
        out.insert(name.clone(), rational_pow(lambda, w) * value);
    }
    Ok(out)
}

pub fn rational_pow(x: &BigRational, e: i64) -> BigRational {
    let mut acc = BigRational::one();
    let base = if e >= 0 {
        x.clone()
    } else {
        x.recip()
    };
    for _ in 0..e.unsigned_abs() {
        acc *= &base;
    }
    acc
}

/// Samples points with q1 != 0 on the u-chart, rescales each to q1 = 1 with
/// the weight-one grading of q1, and checks that the five Pfaffians of the
/// q1-slice matrix vanish there.
pub fn verify_q1_chart_pfaffians(samples: usize, seed: u64) -> Result<bool, VarietyError> {
    let uni = VariableUniverse::sigma();
    let q1m = build_q1_matrix(&uni);
    let pfs = q1m.sub_pfaffians_5().expect("skew 5x5");
    let ws = WeightSystem::from_free(2, 1, 1, 1, 2, 3).expect("grading with w(q1) = 1");
    let ch = chart("u")?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let point = loop {
            let p = chart_sample_with(&ch, &mut rng, None);
            if !p["q1"].is_zero() {
                break p;
            }
        };
        let lambda = point["q1"].recip();
        let rescaled = torus_rescale(&point, &ws, &lambda)?;
        debug_assert!(rescaled["q1"].is_one());
        for pf in &pfs {
            if !pf.evaluate(&rescaled)?.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    #[test]
    fn e1_is_tpq() {
        let pres = build_sigma14();
        let uni = &pres.universe;
        assert_eq!(
            pres.equation("E1").unwrap(),
            &Polynomial::parse(uni, "p1*q1 + p2*q2 + p3*q3").unwrap()
        );
    }

    #[test]
    fn e9_nonzero_off_variety() {
        let pres = build_sigma14();
        let mut pt: Point = BTreeMap::new();
        for n in pres.universe.names() {
            pt.insert(n.clone(), int(0));
        }
        pt.insert("r".into(), int(1));
        pt.insert("u".into(), int(1));
        pt.insert("p4".into(), int(1));
        // u p4 + r^2 = 2 at this point.
        assert_eq!(
            pres.equation("E9").unwrap().evaluate(&pt).unwrap(),
            int(2)
        );
    }

    #[test]
    fn f4_with_identity_s() {
        let uni = VariableUniverse::sigma();
        let f = build_f(&uni);
        let mut map = BTreeMap::new();
        for n in ["s11", "s22", "s33"] {
            map.insert(n.to_string(), Polynomial::one(&uni));
        }
        for n in ["s12", "s13", "s23"] {
            map.insert(n.to_string(), Polynomial::zero(&uni));
        }
        let got = f[3].substitute(&map).unwrap();
        assert_eq!(
            got,
            Polynomial::parse(&uni, "-1*r^2 - q1^2 - q2^2 - q3^2").unwrap()
        );
    }

    #[test]
    fn f123_vanish_at_q_zero() {
        let uni = VariableUniverse::sigma();
        let f = build_f(&uni);
        let mut map = BTreeMap::new();
        for n in ["q1", "q2", "q3"] {
            map.insert(n.to_string(), Polynomial::zero(&uni));
        }
        for fi in &f[0..3] {
            assert!(fi.substitute(&map).unwrap().is_zero());
        }
    }

    #[test]
    fn tom_matrix_entries() {
        let uni = VariableUniverse::sigma();
        let m = build_tom_matrix(&uni);
        assert!(m.is_skew());
        assert_eq!(m.at(0, 1), &Polynomial::parse(&uni, "q3").unwrap());
        assert_eq!(
            m.at(3, 4),
            &Polynomial::parse(&uni, "s11*p1 + s12*p2 + s13*p3 + p4*t1").unwrap()
        );
    }

    #[test]
    fn pfaffian_correspondence_is_perfect_signed_matching() {
        let matching = pfaffian_correspondence().unwrap();
        assert_eq!(matching.len(), 5);
        // Pf1 <-> E5 with sign +1.
        assert_eq!(matching[0], (1, "E5".to_string(), 1));
        let mut labels: Vec<&str> = matching.iter().map(|(_, l, _)| l.as_str()).collect();
        labels.sort();
        assert_eq!(labels, vec!["E1", "E2", "E3", "E4", "E5"]);
    }

    #[test]
    fn degenerate_matrix_has_no_matching() {
        let uni = VariableUniverse::sigma();
        let zero = SymMatrix::skew_from_upper(&uni, 5, &vec![Polynomial::zero(&uni); 10]);
        let pres = build_sigma14();
        assert!(matches!(
            pfaffian_correspondence_of(&zero, &pres.equations[0..5]),
            Err(VarietyError::NoMatching)
        ));
    }

    #[test]
    fn s33_specialization() {
        let s14 = build_sigma14();
        let s13 = specialize_s33(&s14);
        // E1 is s33-free, hence unchanged.
        assert_eq!(s13.equation("E1"), s14.equation("E1"));
        // F4 loses s33: substitute and compare.
        let uni = &s14.universe;
        let mut map = BTreeMap::new();
        map.insert("s33".to_string(), Polynomial::one(uni));
        let expect = s14.equation("E9").unwrap().substitute(&map).unwrap();
        assert_eq!(s13.equation("E9").unwrap(), &expect);
        assert!(!s13
            .equation("E9")
            .unwrap()
            .support()
            .contains(&"s33".to_string()));
    }

    #[test]
    fn chart_solved_sets() {
        assert_eq!(
            chart("p1")
                .unwrap()
                .solved
                .iter()
                .map(|(n, _)| n.clone())
                .collect::<Vec<_>>(),
            vec!["q1", "r", "u", "s11"]
        );
        assert_eq!(
            chart("p2")
                .unwrap()
                .solved
                .iter()
                .map(|(n, _)| n.clone())
                .collect::<Vec<_>>(),
            vec!["q2", "r", "u", "s22"]
        );
        assert_eq!(
            chart("u")
                .unwrap()
                .solved
                .iter()
                .map(|(n, _)| n.clone())
                .collect::<Vec<_>>(),
            vec!["p1", "p2", "p3", "p4"]
        );
        assert!(matches!(
            chart("q2"),
            Err(VarietyError::UnknownChart(_))
        ));
    }

    #[test]
    fn chart_identities_hold() {
        let pres = build_sigma14();
        for id in ["p1", "p2", "u"] {
            let ch = chart(id).unwrap();
            assert!(
                verify_chart_identity(&pres, &ch).unwrap(),
                "chart {id} identity failed"
            );
        }
    }

    #[test]
    fn sigma13_p1_chart_identity() {
        // The p1-chart of the s33 = 1 slice: substitute s33 = 1 into both the
        // equations and the chart right-hand sides.
        let pres = build_sigma13();
        let uni = &pres.universe;
        let mut ch = chart("p1").unwrap();
        let mut s33_map = BTreeMap::new();
        s33_map.insert("s33".to_string(), Polynomial::one(uni));
        for (_, rhs) in ch.solved.iter_mut() {
            *rhs = rhs.substitute(&s33_map).unwrap();
        }
        ch.free.retain(|n| n != "s33");
        let mut map = ch.substitution(uni);
        map.insert("s33".to_string(), Polynomial::one(uni));
        for (_, eq) in &pres.equations {
            assert!(eq.substitute(&map).unwrap().is_zero());
        }
    }

    #[test]
    fn perturbed_equation_breaks_identity() {
        let mut pres = build_sigma14();
        let uni = pres.universe.clone();
        let one = Polynomial::one(&uni);
        pres.equations[0].1 = pres.equations[0].1.add(&one);
        let ch = chart("p1").unwrap();
        assert!(!verify_chart_identity(&pres, &ch).unwrap());
    }

    #[test]
    fn chart_samples_lie_on_variety() {
        let pres = build_sigma14();
        for id in ["p1", "p2", "u"] {
            let ch = chart(id).unwrap();
            for seed in 0..5u64 {
                let pt = chart_sample(&ch, seed);
                assert!(pres.vanishes_at(&pt).unwrap(), "chart {id} seed {seed}");
            }
        }
    }

    #[test]
    fn chart_sample_is_seed_deterministic() {
        let ch = chart("u").unwrap();
        assert_eq!(chart_sample(&ch, 7), chart_sample(&ch, 7));
        assert_eq!(chart_sample(&ch, 7)["u"], int(1));
    }

    #[test]
    fn torus_rescale_examples() {
        let ws = WeightSystem::from_free(2, 1, 1, 1, 2, 3).unwrap();
        let ch = chart("u").unwrap();
        let pt = chart_sample(&ch, 3);
        // lambda = 1 is the identity.
        let same = torus_rescale(&pt, &ws, &BigRational::one()).unwrap();
        assert_eq!(same, pt);
        // lambda = 2 multiplies r by 4 and u by 8 under this grading.
        let two = torus_rescale(&pt, &ws, &int(2)).unwrap();
        assert_eq!(two["r"], int(4) * &pt["r"]);
        assert_eq!(two["u"], int(8) * &pt["u"]);
        // The rescaled point stays on the variety.
        let pres = build_sigma14();
        assert!(pres.vanishes_at(&two).unwrap());
        let half = torus_rescale(&pt, &ws, &rat(-1, 2)).unwrap();
        assert!(pres.vanishes_at(&half).unwrap());
        assert!(matches!(
            torus_rescale(&pt, &ws, &int(0)),
            Err(VarietyError::ZeroRescale)
        ));
    }

    #[test]
    fn q1_chart_pfaffians_vanish_on_samples() {
        assert!(verify_q1_chart_pfaffians(12, 11).unwrap());
    }

    #[test]
    fn q1_matrix_mutation_control() {
        // Corrupting one entry breaks the vanishing at a sample.
        let uni = VariableUniverse::sigma();
        let mut upper: Vec<Polynomial> = Vec::new();
        let good = build_q1_matrix(&uni);
        for i in 0..5 {
            for j in (i + 1)..5 {
                upper.push(good.at(i, j).clone());
            }
        }
        upper[3] = upper[3].add(&Polynomial::one(&uni)); // entry (1,5)
        let bad = SymMatrix::skew_from_upper(&uni, 5, &upper);
        let ws = WeightSystem::from_free(2, 1, 1, 1, 2, 3).unwrap();
        let ch = chart("u").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pt = loop {
            let p = chart_sample_with(&ch, &mut rng, None);
            if !p["q1"].is_zero() {
                break p;
            }
        };
        let rescaled = torus_rescale(&pt, &ws, &pt["q1"].recip()).unwrap();
        let any_nonzero = bad
            .sub_pfaffians_5()
            .unwrap()
            .iter()
            .any(|pf| !pf.evaluate(&rescaled).unwrap().is_zero());
        assert!(any_nonzero);
    }

    #[test]
    fn xi_equations_and_weights() {
        let xi = build_xi();
        let pres = build_sigma14();
        assert_eq!(xi.equation("X1"), pres.equation("E7"));
        assert_eq!(xi.equation("X2"), pres.equation("E9"));
        // Chart samples of the full variety satisfy the projected system.
        let ch = chart("p1").unwrap();
        let pt = chart_sample(&ch, 2);
        assert!(xi.vanishes_at(&pt).unwrap());
        // Weights 16, 14 under the grading of the class with w(u) = 8.
        let ws = WeightSystem::from_free(13, 7, 8, 9, 7, 8).unwrap();
        assert!(xi
            .equation("X1")
            .unwrap()
            .weighted_degree(|n| ws.weight_of(n).unwrap_or(0))
            .is_homogeneous_of(16));
        assert!(xi
            .equation("X2")
            .unwrap()
            .weighted_degree(|n| ws.weight_of(n).unwrap_or(0))
            .is_homogeneous_of(14));
    }

    #[test]
    fn xi_rewrite_holds() {
        assert!(verify_xi_rewrite().unwrap());
    }

    #[test]
    fn xi_rewrite_mutation_control() {
        // Dropping the primed shift from r breaks the identity.
        let uni = VariableUniverse::sigma();
        let v = |n: &str| Polynomial::var(&uni, n).unwrap();
        let rp = v("r"); // wrong: no shift
        let q1p = v("q1").sub(&v("s13").mul(&v("q3")));
        let s11p = v("s11").neg().add(&v("s13").mul(&v("s13")));
        let t1p = v("s13").mul(&v("t3")).sub(&v("t1"));
        let top = [q1p.clone(), rp.clone(), s11p.mul(&v("q3")), s11p.mul(&v("q2"))];
        let bot = [v("q3"), v("q2"), q1p, rp];
        let delta = |i: usize, j: usize| top[i].mul(&bot[j]).sub(&top[j].mul(&bot[i]));
        let rhs1 = t1p
            .mul(&delta(0, 1))
            .add(&v("t2").mul(&delta(0, 2)))
            .sub(&v("t3").mul(&delta(1, 2)));
        let f = build_f(&uni);
        let mut map = BTreeMap::new();
        map.insert("s33".to_string(), Polynomial::one(&uni));
        let f2 = f[1].substitute(&map).unwrap();
        assert_ne!(f2, rhs1);
    }
}
