//! Pointwise identities and inequalities evaluated on sampled data.
//!
//! Every hard claim follows from the sample construction alone; monitored claims depend on
//! geometry the samples do not reproduce. `tS²` is emulated by `ΣT²`.

use serde::Serialize;

use super::sample::{CurvatureSpectrum, GradTensor};

pub const REL_TOL: f64 = 1e-9;
pub const ABS_FLOOR: f64 = 1e-12;
/// Relative constraint residual allowed after projection.
pub const CONSTRAINT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClaimClass {
    Hard,
    Monitored,
    Exploratory,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ClaimId {
    /// Projected tensor satisfies the three constraint families.
    K1,
    /// `S f4 - f3² = ½ Σ (λᵢ-λⱼ)² λᵢ² λⱼ² >= 0`
    I1,
    /// `C = ⅓ Σ (λᵢ+λⱼ+λₖ) T²`
    I2,
    /// `3(A-B)` as one sum and as distinct plus repeated index parts.
    I3,
    /// `|a|² = f`, `⟨a,h⟩ = 0`, `tr a = 0`.
    I4,
    /// Pure-norm and cross entries of the bilinear table.
    T1,
    /// `C² <= ⅓ (A+2B) ΣT²`
    H1,
    /// `-λᵢλⱼ <= ¼ (λᵢ-λⱼ)²`
    H2,
    /// `(x+y)³ <= 4(x³+y³) <= ... <= S f4 - f3²` on sign-eligible triples.
    H3,
    /// Per-index coefficient bounds and the resulting bound on `3(A-B)`.
    H4,
    /// `A-B <= ⅓ (λmax-λmin)² ΣT²`
    M1,
    /// `A-B <= ⅔ S ΣT²`
    M2,
}

impl ClaimId {
    pub const ALL: [ClaimId; 12] = [
        ClaimId::K1,
        ClaimId::I1,
        ClaimId::I2,
        ClaimId::I3,
        ClaimId::I4,
        ClaimId::T1,
        ClaimId::H1,
        ClaimId::H2,
        ClaimId::H3,
        ClaimId::H4,
        ClaimId::M1,
        ClaimId::M2,
    ];

    pub fn class(self) -> ClaimClass {
        match self {
            ClaimId::M1 | ClaimId::M2 => ClaimClass::Monitored,
            _ => ClaimClass::Hard,
        }
    }
}

impl std::fmt::Display for ClaimId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}", self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    /// `lhs = rhs`
    Eq,
    /// `lhs <= rhs`
    Le,
}

/// One evaluated instance: the two sides and the magnitude of the terms that formed them.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Evaluation {
    pub lhs: f64,
    pub rhs: f64,
    pub relation: Relation,
    pub scale: f64,
}

impl Evaluation {
    pub fn eq(lhs: f64, rhs: f64, scale: f64) -> Self {
        Evaluation { lhs, rhs, relation: Relation::Eq, scale }
    }

    pub fn le(lhs: f64, rhs: f64, scale: f64) -> Self {
        Evaluation { lhs, rhs, relation: Relation::Le, scale }
    }

    fn norm(&self) -> f64 {
        self.scale.max(self.lhs.abs()).max(self.rhs.abs())
    }

    /// Signed margin relative to the magnitude; negative means the claim is violated as computed.
    pub fn slack(&self) -> f64 {
        let d = match self.relation {
            Relation::Eq => -(self.lhs - self.rhs).abs(),
            Relation::Le => self.rhs - self.lhs,
        };
        d / self.norm().max(ABS_FLOOR)
    }

    /// Holds up to `REL_TOL` relative with an absolute floor.
    pub fn holds(&self) -> bool {
        let tol = REL_TOL * self.norm() + ABS_FLOOR;
        match self.relation {
            Relation::Eq => (self.lhs - self.rhs).abs() <= tol,
            Relation::Le => self.lhs <= self.rhs + tol,
        }
    }
}

/// The instance with the least slack.
fn worst(evals: impl IntoIterator<Item = Evaluation>) -> Option<Evaluation> {
    evals.into_iter().min_by(|a, b| a.slack().total_cmp(&b.slack()))
}

/// `I1`-`I4` and the table entries `T1`.
pub fn check_identities(spec: &CurvatureSpectrum, t: &GradTensor) -> Vec<(ClaimId, Evaluation)> {
    let l = &spec.lambda;
    let n = spec.n;
    let sc = t.scalars(spec);
    let mut out = Vec::new();

    out.push((ClaimId::K1, Evaluation::le(t.constraint_residual(spec), CONSTRAINT_TOL, 0.0)));

    let (mut pair_sum, mut pair_mag) = (0.0, 0.0);
    for &a in l {
        for &b in l {
            let v = 0.5 * (a - b).powi(2) * a * a * b * b;
            pair_sum += v;
            pair_mag += v.abs();
        }
    }
    let lhs = spec.gram_gap();
    let scale1 = pair_mag.max(spec.s * spec.f4);
    let i1 = worst([Evaluation::eq(lhs, pair_sum, scale1), Evaluation::le(0.0, lhs, scale1)]);
    out.push((ClaimId::I1, i1.expect("two instances")));

    let (mut c3, mut c_mag) = (0.0, 0.0);
    let (mut full, mut distinct, mut repeated, mut mag3) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let t2 = t.get(i, j, k).powi(2);
                let w = (l[i] + l[j] + l[k]) / 3.0;
                c3 += w * t2;
                c_mag += (l[i].abs() + l[j].abs() + l[k].abs()) * t2;
                let q = l[i] * l[i] + l[j] * l[j] + l[k] * l[k] - l[i] * l[j] - l[i] * l[k] - l[j] * l[k];
                full += q * t2;
                mag3 += (l[i] * l[i] + l[j] * l[j] + l[k] * l[k]) * 2.0 * t2;
                if i != j && j != k && i != k {
                    distinct += q * t2;
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i != j {
                repeated += 3.0 * (l[i] - l[j]).powi(2) * t.get(i, i, j).powi(2);
            }
        }
    }
    out.push((ClaimId::I2, Evaluation::eq(sc.c, c3, c_mag)));
    let lhs3 = 3.0 * (sc.a - sc.b);
    let i3 = worst([Evaluation::eq(lhs3, full, mag3), Evaluation::eq(lhs3, distinct + repeated, mag3)]);
    out.push((ClaimId::I3, i3.expect("two instances")));

    // a = h² - y h - (S/n) I in the eigenbasis of h
    let nf = n as f64;
    let a: Vec<f64> = l.iter().map(|x| x * x - spec.y * x - spec.s / nf).collect();
    let a_mag: f64 = l.iter().map(|x| x * x + (spec.y * x).abs() + spec.s / nf).sum();
    let norm_a: f64 = a.iter().map(|x| x * x).sum();
    let a_h: f64 = a.iter().zip(l).map(|(x, y)| x * y).sum();
    let tr_a: f64 = a.iter().sum();
    let lmax = spec.lambda_max.abs().max(spec.lambda_min.abs());
    let i4 = worst([
        Evaluation::eq(norm_a, spec.f, a_mag * a_mag),
        Evaluation::eq(a_h, 0.0, a_mag * lmax),
        Evaluation::eq(tr_a, 0.0, a_mag),
    ]);
    out.push((ClaimId::I4, i4.expect("three instances")));

    // ⟨X⊗Y + Y⊗X, Z⊗W + W⊗Z⟩ = 2(⟨X,Z⟩⟨Y,W⟩ + ⟨X,W⟩⟨Y,Z⟩) for diagonal matrices
    let ip = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>();
    let delta = vec![1.0; n];
    let sym = |x: &[f64], y: &[f64], z: &[f64], w: &[f64]| 2.0 * (ip(x, z) * ip(y, w) + ip(x, w) * ip(y, z));
    let s = spec.s;
    let t1 = worst([
        // |a⊗h + h⊗a|² = 2 f S
        Evaluation::eq(sym(&a, l, &a, l), 2.0 * spec.f * s, 4.0 * a_mag * a_mag * s),
        // |h⊗h|² = S²
        Evaluation::eq(ip(l, l).powi(2), s * s, s * s),
        // |h⊗δ + δ⊗h|² = 2 n S
        Evaluation::eq(sym(l, &delta, l, &delta), 2.0 * nf * s, 4.0 * nf * s),
        Evaluation::eq(2.0 * ip(&a, l) * ip(l, l), 0.0, 2.0 * a_mag * lmax * s),
        Evaluation::eq(sym(&a, l, l, &delta), 0.0, 4.0 * a_mag * lmax * s),
        Evaluation::eq(2.0 * ip(l, l) * ip(l, &delta), 0.0, 2.0 * s * l.iter().map(|x| x.abs()).sum::<f64>()),
    ]);
    out.push((ClaimId::T1, t1.expect("six instances")));
    out
}

/// `H1`-`H4`, `M1`, `M2`.
pub fn check_inequalities(spec: &CurvatureSpectrum, t: &GradTensor) -> Vec<(ClaimId, Evaluation)> {
    let l = &spec.lambda;
    let n = spec.n;
    let sc = t.scalars(spec);
    let sum_sq = t.sum_sq;
    let s = spec.s;
    let lmax2 = spec.lambda_max.abs().max(spec.lambda_min.abs()).powi(2);
    let mut out = Vec::new();

    out.push((ClaimId::H1, Evaluation::le(sc.c * sc.c, (sc.a + 2.0 * sc.b) * sum_sq / 3.0, lmax2 * 9.0 * sum_sq * sum_sq)));

    let mut h2 = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                h2.push(Evaluation::le(-l[i] * l[j], 0.25 * (l[i] - l[j]).powi(2), l[i] * l[i] + l[j] * l[j]));
            }
        }
    }
    if let Some(e) = worst(h2) {
        out.push((ClaimId::H2, e));
    }

    let g = spec.gram_gap();
    let gm = s * spec.f4;
    let mut h3 = Vec::new();
    let mut h4 = Vec::new();
    let pair_term = |i: usize, j: usize| (l[i] - l[j]).powi(2) * l[i] * l[i] * l[j] * l[j];
    for i in 0..n {
        for j in 0..n {
            if j == i {
                continue;
            }
            // -2λᵢλⱼ <= 2((S f4 - f3²)/4)^(1/3)
            h4.push(Evaluation::le(-2.0 * l[i] * l[j], 2.0 * (g / 4.0).max(0.0).cbrt(), lmax2 + gm.cbrt()));
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                let (pij, pik, pjk) = (l[i] * l[j], l[i] * l[k], l[j] * l[k]);
                h4.push(Evaluation::le(-(pij + pik + pjk), g.max(0.0).cbrt(), 3.0 * lmax2 + gm.cbrt()));
                if j < k && pij <= 0.0 && pik <= 0.0 {
                    let (x, y) = (pij.abs(), pik.abs());
                    let mag = 4.0 * (x.powi(3) + y.powi(3)) + gm;
                    let chain = pair_term(i, j) + pair_term(i, k);
                    h3.push(Evaluation::le((x + y).powi(3), 4.0 * (x.powi(3) + y.powi(3)), mag));
                    h3.push(Evaluation::le(4.0 * (x.powi(3) + y.powi(3)), chain, mag));
                    h3.push(Evaluation::le(chain, g, mag));
                    h3.push(Evaluation::le(x + y, g.max(0.0).cbrt(), lmax2 + gm.cbrt()));
                }
            }
        }
    }
    let coefficient = s + 2.0 * (g / 4.0).max(0.0).cbrt();
    h4.push(Evaluation::le(3.0 * (sc.a - sc.b), coefficient * sum_sq, 3.0 * (s + gm.cbrt()) * sum_sq));
    if let Some(e) = worst(h3) {
        out.push((ClaimId::H3, e));
    }
    if let Some(e) = worst(h4) {
        out.push((ClaimId::H4, e));
    }

    let spread = (spec.lambda_max - spec.lambda_min).powi(2);
    out.push((ClaimId::M1, Evaluation::le(sc.a - sc.b, spread * sum_sq / 3.0, 3.0 * lmax2 * sum_sq)));
    out.push((ClaimId::M2, Evaluation::le(sc.a - sc.b, 2.0 * sum_sq * s / 3.0, 3.0 * s * sum_sq)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec5() -> CurvatureSpectrum {
        CurvatureSpectrum::from_lambda(vec![2.0, -1.0, -1.0, 0.0, 0.0]).unwrap()
    }

    fn find(v: &[(ClaimId, Evaluation)], id: ClaimId) -> Evaluation {
        v.iter().find(|(c, _)| *c == id).unwrap().1
    }

    #[test]
    fn gram_gap_by_hand() {
        let ev = find(&check_identities(&spec5(), &GradTensor::zero(5)), ClaimId::I1);
        assert_eq!((ev.lhs, ev.rhs), (72.0, 72.0));
    }

    #[test]
    fn zero_tensor_identities_read_zero() {
        let ids = check_identities(&spec5(), &GradTensor::zero(5));
        for id in [ClaimId::I2, ClaimId::I3] {
            let e = find(&ids, id);
            assert_eq!((e.lhs, e.rhs), (0.0, 0.0));
        }
        assert!(ids.iter().all(|(_, e)| e.holds()));
    }

    #[test]
    fn pair_bound_by_hand() {
        // i, j = first two: -λ₁λ₂ = 2 <= 9/4
        let l = spec5().lambda;
        let e = Evaluation::le(-l[0] * l[1], 0.25 * (l[0] - l[1]).powi(2), 1.0);
        assert_eq!((e.lhs, e.rhs), (2.0, 2.25));
        assert!(find(&check_inequalities(&spec5(), &GradTensor::zero(5)), ClaimId::H2).holds());
    }

    #[test]
    fn cauchy_schwarz_equality_on_one_orbit() {
        let spec = CurvatureSpectrum::from_lambda(vec![1.0, 0.5, 0.25, -0.75, -1.0]).unwrap();
        let t = GradTensor::single_orbit(5, 0, 1, 2, 1.3);
        let e = find(&check_inequalities(&spec, &t), ClaimId::H1);
        assert!((e.lhs - e.rhs).abs() <= 1e-12 * e.rhs);
    }

    #[test]
    fn tolerance_semantics() {
        assert!(Evaluation::eq(1.0, 1.0 + 1e-10, 1.0).holds());
        assert!(!Evaluation::eq(1.0, 1.0 + 1e-8, 1.0).holds());
        assert!(Evaluation::le(1e-13, 0.0, 0.0).holds());
        assert!(!Evaluation::le(2.0, 1.0, 1.0).holds());
        assert!(Evaluation::le(0.0, 1.0, 1.0).slack() > 0.0);
    }

    #[test]
    fn classes_are_fixed() {
        let monitored: Vec<_> = ClaimId::ALL.iter().filter(|c| c.class() == ClaimClass::Monitored).collect();
        assert_eq!(monitored, vec![&ClaimId::M1, &ClaimId::M2]);
    }
}
