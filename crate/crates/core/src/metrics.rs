//! Error measurement: empirical Wasserstein distances, the closed-form
//! Gaussian `W₂`, and the exact law of a sampler run on a quadratic potential.

use nalgebra::{DMatrix, DVector, Matrix2, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::assignment;
use crate::error::{ensure_nonnegative, invalid, Error, Result};
use crate::kernels::{eval_kernels, noise_covariance};
use crate::potentials::Potential;
use crate::rng::NormalStream;
use crate::samplers::{Algorithm, SamplerConfig};

/// Largest cloud size accepted by the exact assignment solver.
pub const MAX_ASSIGNMENT_SIZE: usize = 4096;

/// Where the points of a [`SampleCloud`] come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ChainFinalStates,
    IidTarget,
    Oracle,
}

/// `n` points in `ℝ^p`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleCloud {
    n: usize,
    p: usize,
    points: Vec<f64>,
    pub provenance: Provenance,
}

impl SampleCloud {
    pub fn new(rows: &[Vec<f64>], provenance: Provenance) -> Result<Self> {
        let p = rows.first().map(Vec::len).ok_or_else(|| invalid("a sample cloud needs at least one point"))?;
        if let Some(i) = rows.iter().position(|r| r.len() != p) {
            return Err(invalid(format!("point {i} has {} coordinates, expected {p}", rows[i].len())));
        }
        Self::from_row_major(rows.len(), p, rows.concat(), provenance)
    }

    pub fn from_row_major(n: usize, p: usize, points: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if n == 0 || p == 0 {
            return Err(invalid("a sample cloud needs n >= 1 and p >= 1"));
        }
        if points.len() != n * p {
            return Err(invalid(format!("{} values cannot form {n} points of dimension {p}", points.len())));
        }
        if !points.iter().all(|x| x.is_finite()) {
            return Err(invalid("sample cloud entries must be finite"));
        }
        Ok(Self { n, p, points, provenance })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.p..(i + 1) * self.p]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks_exact(self.p)
    }

    /// Values of coordinate `j` across the cloud.
    pub fn coordinate(&self, j: usize) -> Vec<f64> {
        self.points().map(|x| x[j]).collect()
    }

    pub fn mean(&self) -> DVector<f64> {
        let mut m = DVector::zeros(self.p);
        for x in self.points() {
            m += DVector::from_column_slice(x);
        }
        m / self.n as f64
    }

    /// Unbiased sample covariance (zero for a single point).
    pub fn covariance(&self) -> DMatrix<f64> {
        let mean = self.mean();
        let mut c = DMatrix::zeros(self.p, self.p);
        for x in self.points() {
            let d = DVector::from_column_slice(x) - &mean;
            c += &d * d.transpose();
        }
        if self.n > 1 {
            c / (self.n - 1) as f64
        } else {
            c
        }
    }
}

/// A Gaussian law `N(mean, covariance)`, possibly degenerate.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianLaw {
    pub mean: DVector<f64>,
    pub covariance: DMatrix<f64>,
}

fn psd_tolerance(c: &DMatrix<f64>) -> f64 {
    1e-12 * c.amax().max(1.0)
}

impl GaussianLaw {
    /// Checks symmetry and positive semi-definiteness to `1e-12` (relative to the largest entry).
    pub fn new(mean: DVector<f64>, covariance: DMatrix<f64>) -> Result<Self> {
        let p = mean.len();
        if covariance.nrows() != p || covariance.ncols() != p {
            return Err(invalid(format!("covariance must be {p}x{p}")));
        }
        if !mean.iter().chain(covariance.iter()).all(|x| x.is_finite()) {
            return Err(invalid("Gaussian law entries must be finite"));
        }
        let tol = psd_tolerance(&covariance);
        if (&covariance - covariance.transpose()).amax() > tol {
            return Err(invalid("covariance is not symmetric"));
        }
        let sym = (&covariance + covariance.transpose()) * 0.5;
        let min_eig = sym.symmetric_eigenvalues().min();
        if min_eig < -tol {
            return Err(invalid(format!("covariance is not PSD (eigenvalue {min_eig})")));
        }
        Ok(Self { mean, covariance: sym })
    }

    /// `N(0, diag(variances))`.
    pub fn diagonal(variances: &[f64]) -> Result<Self> {
        Self::new(DVector::zeros(variances.len()), DMatrix::from_diagonal(&DVector::from_column_slice(variances)))
    }

    /// The target `exp(-f)` of a diagonal quadratic potential.
    pub fn target_of(potential: &dyn Potential) -> Result<Self> {
        let lambda = potential
            .quadratic_precision()
            .ok_or_else(|| Error::Capability("the potential is not a diagonal quadratic".into()))?;
        Self::diagonal(&lambda.iter().map(|l| 1.0 / l).collect::<Vec<_>>())
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// `E‖θ‖²`.
    pub fn second_moment(&self) -> f64 {
        self.mean.norm_squared() + self.covariance.trace()
    }

    /// `n` iid draws from stream `(seed, chain)`.
    pub fn sample(&self, n: usize, seed: u64, chain: u64) -> Result<SampleCloud> {
        let root = psd_sqrt(&self.covariance);
        let p = self.dim();
        let mut stream = NormalStream::new(seed, chain, p);
        let mut z = vec![0.0; p];
        let mut points = Vec::with_capacity(n * p);
        for i in 0..n {
            stream.fill_slot(i as u64, &mut z);
            let x = &self.mean + &root * DVector::from_column_slice(&z);
            points.extend(x.iter());
        }
        SampleCloud::from_row_major(n, p, points, Provenance::IidTarget)
    }
}

/// Symmetric PSD square root with eigenvalues clamped at zero.
fn psd_sqrt(c: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new((c + c.transpose()) * 0.5);
    let roots = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
    &eig.eigenvectors * DMatrix::from_diagonal(&roots) * eig.eigenvectors.transpose()
}

fn check_order(q: u8) -> Result<()> {
    if q == 1 || q == 2 {
        Ok(())
    } else {
        Err(invalid(format!("q must be 1 or 2, got {q}")))
    }
}

fn pow_q(d: f64, q: u8) -> f64 {
    if q == 1 {
        d
    } else {
        d * d
    }
}

fn root_q(x: f64, q: u8) -> f64 {
    if q == 1 {
        x
    } else {
        x.sqrt()
    }
}

/// Empirical `W_q` between two equal-size 1-D samples through the quantile
/// coupling. Inputs are sorted internally.
pub fn wasserstein_1d(xs: &[f64], ys: &[f64], q: u8) -> Result<f64> {
    check_order(q)?;
    if xs.len() != ys.len() {
        return Err(invalid(format!("sample sizes differ: {} vs {}", xs.len(), ys.len())));
    }
    if xs.is_empty() {
        return Err(invalid("samples must be non-empty"));
    }
    let mut a = xs.to_vec();
    let mut b = ys.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let cost: f64 = a.iter().zip(&b).map(|(x, y)| pow_q((x - y).abs(), q)).sum();
    Ok(root_q(cost / a.len() as f64, q))
}

/// Exact empirical `W_q` between two equal-size clouds via optimal assignment.
pub fn wasserstein_empirical(a: &SampleCloud, b: &SampleCloud, q: u8) -> Result<f64> {
    check_order(q)?;
    if a.n != b.n {
        return Err(invalid(format!("cloud sizes differ: {} vs {}", a.n, b.n)));
    }
    if a.p != b.p {
        return Err(invalid(format!("cloud dimensions differ: {} vs {}", a.p, b.p)));
    }
    if a.n > MAX_ASSIGNMENT_SIZE {
        return Err(Error::Capacity(format!(
            "exact assignment is limited to n <= {MAX_ASSIGNMENT_SIZE} points (got {}); subsample both clouds",
            a.n
        )));
    }
    let n = a.n;
    if a.p == 1 {
        return wasserstein_1d(&a.points, &b.points, q);
    }
    let mut cost = Vec::with_capacity(n * n);
    for x in a.points() {
        for y in b.points() {
            let d2: f64 = x.iter().zip(y).map(|(s, t)| (s - t) * (s - t)).sum();
            cost.push(if q == 1 { d2.sqrt() } else { d2 });
        }
    }
    let (_, total) = assignment::solve(&cost, n);
    Ok(root_q(total.max(0.0) / n as f64, q))
}

/// Closed-form `W₂` between two Gaussian laws.
pub fn gaussian_w2(a: &GaussianLaw, b: &GaussianLaw) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(invalid(format!("dimensions differ: {} vs {}", a.dim(), b.dim())));
    }
    let mean_term = (&a.mean - &b.mean).norm_squared();
    let rb = psd_sqrt(&b.covariance);
    let middle = &rb * &a.covariance * &rb;
    let cross = SymmetricEigen::new((&middle + middle.transpose()) * 0.5)
        .eigenvalues
        .iter()
        .map(|l| l.max(0.0).sqrt())
        .sum::<f64>();
    let w2sq = mean_term + a.covariance.trace() + b.covariance.trace() - 2.0 * cross;
    Ok(w2sq.max(0.0).sqrt())
}

/// Exact law of a sampler run on a diagonal quadratic potential.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainLaw {
    /// Law of `θ_K`.
    pub theta: GaussianLaw,
    /// Law of `(v_K, θ_K)` in that block order, for the kinetic samplers.
    pub joint: Option<GaussianLaw>,
}

/// `x ↦ T x + N(0, S)` on one coordinate, in dimension 1 (LMC) or 2 (`(v, θ)`).
#[derive(Debug, Clone, Copy)]
struct AffineStep {
    t: Matrix2<f64>,
    s: Matrix2<f64>,
}

impl AffineStep {
    fn identity() -> Self {
        Self { t: Matrix2::identity(), s: Matrix2::zeros() }
    }

    /// `other` applied after `self`.
    fn then(&self, other: &AffineStep) -> Self {
        Self { t: other.t * self.t, s: other.t * self.s * other.t.transpose() + other.s }
    }

    fn power(&self, mut k: usize) -> Self {
        let mut result = Self::identity();
        let mut base = *self;
        while k > 0 {
            if k & 1 == 1 {
                result = result.then(&base);
            }
            base = base.then(&base);
            k >>= 1;
        }
        result
    }
}

/// One step on the coordinate with surrogate curvature `a = λ + α`.
fn coordinate_step(config: &SamplerConfig, a: f64) -> Result<AffineStep> {
    let h = config.h;
    Ok(match config.algorithm {
        Algorithm::Lmc => AffineStep {
            t: Matrix2::new(1.0 - h * a, 0.0, 0.0, 0.0),
            s: Matrix2::new(2.0 * h, 0.0, 0.0, 0.0),
        },
        Algorithm::Klmc | Algorithm::Klmc2 => {
            let gamma = config.friction()?;
            let k = eval_kernels(gamma, h)?;
            let c = noise_covariance(gamma, h)?.c;
            let g2 = 2.0 * gamma;
            if config.algorithm == Algorithm::Klmc {
                AffineStep {
                    t: Matrix2::new(k.psi0, -k.psi1 * a, k.psi1, 1.0 - k.psi2 * a),
                    s: g2 * Matrix2::new(c[0][0], c[0][1], c[1][0], c[1][1]),
                }
            } else {
                let s11 = c[0][0] - 2.0 * c[0][2] * a + c[2][2] * a * a;
                let s12 = c[0][1] - (c[0][3] + c[1][2]) * a + c[2][3] * a * a;
                let s22 = c[1][1] - 2.0 * c[1][3] * a + c[3][3] * a * a;
                AffineStep {
                    t: Matrix2::new(k.psi0 - k.phi2 * a, -k.psi1 * a, k.psi1 - k.phi3 * a, 1.0 - k.psi2 * a),
                    s: g2 * Matrix2::new(s11, s12, s12, s22),
                }
            }
        }
    })
}

/// Propagates mean and covariance of the chain exactly through `K` steps.
///
/// The chain starts at `config.initial_theta` (zero by default); kinetic
/// chains draw `v₀ ~ N(0, I)`. Steps are composed by repeated squaring.
pub fn gaussian_chain_law(config: &SamplerConfig, potential: &dyn Potential) -> Result<ChainLaw> {
    let lambda = potential
        .quadratic_precision()
        .ok_or_else(|| Error::Capability("exact chain laws need a diagonal quadratic potential".into()))?
        .to_vec();
    config.validate(potential)?;
    ensure_nonnegative("alpha", config.alpha)?;
    let p = lambda.len();
    let theta0 = config.initial_theta.clone().unwrap_or_else(|| vec![0.0; p]);
    let kinetic = config.algorithm.is_kinetic();

    let mut mean_v = DVector::zeros(p);
    let mut mean_t = DVector::zeros(p);
    let mut joint_cov = DMatrix::zeros(2 * p, 2 * p);
    for i in 0..p {
        let step = coordinate_step(config, lambda[i] + config.alpha)?.power(config.steps);
        if kinetic {
            // (v₀, θ₀) ~ N((0, θ₀ᵢ), diag(1, 0))
            let x0 = nalgebra::Vector2::new(0.0, theta0[i]);
            let m = step.t * x0;
            let cov = step.t * Matrix2::new(1.0, 0.0, 0.0, 0.0) * step.t.transpose() + step.s;
            mean_v[i] = m[0];
            mean_t[i] = m[1];
            joint_cov[(i, i)] = cov[(0, 0)];
            joint_cov[(i, p + i)] = cov[(0, 1)];
            joint_cov[(p + i, i)] = cov[(1, 0)];
            joint_cov[(p + i, p + i)] = cov[(1, 1)];
        } else {
            mean_t[i] = step.t[(0, 0)] * theta0[i];
            joint_cov[(p + i, p + i)] = step.s[(0, 0)];
        }
    }
    let theta_cov = joint_cov.view((p, p), (p, p)).into_owned();
    let theta = GaussianLaw::new(mean_t.clone(), theta_cov)?;
    let joint = if kinetic {
        let mut mean = DVector::zeros(2 * p);
        mean.rows_mut(0, p).copy_from(&mean_v);
        mean.rows_mut(p, p).copy_from(&mean_t);
        Some(GaussianLaw::new(mean, joint_cov)?)
    } else {
        None
    };
    Ok(ChainLaw { theta, joint })
}

/// `dist ≤ ε √μ₂`.
pub fn scaled_error_check(dist: f64, mu2: f64, epsilon: f64) -> bool {
    dist <= epsilon * mu2.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::make_gaussian_potential;

    #[test]
    fn one_dimensional_examples() {
        let xs = [0.3, -1.0, 2.0, 0.7];
        assert_eq!(wasserstein_1d(&xs, &xs, 1).unwrap(), 0.0);
        let shifted: Vec<f64> = xs.iter().map(|x| x + 0.25).collect();
        for q in [1, 2] {
            assert!((wasserstein_1d(&xs, &shifted, q).unwrap() - 0.25).abs() < 1e-15);
        }
        assert!(wasserstein_1d(&xs, &xs[..3], 1).is_err());
        assert!(wasserstein_1d(&xs, &xs, 3).is_err());
    }

    #[test]
    fn permuted_cloud_is_at_distance_zero() {
        let a = SampleCloud::new(&[vec![0.0, 1.0], vec![2.0, 3.0], vec![-1.0, 0.5]], Provenance::Oracle).unwrap();
        let b = SampleCloud::new(&[vec![-1.0, 0.5], vec![0.0, 1.0], vec![2.0, 3.0]], Provenance::Oracle).unwrap();
        assert_eq!(wasserstein_empirical(&a, &b, 2).unwrap(), 0.0);
    }

    #[test]
    fn capacity_cap() {
        let big = SampleCloud::from_row_major(4097, 1, vec![0.0; 4097], Provenance::Oracle).unwrap();
        assert!(matches!(wasserstein_empirical(&big, &big, 1), Err(Error::Capacity(_))));
    }

    #[test]
    fn gaussian_w2_examples() {
        let a = GaussianLaw::diagonal(&[4.0]).unwrap();
        let b = GaussianLaw::diagonal(&[0.25]).unwrap();
        assert!((gaussian_w2(&a, &b).unwrap() - 1.5).abs() < 1e-14);
        assert!(gaussian_w2(&a, &a).unwrap() < 1e-7);
        let c = GaussianLaw::diagonal(&[1.0, 9.0]).unwrap();
        let d = GaussianLaw::new(DVector::from_vec(vec![3.0, 0.0]), DMatrix::from_diagonal(&DVector::from_vec(vec![4.0, 1.0]))).unwrap();
        let expected = (9.0 + 1.0 + 4.0f64).sqrt();
        assert!((gaussian_w2(&c, &d).unwrap() - expected).abs() < 1e-12);
        assert!(GaussianLaw::new(DVector::zeros(1), DMatrix::from_element(1, 1, -1.0)).is_err());
    }

    #[test]
    fn lmc_law_reaches_ar1_fixed_point() {
        let pot = make_gaussian_potential(1, &[1.0]).unwrap();
        let h = 0.1;
        let law = gaussian_chain_law(&SamplerConfig::lmc(0.0, h, 100_000, 0), &pot).unwrap();
        let fixed = 2.0 * h / (1.0 - (1.0 - h) * (1.0 - h));
        assert!((law.theta.covariance[(0, 0)] - fixed).abs() < 1e-10);
        assert!(law.joint.is_none());
    }

    #[test]
    fn zero_steps_is_initial_law() {
        let pot = make_gaussian_potential(2, &[1.0, 2.0]).unwrap();
        let cfg = SamplerConfig::kinetic(Algorithm::Klmc, 0.0, 0.1, 2.0, 0, 0).with_initial_theta(vec![1.0, -1.0]);
        let law = gaussian_chain_law(&cfg, &pot).unwrap();
        assert_eq!(law.theta.mean.as_slice(), &[1.0, -1.0]);
        assert_eq!(law.theta.covariance, DMatrix::zeros(2, 2));
        let joint = law.joint.unwrap();
        assert_eq!(joint.covariance[(0, 0)], 1.0);
    }

    #[test]
    fn power_matches_iteration() {
        let pot = make_gaussian_potential(1, &[0.7]).unwrap();
        let cfg = SamplerConfig::kinetic(Algorithm::Klmc2, 0.1, 0.2, 1.5, 37, 0);
        let one = coordinate_step(&cfg, 0.8).unwrap();
        let mut it = AffineStep::identity();
        for _ in 0..37 {
            it = it.then(&one);
        }
        let pw = one.power(37);
        assert!((it.t - pw.t).amax() < 1e-13 && (it.s - pw.s).amax() < 1e-13);
        assert!(gaussian_chain_law(&cfg, &pot).is_ok());
    }

    #[test]
    fn scaled_error_examples() {
        assert!(scaled_error_check(0.3, 4.0, 0.2));
        assert!(!scaled_error_check(0.5, 4.0, 0.2));
    }
}
