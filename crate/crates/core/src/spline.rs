//! Univariate and tensor-product B-spline spaces with open knot vectors.
//!
//! Spaces live on `[0, 1]` over a uniform mesh of `n` elements. A subset of the
//! mesh knots (every `k`-th one) may carry a different regularity than the
//! rest, which is how geometry breakpoints are kept inside a finer
//! discretization space.

use thiserror::Error;

/// Largest polynomial degree accepted by any space constructor.
pub const MAX_DEGREE: usize = 8;

/// Breakpoint comparison tolerance.
pub const KNOT_TOL: f64 = 1e-13;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SplineError {
    #[error("degree {0} outside the supported range 1..={MAX_DEGREE}")]
    Degree(usize),
    #[error("regularity {r} must be below the degree {p}")]
    Regularity { p: usize, r: usize },
    #[error("number of elements must be at least 1")]
    EmptyMesh,
    #[error("coarse mesh size {h_coarse} is not an integer multiple of {h}")]
    NonIntegerRatio { h: f64, h_coarse: f64 },
    #[error("invalid knot vector: {0}")]
    Knots(String),
    #[error("evaluation point {0} outside [0, 1]")]
    OutOfRange(f64),
}

/// Open knot vector stored both as breakpoints with multiplicities and in
/// expanded form.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotVector {
    degree: usize,
    breakpoints: Vec<f64>,
    multiplicities: Vec<usize>,
    expanded: Vec<f64>,
}

impl KnotVector {
    pub fn new(
        degree: usize,
        breakpoints: Vec<f64>,
        multiplicities: Vec<usize>,
    ) -> Result<Self, SplineError> {
        if degree == 0 || degree > MAX_DEGREE {
            return Err(SplineError::Degree(degree));
        }
        if breakpoints.len() < 2 || breakpoints.len() != multiplicities.len() {
            return Err(SplineError::Knots(
                "need at least the two end breakpoints, one multiplicity each".into(),
            ));
        }
        if breakpoints[0] != 0.0 || *breakpoints.last().unwrap() != 1.0 {
            return Err(SplineError::Knots("breakpoints must start at 0 and end at 1".into()));
        }
        if breakpoints.windows(2).any(|w| !(w[1] - w[0] > KNOT_TOL)) {
            return Err(SplineError::Knots("breakpoints must be strictly increasing".into()));
        }
        let last = multiplicities.len() - 1;
        if multiplicities[0] != degree + 1 || multiplicities[last] != degree + 1 {
            return Err(SplineError::Knots(format!(
                "end multiplicities must equal degree + 1 = {}",
                degree + 1
            )));
        }
        if multiplicities[1..last].iter().any(|&m| m == 0 || m > degree) {
            return Err(SplineError::Knots(format!(
                "interior multiplicities must lie in 1..={degree}"
            )));
        }
        let mut expanded = Vec::with_capacity(multiplicities.iter().sum());
        for (&b, &m) in breakpoints.iter().zip(&multiplicities) {
            expanded.extend(std::iter::repeat(b).take(m));
        }
        Ok(Self { degree, breakpoints, multiplicities, expanded })
    }

    /// Decodes an expanded knot list. Knots closer than [`KNOT_TOL`] are
    /// merged into one breakpoint.
    pub fn from_expanded(degree: usize, knots: &[f64]) -> Result<Self, SplineError> {
        if knots.iter().any(|k| !k.is_finite()) {
            return Err(SplineError::Knots("non-finite knot".into()));
        }
        if knots.windows(2).any(|w| w[1] < w[0] - KNOT_TOL) {
            return Err(SplineError::Knots("knots must be non-decreasing".into()));
        }
        let mut bps: Vec<f64> = Vec::new();
        let mut mults: Vec<usize> = Vec::new();
        for &k in knots {
            match bps.last() {
                Some(&b) if (k - b).abs() <= KNOT_TOL => *mults.last_mut().unwrap() += 1,
                _ => {
                    bps.push(k);
                    mults.push(1);
                }
            }
        }
        if let Some(first) = bps.first_mut() {
            if first.abs() <= KNOT_TOL {
                *first = 0.0;
            }
        }
        if let Some(last) = bps.last_mut() {
            if (*last - 1.0).abs() <= KNOT_TOL {
                *last = 1.0;
            }
        }
        Self::new(degree, bps, mults)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    pub fn expanded(&self) -> &[f64] {
        &self.expanded
    }

    /// Number of basis functions, `len(expanded) - p - 1`.
    pub fn dim(&self) -> usize {
        self.expanded.len() - self.degree - 1
    }

    /// Index `i` of the knot span `[t_i, t_{i+1})` containing `x`, with the
    /// left limit used at `x = 1`.
    fn span(&self, x: f64) -> usize {
        let p = self.degree;
        let n = self.dim();
        let t = &self.expanded;
        if x >= t[n] {
            return n - 1;
        }
        // largest i in [p, n-1] with t[i] <= x
        let (mut lo, mut hi) = (p, n);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if t[mid] <= x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Snaps `x` onto a breakpoint when it lies within [`KNOT_TOL`] of one.
    fn snap(&self, x: f64) -> f64 {
        let i = self.breakpoints.partition_point(|&b| b < x);
        for j in [i.saturating_sub(1), i] {
            if let Some(&b) = self.breakpoints.get(j) {
                if (x - b).abs() <= KNOT_TOL {
                    return b;
                }
            }
        }
        x
    }
}

/// Nonzero basis functions and derivatives at one point.
#[derive(Debug, Clone)]
pub struct BasisValues {
    /// Global index of the first returned function.
    pub first: usize,
    degree: usize,
    ders: Vec<f64>,
}

impl BasisValues {
    /// `k`-th derivative of the local function `j` (global index `first + j`).
    #[inline]
    pub fn get(&self, k: usize, j: usize) -> f64 {
        self.ders[k * (self.degree + 1) + j]
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.ders[k * (self.degree + 1)..(k + 1) * (self.degree + 1)]
    }

    pub fn len(&self) -> usize {
        self.degree + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn max_deriv(&self) -> usize {
        self.ders.len() / (self.degree + 1) - 1
    }
}

/// Regularity layout of a space: `n` uniform elements, regularity `r` at
/// ordinary knots and `r_coarse` at every `k`-th knot. A regularity of at
/// least `p` removes the knot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MixedPattern {
    pub r: usize,
    pub r_coarse: usize,
    pub n: usize,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplineSpace1D {
    knots: KnotVector,
    pattern: MixedPattern,
}

/// `S(p, r, 1/n)` with `n - 1` interior knots of multiplicity `p - r`.
pub fn make_uniform_space(p: usize, r: usize, n: usize) -> Result<SplineSpace1D, SplineError> {
    if r >= p {
        return Err(SplineError::Regularity { p, r });
    }
    SplineSpace1D::with_pattern(p, MixedPattern { r, r_coarse: r, n, k: 1 })
}

/// Mixed-regularity space with fine mesh `h` and coarse mesh `h_coarse`.
pub fn make_mixed_space(
    p: usize,
    r: usize,
    h: f64,
    r_coarse: usize,
    h_coarse: f64,
) -> Result<SplineSpace1D, SplineError> {
    if r >= p {
        return Err(SplineError::Regularity { p, r });
    }
    if r_coarse >= p {
        return Err(SplineError::Regularity { p, r: r_coarse });
    }
    if !(h > 0.0 && h_coarse > 0.0) {
        return Err(SplineError::EmptyMesh);
    }
    let n = integer_ratio(1.0, h).ok_or(SplineError::NonIntegerRatio { h, h_coarse: 1.0 })?;
    let k = integer_ratio(h_coarse, h).ok_or(SplineError::NonIntegerRatio { h, h_coarse })?;
    if k == 0 || n % k != 0 {
        return Err(SplineError::NonIntegerRatio { h, h_coarse });
    }
    SplineSpace1D::with_pattern(p, MixedPattern { r, r_coarse, n, k })
}

fn integer_ratio(a: f64, b: f64) -> Option<usize> {
    let q = a / b;
    let k = q.round();
    ((q - k).abs() < 1e-9 * q.max(1.0) && k >= 1.0).then_some(k as usize)
}

impl SplineSpace1D {
    /// Builds the space for a pattern. Unlike [`make_mixed_space`] this
    /// accepts regularities `>= p`, which drop the corresponding knots.
    pub fn with_pattern(p: usize, pattern: MixedPattern) -> Result<Self, SplineError> {
        let MixedPattern { r, r_coarse, n, k } = pattern;
        if n == 0 {
            return Err(SplineError::EmptyMesh);
        }
        if k == 0 || n % k != 0 {
            return Err(SplineError::NonIntegerRatio { h: 1.0 / n as f64, h_coarse: k as f64 / n as f64 });
        }
        let mut bps = vec![0.0];
        let mut mults = vec![p + 1];
        for i in 1..n {
            let reg = if i % k == 0 { r_coarse } else { r };
            if reg < p {
                bps.push(i as f64 / n as f64);
                mults.push(p - reg);
            }
        }
        bps.push(1.0);
        mults.push(p + 1);
        Ok(Self { knots: KnotVector::new(p, bps, mults)?, pattern })
    }

    /// Polynomials of degree `p` on `[0, 1]` (Bernstein basis).
    pub fn polynomial(p: usize) -> Result<Self, SplineError> {
        Self::with_pattern(p, MixedPattern { r: p, r_coarse: p, n: 1, k: 1 })
    }

    pub fn degree(&self) -> usize {
        self.knots.degree
    }

    pub fn dim(&self) -> usize {
        self.knots.dim()
    }

    pub fn knots(&self) -> &KnotVector {
        &self.knots
    }

    pub fn pattern(&self) -> MixedPattern {
        self.pattern
    }

    /// Number of uniform mesh elements, i.e. `1/h`.
    pub fn num_elements(&self) -> usize {
        self.pattern.n
    }

    pub fn mesh_size(&self) -> f64 {
        1.0 / self.pattern.n as f64
    }

    /// Element `e` of the uniform mesh as an interval.
    pub fn element(&self, e: usize) -> (f64, f64) {
        let n = self.pattern.n as f64;
        (e as f64 / n, (e + 1) as f64 / n)
    }

    /// Basis values and derivatives up to `max_deriv` at `x`.
    pub fn eval_basis(&self, x: f64, max_deriv: usize) -> Result<BasisValues, SplineError> {
        if !(-KNOT_TOL..=1.0 + KNOT_TOL).contains(&x) {
            return Err(SplineError::OutOfRange(x));
        }
        Ok(self.eval_unchecked(x.clamp(0.0, 1.0), max_deriv))
    }

    /// Same as [`Self::eval_basis`] for callers that guarantee `x` in `[0, 1]`.
    pub fn eval_unchecked(&self, x: f64, max_deriv: usize) -> BasisValues {
        let x = self.knots.snap(x);
        let span = self.knots.span(x);
        let ders = ders_basis_funs(&self.knots.expanded, self.knots.degree, span, x, max_deriv);
        BasisValues { first: span - self.knots.degree, degree: self.knots.degree, ders }
    }

    /// Like [`Self::eval_unchecked`] but uses the polynomial piece of the
    /// element `e`, so a point on the element boundary is evaluated from
    /// the inside of `e`.
    pub fn eval_on_element(&self, e: usize, x: f64, max_deriv: usize) -> BasisValues {
        let (a, b) = self.element(e);
        let mid = 0.5 * (a + b);
        let span = self.knots.span(self.knots.snap(mid));
        let ders = ders_basis_funs(&self.knots.expanded, self.knots.degree, span, x, max_deriv);
        BasisValues { first: span - self.knots.degree, degree: self.knots.degree, ders }
    }

    /// Value (or derivative) of the spline with coefficients `coefs`.
    pub fn eval_spline(&self, coefs: &[f64], x: f64, deriv: usize) -> f64 {
        let b = self.eval_unchecked(x, deriv);
        (0..b.len()).map(|j| coefs[b.first + j] * b.get(deriv, j)).sum()
    }

    /// Greville abscissae, one per basis function.
    pub fn greville(&self) -> Vec<f64> {
        let p = self.degree();
        let t = &self.knots.expanded;
        (0..self.dim())
            .map(|i| t[i + 1..=i + p].iter().sum::<f64>() / p as f64)
            .collect()
    }

    /// Support `[t_i, t_{i+p+1}]` of basis function `i`.
    pub fn support(&self, i: usize) -> (f64, f64) {
        let t = &self.knots.expanded;
        (t[i], t[i + self.degree() + 1])
    }

    /// Range of mesh elements on which basis function `i` can be nonzero.
    pub fn element_range(&self, i: usize) -> std::ops::Range<usize> {
        let (a, b) = self.support(i);
        let n = self.pattern.n as f64;
        (a * n).round() as usize..(b * n).round() as usize
    }

    /// Halves the fine mesh size; coarse knots keep their position and
    /// regularity.
    pub fn refine_halve(&self) -> SplineSpace1D {
        let MixedPattern { r, r_coarse, n, k } = self.pattern;
        Self::with_pattern(self.degree(), MixedPattern { r, r_coarse, n: 2 * n, k: 2 * k })
            .expect("refining a valid space")
    }
}

/// Nonzero basis functions and their derivatives on `[t_span, t_span+1)`.
/// Standard triangular scheme (Piegl and Tiller, A2.3).
fn ders_basis_funs(t: &[f64], p: usize, span: usize, x: f64, nd: usize) -> Vec<f64> {
    let mut ndu = [[0.0f64; MAX_DEGREE + 1]; MAX_DEGREE + 1];
    let mut left = [0.0f64; MAX_DEGREE + 1];
    let mut right = [0.0f64; MAX_DEGREE + 1];
    ndu[0][0] = 1.0;
    for j in 1..=p {
        left[j] = x - t[span + 1 - j];
        right[j] = t[span + j] - x;
        let mut saved = 0.0;
        for r in 0..j {
            ndu[j][r] = right[r + 1] + left[j - r];
            let temp = ndu[r][j - 1] / ndu[j][r];
            ndu[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }
    let w = p + 1;
    let mut out = vec![0.0; (nd + 1) * w];
    for j in 0..=p {
        out[j] = ndu[j][p];
    }
    let mut a = [[0.0f64; MAX_DEGREE + 1]; 2];
    for r in 0..=p {
        let (mut s1, mut s2) = (0usize, 1usize);
        a[0][0] = 1.0;
        for k in 1..=nd.min(p) {
            let mut d = 0.0;
            let rk = r as isize - k as isize;
            let pk = p - k;
            if r >= k {
                a[s2][0] = a[s1][0] / ndu[pk + 1][rk as usize];
                d = a[s2][0] * ndu[rk as usize][pk];
            }
            let j1 = if rk >= -1 { 1 } else { (-rk) as usize };
            let j2 = if r as isize - 1 <= pk as isize { k - 1 } else { p - r };
            for j in j1..=j2 {
                let idx = (rk + j as isize) as usize;
                a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][idx];
                d += a[s2][j] * ndu[idx][pk];
            }
            if r <= pk {
                a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
                d += a[s2][k] * ndu[r][pk];
            }
            out[k * w + r] = d;
            std::mem::swap(&mut s1, &mut s2);
        }
    }
    let mut fac = p as f64;
    for k in 1..=nd.min(p) {
        for j in 0..=p {
            out[k * w + j] *= fac;
        }
        fac *= (p - k) as f64;
    }
    out
}

/// Tensor product of two univariate spaces; flat index `i1 + N1 * i2`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorSplineSpace {
    pub u: SplineSpace1D,
    pub v: SplineSpace1D,
}

impl TensorSplineSpace {
    pub fn new(u: SplineSpace1D, v: SplineSpace1D) -> Self {
        Self { u, v }
    }

    pub fn dim(&self) -> usize {
        self.u.dim() * self.v.dim()
    }

    pub fn flat(&self, i1: usize, i2: usize) -> usize {
        i1 + self.u.dim() * i2
    }

    pub fn unflat(&self, idx: usize) -> (usize, usize) {
        (idx % self.u.dim(), idx / self.u.dim())
    }
}
