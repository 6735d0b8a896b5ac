//! Completely positive maps in Kraus form, in both the Schrödinger and
//! Heisenberg pictures.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{eigh, ComplexMatrix, ZERO};

/// Kraus elements with operator norm below this are dropped at construction.
pub const KRAUS_PRUNE_EPS: f64 = 1e-12;
/// Allowed `|sum E^dag E - I|` for trace-preserving channels.
pub const TP_EPS: f64 = 1e-8;
/// Density-matrix eigenvalues below this are dropped when building interaction channels.
pub const STATE_PRUNE_EPS: f64 = 1e-12;

/// Channel `rho -> sum_a E_a rho E_a^dag` from `C^dim_in` to `C^dim_out`.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<ComplexMatrix>,
    subnormalized: bool,
}

impl Channel {
    /// Trace-preserving channel; rejects `|sum E^dag E - I| > 1e-8`.
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let ch = Self::assemble(kraus, false)?;
        let deviation = ch.tp_defect();
        if deviation > TP_EPS {
            return Err(Error::NotTracePreserving { deviation });
        }
        Ok(ch)
    }

    /// Trace non-increasing channel (`sum E^dag E <= I`).
    pub fn subnormalized(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let ch = Self::assemble(kraus, true)?;
        let (values, _) = eigh(&ch.kraus_sum());
        let norm = values[values.len() - 1];
        if norm > 1.0 + TP_EPS {
            return Err(Error::NotSubnormalized { norm });
        }
        Ok(ch)
    }

    fn assemble(kraus: Vec<ComplexMatrix>, subnormalized: bool) -> Result<Self> {
        let Some(first) = kraus.first() else {
            return Err(Error::InvalidArgument(
                "a channel needs at least one Kraus element".into(),
            ));
        };
        let (dim_out, dim_in) = (first.rows(), first.cols());
        for k in &kraus {
            if k.rows() != dim_out || k.cols() != dim_in {
                return Err(Error::DimensionMismatch {
                    context: "Kraus element shape",
                    expected: dim_out * dim_in,
                    found: k.rows() * k.cols(),
                });
            }
        }
        let kept: Vec<ComplexMatrix> = kraus.into_iter().filter(|k| !negligible(k)).collect();
        if kept.is_empty() && !subnormalized {
            return Err(Error::NotTracePreserving { deviation: 1.0 });
        }
        let kraus = if kept.is_empty() {
            alloc::vec![ComplexMatrix::zeros(dim_out, dim_in)]
        } else {
            kept
        };
        Ok(Self {
            dim_in,
            dim_out,
            kraus,
            subnormalized,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            dim_in: n,
            dim_out: n,
            kraus: alloc::vec![ComplexMatrix::identity(n)],
            subnormalized: false,
        }
    }

    pub fn unitary(u: &ComplexMatrix) -> Result<Self> {
        check_unitary(u)?;
        Self::new(alloc::vec![u.clone()])
    }

    /// `rho -> sum_i p_i U_i rho U_i^dag`, Kraus elements `sqrt(p_i) U_i`.
    pub fn mixed_unitary(terms: &[(f64, ComplexMatrix)]) -> Result<Self> {
        let mut kraus = Vec::with_capacity(terms.len());
        for (p, u) in terms {
            if !(p.is_finite() && *p >= 0.0) {
                return Err(Error::InvalidArgument(alloc::format!("invalid weight {p}")));
            }
            check_unitary(u)?;
            kraus.push(u.scale_re(libm::sqrt(*p)));
        }
        Self::new(kraus)
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn is_subnormalized(&self) -> bool {
        self.subnormalized
    }

    /// `sum_a E_a^dag E_a`.
    pub fn kraus_sum(&self) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.dim_in, self.dim_in);
        for k in &self.kraus {
            acc += &(&k.adjoint() * k);
        }
        acc
    }

    /// `|sum E^dag E - I|` in the spectral norm.
    pub fn tp_defect(&self) -> f64 {
        (&self.kraus_sum() - &ComplexMatrix::identity(self.dim_in)).op_norm()
    }

    /// `sum_a E_a rho E_a^dag`.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        check_side(rho, self.dim_in, "channel input")?;
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            out += &(&(k * rho) * &k.adjoint());
        }
        Ok(out)
    }

    /// Heisenberg picture: `sum_a E_a^dag X E_a`.
    pub fn dual_apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        check_side(x, self.dim_out, "dual channel input")?;
        let mut out = ComplexMatrix::zeros(self.dim_in, self.dim_in);
        for k in &self.kraus {
            out += &(&(&k.adjoint() * x) * k);
        }
        Ok(out)
    }

    /// Tensor product channel with Kraus elements `E_a (x) F_b`.
    pub fn tensor(&self, other: &Channel) -> Channel {
        let mut kraus = Vec::with_capacity(self.kraus.len() * other.kraus.len());
        for a in &self.kraus {
            for b in &other.kraus {
                kraus.push(a.kron(b));
            }
        }
        Channel {
            dim_in: self.dim_in * other.dim_in,
            dim_out: self.dim_out * other.dim_out,
            kraus,
            subnormalized: self.subnormalized || other.subnormalized,
        }
    }

    /// `sum_ij |i><j| (x) E(|i><j|)`.
    pub fn choi(&self) -> ComplexMatrix {
        let (din, dout) = (self.dim_in, self.dim_out);
        let side = din * dout;
        let mut out = ComplexMatrix::zeros(side, side);
        for k in &self.kraus {
            // |K>> = sum_i |i> (x) K|i>
            let v: Vec<Complex64> = (0..side).map(|idx| k[(idx % dout, idx / dout)]).collect();
            for r in 0..side {
                if v[r] == ZERO {
                    continue;
                }
                for c in 0..side {
                    out[(r, c)] += v[r] * v[c].conj();
                }
            }
        }
        out
    }

    /// Equality as maps, decided on Choi matrices.
    pub fn same_map(&self, other: &Channel, eps: f64) -> bool {
        self.dim_in == other.dim_in
            && self.dim_out == other.dim_out
            && (&self.choi() - &other.choi()).op_norm() <= eps
    }

    /// Channel with elements `E'_b = sum_a mixing[b, a] E_a` for an isometric mixing.
    pub fn mix_kraus(&self, mixing: &ComplexMatrix) -> Result<Channel> {
        if mixing.cols() != self.kraus.len() {
            return Err(Error::DimensionMismatch {
                context: "Kraus mixing columns",
                expected: self.kraus.len(),
                found: mixing.cols(),
            });
        }
        let deviation = mixing.isometry_defect();
        if deviation > TP_EPS {
            return Err(Error::NotIsometry { deviation });
        }
        let kraus = (0..mixing.rows())
            .map(|b| {
                let mut acc = ComplexMatrix::zeros(self.dim_out, self.dim_in);
                for (a, e) in self.kraus.iter().enumerate() {
                    acc += &e.scale(mixing[(b, a)]);
                }
                acc
            })
            .collect();
        Self::assemble(kraus, self.subnormalized)
    }
}

/// `second ∘ first`, with Kraus elements `F_b E_a`.
pub fn compose(second: &Channel, first: &Channel) -> Result<Channel> {
    if first.dim_out != second.dim_in {
        return Err(Error::DimensionMismatch {
            context: "channel composition",
            expected: first.dim_out,
            found: second.dim_in,
        });
    }
    let mut kraus = Vec::with_capacity(first.kraus.len() * second.kraus.len());
    for f in &second.kraus {
        for e in &first.kraus {
            kraus.push(f * e);
        }
    }
    let subnormalized = first.subnormalized || second.subnormalized;
    let mut ch = Channel::assemble(kraus, true)?;
    ch.subnormalized = subnormalized;
    Ok(ch)
}

fn negligible(k: &ComplexMatrix) -> bool {
    let hs = k.hs_norm();
    hs < KRAUS_PRUNE_EPS || (hs < 1e-9 && k.op_norm() < KRAUS_PRUNE_EPS)
}

fn check_side(m: &ComplexMatrix, n: usize, context: &'static str) -> Result<()> {
    if m.rows() != n || m.cols() != n {
        return Err(Error::DimensionMismatch {
            context,
            expected: n,
            found: if m.rows() != n { m.rows() } else { m.cols() },
        });
    }
    Ok(())
}

pub(crate) fn check_unitary(u: &ComplexMatrix) -> Result<()> {
    if !u.is_square() {
        return Err(Error::NotUnitary {
            deviation: f64::INFINITY,
        });
    }
    let deviation = u.isometry_defect();
    if deviation > TP_EPS {
        return Err(Error::NotUnitary { deviation });
    }
    Ok(())
}

pub(crate) fn check_density(rho: &ComplexMatrix) -> Result<()> {
    if !rho.is_square() {
        return Err(Error::NotDensityMatrix("not square".into()));
    }
    let herm = (rho - &rho.adjoint()).max_abs();
    if herm > TP_EPS {
        return Err(Error::NotDensityMatrix(alloc::format!(
            "not Hermitian (defect {herm:e})"
        )));
    }
    let tr = rho.trace();
    if (tr - Complex64::new(1.0, 0.0)).norm() > TP_EPS {
        return Err(Error::NotDensityMatrix(alloc::format!(
            "trace {} != 1",
            tr.re
        )));
    }
    let (values, _) = eigh(rho);
    if values[0] < -TP_EPS {
        return Err(Error::NotDensityMatrix(alloc::format!(
            "negative eigenvalue {:e}",
            values[0]
        )));
    }
    Ok(())
}

/// Column-stochastic matrix: `p[(i, j)]` is the probability of moving from `j` to `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

/// Column sums must equal one within this.
pub const STOCHASTIC_EPS: f64 = 1e-10;

impl StochasticMatrix {
    /// Row-major entries; every column must be a probability vector.
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "stochastic matrix entries",
                expected: rows * cols,
                found: entries.len(),
            });
        }
        for (k, &v) in entries.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidProbability {
                    row: k / cols,
                    column: k % cols,
                    value: v,
                });
            }
        }
        for j in 0..cols {
            let sum: f64 = (0..rows).map(|i| entries[i * cols + j]).sum();
            if (sum - 1.0).abs() > STOCHASTIC_EPS {
                return Err(Error::ColumnSum { column: j, sum });
            }
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = alloc::vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1.0;
        }
        Self {
            rows: n,
            cols: n,
            entries,
        }
    }

    /// Every transition equally likely.
    pub fn uniform(n: usize) -> Self {
        Self {
            rows: n,
            cols: n,
            entries: alloc::vec![1.0 / n as f64; n * n],
        }
    }

    /// Real-valued view of a complex matrix (imaginary parts must vanish).
    pub fn from_matrix(m: &ComplexMatrix) -> Result<Self> {
        if let Some(k) = m.data().iter().position(|z| z.im.abs() > STOCHASTIC_EPS) {
            return Err(Error::InvalidProbability {
                row: k / m.cols(),
                column: k % m.cols(),
                value: m.data()[k].im,
            });
        }
        Self::new(m.rows(), m.cols(), m.data().iter().map(|z| z.re).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Matrix product `self * other` (apply `other` first).
    pub fn then_after(&self, other: &StochasticMatrix) -> Result<StochasticMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                context: "stochastic product",
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut entries = alloc::vec![0.0; self.rows * other.cols];
        for i in 0..self.rows {
            for j in 0..other.cols {
                entries[i * other.cols + j] = (0..self.cols)
                    .map(|k| self.get(i, k) * other.get(k, j))
                    .sum();
            }
        }
        Ok(StochasticMatrix {
            rows: self.rows,
            cols: other.cols,
            entries,
        })
    }
}

/// Classical channel with one element `sqrt(p_ij) |i><j|` per nonzero transition.
pub fn classical_channel(p: &StochasticMatrix) -> Channel {
    let mut kraus = Vec::new();
    for i in 0..p.rows {
        for j in 0..p.cols {
            let pij = p.get(i, j);
            if pij > 0.0 {
                let mut e = ComplexMatrix::zeros(p.rows, p.cols);
                e[(i, j)] = Complex64::new(libm::sqrt(pij), 0.0);
                kraus.push(e);
            }
        }
    }
    Channel::assemble(kraus, false).expect("stochastic matrices always have a nonzero entry")
}

/// Which side of a system-apparatus interaction survives the partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    /// `rho_S -> Tr_A U (rho_S (x) rho_A) U^dag`
    System,
    /// `rho_S -> Tr_S U (rho_S (x) rho_A) U^dag`
    Apparatus,
}

/// Reduced dynamics of an interaction `U` on `S (x) A` with the apparatus prepared in `rho_a`.
///
/// With `rho_a = sum_m q_m |m><m|`, the Kraus elements are
/// `sqrt(q_m) (I (x) <a|) U (I (x) |m>)` when keeping `S`, and
/// `sqrt(q_m) (<s| (x) I) U (I (x) |m>)` when keeping `A`.
pub fn from_unitary_interaction(
    u: &ComplexMatrix,
    (dim_s, dim_a): (usize, usize),
    rho_a: &ComplexMatrix,
    keep: Keep,
) -> Result<Channel> {
    if u.rows() != dim_s * dim_a || !u.is_square() {
        return Err(Error::DimensionMismatch {
            context: "interaction unitary side",
            expected: dim_s * dim_a,
            found: u.rows(),
        });
    }
    check_unitary(u)?;
    check_side(rho_a, dim_a, "apparatus state")?;
    check_density(rho_a)?;

    let (values, vectors) = eigh(rho_a);
    let mut kraus = Vec::new();
    for (m, &q) in values.iter().enumerate() {
        if q < STATE_PRUNE_EPS {
            continue;
        }
        let w = libm::sqrt(q);
        let ket = vectors.column(m);
        // U (I (x) |m>) as a (dim_s * dim_a) x dim_s matrix
        let lifted = ComplexMatrix::from_fn(dim_s * dim_a, dim_s, |row, s| {
            let mut acc = ZERO;
            for (a2, &c) in ket.iter().enumerate() {
                acc += u[(row, s * dim_a + a2)] * c;
            }
            acc * w
        });
        match keep {
            Keep::System => {
                for a in 0..dim_a {
                    kraus.push(ComplexMatrix::from_fn(dim_s, dim_s, |s1, s| {
                        lifted[(s1 * dim_a + a, s)]
                    }));
                }
            }
            Keep::Apparatus => {
                for s0 in 0..dim_s {
                    kraus.push(ComplexMatrix::from_fn(dim_a, dim_s, |a1, s| {
                        lifted[(s0 * dim_a + a1, s)]
                    }));
                }
            }
        }
    }
    Channel::new(kraus)
}
