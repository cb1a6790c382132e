//! Brute-force dense evaluation of path-sums and diagrams.
//!
//! Bit order: qubit 0 is the most significant bit of a row or column index.
//! Rows are indexed by outputs, columns by inputs.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_integer::Integer;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::diagram::{Diagram, Generator, RawDiagram};
use crate::error::{Error, Result};
use crate::numeric::Phase;
use crate::pathsum::PurePathSum;

pub const DEFAULT_CAP: usize = 20;
pub const DEFAULT_TOL: f64 = 1e-9;

/// Largest common phase denominator evaluated with an exact lookup table.
const MAX_TABLE: i64 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleOptions {
    /// Maximum number of summed Boolean variables, or tensor rank.
    pub cap: usize,
    /// Split work across threads. Ignored without the `parallel` feature.
    pub parallel: bool,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            cap: DEFAULT_CAP,
            parallel: cfg!(feature = "parallel"),
        }
    }
}

impl OracleOptions {
    pub fn sequential() -> Self {
        OracleOptions {
            parallel: false,
            ..Self::default()
        }
    }

    pub fn with_cap(cap: usize) -> Self {
        OracleOptions { cap, ..Self::default() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    /// The `2^n × 2^n` identity.
    pub fn identity(n: usize) -> Self {
        let d = 1 << n;
        let mut m = Self::zeros(d, d);
        for i in 0..d {
            m.data[i * d + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(1, |x| x.len());
        let data = rows.iter().flat_map(|x| x.iter().copied()).collect();
        DenseMatrix { rows: r, cols: c, data }
    }

    /// Builds a matrix from real entries.
    pub fn from_real(rows: &[&[f64]]) -> Self {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, z: Complex64) {
        self.data[r * self.cols + c] = z;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn scale(&self, z: Complex64) -> DenseMatrix {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * z).collect(),
        }
    }

    /// Matrix product `self · other`.
    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows, "matmul shape");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.data[k * other.cols + j];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> DenseMatrix {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.get(i, j).conj();
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Nested `[[re, im], ...]` rows.
    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<Vec<[f64; 2]>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| [self.get(i, j).re, self.get(i, j).im]).collect())
            .collect();
        serde_json::json!(rows)
    }
}

/// Tab-separated rows of `re+imj`.
impl fmt::Display for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| {
                    let z = self.get(i, j);
                    let clean = |x: f64| if x.abs() < 1e-12 { 0.0 } else { x };
                    format!("{}{:+}j", clean(z.re), clean(z.im))
                })
                .collect();
            writeln!(f, "{}", row.join("\t"))?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompareMode {
    ExactScalar,
    UpToGlobalPhase,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Equal,
    /// Largest entrywise difference and where it occurs.
    Unequal {
        max_diff: f64,
        row: usize,
        col: usize,
    },
    ShapeMismatch,
}

impl Verdict {
    pub fn is_equal(&self) -> bool {
        *self == Verdict::Equal
    }
}

pub fn compare(a: &DenseMatrix, b: &DenseMatrix, mode: CompareMode, tol: f64) -> Verdict {
    if a.rows != b.rows || a.cols != b.cols {
        return Verdict::ShapeMismatch;
    }
    let a = match mode {
        CompareMode::ExactScalar => a.clone(),
        CompareMode::UpToGlobalPhase => {
            let pivot = (0..a.data.len()).max_by(|&i, &j| a.data[i].norm().total_cmp(&a.data[j].norm()));
            match pivot {
                Some(p) if a.data[p].norm() > tol && b.data[p].norm() > tol => {
                    let r = b.data[p] / a.data[p];
                    a.scale(r / r.norm())
                }
                _ => a.clone(),
            }
        }
    };
    let mut worst = (0.0f64, 0usize);
    for (i, (x, y)) in a.data.iter().zip(&b.data).enumerate() {
        let d = (x - y).norm();
        if d > worst.0 {
            worst = (d, i);
        }
    }
    if worst.0 <= tol {
        Verdict::Equal
    } else {
        Verdict::Unequal {
            max_diff: worst.0,
            row: worst.1 / a.cols,
            col: worst.1 % a.cols,
        }
    }
}

fn index_of(sig: &[usize], x: u64) -> usize {
    sig.iter().fold(0usize, |acc, &v| (acc << 1) | ((x >> v) & 1) as usize)
}

/// Phase terms as bitmasks, with an exact integer form when available.
struct Terms {
    masks: Vec<u64>,
    turns: Vec<f64>,
    exact: Option<(i64, Vec<i64>, Vec<Complex64>)>,
}

impl Terms {
    fn new(e: &PurePathSum) -> Terms {
        let masks: Vec<u64> = e
            .phi
            .terms()
            .map(|(m, _)| m.vars().iter().fold(0u64, |acc, &v| acc | (1 << v)))
            .collect();
        let turns = e.phi.terms().map(|(_, c)| c.turns()).collect();
        let ratios: Option<Vec<_>> = e.phi.terms().map(|(_, c)| c.as_ratio()).collect();
        let exact = ratios.and_then(|rs| {
            let den = rs.iter().try_fold(1i64, |acc, r| {
                let l = acc.lcm(r.denom());
                (l <= MAX_TABLE).then_some(l)
            })?;
            let nums = rs.iter().map(|r| r.numer() * (den / r.denom())).collect();
            let table = (0..den).map(|j| Phase::new(j, den).to_complex()).collect();
            Some((den, nums, table))
        });
        Terms { masks, turns, exact }
    }

    fn weight(&self, x: u64) -> Complex64 {
        match &self.exact {
            Some((den, nums, table)) => {
                let mut acc = 0i64;
                for (m, n) in self.masks.iter().zip(nums) {
                    if x & m == *m {
                        acc += n;
                    }
                }
                table[acc.rem_euclid(*den) as usize]
            }
            None => {
                let mut t = 0.0;
                for (m, c) in self.masks.iter().zip(&self.turns) {
                    if x & m == *m {
                        t += c;
                    }
                }
                Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * t.fract())
            }
        }
    }
}

/// Dense operator of a pure path-sum: `scalar · Σ_x e^{2πiφ(x)} |x_o⟩⟨x_i|`.
pub fn eval_pathsum(e: &PurePathSum, opts: OracleOptions) -> Result<DenseMatrix> {
    let e = e.compacted();
    let k = e.num_vars();
    if k > opts.cap || k > 62 {
        return Err(Error::CapExceeded {
            needed: k,
            cap: opts.cap,
        });
    }
    let outs: Vec<usize> = e.output_sig.iter().map(|&v| v as usize).collect();
    let ins: Vec<usize> = e.input_sig.iter().map(|&v| v as usize).collect();
    let rows = 1usize << outs.len();
    let cols = 1usize << ins.len();
    let terms = Terms::new(&e);
    let total: u64 = 1 << k;
    let accumulate = |lo: u64, hi: u64| {
        let mut m = DenseMatrix::zeros(rows, cols);
        for x in lo..hi {
            let r = index_of(&outs, x);
            let c = index_of(&ins, x);
            m.data[r * cols + c] += terms.weight(x);
        }
        m
    };
    const CHUNK: u64 = 1 << 12;
    let chunks: Vec<(u64, u64)> = (0..total.div_ceil(CHUNK))
        .map(|i| (i * CHUNK, ((i + 1) * CHUNK).min(total)))
        .collect();
    let parts: Vec<DenseMatrix> = run_chunks(&chunks, opts.parallel, |&(lo, hi)| accumulate(lo, hi));
    let mut out = DenseMatrix::zeros(rows, cols);
    for p in parts {
        for (o, x) in out.data.iter_mut().zip(p.data) {
            *o += x;
        }
    }
    Ok(out.scale(e.scalar.to_complex()))
}

#[cfg(feature = "parallel")]
fn run_chunks<T: Sync, R: Send>(items: &[T], parallel: bool, f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    if parallel {
        items.par_iter().map(f).collect()
    } else {
        items.iter().map(f).collect()
    }
}

#[cfg(not(feature = "parallel"))]
fn run_chunks<T: Sync, R: Send>(items: &[T], _parallel: bool, f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    items.iter().map(f).collect()
}

/// A dense tensor whose axis `i` is wire `axes[i]`; axis 0 is the most
/// significant index bit.
#[derive(Clone, Debug)]
struct Tensor {
    axes: Vec<usize>,
    data: Vec<Complex64>,
}

impl Tensor {
    fn generator(g: Generator, legs: &[usize]) -> Tensor {
        let n = legs.len();
        let size = 1usize << n;
        let full = size - 1;
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let data = (0..size)
            .map(|i| match g {
                Generator::Z => {
                    if i == 0 || i == full {
                        if n == 0 {
                            one * 2.0
                        } else {
                            one
                        }
                    } else {
                        zero
                    }
                }
                Generator::X => {
                    if i.count_ones() % 2 == 0 {
                        one * 2f64.powf(1.0 - n as f64 / 2.0)
                    } else {
                        zero
                    }
                }
                Generator::H(label) => {
                    if i == full {
                        label.value()
                    } else {
                        one
                    }
                }
                Generator::Not => {
                    if i == 1 || i == 2 {
                        one
                    } else {
                        zero
                    }
                }
                Generator::Boundary => unreachable!("boundaries carry no tensor"),
            })
            .collect();
        Tensor {
            axes: legs.to_vec(),
            data,
        }
        .trace_repeats()
    }

    /// Sums over pairs of axes carrying the same wire (self-loops).
    fn trace_repeats(self) -> Tensor {
        let n = self.axes.len();
        let Some((i, j)) = (0..n).find_map(|i| ((i + 1)..n).find(|&j| self.axes[j] == self.axes[i]).map(|j| (i, j)))
        else {
            return self;
        };
        let keep: Vec<usize> = (0..n).filter(|&a| a != i && a != j).collect();
        let mut data = vec![Complex64::new(0.0, 0.0); 1 << keep.len()];
        for (idx, z) in self.data.iter().enumerate() {
            let bit = |a: usize| (idx >> (n - 1 - a)) & 1;
            if bit(i) != bit(j) {
                continue;
            }
            let out = keep.iter().fold(0usize, |acc, &a| (acc << 1) | bit(a));
            data[out] += z;
        }
        Tensor {
            axes: keep.iter().map(|&a| self.axes[a]).collect(),
            data,
        }
        .trace_repeats()
    }

    /// Contracts all wires shared with `other`.
    fn contract(&self, other: &Tensor, parallel: bool) -> Tensor {
        let shared: Vec<usize> = self.axes.iter().copied().filter(|a| other.axes.contains(a)).collect();
        let a_only: Vec<usize> = self.axes.iter().copied().filter(|a| !shared.contains(a)).collect();
        let b_only: Vec<usize> = other.axes.iter().copied().filter(|a| !shared.contains(a)).collect();
        let a = self.permuted(&[a_only.clone(), shared.clone()].concat());
        let b = other.permuted(&[shared.clone(), b_only.clone()].concat());
        let (m, k, n) = (1usize << a_only.len(), 1usize << shared.len(), 1usize << b_only.len());
        let row = |i: usize| {
            let mut out = vec![Complex64::new(0.0, 0.0); n];
            for s in 0..k {
                let x = a.data[i * k + s];
                if x == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for (j, o) in out.iter_mut().enumerate() {
                    *o += x * b.data[s * n + j];
                }
            }
            out
        };
        let rows: Vec<usize> = (0..m).collect();
        let data: Vec<Complex64> = run_chunks(&rows, parallel && m * k * n > 1 << 16, |&i| row(i))
            .into_iter()
            .flatten()
            .collect();
        Tensor {
            axes: [a_only, b_only].concat(),
            data,
        }
    }

    fn permuted(&self, order: &[usize]) -> Tensor {
        if order == self.axes.as_slice() {
            return self.clone();
        }
        let n = self.axes.len();
        let pos: Vec<usize> = order
            .iter()
            .map(|w| self.axes.iter().position(|a| a == w).unwrap())
            .collect();
        let data = (0..self.data.len())
            .map(|idx| {
                let src = pos
                    .iter()
                    .enumerate()
                    .fold(0usize, |acc, (k, &p)| acc | (((idx >> (n - 1 - k)) & 1) << (n - 1 - p)));
                self.data[src]
            })
            .collect();
        Tensor {
            axes: order.to_vec(),
            data,
        }
    }
}

/// Contracts the generator tensors of `d` along its wires.
pub fn eval_raw(d: &RawDiagram, opts: OracleOptions) -> Result<DenseMatrix> {
    let mut tensors: Vec<Tensor> = Vec::new();
    for (n, g) in d.nodes() {
        if g == Generator::Boundary {
            continue;
        }
        let mut legs = Vec::new();
        for (e, a, b) in d.edges() {
            if a == n {
                legs.push(e);
            }
            if b == n {
                legs.push(e);
            }
        }
        if legs.len() > opts.cap {
            return Err(Error::CapExceeded {
                needed: legs.len(),
                cap: opts.cap,
            });
        }
        tensors.push(Tensor::generator(g, &legs));
    }
    while tensors.len() > 1 {
        let mut best: Option<(usize, usize, usize, bool)> = None;
        for i in 0..tensors.len() {
            for j in (i + 1)..tensors.len() {
                let connected = tensors[i].axes.iter().any(|a| tensors[j].axes.contains(a));
                let shared = tensors[i].axes.iter().filter(|a| tensors[j].axes.contains(a)).count();
                let rank = tensors[i].axes.len() + tensors[j].axes.len() - 2 * shared;
                let better = match best {
                    None => true,
                    Some((_, _, r, c)) => (connected && !c) || (connected == c && rank < r),
                };
                if better {
                    best = Some((i, j, rank, connected));
                }
            }
        }
        let (i, j, rank, _) = best.unwrap();
        if rank > opts.cap {
            return Err(Error::CapExceeded {
                needed: rank,
                cap: opts.cap,
            });
        }
        let b = tensors.swap_remove(j);
        let a = tensors.swap_remove(i);
        tensors.push(a.contract(&b, opts.parallel));
    }
    let t = tensors.pop().unwrap_or(Tensor {
        axes: Vec::new(),
        data: vec![Complex64::new(1.0, 0.0)],
    });
    let wire_of = |b: usize| d.incident(b)[0];
    let outs: Vec<usize> = d.outputs.iter().map(|&b| wire_of(b)).collect();
    let ins: Vec<usize> = d.inputs.iter().map(|&b| wire_of(b)).collect();
    let (rows, cols) = (1usize << outs.len(), 1usize << ins.len());
    let n = t.axes.len();
    let axis: BTreeMap<usize, usize> = t.axes.iter().enumerate().map(|(k, &w)| (w, k)).collect();
    let mut out = DenseMatrix::zeros(rows, cols);
    let scalar = d.scalar.to_complex();
    for r in 0..rows {
        for c in 0..cols {
            let mut bits: BTreeMap<usize, usize> = BTreeMap::new();
            let ports = outs
                .iter()
                .enumerate()
                .map(|(q, &w)| (w, (r >> (outs.len() - 1 - q)) & 1))
                .chain(
                    ins.iter()
                        .enumerate()
                        .map(|(q, &w)| (w, (c >> (ins.len() - 1 - q)) & 1)),
                );
            let mut consistent = true;
            for (w, bit) in ports {
                if *bits.entry(w).or_insert(bit) != bit {
                    consistent = false;
                }
            }
            if !consistent {
                continue;
            }
            let idx = bits
                .iter()
                .filter_map(|(w, &bit)| axis.get(w).map(|&k| bit << (n - 1 - k)))
                .sum::<usize>();
            out.set(r, c, t.data[idx] * scalar);
        }
    }
    Ok(out)
}

/// Dense operator of a hypergraph-like diagram, by tensor contraction.
pub fn eval_diagram(d: &Diagram, opts: OracleOptions) -> Result<DenseMatrix> {
    eval_raw(&d.to_raw(), opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::HLabel;
    use crate::numeric::ScalarFactor;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hadamard_box_tensor() {
        let m = eval_raw(&RawDiagram::h_box(1, 1, HLabel::minus_one()), OracleOptions::default()).unwrap();
        assert_eq!(m, DenseMatrix::from_real(&[&[1.0, 1.0], &[1.0, -1.0]]));
    }

    #[test]
    fn arity_zero_spider_is_two() {
        let m = eval_raw(&RawDiagram::z_spider(0, 0), OracleOptions::default()).unwrap();
        assert_eq!(m.entries(), &[c(2.0, 0.0)]);
    }

    #[test]
    fn arity_three_hbox() {
        let m = eval_raw(&RawDiagram::h_box(0, 3, HLabel::minus_one()), OracleOptions::default()).unwrap();
        assert_eq!(m.rows(), 8);
        for i in 0..8 {
            let want = if i == 7 { -1.0 } else { 1.0 };
            assert_eq!(m.get(i, 0), c(want, 0.0));
        }
    }

    #[test]
    fn x_spider_and_not() {
        let x = eval_raw(&RawDiagram::x_spider(1, 1), OracleOptions::default()).unwrap();
        assert!(x.max_abs_diff(&DenseMatrix::identity(1)) < 1e-15);
        let n = eval_raw(&RawDiagram::not(), OracleOptions::default()).unwrap();
        assert_eq!(n, DenseMatrix::from_real(&[&[0.0, 1.0], &[1.0, 0.0]]));
    }

    #[test]
    fn spider_copy_then_merge() {
        let d = RawDiagram::z_spider(1, 2)
            .compose_seq(&RawDiagram::z_spider(2, 1))
            .unwrap();
        let m = eval_raw(&d, OracleOptions::default()).unwrap();
        assert_eq!(m, DenseMatrix::identity(1));
    }

    #[test]
    fn self_loop_on_not_is_zero_trace() {
        let mut d = RawDiagram::new();
        let n = d.add_node(Generator::Not);
        d.add_edge(n, n);
        let m = eval_raw(&d, OracleOptions::default()).unwrap();
        assert_eq!(m.entries(), &[c(0.0, 0.0)]);
    }

    #[test]
    fn spider_pathsum_merge_map() {
        let mut e = PurePathSum::identity(1);
        e.input_sig = vec![0, 0];
        let m = eval_pathsum(&e, OracleOptions::default()).unwrap();
        assert_eq!((m.rows(), m.cols()), (2, 4));
        assert_eq!(m.get(0, 0), c(1.0, 0.0));
        assert_eq!(m.get(1, 3), c(1.0, 0.0));
        assert_eq!(m.entries().iter().filter(|z| z.norm() > 0.0).count(), 2);
    }

    #[test]
    fn scalar_pathsum() {
        let e = PurePathSum::scalar_only(ScalarFactor::sqrt2_pow(2));
        let m = eval_pathsum(&e, OracleOptions::default()).unwrap();
        assert_eq!(m.entries(), &[c(2.0, 0.0)]);
    }

    #[test]
    fn cap_is_enforced() {
        let mut e = PurePathSum::scalar_only(ScalarFactor::one());
        e.vars = (0..25).collect();
        let err = eval_pathsum(&e, OracleOptions::default()).unwrap_err();
        assert_eq!(err, Error::CapExceeded { needed: 25, cap: 20 });
    }

    #[test]
    fn compare_modes() {
        let cnot = DenseMatrix::from_real(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
            &[0.0, 0.0, 1.0, 0.0],
        ]);
        let swap = DenseMatrix::from_real(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
        ]);
        assert!(compare(&cnot, &cnot, CompareMode::ExactScalar, DEFAULT_TOL).is_equal());
        let ic = cnot.scale(c(0.0, 1.0));
        assert!(!compare(&cnot, &ic, CompareMode::ExactScalar, DEFAULT_TOL).is_equal());
        assert!(compare(&cnot, &ic, CompareMode::UpToGlobalPhase, DEFAULT_TOL).is_equal());
        assert!(matches!(
            compare(&cnot, &swap, CompareMode::UpToGlobalPhase, DEFAULT_TOL),
            Verdict::Unequal { .. }
        ));
        assert_eq!(
            compare(&cnot, &DenseMatrix::identity(1), CompareMode::ExactScalar, DEFAULT_TOL),
            Verdict::ShapeMismatch
        );
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let mut e = PurePathSum::identity(3);
        for v in 3..14 {
            e.vars.insert(v);
            e.phi
                .add_term(crate::poly::Monomial::from_vars([v % 3, v]), Phase::new(1, 8));
            e.phi
                .add_term(crate::poly::Monomial::from_vars([v - 1, v]), Phase::half());
        }
        let a = eval_pathsum(&e, OracleOptions::sequential()).unwrap();
        let b = eval_pathsum(&e, OracleOptions::default()).unwrap();
        assert_eq!(a, b);
    }
}
