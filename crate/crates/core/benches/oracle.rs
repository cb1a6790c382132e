//! Sequential against parallel dense evaluation of path-sums. Without the
//! `parallel` feature both rows run the sequential path.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::Rng;

use zhps::numeric::Phase;
use zhps::oracle::{eval_pathsum, OracleOptions};
use zhps::pathsum::PurePathSum;
use zhps::poly::{Monomial, Var};
use zhps::random;

/// `k` variables, the first two as a one-qubit boundary, with dense cubic
/// phase terms.
fn workload(k: usize) -> PurePathSum {
    let mut r = random::rng(k as u64);
    let vars: Vec<Var> = (0..k as Var).collect();
    let mut e = PurePathSum::identity(0);
    e.vars.extend(vars.iter().copied());
    e.input_sig = vec![0];
    e.output_sig = vec![1];
    for _ in 0..3 * k {
        let m = random::monomial(&mut r, &vars, 3);
        e.phi.add_term(m, Phase::new(r.gen_range(1..16), 16));
    }
    e.phi.add_term(Monomial::from_vars([0, 1]), Phase::half());
    e
}

fn oracle(c: &mut Criterion) {
    let mut g = c.benchmark_group("eval_pathsum");
    g.sample_size(10);
    for k in [14, 17, 20] {
        let e = workload(k);
        let seq = OracleOptions::sequential();
        let par = OracleOptions::default();
        g.bench_with_input(BenchmarkId::new("sequential", k), &e, |b, e| {
            b.iter(|| eval_pathsum(e, seq).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("parallel", k), &e, |b, e| {
            b.iter(|| eval_pathsum(e, par).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, oracle);
criterion_main!(benches);
