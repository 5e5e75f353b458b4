use criterion::{black_box, criterion_group, criterion_main, Criterion};
use rewlab_core::linalg::hermitian_eig;
use rewlab_core::random::{random_hermitian, rng};
use rewlab_core::separability::gilbert;
use rewlab_core::separability::seesaw::max_product_expectation;
use rewlab_core::states::{bell_phase_state, dephase_upb, quqart_pair, upb_family, UpbAngles};
use rewlab_core::{BipartiteOperator, GilbertOptions};

fn eig(c: &mut Criterion) {
    let mut r = rng(1);
    for d in [4, 9, 16] {
        let h = random_hermitian(d, &mut r);
        c.bench_function(&format!("hermitian_eig {d}x{d}"), |b| b.iter(|| hermitian_eig(black_box(&h))));
    }
}

fn seesaw(c: &mut Criterion) {
    let mut r = rng(2);
    let w = BipartiteOperator::new((3, 3), random_hermitian(9, &mut r)).unwrap();
    c.bench_function("see-saw 3x3, 16 restarts", |b| b.iter(|| max_product_expectation(black_box(&w), 16, 3)));
    let sigma = quqart_pair().unwrap().sigma;
    c.bench_function("see-saw 4x4, 16 restarts", |b| {
        b.iter(|| max_product_expectation(black_box(sigma.base()), 16, 3))
    });
}

fn frank_wolfe(c: &mut Criterion) {
    let mut g = c.benchmark_group("gilbert");
    g.sample_size(10);
    let bell = bell_phase_state(0.3).unwrap();
    g.bench_function("bell 0.3", |b| b.iter(|| gilbert(black_box(&bell), &GilbertOptions::default())));
    let (angles, _) = UpbAngles::search(7);
    let upb = dephase_upb(&upb_family(angles).unwrap()).unwrap().sigma;
    g.bench_function("dephased upb", |b| b.iter(|| gilbert(black_box(&upb), &GilbertOptions::default())));
    g.finish();
}

criterion_group!(benches, eig, seesaw, frank_wolfe);
criterion_main!(benches);
