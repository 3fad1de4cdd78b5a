use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use tcoarse::{
    build_layers, check_sign_condition, check_swap_condition, connect_chain, so_radius, verify_embedding,
    GroupSpec, SequenceSpec, SoFunction, Window,
};
use tcoarse_bench::{boolean_layers, geometric_layers, geometric_prefix};

fn layers(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_layers");
    group.sample_size(10);
    for depth in [4, 6, 8] {
        group.bench_with_input(BenchmarkId::new("boolean_n16", depth), &depth, |b, &d| {
            let w = Window::new(16, d).unwrap();
            b.iter(|| build_layers(&GroupSpec::boolean(), &SequenceSpec::Basis, black_box(w)).unwrap())
        });
    }
    group.bench_function("powers_of_3_n8_d7", |b| {
        let w = Window::new(8, 7).unwrap();
        b.iter(|| build_layers(&GroupSpec::integers(), &SequenceSpec::geometric(3), black_box(w)).unwrap())
    });
    group.finish();
}

fn fs_checks(c: &mut Criterion) {
    let l = geometric_layers(3, 10, 9);
    let p = geometric_prefix(3, 10);
    c.bench_function("sign_condition_3n_len10", |b| b.iter(|| check_sign_condition(&p, &l).unwrap()));
    let p8 = geometric_prefix(3, 8);
    c.bench_function("swap_condition_3n_len8_d4", |b| b.iter(|| check_swap_condition(&p8, &l, 4).unwrap()));
    c.bench_function("verify_embedding_3n_s7_d4", |b| b.iter(|| verify_embedding(&p8, &l, 7, 4).unwrap()));
}

fn ends(c: &mut Criterion) {
    let l = boolean_layers(16, 8);
    let g = GroupSpec::boolean();
    let y = g.parse_element("0:1 1:1 2:1 3:1 4:1").unwrap();
    let z = g.parse_element("9:1 10:1 11:1 12:1 13:1 14:1").unwrap();
    c.bench_function("connect_chain_boolean_n16", |b| b.iter(|| connect_chain(&l, &y, &z, 2, 16).unwrap()));
    let f = SoFunction::constant(&l, false);
    let mut group = c.benchmark_group("so_radius");
    group.sample_size(10);
    group.bench_function("boolean_n16_d8", |b| b.iter(|| so_radius(&f, &l).unwrap()));
    group.finish();
}

criterion_group!(benches, layers, fs_checks, ends);
criterion_main!(benches);
