use approxhom::derived::{derive, long_exact_sequence};
use approxhom::functor::{functor_property_report, Tensor};
use approxhom::resolution::build_resolution;
use approxhom::suites::{run_suite, SuiteConfig};
use approxhom::Category;
use approxhom_bench::{lie3, mixed_module, quotients, z4};
use criterion::{criterion_group, criterion_main, Criterion};

fn resolutions(c: &mut Criterion) {
    let e = z4();
    let x = mixed_module(&e);
    c.bench_function("resolve z4 mixed to degree 6", |b| {
        b.iter(|| build_resolution(&e, &x, 6, 0).unwrap())
    });
    let l = lie3();
    let h = l.coproduct_of(&l.heisenberg(), &l.abelian(1)).object;
    c.bench_function("resolve lie2 heisenberg+a1", |b| {
        b.iter(|| build_resolution(&l, &h, 3, 0).unwrap())
    });
}

fn derived(c: &mut Criterion) {
    let e = z4();
    let f = Tensor::new(e.backend().clone(), 2);
    let x = mixed_module(&e);
    c.bench_function("tor over z4 to degree 6", |b| {
        b.iter(|| derive(&f, &e, &x, 6, 0, None).unwrap())
    });
    let report = functor_property_report(&f, &e, 20, 0);
    let seqs = quotients(&e, 4);
    c.bench_function("long exact sequences", |b| {
        b.iter(|| {
            seqs.iter()
                .all(|s| long_exact_sequence(&f, &e, s, 3, &report).unwrap().exact())
        })
    });
}

fn suites(c: &mut Criterion) {
    let e = z4();
    let cfg = SuiteConfig {
        samples: 20,
        ..SuiteConfig::default()
    };
    let mut g = c.benchmark_group("suites z4");
    g.sample_size(10);
    for name in ["subtraction-laws", "homotopies", "horseshoe", "simplicial"] {
        g.bench_function(name, |b| b.iter(|| run_suite(name, &e, &cfg).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, resolutions, derived, suites);
criterion_main!(benches);
