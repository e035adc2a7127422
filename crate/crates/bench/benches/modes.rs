use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use wvasim_core::hg_modes::{apply_tilt, flipped_mode, mode_amplitude, split_overlap};
use wvasim_core::{BeamGeometry, ModeExpansion, ModeIndex, N_MAX};

fn bench(c: &mut Criterion) {
    let g = BeamGeometry::new(1064e-9, 1.86e-3).unwrap();
    let top = ModeIndex::new(N_MAX).unwrap();
    c.bench_function("mode_amplitude_n16", |b| b.iter(|| mode_amplitude(top, black_box(1e-3), &g).unwrap()));
    c.bench_function("split_overlap_15_0", |b| {
        b.iter(|| split_overlap(ModeIndex::new(15).unwrap(), ModeIndex::new(0).unwrap(), black_box(&g)).unwrap())
    });
    c.bench_function("flipped_mode", |b| b.iter(|| flipped_mode(black_box(&g), top).unwrap()));
    let u0 = ModeExpansion::pure(g, ModeIndex::new(0).unwrap());
    c.bench_function("apply_tilt", |b| b.iter(|| apply_tilt(black_box(&u0), 3e-5).unwrap()));
}

criterion_group!(benches, bench);
criterion_main!(benches);
