//! Fixtures shared by the benchmarks.

use approxhom::diff::Engine;
use approxhom::functor::{sample_quotient, sample_rng};
use approxhom::{Backend, Lie2Backend, ModBackend, ResidueRing, ShortExactSequence};

pub fn z4() -> Engine<ModBackend<ResidueRing>> {
    Engine::new(ModBackend::new(ResidueRing::new(4).unwrap()))
}

pub fn lie3() -> Engine<Lie2Backend<ResidueRing>> {
    Engine::new(Lie2Backend::new(ResidueRing::prime_field(3).unwrap()).unwrap())
}

/// Three copies of Z/2 and two free summands; every level of its resolution is nonzero.
pub fn mixed_module(
    e: &Engine<ModBackend<ResidueRing>>,
) -> <ModBackend<ResidueRing> as Backend>::Obj {
    e.cyclic_sum_i64(&[2, 0, 2, 0, 2])
}

pub fn quotients(
    e: &Engine<ModBackend<ResidueRing>>,
    n: u64,
) -> Vec<ShortExactSequence<ModBackend<ResidueRing>>> {
    (0..n)
        .map(|i| sample_quotient(&**e, &mut sample_rng(11, 11, i), 3))
        .collect()
}
