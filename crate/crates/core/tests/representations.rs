mod common;

use causalthermo_core::channels::random_channel;
use causalthermo_core::processes::{
    apply_comb, comb_ising2, comb_ising3, AuxState, CausalOrder, LuganoWiring,
};
use causalthermo_core::tensor::random::random_density;
use causalthermo_core::{DensityState, KrausChannel, ProcessKind, Superchannel, SystemLayout};
use common::oracles::{circuit_output, ising_u};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn kinds() -> Vec<ProcessKind> {
    vec![
        ProcessKind::Composition(CausalOrder::AThenB),
        ProcessKind::Composition(CausalOrder::BThenA),
        ProcessKind::Composition3("ABC".into()),
        ProcessKind::Composition3("CAB".into()),
        ProcessKind::Mixture(0.3),
        ProcessKind::Switch2,
        ProcessKind::Switch3,
        ProcessKind::Ising2,
        ProcessKind::Ising3,
        ProcessKind::Replacement(0.7),
    ]
}

#[test]
fn contraction_matches_circuits() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for kind in kinds() {
        let sc = Superchannel::build(kind.clone()).unwrap();
        for _ in 0..5 {
            let chans: Vec<KrausChannel> =
                (0..sc.arity()).map(|_| random_channel(&mut rng, 2, 2)).collect();
            let rho = random_density(&mut rng, 4);
            let j = sc.output_channel_kraus(&chans).unwrap();
            let got = j.apply_operator(&rho).unwrap();
            let want = circuit_output(&kind, &chans, &rho).unwrap();
            let err = got.max_abs_diff(&want);
            assert!(err < 1e-9, "{kind}: {err:e}");
        }
    }
}

#[test]
fn oracle_unitary_agrees_with_library() {
    let d = ising_u().max_abs_diff(&causalthermo_core::processes::ising_unitary());
    assert!(d < 1e-10, "{d:e}");
}

#[test]
fn ising_comb_matches_process_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for (recipe, kind) in [(comb_ising2(), ProcessKind::Ising2), (comb_ising3(), ProcessKind::Ising3)] {
        let sc = Superchannel::build(kind).unwrap();
        let chans: Vec<KrausChannel> =
            (0..sc.arity()).map(|_| random_channel(&mut rng, 2, 3)).collect();
        let layout = SystemLayout::qubits(&["S_I", "Q_I"]).unwrap();
        let rho = DensityState::new(random_density(&mut rng, 4), layout).unwrap();
        let direct = apply_comb(&recipe, &chans, &rho).unwrap();
        let via = sc
            .output_channel_kraus(&chans)
            .unwrap()
            .apply_operator(rho.matrix())
            .unwrap();
        assert!(direct.matrix().max_abs_diff(&via) < 1e-9);
    }
}

#[test]
fn lugano_with_identity_channels_is_trace_preserving() {
    let id = KrausChannel::identity(2);
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for aux in [AuxState::Zero, AuxState::Plus] {
        let sc = Superchannel::build(ProcessKind::Lugano(LuganoWiring::new(aux))).unwrap();
        let j = sc.output_channel_kraus(&[id.clone(), id.clone(), id.clone()]).unwrap();
        let rho = random_density(&mut rng, 4);
        let out = j.apply_operator(&rho).unwrap();
        assert!((out.trace().re - 1.0).abs() < 1e-10);
        assert!(out.trace().im.abs() < 1e-12);
    }
}
