use proptest::prelude::*;
use recycle_core::{Sampler, SamplerKind};

#[test]
fn iid_frequencies_within_three_sigma() {
    let n = 100_000usize;
    let mut counts = [0usize; 4];
    for i in Sampler::new(SamplerKind::Iid, 4, 17).unwrap().take(n) {
        counts[i] += 1;
    }
    let sigma = (n as f64 * 0.25 * 0.75).sqrt();
    for c in counts {
        assert!(
            (c as f64 - n as f64 / 4.0).abs() <= 3.0 * sigma,
            "{counts:?}"
        );
    }
}

#[test]
fn perm_identity_does_not_repeat_beyond_chance() {
    // 1000 epochs at m=5: identity expected 1000/120 ~ 8.3 times
    let draws: Vec<usize> = Sampler::new(SamplerKind::Perm, 5, 23)
        .unwrap()
        .take(5000)
        .collect();
    let hits = draws.chunks(5).filter(|c| *c == [0, 1, 2, 3, 4]).count();
    assert!(hits <= 25, "identity repeated {hits} times");
    let distinct: std::collections::HashSet<&[usize]> = draws.chunks(5).collect();
    assert!(
        distinct.len() > 100,
        "only {} distinct orders",
        distinct.len()
    );
}

#[test]
fn cyclic_wraps_to_zero() {
    let draws: Vec<usize> = Sampler::new(SamplerKind::Cyclic, 6, 0)
        .unwrap()
        .take(13)
        .collect();
    assert_eq!(draws[6], 0);
    assert_eq!(draws[12], 0);
}

proptest! {
    #[test]
    fn perm_blocks_are_permutations(m in 1usize..40, seed in any::<u64>(), epochs in 1usize..8) {
        let draws: Vec<usize> = Sampler::new(SamplerKind::Perm, m, seed).unwrap().take(m * epochs).collect();
        for block in draws.chunks(m) {
            let mut b = block.to_vec();
            b.sort_unstable();
            prop_assert_eq!(b, (0..m).collect::<Vec<_>>());
        }
    }

    #[test]
    fn equal_seeds_equal_sequences(
        m in 1usize..1000,
        seed in any::<u64>(),
        kind in prop_oneof![Just(SamplerKind::Iid), Just(SamplerKind::Perm), Just(SamplerKind::Cyclic)],
    ) {
        let a: Vec<usize> = Sampler::new(kind, m, seed).unwrap().take(10_000).collect();
        let b: Vec<usize> = Sampler::new(kind, m, seed).unwrap().take(10_000).collect();
        prop_assert!(a.iter().all(|&i| i < m));
        prop_assert_eq!(a, b);
    }
}
