//! Per-trial seed derivation.
//!
//! Seeds depend only on `(master seed, engine label, trial index)`, so adding
//! trials or engines never perturbs existing ones.

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

pub fn trial_seed(master: u64, engine_label: &str, trial: u64) -> u64 {
    let stream = splitmix64(master ^ splitmix64(fnv1a(engine_label.as_bytes())));
    splitmix64(stream ^ splitmix64(trial.wrapping_add(0x5851_f42d_4c95_7f2d)))
}
