use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Separates the random streams of independent experiments sharing a seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamDomain {
    D2d,
    Cellular,
    ZfOracle,
    Custom(u64),
}

impl StreamDomain {
    fn tag(self) -> u64 {
        match self {
            StreamDomain::D2d => 1,
            StreamDomain::Cellular => 2,
            StreamDomain::ZfOracle => 3,
            StreamDomain::Custom(t) => 0x1000 + t,
        }
    }
}

/// Key for all streams of one `(seed, domain)` pair.
pub(crate) fn stream_key(master_seed: u64, domain: StreamDomain) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(b"d2d-mimo/stream");
    h.update(master_seed.to_le_bytes());
    h.update(domain.tag().to_le_bytes());
    h.finalize().into()
}

pub(crate) fn keyed_stream(key: [u8; 32], index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

/// Counter-based substream `index` of `(master_seed, domain)`.
pub fn substream(master_seed: u64, domain: StreamDomain, index: u64) -> ChaCha8Rng {
    keyed_stream(stream_key(master_seed, domain), index)
}
