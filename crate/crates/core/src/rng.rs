//! Named random substreams derived from one root seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent streams carved out of a single root seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Substream {
    Instance,
    Optimizer,
    Sampler,
    Verify,
}

impl Substream {
    fn id(self) -> u64 {
        match self {
            Substream::Instance => 1,
            Substream::Optimizer => 2,
            Substream::Sampler => 3,
            Substream::Verify => 4,
        }
    }
}

/// Returns the ChaCha stream `stream` of the root seed.
pub fn substream(root_seed: u64, stream: Substream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(root_seed);
    rng.set_stream(stream.id());
    rng
}

/// Derives a 64-bit child seed, for APIs that take a plain seed.
pub fn derive_seed(root_seed: u64, stream: Substream) -> u64 {
    use rand::RngCore;
    substream(root_seed, stream).next_u64()
}
