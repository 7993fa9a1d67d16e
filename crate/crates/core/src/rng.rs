//! Named, counter-based random streams derived from one master seed.
//!
//! Every run index gets its own ChaCha stream per purpose, so runs can be
//! scheduled in any order or in parallel without changing their draws.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stream {
    Sampling,
    Selection,
    ThetaInit,
    GammaInit,
    Shots,
    Fixture,
}

impl Stream {
    fn tag(self) -> u64 {
        match self {
            Stream::Sampling => 1,
            Stream::Selection => 2,
            Stream::ThetaInit => 3,
            Stream::GammaInit => 4,
            Stream::Shots => 5,
            Stream::Fixture => 6,
        }
    }
}

pub fn stream_rng(master_seed: u64, run: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream((stream.tag() << 40) | (run & ((1 << 40) - 1)));
    rng
}
