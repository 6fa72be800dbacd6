//! Ziggurat sampler for the unit-rate exponential distribution
//! (Marsaglia & Tsang, 256 layers).

use std::sync::OnceLock;

const LAYERS: usize = 256;
/// Start of the tail region.
const R: f64 = 7.697_117_470_131_05;
/// Area of each layer.
const V: f64 = 3.949_659_822_581_557e-3;

struct Tables {
    x: [f64; LAYERS + 1],
    f: [f64; LAYERS + 1],
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut x = [0.0; LAYERS + 1];
        x[0] = V / (-R).exp();
        x[1] = R;
        for i in 2..LAYERS {
            x[i] = -(V / x[i - 1] + (-x[i - 1]).exp()).ln();
        }
        x[LAYERS] = 0.0;
        let mut f = [0.0; LAYERS + 1];
        for (fi, xi) in f.iter_mut().zip(x.iter()) {
            *fi = (-xi).exp();
        }
        Tables { x, f }
    })
}

/// Maps the top 52 bits to the open interval (0, 1). With 53 bits the
/// largest value would round up to 1.
#[inline]
pub(crate) fn open_unit(bits: u64) -> f64 {
    ((bits >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
}

/// Bits consumed by the fast path: 8 for the layer, 48 for the position.
pub(crate) const FAST_PATH_BITS: u32 = 56;

/// Draws a unit-rate exponential variate. `take(k)` must return `k` fresh
/// random bits in the low end of the word. The fast path uses 56 bits so
/// that a point and a small component index fit into one 64-bit block.
#[inline]
pub(crate) fn sample_unit_exponential(mut take: impl FnMut(u32) -> u64) -> f64 {
    let t = tables();
    loop {
        let bits = take(FAST_PATH_BITS);
        let i = (bits & 0xff) as usize;
        let u = ((bits >> 8) as f64 + 0.5) * (1.0 / (1u64 << 48) as f64);
        let x = u * t.x[i];
        if x < t.x[i + 1] {
            return x;
        }
        if i == 0 {
            return R - open_unit(take(52) << 12).ln();
        }
        if t.f[i + 1] + (t.f[i] - t.f[i + 1]) * open_unit(take(52) << 12) < (-x).exp() {
            return x;
        }
    }
}
