//! Vectorizable inner loops for slope-indexed counting.
//!
//! For a fixed slope `s` the key of a point is `(y - s x) mod p`; it is an
//! intercept of a line with slope `s` exactly when the point lies on that
//! line. `s x mod p` uses Shoup's precomputed quotient `floor(s 2^32 / p)`,
//! which needs `p < 2^31` and only 32-bit lanes. Moving from slope `s` to
//! `s + d` subtracts `d x` from every key, so nearby slopes only need a
//! table of small multiples of `x`.

use std::sync::OnceLock;

#[derive(Debug, Clone, Copy)]
pub(crate) struct SlopeConst {
    s: u32,
    shoup: u32,
}

impl SlopeConst {
    pub(crate) fn new(s: u32, p: u32) -> Self {
        SlopeConst {
            s,
            shoup: (((s as u64) << 32) / p as u64) as u32,
        }
    }
}

#[inline(always)]
fn key(x: u32, y: u32, c: SlopeConst, p: u32) -> u32 {
    let q = ((c.shoup as u64 * x as u64) >> 32) as u32;
    // r in [0, 2p)
    let r = c.s.wrapping_mul(x).wrapping_sub(q.wrapping_mul(p));
    let r = r.min(r.wrapping_sub(p));
    let d = y.wrapping_sub(r);
    d.min(d.wrapping_add(p))
}

fn fill_count_scalar(xs: &[u32], ys: &[u32], c: SlopeConst, ts: &[u32], p: u32, out: &mut [u32]) -> u32 {
    let mut hits = 0;
    for ((&x, &y), o) in xs.iter().zip(ys).zip(out.iter_mut()) {
        *o = key(x, y, c, p);
        hits += ts.contains(o) as u32;
    }
    hits
}

fn step_count_scalar(keys: &mut [u32], mult: &[u32], ts: &[u32], p: u32) -> u32 {
    let mut hits = 0;
    for (k, &d) in keys.iter_mut().zip(mult) {
        let v = k.wrapping_sub(d);
        *k = v.min(v.wrapping_add(p));
        hits += ts.contains(k) as u32;
    }
    hits
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Level {
    Generic,
    #[cfg(target_arch = "x86_64")]
    Avx2,
    #[cfg(target_arch = "x86_64")]
    Avx512,
}

fn level() -> Level {
    static LEVEL: OnceLock<Level> = OnceLock::new();
    *LEVEL.get_or_init(|| {
        #[cfg(target_arch = "x86_64")]
        {
            if std::arch::is_x86_feature_detected!("avx512f") {
                return Level::Avx512;
            }
            if std::arch::is_x86_feature_detected!("avx2") {
                return Level::Avx2;
            }
        }
        Level::Generic
    })
}

#[cfg(target_arch = "x86_64")]
mod x86 {
    use super::*;
    use std::arch::x86_64::*;

    /// `(y - s x) mod p` for 16 lanes.
    #[inline(always)]
    unsafe fn keys16(x: __m512i, y: __m512i, sv: __m512i, shv: __m512i, pv: __m512i) -> __m512i {
        let even = _mm512_mul_epu32(x, shv);
        let odd = _mm512_mul_epu32(_mm512_srli_epi64::<32>(x), shv);
        let q = _mm512_mask_blend_epi32(0xAAAA, _mm512_srli_epi64::<32>(even), odd);
        let r = _mm512_sub_epi32(_mm512_mullo_epi32(sv, x), _mm512_mullo_epi32(q, pv));
        let r = _mm512_min_epu32(r, _mm512_sub_epi32(r, pv));
        let d = _mm512_sub_epi32(y, r);
        _mm512_min_epu32(d, _mm512_add_epi32(d, pv))
    }

    /// `(y - s x) mod p` for 8 lanes.
    #[inline(always)]
    unsafe fn keys8(x: __m256i, y: __m256i, sv: __m256i, shv: __m256i, pv: __m256i) -> __m256i {
        let even = _mm256_mul_epu32(x, shv);
        let odd = _mm256_mul_epu32(_mm256_srli_epi64::<32>(x), shv);
        let q = _mm256_blend_epi32::<0xAA>(_mm256_srli_epi64::<32>(even), odd);
        let r = _mm256_sub_epi32(_mm256_mullo_epi32(sv, x), _mm256_mullo_epi32(q, pv));
        let r = _mm256_min_epu32(r, _mm256_sub_epi32(r, pv));
        let d = _mm256_sub_epi32(y, r);
        _mm256_min_epu32(d, _mm256_add_epi32(d, pv))
    }

    #[inline(always)]
    unsafe fn matches16(k: __m512i, tvs: &[__m512i]) -> u32 {
        tvs.iter().map(|tv| _mm512_cmpeq_epi32_mask(k, *tv).count_ones()).sum()
    }

    #[inline(always)]
    unsafe fn matches8(k: __m256i, tvs: &[__m256i]) -> u32 {
        tvs.iter()
            .map(|tv| (_mm256_movemask_ps(_mm256_castsi256_ps(_mm256_cmpeq_epi32(k, *tv))) as u32).count_ones())
            .sum()
    }

    #[target_feature(enable = "avx512f")]
    pub(super) unsafe fn fill_count_avx512(
        xs: &[u32],
        ys: &[u32],
        c: SlopeConst,
        ts: &[u32],
        p: u32,
        out: &mut [u32],
    ) -> u32 {
        let (sv, shv, pv) = (
            _mm512_set1_epi32(c.s as i32),
            _mm512_set1_epi32(c.shoup as i32),
            _mm512_set1_epi32(p as i32),
        );
        let tvs: Vec<__m512i> = ts.iter().map(|&t| _mm512_set1_epi32(t as i32)).collect();
        let n = xs.len().min(ys.len()).min(out.len());
        let body = n - n % 16;
        let mut hits = 0;
        for i in (0..body).step_by(16) {
            let x = _mm512_loadu_si512(xs.as_ptr().add(i) as *const _);
            let y = _mm512_loadu_si512(ys.as_ptr().add(i) as *const _);
            let k = keys16(x, y, sv, shv, pv);
            _mm512_storeu_si512(out.as_mut_ptr().add(i) as *mut _, k);
            hits += matches16(k, &tvs);
        }
        hits + fill_count_scalar(&xs[body..n], &ys[body..n], c, ts, p, &mut out[body..n])
    }

    #[target_feature(enable = "avx512f")]
    pub(super) unsafe fn step_count_avx512(keys: &mut [u32], mult: &[u32], ts: &[u32], p: u32) -> u32 {
        let pv = _mm512_set1_epi32(p as i32);
        let n = keys.len().min(mult.len());
        let body = n - n % 16;
        let mut hits = 0;
        match ts {
            [t] => {
                let tv = _mm512_set1_epi32(*t as i32);
                for i in (0..body).step_by(16) {
                    let k = _mm512_loadu_si512(keys.as_ptr().add(i) as *const _);
                    let d = _mm512_loadu_si512(mult.as_ptr().add(i) as *const _);
                    let v = _mm512_sub_epi32(k, d);
                    let v = _mm512_min_epu32(v, _mm512_add_epi32(v, pv));
                    _mm512_storeu_si512(keys.as_mut_ptr().add(i) as *mut _, v);
                    hits += _mm512_cmpeq_epi32_mask(v, tv).count_ones();
                }
            }
            _ => {
                let tvs: Vec<__m512i> = ts.iter().map(|&t| _mm512_set1_epi32(t as i32)).collect();
                for i in (0..body).step_by(16) {
                    let k = _mm512_loadu_si512(keys.as_ptr().add(i) as *const _);
                    let d = _mm512_loadu_si512(mult.as_ptr().add(i) as *const _);
                    let v = _mm512_sub_epi32(k, d);
                    let v = _mm512_min_epu32(v, _mm512_add_epi32(v, pv));
                    _mm512_storeu_si512(keys.as_mut_ptr().add(i) as *mut _, v);
                    hits += matches16(v, &tvs);
                }
            }
        }
        hits + step_count_scalar(&mut keys[body..n], &mult[body..n], ts, p)
    }

    #[target_feature(enable = "avx2")]
    pub(super) unsafe fn fill_count_avx2(
        xs: &[u32],
        ys: &[u32],
        c: SlopeConst,
        ts: &[u32],
        p: u32,
        out: &mut [u32],
    ) -> u32 {
        let (sv, shv, pv) = (
            _mm256_set1_epi32(c.s as i32),
            _mm256_set1_epi32(c.shoup as i32),
            _mm256_set1_epi32(p as i32),
        );
        let tvs: Vec<__m256i> = ts.iter().map(|&t| _mm256_set1_epi32(t as i32)).collect();
        let n = xs.len().min(ys.len()).min(out.len());
        let body = n - n % 8;
        let mut hits = 0;
        for i in (0..body).step_by(8) {
            let x = _mm256_loadu_si256(xs.as_ptr().add(i) as *const _);
            let y = _mm256_loadu_si256(ys.as_ptr().add(i) as *const _);
            let k = keys8(x, y, sv, shv, pv);
            _mm256_storeu_si256(out.as_mut_ptr().add(i) as *mut _, k);
            hits += matches8(k, &tvs);
        }
        hits + fill_count_scalar(&xs[body..n], &ys[body..n], c, ts, p, &mut out[body..n])
    }

    #[target_feature(enable = "avx2")]
    pub(super) unsafe fn step_count_avx2(keys: &mut [u32], mult: &[u32], ts: &[u32], p: u32) -> u32 {
        let pv = _mm256_set1_epi32(p as i32);
        let tvs: Vec<__m256i> = ts.iter().map(|&t| _mm256_set1_epi32(t as i32)).collect();
        let n = keys.len().min(mult.len());
        let body = n - n % 8;
        let mut hits = 0;
        for i in (0..body).step_by(8) {
            let k = _mm256_loadu_si256(keys.as_ptr().add(i) as *const _);
            let d = _mm256_loadu_si256(mult.as_ptr().add(i) as *const _);
            let v = _mm256_sub_epi32(k, d);
            let v = _mm256_min_epu32(v, _mm256_add_epi32(v, pv));
            _mm256_storeu_si256(keys.as_mut_ptr().add(i) as *mut _, v);
            hits += matches8(v, &tvs);
        }
        hits + step_count_scalar(&mut keys[body..n], &mult[body..n], ts, p)
    }
}

/// Writes `(ys[i] - s xs[i]) mod p` into `out[i]` and returns how many of
/// them lie in `ts` (distinct, short).
pub(crate) fn fill_count(xs: &[u32], ys: &[u32], c: SlopeConst, ts: &[u32], p: u32, out: &mut [u32]) -> u32 {
    debug_assert!(xs.len() == ys.len() && out.len() >= xs.len());
    match level() {
        Level::Generic => fill_count_scalar(xs, ys, c, ts, p, out),
        // SAFETY: the feature set was detected at runtime.
        #[cfg(target_arch = "x86_64")]
        Level::Avx2 => unsafe { x86::fill_count_avx2(xs, ys, c, ts, p, out) },
        #[cfg(target_arch = "x86_64")]
        Level::Avx512 => unsafe { x86::fill_count_avx512(xs, ys, c, ts, p, out) },
    }
}

/// `keys[i] = (keys[i] - mult[i]) mod p`, returning how many new keys lie in
/// `ts`.
pub(crate) fn step_count(keys: &mut [u32], mult: &[u32], ts: &[u32], p: u32) -> u32 {
    debug_assert!(mult.len() >= keys.len());
    match level() {
        Level::Generic => step_count_scalar(keys, mult, ts, p),
        // SAFETY: the feature set was detected at runtime.
        #[cfg(target_arch = "x86_64")]
        Level::Avx2 => unsafe { x86::step_count_avx2(keys, mult, ts, p) },
        #[cfg(target_arch = "x86_64")]
        Level::Avx512 => unsafe { x86::step_count_avx512(keys, mult, ts, p) },
    }
}

/// Rows `d = 1..=rows` of `d * xs[i] mod p`, concatenated.
pub(crate) fn multiples(xs: &[u32], rows: usize, p: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(xs.len() * rows);
    out.extend_from_slice(xs);
    for r in 1..rows {
        let start = (r - 1) * xs.len();
        for i in 0..xs.len() {
            let v = out[start + i] + xs[i];
            out.push(v.min(v.wrapping_sub(p)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    #[test]
    fn key_matches_reference_arithmetic() {
        let mut rng = SplitMix64::new(5);
        for p in [3u32, 7, 65537, 1_048_573, 2_147_483_647] {
            for _ in 0..2000 {
                let (s, x, y) = (
                    rng.below(p as u64) as u32,
                    rng.below(p as u64) as u32,
                    rng.below(p as u64) as u32,
                );
                let want = ((y as u64 + p as u64 * p as u64 - s as u64 * x as u64) % p as u64) as u32;
                assert_eq!(key(x, y, SlopeConst::new(s, p), p), want, "p={p} s={s} x={x} y={y}");
            }
        }
    }

    #[test]
    fn dispatched_kernels_agree_with_scalar() {
        let mut rng = SplitMix64::new(8);
        for p in [1_000_003u32, 2_147_483_647] {
            let xs: Vec<u32> = (0..1003).map(|_| rng.below(p as u64) as u32).collect();
            let ys: Vec<u32> = (0..1003).map(|_| rng.below(p as u64) as u32).collect();
            let mult = multiples(&xs, 4, p);
            for _ in 0..30 {
                let s = rng.below(p as u64 - 4) as u32;
                let c = SlopeConst::new(s, p);
                let mut a = vec![0; xs.len()];
                let mut b = vec![0; xs.len()];
                let ts = [7, 300, 301, 17].map(|i| {
                    fill_count_scalar(&xs[i..i + 1], &ys[i..i + 1], c, &[], p, &mut b[..1]);
                    b[0]
                });
                for k in 0..=ts.len() {
                    assert_eq!(
                        fill_count(&xs, &ys, c, &ts[..k], p, &mut a),
                        fill_count_scalar(&xs, &ys, c, &ts[..k], p, &mut b)
                    );
                    assert_eq!(a, b);
                }
                // Step by d and compare with a fresh fill at s + d.
                let d = 1 + rng.below(4) as usize;
                let row = &mult[(d - 1) * xs.len()..d * xs.len()];
                let stepped = step_count(&mut a, row, &ts[..2], p);
                let fresh = fill_count_scalar(&xs, &ys, SlopeConst::new(s + d as u32, p), &ts[..2], p, &mut b);
                assert_eq!((stepped, &a), (fresh, &b));
            }
        }
    }

    #[test]
    fn multiples_are_exact() {
        let p = 2_147_483_647u32;
        let xs = [0, 1, p - 1, 123_456_789];
        let m = multiples(&xs, 5, p);
        for d in 1..=5u64 {
            for (i, &x) in xs.iter().enumerate() {
                assert_eq!(m[(d as usize - 1) * xs.len() + i] as u64, d * x as u64 % p as u64);
            }
        }
    }
}
