//! Fixed-width unsigned integers stored as little-endian `u64` limbs inside
//! flat buffers. The DP knows an upper bound for every cell (the sphere
//! size of its level), so all cells of a slice share one width and additions
//! never allocate.

use num_bigint::BigUint;

/// Limbs needed to hold any value `<= bound`.
pub fn width_for(bound: &BigUint) -> usize {
    (bound.bits() as usize).div_ceil(64).max(1)
}

/// `dst += src`. `src` may be narrower than `dst`.
#[inline]
pub fn add_into(dst: &mut [u64], src: &[u64]) {
    debug_assert!(src.len() <= dst.len());
    let mut carry = false;
    for (d, &s) in dst.iter_mut().zip(src) {
        let (v1, c1) = d.overflowing_add(s);
        let (v2, c2) = v1.overflowing_add(carry as u64);
        *d = v2;
        carry = c1 | c2;
    }
    if carry {
        for d in &mut dst[src.len()..] {
            let (v, c) = d.overflowing_add(1);
            *d = v;
            if !c {
                return;
            }
        }
        panic!("limb overflow");
    }
}

/// `dst += src * k`.
#[inline]
pub fn mul_add_into(dst: &mut [u64], src: &[u64], k: u64) {
    if k == 1 {
        return add_into(dst, src);
    }
    debug_assert!(src.len() <= dst.len());
    let mut carry: u128 = 0;
    for (d, &s) in dst.iter_mut().zip(src) {
        let t = *d as u128 + s as u128 * k as u128 + carry;
        *d = t as u64;
        carry = t >> 64;
    }
    let mut i = src.len();
    while carry != 0 {
        let t = dst[i] as u128 + carry;
        dst[i] = t as u64;
        carry = t >> 64;
        i += 1;
    }
}

#[inline]
pub fn is_zero(src: &[u64]) -> bool {
    src.iter().all(|&x| x == 0)
}

pub fn to_biguint(src: &[u64]) -> BigUint {
    let digits: Vec<u32> = src.iter().flat_map(|&x| [x as u32, (x >> 32) as u32]).collect();
    BigUint::new(digits)
}
