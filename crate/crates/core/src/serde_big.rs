//! Big integers serialize as decimal strings so JSON consumers never lose
//! precision.

use num_bigint::BigUint;
use serde::Serializer;

pub fn decimal<S: Serializer>(value: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&value.to_str_radix(10))
}
