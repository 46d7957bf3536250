//! Working-precision selection.
//!
//! Runs choose a significand width in bits. 53 is plain `f64`; wider widths
//! map onto the MPFR-backed types in [`crate::numkernels::real`].

use crate::error::{Error, Result};

pub const SUPPORTED_BITS: [u32; 6] = [53, 128, 256, 512, 1024, 2048];

pub fn check_bits(bits: u32) -> Result<u32> {
    if SUPPORTED_BITS.contains(&bits) {
        Ok(bits)
    } else {
        Err(Error::Config(format!(
            "unsupported precision {bits} bits (choose one of {SUPPORTED_BITS:?})"
        )))
    }
}

/// Runs `$body` with `$t` bound to the scalar type for `$bits`. The body
/// must evaluate to a `Result`.
#[macro_export]
macro_rules! with_precision {
    ($bits:expr, $t:ident => $body:expr) => {{
        match $bits {
            53 => {
                type $t = f64;
                $body
            }
            128 => {
                type $t = $crate::numkernels::Mp128;
                $body
            }
            256 => {
                type $t = $crate::numkernels::Mp256;
                $body
            }
            512 => {
                type $t = $crate::numkernels::Mp512;
                $body
            }
            1024 => {
                type $t = $crate::numkernels::Mp1024;
                $body
            }
            2048 => {
                type $t = $crate::numkernels::Mp2048;
                $body
            }
            other => Err($crate::error::Error::Config(format!(
                "unsupported precision {other} bits (choose one of {:?})",
                $crate::precision::SUPPORTED_BITS
            ))),
        }
    }};
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernels::Real;

    #[test]
    fn dispatch_selects_width() {
        for bits in SUPPORTED_BITS {
            let got: Result<u32> = with_precision!(bits, T => Ok(<T as Real>::BITS));
            assert_eq!(got.unwrap(), bits);
        }
        let bad: Result<u32> = with_precision!(64u32, T => Ok(<T as Real>::BITS));
        assert!(matches!(bad, Err(Error::Config(_))));
        assert!(check_bits(100).is_err());
    }
}
