mod support;

use proptest::prelude::*;
use support::{containment, monotone_refinement, root_power, rounding, Case, OPS};

fn case() -> impl Strategy<Value = Case> {
    (1u64..=1_000_000_000_000, 1u64..=1_000_000, 64u32..=512, 0..OPS, 2u32..=9)
        .prop_map(|(num, den, bits, op, k)| Case { num, den, bits, op, k })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn outputs_contain_exact_images(c in case()) {
        containment(&c).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn decided_roundings_hold_up(c in case()) {
        rounding(&c).map_err(TestCaseError::fail)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn doubling_precision_never_widens(c in case()) {
        monotone_refinement(&c).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn root_of_power_meets_input(c in case()) {
        root_power(&c).map_err(TestCaseError::fail)?;
    }
}

#[test]
fn roundings_near_half_integers() {
    // (2m+1)/2 +- 1/den: decided results must match the exact rounding.
    for m in [0u64, 1, 7, 1 << 30] {
        for den in [1_000_000u64, 1 << 20] {
            for num in [(2 * m + 1) * den / 2 - 1, (2 * m + 1) * den / 2 + 1] {
                let c = Case { num, den, bits: 64, op: 7, k: 2 };
                rounding(&c).unwrap();
            }
        }
    }
}
