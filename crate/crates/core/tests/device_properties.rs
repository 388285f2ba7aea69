use afc_core::device::{equal_rabi_power_ratio, DeviceModel, DEFAULT_ANCHOR_POWER, DEFAULT_ANCHOR_RABI};
use proptest::prelude::*;

proptest! {
    #[test]
    fn quadruple_power_doubles_rabi(p in 0.0..1e-2f64, area in 1e-14..1e-9f64) {
        let d = DeviceModel { mode_area: area, ..DeviceModel::default() };
        prop_assert_eq!(d.rabi_from_power(4.0 * p).unwrap(), 2.0 * d.rabi_from_power(p).unwrap());
    }

    #[test]
    fn area_ratios_invert(a in 1e-15..1e-6f64, b in 1e-15..1e-6f64) {
        let r = equal_rabi_power_ratio(a, b).unwrap() * equal_rabi_power_ratio(b, a).unwrap();
        prop_assert!((r - 1.0).abs() <= 2.0 * f64::EPSILON);
    }

    #[test]
    fn power_rabi_round_trip(rabi in 1e3..1e10f64) {
        let d = DeviceModel::default();
        let back = d.rabi_from_power(d.power_for_rabi(rabi).unwrap()).unwrap();
        prop_assert!((back / rabi - 1.0).abs() < 1e-14);
    }
}

#[test]
fn anchor_reproduces_itself() {
    let d = DeviceModel::default();
    assert_eq!(d.rabi_from_power(DEFAULT_ANCHOR_POWER).unwrap(), DEFAULT_ANCHOR_RABI);
    assert_eq!(d.power_for_rabi(DEFAULT_ANCHOR_RABI).unwrap(), DEFAULT_ANCHOR_POWER);
}
