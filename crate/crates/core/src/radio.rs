//! First-order radio energy model.
//!
//! Transmitting `k` bits over distance `d` costs `k*E_elec + k*E_fs*d^2`
//! below the threshold distance and `k*E_elec + k*E_mp*d^4` at or above it;
//! receiving costs `k*E_elec`; aggregating costs `E_DA` per bit per message.
//! All energies are double-precision SI joules.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Radio constants. Defaults are the classic first-order values used
/// throughout the literature on cluster-based WSN protocols.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadioParams {
    /// Electronics energy, joules per bit (transmit and receive).
    pub e_elec: f64,
    /// Free-space amplifier energy, joules per bit per m^2.
    pub e_fs: f64,
    /// Multipath amplifier energy, joules per bit per m^4.
    pub e_mp: f64,
    /// Data aggregation energy, joules per bit per message.
    pub e_da: f64,
    /// Data message size in bits.
    pub msg_bits: u32,
    /// Control/advertisement message size in bits.
    pub ctrl_bits: u32,
}

impl Default for RadioParams {
    fn default() -> Self {
        RadioParams {
            e_elec: 50e-9,
            e_fs: 10e-12,
            e_mp: 0.0013e-12,
            e_da: 5e-9,
            msg_bits: 4000,
            ctrl_bits: 400,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum RadioParamsError {
    #[error("radio.{0} must be strictly positive")]
    NonPositive(&'static str),
    #[error("radio.e_fs must exceed radio.e_mp (threshold distance must be > 1 m)")]
    AmplifierOrder,
}

impl RadioParams {
    pub fn validate(&self) -> Result<(), RadioParamsError> {
        for (name, v) in [
            ("e_elec", self.e_elec),
            ("e_fs", self.e_fs),
            ("e_mp", self.e_mp),
            ("e_da", self.e_da),
        ] {
            if !(v > 0.0) {
                return Err(RadioParamsError::NonPositive(name));
            }
        }
        if self.msg_bits == 0 {
            return Err(RadioParamsError::NonPositive("msg_bits"));
        }
        if self.ctrl_bits == 0 {
            return Err(RadioParamsError::NonPositive("ctrl_bits"));
        }
        if self.e_fs < self.e_mp {
            return Err(RadioParamsError::AmplifierOrder);
        }
        Ok(())
    }

    /// Crossover distance between the free-space and multipath amplifier
    /// branches: `sqrt(e_fs / e_mp)`.
    pub fn threshold_distance(&self) -> f64 {
        (self.e_fs / self.e_mp).sqrt()
    }

    /// Energy to transmit `bits` over `distance` meters. The multipath
    /// branch applies exactly at the threshold distance.
    pub fn tx_energy(&self, bits: u32, distance: f64) -> f64 {
        let b = bits as f64;
        if distance < self.threshold_distance() {
            b * self.e_elec + b * self.e_fs * distance * distance
        } else {
            let d2 = distance * distance;
            b * self.e_elec + b * self.e_mp * d2 * d2
        }
    }

    /// Energy to receive `bits`.
    pub fn rx_energy(&self, bits: u32) -> f64 {
        bits as f64 * self.e_elec
    }

    /// Energy to aggregate `n_messages` messages of `bits` bits each.
    pub fn aggregation_energy(&self, bits: u32, n_messages: u32) -> f64 {
        bits as f64 * n_messages as f64 * self.e_da
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn threshold_distance_default_params() {
        let p = RadioParams::default();
        let d0 = p.threshold_distance();
        // 87.7058..., rounded to 88 m in the usual parameter tables.
        assert!((d0 - 87.7058).abs() < 1e-3, "d0 = {d0}");
        assert_eq!(d0.round(), 88.0);
    }

    #[test]
    fn threshold_distance_ratio_identities() {
        let mut p = RadioParams::default();
        p.e_fs = 1e-12;
        p.e_mp = 1e-12;
        assert_eq!(p.threshold_distance(), 1.0);
        p.e_fs = 4e-12;
        assert_eq!(p.threshold_distance(), 2.0);
    }

    #[test]
    fn tx_energy_free_space_branch() {
        let p = RadioParams::default();
        // 4000 bits at 50 m: 4000*50nJ + 4000*10pJ*2500 = 3.0e-4 J
        let e = p.tx_energy(4000, 50.0);
        assert!((e - 3.0e-4).abs() < 1e-12, "e = {e}");
    }

    #[test]
    fn tx_energy_multipath_branch() {
        let p = RadioParams::default();
        // 100 m >= d0, so 4000*50nJ + 4000*0.0013pJ*1e8 = 7.2e-4 J
        let e = p.tx_energy(4000, 100.0);
        assert!((e - 7.2e-4).abs() < 1e-12, "e = {e}");
    }

    #[test]
    fn tx_energy_zero_bits() {
        let p = RadioParams::default();
        assert_eq!(p.tx_energy(0, 10.0), 0.0);
        assert_eq!(p.tx_energy(0, 1000.0), 0.0);
    }

    #[test]
    fn rx_energy_values() {
        let p = RadioParams::default();
        assert!((p.rx_energy(4000) - 2.0e-4).abs() < 1e-15);
        assert_eq!(p.rx_energy(0), 0.0);
        assert!((p.rx_energy(1) - 5.0e-8).abs() < 1e-20);
    }

    #[test]
    fn aggregation_energy_values() {
        let p = RadioParams::default();
        assert!((p.aggregation_energy(4000, 10) - 2.0e-4).abs() < 1e-15);
        assert_eq!(p.aggregation_energy(4000, 0), 0.0);
        assert!((p.aggregation_energy(1, 1) - 5.0e-9).abs() < 1e-20);
    }

    #[test]
    fn branches_cross_at_threshold() {
        let p = RadioParams::default();
        let d0 = p.threshold_distance();
        let fs = p.e_fs * d0 * d0;
        let mp = p.e_mp * d0 * d0 * d0 * d0;
        assert!((fs - mp).abs() <= 1e-12 * fs.abs(), "fs = {fs}, mp = {mp}");
    }

    #[test]
    fn validate_rejects_bad_params() {
        let mut p = RadioParams::default();
        p.e_fs = -1.0;
        assert_eq!(
            p.validate(),
            Err(RadioParamsError::NonPositive("e_fs"))
        );
        let mut q = RadioParams::default();
        q.e_mp = 1.0;
        assert_eq!(q.validate(), Err(RadioParamsError::AmplifierOrder));
    }

    proptest! {
        #[test]
        fn tx_monotone_in_bits_and_distance(
            b1 in 0u32..20_000, b2 in 0u32..20_000,
            d1 in 0.0f64..500.0, d2 in 0.0f64..500.0,
        ) {
            let p = RadioParams::default();
            let (blo, bhi) = (b1.min(b2), b1.max(b2));
            let (dlo, dhi) = (d1.min(d2), d1.max(d2));
            prop_assert!(p.tx_energy(blo, dlo) <= p.tx_energy(bhi, dlo));
            prop_assert!(p.tx_energy(bhi, dlo) <= p.tx_energy(bhi, dhi));
        }

        #[test]
        fn tx_at_least_rx(b in 0u32..20_000, d in 0.0f64..500.0) {
            let p = RadioParams::default();
            prop_assert!(p.tx_energy(b, d) >= p.rx_energy(b));
        }

        #[test]
        fn energies_linear_in_bits(b in 1u32..10_000, d in 0.0f64..300.0) {
            let p = RadioParams::default();
            let tol = 1e-12;
            let tx1 = p.tx_energy(b, d);
            let tx2 = p.tx_energy(2 * b, d);
            prop_assert!((tx2 - 2.0 * tx1).abs() <= tol * tx2.abs().max(1e-30));
            let rx1 = p.rx_energy(b);
            let rx2 = p.rx_energy(2 * b);
            prop_assert!((rx2 - 2.0 * rx1).abs() <= tol * rx2.abs().max(1e-30));
            let ag1 = p.aggregation_energy(b, 3);
            let ag2 = p.aggregation_energy(2 * b, 3);
            prop_assert!((ag2 - 2.0 * ag1).abs() <= tol * ag2.abs().max(1e-30));
        }
    }
}
