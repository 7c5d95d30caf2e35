//! Ready-made models: the three-circuit assembly example and two twin-house
//! style buildings built from the published constructions.
//!
//! Geometry (areas, volumes), the window transmittance and glazing U-value
//! are illustrative; only the constructions and window dimensions come from
//! [`crate::tables`].

use std::f64::consts::PI;

use crate::assembler::{CircuitSet, ConnectionSet};
use crate::circuit::ThermalCircuit;
use crate::elements::{
    interzone_airflow_circuit, ventilation_circuit, wall_circuit, window_circuit, zone_air_circuit, AirflowSpec,
    OutsideBoundary, TransmittanceCurve,
};
use crate::error::Result;
use crate::scalar::{Real, Scalar};
use crate::simulator::{Channel, TimeSeries};
use crate::statespace::StateSpace;
use crate::tables::{construction, window, INFILTRATION_ACH, LIVING_ROOM_SUPPLY_M3_PER_HOUR};

/// Three elementary circuits and the two connections that join them.
///
/// `g` are the five branch conductances in order; the capacity `c` is split
/// in halves between the two circuits sharing the last node.
pub fn three_circuit_example<T: Scalar>(g: [T; 5], c11: T, c: T) -> (Vec<ThermalCircuit<T>>, ConnectionSet) {
    let half = c / (T::one() + T::one());
    let label = |tc: &mut ThermalCircuit<T>, branches: &[&str], nodes: &[&str]| {
        tc.branch_labels = branches.iter().map(|s| s.to_string()).collect();
        tc.node_labels = nodes.iter().map(|s| s.to_string()).collect();
    };
    let mut tc1 = ThermalCircuit::from_arrays(
        &[vec![1, 0], vec![-1, 1]],
        vec![g[0], g[1]],
        vec![c11, T::zero()],
        vec![true, false],
        vec![true, false],
        vec![false, false],
    );
    label(&mut tc1, &["q11", "q12"], &["th11", "th12"]);
    let mut tc2 =
        ThermalCircuit::from_arrays(&[vec![-1, 1]], vec![g[2]], vec![T::zero(), half], vec![false], vec![false, true], vec![false, false]);
    label(&mut tc2, &["q21"], &["th21", "th22"]);
    let mut tc3 =
        ThermalCircuit::from_arrays(&[vec![1], vec![1]], vec![g[3], g[4]], vec![half], vec![true, false], vec![true], vec![false]);
    label(&mut tc3, &["q31", "q32"], &["th31"]);
    let mut conn = ConnectionSet::new();
    conn.connect((0, 1), (1, 0)).connect((1, 1), (2, 0));
    (vec![tc1, tc2, tc3], conn)
}

/// Assumed assembly transmittance of the double glazing, W/(m²·K).
pub const GLAZING_U: f64 = 1.2;

fn glazing_curve<T: Real>() -> TransmittanceCurve<T> {
    TransmittanceCurve::new(vec![(T::zero(), T::lit(0.6)), (T::lit(45.0), T::lit(0.55)), (T::lit(75.0), T::lit(0.3))])
        .expect("static curve is valid")
}

fn add_wall<T: Real>(set: &mut CircuitSet<T>, name: &str, kind: &str, area: f64, outside: OutsideBoundary) -> Result<()> {
    let spec = construction(kind).expect("known construction").wall_spec(T::lit(area))?.with_outside(outside);
    set.add(name, wall_circuit(&spec)?)?;
    Ok(())
}

fn add_window<T: Real>(set: &mut CircuitSet<T>, name: &str, kind: &str) -> Result<()> {
    let spec = window(kind).expect("known window").window_spec(T::lit(GLAZING_U), glazing_curve());
    set.add(name, window_circuit(&spec)?)?;
    Ok(())
}

/// Single-zone living room: 13 elementary models, 31 states.
///
/// Twelve element circuits (two external walls, two windows, three internal
/// walls and a door facing zones held at measured temperature, ceiling,
/// floor, ventilation, infiltration) surround the air node `zone.air`. Every
/// boundary is a temperature source named `<element>.out_film`, or
/// `<element>.flow` for air exchanges.
pub fn living_room<T: Real>() -> Result<CircuitSet<T>> {
    let volume = 75.0;
    let mut set = CircuitSet::new();
    let ext = OutsideBoundary::Exterior;
    add_wall(&mut set, "south_wall", "1", 8.0, ext)?;
    add_wall(&mut set, "west_wall", "1", 10.5, ext)?;
    add_window(&mut set, "south_window", "W3")?;
    add_window(&mut set, "west_window", "W1")?;
    add_wall(&mut set, "kitchen_wall", "2", 12.0, ext)?;
    add_wall(&mut set, "doorway_wall", "3", 9.0, ext)?;
    add_wall(&mut set, "corridor_wall", "3", 7.0, ext)?;
    add_wall(&mut set, "corridor_door", "6a", 1.9, ext)?;
    add_wall(&mut set, "ceiling", "4", 30.0, ext)?;
    add_wall(&mut set, "floor", "5", 30.0, ext)?;
    set.add("ventilation", ventilation_circuit(&AirflowSpec::volumetric(T::lit(LIVING_ROOM_SUPPLY_M3_PER_HOUR)))?)?;
    set.add("infiltration", ventilation_circuit(&AirflowSpec::air_changes(T::lit(INFILTRATION_ACH), T::lit(volume)))?)?;
    set.add("zone", zone_air_circuit(T::lit(volume))?)?;
    for name in set.names[..10].to_vec() {
        set.join(&name, "in_air", "zone", "air")?;
    }
    set.join("ventilation", "air", "zone", "air")?;
    set.join("infiltration", "air", "zone", "air")?;
    Ok(set)
}

/// Number of zones in [`seven_zones`].
pub const ZONES: usize = 7;

/// Seven zones in a row, 130 states. Each zone `z{i}` has an external wall,
/// window, ceiling, floor, infiltration and air node `z{i}.air`; neighbours share an
/// internal wall `p{i}` and an open-door airflow `d{i}`.
pub fn seven_zones<T: Real>() -> Result<CircuitSet<T>> {
    let volume = 60.0;
    let mut set = CircuitSet::new();
    let ext = OutsideBoundary::Exterior;
    for z in 1..=ZONES {
        let air = format!("z{z}");
        set.add(&air, zone_air_circuit(T::lit(volume))?)?;
        for (part, kind, area) in [("wall", "1", 9.0 + z as f64), ("ceiling", "4", 24.0), ("floor", "5", 24.0)] {
            let name = format!("z{z}.{part}");
            add_wall(&mut set, &name, kind, area, ext)?;
            set.join(&name, "in_air", &air, "air")?;
        }
        let name = format!("z{z}.window");
        add_window(&mut set, &name, if z % 2 == 0 { "W2" } else { "W1" })?;
        set.join(&name, "in_air", &air, "air")?;
        let name = format!("z{z}.infiltration");
        set.add(&name, ventilation_circuit(&AirflowSpec::air_changes(T::lit(INFILTRATION_ACH), T::lit(volume)))?)?;
        set.join(&name, "air", &air, "air")?;
    }
    for z in 1..ZONES {
        let (left, right) = (format!("z{z}"), format!("z{}", z + 1));
        let name = format!("p{z}");
        add_wall(&mut set, &name, "2", 12.0, OutsideBoundary::Node)?;
        set.join(&name, "out_air", &left, "air")?;
        set.join(&name, "in_air", &right, "air")?;
        let name = format!("d{z}");
        set.add(&name, interzone_airflow_circuit(&AirflowSpec::volumetric(T::lit(30.0)))?)?;
        set.join(&name, "a", &left, "air")?;
        set.join(&name, "b", &right, "air")?;
    }
    Ok(set)
}

/// Deterministic inputs for every input of `ss`: temperature channels follow
/// a daily sine around 12 °C, flow channels carry 500 W pulses on air nodes
/// and a small diurnal gain on surfaces.
pub fn synthetic_inputs<T: Real>(ss: &StateSpace<T>, steps: usize, dt: f64) -> Result<TimeSeries<T>> {
    let day = 86_400.0;
    let channels = ss
        .input_labels
        .iter()
        .enumerate()
        .map(|(i, label)| {
            let temperature = matches!(ss.inputs[i], crate::statespace::InputId::BranchTemperature(_));
            let phase = i as f64 * 0.37;
            let values = (0..steps)
                .map(|k| {
                    let t = k as f64 * dt;
                    let v = if temperature {
                        12.0 + 6.0 * (2.0 * PI * t / day + phase).sin()
                    } else if label.ends_with(".air") {
                        if (k / 18 + i) % 3 == 0 { 500.0 } else { 0.0 }
                    } else {
                        (20.0 * (2.0 * PI * t / day + phase).sin()).max(0.0)
                    };
                    T::lit(v)
                })
                .collect();
            Channel::new(label.clone(), values)
        })
        .collect();
    TimeSeries::new(T::zero(), T::lit(dt), channels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_dae, check_well_posed};
    use crate::statespace::extract_state_space;

    #[test]
    fn living_room_counts() {
        let set = living_room::<f64>().unwrap();
        assert_eq!(set.len(), 13);
        let tc = set.assemble().unwrap();
        assert!(!check_well_posed(&tc).has_errors());
        let ss = extract_state_space(&build_dae(&tc).unwrap(), &tc).unwrap();
        assert_eq!(ss.state_count(), 31);
        assert_eq!(ss.state_count(), tc.capacitive_count());
        assert_eq!(ss.output_labels.len(), 1);
    }

    #[test]
    fn seven_zone_counts() {
        let tc = seven_zones::<f64>().unwrap().assemble().unwrap();
        assert!(!check_well_posed(&tc).has_errors());
        assert_eq!(tc.capacitive_count(), 130);
        assert_eq!(tc.output_flags.iter().filter(|&&o| o).count(), ZONES);
    }
}
