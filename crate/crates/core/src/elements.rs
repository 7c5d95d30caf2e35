//! Factories for the thermal circuits of building elements.
//!
//! Labels produced here are local to each circuit. Use
//! [`ThermalCircuit::prefixed`] before assembling several elements so that
//! source channels stay distinguishable.
//!
//! Wall node layout, outside to inside: `out_surface`, then per slice a
//! capacitive `m{k}` and, between slices, a massless `j{k}`, then
//! `in_surface` and the massless terminal `in_air` meant to be merged with a
//! zone air node. Branches are `out_film`, `s{k}a`/`s{k}b` (the two halves of
//! slice `k`) and `in_film`.

use crate::circuit::{CircuitBuilder, ThermalCircuit};
use crate::error::{Error, Result};
use crate::scalar::{Real, Scalar};

/// kg/m³
pub const AIR_DENSITY: f64 = 1.2;
/// J/(kg·K)
pub const AIR_SPECIFIC_HEAT: f64 = 1006.0;
/// W/(m²·K⁴)
pub const STEFAN_BOLTZMANN: f64 = 5.67e-8;
/// W/(m²·K)
pub const DEFAULT_OUTSIDE_FILM: f64 = 25.0;
/// W/(m²·K)
pub const DEFAULT_INSIDE_FILM: f64 = 7.7;
/// Share of heater power released to the air node.
pub const HEATER_CONVECTIVE_FRACTION: f64 = 0.7;

fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidSpec(msg.into()))
}

fn count<T: Scalar>(n: usize) -> T {
    (0..n).fold(T::zero(), |acc, _| acc + T::one())
}

fn in_unit_interval<T: Scalar>(x: T) -> bool {
    T::zero() <= x && x <= T::one()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Material<T> {
    /// W/(m·K)
    pub conductivity: T,
    /// kg/m³
    pub density: T,
    /// J/(kg·K)
    pub specific_heat: T,
}

impl<T: Scalar> Material<T> {
    pub fn new(conductivity: T, density: T, specific_heat: T) -> Result<Self> {
        let m = Self { conductivity, density, specific_heat };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("conductivity", self.conductivity), ("density", self.density), ("specific heat", self.specific_heat)] {
            if !(v > T::zero()) {
                return invalid(format!("material {name} must be positive, got {v}"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LayerSpec<T> {
    pub material: Material<T>,
    /// m
    pub thickness: T,
    /// Capacitive nodes used for this layer, at least one.
    pub slices: usize,
}

impl<T: Scalar> LayerSpec<T> {
    pub fn new(material: Material<T>, thickness: T) -> Self {
        Self { material, thickness, slices: 1 }
    }

    pub fn with_slices(mut self, slices: usize) -> Self {
        self.slices = slices;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.material.validate()?;
        if !(self.thickness > T::zero()) {
            return invalid(format!("layer thickness must be positive, got {}", self.thickness));
        }
        if self.slices == 0 {
            return invalid("layer needs at least one slice");
        }
        Ok(())
    }

    /// Conductive resistance across the layer, K/W.
    pub fn resistance(&self, area: T) -> T {
        self.thickness / (self.material.conductivity * area)
    }

    /// J/K
    pub fn capacity(&self, area: T) -> T {
        self.material.density * self.material.specific_heat * self.thickness * area
    }
}

/// What lies beyond the outside film of a wall.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OutsideBoundary {
    /// The film connects to the reference through a temperature source.
    #[default]
    Exterior,
    /// The film ends at a massless terminal `out_air`, to be merged with
    /// another zone's air node.
    Node,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WallSpec<T> {
    /// Outside to inside.
    pub layers: Vec<LayerSpec<T>>,
    /// m²
    pub area: T,
    /// W/(m²·K)
    pub outside_film: T,
    /// W/(m²·K)
    pub inside_film: T,
    pub absorptance: T,
    pub emissivity: T,
    pub outside: OutsideBoundary,
}

impl<T: Scalar> WallSpec<T> {
    pub fn new(layers: Vec<LayerSpec<T>>, area: T, outside_film: T, inside_film: T) -> Self {
        Self { layers, area, outside_film, inside_film, absorptance: T::zero(), emissivity: T::one(), outside: OutsideBoundary::Exterior }
    }

    pub fn with_surface(mut self, absorptance: T, emissivity: T) -> Self {
        self.absorptance = absorptance;
        self.emissivity = emissivity;
        self
    }

    pub fn with_outside(mut self, outside: OutsideBoundary) -> Self {
        self.outside = outside;
        self
    }

    /// Multiplies the slice count of every layer.
    pub fn refined(mut self, factor: usize) -> Self {
        for l in &mut self.layers {
            l.slices *= factor;
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return invalid("wall has no layers");
        }
        for l in &self.layers {
            l.validate()?;
        }
        if !(self.area > T::zero()) {
            return invalid(format!("wall area must be positive, got {}", self.area));
        }
        if !(self.outside_film > T::zero()) || !(self.inside_film > T::zero()) {
            return invalid("film coefficients must be positive");
        }
        if !in_unit_interval(self.absorptance) || !in_unit_interval(self.emissivity) {
            return invalid("absorptance and emissivity must lie in [0, 1]");
        }
        Ok(())
    }

    /// Film-to-film resistance including both films, K/W.
    pub fn total_resistance(&self) -> T {
        let films = T::one() / (self.outside_film * self.area) + T::one() / (self.inside_film * self.area);
        self.layers.iter().fold(films, |r, l| r + l.resistance(self.area))
    }

    /// W/(m²·K)
    pub fn u_value(&self) -> T {
        T::one() / (self.total_resistance() * self.area)
    }

    /// J/K
    pub fn total_capacity(&self) -> T {
        self.layers.iter().fold(T::zero(), |c, l| c + l.capacity(self.area))
    }

    pub fn slice_count(&self) -> usize {
        self.layers.iter().map(|l| l.slices).sum()
    }
}

impl<T: Real> WallSpec<T> {
    pub fn with_default_films(layers: Vec<LayerSpec<T>>, area: T) -> Self {
        Self::new(layers, area, T::lit(DEFAULT_OUTSIDE_FILM), T::lit(DEFAULT_INSIDE_FILM))
    }
}

/// Slice `k` of thickness `d` contributes two branches of conductance
/// `2kS/d` around a mid-slice node of capacity `ρ c d S`.
pub fn wall_circuit<T: Scalar>(spec: &WallSpec<T>) -> Result<ThermalCircuit<T>> {
    spec.validate()?;
    let s = spec.area;
    let two = T::one() + T::one();
    let mut b = CircuitBuilder::new();
    let out_surface = b.node("out_surface", T::zero());
    let outside = match spec.outside {
        OutsideBoundary::Exterior => None,
        OutsideBoundary::Node => Some(b.node("out_air", T::zero())),
    };
    let out_film = b.branch("out_film", outside, Some(out_surface), spec.outside_film * s);
    if outside.is_none() {
        b.temperature_source(out_film);
    }
    b.flow_source(out_surface);

    let mut left = out_surface;
    let total = spec.slice_count();
    let mut k = 0;
    for layer in &spec.layers {
        let d = layer.thickness / count(layer.slices);
        let g = two * layer.material.conductivity * s / d;
        let cap = layer.material.density * layer.material.specific_heat * d * s;
        for _ in 0..layer.slices {
            k += 1;
            let mid = b.node(format!("m{k}"), cap);
            let right = if k == total { b.node("in_surface", T::zero()) } else { b.node(format!("j{k}"), T::zero()) };
            b.branch(format!("s{k}a"), Some(left), Some(mid), g);
            b.branch(format!("s{k}b"), Some(mid), Some(right), g);
            left = right;
        }
    }
    b.flow_source(left);
    let in_air = b.node("in_air", T::zero());
    b.branch("in_film", Some(left), Some(in_air), spec.inside_film * s);
    Ok(b.build())
}

/// Solar transmittance against incidence angle in degrees, linearly
/// interpolated. Transmission is zero at and beyond 90°.
#[derive(Clone, Debug, PartialEq)]
pub struct TransmittanceCurve<T> {
    points: Vec<(T, T)>,
}

impl<T: Real> TransmittanceCurve<T> {
    /// `points` are (angle °, τ) with strictly ascending angles in [0, 90].
    pub fn new(points: Vec<(T, T)>) -> Result<Self> {
        if points.is_empty() {
            return invalid("transmittance curve has no points");
        }
        let ninety = T::lit(90.0);
        for (i, &(a, tau)) in points.iter().enumerate() {
            if !(a >= T::zero() && a <= ninety) {
                return invalid(format!("incidence angle {a} outside [0, 90]"));
            }
            if !in_unit_interval(tau) {
                return invalid(format!("transmittance {tau} outside [0, 1]"));
            }
            if i > 0 && !(a > points[i - 1].0) {
                return invalid("incidence angles must be strictly ascending");
            }
        }
        Ok(Self { points })
    }

    pub fn constant(tau: T) -> Result<Self> {
        Self::new(vec![(T::zero(), tau)])
    }

    pub fn points(&self) -> &[(T, T)] {
        &self.points
    }

    /// Transmittance at `angle` °. Held constant below the first point and
    /// interpolated to zero at 90° beyond the last.
    pub fn at(&self, angle: T) -> Result<T> {
        let ninety = T::lit(90.0);
        if angle.is_nan() || angle < T::zero() {
            return invalid(format!("incidence angle {angle} is negative"));
        }
        if angle >= ninety {
            return Ok(T::zero());
        }
        let first = self.points[0];
        if angle <= first.0 {
            return Ok(first.1);
        }
        let mut prev = first;
        for &p in self.points.iter().skip(1).chain(std::iter::once(&(ninety, T::zero()))) {
            if angle <= p.0 {
                let w = (angle - prev.0) / (p.0 - prev.0);
                return Ok(prev.1 + (p.1 - prev.1) * w);
            }
            prev = p;
        }
        unreachable!("angle below 90 falls inside the extended curve")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WindowSpec<T> {
    /// m², drives conduction.
    pub overall_area: T,
    /// m², drives solar transmission.
    pub glass_area: T,
    /// Assembly transmittance excluding films, W/(m²·K).
    pub u_value: T,
    pub transmittance: TransmittanceCurve<T>,
    pub outside_film: T,
    pub inside_film: T,
}

impl<T: Real> WindowSpec<T> {
    pub fn new(overall_area: T, glass_area: T, u_value: T, transmittance: TransmittanceCurve<T>) -> Self {
        Self {
            overall_area,
            glass_area,
            u_value,
            transmittance,
            outside_film: T::lit(DEFAULT_OUTSIDE_FILM),
            inside_film: T::lit(DEFAULT_INSIDE_FILM),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.glass_area > T::zero() && self.glass_area <= self.overall_area) {
            return invalid(format!(
                "glass area {} must be positive and at most the overall area {}",
                self.glass_area, self.overall_area
            ));
        }
        if !(self.u_value > T::zero()) || !(self.outside_film > T::zero()) || !(self.inside_film > T::zero()) {
            return invalid("window transmittance and film coefficients must be positive");
        }
        Ok(())
    }
}

/// Massless chain: reference →`out_film`→ `out_surface` →`glazing`→
/// `in_surface` →`in_film`→ `in_air`, the outside film carrying the outdoor
/// temperature source.
pub fn window_circuit<T: Real>(spec: &WindowSpec<T>) -> Result<ThermalCircuit<T>> {
    spec.validate()?;
    let s = spec.overall_area;
    let mut b = CircuitBuilder::new();
    let out_surface = b.node("out_surface", T::zero());
    let in_surface = b.node("in_surface", T::zero());
    let in_air = b.node("in_air", T::zero());
    let film = b.branch("out_film", None, Some(out_surface), spec.outside_film * s);
    b.branch("glazing", Some(out_surface), Some(in_surface), spec.u_value * s);
    b.branch("in_film", Some(in_surface), Some(in_air), spec.inside_film * s);
    b.temperature_source(film);
    Ok(b.build())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AirflowRate<T> {
    /// m³/h
    Volumetric(T),
    /// Air changes per hour of a zone of the given volume, m³.
    AirChanges { per_hour: T, volume: T },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AirflowSpec<T> {
    pub rate: AirflowRate<T>,
    pub density: T,
    pub specific_heat: T,
}

impl<T: Real> AirflowSpec<T> {
    pub fn volumetric(m3_per_hour: T) -> Self {
        Self::with_rate(AirflowRate::Volumetric(m3_per_hour))
    }

    pub fn air_changes(per_hour: T, volume: T) -> Self {
        Self::with_rate(AirflowRate::AirChanges { per_hour, volume })
    }

    fn with_rate(rate: AirflowRate<T>) -> Self {
        Self { rate, density: T::lit(AIR_DENSITY), specific_heat: T::lit(AIR_SPECIFIC_HEAT) }
    }

    /// m³/s
    pub fn flow(&self) -> Result<T> {
        let hour = T::lit(3600.0);
        let v = match self.rate {
            AirflowRate::Volumetric(q) => q / hour,
            AirflowRate::AirChanges { per_hour, volume } => {
                if !(volume > T::zero()) {
                    return invalid(format!("zone volume must be positive, got {volume}"));
                }
                per_hour * volume / hour
            }
        };
        if !(v >= T::zero()) {
            return invalid(format!("airflow must be non-negative, got {v}"));
        }
        if !(self.density > T::zero() && self.specific_heat > T::zero()) {
            return invalid("air density and specific heat must be positive");
        }
        Ok(v)
    }
}

/// `ρ c_p V̇`, W/K.
pub fn airflow_conductance<T: Real>(spec: &AirflowSpec<T>) -> Result<T> {
    Ok(spec.density * spec.specific_heat * spec.flow()?)
}

/// Outdoor (or supply) air at the temperature source of branch `flow` enters
/// the massless terminal `air`.
pub fn ventilation_circuit<T: Real>(spec: &AirflowSpec<T>) -> Result<ThermalCircuit<T>> {
    let g = airflow_conductance(spec)?;
    if g == T::zero() {
        return invalid("zero airflow has no circuit");
    }
    let mut b = CircuitBuilder::new();
    let air = b.node("air", T::zero());
    let q = b.branch("flow", None, Some(air), g);
    b.temperature_source(q);
    Ok(b.build())
}

/// Two massless terminals `a` and `b` joined by one branch `link` of the
/// given conductance; used for interzone airflow and radiative exchange.
pub fn link_circuit<T: Scalar>(conductance: T) -> Result<ThermalCircuit<T>> {
    if !(conductance > T::zero()) {
        return invalid(format!("link conductance must be positive, got {conductance}"));
    }
    let mut b = CircuitBuilder::new();
    let a = b.node("a", T::zero());
    let z = b.node("b", T::zero());
    b.branch("link", Some(a), Some(z), conductance);
    Ok(b.build())
}

pub fn interzone_airflow_circuit<T: Real>(spec: &AirflowSpec<T>) -> Result<ThermalCircuit<T>> {
    link_circuit(airflow_conductance(spec)?)
}

/// Single node `air` with capacity `ρ c_p V`, a flow source for convective
/// gains, flagged as output.
pub fn zone_air_circuit<T: Real>(volume: T) -> Result<ThermalCircuit<T>> {
    if !(volume > T::zero()) {
        return invalid(format!("zone volume must be positive, got {volume}"));
    }
    let mut b = CircuitBuilder::new();
    let air = b.node("air", T::lit(AIR_DENSITY) * T::lit(AIR_SPECIFIC_HEAT) * volume);
    b.flow_source(air).output(air);
    Ok(b.build())
}

/// (convective, radiative) shares of heater power, summing exactly to `power`.
pub fn heater_split<T: Real>(power: T) -> Result<(T, T)> {
    if !(power >= T::zero()) || !power.is_finite() {
        return invalid(format!("heater power must be non-negative, got {power}"));
    }
    let convective = power * T::lit(HEATER_CONVECTIVE_FRACTION);
    Ok((convective, power - convective))
}

/// Splits `total` in proportion to `areas`.
pub fn distribute_by_area<T: Real>(total: T, areas: &[T]) -> Result<Vec<T>> {
    if areas.iter().any(|a| !(*a > T::zero())) {
        return invalid("distribution areas must be positive");
    }
    let sum = areas.iter().fold(T::zero(), |s, &a| s + a);
    Ok(areas.iter().map(|&a| total * a / sum).collect())
}

#[derive(Clone, Copy, Debug)]
pub enum SolarSurface<'a, T> {
    Opaque(&'a WallSpec<T>),
    Glazed(&'a WindowSpec<T>),
}

/// Solar heat flow, W: absorbed at the outside surface of an opaque element
/// (`α E S`) or transmitted through glazing (`τ(angle) E S_glass`).
pub fn solar_gains<T: Real>(irradiance: T, surface: SolarSurface<'_, T>, incidence: T) -> Result<T> {
    if !(irradiance >= T::zero()) {
        return invalid(format!("irradiance must be non-negative, got {irradiance}"));
    }
    match surface {
        SolarSurface::Opaque(w) => Ok(w.absorptance * irradiance * w.area),
        SolarSurface::Glazed(w) => Ok(w.transmittance.at(incidence)? * irradiance * w.glass_area),
    }
}

/// Linearized long-wave exchange between two parallel gray surfaces, W/K:
/// `4 ε σ T̄³ S` with `ε = 1/(1/ε₁ + 1/ε₂ − 1)`.
pub fn radiative_link<T: Real>(emissivity_a: T, emissivity_b: T, area: T, mean_temperature: T) -> Result<T> {
    for e in [emissivity_a, emissivity_b] {
        if !(e > T::zero() && e <= T::one()) {
            return invalid(format!("emissivity {e} outside (0, 1]"));
        }
    }
    if !(mean_temperature > T::zero()) || !(area >= T::zero()) {
        return invalid("mean temperature must be positive (K) and area non-negative");
    }
    let eff = T::one() / (T::one() / emissivity_a + T::one() / emissivity_b - T::one());
    Ok(T::lit(4.0) * eff * T::lit(STEFAN_BOLTZMANN) * mean_temperature.powi(3) * area)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::validate;
    use num_rational::Ratio;

    fn concrete() -> Material<f64> {
        Material::new(2.0, 2400.0, 1000.0).unwrap()
    }

    #[test]
    fn single_slice_branches() {
        let layer = LayerSpec::new(Material::new(1.0f64, 1000.0, 1000.0).unwrap(), 0.1);
        let w = WallSpec::with_default_films(vec![layer], 1.0);
        let c = wall_circuit(&w).unwrap();
        let a = c.branch_index("s1a").unwrap();
        let b = c.branch_index("s1b").unwrap();
        assert!((c.conductances[a] - 20.0).abs() < 1e-12);
        assert!((c.conductances[b] - 20.0).abs() < 1e-12);
        assert_eq!(c.capacities[c.node_index("m1").unwrap()], 1000.0 * 1000.0 * 0.1);
        assert!(validate(&c).is_empty());
    }

    #[test]
    fn wall_layout() {
        let w = WallSpec::with_default_films(
            vec![LayerSpec::new(concrete(), 0.2).with_slices(2), LayerSpec::new(concrete(), 0.1)],
            3.0,
        );
        let c = wall_circuit(&w).unwrap();
        let labels: Vec<&str> = c.node_labels.iter().map(String::as_str).collect();
        assert_eq!(labels, ["out_surface", "m1", "j1", "m2", "j2", "m3", "in_surface", "in_air"]);
        assert_eq!(c.capacitive_count(), 3);
        assert_eq!(c.temp_source_count(), 1);
        assert!(c.temp_source_flags[c.branch_index("out_film").unwrap()]);
        assert!(c.flow_source_flags[0] && c.flow_source_flags[6]);
        assert_eq!(c.branch_count(), 8);
    }

    #[test]
    fn outside_node_variant_has_no_temperature_source() {
        let w = WallSpec::with_default_films(vec![LayerSpec::new(concrete(), 0.2)], 1.0).with_outside(OutsideBoundary::Node);
        let c = wall_circuit(&w).unwrap();
        assert_eq!(c.temp_source_count(), 0);
        assert!(c.node_index("out_air").is_some());
        assert!(validate(&c).is_empty());
    }

    #[test]
    fn refinement_is_exact_in_rationals() {
        type Q = Ratio<i128>;
        let q = |n: i128, d: i128| Q::new(n, d);
        let layers = vec![
            LayerSpec::new(Material::new(q(35, 1000), q(80, 1), q(840, 1)).unwrap(), q(12, 100)),
            LayerSpec::new(Material::new(q(22, 100), q(800, 1), q(1000, 1)).unwrap(), q(20, 100)),
        ];
        let base = WallSpec::new(layers, q(3, 1), q(25, 1), q(77, 10));
        let series = |c: &ThermalCircuit<Q>| -> Q {
            c.branch_labels
                .iter()
                .zip(&c.conductances)
                .filter(|(l, _)| l.starts_with('s'))
                .fold(Q::from_integer(0), |r, (_, &g)| r + Q::from_integer(1) / g)
        };
        let total_cap = |c: &ThermalCircuit<Q>| c.capacities.iter().fold(Q::from_integer(0), |s, &v| s + v);
        let c1 = wall_circuit(&base).unwrap();
        for factor in [2, 3, 5] {
            let cf = wall_circuit(&base.clone().refined(factor)).unwrap();
            assert_eq!(series(&cf), series(&c1));
            assert_eq!(total_cap(&cf), total_cap(&c1));
            assert_eq!(cf.capacitive_count(), 2 * factor);
        }
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(Material::new(0.0, 1.0, 1.0).is_err());
        assert!(wall_circuit(&WallSpec::<f64>::with_default_films(vec![], 1.0)).is_err());
        let l = LayerSpec::new(concrete(), 0.1);
        assert!(wall_circuit(&WallSpec::with_default_films(vec![l.clone()], 0.0)).is_err());
        assert!(wall_circuit(&WallSpec::with_default_films(vec![l.clone().with_slices(0)], 1.0)).is_err());
        assert!(wall_circuit(&WallSpec::with_default_films(vec![l], 1.0).with_surface(1.2, 0.9)).is_err());
    }

    #[test]
    fn window_end_to_end_conductance() {
        let tau = TransmittanceCurve::constant(0.6).unwrap();
        let mut w = WindowSpec::new(1.0, 1.0, 1.0, tau);
        w.outside_film = 1e12;
        w.inside_film = 1e12;
        let c = window_circuit(&w).unwrap();
        let r: f64 = c.conductances.iter().map(|g| 1.0 / g).sum();
        assert!((1.0 / r - 1.0).abs() < 1e-9);
        assert_eq!(c.capacitive_count(), 0);
        assert_eq!(c.temp_source_count(), 1);
    }

    #[test]
    fn window_glass_must_fit() {
        let tau = TransmittanceCurve::constant(0.6).unwrap();
        assert!(window_circuit(&WindowSpec::new(1.0, 1.5, 1.0, tau)).is_err());
    }

    #[test]
    fn airflow_values() {
        assert!((airflow_conductance(&AirflowSpec::volumetric(120.0f64)).unwrap() - 40.24).abs() < 1e-12);
        assert_eq!(airflow_conductance(&AirflowSpec::volumetric(0.0)).unwrap(), 0.0);
        let ach = AirflowSpec::air_changes(1.62f64, 50.0);
        assert!((ach.flow().unwrap() - 0.0225).abs() < 1e-15);
        assert!((airflow_conductance(&ach).unwrap() - 27.162).abs() < 1e-9);
        assert!(airflow_conductance(&AirflowSpec::volumetric(-1.0)).is_err());
        assert!(ventilation_circuit(&AirflowSpec::volumetric(0.0)).is_err());
    }

    #[test]
    fn zone_air_capacity() {
        let c = zone_air_circuit(50.0f64).unwrap();
        assert!((c.capacities[0] - 60_360.0).abs() < 1e-9);
        assert!(c.flow_source_flags[0] && c.output_flags[0]);
        assert!(zone_air_circuit(0.0).is_err());
    }

    #[test]
    fn heater_shares() {
        assert_eq!(heater_split(500.0).unwrap(), (350.0, 150.0));
        assert_eq!(heater_split(0.0).unwrap(), (0.0, 0.0));
        assert!(heater_split(-1.0).is_err());
        assert_eq!(distribute_by_area(150.0, &[2.0, 1.0]).unwrap(), vec![100.0, 50.0]);
    }

    #[test]
    fn transmittance_interpolation() {
        let tau = TransmittanceCurve::new(vec![(0.0f64, 0.7), (60.0, 0.5)]).unwrap();
        assert!((tau.at(30.0).unwrap() - 0.6).abs() < 1e-15);
        assert_eq!(tau.at(0.0).unwrap(), 0.7);
        assert_eq!(tau.at(90.0).unwrap(), 0.0);
        assert_eq!(tau.at(120.0).unwrap(), 0.0);
        assert!((tau.at(75.0).unwrap() - 0.25).abs() < 1e-15);
        assert!(tau.at(-1.0).is_err());
        assert!(TransmittanceCurve::new(vec![(10.0, 0.5), (10.0, 0.4)]).is_err());
        assert!(TransmittanceCurve::new(vec![(0.0, 1.5)]).is_err());
    }

    #[test]
    fn opaque_and_glazed_gains() {
        let w = WallSpec::with_default_films(vec![LayerSpec::new(concrete(), 0.1)], 10.0).with_surface(0.23, 0.9);
        assert!((solar_gains(100.0, SolarSurface::Opaque(&w), 0.0).unwrap() - 230.0).abs() < 1e-12);
        assert_eq!(solar_gains(0.0, SolarSurface::Opaque(&w), 0.0).unwrap(), 0.0);
        let win = WindowSpec::new(2.0f64, 1.5, 1.2, TransmittanceCurve::new(vec![(0.0, 0.7), (60.0, 0.5)]).unwrap());
        assert!((solar_gains(200.0, SolarSurface::Glazed(&win), 30.0).unwrap() - 0.6 * 200.0 * 1.5).abs() < 1e-12);
        assert_eq!(solar_gains(200.0, SolarSurface::Glazed(&win), 90.0).unwrap(), 0.0);
    }

    #[test]
    fn radiative_coefficient() {
        let h = radiative_link(0.9, 0.9, 1.0, 293.15).unwrap();
        let expect = 4.0 * (1.0 / (2.0 / 0.9 - 1.0)) * 5.67e-8 * 293.15f64.powi(3);
        assert!((h - expect).abs() < 1e-12);
        assert!((h - 4.67).abs() < 0.01);
        assert!((radiative_link(0.9, 0.9, 2.0, 293.15).unwrap() - 2.0 * h).abs() < 1e-12);
        assert!(radiative_link(1e-9, 0.9, 1.0, 293.15).unwrap() < 1e-7);
        assert!(radiative_link(0.0, 0.9, 1.0, 293.15).is_err());
    }

    #[test]
    fn link_circuit_shape() {
        let c = link_circuit(3.0).unwrap();
        assert_eq!(c.incidence.row(0), &[-1, 1]);
        assert!(link_circuit(0.0).is_err());
    }
}
