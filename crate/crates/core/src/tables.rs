//! Window dimensions and wall/door constructions of the reference twin house,
//! as published.

use crate::elements::{LayerSpec, Material, TransmittanceCurve, WallSpec, WindowSpec};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindowRow {
    pub name: &'static str,
    /// Width × height with roller blinds, m.
    pub overall: (f64, f64),
    pub panes: u32,
    /// Width × height of one pane, m.
    pub pane: (f64, f64),
}

impl WindowRow {
    pub fn overall_area(&self) -> f64 {
        self.overall.0 * self.overall.1
    }

    pub fn glass_area(&self) -> f64 {
        f64::from(self.panes) * self.pane.0 * self.pane.1
    }

    pub fn window_spec<T: Real>(&self, u_value: T, transmittance: TransmittanceCurve<T>) -> WindowSpec<T> {
        WindowSpec::new(T::lit(self.overall_area()), T::lit(self.glass_area()), u_value, transmittance)
    }
}

pub const WINDOWS: [WindowRow; 3] = [
    WindowRow { name: "W1", overall: (1.74, 1.23), panes: 1, pane: (1.30, 0.99) },
    WindowRow { name: "W2", overall: (2.57, 1.11), panes: 1, pane: (2.13, 0.865) },
    WindowRow { name: "W3", overall: (1.74, 3.34), panes: 3, pane: (1.385, 0.99) },
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LayerRow {
    pub name: &'static str,
    /// m; absent where the table leaves it blank.
    pub thickness: Option<f64>,
    /// W/(m·K)
    pub conductivity: f64,
    /// kg/m³
    pub density: f64,
    /// J/(kg·K)
    pub specific_heat: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstructionRow {
    pub number: &'static str,
    pub name: &'static str,
    /// W/(m²·K), where declared.
    pub declared_u: Option<f64>,
    /// Outside to inside.
    pub layers: &'static [LayerRow],
    pub absorptance: f64,
    pub emissivity: f64,
}

impl ConstructionRow {
    /// Wall spec with one slice per layer and default films. Fails when a
    /// layer thickness is blank; use [`ConstructionRow::wall_spec_with_thickness`].
    pub fn wall_spec<T: Real>(&self, area: T) -> Result<WallSpec<T>> {
        let layers = self
            .layers
            .iter()
            .map(|l| {
                let d = l.thickness.ok_or_else(|| {
                    Error::InvalidSpec(format!("construction {} layer `{}` has no thickness", self.number, l.name))
                })?;
                layer(l, d)
            })
            .collect::<Result<Vec<_>>>()?;
        self.finish(layers, area)
    }

    /// As [`ConstructionRow::wall_spec`], supplying `thickness` for blank layers.
    pub fn wall_spec_with_thickness<T: Real>(&self, area: T, thickness: f64) -> Result<WallSpec<T>> {
        let layers = self.layers.iter().map(|l| layer(l, l.thickness.unwrap_or(thickness))).collect::<Result<Vec<_>>>()?;
        self.finish(layers, area)
    }

    fn finish<T: Real>(&self, layers: Vec<LayerSpec<T>>, area: T) -> Result<WallSpec<T>> {
        let spec = WallSpec::with_default_films(layers, area).with_surface(T::lit(self.absorptance), T::lit(self.emissivity));
        spec.validate()?;
        Ok(spec)
    }
}

fn layer<T: Real>(row: &LayerRow, thickness: f64) -> Result<LayerSpec<T>> {
    let m = Material::new(T::lit(row.conductivity), T::lit(row.density), T::lit(row.specific_heat))?;
    Ok(LayerSpec::new(m, T::lit(thickness)))
}

const fn row(name: &'static str, thickness: f64, conductivity: f64, density: f64, specific_heat: f64) -> LayerRow {
    LayerRow { name, thickness: Some(thickness), conductivity, density, specific_heat }
}

pub const CONSTRUCTIONS: [ConstructionRow; 8] = [
    ConstructionRow {
        number: "1",
        name: "External wall",
        declared_u: Some(0.2),
        layers: &[
            row("Ext. plaster", 0.01, 0.80, 1200.0, 1000.0),
            row("Insulation", 0.12, 0.035, 80.0, 840.0),
            row("Plaster", 0.01, 1.00, 1200.0, 1000.0),
            row("Brick", 0.20, 0.22, 800.0, 1000.0),
            row("Int. plaster", 0.01, 1.00, 1200.0, 1000.0),
        ],
        absorptance: 0.23,
        emissivity: 0.90,
    },
    ConstructionRow {
        number: "2",
        name: "Internal wall",
        declared_u: None,
        layers: &[
            row("Plaster", 0.01, 0.35, 1200.0, 1000.0),
            row("Brick", 0.25, 0.33, 1000.0, 1000.0),
            row("Plaster", 0.01, 0.35, 1200.0, 1000.0),
        ],
        absorptance: 0.17,
        emissivity: 0.90,
    },
    ConstructionRow {
        number: "3",
        name: "Internal wall",
        declared_u: None,
        layers: &[
            row("Plaster", 0.01, 0.35, 1200.0, 1000.0),
            row("Brick", 0.13, 0.33, 1000.0, 1000.0),
            row("Plaster", 0.01, 0.35, 1200.0, 1000.0),
        ],
        absorptance: 0.17,
        emissivity: 0.90,
    },
    ConstructionRow {
        number: "4",
        name: "Ceiling",
        declared_u: Some(0.25),
        layers: &[
            row("Screed", 0.04, 1.40, 2000.0, 2000.0),
            row("Insulation", 0.04, 0.04, 80.0, 840.0),
            row("Concrete", 0.22, 2.00, 2400.0, 1000.0),
            row("Plaster", 0.01, 1.00, 1200.0, 1000.0),
            row("Insulation", 0.10, 0.035, 80.0, 840.0),
        ],
        absorptance: 0.60,
        emissivity: 0.90,
    },
    ConstructionRow {
        number: "5",
        name: "Ground",
        declared_u: Some(0.32),
        layers: &[
            row("Concrete", 0.22, 2.10, 2400.0, 1000.0),
            row("Fill", 0.03, 0.06, 80.0, 840.0),
            row("Insulation", 0.03, 0.025, 80.0, 840.0),
            row("Panel", 0.03, 0.023, 80.0, 840.0),
            row("Screed", 0.06, 1.40, 2000.0, 1000.0),
        ],
        absorptance: 0.60,
        emissivity: 0.90,
    },
    ConstructionRow {
        number: "6",
        name: "External door",
        declared_u: None,
        layers: &[row("Wood", 0.04, 0.13, 600.0, 1000.0)],
        absorptance: 0.60,
        emissivity: 0.90,
    },
    ConstructionRow {
        number: "6a",
        name: "Internal door",
        declared_u: None,
        layers: &[row("Wood with glass", 0.04, 0.13, 600.0, 1000.0)],
        absorptance: 0.60,
        emissivity: 0.90,
    },
    ConstructionRow {
        number: "9*",
        name: "Pillar",
        declared_u: None,
        layers: &[LayerRow { name: "Concrete", thickness: None, conductivity: 0.5, density: 2400.0, specific_heat: 1000.0 }],
        absorptance: 0.60,
        emissivity: 0.90,
    },
];

/// Footnote attached to the pillar row.
pub const PILLAR_FOOTNOTE: &str = "*9 is numbered as 26";

/// Row 7, 1/h.
pub const INFILTRATION_ACH: f64 = 1.62;
/// Row 8, m³/h.
pub const VENTILATION_M3_PER_HOUR: f64 = 60.0;
/// Mechanical supply to the living room, m³/h.
pub const LIVING_ROOM_SUPPLY_M3_PER_HOUR: f64 = 120.0;

pub fn construction(number: &str) -> Option<&'static ConstructionRow> {
    CONSTRUCTIONS.iter().find(|c| c.number == number)
}

pub fn window(name: &str) -> Option<&'static WindowRow> {
    WINDOWS.iter().find(|w| w.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_areas() {
        assert!((window("W1").unwrap().glass_area() - 1.287).abs() < 1e-12);
        assert!((window("W1").unwrap().overall_area() - 2.1402).abs() < 1e-12);
        assert!((window("W3").unwrap().glass_area() - 4.11345).abs() < 1e-12);
        assert!((window("W2").unwrap().glass_area() - 2.13 * 0.865).abs() < 1e-12);
    }

    #[test]
    fn u_values_with_default_films() {
        // 1/(1/25 + Σd/k + 1/7.7), hand-summed per construction
        let u = |n: &str| construction(n).unwrap().wall_spec(1.0f64).unwrap().u_value();
        let r1 = 0.04 + 0.01 / 0.8 + 0.12 / 0.035 + 0.01 + 0.20 / 0.22 + 0.01 + 1.0 / 7.7;
        assert!((u("1") - 1.0 / r1).abs() < 1e-12);
        assert!((u("1") - 0.2203).abs() < 1e-4);
        assert!((u("4") - 0.2395).abs() < 1e-4);
        assert!((u("5") - 0.3010).abs() < 1e-4);
    }

    #[test]
    fn pillar_needs_thickness() {
        let p = construction("9*").unwrap();
        assert!(p.wall_spec(1.0f64).is_err());
        let spec = p.wall_spec_with_thickness(1.0f64, 0.3).unwrap();
        assert_eq!(spec.layers.len(), 1);
        assert_eq!(PILLAR_FOOTNOTE, "*9 is numbered as 26");
    }

    #[test]
    fn every_construction_builds() {
        for c in &CONSTRUCTIONS {
            let spec = c.wall_spec_with_thickness(2.0f64, 0.3).unwrap();
            assert_eq!(crate::elements::wall_circuit(&spec).unwrap().capacitive_count(), c.layers.len());
        }
    }
}
