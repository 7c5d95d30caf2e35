//! Building description files.
//!
//! A description is a TOML document. Table data (materials, constructions,
//! window types, airflow rates) may live in separate files pulled in with
//! `include`; everything else must be in the main file. See the README for
//! the full grammar.

use std::ops::Range;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::error::{CliError, Location};

/// Index of the source file an item was read from; bookkeeping only, so all
/// origins compare equal.
#[derive(Clone, Copy, Debug, Default)]
pub struct Origin(pub usize);

impl PartialEq for Origin {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuildingDescription {
    /// Files carrying table data, relative to this file. Empty after
    /// [`parse_building`], which merges them.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub include: Vec<String>,
    /// Output node labels `element.node`; when empty, the flags set by the
    /// elements themselves apply.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub outputs: Vec<Spanned<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationSettings>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub material: Vec<MaterialDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub construction: Vec<ConstructionDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub window_type: Vec<WindowTypeDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub airflow_rate: Vec<AirflowRateDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub circuit: Vec<CircuitDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub wall: Vec<WallDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub window: Vec<WindowDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub airflow: Vec<AirflowDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub zone: Vec<ZoneDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub link: Vec<LinkDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub connection: Vec<ConnectionDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub binding: Vec<BindingDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub heater: Vec<HeaterDoc>,
    /// Source files, main file first. Not part of the document.
    #[serde(skip)]
    pub sources: Sources,
}

/// Paths and texts of the files a description was read from.
#[derive(Clone, Debug, Default)]
pub struct Sources(pub Vec<(PathBuf, String)>);

impl PartialEq for Sources {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Sources {
    pub fn locate(&self, origin: Origin, span: Range<usize>) -> Option<Location> {
        let (path, text) = self.0.get(origin.0)?;
        Some(Location::from_offset(path, text, span.start))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSettings {
    /// Integration step, s; defaults to the input sampling interval.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    /// `explicit-euler`, `implicit-euler` or `exact-zoh`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<Spanned<String>>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub allow_unbound: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialDoc {
    pub name: Spanned<String>,
    /// W/(m·K)
    pub conductivity: f64,
    /// kg/m³
    pub density: f64,
    /// J/(kg·K)
    pub specific_heat: f64,
    #[serde(skip)]
    pub origin: Origin,
}

/// One layer: either a reference to a named material or inline properties.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub material: Option<Spanned<String>>,
    /// m; may be left out in table data and supplied per wall.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thickness: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conductivity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub specific_heat: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slices: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructionDoc {
    pub name: Spanned<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    /// W/(m²·K), informational.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub declared_u: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub absorptance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emissivity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    /// Outside to inside.
    pub layers: Vec<LayerDoc>,
    #[serde(skip)]
    pub origin: Origin,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowTypeDoc {
    pub name: Spanned<String>,
    /// Width × height with roller blinds, m.
    pub overall: [f64; 2],
    /// Width × height of one pane, m.
    pub glass: [f64; 2],
    #[serde(default = "one_pane")]
    pub panes: u32,
    #[serde(skip)]
    pub origin: Origin,
}

fn one_pane() -> u32 {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AirflowRateDoc {
    pub name: Spanned<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m3_per_hour: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub air_changes: Option<f64>,
    #[serde(skip)]
    pub origin: Origin,
}

/// A circuit given node by node and branch by branch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitDoc {
    pub name: Spanned<String>,
    pub nodes: Vec<NodeDoc>,
    pub branches: Vec<BranchDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeDoc {
    pub label: Spanned<String>,
    /// J/K; zero for a massless node.
    #[serde(default)]
    pub capacity: f64,
    #[serde(default, skip_serializing_if = "is_false")]
    pub flow: bool,
    #[serde(default, skip_serializing_if = "is_false")]
    pub output: bool,
}

/// Heat flows from `from` to `to`; an absent end is the reference.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchDoc {
    pub label: Spanned<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub from: Option<Spanned<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to: Option<Spanned<String>>,
    /// W/K
    pub conductance: f64,
    /// Temperature source in series with the branch.
    #[serde(default, skip_serializing_if = "is_false")]
    pub source: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WallDoc {
    pub name: Spanned<String>,
    pub construction: Spanned<String>,
    /// m²
    pub area: f64,
    /// `exterior` (temperature source) or `node` (terminal `out_air`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outside: Option<Spanned<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outside_film: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inside_film: Option<f64>,
    /// Slices per layer multiplier.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refine: Option<usize>,
    /// Thickness for layers the construction leaves blank, m.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blank_thickness: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowDoc {
    pub name: Spanned<String>,
    /// Window type for the areas; otherwise give both areas.
    #[serde(default, rename = "type", skip_serializing_if = "Option::is_none")]
    pub window_type: Option<Spanned<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overall_area: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub glass_area: Option<f64>,
    /// W/(m²·K), excluding films.
    pub u_value: f64,
    /// `[angle°, τ]` points; informational for the thermal circuit.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub transmittance: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outside_film: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inside_film: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AirflowDoc {
    pub name: Spanned<String>,
    /// `ventilation` (source temperature into terminal `air`) or `interzone`
    /// (terminals `a`, `b`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<Spanned<String>>,
    /// Named airflow rate; otherwise `m3_per_hour` or `air_changes`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<Spanned<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m3_per_hour: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub air_changes: Option<f64>,
    /// m³, required with air changes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub volume: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZoneDoc {
    pub name: Spanned<String>,
    /// m³
    pub volume: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkDoc {
    pub name: Spanned<String>,
    /// W/K
    pub conductance: f64,
}

/// `a` and `b` are `element.node` labels merged into one node.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectionDoc {
    pub a: Spanned<String>,
    pub b: Spanned<String>,
}

/// Feeds `scale × channel` into the source at `target`: a temperature source
/// branch or a flow source node, as `element.label`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BindingDoc {
    pub target: Spanned<String>,
    pub channel: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
}

/// Heater power channel split between a zone air node and wall surfaces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeaterDoc {
    pub channel: String,
    /// Air node, `element.node`.
    pub air: Spanned<String>,
    /// Walls receiving the radiative share by area.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub surfaces: Vec<Spanned<String>>,
}

impl BuildingDescription {
    pub fn element_count(&self) -> usize {
        self.circuit.len() + self.wall.len() + self.window.len() + self.airflow.len() + self.zone.len() + self.link.len()
    }

    fn has_elements_or_wiring(&self) -> bool {
        self.element_count() > 0
            || !self.connection.is_empty()
            || !self.binding.is_empty()
            || !self.heater.is_empty()
            || !self.outputs.is_empty()
            || self.simulation.is_some()
    }

    fn set_table_origin(&mut self, origin: Origin) {
        self.material.iter_mut().for_each(|m| m.origin = origin);
        self.construction.iter_mut().for_each(|c| c.origin = origin);
        self.window_type.iter_mut().for_each(|w| w.origin = origin);
        self.airflow_rate.iter_mut().for_each(|a| a.origin = origin);
    }

    /// Location of `span` in the main file.
    pub fn locate(&self, span: Range<usize>) -> Option<Location> {
        self.sources.locate(Origin(0), span)
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.to_path_buf(), message: e.to_string() })
}

fn parse_document(path: &Path, text: &str) -> Result<BuildingDescription, CliError> {
    toml::from_str(text).map_err(|e| CliError::Parse {
        location: e.span().map(|s| Location::from_offset(path, text, s.start)),
        message: e.message().trim().to_string(),
    })
}

/// Parses the syntax of one document without resolving includes or labels.
pub fn parse_str(path: &Path, text: &str) -> Result<BuildingDescription, CliError> {
    let mut doc = parse_document(path, text)?;
    doc.sources = Sources(vec![(path.to_path_buf(), text.to_string())]);
    Ok(doc)
}

/// Reads a description, merges its includes and checks that every label
/// resolves.
pub fn parse_building(path: &Path) -> Result<BuildingDescription, CliError> {
    let text = read(path)?;
    let mut doc = parse_str(path, &text)?;
    let base = path.parent().unwrap_or(Path::new("."));
    for (k, inc) in std::mem::take(&mut doc.include).into_iter().enumerate() {
        let inc_path = base.join(&inc);
        let inc_text = read(&inc_path)?;
        let mut part = parse_document(&inc_path, &inc_text)?;
        if part.has_elements_or_wiring() || !part.include.is_empty() {
            return Err(CliError::Parse {
                location: Some(Location { path: inc_path, line: 1, column: 1 }),
                message: "included files carry only material, construction, window_type and airflow_rate tables".into(),
            });
        }
        let origin = Origin(k + 1);
        part.set_table_origin(origin);
        doc.sources.0.push((inc_path, inc_text));
        doc.material.extend(part.material);
        doc.construction.extend(part.construction);
        doc.window_type.extend(part.window_type);
        doc.airflow_rate.extend(part.airflow_rate);
    }
    if doc.element_count() == 0 {
        return Err(CliError::Parse {
            location: Some(Location { path: path.to_path_buf(), line: 1, column: 1 }),
            message: "no circuits declared".into(),
        });
    }
    crate::model::resolve(&doc)?;
    Ok(doc)
}

/// TOML text of a description; includes are already merged, so the output
/// stands alone.
pub fn serialize(doc: &BuildingDescription) -> Result<String, CliError> {
    toml::to_string_pretty(doc).map_err(|e| CliError::Parse { location: None, message: format!("cannot serialize: {e}") })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<BuildingDescription, CliError> {
        parse_str(Path::new("t.tc"), text)
    }

    #[test]
    fn unknown_key_is_located() {
        let err = parse("[[zone]]\nname = \"z\"\nvolume = 3.0\ncolour = 1\n").unwrap_err();
        match err {
            CliError::Parse { location: Some(loc), message } => {
                assert_eq!((loc.line, loc.column), (4, 1));
                assert!(message.contains("colour"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_error_is_located() {
        let err = parse("[[zone]]\nname = \"z\nvolume = 3.0\n").unwrap_err();
        let CliError::Parse { location: Some(loc), .. } = err else { panic!("{err:?}") };
        assert_eq!(loc.line, 2);
    }

    #[test]
    fn origins_and_spans_do_not_affect_equality() {
        let a = parse("[[zone]]\nname = \"z\"\nvolume = 3.0\n").unwrap();
        let b = parse("\n\n[[zone]]\nvolume = 3.0\nname    = \"z\"\n").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn serialized_text_parses_back() {
        let a = parse(
            "outputs = [\"z.air\"]\n[[zone]]\nname = \"z\"\nvolume = 3.0\n[[airflow]]\nname = \"v\"\nm3_per_hour = 60.0\n\
             [[connection]]\na = \"v.air\"\nb = \"z.air\"\n[[binding]]\ntarget = \"v.flow\"\nchannel = \"T_out\"\n",
        )
        .unwrap();
        let text = serialize(&a).unwrap();
        assert_eq!(parse(&text).unwrap(), a);
    }
}
