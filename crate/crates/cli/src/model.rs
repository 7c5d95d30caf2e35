//! Turns a [`BuildingDescription`] into an assembled circuit, a state-space
//! model and the routing of input channels onto model inputs.

use std::collections::{BTreeMap, HashMap};
use std::ops::Range;

use thermocircuit::assembler::Assembly;
use thermocircuit::elements::{
    distribute_by_area, heater_split, interzone_airflow_circuit, link_circuit, ventilation_circuit, wall_circuit,
    window_circuit, zone_air_circuit, AirflowSpec, LayerSpec, Material, OutsideBoundary, TransmittanceCurve, WallSpec,
    WindowSpec, DEFAULT_INSIDE_FILM, DEFAULT_OUTSIDE_FILM,
};
use thermocircuit::{build_dae, extract_state_space, Circuit, CircuitBuilder, CircuitSet, InputId, Method, Model};
use toml::Spanned;

use crate::config::{AirflowDoc, BuildingDescription, CircuitDoc, ConstructionDoc, Origin, WallDoc, WindowDoc};
use crate::error::{CliError, Location};

/// `scale × channel` feeding one model input.
#[derive(Clone, Debug, PartialEq)]
pub struct Route {
    pub channel: String,
    pub scale: f64,
    /// Where the route was declared.
    pub location: Option<Location>,
}

/// Resolved description, before state-space extraction.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub set: CircuitSet<f64>,
    pub assembly: Assembly<f64>,
    pub routes: BTreeMap<InputKey, Vec<Route>>,
    pub method: Option<Method>,
    pub step: Option<f64>,
    pub allow_unbound: bool,
}

/// Orderable stand-in for [`InputId`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum InputKey {
    Branch(usize),
    Node(usize),
}

impl From<InputId> for InputKey {
    fn from(id: InputId) -> Self {
        match id {
            InputId::BranchTemperature(k) => InputKey::Branch(k),
            InputId::NodeFlow(j) => InputKey::Node(j),
        }
    }
}

/// Everything a run needs.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub circuit: Circuit,
    pub model: Model,
    /// Explicit routes per model input, in model input order.
    pub routes: Vec<Vec<Route>>,
    pub method: Option<Method>,
    pub step: Option<f64>,
    pub allow_unbound: bool,
}

struct Ctx<'a> {
    doc: &'a BuildingDescription,
}

impl Ctx<'_> {
    fn fail(&self, origin: Origin, span: Range<usize>, message: impl Into<String>) -> CliError {
        CliError::Parse { location: self.doc.sources.locate(origin, span), message: message.into() }
    }

    fn at(&self, s: &Spanned<String>, message: impl Into<String>) -> CliError {
        self.fail(Origin(0), s.span(), message)
    }
}

fn split_label(label: &str) -> Option<(&str, &str)> {
    label.split_once('.').filter(|(e, n)| !e.is_empty() && !n.is_empty())
}

/// Resolves every label and builds the circuits; fails on the first
/// unresolved reference, naming its location.
pub fn resolve(doc: &BuildingDescription) -> Result<Resolved, CliError> {
    let ctx = Ctx { doc };
    check_unique_names(&ctx)?;
    let mut set = CircuitSet::new();
    let element_error = |name: &Spanned<String>, e: thermocircuit::Error| ctx.at(name, format!("element `{}`: {e}", name.get_ref()));
    for c in &doc.circuit {
        let circuit = raw_circuit(&ctx, c)?;
        set.add(c.name.get_ref(), circuit).map_err(|e| element_error(&c.name, e))?;
    }
    for w in &doc.wall {
        let circuit = wall_circuit(&wall_spec(&ctx, w)?).map_err(|e| element_error(&w.name, e))?;
        set.add(w.name.get_ref(), circuit).map_err(|e| element_error(&w.name, e))?;
    }
    for w in &doc.window {
        let circuit = window_circuit(&window_spec(&ctx, w)?).map_err(|e| element_error(&w.name, e))?;
        set.add(w.name.get_ref(), circuit).map_err(|e| element_error(&w.name, e))?;
    }
    for a in &doc.airflow {
        let circuit = airflow_circuit(&ctx, a)?;
        set.add(a.name.get_ref(), circuit).map_err(|e| element_error(&a.name, e))?;
    }
    for z in &doc.zone {
        let circuit = zone_air_circuit(z.volume).map_err(|e| element_error(&z.name, e))?;
        set.add(z.name.get_ref(), circuit).map_err(|e| element_error(&z.name, e))?;
    }
    for l in &doc.link {
        let circuit = link_circuit(l.conductance).map_err(|e| element_error(&l.name, e))?;
        set.add(l.name.get_ref(), circuit).map_err(|e| element_error(&l.name, e))?;
    }

    for c in &doc.connection {
        let a = node_ref(&ctx, &set, &c.a)?;
        let b = node_ref(&ctx, &set, &c.b)?;
        set.connections.connect(a, b);
    }
    let mut assembly = set.assemble_with_plan().map_err(|e| match e {
        thermocircuit::Error::Connection { connection, reason } if connection < doc.connection.len() => {
            ctx.at(&doc.connection[connection].a, format!("connection {}: {reason}", connection + 1))
        }
        e => CliError::from(e),
    })?;

    if !doc.outputs.is_empty() {
        let flags = &mut assembly.circuit.output_flags;
        flags.iter_mut().for_each(|f| *f = false);
        for o in &doc.outputs {
            let (c, j) = node_ref(&ctx, &set, o)?;
            flags[assembly.plan.node_map[c][j]] = true;
        }
    }

    let mut routes: BTreeMap<InputKey, Vec<Route>> = BTreeMap::new();
    for b in &doc.binding {
        let key = source_key(&ctx, &set, &assembly, &b.target)?;
        let scale = b.scale.unwrap_or(1.0);
        if !scale.is_finite() {
            return Err(ctx.at(&b.target, "binding scale must be finite"));
        }
        routes.entry(key).or_default().push(Route {
            channel: b.channel.clone(),
            scale,
            location: doc.locate(b.target.span()),
        });
    }
    for h in &doc.heater {
        add_heater_routes(&ctx, &set, &assembly, h, &mut routes)?;
    }

    let settings = doc.simulation.clone().unwrap_or_default();
    let method = match &settings.method {
        Some(m) => Some(m.get_ref().parse::<Method>().map_err(|e| ctx.at(m, e.to_string()))?),
        None => None,
    };
    Ok(Resolved { set, assembly, routes, method, step: settings.step, allow_unbound: settings.allow_unbound })
}

/// Resolves and extracts the state-space model.
pub fn build_scenario(doc: &BuildingDescription) -> Result<Scenario, CliError> {
    let r = resolve(doc)?;
    let circuit = r.assembly.circuit;
    let model = extract_state_space(&build_dae(&circuit)?, &circuit)?;
    let routes = model.inputs.iter().map(|&id| r.routes.get(&InputKey::from(id)).cloned().unwrap_or_default()).collect();
    Ok(Scenario { circuit, model, routes, method: r.method, step: r.step, allow_unbound: r.allow_unbound })
}

fn check_unique_names(ctx: &Ctx<'_>) -> Result<(), CliError> {
    let doc = ctx.doc;
    let names = doc
        .circuit
        .iter()
        .map(|c| &c.name)
        .chain(doc.wall.iter().map(|w| &w.name))
        .chain(doc.window.iter().map(|w| &w.name))
        .chain(doc.airflow.iter().map(|a| &a.name))
        .chain(doc.zone.iter().map(|z| &z.name))
        .chain(doc.link.iter().map(|l| &l.name));
    let mut seen = HashMap::new();
    for n in names {
        let s = n.get_ref();
        if s.is_empty() || s.contains('.') || s.contains('=') {
            return Err(ctx.at(n, format!("element name `{s}` must be non-empty and contain neither `.` nor `=`")));
        }
        if seen.insert(s.clone(), ()).is_some() {
            return Err(ctx.at(n, format!("duplicate element name `{s}`")));
        }
    }
    Ok(())
}

fn raw_circuit(ctx: &Ctx<'_>, c: &CircuitDoc) -> Result<Circuit, CliError> {
    let mut b = CircuitBuilder::new();
    let mut index = HashMap::new();
    for n in &c.nodes {
        if index.contains_key(n.label.get_ref()) {
            return Err(ctx.at(&n.label, format!("circuit `{}`: duplicate node `{}`", c.name.get_ref(), n.label.get_ref())));
        }
        let j = b.node(n.label.get_ref().clone(), n.capacity);
        if n.flow {
            b.flow_source(j);
        }
        if n.output {
            b.output(j);
        }
        index.insert(n.label.get_ref().clone(), j);
    }
    let end = |s: &Option<Spanned<String>>| -> Result<Option<usize>, CliError> {
        match s {
            None => Ok(None),
            Some(l) => index.get(l.get_ref()).copied().map(Some).ok_or_else(|| {
                ctx.at(l, format!("circuit `{}` has no node `{}`", c.name.get_ref(), l.get_ref()))
            }),
        }
    };
    let mut branch_labels = HashMap::new();
    for br in &c.branches {
        if branch_labels.insert(br.label.get_ref().clone(), ()).is_some() {
            return Err(ctx.at(&br.label, format!("circuit `{}`: duplicate branch `{}`", c.name.get_ref(), br.label.get_ref())));
        }
        let (from, to) = (end(&br.from)?, end(&br.to)?);
        if from.is_none() && to.is_none() {
            return Err(ctx.at(&br.label, format!("branch `{}` needs at least one node", br.label.get_ref())));
        }
        let k = b.branch(br.label.get_ref().clone(), from, to, br.conductance);
        if br.source {
            b.temperature_source(k);
        }
    }
    Ok(b.build())
}

fn construction<'a>(ctx: &Ctx<'a>, w: &WallDoc) -> Result<&'a ConstructionDoc, CliError> {
    ctx.doc
        .construction
        .iter()
        .find(|c| c.name.get_ref() == w.construction.get_ref())
        .ok_or_else(|| ctx.at(&w.construction, format!("unknown construction `{}`", w.construction.get_ref())))
}

fn wall_spec(ctx: &Ctx<'_>, w: &WallDoc) -> Result<WallSpec<f64>, CliError> {
    let con = construction(ctx, w)?;
    let mut layers = Vec::with_capacity(con.layers.len());
    for (i, l) in con.layers.iter().enumerate() {
        let layer_name = l.name.clone().unwrap_or_else(|| format!("#{}", i + 1));
        let here = |msg: String| ctx.fail(con.origin, con.name.span(), format!("construction `{}`: {msg}", con.name.get_ref()));
        let material = match (&l.material, l.conductivity, l.density, l.specific_heat) {
            (Some(m), None, None, None) => {
                let row = ctx.doc.material.iter().find(|r| r.name.get_ref() == m.get_ref()).ok_or_else(|| {
                    ctx.fail(con.origin, m.span(), format!("unknown material `{}`", m.get_ref()))
                })?;
                Material::new(row.conductivity, row.density, row.specific_heat)
            }
            (None, Some(k), Some(rho), Some(cp)) => Material::new(k, rho, cp),
            _ => return Err(here(format!("layer `{layer_name}` needs either `material` or all three properties"))),
        }
        .map_err(|e| here(format!("layer `{layer_name}`: {e}")))?;
        let thickness = match (l.thickness, w.blank_thickness) {
            (Some(d), _) | (None, Some(d)) => d,
            (None, None) => {
                return Err(ctx.at(
                    &w.name,
                    format!("layer `{layer_name}` of construction `{}` has no thickness; set `blank_thickness`", con.name.get_ref()),
                ))
            }
        };
        layers.push(LayerSpec::new(material, thickness).with_slices(l.slices.unwrap_or(1)));
    }
    let mut spec = WallSpec::new(
        layers,
        w.area,
        w.outside_film.unwrap_or(DEFAULT_OUTSIDE_FILM),
        w.inside_film.unwrap_or(DEFAULT_INSIDE_FILM),
    )
    .with_surface(con.absorptance.unwrap_or(0.0), con.emissivity.unwrap_or(1.0));
    if let Some(o) = &w.outside {
        spec = spec.with_outside(match o.get_ref().as_str() {
            "exterior" => OutsideBoundary::Exterior,
            "node" => OutsideBoundary::Node,
            other => return Err(ctx.at(o, format!("outside must be `exterior` or `node`, got `{other}`"))),
        });
    }
    if let Some(f) = w.refine {
        if f == 0 {
            return Err(ctx.at(&w.name, "refine must be at least 1"));
        }
        spec = spec.refined(f);
    }
    Ok(spec)
}

fn window_spec(ctx: &Ctx<'_>, w: &WindowDoc) -> Result<WindowSpec<f64>, CliError> {
    let (overall, glass) = match (&w.window_type, w.overall_area, w.glass_area) {
        (Some(t), None, None) => {
            let row = ctx.doc.window_type.iter().find(|r| r.name.get_ref() == t.get_ref()).ok_or_else(|| {
                ctx.at(t, format!("unknown window type `{}`", t.get_ref()))
            })?;
            (row.overall[0] * row.overall[1], f64::from(row.panes) * row.glass[0] * row.glass[1])
        }
        (None, Some(o), Some(g)) => (o, g),
        _ => return Err(ctx.at(&w.name, "window needs either `type` or both `overall_area` and `glass_area`")),
    };
    let curve = if w.transmittance.is_empty() {
        TransmittanceCurve::constant(0.0)
    } else {
        TransmittanceCurve::new(w.transmittance.iter().map(|p| (p[0], p[1])).collect())
    }
    .map_err(|e| ctx.at(&w.name, format!("element `{}`: {e}", w.name.get_ref())))?;
    let mut spec = WindowSpec::new(overall, glass, w.u_value, curve);
    if let Some(h) = w.outside_film {
        spec.outside_film = h;
    }
    if let Some(h) = w.inside_film {
        spec.inside_film = h;
    }
    Ok(spec)
}

fn airflow_circuit(ctx: &Ctx<'_>, a: &AirflowDoc) -> Result<Circuit, CliError> {
    let (m3h, ach) = match &a.rate {
        Some(r) if a.m3_per_hour.is_none() && a.air_changes.is_none() => {
            let row = ctx.doc.airflow_rate.iter().find(|x| x.name.get_ref() == r.get_ref()).ok_or_else(|| {
                ctx.at(r, format!("unknown airflow rate `{}`", r.get_ref()))
            })?;
            (row.m3_per_hour, row.air_changes)
        }
        None => (a.m3_per_hour, a.air_changes),
        Some(r) => return Err(ctx.at(r, "give either `rate` or an explicit flow, not both")),
    };
    let spec = match (m3h, ach) {
        (Some(q), None) => AirflowSpec::volumetric(q),
        (None, Some(n)) => {
            let v = a.volume.ok_or_else(|| ctx.at(&a.name, "air changes need the zone `volume`"))?;
            AirflowSpec::air_changes(n, v)
        }
        _ => return Err(ctx.at(&a.name, "airflow needs exactly one of `m3_per_hour` and `air_changes`")),
    };
    let kind = a.kind.as_ref().map_or("ventilation", |k| k.get_ref().as_str());
    match kind {
        "ventilation" => ventilation_circuit(&spec),
        "interzone" => interzone_airflow_circuit(&spec),
        other => {
            let k = a.kind.as_ref().expect("only explicit kinds are unknown");
            return Err(ctx.at(k, format!("airflow kind must be `ventilation` or `interzone`, got `{other}`")));
        }
    }
    .map_err(|e| ctx.at(&a.name, format!("element `{}`: {e}", a.name.get_ref())))
}

fn element_of<'a>(ctx: &Ctx<'_>, set: &CircuitSet<f64>, label: &'a Spanned<String>) -> Result<(usize, &'a str), CliError> {
    let (element, local) = split_label(label.get_ref())
        .ok_or_else(|| ctx.at(label, format!("`{}` is not of the form element.label", label.get_ref())))?;
    let c = set.position(element).ok_or_else(|| ctx.at(label, format!("unknown element `{element}`")))?;
    Ok((c, local))
}

fn node_ref(ctx: &Ctx<'_>, set: &CircuitSet<f64>, label: &Spanned<String>) -> Result<(usize, usize), CliError> {
    let (c, local) = element_of(ctx, set, label)?;
    let j = set.circuits[c]
        .node_index(label.get_ref())
        .ok_or_else(|| ctx.at(label, format!("element `{}` has no node `{local}`", set.names[c])))?;
    Ok((c, j))
}

fn source_key(
    ctx: &Ctx<'_>,
    set: &CircuitSet<f64>,
    assembly: &Assembly<f64>,
    label: &Spanned<String>,
) -> Result<InputKey, CliError> {
    let (c, local) = element_of(ctx, set, label)?;
    let circuit = &set.circuits[c];
    if let Some(k) = circuit.branch_index(label.get_ref()) {
        if !circuit.temp_source_flags[k] {
            return Err(ctx.at(label, format!("branch `{}` carries no temperature source", label.get_ref())));
        }
        return Ok(InputKey::Branch(assembly.plan.branch_map[c][k]));
    }
    if let Some(j) = circuit.node_index(label.get_ref()) {
        let global = assembly.plan.node_map[c][j];
        if !assembly.circuit.flow_source_flags[global] {
            return Err(ctx.at(label, format!("node `{}` carries no flow source", label.get_ref())));
        }
        return Ok(InputKey::Node(global));
    }
    Err(ctx.at(label, format!("element `{}` has no branch or node `{local}`", set.names[c])))
}

fn add_heater_routes(
    ctx: &Ctx<'_>,
    set: &CircuitSet<f64>,
    assembly: &Assembly<f64>,
    h: &crate::config::HeaterDoc,
    routes: &mut BTreeMap<InputKey, Vec<Route>>,
) -> Result<(), CliError> {
    let location = ctx.doc.locate(h.air.span());
    let mut push = |key, scale| {
        routes.entry(key).or_default().push(Route { channel: h.channel.clone(), scale, location: location.clone() })
    };
    let air = source_key(ctx, set, assembly, &h.air)?;
    if h.surfaces.is_empty() {
        push(air, 1.0);
        return Ok(());
    }
    let (convective, radiative) = heater_split(1.0)?;
    push(air, convective);
    let mut keys = Vec::new();
    let mut areas = Vec::new();
    for s in &h.surfaces {
        let wall = ctx
            .doc
            .wall
            .iter()
            .find(|w| w.name.get_ref() == s.get_ref())
            .ok_or_else(|| ctx.at(s, format!("heater surface `{}` is not a wall", s.get_ref())))?;
        let surface = Spanned::new(s.span(), format!("{}.in_surface", s.get_ref()));
        keys.push(source_key(ctx, set, assembly, &surface)?);
        areas.push(wall.area);
    }
    for (key, share) in keys.into_iter().zip(distribute_by_area(radiative, &areas)?) {
        push(key, share);
    }
    Ok(())
}
