use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use thermocircuit::tables::CONSTRUCTIONS;
use thermocircuit::{build_dae, steady_state, SourceValues};
use thermocircuit_cli::config::parse_str;
use thermocircuit_cli::{build_scenario, parse_building, run, serialize, CliError, RunOptions};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn write_csv(dir: &Path, name: &str, header: &str, rows: impl IntoIterator<Item = String>) -> PathBuf {
    let mut text = format!("{header}\n");
    for r in rows {
        text.push_str(&r);
        text.push('\n');
    }
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn unit_inputs(dir: &Path, samples: usize) -> PathBuf {
    write_csv(dir, "unit.csv", "time,tc1.q11,tc3.q31,tc1.th11,tc3.th31", (0..samples).map(|k| format!("{},1,1,1,1", 600 * k)))
}

fn parse_error(e: CliError) -> (usize, String) {
    match e {
        CliError::Parse { location: Some(l), message } => (l.line, message),
        other => panic!("expected a located parse error, got {other:?}"),
    }
}

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_thermocircuit"))
}

#[test]
fn fixture_has_three_circuits_and_two_connections() {
    let doc = parse_building(&fixture("figure1.tc")).unwrap();
    assert_eq!(doc.circuit.len(), 3);
    assert_eq!(doc.connection.len(), 2);
    let s = build_scenario(&doc).unwrap();
    assert_eq!(s.circuit.node_count(), 3);
    assert_eq!(s.model.state_count(), 2);
    assert_eq!(s.model.input_labels, vec!["tc1.q11", "tc3.q31", "tc1.th11", "tc3.th31"]);
}

#[test]
fn empty_file_declares_no_circuits() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.tc");
    fs::write(&path, "").unwrap();
    let (line, message) = parse_error(parse_building(&path).unwrap_err());
    assert_eq!(line, 1);
    assert_eq!(message, "no circuits declared");
}

#[test]
fn missing_node_in_connection_is_located() {
    let text = fs::read_to_string(fixture("figure1.tc")).unwrap().replace("b = \"tc2.th21\"", "b = \"tc2.th99\"");
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.tc");
    fs::write(&path, &text).unwrap();
    let err = parse_building(&path).unwrap_err();
    let shown = err.to_string();
    let (line, message) = parse_error(err);
    let expected_line = text.lines().position(|l| l.contains("tc2.th99")).unwrap() + 1;
    assert_eq!(line, expected_line);
    assert!(message.contains("no node `th99`"), "{message}");
    assert!(shown.starts_with("config: ") && shown.contains(&format!("bad.tc:{expected_line}:5")), "{shown}");
}

#[test]
fn descriptions_round_trip() {
    for name in ["figure1.tc", "living_room.tc"] {
        let doc = parse_building(&fixture(name)).unwrap();
        let text = serialize(&doc).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(name);
        fs::write(&path, &text).unwrap();
        let again = parse_building(&path).unwrap();
        assert_eq!(again, doc, "{name}");
        assert_eq!(serialize(&again).unwrap(), text);
    }
}

#[test]
fn table_fixture_matches_published_rows() {
    let tables = fixture("twin_house_tables.tc");
    let (line, message) = parse_error(parse_building(&tables).unwrap_err());
    assert_eq!((line, message.as_str()), (1, "no circuits declared"));

    let doc = parse_str(&tables, &fs::read_to_string(&tables).unwrap()).unwrap();
    assert_eq!(doc.construction.len(), CONSTRUCTIONS.len());
    for row in &CONSTRUCTIONS {
        let c = doc.construction.iter().find(|c| c.name.get_ref() == row.number).unwrap();
        assert_eq!(c.declared_u, row.declared_u, "{}", row.number);
        assert_eq!((c.absorptance, c.emissivity), (Some(row.absorptance), Some(row.emissivity)));
        assert_eq!(c.layers.len(), row.layers.len());
        for (l, r) in c.layers.iter().zip(row.layers) {
            assert_eq!(l.name.as_deref(), Some(r.name));
            assert_eq!(l.thickness, r.thickness);
            assert_eq!((l.conductivity, l.density, l.specific_heat), (Some(r.conductivity), Some(r.density), Some(r.specific_heat)));
        }
    }
    let pillar = doc.construction.iter().find(|c| c.name.get_ref() == "9*").unwrap();
    assert_eq!(pillar.note.as_deref(), Some(thermocircuit::tables::PILLAR_FOOTNOTE));
    for w in &thermocircuit::tables::WINDOWS {
        let t = doc.window_type.iter().find(|t| t.name.get_ref() == w.name).unwrap();
        assert_eq!((t.overall, t.glass, t.panes), ([w.overall.0, w.overall.1], [w.pane.0, w.pane.1], w.panes));
    }
    let rate = |n: &str| doc.airflow_rate.iter().find(|r| r.name.get_ref() == n).unwrap();
    assert_eq!(rate("7").air_changes, Some(thermocircuit::tables::INFILTRATION_ACH));
    assert_eq!(rate("8").m3_per_hour, Some(thermocircuit::tables::VENTILATION_M3_PER_HOUR));
}

#[test]
fn living_room_fixture_builds_from_included_tables() {
    let doc = parse_building(&fixture("living_room.tc")).unwrap();
    let s = build_scenario(&doc).unwrap();
    // twelve element circuits around one air node
    assert_eq!(doc.element_count(), 13);
    assert_eq!(s.model.state_count(), s.circuit.capacitive_count());
    assert_eq!(s.model.output_labels, vec!["living.air"]);
}

#[test]
fn three_circuit_converges_to_dense_steady_state() {
    let dir = tempfile::tempdir().unwrap();
    let inputs = unit_inputs(dir.path(), 300);
    let output = dir.path().join("out.csv");
    run(&RunOptions::new(fixture("figure1.tc"), &inputs, &output)).unwrap();

    let s = build_scenario(&parse_building(&fixture("figure1.tc")).unwrap()).unwrap();
    let full = steady_state(&build_dae(&s.circuit).unwrap(), &SourceValues { branch_temps: vec![1.0; 2], node_flows: vec![1.0; 2] })
        .unwrap();
    let text = fs::read_to_string(&output).unwrap();
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    let last: Vec<f64> = text.lines().last().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(header.len(), 1 + s.model.output_count());
    for (col, &node) in s.model.outputs.iter().enumerate() {
        assert_eq!(header[col + 1], s.circuit.node_labels[node]);
        assert!((last[col + 1] - full[node]).abs() < 1e-6, "{}: {} vs {}", header[col + 1], last[col + 1], full[node]);
    }
}

#[test]
fn eigen_report_of_single_rc_lists_g_over_c() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("rc.tc");
    fs::write(
        &config,
        "[[circuit]]\nname = \"rc\"\nnodes = [{ label = \"n\", capacity = 1000.0, output = true }]\n\
         branches = [{ label = \"g\", to = \"n\", conductance = 4.0, source = true }]\n",
    )
    .unwrap();
    let inputs = write_csv(dir.path(), "in.csv", "time,rc.g", (0..3).map(|k| format!("{},20", 600 * k)));
    let output = dir.path().join("rc.out.csv");
    run(&RunOptions { report_eigen: true, ..RunOptions::new(&config, &inputs, &output) }).unwrap();
    let report = fs::read_to_string(dir.path().join("rc.out.eigen.csv")).unwrap();
    let rows: Vec<&str> = report.lines().skip_while(|l| !l.starts_with("eigenvalue")).skip(1).collect();
    assert_eq!(rows.len(), 1);
    let fields: Vec<f64> = rows[0].split(',').map(|v| v.parse().unwrap()).collect();
    assert!((fields[0] + 4.0 / 1000.0).abs() < 1e-15);
    assert!((fields[1] - 250.0).abs() < 1e-9);
}

#[test]
fn self_comparison_has_zero_error() {
    let dir = tempfile::tempdir().unwrap();
    let inputs = unit_inputs(dir.path(), 50);
    let output = dir.path().join("sim.csv");
    run(&RunOptions::new(fixture("figure1.tc"), &inputs, &output)).unwrap();
    let measured = dir.path().join("measured.csv");
    fs::copy(&output, &measured).unwrap();
    let summary = run(&RunOptions { compare: Some(measured), ..RunOptions::new(fixture("figure1.tc"), &inputs, &output) }).unwrap();
    assert_eq!(summary.comparisons.len(), 3);
    for c in &summary.comparisons {
        assert_eq!((c.stats.mean, c.stats.std_dev), (0.0, 0.0), "{}", c.simulated);
        assert_eq!(c.stats.count, 50);
    }
    assert!(dir.path().join("sim.compare.csv").is_file());
    assert!(dir.path().join("sim.histogram.csv").is_file());
}

#[test]
fn unbound_sources_need_permission() {
    let dir = tempfile::tempdir().unwrap();
    let inputs = write_csv(dir.path(), "partial.csv", "time,tc1.q11", (0..4).map(|k| format!("{},1", 600 * k)));
    let output = dir.path().join("o.csv");
    let err = run(&RunOptions::new(fixture("figure1.tc"), &inputs, &output)).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("tc3.q31"), "{err}");
    run(&RunOptions { allow_unbound: true, ..RunOptions::new(fixture("figure1.tc"), &inputs, &output) }).unwrap();
}

#[test]
fn runs_are_byte_identical_and_batch_matches_single_runs() {
    let dir = tempfile::tempdir().unwrap();
    let batch = dir.path().join("batch");
    fs::create_dir(&batch).unwrap();
    fs::copy(fixture("figure1.tc"), batch.join("a.tc")).unwrap();
    unit_inputs(&batch, 40);
    fs::rename(batch.join("unit.csv"), batch.join("a.csv")).unwrap();
    fs::copy(fixture("living_room.tc"), batch.join("b.tc")).unwrap();
    fs::copy(fixture("twin_house_tables.tc"), batch.join("twin_house_tables.tc")).unwrap();
    let header = "time,T_out,T_supply,T_kitchen,T_doorway,T_corridor,T_attic,T_cellar,E_south,E_west,Q_heater";
    write_csv(&batch, "b.csv", header, (0..144).map(|k| format!("{},{},18,22,21,21,17,14,{},0,{}", 600 * k, 10 + k % 7, k % 50, 500 * (k / 36 % 2))));

    let single = dir.path().join("single.csv");
    run(&RunOptions::new(batch.join("b.tc"), batch.join("b.csv"), &single)).unwrap();
    let first = fs::read(&single).unwrap();
    run(&RunOptions::new(batch.join("b.tc"), batch.join("b.csv"), &single)).unwrap();
    assert_eq!(fs::read(&single).unwrap(), first);

    let out = dir.path().join("out");
    for _ in 0..2 {
        let status = binary().arg("--batch").arg(&batch).arg("--output").arg(&out).status().unwrap();
        assert!(status.success());
        assert_eq!(fs::read(out.join("b.out.csv")).unwrap(), first);
    }
    assert!(out.join("a.out.csv").is_file());
    assert!(!out.join("twin_house_tables.out.csv").exists());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let inputs = unit_inputs(dir.path(), 10);
    let out = dir.path().join("o.csv");
    let code = |args: &[&std::ffi::OsStr]| binary().args(args).output().unwrap().status.code().unwrap();
    let p = |s: &Path| s.as_os_str().to_owned();

    assert_eq!(code(&[]), 1);
    assert_eq!(code(&["--method".as_ref(), "rk4".as_ref()]), 1);

    let bad = dir.path().join("bad.tc");
    fs::write(&bad, "[[circuit]\n").unwrap();
    assert_eq!(code(&["--config".as_ref(), &p(&bad), "--inputs".as_ref(), &p(&inputs), "--output".as_ref(), &p(&out)]), 2);

    // no capacitive node: nothing to integrate
    let massless = dir.path().join("massless.tc");
    fs::write(
        &massless,
        "[[circuit]]\nname = \"m\"\nnodes = [{ label = \"n\", output = true }]\n\
         branches = [{ label = \"g\", to = \"n\", conductance = 1.0, source = true }]\n",
    )
    .unwrap();
    let m_inputs = write_csv(dir.path(), "m.csv", "time,m.g", ["0,1".to_string()]);
    assert_eq!(code(&["--config".as_ref(), &p(&massless), "--inputs".as_ref(), &p(&m_inputs), "--output".as_ref(), &p(&out)]), 3);

    // 6000 s samples exceed the explicit-Euler stability limit of the fixture
    let coarse = write_csv(dir.path(), "coarse.csv", "time,tc1.q11,tc3.q31,tc1.th11,tc3.th31", (0..10).map(|k| format!("{},1,1,1,1", 6000 * k)));
    let three = fixture("figure1.tc");
    let base = [&p(&three), &p(&coarse), &p(&out)];
    let with = |extra: &[&str]| {
        let mut args: Vec<std::ffi::OsString> =
            vec!["--config".into(), base[0].clone(), "--inputs".into(), base[1].clone(), "--output".into(), base[2].clone()];
        args.extend(extra.iter().map(|s| s.into()));
        binary().args(&args).output().unwrap().status.code().unwrap()
    };
    assert_eq!(with(&[]), 0);
    assert_eq!(with(&["--method", "explicit-euler"]), 4);
    assert_eq!(with(&["--method", "explicit-euler", "--dt", "600"]), 0);
    assert_eq!(with(&["--dt", "700"]), 1);
    assert_eq!(with(&["--method", "explicit-euler", "--dt", "600", "--report-eigen"]), 0);
}
