mod common;

use std::path::{Path, PathBuf};
use std::sync::Arc;

use common::svg::{attr, runtime_path_labels, vertices};
use premonoidal::frontend::{elaborate, parse};
use premonoidal::io::read_signature;
use premonoidal::render::{render, render_text, RenderMode, RenderOptions};
use premonoidal::signature::global_state_signature;
use premonoidal::{Diagram, EffectfulSignature, Slice};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join(name)
}

fn hello_world() -> Diagram {
    let sig = Arc::new(read_signature(&data("data/hello.sig.json")).unwrap());
    let source = std::fs::read_to_string(data("data/hello_world.arrow")).unwrap();
    elaborate(&parse(&source).unwrap(), &sig).unwrap()
}

fn svg_runtime() -> RenderOptions {
    RenderOptions {
        mode: RenderMode::Svg,
        show_runtime: true,
        ..RenderOptions::default()
    }
}

const GOLDEN: &str = "golden/hello_world_runtime.svg";

#[test]
fn hello_world_runtime_golden() {
    let svg = render(&hello_world(), &svg_runtime()).unwrap();
    let path = data(GOLDEN);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &svg).unwrap();
    }
    assert_eq!(svg, std::fs::read_to_string(&path).unwrap());
}

#[test]
fn runtime_path_visits_effectful_boxes_in_order() {
    let d = hello_world();
    let opts = svg_runtime();
    let svg = render(&d, &opts).unwrap();
    let labels = runtime_path_labels(&svg, &opts.runtime_color).unwrap();
    assert_eq!(labels, d.effectful_ids());
}

#[test]
fn identity_on_nothing_is_blank() {
    let sig = Arc::new(EffectfulSignature::new());
    let d = Diagram::identity(&sig, vec![]).unwrap();
    let svg = render(
        &d,
        &RenderOptions {
            mode: RenderMode::Svg,
            ..RenderOptions::default()
        },
    )
    .unwrap();
    assert!(!svg.contains("<path") && !svg.contains("<rect"));
    assert!(svg.starts_with("<?xml") && svg.ends_with("</svg>\n"));
}

#[test]
fn rendering_is_deterministic() {
    let d = hello_world();
    for opts in [svg_runtime(), RenderOptions::default()] {
        assert_eq!(render(&d, &opts).unwrap(), render(&d.clone(), &opts).unwrap());
    }
}

#[test]
fn text_layouts() {
    let sig = Arc::new(global_state_signature());
    let id = Diagram::identity(&sig, vec!["X".into()]).unwrap();
    assert_eq!(render_text(&id), "|\n|\n|\n");
    let get_put = Diagram::new(&sig, vec![], vec![Slice::new("get", 0), Slice::new("put", 0)]).unwrap();
    assert_eq!(render_text(&get_put), "\n\n[get]\n|\n[put]\n\n\n");
    let wide = Diagram::new(&sig, vec!["X".into(), "X".into()], vec![Slice::new("copy", 0)]).unwrap();
    assert_eq!(render_text(&wide), "| |\n| |\n[copy] |\n| | |\n| | |\n");
}

#[test]
fn options_are_checked() {
    let d = hello_world();
    let bad = [
        RenderOptions {
            cell_width: 0,
            ..svg_runtime()
        },
        RenderOptions {
            runtime_color: "#12".into(),
            ..svg_runtime()
        },
        RenderOptions {
            runtime_color: "Red;".into(),
            ..svg_runtime()
        },
    ];
    for opts in bad {
        assert!(render(&d, &opts).is_err(), "{opts:?}");
    }
}

#[test]
fn braids_are_drawn_as_crossings() {
    let sig = Arc::new(global_state_signature());
    let d = Diagram::new(
        &sig,
        vec!["X".into()],
        vec![Slice::new("get", 1), Slice::new("put", 0)],
    )
    .unwrap();
    let svg = render(&d, &svg_runtime()).unwrap();
    let runtime: Vec<&str> = svg
        .lines()
        .filter(|l| l.contains("class=\"wire runtime\""))
        .collect();
    assert_eq!(runtime.len(), 1);
    let points = vertices(attr(runtime[0], "d"));
    assert!(
        points.iter().any(|p| p.0 != points[0].0),
        "the runtime wire moves across"
    );
    assert_eq!(svg.matches("class=\"box effectful\"").count(), 2);
    assert!(!svg.contains("sigma"));
}
