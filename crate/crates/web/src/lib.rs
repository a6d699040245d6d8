//! Browser demo: three operations over the bundled examples, exposed to
//! JavaScript through `wasm-bindgen`. The plain functions are the ones the
//! tests exercise; the exported wrappers only forward.

use wasm_bindgen::prelude::*;

use fusionwb::corpus::bundled;
use fusionwb::files::{self, FileSource, MemorySource};
use fusionwb::models::hnn_presentation;
use fusionwb::stable::{poincare_series, MAX_STABLE_DEGREE};

/// Name under which edited fusion text is placed next to the bundled files.
const INPUT: &str = "input.fus";

fn with_input(fusion_text: &str) -> MemorySource {
    let mut src = bundled();
    src.insert(INPUT, fusion_text);
    src
}

fn load(fusion_text: &str) -> Result<files::LoadedFusion, String> {
    files::load_fusion(&with_input(fusion_text), INPUT).map_err(|e| e.to_string())
}

/// Bundled fusion generator files, one name per line.
pub fn fusion_examples() -> String {
    let src = bundled();
    let names: Vec<&str> = src.files().keys().filter(|k| k.ends_with(".fus")).map(String::as_str).collect();
    names.join("\n")
}

pub fn example_text(name: &str) -> String {
    bundled().read(name).unwrap_or_default()
}

pub fn saturation(fusion_text: &str) -> String {
    match load(fusion_text) {
        Ok(l) => {
            let report = l.fusion.saturation();
            format!(
                "S = {} (order {}), p = {}\n{} morphisms, {} classes of subgroups\n{report}",
                l.group.name(),
                l.group.order(),
                l.fusion.p(),
                l.fusion.morphism_count(),
                l.fusion.conjugacy_classes().len()
            )
        }
        Err(e) => format!("error: {e}"),
    }
}

pub fn poincare(fusion_text: &str, max_degree: usize) -> String {
    let max_degree = max_degree.min(MAX_STABLE_DEGREE);
    match load(fusion_text).and_then(|l| poincare_series(&l.fusion, max_degree).map_err(|e| e.to_string())) {
        Ok(series) => series.iter().enumerate().map(|(d, n)| format!("degree {d}: {n}")).collect::<Vec<_>>().join("\n"),
        Err(e) => format!("error: {e}"),
    }
}

/// Reduces a word such as `t1^-1 s1^1 t1^1` in the HNN model of the fusion text.
pub fn hnn_reduce(fusion_text: &str, word: &str) -> String {
    let run = || -> Result<String, String> {
        let l = load(fusion_text)?;
        let m = hnn_presentation(l.group.clone(), l.fusion.p(), &l.generators).map_err(|e| e.to_string())?;
        let w = m.parse_word(word).map_err(|e| e.to_string())?;
        let r = m.reduce_word(&w).map_err(|e| e.to_string())?;
        Ok(format!(
            "generators: {}\nreduced: {}\nidentity: {}",
            m.generators().join(" "),
            m.format_word(&r),
            if r.is_empty() { "yes" } else { "no" }
        ))
    };
    run().unwrap_or_else(|e| format!("error: {e}"))
}

#[wasm_bindgen(js_name = fusionExamples)]
pub fn fusion_examples_js() -> String {
    fusion_examples()
}

#[wasm_bindgen(js_name = exampleText)]
pub fn example_text_js(name: &str) -> String {
    example_text(name)
}

#[wasm_bindgen(js_name = saturationReport)]
pub fn saturation_js(fusion_text: &str) -> String {
    saturation(fusion_text)
}

#[wasm_bindgen(js_name = poincareSeries)]
pub fn poincare_js(fusion_text: &str, max_degree: usize) -> String {
    poincare(fusion_text, max_degree)
}

#[wasm_bindgen(js_name = hnnReduce)]
pub fn hnn_reduce_js(fusion_text: &str, word: &str) -> String {
    hnn_reduce(fusion_text, word)
}
