//! Validation of a standalone SVG file against the SVG 1.1 DTD rules for the
//! elements a WEZ plot can contain: document type declaration, element
//! content models, attribute lists, required attributes and the lexical form
//! of numeric and path attributes.

use std::collections::HashSet;

const SVG_NS: &str = "http://www.w3.org/2000/svg";
const XML_NS: &str = "http://www.w3.org/XML/1998/namespace";
const PUBLIC_ID: &str = "-//W3C//DTD SVG 1.1//EN";
const SYSTEM_ID: &str = "http://www.w3.org/Graphics/SVG/1.1/DTD/svg11.dtd";

const CORE: &[&str] = &["id", "xml:base", "xml:lang", "xml:space"];
const CONDITIONAL: &[&str] = &["requiredFeatures", "requiredExtensions", "systemLanguage"];
const STYLE: &[&str] = &["class", "style"];
const EXTERNAL: &[&str] = &["externalResourcesRequired"];
const GRAPHICAL_EVENTS: &[&str] = &[
    "onfocusin", "onfocusout", "onactivate", "onclick", "onmousedown", "onmouseup", "onmouseover", "onmousemove",
    "onmouseout", "onload",
];
const PRESENTATION: &[&str] = &[
    "alignment-baseline", "baseline-shift", "clip", "clip-path", "clip-rule", "color", "color-interpolation",
    "color-interpolation-filters", "color-profile", "color-rendering", "cursor", "direction", "display",
    "dominant-baseline", "enable-background", "fill", "fill-opacity", "fill-rule", "filter", "flood-color",
    "flood-opacity", "font-family", "font-size", "font-size-adjust", "font-stretch", "font-style", "font-variant",
    "font-weight", "glyph-orientation-horizontal", "glyph-orientation-vertical", "image-rendering", "kerning",
    "letter-spacing", "lighting-color", "marker-end", "marker-mid", "marker-start", "mask", "opacity", "overflow",
    "pointer-events", "shape-rendering", "stop-color", "stop-opacity", "stroke", "stroke-dasharray",
    "stroke-dashoffset", "stroke-linecap", "stroke-linejoin", "stroke-miterlimit", "stroke-opacity", "stroke-width",
    "text-anchor", "text-decoration", "text-rendering", "unicode-bidi", "visibility", "word-spacing", "writing-mode",
];
const DESCRIPTIVE: &[&str] = &["desc", "title", "metadata"];
const ANIMATION: &[&str] = &["animate", "set", "animateMotion", "animateColor", "animateTransform"];
const STRUCTURE: &[&str] = &[
    "svg", "g", "defs", "use", "switch", "image", "style", "rect", "circle", "line", "polyline", "polygon", "ellipse",
    "path", "text", "altGlyphDef", "marker", "color-profile", "linearGradient", "radialGradient", "pattern",
    "clipPath", "mask", "filter", "cursor", "a", "view", "script", "font", "font-face", "foreignObject",
];
const TEXT_CHILDREN: &[&str] = &["tspan", "tref", "textPath", "altGlyph", "a"];

enum Content {
    /// Character data only.
    Text,
    /// Listed child elements, no character data.
    Elements(Vec<&'static str>),
    /// Listed child elements mixed with character data.
    Mixed(Vec<&'static str>),
}

struct ElementRule {
    attributes: HashSet<&'static str>,
    required: &'static [&'static str],
    content: Content,
}

fn rule(name: &str) -> Option<ElementRule> {
    let mut attrs: Vec<&'static str> = CORE.to_vec();
    let graphic = |a: &mut Vec<&'static str>| {
        a.extend(CONDITIONAL);
        a.extend(STYLE);
        a.extend(PRESENTATION);
        a.extend(GRAPHICAL_EVENTS);
        a.extend(EXTERNAL);
    };
    let shape_children = || Content::Elements([DESCRIPTIVE, ANIMATION].concat());
    let (required, content): (&'static [&'static str], Content) = match name {
        "svg" => {
            graphic(&mut attrs);
            attrs.extend([
                "xmlns", "version", "baseProfile", "x", "y", "width", "height", "viewBox", "preserveAspectRatio",
                "zoomAndPan", "contentScriptType", "contentStyleType", "onunload", "onabort", "onerror", "onresize",
                "onscroll", "onzoom",
            ]);
            (&[], Content::Elements([DESCRIPTIVE, ANIMATION, STRUCTURE].concat()))
        }
        "g" => {
            graphic(&mut attrs);
            attrs.push("transform");
            (&[], Content::Elements([DESCRIPTIVE, ANIMATION, STRUCTURE].concat()))
        }
        "title" | "desc" => {
            attrs.extend(STYLE);
            (&[], Content::Text)
        }
        "path" => {
            graphic(&mut attrs);
            attrs.extend(["transform", "d", "pathLength"]);
            (&["d"], shape_children())
        }
        "line" => {
            graphic(&mut attrs);
            attrs.extend(["transform", "x1", "y1", "x2", "y2"]);
            (&[], shape_children())
        }
        "circle" => {
            graphic(&mut attrs);
            attrs.extend(["transform", "cx", "cy", "r"]);
            (&["r"], shape_children())
        }
        "rect" => {
            graphic(&mut attrs);
            attrs.extend(["transform", "x", "y", "width", "height", "rx", "ry"]);
            (&["width", "height"], shape_children())
        }
        "polyline" | "polygon" => {
            graphic(&mut attrs);
            attrs.extend(["transform", "points"]);
            (&["points"], shape_children())
        }
        "text" => {
            graphic(&mut attrs);
            attrs.extend(["transform", "x", "y", "dx", "dy", "rotate", "textLength", "lengthAdjust"]);
            (&[], Content::Mixed([DESCRIPTIVE, ANIMATION, TEXT_CHILDREN].concat()))
        }
        _ => return None,
    };
    Some(ElementRule {
        attributes: attrs.into_iter().collect(),
        required,
        content,
    })
}

fn is_number(s: &str) -> bool {
    !s.is_empty() && s.parse::<f64>().is_ok_and(f64::is_finite) && !s.contains(['i', 'I', 'n', 'N'])
}

fn is_length(s: &str) -> bool {
    let body = ["px", "pt", "pc", "mm", "cm", "in", "em", "ex", "%"]
        .iter()
        .find_map(|u| s.strip_suffix(u))
        .unwrap_or(s);
    is_number(body)
}

fn is_paint(s: &str) -> bool {
    let hex = s.strip_prefix('#').is_some_and(|h| {
        (h.len() == 3 || h.len() == 6) && h.chars().all(|c| c.is_ascii_hexdigit())
    });
    hex || s.chars().all(|c| c.is_ascii_alphabetic()) && !s.is_empty()
}

fn is_path_data(d: &str) -> bool {
    let mut has_command = false;
    for tok in d.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
        if tok.len() == 1 && "MmLlHhVvCcSsQqTtAaZz".contains(tok) {
            has_command = true;
        } else if !is_number(tok) {
            return false;
        }
    }
    has_command && d.trim_start().starts_with(['M', 'm'])
}

fn check_value(element: &str, name: &str, value: &str) -> Result<(), String> {
    let bad = |what: &str| Err(format!("<{element}> {name}=\"{value}\" is not a valid {what}"));
    match name {
        "x" | "y" | "x1" | "y1" | "x2" | "y2" | "cx" | "cy" | "font-size" | "stroke-width" => {
            if !is_length(value) {
                return bad("length");
            }
        }
        "r" | "width" | "height" | "rx" | "ry" => {
            if !is_length(value) || value.trim_end_matches(|c: char| c.is_alphabetic() || c == '%').starts_with('-') {
                return bad("non-negative length");
            }
        }
        "viewBox" => {
            let parts: Vec<&str> = value.split([' ', ',']).filter(|p| !p.is_empty()).collect();
            if parts.len() != 4 || !parts.iter().all(|p| is_number(p)) {
                return bad("viewBox");
            }
        }
        "version" => {
            if value != "1.1" {
                return bad("SVG 1.1 version");
            }
        }
        "fill" | "stroke" => {
            if !is_paint(value) {
                return bad("paint");
            }
        }
        "stroke-dasharray" => {
            if value != "none" && !value.split([' ', ',']).filter(|p| !p.is_empty()).all(is_length) {
                return bad("dash array");
            }
        }
        "text-anchor" => {
            if !matches!(value, "start" | "middle" | "end" | "inherit") {
                return bad("text-anchor");
            }
        }
        "d" => {
            if !is_path_data(value) {
                return bad("path data");
            }
        }
        _ => {}
    }
    Ok(())
}

fn attribute_name(a: &roxmltree::Attribute) -> String {
    match a.namespace() {
        Some(XML_NS) => format!("xml:{}", a.name()),
        Some(ns) => format!("{{{ns}}}{}", a.name()),
        None => a.name().to_string(),
    }
}

/// `Ok(())` when `text` is a valid standalone SVG 1.1 document by the rules above.
pub fn validate(text: &str) -> Result<(), String> {
    let prolog_end = text.find("<svg").ok_or("no <svg> element")?;
    let prolog = &text[..prolog_end];
    let doctype = format!("<!DOCTYPE svg PUBLIC \"{PUBLIC_ID}\" \"{SYSTEM_ID}\">");
    if !prolog.contains(&doctype) {
        return Err("missing SVG 1.1 document type declaration".into());
    }
    let opts = roxmltree::ParsingOptions {
        allow_dtd: true,
        ..Default::default()
    };
    let doc = roxmltree::Document::parse_with_options(text, opts).map_err(|e| format!("not well-formed: {e}"))?;
    let root = doc.root_element();
    if root.tag_name().name() != "svg" || root.tag_name().namespace() != Some(SVG_NS) {
        return Err("root element is not svg in the SVG namespace".into());
    }
    if root.attribute("version") != Some("1.1") {
        return Err("root svg lacks version=\"1.1\"".into());
    }
    let mut ids = HashSet::new();
    for node in root.descendants().filter(|n| n.is_element()) {
        let name = node.tag_name().name();
        if node.tag_name().namespace() != Some(SVG_NS) {
            return Err(format!("<{name}> is outside the SVG namespace"));
        }
        let r = rule(name).ok_or_else(|| format!("<{name}> is not allowed in a WEZ plot"))?;
        for a in node.attributes() {
            let an = attribute_name(&a);
            if !r.attributes.contains(an.as_str()) {
                return Err(format!("<{name}> does not declare attribute {an}"));
            }
            check_value(name, &an, a.value())?;
            if an == "id" && !ids.insert(a.value().to_string()) {
                return Err(format!("duplicate id {}", a.value()));
            }
        }
        for req in r.required {
            if node.attribute(*req).is_none() {
                return Err(format!("<{name}> is missing required attribute {req}"));
            }
        }
        for child in node.children() {
            if child.is_element() {
                let c = child.tag_name().name();
                let allowed = match &r.content {
                    Content::Text => false,
                    Content::Elements(v) | Content::Mixed(v) => v.contains(&c),
                };
                if !allowed {
                    return Err(format!("<{c}> may not appear inside <{name}>"));
                }
            } else if child.is_text() {
                let text = child.text().unwrap_or("");
                if matches!(r.content, Content::Elements(_)) && !text.trim().is_empty() {
                    return Err(format!("character data inside <{name}>"));
                }
            }
        }
    }
    Ok(())
}

