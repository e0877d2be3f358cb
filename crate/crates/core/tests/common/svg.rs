//! Just enough SVG reading to check the renderer's output.

/// Vertices of an SVG path built from `M`, `V` and `C` commands.
pub fn vertices(d: &str) -> Vec<(i64, i64)> {
    let mut out: Vec<(i64, i64)> = Vec::new();
    let mut tokens = d.split_whitespace();
    while let Some(cmd) = tokens.next() {
        let mut num = || tokens.next().unwrap().parse::<i64>().unwrap();
        match cmd {
            "M" => {
                let p = (num(), num());
                out.push(p);
            }
            "V" => {
                let x = out.last().unwrap().0;
                let y = num();
                out.push((x, y));
            }
            "C" => {
                let _ = (num(), num(), num(), num());
                let p = (num(), num());
                out.push(p);
            }
            other => panic!("unexpected path command {other}"),
        }
    }
    out
}

pub fn attr<'a>(element: &'a str, name: &str) -> &'a str {
    let start = element.find(&format!(" {name}=\"")).unwrap() + name.len() + 3;
    let len = element[start..].find('"').unwrap();
    &element[start..start + len]
}

pub fn num(element: &str, name: &str) -> i64 {
    attr(element, name).parse().unwrap()
}

/// Checks that exactly one path has stroke `color`, that it runs from the top
/// margin to the bottom margin, and that it passes straight through every
/// effectful box from top to bottom. Returns the labels of those boxes in the
/// order the path meets them.
pub fn runtime_path_labels(svg: &str, color: &str) -> Result<Vec<String>, String> {
    let lines: Vec<&str> = svg.lines().collect();
    let colored: Vec<&str> = lines
        .iter()
        .copied()
        .filter(|l| l.trim_start().starts_with("<path") && attr(l, "stroke") == color)
        .collect();
    if colored.len() != 1 {
        return Err(format!("{} runtime-colored paths", colored.len()));
    }
    let points = vertices(attr(colored[0], "d"));
    if !points.windows(2).all(|w| w[0].1 <= w[1].1) {
        return Err("the runtime wire does not run downwards".into());
    }
    let height = num(lines[1], "height");
    let margin = num(lines[1], "width").min(height) / 4;
    if points[0].1 > margin || points.last().unwrap().1 < height - margin {
        return Err("the runtime wire does not span the diagram".into());
    }
    let mut boxes = Vec::new();
    for (i, line) in lines.iter().enumerate() {
        if !line.contains("class=\"box effectful\"") {
            continue;
        }
        let (x, y) = (num(line, "x"), num(line, "y"));
        let (w, h) = (num(line, "width"), num(line, "height"));
        let meets = points.windows(2).position(|seg| {
            let ((x0, y0), (x1, y1)) = (seg[0], seg[1]);
            x0 == x1 && (x..=x + w).contains(&x0) && y0 <= y && y1 >= y + h
        });
        let Some(segment) = meets else {
            return Err(format!("runtime wire misses {line}"));
        };
        let text = lines[i + 1];
        let label = text[text.find('>').unwrap() + 1..text.rfind('<').unwrap()].to_owned();
        boxes.push((segment, y, label));
    }
    boxes.sort();
    Ok(boxes.into_iter().map(|(_, _, label)| label).collect())
}
