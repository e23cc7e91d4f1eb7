use serde_json::Value;
use specwell_web::{loop_json, poles_json, spectrum_json};

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn spectrum_lists_levels() {
    let v = parse(&spectrum_json(10.0).unwrap());
    assert_eq!(v["levels"].as_array().unwrap().len(), 7);
    assert!(spectrum_json(-1.0).is_err());
    assert!(spectrum_json(f64::NAN).is_err());
}

#[test]
fn loop_around_second_pseudothreshold_swaps_levels() {
    let v = parse(&loop_json("even", 2, 2.971_693_870_713_802, 0.0, 1).unwrap());
    assert_eq!(v["outcome"], "permuted");
    assert_eq!(v["start"], "2");
    assert_eq!(v["end"], "3");
    let twice = parse(&loop_json("even", 2, 2.971_693_870_713_802, 0.0, 2).unwrap());
    assert_eq!(twice["outcome"], "trivial");
}

#[test]
fn page_default_loops_permute() {
    for (fam, level, re, im) in [
        ("odd", 3, -4.6033388487517, 0.0),
        ("delta", 1, -1.8952822889285312, 3.7194361398885345),
    ] {
        let v = parse(&loop_json(fam, level, re, im, 1).unwrap());
        assert_eq!(v["outcome"], "permuted", "{fam}");
    }
}

#[test]
fn pole_pair_reaches_the_imaginary_axis() {
    let v = parse(&poles_json("even", 2.5, 3.5, 1).unwrap());
    let tracks = v.as_array().unwrap();
    assert_eq!(tracks.len(), 2);
    let last = &tracks[0]["k"].as_array().unwrap().last().unwrap()[0];
    assert!(last.as_f64().unwrap().abs() < 1e-6);
    assert!(poles_json("sideways", 1.0, 2.0, 1).is_err());
}
