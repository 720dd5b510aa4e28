use nlsid_web::{closed_loop_mixture, design_multisine, duffing_analysis};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn design_hits_rms_and_marks_lines() {
    let v = parse(design_multisine(512, 1000.0, 1.0, 300.0, "odd_sparse", 0.7, 3).unwrap());
    assert!((v["rms"].as_f64().unwrap() - 0.7).abs() < 1e-12);
    assert_eq!(v["samples"].as_array().unwrap().len(), 512);
    assert_eq!(v["spectrum_db"].as_array().unwrap().len(), 257);
    let excited = v["excited"].as_array().unwrap();
    assert!(excited.iter().all(|k| k.as_u64().unwrap() % 2 == 1));
    assert!(!v["detection"].as_array().unwrap().is_empty());
    // an unexcited bin carries nothing
    assert!(v["spectrum_db"][2].is_null());
}

#[test]
fn bad_input_reports_category() {
    let err = design_multisine(512, 1000.0, 1.0, 300.0, "triangular", 1.0, 0).unwrap_err();
    assert!(err.starts_with("argument:"), "{err}");
    let err = design_multisine(512, 1000.0, 300.0, 1.0, "odd", 1.0, 0).unwrap_err();
    assert!(err.starts_with("grid:"), "{err}");
    assert!(closed_loop_mixture(0.7, 0.1, 0.5, &[1.0]).unwrap_err().starts_with("argument:"));
}

#[test]
fn duffing_distortion_grows_with_level() {
    let odd_mean = |rms: f64| {
        let v = parse(duffing_analysis(rms, 2.0, 1e-5, 4, 1).unwrap());
        let levels: Vec<f64> = v["distortion"]
            .as_array()
            .unwrap()
            .iter()
            .filter(|p| p["class"] == "odd_detection")
            .map(|p| p["level_db"].as_f64().unwrap())
            .collect();
        levels.iter().sum::<f64>() / levels.len() as f64
    };
    assert!(odd_mean(0.05) > odd_mean(0.01) + 10.0);
}

#[test]
fn mixture_limits() {
    let v = parse(closed_loop_mixture(0.05, 0.1, 0.5, &[0.0, 1e12]).unwrap());
    let plant = v["plant_db"].as_array().unwrap();
    let inverse = v["inverse_controller_db"].as_array().unwrap();
    let open = v["curves"][0]["magnitude_db"].as_array().unwrap();
    let noisy = v["curves"][1]["magnitude_db"].as_array().unwrap();
    for i in 0..plant.len() {
        assert!((open[i].as_f64().unwrap() - plant[i].as_f64().unwrap()).abs() < 1e-9);
        assert!((noisy[i].as_f64().unwrap() - inverse[i].as_f64().unwrap()).abs() < 1e-6);
    }
}
