//! Density-patch tracking through the computed flow: volume conservation at
//! zero contrast and qualitative boundary-regularity persistence at small
//! contrast. The 10× curvature threshold was fixed by a marker-resolution
//! study (128/256/512 markers agree on the peak curvature to a few percent
//! at these settings).

use nssl_harness::config::Config;
use nssl_harness::experiments;

fn base_config(contrast: f64, t_end: f64, outdirless: bool) -> Config {
    assert!(outdirless);
    Config::parse(&format!(
        "experiment.kind = patch\n\
         grid.n = 24\n\
         time.dt = 0.01\n\
         time.t_end = {t_end}\n\
         time.cadence = 0.25\n\
         background.generator = taylor-green\n\
         background.amplitude = 0.25\n\
         initial.generator = random-band\n\
         initial.amplitude = 0.01\n\
         initial.seed = 12\n\
         density.contrast = {contrast}\n\
         density.radius = 0.8\n\
         patch.markers = 256\n\
         tolerances.area = 1e-3\n\
         tolerances.curvature_factor = 10\n",
    ))
    .unwrap()
}

#[test]
fn zero_contrast_patch_conserves_enclosed_area() {
    let config = base_config(0.0, 2.0, true);
    let output = experiments::dispatch(&config).expect("patch run");
    let failed = output.failed_monitors();
    assert!(failed.is_empty(), "failed monitors {failed:?}");
    let areas = output.series.get("patch_area");
    let a0 = areas[0].1;
    for (t, a) in &areas {
        assert!(
            (a - a0).abs() <= 1e-3 * a0,
            "area drift {:.3e} at t={t}",
            (a - a0).abs() / a0
        );
    }
}

#[test]
fn small_contrast_patch_keeps_bounded_curvature() {
    let config = base_config(0.08, 5.0, true);
    let output = experiments::dispatch(&config).expect("patch run");
    let failed = output.failed_monitors();
    assert!(failed.is_empty(), "failed monitors {failed:?}");
    let kappa = output.series.get("patch_max_curvature");
    let k0 = kappa[0].1;
    let kmax = kappa.iter().map(|&(_, v)| v).fold(0.0, f64::max);
    assert!(
        kmax <= 10.0 * k0,
        "curvature grew {kmax:.3} from {k0:.3} (factor {:.2})",
        kmax / k0
    );
}
