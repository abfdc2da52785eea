//! Figure presets. The run files live in `presets/` and are compiled in, so a
//! given build always reproduces the same tables.

use crate::config::RunConfig;
use crate::error::ConfigError;

pub const PRESETS: [(&str, &str); 6] = [
    ("fig2a", include_str!("../presets/fig2a.toml")),
    ("fig2b", include_str!("../presets/fig2b.toml")),
    ("fig3", include_str!("../presets/fig3.toml")),
    ("fig4", include_str!("../presets/fig4.toml")),
    ("fig5", include_str!("../presets/fig5.toml")),
    ("fig6", include_str!("../presets/fig6.toml")),
];

/// TOML text of a preset.
pub fn preset_text(name: &str) -> Result<&'static str, ConfigError> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| ConfigError::UnknownPreset(name.to_string()))
}

pub fn preset(name: &str) -> Result<RunConfig, ConfigError> {
    RunConfig::from_toml_str(preset_text(name)?, &format!("preset {name}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Axis;
    use qsteer_core::environment::SpectrumModel;
    use qsteer_core::master::RhsVariant;
    use qsteer_core::sluice::SluiceParams;

    #[test]
    fn every_preset_resolves() {
        for (name, _) in PRESETS {
            let specs = preset(name).unwrap().resolve().unwrap();
            assert!(!specs.is_empty(), "{name}");
        }
    }

    #[test]
    fn fig2a_has_four_series_avoiding_pi() {
        let specs = preset("fig2a").unwrap().resolve().unwrap();
        assert_eq!(specs.len(), 4);
        for s in &specs {
            assert_eq!(s.axis, Axis::PhasePhi);
            assert_eq!(s.grid.len(), 48);
            let closest = s.grid.iter().map(|p| (p - std::f64::consts::PI).abs()).fold(f64::INFINITY, f64::min);
            assert!(closest > 0.05);
            assert_eq!(s.point(s.grid[0]).unwrap().sluice.f, 75e6);
        }
    }

    #[test]
    fn fig5_uses_the_asymmetric_loop() {
        let specs = preset("fig5").unwrap().resolve().unwrap();
        let variants: Vec<_> = specs.iter().map(|s| s.variant).collect();
        assert_eq!(variants, [RhsVariant::Full, RhsVariant::Secular]);
        let p = specs[0].point(0.05).unwrap().sluice;
        let a = SluiceParams::asymmetric_default();
        for (x, y) in [(p.j_l_max, a.j_l_max), (p.j_l_min, a.j_l_min), (p.j_r_max, a.j_r_max), (p.j_r_min, a.j_r_min)] {
            assert!((x / y - 1.0).abs() < 1e-12);
        }
        assert_eq!((p.dng_max, p.dng_min, p.f), (a.dng_max, a.dng_min, 10e6));
        assert_eq!(specs[0].grid.first(), Some(&0.01));
        assert!((specs[0].grid.last().unwrap() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn fig6_spans_one_flux_quantum_for_both_arrays() {
        let specs = preset("fig6").unwrap().resolve().unwrap();
        assert_eq!(specs.len(), 2);
        let mut pairs = Vec::new();
        for s in &specs {
            assert_eq!((s.grid[0], *s.grid.last().unwrap()), (0.0, 1.0));
            assert!(!s.grid.contains(&0.5));
            match s.point(0.25).unwrap().spectra {
                SpectrumModel::Engineered(e) => {
                    assert_eq!((e.m_squids, e.base.r, e.flux), (100, 1.5e3, 0.25));
                    pairs.push((e.r_s, e.c_s));
                }
                other => panic!("{other:?}"),
            }
        }
        assert_eq!(pairs[0].0, 500.0);
        assert_eq!(pairs[1].0, 1e3);
        assert!((pairs[0].1 - 0.3e-15).abs() < 1e-30 && (pairs[1].1 - 0.1e-15).abs() < 1e-30);
    }

    #[test]
    fn unknown_preset() {
        assert!(matches!(preset("fig9"), Err(ConfigError::UnknownPreset(_))));
    }
}
