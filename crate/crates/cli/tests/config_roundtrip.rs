use dce_cli::config::{OracleBlock, ParamOverrides, PhenomBlock, Preset, RunConfig, SigmaBlock, SweepBlock};
use dce_core::oracle::CouplingNorm;
use dce_core::ModelParams;
use proptest::prelude::*;

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        -1e6..1e6f64,
        Just(0.0),
        Just(1.0 / 3.0),
        Just(std::f64::consts::PI)
    ]
}

fn maybe() -> impl Strategy<Value = Option<f64>> {
    proptest::option::of(finite())
}

fn params() -> impl Strategy<Value = ModelParams> {
    (
        finite(),
        finite(),
        finite(),
        finite(),
        finite(),
        finite(),
        finite(),
    )
        .prop_map(|(a, b, c, d, e, f, g)| ModelParams {
            cavity: a,
            band_center: b,
            half_width: c,
            pump_amp: d,
            pump_phase: e,
            pump_freq: f,
            coupling: g,
        })
}

fn overrides() -> impl Strategy<Value = ParamOverrides> {
    (maybe(), maybe(), maybe(), maybe(), maybe(), maybe(), maybe()).prop_map(|(a, b, c, d, e, f, g)| {
        ParamOverrides {
            omega0: a,
            omega_b: b,
            b: c,
            f0: d,
            theta: e,
            omega: f,
            g,
        }
    })
}

fn preset() -> impl Strategy<Value = Preset> {
    prop_oneof![
        Just(Preset::Fig3),
        Just(Preset::Fig4),
        Just(Preset::Fig5),
        Just(Preset::Fig6)
    ]
}

fn config() -> impl Strategy<Value = RunConfig> {
    let sweep = (maybe(), maybe(), 1usize..5000).prop_map(|(a, b, n)| SweepBlock {
        omega0_min: a,
        omega0_max: b,
        points: n,
    });
    let oracle = (
        maybe(),
        2usize..2000,
        finite(),
        finite(),
        any::<bool>(),
        proptest::option::of((finite(), finite())),
        1usize..500,
    )
        .prop_map(|(w, n, dt, t, m, win, s)| OracleBlock {
            omega0: w,
            n,
            dt,
            t_max: t,
            norm: if m {
                CouplingNorm::MatchEffective
            } else {
                CouplingNorm::Literal
            },
            window: win.map(|(a, b)| [a, b]),
            stride: s,
        });
    let phenom = (
        finite(),
        proptest::collection::vec(finite(), 0..4),
        maybe(),
        maybe(),
        1usize..5000,
    )
        .prop_map(|(g, th, a, b, n)| PhenomBlock {
            gamma: g,
            thetas: th,
            omega0_min: a,
            omega0_max: b,
            points: n,
        });
    let sigma = (maybe(), maybe(), 1usize..5000).prop_map(|(a, b, n)| SigmaBlock {
        omega_min: a,
        omega_max: b,
        points: n,
    });
    (
        proptest::option::of(preset()),
        proptest::option::of(params()),
        overrides(),
        proptest::option::of(sweep),
        proptest::option::of(oracle),
        proptest::option::of(phenom),
        proptest::option::of(sigma),
        proptest::option::of("[a-z]{1,8}"),
    )
        .prop_map(
            |(preset, params, overrides, sweep, oracle, phenom, sigma, out)| RunConfig {
                preset,
                params,
                overrides,
                sweep,
                oracle,
                phenom,
                sigma,
                out: out.map(Into::into),
            },
        )
}

proptest! {
    #[test]
    fn parse_serialise_parse_is_identity(cfg in config()) {
        let text = cfg.to_json();
        let back = RunConfig::parse(&text).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(back.to_json(), text);
    }
}

#[test]
fn filled_in_defaults_survive_a_round_trip() {
    let cfg = RunConfig::parse(r#"{"preset":"fig3","oracle":{},"phenom":{}}"#).unwrap();
    let back = RunConfig::parse(&cfg.to_json()).unwrap();
    assert_eq!(back, cfg);
    assert_eq!(back.oracle.unwrap().n, 400);
}
