import math

import pytest

from submig.config import ConfigError, apply_override, dump_config, load_config, parse_config

MINIMAL = """
inclusions:
  - {x: [-0.2, 1.0], y: [0.5, 0.0, -0.5], range: [-0.5, 0.5]}
"""


def test_defaults():
    cfg = parse_config(MINIMAL)
    assert cfg.directions == 64
    assert cfg.frequency.omegas() == [2 * math.pi / 0.4]
    assert cfg.functionals == ["SF"]
    assert cfg.noise.snr_db == 10.0 and cfg.noise.seed == 0
    assert (cfg.grid.nx, cfg.grid.ny) == (128, 128)
    assert cfg.test_vector_c == [1.0, 0.0, 1.0]
    inc = cfg.build_inclusions()[0]
    assert inc.half_thickness == 0.015 and inc.permittivity == 5.0


def test_band_is_even_in_omega():
    cfg = parse_config(MINIMAL + "frequency: {kind: band, longest: 0.6, shortest: 0.3, count: 4}\n")
    w = cfg.frequency.omegas()
    assert w[0] == pytest.approx(2 * math.pi / 0.6) and w[-1] == pytest.approx(2 * math.pi / 0.3)
    assert w[2] - w[1] == pytest.approx(w[1] - w[0])
    assert cfg.functionals == ["MF"]


def test_round_trip(tmp_path):
    text = MINIMAL + """
frequency: {wavelengths: [0.5, 0.3]}
noise: {snr_db: null, seed: 3}
filter: {kind: region_split, regions: [[-1, 1, 0, 1], [-1, 1, -1, 0]]}
sweep: {noise.seed: [1, 2]}
"""
    cfg = parse_config(text)
    assert cfg.frequency.kind == "list"
    again = parse_config(dump_config(cfg))
    assert again == cfg
    p = tmp_path / "c.yaml"
    p.write_text(dump_config(cfg))
    assert load_config(p) == cfg


@pytest.mark.parametrize("text,path", [
    ("inclusions: []\n", "<root>"),
    (MINIMAL + "bogus: 1\n", "<root>"),
    (MINIMAL + "directions: 2\n", "directions"),
    (MINIMAL + "functionals: [MF]\n", "functionals/0"),
    (MINIMAL + "filter: {kind: custom}\n", "filter/threshold"),
    (MINIMAL + "filter: {threshold: 1.5}\n", "filter/threshold"),
    (MINIMAL + "grid: {x_range: [1, -1]}\n", "grid/x_range"),
    ("- not a mapping\n", "<root>"),
])
def test_errors_carry_paths(text, path):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.path == path


def test_invalid_yaml():
    with pytest.raises(ConfigError):
        parse_config("a: [1, 2\n")


def test_overrides():
    cfg = parse_config(MINIMAL)
    new = apply_override(cfg, "noise.snr_db", 20)
    assert new.noise.snr_db == 20.0 and cfg.noise.snr_db == 10.0
    new = apply_override(cfg, "inclusions.0.permittivity", 10)
    assert new.inclusions[0].permittivity == 10.0
    with pytest.raises(ConfigError):
        apply_override(cfg, "noise.seed", -1)


def test_shipped_configs_parse():
    from pathlib import Path

    paths = sorted((Path(__file__).parent.parent / "configs").glob("*.yaml"))
    assert len(paths) >= 4
    for p in paths:
        cfg = load_config(p)
        assert parse_config(dump_config(cfg)) == cfg
