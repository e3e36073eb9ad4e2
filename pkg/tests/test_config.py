import math

import pytest

from larmorlab.config import (
    ConfigError,
    RunConfig,
    config_items,
    load_config,
    parse_config,
    refine_config,
    validate,
)


class TestParse:
    def test_defaults(self):
        cfg = RunConfig()
        assert cfg.packet_k0 == pytest.approx(math.sqrt(2.0))
        assert cfg.barrier_a == 100.0 and cfg.barrier_b == 101.0

    def test_parse_values_and_comments(self):
        text = """
        # a comment
        barrier.v0 = 2.5   # inline comment
        grids.nx = 801
        hartman.kappa_d = 2, 4, 8
        """
        out = parse_config(text)
        assert out == {
            "barrier_v0": 2.5,
            "grids_nx": 801,
            "hartman_kappa_d": (2.0, 4.0, 8.0),
        }

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown key"):
            parse_config("barrier.width = 3")

    def test_duplicate_key_rejected(self):
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config("barrier.v0 = 1\nbarrier.v0 = 2")

    def test_malformed_line_rejected(self):
        with pytest.raises(ConfigError, match="expected"):
            parse_config("just some words")

    def test_bad_value_rejected(self):
        with pytest.raises(ConfigError, match="bad value"):
            parse_config("grids.nx = three")


class TestValidate:
    def test_rejects_inverted_barrier(self):
        with pytest.raises(ConfigError):
            validate(RunConfig(barrier_a=5.0, barrier_b=4.0))

    def test_rejects_negative_omega(self):
        # dataclass replace path: omega < 0 must fail validation
        with pytest.raises(ConfigError):
            validate(RunConfig(field_omega_l=-1e-3))

    def test_warns_when_packet_reaches_barrier(self):
        with pytest.warns(UserWarning):
            validate(RunConfig(packet_l0=30.0))

    def test_default_is_silent(self, recwarn):
        validate(RunConfig())
        assert len(recwarn) == 0


def test_load_config_roundtrip(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text("barrier.v0 = 3.0\npacket.l0 = 10\n")
    cfg = load_config(p)
    assert cfg.barrier_v0 == 3.0
    assert cfg.packet_l0 == 10.0
    assert load_config(None) == RunConfig()


def test_refine_config_scales_grids():
    cfg = refine_config(RunConfig(), 2)
    base = RunConfig()
    assert cfg.grids_nx == 2 * (base.grids_nx - 1) + 1
    assert cfg.grids_nb == 2 * (base.grids_nb - 1) + 1
    assert cfg.stationary_nk == 2 * (base.stationary_nk - 1) + 1
    assert cfg.verify_dx == base.verify_dx / 2
    assert cfg.verify_dt == base.verify_dt / 2
    with pytest.raises(ConfigError):
        refine_config(RunConfig(), 0)


def test_config_items_cover_every_field():
    items = config_items(RunConfig())
    keys = [k for k, _ in items]
    assert keys == sorted(keys)
    assert len(keys) == len(RunConfig.__dataclass_fields__)
    # every emitted line parses back to the same config
    text = "".join(f"{k} = {v}\n" for k, v in items)
    assert parse_config(text) == {
        name: getattr(RunConfig(), name) for name in RunConfig.__dataclass_fields__
    }
