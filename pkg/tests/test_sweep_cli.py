import math

import numpy as np
import pytest

from plcrelay.cli import EXIT_INVALID, EXIT_OK, EXIT_SOLVER, main
from plcrelay.config import (
    PRESETS,
    SCHEMA,
    ConfigError,
    ScenarioConfig,
    build_config,
    dump_schema,
    load_config,
    parse_text,
)
from plcrelay.energy import scheme_energy
from plcrelay.outage import scheme_outage, scheme_topology
from plcrelay.power import solve_scheme
from plcrelay.sweep import format_value, mc_agrees, run_sweep


def by_scheme(result, key):
    out = {}
    for row in result.rows:
        out.setdefault(row["scheme"], []).append(row[key])
    return out


class TestConfig:
    def test_defaults_match_dataclasses(self):
        cfg = build_config({})
        assert cfg == ScenarioConfig()
        assert cfg.xi == 1.0

    def test_parse_with_comments(self):
        entries = parse_text("# header\n\nnoise.p = 0.05   # inline\nfading.mu=2\n", "f.cfg")
        assert entries["noise.p"] == ("0.05", "f.cfg:3")
        cfg = build_config(entries)
        assert cfg.noise.p == 0.05 and cfg.fading.mu == 2.0

    def test_missing_equals_reports_line(self):
        with pytest.raises(ConfigError, match=r"f.cfg:2"):
            parse_text("noise.p = 0.1\nnoise.p 0.2\n", "f.cfg")

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="unknown key 'noise.q'"):
            parse_text("noise.q = 1", "f.cfg")

    def test_bad_number_names_key_and_line(self):
        with pytest.raises(ConfigError, match=r"f.cfg:1: bad value for noise.p"):
            build_config(parse_text("noise.p = abc", "f.cfg"))

    def test_out_of_range_names_section(self):
        with pytest.raises(ConfigError, match=r"noise.*noise.p \(f.cfg:1\)"):
            build_config(parse_text("noise.p = 2", "f.cfg"))

    def test_layering(self, tmp_path):
        path = tmp_path / "s.cfg"
        path.write_text("scenario.distance = 250\nsweep.steps = 5\n")
        cfg = load_config(path, "fig4", ["sweep.steps=3"])
        assert cfg.distance == 250 and cfg.sweep.steps == 3 and cfg.sweep.metric == "energy"

    def test_unknown_preset(self):
        with pytest.raises(ConfigError):
            load_config(preset="fig9")

    @pytest.mark.parametrize("override", [
        "sweep.schemes=", "sweep.schemes=sh, df", "sweep.steps=1", "sweep.start=2000",
        "sweep.variable=frequency", "sweep.family=distance", "mc.trials=0",
        "profile.p_static_tx=0", "fading.sigma=0", "sweep.steps=2.5", "mc.validate=maybe",
    ])
    def test_rejected(self, override):
        with pytest.raises(ConfigError):
            load_config(overrides=[override])

    def test_schema_lists_every_key(self):
        text = dump_schema()
        for key in SCHEMA:
            assert key in text
        assert "[published]" in text and "[assumed]" in text


class TestSweep:
    def test_fig2(self):
        result = run_sweep(load_config(preset="fig2"))
        assert result.columns[:4] == ["distance", "scheme", "power", "outage"]
        series = by_scheme(result, "outage")
        assert set(series) == {"sh", "mh2", "mh3", "mh4"}
        for values in series.values():
            assert len(values) == 12
            assert all(b > a for a, b in zip(values, values[1:]))
        dists = sorted({r["distance"] for r in result.rows})
        assert dists[0] == 100 and dists[-1] == 1200

    def test_fig3_family(self):
        result = run_sweep(load_config(preset="fig3"))
        assert "impulse_probability" in result.columns
        assert {r["impulse_probability"] for r in result.rows} == {0.001, 0.01, 0.1}
        for p in (0.001, 0.01, 0.1):
            for d in {r["distance"] for r in result.rows}:
                pair = {r["scheme"]: r["outage"] for r in result.rows
                        if r["impulse_probability"] == p and r["distance"] == d}
                assert pair["idf"] <= pair["mh2"]

    def test_fig6_energy_vs_target(self):
        result = run_sweep(load_config(preset="fig6"))
        energies = by_scheme(result, "energy_per_bit")
        for scheme in ("sh", "mh2", "mh3", "mh4"):
            values = energies[scheme]
            assert all(b <= a for a, b in zip(values, values[1:])), scheme
        # a looser target raises the direct-link outage, so IDF relays more often
        # and pays the relay's static power; its energy moves the other way
        idf = energies["idf"]
        assert all(b > a for a, b in zip(idf, idf[1:]))

    def test_fig5_crossover(self):
        result = run_sweep(load_config(preset="fig5"))
        energies = by_scheme(result, "energy_per_bit")
        for values in energies.values():
            assert all(b > a for a, b in zip(values, values[1:]))
        diff = np.array(energies["idf"]) - np.array(energies["sh"])
        assert diff[0] < 0 < diff[-1]

    def test_fig5_idf_beats_every_chain(self):
        result = run_sweep(load_config(preset="fig5"))
        for static in {r["static_power"] for r in result.rows}:
            e = {r["scheme"]: r["energy_per_bit"] for r in result.rows
                 if r["static_power"] == static}
            assert e["idf"] < min(e["mh2"], e["mh3"], e["mh4"])

    def test_rows_reproducible_from_library(self):
        cfg = load_config(preset="fig4", overrides=["sweep.steps=4"])
        for row in run_sweep(cfg).rows:
            s = row["scheme"]
            topo = scheme_topology(s, row["distance"], cfg.fading)
            sol = solve_scheme(s, cfg.outage_target, topo, cfg.noise, cfg.attenuation, cfg.xi,
                               cfg.tol)
            b = scheme_outage(s, sol.power, topo, cfg.noise, cfg.attenuation, cfg.xi)
            assert row["power"] == sol.power
            assert row["outage"] == b.end_to_end
            assert row["energy_per_bit"] == scheme_energy(s, sol.power, b,
                                                          cfg.profile).energy_per_bit

    def test_csv_stable_and_parallel_safe(self):
        cfg = load_config(preset="fig4")
        first = run_sweep(cfg).to_csv()
        assert first == run_sweep(cfg).to_csv()
        par = load_config(preset="fig4", overrides=["sweep.workers=4"])
        assert run_sweep(par).to_csv() == first

    def test_csv_layout(self):
        text = run_sweep(load_config(preset="fig2", overrides=["sweep.steps=2"])).to_csv()
        lines = text.splitlines()
        comments = [l for l in lines if l.startswith("#")]
        assert any("xi=1" in l for l in comments)
        assert any("fixed transmit power=1 W" in l for l in comments)
        header = lines[len(comments)]
        assert header == "distance,scheme,power,outage"
        assert len(lines) == len(comments) + 1 + 8

    def test_monte_carlo_columns(self):
        cfg = load_config(overrides=[
            "sweep.schemes=mh3", "sweep.start=300", "sweep.stop=900", "sweep.steps=2",
            "mc.validate=true", "mc.trials=20000", "mc.seed=3"])
        result = run_sweep(cfg)
        assert result.columns[-3:] == ["mc_p_hat", "mc_ci99", "mc_agree"]
        assert all(isinstance(r["mc_agree"], bool) for r in result.rows)
        assert "monte carlo disagreements" in result.summary


def test_format_value():
    assert format_value(1 / 3) == "0.333333333333"
    assert format_value(1e-20) == "1e-20"
    assert format_value(True) == "1"
    assert format_value("mh2") == "mh2"


def test_mc_agreement_rule():
    assert mc_agrees(0.2, 0.21, 100)
    assert not mc_agrees(0.2, 0.5, 10 ** 6)
    assert mc_agrees(3e-8, 0.0, 10 ** 6)
    assert not mc_agrees(1e-3, 1e-5, 10 ** 6)


class TestCli:
    def test_outage(self, capsys):
        assert main(["outage", "--scheme", "idf", "--distance", "600"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "direct_link:" in out and "outage:" in out

    def test_power_and_energy(self, capsys):
        assert main(["power", "--scheme", "mh3", "--distance", "900"]) == EXIT_OK
        assert "method: bisection" in capsys.readouterr().out
        assert main(["energy", "--scheme", "sh", "--target", "0.001"]) == EXIT_OK
        assert "energy_per_bit_j:" in capsys.readouterr().out

    def test_simulate(self, capsys):
        assert main(["simulate", "--scheme", "mh2", "--distance", "900", "--trials", "1e5",
                     "--workers", "2"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "mc_p_hat:" in out and "trials: 100000" in out

    def test_sweep_to_file(self, tmp_path, capsys):
        out = tmp_path / "fig2.csv"
        assert main(["sweep", "--preset", "fig2", "--out", str(out)]) == EXIT_OK
        assert out.read_text().count("\n") > 48
        assert "rows" in capsys.readouterr().err

    def test_empty_schemes_writes_nothing(self, tmp_path, capsys):
        out = tmp_path / "none.csv"
        code = main(["sweep", "--preset", "fig2", "--set", "sweep.schemes=", "--out", str(out)])
        assert code == EXIT_INVALID
        assert not out.exists()
        assert "at least one scheme" in capsys.readouterr().err

    def test_config_file_error(self, tmp_path, capsys):
        path = tmp_path / "bad.cfg"
        path.write_text("noise.p = 0.01\nnoise.sbnr_db = loud\n")
        assert main(["outage", "--config", str(path)]) == EXIT_INVALID
        assert "bad.cfg:2" in capsys.readouterr().err

    def test_solver_failure(self, capsys):
        assert main(["power", "--scheme", "sh", "--distance", "1e6"]) == EXIT_SOLVER
        assert "solver failure" in capsys.readouterr().err

    def test_missing_config_file(self, tmp_path):
        assert main(["outage", "--config", str(tmp_path / "nope.cfg")]) == 1

    def test_schema(self, capsys):
        assert main(["schema"]) == EXIT_OK
        assert "noise.sinr_db = -15" in capsys.readouterr().out


def test_presets_are_valid():
    for name in PRESETS:
        cfg = load_config(preset=name)
        assert cfg.sweep.schemes
