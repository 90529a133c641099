import pytest

from fpte.config import load_config, parse_config
from fpte.errors import ConfigError

BASIC = """
[scenario]
name = demo
kind = fpt-curve
seed = 7

[model]
family = r-process
eps = 0.5
d = 1.0
omega_n = 2.0

[grid]
start = 0.0
stop = 2.0
threshold = 2.2
"""


class TestParseConfig:
    def test_basic(self):
        config = parse_config(BASIC)
        assert (config.name, config.kind, config.family, config.seed) == ("demo", "fpt-curve", "r-process", 7)
        assert config.get("grid", "points") == 50
        assert config.get("model", "radius") == 5.0
        assert config.get("quadrature", "n_max") == 2

    def test_keys_are_normalized(self):
        config = parse_config(BASIC.replace("omega_n = 2.0", "Omega-N = 2.0"))
        assert config.get("model", "omega_n") == 2.0

    def test_duffing_defaults(self):
        config = parse_config("[scenario]\nname = d\nkind = duffing-coeffs\n[model]\nfamily = duffing-white\n")
        model = config["model"]
        assert (model["alpha1"], model["alpha3"], model["nu2"], model["eps"]) == (3.187, 4.164, 1.783, 0.1)

    @pytest.mark.parametrize(
        "text",
        [
            BASIC + "\n[extra]\nx = 1\n",
            BASIC.replace("seed = 7", "seed = 7\ncolour = red"),
            BASIC.replace("d = 1.0", "d = 1.0\nalpha3 = 2.0"),
            BASIC.replace("seed = 7", "seed = -1"),
            BASIC.replace("seed = 7", f"seed = {2**64}"),
            BASIC.replace("kind = fpt-curve", "kind = nonsense"),
            BASIC.replace("eps = 0.5\n", ""),
            BASIC.replace("stop = 2.0", "stop = two"),
            BASIC + "\n[spectrum.xi1]\nkind = white\n",
            "[scenario]\nkind = classify\n[model]\nfamily = constant\n",
            "not an ini file",
        ],
        ids=[
            "unknown-section",
            "unknown-key",
            "foreign-family-key",
            "negative-seed",
            "seed-overflow",
            "unknown-kind",
            "missing-family-key",
            "bad-number",
            "spectrum-without-spectral-family",
            "missing-name",
            "malformed",
        ],
    )
    def test_rejects(self, text):
        with pytest.raises(ConfigError):
            parse_config(text)

    def test_spectrum_kinds(self):
        base = "[scenario]\nname = m\nkind = classify\n[model]\nfamily = mathieu-energy\nalpha1 = 1\nbeta1 = 0.5\n"
        base += "nu1 = 1\nnu2 = 0.3\neps = 0.1\nenergy_cap = 10\n"
        config = parse_config(base + "[spectrum.xi1]\nkind = exponential_cosine\nvariance = 1\ndecay = 0.5\n")
        assert config.get("spectrum.xi1", "center") == 0.0
        assert config.get("spectrum.xi1", "intensity") is None
        with pytest.raises(ConfigError):
            parse_config(base + "[spectrum.xi1]\nkind = exponential_cosine\nvariance = 1\n")
        with pytest.raises(ConfigError):
            parse_config(base + "[spectrum.xi1]\nkind = white\nfile = x.txt\n")


class TestScenarioConfig:
    def test_digest_is_stable(self):
        assert parse_config(BASIC).digest() == parse_config(BASIC).digest()
        assert parse_config(BASIC).digest() != parse_config(BASIC.replace("seed = 7", "seed = 8")).digest()

    def test_comments_do_not_change_digest(self):
        assert parse_config("# note\n" + BASIC).digest() == parse_config(BASIC).digest()

    def test_overrides(self):
        config = parse_config(BASIC)
        changed = config.with_overrides(seed=2**64 - 1, rtol=1e-6)
        assert changed.seed == 2**64 - 1
        assert changed.get("quadrature", "rtol") == 1e-6
        assert config.seed == 7
        with pytest.raises(ConfigError):
            config.with_overrides(rtol=0.0)

    def test_lines_follow_schema_order(self):
        lines = parse_config(BASIC).lines()
        assert lines[0] == "scenario.name = demo"
        assert "model.eps = 0.5" in lines
        assert not any(line.startswith("mc.") for line in lines)

    def test_paths_resolve_next_to_config(self, tmp_path):
        path = tmp_path / "demo.cfg"
        path.write_text(BASIC)
        config = load_config(path)
        assert config.resolve_path("data/table.txt") == tmp_path / "data" / "table.txt"

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "absent.cfg")

    def test_bundled_scenarios_parse(self, scenarios_dir):
        paths = sorted(scenarios_dir.glob("*.cfg"))
        assert paths
        for path in paths:
            assert load_config(path).name == path.stem
