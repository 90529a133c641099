from fpte.errors import ConfigError
from fpte.scenarios.base import Scenario
from fpte.scenarios.classify import ClassifyScenario
from fpte.scenarios.duffing_coeffs import DuffingCoeffsScenario
from fpte.scenarios.duffing_fpt import DuffingFptScenario
from fpte.scenarios.fpt_curve import FptCurveScenario
from fpte.scenarios.mathieu_density import MathieuDensityCompareScenario
from fpte.scenarios.mc_validate import McValidateScenario
from fpte.scenarios.stationary_density import StationaryDensityScenario

SCENARIOS: dict[str, type[Scenario]] = {
    cls.name: cls
    for cls in (
        ClassifyScenario,
        StationaryDensityScenario,
        FptCurveScenario,
        MathieuDensityCompareScenario,
        DuffingCoeffsScenario,
        DuffingFptScenario,
        McValidateScenario,
    )
}


def get_scenario(kind: str) -> type[Scenario]:
    try:
        return SCENARIOS[kind]
    except KeyError:
        raise ConfigError(f"unknown scenario kind {kind!r}") from None


__all__ = ["SCENARIOS", "Scenario", "get_scenario"]
