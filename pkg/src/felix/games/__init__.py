"""Games, payoff rules and their closed-form results."""

from .base import TIE_TOL, FixedPayoffs, Game, PrisonersDilemma, npd_payoff, tie_tolerance
from .commons import (
    Commons,
    LinearResource,
    PowerResource,
    TwoGroupToC,
    make_resource,
    toc_qc,
    toc_sigma,
    toc_total_effort,
    toc_two_group,
)
from .complete_graph import (
    cg_pd_defection_gap,
    cg_pd_happiness,
    cg_pd_threshold,
    selfish_survivor_interval,
    wealth_gradient_extremes,
    wealth_happiness,
)
from .two_player import (
    AE_1,
    AE_2,
    BE,
    NE,
    Coordination,
    EquilibriumLabel,
    HawkDove,
    Ultimatum,
    altruism_threshold,
    coordination_classify,
    hawkdove_solve,
    pd2_classify,
    pd2_equilibria,
    pd2_thresholds,
    two_player_happiness,
    two_player_weights,
    ultimatum_solve,
)

__all__ = [
    "AE_1", "AE_2", "BE", "NE", "TIE_TOL",
    "cg_pd_happiness", "Commons", "Coordination", "FixedPayoffs", "EquilibriumLabel", "Game", "HawkDove", "LinearResource",
    "PowerResource", "PrisonersDilemma", "TwoGroupToC", "Ultimatum",
    "altruism_threshold", "cg_pd_defection_gap", "cg_pd_threshold", "coordination_classify",
    "hawkdove_solve", "make_resource", "npd_payoff", "pd2_classify", "pd2_equilibria",
    "pd2_thresholds", "selfish_survivor_interval", "tie_tolerance", "toc_qc", "toc_sigma",
    "toc_total_effort", "toc_two_group", "two_player_happiness", "two_player_weights",
    "ultimatum_solve", "wealth_gradient_extremes", "wealth_happiness",
]
