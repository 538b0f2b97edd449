"""Tree edit distance toolkit built on max-plus products over alignment graphs."""

from .bbd import BBDConfig, solve_bbd, solve_lrbbd
from .costs import NEG_INF, CostModel, eta, load_cost_file, sim_to_ed
from .fed import solve_fed, solve_ufed
from .forest_core import Forest, heavy_spine, parse_forest, reverse
from .oracle import all_pairs_sim, ted_reference
from .sed import solve_sed, solve_udised
from .ted import all_subtrees_ted, ted, ted_sim

__all__ = [
    "NEG_INF",
    "BBDConfig",
    "CostModel",
    "Forest",
    "all_pairs_sim",
    "all_subtrees_ted",
    "eta",
    "heavy_spine",
    "load_cost_file",
    "parse_forest",
    "reverse",
    "sim_to_ed",
    "solve_bbd",
    "solve_fed",
    "solve_lrbbd",
    "solve_sed",
    "solve_udised",
    "solve_ufed",
    "ted",
    "ted_reference",
    "ted_sim",
]
