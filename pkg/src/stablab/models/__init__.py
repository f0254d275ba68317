"""Concrete complexes: tethers in punctured disks and small combinatorial models."""

from .combinatorial import (
    ChainModel,
    ChainVertex,
    chain_truncation,
    diagonals_cross,
    genus_one_chains,
    polygon_arc_complex,
    polygon_diagonals,
    polygon_surgery_flow,
    quotient_simplex_mod_order,
    wedge_join_model,
)
from .disk import (
    NormalArcSystem,
    PuncturedDisk,
    Tether,
    act_tether,
    act_word,
    base_tether,
    base_tethers,
    braid_act,
    intersection_number,
    self_intersection,
    spider_complexity,
    surger,
    surger_tether,
    system,
    tether_intersection,
)
from .tethers import TetherComplex, doubled_tether_rule, surgery_flow, tether_complex, tether_orbit

__all__ = [
    "ChainModel",
    "ChainVertex",
    "NormalArcSystem",
    "PuncturedDisk",
    "Tether",
    "TetherComplex",
    "act_tether",
    "act_word",
    "base_tether",
    "base_tethers",
    "braid_act",
    "chain_truncation",
    "diagonals_cross",
    "doubled_tether_rule",
    "genus_one_chains",
    "intersection_number",
    "polygon_arc_complex",
    "polygon_diagonals",
    "polygon_surgery_flow",
    "quotient_simplex_mod_order",
    "self_intersection",
    "spider_complexity",
    "surger",
    "surger_tether",
    "surgery_flow",
    "system",
    "tether_complex",
    "tether_intersection",
    "tether_orbit",
    "wedge_join_model",
]
