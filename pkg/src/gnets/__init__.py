"""Game networks: graphical games with multiplicative utility potentials and equilibrium solvers."""
from .model import (NATURE, GNet, GNode, InfoSet, InvalidNet, PotentialTable, Violation, check,
                    information_sets, joint_probability, parameter_count, potential_table, utility,
                    validate)
from .profile import Profile
from .expectations import (conditional_eu, expected_utility, residual_F, symbolic_decomposition,
                           value_decomposition, value_map)
from .equilibrium import (EquilibriumClass, Label, NashVerdict, check_prop4_monotonicity, classify,
                          fixed_point_residual, is_nash_inequality, is_nash_prop3)
from .tracking import TrackerConfig
from .first_equilibrium import (DegenerateGame, FirstEquilibrium, damped_fixed_point, f_epsilon,
                                first_equilibrium_decomposed, jacobian_F_eps, residual_F_eps,
                                track_first_equilibrium)
from .all_equilibria import (EquilibriumReport, SolveConfig, all_equilibria, all_equilibria_decomposed,
                             build_poly_system, build_start_system)
from .decomposition import Component, decompose, embed, project
from .extensive_form import (AgentForm, EfTree, ef_conversion, ef_to_gframe, oracle_support_enumeration,
                             to_agent_form)
from .io import parse_ef, parse_game, print_game, read_solutions, write_solutions

__all__ = [
    "NATURE", "GNet", "GNode", "InfoSet", "InvalidNet", "PotentialTable", "Violation", "check",
    "information_sets", "joint_probability", "parameter_count", "potential_table", "utility", "validate",
    "Profile", "conditional_eu", "expected_utility", "residual_F", "symbolic_decomposition",
    "value_decomposition", "value_map", "EquilibriumClass", "Label", "NashVerdict",
    "check_prop4_monotonicity", "classify", "fixed_point_residual", "is_nash_inequality", "is_nash_prop3",
    "TrackerConfig", "DegenerateGame", "damped_fixed_point", "FirstEquilibrium", "f_epsilon", "first_equilibrium_decomposed",
    "jacobian_F_eps", "residual_F_eps", "track_first_equilibrium", "EquilibriumReport", "SolveConfig",
    "all_equilibria", "all_equilibria_decomposed", "build_poly_system", "build_start_system",
    "Component", "decompose", "embed", "project", "AgentForm", "EfTree", "ef_conversion", "ef_to_gframe",
    "oracle_support_enumeration", "to_agent_form", "parse_ef", "parse_game", "print_game",
    "read_solutions", "write_solutions",
]
