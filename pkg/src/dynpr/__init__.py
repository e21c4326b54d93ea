"""PageRank with time-dependent teleportation as a continuous dynamical system."""

from .estimators import DynamicPageRank, OscillatoryPageRank, StaticPageRank
from .exceptions import ConfigError, ConvergenceError, DomainError, DynPRError, NumericError, ParseError
from .graph import AdjacencyStructure, TransitionOperator, build_transition, load_edge_list
from .integrate import EvolutionConfig, Trajectory, evolve, evolve_euler, evolve_rk
from .predict import LaggedLinearRegression, smape
from .ranks import cumulative, difference, isim, top_k, transient, variance
from .solvers import SolveConfig, complex_pagerank, eval_steady, oscillatory_steady_state, static_pagerank
from .teleportation import ConstantSchedule, OscillatorySchedule, PiecewiseSchedule, normalize_activity

__all__ = [
    "DynamicPageRank",
    "OscillatoryPageRank",
    "StaticPageRank",
    "ConfigError",
    "ConvergenceError",
    "DomainError",
    "DynPRError",
    "NumericError",
    "ParseError",
    "AdjacencyStructure",
    "TransitionOperator",
    "build_transition",
    "load_edge_list",
    "EvolutionConfig",
    "Trajectory",
    "evolve",
    "evolve_euler",
    "evolve_rk",
    "LaggedLinearRegression",
    "smape",
    "cumulative",
    "difference",
    "isim",
    "top_k",
    "transient",
    "variance",
    "SolveConfig",
    "complex_pagerank",
    "eval_steady",
    "oscillatory_steady_state",
    "static_pagerank",
    "ConstantSchedule",
    "OscillatorySchedule",
    "PiecewiseSchedule",
    "normalize_activity",
]

__version__ = "0.1.0"
