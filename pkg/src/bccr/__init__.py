"""Achievable rate regions for the broadcast channel with cognitive relays."""
from .channel import ChannelSpec, load_channel, validate_channel
from .distribution import FactoredDistribution, JointTensor, build_joint, degenerate, random_distribution
from .errors import BCCRError, DistributionError, ParseError, SizeCapError, StructureError, VariableError
from .information import cond_mutual_info, entropy, mutual_info
from .linear_systems import LinearConstraint, LinearSystem, is_feasible, project
from .maccm import MessageLabel, NetworkSpec, PlanGraph, bccr_graph, build_plan
from .region import (
    MutualInfoProfile,
    RatePoint,
    build_system_cm,
    build_system_nocm,
    compute_profile,
    hk_reduction,
    jiang_reduction,
    marton_reduction,
    membership,
    project_to_rates,
    region_boundary,
)
from .simulator import SimConfig, SimReport, generate_codebooks, marton_encode, run_experiment

__version__ = "0.1.0"
