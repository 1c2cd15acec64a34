"""Exact branch-and-price for submodular bin packing."""
from .bnp import BnpConfig, SolveReport, solve_bnp
from .generator import GeneratorConfig, generate
from .instance import (BranchState, Column, InfeasibleBranch, SmbpInstance, ValidationError,
                       capacity_usage, read_instance, write_instance)

__version__ = "0.1.0"
