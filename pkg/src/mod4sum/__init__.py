"""Exact classical and quantum analysis of the sequential Modulo-4 Sum problem."""

__version__ = "0.1.0"

from .classical import (
    combine_bounds,
    evaluate_chain_dp,
    evaluate_chain_naive,
    guess_table,
    reference_chain,
)
from .core import (
    InputTuple,
    ProtocolChain,
    ProtocolTable,
    enumerate_inputs,
    format_chain,
    mod4_target,
    parity_ok,
    parse_chain,
    run_chain,
)
from .noise import NoiseParams, bare_eta_threshold, effective_success, eta_threshold
from .probability import SuccessProbability
from .quantum import run_quantum, verify_ideal
from .search import SearchResult, exhaustive_search, heuristic_search
