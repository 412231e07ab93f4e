"""Coinduction up-to over finite and orbit-finite structures.

Submodules: ``lattice`` (relations, fixpoints, closures, the worklist
checker), ``semirings``, ``weighted`` (NFA and weighted automata),
``gsos`` (process terms, divergence, simulation and weak bisimulation),
``nominal`` (orbit-finite automata), ``audit`` (brute-force side
conditions), ``certificate`` and ``cli``.
"""
from .lattice import (Carrier, CheckOutcome, Closure, Pred, Rel, StepFn, Verdict, gfp, is_invariant,
                      is_invariant_upto, run_upto_check)

__version__ = "0.1.0"

__all__ = ["Carrier", "CheckOutcome", "Closure", "Pred", "Rel", "StepFn", "Verdict", "gfp",
           "is_invariant", "is_invariant_upto", "run_upto_check"]
