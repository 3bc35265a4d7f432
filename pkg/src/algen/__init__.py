"""Exact toolkit for the Taylor-component hitting-set generator."""

__version__ = "0.1.0"

from .kernels import BACKEND
from .poly import SparsePoly, delta, taylor_shift
from .circuit import Circuit, CircuitBuilder, parse_circuit, serialize_circuit, circuit_eval, expand_to_poly
from .generator import GeneratorMap, build_gen, compose, gen_eval, psi, shift_gen

__all__ = [
    "BACKEND",
    "Circuit",
    "CircuitBuilder",
    "GeneratorMap",
    "SparsePoly",
    "build_gen",
    "circuit_eval",
    "compose",
    "delta",
    "expand_to_poly",
    "gen_eval",
    "parse_circuit",
    "psi",
    "serialize_circuit",
    "shift_gen",
    "taylor_shift",
]
