"""Approximate (lossy) kernels with exact ratio bookkeeping and solution lifting."""

from .framework import KernelOutput, ParameterizedInstance, Problem
from .graph import MinorTranscript, MultiGraph

__all__ = ["KernelOutput", "MinorTranscript", "MultiGraph", "ParameterizedInstance", "Problem"]
__version__ = "0.1.0"
