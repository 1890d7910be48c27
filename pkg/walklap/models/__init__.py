"""Data models for walklap."""

from walklap.models.diffusion import MarkovChain, ProbabilityVector
from walklap.models.functions import CoefficientFunction
from walklap.models.graph import Graph
from walklap.models.krylov import (
    LanczosDecomposition,
    PoleSet,
    RationalKrylovPencil,
    SolverInfo,
)
from walklap.models.operators import DeformedLaplacian, OperatorSpec
from walklap.models.run import RunConfig
from walklap.models.spectral import DenseSpectrum, SpectralEstimate
from walklap.models.trace import ReturnProbabilityCurve, TraceEstimate
from walklap.models.walks import WalkCountSequence, ZOperator

__all__ = [
    "CoefficientFunction",
    "DeformedLaplacian",
    "DenseSpectrum",
    "Graph",
    "LanczosDecomposition",
    "MarkovChain",
    "OperatorSpec",
    "PoleSet",
    "ProbabilityVector",
    "RationalKrylovPencil",
    "ReturnProbabilityCurve",
    "RunConfig",
    "SolverInfo",
    "SpectralEstimate",
    "TraceEstimate",
    "WalkCountSequence",
    "ZOperator",
]
