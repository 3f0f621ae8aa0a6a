"""Congruence class models for partially observed networks."""
from __future__ import annotations

__version__ = "0.1.0"

from .errors import CcmError, ConfigError, DataError
from .graph import NodeClassification, ObservationMask, Network, degree_distribution, mixing_matrix
from .model import (
    CcmSpec,
    CongruenceMapping,
    MultinomialDegree,
    PoissonMultinomialMixing,
    PriorSpec,
    Uniform,
)
from .sampler import SamplerConfig, draw_network, generate_networks, mh_run
from .gibbs import GibbsConfig, gibbs_run, summarize

__all__ = [
    "__version__",
    "CcmError", "ConfigError", "DataError",
    "Network", "NodeClassification", "ObservationMask", "degree_distribution", "mixing_matrix",
    "CcmSpec", "CongruenceMapping", "MultinomialDegree", "PoissonMultinomialMixing", "PriorSpec", "Uniform",
    "SamplerConfig", "draw_network", "generate_networks", "mh_run",
    "GibbsConfig", "gibbs_run", "summarize",
]
