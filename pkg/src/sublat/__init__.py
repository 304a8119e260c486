"""Subsystem lattices of finite quantum systems and their lower/upper probabilities."""

from importlib import resources

from . import dempster, lattice, measures, quantum, sampling
from .errors import ValidationError
from .lattice import divisors, factorize, maximal_chains, negation
from .measures import dont_know, lower, probability_report, sigma, upper, verify_propositions
from .quantum import load_density, make_density, make_diagonal_density, projector

__version__ = "0.1.0"


def data_path(name: str):
    """Path of a bundled fixture (``table1.json`` or ``rho18.json``)."""
    return resources.files(__name__).joinpath("data", name)
