# networks/__init__.py
"""
Reaction networks: the polynomial model, built-ins and description files.
Importing the package makes the registry available; built-ins are discovered on first lookup.
"""

from rdlab.networks.model import (
    ReactionNetwork,
    eval_f,
    eval_jacobian,
    mass_action,
    polynomial_network,
)
from rdlab.networks.description import (
    dumps_network,
    loads_network,
    read_network,
    write_network,
)
from rdlab.networks.registry import (
    discover_networks,
    get_network,
    get_networks_description,
    list_networks,
    network,
    resolve_network,
)


def four_species() -> ReactionNetwork:
    """The reversible four-species network f_i = (-1)^i (u1 u3 - u2 u4) with M = 1."""
    return get_network("four_species")


__all__ = [
    "ReactionNetwork",
    "eval_f",
    "eval_jacobian",
    "mass_action",
    "polynomial_network",
    "network",
    "get_network",
    "list_networks",
    "get_networks_description",
    "discover_networks",
    "resolve_network",
    "four_species",
    "dumps_network",
    "loads_network",
    "read_network",
    "write_network",
]
