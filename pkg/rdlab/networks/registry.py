# networks/registry.py
"""Registry for built-in reaction networks with automatic discovery."""

import importlib
import logging
import os
from typing import Callable, Dict, List

from rdlab.errors import ValidationError

logger = logging.getLogger(__name__)

# Storage for registered network factories
NETWORKS: Dict[str, Dict] = {}
_networks_discovered = False

# Modules in this package that define machinery rather than networks
_NON_NETWORK_MODULES = {"__init__", "registry", "model", "description"}


def network(name: str, description: str):
    """
    Decorator to register a network factory.

    Args:
        name: Unique name used on the command line and in run configs
        description: One-line description of the reaction system

    Returns:
        Decorator function; the factory itself is returned unchanged
    """
    def decorator(factory: Callable):
        NETWORKS[name] = {
            "factory": factory,
            "description": description,
            "instance": None,
        }
        return factory
    return decorator


def get_network(name: str):
    """
    Get a built-in network by name.

    Args:
        name: Name of the network to retrieve

    Returns:
        ReactionNetwork instance (built once, then cached)
    """
    discover_networks()
    if name not in NETWORKS:
        raise ValidationError(f"Unknown network: {name}. Available: {', '.join(list_networks())}")
    if NETWORKS[name]["instance"] is None:
        NETWORKS[name]["instance"] = NETWORKS[name]["factory"]()
    return NETWORKS[name]["instance"]


def list_networks() -> List[str]:
    discover_networks()
    return sorted(NETWORKS)


def get_networks_description() -> str:
    """Formatted descriptions of all built-in networks."""
    discover_networks()
    return "\n".join(f"- {name}: {NETWORKS[name]['description']}" for name in sorted(NETWORKS))


def resolve_network(source: str):
    """Resolve a built-in network name or a network description file path."""
    discover_networks()
    if source in NETWORKS:
        return get_network(source)
    if os.path.exists(source) or source.endswith(".json"):
        from rdlab.networks.description import read_network
        return read_network(source)
    raise ValidationError(f"'{source}' is neither a built-in network nor a readable file")


def discover_networks() -> None:
    """Automatically import network modules in this package."""
    global _networks_discovered
    if _networks_discovered:
        return

    current_dir = os.path.dirname(os.path.abspath(__file__))
    for filename in sorted(os.listdir(current_dir)):
        if not filename.endswith(".py") or filename[:-3] in _NON_NETWORK_MODULES:
            continue
        module_name = filename[:-3]
        try:
            importlib.import_module(f".{module_name}", package="rdlab.networks")
            logger.debug("Registered network module: %s", module_name)
        except Exception as e:
            logger.error("Error importing network module %s: %s", module_name, e)

    _networks_discovered = True
