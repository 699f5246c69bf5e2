# networks/description.py
"""
Network description files.

A network file is a JSON document:

    {
      "format": "rdlab-network",
      "version": 1,
      "name": "four_species",
      "description": "...",
      "species": ["A1", "A2", "A3", "A4"],
      "growth_constant": 1.0,
      "rates": {
        "A1": [{"coefficient": -1.0, "exponents": [1, 0, 1, 0]}, ...],
        ...
      }
    }

Coefficients are written with Python's shortest round-trip float repr, so
write -> read -> write reproduces the file byte for byte.
"""

import json
import logging
from typing import Any, Dict

from rdlab.errors import NetworkFormatError, PersistenceError, ValidationError
from rdlab.networks.model import ReactionNetwork, polynomial_network

logger = logging.getLogger(__name__)

FORMAT_NAME = "rdlab-network"
FORMAT_VERSION = 1


def network_to_dict(net: ReactionNetwork) -> Dict[str, Any]:
    return {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "name": net.name,
        "description": net.description,
        "species": list(net.species),
        "growth_constant": net.growth_constant,
        "rates": {
            species: [{"coefficient": c, "exponents": list(exps)} for c, exps in terms]
            for species, terms in zip(net.species, net.terms)
        },
    }


def network_from_dict(data: Dict[str, Any]) -> ReactionNetwork:
    """Build a network from a parsed description, raising NetworkFormatError on any schema problem."""
    if not isinstance(data, dict):
        raise NetworkFormatError("Network description must be a JSON object")
    if data.get("format") != FORMAT_NAME:
        raise NetworkFormatError(f"Unexpected format {data.get('format')!r}, expected {FORMAT_NAME!r}")
    if data.get("version") != FORMAT_VERSION:
        raise NetworkFormatError(f"Unsupported network format version {data.get('version')!r}")

    try:
        species = [str(s) for s in data["species"]]
        rates = data["rates"]
        if set(rates) != set(species):
            raise NetworkFormatError("Keys of 'rates' must match 'species' exactly")
        table = [
            [(float(term["coefficient"]), [int(e) for e in term["exponents"]]) for term in rates[s]]
            for s in species
        ]
        return polynomial_network(
            name=str(data["name"]),
            species=species,
            rates=table,
            growth_constant=float(data["growth_constant"]),
            description=str(data.get("description", "")),
        )
    except NetworkFormatError:
        raise
    except ValidationError as e:
        raise NetworkFormatError(str(e)) from e
    except (KeyError, TypeError, ValueError) as e:
        raise NetworkFormatError(f"Malformed network description: {e!r}") from e


def dumps_network(net: ReactionNetwork) -> str:
    return json.dumps(network_to_dict(net), indent=2) + "\n"


def loads_network(text: str) -> ReactionNetwork:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise NetworkFormatError(f"Network file is not valid JSON: {e}") from e
    return network_from_dict(data)


def write_network(net: ReactionNetwork, path: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(dumps_network(net))
    except OSError as e:
        raise PersistenceError(f"Cannot write network file {path}: {e}") from e
    logger.debug("Wrote network '%s' to %s", net.name, path)


def read_network(path: str) -> ReactionNetwork:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except FileNotFoundError as e:
        raise NetworkFormatError(f"Network file not found: {path}") from e
    except OSError as e:
        raise PersistenceError(f"Cannot read network file {path}: {e}") from e
    return loads_network(text)
