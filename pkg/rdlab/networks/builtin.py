# networks/builtin.py
"""Built-in reaction networks."""

from rdlab.networks.model import ReactionNetwork, mass_action, polynomial_network
from rdlab.networks.registry import network

_FOUR = ("A1", "A2", "A3", "A4")


@network(
    name="four_species",
    description="Reversible binary reaction A1 + A3 <-> A2 + A4, f_i = (-1)^i (u1 u3 - u2 u4), M = 1",
)
def four_species() -> ReactionNetwork:
    return mass_action(
        "four_species",
        _FOUR,
        [
            ({"A1": 1, "A3": 1}, {"A2": 1, "A4": 1}, 1.0),
            ({"A2": 1, "A4": 1}, {"A1": 1, "A3": 1}, 1.0),
        ],
        growth_constant=1.0,
        description="A1 + A3 <-> A2 + A4 with unit rate constants",
    )


@network(
    name="dissipative_four_species",
    description="four_species plus the irreversible channel A1 + A3 -> A2, total rate -u1 u3, M = 2",
)
def dissipative_four_species() -> ReactionNetwork:
    # Loses one unit of mass per A1 + A3 -> A2 event; entropy condition (8) does not hold.
    return mass_action(
        "dissipative_four_species",
        _FOUR,
        [
            ({"A1": 1, "A3": 1}, {"A2": 1, "A4": 1}, 1.0),
            ({"A2": 1, "A4": 1}, {"A1": 1, "A3": 1}, 1.0),
            ({"A1": 1, "A3": 1}, {"A2": 1}, 1.0),
        ],
        growth_constant=2.0,
        description="four_species with mass-losing channel A1 + A3 -> A2",
    )


@network(
    name="linear_decay",
    description="Decoupled first-order decay f = (-u1, -u2), M = 1",
)
def linear_decay() -> ReactionNetwork:
    return mass_action(
        "linear_decay",
        ("B1", "B2"),
        [({"B1": 1}, {}, 1.0), ({"B2": 1}, {}, 1.0)],
        growth_constant=1.0,
    )


@network(
    name="exchange",
    description="Reversible isomerization B1 <-> B2, f = (u2 - u1, u1 - u2), M = 1",
)
def exchange() -> ReactionNetwork:
    return mass_action(
        "exchange",
        ("B1", "B2"),
        [({"B1": 1}, {"B2": 1}, 1.0), ({"B2": 1}, {"B1": 1}, 1.0)],
        growth_constant=1.0,
    )


@network(
    name="cross_activation",
    description="Mutual production f = (u2, u1); violates mass dissipation, used for K-sensitivity",
)
def cross_activation() -> ReactionNetwork:
    return polynomial_network(
        "cross_activation",
        ("B1", "B2"),
        [[(1.0, (0, 1))], [(1.0, (1, 0))]],
        growth_constant=1.0,
    )


@network(
    name="zero_field",
    description="Two species without reactions, f = 0, M = 0",
)
def zero_field() -> ReactionNetwork:
    return polynomial_network("zero_field", ("B1", "B2"), [[], []], growth_constant=0.0)
