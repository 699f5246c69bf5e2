# networks/model.py
"""Polynomial reaction networks: the nonlinearity f of the reaction-diffusion system."""

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

import numpy as np

from rdlab.errors import ValidationError

Term = Tuple[float, Tuple[int, ...]]


@dataclass(frozen=True, eq=False)
class ReactionNetwork:
    """
    A polynomial vector field f: R_+^m -> R^m.

    Each rate f_i is a list of terms (coefficient, exponent vector); f_i(u) is the sum of
    coefficient * prod_j u_j ** exponent_j. Terms are kept in the order they were given so
    that description files round-trip exactly.
    """

    name: str
    species: Tuple[str, ...]
    terms: Tuple[Tuple[Term, ...], ...]
    growth_constant: float
    description: str = ""
    _monomials: np.ndarray = field(init=False, repr=False)
    _coefficients: np.ndarray = field(init=False, repr=False)
    _jac_monomials: np.ndarray = field(init=False, repr=False)
    _jac_coefficients: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        m = len(self.species)
        if m < 2:
            raise ValidationError(f"Network '{self.name}' needs at least 2 species, got {m}")
        if len(set(self.species)) != m:
            raise ValidationError(f"Network '{self.name}' has duplicate species names")
        if len(self.terms) != m:
            raise ValidationError(f"Network '{self.name}' declares {m} species but {len(self.terms)} rates")
        M = float(self.growth_constant)
        if not np.isfinite(M) or M < 0:
            raise ValidationError(f"Growth constant must be finite and nonnegative, got {self.growth_constant}")

        index: Dict[Tuple[int, ...], int] = {}
        entries: List[Tuple[int, int, float]] = []
        for i, rate_terms in enumerate(self.terms):
            for coefficient, exponents in rate_terms:
                exponents = tuple(int(e) for e in exponents)
                if len(exponents) != m or any(e < 0 for e in exponents):
                    raise ValidationError(f"Bad exponent vector {exponents} in rate of '{self.species[i]}'")
                if not np.isfinite(coefficient):
                    raise ValidationError(f"Non-finite coefficient in rate of '{self.species[i]}'")
                t = index.setdefault(exponents, len(index))
                entries.append((i, t, float(coefficient)))

        monomials = np.zeros((max(len(index), 1), m), dtype=int)
        for exponents, t in index.items():
            monomials[t] = exponents
        coefficients = np.zeros((m, monomials.shape[0]))
        for i, t, c in entries:
            coefficients[i, t] += c

        # d/du_j of u^e is e_j u^(e - delta_j)
        jac_index: Dict[Tuple[int, ...], int] = {}
        jac_entries: List[Tuple[int, int, int, float]] = []
        for t, exponents in enumerate(monomials):
            for j in range(m):
                if exponents[j] == 0:
                    continue
                lowered = exponents.copy()
                lowered[j] -= 1
                d = jac_index.setdefault(tuple(lowered), len(jac_index))
                for i in range(m):
                    if coefficients[i, t] != 0.0:
                        jac_entries.append((i, j, d, coefficients[i, t] * exponents[j]))
        jac_monomials = np.zeros((max(len(jac_index), 1), m), dtype=int)
        for exponents, d in jac_index.items():
            jac_monomials[d] = exponents
        jac_coefficients = np.zeros((m, m, jac_monomials.shape[0]))
        for i, j, d, c in jac_entries:
            jac_coefficients[i, j, d] += c

        object.__setattr__(self, "growth_constant", M)
        object.__setattr__(self, "_monomials", monomials)
        object.__setattr__(self, "_coefficients", coefficients)
        object.__setattr__(self, "_jac_monomials", jac_monomials)
        object.__setattr__(self, "_jac_coefficients", jac_coefficients)

    @property
    def species_count(self) -> int:
        return len(self.species)

    @property
    def degree(self) -> int:
        """Total polynomial degree of the field."""
        used = self._monomials[np.any(self._coefficients != 0.0, axis=0)]
        return int(used.sum(axis=1).max()) if len(used) else 0

    def rates(self, states: np.ndarray) -> np.ndarray:
        """
        Vectorized f over a stack of states.

        Args:
            states: array of shape (m, ...) (species first)

        Returns:
            Array of shape (m, ...) with f_i evaluated pointwise. No sign checks are made,
            so intermediate stages of an integrator may pass slightly negative states.
        """
        return np.tensordot(self._coefficients, _evaluate_monomials(self._monomials, states), axes=1)

    def jacobian(self, states: np.ndarray) -> np.ndarray:
        """Vectorized Jacobian, shape (m, m, ...) with [i, j] = df_i/du_j."""
        return np.tensordot(self._jac_coefficients, _evaluate_monomials(self._jac_monomials, states), axes=1)

    def __repr__(self) -> str:
        return f"ReactionNetwork(name={self.name!r}, species={self.species!r}, M={self.growth_constant})"


def _evaluate_monomials(monomials: np.ndarray, states: np.ndarray) -> np.ndarray:
    states = np.asarray(states, dtype=float)
    out = np.ones((monomials.shape[0],) + states.shape[1:])
    for t, exponents in enumerate(monomials):
        for j, e in enumerate(exponents):
            if e:
                out[t] = out[t] * states[j] ** int(e)
    return out


def _checked_state(net: ReactionNetwork, u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.shape != (net.species_count,):
        raise ValidationError(f"State has shape {u.shape}, expected ({net.species_count},)")
    if not np.all(np.isfinite(u)):
        raise ValidationError("State has non-finite components")
    if np.any(u < 0):
        raise ValidationError(f"State has negative components: {u}")
    return u


def eval_f(net: ReactionNetwork, u) -> np.ndarray:
    """Evaluate f(u) at one nonnegative state vector of length m."""
    return net.rates(_checked_state(net, u))


def eval_jacobian(net: ReactionNetwork, u) -> np.ndarray:
    """Evaluate the m x m Jacobian df_i/du_j at one nonnegative state vector."""
    return net.jacobian(_checked_state(net, u))


def polynomial_network(name: str, species: Sequence[str], rates: Sequence[Iterable[Term]],
                       growth_constant: float, description: str = "") -> ReactionNetwork:
    """Build a network from a coefficient table: one list of (coefficient, exponents) per species."""
    terms = tuple(
        tuple((float(c), tuple(int(e) for e in exps)) for c, exps in rate)
        for rate in rates
    )
    return ReactionNetwork(name=name, species=tuple(species), terms=terms,
                           growth_constant=growth_constant, description=description)


def mass_action(name: str, species: Sequence[str],
                reactions: Sequence[Tuple[Mapping[str, int], Mapping[str, int], float]],
                growth_constant: float, description: str = "") -> ReactionNetwork:
    """
    Build a mass-action network from reactions.

    Args:
        name: Network name
        species: Species names, fixing the order of u
        reactions: (reactants, products, rate constant) triples with stoichiometries as dicts
        growth_constant: Declared M
        description: Free text

    Returns:
        ReactionNetwork whose rate of species s sums (nu_out - nu_in) * k * prod u^nu_in
    """
    position = {s: j for j, s in enumerate(species)}
    rates: List[List[Term]] = [[] for _ in species]
    for reactants, products, k in reactions:
        unknown = (set(reactants) | set(products)) - set(position)
        if unknown:
            raise ValidationError(f"Reaction uses unknown species {sorted(unknown)}")
        exponents = [0] * len(species)
        for s, nu in reactants.items():
            exponents[position[s]] = int(nu)
        for s in species:
            net_change = products.get(s, 0) - reactants.get(s, 0)
            if net_change:
                rates[position[s]].append((float(net_change * k), tuple(exponents)))
    return polynomial_network(name, species, rates, growth_constant, description)
