"""Solver-agnostic MILP model: variables, linear rows, objective."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

SENSES = ("<=", "=", ">=")
VAR_KINDS = ("continuous", "binary")
OBJ_SENSES = ("min", "max")


class MilpError(Exception):
    """Invalid model construction or solver failure."""


class NumericalBreakdown(MilpError):
    """The simplex could not make progress within its iteration budget."""


@dataclass
class Variable:
    name: str
    kind: str = "continuous"
    lower: float = 0.0
    upper: float = math.inf


@dataclass
class Constraint:
    coefs: dict
    sense: str
    rhs: float
    name: str = ""


@dataclass
class Objective:
    sense: str = "min"
    coefs: dict = field(default_factory=dict)
    constant: float = 0.0


class MilpModel:
    """A validated collection of variables, linear constraints, and an objective.

    Variable ids are their (unique) names. Only continuous and binary
    variables are supported; general integers are rejected at build time.
    """

    def __init__(self):
        self.variables: list[Variable] = []
        self.constraints: list[Constraint] = []
        self.objective = Objective()
        self._var_index: dict[str, int] = {}
        self._con_names: set[str] = set()

    def add_variable(self, name: str, kind: str = "continuous",
                     lower: float = 0.0, upper: float = math.inf) -> str:
        if name in self._var_index:
            raise MilpError(f"duplicate variable name {name!r}")
        if kind not in VAR_KINDS:
            raise MilpError(f"unsupported variable kind {kind!r} for {name!r}")
        lower, upper = float(lower), float(upper)
        if math.isnan(lower) or math.isnan(upper):
            raise MilpError(f"NaN bound on variable {name!r}")
        if lower > upper:
            raise MilpError(f"inverted bounds on {name!r}: [{lower}, {upper}]")
        if kind == "binary" and (lower < -1e-12 or upper > 1.0 + 1e-12):
            raise MilpError(f"binary variable {name!r} must have bounds within [0, 1]")
        if kind == "binary":
            lower, upper = max(lower, 0.0), min(upper, 1.0)
        self._var_index[name] = len(self.variables)
        self.variables.append(Variable(name, kind, lower, upper))
        return name

    def add_constraint(self, coefs: dict, sense: str, rhs: float, name: str = "") -> str:
        if sense not in SENSES:
            raise MilpError(f"unknown constraint sense {sense!r}")
        for var in coefs:
            if var not in self._var_index:
                raise MilpError(f"constraint references undeclared variable {var!r}")
        if not name:
            name = f"c{len(self.constraints)}"
        if name in self._con_names:
            raise MilpError(f"duplicate constraint name {name!r}")
        rhs = float(rhs)
        if math.isnan(rhs):
            raise MilpError(f"NaN rhs in constraint {name!r}")
        self._con_names.add(name)
        self.constraints.append(
            Constraint({k: float(v) for k, v in coefs.items()}, sense, rhs, name))
        return name

    def set_objective(self, sense: str, coefs: dict, constant: float = 0.0) -> None:
        if sense not in OBJ_SENSES:
            raise MilpError(f"unknown objective sense {sense!r}")
        for var in coefs:
            if var not in self._var_index:
                raise MilpError(f"objective references undeclared variable {var!r}")
        self.objective = Objective(sense, {k: float(v) for k, v in coefs.items()},
                                   float(constant))

    # -- introspection -------------------------------------------------------

    def variable(self, name: str) -> Variable:
        return self.variables[self._var_index[name]]

    def has_variable(self, name: str) -> bool:
        return name in self._var_index

    @property
    def n_binary(self) -> int:
        return sum(1 for v in self.variables if v.kind == "binary")

    @property
    def n_continuous(self) -> int:
        return sum(1 for v in self.variables if v.kind == "continuous")

    def stats(self) -> dict:
        return {"constraints": len(self.constraints),
                "binary_vars": self.n_binary,
                "continuous_vars": self.n_continuous}

    def copy(self) -> "MilpModel":
        m = MilpModel()
        for v in self.variables:
            m.add_variable(v.name, v.kind, v.lower, v.upper)
        for c in self.constraints:
            m.add_constraint(dict(c.coefs), c.sense, c.rhs, c.name)
        m.set_objective(self.objective.sense, dict(self.objective.coefs),
                        self.objective.constant)
        return m

    def check_assignment(self, assignment: dict, tol: float = 1e-6) -> list:
        """Names of constraints/bounds the assignment violates beyond tol."""
        violations = []
        for v in self.variables:
            x = assignment[v.name]
            if x < v.lower - tol or x > v.upper + tol:
                violations.append(f"bounds:{v.name}")
            if v.kind == "binary" and min(abs(x), abs(x - 1.0)) > tol:
                violations.append(f"integrality:{v.name}")
        for c in self.constraints:
            lhs = sum(a * assignment[var] for var, a in c.coefs.items())
            if c.sense == "<=" and lhs > c.rhs + tol:
                violations.append(c.name)
            elif c.sense == ">=" and lhs < c.rhs - tol:
                violations.append(c.name)
            elif c.sense == "=" and abs(lhs - c.rhs) > tol:
                violations.append(c.name)
        return violations


def build(variables, constraints, objective=None) -> MilpModel:
    """Assemble and validate a model from parts.

    ``variables``: iterables of (name, kind, lower, upper); ``constraints``:
    (coefs, sense, rhs[, name]); ``objective``: (sense, coefs[, constant]).
    """
    m = MilpModel()
    for spec in variables:
        m.add_variable(*spec)
    for spec in constraints:
        m.add_constraint(*spec)
    if objective is not None:
        m.set_objective(*objective)
    return m


@dataclass
class SolverParams:
    """Knobs shared by the LP and MILP solvers."""

    gap_tol: float = 1e-6          # relative optimality gap
    node_limit: int = 1_000_000
    time_limit: float = math.inf   # seconds
    feas_tol: float = 1e-6
    seed: int = 0

    def __post_init__(self):
        if self.gap_tol <= 0 or self.feas_tol <= 0:
            raise MilpError("tolerances must be positive")


@dataclass
class SolveResult:
    status: str                    # optimal | infeasible | unbounded | node_limit | time_limit
    objective: float = math.nan
    assignment: dict = field(default_factory=dict)
    best_bound: float = math.nan
    nodes: int = 0
    wall_time: float = 0.0

    @property
    def is_optimal(self) -> bool:
        return self.status == "optimal"


class _Compiled:
    """Dense array form of a model, shared by simplex and branch-and-bound."""

    def __init__(self, model: MilpModel):
        self.names = [v.name for v in model.variables]
        self.kinds = [v.kind for v in model.variables]
        n = len(self.names)
        idx = {name: j for j, name in enumerate(self.names)}
        self.lo = np.array([v.lower for v in model.variables], dtype=float)
        self.hi = np.array([v.upper for v in model.variables], dtype=float)
        self.binary_mask = np.array([k == "binary" for k in self.kinds], dtype=bool)
        m = len(model.constraints)
        self.A = np.zeros((m, n), dtype=float)
        self.senses = [c.sense for c in model.constraints]
        self.b = np.array([c.rhs for c in model.constraints], dtype=float)
        for i, c in enumerate(model.constraints):
            for var, a in c.coefs.items():
                self.A[i, idx[var]] += a
        self.c = np.zeros(n, dtype=float)
        for var, a in model.objective.coefs.items():
            self.c[idx[var]] += a
        self.c_const = model.objective.constant
        self.maximize = model.objective.sense == "max"

    def assignment(self, x: np.ndarray) -> dict:
        return {name: float(x[j]) for j, name in enumerate(self.names)}
