"""Named test functions with known smoothness annotations.

A function is selected by a string ``name[:k=v,...]``, e.g. ``abs``,
``abs:a=0.25,lam=1.5`` or ``phat:k=3``.  Each entry records its smoothness
order where one is known and the ``(p, alpha)`` pairs for which it lies in
the weighted space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .jacobi import basis22
from .weighted import Function, parse_p

__all__ = ["FunctionDef", "REGISTRY", "parse_function", "make_function", "registry_names",
           "RegistryError"]


class RegistryError(KeyError):
    """Unknown function name or malformed parameter string."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


@dataclass(frozen=True)
class FunctionDef:
    """A registry entry.

    ``order(p)`` is the exponent ``lam`` in ``E_n ~ n^{-lam}`` where it is
    known (``None`` for analytic functions), and ``in_space(p, alpha)``
    tells whether ``f (1 - x^2)^alpha`` is p-integrable.
    """

    name: str
    defaults: dict
    build: Callable
    description: str
    order: Callable = field(default=lambda params, p: None)
    in_space: Callable = field(default=lambda params, p, alpha: True)

    def make(self, **params) -> Function:
        unknown = set(params) - set(self.defaults)
        if unknown:
            raise RegistryError(f"{self.name}: unknown parameter(s) {sorted(unknown)}; "
                                f"expected {sorted(self.defaults)}")
        full = {**self.defaults, **params}
        return Function(self.build(**full), self.label(full))

    def label(self, params: dict) -> str:
        changed = {k: v for k, v in params.items() if self.defaults.get(k) != v}
        if not changed:
            return self.name
        return self.name + ":" + ",".join(f"{k}={v:g}" for k, v in sorted(changed.items()))


def _bounded(params, p, alpha):
    p = parse_p(p)
    return alpha >= 0 if math.isinf(p) else p * alpha > -1


def _interior_order(lam_key):
    # interior singularity of order lam: E_n ~ n^{-(lam + 1/p)} in the weighted L_p norm
    def order(params, p):
        p = parse_p(p)
        return params[lam_key] + (0.0 if math.isinf(p) else 1.0 / p)
    return order


def _const(c):
    return lambda x: np.full(np.shape(x), float(c))


def _phat(k):
    k = int(k)
    basis = basis22(max(k, 1))
    return lambda x: basis.vandermonde(x)[..., k]


def _monomial(k):
    return lambda x: np.asarray(x, dtype=float) ** int(k)


def _abs(a, lam):
    return lambda x: np.abs(np.asarray(x, dtype=float) - a) ** lam


def _tpow(a, lam):
    return lambda x: np.maximum(np.asarray(x, dtype=float) - a, 0.0) ** lam


def _jacw(beta):
    return lambda x: np.clip(1 - np.asarray(x, dtype=float) ** 2, 0.0, None) ** beta


def _jacw_space(params, p, alpha):
    p = parse_p(p)
    a = alpha + params["beta"]
    return a >= 0 if math.isinf(p) else p * a > -1


def _cos(k):
    return lambda x: np.cos(k * np.pi * np.asarray(x, dtype=float))


REGISTRY: dict[str, FunctionDef] = {d.name: d for d in [
    FunctionDef("const", {"c": 1.0}, _const, "constant c"),
    FunctionDef("phat", {"k": 1}, _phat, "basis polynomial P_k^(2,2) with P_k(1) = 1"),
    FunctionDef("monomial", {"k": 2}, _monomial, "x^k"),
    FunctionDef("exp", {}, lambda: np.exp, "exp(x)"),
    FunctionDef("abs", {"a": 0.0, "lam": 1.0}, _abs, "|x - a|^lam",
                _interior_order("lam"), _bounded),
    FunctionDef("sqrtabs", {"a": 0.0}, lambda a: _abs(a, 0.5), "|x - a|^(1/2)",
                lambda params, p: 0.5 + (0.0 if math.isinf(parse_p(p)) else 1.0 / parse_p(p)),
                _bounded),
    FunctionDef("tpow", {"a": 0.0, "lam": 1.0}, _tpow, "max(x - a, 0)^lam (truncated power)",
                _interior_order("lam"), _bounded),
    FunctionDef("jacw", {"beta": 0.5}, _jacw, "(1 - x^2)^beta (endpoint singularity)",
                in_space=_jacw_space),
    FunctionDef("cos", {"k": 8.0}, _cos, "cos(k pi x) (high frequency)"),
]}


def registry_names() -> list[str]:
    return sorted(REGISTRY)


def _describe() -> str:
    return ", ".join(f"{n} ({REGISTRY[n].description})" for n in registry_names())


def parse_function(spec: str) -> tuple[FunctionDef, dict]:
    """Split ``name[:k=v,...]`` into a registry entry and float parameters."""
    name, _, rest = spec.strip().partition(":")
    if name not in REGISTRY:
        raise RegistryError(f"unknown function {name!r}; registry: {_describe()}")
    params = {}
    if rest:
        for item in rest.split(","):
            key, eq, val = item.partition("=")
            if not eq or not key.strip():
                raise RegistryError(f"malformed parameter {item!r} in {spec!r}; use k=v")
            try:
                params[key.strip()] = float(val)
            except ValueError:
                raise RegistryError(f"parameter {key.strip()!r} needs a number, got {val!r}") from None
    fdef = REGISTRY[name]
    unknown = set(params) - set(fdef.defaults)
    if unknown:
        raise RegistryError(f"{name}: unknown parameter(s) {sorted(unknown)}; "
                            f"expected {sorted(fdef.defaults)}")
    return fdef, params


def make_function(spec: str) -> Function:
    fdef, params = parse_function(spec)
    return fdef.make(**params)
