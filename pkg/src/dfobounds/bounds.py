"""Error-bound constants for interpolation models on a ball.

Every bound has the shape |f - m| <= C_f delta^2, ||grad f - grad m|| <=
C_g delta, ||hess m|| <= C_H, with constants assembled from the Lipschitz
constant of the objective's gradient (L), the relaxation level (kappa), and
either raw matrix-norm constants or the measured poisedness constant.  The
constants can be requested in the raw form (user-supplied kappa_L, kappa_Q,
kappa_s, kappa_H) or fully composed from the poisedness constant; reports
record which path produced each number.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

__all__ = [
    "BoundKind",
    "BoundInputs",
    "BoundReport",
    "c_delta_max",
    "constants_from_lambda",
    "hessian_bound_mfn",
    "error_bounds",
    "closed_form_bounds",
]


class BoundKind(Enum):
    LIN_DET = "lin_det"
    QUAD_DET = "quad_det"
    UNDER = "under"
    MFN = "mfn"


def c_delta_max(delta_max: float) -> float:
    """min(1, 1/delta_max, 1/delta_max^2); the radius-cap normalizer."""
    delta_max = float(delta_max)
    if delta_max <= 0.0 or not math.isfinite(delta_max):
        raise ValueError(f"delta_max must be positive and finite, got {delta_max}")
    return min(1.0, 1.0 / delta_max, 1.0 / (delta_max * delta_max))


def _kind_name(kind) -> str:
    name = getattr(kind, "name", kind)
    return str(name).upper()


def constants_from_lambda(
    kind,
    lam: float,
    n: Optional[int] = None,
    p: Optional[int] = None,
    q: Optional[int] = None,
) -> float:
    """Scaled-matrix norm constant implied by the poisedness constant.

    LINEAR gives the inverse-norm cap lam * sqrt(n); QUADRATIC gives
    4 lam sqrt((q+1)^3); MFN gives the pseudoinverse cap
    lam sqrt(2(n+1)) (p+1).  ``kind`` may be a PoisednessKind or its name.
    """
    lam = float(lam)
    if lam < 1.0 - 1e-9:
        raise ValueError(f"poisedness constant must be >= 1, got {lam}")
    name = _kind_name(kind)
    if name == "LINEAR":
        if n is None:
            raise ValueError("LINEAR needs n")
        return lam * math.sqrt(n)
    if name == "QUADRATIC":
        if q is None:
            raise ValueError("QUADRATIC needs q")
        return 4.0 * lam * math.sqrt((q + 1.0) ** 3)
    if name == "MFN":
        if n is None or p is None:
            raise ValueError("MFN needs n and p")
        return lam * math.sqrt(2.0 * (n + 1.0)) * (p + 1.0)
    raise ValueError(f"unknown poisedness kind {kind!r}")


def hessian_bound_mfn(
    L: float, kappa: float, lam: float, p: int, q: int, delta_max: float
) -> float:
    """Cap on the model Hessian norm of a relaxed minimum-norm fit.

    (kappa + L/2) * 4 lam (p+1) sqrt(2(q+1)) / c(delta_max)^2.
    """
    _check_nonneg(L=L, kappa=kappa)
    if lam < 1.0 - 1e-9:
        raise ValueError(f"poisedness constant must be >= 1, got {lam}")
    c = c_delta_max(delta_max)
    return (kappa + 0.5 * L) * 4.0 * lam * (p + 1.0) * math.sqrt(2.0 * (q + 1.0)) / (c * c)


def _check_nonneg(**named) -> None:
    for key, value in named.items():
        value = float(value)
        if not math.isfinite(value) or value < 0.0:
            raise ValueError(f"{key} must be finite and nonnegative, got {value}")


@dataclass(frozen=True)
class BoundInputs:
    """Inputs for the bound constants.

    lam is the measured poisedness constant; kappa_L/kappa_Q/kappa_s/kappa_H
    are raw matrix-norm constants that, when supplied, take precedence over
    the lam-derived values.  q defaults to the quadratic space size minus
    one for the given n.
    """

    L: float
    kappa: float = 0.0
    lam: Optional[float] = None
    kappa_L: Optional[float] = None
    kappa_Q: Optional[float] = None
    kappa_s: Optional[float] = None
    kappa_H: Optional[float] = None
    n: Optional[int] = None
    p: Optional[int] = None
    q: Optional[int] = None
    delta: Optional[float] = None
    delta_max: Optional[float] = None

    def __post_init__(self) -> None:
        _check_nonneg(L=self.L, kappa=self.kappa)
        if self.lam is not None and self.lam < 1.0 - 1e-9:
            raise ValueError(f"lam must be >= 1, got {self.lam}")
        if self.n is not None and self.q is None:
            object.__setattr__(self, "q", (self.n * self.n + 3 * self.n) // 2)
        if self.delta is not None and self.delta_max is None:
            object.__setattr__(self, "delta_max", float(self.delta))
        if (
            self.delta is not None
            and self.delta_max is not None
            and self.delta > self.delta_max * (1.0 + 1e-12)
        ):
            raise ValueError(
                f"delta {self.delta} exceeds delta_max {self.delta_max}"
            )


@dataclass(frozen=True)
class BoundReport:
    """Bound constants plus a record of how each one was obtained."""

    kind: BoundKind
    C_f: float
    C_g: float
    C_H: float
    provenance: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.name,
            "C_f": self.C_f,
            "C_g": self.C_g,
            "C_H": self.C_H,
            "provenance": dict(self.provenance),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _require(inputs: BoundInputs, *names: str):
    out = []
    for name in names:
        value = getattr(inputs, name)
        if value is None:
            raise ValueError(f"bound computation needs {name}")
        out.append(value)
    return out


def error_bounds(kind, inputs: BoundInputs) -> BoundReport:
    """Bound constants for the given model kind.

    For the determined kinds the matrix constant comes from kappa_L/kappa_Q
    when supplied, otherwise from the poisedness constant.  UNDER takes
    kappa_s and kappa_H as given; MFN derives them from the poisedness
    constant (unless overridden) and then applies the UNDER form.
    """
    name = _kind_name(kind)
    kind = BoundKind[name]
    L, kappa = inputs.L, inputs.kappa
    prov: dict = {}

    if kind is BoundKind.LIN_DET:
        (n,) = _require(inputs, "n")
        if inputs.kappa_L is not None:
            kappa_L = inputs.kappa_L
            prov["kappa_L"] = "supplied"
        else:
            (lam,) = _require(inputs, "lam")
            kappa_L = constants_from_lambda("LINEAR", lam, n=n)
            prov["kappa_L"] = "from_lambda"
        term = (0.5 * L + 2.0 * kappa) * kappa_L * math.sqrt(n)
        C_g = L + term
        C_f = 0.5 * L + kappa + term
        C_H = 0.0
        prov.update(C_f="linear_determined", C_g="linear_determined", C_H="zero")
        return BoundReport(kind, C_f, C_g, C_H, prov)

    if kind is BoundKind.QUAD_DET:
        (q,) = _require(inputs, "q")
        if inputs.kappa_Q is not None:
            kappa_Q = inputs.kappa_Q
            prov["kappa_Q"] = "supplied"
        else:
            (lam,) = _require(inputs, "lam")
            kappa_Q = constants_from_lambda("QUADRATIC", lam, q=q)
            prov["kappa_Q"] = "from_lambda"
        C_H = 2.0 * kappa_Q * math.sqrt(2.0 * q) * (kappa + L)
        C_g = 2.0 * kappa_Q * math.sqrt(q) * (1.0 + math.sqrt(2.0)) * (kappa + L)
        C_f = 0.5 * L + kappa + kappa_Q * math.sqrt(q) * (2.0 + 3.0 * math.sqrt(2.0)) * (kappa + L)
        prov.update(
            C_f="quadratic_determined",
            C_g="quadratic_determined",
            C_H="quadratic_determined",
        )
        return BoundReport(kind, C_f, C_g, C_H, prov)

    if kind is BoundKind.UNDER:
        (p,) = _require(inputs, "p")
        kappa_s, kappa_H = _require(inputs, "kappa_s", "kappa_H")
        prov["kappa_s"] = "supplied"
        prov["kappa_H"] = "supplied"
        return _underdetermined_report(kind, L, kappa, kappa_s, kappa_H, p, prov)

    if kind is BoundKind.MFN:
        (n, p, q) = _require(inputs, "n", "p", "q")
        if inputs.kappa_s is not None:
            kappa_s = inputs.kappa_s
            prov["kappa_s"] = "supplied"
        else:
            (lam,) = _require(inputs, "lam")
            kappa_s = constants_from_lambda("MFN", lam, n=n, p=p)
            prov["kappa_s"] = "from_lambda"
        if inputs.kappa_H is not None:
            kappa_H = inputs.kappa_H
            prov["kappa_H"] = "supplied"
        else:
            (lam, delta_max) = _require(inputs, "lam", "delta_max")
            kappa_H = hessian_bound_mfn(L, kappa, lam, p, q, delta_max)
            prov["kappa_H"] = "from_lambda"
        return _underdetermined_report(kind, L, kappa, kappa_s, kappa_H, p, prov)

    raise ValueError(f"unknown bound kind {kind!r}")


def _underdetermined_report(kind, L, kappa, kappa_s, kappa_H, p, prov) -> BoundReport:
    bracket = L + kappa + 0.75 * kappa_H
    C_g = 2.0 * kappa_s * math.sqrt(p) * bracket
    C_f = 0.5 * (L + kappa_H) + kappa + C_g
    C_H = kappa_H
    prov.update(C_f="underdetermined", C_g="underdetermined", C_H="hessian_cap")
    return BoundReport(kind, C_f, C_g, C_H, prov)


def closed_form_bounds(kind, inputs: BoundInputs) -> BoundReport:
    """Fully expanded closed forms of the composed bound constants.

    Evaluates the printed one-line expressions (matrix constants substituted
    by their poisedness-derived values) instead of composing step by step;
    equal to ``error_bounds`` up to floating-point roundoff and used to
    cross-check the composition.
    """
    name = _kind_name(kind)
    kind = BoundKind[name]
    L, kappa = inputs.L, inputs.kappa
    prov = {"form": "closed"}

    if kind is BoundKind.LIN_DET:
        (n, lam) = _require(inputs, "n", "lam")
        term = (0.5 * L + 2.0 * kappa) * lam * n
        return BoundReport(kind, 0.5 * L + kappa + term, L + term, 0.0, prov)

    if kind is BoundKind.QUAD_DET:
        (q, lam) = _require(inputs, "q", "lam")
        root = math.sqrt(q * (q + 1.0) ** 3)
        C_H = 8.0 * lam * math.sqrt(2.0 * q * (q + 1.0) ** 3) * (kappa + L)
        C_g = 8.0 * lam * root * (1.0 + math.sqrt(2.0)) * (kappa + L)
        C_f = 0.5 * L + kappa + 4.0 * lam * root * (2.0 + 3.0 * math.sqrt(2.0)) * (kappa + L)
        return BoundReport(kind, C_f, C_g, C_H, prov)

    if kind is BoundKind.UNDER:
        (p, kappa_s, kappa_H) = _require(inputs, "p", "kappa_s", "kappa_H")
        bracket = L + kappa + 0.75 * kappa_H
        C_g = 2.0 * kappa_s * math.sqrt(p) * bracket
        return BoundReport(
            kind, 0.5 * (L + kappa_H) + kappa + C_g, C_g, kappa_H, prov
        )

    if kind is BoundKind.MFN:
        (n, p, q, lam, delta_max) = _require(inputs, "n", "p", "q", "lam", "delta_max")
        c = c_delta_max(delta_max)
        hess = (kappa + 0.5 * L) * lam * 4.0 * (p + 1.0) * math.sqrt(2.0 * (q + 1.0)) / (c * c)
        inner = (kappa + 0.5 * L) * lam * 3.0 * (p + 1.0) * math.sqrt(2.0 * (q + 1.0)) / (c * c)
        C_g = 2.0 * lam * math.sqrt(2.0 * p * (n + 1.0)) * (p + 1.0) * (L + kappa + inner)
        C_f = 0.5 * (L + hess) + kappa + C_g
        return BoundReport(kind, C_f, C_g, hess, prov)

    raise ValueError(f"unknown bound kind {kind!r}")
