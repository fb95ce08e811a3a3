"""System parameters for the channel-access models, with validation and JSON I/O."""

import json
from dataclasses import dataclass, fields

MODEL_BASIC = "basic"
MODEL_RESERVATION = "reservation"
MODELS = (MODEL_BASIC, MODEL_RESERVATION)

_COUNT_FIELDS = ("M", "k", "M_rp", "M1_prime", "M_r2", "m", "n")
_RATE_FIELDS = ("lambda_p", "mu_p", "lambda_s", "mu_s")
_REQUIRED_KEYS = ("M", "k", "lambda_p", "mu_p", "lambda_s", "mu_s",
                  "M_rp", "M1_prime", "M_r2", "m", "n")
_OPTIONAL_KEYS = ("su2_min_width_admission",)


class ParamError(ValueError):
    """A parameter set or configuration violates a model invariant."""


@dataclass(frozen=True)
class SystemParams:
    """Constants of both channel-access models.

    M homogeneous channels are shared by a finite population of k primary
    users (arrival rate lambda_p per idle PU, service rate mu_p) and by
    Poisson secondary-user traffic (rate lambda_s per SU class, service
    rate mu_s).  M_rp channels are filled first by PUs, M1_prime channels
    are usable by returned class-1 SUs, M_r2 channels are usable only by
    class-2 SUs, and class-2 SUs aggregate between n and m channels.
    """

    M: int
    k: int
    lambda_p: float
    mu_p: float
    lambda_s: float
    mu_s: float
    M_rp: int = 0
    M1_prime: int = 0
    M_r2: int = 0
    m: int = 1
    n: int = 1
    # Admit an SU-2 at width n when fewer than m (but at least n) channels
    # are idle and no wide SU-2 can shrink.  Both readings of the arrival
    # rule are supported; see build_reservation_generator.
    su2_min_width_admission: bool = True

    @property
    def M1(self) -> int:
        """Channels available to class-1 SUs: M - M_rp - M_r2."""
        return self.M - self.M_rp - self.M_r2

    @property
    def M2(self) -> int:
        """Channels available to class-2 SUs: M - M_rp - M1_prime."""
        return self.M - self.M_rp - self.M1_prime

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def validate_params(p: SystemParams) -> SystemParams:
    """Return p unchanged if every invariant holds, else raise ParamError.

    The error message names the first violated invariant.
    """
    for name in _COUNT_FIELDS:
        v = getattr(p, name)
        if isinstance(v, bool) or not isinstance(v, int):
            raise ParamError(f"{name} not an integer")
    if p.M < 1:
        raise ParamError("M < 1")
    if p.k < 1:
        raise ParamError("k < 1")
    for name in _RATE_FIELDS:
        v = getattr(p, name)
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise ParamError(f"{name} not a number")
        if not v > 0:
            raise ParamError(f"{name} not positive")
    for name in ("M_rp", "M1_prime", "M_r2"):
        if getattr(p, name) < 0:
            raise ParamError(f"{name} negative")
    if p.m < 1:
        raise ParamError("m < 1")
    if p.n < 1:
        raise ParamError("n < 1")
    if p.n > p.m:
        raise ParamError("n > m")
    if p.M1 < 0:
        raise ParamError("M1 negative")
    if p.M2 < 0:
        raise ParamError("M2 negative")
    if not isinstance(p.su2_min_width_admission, bool):
        raise ParamError("su2_min_width_admission not a boolean")
    return p


def params_from_dict(doc: dict) -> SystemParams:
    """Build validated SystemParams from a JSON-style dict with strict keys."""
    if not isinstance(doc, dict):
        raise ParamError("params document is not a JSON object")
    allowed = set(_REQUIRED_KEYS) | set(_OPTIONAL_KEYS)
    for key in doc:
        if key not in allowed:
            raise ParamError(f"unknown key '{key}'")
    for key in _REQUIRED_KEYS:
        if key not in doc:
            raise ParamError(f"missing key '{key}'")
    return validate_params(SystemParams(**doc))


def load_params(path) -> SystemParams:
    """Load and validate SystemParams from a JSON file."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParamError(f"invalid JSON in {path}: {exc}") from exc
    return params_from_dict(doc)
