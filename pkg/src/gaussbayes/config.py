"""Strict JSON configuration files for experiments.

Example::

    {
      "N": 1.0, "n": 1, "m": 1,
      "prior": {"xi_re": 0.0, "xi_im": 0.0, "tau2": 1.0, "noninformative": false},
      "mc_samples": 100000, "seed": 42, "truncation_dim": 60
    }

Unknown keys are rejected so that a typo cannot silently fall back to a
default.  Complex numbers are written as separate real and imaginary fields.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import replace

from .bayes_predict import PriorParams
from .risk import ExperimentConfig


class ConfigError(ValueError):
    pass


_TOP = {"N", "n", "m", "prior", "mc_samples", "seed", "truncation_dim"}
_REQUIRED = {"N", "n", "m", "prior"}
_PRIOR = {"xi_re", "xi_im", "tau2", "noninformative"}


def _number(d, key, where, kind=float):
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{where}{key}: expected a number, got {v!r}")
    if kind is int:
        if isinstance(v, float) and not v.is_integer():
            raise ConfigError(f"{where}{key}: expected an integer, got {v!r}")
        return int(v)
    return float(v)


def config_from_dict(d) -> ExperimentConfig:
    if not isinstance(d, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(d) - _TOP
    if unknown:
        raise ConfigError(f"unknown field(s): {', '.join(sorted(unknown))}")
    missing = _REQUIRED - set(d)
    if missing:
        raise ConfigError(f"missing field(s): {', '.join(sorted(missing))}")
    p = d["prior"]
    if not isinstance(p, dict):
        raise ConfigError("prior: expected an object")
    unknown = set(p) - _PRIOR
    if unknown:
        raise ConfigError(f"unknown field(s) in prior: {', '.join(sorted(unknown))}")
    noninf = p.get("noninformative", False)
    if not isinstance(noninf, bool):
        raise ConfigError("prior.noninformative: expected true or false")
    if not noninf and "tau2" not in p:
        raise ConfigError("prior.tau2 is required unless prior.noninformative is true")
    xi = complex(
        _number(p, "xi_re", "prior.") if "xi_re" in p else 0.0,
        _number(p, "xi_im", "prior.") if "xi_im" in p else 0.0,
    )
    tau2 = _number(p, "tau2", "prior.") if "tau2" in p else 1.0
    kwargs = {}
    for key, kind in (("mc_samples", int), ("seed", int), ("truncation_dim", int)):
        if key in d:
            kwargs[key] = _number(d, key, "", kind)
    try:
        prior = PriorParams(xi, tau2, noninf)
        return ExperimentConfig(_number(d, "N", ""), _number(d, "n", "", int), _number(d, "m", "", int),
                                prior, **kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def config_to_dict(cfg: ExperimentConfig) -> dict:
    return {
        "N": cfg.N,
        "n": cfg.n,
        "m": cfg.m,
        "prior": {
            "xi_re": cfg.prior.xi.real,
            "xi_im": cfg.prior.xi.imag,
            "tau2": cfg.prior.tau2,
            "noninformative": cfg.prior.noninformative,
        },
        "mc_samples": cfg.mc_samples,
        "seed": cfg.seed,
        "truncation_dim": cfg.truncation_dim,
    }


def load_config(path, seed=None) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    cfg = config_from_dict(data)
    if seed is not None:
        try:
            cfg = replace(cfg, seed=seed)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    return cfg


def dump_config(cfg: ExperimentConfig) -> str:
    return json.dumps(config_to_dict(cfg), sort_keys=True, indent=2)


def content_hash(obj) -> str:
    """SHA-256 of the canonical JSON encoding of ``obj``."""
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()
