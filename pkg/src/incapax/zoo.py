"""Named channel families."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .channel import Channel, identity_channel, random_channel
from .locc import gen_paulis


def _prob(p, name="p"):
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"{name} must be in [0, 1], got {p}")
    return p


def _dim(d, name="d"):
    if float(d) != int(float(d)):
        raise ValueError(f"{name} must be an integer, got {d}")
    d = int(float(d))
    if d < 1:
        raise ValueError(f"{name} must be positive, got {d}")
    return d


def _nonzero(kraus):
    return tuple(k for k in kraus if np.linalg.norm(k) > 0)


def depolarizing(d=2, p=0.0) -> Channel:
    """``(1-p) rho + p Tr(rho) I/d`` via Heisenberg-Weyl Kraus operators."""
    d, p = _dim(d), _prob(p)
    paulis = gen_paulis(d)
    kraus = [np.sqrt(1 - p + p / d**2) * paulis[0]] + [np.sqrt(p / d**2) * s for s in paulis[1:]]
    return Channel(_nonzero(kraus), name=f"depolarizing({d},{p:g})")


def erasure(d=2, p=0.0) -> Channel:
    """Passes the input with probability ``1-p``, else outputs the flag ``|d>``."""
    d, p = _dim(d), _prob(p)
    embed = np.vstack([np.eye(d), np.zeros((1, d))])
    flags = [np.outer(np.eye(d + 1)[d], np.eye(d)[j]) for j in range(d)]
    kraus = [np.sqrt(1 - p) * embed] + [np.sqrt(p) * f for f in flags]
    return Channel(_nonzero(kraus), name=f"erasure({d},{p:g})")


def dephasing(d=2, p=0.0) -> Channel:
    """``(1-p) rho + p diag(rho)``."""
    d, p = _dim(d), _prob(p)
    kraus = [np.sqrt(1 - p) * np.eye(d)] + [np.sqrt(p) * np.diag(np.eye(d)[k]) for k in range(d)]
    return Channel(_nonzero(kraus), name=f"dephasing({d},{p:g})")


def amplitude_damping(gamma=0.0) -> Channel:
    g = _prob(gamma, "gamma")
    kraus = [np.array([[1, 0], [0, np.sqrt(1 - g)]]), np.array([[0, np.sqrt(g)], [0, 0]])]
    return Channel(_nonzero(kraus), name=f"amplitude_damping({g:g})")


def completely_depolarizing(d=2) -> Channel:
    d = _dim(d)
    kraus = [np.outer(np.eye(d)[i], np.eye(d)[j]) / np.sqrt(d) for i in range(d) for j in range(d)]
    return Channel(tuple(kraus), name=f"completely_depolarizing({d})")


def identity(d=2) -> Channel:
    return identity_channel(_dim(d))


def random(d_in=2, d_out=2, k=2, seed=0) -> Channel:
    ch = random_channel(_dim(d_in, "d_in"), _dim(d_out, "d_out"), _dim(k, "k"), int(seed))
    return Channel(ch.kraus, name=f"random({d_in},{d_out},{k},{seed})")


@dataclass(frozen=True)
class ZooEntry:
    build: Callable[..., Channel]
    params: tuple[str, ...]
    summary: str


ZOO: dict[str, ZooEntry] = {
    "identity": ZooEntry(identity, ("d",), "noiseless channel"),
    "depolarizing": ZooEntry(depolarizing, ("d", "p"), "(1-p) rho + p I/d, p in [0,1]"),
    "erasure": ZooEntry(erasure, ("d", "p"), "erases to flag |d> with probability p"),
    "dephasing": ZooEntry(dephasing, ("d", "p"), "(1-p) rho + p diag(rho)"),
    "amplitude_damping": ZooEntry(amplitude_damping, ("gamma",), "qubit decay with probability gamma"),
    "completely_depolarizing": ZooEntry(completely_depolarizing, ("d",), "rho -> I/d"),
    "random": ZooEntry(random, ("d_in", "d_out", "k", "seed"), "Haar-random Stinespring isometry"),
}


def zoo_build(name: str, params: dict | None = None) -> Channel:
    if name not in ZOO:
        raise KeyError(f"unknown zoo channel {name!r}; known: {', '.join(sorted(ZOO))}")
    params = dict(params or {})
    entry = ZOO[name]
    unknown = set(params) - set(entry.params)
    if unknown:
        raise ValueError(f"unknown parameters for {name}: {', '.join(sorted(unknown))}")
    return entry.build(**params)


_CALL = re.compile(r"^\s*([A-Za-z_]\w*)\s*(?:\((.*)\))?\s*$")


def parse_zoo_call(text: str) -> tuple[str, dict]:
    """Parse ``"erasure(2, 0.5)"`` or ``"erasure(d=2, p=0.5)"`` into name and params."""
    m = _CALL.match(text)
    if not m:
        raise ValueError(f"cannot parse zoo expression {text!r}")
    name, args = m.group(1), m.group(2)
    if name not in ZOO:
        raise KeyError(f"unknown zoo channel {name!r}; known: {', '.join(sorted(ZOO))}")
    params = {}
    if args and args.strip():
        names = ZOO[name].params
        for pos, tok in enumerate(a.strip() for a in args.split(",")):
            if "=" in tok:
                key, val = (s.strip() for s in tok.split("=", 1))
            else:
                if pos >= len(names):
                    raise ValueError(f"too many arguments for {name}")
                key, val = names[pos], tok
            params[key] = float(val)
    return name, params
