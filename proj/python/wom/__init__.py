"""Exact solvers for decentralized control over delayed sharing networks.

Instances are given as a bundled name ("static3", "d2", ...), a path to a JSON
document, or an already-parsed dict. Agents are 1-based, as in the documents.
"""

import json
import os

from . import _wom
from ._wom import CapExceeded, WomError

__all__ = [
    "CapExceeded",
    "WomError",
    "bundled",
    "compare",
    "counts",
    "delays",
    "digest",
    "evaluate",
    "load",
    "schema",
    "simulate",
    "solve",
]

DEFAULT_CAP = _wom.DEFAULT_CAP


def _source(instance):
    if isinstance(instance, dict):
        return json.dumps(instance)
    if isinstance(instance, (str, os.PathLike)):
        if str(instance) in _wom.bundled_names():
            return str(instance)
        if os.path.exists(instance):
            with open(instance) as f:
                return f.read()
    raise WomError(f"Parse: {instance!r} is neither a bundled instance nor a file")


def _strategy(strategy):
    if strategy is None:
        return ""
    if isinstance(strategy, dict):
        return json.dumps(strategy.get("strategy", strategy))
    return json.dumps({"tables": strategy})


def bundled():
    return list(_wom.bundled_names())


def load(instance):
    """Validated instance document as a dict."""
    return json.loads(_wom.validate(_source(instance)))


def digest(instance):
    return _wom.digest(_source(instance))


def delays(instance):
    return json.loads(_wom.delays(_source(instance)))


def schema(instance, time, agent):
    return json.loads(_wom.schema(_source(instance), time, agent))


def counts(instance):
    return {k: int(v) for k, v in json.loads(_wom.counts(_source(instance))).items()}


def solve(instance, method="prescription", agent=None, cap=None, with_strategy=False):
    if method == "prescription" and agent is None:
        raise WomError("Parse: method 'prescription' needs an agent")
    if method != "prescription" and agent is not None:
        raise WomError("Parse: agent applies only to method 'prescription'")
    out = json.loads(_wom.solve(_source(instance), method, agent or 0, cap or 0, with_strategy))
    out["search_size"] = int(out["search_size"])
    return out


def evaluate(instance, strategy=None):
    """Exact expected cost; `strategy` is a tables list, a {tables} dict, or a solve() result."""
    return json.loads(_wom.evaluate(_source(instance), _strategy(strategy)))


def simulate(instance, strategy=None, samples=10000, seed=0):
    return json.loads(_wom.simulate(_source(instance), _strategy(strategy), samples, seed))


def compare(instance, cap=None):
    return json.loads(_wom.compare(_source(instance), cap or 0))
