"""Python access to the pcomp experiment pipeline.

The heavy lifting happens in the compiled ``_pcomp`` extension; this module
converts between Python dicts and the JSON the core library speaks.
"""

from __future__ import annotations

import json
import os
from typing import Any, Mapping, Optional

from . import _pcomp
from ._pcomp import (  # noqa: F401
    DomainError,
    Error,
    InputError,
    classification_metrics,
    icc_a_k,
    late_fuse,
    mse,
    pearson_r,
)

__all__ = [
    "DomainError",
    "Error",
    "InputError",
    "classification_metrics",
    "config_fingerprint",
    "default_config",
    "icc_a_k",
    "late_fuse",
    "mse",
    "pearson_r",
    "report",
    "run",
    "synth",
    "validate",
]


class CommandError(Error):
    """A command finished with a non-zero exit code."""

    def __init__(self, code: int, stderr: str):
        super().__init__(f"exit code {code}: {stderr.strip()}")
        self.code = code
        self.stderr = stderr


def _check(result: tuple[int, str, str]) -> str:
    code, out, err = result
    if code != 0:
        raise CommandError(code, err)
    return out


def validate(manifest: os.PathLike | str, ratings: Optional[os.PathLike | str] = None) -> dict:
    """Validate a dataset and return the report."""
    return json.loads(_pcomp.validate(os.fspath(manifest), None if ratings is None else os.fspath(ratings)))


def synth(out_dir: os.PathLike | str, spec: Optional[Mapping[str, Any]] = None,
          pair: Optional[Mapping[str, Any]] = None) -> str:
    """Generate a synthetic dataset (or a T1/T2 pair when ``pair`` is given)."""
    pair_json = None if pair is None else json.dumps(dict(pair))
    return _check(_pcomp.synth(json.dumps(dict(spec or {})), os.fspath(out_dir), pair_json))


def default_config() -> dict:
    return json.loads(_pcomp.default_config())


def config_fingerprint(config: Mapping[str, Any]) -> str:
    return _pcomp.config_fingerprint(json.dumps(dict(config)))


def run(config: Mapping[str, Any], base_dir: os.PathLike | str = "") -> str:
    """Run an experiment. Relative paths in ``config`` resolve against ``base_dir``."""
    return _check(_pcomp.run(json.dumps(dict(config)), os.fspath(base_dir)))


def report(run_dir: os.PathLike | str) -> str:
    """Re-render results from a finished run directory; returns the Markdown."""
    return _check(_pcomp.report(os.fspath(run_dir)))
