"""Linear eigenvalue statistics of non-Hermitian random matrices."""

import json

from ._rmtlab import (
    DysonPoint,
    InvalidParameter,
    RmtlabError,
    TestFunction,
    __version__,
    config_hash as _config_hash,
    dbm_drift,
    dbm_matrix_flow,
    density_at,
    derive_seed,
    eigenvalues,
    girko_reconstruct,
    independence_statistic,
    kappa4,
    overlap_matrix,
    quantile,
    sample_matrix,
    singular_values,
    solve_m,
    solve_m_real,
    theta_closed,
    thread_count,
    u_kernel,
    u_kernel_integral,
    v_kernel,
)
from . import _rmtlab


def _spec(family, part=None, **params):
    spec = {"family": family, "params": params}
    if part is not None:
        spec["part"] = part
    return spec


def _as_spec(f):
    return f if isinstance(f, dict) else _spec(f)


def function(family, part=None, **params):
    """Test function from a family name: monomial (k, l), gaussian (s, center_re, ...),
    fourier (k, part) or zero. Cutoff radii are set with inner and outer."""
    return _rmtlab._function(json.dumps(_spec(family, part, **params)))


def covariance(g, f, kappa4=0.0):
    """C(g, f) with its gradient, H^1/2 and kappa4 parts. g and f are spec dicts."""
    return _rmtlab._covariance(json.dumps(_as_spec(g)), json.dumps(_as_spec(f)), kappa4)


def expectation(f, kappa4, n):
    return _rmtlab._expectation(json.dumps(_as_spec(f)), kappa4, n)


def run_clt(config):
    """Runs a CLT experiment from a config dict and returns the JSON report as a dict."""
    return json.loads(_rmtlab._run_clt(json.dumps(config)))


def config_hash(config):
    return _config_hash(json.dumps(config))
