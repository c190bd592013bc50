"""
Prometheus metrics for long-running enumerations.

Counters are in-process only; nothing is exported over HTTP.
"""
from prometheus_client import Counter, Histogram, Gauge, Info
from functools import wraps
from time import time
from typing import Callable, TypeVar, ParamSpec

P = ParamSpec('P')
T = TypeVar('T')

# Orbit Metrics
orbit_circles_total = Counter(
    'orbit_circles_total',
    'Total circles recorded by orbit enumeration',
    ['label']
)

orbit_enumeration_duration_seconds = Histogram(
    'orbit_enumeration_duration_seconds',
    'Orbit enumeration duration in seconds',
    ['label']
)

# Quotient Metrics
quotient_size = Gauge(
    'quotient_size',
    'Size of the last congruence quotient built',
    ['label', 'modulus']
)

quotient_build_duration_seconds = Histogram(
    'quotient_build_duration_seconds',
    'Congruence quotient build duration in seconds',
    ['label']
)

row_orbit_states_total = Counter(
    'row_orbit_states_total',
    'Total row-orbit states visited',
    ['label']
)

local_stage_duration_seconds = Histogram(
    'local_stage_duration_seconds',
    'Duration of obstruction and Lie-lattice computations in seconds',
    ['stage']
)

# Spectral Metrics
eigensolve_duration_seconds = Histogram(
    'eigensolve_duration_seconds',
    'Eigenvalue solve duration in seconds',
    ['solver']
)

# Exponential Sum Metrics
expsum_evaluations_total = Counter(
    'expsum_evaluations_total',
    'Total exponential sum evaluations',
    ['kind', 'path']  # path: closed_form, crt or brute_force
)

# System Metrics
app_info = Info('kleinpack', 'Application information')
app_info.info({
    'version': '0.1.0',
    'name': 'kleinpack'
})


def track_duration(histogram: Histogram, **labels: str):
    """Decorator observing the wall time of a call on a labelled histogram."""
    def decorator(func: Callable[P, T]) -> Callable[P, T]:
        @wraps(func)
        def wrapper(*args: P.args, **kwargs: P.kwargs) -> T:
            start_time = time()
            try:
                return func(*args, **kwargs)
            finally:
                histogram.labels(**labels).observe(time() - start_time)

        return wrapper
    return decorator
