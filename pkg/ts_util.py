import collections.abc
import logging
import multiprocessing
import os
from typing import Callable, Iterable, List

THREADS_ENV_NAME = "TORUS_SPECTRA_THREADS"

logger = logging.getLogger(__name__)


def deep_update(d, u):
    """
    Apply an update operation to a dictionary without overwriting embedded dictionaries.

    :param d: The base dictionary
    :param u: The dictionary to merge on top of the base
    :return: The base dictionary, for recursion purposes
    """
    for k, v in u.items():
        if isinstance(v, collections.abc.Mapping):
            d[k] = deep_update(d.get(k, {}), v)
        else:
            d[k] = v
    return d


def worker_count(requested: int = None) -> int:
    """
    Return the number of worker processes to use, capped by the ``TORUS_SPECTRA_THREADS`` environment variable.

    :param requested: (optional) The number of workers asked for by the caller. Defaults to the environment cap.
    :return: A positive integer. 1 means run serially in the calling process.
    """
    env_value = os.environ.get(THREADS_ENV_NAME)
    cap = 1
    if env_value:
        try:
            cap = int(env_value)
        except ValueError:
            raise ValueError(f"Environment variable {THREADS_ENV_NAME} must be an integer, got '{env_value}'")
        if cap < 1:
            raise ValueError(f"Environment variable {THREADS_ENV_NAME} must be positive, got {cap}")
    if requested is None:
        return cap
    return max(1, min(requested, cap))


def parallel_map(func: Callable, items: Iterable, workers: int = None) -> List:
    """
    Map a picklable function over items, in order, optionally across worker processes.

    The output order always matches the input order, so results do not depend on the worker count.

    :param func: A picklable callable of one argument
    :param items: The arguments to map over
    :param workers: (optional) The requested number of processes, capped by ``worker_count``
    :return: A list of results in input order
    """
    items = list(items)
    n_workers = min(worker_count(workers), len(items)) if items else 1
    if n_workers <= 1:
        return [func(item) for item in items]
    logger.debug(f"Mapping {len(items)} item(s) across {n_workers} process(es)")
    with multiprocessing.Pool(processes=n_workers) as pool:
        return pool.map(func, items)


def format_float(value: float) -> str:
    """Format a double with 17 significant digits so that it round-trips exactly."""
    return format(float(value), ".17g")
