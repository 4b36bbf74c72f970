"""Order-preserving thread map shared by the Monte Carlo and battery drivers."""
import os
from concurrent.futures import ThreadPoolExecutor

WORKERS_ENV = "REACHGED_WORKERS"


def default_workers():
    value = os.environ.get(WORKERS_ENV)
    if value:
        return max(1, int(value))
    return 1


def parallel_map(fn, count, workers=None):
    """``[fn(0), ..., fn(count - 1)]`` evaluated on a thread pool, returned in index order."""
    workers = default_workers() if workers is None else max(1, int(workers))
    if workers == 1 or count < 2:
        return [fn(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(count)))
