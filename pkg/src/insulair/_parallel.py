import os
from concurrent.futures import ProcessPoolExecutor


def worker_count() -> int:
    cap = os.environ.get("INSULAIR_THREADS")
    n = os.cpu_count() or 1
    if cap:
        n = min(n, max(1, int(cap)))
    else:
        n = 1
    return n


def parallel_map(func, items):
    """Order-preserving map; uses processes only when INSULAIR_THREADS > 1."""
    items = list(items)
    n = worker_count()
    if n <= 1 or len(items) < 2:
        return [func(x) for x in items]
    with ProcessPoolExecutor(max_workers=n) as ex:
        return list(ex.map(func, items))
