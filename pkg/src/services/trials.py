"""
Trial execution service: seed derivation and an order-preserving worker pool
"""
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Iterator, List, Tuple, TypeVar

import numpy as np

from utils.logger import get_logger

logger = get_logger(__name__)

GENERATOR_NAME = "PCG64"
DEFAULT_CHUNK_SIZE = 500

T = TypeVar("T")
R = TypeVar("R")


def derive_seed(master: int, *counters: int) -> int:
    """
    Mix a master seed with counters into an independent 64-bit seed

    Args:
        master: Non-negative master seed
        counters: Non-negative counters, e.g. trial index and stream id

    Returns:
        Seed usable with numpy.random.default_rng
    """
    sequence = np.random.SeedSequence([int(master), *(int(c) for c in counters)])
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


class TrialExecutor:
    """
    Runs independent work items serially or on a process pool

    Results always come back in submission order, and chunk boundaries only
    depend on the chunk size, so merged results do not depend on the number
    of workers.
    """

    def __init__(self, workers: int = 1, chunk_size: int = DEFAULT_CHUNK_SIZE):
        """
        Initialize the executor

        Args:
            workers: Pool size; 1 runs everything in the calling process
            chunk_size: Number of trials per work item
        """
        if workers < 1:
            raise ValueError(f"workers must be >= 1, got {workers}")
        if chunk_size < 1:
            raise ValueError(f"chunk_size must be >= 1, got {chunk_size}")
        self.workers = workers
        self.chunk_size = chunk_size
        self.logger = logger

    def chunks(self, total: int) -> List[Tuple[int, int]]:
        """Split range(total) into [start, stop) chunks"""
        return [(start, min(start + self.chunk_size, total)) for start in range(0, total, self.chunk_size)]

    def map(self, fn: Callable[[T], R], items: Iterable[T]) -> Iterator[R]:
        """
        Apply `fn` to every item, yielding results in input order

        `fn` and the items must be picklable when more than one worker is used.
        """
        items = list(items)
        if self.workers == 1 or len(items) <= 1:
            for item in items:
                yield fn(item)
            return

        self.logger.info(f"Dispatching {len(items)} work items to {self.workers} workers")
        with ProcessPoolExecutor(max_workers=self.workers) as pool:
            for result in pool.map(fn, items):
                yield result
