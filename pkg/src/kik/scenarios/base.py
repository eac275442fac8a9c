from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from contextvars import copy_context
from dataclasses import replace
import hashlib
import logging
import time
from typing import List, Optional

from tqdm import tqdm

from kik.config import ScenarioConfig
from kik.errors import ConfigError
from kik.logger import BaseLogger, RecordLogger
from kik.records import ScenarioResult, canonical_json, sort_records

logger = logging.getLogger(__name__)


def point_seed(seed: Optional[int], point: dict) -> Optional[int]:
    """Independent per-point seed derived from the run seed and the point's parameters."""
    if seed is None:
        return None
    digest = hashlib.sha256("{}:{}".format(seed, canonical_json(point)).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


class BaseScenario(ABC):
    """
    Base class for scenario drivers.

    ``run`` evaluates every parameter point, logs each point's records as one
    commit and returns all records in canonical order.
    """
    kind = None

    def __init__(self, config: ScenarioConfig, logger: Optional[BaseLogger] = None, threads: int = 1,
                 progress: bool = False):
        if config.kind != self.kind:
            raise ConfigError("{} cannot run a {!r} config".format(type(self).__name__, config.kind))
        self._config = config
        self._logger = logger if logger is not None else RecordLogger()
        self._threads = max(int(threads), 1)
        self._progress = progress

    @property
    def config(self) -> ScenarioConfig:
        return self._config

    @property
    def seed(self) -> Optional[int]:
        return self._config.seed

    def log_metrics(self, records: List[ScenarioResult]):
        for record in records:
            self._logger.log_metrics(record)
        self._logger.commit_metrics()

    def run(self) -> List[ScenarioResult]:
        points = self.points()
        logger.info("%s: %d parameter points on %d thread(s)", self.kind, len(points), self._threads)
        bar = tqdm(total=len(points), desc=self.kind, disable=not self._progress)
        if self._threads > 1:
            # workers see the caller's settings overrides
            contexts = [copy_context() for _ in points]
            with ThreadPoolExecutor(max_workers=self._threads) as pool:
                results = list(pool.map(lambda ctx, point: ctx.run(self._timed_evaluate, point), contexts, points))
        else:
            results = map(self._timed_evaluate, points)
        records = []
        for point_records in results:
            self.log_metrics(point_records)
            records.extend(point_records)
            bar.update()
        bar.close()
        return sort_records(records)

    def _timed_evaluate(self, point: dict) -> List[ScenarioResult]:
        start = time.perf_counter()
        records = self._evaluate_point(point)
        elapsed = time.perf_counter() - start
        logger.debug("%s point %s: %d records in %.2fs", self.kind, point, len(records), elapsed)
        return [replace(r, seed=self.seed, config_hash=self._config.hash, wall_clock=elapsed) for r in records]

    def _result(self, point: dict, order: int, g_label: str, estimate: float, ideal: float,
                **fields) -> ScenarioResult:
        return ScenarioResult(self.kind, dict(point), int(order), g_label, float(estimate), float(ideal),
                              float(estimate - ideal), **fields)

    @property
    def orders(self) -> List[int]:
        return [int(M) for M in self._config.mitigation["orders"]]

    @abstractmethod
    def points(self) -> List[dict]:
        raise NotImplementedError('points are not implemented.')

    @abstractmethod
    def _evaluate_point(self, point: dict) -> List[ScenarioResult]:
        raise NotImplementedError('point evaluation is not implemented.')
