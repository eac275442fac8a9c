from abc import ABC, abstractmethod
from collections import defaultdict
import time

import numpy as np


class BaseLogger(ABC):
    """Collects per-point scenario metrics; one commit per parameter point."""
    METRICS = ("estimate", "bias", "variance")

    def __init__(self, *args, **kwargs):
        self._metrics = defaultdict(lambda: defaultdict(list))
        self._time = time.time()
        self._step = 0

    @property
    def step(self):
        return self._step

    @property
    def metrics(self):
        return self._metrics

    @abstractmethod
    def log_metrics(self, record):
        for name in self.METRICS:
            value = getattr(record, name)
            if value is not None:
                self._metrics[self._step][name].append(value)

    @abstractmethod
    def commit_metrics(self):
        self._step += 1


class RecordLogger(BaseLogger):
    """Keeps every record for serialization."""
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self._records = []

    @property
    def records(self):
        return list(self._records)

    def log_metrics(self, record):
        super().log_metrics(record)
        self._records.append(record)

    def commit_metrics(self):
        super().commit_metrics()


class CometLogger(RecordLogger):
    def __init__(self, experiment, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self._experiment = experiment

    def commit_metrics(self):
        super().commit_metrics()
        step = self._step - 1
        for name, values in self._metrics[step].items():
            self._experiment.log_metric("avg_" + name, np.mean(values), step=step)
            self._experiment.log_metric("std_" + name, np.std(values), step=step)
        self._experiment.log_metric("elapsed", time.time() - self._time, step=step)
