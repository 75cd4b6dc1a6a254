# pylint: disable=W0703

import csv
import logging
import os
import time

from codebase.lab.errors import LabError
from codebase.lab.types import LogTrajectory
from codebase.report import Report


class Experiment:
    """Base of every mode handler

    ``run`` computes, records statistics with ``stat``, boolean checks with
    ``check`` and evidence series with ``write_series``.
    """

    def __init__(self, runner, config, out_dir):
        self.runner = runner
        self.config = config
        self.out_dir = out_dir
        self.verdicts = {}
        self.statistics = {}
        self.series = {}

    def run(self):
        raise NotImplementedError

    def check(self, name, passed):
        self.verdicts[name] = bool(passed)

    def stat(self, **kwargs):
        self.statistics.update(kwargs)

    def check_expected(self):
        """Compare ``expected`` entries against recorded statistics"""
        expected = self.config.get("expected") or {}
        tol = self.config.tolerance("expected", 1e-6)
        for name, value in expected.items():
            actual = self.statistics.get(name)
            ok = isinstance(actual, (int, float)) and abs(actual - value) <= tol
            self.check(f"expected.{name}", ok)

    def write_series(self, name, seq):
        """Write ``n,value`` rows; log-form sequences are written as log|value|"""
        if isinstance(seq, LogTrajectory):
            name, rows = f"log_abs_{name}", zip(seq.indices, seq.log_abs)
        elif hasattr(seq, "indices"):
            rows = zip(seq.indices, seq.values)
        else:
            rows = seq
        if not self.config["output"].get("csv", True):
            return
        os.makedirs(self.out_dir, exist_ok=True)
        path = os.path.join(self.out_dir, f"{name}.csv")
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["n", "value"])
            for n, value in rows:
                writer.writerow([int(n), repr(float(value))])
        self.series[name] = path

    def success(self, wall_clock):
        return Report(self.config.mode, self.config.echo(), verdicts=self.verdicts,
                      statistics=self.statistics, series=self.series, wall_clock=wall_clock)

    def fail(self, error="fail", errors=None, wall_clock=0.0):
        return Report(self.config.mode, self.config.echo(), status=error,
                      verdicts=self.verdicts, statistics=self.statistics,
                      series=self.series, wall_clock=wall_clock, errors=errors)

    def execute(self):
        start = time.perf_counter()
        try:
            self.run()
            self.check_expected()
        except LabError as e:
            logging.error("%s failed: %s", self.config.mode, e)
            return self.fail(error=e.slug, wall_clock=time.perf_counter() - start,
                             errors=[{"path": getattr(e, "path", ""),
                                      "message": f"{self.config.mode}: {e}"}])
        except Exception as e:
            self.log_exception(e)
            return self.fail(error="exception", wall_clock=time.perf_counter() - start,
                             errors=[{"path": "", "message": f"{self.config.mode}: {e!r}"}])
        return self.success(time.perf_counter() - start)

    def log_exception(self, value):
        logging.error("Uncaught exception in mode %s", self.config.mode, exc_info=value)
