# pylint: disable=W0221,W0223

import math

from codebase.experiment import Experiment
from codebase.lab.stochastic import classify_tail, ensemble_verify, envelope_sums


class ClassifyTailExperiment(Experiment):
    """Rapid (super-slowly varying) tail vs regularly varying tail"""

    def run(self):
        tail = self.config.tail()
        verdict = classify_tail(tail)
        self.stat(tail=tail.isimple, **verdict.isimple)
        self.write_series("ssv_deviation", list(enumerate(verdict.details["ssv_deviation"])))
        self.check("decided", verdict.verdict != "undecided")


class EnvelopeExperiment(Experiment):
    """Borel-Cantelli sums S_N(a, K) over a K grid"""

    def run(self):
        tail = self.config.tail()
        scale = self.config.scaling()
        K_grid = self.config.get("K_grid") or [round(0.5 + 0.1 * i, 10) for i in range(11)]
        report = envelope_sums(tail, scale.a, K_grid, self.config.horizon)

        self.stat(tail=tail.isimple, **report.isimple)
        for K, partial in report.series.items():
            self.write_series(f"S_K{K:g}", partial)
        self.check("crossing_found", report.crossing is not None)


class EnsembleExperiment(Experiment):
    """Seeded Monte-Carlo paths, one statistic per path"""

    def run(self):
        statistic = self.config.require("statistic")
        paths = int(self.config.get("paths", 20))
        result = ensemble_verify(self.config.echo(), paths, statistic, band=self.config.band)

        self.stat(**result.isimple)
        self.write_series("path_values",
                          [(i, v) for i, v in enumerate(result.values) if v is not None])
        if any(math.isfinite(b) for b in result.band):
            self.check("pass_fraction",
                       result.pass_fraction >= float(self.config.get("min_pass_fraction", 0.9)))
