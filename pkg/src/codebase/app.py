import json
import logging
import os

from eva.conf import settings

from codebase.config import ExperimentConfig
from codebase.lab.errors import ConfigError
from codebase.models import Run
from codebase.modes import HANDLERS
from codebase.utils.sqlalchemy import dbc


class Runner:
    def __init__(self):
        self.db_session = dbc.session
        self.handlers = dict(HANDLERS)

    @property
    def db(self):
        return self.db_session()

    def run(self, config, out_dir=None):
        if not isinstance(config, ExperimentConfig):
            config = ExperimentConfig(config)
        if config.mode not in self.handlers:
            raise ConfigError(f"unknown mode {config.mode!r}", path="mode")
        out_dir = out_dir or config["output"].get("dir") or settings.OUTPUT_DIR

        logging.info("running %s (seed %d, horizon %d)", config.mode, config.seed, config.horizon)
        report = self.handlers[config.mode](self, config, out_dir).execute()
        logging.info("%s finished with status %s, passed=%s in %.2fs",
                     config.mode, report.status, report.passed, report.wall_clock)

        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "report.json"), "w") as f:
            f.write(report.to_json())
        if settings.RECORD_RUNS == "true":
            self.record(report)
        return report

    def record(self, report):
        run = Run(
            mode=report.mode,
            status=report.status,
            passed=report.passed,
            seed=report.config.get("seed"),
            wall_clock=report.wall_clock,
            config=json.dumps(report.ifull["config"], sort_keys=True),
            report=report.to_json(),
        )
        self.db.add(run)
        self.db.commit()
        self.db_session.remove()


def make_runner():
    return Runner()


def run_experiment(config, out_dir=None):
    """Dispatch ``config`` to its mode handler and return the Report"""
    return make_runner().run(config, out_dir)


def verify_nonlinear(config, out_dir=None):
    """Nonlinear solution against its linearisation at infinity, end to end"""
    if isinstance(config, dict):
        config = dict(config, mode="verify-nonlinear")
    elif config.mode != "verify-nonlinear":
        raise ConfigError("verify_nonlinear needs mode verify-nonlinear", path="mode")
    return run_experiment(config, out_dir)
