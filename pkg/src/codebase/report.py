import datetime
import json

from eva.utils.time_ import utc_rfc3339_string

from codebase import __version__
from codebase.utils.common import jsonable, restored

FIELDS = ("status", "mode", "passed", "config", "verdicts", "statistics",
          "series", "wall_clock", "started", "version", "errors")


class Report:
    """Outcome of one experiment run"""

    def __init__(self, mode, config, status="success", verdicts=None, statistics=None,
                 series=None, wall_clock=0.0, started=None, version=__version__, errors=None,
                 passed=None):
        self.mode = mode
        self.config = config
        self.status = status
        self.verdicts = dict(verdicts or {})
        self.statistics = dict(statistics or {})
        self.series = dict(series or {})
        self.wall_clock = float(wall_clock)
        self.started = started or utc_rfc3339_string(datetime.datetime.utcnow())
        self.version = version
        self.errors = list(errors or [])
        self._passed = passed

    @property
    def passed(self):
        if self._passed is not None:
            return self._passed
        return self.status == "success" and all(self.verdicts.values())

    @property
    def failed_checks(self):
        return sorted(k for k, v in self.verdicts.items() if not v)

    @property
    def exit_code(self):
        if self.status != "success":
            return 1
        return 0 if self.passed else 2

    @property
    def ifull(self):
        return jsonable({
            "status": self.status,
            "mode": self.mode,
            "passed": self.passed,
            "config": self.config,
            "verdicts": self.verdicts,
            "statistics": self.statistics,
            "series": self.series,
            "wall_clock": self.wall_clock,
            "started": self.started,
            "version": self.version,
            "errors": self.errors,
        })

    def to_json(self):
        return json.dumps(self.ifull, sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, d):
        return cls(**{k: d[k] for k in FIELDS if k in d})

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(restored(json.loads(text)))
