"""Experiment configuration documents

A config is a single JSON document validated against the
``ExperimentConfig`` definition in schema.yml. Defaults are merged in
before validation so that the echoed config describes the run fully.
"""

import json
import math

from eva.conf import settings

from codebase.lab.asymptotics import ConvexFunctional, ScalingModel
from codebase.lab.catalogue import make_kernel, make_nonlinearity
from codebase.lab.errors import ConfigError, ParameterError
from codebase.lab.stochastic import generate, make_generator, make_tail
from codebase.utils.common import merged
from codebase.utils.schema import api

DEFAULTS = {
    "kernel": {"name": "zero"},
    "horizon": 1000,
    "xi": 0.0,
    "seed": 0,
    "log_domain": False,
    "tolerances": {},
    "output": {"csv": True},
}

# tolerance name -> settings key holding its default
TOLERANCE_SETTINGS = {
    "relative": "TOL_RELATIVE",
    "limsup_burn_in": "LIMSUP_BURN_IN",
    "limsup_zero_fraction": "LIMSUP_ZERO_FRACTION",
    "limsup_growth_factor": "LIMSUP_GROWTH_FACTOR",
    "lambda_iqr": "LAMBDA_IQR",
    "fluct_slack": "FLUCT_SLACK",
}

# fields each forcing kind needs
FORCING_REQUIRES = {
    "catalogue": ("name",),
    "iid": ("tail",),
    "random_walk": ("noise",),
    "geometric_random_walk": ("noise",),
    "modulated": ("base",),
    "explicit": ("values",),
}


class ExperimentConfig:

    def __init__(self, data, overrides=None):
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        data = merged(DEFAULTS, data)
        if overrides:
            data = merged(data, {k: v for k, v in overrides.items() if v is not None})
        api.validate("ExperimentConfig", data)
        self._check_forcing(data.get("forcing"))
        self._check_scaling(data.get("scaling"))
        self.data = data

    @classmethod
    def load(cls, path, overrides=None):
        try:
            with open(path) as f:
                data = json.load(f)
        except OSError as e:
            raise ConfigError(f"cannot read config: {e}")
        except json.JSONDecodeError as e:
            raise ConfigError(f"not a JSON document: {e}")
        return cls(data, overrides)

    @staticmethod
    def _check_forcing(spec):
        if spec is None:
            return
        for name in FORCING_REQUIRES[spec["kind"]]:
            if name not in spec:
                raise ConfigError(f"forcing kind {spec['kind']!r} requires {name!r}",
                                  path=f"forcing.{name}")

    @staticmethod
    def _check_scaling(spec):
        if spec is None:
            return
        if "name" not in spec and "values" not in spec:
            raise ConfigError("scaling needs a catalogue name or explicit values", path="scaling")
        if "values" in spec and "lam" not in spec:
            raise ConfigError("explicit scaling values need their ratio limit", path="scaling.lam")

    def __getitem__(self, key):
        return self.data[key]

    def get(self, key, default=None):
        return self.data.get(key, default)

    @property
    def mode(self):
        return self.data["mode"]

    @property
    def horizon(self):
        return int(self.data["horizon"])

    @property
    def xi(self):
        return float(self.data["xi"])

    @property
    def seed(self):
        return int(self.data["seed"])

    @property
    def log_domain(self):
        return bool(self.data["log_domain"])

    def require(self, key):
        if key not in self.data:
            raise ConfigError(f"mode {self.mode!r} requires {key!r}", path=key)
        return self.data[key]

    def _build(self, key, builder, spec):
        try:
            return builder(spec)
        except ParameterError as e:
            raise ConfigError(str(e), path=key)

    def kernel(self):
        return self._build("kernel", make_kernel, self.data["kernel"])

    def generator(self, stream=0):
        return self._build("forcing", lambda s: make_generator(s, self.seed, stream),
                           self.require("forcing"))

    def forcing(self, stream=0):
        return generate(self.generator(stream), self.horizon, log_domain=self.log_domain)

    def scaling(self, horizon=None):
        spec = self.require("scaling")
        horizon = self.horizon if horizon is None else horizon

        def build(spec):
            if "values" in spec:
                return ScalingModel.from_values(spec["values"], spec["lam"],
                                                start=spec.get("start", 1))
            return ScalingModel.from_catalogue(spec["name"], spec.get("params", {}),
                                               horizon, start=spec.get("start"))
        return self._build("scaling", build, spec)

    def nonlinearity(self):
        return self._build("nonlinearity", make_nonlinearity,
                           self.data.get("nonlinearity", {"name": "identity"}))

    def phi(self):
        spec = self.data.get("phi", {})
        return self._build("phi", lambda s: ConvexFunctional(
            s.get("name", "power"), s.get("p", 2.0), s.get("c", 0.0)), spec)

    def tail(self):
        return self._build("tail", make_tail, self.require("tail"))

    def tolerance(self, name, default=None):
        tolerances = self.data["tolerances"]
        if name in tolerances:
            return float(tolerances[name])
        if name in TOLERANCE_SETTINGS:
            return float(getattr(settings, TOLERANCE_SETTINGS[name]))
        return default

    def limsup_options(self):
        return {
            "burn_in": self.tolerance("limsup_burn_in"),
            "zero_fraction": self.tolerance("limsup_zero_fraction"),
            "growth_factor": self.tolerance("limsup_growth_factor"),
        }

    @property
    def band(self):
        band = self.data.get("band")
        return tuple(band) if band else (-math.inf, math.inf)

    def echo(self):
        return merged({}, self.data)
