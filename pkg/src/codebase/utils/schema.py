# pylint: disable=C0103,R0903

import os

import yaml

from bravado_core.spec import Spec
from bravado_core.validate import validate_object
from jsonschema.exceptions import ValidationError

from codebase.lab.errors import ConfigError


class Api:

    def __init__(self):
        curdir = os.path.dirname(__file__)
        self.spec_path = os.path.join(curdir, "../../codebase/schema.yml")
        with open(self.spec_path) as f:
            self.spec_dict = yaml.safe_load(f)
        self.spec = Spec.from_dict(self.spec_dict)

    def definition(self, name):
        return self.spec_dict["definitions"][name]

    def validate_object(self, object_spec, value):
        validate_object(self.spec, object_spec, value)

    def validate(self, name, value):
        """Validate against a named definition, raising ConfigError with the field path"""
        try:
            self.validate_object(self.definition(name), value)
        except ValidationError as e:
            parts = [str(p) for p in e.absolute_path]
            if e.validator == "additionalProperties" and isinstance(e.instance, dict):
                known = e.schema.get("properties", {})
                parts += sorted(k for k in e.instance if k not in known)[:1]
            raise ConfigError(e.message, path=".".join(parts))


api = Api()
