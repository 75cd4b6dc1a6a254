# pylint: disable=R0902,E1101,W0201,too-few-public-methods,W0613

import datetime
import json
import uuid

from sqlalchemy_utils import UUIDType
from eva.utils.time_ import utc_rfc3339_string
from sqlalchemy import (
    Boolean,
    Column,
    DateTime,
    Float,
    Integer,
    Sequence,
    String,
    Text,
)

from codebase.utils.sqlalchemy import ORMBase


class Run(ORMBase):
    """Ledger entry for one experiment run"""

    __tablename__ = "volterra_run"

    id = Column(Integer, Sequence("volterra_run_id_seq"), primary_key=True)
    uuid = Column(UUIDType(), default=uuid.uuid4, unique=True)
    mode = Column(String(64))

    # success / error slug
    status = Column(String(64))
    passed = Column(Boolean, default=False)

    seed = Column(Integer)
    wall_clock = Column(Float)

    # echoed config and the full report, both JSON
    config = Column(Text)
    report = Column(Text)

    created = Column(DateTime(), default=datetime.datetime.utcnow)

    @property
    def isimple(self):
        return {
            "id": str(self.uuid),
            "mode": self.mode,
            "status": self.status,
            "passed": self.passed,
            "seed": self.seed,
            "wall_clock": self.wall_clock,
            "created": utc_rfc3339_string(self.created),
        }

    @property
    def ifull(self):
        d = self.isimple
        d.update(config=json.loads(self.config), report=json.loads(self.report))
        return d
