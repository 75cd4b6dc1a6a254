# pylint: disable=C0111,C0103
"""Run ledger storage

The ledger is optional: runs are only written when RECORD_RUNS is set,
and the default DB_URI is an in-memory sqlite database.
"""

import logging
from importlib import import_module

from sqlalchemy import create_engine
from sqlalchemy.orm import scoped_session, sessionmaker
from sqlalchemy.ext.declarative import declarative_base

from eva.conf import settings


ORMBase = declarative_base()


class DBC:
    """Engine plus a thread-local session factory

    http://docs.sqlalchemy.org/en/latest/orm/contextual.html
    """

    def __init__(self, db_uri=None):
        self.db_uri = db_uri or settings.DB_URI
        self.engine = create_engine(self.db_uri, echo=False)
        self.session = scoped_session(sessionmaker(bind=self.engine))

    @staticmethod
    def tables():
        """Ledger tables declared by MODELS_MODULE"""
        import_module(settings.MODELS_MODULE)
        return sorted(ORMBase.metadata.tables)

    def create_all(self):
        tables = self.tables()
        self.session.remove()
        ORMBase.metadata.create_all(self.engine)
        logging.debug("ledger tables ready: %s", ", ".join(tables))
        return tables

    def drop_all(self):
        tables = self.tables()
        self.session.remove()
        ORMBase.metadata.drop_all(self.engine)
        return tables


dbc = DBC()
