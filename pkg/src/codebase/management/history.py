import json

from eva.conf import settings
from eva.management.common import EvaManagementCommand

from codebase.models import Run
from codebase.utils.sqlalchemy import dbc


def recent_runs(session, limit):
    return session.query(Run).order_by(Run.created.desc(), Run.id.desc()).limit(limit).all()


class Command(EvaManagementCommand):
    def __init__(self):
        super(Command, self).__init__()

        self.cmd = "history"
        self.help = "list the most recent recorded runs"

    def run(self):
        session = dbc.session()
        for run in recent_runs(session, int(settings.HISTORY_LIMIT)):
            print(json.dumps(run.isimple, sort_keys=True))
        dbc.session.remove()
