import sys

from eva.management.common import EvaManagementCommand
from sqlalchemy.exc import SQLAlchemyError

from codebase.models import Run
from codebase.utils.sqlalchemy import dbc


class Command(EvaManagementCommand):
    def __init__(self):
        super(Command, self).__init__()

        self.cmd = "dropdb"
        self.help = "drop the run ledger tables, discarding every recorded run"

    def run(self):
        if not self.args.ignore_env_check:
            print("refusing to drop the run ledger without --ignore-env-check")
            sys.exit(1)

        try:
            count = dbc.session().query(Run).count()
        except SQLAlchemyError:
            # ledger was never created
            count = 0
        dbc.drop_all()
        print(f"dropped {count} recorded runs")
