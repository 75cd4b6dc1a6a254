#! /usr/bin/env python3
"""Run ledger management: syncdb, dropdb, history"""

import eva.management


def main():
    eva.management.main()


if __name__ == "__main__":
    main()
