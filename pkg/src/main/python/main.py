# SPDX-License-Identifier: GPL-2.0-or-later
import logging
import sys
import traceback

import cli


class UncaughtHook:

    def __init__(self):
        # this registers the exception_hook() function as hook with the Python interpreter
        self._previous = sys.excepthook
        sys.excepthook = self.exception_hook

    def exception_hook(self, exc_type, exc_value, exc_traceback):
        if issubclass(exc_type, KeyboardInterrupt):
            # ignore keyboard interrupt to support console applications
            sys.__excepthook__(exc_type, exc_value, exc_traceback)
            return
        log_msg = '\n'.join([''.join(traceback.format_tb(exc_traceback)),
                             '{0}: {1}'.format(exc_type.__name__, exc_value)])
        logging.error(log_msg)
        self._previous(exc_type, exc_value, exc_traceback)


if __name__ == '__main__':
    UncaughtHook()
    sys.exit(cli.main(sys.argv[1:]))
