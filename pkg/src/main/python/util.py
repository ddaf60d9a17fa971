# SPDX-License-Identifier: GPL-2.0-or-later
import json
import logging
import os
import pathlib
from logging.handlers import RotatingFileHandler

from constants import LOG_FILE, LOG_MAX_BYTES, LOG_BACKUPS

SETTINGS_PATH = pathlib.Path(__file__).resolve().parents[2] / "build" / "settings" / "base.json"


def init_logger(directory=None, level=logging.INFO):
    logging.basicConfig(level=level)
    root = logging.getLogger()
    root.setLevel(level)
    # one log file per run directory
    for old in [h for h in root.handlers if isinstance(h, RotatingFileHandler)]:
        root.removeHandler(old)
        old.close()
    if directory is None:
        return
    pathlib.Path(directory).mkdir(parents=True, exist_ok=True)
    path = os.path.join(directory, LOG_FILE)
    handler = RotatingFileHandler(path, maxBytes=LOG_MAX_BYTES, backupCount=LOG_BACKUPS)
    handler.setFormatter(logging.Formatter("%(asctime)s - %(levelname)s - %(module)s:%(lineno)d - %(message)s"))
    root.addHandler(handler)


def build_settings():
    with open(SETTINGS_PATH, "r") as inf:
        return json.load(inf)


def app_version():
    settings = build_settings()
    return "{} {}".format(settings["app_name"], settings["version"])


def write_frame(frame, directory, name):
    """ Writes a table with a header row, returns the path """
    pathlib.Path(directory).mkdir(parents=True, exist_ok=True)
    path = os.path.join(directory, name)
    frame.to_csv(path, index=False)
    return path


def write_json(data, directory, name):
    pathlib.Path(directory).mkdir(parents=True, exist_ok=True)
    path = os.path.join(directory, name)
    with open(path, "w") as outf:
        json.dump(data, outf, indent=2, sort_keys=True)
    return path


def safe_filename(text):
    return "".join(c if c.isalnum() or c in "-_." else "_" for c in text)
